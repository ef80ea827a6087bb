//! Trivalent diagrams as flag structures, their linear and cyclic
//! orientations, admissible flag permutations, and small generators.
//!
//! Flags are numbered `0..3V`. Each vertex carries three flags, each edge
//! two. A cyclic orientation is one ordering of the three flags per vertex,
//! taken up to rotation. A linear orientation is a vertex order together
//! with a direction on each edge; two linear representatives agree iff the
//! number of reversed edges and the vertex permutation have the same sign.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json;
use crate::perm::{sort_sign, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrivalentDiagram {
    vertices: usize,
    flag_vertex: Vec<usize>,
    edges: Vec<(usize, usize)>,
    cyclic: Vec<[usize; 3]>,
    // Derived: edge index of each flag.
    flag_edge: Vec<usize>,
}

impl TrivalentDiagram {
    pub fn new(vertices: usize, flag_vertex: Vec<usize>, edges: Vec<(usize, usize)>, cyclic: Vec<[usize; 3]>) -> Result<Self> {
        let nf = flag_vertex.len();
        if nf != 3 * vertices {
            return Err(Error::Diagram(format!("{nf} flags for {vertices} trivalent vertices")));
        }
        if vertices % 2 == 1 {
            return Err(Error::Diagram(format!("odd number of vertices {vertices}")));
        }
        let mut count = vec![0usize; vertices];
        for (f, &v) in flag_vertex.iter().enumerate() {
            if v >= vertices {
                return Err(Error::Diagram(format!("flag {f} on missing vertex {v}")));
            }
            count[v] += 1;
        }
        if let Some(v) = count.iter().position(|&c| c != 3) {
            return Err(Error::Diagram(format!("vertex {v} has {} flags", count[v])));
        }
        let mut flag_edge = vec![usize::MAX; nf];
        for (e, &(a, b)) in edges.iter().enumerate() {
            for f in [a, b] {
                if f >= nf {
                    return Err(Error::Diagram(format!("edge {e} uses missing flag {f}")));
                }
                if flag_edge[f] != usize::MAX {
                    return Err(Error::Diagram(format!("flag {f} lies on two edges")));
                }
                flag_edge[f] = e;
            }
        }
        if let Some(f) = flag_edge.iter().position(|&e| e == usize::MAX) {
            return Err(Error::Diagram(format!("flag {f} lies on no edge")));
        }
        if cyclic.len() != vertices {
            return Err(Error::Diagram(format!("{} cyclic orders for {vertices} vertices", cyclic.len())));
        }
        for (v, ord) in cyclic.iter().enumerate() {
            let set: BTreeSet<usize> = ord.iter().copied().collect();
            let own: BTreeSet<usize> = (0..nf).filter(|&f| flag_vertex[f] == v).collect();
            if set != own {
                return Err(Error::Diagram(format!("cyclic order {ord:?} at vertex {v} is not its flag set {own:?}")));
            }
        }
        Ok(TrivalentDiagram { vertices, flag_vertex, edges, cyclic, flag_edge })
    }

    pub fn empty() -> Self {
        TrivalentDiagram { vertices: 0, flag_vertex: vec![], edges: vec![], cyclic: vec![], flag_edge: vec![] }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices
    }

    pub fn order(&self) -> usize {
        self.vertices / 2
    }

    pub fn num_flags(&self) -> usize {
        self.flag_vertex.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn cyclic(&self) -> &[[usize; 3]] {
        &self.cyclic
    }

    pub fn vertex_of(&self, f: usize) -> usize {
        self.flag_vertex[f]
    }

    pub fn edge_of(&self, f: usize) -> usize {
        self.flag_edge[f]
    }

    pub fn partner(&self, f: usize) -> usize {
        let (a, b) = self.edges[self.flag_edge[f]];
        if a == f {
            b
        } else {
            a
        }
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (a, b) = self.edges[e];
        self.flag_vertex[a] == self.flag_vertex[b]
    }

    pub fn has_loop(&self) -> bool {
        (0..self.edges.len()).any(|e| self.is_loop(e))
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &f in &self.cyclic[v] {
                let w = self.flag_vertex[self.partner(f)];
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Same flags and edges with a different cyclic order at each vertex.
    pub fn with_cyclic(&self, cyclic: Vec<[usize; 3]>) -> Result<Self> {
        Self::new(self.vertices, self.flag_vertex.clone(), self.edges.clone(), cyclic)
    }

    /// Symmetric multiplicity matrix; the diagonal counts loops.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut m = vec![vec![0; self.vertices]; self.vertices];
        for &(a, b) in &self.edges {
            let (u, v) = (self.flag_vertex[a], self.flag_vertex[b]);
            if u == v {
                m[u][u] += 1;
            } else {
                m[u][v] += 1;
                m[v][u] += 1;
            }
        }
        m
    }

    /// True if the underlying multigraphs are isomorphic (orientation ignored).
    pub fn isomorphic(&self, other: &TrivalentDiagram) -> bool {
        self.vertices == other.vertices && canonical_adjacency(&self.adjacency()) == canonical_adjacency(&other.adjacency())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = json::object(v, "")?;
        let vertices = json::usize_at(json::field(obj, "vertices", "")?, "/vertices")?;
        let flag_vertex = json::usize_list(json::field(obj, "flag_vertex", "")?, "/flag_vertex")?;
        let pairs = |key: &str, width: usize| -> Result<Vec<Vec<usize>>> {
            let path = format!("/{key}");
            json::array(json::field(obj, key, "")?, &path)?
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let p = format!("{path}/{i}");
                    let l = json::usize_list(x, &p)?;
                    if l.len() != width {
                        return Err(json::err(&p, format!("expected {width} flags")));
                    }
                    Ok(l)
                })
                .collect()
        };
        let edges = pairs("edges", 2)?.into_iter().map(|l| (l[0], l[1])).collect();
        let cyclic = pairs("cyclic", 3)?.into_iter().map(|l| [l[0], l[1], l[2]]).collect();
        Self::new(vertices, flag_vertex, edges, cyclic)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertices,
            "flag_vertex": self.flag_vertex,
            "edges": self.edges.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>(),
            "cyclic": self.cyclic,
        })
    }
}

/// A vertex order and a direction `(tail, head)` for every edge, indexed
/// like the diagram's edge list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearOrientRep {
    pub vertex_order: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl LinearOrientRep {
    fn check(&self, d: &TrivalentDiagram) -> Result<()> {
        Permutation::from_images(self.vertex_order.clone())
            .map_err(|_| Error::Choice(format!("vertex order {:?} is not a permutation", self.vertex_order)))?;
        if self.vertex_order.len() != d.vertices || self.edges.len() != d.edges.len() {
            return Err(Error::Choice("linear orientation does not match the diagram".into()));
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let (x, y) = d.edges[e];
            if !((a, b) == (x, y) || (a, b) == (y, x)) {
                return Err(Error::Choice(format!("edge {e} directed as ({a}, {b}) but joins {x}, {y}")));
            }
        }
        Ok(())
    }
}

/// `(−1)^n = sign(σ)` with `n` reversed edges and `σ` the vertex permutation.
pub fn orientation_equivalent(d: &TrivalentDiagram, r1: &LinearOrientRep, r2: &LinearOrientRep) -> Result<bool> {
    r1.check(d)?;
    r2.check(d)?;
    let flips = r1.edges.iter().zip(&r2.edges).filter(|(a, b)| a != b).count();
    let mut pos = vec![0; d.vertices];
    for (i, &v) in r1.vertex_order.iter().enumerate() {
        pos[v] = i;
    }
    let seq: Vec<usize> = r2.vertex_order.iter().map(|&v| pos[v]).collect();
    let edge_sign = if flips % 2 == 0 { 1 } else { -1 };
    Ok(sort_sign(&seq) == edge_sign)
}

/// Linear representative of the cyclic orientation class: vertices in
/// index order, flags listed vertex by vertex in their cyclic order; edges
/// are directed so that pairing consecutive flags edge by edge is an even
/// rearrangement of that list.
pub fn cyclic_to_linear(d: &TrivalentDiagram) -> LinearOrientRep {
    let mut seq: Vec<usize> = d.cyclic.iter().flatten().copied().collect();
    let mut edges = d.edges.clone();
    while !seq.is_empty() {
        let f = seq[0];
        let p = d.partner(f);
        let j = seq.iter().position(|&x| x == p).expect("partner present");
        let e = d.flag_edge[f];
        // Moving p next to f takes j − 1 adjacent transpositions.
        edges[e] = if (j - 1) % 2 == 0 { (f, p) } else { (p, f) };
        seq.remove(j);
        seq.remove(0);
    }
    LinearOrientRep { vertex_order: (0..d.vertices).collect(), edges }
}

/// Cyclic orders at each vertex realizing the class of `rep`.
pub fn linear_to_cyclic(d: &TrivalentDiagram, rep: &LinearOrientRep) -> Result<Vec<[usize; 3]>> {
    if orientation_equivalent(d, &cyclic_to_linear(d), rep)? {
        return Ok(d.cyclic.clone());
    }
    let mut cyclic = d.cyclic.clone();
    let Some(first) = cyclic.first_mut() else {
        return Err(Error::Diagram("the empty diagram has one orientation".into()));
    };
    first.reverse();
    Ok(cyclic)
}

/// True if `a` is a rotation of `b`.
pub fn is_rotation(a: &[usize; 3], b: &[usize; 3]) -> bool {
    (0..3).any(|r| (0..3).all(|i| a[i] == b[(i + r) % 3]))
}

/// Choices fixing one admissible permutation: a linear orientation, an
/// order on the edges, and a flag order at each vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleChoices {
    pub linear: LinearOrientRep,
    pub edge_order: Vec<usize>,
    pub flag_orders: Vec<[usize; 3]>,
}

impl AdmissibleChoices {
    pub fn canonical(d: &TrivalentDiagram) -> Self {
        AdmissibleChoices {
            linear: cyclic_to_linear(d),
            edge_order: (0..d.edges.len()).collect(),
            flag_orders: d.cyclic.clone(),
        }
    }

    /// Uniformly random vertex order, edge order, directions and
    /// rotations, with one edge reversed if needed to stay in the class.
    pub fn random<R: Rng>(d: &TrivalentDiagram, rng: &mut R) -> Self {
        let mut vertex_order: Vec<usize> = (0..d.vertices).collect();
        vertex_order.shuffle(rng);
        let mut edge_order: Vec<usize> = (0..d.edges.len()).collect();
        edge_order.shuffle(rng);
        let mut edges = d.edges.clone();
        for e in edges.iter_mut() {
            if rng.gen_bool(0.5) {
                *e = (e.1, e.0);
            }
        }
        let flag_orders = d
            .cyclic
            .iter()
            .map(|c| {
                let r = rng.gen_range(0..3);
                [c[r], c[(r + 1) % 3], c[(r + 2) % 3]]
            })
            .collect();
        let mut linear = LinearOrientRep { vertex_order, edges };
        if !d.edges.is_empty() && !orientation_equivalent(d, &cyclic_to_linear(d), &linear).unwrap_or(true) {
            linear.edges[0] = (linear.edges[0].1, linear.edges[0].0);
        }
        AdmissibleChoices { linear, edge_order, flag_orders }
    }

    /// Position of each flag in the vertex-grouped list (`ν`) and in the
    /// edge-grouped list (`ε`).
    fn numberings(&self, d: &TrivalentDiagram) -> (Vec<usize>, Vec<usize>) {
        let nf = d.num_flags();
        let mut nu = vec![0; nf];
        for (j, &v) in self.linear.vertex_order.iter().enumerate() {
            for (i, &f) in self.flag_orders[v].iter().enumerate() {
                nu[f] = 3 * j + i;
            }
        }
        let mut eps = vec![0; nf];
        for (j, &e) in self.edge_order.iter().enumerate() {
            let (a, b) = self.linear.edges[e];
            eps[a] = 2 * j;
            eps[b] = 2 * j + 1;
        }
        (nu, eps)
    }
}

/// `σ = ε∘ν⁻¹`, sending the vertex-grouped position of each flag to its
/// edge-grouped position.
pub fn admissible_permutation(d: &TrivalentDiagram, ch: &AdmissibleChoices) -> Result<Permutation> {
    ch.linear.check(d)?;
    Permutation::from_images(ch.edge_order.clone())
        .ok()
        .filter(|p| p.len() == d.edges.len())
        .ok_or_else(|| Error::Choice(format!("edge order {:?} is not a permutation of the edges", ch.edge_order)))?;
    if ch.flag_orders.len() != d.vertices {
        return Err(Error::Choice("one flag order per vertex required".into()));
    }
    for (v, ord) in ch.flag_orders.iter().enumerate() {
        if !is_rotation(ord, &d.cyclic[v]) {
            return Err(Error::Choice(format!("flag order {ord:?} at vertex {v} is not a rotation of {:?}", d.cyclic[v])));
        }
    }
    if !orientation_equivalent(d, &cyclic_to_linear(d), &ch.linear)? {
        return Err(Error::Choice("linear orientation is not in the diagram's orientation class".into()));
    }
    let (nu, eps) = ch.numberings(d);
    let mut images = vec![0; d.num_flags()];
    for f in 0..d.num_flags() {
        images[nu[f]] = eps[f];
    }
    let sigma = Permutation::from_images(images)?;
    debug_assert!(sigma.is_even());
    Ok(sigma)
}

/// The diagram with the cyclic order at `v` reversed.
pub fn as_pair(d: &TrivalentDiagram, v: usize) -> Result<(TrivalentDiagram, TrivalentDiagram)> {
    if v >= d.vertices {
        return Err(Error::Diagram(format!("no vertex {v}")));
    }
    let mut cyclic = d.cyclic.clone();
    cyclic[v].reverse();
    Ok((d.clone(), d.with_cyclic(cyclic)?))
}

fn rotate_to_end(c: [usize; 3], f: usize) -> [usize; 3] {
    let p = c.iter().position(|&x| x == f).expect("flag at vertex");
    [c[(p + 1) % 3], c[(p + 2) % 3], c[p]]
}

/// The I, H and X diagrams around the internal edge `e`. With the flags
/// at the two ends written `(x, y, c_u)` and `(c_v, z, w)`, the I diagram
/// is `d` itself, H has `(y, z, c_u)` and `(x, c_v, w)`, X has
/// `(x, z, c_u)` and `(y, c_v, w)`; everything outside the two vertices
/// is unchanged.
pub fn ihx_triple(d: &TrivalentDiagram, e: usize) -> Result<(TrivalentDiagram, TrivalentDiagram, TrivalentDiagram)> {
    if e >= d.edges.len() {
        return Err(Error::Diagram(format!("no edge {e}")));
    }
    if d.is_loop(e) {
        return Err(Error::Diagram(format!("edge {e} is a loop")));
    }
    let (cu, cv) = d.edges[e];
    let (u, v) = (d.flag_vertex[cu], d.flag_vertex[cv]);
    let [x, y, _] = rotate_to_end(d.cyclic[u], cu);
    let r = rotate_to_end(d.cyclic[v], cv);
    let (z, w) = (r[0], r[1]);
    let build = |at_u: [usize; 3], at_v: [usize; 3]| -> Result<TrivalentDiagram> {
        let mut fv = d.flag_vertex.clone();
        for f in at_u {
            fv[f] = u;
        }
        for f in at_v {
            fv[f] = v;
        }
        let mut cyclic = d.cyclic.clone();
        cyclic[u] = at_u;
        cyclic[v] = at_v;
        TrivalentDiagram::new(d.vertices, fv, d.edges.clone(), cyclic)
    };
    let i = build([x, y, cu], [cv, z, w])?;
    let h = build([y, z, cu], [x, cv, w])?;
    let xd = build([x, z, cu], [y, cv, w])?;
    Ok((i, h, xd))
}

fn canonical_adjacency(m: &[Vec<usize>]) -> Vec<usize> {
    let n = m.len();
    let mut best: Option<Vec<usize>> = None;
    for p in Permutation::all(n) {
        let key: Vec<usize> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m[p.apply(i)][p.apply(j)]).collect();
        if best.as_ref().map_or(true, |b| key < *b) {
            best = Some(key);
        }
    }
    best.unwrap_or_default()
}

/// Diagram with vertex `v` carrying flags `3v, 3v+1, 3v+2` in that cyclic
/// order, realizing a multiplicity matrix.
fn from_adjacency(m: &[Vec<usize>]) -> Result<TrivalentDiagram> {
    let n = m.len();
    let mut next = vec![0usize; n];
    let mut take = |v: usize| {
        let f = 3 * v + next[v];
        next[v] += 1;
        f
    };
    let mut edges = Vec::new();
    for i in 0..n {
        for _ in 0..m[i][i] {
            edges.push((take(i), take(i)));
        }
        for j in i + 1..n {
            for _ in 0..m[i][j] {
                edges.push((take(i), take(j)));
            }
        }
    }
    let flag_vertex = (0..3 * n).map(|f| f / 3).collect();
    let cyclic = (0..n).map(|v| [3 * v, 3 * v + 1, 3 * v + 2]).collect();
    TrivalentDiagram::new(n, flag_vertex, edges, cyclic)
}

/// All trivalent diagrams with `2k` vertices up to isomorphism (loops,
/// multi-edges and disconnected diagrams included), each carrying the
/// default cyclic orientation.
pub fn enumerate_trivalent(k: usize) -> Result<Vec<TrivalentDiagram>> {
    if k > 3 {
        return Err(Error::TooLarge(format!("diagram enumeration is limited to order 3, asked for {k}")));
    }
    let n = 2 * k;
    if n == 0 {
        return Ok(vec![TrivalentDiagram::empty()]);
    }
    let mut found: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
    let mut m = vec![vec![0usize; n]; n];
    fill(&mut m, 0, &mut found);
    found.values().map(|adj| from_adjacency(adj)).collect()
}

fn degree(m: &[Vec<usize>], i: usize) -> usize {
    2 * m[i][i] + (0..m.len()).filter(|&j| j != i).map(|j| m[i][j]).sum::<usize>()
}

// Fills row `i` (loops, then edges to later vertices) so vertex `i` has
// degree three, recursing on the next row.
fn fill(m: &mut Vec<Vec<usize>>, i: usize, found: &mut BTreeMap<Vec<usize>, Vec<Vec<usize>>>) {
    let n = m.len();
    if i == n {
        found.entry(canonical_adjacency(m)).or_insert_with(|| m.clone());
        return;
    }
    let have = degree(m, i);
    if have > 3 {
        return;
    }
    for loops in 0..=(3 - have) / 2 {
        m[i][i] = loops;
        let need = 3 - have - 2 * loops;
        distribute(m, i, i + 1, need, found);
        m[i][i] = 0;
    }
}

fn distribute(m: &mut Vec<Vec<usize>>, i: usize, j: usize, need: usize, found: &mut BTreeMap<Vec<usize>, Vec<Vec<usize>>>) {
    let n = m.len();
    if need == 0 {
        fill(m, i + 1, found);
        return;
    }
    if j == n {
        return;
    }
    let room = 3 - degree(m, j);
    for mult in (0..=need.min(room)).rev() {
        m[i][j] = mult;
        m[j][i] = mult;
        distribute(m, i, j + 1, need - mult, found);
    }
    m[i][j] = 0;
    m[j][i] = 0;
}

/// Theta graph: two vertices joined by three edges.
pub fn theta() -> TrivalentDiagram {
    from_adjacency(&[vec![0, 3], vec![3, 0]]).expect("theta is trivalent")
}

/// Two loops joined by an edge.
pub fn dumbbell() -> TrivalentDiagram {
    from_adjacency(&[vec![1, 1], vec![1, 1]]).expect("dumbbell is trivalent")
}
