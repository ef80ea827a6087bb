//! Weight cocycles and classes of trivalent and chord diagrams, with the
//! AS, IHX, 4T and 1T relation checks and the deframing projector.
//!
//! A trivalent diagram of order `k` is evaluated by placing `R̃(a)` at each
//! vertex and contracting the two flags of every edge with `ω⁻¹`, directed
//! tail to head; the resulting element of `(h*)^⊗2k` is antisymmetrized
//! over `S_2k` without normalization. Chord diagrams use the curvature
//! cocycle of a module `E` at each point, compose the `End(E)` parts along
//! the circle and take the trace.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::ce::{self, form_to_json};
use crate::chord::{chord_vertex_order, ChordDiagram, FourTerm};
use crate::connections::{bianchi_psi, lower_last, psi_primitive, quotient_tensor, tilde_cocycle, Connection, SymplecticForm};
use crate::diagrams::{admissible_permutation, as_pair, ihx_triple, AdmissibleChoices, TrivalentDiagram};
use crate::error::{Error, Result};
use crate::forms::{combinations, shuffle_wedge, CochainForm, Slot};
use crate::liepair::{LiePair, ModuleRep};
use crate::network::{Node, Plan};
use crate::perm::Permutation;
use crate::scalar::{format, Scalar};
use crate::tensor::{contract, Entry, SparseTensor};

/// How independent evaluations are scheduled. Without the `parallel`
/// feature both modes run sequentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    Parallel,
}

impl Default for Mode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Mode::Parallel
        } else {
            Mode::Sequential
        }
    }
}

pub(crate) fn map_items<T, U, F>(mode: Mode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

fn matrix_tensor(m: &crate::linalg::Matrix) -> Result<SparseTensor> {
    SparseTensor::from_matrix(&m.to_rows())
}

/// Clears denominators: `(D·t, D)` with `D` the least common denominator.
fn integral(t: &SparseTensor) -> (SparseTensor<BigInt>, BigInt) {
    let den = t.entries().fold(BigInt::one(), |d, (_, x)| d.lcm(x.denom()));
    let mut out = SparseTensor::zeros(t.shape().to_vec());
    for (idx, x) in t.entries() {
        out.set(idx.clone(), x.numer() * (&den / x.denom()));
    }
    (out, den)
}

/// `Σ_σ sign(σ) T[t_σ(1),…,t_σ(deg)] / den` for every increasing tuple `t`.
fn antisymmetrize(mode: Mode, dim_h: usize, t: &SparseTensor<BigInt>, den: &BigInt) -> CochainForm {
    let degree = t.order();
    let mut out = CochainForm::zero_scalar(dim_h, degree);
    if degree > dim_h {
        return out;
    }
    let perms = Permutation::all(degree);
    let tuples = combinations(dim_h, degree);
    let values = map_items(mode, &tuples, |tuple| {
        let mut acc = BigInt::zero();
        for sigma in &perms {
            let idx: Vec<usize> = (0..degree).map(|j| tuple[sigma.apply(j)]).collect();
            let x = t.get(&idx);
            if sigma.is_even() {
                acc += x;
            } else {
                acc -= x;
            }
        }
        Scalar::new(acc, den.clone())
    });
    for (tuple, x) in tuples.iter().zip(values) {
        out.add_at(tuple, 0, x);
    }
    out
}

/// Contracts a network in which node `j < degree` carries one open
/// `h`-axis in front, labelled `open[j]`. The work is split over the value
/// of node 0's `h`-index; the result has the open axes in node order.
fn open_network<T: Entry>(mode: Mode, dim_h: usize, nodes: &[Node<T>], open: &[usize], dim: impl Fn(usize) -> usize) -> Result<SparseTensor<T>> {
    let degree = open.len();
    if degree == 0 {
        let plan = Plan::greedy(&nodes.iter().map(|n| n.labels.clone()).collect::<Vec<_>>(), &dim);
        return plan.execute(nodes.to_vec(), &[]);
    }
    let mut labels: Vec<Vec<usize>> = nodes.iter().map(|n| n.labels.clone()).collect();
    labels[0].remove(0);
    let plan = Plan::greedy(&labels, &dim);
    let firsts: Vec<usize> = (0..dim_h).collect();
    let pieces = map_items(mode, &firsts, |&a| -> Result<SparseTensor<T>> {
        let mut local = nodes.to_vec();
        local[0] = Node { tensor: slice_first(&nodes[0].tensor, a), labels: labels[0].clone() };
        plan.execute(local, &open[1..])
    });
    let mut out = SparseTensor::zeros(vec![dim_h; degree]);
    for (a, piece) in pieces.into_iter().enumerate() {
        for (idx, x) in piece?.entries() {
            let mut full = Vec::with_capacity(degree);
            full.push(a);
            full.extend_from_slice(idx);
            out.set(full, x.clone());
        }
    }
    Ok(out)
}

/// The sub-tensor with the first index fixed to `a`.
fn slice_first<T: Entry>(t: &SparseTensor<T>, a: usize) -> SparseTensor<T> {
    let mut out = SparseTensor::zeros(t.shape()[1..].to_vec());
    for (idx, x) in t.entries() {
        if idx[0] == a {
            out.set(idx[1..].to_vec(), x.clone());
        }
    }
    out
}

/// Stacks equally shaped tensors along a new first axis.
fn stack<T: Entry>(parts: &[SparseTensor<T>]) -> SparseTensor<T> {
    let mut shape = vec![parts.len()];
    shape.extend_from_slice(parts.first().map_or(&[][..], |p| p.shape()));
    let mut out = SparseTensor::zeros(shape);
    for (a, p) in parts.iter().enumerate() {
        for (idx, x) in p.entries() {
            let mut full = vec![a];
            full.extend_from_slice(idx);
            out.set(full, x.clone());
        }
    }
    out
}

/// A class in `H^deg(h)`: the cocycle and its coordinates in the computed
/// cohomology basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightClass {
    pub cocycle: CochainForm,
    pub cohomology_dim: usize,
    pub coordinates: Vec<Scalar>,
}

impl WeightClass {
    pub fn of(rep: &ModuleRep, cocycle: CochainForm) -> Result<WeightClass> {
        let h = ce::cohomology(rep, cocycle.degree())?;
        let coordinates = h.coordinates(&cocycle)?;
        Ok(WeightClass { cocycle, cohomology_dim: h.dim(), coordinates })
    }

    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(|x| x == &Scalar::from_integer(0.into()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cocycle": form_to_json(&self.cocycle),
            "cohomology_dim": self.cohomology_dim,
            "coordinates": self.coordinates.iter().map(format).collect::<Vec<_>>(),
        })
    }
}

/// Trivalent weights for one symplectic pair and connection on `q`.
#[derive(Debug, Clone)]
pub struct TrivalentWeights {
    pair: LiePair,
    omega: SymplecticForm,
    // R̃(a) as a tensor on q*⊗q*⊗q*, one per basis vector of h.
    tilde: Vec<SparseTensor>,
    poisson: SparseTensor,
    mode: Mode,
}

impl TrivalentWeights {
    /// Any connection on `q` extending the action is accepted; the class
    /// does not depend on it, the cocycle does.
    pub fn new(c: &Connection, w: &SymplecticForm) -> Result<Self> {
        if !c.is_on_quotient() {
            return Err(Error::InvalidModule("trivalent weights need a connection on q".into()));
        }
        let pair = c.pair().clone();
        let n = pair.dim_q();
        if w.dim() != n {
            return Err(Error::Shape(format!("form of size {} on q of dimension {n}", w.dim())));
        }
        let rt = tilde_cocycle(&c.atiyah_cocycle()?, w)?;
        let tilde = (0..pair.dim_h())
            .map(|a| {
                let mut t = SparseTensor::zeros(vec![n; 3]);
                if let Some(v) = rt.component(&[a]) {
                    for (i, x) in v {
                        t.set(vec![i / (n * n), (i / n) % n, i % n], x.clone());
                    }
                }
                t
            })
            .collect();
        let poisson = matrix_tensor(w.inverse())?;
        Ok(TrivalentWeights { pair, omega: w.clone(), tilde, poisson, mode: Mode::default() })
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn pair(&self) -> &LiePair {
        &self.pair
    }

    pub fn omega(&self) -> &SymplecticForm {
        &self.omega
    }

    /// `R̃(a)` as an order-3 tensor.
    pub fn vertex_tensor(&self, a: usize) -> &SparseTensor {
        &self.tilde[a]
    }

    pub fn scalars(&self) -> ModuleRep {
        ModuleRep::scalars(self.pair.h_algebra())
    }

    /// The weight cocycle for one admissible choice (canonical if `None`).
    pub fn cocycle(&self, d: &TrivalentDiagram, choices: Option<&AdmissibleChoices>) -> Result<CochainForm> {
        let canonical;
        let ch = match choices {
            Some(c) => c,
            None => {
                canonical = AdmissibleChoices::canonical(d);
                &canonical
            }
        };
        admissible_permutation(d, ch)?;
        let degree = 2 * d.order();
        let m = self.pair.dim_h();
        if degree > m {
            return Ok(CochainForm::zero_scalar(m, degree));
        }
        // Vertex tensors with every tail slot raised by ω⁻¹; axes are the
        // h-index followed by one axis per incident edge.
        let ne = d.edges().len();
        let mut nodes = Vec::with_capacity(d.num_vertices());
        let mut total_den = BigInt::one();
        for (j, &v) in ch.linear.vertex_order.iter().enumerate() {
            let flags = ch.flag_orders[v];
            let tails: Vec<usize> = (0..3).filter(|&i| ch.linear.edges[d.edge_of(flags[i])].0 == flags[i]).collect();
            let mut order: Vec<usize> = (0..3).filter(|i| !tails.contains(i)).collect();
            order.extend(&tails);
            let mut labels = vec![ne + j];
            labels.extend(order.iter().map(|&i| d.edge_of(flags[i])));
            let per_a = self
                .tilde
                .iter()
                .map(|t| {
                    // Each contraction moves the raised slot to the end.
                    let mut cur = t.clone();
                    let mut pos: Vec<usize> = vec![0, 1, 2];
                    for &s in &tails {
                        let axis = pos.iter().position(|&p| p == s).expect("slot present");
                        cur = contract(&cur, &[axis], &self.poisson, &[0])?;
                        pos.remove(axis);
                        pos.push(s);
                    }
                    Ok(cur)
                })
                .collect::<Result<Vec<_>>>()?;
            let (t, den) = integral(&stack(&per_a));
            total_den *= den;
            nodes.push(Node::new(t, labels)?);
        }
        let n = self.pair.dim_q();
        let open: Vec<usize> = (ne..ne + degree).collect();
        let t = open_network(self.mode, m, &nodes, &open, |l| if l < ne { n } else { m })?;
        Ok(antisymmetrize(self.mode, m, &t, &total_den))
    }

    pub fn class(&self, d: &TrivalentDiagram, choices: Option<&AdmissibleChoices>) -> Result<WeightClass> {
        WeightClass::of(&self.scalars(), self.cocycle(d, choices)?)
    }

    /// `w(d) + w(d with the cyclic order at v reversed) = 0` exactly.
    pub fn check_as(&self, d: &TrivalentDiagram, v: usize) -> Result<bool> {
        let (a, b) = as_pair(d, v)?;
        Ok(self.cocycle(&a, None)?.add(&self.cocycle(&b, None)?)?.is_zero())
    }

    /// `w(d) + w(d with the cyclic order at v reversed)` is a coboundary;
    /// this is what survives for connections that are not symplectic.
    pub fn check_as_class(&self, d: &TrivalentDiagram, v: usize) -> Result<bool> {
        let (a, b) = as_pair(d, v)?;
        let z = self.cocycle(&a, None)?.add(&self.cocycle(&b, None)?)?;
        Ok(ce::is_coboundary(&self.scalars(), &z)?.is_some())
    }

    /// `w(I) − w(H) + w(X)` around edge `e`.
    pub fn ihx_combination(&self, d: &TrivalentDiagram, e: usize) -> Result<CochainForm> {
        let (i, h, x) = ihx_triple(d, e)?;
        self.cocycle(&i, None)?.sub(&self.cocycle(&h, None)?)?.add(&self.cocycle(&x, None)?)
    }

    /// The IHX combination is a coboundary.
    pub fn check_ihx(&self, d: &TrivalentDiagram, e: usize) -> Result<bool> {
        let z = self.ihx_combination(d, e)?;
        Ok(ce::is_coboundary(&self.scalars(), &z)?.is_some())
    }

    /// Report with the cocycle, its class and relation flags. AS and IHX
    /// are checked on classes.
    pub fn report(&self, d: &TrivalentDiagram) -> Result<Value> {
        let class = self.class(d, None)?;
        let closed = ce::is_closed(&self.scalars(), &class.cocycle)?;
        let as_ok = if d.num_vertices() == 0 { true } else { self.check_as_class(d, 0)? };
        let internal: Vec<usize> = (0..d.edges().len()).filter(|&e| !d.is_loop(e)).collect();
        let ihx = internal.iter().map(|&e| self.check_ihx(d, e)).collect::<Result<Vec<_>>>()?;
        Ok(json!({
            "order": d.order(),
            "degree": 2 * d.order(),
            "weight": class.to_json(),
            "relations": {
                "closed": closed,
                "as": as_ok,
                "ihx": ihx.iter().all(|&b| b),
            },
        }))
    }
}

/// `(ω⁻¹ ⊗ id^⊗4) ∘ τ ∘ (R̃ ∧ R̃)` for the I, H and X slot permutations,
/// 2-forms valued in `(q*)^⊗4`.
pub fn ihx_local_tensors(c: &Connection, w: &SymplecticForm) -> Result<(CochainForm, CochainForm, CochainForm)> {
    let n = w.dim();
    let rt = tilde_cocycle(&c.atiyah_cocycle()?, w)?;
    let wedge = shuffle_wedge(&rt, &rt)?;
    let p = w.inverse();
    let pair_first_two = |f: &CochainForm| {
        f.map_values(vec![Slot::q_dual(n); 4], |idx| {
            let rest = idx % n.pow(4);
            let (x1, x2) = (idx / n.pow(5), (idx / n.pow(4)) % n);
            let c = p[(x1, x2)].clone();
            if c == Scalar::from_integer(0.into()) {
                vec![]
            } else {
                vec![(rest, c)]
            }
        })
    };
    let local = |cycles: &[&[usize]]| -> Result<CochainForm> {
        Ok(pair_first_two(&wedge.permute_slots(&Permutation::from_cycles(6, cycles)?)?))
    };
    Ok((local(&[&[1, 3], &[2, 4]])?, local(&[&[1, 5, 2, 3, 4]])?, local(&[&[1, 3], &[2, 5]])?))
}

/// Both sides of `δ_I − δ_H + δ_X = ∂(ω ∘ (φ ⊗ id))` with `∂φ = ψ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IhxIdentity {
    pub lhs: CochainForm,
    pub rhs: CochainForm,
    pub primitive: CochainForm,
}

impl IhxIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn ihx_identity(c: &Connection, w: &SymplecticForm) -> Result<IhxIdentity> {
    let (di, dh, dx) = ihx_local_tensors(c, w)?;
    let lhs = di.sub(&dh)?.add(&dx)?;
    let psi = bianchi_psi(c, None)?;
    let phi = psi_primitive(c, &psi)?.ok_or_else(|| Error::NotClosed("ψ has no primitive".into()))?;
    let lowered = lower_last(&phi, w);
    let rep = quotient_tensor(c.pair(), 4, 0)?;
    let rhs = ce::ce_differential(&rep, &lowered)?;
    Ok(IhxIdentity { lhs, rhs, primitive: phi })
}

/// Chord-diagram weights for a module `E` with a connection extending its
/// action.
#[derive(Debug, Clone)]
pub struct ChordWeights {
    pair: LiePair,
    dim_e: usize,
    // R_E(a) as a tensor on q* ⊗ E* ⊗ E with axes (l, e_in, e_out).
    curvature: Vec<SparseTensor>,
    poisson: SparseTensor,
    mode: Mode,
}

impl ChordWeights {
    pub fn new(c: &Connection, w: &SymplecticForm) -> Result<Self> {
        let pair = c.pair().clone();
        let (n, d) = (pair.dim_q(), c.target_dim());
        if w.dim() != n {
            return Err(Error::Shape(format!("form of size {} on q of dimension {n}", w.dim())));
        }
        let r = c.atiyah_cocycle()?;
        let curvature = (0..pair.dim_h())
            .map(|a| {
                let mut t = SparseTensor::zeros(vec![n, d, d]);
                if let Some(v) = r.component(&[a]) {
                    for (i, x) in v {
                        t.set(vec![i / (d * d), (i / d) % d, i % d], x.clone());
                    }
                }
                t
            })
            .collect();
        Ok(ChordWeights { pair, dim_e: d, curvature, poisson: matrix_tensor(w.inverse())?, mode: Mode::default() })
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn scalars(&self) -> ModuleRep {
        ModuleRep::scalars(self.pair.h_algebra())
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    /// `Σ sign(σ) tr(R_E(a_σ1) ⋯ R_E(a_σ2k))` with the `q*` slots paired by
    /// `ω⁻¹` along the chords, points read from gap `origin`. The empty
    /// diagram gives the constant `dim E`.
    pub fn cocycle(&self, cd: &ChordDiagram, origin: usize) -> Result<CochainForm> {
        let order = chord_vertex_order(cd, origin)?;
        let np = cd.points();
        let m = self.pair.dim_h();
        if np > m {
            return Ok(CochainForm::zero_scalar(m, np));
        }
        // Labels: the q-slot of point j is j, the E link from point j to
        // j+1 is np + j, the h-index of point j is 2np + j.
        let link = |j: usize| np + j % np;
        let (n, d) = (self.pair.dim_q(), self.dim_e);
        if np == 0 {
            let mut out = CochainForm::zero_scalar(m, 0);
            out.add_at(&[], 0, Scalar::from_integer((d as i64).into()));
            return Ok(out);
        }
        let (full, den_r) = integral(&stack(&self.curvature));
        let (poisson, den_p) = integral(&self.poisson);
        let mut nodes: Vec<Node<BigInt>> =
            (0..np).map(|j| Node::new(full.clone(), vec![2 * np + j, j, link(j), link(j + np - 1)])).collect::<Result<_>>()?;
        for &(i, j) in &order.chords {
            nodes.push(Node::new(poisson.clone(), vec![i, j])?);
        }
        let total_den = num_traits::pow(den_r, np) * num_traits::pow(den_p, np / 2);
        let open: Vec<usize> = (2 * np..3 * np).collect();
        let t = open_network(self.mode, m, &nodes, &open, |l| {
            if l < np {
                n
            } else if l < 2 * np {
                d
            } else {
                m
            }
        })?;
        Ok(antisymmetrize(self.mode, m, &t, &total_den))
    }

    pub fn class(&self, cd: &ChordDiagram, origin: usize) -> Result<WeightClass> {
        WeightClass::of(&self.scalars(), self.cocycle(cd, origin)?)
    }

    /// `w(D_{i+}) − w(D_{i−}) + w(D_{j+}) − w(D_{j−})`, all read from gap 0.
    pub fn four_term_combination(&self, t: &FourTerm) -> Result<CochainForm> {
        let w = |cd: &ChordDiagram| self.cocycle(cd, 0);
        w(&t.after_i)?.sub(&w(&t.before_i)?)?.add(&w(&t.after_j)?)?.sub(&w(&t.before_j)?)
    }

    pub fn check_4t(&self, t: &FourTerm) -> Result<bool> {
        Ok(ce::is_coboundary(&self.scalars(), &self.four_term_combination(t)?)?.is_some())
    }

    /// Deframed weight `Σ_J (−s)^{n−|J|} ∧ w(D|_J)` over subsets `J` of the
    /// chords, with `s = w(θ) / dim E` so that the single chord `θ` maps
    /// to zero.
    pub fn deframed(&self, cd: &ChordDiagram, origin: usize) -> Result<CochainForm> {
        let theta = self.cocycle(&ChordDiagram::new(2, vec![(0, 1)])?, 0)?;
        let s = theta.scaled(&Scalar::new((-1).into(), (self.dim_e as i64).into()));
        deframe(cd.order(), &s, |keep| {
            let (sub, gap) = cd.restrict_at(keep, origin);
            self.cocycle(&sub, gap)
        })
    }

    /// Deframed weight through the diagram algebra:
    /// `Σ_J (−1)^{n−|J|} w(θ^{n−|J|} # D|_J)`, the isolated chords inserted
    /// at the origin.
    pub fn deframed_connected_sum(&self, cd: &ChordDiagram, origin: usize) -> Result<CochainForm> {
        let n = cd.order();
        let mut total = CochainForm::zero_scalar(self.pair.dim_h(), 2 * n);
        for mask in 0u32..(1 << n) {
            let keep: Vec<usize> = (0..n).filter(|&c| mask >> c & 1 == 1).collect();
            let (sub, gap) = cd.restrict_at(&keep, origin);
            let missing = n - keep.len();
            let term = self.cocycle(&sub.with_isolated_at(missing, gap)?, 0)?;
            total = if missing % 2 == 0 { total.add(&term)? } else { total.sub(&term)? };
        }
        Ok(total)
    }

    /// The deframed weight of a diagram with an isolated chord is a
    /// coboundary.
    pub fn check_1t(&self, cd: &ChordDiagram, origin: usize) -> Result<bool> {
        Ok(ce::is_coboundary(&self.scalars(), &self.deframed(cd, origin)?)?.is_some())
    }
}

/// `Σ_{J ⊆ {0..n}} s^{∧(n−|J|)} ∧ w(J)` for scalar forms; pass `−s` to get
/// the deframing projector.
pub fn deframe<F>(n: usize, s: &CochainForm, w: F) -> Result<CochainForm>
where
    F: Fn(&[usize]) -> Result<CochainForm>,
{
    let mut powers = vec![CochainForm::zero_scalar(s.dim_h(), 0)];
    powers[0].add_at(&[], 0, Scalar::from_integer(1.into()));
    for i in 1..=n {
        let next = shuffle_wedge(&powers[i - 1], s)?;
        powers.push(next);
    }
    let mut total = CochainForm::zero_scalar(s.dim_h(), s.degree() * n);
    for mask in 0u32..(1 << n) {
        let keep: Vec<usize> = (0..n).filter(|&c| mask >> c & 1 == 1).collect();
        let term = shuffle_wedge(&powers[n - keep.len()], &w(&keep)?)?;
        total = total.add(&term)?;
    }
    Ok(total)
}

/// Cup product of scalar classes, represented by the wedge of cocycles.
pub fn cup(a: &CochainForm, b: &CochainForm) -> Result<CochainForm> {
    shuffle_wedge(a, b)
}
