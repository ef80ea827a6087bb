//! Chord diagrams on an oriented circle, origin-induced orderings, and the
//! diagrams entering the 4T and 1T relations.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json;

/// `2k` points numbered `0..2k` in circle order, matched by `k` chords.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChordDiagram {
    points: usize,
    chords: Vec<(usize, usize)>,
}

impl ChordDiagram {
    pub fn new(points: usize, chords: Vec<(usize, usize)>) -> Result<Self> {
        if points % 2 == 1 {
            return Err(Error::Diagram(format!("odd number of points {points}")));
        }
        let mut seen = vec![false; points];
        for &(a, b) in &chords {
            for p in [a, b] {
                if p >= points {
                    return Err(Error::Diagram(format!("chord endpoint {p} outside 0..{points}")));
                }
                if seen[p] {
                    return Err(Error::Diagram(format!("point {p} used twice")));
                }
                seen[p] = true;
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(Error::Diagram(format!("point {p} is on no chord")));
        }
        Ok(ChordDiagram { points, chords })
    }

    pub fn empty() -> Self {
        ChordDiagram { points: 0, chords: vec![] }
    }

    /// Diagram from the circle sequence of chord labels: equal labels are
    /// the two ends of one chord.
    pub fn from_word(word: &[usize]) -> Result<Self> {
        let mut chords = Vec::new();
        let labels: BTreeSet<usize> = word.iter().copied().collect();
        for l in labels {
            let pos: Vec<usize> = (0..word.len()).filter(|&i| word[i] == l).collect();
            if pos.len() != 2 {
                return Err(Error::Diagram(format!("label {l} appears {} times", pos.len())));
            }
            chords.push((pos[0], pos[1]));
        }
        Self::new(word.len(), chords)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn order(&self) -> usize {
        self.chords.len()
    }

    pub fn chords(&self) -> &[(usize, usize)] {
        &self.chords
    }

    pub fn partner(&self, p: usize) -> usize {
        for &(a, b) in &self.chords {
            if a == p {
                return b;
            }
            if b == p {
                return a;
            }
        }
        panic!("point {p} not on a chord")
    }

    /// Sub-diagram on the chords listed in `keep` (indices into `chords`).
    pub fn restrict(&self, keep: &[usize]) -> ChordDiagram {
        let mut used: Vec<usize> = keep.iter().flat_map(|&c| [self.chords[c].0, self.chords[c].1]).collect();
        used.sort_unstable();
        let index = |p: usize| used.iter().position(|&x| x == p).expect("kept point");
        let chords = keep.iter().map(|&c| (index(self.chords[c].0), index(self.chords[c].1))).collect();
        ChordDiagram { points: used.len(), chords }
    }

    /// Sub-diagram on `keep` together with the gap that sits where `origin`
    /// sat: the gap before the first kept point at or after it.
    pub fn restrict_at(&self, keep: &[usize], origin: usize) -> (ChordDiagram, usize) {
        let sub = self.restrict(keep);
        let before = keep
            .iter()
            .flat_map(|&c| [self.chords[c].0, self.chords[c].1])
            .filter(|&p| p < origin)
            .count();
        let gap = if sub.points == 0 { 0 } else { before % sub.points };
        (sub, gap)
    }

    /// `m` isolated chords placed at gap `origin`, followed by this diagram
    /// read from that gap; the result is read from gap 0.
    pub fn with_isolated_at(&self, m: usize, origin: usize) -> Result<ChordDiagram> {
        let mut word: Vec<usize> = (0..m).flat_map(|c| [c, c]).collect();
        word.extend(self.word(origin).into_iter().map(|l| l + m));
        ChordDiagram::from_word(&word)
    }

    /// A chord whose ends are adjacent on the circle (no chord crosses it).
    pub fn has_isolated_chord(&self) -> bool {
        let n = self.points;
        self.chords.iter().any(|&(a, b)| {
            let d = if a > b { a - b } else { b - a };
            d == 1 || d == n - 1
        })
    }

    /// Word read from the point after gap `origin` once around the circle.
    pub fn word(&self, origin: usize) -> Vec<usize> {
        let mut label = vec![0; self.points];
        for (c, &(a, b)) in self.chords.iter().enumerate() {
            label[a] = c;
            label[b] = c;
        }
        (0..self.points).map(|i| label[(origin + i) % self.points]).collect()
    }

    /// Canonical representative up to rotation and relabelling of chords.
    pub fn canonical(&self) -> Vec<usize> {
        (0..self.points.max(1)).map(|o| relabel_first_seen(&self.word(o))).min().unwrap_or_default()
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = json::object(v, "")?;
        let points = json::usize_at(json::field(obj, "points", "")?, "/points")?;
        let chords = json::array(json::field(obj, "chords", "")?, "/chords")?
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let p = format!("/chords/{i}");
                let l = json::usize_list(c, &p)?;
                if l.len() != 2 {
                    return Err(json::err(&p, "a chord has two endpoints"));
                }
                Ok((l[0], l[1]))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, chords)
    }

    pub fn to_json(&self) -> Value {
        json!({"points": self.points, "chords": self.chords.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>()})
    }
}

fn relabel_first_seen(word: &[usize]) -> Vec<usize> {
    let mut map = std::collections::BTreeMap::new();
    word.iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Points in circle order from an origin, and each chord as the pair of
/// positions in that order (first appearance first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordOrder {
    pub points: Vec<usize>,
    pub chords: Vec<(usize, usize)>,
}

/// Gap `g` lies just before point `g`.
pub fn chord_vertex_order(cd: &ChordDiagram, origin: usize) -> Result<ChordOrder> {
    let n = cd.points;
    if n == 0 {
        return Ok(ChordOrder { points: vec![], chords: vec![] });
    }
    if origin >= n {
        return Err(Error::Diagram(format!("gap {origin} outside 0..{n}")));
    }
    let points: Vec<usize> = (0..n).map(|i| (origin + i) % n).collect();
    let pos = |p: usize| (p + n - origin) % n;
    let chords = cd
        .chords
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (pos(a), pos(b));
            (x.min(y), x.max(y))
        })
        .collect();
    Ok(ChordOrder { points, chords })
}

/// All chord diagrams with `k` chords up to rotation.
pub fn enumerate_chord(k: usize) -> Result<Vec<ChordDiagram>> {
    if k > 4 {
        return Err(Error::TooLarge(format!("chord enumeration is limited to order 4, asked for {k}")));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for m in matchings(2 * k) {
        let cd = ChordDiagram::new(2 * k, m)?;
        if seen.insert(cd.canonical()) {
            out.push(cd);
        }
    }
    Ok(out)
}

fn matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let rest: Vec<usize> = (1..n).collect();
    fn go(free: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(acc.clone());
            return;
        }
        let a = free[0];
        for i in 1..free.len() {
            let b = free[i];
            let remaining: Vec<usize> = free.iter().enumerate().filter(|(j, _)| *j != 0 && *j != i).map(|(_, x)| *x).collect();
            acc.push((a, b));
            go(&remaining, acc, out);
            acc.pop();
        }
    }
    let mut acc = Vec::new();
    let mut all: Vec<usize> = vec![0];
    all.extend(rest);
    go(&all, &mut acc, &mut out);
    out
}

/// Four diagrams that agree except where one end of a moving chord sits
/// next to the two ends `i`, `j` of a fixed chord: just after `i`, just
/// before `i`, just after `j`, just before `j`. The 4T relation reads
/// `w(D_{i+}) − w(D_{i−}) + w(D_{j+}) − w(D_{j−}) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourTerm {
    pub after_i: ChordDiagram,
    pub before_i: ChordDiagram,
    pub after_j: ChordDiagram,
    pub before_j: ChordDiagram,
}

/// Builds a 4T quadruple from a circle word with one unmatched label
/// `free` (the fixed end of the moving chord) and a fixed chord `label`.
pub fn four_term(frame: &[usize], free: usize, label: usize) -> Result<FourTerm> {
    let ends: Vec<usize> = (0..frame.len()).filter(|&i| frame[i] == label).collect();
    if ends.len() != 2 || frame.iter().filter(|&&l| l == free).count() != 1 || label == free {
        return Err(Error::Diagram("malformed 4T frame".into()));
    }
    let insert = |at: usize| -> Result<ChordDiagram> {
        let mut w = frame.to_vec();
        w.insert(at, free);
        ChordDiagram::from_word(&w)
    };
    let (i, j) = (ends[0], ends[1]);
    Ok(FourTerm { after_i: insert(i + 1)?, before_i: insert(i)?, after_j: insert(j + 1)?, before_j: insert(j)? })
}

/// Every 4T quadruple with `k` chords: frames from all matchings of
/// `k − 1` chords with the free end inserted at every position, and every
/// choice of fixed chord.
pub fn all_four_terms(k: usize) -> Result<Vec<FourTerm>> {
    if k < 2 {
        return Ok(vec![]);
    }
    if k > 4 {
        return Err(Error::TooLarge(format!("4T generation is limited to order 4, asked for {k}")));
    }
    let free = usize::MAX;
    let mut out = Vec::new();
    for m in matchings(2 * (k - 1)) {
        let mut word = vec![0; 2 * (k - 1)];
        for (c, &(a, b)) in m.iter().enumerate() {
            word[a] = c;
            word[b] = c;
        }
        for at in 0..=word.len() {
            let mut frame = word.clone();
            frame.insert(at, free);
            for label in 0..k - 1 {
                out.push(four_term(&frame, free, label)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_chord_order() {
        let cd = ChordDiagram::new(2, vec![(0, 1)]).unwrap();
        for g in 0..2 {
            assert_eq!(chord_vertex_order(&cd, g).unwrap().chords, vec![(0, 1)]);
        }
    }

    #[test]
    fn crossing_chords_interleave() {
        let cd = ChordDiagram::new(4, vec![(0, 2), (1, 3)]).unwrap();
        let o = chord_vertex_order(&cd, 0).unwrap();
        assert_eq!(o.chords, vec![(0, 2), (1, 3)]);
        assert_eq!(cd.word(0), vec![0, 1, 0, 1]);
    }

    #[test]
    fn rotating_the_origin_shifts_the_order() {
        let cd = ChordDiagram::new(6, vec![(0, 3), (1, 5), (2, 4)]).unwrap();
        let a = chord_vertex_order(&cd, 0).unwrap();
        let b = chord_vertex_order(&cd, 1).unwrap();
        for i in 0..6 {
            assert_eq!(b.points[i], a.points[(i + 1) % 6]);
        }
    }

    #[test]
    fn enumeration_up_to_rotation() {
        let counts: Vec<usize> = (0..=4).map(|k| enumerate_chord(k).unwrap().len()).collect();
        // Chord diagrams up to rotation (no reflection): 1, 1, 2, 5, 18.
        assert_eq!(counts, vec![1, 1, 2, 5, 18]);
    }

    #[test]
    fn restriction_and_isolated_chords() {
        let cd = ChordDiagram::from_word(&[0, 0, 1, 2, 1, 2]).unwrap();
        assert!(cd.has_isolated_chord());
        let sub = cd.restrict(&[1, 2]);
        assert_eq!(sub.word(0), vec![0, 1, 0, 1]);
        assert!(!sub.has_isolated_chord());
    }

    #[test]
    fn restriction_keeps_the_origin_position() {
        let cd = ChordDiagram::from_word(&[0, 1, 0, 2, 1, 2]).unwrap();
        let (sub, gap) = cd.restrict_at(&[2], 4);
        assert_eq!((sub.points(), gap), (2, 1));
        let (sub, gap) = cd.restrict_at(&[0, 1], 3);
        assert_eq!(sub.word(gap), vec![1, 0, 1, 0]);
        assert_eq!(cd.restrict_at(&[], 3).0, ChordDiagram::empty());
    }

    #[test]
    fn isolated_chords_go_in_front() {
        let cd = ChordDiagram::from_word(&[0, 1, 0, 1]).unwrap();
        let t = cd.with_isolated_at(1, 1).unwrap();
        assert_eq!(t.word(0), vec![0, 0, 2, 1, 2, 1]);
        assert!(t.has_isolated_chord());
    }

    #[test]
    fn four_term_quadruples() {
        assert_eq!(all_four_terms(2).unwrap().len(), 3);
        let q = all_four_terms(3).unwrap();
        assert_eq!(q.len(), 3 * 5 * 2);
        for t in &q {
            for d in [&t.after_i, &t.before_i, &t.after_j, &t.before_j] {
                assert_eq!(d.order(), 3);
            }
        }
    }

    #[test]
    fn rejects_bad_matchings() {
        assert!(ChordDiagram::new(4, vec![(0, 1), (1, 2)]).is_err());
        assert!(ChordDiagram::new(4, vec![(0, 1)]).is_err());
        assert!(ChordDiagram::new(3, vec![]).is_err());
    }
}
