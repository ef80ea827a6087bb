//! Closed and open tensor networks over labelled axes.
//!
//! Every axis carries a label. A label shared by two axes (on the same node
//! or on two nodes) is summed over; a label seen once stays open. The
//! contraction order is fixed once per network shape by a greedy rule
//! (least dense work first) and can then be replayed on many tensors
//! of the same shape.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::tensor::{contract, Entry, SparseTensor};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node<T = crate::scalar::Scalar> {
    pub tensor: SparseTensor<T>,
    pub labels: Vec<usize>,
}

impl<T: Entry> Node<T> {
    pub fn new(tensor: SparseTensor<T>, labels: Vec<usize>) -> Result<Self> {
        if tensor.order() != labels.len() {
            return Err(Error::Shape(format!("{} labels for a tensor of order {}", labels.len(), tensor.order())));
        }
        Ok(Node { tensor, labels })
    }

    /// Sums over every label repeated on this node.
    fn trace_repeated(self) -> Node<T> {
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        let mut pairs = Vec::new();
        for (axis, &l) in self.labels.iter().enumerate() {
            if let Some(first) = seen.insert(l, axis) {
                pairs.push((first, axis));
            }
        }
        if pairs.is_empty() {
            return self;
        }
        let dropped: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        let keep: Vec<usize> = (0..self.labels.len()).filter(|a| !dropped.contains(a)).collect();
        let shape = keep.iter().map(|&a| self.tensor.shape()[a]).collect();
        let mut out = SparseTensor::zeros(shape);
        for (idx, x) in self.tensor.entries() {
            if pairs.iter().all(|&(a, b)| idx[a] == idx[b]) {
                out.add_at(keep.iter().map(|&a| idx[a]).collect(), x.clone());
            }
        }
        Node { tensor: out, labels: keep.iter().map(|&a| self.labels[a]).collect() }
    }
}

/// A contraction order: each step merges node `j` into node `i` (`i < j`),
/// the result taking slot `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    steps: Vec<(usize, usize)>,
}

fn without_repeats(labels: &[usize]) -> Vec<usize> {
    labels.iter().copied().filter(|l| labels.iter().filter(|&m| m == l).count() == 1).collect()
}

fn merged_labels(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().filter(|l| !b.contains(l)).chain(b.iter().filter(|l| !a.contains(l))).copied().collect()
}

impl Plan {
    /// Greedy order for nodes with the given labels; `dim` gives the size
    /// of each label.
    pub fn greedy(labels: &[Vec<usize>], dim: impl Fn(usize) -> usize) -> Plan {
        let mut live: Vec<Vec<usize>> = labels.iter().map(|l| without_repeats(l)).collect();
        let mut steps = Vec::new();
        while live.len() > 1 {
            let mut best: Option<(bool, usize, usize, usize, usize)> = None;
            for i in 0..live.len() {
                for j in i + 1..live.len() {
                    let shares = live[i].iter().any(|l| live[j].contains(l));
                    let size = merged_labels(&live[i], &live[j]).iter().map(|&l| dim(l)).product::<usize>();
                    // Dense multiply count: every label of either side.
                    let work = live[i].iter().chain(live[j].iter().filter(|l| !live[i].contains(l))).map(|&l| dim(l)).product::<usize>();
                    let key = (!shares, work, size, i, j);
                    if best.map_or(true, |b| key < b) {
                        best = Some(key);
                    }
                }
            }
            let (_, _, _, i, j) = best.expect("at least two nodes");
            let m = merged_labels(&live[i], &live[j]);
            live[i] = m;
            live.remove(j);
            steps.push((i, j));
        }
        Plan { steps }
    }

    /// Contracts `nodes` and returns the result with its open axes in the
    /// order given by `open`. An empty network evaluates to the scalar 1.
    pub fn execute<T: Entry>(&self, nodes: Vec<Node<T>>, open: &[usize]) -> Result<SparseTensor<T>> {
        let mut live: Vec<Node<T>> = nodes.into_iter().map(Node::trace_repeated).collect();
        for &(i, j) in &self.steps {
            if j >= live.len() {
                return Err(Error::Shape("plan does not match the network".into()));
            }
            let b = live.remove(j);
            let a = &live[i];
            let (mut ax, mut bx) = (Vec::new(), Vec::new());
            for (p, l) in a.labels.iter().enumerate() {
                if let Some(q) = b.labels.iter().position(|m| m == l) {
                    ax.push(p);
                    bx.push(q);
                }
            }
            let tensor = contract(&a.tensor, &ax, &b.tensor, &bx)?;
            let labels = merged_labels(&a.labels, &b.labels);
            live[i] = Node { tensor, labels };
        }
        let last = match live.len() {
            0 => return Ok(SparseTensor::scalar(T::one())),
            1 => live.pop().expect("one node"),
            _ => return Err(Error::Shape("plan leaves several nodes".into())),
        };
        let perm: Vec<usize> = open
            .iter()
            .map(|l| last.labels.iter().position(|m| m == l))
            .collect::<Option<_>>()
            .filter(|p: &Vec<usize>| p.len() == last.labels.len())
            .ok_or_else(|| Error::Shape(format!("open labels {open:?} do not match {:?}", last.labels)))?;
        let shape = perm.iter().map(|&a| last.tensor.shape()[a]).collect();
        let mut out = SparseTensor::zeros(shape);
        for (idx, x) in last.tensor.entries() {
            out.set(perm.iter().map(|&a| idx[a]).collect(), x.clone());
        }
        Ok(out)
    }
}

/// Value of a closed network.
pub fn evaluate_closed<T: Entry>(plan: &Plan, nodes: Vec<Node<T>>) -> Result<T> {
    Ok(plan.execute(nodes, &[])?.scalar_value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn mat(rows: &[[i64; 2]]) -> SparseTensor {
        SparseTensor::from_matrix(&rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn trace_of_product_of_three_matrices() {
        let a = mat(&[[1, 2], [3, 4]]);
        let b = mat(&[[0, 1], [1, 1]]);
        let c = mat(&[[2, -1], [5, 3]]);
        // tr(ABC) with labels i→j→k→i.
        let labels = vec![vec![0, 1], vec![1, 2], vec![2, 0]];
        let plan = Plan::greedy(&labels, |_| 2);
        let nodes = vec![
            Node::new(a.clone(), labels[0].clone()).unwrap(),
            Node::new(b.clone(), labels[1].clone()).unwrap(),
            Node::new(c.clone(), labels[2].clone()).unwrap(),
        ];
        let mut expected = int(0);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    expected += a.get(&[i, j]) * b.get(&[j, k]) * c.get(&[k, i]);
                }
            }
        }
        assert_eq!(evaluate_closed(&plan, nodes).unwrap(), expected);
    }

    #[test]
    fn repeated_label_on_one_node_is_a_trace() {
        let a = mat(&[[1, 2], [3, 4]]);
        let plan = Plan::greedy(&[vec![0, 0]], |_| 2);
        assert_eq!(evaluate_closed(&plan, vec![Node::new(a, vec![0, 0]).unwrap()]).unwrap(), int(5));
    }

    #[test]
    fn open_labels_follow_requested_order() {
        let a = mat(&[[1, 2], [3, 4]]);
        let b = mat(&[[0, 1], [1, 1]]);
        let plan = Plan::greedy(&[vec![0, 1], vec![1, 2]], |_| 2);
        let nodes = vec![Node::new(a, vec![0, 1]).unwrap(), Node::new(b, vec![1, 2]).unwrap()];
        let ab = plan.execute(nodes.clone(), &[0, 2]).unwrap();
        let ba = plan.execute(nodes, &[2, 0]).unwrap();
        assert_eq!(ab.get(&[0, 1]), int(3));
        assert_eq!(ba.get(&[1, 0]), int(3));
    }

    #[test]
    fn disconnected_pieces_multiply() {
        let a = mat(&[[1, 2], [3, 4]]);
        let b = mat(&[[2, 0], [0, 2]]);
        let plan = Plan::greedy(&[vec![0, 0], vec![1, 1]], |_| 2);
        let nodes = vec![Node::new(a, vec![0, 0]).unwrap(), Node::new(b, vec![1, 1]).unwrap()];
        assert_eq!(evaluate_closed(&plan, nodes).unwrap(), int(20));
    }

    #[test]
    fn empty_network_is_one() {
        let plan = Plan::greedy(&[], |_| 1);
        assert_eq!(evaluate_closed::<crate::scalar::Scalar>(&plan, vec![]).unwrap(), int(1));
    }
}
