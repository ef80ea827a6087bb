//! Exact linear algebra over ℚ: dense matrices with reduced row echelon
//! form, and a sparse echelon solver for the large cochain systems.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| crate::scalar::format(&self[(r, c)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!("{}x{} times vector of length {}", self.rows, self.cols, v.len())));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape("matrix sum of different shapes".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.scaled(&-Scalar::one()))
    }

    pub fn scaled(&self, c: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &Matrix) -> Result<Matrix> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    m.data.swap(p * m.cols + c, row * m.cols + c);
                }
            }
            let inv = m[(row, col)].recip();
            for c in col..m.cols {
                let v = &m[(row, c)] * &inv;
                m[(row, c)] = v;
            }
            for r in 0..m.rows {
                if r == row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in col..m.cols {
                    if m[(row, c)].is_zero() {
                        continue;
                    }
                    let delta = &factor * &m[(row, c)];
                    m[(r, c)] -= delta;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : self·x = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of `self·x = rhs`, or `None` when inconsistent.
    pub fn solve(&self, rhs: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if rhs.len() != self.rows {
            return Err(Error::Shape(format!("{} equations but rhs of length {}", self.rows, rhs.len())));
        }
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, self.cols)] = rhs[r].clone();
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = red[(row, self.cols)].clone();
        }
        Ok(Some(x))
    }

    pub fn determinant(&self) -> Result<Scalar> {
        if self.rows != self.cols {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Ok(Scalar::zero());
            };
            if p != col {
                for c in 0..n {
                    m.data.swap(p * n + c, col * n + c);
                }
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det *= &pivot;
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] / &pivot;
                for c in col..n {
                    let delta = &factor * &m[(col, c)];
                    m[(r, c)] -= delta;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Option<Matrix>> {
        if self.rows != self.cols {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n + r)] = Scalar::one();
        }
        let (red, pivots) = aug.rref();
        if n > 0 && (pivots.len() < n || pivots[n - 1] != n - 1) {
            return Ok(None);
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv[(r, c)] = red[(r, n + c)].clone();
            }
        }
        Ok(Some(inv))
    }
}

/// Convenience wrappers matching the operation names used across the crate.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<Scalar>> {
    m.kernel_basis()
}

pub fn rank(m: &Matrix) -> usize {
    m.rank()
}

pub fn solve(m: &Matrix, rhs: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    m.solve(rhs)
}

type SparseRow = Vec<(usize, Scalar)>;

/// Sparse matrix stored by rows, each row sorted by column.
#[derive(Debug, Clone, Default)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<SparseRow>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: vec![Vec::new(); rows] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    /// Adds `x` at `(r, c)`.
    pub fn add_at(&mut self, r: usize, c: usize, x: Scalar) {
        assert!(r < self.rows && c < self.cols, "({r}, {c}) outside {}x{}", self.rows, self.cols);
        if x.is_zero() {
            return;
        }
        let row = &mut self.entries[r];
        match row.binary_search_by_key(&c, |(col, _)| *col) {
            Ok(pos) => {
                row[pos].1 += x;
                if row[pos].1.is_zero() {
                    row.remove(pos);
                }
            }
            Err(pos) => row.insert(pos, (c, x)),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        let row = &self.entries[r];
        match row.binary_search_by_key(&c, |(col, _)| *col) {
            Ok(pos) => row[pos].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (r, row) in self.entries.iter().enumerate() {
            for (c, x) in row {
                m[(r, *c)] = x.clone();
            }
        }
        m
    }

    pub fn from_dense(m: &Matrix) -> Self {
        let mut s = SparseMatrix::new(m.rows(), m.cols());
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                s.add_at(r, c, m[(r, c)].clone());
            }
        }
        s
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!("{}x{} times vector of length {}", self.rows, self.cols, v.len())));
        }
        Ok(self
            .entries
            .iter()
            .map(|row| row.iter().fold(Scalar::zero(), |acc, (c, x)| acc + x * &v[*c]))
            .collect())
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.cols);
        for row in &self.entries {
            ech.insert(row.clone());
        }
        ech.pivots.len()
    }

    /// Some solution of `self·x = rhs`, or `None` when inconsistent.
    pub fn solve(&self, rhs: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if rhs.len() != self.rows {
            return Err(Error::Shape(format!("{} equations but rhs of length {}", self.rows, rhs.len())));
        }
        let n = self.cols;
        let mut ech = Echelon::new(n + 1);
        for (row, b) in self.entries.iter().zip(rhs) {
            let mut row = row.clone();
            if !b.is_zero() {
                row.push((n, b.clone()));
            }
            if let Some(lead) = ech.insert(row) {
                if lead == n {
                    return Ok(None);
                }
            }
        }
        Ok(Some(ech.back_substitute(n)))
    }
}

/// Row echelon form built incrementally; each stored row has leading
/// coefficient one at its pivot column.
struct Echelon {
    pivots: std::collections::BTreeMap<usize, SparseRow>,
}

impl Echelon {
    fn new(_cols: usize) -> Self {
        Echelon { pivots: std::collections::BTreeMap::new() }
    }

    /// Reduces `row` against the stored pivots. Returns the new pivot column
    /// if the row was independent.
    fn insert(&mut self, mut row: SparseRow) -> Option<usize> {
        loop {
            let (lead, coef) = match row.first() {
                None => return None,
                Some((c, x)) => (*c, x.clone()),
            };
            match self.pivots.get(&lead) {
                Some(prow) => {
                    row = axpy(&row, &-coef, prow);
                }
                None => {
                    let inv = coef.recip();
                    let normalized: SparseRow = row.into_iter().map(|(c, x)| (c, x * &inv)).collect();
                    self.pivots.insert(lead, normalized);
                    return Some(lead);
                }
            }
        }
    }

    /// Solution with free variables zero; column `rhs_col` holds the rhs.
    fn back_substitute(&self, rhs_col: usize) -> Vec<Scalar> {
        let mut x = vec![Scalar::zero(); rhs_col];
        for (&p, row) in self.pivots.iter().rev() {
            let mut val = Scalar::zero();
            for (c, a) in row.iter().skip(1) {
                if *c == rhs_col {
                    val += a;
                } else if !x[*c].is_zero() {
                    val -= a * &x[*c];
                }
            }
            x[p] = val;
        }
        x
    }
}

/// `a + c·b` for sorted sparse rows.
fn axpy(a: &SparseRow, c: &Scalar, b: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + c * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}
