//! Exact linear algebra: incremental sparse echelon forms and small dense
//! matrices over [`Scalar`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::scalar::Scalar;

/// Sparse vector as a map from index to nonzero scalar.
pub type SparseVec = BTreeMap<usize, Scalar>;

/// `v += c · w`, pruning zeros.
pub fn axpy(v: &mut SparseVec, c: &Scalar, w: &[(usize, Scalar)]) {
    for (j, x) in w {
        let t = c * x;
        match v.get_mut(j) {
            Some(e) => {
                *e += &t;
                if e.is_zero() {
                    v.remove(j);
                }
            }
            None => {
                if !t.is_zero() {
                    v.insert(*j, t);
                }
            }
        }
    }
}

/// Which entry of a vector leads it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest index leads.
    Min,
    /// Largest index leads.
    Max,
}

#[derive(Clone, Debug)]
struct Row {
    entries: Vec<(usize, Scalar)>,
    combo: Vec<(usize, Scalar)>,
}

/// Outcome of inserting a vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insert {
    /// Extended the span; carries the new pivot.
    Pivot(usize),
    /// Dependent; carries the kernel relation over inserted ids when tracking
    /// is on (empty otherwise).
    Dependent(SparseVec),
}

/// Row echelon form built one vector at a time. Each stored row is
/// normalized to leading coefficient 1 under the chosen [`PivotRule`].
#[derive(Clone, Debug)]
pub struct Echelon {
    rule: PivotRule,
    track: bool,
    rows: HashMap<usize, Row>,
}

impl Echelon {
    pub fn new(rule: PivotRule) -> Self {
        Echelon { rule, track: false, rows: HashMap::new() }
    }

    /// Also records, for every stored row, the combination of inserted ids
    /// that produced it, so dependent inserts yield kernel vectors.
    pub fn tracking(rule: PivotRule) -> Self {
        Echelon { rule, track: true, rows: HashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rule(&self) -> PivotRule {
        self.rule
    }

    pub fn has_pivot(&self, i: usize) -> bool {
        self.rows.contains_key(&i)
    }

    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.keys().copied().collect();
        p.sort_unstable();
        p
    }

    fn lead(&self, v: &SparseVec) -> Option<usize> {
        match self.rule {
            PivotRule::Min => v.keys().next().copied(),
            PivotRule::Max => v.keys().next_back().copied(),
        }
    }

    /// Inserts `v` under the caller's id (used only when tracking).
    pub fn insert(&mut self, mut v: SparseVec, id: usize) -> Insert {
        let mut combo = SparseVec::new();
        if self.track {
            combo.insert(id, Scalar::one());
        }
        while let Some(p) = self.lead(&v) {
            match self.rows.get(&p) {
                Some(row) => {
                    let c = -v[&p].clone();
                    axpy(&mut v, &c, &row.entries);
                    if self.track {
                        axpy(&mut combo, &c, &row.combo);
                    }
                }
                None => {
                    let inv = v[&p].inv().expect("nonzero lead");
                    let entries = v.into_iter().map(|(j, x)| (j, &x * &inv)).collect();
                    let combo = combo.into_iter().map(|(j, x)| (j, &x * &inv)).collect();
                    self.rows.insert(p, Row { entries, combo });
                    return Insert::Pivot(p);
                }
            }
        }
        Insert::Dependent(combo)
    }

    /// Whether `v` lies in the span.
    pub fn contains(&self, v: &SparseVec) -> bool {
        let mut v = v.clone();
        while let Some(p) = self.lead(&v) {
            match self.rows.get(&p) {
                Some(row) => {
                    let c = -v[&p].clone();
                    axpy(&mut v, &c, &row.entries);
                }
                None => return false,
            }
        }
        true
    }

    /// Coefficients `c` over inserted ids with `Σ c_id · v_id = v`, or `None`
    /// if `v` is outside the span. Needs tracking; ids that never became a
    /// pivot get coefficient zero.
    pub fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        assert!(self.track, "express needs a tracking echelon");
        let mut v = v.clone();
        let mut out = SparseVec::new();
        while let Some(p) = self.lead(&v) {
            let row = self.rows.get(&p)?;
            let c = v[&p].clone();
            axpy(&mut v, &-c.clone(), &row.entries);
            axpy(&mut out, &c, &row.combo);
        }
        Some(out)
    }

    /// Normal form of `v`: every entry sitting on a pivot is eliminated.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        let mut done = SparseVec::new();
        // elimination only introduces entries on the far side of the lead,
        // so peeling leads in order terminates
        while let Some(p) = self.lead(&v) {
            match self.rows.get(&p) {
                Some(row) => {
                    let c = -v[&p].clone();
                    axpy(&mut v, &c, &row.entries);
                }
                None => {
                    let x = v.remove(&p).expect("lead present");
                    done.insert(p, x);
                }
            }
        }
        done
    }

    /// Fully reduced basis of the span, ordered by pivot.
    pub fn reduced_basis(&self) -> Vec<SparseVec> {
        let mut out = Vec::with_capacity(self.rows.len());
        for p in self.pivots() {
            let row: SparseVec = self.rows[&p].entries.iter().cloned().collect();
            let mut rest = row.clone();
            rest.remove(&p);
            let mut red = self.reduce(&rest);
            red.insert(p, Scalar::one());
            out.push(red);
        }
        out
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<Scalar>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let x = m.get(r, j) * &inv;
                m.set(r, j, x);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let t = m.get(r, j);
                    if t.is_zero() {
                        continue;
                    }
                    let x = m.get(i, j) - &(&f * t);
                    m.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    /// One solution of `self · x = b` with free variables set to zero.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(i, x)| (i, Scalar::from_int(x))).collect()
    }

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect())
    }

    #[test]
    fn echelon_rank_and_kernel() {
        let mut e = Echelon::tracking(PivotRule::Min);
        assert_eq!(e.insert(sv(&[(0, 1), (1, 2)]), 0), Insert::Pivot(0));
        assert_eq!(e.insert(sv(&[(1, 1), (2, 1)]), 1), Insert::Pivot(1));
        match e.insert(sv(&[(0, 1), (1, 3), (2, 1)]), 2) {
            Insert::Dependent(k) => assert_eq!(k, sv(&[(0, -1), (1, -1), (2, 1)])),
            other => panic!("{other:?}"),
        }
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&sv(&[(0, 2), (1, 5), (2, 1)])));
        assert!(!e.contains(&sv(&[(2, 1)])));
    }

    #[test]
    fn max_rule_normal_form() {
        let mut e = Echelon::new(PivotRule::Max);
        e.insert(sv(&[(0, -1), (3, 5)]), 0);
        let nf = e.reduce(&sv(&[(3, 1), (1, 1)]));
        assert_eq!(nf, [(0, Scalar::frac(1, 5)), (1, Scalar::one())].into_iter().collect());
    }

    #[test]
    fn reduced_basis_is_reduced() {
        let mut e = Echelon::new(PivotRule::Min);
        e.insert(sv(&[(0, 1), (1, 1), (2, 1)]), 0);
        e.insert(sv(&[(1, 1), (2, 2)]), 1);
        let b = e.reduced_basis();
        assert_eq!(b[0], sv(&[(0, 1), (2, -1)]));
        assert_eq!(b[1], sv(&[(1, 1), (2, 2)]));
    }

    #[test]
    fn dense_solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        let x = a.solve(&[Scalar::from_int(3), Scalar::from_int(2)]).unwrap();
        assert_eq!(x, vec![Scalar::one(), Scalar::one()]);
        let s = m(&[&[1, 1], &[2, 2]]);
        assert!(s.inverse().is_none());
        assert!(s.solve(&[Scalar::one(), Scalar::one()]).is_none());
        assert_eq!(s.nullspace(), vec![vec![Scalar::from_int(-1), Scalar::one()]]);
    }

    #[test]
    fn rank_of_nilpotent_powers() {
        let n = m(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(n.rank(), 2);
        assert_eq!(n.pow(2).rank(), 1);
        assert!(n.pow(3).is_zero());
    }
}
