//! Small linear-algebra layer: a real CSR matrix assembled from coordinate
//! triplets, dense helpers on top of `nalgebra`, and Gauss-Legendre rules.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Compressed sparse row matrix with real entries.
///
/// Rows are stored in ascending column order and duplicate triplets are summed,
/// so two matrices assembled from the same triplets in any order compare equal.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    pub fn build(mut self) -> CsrMatrix {
        self.entries.sort_by_key(|e| (e.0, e.1));
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            indices.push(c);
            values.push(v);
            indptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..self.nrows {
            indptr[r + 1] += indptr[r];
        }
        let mut m = CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr,
            indices,
            values,
        };
        m.prune(0.0);
        m
    }
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        TripletBuilder::new(nrows, ncols).build()
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut b = TripletBuilder::new(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            b.push(i, i, d);
        }
        b.build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterate over `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.values[k]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let slice = &self.indices[self.indptr[r]..self.indptr[r + 1]];
        match slice.binary_search(&c) {
            Ok(k) => self.values[self.indptr[r] + k],
            Err(_) => 0.0,
        }
    }

    fn prune(&mut self, tol: f64) {
        if self.values.iter().all(|v| v.abs() > tol) {
            return;
        }
        let mut b = Vec::with_capacity(self.values.len());
        for (r, c, v) in self.iter() {
            if v.abs() > tol {
                b.push((r, c, v));
            }
        }
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(b.len());
        let mut values = Vec::with_capacity(b.len());
        for (r, c, v) in b {
            indptr[r + 1] += 1;
            indices.push(c);
            values.push(v);
        }
        for r in 0..self.nrows {
            indptr[r + 1] += indptr[r];
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    /// Copy with entries of modulus `<= tol` dropped.
    pub fn pruned(&self, tol: f64) -> CsrMatrix {
        let mut out = self.clone();
        out.prune(tol);
        out
    }

    /// Diagonal entries if every off-diagonal entry is zero.
    pub fn diagonal_only(&self) -> Option<Vec<f64>> {
        if self.nrows != self.ncols {
            return None;
        }
        let mut d = vec![0.0; self.nrows];
        for (r, c, v) in self.iter() {
            if r != c {
                return None;
            }
            d[r] = v;
        }
        Some(d)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut b = TripletBuilder::new(self.ncols, self.nrows);
        for (r, c, v) in self.iter() {
            b.push(c, r, v);
        }
        b.build()
    }

    pub fn scaled(&self, s: f64) -> CsrMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out.prune(0.0);
        out
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &CsrMatrix, s: f64) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut b = TripletBuilder::new(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            b.push(r, c, v);
        }
        for (r, c, v) in other.iter() {
            b.push(r, c, s * v);
        }
        b.build()
    }

    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut b = TripletBuilder::new(self.nrows, other.ncols);
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for r in 0..self.nrows {
            acc.clear();
            for (k, a) in self.row(r) {
                for (c, v) in other.row(k) {
                    *acc.entry(c).or_insert(0.0) += a * v;
                }
            }
            for (&c, &v) in &acc {
                b.push(r, c, v);
            }
        }
        b.build()
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &CsrMatrix) -> CsrMatrix {
        self.matmul(other).add_scaled(&other.matmul(self), -1.0)
    }

    /// Largest entrywise deviation from symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        self.iter()
            .map(|(r, c, v)| (v - self.get(c, r)).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `y = A x` for a complex vector.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.nrows];
        self.apply_into(x, &mut y, 1.0, false);
        y
    }

    /// `y (+)= s · A x`.
    pub fn apply_into(&self, x: &[C64], y: &mut [C64], s: f64, accumulate: bool) {
        for (r, yr) in y.iter_mut().enumerate().take(self.nrows) {
            let mut acc = ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += x[self.indices[k]] * self.values[k];
            }
            if accumulate {
                *yr += acc * s;
            } else {
                *yr = acc * s;
            }
        }
    }

    pub fn to_dense(&self) -> RMatrix {
        let mut m = RMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    /// `Pᵀ · self · P`.
    pub fn congruence(&self, p: &CsrMatrix) -> CsrMatrix {
        p.transpose().matmul(&self.matmul(p))
    }
}

/// Real symmetric eigendecomposition.
pub fn eigh_real(m: &RMatrix) -> (Vec<f64>, RMatrix) {
    let e = SymmetricEigen::new(m.clone());
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// Complex Hermitian eigendecomposition.
pub fn eigh_complex(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let e = SymmetricEigen::new(m.clone());
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// `exp(−i G)` for Hermitian `G`, exactly unitary up to rounding.
pub fn unitary_exp_complex(g: &CMatrix) -> CMatrix {
    let (vals, vecs) = eigh_complex(g);
    let mut scaled = vecs.clone();
    for (j, &lam) in vals.iter().enumerate() {
        let ph = C64::from_polar(1.0, -lam);
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= ph);
    }
    scaled * vecs.adjoint()
}

/// `exp(−i G)` for real symmetric `G`.
pub fn unitary_exp_real(g: &RMatrix) -> CMatrix {
    let (vals, vecs) = eigh_real(g);
    let n = g.nrows();
    let v = vecs.map(|x| C64::new(x, 0.0));
    let mut scaled = v.clone();
    for (j, &lam) in vals.iter().enumerate().take(n) {
        let ph = C64::from_polar(1.0, -lam);
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= ph);
    }
    scaled * v.transpose()
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let (vals, _) = eigh_complex(&gram);
    vals.into_iter().fold(0.0, f64::max).max(0.0).sqrt()
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    operator_norm(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

pub fn real_to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // three-term recurrence for P_n(z) and P_{n-1}(z)
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss-Legendre rule on `[a, b]`: `panels × order` nodes.
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}
