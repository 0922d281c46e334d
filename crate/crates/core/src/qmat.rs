//! Dense complex matrices and the linear-algebra kernel.
//!
//! Storage is row-major. Tensor products put the left factor on the slow index,
//! so for `dims = [d0, d1, d2]` the flat index of `(i0, i1, i2)` is
//! `(i0 * d1 + i1) * d2 + i2`.

use crate::config::max_side;
use crate::error::{dim_mismatch, QpdError, Result};
use num_complex::Complex64 as C64;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

/// Thin singular value decomposition `m = u · diag(s) · v_adj`, `s` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v_adj: ComplexMatrix,
}

/// Products at least this many multiply-adds go through faer.
const FAER_MATMUL_MIN: usize = 1 << 15;

pub(crate) fn check_side(side: usize) -> Result<()> {
    let limit = max_side();
    if side > limit {
        return Err(QpdError::SizeLimit { side, limit });
    }
    Ok(())
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(dim_mismatch("matrix sides must be positive"));
        }
        if data.len() != rows * cols {
            return Err(dim_mismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        check_side(rows.max(cols))?;
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QpdError::DomainError("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Real row-major entries; panics if the length does not match.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "from_real: wrong entry count");
        Self { rows, cols, data: entries.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self::from_diag(&diag.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn column_vector(v: &[C64]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// `|i⟩⟨j|` as a `rows x cols` matrix.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.data[i * cols + j] = ONE;
        m
    }

    /// Projector `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(dim_mismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        if n * k * m >= FAER_MATMUL_MIN {
            let prod = &self.to_faer() * &other.to_faer();
            return Ok(Self::from_fn(n, m, |i, j| prod[(i, j)]));
        }
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let row = &mut out[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[p * m..(p + 1) * m];
                for (o, &b) in row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { rows: n, cols: m, data: out })
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "mul_vec: length mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.data[i * self.cols + i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |a - b|` entrywise; infinite when shapes differ.
    pub fn max_diff(&self, other: &Self) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `max |m - m†|` entrywise; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        dev
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        Self::from_fn(n, n, |i, j| (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5)
    }

    /// Column-major vectorization.
    pub fn vec_col(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                v.push(self.data[r * self.cols + c]);
            }
        }
        v
    }

    /// Inverse of [`vec_col`](Self::vec_col).
    pub fn unvec_col(v: &[C64], rows: usize, cols: usize) -> Self {
        assert_eq!(v.len(), rows * cols, "unvec_col: length mismatch");
        Self::from_fn(rows, cols, |r, c| v[c * rows + r])
    }

    fn to_faer(&self) -> faer::Mat<C64> {
        faer::Mat::from_fn(self.rows, self.cols, |i, j| self.data[i * self.cols + j])
    }

    /// Hermitian eigendecomposition, eigenvalues descending.
    pub fn eigh(&self) -> Result<Eigh> {
        self.eigh_with_tol(crate::config::Tolerances::default().herm_tol)
    }

    pub fn eigh_with_tol(&self, herm_tol: f64) -> Result<Eigh> {
        if !self.is_square() {
            return Err(dim_mismatch("eigh needs a square matrix"));
        }
        let dev = self.hermitian_deviation();
        let scale = self.max_abs().max(1.0);
        if dev > herm_tol * scale {
            return Err(QpdError::NotHermitian(dev));
        }
        let eig = self
            .hermitian_part()
            .to_faer()
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| QpdError::NoConvergence(format!("{e:?}")))?;
        let n = self.rows;
        let (vals, vecs) = (eig.S().column_vector(), eig.U());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| vals[b].re.total_cmp(&vals[a].re));
        let values = order.iter().map(|&k| vals[k].re).collect();
        let vectors = Self::from_fn(n, n, |i, j| vecs[(i, order[j])]);
        Ok(Eigh { values, vectors })
    }

    /// Eigenvalues only, descending.
    pub fn eigvalsh(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.values)
    }

    /// Thin SVD, singular values descending.
    pub fn svd(&self) -> Svd {
        let svd = self.to_faer().thin_svd().expect("SVD of a finite matrix converges");
        let k = self.rows.min(self.cols);
        let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
        let sig: Vec<f64> = (0..k).map(|i| s[i].re).collect();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| sig[b].total_cmp(&sig[a]));
        Svd {
            u: Self::from_fn(self.rows, k, |i, j| u[(i, order[j])]),
            s: order.iter().map(|&i| sig[i]).collect(),
            v_adj: Self::from_fn(k, self.cols, |i, j| v[(j, order[i])].conj()),
        }
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.svd().s
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }

    /// Moore–Penrose pseudo-inverse; singular values below `cutoff · σ_max` are dropped.
    pub fn pinv(&self, cutoff: f64) -> Self {
        let Svd { u, s, v_adj } = self.svd();
        let smax = s.first().copied().unwrap_or(0.0);
        let mut out = Self::zeros(self.cols, self.rows);
        if smax == 0.0 {
            return out;
        }
        for (k, &sk) in s.iter().enumerate() {
            if sk <= cutoff * smax {
                continue;
            }
            let inv = 1.0 / sk;
            for i in 0..self.cols {
                let vi = v_adj.data[k * self.cols + i].conj() * inv;
                if vi == ZERO {
                    continue;
                }
                for j in 0..self.rows {
                    out.data[i * self.rows + j] += vi * u.data[j * u.cols + k].conj();
                }
            }
        }
        out
    }

    /// Orthonormal basis of the kernel, one vector per column.
    ///
    /// Returns `None` when the kernel is trivial.
    pub fn svd_nullspace(&self, cutoff: f64) -> Option<Self> {
        // Pad with zero rows so the thin SVD exposes every right singular vector.
        let padded = if self.rows < self.cols {
            let mut data = self.data.clone();
            data.resize(self.cols * self.cols, ZERO);
            Self { rows: self.cols, cols: self.cols, data }
        } else {
            self.clone()
        };
        let Svd { s, v_adj, .. } = padded.svd();
        let smax = s.first().copied().unwrap_or(0.0);
        let null: Vec<usize> =
            (0..s.len()).filter(|&k| smax == 0.0 || s[k] <= cutoff * smax).collect();
        if null.is_empty() {
            return None;
        }
        Some(Self::from_fn(self.cols, null.len(), |i, j| v_adj.data[null[j] * self.cols + i].conj()))
    }

    /// Numerical rank: singular values above `cutoff · σ_max`.
    pub fn rank(&self, cutoff: f64) -> usize {
        let s = self.singular_values();
        let smax = s.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        s.iter().filter(|&&x| x > cutoff * smax).count()
    }

    /// Partial trace over every factor not listed in `keep`.
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        check_dims(self, dims)?;
        if keep.iter().any(|&k| k >= dims.len()) {
            return Err(dim_mismatch("partial_trace: keep index out of range"));
        }
        let strides = strides(dims);
        let kept: Vec<usize> = (0..dims.len()).filter(|i| keep.contains(i)).collect();
        let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
        let keep_off = offsets(&kept, dims, &strides);
        let trace_off = offsets(&traced, dims, &strides);
        let n = self.rows;
        let k = keep_off.len();
        let mut out = Self::zeros(k, k);
        for (r, &ro) in keep_off.iter().enumerate() {
            for (c, &co) in keep_off.iter().enumerate() {
                let mut acc = ZERO;
                for &t in &trace_off {
                    acc += self.data[(ro + t) * n + co + t];
                }
                out.data[r * k + c] = acc;
            }
        }
        Ok(out)
    }

    /// Partial transpose of one factor of a bipartite matrix.
    pub fn partial_transpose(&self, dims: &[usize], which: usize) -> Result<Self> {
        if dims.len() != 2 {
            return Err(QpdError::Unsupported(format!(
                "partial_transpose supports exactly two factors, got {}",
                dims.len()
            )));
        }
        check_dims(self, dims)?;
        if which > 1 {
            return Err(dim_mismatch("partial_transpose: factor index must be 0 or 1"));
        }
        let (da, db) = (dims[0], dims[1]);
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..da {
            for j in 0..db {
                for k in 0..da {
                    for l in 0..db {
                        let src = if which == 1 {
                            (i * db + l) * n + k * db + j
                        } else {
                            (k * db + j) * n + i * db + l
                        };
                        out.data[(i * db + j) * n + k * db + l] = self.data[src];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Realignment `R[(i,k),(j,l)] = m[(i,j),(k,l)]` of a bipartite matrix.
    pub fn realign(&self, dims: &[usize]) -> Result<Self> {
        if dims.len() != 2 {
            return Err(dim_mismatch("realignment needs exactly two factors"));
        }
        check_dims(self, dims)?;
        let (da, db) = (dims[0], dims[1]);
        let n = self.rows;
        let mut out = Self::zeros(da * da, db * db);
        for i in 0..da {
            for j in 0..db {
                for k in 0..da {
                    for l in 0..db {
                        out.data[(i * da + k) * db * db + j * db + l] =
                            self.data[(i * db + j) * n + k * db + l];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Kronecker product, left factor slow.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    check_side(rows.max(cols))?;
    let mut data = vec![ZERO; rows * cols];
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a.data[i * a.cols + j];
            if x == ZERO {
                continue;
            }
            for k in 0..b.rows {
                let dst = (i * b.rows + k) * cols + j * b.cols;
                let src = &b.data[k * b.cols..(k + 1) * b.cols];
                for (d, &y) in data[dst..dst + b.cols].iter_mut().zip(src) {
                    *d = x * y;
                }
            }
        }
    }
    Ok(ComplexMatrix { rows, cols, data })
}

/// Kronecker product of a sequence, left to right.
pub fn kron_all(ms: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = ms.split_first().ok_or_else(|| dim_mismatch("kron_all of nothing"))?;
    rest.iter().try_fold((*first).clone(), |acc, m| kron(&acc, m))
}

fn check_dims(m: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !m.is_square() {
        return Err(dim_mismatch("expected a square matrix"));
    }
    let prod: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || prod != m.rows {
        return Err(dim_mismatch(format!("dims {dims:?} do not factor side {}", m.rows)));
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Flat offsets of every multi-index over `factors`, enumerated with the
/// first listed factor slowest.
fn offsets(factors: &[usize], dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(out.len() * dims[f]);
        for &o in &out {
            for x in 0..dims[f] {
                next.push(o + x * strides[f]);
            }
        }
        out = next;
    }
    out
}

/// Reduced density matrix of the pure state `psi` on the factors in `keep`
/// (kept factors appear in ascending order).
pub fn pure_marginal(psi: &[C64], dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if psi.len() != total {
        return Err(dim_mismatch(format!("state length {} vs dims {dims:?}", psi.len())));
    }
    let st = strides(dims);
    let kept: Vec<usize> = (0..dims.len()).filter(|i| keep.contains(i)).collect();
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let ko = offsets(&kept, dims, &st);
    let ro = offsets(&rest, dims, &st);
    let k = ko.len();
    let mut out = ComplexMatrix::zeros(k, k);
    for (i, &a) in ko.iter().enumerate() {
        for (j, &b) in ko.iter().enumerate().skip(i) {
            let v: C64 = ro.iter().map(|&r| psi[a + r] * psi[b + r].conj()).sum();
            out.data[i * k + j] = v;
            out.data[j * k + i] = v.conj();
        }
    }
    Ok(out)
}

/// Apply `op` (shape `d_new x dims[factor]`) to one tensor factor of `psi`.
///
/// Returns the new state and its dimension list.
pub fn apply_to_factor(
    psi: &[C64],
    dims: &[usize],
    factor: usize,
    op: &ComplexMatrix,
) -> Result<(Vec<C64>, Vec<usize>)> {
    if factor >= dims.len() || op.cols != dims[factor] {
        return Err(dim_mismatch(format!(
            "operator {}x{} cannot act on factor {factor} of {dims:?}",
            op.rows, op.cols
        )));
    }
    let outer: usize = dims[..factor].iter().product();
    let inner: usize = dims[factor + 1..].iter().product();
    let (din, dout) = (dims[factor], op.rows);
    let mut out = vec![ZERO; outer * dout * inner];
    for o in 0..outer {
        for r in 0..dout {
            for c in 0..din {
                let x = op.data[r * din + c];
                if x == ZERO {
                    continue;
                }
                let src = (o * din + c) * inner;
                let dst = (o * dout + r) * inner;
                for t in 0..inner {
                    out[dst + t] += x * psi[src + t];
                }
            }
        }
    }
    let mut new_dims = dims.to_vec();
    new_dims[factor] = dout;
    Ok((out, new_dims))
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Pauli matrices, handy for tests and constructors.
pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::new(2, 2, vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO])
            .expect("static shape")
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{ginibre, random_density, seeded};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_identities_and_basis() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
        let e0 = ComplexMatrix::from_real(2, 1, &[1.0, 0.0]);
        let e1 = ComplexMatrix::from_real(2, 1, &[0.0, 1.0]);
        assert_eq!(kron(&e0, &e1).unwrap().data(), &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn kron_x_z_layout() {
        let xz = kron(&pauli::x(), &pauli::z()).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(0, 2)] = c(1.0);
        expected[(1, 3)] = c(-1.0);
        expected[(2, 0)] = c(1.0);
        expected[(3, 1)] = c(-1.0);
        assert_eq!(xz, expected);
    }

    #[test]
    fn kron_respects_size_limit() {
        let big = ComplexMatrix::zeros(100, 1);
        let err = kron(&big, &ComplexMatrix::zeros(100, 1)).unwrap_err();
        assert!(matches!(err, QpdError::SizeLimit { side: 10_000, .. }));
    }

    #[test]
    fn partial_trace_of_product_and_bell() {
        let mut rng = seeded(3);
        let rho = random_density(&mut rng, 3, 3);
        let sigma = random_density(&mut rng, 2, 2);
        let prod = kron(&rho, &sigma).unwrap();
        assert!(prod.partial_trace(&[3, 2], &[0]).unwrap().max_diff(&rho) < 1e-14);
        assert!(prod.partial_trace(&[3, 2], &[1]).unwrap().max_diff(&sigma) < 1e-14);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ComplexMatrix::outer(&[c(s), c(0.0), c(0.0), c(s)]);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(phi.partial_trace(&[2, 2], &[0]).unwrap().max_diff(&half) < 1e-15);
    }

    #[test]
    fn partial_trace_middle_factor_matches_index_sum() {
        let mut rng = seeded(11);
        let m = random_density(&mut rng, 12, 12);
        let dims = [2, 3, 2];
        let got = m.partial_trace(&dims, &[0, 2]).unwrap();
        let mut want = ComplexMatrix::zeros(4, 4);
        for a in 0..2 {
            for c2 in 0..2 {
                for a2 in 0..2 {
                    for c3 in 0..2 {
                        let mut acc = ZERO;
                        for b in 0..3 {
                            acc += m[((a * 3 + b) * 2 + c2, (a2 * 3 + b) * 2 + c3)];
                        }
                        want[(a * 2 + c2, a2 * 2 + c3)] = acc;
                    }
                }
            }
        }
        assert!(got.max_diff(&want) < 1e-15);
        assert!(m.partial_trace(&[5, 2], &[0]).is_err());
    }

    #[test]
    fn partial_transpose_of_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ComplexMatrix::outer(&[c(s), c(0.0), c(0.0), c(s)]);
        let pt = phi.partial_transpose(&[2, 2], 1).unwrap();
        let ev = pt.eigvalsh().unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(pt.partial_transpose(&[2, 2], 1).unwrap(), phi);
        assert!(matches!(
            ComplexMatrix::identity(8).partial_transpose(&[2, 2, 2], 0),
            Err(QpdError::Unsupported(_))
        ));
    }

    #[test]
    fn partial_transpose_of_product() {
        let mut rng = seeded(5);
        let rho = random_density(&mut rng, 2, 2);
        let sigma = random_density(&mut rng, 3, 3);
        let pt = kron(&rho, &sigma).unwrap().partial_transpose(&[2, 3], 1).unwrap();
        assert!(pt.max_diff(&kron(&rho, &sigma.transpose()).unwrap()) < 1e-15);
    }

    #[test]
    fn eigh_examples() {
        assert_eq!(ComplexMatrix::identity(3).eigvalsh().unwrap(), vec![1.0, 1.0, 1.0]);
        let d = ComplexMatrix::from_real_diag(&[-1.0, 2.0]);
        assert_eq!(d.eigvalsh().unwrap(), vec![2.0, -1.0]);
        let e = pauli::x().eigh().unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15 && (e.values[1] + 1.0).abs() < 1e-15);
        let v0 = e.vectors.column(0);
        // eigenvector for +1 is (1,1)/√2 up to phase
        assert!((v0[0] - v0[1]).norm() < 1e-12);
        assert!(matches!(pauli::x().matmul(&pauli::z()).unwrap().eigh(), Err(QpdError::NotHermitian(_))));
    }

    #[test]
    fn svd_reconstructs() {
        let mut rng = seeded(11);
        for (m, n) in [(64, 16), (5, 9), (7, 7), (1, 3)] {
            let a = ginibre(&mut rng, m, n);
            let Svd { u, s, v_adj } = a.svd();
            let k = m.min(n);
            assert_eq!(s.len(), k);
            assert!(s.windows(2).all(|w| w[0] >= w[1]));
            let sig = ComplexMatrix::from_real_diag(&s);
            let rec = u.matmul(&sig).unwrap().matmul(&v_adj).unwrap();
            assert!(rec.max_diff(&a) < 1e-12, "{m}x{n}");
        }
        let rank_one = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let s = rank_one.singular_values();
        assert!((s[0] - 5.0).abs() < 1e-14 && s[1].abs() < 1e-14);
    }

    #[test]
    fn pinv_examples() {
        assert_eq!(ComplexMatrix::identity(3).pinv(1e-10).max_diff(&ComplexMatrix::identity(3)), 0.0);
        let p = ComplexMatrix::from_real_diag(&[2.0, 0.0]).pinv(1e-10);
        assert!(p.max_diff(&ComplexMatrix::from_real_diag(&[0.5, 0.0])) < 1e-15);
        assert_eq!(ComplexMatrix::zeros(2, 3).pinv(1e-10), ComplexMatrix::zeros(3, 2));
    }

    #[test]
    fn nullspace_examples() {
        assert!(ComplexMatrix::identity(2).svd_nullspace(1e-10).is_none());
        let k = ComplexMatrix::from_real_diag(&[1.0, 0.0]).svd_nullspace(1e-10).unwrap();
        assert_eq!(k.cols(), 1);
        assert!((k[(1, 0)].norm() - 1.0).abs() < 1e-14 && k[(0, 0)].norm() < 1e-14);
        let ones = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let k = ones.svd_nullspace(1e-10).unwrap();
        let ratio = k[(0, 0)] / k[(1, 0)];
        assert!((ratio + 1.0).norm() < 1e-12);
        assert!((k.frobenius_norm() - 1.0).abs() < 1e-12);
        let wide = ginibre(&mut seeded(2), 2, 5);
        let k = wide.svd_nullspace(1e-10).unwrap();
        assert_eq!(k.cols(), 3);
        assert!(wide.matmul(&k).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn vec_convention_round_trip() {
        let m = ginibre(&mut seeded(8), 2, 3);
        let v = m.vec_col();
        assert_eq!(v[1], m[(1, 0)]);
        assert_eq!(ComplexMatrix::unvec_col(&v, 2, 3), m);
    }

    #[test]
    fn pure_marginal_and_factor_action() {
        let mut rng = seeded(9);
        let psi = ginibre(&mut rng, 12, 1);
        let psi = psi.scale_real(1.0 / psi.frobenius_norm());
        let rho = ComplexMatrix::outer(psi.data());
        let dims = [2, 3, 2];
        for keep in [vec![0], vec![1], vec![0, 2], vec![1, 2]] {
            let a = pure_marginal(psi.data(), &dims, &keep).unwrap();
            let b = rho.partial_trace(&dims, &keep).unwrap();
            assert!(a.max_diff(&b) < 1e-14);
        }
        let op = ginibre(&mut rng, 4, 3);
        let (out, nd) = apply_to_factor(psi.data(), &dims, 1, &op).unwrap();
        assert_eq!(nd, vec![2, 4, 2]);
        let full = kron_all(&[&ComplexMatrix::identity(2), &op, &ComplexMatrix::identity(2)]).unwrap();
        let want = full.mul_vec(psi.data());
        assert!(out.iter().zip(&want).all(|(a, b)| (a - b).norm() < 1e-14));
    }
}
