//! Dense complex linear algebra: the matrix carrier, Hilbert–Schmidt
//! subspaces and their closures under products and adjoints.
//!
//! Every morphism in this crate is ultimately a [`ComplexMatrix`]; every
//! morphism space is a [`MatrixSubspace`] with an orthonormal basis in the
//! Hilbert–Schmidt inner product `<a, b> = tr(a* b)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Numerical tolerances shared by every construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute entrywise bound on Gram-matrix deviation from the identity.
    pub orth: f64,
    /// Relative membership tolerance: residuals must be at most `mem * (1 + |m|_HS)`.
    pub mem: f64,
    /// Rank / eigenvalue-cluster threshold.
    pub rank: f64,
    /// Cap on the dimension of any closure.
    pub max_dim: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            orth: 1e-10,
            mem: 1e-8,
            rank: 1e-7,
            max_dim: 20_000,
        }
    }
}

impl Tolerances {
    /// Membership bound for an element of Hilbert–Schmidt norm `norm`.
    pub fn mem_bound(&self, norm: f64) -> f64 {
        self.mem * (1.0 + norm)
    }
}

/// Deterministic generator used wherever randomness is needed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{})[", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols() {
                let z = self.get(i, j);
                write!(f, "{}{:.4}{:+.4}i", if j > 0 { ", " } else { "" }, z.re, z.im)?;
            }
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        ComplexMatrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds from row-major entries, rejecting non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: (rows, cols),
                got: (entries.len(), 1),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { C64::new(0.0, 0.0) })
    }

    /// Matrix unit `E_{ij}` of the given shape.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.0[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| random_c64(rng))
    }

    pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let a = Self::random(n, n, rng);
        (&a + &a.adjoint()).scale(0.5)
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Self {
        ComplexMatrix(m)
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.0[(i, j)] = z;
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix(self.0.map(|z| z * s))
    }

    pub fn scale_c(&self, s: C64) -> Self {
        ComplexMatrix(self.0.map(|z| z * s))
    }

    pub fn trace(&self) -> C64 {
        self.0.diagonal().iter().sum()
    }

    /// `tr(self* other)`.
    pub fn hs_inner(&self, other: &ComplexMatrix) -> C64 {
        debug_assert_eq!(self.shape(), other.shape());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        operator_norm(self)
    }

    /// Copies `self` into a zero matrix of shape `rows x cols` at the given offset.
    pub fn embed(&self, rows: usize, cols: usize, row_off: usize, col_off: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        out.0
            .view_mut((row_off, col_off), (self.rows(), self.cols()))
            .copy_from(&self.0);
        out
    }

    pub fn block(&self, row_off: usize, col_off: usize, rows: usize, cols: usize) -> Self {
        ComplexMatrix(self.0.view((row_off, col_off), (rows, cols)).into_owned())
    }

    pub fn set_block(&mut self, row_off: usize, col_off: usize, b: &ComplexMatrix) {
        self.0
            .view_mut((row_off, col_off), (b.rows(), b.cols()))
            .copy_from(&b.0);
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(parts: &[&ComplexMatrix]) -> Self {
        let r: usize = parts.iter().map(|p| p.rows()).sum();
        let c: usize = parts.iter().map(|p| p.cols()).sum();
        let mut out = Self::zeros(r, c);
        let (mut ro, mut co) = (0, 0);
        for p in parts {
            out.set_block(ro, co, p);
            ro += p.rows();
            co += p.cols();
        }
        out
    }

    /// Selected columns, in order.
    pub fn columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows(), idx.len(), |i, j| self.0[(i, idx[j])])
    }

    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(0.5)
    }

    /// `|self - self*|` in operator norm.
    pub fn hermitian_defect(&self) -> f64 {
        (self - &self.adjoint()).operator_norm()
    }

    pub fn dist(&self, other: &ComplexMatrix) -> f64 {
        (self - other).operator_norm()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Largest singular value; zero for empty matrices.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    m.0.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.0.singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    /// Groups eigenvalues whose consecutive gaps are at most `gap` and returns,
    /// for each cluster, its mean eigenvalue and column indices.
    pub fn clusters(&self, gap: f64) -> Vec<(f64, Vec<usize>)> {
        let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
        for (k, &v) in self.values.iter().enumerate() {
            match out.last_mut() {
                Some((_, idx)) if v - self.values[*idx.last().unwrap()] <= gap => idx.push(k),
                _ => out.push((v, vec![k])),
            }
        }
        for (mean, idx) in out.iter_mut() {
            *mean = idx.iter().map(|&k| self.values[k]).sum::<f64>() / idx.len() as f64;
        }
        out
    }

    /// Orthogonal projection onto the span of the given eigenvector columns.
    pub fn projection(&self, idx: &[usize]) -> ComplexMatrix {
        let v = self.vectors.columns(idx);
        &v * &v.adjoint()
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (m.rows(), m.rows()),
            got: m.shape(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermitianEig {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let defect = m.hermitian_defect();
    if defect > 1e-10 * (1.0 + m.operator_norm()) {
        return Err(Error::NotHermitian(defect));
    }
    let eig = SymmetricEigen::new(m.hermitian_part().0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_dmatrix(eig.eigenvectors).columns(&order);
    Ok(HermitianEig { values, vectors })
}

/// Square root of a positive semidefinite matrix.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    spectral_map(m, f64::sqrt)
}

/// Moore–Penrose inverse of a positive semidefinite matrix's square root,
/// i.e. `m^{-1/2}` on the support of `m`.
pub fn inv_sqrt_psd(m: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    spectral_map(m, |x| if x > cutoff { 1.0 / x.sqrt() } else { 0.0 })
}

fn spectral_map(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let scale = 1.0 + eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if let Some(&lo) = eig.values.first() {
        if lo < -1e-9 * scale {
            return Err(Error::NotPsd(lo));
        }
    }
    let d: Vec<C64> = eig.values.iter().map(|&x| C64::new(f(x.max(0.0)), 0.0)).collect();
    let v = &eig.vectors;
    Ok(&(v * &ComplexMatrix::diag(&d)) * &v.adjoint())
}

/// Moore–Penrose pseudo-inverse.
pub fn pinv(m: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return ComplexMatrix::zeros(c, r);
    }
    let svd = m.0.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = smax * 1e-12 * (r.max(c) as f64);
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let k = svd.singular_values.len();
    let mut out = DMatrix::<C64>::zeros(c, r);
    for s in 0..k {
        let sv = svd.singular_values[s];
        if sv > cutoff {
            let uc = u.column(s);
            let vr = vt.row(s);
            // v_s (1/sv) u_s*
            for i in 0..c {
                for j in 0..r {
                    out[(i, j)] += vr[i].conj() * uc[j].conj() / sv;
                }
            }
        }
    }
    ComplexMatrix(out)
}

/// Orthonormal basis (columns) of the range of a positive semidefinite or
/// projection-like Hermitian matrix: eigenvectors with eigenvalue above `threshold`.
pub fn range_basis(m: &ComplexMatrix, threshold: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let idx: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] > threshold)
        .collect();
    Ok(eig.vectors.columns(&idx))
}

/// Subspace of `rows x cols` matrices with an orthonormal basis.
#[derive(Debug, Clone)]
pub struct MatrixSubspace {
    rows: usize,
    cols: usize,
    basis: Vec<ComplexMatrix>,
}

impl MatrixSubspace {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatrixSubspace {
            rows,
            cols,
            basis: Vec::new(),
        }
    }

    /// All `rows x cols` matrices, spanned by matrix units.
    pub fn full(rows: usize, cols: usize) -> Self {
        let mut basis = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                basis.push(ComplexMatrix::unit(rows, cols, i, j));
            }
        }
        MatrixSubspace { rows, cols, basis }
    }

    /// Wraps a basis that the caller guarantees to be orthonormal.
    pub fn from_orthonormal(rows: usize, cols: usize, basis: Vec<ComplexMatrix>) -> Self {
        debug_assert!(basis.iter().all(|b| b.shape() == (rows, cols)));
        MatrixSubspace { rows, cols, basis }
    }

    /// Span of arbitrary matrices, orthonormalized by modified Gram–Schmidt.
    pub fn span(rows: usize, cols: usize, spanning: &[ComplexMatrix], tol: &Tolerances) -> Result<Self> {
        let mut s = Self::zero(rows, cols);
        for m in spanning {
            s.insert(m, tol)?;
        }
        Ok(s)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    fn check_shape(&self, m: &ComplexMatrix) -> Result<()> {
        if m.shape() != (self.rows, self.cols) {
            return Err(Error::ShapeMismatch {
                expected: (self.rows, self.cols),
                got: m.shape(),
            });
        }
        Ok(())
    }

    /// Coordinates `<b_i, m>` in the orthonormal basis.
    pub fn coords(&self, m: &ComplexMatrix) -> Result<Vec<C64>> {
        self.check_shape(m)?;
        Ok(self.basis.iter().map(|b| b.hs_inner(m)).collect())
    }

    pub fn from_coords(&self, c: &[C64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for (b, &z) in self.basis.iter().zip(c) {
            out.0 += &b.0 * z;
        }
        out
    }

    /// Orthogonal projection and Hilbert–Schmidt residual.
    pub fn project(&self, m: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
        let c = self.coords(m)?;
        let p = self.from_coords(&c);
        let r = (m - &p).hs_norm();
        Ok((p, r))
    }

    pub fn residual(&self, m: &ComplexMatrix) -> Result<f64> {
        Ok(self.project(m)?.1)
    }

    pub fn contains(&self, m: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
        Ok(self.residual(m)? <= tol.mem_bound(m.hs_norm()))
    }

    /// Adds `m` to the span if it is not already a member; returns whether the
    /// dimension grew.
    pub fn insert(&mut self, m: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
        self.check_shape(m)?;
        let norm = m.hs_norm();
        let mut r = m.clone();
        // two passes of Gram–Schmidt keep the basis orthonormal to ~1e-15
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.hs_inner(&r);
                r.0 -= &b.0 * c;
            }
        }
        let rn = r.hs_norm();
        if rn <= tol.mem_bound(norm) {
            return Ok(false);
        }
        self.basis.push(r.scale(1.0 / rn));
        Ok(true)
    }

    /// Largest entrywise deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.hs_inner(b) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn is_orthonormal(&self, tol: &Tolerances) -> bool {
        self.gram_defect() <= tol.orth
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let c: Vec<C64> = (0..self.dim()).map(|_| random_c64(rng)).collect();
        self.from_coords(&c)
    }

    /// `{ m* : m in self }`.
    pub fn adjoint_space(&self) -> MatrixSubspace {
        MatrixSubspace {
            rows: self.cols,
            cols: self.rows,
            basis: self.basis.iter().map(ComplexMatrix::adjoint).collect(),
        }
    }

    /// Span of `self` and `other`.
    pub fn join(&self, other: &MatrixSubspace, tol: &Tolerances) -> Result<MatrixSubspace> {
        let mut out = self.clone();
        for b in &other.basis {
            out.insert(b, tol)?;
        }
        Ok(out)
    }

    /// `self ∩ other`, from the eigenvalue-one eigenspace of the compressed
    /// projection `P_self P_other P_self`.
    pub fn intersect(&self, other: &MatrixSubspace, tol: &Tolerances) -> Result<MatrixSubspace> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                got: other.shape(),
            });
        }
        let d = self.dim();
        if d == 0 || other.dim() == 0 {
            return Ok(Self::zero(self.rows, self.cols));
        }
        let m = ComplexMatrix::from_fn(d, other.dim(), |i, k| self.basis[i].hs_inner(&other.basis[k]));
        let g = &m * &m.adjoint();
        let eig = hermitian_eig(&g.hermitian_part())?;
        let mut basis = Vec::new();
        for (k, &v) in eig.values.iter().enumerate() {
            if v > 1.0 - tol.rank {
                let coeffs: Vec<C64> = (0..d).map(|i| eig.vectors.get(i, k)).collect();
                basis.push(self.from_coords(&coeffs));
            }
        }
        MatrixSubspace::span(self.rows, self.cols, &basis, tol)
    }

    /// Whether every basis element of `self` lies in `other`; returns the worst residual.
    pub fn worst_residual_in(&self, other: &MatrixSubspace) -> Result<f64> {
        let mut worst = 0.0f64;
        for b in &self.basis {
            worst = worst.max(other.residual(b)?);
        }
        Ok(worst)
    }
}

/// Smallest subspace containing `generators` that is closed under the
/// partial `product` rule (a `None` product means "not composable") and,
/// when `adjoints` is set, under `m ↦ m*`.
///
/// `adjoints` requires square generators.
pub fn close_under<F>(
    generators: &[ComplexMatrix],
    product: F,
    adjoints: bool,
    tol: &Tolerances,
) -> Result<MatrixSubspace>
where
    F: Fn(&ComplexMatrix, &ComplexMatrix) -> Option<ComplexMatrix>,
{
    let Some(first) = generators.first() else {
        return Ok(MatrixSubspace::zero(0, 0));
    };
    let (rows, cols) = first.shape();
    if adjoints && rows != cols {
        return Err(Error::ShapeMismatch {
            expected: (rows, rows),
            got: (rows, cols),
        });
    }
    let mut space = MatrixSubspace::zero(rows, cols);
    let mut queue: Vec<ComplexMatrix> = Vec::new();
    let push = |space: &mut MatrixSubspace, queue: &mut Vec<ComplexMatrix>, m: &ComplexMatrix| -> Result<()> {
        if space.insert(m, tol)? {
            if space.dim() > tol.max_dim {
                return Err(Error::DimensionBlowup {
                    dim: space.dim(),
                    cap: tol.max_dim,
                });
            }
            queue.push(space.basis.last().unwrap().clone());
        }
        Ok(())
    };
    for g in generators {
        push(&mut space, &mut queue, g)?;
    }
    while let Some(x) = queue.pop() {
        let current: Vec<ComplexMatrix> = space.basis.clone();
        for y in &current {
            if let Some(p) = product(&x, y) {
                push(&mut space, &mut queue, &p)?;
            }
            if let Some(p) = product(y, &x) {
                push(&mut space, &mut queue, &p)?;
            }
        }
        if let Some(p) = product(&x, &x) {
            push(&mut space, &mut queue, &p)?;
        }
        if adjoints {
            push(&mut space, &mut queue, &x.adjoint())?;
        }
    }
    Ok(space)
}

/// Matrix multiplication as a total product rule.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Option<ComplexMatrix> {
    (a.cols() == b.rows()).then(|| a * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn operator_norm_identity_and_diagonal() {
        assert!((operator_norm(&ComplexMatrix::identity(2)) - 1.0).abs() < 1e-12);
        let d = ComplexMatrix::diag(&[c(3.0, 0.0), c(0.0, 4.0)]);
        assert!((operator_norm(&d) - 4.0).abs() < 1e-12);
        assert_eq!(operator_norm(&ComplexMatrix::zeros(0, 0)), 0.0);
    }

    #[test]
    fn eig_of_diag_and_swap() {
        let e = hermitian_eig(&ComplexMatrix::diag(&[c(2.0, 0.0), c(1.0, 0.0)])).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12 && (e.values[1] - 2.0).abs() < 1e-12);
        assert!((e.vectors.get(1, 0).norm() - 1.0).abs() < 1e-12);
        let s = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let e = hermitian_eig(&s).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-12 && (e.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::unit(2, 2, 0, 1);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = seeded_rng(3);
        let m = ComplexMatrix::random_hermitian(6, &mut rng);
        let e = hermitian_eig(&m).unwrap();
        let d: Vec<C64> = e.values.iter().map(|&v| c(v, 0.0)).collect();
        let rec = &(&e.vectors * &ComplexMatrix::diag(&d)) * &e.vectors.adjoint();
        assert!(rec.dist(&m) < 1e-9);
        let vv = &e.vectors.adjoint() * &e.vectors;
        assert!(vv.dist(&ComplexMatrix::identity(6)) < 1e-9);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sqrt_and_pinv() {
        let m = ComplexMatrix::diag(&[c(4.0, 0.0), c(9.0, 0.0)]);
        let r = sqrt_psd(&m).unwrap();
        assert!(r.dist(&ComplexMatrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)])) < 1e-12);
        assert!(pinv(&ComplexMatrix::identity(3)).dist(&ComplexMatrix::identity(3)) < 1e-12);
        let neg = ComplexMatrix::diag(&[c(-1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(sqrt_psd(&neg), Err(Error::NotPsd(_))));
    }

    #[test]
    fn pinv_moore_penrose_identities() {
        let mut rng = seeded_rng(11);
        for (r, cc) in [(4, 3), (3, 5), (4, 4)] {
            let m = ComplexMatrix::random(r, cc, &mut rng);
            let p = pinv(&m);
            assert!((&(&m * &p) * &m).dist(&m) < 1e-9);
            assert!((&(&p * &m) * &p).dist(&p) < 1e-9);
            assert!((&m * &p).hermitian_defect() < 1e-9);
            assert!((&p * &m).hermitian_defect() < 1e-9);
        }
        // rank deficient
        let a = ComplexMatrix::random(4, 1, &mut rng);
        let b = ComplexMatrix::random(1, 3, &mut rng);
        let m = &a * &b;
        let p = pinv(&m);
        assert!((&(&m * &p) * &m).dist(&m) < 1e-9);
    }

    #[test]
    fn projection_membership_and_orthogonality() {
        let tol = Tolerances::default();
        let s = MatrixSubspace::span(2, 2, &[ComplexMatrix::identity(2)], &tol).unwrap();
        let (_, r) = s.project(&ComplexMatrix::identity(2).scale(3.0)).unwrap();
        assert!(r <= 1e-10);
        let e12 = ComplexMatrix::unit(2, 2, 0, 1);
        let (p, _) = s.project(&e12).unwrap();
        assert!(p.max_abs() < 1e-15);
        assert!(matches!(s.project(&ComplexMatrix::zeros(3, 2)), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn closure_examples() {
        let tol = Tolerances::default();
        let id = close_under(&[ComplexMatrix::identity(2)], matmul, true, &tol).unwrap();
        assert_eq!(id.dim(), 1);
        let m2 = close_under(&[ComplexMatrix::unit(2, 2, 0, 1)], matmul, true, &tol).unwrap();
        assert_eq!(m2.dim(), 4);
        let again = close_under(m2.basis(), matmul, true, &tol).unwrap();
        assert_eq!(again.dim(), 4);
        // without adjoints E12 is nilpotent
        let nil = close_under(&[ComplexMatrix::unit(2, 2, 0, 1)], matmul, false, &tol).unwrap();
        assert_eq!(nil.dim(), 1);
    }

    #[test]
    fn closure_cap_triggers() {
        let tol = Tolerances {
            max_dim: 3,
            ..Tolerances::default()
        };
        let r = close_under(&[ComplexMatrix::unit(2, 2, 0, 1)], matmul, true, &tol);
        assert!(matches!(r, Err(Error::DimensionBlowup { .. })));
    }

    #[test]
    fn intersection_of_subspaces() {
        let tol = Tolerances::default();
        let a = MatrixSubspace::span(
            2,
            2,
            &[ComplexMatrix::unit(2, 2, 0, 0), ComplexMatrix::unit(2, 2, 1, 1)],
            &tol,
        )
        .unwrap();
        let b = MatrixSubspace::span(2, 2, &[ComplexMatrix::unit(2, 2, 0, 0), ComplexMatrix::unit(2, 2, 0, 1)], &tol)
            .unwrap();
        let i = a.intersect(&b, &tol).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&ComplexMatrix::unit(2, 2, 0, 0), &tol).unwrap());
    }

    #[test]
    fn empty_shapes() {
        let z = ComplexMatrix::zeros(0, 3);
        assert_eq!(z.hs_norm(), 0.0);
        assert_eq!(operator_norm(&z), 0.0);
        let p = pinv(&z);
        assert_eq!(p.shape(), (3, 0));
        assert!(sqrt_psd(&ComplexMatrix::zeros(0, 0)).unwrap().shape() == (0, 0));
    }
}
