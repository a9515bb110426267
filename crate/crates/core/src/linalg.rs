//! Dense complex matrices and the small amount of numerical linear algebra the
//! rest of the crate is built on: Kronecker products, trace-orthonormal matrix
//! spaces, algebra closure, centers, and simultaneous spectral projections.
//!
//! Tensor index convention: in `kron(a, b)` the index of `b` varies fastest,
//! so entry `(i * nb + k, j * nb + l)` is `a[(i, j)] * b[(k, l)]`. Tensors over
//! poset points are always formed in increasing label order, which makes point
//! `0` the slowest-varying coordinate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance used for every rank, orthogonality and closure decision
/// unless the caller supplies another one.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest ambient dimension any constructor will materialize.
pub const DEFAULT_MAX_DIM: usize = 4096;
/// Number of generic combinations tried before giving up on a family.
pub const DEFAULT_RETRIES: usize = 8;
/// Relative eigenvalue gap below which clusters are merged.
const CLUSTER_GAP: f64 = 1e-6;
/// Grid used to turn eigenvalue tuples into sort keys.
const ORDER_GRID: f64 = 1e-6;

/// `tol * max(1, scale)`.
#[inline]
pub fn scaled_tol(tol: f64, scale: f64) -> f64 {
    tol * scale.max(1.0)
}

/// A dense square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    data: DMatrix<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.data[(i, j)];
                    if z.im.abs() < 1e-12 {
                        format!("{:.4}", z.re)
                    } else {
                        format!("{:.4}{:+.4}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl CMatrix {
    pub fn new(data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, expected square",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.nrows() == 0 {
            return Err(Error::Dimension("matrix has dimension 0".into()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("matrix has non-finite entries".into()));
        }
        Ok(CMatrix { data })
    }

    /// Builds an `n x n` matrix from a closure. Panics if `n == 0`.
    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        CMatrix {
            data: DMatrix::from_fn(n, n, f),
        }
    }

    /// Row-major real entries.
    pub fn from_real_rows(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!(
                "{} entries cannot form a {n}x{n} matrix",
                entries.len()
            )));
        }
        CMatrix::new(DMatrix::from_fn(n, n, |i, j| {
            C64::new(entries[i * n + j], 0.0)
        }))
    }

    /// Row-major complex entries.
    pub fn from_rows(n: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!(
                "{} entries cannot form a {n}x{n} matrix",
                entries.len()
            )));
        }
        CMatrix::new(DMatrix::from_fn(n, n, |i, j| entries[i * n + j]))
    }

    pub fn zeros(n: usize) -> Self {
        CMatrix::from_fn(n, |_, _| C64::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix::from_fn(n, |i, j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
    }

    /// The all-ones matrix `J`.
    pub fn ones(n: usize) -> Self {
        CMatrix::from_fn(n, |_, _| C64::new(1.0, 0.0))
    }

    pub fn diagonal(values: &[C64]) -> Self {
        CMatrix::from_fn(values.len(), |i, j| {
            if i == j {
                values[i]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn diagonal_real(values: &[f64]) -> Self {
        CMatrix::from_fn(values.len(), |i, j| {
            C64::new(if i == j { values[i] } else { 0.0 }, 0.0)
        })
    }

    /// Elementary diagonal unit `e_k e_k^T`.
    pub fn unit_diagonal(n: usize, k: usize) -> Self {
        CMatrix::from_fn(n, |i, j| {
            C64::new(if i == k && j == k { 1.0 } else { 0.0 }, 0.0)
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.data
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> impl Iterator<Item = C64> + '_ {
        let n = self.dim();
        (0..n * n).map(move |k| self.data[(k / n, k % n)])
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix {
            data: self.data.adjoint(),
        }
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix {
            data: self.data.transpose(),
        }
    }

    pub fn conjugate(&self) -> CMatrix {
        CMatrix {
            data: self.data.map(|z| z.conj()),
        }
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Trace inner product `tr(A B^H)`.
    pub fn inner(&self, other: &CMatrix) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// Frobenius distance.
    pub fn dist(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, c: C64) -> CMatrix {
        CMatrix {
            data: &self.data * c,
        }
    }

    pub fn scale_real(&self, c: f64) -> CMatrix {
        self.scale(C64::new(c, 0.0))
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_same(other, "product")?;
        Ok(CMatrix {
            data: &self.data * &other.data,
        })
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_same(other, "sum")?;
        Ok(CMatrix {
            data: &self.data + &other.data,
        })
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_same(other, "difference")?;
        Ok(CMatrix {
            data: &self.data - &other.data,
        })
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data * &other.data - &other.data * &self.data,
        }
    }

    /// Number of singular values `>= tol * sigma_max`. The zero matrix has rank 0.
    pub fn rank(&self, tol: f64) -> usize {
        let sv = self.data.clone().singular_values();
        let max = sv.iter().cloned().fold(0.0_f64, f64::max);
        if max == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s >= tol * max).count()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.dist(&self.adjoint()) <= scaled_tol(tol, self.norm())
    }

    /// Entries within `tol` of 0 or 1.
    pub fn is_zero_one(&self, tol: f64) -> bool {
        self.data
            .iter()
            .all(|z| z.im.abs() <= tol && (z.re.abs() <= tol || (z.re - 1.0).abs() <= tol))
    }

    /// Symmetrized copy `(M + M^H) / 2`.
    pub fn hermitian_part(&self) -> CMatrix {
        CMatrix {
            data: (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    fn check_same(&self, other: &CMatrix, what: &str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "{what} of {}x{} and {}x{} matrices",
                self.dim(),
                self.dim(),
                other.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, ij: (usize, usize)) -> &C64 {
        &self.data[ij]
    }
}

// Operator forms panic on mismatched dimensions, as nalgebra does; the
// `matmul`/`add`/`sub` methods are the checked variants.
impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

impl Add<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        self.data += &rhs.data;
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, rhs: &CMatrix) {
        self.data -= &rhs.data;
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix {
            data: -self.data.clone(),
        }
    }
}

impl Mul<f64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: f64) -> CMatrix {
        self.scale_real(rhs)
    }
}

impl Mul<C64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: C64) -> CMatrix {
        self.scale(rhs)
    }
}

/// Kronecker product with the default dimension cap.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    kron_capped(a, b, DEFAULT_MAX_DIM)
}

pub fn kron_capped(a: &CMatrix, b: &CMatrix, cap: usize) -> Result<CMatrix> {
    let (na, nb) = (a.dim(), b.dim());
    let n = na.checked_mul(nb).ok_or(Error::Size {
        dim: usize::MAX,
        cap,
    })?;
    if n > cap {
        return Err(Error::Size { dim: n, cap });
    }
    let mut data = DMatrix::<C64>::zeros(n, n);
    for i in 0..na {
        for j in 0..na {
            let aij = a.data[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    data[(i * nb + k, j * nb + l)] = aij * b.data[(k, l)];
                }
            }
        }
    }
    Ok(CMatrix { data })
}

/// Left fold of [`kron`] over a non-empty list.
pub fn multi_kron(factors: &[CMatrix]) -> Result<CMatrix> {
    multi_kron_capped(factors, DEFAULT_MAX_DIM)
}

pub fn multi_kron_capped(factors: &[CMatrix], cap: usize) -> Result<CMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::Contract("multi_kron of an empty list".into()))?;
    let total = factors
        .iter()
        .try_fold(1usize, |acc, m| acc.checked_mul(m.dim()))
        .unwrap_or(usize::MAX);
    if total > cap {
        return Err(Error::Size { dim: total, cap });
    }
    rest.iter()
        .try_fold(first.clone(), |acc, m| kron_capped(&acc, m, cap))
}

/// A linear subspace of `Mat_n(C)` with a basis that is orthonormal for the
/// trace inner product.
#[derive(Clone, Debug)]
pub struct MatrixSpace {
    ambient_dim: usize,
    basis: Vec<CMatrix>,
    tol: f64,
}

impl MatrixSpace {
    pub fn empty(ambient_dim: usize, tol: f64) -> Self {
        MatrixSpace {
            ambient_dim,
            basis: Vec::new(),
            tol,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Extends the basis by `m` if it is independent of the current span.
    /// Returns whether the dimension grew.
    pub fn insert(&mut self, m: &CMatrix) -> Result<bool> {
        if self.basis.is_empty() && self.ambient_dim == 0 {
            self.ambient_dim = m.dim();
        }
        if m.dim() != self.ambient_dim {
            return Err(Error::Dimension(format!(
                "cannot add a {}x{} matrix to a space in dimension {}",
                m.dim(),
                m.dim(),
                self.ambient_dim
            )));
        }
        let scale = m.norm();
        let mut v = m.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &self.basis {
                let c = v.inner(b);
                v -= &b.scale(c);
            }
        }
        let r = v.norm();
        if r <= scaled_tol(self.tol, scale) {
            return Ok(false);
        }
        self.basis.push(v.scale_real(1.0 / r));
        Ok(true)
    }

    /// Coordinates of the orthogonal projection of `m`.
    pub fn coordinates(&self, m: &CMatrix) -> Vec<C64> {
        self.basis.iter().map(|b| m.inner(b)).collect()
    }

    pub fn project(&self, m: &CMatrix) -> CMatrix {
        let mut p = CMatrix::zeros(m.dim());
        for b in &self.basis {
            p += &b.scale(m.inner(b));
        }
        p
    }

    /// `||m - proj(m)|| / max(1, ||m||)`.
    pub fn residual(&self, m: &CMatrix) -> f64 {
        m.dist(&self.project(m)) / m.norm().max(1.0)
    }

    pub fn contains(&self, m: &CMatrix) -> bool {
        self.residual(m) <= self.tol
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (k, a) in self.basis.iter().enumerate() {
            for (l, b) in self.basis.iter().enumerate() {
                let target = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest residual of `b_k * b_l` outside the space.
    pub fn product_closure_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.residual(&(a * b)));
            }
        }
        worst
    }
}

fn common_dim(mats: &[CMatrix]) -> Result<Option<usize>> {
    let Some(first) = mats.first() else {
        return Ok(None);
    };
    let n = first.dim();
    if let Some(bad) = mats.iter().find(|m| m.dim() != n) {
        return Err(Error::Dimension(format!(
            "mixed dimensions {n} and {}",
            bad.dim()
        )));
    }
    Ok(Some(n))
}

/// Trace-orthonormal basis of the span, in input order.
pub fn orthonormalize(mats: &[CMatrix], tol: f64) -> Result<MatrixSpace> {
    let n = common_dim(mats)?.unwrap_or(0);
    let mut space = MatrixSpace::empty(n, tol);
    for m in mats {
        space.insert(m)?;
    }
    Ok(space)
}

/// The smallest unital algebra containing `generators`, as a linear space.
pub fn algebra_closure(generators: &[CMatrix], tol: f64) -> Result<MatrixSpace> {
    let n = common_dim(generators)?
        .ok_or_else(|| Error::Contract("algebra closure needs at least one generator".into()))?;
    let mut space = MatrixSpace::empty(n, tol);
    space.insert(&CMatrix::identity(n))?;
    for g in generators {
        space.insert(g)?;
    }
    let mut next = 0;
    while next < space.dim() {
        let b = space.basis[next].clone();
        for g in generators {
            space.insert(&(&b * g))?;
        }
        next += 1;
    }
    Ok(space)
}

/// Elements of `space` commuting with every element of `space`.
pub fn center_of_algebra(space: &MatrixSpace, tol: f64) -> Result<MatrixSpace> {
    center_commuting_with(space, space.basis(), tol)
}

/// Elements of `space` commuting with every matrix in `probes`. When the
/// probes generate `space` as an algebra this is its center.
pub fn center_commuting_with(
    space: &MatrixSpace,
    probes: &[CMatrix],
    tol: f64,
) -> Result<MatrixSpace> {
    let n = space.ambient_dim();
    let dim = space.dim();
    if dim == 0 {
        return Ok(MatrixSpace::empty(n, tol));
    }
    if let Some(bad) = probes.iter().find(|p| p.dim() != n) {
        return Err(Error::Dimension(format!(
            "probe of dimension {} against a space in dimension {n}",
            bad.dim()
        )));
    }
    let block = n * n;
    let rows = (probes.len() * block).max(dim);
    let mut system = DMatrix::<C64>::zeros(rows, dim);
    for (k, b) in space.basis().iter().enumerate() {
        for (m, p) in probes.iter().enumerate() {
            let c = b.commutator(p);
            for (t, z) in c.row_major().enumerate() {
                system[(m * block + t, k)] = z;
            }
        }
    }
    let svd = system.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("singular value decomposition failed".into()))?;
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let mut center = MatrixSpace::empty(n, tol);
    for (k, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma > scaled_tol(tol, sigma_max) {
            continue;
        }
        let mut z = CMatrix::zeros(n);
        for (l, b) in space.basis().iter().enumerate() {
            z += &b.scale(v_t[(k, l)].conj());
        }
        center.insert(&z)?;
    }
    Ok(center)
}

/// Spectral projections of a commuting normal family, together with the
/// eigenvalue of each family member on each projection.
#[derive(Clone, Debug)]
pub struct JointSpectrum {
    pub projections: Vec<CMatrix>,
    /// `eigenvalues[k][b]` is the eigenvalue of family member `b` on projection `k`.
    pub eigenvalues: Vec<Vec<C64>>,
}

/// The minimal common spectral projections of a commuting family of normal
/// matrices, ordered by their eigenvalue tuples (real part, then imaginary).
pub fn simultaneous_eigenprojections(
    family: &[CMatrix],
    tol: f64,
    seed: u64,
) -> Result<Vec<CMatrix>> {
    Ok(joint_spectrum(family, tol, seed)?.projections)
}

pub fn joint_spectrum(family: &[CMatrix], tol: f64, seed: u64) -> Result<JointSpectrum> {
    let n = common_dim(family)?
        .ok_or_else(|| Error::Contract("empty family has no spectrum".into()))?;
    for (a_idx, a) in family.iter().enumerate() {
        let normal_defect = (a * &a.adjoint()).dist(&(&a.adjoint() * a));
        if normal_defect > scaled_tol(tol, a.norm() * a.norm()) {
            return Err(Error::NotDiagonalizable(format!(
                "member {a_idx} is not normal (defect {normal_defect:e})"
            )));
        }
        for (b_idx, b) in family.iter().enumerate().skip(a_idx + 1) {
            let c = a.commutator(b).norm();
            if c > scaled_tol(tol, a.norm() * b.norm()) {
                return Err(Error::NotDiagonalizable(format!(
                    "members {a_idx} and {b_idx} do not commute (defect {c:e})"
                )));
            }
        }
    }

    let scaled: Vec<CMatrix> = family
        .iter()
        .map(|b| b.scale_real(1.0 / b.norm().max(1.0)))
        .collect();
    let i_unit = C64::new(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..DEFAULT_RETRIES {
        let mut h = CMatrix::zeros(n);
        for b in &scaled {
            let c_sym: f64 = rng.random_range(-1.0..1.0);
            let c_skew: f64 = rng.random_range(-1.0..1.0);
            let bh = b.adjoint();
            h += &(b + &bh).scale_real(c_sym);
            h += &(b - &bh).scale(i_unit * c_skew);
        }
        let projections = spectral_projections(&h);
        let eigenvalues: Vec<Vec<C64>> = projections
            .iter()
            .map(|p| {
                let rank = p.trace();
                family.iter().map(|b| (p * b).trace() / rank).collect()
            })
            .collect();
        worst = 0.0;
        for (b_idx, b) in family.iter().enumerate() {
            let mut rebuilt = CMatrix::zeros(n);
            for (p, lam) in projections.iter().zip(&eigenvalues) {
                rebuilt += &p.scale(lam[b_idx]);
            }
            worst = worst.max(b.dist(&rebuilt) / b.norm().max(1.0));
        }
        if worst <= tol {
            return Ok(order_spectrum(projections, eigenvalues));
        }
    }
    Err(Error::NotDiagonalizable(format!(
        "no generic combination separated the family after {DEFAULT_RETRIES} draws \
         (reconstruction residual {worst:e})"
    )))
}

fn spectral_projections(h: &CMatrix) -> Vec<CMatrix> {
    let n = h.dim();
    let eig = h.hermitian_part().into_dmatrix().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(Ordering::Equal)
    });
    let lo = eig.eigenvalues[order[0]];
    let hi = eig.eigenvalues[order[n - 1]];
    let spread = hi - lo;
    let mut clusters: Vec<Vec<usize>> = vec![vec![order[0]]];
    for w in order.windows(2) {
        let gap = eig.eigenvalues[w[1]] - eig.eigenvalues[w[0]];
        if spread > 1e-12 * hi.abs().max(lo.abs()).max(1.0) && gap > CLUSTER_GAP * spread {
            clusters.push(vec![w[1]]);
        } else {
            clusters.last_mut().expect("non-empty").push(w[1]);
        }
    }
    clusters
        .iter()
        .map(|cols| {
            CMatrix::from_fn(n, |i, j| {
                cols.iter()
                    .map(|&c| eig.eigenvectors[(i, c)] * eig.eigenvectors[(j, c)].conj())
                    .sum()
            })
        })
        .collect()
}

fn grid_key(x: f64) -> i64 {
    (x / ORDER_GRID).round() as i64
}

fn order_spectrum(projections: Vec<CMatrix>, eigenvalues: Vec<Vec<C64>>) -> JointSpectrum {
    let mut items: Vec<(Vec<(i64, i64)>, CMatrix, Vec<C64>)> = projections
        .into_iter()
        .zip(eigenvalues)
        .map(|(p, lam)| {
            let key = lam
                .iter()
                .map(|z| (grid_key(z.re), grid_key(z.im)))
                .collect();
            (key, p.hermitian_part(), lam)
        })
        .collect();
    items.sort_by(|a, b| a.0.cmp(&b.0));
    let (projections, eigenvalues) = items.into_iter().map(|(_, p, l)| (p, l)).unzip();
    JointSpectrum {
        projections,
        eigenvalues,
    }
}

/// Primitive idempotents of a commutative, `*`-closed, unital algebra.
pub fn idempotent_split_commutative(
    space: &MatrixSpace,
    tol: f64,
    seed: u64,
) -> Result<Vec<CMatrix>> {
    let basis = space.basis();
    for (k, a) in basis.iter().enumerate() {
        for (l, b) in basis.iter().enumerate().skip(k + 1) {
            let c = a.commutator(b).norm();
            if c > scaled_tol(tol, a.norm() * b.norm()) {
                return Err(Error::Contract(format!(
                    "algebra is not commutative: basis elements {k} and {l} have commutator {c:e}"
                )));
            }
        }
    }
    simultaneous_eigenprojections(basis, tol, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(&CMatrix::identity(2), &CMatrix::identity(3)).unwrap();
        assert_eq!(k, CMatrix::identity(6));
    }

    #[test]
    fn kron_identity_with_all_ones_is_block_diagonal() {
        let k = kron(&CMatrix::identity(2), &CMatrix::ones(2)).unwrap();
        let expected = CMatrix::from_real_rows(
            4,
            &[
                1., 1., 0., 0., //
                1., 1., 0., 0., //
                0., 0., 1., 1., //
                0., 0., 1., 1.,
            ],
        )
        .unwrap();
        assert_eq!(k, expected);
    }

    #[test]
    fn kron_respects_dimension_cap() {
        let a = CMatrix::identity(3);
        assert!(matches!(
            kron_capped(&a, &a, 8),
            Err(Error::Size { dim: 9, cap: 8 })
        ));
    }

    #[test]
    fn multi_kron_small_cases() {
        assert_eq!(
            multi_kron(&[CMatrix::identity(2)]).unwrap(),
            CMatrix::identity(2)
        );
        let i2 = CMatrix::identity(2);
        assert_eq!(
            multi_kron(&[i2.clone(), i2.clone(), i2]).unwrap(),
            CMatrix::identity(8)
        );
        assert!(multi_kron(&[]).is_err());
    }

    #[test]
    fn orthonormalize_detects_dependence() {
        let i2 = CMatrix::identity(2);
        let s = orthonormalize(&[i2.clone(), i2.scale_real(2.0)], DEFAULT_TOL).unwrap();
        assert_eq!(s.dim(), 1);
        let s = orthonormalize(&[i2, CMatrix::ones(2)], DEFAULT_TOL).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.orthonormality_defect() < 1e-12);
        let empty = orthonormalize(&[], DEFAULT_TOL).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn closure_of_two_point_generators_is_full_matrix_algebra() {
        let a1 = CMatrix::from_real_rows(2, &[0., 1., 1., 0.]).unwrap();
        let e0 = CMatrix::diagonal_real(&[1., 0.]);
        let t = algebra_closure(&[a1, e0], DEFAULT_TOL).unwrap();
        assert_eq!(t.dim(), 4);
        assert!(t.product_closure_defect() < 1e-10);
        let center = center_of_algebra(&t, DEFAULT_TOL).unwrap();
        assert_eq!(center.dim(), 1);
    }

    #[test]
    fn closure_of_identity_is_one_dimensional() {
        let t = algebra_closure(&[CMatrix::identity(2)], DEFAULT_TOL).unwrap();
        assert_eq!(t.dim(), 1);
    }

    #[test]
    fn closure_rejects_mixed_dimensions() {
        let r = algebra_closure(&[CMatrix::identity(2), CMatrix::identity(3)], DEFAULT_TOL);
        assert!(matches!(r, Err(Error::Dimension(_))));
    }

    #[test]
    fn rank_and_trace_basics() {
        assert_eq!(CMatrix::ones(4).rank(DEFAULT_TOL), 1);
        assert_eq!(CMatrix::identity(5).trace(), c(5.0));
        assert_eq!(CMatrix::zeros(3).rank(DEFAULT_TOL), 0);
    }

    #[test]
    fn eigenprojections_of_identity() {
        let p = simultaneous_eigenprojections(&[CMatrix::identity(3)], DEFAULT_TOL, 7).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p[0].dist(&CMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn eigenprojections_of_swap() {
        let a = CMatrix::from_real_rows(2, &[0., 1., 1., 0.]).unwrap();
        let i = CMatrix::identity(2);
        let p = simultaneous_eigenprojections(std::slice::from_ref(&a), DEFAULT_TOL, 1).unwrap();
        assert_eq!(p.len(), 2);
        // sorted by eigenvalue: -1 first
        let minus = (&i - &a).scale_real(0.5);
        let plus = (&i + &a).scale_real(0.5);
        assert!(p[0].dist(&minus) < 1e-10);
        assert!(p[1].dist(&plus) < 1e-10);
    }

    #[test]
    fn non_commuting_family_is_rejected() {
        let a = CMatrix::from_real_rows(2, &[0., 1., 1., 0.]).unwrap();
        let b = CMatrix::diagonal_real(&[1., 0.]);
        assert!(matches!(
            simultaneous_eigenprojections(&[a, b], DEFAULT_TOL, 0),
            Err(Error::NotDiagonalizable(_))
        ));
    }

    #[test]
    fn split_of_diagonal_algebra() {
        let s = orthonormalize(
            &[CMatrix::identity(2), CMatrix::diagonal_real(&[1., 0.])],
            DEFAULT_TOL,
        )
        .unwrap();
        let p = idempotent_split_commutative(&s, DEFAULT_TOL, 3).unwrap();
        assert_eq!(p.len(), 2);
        let a = CMatrix::diagonal_real(&[1., 0.]);
        let b = CMatrix::diagonal_real(&[0., 1.]);
        let matched = (p[0].dist(&a) < 1e-10 && p[1].dist(&b) < 1e-10)
            || (p[0].dist(&b) < 1e-10 && p[1].dist(&a) < 1e-10);
        assert!(matched);
        let one = orthonormalize(&[CMatrix::identity(3)], DEFAULT_TOL).unwrap();
        assert_eq!(
            idempotent_split_commutative(&one, DEFAULT_TOL, 3)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn split_rejects_non_commutative_space() {
        let a = CMatrix::from_real_rows(2, &[0., 1., 1., 0.]).unwrap();
        let t = algebra_closure(&[a, CMatrix::diagonal_real(&[1., 0.])], DEFAULT_TOL).unwrap();
        assert!(matches!(
            idempotent_split_commutative(&t, DEFAULT_TOL, 0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn non_square_and_empty_inputs_are_rejected() {
        assert!(CMatrix::new(DMatrix::zeros(2, 3)).is_err());
        assert!(CMatrix::new(DMatrix::zeros(0, 0)).is_err());
        let one = CMatrix::identity(1);
        assert_eq!(one.dim(), 1);
        assert!(CMatrix::identity(2).matmul(&CMatrix::identity(3)).is_err());
    }
}
