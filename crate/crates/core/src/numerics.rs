//! Dense complex linear algebra and the tolerance policy.
//!
//! Matrices are `nalgebra` types; SVD and Hermitian eigendecompositions are
//! delegated to `faer`. This module fixes the conventions the rest of the
//! crate relies on: singular values and eigenvalues sorted in descending
//! order, relative rank cutoffs, and column-stacking vectorization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Numerical widths shared by every stage of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Relative singular-value cutoff: `σ > tol_rank · σ_max` counts as rank.
    pub tol_rank: f64,
    /// Fixed-point and precondition residual.
    pub tol_fixed: f64,
    /// Width used when clustering eigenvalues and comparing spectra.
    pub tol_spec: f64,
    /// Acceptance threshold for structural residuals.
    pub tol_cert: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            tol_rank: 1e-9,
            tol_fixed: 1e-8,
            tol_spec: 1e-7,
            tol_cert: 1e-6,
        }
    }
}

impl TolerancePolicy {
    /// Builds a policy, rejecting widths outside `(0, 1e-2)`.
    pub fn new(tol_rank: f64, tol_fixed: f64, tol_spec: f64, tol_cert: f64) -> Result<Self> {
        let policy = Self {
            tol_rank,
            tol_fixed,
            tol_spec,
            tol_cert,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol_rank", self.tol_rank),
            ("tol_fixed", self.tol_fixed),
            ("tol_spec", self.tol_spec),
            ("tol_cert", self.tol_cert),
        ] {
            if !(v > 0.0 && v < 1e-2) {
                return Err(Error::Input(format!(
                    "{name} = {v} must lie strictly between 0 and 1e-2"
                )));
            }
        }
        Ok(())
    }
}

/// Thin singular value decomposition `M = U · diag(s) · V*`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

fn to_faer(m: &CMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |a, b| m[(a, b)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |a, b| m[(a, b)])
}

pub fn svd(m: &CMatrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Ok(Svd {
            u: CMatrix::zeros(rows, 0),
            s: Vec::new(),
            v: CMatrix::zeros(cols, 0),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Input(format!(
            "non-finite entry in a {rows}x{cols} matrix"
        )));
    }
    let dec = to_faer(m).thin_svd().map_err(|_| Error::NumericalFailure {
        what: "svd",
        rows,
        cols,
    })?;
    // faer returns singular values in nonincreasing order.
    let u = from_faer(dec.U());
    let v = from_faer(dec.V());
    let s = (0..k).map(|i| dec.S()[i].re).collect();
    Ok(Svd { u, s, v })
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(H + H*)/2` before factoring; inputs further
/// than `1e-10·‖H‖_F` from Hermitian are rejected.
pub fn hermitian_eig(h: &CMatrix) -> Result<Eigh> {
    let (rows, cols) = h.shape();
    if rows != cols {
        return Err(Error::Contract(format!(
            "hermitian_eig needs a square matrix, got {rows}x{cols}"
        )));
    }
    if rows == 0 {
        return Ok(Eigh {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let asym = (h - h.adjoint()).norm();
    if asym > 1e-10 * h.norm().max(1e-300) {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian: ‖H − H*‖_F = {asym:.3e}"
        )));
    }
    let sym = to_faer(&hermitian_part(h));
    let raw = sym
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::NumericalFailure {
            what: "hermitian_eig",
            rows,
            cols,
        })?;
    // faer sorts ascending; reverse to descending.
    let mut vectors = CMatrix::zeros(rows, rows);
    let mut values = Vec::with_capacity(rows);
    let u = raw.U();
    for dst in 0..rows {
        let src = rows - 1 - dst;
        for a in 0..rows {
            vectors[(a, dst)] = u[(a, src)];
        }
        values.push(raw.S()[src].re);
    }
    Ok(Eigh { values, vectors })
}

/// `σ_max` with the zero matrix mapped to 1, so relative cutoffs never
/// collapse to `0 · tol`.
fn cutoff_scale(s: &[f64]) -> f64 {
    match s.first() {
        Some(&m) if m > 0.0 => m,
        _ => 1.0,
    }
}

/// Orthonormal basis of `ker M`, using the relative cutoff `σ ≤ tol_rank·σ_max`.
pub fn null_space_basis(m: &CMatrix, policy: &TolerancePolicy) -> Result<CMatrix> {
    null_space_with_floor(m, 0.0, policy)
}

/// Orthonormal basis of `ker(N − I)`. The cutoff is relative to
/// `max(σ_max(N − I), 1)`, so an `N` within rounding of the identity keeps its
/// full eigenvalue-1 space.
pub fn unit_eigenspace(n: &CMatrix, policy: &TolerancePolicy) -> Result<CMatrix> {
    let shifted = n - CMatrix::identity(n.nrows(), n.ncols());
    null_space_with_floor(&shifted, 1.0, policy)
}

fn null_space_with_floor(m: &CMatrix, floor: f64, policy: &TolerancePolicy) -> Result<CMatrix> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    // Pad wide inputs with zero rows so V is square and spans all of C^cols.
    let padded;
    let square = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let dec = svd(square)?;
    let cutoff = policy.tol_rank * cutoff_scale(&dec.s).max(floor);
    let keep: Vec<usize> = (0..dec.s.len()).filter(|&k| dec.s[k] <= cutoff).collect();
    let mut basis = CMatrix::zeros(cols, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        basis.set_column(dst, &dec.v.column(src));
    }
    Ok(basis)
}

/// Number of singular values above `tol_rank · σ_max`; zero for the zero matrix.
pub fn rank_tol(m: &CMatrix, policy: &TolerancePolicy) -> Result<usize> {
    let dec = svd(m)?;
    let smax = dec.sigma_max();
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(dec
        .s
        .iter()
        .filter(|&&s| s > policy.tol_rank * smax)
        .count())
}

/// Orthonormal basis of the column space of `m` (relative cutoff `tol_rank`).
pub fn range_basis(m: &CMatrix, policy: &TolerancePolicy) -> Result<CMatrix> {
    let dec = svd(m)?;
    let smax = dec.sigma_max();
    if smax == 0.0 {
        return Ok(CMatrix::zeros(m.nrows(), 0));
    }
    let keep = dec
        .s
        .iter()
        .filter(|&&s| s > policy.tol_rank * smax)
        .count();
    Ok(dec.u.columns(0, keep).into_owned())
}

/// Smallest `α > 0` that drives `sigma + α·delta` onto the boundary of the
/// PSD cone.
///
/// `sigma` must be positive definite and `delta` Hermitian and traceless; the
/// step is `1/λ_max(σ^{-1/2}(−δ)σ^{-1/2})`.
pub fn boundary_alpha(sigma: &CMatrix, delta: &CMatrix, policy: &TolerancePolicy) -> Result<f64> {
    let n = sigma.nrows();
    if delta.shape() != (n, n) || sigma.ncols() != n {
        return Err(Error::Contract(format!(
            "boundary_alpha shape mismatch: sigma {:?}, delta {:?}",
            sigma.shape(),
            delta.shape()
        )));
    }
    let es = hermitian_eig(sigma)?;
    if es.min() <= policy.tol_rank * cutoff_scale(&es.values) {
        return Err(Error::Contract(format!(
            "sigma is not positive definite (λ_min = {:.3e})",
            es.min()
        )));
    }
    let dnorm = delta.norm();
    if dnorm <= policy.tol_fixed {
        return Err(Error::Contract(format!(
            "delta is numerically zero (‖δ‖_F = {dnorm:.3e})"
        )));
    }
    let tr = delta.trace();
    if tr.norm() > policy.tol_fixed {
        return Err(Error::Contract(format!(
            "delta must be traceless, Tr δ = {tr:.3e}"
        )));
    }
    let inv_sqrt = psd_function(&es, |l| 1.0 / l.sqrt());
    let congruent = &inv_sqrt * (-delta) * &inv_sqrt;
    let ek = hermitian_eig(&hermitian_part(&congruent))?;
    let lmax = ek.max();
    if lmax <= policy.tol_fixed {
        return Err(Error::Contract(format!(
            "delta never reaches the PSD boundary (λ_max = {lmax:.3e}); try −delta"
        )));
    }
    Ok(1.0 / lmax)
}

/// `V · diag(f(λ)) · V*` for a Hermitian eigendecomposition.
pub fn psd_function(e: &Eigh, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = e.vectors.nrows();
    let mut scaled = e.vectors.clone();
    for (k, &l) in e.values.iter().enumerate() {
        let w = C64::new(f(l), 0.0);
        for r in 0..n {
            scaled[(r, k)] *= w;
        }
    }
    scaled * e.vectors.adjoint()
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Column-stacking vectorization.
pub fn vec_op(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_op`] for square operators.
pub fn unvec(v: &[C64], d: usize) -> CMatrix {
    debug_assert_eq!(v.len(), d * d);
    CMatrix::from_column_slice(d, d, v)
}

/// Index of entry `(row, col)` of a `d × d` operator inside its vectorization.
#[inline]
pub fn vec_index(row: usize, col: usize, d: usize) -> usize {
    row + col * d
}

/// Matrix unit `e_a e_b*`.
pub fn unit(d: usize, a: usize, b: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(a, b)] = ONE;
    m
}

pub fn outer(x: &CVector, y: &CVector) -> CMatrix {
    x * y.adjoint()
}

/// Hilbert–Schmidt inner product `Tr(A* B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).norm() <= tol * m.norm().max(1.0)
}

/// Support of a PSD matrix: eigenvectors whose eigenvalues exceed
/// `tol_rank · λ_max`, returned with those eigenvalues (descending).
pub fn psd_support(h: &CMatrix, policy: &TolerancePolicy) -> Result<(CMatrix, Vec<f64>)> {
    let e = hermitian_eig(h)?;
    let scale = cutoff_scale(&e.values);
    let keep = e
        .values
        .iter()
        .take_while(|&&l| l > policy.tol_rank * scale)
        .count();
    Ok((
        e.vectors.columns(0, keep).into_owned(),
        e.values[..keep].to_vec(),
    ))
}

/// Largest principal angle between the column spans of two isometries.
///
/// Spans of different dimension are reported as `π/2` apart.
pub fn max_principal_angle(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.ncols() != b.ncols() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    if a.ncols() == 0 {
        return Ok(0.0);
    }
    let residual = a - b * (b.adjoint() * a);
    let s = svd(&residual)?.sigma_max().min(1.0);
    Ok(s.asin())
}

/// Real coordinates of a Hermitian operator: diagonal entries, then
/// `√2·Re`, `√2·Im` of the strict upper triangle. The map is an isometry
/// from the Hilbert–Schmidt inner product to the Euclidean one.
pub fn hermitian_coords(h: &CMatrix) -> DVector<f64> {
    let d = h.nrows();
    let mut out = DVector::zeros(d * d);
    let mut k = 0;
    for a in 0..d {
        out[k] = h[(a, a)].re;
        k += 1;
    }
    let r2 = std::f64::consts::SQRT_2;
    for a in 0..d {
        for b in a + 1..d {
            out[k] = r2 * h[(a, b)].re;
            out[k + 1] = r2 * h[(a, b)].im;
            k += 2;
        }
    }
    out
}

/// Inverse of [`hermitian_coords`].
pub fn from_hermitian_coords(v: &[f64], d: usize) -> CMatrix {
    let mut h = CMatrix::zeros(d, d);
    let mut k = 0;
    for a in 0..d {
        h[(a, a)] = C64::new(v[k], 0.0);
        k += 1;
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for a in 0..d {
        for b in a + 1..d {
            let z = C64::new(s * v[k], s * v[k + 1]);
            h[(a, b)] = z;
            h[(b, a)] = z.conj();
            k += 2;
        }
    }
    h
}

/// Orthonormal basis (Hilbert–Schmidt) of the real span of Hermitian operators.
pub fn hermitian_span_basis(ops: &[CMatrix], policy: &TolerancePolicy) -> Result<Vec<CMatrix>> {
    let Some(first) = ops.first() else {
        return Ok(Vec::new());
    };
    let d = first.nrows();
    let coords: Vec<DVector<f64>> = ops.iter().map(hermitian_coords).collect();
    let stacked = faer::Mat::<f64>::from_fn(d * d, ops.len(), |a, k| coords[k][a]);
    let raw = stacked.thin_svd().map_err(|_| Error::NumericalFailure {
        what: "real svd",
        rows: d * d,
        cols: ops.len(),
    })?;
    let sv: Vec<f64> = (0..raw.S().dim()).map(|k| raw.S()[k]).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(Vec::new());
    }
    let u = raw.U();
    Ok((0..sv.len())
        .filter(|&k| sv[k] > policy.tol_rank * smax)
        .map(|k| {
            let col: Vec<f64> = (0..d * d).map(|a| u[(a, k)]).collect();
            from_hermitian_coords(&col, d)
        })
        .collect())
}

/// Rotates a vector so its first entry of non-negligible modulus is real and
/// positive.
pub fn fix_phase(v: &mut CVector) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-8 * scale).copied() {
        let phase = z.conj() / z.norm();
        *v *= phase;
    }
}

/// Whether two descending spectra agree entrywise within `tol`.
pub fn spectra_match(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Whether a descending spectrum has two entries closer than `tol`.
pub fn spectrum_is_degenerate(s: &[f64], tol: f64) -> bool {
    s.windows(2).any(|w| (w[0] - w[1]).abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x, 0.0)))
    }

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            v.len(),
            v.iter().map(|&x| c(x, 0.0)),
        ))
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn reconstruct(d: &Svd) -> CMatrix {
        let s = CMatrix::from_diagonal(&CVector::from_iterator(
            d.s.len(),
            d.s.iter().map(|&x| c(x, 0.0)),
        ));
        &d.u * s * d.v.adjoint()
    }

    #[test]
    fn svd_examples() {
        let id = svd(&CMatrix::identity(3, 3)).unwrap();
        assert!(id.s.iter().all(|&s| (s - 1.0).abs() < 1e-14));

        let zero = svd(&CMatrix::zeros(2, 2)).unwrap();
        assert_eq!(zero.s, vec![0.0, 0.0]);

        // M*M = diag(1, 4), so the singular values are 2 and 1.
        let m = real(2, 2, &[0.0, 2.0, 1.0, 0.0]);
        let d = svd(&m).unwrap();
        assert!((d.s[0] - 2.0).abs() < 1e-14 && (d.s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_rejects_non_finite() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(svd(&m), Err(Error::Input(_))));
    }

    #[test]
    fn svd_reconstruction_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..1000 {
            let rows = 1 + trial % 36;
            let cols = 1 + (trial * 7) % 36;
            let m = random_matrix(&mut rng, rows, cols);
            let d = svd(&m).unwrap();
            let err = (reconstruct(&d) - &m).norm();
            assert!(
                err <= 1e-12 * m.norm().max(1.0),
                "{rows}x{cols}: residual {err:e}"
            );
            let k = rows.min(cols);
            assert!((d.u.adjoint() * &d.u - CMatrix::identity(k, k)).norm() < 1e-12);
            assert!((d.v.adjoint() * &d.v - CMatrix::identity(k, k)).norm() < 1e-12);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn hermitian_eig_examples() {
        let e = hermitian_eig(&diag(&[0.25, 0.75])).unwrap();
        assert!((e.values[0] - 0.75).abs() < 1e-15 && (e.values[1] - 0.25).abs() < 1e-15);

        // Characteristic polynomial λ² − 1.
        let e = hermitian_eig(&real(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] + 1.0).abs() < 1e-14);

        let e = hermitian_eig(&CMatrix::zeros(3, 3)).unwrap();
        assert!(e.values.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn hermitian_eig_rejects_non_hermitian() {
        let m = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eig(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn hermitian_eig_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=12 {
            let a = random_matrix(&mut rng, n, n);
            let h = hermitian_part(&a);
            let e = hermitian_eig(&h).unwrap();
            assert!((e.vectors.adjoint() * &e.vectors - CMatrix::identity(n, n)).norm() < 1e-12);
            for k in 0..n {
                let v = e.vectors.column(k);
                let r = (&h * v - v * c(e.values[k], 0.0)).norm();
                assert!(r <= 1e-10 * h.norm());
            }
        }
    }

    #[test]
    fn unit_eigenspace_of_near_identity() {
        let p = TolerancePolicy::default();
        let n = CMatrix::from_element(1, 1, c(1.0 + 2.0 * f64::EPSILON, 0.0));
        assert_eq!(
            null_space_basis(&(&n - CMatrix::identity(1, 1)), &p)
                .unwrap()
                .ncols(),
            0
        );
        assert_eq!(unit_eigenspace(&n, &p).unwrap().ncols(), 1);
        let n = CMatrix::identity(3, 3).scale(0.5);
        assert_eq!(unit_eigenspace(&n, &p).unwrap().ncols(), 0);
    }

    #[test]
    fn null_space_examples() {
        let p = TolerancePolicy::default();
        assert_eq!(
            null_space_basis(&CMatrix::identity(3, 3), &p)
                .unwrap()
                .ncols(),
            0
        );
        let z = null_space_basis(&CMatrix::zeros(4, 4), &p).unwrap();
        assert_eq!(z.ncols(), 4);
        assert!((z.adjoint() * &z - CMatrix::identity(4, 4)).norm() < 1e-12);

        // Depolarizing d=2, p=0.5: N = ½·I + ¼·vec(I)vec(I)*, hand-solved
        // kernel of N − I is vec(I)/√2.
        let mut n = CMatrix::identity(4, 4).scale(0.5);
        for a in [0, 3] {
            for b in [0, 3] {
                n[(a, b)] += c(0.25, 0.0);
            }
        }
        let k = null_space_basis(&(n - CMatrix::identity(4, 4)), &p).unwrap();
        assert_eq!(k.ncols(), 1);
        let expect = real(4, 1, &[1.0, 0.0, 0.0, 1.0]).scale(std::f64::consts::FRAC_1_SQRT_2);
        let overlap = (expect.adjoint() * &k)[(0, 0)].norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let p = TolerancePolicy::default();
        let m = real(1, 3, &[1.0, 1.0, 0.0]);
        let k = null_space_basis(&m, &p).unwrap();
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-12);
    }

    #[test]
    fn rank_examples() {
        let p = TolerancePolicy::default();
        assert_eq!(rank_tol(&diag(&[1.0, 1e-15]), &p).unwrap(), 1);
        let x = CVector::from_vec(vec![c(1.0, 0.5), c(-0.3, 0.0), c(0.0, 2.0)]);
        assert_eq!(rank_tol(&outer(&x, &x), &p).unwrap(), 1);
        assert_eq!(rank_tol(&CMatrix::zeros(3, 3), &p).unwrap(), 0);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 4, 2);
        let b = random_matrix(&mut rng, 4, 2);
        let m = &a * b.adjoint();
        let s = svd(&m).unwrap().s;
        assert!(s[2] < 1e-13 * s[0] && s[1] > 1e-3);
        assert_eq!(rank_tol(&m, &p).unwrap(), 2);
    }

    #[test]
    fn boundary_alpha_examples() {
        let p = TolerancePolicy::default();
        let cases = [
            (diag(&[0.5, 0.5]), diag(&[0.5, -0.5]), 1.0),
            (diag(&[0.75, 0.25]), diag(&[-0.25, 0.25]), 3.0),
            (
                diag(&[1.0 / 3.0; 3]),
                diag(&[2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]),
                1.0,
            ),
        ];
        for (sigma, delta, expected) in cases {
            let alpha = boundary_alpha(&sigma, &delta, &p).unwrap();
            assert!((alpha - expected).abs() < 1e-12, "alpha = {alpha}");
            let moved = &sigma + delta.scale(alpha);
            let lmin = hermitian_eig(&moved).unwrap().min();
            assert!(lmin.abs() <= p.tol_fixed);
            assert!(rank_tol(&moved, &p).unwrap() < rank_tol(&sigma, &p).unwrap());
        }
    }

    #[test]
    fn boundary_alpha_contract_errors() {
        let p = TolerancePolicy::default();
        let singular = diag(&[1.0, 0.0]);
        let delta = diag(&[0.5, -0.5]);
        assert!(matches!(
            boundary_alpha(&singular, &delta, &p),
            Err(Error::Contract(_))
        ));
        let traced = diag(&[0.5, 0.5]);
        assert!(matches!(
            boundary_alpha(&diag(&[0.5, 0.5]), &traced, &p),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn hermitian_coords_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = hermitian_part(&random_matrix(&mut rng, 4, 4));
        let back = from_hermitian_coords(hermitian_coords(&h).as_slice(), 4);
        assert!((back - &h).norm() < 1e-14);
        assert!((hermitian_coords(&h).norm() - h.norm()).abs() < 1e-13);
    }

    #[test]
    fn principal_angles() {
        let e1 = real(3, 1, &[1.0, 0.0, 0.0]);
        let e2 = real(3, 1, &[0.0, 1.0, 0.0]);
        assert!(max_principal_angle(&e1, &e1).unwrap() < 1e-15);
        assert!(
            (max_principal_angle(&e1, &e2).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn null_space_columns_are_annihilated(seed in any::<u64>(), n in 2usize..10, r in 0usize..10) {
            let r = r.min(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, n, r);
            let b = random_matrix(&mut rng, n, r);
            let m = &a * b.adjoint();
            let p = TolerancePolicy::default();
            let v = null_space_basis(&m, &p).unwrap();
            prop_assert_eq!(v.ncols(), n - r);
            let k = v.ncols();
            prop_assert!((v.adjoint() * &v - CMatrix::identity(k, k)).norm() < 1e-12);
            let smax = svd(&m).unwrap().sigma_max().max(1.0);
            prop_assert!((&m * &v).norm() <= 10.0 * p.tol_rank * smax * n as f64);
        }

        #[test]
        fn boundary_step_hits_the_cone(seed in any::<u64>(), n in 2usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, n, n);
            let mut sigma = &a * a.adjoint() + CMatrix::identity(n, n).scale(0.1);
            let tr = sigma.trace();
            sigma /= tr;
            let mut delta = hermitian_part(&random_matrix(&mut rng, n, n));
            let shift = delta.trace() / c(n as f64, 0.0);
            delta -= CMatrix::identity(n, n) * shift;
            let p = TolerancePolicy::default();
            let alpha = boundary_alpha(&sigma, &delta, &p).unwrap();
            let lmin = hermitian_eig(&(&sigma + delta.scale(alpha))).unwrap().min();
            prop_assert!(lmin.abs() <= p.tol_fixed);
        }
    }
}
