//! Fixed spaces and the projection onto them.

use crate::channel::SuperOperator;
use crate::numerics::{
    hermitian_eig, hermitian_part, psd_support, svd, unit_eigenspace, unvec, vec_op, CMatrix,
    TolerancePolicy,
};
use crate::{Error, Result};

/// A subspace of `C^d`, stored as a `d × r` isometry.
#[derive(Debug, Clone)]
pub struct Subspace {
    isometry: CMatrix,
}

impl Subspace {
    /// Wraps an isometry; fails if its columns are not orthonormal.
    pub fn new(isometry: CMatrix) -> Result<Self> {
        let r = isometry.ncols();
        let gram = isometry.adjoint() * &isometry;
        let err = (gram - CMatrix::identity(r, r)).norm();
        if err > 1e-10 {
            return Err(Error::Contract(format!(
                "subspace columns are not orthonormal (‖V*V − I‖ = {err:.3e})"
            )));
        }
        Ok(Self { isometry })
    }

    pub(crate) fn new_unchecked(isometry: CMatrix) -> Self {
        Self { isometry }
    }

    pub fn full(d: usize) -> Self {
        Self {
            isometry: CMatrix::identity(d, d),
        }
    }

    pub fn dim_ambient(&self) -> usize {
        self.isometry.nrows()
    }

    pub fn dim(&self) -> usize {
        self.isometry.ncols()
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }

    /// `Π = V V*`.
    pub fn projector(&self) -> CMatrix {
        &self.isometry * self.isometry.adjoint()
    }

    /// `V* μ V`.
    pub fn compress(&self, mu: &CMatrix) -> CMatrix {
        self.isometry.adjoint() * mu * &self.isometry
    }

    /// `V m V*`.
    pub fn embed(&self, m: &CMatrix) -> CMatrix {
        &self.isometry * m * self.isometry.adjoint()
    }

    /// `outer ⊖ self`, for `self` contained in `outer` up to `tol_cert`.
    ///
    /// The complement is taken as the trailing `dim(outer) − dim(self)` right
    /// singular vectors of `V_self* V_outer`, so small misalignment of `self`
    /// does not change the dimension count.
    pub fn complement_in(&self, outer: &Subspace, policy: &TolerancePolicy) -> Result<Subspace> {
        let (s, y) = (self.dim(), outer.dim());
        if s == 0 {
            return Ok(outer.clone());
        }
        if s > y {
            return Err(Error::Contract(format!(
                "subspace of dim {s} cannot lie inside one of dim {y}"
            )));
        }
        let overlap = self.isometry.adjoint() * &outer.isometry;
        let leak = (&self.isometry - &outer.isometry * overlap.adjoint()).norm();
        if leak > policy.tol_cert {
            return Err(Error::Contract(format!(
                "subspace is not contained in the outer subspace (residual {leak:.3e})"
            )));
        }
        let mut padded = CMatrix::zeros(y, y);
        padded.view_mut((0, 0), (s, y)).copy_from(&overlap);
        let dec = svd(&padded)?;
        let coeffs = dec.v.columns(s, y - s).into_owned();
        Ok(Subspace::new_unchecked(&outer.isometry * coeffs))
    }
}

/// Hilbert–Schmidt orthonormal basis of `{F : Ψ(F) = F}`.
#[derive(Debug, Clone)]
pub struct FixedSpace {
    pub dim_ambient: usize,
    pub basis: Vec<CMatrix>,
}

impl FixedSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The basis as columns of a `d² × k` matrix.
    pub fn stacked(&self) -> CMatrix {
        let n2 = self.dim_ambient * self.dim_ambient;
        let mut m = CMatrix::zeros(n2, self.basis.len());
        for (k, f) in self.basis.iter().enumerate() {
            m.set_column(k, &vec_op(f));
        }
        m
    }
}

/// `σ_max` of the natural matrix.
pub fn spectral_norm_check(psi: &SuperOperator) -> f64 {
    svd(psi.natural())
        .map(|s| s.sigma_max())
        .unwrap_or(f64::INFINITY)
}

fn eigenvalue_one_space(n: &CMatrix, policy: &TolerancePolicy) -> Result<CMatrix> {
    unit_eigenspace(n, policy)
}

fn is_trace_preserving(psi: &SuperOperator, policy: &TolerancePolicy) -> bool {
    let d = psi.dim();
    let vi = vec_op(&CMatrix::identity(d, d));
    (psi.natural().adjoint() * &vi - &vi).norm() <= policy.tol_fixed
}

pub fn fixed_space_basis(psi: &SuperOperator, policy: &TolerancePolicy) -> Result<FixedSpace> {
    let d = psi.dim();
    let r = eigenvalue_one_space(psi.natural(), policy)?;
    if r.ncols() == 0 && is_trace_preserving(psi, policy) {
        return Err(Error::Inconsistent(
            "trace-preserving map has an empty fixed space".into(),
        ));
    }
    let basis = (0..r.ncols())
        .map(|k| unvec(r.column(k).as_slice(), d))
        .collect();
    Ok(FixedSpace {
        dim_ambient: d,
        basis,
    })
}

/// The projection `P = R (L*R)^{-1} L*` onto `ker(N − I)` along the other
/// generalized eigenspaces.
pub fn spectral_projection(psi: &SuperOperator, policy: &TolerancePolicy) -> Result<SuperOperator> {
    let n = psi.natural();
    let r = eigenvalue_one_space(n, policy)?;
    let l = eigenvalue_one_space(&n.adjoint(), policy)?;
    if r.ncols() == 0 {
        return Err(Error::Inconsistent("empty fixed space".into()));
    }
    if r.ncols() != l.ncols() {
        return Err(Error::Inconsistent(format!(
            "left and right eigenvalue-1 spaces differ in dimension ({} vs {})",
            l.ncols(),
            r.ncols()
        )));
    }
    let pairing = l.adjoint() * &r;
    let s = svd(&pairing)?;
    let smin = s.s.last().copied().unwrap_or(0.0);
    if smin <= policy.tol_fixed {
        return Err(Error::Inconsistent(format!(
            "eigenvalue 1 is not semisimple (σ_min(L*R) = {smin:.3e})"
        )));
    }
    let inv = pairing.try_inverse().ok_or(Error::NumericalFailure {
        what: "inverse",
        rows: r.ncols(),
        cols: r.ncols(),
    })?;
    let p = &r * inv * l.adjoint();
    SuperOperator::from_natural(psi.dim(), p)
}

/// Outcome of [`cesaro_projection`].
#[derive(Debug, Clone)]
pub struct Cesaro {
    pub phi: SuperOperator,
    /// Number of averaged powers `M`.
    pub terms: u64,
    /// `‖Φ_M² − Φ_M‖_F`.
    pub residual: f64,
    pub converged: bool,
}

/// `(1/M) Σ_{n=1..M} N^n`, with `M` doubled from 1 until the average is
/// idempotent within `tol_cert` or `M` would exceed `max_terms`.
pub fn cesaro_projection(
    psi: &SuperOperator,
    max_terms: u64,
    policy: &TolerancePolicy,
) -> Result<Cesaro> {
    let n = psi.natural();
    let mut power = n.clone();
    let mut avg = n.clone();
    let mut terms: u64 = 1;
    let mut residual = (&avg * &avg - &avg).norm();
    while residual > policy.tol_cert && terms.saturating_mul(2) <= max_terms {
        // S_{2M} = S_M + N^M S_M, in averaged form.
        avg = (&avg + &power * &avg).scale(0.5);
        power = &power * &power;
        terms *= 2;
        residual = (&avg * &avg - &avg).norm();
    }
    Ok(Cesaro {
        phi: SuperOperator::from_natural(psi.dim(), avg)?,
        terms,
        residual,
        converged: residual <= policy.tol_cert,
    })
}

/// `X = supp Φ(I/d)`.
pub fn support_subspace(phi: &SuperOperator, policy: &TolerancePolicy) -> Result<Subspace> {
    let d = phi.dim();
    let image = phi.apply(&CMatrix::identity(d, d).scale(1.0 / d as f64))?;
    let skew = (&image - image.adjoint()).norm();
    if skew > policy.tol_fixed {
        return Err(Error::Positivity(format!(
            "Φ(I/d) is not Hermitian (‖A − A*‖ = {skew:.3e})"
        )));
    }
    let h = hermitian_part(&image);
    let lmin = hermitian_eig(&h)?.min();
    if lmin < -policy.tol_fixed {
        return Err(Error::Positivity(format!(
            "Φ(I/d) has eigenvalue {lmin:.3e}"
        )));
    }
    let (v, _) = psd_support(&h, policy)?;
    if v.ncols() == 0 {
        return Err(Error::Inconsistent("Φ(I/d) vanishes".into()));
    }
    Ok(Subspace::new_unchecked(v))
}
