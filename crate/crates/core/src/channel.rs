//! Super-operator representations and the basic predicates on them.
//!
//! The canonical form is the natural matrix `N` with `N·vec(μ) = vec(Ψ(μ))`
//! under column stacking. The Choi matrix is indexed as
//! `J_{(i,j),(k,l)} = e_i* Ψ(e_j e_l*) e_k` with the pair `(i,j)` flattened to
//! `i·d + j`; `Ψ` is completely positive iff `J ⪰ 0`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::numerics::{
    hermitian_eig, hermitian_part, outer, unit, unvec, vec_index, vec_op, CMatrix, CVector,
    TolerancePolicy, C64,
};
use crate::{Error, Result};

/// One of the three accepted ways to specify a super-operator.
#[derive(Debug, Clone)]
pub enum Representation {
    Kraus(Vec<CMatrix>),
    Choi(CMatrix),
    Natural(CMatrix),
}

/// A linear map on `d × d` complex operators.
#[derive(Debug, Clone)]
pub struct SuperOperator {
    dim: usize,
    natural: CMatrix,
    kraus: Option<Vec<CMatrix>>,
    choi: Option<CMatrix>,
}

impl SuperOperator {
    /// Builds the canonical natural matrix from any representation.
    pub fn build(source: Representation, dim: usize) -> Result<Self> {
        match source {
            Representation::Kraus(k) => Self::from_kraus(dim, k),
            Representation::Choi(j) => Self::from_choi(dim, j),
            Representation::Natural(n) => Self::from_natural(dim, n),
        }
    }

    pub fn from_natural(dim: usize, natural: CMatrix) -> Result<Self> {
        check_dim(dim)?;
        let n2 = dim * dim;
        if natural.shape() != (n2, n2) {
            return Err(Error::Input(format!(
                "natural matrix must be {n2}x{n2} for dim {dim}, got {}x{}",
                natural.nrows(),
                natural.ncols()
            )));
        }
        check_finite("natural", &natural)?;
        Ok(Self {
            dim,
            natural,
            kraus: None,
            choi: None,
        })
    }

    pub fn from_kraus(dim: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        check_dim(dim)?;
        if kraus.is_empty() {
            return Err(Error::Input("kraus list is empty".into()));
        }
        let n2 = dim * dim;
        let mut natural = CMatrix::zeros(n2, n2);
        for (k, a) in kraus.iter().enumerate() {
            if a.shape() != (dim, dim) {
                return Err(Error::Input(format!(
                    "kraus operator {k} must be {dim}x{dim}, got {}x{}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            check_finite("kraus", a)?;
            natural += a.conjugate().kronecker(a);
        }
        Ok(Self {
            dim,
            natural,
            kraus: Some(kraus),
            choi: None,
        })
    }

    pub fn from_choi(dim: usize, choi: CMatrix) -> Result<Self> {
        check_dim(dim)?;
        let n2 = dim * dim;
        if choi.shape() != (n2, n2) {
            return Err(Error::Input(format!(
                "choi matrix must be {n2}x{n2} for dim {dim}, got {}x{}",
                choi.nrows(),
                choi.ncols()
            )));
        }
        check_finite("choi", &choi)?;
        let mut natural = CMatrix::zeros(n2, n2);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        natural[(vec_index(i, k, dim), vec_index(j, l, dim))] =
                            choi[(i * dim + j, k * dim + l)];
                    }
                }
            }
        }
        Ok(Self {
            dim,
            natural,
            kraus: None,
            choi: Some(choi),
        })
    }

    /// Tabulates a linear map by evaluating it on the matrix units.
    pub fn from_fn(dim: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let n2 = dim * dim;
        let mut natural = CMatrix::zeros(n2, n2);
        for b in 0..dim {
            for a in 0..dim {
                let out = f(&unit(dim, a, b));
                natural.set_column(vec_index(a, b, dim), &vec_op(&out));
            }
        }
        Self {
            dim,
            natural,
            kraus: None,
            choi: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_kraus(dim, vec![CMatrix::identity(dim, dim)]).expect("identity is well formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn natural(&self) -> &CMatrix {
        &self.natural
    }

    pub fn kraus(&self) -> Option<&[CMatrix]> {
        self.kraus.as_deref()
    }

    pub fn with_kraus(mut self, kraus: Vec<CMatrix>) -> Self {
        self.kraus = Some(kraus);
        self
    }

    /// The Choi matrix, from the cache when the map was built from one.
    pub fn choi(&self) -> CMatrix {
        if let Some(j) = &self.choi {
            return j.clone();
        }
        let d = self.dim;
        let mut j = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for jj in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        j[(i * d + jj, k * d + l)] =
                            self.natural[(vec_index(i, k, d), vec_index(jj, l, d))];
                    }
                }
            }
        }
        j
    }

    /// Kraus operators read off the eigendecomposition of a PSD Choi matrix.
    /// Returns `None` when the map is not completely positive.
    pub fn kraus_from_choi(&self, policy: &TolerancePolicy) -> Result<Option<Vec<CMatrix>>> {
        let j = self.choi();
        if (&j - j.adjoint()).norm() > policy.tol_fixed * j.norm().max(1.0) {
            return Ok(None);
        }
        let e = hermitian_eig(&hermitian_part(&j))?;
        if e.min() < -policy.tol_fixed {
            return Ok(None);
        }
        let d = self.dim;
        let cutoff = policy.tol_rank * e.max().max(1e-300);
        let kraus = e
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > cutoff)
            .map(|(k, &l)| {
                let v = e.vectors.column(k);
                CMatrix::from_fn(d, d, |i, jj| v[i * d + jj] * l.sqrt())
            })
            .collect();
        Ok(Some(kraus))
    }

    /// Applies the map to a `d × d` operator.
    pub fn apply(&self, mu: &CMatrix) -> Result<CMatrix> {
        if mu.shape() != (self.dim, self.dim) {
            return Err(Error::Input(format!(
                "operator must be {0}x{0}, got {1}x{2}",
                self.dim,
                mu.nrows(),
                mu.ncols()
            )));
        }
        Ok(self.act(mu))
    }

    /// [`apply`](Self::apply) for operators whose shape is known to match.
    pub(crate) fn act(&self, mu: &CMatrix) -> CMatrix {
        debug_assert_eq!(mu.shape(), (self.dim, self.dim));
        let out = &self.natural * vec_op(mu);
        unvec(out.as_slice(), self.dim)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SuperOperator) -> Result<SuperOperator> {
        if self.dim != other.dim {
            return Err(Error::Input(format!(
                "cannot compose maps on dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        SuperOperator::from_natural(self.dim, &self.natural * &other.natural)
    }

    /// `‖N² − N‖_F`.
    pub fn idempotency_residual(&self) -> f64 {
        (&self.natural * &self.natural - &self.natural).norm()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::Input("dim must be positive".into()));
    }
    Ok(())
}

fn check_finite(what: &str, m: &CMatrix) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Input(format!(
            "{what} matrix has non-finite entries"
        )));
    }
    Ok(())
}

/// A unit vector `x` and an eigenvector `z` of `Ψ(xx*)` with negative
/// eigenvalue `value`.
#[derive(Debug, Clone)]
pub struct PositivityWitness {
    pub x: CVector,
    pub z: CVector,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct ChannelFlags {
    pub trace_preserving: bool,
    pub hermiticity_preserving: bool,
    pub completely_positive: bool,
    /// `λ_min` of the Choi matrix; absent when the map is not Hermiticity
    /// preserving (the Choi matrix is then not Hermitian).
    pub choi_min_eigenvalue: Option<f64>,
    /// Filled in by [`ChannelFlags::with_positivity_search`]. Absence is not a
    /// proof of positivity.
    pub positivity_witness: Option<PositivityWitness>,
}

impl ChannelFlags {
    /// Runs the positivity falsifier unless complete positivity already rules
    /// out a witness.
    pub fn with_positivity_search(
        mut self,
        psi: &SuperOperator,
        samples: usize,
        seed: u64,
        policy: &TolerancePolicy,
    ) -> Self {
        if !self.completely_positive {
            self.positivity_witness = positivity_falsifier(psi, samples, seed, policy);
        }
        self
    }
}

/// Trace preservation, Hermiticity preservation and complete positivity.
pub fn classify(psi: &SuperOperator, policy: &TolerancePolicy) -> ChannelFlags {
    let d = psi.dim;
    let vec_id = vec_op(&CMatrix::identity(d, d));
    let tp_residual = (psi.natural.adjoint() * &vec_id - &vec_id).norm();
    let trace_preserving = tp_residual <= policy.tol_fixed;

    let mut hp_residual: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let lhs = psi.act(&unit(d, b, a));
            let rhs = psi.act(&unit(d, a, b)).adjoint();
            hp_residual = hp_residual.max((lhs - rhs).norm());
        }
    }
    let hermiticity_preserving = hp_residual <= policy.tol_fixed;

    let choi_min_eigenvalue = if hermiticity_preserving {
        hermitian_eig(&hermitian_part(&psi.choi()))
            .ok()
            .map(|e| e.min())
    } else {
        None
    };
    let completely_positive = choi_min_eigenvalue.is_some_and(|l| l >= -policy.tol_fixed);

    ChannelFlags {
        trace_preserving,
        hermiticity_preserving,
        completely_positive,
        choi_min_eigenvalue,
        positivity_witness: None,
    }
}

/// Haar-random unit vector in `C^d`.
pub(crate) fn random_unit_vector(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Samples Haar-random pure states `x` and reports the most negative
/// `λ_min(Ψ(xx*))` below `−tol_fixed`.
///
/// Deterministic given `seed`. Finding nothing means only that no violation
/// turned up in `samples` draws.
pub fn positivity_falsifier(
    psi: &SuperOperator,
    samples: usize,
    seed: u64,
    policy: &TolerancePolicy,
) -> Option<PositivityWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: Option<PositivityWitness> = None;
    for _ in 0..samples.max(1) {
        let x = random_unit_vector(&mut rng, psi.dim);
        let out = hermitian_part(&psi.act(&outer(&x, &x)));
        let Ok(e) = hermitian_eig(&out) else {
            continue;
        };
        let value = e.min();
        if value < -policy.tol_fixed && worst.as_ref().is_none_or(|w| value < w.value) {
            let z = e.vectors.column(psi.dim - 1).into_owned();
            worst = Some(PositivityWitness { x, z, value });
        }
    }
    worst
}

/// `μ ↦ Ψ(Π_X μ Π_X) ⊕ Ξ(Π_Y μ Π_Y)`; off-diagonal blocks are annihilated.
pub fn direct_sum_superop(psi: &SuperOperator, xi: &SuperOperator) -> SuperOperator {
    let (d1, d2) = (psi.dim, xi.dim);
    let d = d1 + d2;
    let out = SuperOperator::from_fn(d, |mu| {
        let mut res = CMatrix::zeros(d, d);
        let a = mu.view((0, 0), (d1, d1)).into_owned();
        let b = mu.view((d1, d1), (d2, d2)).into_owned();
        res.view_mut((0, 0), (d1, d1)).copy_from(&psi.act(&a));
        res.view_mut((d1, d1), (d2, d2)).copy_from(&xi.act(&b));
        res
    });
    match (psi.kraus(), xi.kraus()) {
        (Some(ka), Some(kb)) => {
            let mut kraus = Vec::with_capacity(ka.len() + kb.len());
            for a in ka {
                let mut m = CMatrix::zeros(d, d);
                m.view_mut((0, 0), (d1, d1)).copy_from(a);
                kraus.push(m);
            }
            for b in kb {
                let mut m = CMatrix::zeros(d, d);
                m.view_mut((d1, d1), (d2, d2)).copy_from(b);
                kraus.push(m);
            }
            out.with_kraus(kraus)
        }
        _ => out,
    }
}
