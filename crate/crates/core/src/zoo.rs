//! Channels and projections with known answers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{direct_sum_superop, SuperOperator};
use crate::numerics::{unit, CMatrix, CVector, C64};
use crate::structure::CaseKind;
use crate::{Error, Result};

/// A generator with its parameters.
#[derive(Debug, Clone)]
pub enum ZooSpec {
    Depolarizing {
        d: usize,
        p: f64,
    },
    Dephasing {
        d: usize,
        p: f64,
    },
    AmplitudeDamping {
        p: f64,
    },
    Unitary {
        u: CMatrix,
    },
    Transpose {
        d: usize,
    },
    ConditionalExpectation {
        blocks: Vec<(usize, Vec<f64>)>,
    },
    SpecCase {
        m: usize,
        r: Vec<f64>,
        case: CaseKind,
        l: usize,
    },
    RandomCptp {
        d: usize,
        kraus: usize,
        seed: u64,
    },
}

pub fn builtin_channel(spec: &ZooSpec) -> Result<SuperOperator> {
    match spec {
        ZooSpec::Depolarizing { d, p } => depolarizing(*d, *p),
        ZooSpec::Dephasing { d, p } => dephasing(*d, *p),
        ZooSpec::AmplitudeDamping { p } => amplitude_damping(*p),
        ZooSpec::Unitary { u } => unitary(u),
        ZooSpec::Transpose { d } => transpose(*d),
        ZooSpec::ConditionalExpectation { blocks } => conditional_expectation_projector(blocks),
        ZooSpec::SpecCase { m, r, case, l } => spec_case_projector(*m, r, case, *l),
        ZooSpec::RandomCptp { d, kraus, seed } => random_cptp(*d, *kraus, *seed),
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Input(format!("noise parameter {p} outside [0, 1]")));
    }
    Ok(())
}

fn check_d(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::Input("dimension must be positive".into()));
    }
    Ok(())
}

fn check_probability(r: &[f64]) -> Result<()> {
    if r.is_empty() {
        return Err(Error::Input("spectrum is empty".into()));
    }
    if r.iter().any(|&x| x.is_nan() || x <= 0.0 || !x.is_finite()) {
        return Err(Error::Input(format!(
            "spectrum {r:?} has a non-positive entry"
        )));
    }
    let total: f64 = r.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Input(format!(
            "spectrum {r:?} sums to {total}, not 1"
        )));
    }
    Ok(())
}

/// `μ ↦ (1−p)μ + p·Tr(μ) I/d`.
pub fn depolarizing(d: usize, p: f64) -> Result<SuperOperator> {
    check_d(d)?;
    check_p(p)?;
    let mut kraus = Vec::new();
    if p < 1.0 {
        kraus.push(CMatrix::identity(d, d).scale((1.0 - p).sqrt()));
    }
    if p > 0.0 {
        let w = (p / d as f64).sqrt();
        for i in 0..d {
            for j in 0..d {
                kraus.push(unit(d, i, j).scale(w));
            }
        }
    }
    SuperOperator::from_kraus(d, kraus)
}

/// `μ ↦ Tr(μ) I/d`.
pub fn depolarizing_projector(d: usize) -> Result<SuperOperator> {
    depolarizing(d, 1.0)
}

/// `μ ↦ (1−p)μ + p·diag(μ)`.
pub fn dephasing(d: usize, p: f64) -> Result<SuperOperator> {
    check_d(d)?;
    check_p(p)?;
    let mut kraus = vec![CMatrix::identity(d, d).scale((1.0 - p).sqrt())];
    if p > 0.0 {
        for k in 0..d {
            kraus.push(unit(d, k, k).scale(p.sqrt()));
        }
    }
    SuperOperator::from_kraus(d, kraus)
}

/// Qubit amplitude damping with decay probability `p`.
pub fn amplitude_damping(p: f64) -> Result<SuperOperator> {
    check_p(p)?;
    let k0 = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new((1.0 - p).sqrt(), 0.0),
        ],
    );
    let k1 = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(p.sqrt(), 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    );
    SuperOperator::from_kraus(2, vec![k0, k1])
}

/// `μ ↦ U μ U*`.
pub fn unitary(u: &CMatrix) -> Result<SuperOperator> {
    if !u.is_square() || u.nrows() == 0 {
        return Err(Error::Input(
            "unitary must be a non-empty square matrix".into(),
        ));
    }
    let d = u.nrows();
    let err = (u.adjoint() * u - CMatrix::identity(d, d)).norm();
    if err > 1e-10 {
        return Err(Error::Input(format!(
            "matrix is not unitary (‖U*U − I‖ = {err:.3e})"
        )));
    }
    SuperOperator::from_kraus(d, vec![u.clone()])
}

/// Unitary channel of `diag(e^{iθ_1}, …, e^{iθ_d})`.
pub fn unitary_from_phases(phases: &[f64]) -> Result<SuperOperator> {
    let diag = CVector::from_iterator(
        phases.len(),
        phases.iter().map(|&t| C64::from_polar(1.0, t)),
    );
    unitary(&CMatrix::from_diagonal(&diag))
}

/// The projection onto the fixed space of [`unitary_from_phases`]: keeps
/// entry `(a, b)` iff `θ_a = θ_b` mod 2π.
pub fn unitary_pinching(phases: &[f64]) -> Result<SuperOperator> {
    let d = phases.len();
    check_d(d)?;
    let tau = std::f64::consts::TAU;
    let same = |a: usize, b: usize| {
        let gap = (phases[a] - phases[b]).rem_euclid(tau);
        gap < 1e-12 || tau - gap < 1e-12
    };
    Ok(SuperOperator::from_fn(d, |m| {
        CMatrix::from_fn(d, d, |a, b| {
            if same(a, b) {
                m[(a, b)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }))
}

/// `μ ↦ μ^T`.
pub fn transpose(d: usize) -> Result<SuperOperator> {
    check_d(d)?;
    Ok(SuperOperator::from_fn(d, |m| m.transpose()))
}

/// `μ ↦ (μ + μ^T)/2`.
pub fn transpose_symmetrization(d: usize) -> Result<SuperOperator> {
    check_d(d)?;
    Ok(SuperOperator::from_fn(d, |m| {
        (m + m.transpose()).scale(0.5)
    }))
}

/// `μ ↦ μ ∘ M` where `M` is all ones except zeros at `(a, b)` and `(b, a)`
/// for each listed pair. Not positive in general; used for negative tests.
pub fn schur_masked_identity(d: usize, masked: &[(usize, usize)]) -> SuperOperator {
    SuperOperator::from_fn(d, |m| {
        let mut out = m.clone();
        for &(a, b) in masked {
            out[(a, b)] = C64::new(0.0, 0.0);
            out[(b, a)] = C64::new(0.0, 0.0);
        }
        out
    })
}

/// `μ ↦ U Φ(U* μ U) U*`.
pub fn conjugate_by(phi: &SuperOperator, u: &CMatrix) -> SuperOperator {
    let left = u.conjugate().kronecker(u);
    let right = u.transpose().kronecker(&u.adjoint());
    SuperOperator::from_natural(phi.dim(), left * phi.natural() * right)
        .expect("conjugation keeps the shape")
}

pub fn direct_sum(a: &SuperOperator, b: &SuperOperator) -> SuperOperator {
    direct_sum_superop(a, b)
}

/// `W ((Tr_Z W* μ W) ⊗ diag r) W*` for the coordinate isometry starting at
/// `offset`, added into `out`.
fn add_factor(out: &mut CMatrix, mu: &CMatrix, offset: usize, ly: usize, r: &[f64]) {
    let m = r.len();
    for i in 0..ly {
        for j in 0..ly {
            let b: C64 = (0..m)
                .map(|k| mu[(offset + i * m + k, offset + j * m + k)])
                .sum();
            for k in 0..m {
                out[(offset + i * m + k, offset + j * m + k)] += b * r[k];
            }
        }
    }
}

/// `⊕_i Id_{L(Y_i)} ⊗ Γ^{ρ_i}` with `Γ^ρ(μ) = Tr(μ)ρ`, on coordinates
/// `e_{offset + i·m + k}` for block `(dim Y, r)`.
pub fn conditional_expectation_projector(blocks: &[(usize, Vec<f64>)]) -> Result<SuperOperator> {
    if blocks.is_empty() {
        return Err(Error::Input("at least one block is required".into()));
    }
    let mut d = 0;
    for (ly, r) in blocks {
        check_probability(r)?;
        if *ly == 0 {
            return Err(Error::Input("block with dim Y = 0".into()));
        }
        d += ly * r.len();
    }
    Ok(SuperOperator::from_fn(d, |mu| {
        let mut out = CMatrix::zeros(d, d);
        let mut offset = 0;
        for (ly, r) in blocks {
            add_factor(&mut out, mu, offset, *ly, r);
            offset += ly * r.len();
        }
        out
    }))
}

/// [`conditional_expectation_projector`] on the first coordinates of `C^d`;
/// the trace of the remaining corner is sent to the first block's `ρ`, so
/// the support is a proper subspace.
pub fn conditional_expectation_projector_embedded(
    blocks: &[(usize, Vec<f64>)],
    d: usize,
) -> Result<SuperOperator> {
    let inner = conditional_expectation_projector(blocks)?;
    let n = inner.dim();
    if d < n {
        return Err(Error::Input(format!(
            "ambient dim {d} below the blocks' dim {n}"
        )));
    }
    let rho0: Vec<f64> = blocks[0].1.clone();
    Ok(SuperOperator::from_fn(d, |mu| {
        let mut out = CMatrix::zeros(d, d);
        let top = mu.view((0, 0), (n, n)).into_owned();
        out.view_mut((0, 0), (n, n)).copy_from(&inner.act(&top));
        let rest: C64 = (n..d).map(|k| mu[(k, k)]).sum();
        for (k, &w) in rho0.iter().enumerate() {
            out[(k, k)] += rest * w;
        }
        out
    }))
}

fn check_partition(m: usize, case: &CaseKind) -> Result<()> {
    match case {
        CaseKind::Zero => Err(Error::Input(
            "a planted class cannot have the zero case".into(),
        )),
        CaseKind::Half => Ok(()),
        CaseKind::Partition { s0, s1 } => {
            let mut all: Vec<usize> = s0.iter().chain(s1).copied().collect();
            all.sort_unstable();
            if all != (1..=m).collect::<Vec<_>>() {
                return Err(Error::Input(format!(
                    "partition {s0:?} | {s1:?} does not split 1..={m}"
                )));
            }
            Ok(())
        }
    }
}

/// `l` blocks of dim `m` with coordinates `x_{i,k} = e_{i·m+k}`, acting by
/// `Tr(·)ρ` inside blocks and by the half or partition law across them.
pub fn spec_case_projector(
    m: usize,
    r: &[f64],
    case: &CaseKind,
    l: usize,
) -> Result<SuperOperator> {
    if r.len() != m {
        return Err(Error::Input(format!(
            "spectrum has {} entries for m = {m}",
            r.len()
        )));
    }
    if r.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Input(format!(
            "spectrum {r:?} must be strictly decreasing"
        )));
    }
    if l < 2 {
        return Err(Error::Input("a coupled class needs l ≥ 2 blocks".into()));
    }
    spec_case_projector_unchecked(m, r, case, l)
}

/// [`spec_case_projector`] without the distinct-spectrum and `l ≥ 2`
/// requirements, for probing degenerate spectra.
pub fn spec_case_projector_unchecked(
    m: usize,
    r: &[f64],
    case: &CaseKind,
    l: usize,
) -> Result<SuperOperator> {
    if m == 0 || l == 0 || r.len() != m {
        return Err(Error::Input(format!(
            "invalid shape m = {m}, l = {l}, r = {r:?}"
        )));
    }
    check_probability(r)?;
    check_partition(m, case)?;
    let d = l * m;
    let idx = |i: usize, k: usize| i * m + k;
    let in_s0 = |k: usize| match case {
        CaseKind::Partition { s0, .. } => s0.contains(&(k + 1)),
        _ => true,
    };
    Ok(SuperOperator::from_fn(d, |mu| {
        let mut out = CMatrix::zeros(d, d);
        for i in 0..l {
            let tr: C64 = (0..m).map(|g| mu[(idx(i, g), idx(i, g))]).sum();
            for k in 0..m {
                out[(idx(i, k), idx(i, k))] += tr * r[k];
            }
            for j in 0..l {
                if i == j {
                    continue;
                }
                for g in 0..m {
                    let c = mu[(idx(i, g), idx(j, g))];
                    for k in 0..m {
                        match case {
                            CaseKind::Half => {
                                let w = c * (0.5 * r[k]);
                                out[(idx(i, k), idx(j, k))] += w;
                                out[(idx(j, k), idx(i, k))] += w;
                            }
                            _ => {
                                let w = c * r[k];
                                if in_s0(k) == in_s0(g) {
                                    out[(idx(i, k), idx(j, k))] += w;
                                } else {
                                    out[(idx(j, k), idx(i, k))] += w;
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }))
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// Haar-random isometry `C^cols → C^rows` (QR of a complex Gaussian with the
/// diagonal of `R` made positive).
fn haar_isometry(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(rows, cols, &mut rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..cols {
        let z = r[(k, k)];
        if z.norm() > 0.0 {
            let phase = z / z.norm();
            let mut col = q.column_mut(k);
            col *= phase;
        }
    }
    q
}

pub fn haar_unitary(d: usize, seed: u64) -> Result<CMatrix> {
    check_d(d)?;
    Ok(haar_isometry(d, d, seed))
}

/// Kraus operators sliced from a Haar-random isometry `C^d → C^{d·kraus}`.
pub fn random_cptp(d: usize, kraus: usize, seed: u64) -> Result<SuperOperator> {
    check_d(d)?;
    if kraus == 0 {
        return Err(Error::Input("kraus count must be at least 1".into()));
    }
    let v = haar_isometry(d * kraus, d, seed);
    let ops = (0..kraus)
        .map(|j| v.view((j * d, 0), (d, d)).into_owned())
        .collect();
    SuperOperator::from_kraus(d, ops)
}

/// Named test corpus: channels and projections across the generators.
pub fn corpus() -> Result<Vec<(String, SuperOperator)>> {
    let spectra: [&[f64]; 3] = [&[1.0], &[0.75, 0.25], &[0.5, 0.3, 0.2]];
    let mut out = vec![
        ("depolarizing-2-0.5".to_string(), depolarizing(2, 0.5)?),
        ("depolarizing-3-0.7".into(), depolarizing(3, 0.7)?),
        ("dephasing-3-0.4".into(), dephasing(3, 0.4)?),
        ("amplitude-damping-0.3".into(), amplitude_damping(0.3)?),
        ("amplitude-damping-1".into(), amplitude_damping(1.0)?),
        (
            "unitary-3".into(),
            unitary_from_phases(&[0.0, std::f64::consts::FRAC_PI_3, std::f64::consts::PI / 5.0])?,
        ),
        ("transpose-2".into(), transpose(2)?),
        ("transpose-3".into(), transpose(3)?),
        ("transpose-sym-3".into(), transpose_symmetrization(3)?),
        (
            "cond-exp-2x2+1".into(),
            conditional_expectation_projector(&[(2, vec![0.75, 0.25]), (1, vec![1.0])])?,
        ),
        (
            "cond-exp-embedded".into(),
            conditional_expectation_projector_embedded(&[(1, vec![0.75, 0.25])], 3)?,
        ),
        (
            "half+depolarizing".into(),
            direct_sum(
                &spec_case_projector(2, &[0.75, 0.25], &CaseKind::Half, 2)?,
                &depolarizing_projector(2)?,
            ),
        ),
    ];
    for r in spectra {
        let m = r.len();
        let mut cases = vec![CaseKind::Half, CaseKind::cptp(m)];
        if m >= 2 {
            cases.push(CaseKind::Partition {
                s0: vec![1],
                s1: (2..=m).collect(),
            });
        }
        for case in cases {
            for l in 2..=3 {
                if case == CaseKind::Half || m * l <= 6 {
                    out.push((
                        format!("spec-case-m{m}-{case}-l{l}"),
                        spec_case_projector(m, r, &case, l)?,
                    ));
                }
            }
        }
    }
    for seed in 0..4 {
        out.push((format!("random-cptp-3-2-{seed}"), random_cptp(3, 2, seed)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{classify, positivity_falsifier};
    use crate::numerics::TolerancePolicy;
    use crate::projector::fixed_space_basis;

    fn policy() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn generator_examples() {
        let out = depolarizing(2, 1.0).unwrap().apply(&unit(2, 0, 1)).unwrap();
        assert_eq!(out.norm(), 0.0);
        assert_eq!(
            transpose(2).unwrap().apply(&unit(2, 0, 1)).unwrap(),
            unit(2, 1, 0)
        );

        let ad = amplitude_damping(1.0).unwrap();
        let fs = fixed_space_basis(&ad, &policy()).unwrap();
        assert_eq!(fs.dim(), 1);
        assert!((fs.basis[0][(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generators_are_trace_preserving() {
        for (name, psi) in corpus().unwrap() {
            assert!(classify(&psi, &policy()).trace_preserving, "{name}");
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(depolarizing(2, 1.5).is_err());
        assert!(dephasing(0, 0.5).is_err());
        assert!(amplitude_damping(-0.1).is_err());
        assert!(unitary(&CMatrix::identity(2, 2).scale(2.0)).is_err());
        assert!(conditional_expectation_projector(&[(1, vec![0.6, 0.6])]).is_err());
        assert!(conditional_expectation_projector(&[]).is_err());
        assert!(random_cptp(2, 0, 1).is_err());
        assert!(spec_case_projector(2, &[0.5, 0.5], &CaseKind::Half, 2).is_err());
        assert!(spec_case_projector(2, &[0.75, 0.25], &CaseKind::Half, 1).is_err());
        let bad = CaseKind::Partition {
            s0: vec![1],
            s1: vec![1],
        };
        assert!(spec_case_projector(2, &[0.75, 0.25], &bad, 2).is_err());
        assert!(spec_case_projector(2, &[0.75, 0.25], &CaseKind::Zero, 2).is_err());
    }

    #[test]
    fn conditional_expectation_examples() {
        let p = policy();
        let ce = conditional_expectation_projector(&[(1, vec![1.0 / 3.0; 3])]);
        // 1/3 ·3 is not exactly 1 in floating point but well within 1e-12.
        let ce = ce.unwrap();
        assert!((ce.natural() - depolarizing_projector(3).unwrap().natural()).norm() < 1e-14);

        let ce = conditional_expectation_projector(&[(2, vec![0.75, 0.25])]).unwrap();
        assert_eq!(ce.dim(), 4);
        assert_eq!(fixed_space_basis(&ce, &p).unwrap().dim(), 4);

        let ce = conditional_expectation_projector(&[(1, vec![1.0]), (1, vec![1.0])]).unwrap();
        assert!((ce.natural() - unitary_pinching(&[0.0, 1.0]).unwrap().natural()).norm() < 1e-15);
    }

    #[test]
    fn conditional_expectations_are_cp_projections() {
        let p = policy();
        for blocks in [
            vec![(2, vec![0.75, 0.25]), (1, vec![1.0])],
            vec![(3, vec![0.5, 0.3, 0.2])],
            vec![(1, vec![0.6, 0.4]), (2, vec![1.0])],
        ] {
            let ce = conditional_expectation_projector(&blocks).unwrap();
            assert!(ce.idempotency_residual() <= 1e-10);
            assert!(classify(&ce, &p).completely_positive);
        }
        let emb = conditional_expectation_projector_embedded(&[(1, vec![0.75, 0.25])], 3).unwrap();
        assert!(emb.idempotency_residual() <= 1e-12);
        assert!(classify(&emb, &p).completely_positive);
    }

    #[test]
    fn spec_case_examples() {
        let p = policy();
        let half = spec_case_projector(1, &[1.0], &CaseKind::Half, 2).unwrap();
        assert!((half.natural() - transpose_symmetrization(2).unwrap().natural()).norm() < 1e-15);

        let flip = CaseKind::Partition {
            s0: vec![1],
            s1: vec![2],
        };
        let phi = spec_case_projector(2, &[0.75, 0.25], &flip, 2).unwrap();
        let f = classify(&phi, &p);
        assert!(f.trace_preserving && !f.completely_positive);

        let phi = spec_case_projector(2, &[0.75, 0.25], &CaseKind::cptp(2), 2).unwrap();
        assert!(classify(&phi, &p).completely_positive);
        let ce = conditional_expectation_projector(&[(2, vec![0.75, 0.25])]).unwrap();
        assert!((phi.natural() - ce.natural()).norm() < 1e-15);
    }

    #[test]
    fn spec_case_projectors_are_ptp_projections() {
        let p = policy();
        for (m, r) in [
            (1, vec![1.0]),
            (2, vec![0.75, 0.25]),
            (3, vec![0.5, 0.3, 0.2]),
        ] {
            let mut cases = vec![CaseKind::Half, CaseKind::cptp(m)];
            if m >= 2 {
                cases.push(CaseKind::Partition {
                    s0: vec![1],
                    s1: (2..=m).collect(),
                });
            }
            for case in cases {
                for l in 2..=3 {
                    let phi = spec_case_projector(m, &r, &case, l).unwrap();
                    let f = classify(&phi, &p);
                    assert!(f.trace_preserving);
                    assert!(phi.idempotency_residual() <= 1e-10);
                    assert_eq!(
                        f.completely_positive,
                        case.is_cptp_shape(),
                        "{m} {case} {l}"
                    );
                    assert!(
                        positivity_falsifier(&phi, 2_000, 3, &p).is_none(),
                        "{m} {case} {l}"
                    );
                }
            }
        }
    }

    #[test]
    fn random_cptp_examples() {
        let p = policy();
        let u = random_cptp(2, 1, 5).unwrap();
        let k = &u.kraus().unwrap()[0];
        assert!((k.adjoint() * k - CMatrix::identity(2, 2)).norm() < 1e-12);

        let mut exceptions = 0;
        for seed in 0..20 {
            let psi = random_cptp(3, 9, seed).unwrap();
            if fixed_space_basis(&psi, &p).unwrap().dim() != 1 {
                exceptions += 1;
            }
        }
        assert_eq!(exceptions, 0);

        let a = random_cptp(3, 4, 7).unwrap();
        let b = random_cptp(3, 4, 7).unwrap();
        assert_eq!(a.natural(), b.natural());
    }

    #[test]
    fn random_cptp_is_trace_preserving() {
        for seed in 0..50 {
            let psi = random_cptp(4, 3, seed).unwrap();
            let sum = psi
                .kraus()
                .unwrap()
                .iter()
                .fold(CMatrix::zeros(4, 4), |acc, a| acc + a.adjoint() * a);
            assert!((sum - CMatrix::identity(4, 4)).norm() <= 1e-10);
        }
    }

    #[test]
    fn conjugation_is_a_similarity() {
        let phi = transpose_symmetrization(2).unwrap();
        let u = haar_unitary(2, 3).unwrap();
        let c = conjugate_by(&phi, &u);
        let mu = CMatrix::from_fn(2, 2, |a, b| C64::new(a as f64 + 0.5, b as f64));
        let expect = &u * phi.apply(&(u.adjoint() * &mu * &u)).unwrap() * u.adjoint();
        assert!((c.apply(&mu).unwrap() - expect).norm() < 1e-12);
    }
}
