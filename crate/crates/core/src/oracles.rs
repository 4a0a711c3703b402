//! Runnable checks of the positivity lemmas behind the structure results.
//!
//! Each lemma is an implication; when its hypothesis does not hold at the
//! given tolerance the verdict is `Skipped`, never `Fail`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{random_unit_vector, SuperOperator};
use crate::decompose::block_decomposition;
use crate::numerics::{hermitian_part, outer, psd_support, CMatrix, CVector, TolerancePolicy, C64};
use crate::projector::Subspace;
use crate::structure::global_structure;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Pass { residual: f64 },
    Fail { residual: f64 },
    Skipped { reason: String },
}

impl Verdict {
    fn from_residual(residual: f64, tol: f64) -> Self {
        if residual <= tol {
            Verdict::Pass { residual }
        } else {
            Verdict::Fail { residual }
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

/// If `z*Φ(xx*)z = 0` and `z*Φ(yy*)z = 0`, then `Φ(xy*)z = 0`.
pub fn check_pos1(
    phi: &SuperOperator,
    x: &CVector,
    y: &CVector,
    z: &CVector,
    policy: &TolerancePolicy,
) -> Verdict {
    let quad = |v: &CVector| (z.adjoint() * phi.act(&outer(v, v)) * z)[(0, 0)].norm();
    let (qx, qy) = (quad(x), quad(y));
    let scale_x = x.norm_squared() * z.norm_squared();
    let scale_y = y.norm_squared() * z.norm_squared();
    if qx > policy.tol_fixed * scale_x || qy > policy.tol_fixed * scale_y {
        return Verdict::Skipped {
            reason: format!("hypothesis fails: z*Φ(xx*)z = {qx:.3e}, z*Φ(yy*)z = {qy:.3e}"),
        };
    }
    let residual = (phi.act(&outer(x, y)) * z).norm();
    Verdict::from_residual(residual, policy.tol_cert * x.norm() * y.norm() * z.norm())
}

/// If `Π_Z Φ(xx*) Π_Z = 0`, then `Π_Z Φ(xy*) Π_Z = 0` for all `y`.
pub fn check_pos2(
    phi: &SuperOperator,
    x: &CVector,
    zsub: &Subspace,
    policy: &TolerancePolicy,
) -> Verdict {
    let pz = zsub.projector();
    let pre = (&pz * phi.act(&outer(x, x)) * &pz).norm();
    if pre > policy.tol_fixed * x.norm_squared() {
        return Verdict::Skipped {
            reason: format!("hypothesis fails: ‖Π_Z Φ(xx*) Π_Z‖ = {pre:.3e}"),
        };
    }
    let d = phi.dim();
    let mut residual: f64 = 0.0;
    for b in 0..d {
        let mut e = CVector::zeros(d);
        e[b] = C64::new(1.0, 0.0);
        residual = residual.max((&pz * phi.act(&outer(x, &e)) * &pz).norm());
    }
    Verdict::from_residual(residual, policy.tol_cert * x.norm())
}

/// `L(sub)` is invariant: `‖(I−Π)Φ(E)‖ + ‖Φ(E)(I−Π)‖ ≤ tol_cert` on a basis.
pub fn check_invariance(phi: &SuperOperator, sub: &Subspace, policy: &TolerancePolicy) -> Verdict {
    let d = phi.dim();
    let q = CMatrix::identity(d, d) - sub.projector();
    let v = sub.isometry();
    let mut residual: f64 = 0.0;
    for p in 0..sub.dim() {
        for r in 0..sub.dim() {
            let out = phi.act(&(v.column(p) * v.column(r).adjoint()));
            residual = residual.max((&q * &out).norm() + (&out * &q).norm());
        }
    }
    Verdict::from_residual(residual, policy.tol_cert)
}

/// `u_{i,j}^{k,l} = y_k* Φ(y_i z_j*) z_l`, `v_{i,j}^{k,l} = y_k* Φ(z_i y_j*) z_l`,
/// `w = u + v`.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub m: usize,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub w: Vec<C64>,
}

impl CoefficientTable {
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.m + j) * self.m + k) * self.m + l
    }

    pub fn u(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.u[self.idx(i, j, k, l)]
    }

    pub fn v(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.v[self.idx(i, j, k, l)]
    }

    pub fn w(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.w[self.idx(i, j, k, l)]
    }
}

/// Verdicts on a coefficient table.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientVerdicts {
    /// `u_{i,i}^{k,k}`, `v_{i,i}^{k,k}` real and within `[0, r_k]`.
    pub poshalf: Verdict,
    /// `u_{i,j}^{k,k} + conj(v_{j,i}^{k,k}) = 0` for `i ≠ j`.
    pub cluu: Verdict,
    /// `u_{i,j}^{k,k} = 0` for `i ≠ j` whenever `u ≠ v` on the diagonal at `i` or `j`.
    pub nohalf: Verdict,
    /// `w_{i,i}^{k,k} = r_k`.
    pub wdiag: Verdict,
}

pub fn coefficient_table(
    phi: &SuperOperator,
    y: &[CVector],
    z: &[CVector],
    r: &[f64],
    policy: &TolerancePolicy,
) -> (CoefficientTable, CoefficientVerdicts) {
    let m = y.len();
    let n = m * m * m * m;
    let mut table = CoefficientTable {
        m,
        u: vec![C64::new(0.0, 0.0); n],
        v: vec![C64::new(0.0, 0.0); n],
        w: vec![C64::new(0.0, 0.0); n],
    };
    for i in 0..m {
        for j in 0..m {
            let pu = phi.act(&outer(&y[i], &z[j]));
            let pv = phi.act(&outer(&z[i], &y[j]));
            for k in 0..m {
                let left = y[k].adjoint();
                let (lu, lv) = (&left * &pu, &left * &pv);
                for l in 0..m {
                    let at = table.idx(i, j, k, l);
                    let u = (&lu * &z[l])[(0, 0)];
                    let v = (&lv * &z[l])[(0, 0)];
                    table.u[at] = u;
                    table.v[at] = v;
                    table.w[at] = u + v;
                }
            }
        }
    }

    let tol = policy.tol_cert;
    let mut poshalf: f64 = 0.0;
    let mut wdiag: f64 = 0.0;
    for i in 0..m {
        for k in 0..m {
            for c in [table.u(i, i, k, k), table.v(i, i, k, k)] {
                let below = (-c.re).max(0.0);
                let above = (c.re - r[k]).max(0.0);
                poshalf = poshalf.max(below).max(above).max(c.im.abs());
            }
            wdiag = wdiag.max((table.w(i, i, k, k) - C64::new(r[k], 0.0)).norm());
        }
    }

    let mut cluu: f64 = 0.0;
    let mut nohalf: f64 = 0.0;
    let mut nohalf_applied = false;
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            for k in 0..m {
                cluu = cluu.max((table.u(i, j, k, k) + table.v(j, i, k, k).conj()).norm());
                let split = |a: usize| {
                    (table.u(a, a, k, k) - table.v(a, a, k, k)).norm() > policy.tol_spec * r[k]
                };
                if split(i) || split(j) {
                    nohalf_applied = true;
                    nohalf = nohalf.max(table.u(i, j, k, k).norm());
                }
            }
        }
    }

    let verdicts = CoefficientVerdicts {
        poshalf: Verdict::from_residual(poshalf, tol),
        cluu: if m < 2 {
            Verdict::Skipped {
                reason: "needs two indices".into(),
            }
        } else {
            Verdict::from_residual(cluu, tol)
        },
        nohalf: if nohalf_applied {
            Verdict::from_residual(nohalf, tol)
        } else {
            Verdict::Skipped {
                reason: "no diagonal index with u ≠ v off the diagonal".into(),
            }
        },
        wdiag: Verdict::from_residual(wdiag, tol),
    };
    (table, verdicts)
}

/// One verdict of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct Probe {
    pub lemma: &'static str,
    pub probe: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Default)]
pub struct SweepSummary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

pub fn summarize(probes: &[Probe]) -> SweepSummary {
    let mut s = SweepSummary::default();
    for p in probes {
        match p.verdict {
            Verdict::Pass { .. } => s.passed += 1,
            Verdict::Fail { .. } => s.failed += 1,
            Verdict::Skipped { .. } => s.skipped += 1,
        }
    }
    s
}

fn random_in(sub: &Subspace, rng: &mut ChaCha8Rng) -> CVector {
    sub.isometry() * random_unit_vector(rng, sub.dim())
}

/// `ker Σ_v Φ(vv*)`, or `None` when the sum has full support.
fn joint_kernel(
    phi: &SuperOperator,
    vs: &[&CVector],
    policy: &TolerancePolicy,
) -> Result<Option<Subspace>> {
    let d = phi.dim();
    let sum = vs
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, v| acc + phi.act(&outer(v, v)));
    let (support, _) = psd_support(&hermitian_part(&sum), policy)?;
    let kernel = Subspace::new_unchecked(support).complement_in(&Subspace::full(d), policy)?;
    Ok((kernel.dim() > 0).then_some(kernel))
}

fn union(a: &Subspace, b: &Subspace) -> Subspace {
    Subspace::new_unchecked(CMatrix::from_columns(
        &a.isometry()
            .column_iter()
            .chain(b.isometry().column_iter())
            .map(|c| c.into_owned())
            .collect::<Vec<_>>(),
    ))
}

/// Runs every oracle on probes derived from the block structure of `phi`,
/// plus `samples` Haar-random probes. Deterministic given `seed`.
pub fn sweep(
    phi: &SuperOperator,
    samples: usize,
    seed: u64,
    policy: &TolerancePolicy,
) -> Result<Vec<Probe>> {
    let d = phi.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dec = block_decomposition(phi, policy)?;
    let outside = dec.ambient.complement_in(&Subspace::full(d), policy)?;
    let blocks: Vec<&Subspace> = dec.blocks.iter().map(|b| &b.subspace).collect();
    let mut out = Vec::new();

    for (a, sa) in blocks.iter().enumerate() {
        let mut targets: Vec<(String, &Subspace)> = blocks
            .iter()
            .enumerate()
            .filter(|(b, _)| *b != a)
            .map(|(b, sb)| (format!("block {}", b + 1), *sb))
            .collect();
        if outside.dim() > 0 {
            targets.push(("support complement".into(), &outside));
        }
        for (name, sz) in targets {
            let (x, y, z) = (
                random_in(sa, &mut rng),
                random_in(sa, &mut rng),
                random_in(sz, &mut rng),
            );
            out.push(Probe {
                lemma: "pos1",
                probe: format!("x, y in block {}; z in {name}", a + 1),
                verdict: check_pos1(phi, &x, &y, &z, policy),
            });
            out.push(Probe {
                lemma: "pos2",
                probe: format!("x in block {}; Z = {name}", a + 1),
                verdict: check_pos2(phi, &x, sz, policy),
            });
        }
    }
    // Random probes aim at the hypotheses: z is drawn from the kernel of
    // Φ(xx*) + Φ(yy*), so the implication is actually exercised. Even samples
    // draw x, y inside a random block, odd ones from all of C^d.
    for s in 0..samples {
        let (x, y, origin) = if s % 2 == 0 {
            let a = rng.random_range(0..blocks.len());
            (
                random_in(blocks[a], &mut rng),
                random_in(blocks[a], &mut rng),
                format!("block {}", a + 1),
            )
        } else {
            (
                random_unit_vector(&mut rng, d),
                random_unit_vector(&mut rng, d),
                "C^d".to_string(),
            )
        };
        let probe = format!("random sample {}: x, y in {origin}", s + 1);
        let Some(kernel) = joint_kernel(phi, &[&x, &y], policy)? else {
            let reason =
                "Φ(xx*) + Φ(yy*) has full support; no z satisfies the hypothesis".to_string();
            out.push(Probe {
                lemma: "pos1",
                probe: probe.clone(),
                verdict: Verdict::Skipped {
                    reason: reason.clone(),
                },
            });
            out.push(Probe {
                lemma: "pos2",
                probe,
                verdict: Verdict::Skipped { reason },
            });
            continue;
        };
        let z = random_in(&kernel, &mut rng);
        out.push(Probe {
            lemma: "pos1",
            probe: probe.clone(),
            verdict: check_pos1(phi, &x, &y, &z, policy),
        });
        out.push(Probe {
            lemma: "pos2",
            probe,
            verdict: check_pos2(phi, &x, &kernel, policy),
        });
    }

    for (a, sa) in blocks.iter().enumerate() {
        out.push(Probe {
            lemma: "invariance",
            probe: format!("block {}", a + 1),
            verdict: check_invariance(phi, sa, policy),
        });
        out.push(Probe {
            lemma: "invariance",
            probe: format!("support minus block {}", a + 1),
            verdict: check_invariance(phi, &sa.complement_in(&dec.ambient, policy)?, policy),
        });
        for (b, sb) in blocks.iter().enumerate().skip(a + 1) {
            out.push(Probe {
                lemma: "invariance",
                probe: format!("blocks {} + {}", a + 1, b + 1),
                verdict: check_invariance(phi, &union(sa, sb), policy),
            });
        }
    }
    out.push(Probe {
        lemma: "invariance",
        probe: "support".into(),
        verdict: check_invariance(phi, &dec.ambient, policy),
    });

    let report = global_structure(phi, &dec, policy)?;
    for class in report.classes.iter().filter(|c| c.case.is_some()) {
        for a in 0..class.l() {
            for b in a + 1..class.l() {
                let (_, v) =
                    coefficient_table(phi, &class.bases[a], &class.bases[b], &class.r, policy);
                let name = format!("blocks {} + {}", class.blocks[a] + 1, class.blocks[b] + 1);
                for (lemma, verdict) in [
                    ("poshalf", v.poshalf),
                    ("cluu", v.cluu),
                    ("nohalf", v.nohalf),
                    ("wdiag", v.wdiag),
                ] {
                    out.push(Probe {
                        lemma,
                        probe: name.clone(),
                        verdict,
                    });
                }
            }
        }
    }
    Ok(out)
}
