//! How a PTP projection couples blocks of equal signature.
//!
//! For two blocks `Y`, `Z` with equal dimension and spectrum, a nonzero cross
//! action yields a fixed Hermitian `ξ` whose `Y`–`Z` part has singular value
//! decomposition `c Σ r_k y_k z_k*`. In that basis the cross action takes one
//! of two shapes:
//!
//! * `Half`: `Φ(y_i z_j*) = δ_ij · ½ Σ_k r_k (y_k z_k* + z_k y_k*)`;
//! * `Partition(S0, S1)`: for `i ∈ S^b`,
//!   `Φ(y_i z_j*) = δ_ij (Σ_{k∈S^b} r_k y_k z_k* + Σ_{k∈S^{1−b}} r_k z_k y_k*)`.
//!
//! Completely positive projections always have `S1 = ∅`, and then
//! `Φ = ⊕ Id_{L(Y_i)} ⊗ Γ^{ρ_i}` on the support.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::channel::{classify, SuperOperator};
use crate::decompose::{
    block_decomposition, blocks_equivalent, verify_block_action, Block, BlockDecomposition,
};
use crate::numerics::{
    fix_phase, hermitian_eig, hermitian_part, outer, spectrum_is_degenerate, svd, CMatrix, CVector,
    TolerancePolicy, C64, I,
};
use crate::projector::fixed_space_basis;
use crate::{Error, Result};

/// Shape of the cross action between two equivalent blocks. Index sets are
/// 1-based and `S0` always contains index 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CaseKind {
    Zero,
    Half,
    Partition { s0: Vec<usize>, s1: Vec<usize> },
}

impl CaseKind {
    /// `Partition([1..m], ∅)`, the completely positive shape.
    pub fn cptp(m: usize) -> Self {
        CaseKind::Partition {
            s0: (1..=m).collect(),
            s1: Vec::new(),
        }
    }

    pub fn is_cptp_shape(&self) -> bool {
        matches!(self, CaseKind::Partition { s1, .. } if s1.is_empty())
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseKind::Zero => write!(f, "zero"),
            CaseKind::Half => write!(f, "half"),
            CaseKind::Partition { s0, s1 } => write!(f, "partition({s0:?} | {s1:?})"),
        }
    }
}

/// Which of the three alignment equalities failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Equality {
    /// `ρ = Σ r_k y_k y_k*` and `σ = Σ r_k z_k z_k*`.
    F1,
    /// `Φ(y_i z_i* + z_i y_i*) = ξ/c`.
    F2,
    /// `Φ(y_i z_j* + z_i y_j*) = 0` for `i ≠ j`.
    F3,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub equality: Equality,
    pub residual: f64,
}

/// SVD data of a fixed Hermitian `ξ` coupling two blocks.
#[derive(Debug, Clone)]
pub struct CrossPrecursor {
    pub xi: CMatrix,
    pub c: f64,
    pub r: Vec<f64>,
    pub y: Vec<CVector>,
    pub z: Vec<CVector>,
    /// Largest residual over the three equalities.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub enum Certificate {
    /// `Φ` annihilates `L(Y, Z)` and `L(Z, Y)`.
    Zero,
    Present(CrossPrecursor),
    Violated(Violation),
}

/// A classified cross block with its aligned bases.
#[derive(Debug, Clone)]
pub struct CrossBlockCase {
    pub kind: CaseKind,
    pub c: f64,
    pub r: Vec<f64>,
    pub y: Vec<CVector>,
    pub z: Vec<CVector>,
    /// `max_{i,j} ‖Φ(y_i z_j*) − expected‖_F`.
    pub action_residual: f64,
}

#[derive(Debug, Clone)]
pub enum Classification {
    Case(CrossBlockCase),
    /// The spectrum is degenerate, where the case split is not established.
    Undetermined(String),
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Certified,
    Undetermined,
    Inconsistent,
}

impl Status {
    fn worst(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Inconsistent, _) | (_, Inconsistent) => Inconsistent,
            (Undetermined, _) | (_, Undetermined) => Undetermined,
            _ => Certified,
        }
    }
}

/// One connectivity class of blocks.
#[derive(Debug, Clone)]
pub struct ClassReport {
    /// Indices into the decomposition's block list, ascending.
    pub blocks: Vec<usize>,
    /// Block dimension.
    pub m: usize,
    /// Shared spectrum, descending.
    pub r: Vec<f64>,
    /// Uniform case of the class; `None` when undetermined.
    pub case: Option<CaseKind>,
    /// Aligned bases `x_{i,1..m}`, one list per block in `blocks` order.
    pub bases: Vec<Vec<CVector>>,
    /// Largest action residual over the class.
    pub residual: f64,
    pub note: Option<String>,
}

impl ClassReport {
    /// Number of blocks in the class.
    pub fn l(&self) -> usize {
        self.blocks.len()
    }
}

/// One factor `W (L(Y) ⊗ ρ) W*` of the completely positive form.
#[derive(Debug, Clone)]
pub struct CptpFactor {
    pub dim_y: usize,
    pub dim_z: usize,
    pub rho: Vec<f64>,
    /// Isometry `C^{dim_y} ⊗ C^{dim_z} → X`, column `i·dim_z + k` is `x_{i,k}`.
    pub w: CMatrix,
}

impl CptpFactor {
    /// `W ((Tr_Z W* μ W) ⊗ diag r) W*`.
    pub fn apply(&self, mu: &CMatrix) -> CMatrix {
        let (l, m) = (self.dim_y, self.dim_z);
        let a = self.w.adjoint() * mu * &self.w;
        let mut inner = CMatrix::zeros(l * m, l * m);
        for i in 0..l {
            for j in 0..l {
                let b: C64 = (0..m).map(|k| a[(i * m + k, j * m + k)]).sum();
                for k in 0..m {
                    inner[(i * m + k, j * m + k)] = b * self.rho[k];
                }
            }
        }
        &self.w * inner * self.w.adjoint()
    }

    /// Spanning set `W (e_a e_b* ⊗ diag r) W*` of this factor's fixed space.
    pub fn fixed_elements(&self) -> Vec<CMatrix> {
        let (l, m) = (self.dim_y, self.dim_z);
        let mut out = Vec::with_capacity(l * l);
        for a in 0..l {
            for b in 0..l {
                let mut acc = CMatrix::zeros(self.w.nrows(), self.w.nrows());
                for k in 0..m {
                    let x = self.w.column(a * m + k);
                    let y = self.w.column(b * m + k);
                    acc += x * y.adjoint() * C64::new(self.rho[k], 0.0);
                }
                out.push(acc);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct CptpForm {
    pub factors: Vec<CptpFactor>,
    /// `max_E ‖Φ(E) − Σ_c factor_c(E)‖_F` over the matrix units of `L(X)`.
    pub residual: f64,
    /// `Σ dim_y²`.
    pub fixed_dim: usize,
}

#[derive(Debug, Clone)]
pub struct StructureReport {
    pub classes: Vec<ClassReport>,
    pub cptp_form: Option<CptpForm>,
    pub status: Status,
    pub reasons: Vec<String>,
}

impl StructureReport {
    fn inconsistent(classes: Vec<ClassReport>, reason: String) -> Self {
        Self {
            classes,
            cptp_form: None,
            status: Status::Inconsistent,
            reasons: vec![reason],
        }
    }
}

fn block_vectors(b: &Block) -> Vec<CVector> {
    let v = b.subspace.isometry();
    (0..v.ncols()).map(|k| v.column(k).into_owned()).collect()
}

/// Searches `Φ(θ + θ*)`, then `Φ(iθ − iθ*)`, over the units `θ = y_a z_b*`
/// and checks the alignment equalities on the first nonzero hit.
pub fn cross_block_certificate(
    phi: &SuperOperator,
    by: &Block,
    bz: &Block,
    policy: &TolerancePolicy,
) -> Result<Certificate> {
    let m = by.dim();
    if bz.dim() != m {
        return Err(Error::Contract(format!(
            "cross certificate needs blocks of equal dim, got {m} and {}",
            bz.dim()
        )));
    }
    let (ys, zs) = (block_vectors(by), block_vectors(bz));
    let mut xi = None;
    'search: for ya in &ys {
        for zb in &zs {
            let theta = outer(ya, zb);
            let ta = theta.adjoint();
            for cand in [&theta + &ta, (&theta - &ta) * I] {
                let out = phi.act(&cand);
                if out.norm() > policy.tol_cert {
                    xi = Some(hermitian_part(&out));
                    break 'search;
                }
            }
        }
    }
    let Some(xi) = xi else {
        return Ok(Certificate::Zero);
    };

    let (vy, vz) = (by.subspace.isometry(), bz.subspace.isometry());
    let cross = vy.adjoint() * &xi * vz;
    let dec = svd(&cross)?;
    let c: f64 = dec.s.iter().sum();
    let r: Vec<f64> = dec.s.iter().map(|s| s / c).collect();
    let y: Vec<CVector> = (0..m).map(|k| vy * dec.u.column(k)).collect();
    let z: Vec<CVector> = (0..m).map(|k| vz * dec.v.column(k)).collect();

    let weighted = |vs: &[CVector]| {
        vs.iter()
            .zip(&r)
            .fold(CMatrix::zeros(phi.dim(), phi.dim()), |acc, (v, &rk)| {
                acc + outer(v, v) * C64::new(rk, 0.0)
            })
    };
    let f1 = (by.rho_ambient() - weighted(&y))
        .norm()
        .max((bz.rho_ambient() - weighted(&z)).norm());
    if f1 > policy.tol_cert {
        return Ok(Certificate::Violated(Violation {
            equality: Equality::F1,
            residual: f1,
        }));
    }

    let target = xi.scale(1.0 / c);
    let mut f2: f64 = 0.0;
    let mut f3: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let sym = outer(&y[i], &z[j]) + outer(&z[i], &y[j]);
            let out = phi.act(&sym);
            if i == j {
                f2 = f2.max((out - &target).norm());
            } else {
                f3 = f3.max(out.norm());
            }
        }
    }
    if f2 > policy.tol_cert {
        return Ok(Certificate::Violated(Violation {
            equality: Equality::F2,
            residual: f2,
        }));
    }
    if f3 > policy.tol_cert {
        return Ok(Certificate::Violated(Violation {
            equality: Equality::F3,
            residual: f3,
        }));
    }
    Ok(Certificate::Present(CrossPrecursor {
        xi,
        c,
        r,
        y,
        z,
        residual: f1.max(f2).max(f3),
    }))
}

/// `Φ(y_i z_j*)` as predicted by `kind`.
pub fn expected_action(
    kind: &CaseKind,
    y: &[CVector],
    z: &[CVector],
    r: &[f64],
    i: usize,
    j: usize,
) -> CMatrix {
    let d = y[0].len();
    let mut out = CMatrix::zeros(d, d);
    if i != j {
        return out;
    }
    match kind {
        CaseKind::Zero => {}
        CaseKind::Half => {
            for k in 0..y.len() {
                out += (outer(&y[k], &z[k]) + outer(&z[k], &y[k])) * C64::new(0.5 * r[k], 0.0);
            }
        }
        CaseKind::Partition { s0, .. } => {
            let side = |k: usize| s0.contains(&(k + 1));
            for k in 0..y.len() {
                let w = C64::new(r[k], 0.0);
                if side(k) == side(i) {
                    out += outer(&y[k], &z[k]) * w;
                } else {
                    out += outer(&z[k], &y[k]) * w;
                }
            }
        }
    }
    out
}

/// `u_{i,j}^{k,l} = y_k* Φ(y_i z_j*) z_l` for `i = j`, `k = l`, indexed `[i][k]`.
fn diagonal_u(phi: &SuperOperator, y: &[CVector], z: &[CVector]) -> Vec<Vec<C64>> {
    let m = y.len();
    (0..m)
        .map(|i| {
            let out = phi.act(&outer(&y[i], &z[i]));
            (0..m)
                .map(|k| (y[k].adjoint() * &out * &z[k])[(0, 0)])
                .collect()
        })
        .collect()
}

/// Decides the case from the diagonal coefficients `u_{i,i}^{k,k}` and then
/// checks the whole cross action against it.
pub fn classify_with_bases(
    phi: &SuperOperator,
    y: &[CVector],
    z: &[CVector],
    r: &[f64],
    policy: &TolerancePolicy,
) -> Classification {
    let m = y.len();
    if spectrum_is_degenerate(r, policy.tol_spec) {
        return Classification::Undetermined(format!(
            "spectrum {r:?} has repeated values within {:.1e}",
            policy.tol_spec
        ));
    }
    let u = diagonal_u(phi, y, z);
    let near = |a: C64, b: f64| (a - C64::new(b, 0.0)).norm() <= policy.tol_cert;

    let kind = if (0..m).all(|i| (0..m).all(|k| near(u[i][k], 0.5 * r[k]))) {
        CaseKind::Half
    } else {
        let s0: Vec<usize> = (0..m)
            .filter(|&k| near(u[0][k], r[k]))
            .map(|k| k + 1)
            .collect();
        let s1: Vec<usize> = (1..=m).filter(|k| !s0.contains(k)).collect();
        let same = |a: usize, b: usize| s0.contains(&(a + 1)) == s0.contains(&(b + 1));
        for i in 0..m {
            for k in 0..m {
                let target = if same(i, k) { r[k] } else { 0.0 };
                if !near(u[i][k], target) {
                    return Classification::Inconsistent(format!(
                        "coefficient u[{}][{}] = {:.6} matches neither the half nor a partition shape",
                        i + 1,
                        k + 1,
                        u[i][k]
                    ));
                }
            }
        }
        CaseKind::Partition { s0, s1 }
    };

    let mut residual: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let out = phi.act(&outer(&y[i], &z[j]));
            residual = residual.max((out - expected_action(&kind, y, z, r, i, j)).norm());
        }
    }
    if residual > policy.tol_cert {
        return Classification::Inconsistent(format!(
            "cross action deviates from the {kind} shape by {residual:.3e}"
        ));
    }
    Classification::Case(CrossBlockCase {
        kind,
        c: 1.0,
        r: r.to_vec(),
        y: y.to_vec(),
        z: z.to_vec(),
        action_residual: residual,
    })
}

/// Classifies the cross action of a certified pair in the certificate's own
/// basis.
pub fn classify_cross_case(
    phi: &SuperOperator,
    by: &Block,
    _bz: &Block,
    pre: &CrossPrecursor,
    policy: &TolerancePolicy,
) -> Classification {
    if spectrum_is_degenerate(&by.spectrum, policy.tol_spec) {
        return Classification::Undetermined(format!(
            "block spectrum {:?} is degenerate",
            by.spectrum
        ));
    }
    match classify_with_bases(phi, &pre.y, &pre.z, &pre.r, policy) {
        Classification::Case(mut case) => {
            case.c = pre.c;
            Classification::Case(case)
        }
        other => other,
    }
}

/// Eigenvectors of `ρ` on the block, descending, each with its first
/// significant entry real positive.
fn reference_basis(b: &Block) -> Result<Vec<CVector>> {
    let e = hermitian_eig(&hermitian_part(&b.rho))?;
    let v = b.subspace.isometry();
    Ok((0..b.dim())
        .map(|k| {
            let mut x = v * e.vectors.column(k);
            fix_phase(&mut x);
            x
        })
        .collect())
}

/// Residual of `Φ(x_{i,g} x_{j,h}*) = δ_gh Σ_k r_k x_{i,k} x_{j,k}*` over a
/// class.
fn cptp_shape_residual(phi: &SuperOperator, bases: &[Vec<CVector>], r: &[f64]) -> f64 {
    let m = r.len();
    let mut worst: f64 = 0.0;
    for xi in bases {
        for xj in bases {
            let diag: CMatrix = (0..m).fold(CMatrix::zeros(phi.dim(), phi.dim()), |acc, k| {
                acc + outer(&xi[k], &xj[k]) * C64::new(r[k], 0.0)
            });
            for g in 0..m {
                for h in 0..m {
                    let out = phi.act(&outer(&xi[g], &xj[h]));
                    let res = if g == h {
                        (out - &diag).norm()
                    } else {
                        out.norm()
                    };
                    worst = worst.max(res);
                }
            }
        }
    }
    worst
}

/// Connected components of an undirected graph on `n` vertices.
fn components(n: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<Vec<usize>> {
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while label[r] != r {
            r = label[r];
        }
        let mut c = x;
        while label[c] != r {
            let next = label[c];
            label[c] = r;
            c = next;
        }
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut label, a), find(&mut label, b));
        if ra != rb {
            label[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        let root = find(&mut label, v);
        groups.entry(root).or_default().push(v);
    }
    groups.into_values().collect()
}

/// Builds the connectivity classes, aligns bases through each class's first
/// block and asserts one case per class.
pub fn global_structure(
    phi: &SuperOperator,
    dec: &BlockDecomposition,
    policy: &TolerancePolicy,
) -> Result<StructureReport> {
    let action = verify_block_action(phi, dec, policy);
    if !action.pass {
        return Ok(StructureReport::inconsistent(
            Vec::new(),
            format!(
                "block action law fails (within {:.3e}, cross {:.3e})",
                action.max_within(),
                action.max_cross()
            ),
        ));
    }

    let n = dec.blocks.len();
    let mut edges = BTreeSet::new();
    let mut certs = std::collections::BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&dec.blocks[i], &dec.blocks[j]);
            if !blocks_equivalent(a, b, policy) {
                continue;
            }
            match cross_block_certificate(phi, a, b, policy)? {
                Certificate::Zero => {}
                Certificate::Present(p) => {
                    edges.insert((i, j));
                    certs.insert((i, j), p);
                }
                Certificate::Violated(v) => {
                    return Ok(StructureReport::inconsistent(
                        Vec::new(),
                        format!(
                            "blocks {} and {}: alignment equality {:?} fails by {:.3e}",
                            i + 1,
                            j + 1,
                            v.equality,
                            v.residual
                        ),
                    ));
                }
            }
        }
    }

    let mut classes = Vec::new();
    let mut status = Status::Certified;
    let mut reasons = Vec::new();
    for members in components(n, &edges) {
        for (p, &a) in members.iter().enumerate() {
            for &b in &members[p + 1..] {
                if !edges.contains(&(a, b)) {
                    return Ok(StructureReport::inconsistent(
                        classes,
                        format!(
                            "blocks {} and {} are linked through their class but have no cross action",
                            a + 1,
                            b + 1
                        ),
                    ));
                }
            }
        }
        let reference = &dec.blocks[members[0]];
        let m = reference.dim();
        let r = reference.spectrum.clone();
        let mut bases = vec![reference_basis(reference)?];
        for &j in &members[1..] {
            let xi = &certs[&(members[0], j)].xi;
            let pj = dec.blocks[j].subspace.projector();
            let mut zs = Vec::with_capacity(m);
            for y in &bases[0] {
                let z = &pj * (xi * y);
                let norm = z.norm();
                if norm <= policy.tol_cert {
                    return Ok(StructureReport::inconsistent(
                        classes,
                        format!(
                            "alignment of block {} through block {} collapses",
                            j + 1,
                            members[0] + 1
                        ),
                    ));
                }
                zs.push(z / C64::new(norm, 0.0));
            }
            bases.push(zs);
        }

        let mut class = ClassReport {
            blocks: members.clone(),
            m,
            r: r.clone(),
            case: None,
            bases,
            residual: action.within[members[0]],
            note: None,
        };

        if members.len() == 1 {
            class.case = Some(CaseKind::cptp(m));
            classes.push(class);
            continue;
        }

        if spectrum_is_degenerate(&r, policy.tol_spec) {
            let res = cptp_shape_residual(phi, &class.bases, &r);
            class.residual = res;
            if res <= policy.tol_cert {
                class.case = Some(CaseKind::cptp(m));
                class.note = Some("degenerate spectrum; completely positive shape verified".into());
            } else {
                class.note = Some(format!(
                    "degenerate spectrum {r:?}; the half/partition split is not established here"
                ));
                status = status.worst(Status::Undetermined);
                reasons.push(format!(
                    "class of blocks {:?} has a degenerate spectrum",
                    members.iter().map(|b| b + 1).collect::<Vec<_>>()
                ));
            }
            classes.push(class);
            continue;
        }

        let mut shared: Option<CaseKind> = None;
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                match classify_with_bases(phi, &class.bases[a], &class.bases[b], &r, policy) {
                    Classification::Case(case) => {
                        class.residual = class.residual.max(case.action_residual);
                        match &shared {
                            None => shared = Some(case.kind),
                            Some(k) if *k == case.kind => {}
                            Some(k) => {
                                let reason = format!(
                                    "blocks {} and {} couple as {} but the class couples as {k}",
                                    members[a] + 1,
                                    members[b] + 1,
                                    case.kind
                                );
                                classes.push(class);
                                return Ok(StructureReport::inconsistent(classes, reason));
                            }
                        }
                    }
                    Classification::Undetermined(why) => {
                        return Err(Error::Inconsistent(format!(
                            "non-degenerate class reported undetermined: {why}"
                        )));
                    }
                    Classification::Inconsistent(why) => {
                        let reason =
                            format!("blocks {} and {}: {why}", members[a] + 1, members[b] + 1);
                        classes.push(class);
                        return Ok(StructureReport::inconsistent(classes, reason));
                    }
                }
            }
        }
        class.case = shared;
        classes.push(class);
    }

    Ok(StructureReport {
        classes,
        cptp_form: None,
        status,
        reasons,
    })
}

/// The `⊕ Id_{L(Y_i)} ⊗ Γ^{ρ_i}` form of a completely positive projection.
pub fn cptp_structure(
    phi: &SuperOperator,
    dec: &BlockDecomposition,
    policy: &TolerancePolicy,
) -> Result<StructureReport> {
    if !classify(phi, policy).completely_positive {
        return Err(Error::Contract(
            "cptp_structure needs a completely positive map; use global_structure".into(),
        ));
    }
    let mut report = global_structure(phi, dec, policy)?;
    if report.status == Status::Inconsistent {
        return Ok(report);
    }
    if let Some(bad) = report
        .classes
        .iter()
        .find(|c| !c.case.as_ref().is_some_and(CaseKind::is_cptp_shape))
    {
        let case = bad
            .case
            .as_ref()
            .map_or("undetermined".to_string(), |k| k.to_string());
        report.status = Status::Inconsistent;
        report.reasons.push(format!(
            "completely positive map has a class coupling as {case}"
        ));
        return Ok(report);
    }

    let d = phi.dim();
    let factors: Vec<CptpFactor> = report
        .classes
        .iter()
        .map(|c| {
            let (l, m) = (c.l(), c.m);
            let mut w = CMatrix::zeros(d, l * m);
            for (i, basis) in c.bases.iter().enumerate() {
                for (k, x) in basis.iter().enumerate() {
                    w.set_column(i * m + k, x);
                }
            }
            CptpFactor {
                dim_y: l,
                dim_z: m,
                rho: c.r.clone(),
                w,
            }
        })
        .collect();

    let vx = dec.ambient.isometry();
    let mut residual: f64 = 0.0;
    for p in 0..vx.ncols() {
        for q in 0..vx.ncols() {
            let e = vx.column(p) * vx.column(q).adjoint();
            let target = factors
                .iter()
                .fold(CMatrix::zeros(d, d), |acc, f| acc + f.apply(&e));
            residual = residual.max((phi.act(&e) - target).norm());
        }
    }
    let fixed_dim = factors.iter().map(|f| f.dim_y * f.dim_y).sum();
    let actual = fixed_space_basis(phi, policy)?.dim();

    if residual > policy.tol_cert {
        report.status = Status::Inconsistent;
        report.reasons.push(format!(
            "completely positive form deviates from the map by {residual:.3e}"
        ));
    } else if fixed_dim != actual {
        report.status = Status::Inconsistent;
        report.reasons.push(format!(
            "form predicts a fixed space of dim {fixed_dim}, found {actual}"
        ));
    } else {
        // Degenerate classes resolved to the completely positive shape are
        // certified by the residual above.
        report.status = Status::Certified;
        report.reasons.clear();
    }
    report.cptp_form = Some(CptpForm {
        factors,
        residual,
        fixed_dim,
    });
    Ok(report)
}

/// Outcome of one run of the degenerate-spectrum experiment.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub m: usize,
    pub r: Vec<f64>,
    pub planted: CaseKind,
    pub l: usize,
    pub status: Status,
    pub cases: Vec<Option<CaseKind>>,
    pub reasons: Vec<String>,
}

/// Plants a half or partition projector whose spectrum may repeat values and
/// records what the pipeline makes of it. Used to probe whether the case
/// split survives degenerate spectra; no claim is attached to the outcome.
pub fn degenerate_experiment(
    m: usize,
    r: &[f64],
    planted: &CaseKind,
    l: usize,
    policy: &TolerancePolicy,
) -> Result<ExperimentOutcome> {
    let phi = crate::zoo::spec_case_projector_unchecked(m, r, planted, l)?;
    let dec = block_decomposition(&phi, policy)?;
    let report = global_structure(&phi, &dec, policy)?;
    Ok(ExperimentOutcome {
        m,
        r: r.to_vec(),
        planted: planted.clone(),
        l,
        status: report.status,
        cases: report.classes.iter().map(|c| c.case.clone()).collect(),
        reasons: report.reasons,
    })
}
