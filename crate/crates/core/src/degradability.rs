//! Degrading maps as linear solves on transfer matrices, and the PD taxonomy.

use crate::channel::{action_distance, probe_states, ChoiMatrix, KrausChannel};
use crate::config::Tolerances;
use crate::entanglement::{bound_entanglement_report_matrix, is_entanglement_breaking, BoundEntanglementReport, EbReport};
use crate::error::{dim_mismatch, Result};
use crate::qmat::{kron, ComplexMatrix};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::collections::BTreeMap;

/// `T = Σ N̄_i ⊗ N_i`, so that `vec(N(X)) = T vec(X)` with column-major `vec`.
pub fn transfer_matrix(ch: &KrausChannel) -> Result<ComplexMatrix> {
    let (din, dout) = (ch.dim_in(), ch.dim_out());
    let mut t = ComplexMatrix::zeros(dout * dout, din * din);
    for k in ch.kraus() {
        t = &t + &kron(&k.conj(), k)?;
    }
    Ok(t)
}

/// Trace-1 Choi matrix (input first) of the linear map with transfer matrix `t`.
fn choi_of_transfer(t: &ComplexMatrix, din: usize, dout: usize) -> ComplexMatrix {
    let s = 1.0 / din as f64;
    ComplexMatrix::from_fn(din * dout, din * dout, |r, c| {
        let (a, i) = (r / dout, r % dout);
        let (b, j) = (c / dout, c % dout);
        t[(i + dout * j, a + din * b)] * s
    })
}

fn transfer_of_choi(j: &ComplexMatrix, din: usize, dout: usize) -> ComplexMatrix {
    let s = din as f64;
    ComplexMatrix::from_fn(dout * dout, din * din, |r, c| {
        let (i, jj) = (r % dout, r / dout);
        let (a, b) = (c % din, c / din);
        j[(a * dout + i, b * dout + jj)] * s
    })
}

/// Nearest positive semidefinite matrix (negative eigenvalues clipped).
fn psd_part(j: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = j.hermitian_part().eigh()?;
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > 0.0).collect();
    let n = j.rows();
    let scaled = ComplexMatrix::from_fn(n, keep.len(), |i, c| eig.vectors[(i, keep[c])] * eig.values[keep[c]]);
    let v = ComplexMatrix::from_fn(n, keep.len(), |i, c| eig.vectors[(i, keep[c])]);
    Ok(&scaled * &v.adjoint())
}

fn tp_residual_of_transfer(t: &ComplexMatrix, din: usize, dout: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..din {
        for b in 0..din {
            let tr: C64 = (0..dout).map(|i| t[(i + dout * i, a + din * b)]).sum();
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((tr - want).norm());
        }
    }
    worst
}

/// Off-range behavior of a solved map (the solve fixes it only on the range of `from`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Completion {
    /// Zero outside the range.
    LeastNorm,
    /// Identity outside the range (equal dimensions only).
    Identity,
    /// `X ↦ Tr(X) · to(I/d)` outside the range.
    Replacement,
    /// A caller-supplied map outside the range.
    WarmStart,
    /// Alternating projections between the solution space and the CP cone.
    Projected,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegradingSolution {
    pub success: bool,
    /// Kraus form of the solved map, present only on success.
    #[serde(skip)]
    pub map: Option<KrausChannel>,
    /// `max_ρ ‖to(ρ) - D(from(ρ))‖_max` over the probe states.
    pub residual: f64,
    /// Minimum eigenvalue of the trace-1 Choi matrix of the linear solution.
    pub cp_min_eig: f64,
    pub tp_residual: f64,
    pub completion: Completion,
}

impl DegradingSolution {
    pub fn succeeded(&self) -> bool {
        self.success
    }
}

struct Candidate {
    t: ComplexMatrix,
    cp_min_eig: f64,
    tp_residual: f64,
    completion: Completion,
}

/// Finds a CPTP `D` with `compose(from, D) = to`.
///
/// On the range of `T_from` the solution is `T_to · pinv(T_from)`; off the
/// range it follows a reference map (least-norm, identity, replacement, in
/// that order). A failure means no map was found this way, not that none exists.
pub fn solve_degrading_map(from: &KrausChannel, to: &KrausChannel) -> Result<DegradingSolution> {
    solve_degrading_map_with(from, to, None, &Tolerances::default())
}

pub fn solve_degrading_map_with(
    from: &KrausChannel,
    to: &KrausChannel,
    warm_start: Option<&KrausChannel>,
    tol: &Tolerances,
) -> Result<DegradingSolution> {
    if from.dim_in() != to.dim_in() {
        return Err(dim_mismatch(format!(
            "degrading solve needs a common input: {} vs {}",
            from.dim_in(),
            to.dim_in()
        )));
    }
    let (db, de) = (from.dim_out(), to.dim_out());
    if let Some(w) = warm_start {
        if w.dim_in() != db || w.dim_out() != de {
            return Err(dim_mismatch("warm start has the wrong dimensions"));
        }
    }
    let t_from = transfer_matrix(from)?;
    let t_to = transfer_matrix(to)?;
    let pinv = t_from.pinv(tol.pinv_cutoff);

    // residual does not depend on the off-range completion
    let miss = &t_to - &(&(&t_to * &pinv) * &t_from);
    let mut residual: f64 = 0.0;
    for p in probe_states(from.dim_in()) {
        let v = miss.mul_vec(&p.vec_col());
        residual = residual.max(v.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }

    let mut refs: Vec<(Completion, ComplexMatrix)> = Vec::new();
    if let Some(w) = warm_start {
        refs.push((Completion::WarmStart, transfer_matrix(w)?));
    }
    refs.push((Completion::LeastNorm, ComplexMatrix::zeros(de * de, db * db)));
    if db == de {
        refs.push((Completion::Identity, ComplexMatrix::identity(db * db)));
    }
    let sigma = to
        .apply_matrix(&ComplexMatrix::identity(to.dim_in()).scale_real(1.0 / to.dim_in() as f64))?
        .vec_col();
    let replace = ComplexMatrix::from_fn(de * de, db * db, |r, c| {
        if c % (db + 1) == 0 {
            sigma[r]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    refs.push((Completion::Replacement, replace));

    let on_range = &t_to * &pinv;
    let mut best: Option<Candidate> = None;
    for (completion, t_ref) in refs {
        // T_ref (I - T_from pinv), without forming the projector
        let t = &(&on_range + &t_ref) - &(&(&t_ref * &t_from) * &pinv);
        let choi = choi_of_transfer(&t, db, de).hermitian_part();
        let cp_min_eig = *choi.eigvalsh()?.last().expect("non-empty");
        let tp_residual = tp_residual_of_transfer(&t, db, de);
        let cand = Candidate { t, cp_min_eig, tp_residual, completion };
        let ok = cp_min_eig >= tol.psd_tol && tp_residual <= tol.residual_tol;
        if ok {
            best = Some(cand);
            break;
        }
        if best.as_ref().is_none_or(|b| rank_key(&cand, tol) > rank_key(b, tol)) {
            best = Some(cand);
        }
    }
    let mut best = best.expect("at least one reference");
    if residual <= tol.residual_tol && best.cp_min_eig < tol.psd_tol {
        if let Some(p) = project_to_cp(&best.t, &t_from, &pinv, &on_range, db, de, tol)? {
            best = p;
        }
    }
    let success = residual <= tol.residual_tol && best.cp_min_eig >= tol.psd_tol && best.tp_residual <= tol.residual_tol;
    let map = if success {
        let choi = ChoiMatrix { matrix: choi_of_transfer(&best.t, db, de).hermitian_part(), dim_in: db, dim_out: de };
        Some(KrausChannel::from_choi(&choi, tol.kraus_cutoff)?.named("degrading_map"))
    } else {
        None
    };
    Ok(DegradingSolution {
        success,
        map,
        residual,
        cp_min_eig: best.cp_min_eig,
        tp_residual: best.tp_residual,
        completion: best.completion,
    })
}

fn rank_key(c: &Candidate, tol: &Tolerances) -> (bool, f64) {
    let cp = if c.cp_min_eig.is_nan() { f64::NEG_INFINITY } else { c.cp_min_eig };
    (c.tp_residual <= tol.residual_tol, cp)
}

const PROJECTION_ITERS: usize = 3000;
/// Step factor on the affine set; values in (1, 2) speed up the linear tail.
const OVER_RELAXATION: f64 = 1.9;

/// Alternating projections between the affine set of trace-preserving maps
/// that agree with the solve on the range of `T_from` and the cone of
/// completely positive maps. Both projections are exact in the Frobenius
/// metric (the Choi reshuffle is an isometry up to scale), and for trace-
/// preserving `from`/`to` the two affine constraints commute, so their
/// composition projects onto the intersection.
fn project_to_cp(
    start: &ComplexMatrix,
    t_from: &ComplexMatrix,
    pinv: &ComplexMatrix,
    on_range: &ComplexMatrix,
    db: usize,
    de: usize,
    tol: &Tolerances,
) -> Result<Option<Candidate>> {
    let range_proj = t_from * pinv;
    let affine = |t: &ComplexMatrix| -> ComplexMatrix {
        let t = &(t - &(t * &range_proj)) + on_range;
        // trace rows: Σ_i T[(i,i), c] must equal vec(I_db)[c]
        let mut t = t;
        for c in 0..db * db {
            let tr: C64 = (0..de).map(|i| t[(i * (de + 1), c)]).sum();
            let want = if c % (db + 1) == 0 { 1.0 } else { 0.0 };
            let corr = (tr - C64::new(want, 0.0)) / de as f64;
            for i in 0..de {
                t[(i * (de + 1), c)] -= corr;
            }
        }
        t
    };
    let mut t = affine(start);
    let mut last = f64::NEG_INFINITY;
    for it in 0..PROJECTION_ITERS {
        let choi = choi_of_transfer(&t, db, de).hermitian_part();
        let min = *choi.eigvalsh()?.last().expect("non-empty");
        if min >= tol.psd_tol * 0.1 || (it > 50 && (min - last).abs() < 1e-15) {
            let tp_residual = tp_residual_of_transfer(&t, db, de);
            return Ok((min >= tol.psd_tol && tp_residual <= tol.residual_tol).then_some(Candidate {
                t,
                cp_min_eig: min,
                tp_residual,
                completion: Completion::Projected,
            }));
        }
        last = min;
        let next = affine(&transfer_of_choi(&psd_part(&choi)?, db, de));
        t = &t + &(&next - &t).scale_real(OVER_RELAXATION);
    }
    Ok(None)
}

/// Output simulates the environment: solve `B → E`.
pub fn is_degradable(ch: &KrausChannel) -> Result<DegradingSolution> {
    solve_degrading_map(ch, &ch.complementary()?)
}

/// Environment simulates the output: solve `E → B`.
pub fn is_antidegradable(ch: &KrausChannel) -> Result<DegradingSolution> {
    solve_degrading_map(&ch.complementary()?, ch)
}

/// Mismatch between `D^{B→E′} ∘ N_AB` and `D^{E→E′} ∘ N_AE` over the probe states.
pub fn verify_pd_identity(
    n_ab: &KrausChannel,
    d_b_to_eprime: &KrausChannel,
    n_ae: &KrausChannel,
    d_e_to_eprime: &KrausChannel,
) -> Result<f64> {
    let lhs = KrausChannel::compose(n_ab, d_b_to_eprime)?;
    let rhs = KrausChannel::compose(n_ae, d_e_to_eprime)?;
    action_distance(&lhs, &rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PdLabel {
    Degradable,
    AntiDegradable,
    DegradablePd,
    AntiDegradablePd,
    SymmetricPd,
    ConjugateVariant,
    Undetermined,
}

impl PdLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PdLabel::Degradable => "DEGRADABLE",
            PdLabel::AntiDegradable => "ANTI_DEGRADABLE",
            PdLabel::DegradablePd => "DEGRADABLE_PD",
            PdLabel::AntiDegradablePd => "ANTI_DEGRADABLE_PD",
            PdLabel::SymmetricPd => "SYMMETRIC_PD",
            PdLabel::ConjugateVariant => "CONJUGATE_VARIANT",
            PdLabel::Undetermined => "UNDETERMINED",
        }
    }
}

pub const KEY_B_E: &str = "B->E";
pub const KEY_E_B: &str = "E->B";
pub const KEY_B_EP: &str = "B->E'";
pub const KEY_EP_B: &str = "E'->B";

#[derive(Debug, Clone, Serialize)]
pub struct PdClassification {
    pub label: PdLabel,
    pub solutions: BTreeMap<String, DegradingSolution>,
    /// Solves against the conjugated targets `B → Ē` and `B → Ē′`, when requested and needed.
    pub conjugate_solutions: Option<BTreeMap<String, DegradingSolution>>,
    /// Choi state of the complementary channel on `A ⊗ E`.
    pub environment_report: BoundEntanglementReport,
    /// `σ_{E′R}`: Choi state of the degraded complementary channel.
    pub degraded_environment_report: BoundEntanglementReport,
    pub exclusions: ExclusionReport,
}

impl PdClassification {
    pub fn solution(&self, key: &str) -> &DegradingSolution {
        &self.solutions[key]
    }
}

/// Runs the four solves and applies the taxonomy.
///
/// `d_e_to_eprime.dim_in()` must equal the Kraus count of `ch` (the
/// environment of [`KrausChannel::complementary`]).
pub fn classify_pd(ch: &KrausChannel, d_e_to_eprime: &KrausChannel, try_conjugate: bool) -> Result<PdClassification> {
    classify_pd_with(ch, d_e_to_eprime, try_conjugate, &Tolerances::default())
}

pub fn classify_pd_with(
    ch: &KrausChannel,
    d_e_to_eprime: &KrausChannel,
    try_conjugate: bool,
    tol: &Tolerances,
) -> Result<PdClassification> {
    let n_ae = ch.complementary()?;
    if d_e_to_eprime.dim_in() != n_ae.dim_out() {
        return Err(dim_mismatch(format!(
            "E->E' map expects side {}, environment has side {}",
            d_e_to_eprime.dim_in(),
            n_ae.dim_out()
        )));
    }
    let n_aep = KrausChannel::compose(&n_ae, d_e_to_eprime)?;
    let solve = |from: &KrausChannel, to: &KrausChannel| solve_degrading_map_with(from, to, None, tol);
    let ((b_e, e_b), (b_ep, ep_b)) = rayon::join(
        || rayon::join(|| solve(ch, &n_ae), || solve(&n_ae, ch)),
        || rayon::join(|| solve(ch, &n_aep), || solve(&n_aep, ch)),
    );
    let (b_e, e_b, b_ep, ep_b) = (b_e?, e_b?, b_ep?, ep_b?);
    let identity_map = d_e_to_eprime.dim_in() == d_e_to_eprime.dim_out()
        && action_distance(d_e_to_eprime, &KrausChannel::identity(d_e_to_eprime.dim_in()))? <= tol.residual_tol;

    let mut label = if b_ep.success && ep_b.success {
        PdLabel::SymmetricPd
    } else if identity_map {
        if b_e.success {
            PdLabel::Degradable
        } else if e_b.success {
            PdLabel::AntiDegradable
        } else {
            PdLabel::Undetermined
        }
    } else if b_e.success && b_ep.success {
        PdLabel::DegradablePd
    } else if b_ep.success {
        PdLabel::AntiDegradablePd
    } else if e_b.success {
        PdLabel::AntiDegradable
    } else {
        PdLabel::Undetermined
    };

    let mut conjugate_solutions = None;
    if try_conjugate && label == PdLabel::Undetermined {
        let (c_e, c_ep) = rayon::join(|| solve(ch, &n_ae.conjugate()), || solve(ch, &n_aep.conjugate()));
        let (c_e, c_ep) = (c_e?, c_ep?);
        if c_e.success || c_ep.success {
            label = PdLabel::ConjugateVariant;
        }
        conjugate_solutions = Some(BTreeMap::from([(KEY_B_E.to_string(), c_e), (KEY_B_EP.to_string(), c_ep)]));
    }

    let env_choi = n_ae.to_choi()?;
    let environment_report =
        bound_entanglement_report_matrix(&env_choi.matrix, &[env_choi.dim_in, env_choi.dim_out], tol)?;
    let deg_choi = n_aep.to_choi()?;
    let degraded_environment_report =
        bound_entanglement_report_matrix(&deg_choi.matrix, &[deg_choi.dim_in, deg_choi.dim_out], tol)?;
    let exclusions = check_theorem3_exclusions_with(d_e_to_eprime, tol)?;

    let solutions = BTreeMap::from([
        (KEY_B_E.to_string(), b_e),
        (KEY_E_B.to_string(), e_b),
        (KEY_B_EP.to_string(), b_ep),
        (KEY_EP_B.to_string(), ep_b),
    ]);
    Ok(PdClassification {
        label,
        solutions,
        conjugate_solutions,
        environment_report,
        degraded_environment_report,
        exclusions,
    })
}

/// Properties of an `E → E′` map that reduce a PD claim to a plainer class.
#[derive(Debug, Clone, Serialize)]
pub struct ExclusionReport {
    /// The map acts as the identity: PD collapses to plain degradability.
    pub is_identity: bool,
    pub entanglement_breaking: EbReport,
    /// `None` when the map is not trace preserving and has no complement.
    pub degradable: Option<bool>,
    pub findings: Vec<String>,
}

pub fn check_theorem3_exclusions(d_e_to_eprime: &KrausChannel) -> Result<ExclusionReport> {
    check_theorem3_exclusions_with(d_e_to_eprime, &Tolerances::default())
}

pub fn check_theorem3_exclusions_with(d: &KrausChannel, tol: &Tolerances) -> Result<ExclusionReport> {
    let is_identity = d.dim_in() == d.dim_out()
        && action_distance(d, &KrausChannel::identity(d.dim_in()))? <= tol.residual_tol;
    let entanglement_breaking = is_entanglement_breaking(d, tol)?;
    let degradable = if d.tp_residual() <= tol.residual_tol {
        Some(solve_degrading_map_with(d, &d.complementary()?, None, tol)?.success)
    } else {
        None
    };
    let mut findings = Vec::new();
    if is_identity {
        findings.push("identity map: the PD structure reduces to plain degradability".to_string());
    }
    if entanglement_breaking.verdict == crate::entanglement::EbVerdict::Yes {
        findings.push(format!("entanglement-breaking map ({})", entanglement_breaking.witness));
    }
    if degradable == Some(true) {
        findings.push("degradable map".to_string());
    }
    if degradable.is_none() {
        findings.push(format!("map is not trace preserving (residual {:e}); degradability not tested", d.tp_residual()));
    }
    Ok(ExclusionReport { is_identity, entanglement_breaking, degradable, findings })
}
