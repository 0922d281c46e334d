//! Concrete channels, states and degrading maps, plus calibration baselines.
//!
//! Constructors that transcribe a printed Kraus set keep it verbatim and
//! report completeness through [`ZooEntry::status`]; `repaired` variants are
//! produced only on request by [`repair_completeness`].

use crate::channel::{KrausChannel, ReplaceState, ValidationReport};
use crate::config::Tolerances;
use crate::entanglement::DensityMatrix;
use crate::error::{dim_mismatch, QpdError, Result};
use crate::qmat::{kron, pauli, ComplexMatrix};
use crate::random::{ginibre, orthonormalize_columns, seeded};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::collections::BTreeMap;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(QpdError::DomainError(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

// ---------------------------------------------------------------- baselines

/// Erasure channel to `d + 1` levels; the erasure flag is the last level.
pub fn erasure(p: f64, d: usize) -> Result<KrausChannel> {
    check_unit("erasure probability", p)?;
    let keep = ComplexMatrix::from_fn(d + 1, d, |r, col| if r == col { c((1.0 - p).sqrt()) } else { c(0.0) });
    let mut ops = vec![keep];
    if p > 0.0 {
        ops.extend((0..d).map(|a| ComplexMatrix::unit(d + 1, d, d, a).scale_real(p.sqrt())));
    }
    Ok(KrausChannel::new(d, d + 1, ops)?.named(format!("erasure(p={p},d={d})")))
}

/// Generalized Pauli (Weyl) operator `X^a Z^b` in dimension `d`.
pub fn weyl(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let w = 2.0 * std::f64::consts::PI / d as f64;
    ComplexMatrix::from_fn(d, d, |r, col| {
        if r == (col + a) % d {
            C64::from_polar(1.0, w * (b * col) as f64)
        } else {
            c(0.0)
        }
    })
}

/// `ρ ↦ (1 - p) ρ + p Tr(ρ) I/d`.
pub fn depolarizing(p: f64, d: usize) -> Result<KrausChannel> {
    check_unit("depolarizing probability", p)?;
    let d2 = (d * d) as f64;
    let mut ops = vec![ComplexMatrix::identity(d).scale_real((1.0 - p + p / d2).sqrt())];
    if p > 0.0 {
        for a in 0..d {
            for b in 0..d {
                if a + b > 0 {
                    ops.push(weyl(d, a, b).scale_real((p / d2).sqrt()));
                }
            }
        }
    }
    Ok(KrausChannel::new(d, d, ops)?.named(format!("depolarizing(p={p},d={d})")))
}

pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    check_unit("damping gamma", gamma)?;
    let k0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]);
    let k1 = ComplexMatrix::from_real(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0]);
    Ok(KrausChannel::new(2, 2, vec![k0, k1])?.named(format!("amplitude_damping(gamma={gamma})")))
}

/// `ρ ↦ (1 - p) ρ + p Z ρ Z`.
pub fn dephasing(p: f64) -> Result<KrausChannel> {
    check_unit("dephasing probability", p)?;
    let ops = vec![ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()), pauli::z().scale_real(p.sqrt())];
    Ok(KrausChannel::new(2, 2, ops)?.named(format!("dephasing(p={p})")))
}

// ------------------------------------------------------- Horodecki family

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=5.0).contains(&alpha) || alpha.is_nan() {
        return Err(QpdError::DomainError(format!("alpha = {alpha} outside [0, 5]")));
    }
    Ok(())
}

/// Qutrit channel whose Choi state is the Horodecki state `σ_α`.
///
/// Kraus set: `√(2/7) I`, `√(α/7) |k+1⟩⟨k|`, `√((5-α)/7) |k-1⟩⟨k|` (indices mod 3).
pub fn horodecki_channel(alpha: f64) -> Result<KrausChannel> {
    check_alpha(alpha)?;
    let mut ops = vec![ComplexMatrix::identity(3).scale_real((2.0 / 7.0_f64).sqrt())];
    for k in 0..3 {
        ops.push(ComplexMatrix::unit(3, 3, (k + 1) % 3, k).scale_real((alpha / 7.0).sqrt()));
    }
    for k in 0..3 {
        ops.push(ComplexMatrix::unit(3, 3, (k + 2) % 3, k).scale_real(((5.0 - alpha) / 7.0).sqrt()));
    }
    Ok(KrausChannel::new(3, 3, ops)?.named(format!("horodecki(alpha={alpha})")))
}

/// `σ_α = 2/7 |Ψ⟩⟨Ψ| + α/7 σ₊ + (5-α)/7 σ₋` on 3⊗3, built directly from its definition.
pub fn horodecki_state(alpha: f64) -> Result<DensityMatrix> {
    check_alpha(alpha)?;
    let mut m = ComplexMatrix::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            m[(i * 3 + i, j * 3 + j)] += c(2.0 / 21.0);
        }
    }
    for i in 0..3 {
        let up = i * 3 + (i + 1) % 3;
        let down = ((i + 1) % 3) * 3 + i;
        m[(up, up)] += c(alpha / 21.0);
        m[(down, down)] += c((5.0 - alpha) / 21.0);
    }
    DensityMatrix::new(m, vec![3, 3])
}

// ------------------------------------------------- flagged PD construction

/// The six printed Pauli-block operators of the four-level entanglement-binding map, verbatim.
pub fn m_ae_channel() -> KrausChannel {
    let s = 2.0_f64.sqrt();
    let p0 = ComplexMatrix::unit(2, 2, 0, 0);
    let p1 = ComplexMatrix::unit(2, 2, 1, 1);
    let i2 = ComplexMatrix::identity(2);
    let a = (s + 2.0).sqrt() / 2.0;
    let b = (2.0 - s).sqrt() / 2.0;
    let w01 = (1.0 / (s + 2.0)).sqrt();
    let w34 = (1.0 / (2.0 * (s + 2.0))).sqrt();
    let w56 = (1.0 - 1.0 / (s + 1.0)).sqrt();
    let k = |x: &ComplexMatrix, y: &ComplexMatrix, w: f64| kron(x, y).expect("4x4").scale_real(w);
    let ops = vec![
        k(&i2, &p0, w01),
        k(&pauli::z(), &p1, w01),
        k(&pauli::z(), &pauli::y(), w34),
        k(&i2, &pauli::x(), w34),
        k(&pauli::x(), &ComplexMatrix::from_real_diag(&[a, b]), w56),
        k(&pauli::y(), &ComplexMatrix::from_real_diag(&[b, a]), w56),
    ];
    KrausChannel::new(4, 4, ops).expect("static shapes").named("m_ae")
}

/// Environment-side composite: `x |0⟩⟨0| ⊗ ρ + (1 - x) |1⟩⟨1| ⊗ inner(ρ)` (4→8 for a 4→4 inner map).
pub fn composite_complementary(x: f64, inner: &KrausChannel) -> Result<KrausChannel> {
    check_unit("x", x)?;
    let d = inner.dim_in();
    if inner.dim_out() != d {
        return Err(dim_mismatch("composite branch map must be square"));
    }
    let flag = |f: usize, m: &ComplexMatrix| {
        ComplexMatrix::from_fn(2 * d, d, |r, col| if r / d == f { m[(r % d, col)] } else { c(0.0) })
    };
    let mut ops = Vec::new();
    if x > 0.0 {
        ops.push(flag(0, &ComplexMatrix::identity(d)).scale_real(x.sqrt()));
    }
    if x < 1.0 {
        ops.extend(inner.kraus().iter().map(|k| flag(1, k).scale_real((1.0 - x).sqrt())));
    }
    Ok(KrausChannel::new(d, 2 * d, ops)?.named(format!("composite_complementary(x={x})")))
}

/// Flagged output channel `x Tr(ρ) π ⊕ (1 - x) inner(ρ)` for a 4→6 inner map (4→12).
pub fn nab_ae_channel(x: f64, inner: &KrausChannel, reference: ReplaceState) -> Result<KrausChannel> {
    if inner.dim_in() != 4 || inner.dim_out() != 6 {
        return Err(dim_mismatch(format!(
            "inner map must be 4->6, got {}->{}",
            inner.dim_in(),
            inner.dim_out()
        )));
    }
    Ok(KrausChannel::flagged_direct_sum(x, inner, reference)?.named(format!("nab_ae(x={x})")))
}

/// Coefficient `√v` that stays defined (imaginary) for negative `v`.
fn csqrt(v: f64) -> C64 {
    c(v).sqrt()
}

fn check_x_open(x: f64) -> Result<()> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(QpdError::DomainError(format!("x = {x} outside (0, 1]")));
    }
    Ok(())
}

/// Printed environment-to-output map (8→12) from its set notation, best effort.
///
/// The bare ket `|j⟩` beside a flag operator is read as the block matrix unit
/// `|j⟩⟨j|` (6x4, zero for `j ≥ 4`); the middle family is `|1⟩⟨0| ⊗ N_i` for
/// the Kraus operators of `m_ab` (4→6). For `x < 1/2` the last weight is imaginary.
pub fn d_e_to_b(x: f64, m_ab: &KrausChannel) -> Result<KrausChannel> {
    check_x_open(x)?;
    if m_ab.dim_in() != 4 || m_ab.dim_out() != 6 {
        return Err(dim_mismatch("m_ab must be 4->6"));
    }
    let block = |fo: usize, fi: usize, m: &ComplexMatrix| {
        ComplexMatrix::from_fn(12, 8, |r, col| {
            if r / 6 == fo && col / 4 == fi {
                m[(r % 6, col % 4)]
            } else {
                c(0.0)
            }
        })
    };
    let unit = |j: usize| {
        ComplexMatrix::from_fn(6, 4, |r, col| if r == j && col == j { c(1.0) } else { c(0.0) })
    };
    let mut ops = Vec::new();
    for j in 0..6 {
        ops.push(block(0, 1, &unit(j)));
        for k in m_ab.kraus() {
            ops.push(block(1, 0, k).scale(csqrt((1.0 - x) / x)));
        }
        ops.push(block(0, 0, &unit(j)).scale(csqrt((2.0 * x - 1.0) / x)));
    }
    let ops = dedup_and_prune(ops);
    Ok(KrausChannel::new(8, 12, ops)?.named(format!("d_e_to_b(x={x})")))
}

/// The set notation repeats the middle family for every `j`; keep one copy
/// and drop all-zero operators.
fn dedup_and_prune(ops: Vec<ComplexMatrix>) -> Vec<ComplexMatrix> {
    let mut out: Vec<ComplexMatrix> = Vec::new();
    for op in ops {
        if op.max_abs() == 0.0 || out.contains(&op) {
            continue;
        }
        out.push(op);
    }
    out
}

/// The printed 2x8 pair `N_0 = diag(√a1, √a2)`, `N_1 = diag(√(1-a1), √(1-a2))` on the first two columns.
pub fn d_e_to_eprime(a1: f64, a2: f64) -> Result<KrausChannel> {
    check_unit("a1", a1)?;
    check_unit("a2", a2)?;
    let pair = |u: f64, v: f64| {
        let mut m = ComplexMatrix::zeros(2, 8);
        m[(0, 0)] = c(u.sqrt());
        m[(1, 1)] = c(v.sqrt());
        m
    };
    let ops = vec![pair(a1, a2), pair(1.0 - a1, 1.0 - a2)];
    Ok(KrausChannel::new(8, 2, ops)?.named(format!("d_e_to_eprime(a1={a1},a2={a2})")))
}

/// Printed output-to-degraded-environment map (12→2) from its set notation, best effort.
///
/// `|0⟩⟨1| ⊗ |j⟩` and `|0⟩⟨0| ⊗ |j⟩` are read as `|0⟩⟨f, j|` for `j ∈ {0, 1}`.
/// `|1⟩⟨0| ⊗ N_i` cannot be shaped to 2x12; it is realized as `N_i`
/// (2x8, first six columns) acting on the flag-0 block, dropping the `|1⟩`.
pub fn d_b_to_eprime(x: f64, n_ae_prime: &KrausChannel) -> Result<KrausChannel> {
    check_x_open(x)?;
    if n_ae_prime.dim_out() != 2 {
        return Err(dim_mismatch("degraded-environment Kraus operators must have two rows"));
    }
    let din = n_ae_prime.dim_in();
    let mut ops = Vec::new();
    for j in 0..2 {
        ops.push(ComplexMatrix::unit(2, 12, 0, 6 + j));
        for k in n_ae_prime.kraus() {
            let op = ComplexMatrix::from_fn(2, 12, |r, col| if col < 6 && col < din { k[(r, col)] } else { c(0.0) });
            ops.push(op.scale(csqrt((1.0 - x) / x)));
        }
        ops.push(ComplexMatrix::unit(2, 12, 0, j).scale(csqrt((2.0 * x - 1.0) / x)));
    }
    let ops = dedup_and_prune(ops);
    Ok(KrausChannel::new(12, 2, ops)?.named(format!("d_b_to_eprime(x={x})")))
}

/// Seed fixing the symmetric-subspace isometry.
pub const SYMMETRIC_PD_SEED: u64 = 0x5d_4a11;

/// Isometry `V: ℂ⁴ → ℂ⁸ ⊗ ℂ⁸` whose range lies in the symmetric subspace.
pub fn symmetric_isometry() -> ComplexMatrix {
    let d = 8;
    let g = ginibre(&mut seeded(SYMMETRIC_PD_SEED), d * d, 4);
    // (I + SWAP)/2 applied column by column
    let sym = ComplexMatrix::from_fn(d * d, 4, |r, col| {
        let (i, j) = (r / d, r % d);
        (g[(i * d + j, col)] + g[(j * d + i, col)]) * 0.5
    });
    orthonormalize_columns(&sym)
}

/// Output and environment marginals of [`symmetric_isometry`]; equal in action.
pub fn symmetric_pd_channel() -> (KrausChannel, KrausChannel) {
    let v = symmetric_isometry();
    let d = 8;
    let n_ab = (0..d)
        .map(|e| ComplexMatrix::from_fn(d, 4, |b, a| v[(b * d + e, a)]))
        .collect();
    let n_ae = (0..d)
        .map(|b| ComplexMatrix::from_fn(d, 4, |e, a| v[(b * d + e, a)]))
        .collect();
    (
        KrausChannel::new(4, d, n_ab).expect("static shapes").named("symmetric_pd_b"),
        KrausChannel::new(4, d, n_ae).expect("static shapes").named("symmetric_pd_e"),
    )
}

// ------------------------------------------------ rank-one qutrit example

fn check_n_vec(n: [u32; 3]) -> Result<()> {
    if n[0] != 0 || n[1] > 3 || n[2] > 3 {
        return Err(QpdError::DomainError(format!("n_vec {n:?} needs n1 = 0 and n2, n3 in 0..=3")));
    }
    Ok(())
}

fn i_pow(n: u32) -> C64 {
    [c(1.0), C64::new(0.0, 1.0), c(-1.0), C64::new(0.0, -1.0)][(n % 4) as usize]
}

/// Principal `√((-1)^n)`.
fn sqrt_sign(n: u32) -> C64 {
    c(if n % 2 == 0 { 1.0 } else { -1.0 }).sqrt()
}

/// `|u⟩⟨w|` with the bra coefficients taken as printed (not conjugated).
fn ket_bra(u: &[C64], w: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.len(), w.len(), |i, j| u[i] * w[j])
}

/// Qutrit degrading map: `½|j⟩⟨j|` for each `j`, plus `⅛|γ⟩⟨γ|` and `⅛|κ⟩⟨κ|`.
pub fn corollary4_degrading_map(n: [u32; 3]) -> Result<KrausChannel> {
    check_n_vec(n)?;
    let mut ops: Vec<ComplexMatrix> = (0..3).map(|j| ComplexMatrix::unit(3, 3, j, j).scale_real(0.5)).collect();
    let gamma: Vec<C64> = n.iter().map(|&k| i_pow(k)).collect();
    let kappa: Vec<C64> = n.iter().map(|&k| sqrt_sign(k)).collect();
    ops.push(ket_bra(&gamma, &gamma).scale_real(0.125));
    ops.push(ket_bra(&kappa, &kappa).scale_real(0.125));
    Ok(KrausChannel::new(3, 3, ops)?.named(format!("corollary4_degrading(n={n:?})")))
}

/// Qutrit channel of six rank-one operators: `½|j⟩⟨j|` and `⅛ |Υ_j⟩⟨Υ_j|ϑ_j⟩⟨ϑ_j|`.
pub fn corollary4_rank_one_channel(n: [u32; 3]) -> Result<KrausChannel> {
    check_n_vec(n)?;
    let mut ops: Vec<ComplexMatrix> = (0..3).map(|j| ComplexMatrix::unit(3, 3, j, j).scale_real(0.5)).collect();
    for j in 0..3 {
        let e = |w: C64| {
            let mut v = vec![c(0.0); 3];
            v[j] = w;
            v
        };
        let upsilon = ket_bra(&e(i_pow(n[j])), &e(i_pow(n[j])));
        let theta = ket_bra(&e(sqrt_sign(n[j])), &e(sqrt_sign(n[j])));
        ops.push((&upsilon * &theta).scale_real(0.125));
    }
    Ok(KrausChannel::new(3, 3, ops)?.named(format!("corollary4_rank_one(n={n:?})")))
}

// ------------------------------------------------------------- repairing

/// Right-multiplies every operator by `S^{-1/2}` on the support of `S = Σ N†N`
/// and, when `S` is singular, adds `|m⟩⟨q| / √d_out` for every kernel vector `q`
/// (a trace-and-replace completion onto `I/d_out`).
pub fn repair_completeness(ch: &KrausChannel) -> Result<KrausChannel> {
    let s = ch.completeness();
    let eig = s.eigh()?;
    let smax = eig.values[0];
    if smax <= 0.0 {
        return Err(QpdError::DomainError("every Kraus operator vanishes".into()));
    }
    let cutoff = Tolerances::default().kraus_cutoff * smax;
    let (din, dout) = (ch.dim_in(), ch.dim_out());
    let mut inv_sqrt = ComplexMatrix::zeros(din, din);
    let mut kernel = Vec::new();
    for (k, &l) in eig.values.iter().enumerate() {
        let q = eig.vectors.column(k);
        if l > cutoff {
            inv_sqrt = &inv_sqrt + &ComplexMatrix::outer(&q).scale_real(1.0 / l.sqrt());
        } else {
            kernel.push(q);
        }
    }
    let mut ops: Vec<ComplexMatrix> = ch.kraus().iter().map(|k| k * &inv_sqrt).collect();
    let w = 1.0 / (dout as f64).sqrt();
    for q in &kernel {
        for m in 0..dout {
            let qc: Vec<C64> = q.iter().map(|z| z.conj()).collect();
            ops.push(ComplexMatrix::from_fn(dout, din, |r, col| if r == m { qc[col] * w } else { c(0.0) }));
        }
    }
    let name = format!("{} (repaired)", ch.name().unwrap_or("channel"));
    Ok(KrausChannel::new(din, dout, ops)?.named(name))
}

// ------------------------------------------------------------ assemblies

/// The four-level flagged construction assembled end to end.
#[derive(Debug, Clone)]
pub struct FlaggedAssembly {
    pub x: f64,
    pub reference: ReplaceState,
    /// Repaired four-level environment-side map (4→4).
    pub m_ae: KrausChannel,
    /// Its complement (4→6), used as the output-side branch.
    pub m_ab: KrausChannel,
    /// Flagged output channel (4→12).
    pub n_ab: KrausChannel,
    /// Environment composite `x ρ ⊕ (1-x) m_ae(ρ)` (4→8).
    pub n_ae: KrausChannel,
    /// Repaired environment degrading map (8→2).
    pub d_e_to_eprime: KrausChannel,
}

impl FlaggedAssembly {
    pub fn new(x: f64, a1: f64, a2: f64, reference: ReplaceState) -> Result<Self> {
        let m_ae = repair_completeness(&m_ae_channel())?;
        let m_ab = m_ae.complementary()?.named("m_ab");
        let n_ab = nab_ae_channel(x, &m_ab, reference)?;
        let n_ae = composite_complementary(x, &m_ae)?;
        let d_e_to_eprime = repair_completeness(&d_e_to_eprime(a1, a2)?)?;
        Ok(Self { x, reference, m_ae, m_ab, n_ab, n_ae, d_e_to_eprime })
    }

    /// `d_e_to_eprime` on the Kraus-index environment of `n_ab`.
    ///
    /// With the ground reference the computed complementary channel coincides
    /// with `n_ae` and the map applies unchanged. The mixed reference has a
    /// larger environment with no printed map, so this returns `None`.
    pub fn environment_map(&self) -> Option<KrausChannel> {
        (self.reference == ReplaceState::Ground).then(|| self.d_e_to_eprime.clone())
    }
}

// --------------------------------------------------------------- registry

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntryStatus {
    Complete,
    Flagged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Transcribed operator by operator from a printed Kraus set.
    Verbatim,
    /// Built from a printed formula given in another form (mixture, state, ...).
    Derived,
    /// Verbatim set passed through [`repair_completeness`].
    Repaired,
    /// Standard calibration channel.
    Baseline,
}

/// Builder parameters; unused fields are ignored by a given entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZooParams {
    pub alpha: f64,
    pub x: f64,
    pub a1: f64,
    pub a2: f64,
    pub n2: u32,
    pub n3: u32,
    pub p: f64,
    pub gamma: f64,
    pub d: usize,
    pub reference: ReplaceState,
    pub repair: bool,
}

impl Default for ZooParams {
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            alpha: 3.5,
            x: 0.75,
            a1: h,
            a2: h,
            n2: 1,
            n3: 2,
            p: 0.25,
            gamma: 0.2,
            d: 2,
            reference: ReplaceState::MaximallyMixed,
            repair: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub id: String,
    pub params: BTreeMap<String, String>,
    pub channel: KrausChannel,
    pub validation: ValidationReport,
    pub source: Source,
    pub status: EntryStatus,
    pub description: &'static str,
}

pub struct CatalogItem {
    pub id: &'static str,
    pub params: &'static [&'static str],
    pub description: &'static str,
    /// True when the entry transcribes a printed Kraus set.
    pub printed_kraus: bool,
}

pub const CATALOG: &[CatalogItem] = &[
    CatalogItem { id: "identity", params: &["d"], description: "identity channel", printed_kraus: false },
    CatalogItem { id: "erasure", params: &["p", "d"], description: "erasure channel, flag on the last level", printed_kraus: false },
    CatalogItem { id: "depolarizing", params: &["p", "d"], description: "depolarizing channel (Weyl Kraus form)", printed_kraus: false },
    CatalogItem { id: "amplitude_damping", params: &["gamma"], description: "qubit amplitude damping", printed_kraus: false },
    CatalogItem { id: "dephasing", params: &["p"], description: "qubit dephasing", printed_kraus: false },
    CatalogItem { id: "horodecki", params: &["alpha"], description: "qutrit entanglement-binding channel of the Horodecki family", printed_kraus: false },
    CatalogItem { id: "m_ae", params: &[], description: "four-level entanglement-binding map, six printed Pauli-block operators", printed_kraus: true },
    CatalogItem { id: "m_ab", params: &[], description: "complement of the repaired m_ae (4->6)", printed_kraus: false },
    CatalogItem { id: "composite_complementary", params: &["x"], description: "flagged environment composite x*rho + (1-x)*m_ae(rho) (4->8)", printed_kraus: false },
    CatalogItem { id: "nab_ae", params: &["x", "reference"], description: "flagged output channel x*Tr(rho)*pi + (1-x)*m_ab(rho) (4->12)", printed_kraus: false },
    CatalogItem { id: "d_e_to_b", params: &["x"], description: "printed environment-to-output degrading set (8->12)", printed_kraus: true },
    CatalogItem { id: "d_e_to_eprime", params: &["a1", "a2"], description: "printed 2x8 environment degrading pair (8->2)", printed_kraus: true },
    CatalogItem { id: "d_b_to_eprime", params: &["x", "a1", "a2"], description: "printed output-to-degraded-environment set (12->2)", printed_kraus: true },
    CatalogItem { id: "symmetric_pd", params: &[], description: "output marginal of a symmetric-subspace isometry (4->8)", printed_kraus: false },
    CatalogItem { id: "symmetric_pd_env", params: &[], description: "environment marginal of the same isometry (4->8)", printed_kraus: false },
    CatalogItem { id: "corollary4_degrading", params: &["n2", "n3"], description: "qutrit degrading map with gamma/kappa projectors", printed_kraus: true },
    CatalogItem { id: "corollary4_rank_one", params: &["n2", "n3"], description: "qutrit channel of six rank-one operators", printed_kraus: true },
];

fn fmt_params(p: &ZooParams, names: &[&str]) -> BTreeMap<String, String> {
    names
        .iter()
        .map(|&n| {
            let v = match n {
                "alpha" => p.alpha.to_string(),
                "x" => p.x.to_string(),
                "a1" => p.a1.to_string(),
                "a2" => p.a2.to_string(),
                "n2" => p.n2.to_string(),
                "n3" => p.n3.to_string(),
                "p" => p.p.to_string(),
                "gamma" => p.gamma.to_string(),
                "d" => p.d.to_string(),
                "reference" => match p.reference {
                    ReplaceState::MaximallyMixed => "mixed".into(),
                    ReplaceState::Ground => "ground".into(),
                },
                _ => unreachable!("unknown parameter {n}"),
            };
            (n.to_string(), v)
        })
        .collect()
}

/// Builds a catalog entry by id.
pub fn build(id: &str, p: &ZooParams) -> Result<ZooEntry> {
    let item = CATALOG
        .iter()
        .find(|i| i.id == id)
        .ok_or_else(|| QpdError::DomainError(format!("unknown zoo id '{id}'")))?;
    let n_vec = [0, p.n2, p.n3];
    let repaired_m_ab = || -> Result<KrausChannel> { repair_completeness(&m_ae_channel())?.complementary() };
    let mut channel = match id {
        "identity" => KrausChannel::identity(p.d),
        "erasure" => erasure(p.p, p.d)?,
        "depolarizing" => depolarizing(p.p, p.d)?,
        "amplitude_damping" => amplitude_damping(p.gamma)?,
        "dephasing" => dephasing(p.p)?,
        "horodecki" => horodecki_channel(p.alpha)?,
        "m_ae" => m_ae_channel(),
        "m_ab" => repaired_m_ab()?.named("m_ab"),
        "composite_complementary" => composite_complementary(p.x, &repair_completeness(&m_ae_channel())?)?,
        "nab_ae" => nab_ae_channel(p.x, &repaired_m_ab()?, p.reference)?,
        "d_e_to_b" => d_e_to_b(p.x, &repaired_m_ab()?)?,
        "d_e_to_eprime" => d_e_to_eprime(p.a1, p.a2)?,
        "d_b_to_eprime" => d_b_to_eprime(p.x, &d_e_to_eprime(p.a1, p.a2)?)?,
        "symmetric_pd" => symmetric_pd_channel().0,
        "symmetric_pd_env" => symmetric_pd_channel().1,
        "corollary4_degrading" => corollary4_degrading_map(n_vec)?,
        "corollary4_rank_one" => corollary4_rank_one_channel(n_vec)?,
        _ => unreachable!("catalog and builder disagree on '{id}'"),
    };
    let mut source = if item.printed_kraus {
        Source::Verbatim
    } else if matches!(id, "identity" | "erasure" | "depolarizing" | "amplitude_damping" | "dephasing") {
        Source::Baseline
    } else {
        Source::Derived
    };
    if p.repair && channel.tp_residual() > Tolerances::default().residual_tol {
        channel = repair_completeness(&channel)?;
        source = Source::Repaired;
    }
    let validation = channel.validate()?;
    let status = if validation.is_tp(&Tolerances::default()) { EntryStatus::Complete } else { EntryStatus::Flagged };
    Ok(ZooEntry {
        id: id.to_string(),
        params: fmt_params(p, item.params),
        channel,
        validation,
        source,
        status,
        description: item.description,
    })
}
