//! Coherent information, its PD decomposition, and single-letter maximization.

use crate::channel::{KrausChannel, StinespringIsometry};
use crate::config::Tolerances;
use crate::entanglement::{entropy_of, entropy_of_spectrum, DensityMatrix};
use crate::error::{dim_mismatch, QpdError, Result};
use crate::qmat::{apply_to_factor, kron, pure_marginal, ComplexMatrix};
use crate::random::{ginibre, seeded};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

/// `H(N(ρ)) - H(N^c(ρ))` in bits.
pub fn coherent_information(ch: &KrausChannel, rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != ch.dim_in() {
        return Err(dim_mismatch(format!("state side {} vs channel input {}", rho.dim(), ch.dim_in())));
    }
    let env = ch.complementary()?;
    icoh(ch, &env, rho.mat())
}

fn icoh(ch: &KrausChannel, env: &KrausChannel, rho: &ComplexMatrix) -> Result<f64> {
    Ok(entropy_of(&ch.apply_matrix(rho)?.hermitian_part())? - entropy_of(&env.apply_matrix(rho)?.hermitian_part())?)
}

/// Purification `|φ⟩_{AR}` with amplitudes `√ρ`, flattened with `A` slow.
fn purification(rho: &ComplexMatrix) -> Result<Vec<C64>> {
    let eig = rho.eigh()?;
    let d = rho.rows();
    let mut sqrt = ComplexMatrix::zeros(d, d);
    for (k, &l) in eig.values.iter().enumerate() {
        if l > 0.0 {
            let v = eig.vectors.column(k);
            sqrt = &sqrt + &ComplexMatrix::outer(&v).scale_real(l.sqrt());
        }
    }
    Ok(sqrt.data().to_vec())
}

/// Coherent information from the marginals of `(V ⊗ I_R)|φ⟩_{AR}`.
pub fn coherent_information_stinespring(ch: &KrausChannel, rho: &DensityMatrix) -> Result<f64> {
    let iso = ch.stinespring()?;
    let d = ch.dim_in();
    if rho.dim() != d {
        return Err(dim_mismatch("state side differs from channel input"));
    }
    let phi = purification(rho.mat())?;
    let (psi, _) = apply_to_factor(&phi, &[d, d], 0, &iso.v)?;
    let dims = [iso.dim_out, iso.dim_env, d];
    Ok(entropy_of(&pure_marginal(&psi, &dims, &[0])?)? - entropy_of(&pure_marginal(&psi, &dims, &[1])?)?)
}

/// Stinespring isometries of a channel and its two degrading maps.
#[derive(Debug, Clone)]
pub struct PdIsometries {
    /// `A → B E`, the channel.
    pub u: StinespringIsometry,
    /// `E → G H`, the map `E → E′` (its output is named `G`).
    pub v: StinespringIsometry,
    /// `B → E′ F`, the map `B → E′`.
    pub w: StinespringIsometry,
}

impl PdIsometries {
    /// Dilates `ch`, its `E → E′` map and its `B → E′` map. The environment of
    /// `ch` is the Kraus-index basis of [`KrausChannel::complementary`].
    pub fn new(ch: &KrausChannel, d_e_to_eprime: &KrausChannel, d_b_to_eprime: &KrausChannel) -> Result<Self> {
        Self::from_isometries(ch.stinespring()?, d_e_to_eprime.stinespring()?, d_b_to_eprime.stinespring()?)
    }

    pub fn from_isometries(u: StinespringIsometry, v: StinespringIsometry, w: StinespringIsometry) -> Result<Self> {
        if u.dim_env != v.dim_in || u.dim_out != w.dim_in {
            return Err(dim_mismatch(format!(
                "isometry chain: env {} vs {}, output {} vs {}",
                u.dim_env, v.dim_in, u.dim_out, w.dim_in
            )));
        }
        if v.dim_out != w.dim_out {
            return Err(dim_mismatch("the two degrading maps land in different E′ dimensions"));
        }
        let tol = Tolerances::default().residual_tol;
        for (name, iso) in [("U", &u), ("V", &v), ("W", &w)] {
            let r = iso.isometry_residual();
            if r > tol {
                return Err(QpdError::DomainError(format!("{name} is not an isometry (residual {r:e})")));
            }
        }
        Ok(Self { u, v, w })
    }
}

/// Entropy expressions on `|ψ⟩_{E′ F G H R}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdEntropies {
    /// `H(E′F) - H(E′)` on the output branch.
    pub h_f_given_eprime: f64,
    /// `H(GH) - H(G)` on the environment branch.
    pub h_h_given_g: f64,
    /// `H(B) - H(G)`: output entropy minus the degraded-environment entropy.
    pub h_b_minus_h_eprime: f64,
    /// `H(RFE′) - H(E′)`.
    pub h_rf_given_eprime: f64,
}

/// Pushes the purification of `ρ` through `U`, then `V` on `E` and `W` on `B`.
pub fn coherent_information_pd(iso: &PdIsometries, rho: &DensityMatrix) -> Result<PdEntropies> {
    let d = iso.u.dim_in;
    if rho.dim() != d {
        return Err(dim_mismatch("state side differs from channel input"));
    }
    let phi = purification(rho.mat())?;
    let (db, de) = (iso.u.dim_out, iso.u.dim_env);
    let (dg, dh) = (iso.v.dim_out, iso.v.dim_env);
    let (dep, df) = (iso.w.dim_out, iso.w.dim_env);
    let (psi, _) = apply_to_factor(&phi, &[d, d], 0, &iso.u.v)?;
    let (psi, _) = apply_to_factor(&psi, &[db, de, d], 1, &iso.v.v)?;
    let (psi, _) = apply_to_factor(&psi, &[db, dg * dh, d], 0, &iso.w.v)?;
    // factors: E′ F G H R
    let dims = [dep, df, dg, dh, d];
    let h = |keep: &[usize]| -> Result<f64> { entropy_of(&pure_marginal(&psi, &dims, keep)?.hermitian_part()) };
    let h_ep = h(&[0])?;
    let h_epf = h(&[0, 1])?;
    let h_g = h(&[2])?;
    let h_gh = h(&[2, 3])?;
    Ok(PdEntropies {
        h_f_given_eprime: h_epf - h_ep,
        h_h_given_g: h_gh - h_g,
        h_b_minus_h_eprime: h_epf - h_g,
        h_rf_given_eprime: h_gh - h_ep,
    })
}

// ------------------------------------------------------------ optimizer

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Agreement needed between the two best restarts to report convergence.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { restarts: 32, max_iters: 400, tol: 1e-6, seed: 42 }
    }
}

#[derive(Debug, Clone)]
pub struct CoherentInfoResult {
    pub value: f64,
    pub argmax_state: DensityMatrix,
    pub restarts_used: usize,
    pub converged: bool,
    pub per_restart_values: Vec<f64>,
}

/// Largest input side accepted by the optimizer.
pub const MAX_OPT_DIM: usize = 16;

struct Objective<'a> {
    ch: &'a KrausChannel,
    env: KrausChannel,
}

impl Objective<'_> {
    fn state(l: &ComplexMatrix) -> ComplexMatrix {
        let m = l * &l.adjoint();
        let t = m.trace().re;
        m.scale_real(1.0 / t).hermitian_part()
    }

    fn value(&self, l: &ComplexMatrix) -> Result<f64> {
        icoh(self.ch, &self.env, &Self::state(l))
    }

    /// `(value, ∂f/∂Re L + i ∂f/∂Im L)` restricted to the lower triangle.
    fn value_and_gradient(&self, l: &ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
        let m = l * &l.adjoint();
        let t = m.trace().re;
        let rho = m.scale_real(1.0 / t).hermitian_part();
        let (hb, log_b) = entropy_and_log(&self.ch.apply_matrix(&rho)?)?;
        let (he, log_e) = entropy_and_log(&self.env.apply_matrix(&rho)?)?;
        let g = &self.env.apply_adjoint(&log_e)? - &self.ch.apply_adjoint(&log_b)?;
        let shift = (&g * &rho).trace().re;
        let g = &g - &ComplexMatrix::identity(rho.rows()).scale_real(shift);
        let grad = (&g * l).scale_real(2.0 / t);
        Ok((hb - he, lower(&grad)))
    }
}

fn lower(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| if j <= i { m[(i, j)] } else { C64::new(0.0, 0.0) })
}

/// Entropy in bits and `log₂ σ` with eigenvalues clamped at `1e-15`.
fn entropy_and_log(sigma: &ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
    let eig = sigma.hermitian_part().eigh()?;
    let n = sigma.rows();
    let mut log = ComplexMatrix::zeros(n, n);
    for (k, &l) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        log = &log + &ComplexMatrix::outer(&v).scale_real(l.max(1e-15).log2());
    }
    Ok((entropy_of_spectrum(&eig.values), log))
}

/// Central finite-difference gradient of the coherent information in the
/// lower-triangular parameterization `ρ = LL†/Tr(LL†)`.
pub fn fd_gradient(ch: &KrausChannel, l: &ComplexMatrix, step: f64) -> Result<ComplexMatrix> {
    let obj = Objective { ch, env: ch.complementary()? };
    let n = l.rows();
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut part = [0.0; 2];
            for (slot, dir) in [C64::new(step, 0.0), C64::new(0.0, step)].into_iter().enumerate() {
                let mut lp = l.clone();
                lp[(i, j)] += dir;
                let mut lm = l.clone();
                lm[(i, j)] -= dir;
                part[slot] = (obj.value(&lp)? - obj.value(&lm)?) / (2.0 * step);
            }
            g[(i, j)] = C64::new(part[0], part[1]);
        }
    }
    Ok(g)
}

/// Analytic gradient in the same convention as [`fd_gradient`].
pub fn analytic_gradient(ch: &KrausChannel, l: &ComplexMatrix) -> Result<ComplexMatrix> {
    let obj = Objective { ch, env: ch.complementary()? };
    Ok(obj.value_and_gradient(l)?.1)
}

/// Lower-triangular `L` with `LL† = ρ + εI`.
fn cholesky_lower(rho: &ComplexMatrix, eps: f64) -> ComplexMatrix {
    let n = rho.rows();
    let a = &rho.hermitian_part() + &ComplexMatrix::identity(n).scale_real(eps);
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        let djj = d.max(eps).sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    l
}

fn starting_point(d: usize, restart: usize, seed: u64) -> ComplexMatrix {
    if restart == 0 {
        return ComplexMatrix::identity(d);
    }
    if restart <= d {
        let mut l = ComplexMatrix::identity(d).scale_real(1e-3);
        l[(restart - 1, restart - 1)] = C64::new(1.0, 0.0);
        return l;
    }
    let mut rng = seeded(seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    lower(&ginibre(&mut rng, d, d))
}

fn ascend(obj: &Objective, mut l: ComplexMatrix, max_iters: usize) -> Result<(f64, ComplexMatrix)> {
    let (mut f, mut g) = obj.value_and_gradient(&l)?;
    let mut eta = 1.0;
    for _ in 0..max_iters {
        let gn2: f64 = g.data().iter().map(|z| z.norm_sqr()).sum();
        if gn2 < 1e-22 {
            break;
        }
        let mut accepted = false;
        eta *= 2.0;
        while eta > 1e-14 {
            let cand = &l + &g.scale_real(eta);
            let fc = obj.value(&cand)?;
            if fc >= f + 1e-4 * eta * gn2 {
                let norm = cand.frobenius_norm();
                l = cand.scale_real(1.0 / norm);
                // rescaling L leaves ρ unchanged but keeps step sizes comparable
                eta *= norm * norm;
                accepted = true;
                let improvement = fc - f;
                let (fv, gv) = obj.value_and_gradient(&l)?;
                f = fv;
                g = gv;
                if improvement < 1e-13 {
                    return Ok((f, l));
                }
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok((f, l))
}

/// Multi-start gradient ascent of `I_coh(N, ρ)` over density matrices.
///
/// Restart 0 is `I/d`, restarts `1..=d` sit near the basis states, the rest
/// are seeded random. Restarts run in parallel; ties go to the lowest index.
pub fn maximize_coherent_information(ch: &KrausChannel, opts: &OptimizeOptions) -> Result<CoherentInfoResult> {
    maximize_with_starts(ch, opts, &[])
}

fn maximize_with_starts(ch: &KrausChannel, opts: &OptimizeOptions, extra: &[ComplexMatrix]) -> Result<CoherentInfoResult> {
    let d = ch.dim_in();
    if d > MAX_OPT_DIM {
        return Err(QpdError::SizeLimit { side: d, limit: MAX_OPT_DIM });
    }
    let obj = Objective { ch, env: ch.complementary()? };
    let restarts = opts.restarts.max(1);
    let starts: Vec<ComplexMatrix> = (0..restarts)
        .map(|r| starting_point(d, r, opts.seed))
        .chain(extra.iter().cloned())
        .collect();
    let runs: Vec<(f64, ComplexMatrix)> = starts
        .into_par_iter()
        .map(|l0| ascend(&obj, l0, opts.max_iters))
        .collect::<Result<_>>()?;
    let per_restart_values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let mut best = 0;
    for (i, &v) in per_restart_values.iter().enumerate() {
        if v > per_restart_values[best] {
            best = i;
        }
    }
    let mut sorted = per_restart_values.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let converged = sorted.len() < 2 || sorted[0] - sorted[1] <= opts.tol;
    let rho = Objective::state(&runs[best].1);
    Ok(CoherentInfoResult {
        value: per_restart_values[best],
        argmax_state: DensityMatrix::trusted(rho, vec![d]),
        restarts_used: per_restart_values.len(),
        converged,
        per_restart_values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdditivityProbe {
    pub single: f64,
    pub joint: f64,
    /// `joint - n · single`.
    pub gap: f64,
}

/// Compares the optimum over `N^{⊗n}` with `n` times the single-copy optimum.
///
/// The joint search includes the product of the single-copy optimizers as an
/// extra start, so the gap is bounded below by the optimizer tolerance.
pub fn additivity_probe(ch: &KrausChannel, n: usize, opts: &OptimizeOptions) -> Result<AdditivityProbe> {
    if n != 2 {
        return Err(QpdError::Unsupported(format!("additivity probe supports n = 2, got {n}")));
    }
    let d = ch.dim_in();
    if d * d > MAX_OPT_DIM {
        return Err(QpdError::SizeLimit { side: d * d, limit: MAX_OPT_DIM });
    }
    let single = maximize_coherent_information(ch, opts)?;
    let joint_ch = KrausChannel::tensor(ch, ch)?;
    let prod = kron(single.argmax_state.mat(), single.argmax_state.mat())?;
    let joint = maximize_with_starts(&joint_ch, opts, &[cholesky_lower(&prod, 1e-12)])?;
    Ok(AdditivityProbe { single: single.value, joint: joint.value, gap: joint.value - n as f64 * single.value })
}

/// `H(AB) + H(BC) - H(ABC) - H(B)` for a three-factor state.
pub fn ssa_check(rho: &DensityMatrix) -> Result<f64> {
    let dims = rho.dims();
    if dims.len() != 3 {
        return Err(dim_mismatch(format!("strong subadditivity needs three factors, got {dims:?}")));
    }
    let m = rho.mat();
    let h = |keep: &[usize]| -> Result<f64> { entropy_of(&m.partial_trace(dims, keep)?) };
    Ok(h(&[0, 1])? + h(&[1, 2])? - entropy_of(m)? - h(&[1])?)
}
