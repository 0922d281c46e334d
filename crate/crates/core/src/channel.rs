//! Quantum channels in Kraus form and their Choi / Stinespring / complementary views.

use crate::config::Tolerances;
use crate::entanglement::DensityMatrix;
use crate::error::{dim_mismatch, QpdError, Result};
use crate::qmat::{check_side, kron, ComplexMatrix};
use num_complex::Complex64 as C64;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    name: Option<String>,
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    /// `max |Σ N†N - I|`.
    pub tp_residual: f64,
    /// Always true: a Kraus form is completely positive by construction.
    pub cp_ok: bool,
    pub choi_min_eig: f64,
    pub kraus_count: usize,
}

impl ValidationReport {
    pub fn is_tp(&self, tol: &Tolerances) -> bool {
        self.tp_residual <= tol.residual_tol
    }
}

/// Trace-1 Choi state `(I ⊗ N)|Ψ⟩⟨Ψ|`, input factor first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub matrix: ComplexMatrix,
    pub dim_in: usize,
    pub dim_out: usize,
}

impl ChoiMatrix {
    /// Eigenvalues above `cutoff · λ_max`.
    pub fn rank(&self, cutoff: f64) -> Result<usize> {
        let ev = self.matrix.eigvalsh()?;
        let lmax = ev[0];
        if lmax <= 0.0 {
            return Ok(0);
        }
        Ok(ev.iter().filter(|&&l| l > cutoff * lmax).count())
    }

    pub fn min_eig(&self) -> Result<f64> {
        Ok(*self.matrix.eigvalsh()?.last().expect("non-empty"))
    }
}

/// `V = Σ N_i ⊗ |i⟩_E`, output factor slow and environment fast.
#[derive(Debug, Clone, PartialEq)]
pub struct StinespringIsometry {
    pub v: ComplexMatrix,
    pub dim_in: usize,
    pub dim_out: usize,
    pub dim_env: usize,
}

impl StinespringIsometry {
    /// `max |V†V - I|`.
    pub fn isometry_residual(&self) -> f64 {
        (&self.v.adjoint() * &self.v).max_diff(&ComplexMatrix::identity(self.dim_in))
    }
}

/// Reference state substituted by the trace branch of [`KrausChannel::flagged_direct_sum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplaceState {
    /// `I/k` on the `k`-dimensional block.
    MaximallyMixed,
    /// `|0⟩⟨0|` on the block.
    Ground,
}

impl KrausChannel {
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(dim_mismatch("a channel needs at least one Kraus operator"));
        }
        if dim_in == 0 || dim_out == 0 {
            return Err(dim_mismatch("channel dimensions must be positive"));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.shape() != (dim_out, dim_in) {
                return Err(dim_mismatch(format!(
                    "Kraus operator {i} is {}x{}, expected {dim_out}x{dim_in}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        Ok(Self { name: None, dim_in, dim_out, kraus })
    }

    /// Infers dimensions from the first operator.
    pub fn from_kraus(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let (r, c) = kraus.first().ok_or_else(|| dim_mismatch("no Kraus operators"))?.shape();
        Self::new(c, r, kraus)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn identity(d: usize) -> Self {
        Self::new(d, d, vec![ComplexMatrix::identity(d)]).expect("identity is well formed").named(format!("identity_{d}"))
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::from_kraus(vec![u])
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `Σ N_i† N_i`.
    pub fn completeness(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            s = &s + &(&k.adjoint() * k);
        }
        s
    }

    pub fn tp_residual(&self) -> f64 {
        self.completeness().max_diff(&ComplexMatrix::identity(self.dim_in))
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        Ok(ValidationReport {
            tp_residual: self.tp_residual(),
            cp_ok: true,
            choi_min_eig: self.to_choi()?.min_eig()?,
            kraus_count: self.kraus.len(),
        })
    }

    fn require_tp(&self) -> Result<()> {
        let r = self.tp_residual();
        if r > Tolerances::default().residual_tol {
            return Err(QpdError::NotTracePreserving(r));
        }
        Ok(())
    }

    /// `Σ N_i X N_i†` for any `dim_in x dim_in` matrix.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(dim_mismatch(format!(
                "input is {}x{}, channel expects side {}",
                x.rows(),
                x.cols(),
                self.dim_in
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = &out + &(&(k * x) * &k.adjoint());
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_matrix(rho.mat())?.hermitian_part();
        Ok(DensityMatrix::trusted(out, vec![self.dim_out]))
    }

    /// Heisenberg-picture adjoint `Σ N_i† Y N_i`.
    pub fn apply_adjoint(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if y.shape() != (self.dim_out, self.dim_out) {
            return Err(dim_mismatch("adjoint map input has the wrong side"));
        }
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out = &out + &(&(&k.adjoint() * y) * k);
        }
        Ok(out)
    }

    pub fn stinespring(&self) -> Result<StinespringIsometry> {
        self.require_tp()?;
        Ok(self.stinespring_unchecked())
    }

    pub(crate) fn stinespring_unchecked(&self) -> StinespringIsometry {
        let de = self.kraus.len();
        let mut v = ComplexMatrix::zeros(self.dim_out * de, self.dim_in);
        for (i, k) in self.kraus.iter().enumerate() {
            for b in 0..self.dim_out {
                for a in 0..self.dim_in {
                    v[(b * de + i, a)] = k[(b, a)];
                }
            }
        }
        StinespringIsometry { v, dim_in: self.dim_in, dim_out: self.dim_out, dim_env: de }
    }

    /// Channel to the environment, environment basis = Kraus index basis.
    ///
    /// Its Kraus operators are `(M_b)[i, a] = (N_i)[b, a]`, so the output is
    /// `Σ_ij Tr(N_i ρ N_j†) |i⟩⟨j|`.
    pub fn complementary(&self) -> Result<KrausChannel> {
        self.require_tp()?;
        let de = self.kraus.len();
        let ops = (0..self.dim_out)
            .map(|b| ComplexMatrix::from_fn(de, self.dim_in, |i, a| self.kraus[i][(b, a)]))
            .collect();
        let mut ch = KrausChannel::new(self.dim_in, de, ops)?;
        ch.name = self.name.as_ref().map(|n| format!("{n}^c"));
        Ok(ch)
    }

    pub fn to_choi(&self) -> Result<ChoiMatrix> {
        let (da, db) = (self.dim_in, self.dim_out);
        check_side(da * db)?;
        let n = da * db;
        let mut m = ComplexMatrix::zeros(n, n);
        // Column j of each Kraus operator is N|j⟩; accumulate |i⟩⟨j| ⊗ N|i⟩⟨j|N†.
        for k in &self.kraus {
            for i in 0..da {
                for j in 0..da {
                    for b in 0..db {
                        let x = k[(b, i)];
                        if x == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for b2 in 0..db {
                            m[(i * db + b, j * db + b2)] += x * k[(b2, j)].conj();
                        }
                    }
                }
            }
        }
        Ok(ChoiMatrix { matrix: m.scale_real(1.0 / da as f64).hermitian_part(), dim_in: da, dim_out: db })
    }

    /// Kraus operators from a trace-1 Choi state (eigenvalues above `cutoff · λ_max`).
    pub fn from_choi(choi: &ChoiMatrix, cutoff: f64) -> Result<Self> {
        let (da, db) = (choi.dim_in, choi.dim_out);
        let eig = choi.matrix.eigh()?;
        let lmax = eig.values[0].max(0.0);
        let mut ops = Vec::new();
        for (k, &l) in eig.values.iter().enumerate() {
            if l <= cutoff * lmax || l <= 0.0 {
                continue;
            }
            let w = (l * da as f64).sqrt();
            let v = eig.vectors.column(k);
            ops.push(ComplexMatrix::from_fn(db, da, |b, a| v[a * db + b] * w));
        }
        if ops.is_empty() {
            ops.push(ComplexMatrix::zeros(db, da));
        }
        Self::new(da, db, ops)
    }

    /// Equivalent channel with the minimal number of Kraus operators.
    pub fn minimized(&self, cutoff: f64) -> Result<Self> {
        let mut ch = Self::from_choi(&self.to_choi()?, cutoff)?;
        ch.name = self.name.clone();
        Ok(ch)
    }

    /// `then ∘ first`: applies `first`, then `then`.
    pub fn compose(first: &KrausChannel, then: &KrausChannel) -> Result<KrausChannel> {
        if first.dim_out != then.dim_in {
            return Err(dim_mismatch(format!(
                "compose: first outputs side {}, then expects {}",
                first.dim_out, then.dim_in
            )));
        }
        let prune = Tolerances::default().prune_norm;
        let mut ops = Vec::with_capacity(first.kraus.len() * then.kraus.len());
        for n in &first.kraus {
            for m in &then.kraus {
                let p = m * n;
                if p.frobenius_norm() >= prune {
                    ops.push(p);
                }
            }
        }
        if ops.is_empty() {
            ops.push(ComplexMatrix::zeros(then.dim_out, first.dim_in));
        }
        let mut ch = KrausChannel::new(first.dim_in, then.dim_out, ops)?;
        if let (Some(a), Some(b)) = (&first.name, &then.name) {
            ch.name = Some(format!("{a};{b}"));
        }
        Ok(ch)
    }

    /// `a ⊗ b` with Kraus set `{A_i ⊗ B_j}`.
    pub fn tensor(a: &KrausChannel, b: &KrausChannel) -> Result<KrausChannel> {
        check_side((a.dim_in * b.dim_in).max(a.dim_out * b.dim_out))?;
        let prune = Tolerances::default().prune_norm;
        let mut ops = Vec::with_capacity(a.kraus.len() * b.kraus.len());
        for x in &a.kraus {
            for y in &b.kraus {
                let p = kron(x, y)?;
                if p.frobenius_norm() >= prune {
                    ops.push(p);
                }
            }
        }
        let mut ch = KrausChannel::new(a.dim_in * b.dim_in, a.dim_out * b.dim_out, ops)?;
        if let (Some(x), Some(y)) = (&a.name, &b.name) {
            ch.name = Some(format!("{x}(x){y}"));
        }
        Ok(ch)
    }

    /// Entrywise complex conjugate of every Kraus operator.
    pub fn conjugate(&self) -> KrausChannel {
        KrausChannel {
            name: self.name.as_ref().map(|n| format!("conj({n})")),
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus: self.kraus.iter().map(ComplexMatrix::conj).collect(),
        }
    }

    /// Same channel with Kraus set `{Σ_j u_ij N_j}` for a unitary `u`.
    pub fn rotate_kraus(&self, u: &ComplexMatrix) -> Result<KrausChannel> {
        let n = self.kraus.len();
        if u.shape() != (n, n) {
            return Err(dim_mismatch("rotation must be square in the Kraus count"));
        }
        let ops = (0..n)
            .map(|i| {
                let mut acc = ComplexMatrix::zeros(self.dim_out, self.dim_in);
                for (j, k) in self.kraus.iter().enumerate() {
                    acc = &acc + &k.scale(u[(i, j)]);
                }
                acc
            })
            .collect();
        Ok(KrausChannel { name: self.name.clone(), dim_in: self.dim_in, dim_out: self.dim_out, kraus: ops })
    }

    /// `ρ ↦ x |0⟩⟨0| ⊗ Tr(ρ) π  ⊕  (1 - x) |1⟩⟨1| ⊗ inner(ρ)` on a flag qubit ⊗ block layout.
    ///
    /// The block has side `inner.dim_out()`; `π` is chosen by `reference`.
    pub fn flagged_direct_sum(x: f64, inner: &KrausChannel, reference: ReplaceState) -> Result<KrausChannel> {
        if !(0.0..=1.0).contains(&x) {
            return Err(QpdError::DomainError(format!("flag probability {x} outside [0, 1]")));
        }
        let (da, k) = (inner.dim_in, inner.dim_out);
        let mut ops = Vec::new();
        if x > 0.0 {
            match reference {
                ReplaceState::MaximallyMixed => {
                    let w = (x / k as f64).sqrt();
                    for m in 0..k {
                        for a in 0..da {
                            ops.push(ComplexMatrix::unit(2 * k, da, m, a).scale_real(w));
                        }
                    }
                }
                ReplaceState::Ground => {
                    for a in 0..da {
                        ops.push(ComplexMatrix::unit(2 * k, da, 0, a).scale_real(x.sqrt()));
                    }
                }
            }
        }
        if x < 1.0 {
            let w = (1.0 - x).sqrt();
            for n in &inner.kraus {
                ops.push(ComplexMatrix::from_fn(2 * k, da, |r, c| if r >= k { n[(r - k, c)] * w } else { C64::new(0.0, 0.0) }));
            }
        }
        KrausChannel::new(da, 2 * k, ops)
    }
}

/// Informationally complete set of pure probe states spanning all `d x d` matrices:
/// `|i⟩⟨i|`, and `(|i⟩ + |j⟩)/√2`, `(|i⟩ + i|j⟩)/√2` for `i < j`.
pub fn probe_states(d: usize) -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(ComplexMatrix::unit(d, d, i, i));
    }
    for i in 0..d {
        for j in i + 1..d {
            for phase in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                let mut v = vec![C64::new(0.0, 0.0); d];
                v[i] = C64::new(s, 0.0);
                v[j] = phase * s;
                out.push(ComplexMatrix::outer(&v));
            }
        }
    }
    out
}

/// Largest entrywise output difference of two channels over [`probe_states`].
pub fn action_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    if a.dim_in != b.dim_in || a.dim_out != b.dim_out {
        return Err(dim_mismatch("channels have different dimensions"));
    }
    let mut worst: f64 = 0.0;
    for p in probe_states(a.dim_in) {
        worst = worst.max(a.apply_matrix(&p)?.max_diff(&b.apply_matrix(&p)?));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::entropy_of;
    use crate::qmat::pauli;
    use crate::random::{random_density, random_isometry, random_unitary, seeded};
    use crate::zoo;

    fn phase_flip(p: f64) -> KrausChannel {
        KrausChannel::from_kraus(vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            pauli::z().scale_real(p.sqrt()),
        ])
        .unwrap()
    }

    /// Independent reference: `N(ρ) = d_A Tr_A[(ρᵀ ⊗ I) J]`.
    fn apply_via_choi(ch: &KrausChannel, rho: &ComplexMatrix) -> ComplexMatrix {
        let j = ch.to_choi().unwrap().matrix;
        let (da, db) = (ch.dim_in(), ch.dim_out());
        let lhs = kron(&rho.transpose(), &ComplexMatrix::identity(db)).unwrap();
        (&lhs * &j).partial_trace(&[da, db], &[1]).unwrap().scale_real(da as f64)
    }

    #[test]
    fn validate_examples() {
        assert_eq!(KrausChannel::identity(2).validate().unwrap().tp_residual, 0.0);
        assert!(phase_flip(0.3).validate().unwrap().tp_residual < 1e-15);
        let bad = KrausChannel::from_kraus(vec![ComplexMatrix::from_real_diag(&[1.0, 0.5])]).unwrap();
        assert!((bad.validate().unwrap().tp_residual - 0.75).abs() < 1e-15);
        assert!(KrausChannel::new(2, 2, vec![ComplexMatrix::identity(3)]).is_err());
    }

    #[test]
    fn stinespring_examples() {
        let v = KrausChannel::identity(2).stinespring().unwrap();
        assert_eq!(v.dim_env, 1);
        assert_eq!(v.v, ComplexMatrix::identity(2));
        let v = phase_flip(0.3).stinespring().unwrap();
        assert_eq!(v.v.shape(), (4, 2));
        assert!(v.isometry_residual() < 1e-15);
        let bad = KrausChannel::from_kraus(vec![ComplexMatrix::from_real_diag(&[1.0, 0.5])]).unwrap();
        assert!(matches!(bad.stinespring(), Err(QpdError::NotTracePreserving(_))));
    }

    #[test]
    fn representations_agree_on_random_inputs() {
        let mut rng = seeded(21);
        let channels = [phase_flip(0.2), zoo::amplitude_damping(0.35).unwrap(), zoo::horodecki_channel(3.5).unwrap(), zoo::erasure(0.3, 3).unwrap()];
        for ch in &channels {
            let st = ch.stinespring().unwrap();
            for _ in 0..50 {
                let rho = random_density(&mut rng, ch.dim_in(), ch.dim_in());
                let direct = ch.apply_matrix(&rho).unwrap();
                let big = &(&st.v * &rho) * &st.v.adjoint();
                let via_v = big.partial_trace(&[ch.dim_out(), st.dim_env], &[0]).unwrap();
                assert!(direct.max_diff(&via_v) < 1e-12);
                assert!(direct.max_diff(&apply_via_choi(ch, &rho)) < 1e-12);
                let env = big.partial_trace(&[ch.dim_out(), st.dim_env], &[1]).unwrap();
                assert!(env.max_diff(&ch.complementary().unwrap().apply_matrix(&rho).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn complementary_examples() {
        let u = random_unitary(&mut seeded(1), 3);
        let c = KrausChannel::unitary(u).unwrap().complementary().unwrap();
        assert_eq!(c.dim_out(), 1);
        let rho = random_density(&mut seeded(2), 3, 3);
        assert!(entropy_of(&c.apply_matrix(&rho).unwrap()).unwrap().abs() < 1e-12);

        let e = zoo::erasure(0.5, 2).unwrap();
        let ec = e.complementary().unwrap();
        assert!(ec.tp_residual() < 1e-14);
        let mut rng = seeded(3);
        for _ in 0..20 {
            let rho = random_density(&mut rng, 2, 2);
            let a = e.apply_matrix(&rho).unwrap().eigvalsh().unwrap();
            let b = ec.apply_matrix(&rho).unwrap().eigvalsh().unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn complementary_of_complementary_has_same_spectra() {
        let ch = zoo::amplitude_damping(0.3).unwrap();
        let cc = ch.complementary().unwrap().complementary().unwrap();
        let mut rng = seeded(4);
        for _ in 0..10 {
            let rho = random_density(&mut rng, 2, 2);
            let a = ch.apply_matrix(&rho).unwrap().eigvalsh().unwrap();
            let b = cc.apply_matrix(&rho).unwrap().eigvalsh().unwrap();
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
        }
    }

    #[test]
    fn choi_examples() {
        let c = KrausChannel::identity(2).to_choi().unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ComplexMatrix::outer(&[C64::new(s, 0.0), C64::default(), C64::default(), C64::new(s, 0.0)]);
        assert!(c.matrix.max_diff(&phi) < 1e-15);
        assert_eq!(c.rank(1e-10).unwrap(), 1);
        let dep = zoo::depolarizing(1.0, 2).unwrap().to_choi().unwrap();
        assert!(dep.matrix.max_diff(&ComplexMatrix::identity(4).scale_real(0.25)) < 1e-15);
        assert_eq!(dep.rank(1e-10).unwrap(), 4);
    }

    #[test]
    fn choi_marginal_is_maximally_mixed() {
        for ch in [zoo::horodecki_channel(3.2).unwrap(), zoo::amplitude_damping(0.4).unwrap()] {
            let c = ch.to_choi().unwrap();
            let m = c.matrix.partial_trace(&[c.dim_in, c.dim_out], &[0]).unwrap();
            let want = ComplexMatrix::identity(c.dim_in).scale_real(1.0 / c.dim_in as f64);
            assert!(m.max_diff(&want) < 1e-14);
        }
    }

    #[test]
    fn from_choi_round_trip_and_minimal_environment() {
        let ch = zoo::horodecki_channel(3.5).unwrap();
        let min = ch.minimized(1e-10).unwrap();
        assert!(action_distance(&ch, &min).unwrap() < 1e-12);
        let rank = ch.to_choi().unwrap().rank(1e-10).unwrap();
        assert_eq!(min.kraus().len(), rank);
        assert!(ch.dim_in() * ch.dim_out() >= rank);
    }

    #[test]
    fn compose_examples() {
        let ch = zoo::amplitude_damping(0.25).unwrap();
        let c = KrausChannel::compose(&ch, &KrausChannel::identity(2)).unwrap();
        assert!(action_distance(&c, &ch).unwrap() < 1e-15);
        let (p, q) = (0.2, 0.35);
        let pq = KrausChannel::compose(&phase_flip(p), &phase_flip(q)).unwrap();
        let want = phase_flip(p * (1.0 - q) + q * (1.0 - p));
        assert!(action_distance(&pq, &want).unwrap() < 1e-15);
        assert!(KrausChannel::compose(&ch, &KrausChannel::identity(3)).is_err());
    }

    #[test]
    fn compose_order_contract() {
        // amplitude damping then a bit flip differs from the reverse order
        let ad = zoo::amplitude_damping(1.0).unwrap();
        let x = KrausChannel::unitary(pauli::x()).unwrap();
        let first_ad = KrausChannel::compose(&ad, &x).unwrap();
        let out = first_ad.apply_matrix(&ComplexMatrix::unit(2, 2, 0, 0)).unwrap();
        assert!((out[(1, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_examples() {
        let ii = KrausChannel::tensor(&KrausChannel::identity(2), &KrausChannel::identity(2)).unwrap();
        assert!(action_distance(&ii, &KrausChannel::identity(4)).unwrap() < 1e-15);
        let n = zoo::amplitude_damping(0.3).unwrap();
        let nn = KrausChannel::tensor(&n, &n).unwrap();
        let mut rng = seeded(6);
        let r = random_density(&mut rng, 2, 2);
        let s = random_density(&mut rng, 2, 2);
        let lhs = nn.apply_matrix(&kron(&r, &s).unwrap()).unwrap();
        let rhs = kron(&n.apply_matrix(&r).unwrap(), &n.apply_matrix(&s).unwrap()).unwrap();
        assert!(lhs.max_diff(&rhs) < 1e-10);

        let single = n.to_choi().unwrap().matrix.eigvalsh().unwrap();
        let mut products: Vec<f64> = single.iter().flat_map(|a| single.iter().map(move |b| a * b)).collect();
        products.sort_by(|a, b| b.total_cmp(a));
        let joint = nn.to_choi().unwrap().matrix.eigvalsh().unwrap();
        assert!(joint.iter().zip(&products).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn conjugate_examples() {
        let real = zoo::amplitude_damping(0.3).unwrap();
        assert_eq!(real.conjugate().kraus(), real.kraus());
        let d = ComplexMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let c = KrausChannel::unitary(d).unwrap().conjugate();
        assert_eq!(c.kraus()[0][(1, 1)], C64::new(0.0, -1.0));
        let h = zoo::horodecki_channel(3.3).unwrap();
        assert_eq!(h.conjugate().conjugate().kraus(), h.kraus());
    }

    #[test]
    fn flagged_direct_sum_examples() {
        let inner = KrausChannel::from_kraus(vec![random_isometry(&mut seeded(7), 6, 4)]).unwrap();
        let one = KrausChannel::flagged_direct_sum(1.0, &inner, ReplaceState::MaximallyMixed).unwrap();
        let mut rng = seeded(8);
        let a = one.apply_matrix(&random_density(&mut rng, 4, 4)).unwrap();
        let b = one.apply_matrix(&random_density(&mut rng, 4, 4)).unwrap();
        assert!(a.max_diff(&b) < 1e-15);

        let zero = KrausChannel::flagged_direct_sum(0.0, &inner, ReplaceState::MaximallyMixed).unwrap();
        let rho = random_density(&mut rng, 4, 4);
        let out = zero.apply_matrix(&rho).unwrap();
        let want = kron(&ComplexMatrix::unit(2, 2, 1, 1), &inner.apply_matrix(&rho).unwrap()).unwrap();
        assert!(out.max_diff(&want) < 1e-15);

        for reference in [ReplaceState::MaximallyMixed, ReplaceState::Ground] {
            let mid = KrausChannel::flagged_direct_sum(0.6, &inner, reference).unwrap();
            assert_eq!((mid.dim_in(), mid.dim_out()), (4, 12));
            assert!(mid.tp_residual() < 1e-14);
        }
        assert!(KrausChannel::flagged_direct_sum(1.2, &inner, ReplaceState::Ground).is_err());
    }

    #[test]
    fn probe_states_span_the_matrix_space() {
        let probes = probe_states(3);
        assert_eq!(probes.len(), 9);
        let rows: Vec<C64> = probes.iter().flat_map(|p| p.vec_col()).collect();
        let m = ComplexMatrix::new(9, 9, rows).unwrap();
        assert_eq!(m.rank(1e-10), 9);
    }
}
