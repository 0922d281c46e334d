//! Density matrices, entropies, PPT/realignment witnesses and
//! entanglement-breaking verdicts.

use crate::channel::KrausChannel;
use crate::config::Tolerances;
use crate::error::{dim_mismatch, QpdError, Result};
use crate::qmat::{kron, ComplexMatrix};
use num_complex::Complex64 as C64;
use serde::Serialize;

/// Hermitian, positive semidefinite, unit-trace matrix with a tensor-factor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::with_tolerances(mat, dims, &Tolerances::default())
    }

    pub fn with_tolerances(mat: ComplexMatrix, dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        if !mat.is_square() {
            return Err(QpdError::NotDensityMatrix("matrix is not square".into()));
        }
        if dims.iter().product::<usize>() != mat.rows() || dims.contains(&0) {
            return Err(dim_mismatch(format!("dims {dims:?} do not factor side {}", mat.rows())));
        }
        let dev = mat.hermitian_deviation();
        if dev > tol.herm_tol {
            return Err(QpdError::NotDensityMatrix(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(QpdError::NotDensityMatrix(format!("trace {tr} differs from 1")));
        }
        let min = *mat.eigvalsh()?.last().expect("non-empty spectrum");
        if min < tol.psd_tol {
            return Err(QpdError::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { mat, dims })
    }

    /// Wraps a matrix already known to be a state (e.g. a channel output).
    pub(crate) fn trusted(mat: ComplexMatrix, dims: Vec<usize>) -> Self {
        Self { mat, dims }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { mat: ComplexMatrix::identity(d).scale_real(1.0 / d as f64), dims: vec![d] }
    }

    /// `|v⟩⟨v|` for a normalized `v`.
    pub fn pure(v: &[C64], dims: Vec<usize>) -> Result<Self> {
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if (n - 1.0).abs() > 1e-10 {
            return Err(QpdError::NotDensityMatrix(format!("vector norm² {n} differs from 1")));
        }
        if dims.iter().product::<usize>() != v.len() {
            return Err(dim_mismatch(format!("dims {dims:?} do not factor length {}", v.len())));
        }
        Ok(Self { mat: ComplexMatrix::outer(v), dims })
    }

    /// `|k⟩⟨k|` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Self {
        Self { mat: ComplexMatrix::unit(d, d, k, k), dims: vec![d] }
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        if dims.iter().product::<usize>() != self.dim() {
            return Err(dim_mismatch(format!("dims {dims:?} do not factor side {}", self.dim())));
        }
        Ok(Self { dims, ..self })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        Ok(Self { mat: kron(&self.mat, &other.mat)?, dims })
    }

    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        let mat = self.mat.partial_trace(&self.dims, keep)?;
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(Self { mat, dims })
    }
}

/// Von Neumann entropy in bits of a Hermitian matrix, eigenvalues clamped to `[0, 1]`.
pub fn entropy_of(m: &ComplexMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(&m.eigvalsh()?))
}

pub fn entropy_of_spectrum(eigs: &[f64]) -> f64 {
    eigs.iter()
        .map(|&l| l.clamp(0.0, 1.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

pub fn entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of(&rho.mat)
}

/// `H(AB) - H(condition_on)` for a bipartite state.
pub fn conditional_entropy(rho: &DensityMatrix, condition_on: usize) -> Result<f64> {
    if rho.dims.len() != 2 || condition_on > 1 {
        return Err(dim_mismatch("conditional entropy needs a bipartite state and factor 0 or 1"));
    }
    let cond = rho.mat.partial_trace(&rho.dims, &[condition_on])?;
    Ok(entropy_of(&rho.mat)? - entropy_of(&cond)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PptReport {
    pub min_eig_ta: f64,
    pub min_eig_tb: f64,
    pub is_ppt: bool,
}

pub fn ppt_check(rho: &DensityMatrix) -> Result<PptReport> {
    ppt_check_matrix(&rho.mat, &rho.dims, &Tolerances::default())
}

pub fn ppt_check_matrix(m: &ComplexMatrix, dims: &[usize], tol: &Tolerances) -> Result<PptReport> {
    if dims.len() != 2 {
        return Err(dim_mismatch("PPT check needs a bipartite state"));
    }
    let min_eig = |which| -> Result<f64> {
        Ok(*m.partial_transpose(dims, which)?.eigvalsh()?.last().expect("non-empty"))
    };
    let (min_eig_ta, min_eig_tb) = (min_eig(0)?, min_eig(1)?);
    Ok(PptReport { min_eig_ta, min_eig_tb, is_ppt: min_eig_ta >= tol.psd_tol && min_eig_tb >= tol.psd_tol })
}

/// Trace norm of the realigned matrix; values above 1 certify entanglement.
pub fn ccnr(rho: &DensityMatrix) -> Result<f64> {
    ccnr_matrix(&rho.mat, &rho.dims)
}

pub fn ccnr_matrix(m: &ComplexMatrix, dims: &[usize]) -> Result<f64> {
    Ok(m.realign(dims)?.trace_norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEntanglementReport {
    pub ppt: PptReport,
    pub ccnr_value: f64,
    pub flagged_bound_entangled: bool,
}

pub fn bound_entanglement_report(rho: &DensityMatrix) -> Result<BoundEntanglementReport> {
    bound_entanglement_report_matrix(&rho.mat, &rho.dims, &Tolerances::default())
}

pub fn bound_entanglement_report_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    tol: &Tolerances,
) -> Result<BoundEntanglementReport> {
    let ppt = ppt_check_matrix(m, dims, tol)?;
    let ccnr_value = ccnr_matrix(m, dims)?;
    Ok(BoundEntanglementReport {
        ppt,
        ccnr_value,
        flagged_bound_entangled: ppt.is_ppt && ccnr_value > 1.0 + tol.residual_tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EbVerdict {
    Yes,
    No,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EbReport {
    pub verdict: EbVerdict,
    pub witness: String,
}

fn is_rank_one(m: &ComplexMatrix, cutoff: f64) -> bool {
    let s = m.singular_values();
    s.len() < 2 || s[1] <= cutoff * s[0]
}

/// Decides entanglement breaking where a computable certificate exists.
///
/// Certificates for YES: rank-one Kraus operators, a product Choi state, a
/// Choi spectral decomposition with product eigenvectors, or PPT in total
/// dimension at most 6. Certificates for NO: NPT Choi or realignment > 1.
pub fn is_entanglement_breaking(ch: &KrausChannel, tol: &Tolerances) -> Result<EbReport> {
    let choi = ch.to_choi()?;
    let dims = [ch.dim_in(), ch.dim_out()];
    let ppt = ppt_check_matrix(&choi.matrix, &dims, tol)?;
    let report = |verdict, witness: String| Ok(EbReport { verdict, witness });
    if !ppt.is_ppt {
        return report(
            EbVerdict::No,
            format!("Choi state is NPT (min partial-transpose eigenvalue {:e})", ppt.min_eig_tb.min(ppt.min_eig_ta)),
        );
    }
    if ch.kraus().iter().all(|k| is_rank_one(k, tol.kraus_cutoff)) {
        return report(EbVerdict::Yes, "every Kraus operator has rank one".into());
    }
    let a = choi.matrix.partial_trace(&dims, &[0])?;
    let b = choi.matrix.partial_trace(&dims, &[1])?;
    if kron(&a, &b)?.max_diff(&choi.matrix) <= tol.residual_tol {
        return report(EbVerdict::Yes, "Choi state is a product state".into());
    }
    let eig = choi.matrix.eigh()?;
    let lmax = eig.values[0];
    let product_eigvecs = (0..eig.values.len())
        .filter(|&k| eig.values[k] > tol.kraus_cutoff * lmax)
        .all(|k| {
            let v = eig.vectors.column(k);
            let op = ComplexMatrix::from_fn(dims[0], dims[1], |i, j| v[i * dims[1] + j]);
            is_rank_one(&op, tol.kraus_cutoff)
        });
    if product_eigvecs {
        return report(EbVerdict::Yes, "Choi eigenvectors are all product vectors".into());
    }
    let realign = ccnr_matrix(&choi.matrix, &dims)?;
    if realign > 1.0 + tol.residual_tol {
        return report(EbVerdict::No, format!("Choi state is PPT but realignment norm {realign} > 1"));
    }
    if dims[0] * dims[1] <= 6 {
        return report(EbVerdict::Yes, "Choi state is PPT in total dimension <= 6".into());
    }
    report(
        EbVerdict::Undetermined,
        format!("Choi state is PPT with realignment norm {realign} <= 1 in dimension {}x{}", dims[0], dims[1]),
    )
}
