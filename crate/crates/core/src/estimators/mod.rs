//! Sparse recovery over the whitened measurement model `Y ≈ Φ·Ã·G̃ + N`.
//!
//! All estimators grow a support greedily against the same mean-residual-power
//! stop rule, compute least-squares gains on the effective regressor
//! `B = Φ·Ã_ℐ`, and reconstruct `Ĥ = Ã·Ĝ`. The Bayesian ensemble additionally
//! samples supports from single-index posterior scores and refines gains with
//! an MMSE shrinkage step.

mod bayes;
mod greedy;

pub use bayes::{
    bsomp, sample_index, single_index_log_scores, softmax_normalize, BsompOptions,
};
pub use greedy::{omp, omp_with_mode, swomp, SelectionMode};

use crate::dictionary::Dictionary;
use crate::{C64, CMat, Error, Result};

/// Ordered set of dictionary-column indices, duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Support {
    indices: Vec<usize>,
}

impl Support {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from indices, rejecting duplicates and out-of-range entries.
    pub fn from_indices(indices: Vec<usize>, dict_size: usize) -> Result<Self> {
        let mut s = Self::new();
        for i in indices {
            if i >= dict_size {
                return Err(Error::Domain(format!(
                    "support index {i} out of range for dictionary size {dict_size}"
                )));
            }
            s.push(i)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, index: usize) -> Result<()> {
        if self.indices.contains(&index) {
            return Err(Error::Domain(format!("duplicate support index {index}")));
        }
        self.indices.push(index);
        Ok(())
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    /// Indices in ascending order (selection order is preserved in
    /// `as_slice`; this is for set-wise comparisons).
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }
}

/// Stop rule shared by every greedy pass: halt when the mean residual power
/// `‖R‖²_F / (ML·K)` drops to the threshold, or the support reaches its cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    /// Mean residual power threshold (typically the noise variance).
    pub mean_power_threshold: f64,
    /// Largest support size a pass may grow to.
    pub max_support: usize,
}

impl StopRule {
    pub fn new(mean_power_threshold: f64, max_support: usize) -> Self {
        Self {
            mean_power_threshold,
            max_support,
        }
    }
}

/// Diagnostics of one greedy pass.
#[derive(Debug, Clone)]
pub struct RunRecord {
    /// Selected dictionary indices in selection order.
    pub support: Support,
    /// Gains on the support rows (`|ℐ| × K`), after any refinement.
    pub gains: CMat,
    /// Final mean residual power `‖R‖²_F / (ML·K)`.
    pub residual_power: f64,
    /// Number of atoms selected.
    pub iterations: usize,
    /// The pass hit the support cap without meeting the residual threshold.
    pub hit_max: bool,
}

/// Output of an estimator: beamspace gains, reconstructed channel, and
/// per-pass diagnostics.
#[derive(Debug, Clone)]
pub struct EstimateResult {
    /// Sparse gain matrix `Ĝ`, `G × K`.
    pub gain_matrix: CMat,
    /// Reconstructed channel `Ĥ = Ã·Ĝ`, `N_a × K`.
    pub channel: CMat,
    pub runs: Vec<RunRecord>,
}

impl EstimateResult {
    fn assemble(dict: &Dictionary, gain_matrix: CMat, runs: Vec<RunRecord>) -> Self {
        let channel = &dict.atoms * &gain_matrix;
        Self {
            gain_matrix,
            channel,
            runs,
        }
    }
}

/// Least-squares gains for a chosen sub-dictionary: minimizes
/// `‖Y − Φ·Ã_ℐ·Q‖_F` via a Cholesky solve of the normal equations.
pub fn ls_gains(atoms_sub: &CMat, sensing: &CMat, y: &CMat) -> Result<CMat> {
    let regressor = sensing * atoms_sub;
    solve_ls(&regressor, y)
}

/// MMSE gain refinement: `(σ⁻²·B^H·B + Γ_ℐ⁻¹)⁻¹ · σ⁻² · B^H · Y` with
/// `B = Φ·Ã_ℐ` and a diagonal prior covariance on the support.
pub fn mmse_refine(
    atoms_sub: &CMat,
    sensing: &CMat,
    y: &CMat,
    noise_var: f64,
    prior_diag: &[f64],
) -> Result<CMat> {
    let regressor = sensing * atoms_sub;
    solve_mmse(&regressor, y, noise_var, prior_diag)
}

/// Cholesky solve of the normal equations for an explicit regressor.
pub(crate) fn solve_ls(regressor: &CMat, y: &CMat) -> Result<CMat> {
    let gram = regressor.ad_mul(regressor);
    let chol = nalgebra::linalg::Cholesky::new(gram).ok_or_else(|| {
        Error::Rank(format!(
            "least-squares regressor with {} columns is rank deficient",
            regressor.ncols()
        ))
    })?;
    let rhs = regressor.ad_mul(y);
    Ok(chol.solve(&rhs))
}

/// Regularized solve for the MMSE posterior mean.
pub(crate) fn solve_mmse(
    regressor: &CMat,
    y: &CMat,
    noise_var: f64,
    prior_diag: &[f64],
) -> Result<CMat> {
    if !(noise_var > 0.0) {
        return Err(Error::Domain(format!(
            "MMSE refinement needs a positive noise variance, got {noise_var}"
        )));
    }
    if prior_diag.len() != regressor.ncols() {
        return Err(Error::Config(format!(
            "prior diagonal has {} entries for {} columns",
            prior_diag.len(),
            regressor.ncols()
        )));
    }
    if prior_diag.iter().any(|&g| !(g > 0.0)) {
        return Err(Error::Domain("prior variances must be positive".into()));
    }
    let inv_noise = 1.0 / noise_var;
    let mut system = regressor.ad_mul(regressor) * C64::new(inv_noise, 0.0);
    for (j, &g) in prior_diag.iter().enumerate() {
        system[(j, j)] += C64::new(1.0 / g, 0.0);
    }
    // Positive definite for any positive prior, so the factorization cannot
    // fail except through non-finite inputs.
    let chol = nalgebra::linalg::Cholesky::new(system)
        .ok_or_else(|| Error::Rank("MMSE system is not positive definite".into()))?;
    let rhs = regressor.ad_mul(y) * C64::new(inv_noise, 0.0);
    Ok(chol.solve(&rhs))
}

/// Precomputed per-dictionary quantities shared by the greedy loops.
pub(crate) struct EstimatorContext {
    /// `Ψ = Φ·Ã`, `ML × G`.
    pub psi: CMat,
    /// Squared column norms `‖Ψ_i‖²`.
    pub col_norms_sq: Vec<f64>,
}

impl EstimatorContext {
    pub fn new(sensing: &CMat, dict: &Dictionary) -> Self {
        let psi = sensing * &dict.atoms;
        let col_norms_sq = (0..psi.ncols())
            .map(|j| psi.column(j).norm_squared())
            .collect();
        Self { psi, col_norms_sq }
    }

    /// Gathered regressor columns for a support.
    pub fn regressor(&self, support: &Support) -> CMat {
        let ml = self.psi.nrows();
        CMat::from_fn(ml, support.len(), |i, j| {
            self.psi[(i, support.as_slice()[j])]
        })
    }
}

/// Scatters support-row gains into a full `G × K` matrix.
pub(crate) fn scatter(support: &Support, gains: &CMat, dict_size: usize) -> CMat {
    let mut full = CMat::zeros(dict_size, gains.ncols());
    for (row, &idx) in support.as_slice().iter().enumerate() {
        for k in 0..gains.ncols() {
            full[(idx, k)] = gains[(row, k)];
        }
    }
    full
}

/// Mean per-entry power `‖R‖²_F / (rows·cols)`.
pub(crate) fn mean_power(m: &CMat) -> f64 {
    m.norm_squared() / (m.nrows() * m.ncols()) as f64
}
