//! Bayesian inference-aided randomized greedy pursuit.
//!
//! With a zero-mean Gaussian prior of variance γ on each beamspace gain and
//! white noise of variance σ², the posterior probability of a single-index
//! support `{i}` is, up to a shared constant,
//!
//! ```text
//! log p(i | Y) = tr(Y^H Ψ_i Ψ_i^H Y) / (σ⁴·b_i) − K·log(b_i),
//! Ψ_i = Φ·a(θ_i, φ_i),   b_i = ‖Ψ_i‖²/σ² + 1/γ.
//! ```
//!
//! The ensemble estimator runs `V` independent passes. Each pass grows its
//! support by sampling indices with probability proportional to these scores
//! evaluated on the running residual, fits least-squares gains, and stops at
//! the residual-power threshold. The pass then re-estimates the prior
//! variance from its own gains, refines them with the MMSE solve, and
//! scatters into the full gain matrix; the final estimate averages the
//! passes.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dictionary::Dictionary;
use crate::{CMat, Error, Result};

use super::{
    mean_power, scatter, solve_ls, solve_mmse, EstimateResult, EstimatorContext, RunRecord,
    StopRule, Support,
};

/// Log-domain single-index support scores for every dictionary column.
///
/// Excluded indices score `-inf`. The shared additive constant is dropped; it
/// cancels under normalization.
pub fn single_index_log_scores(
    y: &CMat,
    sensing: &CMat,
    dict: &Dictionary,
    noise_var: f64,
    prior_var: f64,
    excluded: &Support,
) -> Result<Vec<f64>> {
    if !(noise_var > 0.0) || !(prior_var > 0.0) {
        return Err(Error::Domain(format!(
            "noise and prior variances must be positive, got ({noise_var}, {prior_var})"
        )));
    }
    let ctx = EstimatorContext::new(sensing, dict);
    Ok(scores_from_context(&ctx, y, noise_var, prior_var, excluded))
}

/// Score evaluation against precomputed `Ψ` and its column norms.
fn scores_from_context(
    ctx: &EstimatorContext,
    y: &CMat,
    noise_var: f64,
    prior_var: f64,
    excluded: &Support,
) -> Vec<f64> {
    let k = y.ncols() as f64;
    let correlations = ctx.psi.ad_mul(y); // G × K
    let sigma4 = noise_var * noise_var;
    (0..ctx.psi.ncols())
        .map(|i| {
            if excluded.contains(i) {
                return f64::NEG_INFINITY;
            }
            let b = ctx.col_norms_sq[i] / noise_var + 1.0 / prior_var;
            let power: f64 = correlations.row(i).iter().map(|c| c.norm_sqr()).sum();
            power / (sigma4 * b) - k * b.ln()
        })
        .collect()
}

/// Normalizes log scores into probabilities via log-sum-exp.
///
/// `-inf` entries map to probability zero. Returns an error when no entry is
/// finite.
pub fn softmax_normalize(log_scores: &[f64]) -> Result<Vec<f64>> {
    let max = log_scores
        .iter()
        .copied()
        .filter(|s| s.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::EmptyCandidates);
    }
    let unnormalized: Vec<f64> = log_scores
        .iter()
        .map(|&s| if s.is_finite() { (s - max).exp() } else { 0.0 })
        .collect();
    let total: f64 = unnormalized.iter().sum();
    Ok(unnormalized.into_iter().map(|p| p / total).collect())
}

/// Samples an index with probability proportional to `exp(score)`.
pub fn sample_index<R: Rng + ?Sized>(log_scores: &[f64], rng: &mut R) -> Result<usize> {
    let probs = softmax_normalize(log_scores)?;
    let u: f64 = rng.random_range(0.0..1.0);
    let mut acc = 0.0;
    let mut last_finite = None;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last_finite = Some(i);
        acc += p;
        if u < acc {
            return Ok(i);
        }
    }
    // Rounding can leave the accumulated mass marginally below 1.
    last_finite.ok_or(Error::EmptyCandidates)
}

/// Knobs for the Bayesian ensemble estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsompOptions {
    /// Number of independent randomized passes V.
    pub ensemble: usize,
    /// Stop rule shared with the deterministic baselines.
    pub stop: StopRule,
    /// Initial prior variance for the index scores; `None` uses the
    /// per-entry observation energy `‖Y‖²_F / (ML·K)`.
    pub gamma0: Option<f64>,
    /// Evaluate scores on the running residual (true) or on the raw
    /// observations throughout (false).
    pub score_on_residual: bool,
}

impl BsompOptions {
    pub fn new(ensemble: usize, stop: StopRule) -> Self {
        Self {
            ensemble,
            stop,
            gamma0: None,
            score_on_residual: true,
        }
    }
}

/// Bayesian inference-aided ensemble estimator.
///
/// Runs `V` randomized greedy passes and averages their scattered gain
/// matrices. A pass that reaches the support cap without meeting the
/// residual threshold completes normally and is flagged in its run record.
pub fn bsomp<R: Rng + ?Sized>(
    y: &CMat,
    sensing: &CMat,
    dict: &Dictionary,
    noise_var: f64,
    opts: &BsompOptions,
    rng: &mut R,
) -> Result<EstimateResult> {
    if opts.ensemble < 1 {
        return Err(Error::Config("ensemble size must be at least 1".into()));
    }
    if !(noise_var > 0.0) {
        return Err(Error::Domain(format!(
            "Bayesian scores need a positive noise variance, got {noise_var}"
        )));
    }
    let g = dict.len();
    if opts.stop.max_support > y.nrows().min(g) {
        return Err(Error::Config(format!(
            "max support {} exceeds min(ML, G) = {}",
            opts.stop.max_support,
            y.nrows().min(g)
        )));
    }

    let ctx = EstimatorContext::new(sensing, dict);
    let k = y.ncols();
    let gamma0 = opts.gamma0.unwrap_or_else(|| mean_power(y));
    if !(gamma0 > 0.0) {
        return Err(Error::Domain(format!(
            "initial prior variance must be positive, got {gamma0}"
        )));
    }

    // Per-pass seeds drawn up front so pass results do not depend on how
    // many draws earlier passes consumed.
    let pass_seeds: Vec<u64> = (0..opts.ensemble).map(|_| rng.random()).collect();

    let mut sum = CMat::zeros(g, k);
    let mut runs = Vec::with_capacity(opts.ensemble);
    for seed in pass_seeds {
        let mut pass_rng = ChaCha8Rng::seed_from_u64(seed);
        let record = run_pass(&ctx, y, noise_var, gamma0, opts, &mut pass_rng)?;
        sum += scatter(&record.support, &record.gains, g);
        runs.push(record);
    }
    let gain_matrix = sum / nalgebra::Complex::new(opts.ensemble as f64, 0.0);
    Ok(EstimateResult::assemble(dict, gain_matrix, runs))
}

fn run_pass<R: Rng + ?Sized>(
    ctx: &EstimatorContext,
    y: &CMat,
    noise_var: f64,
    gamma0: f64,
    opts: &BsompOptions,
    rng: &mut R,
) -> Result<RunRecord> {
    let mut support = Support::new();
    let mut residual = y.clone();
    let mut gains = CMat::zeros(0, y.ncols());
    let mut hit_max = false;

    loop {
        let power = mean_power(&residual);
        if power <= opts.stop.mean_power_threshold {
            break;
        }
        if support.len() >= opts.stop.max_support {
            hit_max = !support.is_empty();
            break;
        }
        let score_target = if opts.score_on_residual { &residual } else { y };
        let scores = scores_from_context(ctx, score_target, noise_var, gamma0, &support);
        let index = sample_index(&scores, rng)?;
        support.push(index)?;

        let regressor = ctx.regressor(&support);
        gains = solve_ls(&regressor, y).map_err(|e| {
            Error::Rank(format!("{e} (support {:?})", support.as_slice()))
        })?;
        residual = y - &regressor * &gains;
    }

    // Prior re-estimate from the pass's own least-squares gains, then the
    // MMSE refinement on the same support.
    if !support.is_empty() {
        let mut gamma = gains.norm_squared() / (support.len() * y.ncols()) as f64;
        if !(gamma > 0.0) || !gamma.is_finite() {
            gamma = gamma0;
        }
        let regressor = ctx.regressor(&support);
        gains = solve_mmse(&regressor, y, noise_var, &vec![gamma; support.len()])?;
    }

    Ok(RunRecord {
        residual_power: mean_power(&residual),
        iterations: support.len(),
        hit_max,
        support,
        gains,
    })
}
