//! Deterministic matching-pursuit baselines.
//!
//! Both baselines select atoms by whitened correlation against the running
//! residual, normalized by the effective atom norm `‖Ψ_i‖`, and share the
//! residual-power stop rule with the Bayesian ensemble so NMSE comparisons
//! isolate the selection strategy. OMP sums correlation magnitudes across
//! subcarriers; SWOMP sums their squares (an ℓ2 row norm), which weighs
//! coherent multi-subcarrier support more heavily. For `K = 1` the two
//! selections coincide.

use crate::dictionary::Dictionary;
use crate::{CMat, Error, Result};

use super::{
    mean_power, scatter, solve_ls, EstimateResult, EstimatorContext, RunRecord, StopRule, Support,
};

/// How OMP treats the subcarrier dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionMode {
    /// One shared support chosen from correlations summed over subcarriers.
    #[default]
    Joint,
    /// Independent supports per subcarrier.
    PerSubcarrier,
}

/// Orthogonal matching pursuit with joint atom selection.
pub fn omp(y: &CMat, sensing: &CMat, dict: &Dictionary, stop: &StopRule) -> Result<EstimateResult> {
    omp_with_mode(y, sensing, dict, stop, SelectionMode::Joint)
}

/// OMP with an explicit subcarrier-handling mode.
pub fn omp_with_mode(
    y: &CMat,
    sensing: &CMat,
    dict: &Dictionary,
    stop: &StopRule,
    mode: SelectionMode,
) -> Result<EstimateResult> {
    validate(y, dict, stop)?;
    let ctx = EstimatorContext::new(sensing, dict);
    match mode {
        SelectionMode::Joint => {
            let record = greedy_pass(&ctx, y, stop, Criterion::AbsSum)?;
            let gain_matrix = scatter(&record.support, &record.gains, dict.len());
            Ok(EstimateResult::assemble(dict, gain_matrix, vec![record]))
        }
        SelectionMode::PerSubcarrier => {
            let mut gain_matrix = CMat::zeros(dict.len(), y.ncols());
            let mut runs = Vec::with_capacity(y.ncols());
            for k in 0..y.ncols() {
                let col = y.columns(k, 1).into_owned();
                let record = greedy_pass(&ctx, &col, stop, Criterion::AbsSum)?;
                let full = scatter(&record.support, &record.gains, dict.len());
                gain_matrix.column_mut(k).copy_from(&full.column(0));
                runs.push(record);
            }
            Ok(EstimateResult::assemble(dict, gain_matrix, runs))
        }
    }
}

/// Simultaneous (weighted) orthogonal matching pursuit: one shared support,
/// atoms ranked by the squared correlation summed across subcarriers.
pub fn swomp(
    y: &CMat,
    sensing: &CMat,
    dict: &Dictionary,
    stop: &StopRule,
) -> Result<EstimateResult> {
    validate(y, dict, stop)?;
    let ctx = EstimatorContext::new(sensing, dict);
    let record = greedy_pass(&ctx, y, stop, Criterion::SquaredSum)?;
    let gain_matrix = scatter(&record.support, &record.gains, dict.len());
    Ok(EstimateResult::assemble(dict, gain_matrix, vec![record]))
}

fn validate(y: &CMat, dict: &Dictionary, stop: &StopRule) -> Result<()> {
    if stop.max_support > y.nrows().min(dict.len()) {
        return Err(Error::Config(format!(
            "max support {} exceeds min(ML, G) = {}",
            stop.max_support,
            y.nrows().min(dict.len())
        )));
    }
    Ok(())
}

enum Criterion {
    /// Σ_k |⟨Ψ_i, r_k⟩| / ‖Ψ_i‖
    AbsSum,
    /// Σ_k |⟨Ψ_i, r_k⟩|² / ‖Ψ_i‖²
    SquaredSum,
}

fn greedy_pass(
    ctx: &EstimatorContext,
    y: &CMat,
    stop: &StopRule,
    criterion: Criterion,
) -> Result<RunRecord> {
    let mut support = Support::new();
    let mut residual = y.clone();
    let mut gains = CMat::zeros(0, y.ncols());
    let mut hit_max = false;

    loop {
        let power = mean_power(&residual);
        if power <= stop.mean_power_threshold {
            break;
        }
        if support.len() >= stop.max_support {
            hit_max = !support.is_empty();
            break;
        }

        let correlations = ctx.psi.ad_mul(&residual);
        let mut best: Option<(usize, f64)> = None;
        for i in 0..ctx.psi.ncols() {
            if support.contains(i) || ctx.col_norms_sq[i] <= 1e-300 {
                continue;
            }
            let row = correlations.row(i);
            let score = match criterion {
                Criterion::AbsSum => {
                    row.iter().map(|c| c.norm()).sum::<f64>() / ctx.col_norms_sq[i].sqrt()
                }
                Criterion::SquaredSum => {
                    row.iter().map(|c| c.norm_sqr()).sum::<f64>() / ctx.col_norms_sq[i]
                }
            };
            // Strict comparison keeps the lowest index on ties.
            if best.map_or(true, |(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        let Some((index, _)) = best else { break };
        support.push(index)?;

        let regressor = ctx.regressor(&support);
        gains = solve_ls(&regressor, y)
            .map_err(|e| Error::Rank(format!("{e} (support {:?})", support.as_slice())))?;
        residual = y - &regressor * &gains;
    }

    Ok(RunRecord {
        residual_power: mean_power(&residual),
        iterations: support.len(),
        hit_max,
        support,
        gains,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::ArrayGeometry;
    use crate::dictionary::{build_dictionary, sfg_grid};
    use crate::measurement::{observe, random_combiners, whiten_observations, whitener};
    use crate::rng::{complex_gaussian, rng_from_seed};
    use crate::CVec;

    /// Noiseless measurement of a channel planted on dictionary atoms.
    fn planted(
        dict: &Dictionary,
        indices: &[usize],
        m: usize,
        l: usize,
        k: usize,
        seed: u64,
    ) -> (CMat, CMat, CMat) {
        let n = dict.atoms.nrows();
        let mut rng = rng_from_seed(seed);
        let mut gains = CMat::zeros(dict.len(), k);
        for &i in indices {
            for kk in 0..k {
                gains[(i, kk)] = complex_gaussian(&mut rng, 1.0);
            }
        }
        let h = &dict.atoms * &gains;
        let freq: Vec<CVec> = (0..k).map(|kk| h.column(kk).into_owned()).collect();
        let combiners = random_combiners(m, l, n, 1.0, &mut rng).unwrap();
        let raw = observe(&freq, &combiners, 0.0, &mut rng).unwrap();
        let w = whitener(&combiners).unwrap();
        let batch = whiten_observations(&raw, w, &combiners, 0.0).unwrap();
        (batch.sensing, batch.observations, h)
    }

    fn desk_dict(g: usize, rows: usize) -> Dictionary {
        let geom = ArrayGeometry::half_wavelength(rows, rows).unwrap();
        build_dictionary(&sfg_grid(g, std::f64::consts::PI / 2.0).unwrap(), &geom).unwrap()
    }

    #[test]
    fn omp_recovers_a_planted_single_atom() {
        let dict = desk_dict(64, 4);
        let (sensing, y, h) = planted(&dict, &[19], 3, 4, 2, 1);
        let stop = StopRule::new(1e-14, 8);
        let result = omp(&y, &sensing, &dict, &stop).unwrap();
        assert_eq!(result.runs[0].support.as_slice(), &[19]);
        let nmse = (&result.channel - &h).norm_squared() / h.norm_squared();
        assert!(nmse < 1e-12, "NMSE {nmse}");
    }

    #[test]
    fn omp_residual_is_nonincreasing_in_the_support_size() {
        let dict = desk_dict(64, 4);
        let mut rng = rng_from_seed(2);
        let sensing = CMat::from_fn(12, 16, |_, _| complex_gaussian(&mut rng, 1.0));
        let y = CMat::from_fn(12, 3, |_, _| complex_gaussian(&mut rng, 1.0));
        let mut last = f64::INFINITY;
        for cap in 1..=6 {
            let stop = StopRule::new(0.0, cap);
            let result = omp(&y, &sensing, &dict, &stop).unwrap();
            let power = result.runs[0].residual_power;
            assert!(power <= last + 1e-12, "residual grew at cap {cap}");
            last = power;
        }
    }

    #[test]
    fn omp_matches_exhaustive_subset_search_on_a_small_instance() {
        // Well-separated planted triple: exhaustive best-3-subset least
        // squares must agree with the greedy selection in the noiseless case.
        let dict = desk_dict(32, 4);
        let indices = pick_separated(&dict, 3, 0.5);
        let (sensing, y, _) = planted(&dict, &indices, 3, 4, 2, 3);

        let stop = StopRule::new(1e-14, 3);
        let result = omp(&y, &sensing, &dict, &stop).unwrap();
        let got = result.runs[0].support.sorted();

        let ctx = EstimatorContext::new(&sensing, &dict);
        let mut best = (f64::INFINITY, Vec::new());
        for a in 0..dict.len() {
            for b in (a + 1)..dict.len() {
                for c in (b + 1)..dict.len() {
                    let support = Support::from_indices(vec![a, b, c], dict.len()).unwrap();
                    let regressor = ctx.regressor(&support);
                    let Ok(q) = solve_ls(&regressor, &y) else {
                        continue;
                    };
                    let resid = (&y - regressor * q).norm_squared();
                    if resid < best.0 {
                        best = (resid, vec![a, b, c]);
                    }
                }
            }
        }
        assert_eq!(got, best.1, "greedy support differs from exhaustive search");
    }

    /// Planted supports stay off the pole cluster (tiny zeniths leave the
    /// azimuth unobservable, so those atoms are nearly colinear) and keep a
    /// pairwise great-circle separation.
    fn pick_separated(dict: &Dictionary, count: usize, min_sep: f64) -> Vec<usize> {
        let dirs = dict.grid.directions();
        let mut picked: Vec<usize> = Vec::new();
        for i in 0..dirs.len() {
            if dirs[i].0 < 0.35 || dirs[i].0 > 1.45 {
                continue;
            }
            let ok = picked.iter().all(|&j| {
                let u = crate::dictionary::unit_direction(dirs[i].0, dirs[i].1);
                let v = crate::dictionary::unit_direction(dirs[j].0, dirs[j].1);
                (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0).acos() > min_sep
            });
            if ok {
                picked.push(i);
                if picked.len() == count {
                    break;
                }
            }
        }
        assert_eq!(picked.len(), count, "grid too small for separation {min_sep}");
        picked
    }

    #[test]
    fn swomp_equals_omp_for_a_single_subcarrier() {
        let dict = desk_dict(64, 4);
        let mut rng = rng_from_seed(4);
        let sensing = CMat::from_fn(12, 16, |_, _| complex_gaussian(&mut rng, 1.0));
        let y = CMat::from_fn(12, 1, |_, _| complex_gaussian(&mut rng, 1.0));
        let stop = StopRule::new(0.01, 6);
        let a = omp(&y, &sensing, &dict, &stop).unwrap();
        let b = swomp(&y, &sensing, &dict, &stop).unwrap();
        assert_eq!(
            a.runs[0].support.as_slice(),
            b.runs[0].support.as_slice()
        );
        assert!((a.gain_matrix - &b.gain_matrix).norm() < 1e-12);
    }

    #[test]
    fn swomp_recovers_a_common_support_exactly() {
        let dict = desk_dict(64, 4);
        let indices = pick_separated(&dict, 2, 0.5);
        let (sensing, y, h) = planted(&dict, &indices, 3, 4, 4, 5);
        let stop = StopRule::new(1e-14, 6);
        let result = swomp(&y, &sensing, &dict, &stop).unwrap();
        let mut want = indices.clone();
        want.sort_unstable();
        assert_eq!(result.runs[0].support.sorted(), want);
        let nmse = (&result.channel - &h).norm_squared() / h.norm_squared();
        assert!(nmse < 1e-12);
    }

    #[test]
    fn joint_supports_are_shared_across_subcarriers() {
        // The scattered gain matrix of a joint pass has nonzero entries in
        // exactly the support rows for every subcarrier.
        let dict = desk_dict(64, 4);
        let indices = pick_separated(&dict, 2, 0.5);
        let (sensing, y, _) = planted(&dict, &indices, 3, 4, 4, 6);
        let stop = StopRule::new(1e-14, 6);
        let result = swomp(&y, &sensing, &dict, &stop).unwrap();
        let support = result.runs[0].support.sorted();
        for k in 0..4 {
            let nonzero: Vec<usize> = (0..dict.len())
                .filter(|&i| result.gain_matrix[(i, k)].norm_sqr() > 1e-20)
                .collect();
            assert_eq!(nonzero, support);
        }
    }

    #[test]
    fn per_subcarrier_mode_runs_one_pass_per_column() {
        let dict = desk_dict(32, 4);
        let (sensing, y, h) = planted(&dict, &[7], 3, 4, 3, 7);
        let stop = StopRule::new(1e-14, 4);
        let result =
            omp_with_mode(&y, &sensing, &dict, &stop, SelectionMode::PerSubcarrier).unwrap();
        assert_eq!(result.runs.len(), 3);
        for run in &result.runs {
            assert_eq!(run.support.as_slice(), &[7]);
        }
        let nmse = (&result.channel - &h).norm_squared() / h.norm_squared();
        assert!(nmse < 1e-12);
    }

    #[test]
    fn zero_observations_yield_an_empty_support() {
        let dict = desk_dict(32, 4);
        let mut rng = rng_from_seed(8);
        let sensing = CMat::from_fn(12, 16, |_, _| complex_gaussian(&mut rng, 1.0));
        let y = CMat::zeros(12, 2);
        let stop = StopRule::new(1e-12, 4);
        let result = omp(&y, &sensing, &dict, &stop).unwrap();
        assert!(result.runs[0].support.is_empty());
        assert!(result.gain_matrix.norm() == 0.0);
    }

    #[test]
    fn max_support_larger_than_measurements_is_rejected() {
        let dict = desk_dict(32, 4);
        let sensing = CMat::zeros(6, 16);
        let y = CMat::zeros(6, 2);
        let stop = StopRule::new(0.0, 7);
        assert!(matches!(
            omp(&y, &sensing, &dict, &stop),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn planted_instance_min_separation_sanity() {
        // pick_separated must really separate: closest pair above threshold.
        let dict = desk_dict(32, 4);
        let picked = pick_separated(&dict, 3, 0.5);
        for (ai, &a) in picked.iter().enumerate() {
            for &b in &picked[ai + 1..] {
                let pa = dict.grid.directions()[a];
                let pb = dict.grid.directions()[b];
                let u = crate::dictionary::unit_direction(pa.0, pa.1);
                let v = crate::dictionary::unit_direction(pb.0, pb.1);
                let ang = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0).acos();
                assert!(ang > 0.5);
            }
        }
    }
}
