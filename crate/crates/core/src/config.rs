//! Experiment configuration: TOML schema, presets, and validation.
//!
//! A configuration resolves from three layers: an optional preset (`desk` is
//! the built-in default scale, `paper` the 256-antenna large scale), an
//! optional TOML file merged on top, and an optional seed override. The seed
//! is mandatory and never taken from the clock, so every run is replayable.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;

use crate::array::ArrayGeometry;
use crate::channel::ChannelConfig;
use crate::dictionary::{
    build_dictionary, sfg_grid, uspd_grid, usvd_grid, Dictionary, GridMethod,
};
use crate::{Error, Result};

/// Built-in configuration scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Small arrays and few subcarriers; full sweeps run in minutes.
    Desk,
    /// The large benchmark scale: 16×16 array, 8 RF chains, 24 subcarriers,
    /// 32×32 grids.
    Paper,
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(Error::Config(format!(
                "unknown preset '{other}' (expected desk or paper)"
            ))),
        }
    }
}

/// Overrides applied by the paper preset on top of the desk defaults.
const PAPER_PRESET: &str = r#"
[array]
n_rows = 16
n_cols = 16

[measurement]
rf_chains = 8
pilots = 10
subcarriers = 24

[dictionary]
grid_size = 1024
zenith_count = 32
azimuth_count = 32

[sweep]
snr_db = [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]
pilots = [2, 4, 6, 8, 10, 12]
trials = 500
"#;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; mandatory, all randomness derives from it.
    pub seed: u64,
    #[serde(default)]
    pub array: ArraySection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub measurement: MeasurementSection,
    #[serde(default)]
    pub dictionary: DictionarySection,
    #[serde(default)]
    pub estimator: EstimatorSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub cdf: CdfSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ArraySection {
    pub n_rows: usize,
    pub n_cols: usize,
    pub spacing_v: f64,
    pub spacing_h: f64,
}

impl Default for ArraySection {
    fn default() -> Self {
        Self {
            n_rows: 8,
            n_cols: 8,
            spacing_v: 0.5,
            spacing_h: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelSection {
    pub n_paths_min: usize,
    pub n_paths_max: usize,
    /// Sampling period in seconds.
    pub sampling_period: f64,
    pub rolloff: f64,
    /// Upper zenith limit of the arrival-direction domain (radians).
    pub zenith_max: f64,
    /// Fixed delay-tap count; omit for the automatic rule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tap_count: Option<usize>,
    /// Plant path directions exactly on the dictionary grid (with on-sample
    /// delays), producing an exactly sparse beamspace model.
    pub on_grid: bool,
    /// Minimum pairwise great-circle separation for on-grid path directions.
    pub min_separation: f64,
    /// Coherence cap for on-grid planting: atoms whose correlation with any
    /// other grid atom exceeds this are never planted (SFG grids have a
    /// near-colinear cluster around the boresight pole where azimuth is
    /// unobservable).
    pub on_grid_max_coherence: f64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            n_paths_min: 6,
            n_paths_max: 12,
            sampling_period: 1.0 / 1760.0 * 1e-6,
            rolloff: 1.0,
            zenith_max: PI / 2.0,
            tap_count: None,
            on_grid: false,
            min_separation: 0.0,
            on_grid_max_coherence: 0.95,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct MeasurementSection {
    /// RF chains per pilot slot L.
    pub rf_chains: usize,
    /// Pilot slots M (fixed-M experiments; the pilot sweep overrides it).
    pub pilots: usize,
    /// Subcarriers K.
    pub subcarriers: usize,
    /// Pilot transmit power P.
    pub tx_power: f64,
}

impl Default for MeasurementSection {
    fn default() -> Self {
        Self {
            rf_chains: 4,
            pilots: 6,
            subcarriers: 8,
            tx_power: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DictionarySection {
    /// Grid method for single-scheme commands (gen-dict, estimate).
    pub method: String,
    /// SFG size G.
    pub grid_size: usize,
    /// SFG angle range ξ (radians).
    pub angle_range: f64,
    /// Rectangular-grid zenith count G_v (USPD/USVD).
    pub zenith_count: usize,
    /// Rectangular-grid azimuth count G_h (USPD/USVD).
    pub azimuth_count: usize,
}

impl Default for DictionarySection {
    fn default() -> Self {
        Self {
            method: "sfg".into(),
            grid_size: 256,
            angle_range: PI / 2.0,
            zenith_count: 16,
            azimuth_count: 16,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorSection {
    /// Estimator for single-scheme commands (estimate).
    pub kind: String,
    /// Ensemble size V for the Bayesian estimator.
    pub ensemble: usize,
    /// Support cap; omit for min(ML, G).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_support: Option<usize>,
    /// Residual threshold as a multiple of the (floored) noise variance.
    pub stop_factor: f64,
    /// Initial prior variance; omit for the per-entry observation energy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,
    /// Score on the running residual (true) or raw observations (false).
    pub score_on_residual: bool,
    /// Relative noise-variance floor handed to estimators, as a fraction of
    /// the mean observation power; keeps noiseless runs well-posed.
    pub noise_floor: f64,
    /// OMP subcarrier handling: "joint" or "per-subcarrier".
    pub omp_mode: String,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        Self {
            kind: "bsomp".into(),
            ensemble: 20,
            max_support: None,
            stop_factor: 1.0,
            gamma0: None,
            score_on_residual: true,
            noise_floor: 1e-12,
            omp_mode: "joint".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// SNR grid in dB for the SNR sweep; entries may be `inf` for noiseless.
    pub snr_db: Vec<f64>,
    /// Pilot counts for the pilot sweep.
    pub pilots: Vec<usize>,
    /// SNR (dB) held fixed during the pilot sweep.
    pub pilot_sweep_snr_db: f64,
    pub trials: usize,
    /// Cross-compared schemes as `dictionary+estimator` labels.
    pub schemes: Vec<String>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            snr_db: vec![-5.0, 0.0, 5.0, 10.0, 15.0],
            pilots: vec![4, 6, 8, 10],
            pilot_sweep_snr_db: 10.0,
            trials: 300,
            schemes: vec![
                "sfg+omp".into(),
                "usvd+omp".into(),
                "uspd+omp".into(),
                "sfg+swomp".into(),
                "sfg+bsomp".into(),
            ],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CdfSection {
    /// Hemisphere probe points for the minimal-angle experiment.
    pub n_samples: usize,
    pub zenith_count: usize,
    pub azimuth_count: usize,
    /// SFG angle range used in the comparison.
    pub angle_range: f64,
    /// Rows of the emitted CDF table.
    pub table_rows: usize,
}

impl Default for CdfSection {
    fn default() -> Self {
        Self {
            n_samples: 10_000,
            zenith_count: 64,
            azimuth_count: 64,
            angle_range: PI / 2.0,
            table_rows: 512,
        }
    }
}

/// Sparse estimator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Omp,
    Swomp,
    Bsomp,
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimatorKind::Omp => write!(f, "omp"),
            EstimatorKind::Swomp => write!(f, "swomp"),
            EstimatorKind::Bsomp => write!(f, "bsomp"),
        }
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "omp" => Ok(EstimatorKind::Omp),
            "swomp" => Ok(EstimatorKind::Swomp),
            "bsomp" => Ok(EstimatorKind::Bsomp),
            other => Err(Error::Config(format!(
                "unknown estimator '{other}' (expected omp, swomp, or bsomp)"
            ))),
        }
    }
}

/// A (dictionary, estimator) pairing, labeled `dict+estimator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchemeSpec {
    pub dictionary: GridMethod,
    pub estimator: EstimatorKind,
}

impl std::fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}+{}", self.dictionary, self.estimator)
    }
}

impl FromStr for SchemeSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (dict, est) = s.split_once('+').ok_or_else(|| {
            Error::Config(format!(
                "scheme '{s}' must look like 'dictionary+estimator', e.g. 'sfg+omp'"
            ))
        })?;
        Ok(SchemeSpec {
            dictionary: dict.parse()?,
            estimator: est.parse()?,
        })
    }
}

impl ExperimentConfig {
    /// Resolves a configuration from preset, optional file content, and an
    /// optional seed override (file beats preset, flag beats file).
    pub fn resolve(
        preset: Preset,
        file_text: Option<&str>,
        seed_override: Option<u64>,
    ) -> Result<Self> {
        let mut table = match preset {
            Preset::Desk => toml::Table::new(),
            Preset::Paper => PAPER_PRESET
                .parse::<toml::Table>()
                .expect("builtin preset parses"),
        };
        if let Some(text) = file_text {
            let user: toml::Table = text
                .parse()
                .map_err(|e: toml::de::Error| Error::Config(format!("{e}")))?;
            merge_tables(&mut table, user);
        }
        if let Some(seed) = seed_override {
            table.insert("seed".into(), toml::Value::Integer(seed as i64));
        }
        let value = toml::Value::Table(table);
        let config: ExperimentConfig = serde_path_to_error::deserialize(value)
            .map_err(|e| Error::Config(format!("{}: {}", e.path(), e.inner().message())))?;
        config.validate()?;
        Ok(config)
    }

    /// The fully expanded configuration as TOML, for run logs.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry()?;
        self.channel_config()?.validate()?;
        let m = &self.measurement;
        if m.rf_chains < 1 || m.pilots < 1 || m.subcarriers < 1 {
            return Err(Error::Config(
                "measurement counts (rf_chains, pilots, subcarriers) must be positive".into(),
            ));
        }
        if !(m.tx_power > 0.0) {
            return Err(Error::Config("measurement.tx_power must be positive".into()));
        }
        let d = &self.dictionary;
        d.method.parse::<GridMethod>()?;
        if d.grid_size < 2 {
            return Err(Error::Config("dictionary.grid_size must be at least 2".into()));
        }
        if !(d.angle_range > 0.0 && d.angle_range <= PI) {
            return Err(Error::Config("dictionary.angle_range must lie in (0, pi]".into()));
        }
        if d.zenith_count < 1 || d.azimuth_count < 1 {
            return Err(Error::Config("dictionary grid counts must be positive".into()));
        }
        let e = &self.estimator;
        e.kind.parse::<EstimatorKind>()?;
        self.omp_mode()?;
        if e.ensemble < 1 {
            return Err(Error::Config("estimator.ensemble must be at least 1".into()));
        }
        if !(e.stop_factor > 0.0) {
            return Err(Error::Config("estimator.stop_factor must be positive".into()));
        }
        if !(e.noise_floor >= 0.0) {
            return Err(Error::Config("estimator.noise_floor must be nonnegative".into()));
        }
        if e.max_support == Some(0) {
            return Err(Error::Config("estimator.max_support must be positive".into()));
        }
        if let Some(g) = e.gamma0 {
            if !(g > 0.0) {
                return Err(Error::Config("estimator.gamma0 must be positive".into()));
            }
        }
        let s = &self.sweep;
        if s.snr_db.is_empty() {
            return Err(Error::Config("sweep.snr_db must not be empty".into()));
        }
        if s.pilots.is_empty() {
            return Err(Error::Config("sweep.pilots must not be empty".into()));
        }
        if s.pilots.iter().any(|&p| p == 0) {
            return Err(Error::Config("sweep.pilots entries must be positive".into()));
        }
        if s.trials < 1 {
            return Err(Error::Config("sweep.trials must be at least 1".into()));
        }
        if s.schemes.is_empty() {
            return Err(Error::Config("sweep.schemes must not be empty".into()));
        }
        self.schemes()?;
        let c = &self.cdf;
        if c.n_samples < 1 || c.zenith_count < 1 || c.azimuth_count < 1 || c.table_rows < 2 {
            return Err(Error::Config("cdf section has nonpositive counts".into()));
        }
        if !(c.angle_range > 0.0 && c.angle_range <= PI) {
            return Err(Error::Config("cdf.angle_range must lie in (0, pi]".into()));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(
            self.array.n_rows,
            self.array.n_cols,
            self.array.spacing_v,
            self.array.spacing_h,
        )
    }

    pub fn channel_config(&self) -> Result<ChannelConfig> {
        let cfg = ChannelConfig {
            n_paths_min: self.channel.n_paths_min,
            n_paths_max: self.channel.n_paths_max,
            sampling_period: self.channel.sampling_period,
            rolloff: self.channel.rolloff,
            zenith_range: (0.0, self.channel.zenith_max),
            tap_count: self.channel.tap_count,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parsed scheme list for sweeps.
    pub fn schemes(&self) -> Result<Vec<SchemeSpec>> {
        self.sweep.schemes.iter().map(|s| s.parse()).collect()
    }

    /// Dictionary for the configured single-scheme method.
    pub fn single_dictionary(&self) -> Result<Dictionary> {
        self.build_dictionary(self.dictionary.method.parse()?)
    }

    /// Builds the dictionary for a grid method using this config's sizes.
    pub fn build_dictionary(&self, method: GridMethod) -> Result<Dictionary> {
        let geom = self.geometry()?;
        let grid = match method {
            GridMethod::Sfg => sfg_grid(self.dictionary.grid_size, self.dictionary.angle_range)?,
            GridMethod::Uspd => {
                uspd_grid(self.dictionary.zenith_count, self.dictionary.azimuth_count)?
            }
            GridMethod::Usvd => {
                usvd_grid(self.dictionary.zenith_count, self.dictionary.azimuth_count)?
            }
        };
        build_dictionary(&grid, &geom)
    }

    pub fn estimator_kind(&self) -> Result<EstimatorKind> {
        self.estimator.kind.parse()
    }

    pub fn omp_mode(&self) -> Result<crate::estimators::SelectionMode> {
        match self.estimator.omp_mode.to_ascii_lowercase().as_str() {
            "joint" => Ok(crate::estimators::SelectionMode::Joint),
            "per-subcarrier" => Ok(crate::estimators::SelectionMode::PerSubcarrier),
            other => Err(Error::Config(format!(
                "unknown estimator.omp_mode '{other}' (expected joint or per-subcarrier)"
            ))),
        }
    }

    /// Support cap: configured value or min(ML, G) for a given pilot count
    /// and dictionary size.
    pub fn max_support_for(&self, m: usize, dict_size: usize) -> usize {
        let ml = m * self.measurement.rf_chains;
        self.estimator
            .max_support
            .unwrap_or(usize::MAX)
            .min(ml)
            .min(dict_size)
    }

    /// Noise variance for an SNR point: `P · 10^(−snr/10)`; infinite SNR
    /// means noiseless.
    pub fn noise_var_for_snr_db(&self, snr_db: f64) -> f64 {
        if snr_db.is_infinite() && snr_db > 0.0 {
            0.0
        } else {
            self.measurement.tx_power * 10f64.powf(-snr_db / 10.0)
        }
    }
}

fn merge_tables(base: &mut toml::Table, overlay: toml::Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge_tables(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_defaults_resolve_with_a_seed() {
        let cfg = ExperimentConfig::resolve(Preset::Desk, Some("seed = 1"), None).unwrap();
        assert_eq!(cfg.array.n_rows, 8);
        assert_eq!(cfg.measurement.rf_chains, 4);
        assert_eq!(cfg.sweep.trials, 300);
        assert_eq!(cfg.schemes().unwrap().len(), 5);
    }

    #[test]
    fn missing_seed_is_rejected_with_a_path() {
        let err = ExperimentConfig::resolve(Preset::Desk, Some("[array]\nn_rows = 4"), None)
            .unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("seed"), "unhelpful error: {msg}");
    }

    #[test]
    fn seed_override_fills_the_gap() {
        let cfg = ExperimentConfig::resolve(Preset::Desk, None, Some(9)).unwrap();
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn paper_preset_changes_the_scale() {
        let cfg = ExperimentConfig::resolve(Preset::Paper, None, Some(1)).unwrap();
        assert_eq!(cfg.array.n_rows, 16);
        assert_eq!(cfg.measurement.rf_chains, 8);
        assert_eq!(cfg.measurement.subcarriers, 24);
        assert_eq!(cfg.dictionary.grid_size, 1024);
        assert_eq!(cfg.sweep.trials, 500);
    }

    #[test]
    fn file_overrides_the_preset() {
        let cfg = ExperimentConfig::resolve(
            Preset::Paper,
            Some("seed = 3\n[measurement]\npilots = 4"),
            None,
        )
        .unwrap();
        assert_eq!(cfg.measurement.pilots, 4);
        assert_eq!(cfg.measurement.rf_chains, 8);
    }

    #[test]
    fn unknown_keys_are_reported_with_their_path() {
        let err = ExperimentConfig::resolve(
            Preset::Desk,
            Some("seed = 1\n[array]\nn_rowz = 4"),
            None,
        )
        .unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("n_rowz") || msg.contains("array"), "{msg}");
    }

    #[test]
    fn bad_scheme_strings_are_rejected() {
        let err = ExperimentConfig::resolve(
            Preset::Desk,
            Some("seed = 1\n[sweep]\nschemes = [\"sfg-omp\"]"),
            None,
        )
        .unwrap_err();
        assert!(format!("{err}").contains("sfg-omp"));
    }

    #[test]
    fn zero_pilot_sweep_entries_are_rejected() {
        let err = ExperimentConfig::resolve(
            Preset::Desk,
            Some("seed = 1\n[sweep]\npilots = [0, 4]"),
            None,
        )
        .unwrap_err();
        assert!(format!("{err}").contains("pilots"));
    }

    #[test]
    fn empty_trial_and_snr_lists_are_rejected() {
        assert!(ExperimentConfig::resolve(
            Preset::Desk,
            Some("seed = 1\n[sweep]\nsnr_db = []"),
            None
        )
        .is_err());
        assert!(ExperimentConfig::resolve(
            Preset::Desk,
            Some("seed = 1\n[sweep]\ntrials = 0"),
            None
        )
        .is_err());
    }

    #[test]
    fn scheme_labels_round_trip() {
        for label in ["sfg+omp", "uspd+swomp", "usvd+bsomp"] {
            let spec: SchemeSpec = label.parse().unwrap();
            assert_eq!(spec.to_string(), label);
        }
    }

    #[test]
    fn resolved_config_serializes_back_to_toml() {
        let cfg = ExperimentConfig::resolve(Preset::Desk, None, Some(5)).unwrap();
        let text = cfg.to_toml_string();
        assert!(text.contains("seed = 5"));
        let reparsed = ExperimentConfig::resolve(Preset::Desk, Some(&text), None).unwrap();
        assert_eq!(reparsed, cfg);
    }

    #[test]
    fn infinite_snr_means_noiseless() {
        let cfg = ExperimentConfig::resolve(Preset::Desk, None, Some(1)).unwrap();
        assert_eq!(cfg.noise_var_for_snr_db(f64::INFINITY), 0.0);
        let v = cfg.noise_var_for_snr_db(10.0);
        assert!((v - 0.1).abs() < 1e-12);
    }
}
