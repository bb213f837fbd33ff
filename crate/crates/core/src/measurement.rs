//! Pilot reception through random analog combiners and noise whitening.
//!
//! Each of the `M` pilot slots applies its own `N_a × L` phase-shifter
//! combiner to the channel plus fresh antenna noise. Stacking the slots gives
//! per-subcarrier observations `W^H h[k] + n_w[k]` where the combined noise
//! has the block-diagonal covariance `σ²·blockdiag(W_m^H W_m)`. A block
//! Cholesky factor `D` of that Gram structure (with `σ²` factored out) is
//! applied as `D⁻¹` so the whitened noise has covariance `σ²·I`, and the
//! sensing matrix becomes `Φ = D⁻¹ W^H`.

use rand::Rng;
use std::io::{Read, Write};

use crate::channel::ChannelRealization;
use crate::rng::{complex_gaussian, random_phase};
use crate::{C64, CMat, CVec, Error, Result};

/// Analog training combiners: `M` unit-modulus frames of size `N_a × L`,
/// plus the pilot transmit power absorbed into the stacked matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinerSet {
    /// One `N_a × L` frame per pilot slot.
    pub frames: Vec<CMat>,
    /// Pilot transmit power `P`.
    pub tx_power: f64,
}

impl CombinerSet {
    /// Number of pilot slots M.
    pub fn m_count(&self) -> usize {
        self.frames.len()
    }

    /// RF chains per slot L.
    pub fn l_count(&self) -> usize {
        self.frames[0].ncols()
    }

    /// Antennas N_a.
    pub fn n_elements(&self) -> usize {
        self.frames[0].nrows()
    }

    /// Stacked combiner `W = √P [W₁, …, W_M]`, of size `N_a × ML`.
    pub fn stacked(&self) -> CMat {
        let n = self.n_elements();
        let l = self.l_count();
        let mut w = CMat::zeros(n, self.m_count() * l);
        let root_p = self.tx_power.sqrt();
        for (m, frame) in self.frames.iter().enumerate() {
            for j in 0..l {
                for i in 0..n {
                    w[(i, m * l + j)] = frame[(i, j)] * root_p;
                }
            }
        }
        w
    }

    /// First `m` pilot slots as a new set (shares the power setting).
    pub fn truncate(&self, m: usize) -> CombinerSet {
        CombinerSet {
            frames: self.frames[..m].to_vec(),
            tx_power: self.tx_power,
        }
    }
}

/// Draws `m` random phase-shifter frames: every entry `exp(jψ)` with `ψ`
/// uniform on [0, 2π). Frames are drawn slot by slot, so the first `m'`
/// frames of a larger draw coincide with a smaller draw from the same seed.
pub fn random_combiners<R: Rng + ?Sized>(
    m: usize,
    l: usize,
    n_elements: usize,
    tx_power: f64,
    rng: &mut R,
) -> Result<CombinerSet> {
    if m < 1 || l < 1 || n_elements < 1 {
        return Err(Error::Config(format!(
            "combiner dimensions must be positive, got M={m}, L={l}, N_a={n_elements}"
        )));
    }
    if !(tx_power > 0.0) {
        return Err(Error::Config(format!("tx power must be positive, got {tx_power}")));
    }
    let frames = (0..m)
        .map(|_| CMat::from_fn(n_elements, l, |_, _| random_phase(rng)))
        .collect();
    Ok(CombinerSet { frames, tx_power })
}

/// Raw stacked pilot observations, `ML × K`: column `k` is
/// `W^H h[k] + [W_m^H n^{(m)}[k]]_m` with `n^{(m)}[k] ~ CN(0, σ²·I)`.
pub fn observe<R: Rng + ?Sized>(
    freq_channel: &[CVec],
    combiners: &CombinerSet,
    noise_var: f64,
    rng: &mut R,
) -> Result<CMat> {
    let n = combiners.n_elements();
    let l = combiners.l_count();
    let m_count = combiners.m_count();
    let k_count = freq_channel.len();
    if k_count == 0 {
        return Err(Error::Config("no subcarriers to observe".into()));
    }
    if freq_channel.iter().any(|h| h.len() != n) {
        return Err(Error::Config(format!(
            "channel vectors must have length N_a = {n}"
        )));
    }
    if !(noise_var >= 0.0) {
        return Err(Error::Config(format!("noise variance must be nonnegative, got {noise_var}")));
    }

    let root_p = combiners.tx_power.sqrt();
    let mut out = CMat::zeros(m_count * l, k_count);
    for (m, frame) in combiners.frames.iter().enumerate() {
        let frame_h = frame.adjoint();
        for (k, h) in freq_channel.iter().enumerate() {
            let mut y = &frame_h * (h * C64::new(root_p, 0.0));
            if noise_var > 0.0 {
                let noise = CVec::from_fn(n, |_, _| complex_gaussian(rng, noise_var));
                y += &frame_h * noise;
            }
            for j in 0..l {
                out[(m * l + j, k)] = y[j];
            }
        }
    }
    Ok(out)
}

/// Block Cholesky factor of the combiner Gram structure.
///
/// `D = blockdiag(chol(W_m^H W_m))` with the noise variance factored out, so
/// applying `D⁻¹` to the stacked observations leaves noise of covariance
/// `σ²·I`. The factor is block-lower-triangular rather than diagonal because
/// each slot's Gram matrix is dense.
#[derive(Debug, Clone)]
pub struct Whitener {
    /// Lower Cholesky factor of each slot's `L × L` Gram matrix.
    factors: Vec<CMat>,
    l: usize,
}

impl Whitener {
    /// RF chains per slot.
    pub fn block_size(&self) -> usize {
        self.l
    }

    pub fn block_count(&self) -> usize {
        self.factors.len()
    }

    /// Applies `D⁻¹` by block-wise forward substitution.
    pub fn apply_inverse(&self, x: &CMat) -> Result<CMat> {
        let ml = self.factors.len() * self.l;
        if x.nrows() != ml {
            return Err(Error::Config(format!(
                "whitener expects {ml} rows, got {}",
                x.nrows()
            )));
        }
        let mut out = x.clone();
        for (m, factor) in self.factors.iter().enumerate() {
            let rows = x.rows(m * self.l, self.l).into_owned();
            let solved = factor.solve_lower_triangular(&rows).ok_or_else(|| {
                Error::Rank(format!("whitener block {m} is numerically singular"))
            })?;
            out.rows_mut(m * self.l, self.l).copy_from(&solved);
        }
        Ok(out)
    }

    /// Materializes the `ML × ML` block-diagonal factor (diagnostics/tests).
    pub fn dense(&self) -> CMat {
        let ml = self.factors.len() * self.l;
        let mut d = CMat::zeros(ml, ml);
        for (m, factor) in self.factors.iter().enumerate() {
            d.view_mut((m * self.l, m * self.l), (self.l, self.l))
                .copy_from(factor);
        }
        d
    }
}

/// Factors the block-diagonal Gram structure of a combiner set.
pub fn whitener(combiners: &CombinerSet) -> Result<Whitener> {
    let l = combiners.l_count();
    let mut factors = Vec::with_capacity(combiners.m_count());
    for (m, frame) in combiners.frames.iter().enumerate() {
        let gram = frame.ad_mul(frame);
        let chol = nalgebra::linalg::Cholesky::new(gram).ok_or_else(|| {
            Error::Rank(format!(
                "combiner Gram block {m} is not positive definite (L={l} > N_a, or degenerate phases)"
            ))
        })?;
        factors.push(chol.l());
    }
    Ok(Whitener { factors, l })
}

/// Whitened measurement model: observations `Y = D⁻¹·raw`, sensing matrix
/// `Φ = D⁻¹·W^H`, and the noise variance the whitened noise retains.
#[derive(Debug, Clone)]
pub struct MeasurementBatch {
    /// `ML × N_a` sensing matrix Φ.
    pub sensing: CMat,
    /// `ML × K` whitened observations Y.
    pub observations: CMat,
    /// Per-entry noise variance σ² after whitening.
    pub noise_var: f64,
    pub whitener: Whitener,
}

/// Applies the whitening filter to raw stacked pilots.
pub fn whiten_observations(
    raw: &CMat,
    whitener: Whitener,
    combiners: &CombinerSet,
    noise_var: f64,
) -> Result<MeasurementBatch> {
    let observations = whitener.apply_inverse(raw)?;
    let sensing = whitener.apply_inverse(&combiners.stacked().adjoint())?;
    Ok(MeasurementBatch {
        sensing,
        observations,
        noise_var,
        whitener,
    })
}

/// Largest absolute eigenvalue of a Hermitian matrix, by power iteration
/// with a fixed starting vector.
pub fn spectral_norm_hermitian(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut v = CVec::from_fn(n, |i, _| C64::new(1.0 + (i as f64) * 0.3, 0.7 - (i as f64) * 0.1));
    let mut norm = v.norm();
    v /= C64::new(norm, 0.0);
    let mut lambda = 0.0;
    for _ in 0..200 {
        let w = m * &v;
        norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v = w / C64::new(norm, 0.0);
        lambda = norm;
    }
    lambda
}

// ---------------------------------------------------------------------------
// Replayable batch container
// ---------------------------------------------------------------------------

/// Self-contained record of one simulated measurement: combiners, the true
/// frequency channel, and the raw (unwhitened) pilot observations.
///
/// Binary layout (all little-endian): magic `FDMB`, u32 version, u32 M, L,
/// N_a, K, f64 tx_power, f64 noise_var, then row-major complex doubles
/// (re, im interleaved) for the M combiner frames, the `N_a × K` truth, and
/// the `ML × K` raw observations.
#[derive(Debug, Clone)]
pub struct ReplayBatch {
    pub combiners: CombinerSet,
    /// True frequency-domain channel, `N_a × K`.
    pub truth: CMat,
    /// Raw stacked observations, `ML × K`.
    pub raw: CMat,
    pub noise_var: f64,
}

const BATCH_MAGIC: &[u8; 4] = b"FDMB";
const BATCH_VERSION: u32 = 1;

impl ReplayBatch {
    /// Simulates one batch from a channel realization.
    pub fn simulate<R: Rng + ?Sized>(
        channel: &ChannelRealization,
        combiners: CombinerSet,
        noise_var: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let raw = observe(&channel.freq, &combiners, noise_var, rng)?;
        let truth = channel.freq_matrix();
        Ok(Self {
            combiners,
            truth,
            raw,
            noise_var,
        })
    }

    /// Whitens the stored raw observations.
    pub fn whiten(&self) -> Result<MeasurementBatch> {
        let w = whitener(&self.combiners)?;
        whiten_observations(&self.raw, w, &self.combiners, self.noise_var)
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        let m = self.combiners.m_count() as u32;
        let l = self.combiners.l_count() as u32;
        let n = self.combiners.n_elements() as u32;
        let k = self.truth.ncols() as u32;
        out.write_all(BATCH_MAGIC)?;
        out.write_all(&BATCH_VERSION.to_le_bytes())?;
        for v in [m, l, n, k] {
            out.write_all(&v.to_le_bytes())?;
        }
        out.write_all(&self.combiners.tx_power.to_le_bytes())?;
        out.write_all(&self.noise_var.to_le_bytes())?;
        for frame in &self.combiners.frames {
            write_complex_matrix(out, frame)?;
        }
        write_complex_matrix(out, &self.truth)?;
        write_complex_matrix(out, &self.raw)?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != BATCH_MAGIC {
            return Err(Error::Config("not a measurement batch file".into()));
        }
        let version = read_u32(input)?;
        if version != BATCH_VERSION {
            return Err(Error::Config(format!(
                "unsupported batch version {version}"
            )));
        }
        let m = read_u32(input)? as usize;
        let l = read_u32(input)? as usize;
        let n = read_u32(input)? as usize;
        let k = read_u32(input)? as usize;
        if m < 1 || l < 1 || n < 1 || k < 1 {
            return Err(Error::Config("batch header has zero dimensions".into()));
        }
        let tx_power = read_f64(input)?;
        let noise_var = read_f64(input)?;
        let frames = (0..m)
            .map(|_| read_complex_matrix(input, n, l))
            .collect::<Result<Vec<_>>>()?;
        let truth = read_complex_matrix(input, n, k)?;
        let raw = read_complex_matrix(input, m * l, k)?;
        Ok(Self {
            combiners: CombinerSet { frames, tx_power },
            truth,
            raw,
            noise_var,
        })
    }
}

fn write_complex_matrix<W: Write>(out: &mut W, m: &CMat) -> Result<()> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.write_all(&m[(i, j)].re.to_le_bytes())?;
            out.write_all(&m[(i, j)].im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_complex_matrix<R: Read>(input: &mut R, rows: usize, cols: usize) -> Result<CMat> {
    let mut m = CMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let re = read_f64(input)?;
            let im = read_f64(input)?;
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    input.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}
