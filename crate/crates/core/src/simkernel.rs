//! Seeded Monte-Carlo baseband simulation of the key exchange.
//!
//! Each symbol the slave draws a random region index and a phase inside it.
//! Eve receives the slave's phasor plus the master's interference phasor plus
//! complex Gaussian noise; the master receives the slave's phasor plus its
//! residual self-interference plus noise. Both estimate the phase with
//! `atan2`, decode, and count gray-coded bit errors.
//!
//! Randomness comes from ChaCha8 streams keyed by the run seed with
//! one stream per fixed-size block of symbols. Blocks are reduced by exact
//! integer summation, so results do not depend on the rayon thread count.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkbudget::{channel_gain, sir_at_eve, Scenario};
use crate::modem::{
    bit_errors, decode_phase, eve_effective_range, place_phase, ModScheme, PhaseMode,
    SymbolPlacement,
};
use crate::num::{db_to_linear, Point2};

/// Symbols per RNG stream.
const BLOCK: u64 = 4096;

/// z for a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

/// Phase of the master's interference as seen by Eve.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterferencePhase {
    /// Uniform on (−π, π] independently per symbol.
    #[default]
    RandomPerSymbol,
    /// Constant bearing, radians.
    FixedAngle(f64),
}

/// Eve's decision strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EveDecoder {
    /// Knows the interference bearing, θ_b and her compressed range. When
    /// the interferer dominates (SIR < 1) and its bearing is fixed, she
    /// measures the phase relative to that bearing and stretches it by
    /// θ_b / θ_b-Eve before decoding. Otherwise she decodes the raw phase:
    /// against a bearing that changes every symbol the relative phase carries
    /// less information than the raw one.
    #[default]
    GenieRescaled,
    /// Decodes the raw measured phase against the full (−θ_b, θ_b] grid.
    NaiveFullRange,
}

/// Statistics of the residual self-interference at the master.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualModel {
    /// Constant amplitude √(β_si P_I), uniform random phase.
    #[default]
    UniformPhase,
    /// Circularly-symmetric complex Gaussian of power β_si P_I.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialConfig {
    pub scenario: Scenario<f64>,
    pub n_symbols: u64,
    pub seed: u64,
    pub interference_phase: InterferencePhase,
    pub eve_decoder: EveDecoder,
    pub symbol_placement: SymbolPlacement,
    pub residual_model: ResidualModel,
    /// Range model used by the genie decoder's rescaling.
    pub phase_model: PhaseMode,
    /// Adds receiver noise of power P_N at both receivers.
    pub thermal_noise: bool,
}

impl TrialConfig {
    /// Protocol defaults: continuous phases, random interference phase,
    /// genie-aided Eve, uniform-phase residual, noise on.
    pub fn new(scenario: Scenario<f64>, n_symbols: u64, seed: u64) -> Self {
        Self {
            scenario,
            n_symbols,
            seed,
            interference_phase: InterferencePhase::default(),
            eve_decoder: EveDecoder::default(),
            symbol_placement: SymbolPlacement::default(),
            residual_model: ResidualModel::default(),
            phase_model: PhaseMode::default(),
            thermal_noise: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_symbols == 0 {
            return Err(Error::invalid("n_symbols", "must be at least 1"));
        }
        if let InterferencePhase::FixedAngle(a) = self.interference_phase {
            if !a.is_finite() {
                return Err(Error::invalid("interference_phase", "angle must be finite"));
            }
        }
        self.scenario.validate()
    }
}

/// One complex baseband observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RxSample {
    pub i_component: f64,
    pub q_component: f64,
}

impl RxSample {
    pub fn phase(&self) -> f64 {
        self.q_component.atan2(self.i_component)
    }
}

impl From<Complex64> for RxSample {
    fn from(c: Complex64) -> Self {
        Self {
            i_component: c.re,
            q_component: c.im,
        }
    }
}

/// Two-sided 95% confidence bounds on a probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, p: f64) -> bool {
        p >= self.lo && p <= self.hi
    }
}

/// Wilson score interval for `errors` successes in `n` trials.
pub fn wilson_interval(errors: u64, n: u64) -> Interval {
    if n == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let n = n as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        lo: (center - half).max(0.0).min(p),
        hi: (center + half).min(1.0).max(p),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    /// Symbols exchanged.
    pub trials: u64,
    /// k · trials.
    pub bits: u64,
    pub bit_errors_master: u64,
    pub bit_errors_eve: u64,
    pub ber_master: f64,
    pub ber_eve: f64,
    pub ci_master: Interval,
    pub ci_eve: Interval,
}

impl SimResult {
    fn from_counts(trials: u64, k: u32, errors_master: u64, errors_eve: u64) -> Self {
        let bits = trials * k as u64;
        Self {
            trials,
            bits,
            bit_errors_master: errors_master,
            bit_errors_eve: errors_eve,
            ber_master: errors_master as f64 / bits as f64,
            ber_eve: errors_eve as f64 / bits as f64,
            ci_master: wilson_interval(errors_master, bits),
            ci_eve: wilson_interval(errors_eve, bits),
        }
    }
}

/// Per-run constants derived from the link budget.
struct Link {
    scheme: ModScheme<f64>,
    eve_signal: f64,
    eve_interference: f64,
    master_signal: f64,
    residual: f64,
    noise_sigma: f64,
    /// θ_b / θ_b-Eve when the genie rescales, else `None`.
    genie_stretch: Option<f64>,
}

impl Link {
    fn new(cfg: &TrialConfig) -> Result<Self> {
        let s = &cfg.scenario;
        let eve_pos = s.eve.position;
        let g = s.eve.rx_gain;
        let gain = |tx, pos, rx_gain, what| {
            channel_gain(tx, pos, rx_gain, &s.radio).map_err(|_| Error::CoincidentPoints(what))
        };
        let p_se = s.slave.tx_power * gain(&s.slave, eve_pos, g, "eve and slave")?;
        let p_ie = s.master.tx_power * gain(&s.master, eve_pos, g, "eve and master")?;
        let p_sm = s.slave.tx_power
            * gain(&s.slave, s.master.position, s.master.rx_gain, "master and slave")?;

        let genie_stretch = match cfg.eve_decoder {
            EveDecoder::NaiveFullRange => None,
            EveDecoder::GenieRescaled
                if matches!(cfg.interference_phase, InterferencePhase::FixedAngle(_)) =>
            {
                let sir = sir_at_eve(s, eve_pos)?;
                if sir < 1.0 {
                    let range = eve_effective_range(&s.scheme, sir, cfg.phase_model)?;
                    (range > 0.0).then(|| s.scheme.theta_b() / range)
                } else {
                    None
                }
            }
            EveDecoder::GenieRescaled => None,
        };
        let noise_sigma = if cfg.thermal_noise {
            (0.5 * s.radio.noise_power).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            scheme: s.scheme,
            eve_signal: p_se.sqrt(),
            eve_interference: p_ie.sqrt(),
            master_signal: p_sm.sqrt(),
            residual: (s.sic_rejection * s.master.tx_power).sqrt(),
            noise_sigma,
            genie_stretch,
        })
    }
}

fn noise<R: Rng>(rng: &mut R, sigma: f64) -> Complex64 {
    if sigma == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * sigma, im * sigma)
}

fn uniform_phase<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-PI..PI)
}

/// ChaCha8 key for a run seed. Sweeps fold the point index into the seed
/// with [`sub_seed`].
fn key_for(seed: u64) -> [u8; 32] {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(b"phykeyMC");
    key
}

/// Independent seed for the `index`-th point of a sweep (SplitMix64 mix).
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_block(cfg: &TrialConfig, link: &Link, block: u64) -> Result<(u64, u64)> {
    let mut rng = ChaCha8Rng::from_seed(key_for(cfg.seed));
    rng.set_stream(block);
    let start = block * BLOCK;
    let end = (start + BLOCK).min(cfg.n_symbols);
    let scheme = &link.scheme;
    let (mut err_m, mut err_e) = (0u64, 0u64);
    for _ in start..end {
        let symbol = rng.random_range(0..scheme.m());
        let phi = place_phase(scheme, symbol, cfg.symbol_placement, &mut rng)?;
        let psi = match cfg.interference_phase {
            InterferencePhase::RandomPerSymbol => uniform_phase(&mut rng),
            InterferencePhase::FixedAngle(a) => a,
        };
        let residual = match cfg.residual_model {
            ResidualModel::UniformPhase => Complex64::from_polar(link.residual, uniform_phase(&mut rng)),
            ResidualModel::Gaussian => noise(&mut rng, link.residual * std::f64::consts::FRAC_1_SQRT_2),
        };
        let tx = Complex64::from_polar(1.0, phi);

        let y_eve = tx * link.eve_signal
            + Complex64::from_polar(link.eve_interference, psi)
            + noise(&mut rng, link.noise_sigma);
        let y_master = tx * link.master_signal + residual + noise(&mut rng, link.noise_sigma);

        let eve_phase = match link.genie_stretch {
            Some(stretch) => (y_eve * Complex64::from_polar(1.0, -psi)).arg() * stretch,
            None => y_eve.arg(),
        };
        err_e += bit_errors(symbol, decode_phase(scheme, eve_phase)) as u64;
        err_m += bit_errors(symbol, decode_phase(scheme, y_master.arg())) as u64;
    }
    Ok((err_m, err_e))
}

/// Runs one seeded key exchange and counts bit errors at both receivers.
pub fn run_exchange(cfg: &TrialConfig) -> Result<SimResult> {
    cfg.validate()?;
    let link = Link::new(cfg)?;
    let blocks = cfg.n_symbols.div_ceil(BLOCK);
    let (err_m, err_e) = (0..blocks)
        .into_par_iter()
        .map(|b| run_block(cfg, &link, b))
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(SimResult::from_counts(
        cfg.n_symbols,
        link.scheme.k(),
        err_m,
        err_e,
    ))
}

/// Swept variable of [`ber_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sweep {
    /// Noise-limited SNR at Eve, dB. The master is silenced and P_N is set so
    /// Eve's SNR equals each value.
    SinrDb(Vec<f64>),
    EvePositions(Vec<Point2<f64>>),
    /// P_I / P_S, linear; the master's power is rescaled.
    PowerRatio(Vec<f64>),
}

impl Sweep {
    pub fn len(&self) -> usize {
        match self {
            Sweep::SinrDb(v) | Sweep::PowerRatio(v) => v.len(),
            Sweep::EvePositions(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Scenario for sweep point `idx`.
    pub fn apply(&self, base: &Scenario<f64>, idx: usize) -> Result<Scenario<f64>> {
        let mut s = *base;
        match self {
            Sweep::SinrDb(v) => {
                let target = db_to_linear(v[idx]);
                if !(target > 0.0) || !target.is_finite() {
                    return Err(Error::invalid("sinr_db", "must be finite"));
                }
                s.master.tx_power = 0.0;
                let p_se = s.slave.tx_power
                    * channel_gain(&s.slave, s.eve.position, s.eve.rx_gain, &s.radio)?;
                s.radio.noise_power = p_se / target;
            }
            Sweep::EvePositions(v) => s.eve.position = v[idx],
            Sweep::PowerRatio(v) => {
                if !(v[idx] >= 0.0) || !v[idx].is_finite() {
                    return Err(Error::invalid("p_ratio", "must be finite and ≥ 0"));
                }
                s.master.tx_power = v[idx] * s.slave.tx_power;
            }
        }
        s.validate()?;
        Ok(s)
    }
}

/// One [`run_exchange`] per sweep point, seeded with [`sub_seed`] of the
/// point index. Output order follows the sweep.
pub fn ber_sweep(cfg: &TrialConfig, sweep: &Sweep) -> Result<Vec<SimResult>> {
    if sweep.is_empty() {
        return Err(Error::invalid("sweep", "must contain at least one point"));
    }
    (0..sweep.len())
        .map(|i| {
            let point = TrialConfig {
                scenario: sweep.apply(&cfg.scenario, i)?,
                seed: sub_seed(cfg.seed, i as u64),
                ..*cfg
            };
            run_exchange(&point)
        })
        .collect()
}

/// Noiseless received phase for one generated phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseDynamicsRow {
    pub generated: f64,
    pub master: f64,
    pub eve: f64,
}

/// Received phase versus generated phase, without noise.
///
/// Eve's phase is measured relative to the interference bearing ψ, i.e.
/// `arg(A_I + A_S e^{j(φ−ψ)})`; in random-phase mode ψ is taken as −π/2,
/// the orthogonal geometry that maximizes the deviation over φ ∈ [0, π/2].
/// The master sees its residual at the same bearing.
pub fn phase_dynamics(cfg: &TrialConfig, generated: &[f64]) -> Result<Vec<PhaseDynamicsRow>> {
    if generated.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("phase sweep", "must be strictly increasing"));
    }
    cfg.validate()?;
    let link = Link::new(cfg)?;
    let psi = match cfg.interference_phase {
        InterferencePhase::RandomPerSymbol => -FRAC_PI_2,
        InterferencePhase::FixedAngle(a) => a,
    };
    Ok(generated
        .iter()
        .map(|&phi| {
            let eve = Complex64::new(link.eve_interference, 0.0)
                + Complex64::from_polar(link.eve_signal, phi - psi);
            let master = Complex64::from_polar(link.master_signal, phi)
                + Complex64::from_polar(link.residual, psi);
            PhaseDynamicsRow {
                generated: phi,
                master: master.arg(),
                eve: eve.arg(),
            }
        })
        .collect())
}

/// First `x` at which the piecewise-linear curve `(xs, ys)` reaches `level`.
pub fn first_crossing(xs: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    xs.windows(2).zip(ys.windows(2)).find_map(|(x, y)| {
        let (a, b) = (y[0] - level, y[1] - level);
        if a == 0.0 {
            Some(x[0])
        } else if a * b < 0.0 || b == 0.0 {
            Some(x[0] + (x[1] - x[0]) * a / (a - b))
        } else {
            None
        }
    })
}
