//! Phase-domain modulation: restricted-range M-PSK error rates, the phase
//! compression an interferer imposes on Eve, and the gray-coded
//! continuous-phase key codec.
//!
//! A scheme with constellation size M and range θ_b splits (−θ_b, θ_b] into
//! M half-open arcs `(−θ_b + i·w, −θ_b + (i+1)·w]`, `w = 2θ_b/M`. Arc `i`
//! carries the reflected gray code of `i`, so for M = 4 the arcs read
//! 00, 01, 11, 10 from −θ_b upward.

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::special::q_function;

/// Constellation size and phase range of the slave's modulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModScheme<T> {
    m: usize,
    k: u32,
    theta_b: T,
}

impl<T: Real> ModScheme<T> {
    pub fn new(m: usize, theta_b: T) -> Result<Self> {
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::invalid("M", format!("{m} is not a power of two ≥ 2")));
        }
        if !(theta_b > T::zero()) || theta_b > T::PI() {
            return Err(Error::invalid("theta_b", "must lie in (0, π]"));
        }
        Ok(Self {
            m,
            k: m.trailing_zeros(),
            theta_b,
        })
    }

    /// Conventional M-PSK, θ_b = π.
    pub fn conventional(m: usize) -> Result<Self> {
        Self::new(m, T::PI())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Bits per symbol, log2(M).
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn theta_b(&self) -> T {
        self.theta_b
    }

    pub fn with_theta_b(&self, theta_b: T) -> Result<Self> {
        Self::new(self.m, theta_b)
    }

    /// Width of one decision arc, 2θ_b/M.
    pub fn arc_width(&self) -> T {
        (self.theta_b + self.theta_b) / T::lit(self.m as f64)
    }

    /// Lower (open) and upper (closed) edge of arc `symbol`.
    pub fn arc_bounds(&self, symbol: usize) -> (T, T) {
        let w = self.arc_width();
        let lo = -self.theta_b + w * T::lit(symbol as f64);
        (lo, lo + w)
    }

    pub fn arc_center(&self, symbol: usize) -> T {
        let w = self.arc_width();
        -self.theta_b + w * T::lit(symbol as f64 + 0.5)
    }

    /// Saturation value of the BER curve, 1/k.
    pub fn ber_ceiling(&self) -> T {
        T::one() / T::lit(self.k as f64)
    }

    fn check_symbol(&self, symbol: usize) -> Result<()> {
        if symbol >= self.m {
            return Err(Error::SymbolOutOfRange { symbol, m: self.m });
        }
        Ok(())
    }
}

/// Reflected binary gray code.
pub fn gray_code(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Bit errors between two decided symbols under the gray labelling.
pub fn bit_errors(tx: usize, rx: usize) -> u32 {
    (gray_code(tx) ^ gray_code(rx)).count_ones()
}

/// `(1/k)·2·Q(√(2·sinr)·sin(θ/M))` with an explicit phase range θ ≥ 0.
///
/// θ = 0 gives the saturated value 1/k.
pub fn ber_at_range<T: Real>(scheme: &ModScheme<T>, theta: T, sinr: T) -> T {
    debug_assert!(sinr >= T::zero(), "SINR must be non-negative");
    let arg = (T::lit(2.0) * sinr).sqrt() * (theta / T::lit(scheme.m as f64)).sin();
    T::lit(2.0) / T::lit(scheme.k as f64) * q_function(arg)
}

/// Restricted-phase-range M-PSK bit error rate.
pub fn ber<T: Real>(scheme: &ModScheme<T>, sinr: T) -> T {
    ber_at_range(scheme, scheme.theta_b, sinr)
}

/// Inverts a BER curve that decreases monotonically from `ceiling` at x = 0.
fn invert_decreasing<T: Real>(target: T, ceiling: T, f: impl Fn(T) -> T) -> Result<T> {
    if !(target > T::zero()) || !target.is_finite() {
        return Err(Error::invalid("ber_target", "must be positive"));
    }
    if target >= ceiling {
        return Err(Error::Unattainable {
            target: target.to_f64_lossy(),
            ceiling: ceiling.to_f64_lossy(),
        });
    }
    // Bracket in log-SINR, then bisect.
    let mut lo = T::lit(1e-12);
    let mut hi = T::one();
    while f(lo) < target {
        lo = lo * T::lit(1e-3);
        if lo < T::min_positive_value() {
            return Err(Error::Unattainable {
                target: target.to_f64_lossy(),
                ceiling: ceiling.to_f64_lossy(),
            });
        }
    }
    while f(hi) > target {
        hi = hi * T::lit(10.0);
        if !hi.is_finite() {
            return Err(Error::Unattainable {
                target: target.to_f64_lossy(),
                ceiling: T::zero().to_f64_lossy(),
            });
        }
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let mid = (a + b) / T::lit(2.0);
        if mid <= a || mid >= b {
            break;
        }
        if f(mid.exp()) > target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(((a + b) / T::lit(2.0)).exp())
}

/// SINR at which [`ber`] equals `ber_target`.
pub fn sinr_threshold<T: Real>(scheme: &ModScheme<T>, ber_target: T) -> Result<T> {
    invert_decreasing(ber_target, scheme.ber_ceiling(), |s| ber(scheme, s))
}

/// How the compressed phase range at Eve is computed from her SIR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMode {
    /// arcsin(√SIR): the largest deviation of the sum of an interference
    /// phasor and a weaker signal phasor of amplitude ratio √SIR.
    #[default]
    AmplitudeRatio,
    /// arcsin(SIR), the power ratio fed straight into the arcsine.
    PowerRatio,
}

/// Maximum phase swing Eve can observe when the master's interference is
/// stronger than the slave's signal; saturates at π/2.
pub fn eve_phase_range<T: Real>(sir_eve: T, mode: PhaseMode) -> Result<T> {
    if !(sir_eve >= T::zero()) {
        return Err(Error::invalid("sir_eve", "must be non-negative"));
    }
    let arg = match mode {
        PhaseMode::AmplitudeRatio => sir_eve.sqrt(),
        PhaseMode::PowerRatio => sir_eve,
    };
    Ok(arg.min(T::one()).asin())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvePhaseModel<T> {
    pub mode: PhaseMode,
    pub compressed_theta_b: T,
}

impl<T: Real> EvePhaseModel<T> {
    pub fn new(sir_eve: T, mode: PhaseMode) -> Result<Self> {
        Ok(Self {
            mode,
            compressed_theta_b: eve_phase_range(sir_eve, mode)?,
        })
    }
}

/// The phase range Eve effectively decodes against: the compressed range,
/// never wider than what the slave transmits.
pub fn eve_effective_range<T: Real>(scheme: &ModScheme<T>, sir_eve: T, mode: PhaseMode) -> Result<T> {
    Ok(eve_phase_range(sir_eve, mode)?.min(scheme.theta_b))
}

/// Analytic BER at Eve: the M-PSK expression evaluated at her SIR with θ_b
/// replaced by the compressed range.
pub fn eve_ber<T: Real>(scheme: &ModScheme<T>, sir_eve: T, mode: PhaseMode) -> Result<T> {
    if sir_eve.is_infinite() {
        return Ok(T::zero());
    }
    let theta = eve_effective_range(scheme, sir_eve, mode)?;
    Ok(ber_at_range(scheme, theta, sir_eve))
}

/// SIR at which [`eve_ber`] equals `ber_target`. Every point with a larger
/// SIR sees a lower BER, so this is the SIR_min of the eavesdropping region
/// under the compressed-range model.
pub fn eve_sir_threshold<T: Real>(scheme: &ModScheme<T>, ber_target: T, mode: PhaseMode) -> Result<T> {
    invert_decreasing(ber_target, scheme.ber_ceiling(), |s| {
        eve_ber(scheme, s, mode).unwrap_or(T::nan())
    })
}

/// Where inside its arc a symbol's phase is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolPlacement {
    /// Uniformly random within the arc (the key-generation protocol).
    #[default]
    Continuous,
    /// The arc's midpoint, i.e. a conventional PSK constellation point.
    ArcCenter,
}

/// Picks the transmit phase for `symbol`.
pub fn place_phase<T: Real, R: Rng + ?Sized>(
    scheme: &ModScheme<T>,
    symbol: usize,
    placement: SymbolPlacement,
    rng: &mut R,
) -> Result<T> {
    scheme.check_symbol(symbol)?;
    match placement {
        SymbolPlacement::ArcCenter => Ok(scheme.arc_center(symbol)),
        SymbolPlacement::Continuous => {
            let (lo, hi) = scheme.arc_bounds(symbol);
            loop {
                let u: f64 = rng.sample(Open01);
                let phi = lo + (hi - lo) * T::lit(u);
                // Rounding can land exactly on the open edge.
                if phi > lo && phi <= hi && decode_phase(scheme, phi) == symbol {
                    return Ok(phi);
                }
            }
        }
    }
}

/// A block of key material: region indices, their gray-coded bits
/// (MSB first, k per symbol) and the transmitted phases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyStream<T> {
    pub symbols: Vec<usize>,
    pub bits: Vec<u8>,
    pub phases: Vec<T>,
}

/// Gray-coded bits of one symbol, MSB first.
pub fn symbol_bits(scheme_k: u32, symbol: usize) -> impl Iterator<Item = u8> {
    let g = gray_code(symbol);
    (0..scheme_k).rev().map(move |b| ((g >> b) & 1) as u8)
}

/// Maps symbols to continuous random phases inside their arcs.
pub fn encode_key<T: Real, R: Rng + ?Sized>(
    scheme: &ModScheme<T>,
    symbols: &[usize],
    rng: &mut R,
) -> Result<KeyStream<T>> {
    let mut phases = Vec::with_capacity(symbols.len());
    let mut bits = Vec::with_capacity(symbols.len() * scheme.k as usize);
    for &s in symbols {
        phases.push(place_phase(scheme, s, SymbolPlacement::Continuous, rng)?);
        bits.extend(symbol_bits(scheme.k, s));
    }
    Ok(KeyStream {
        symbols: symbols.to_vec(),
        bits,
        phases,
    })
}

/// Index of the arc containing `phase`, after clamping into (−θ_b, θ_b].
pub fn decode_phase<T: Real>(scheme: &ModScheme<T>, phase: T) -> usize {
    let tb = scheme.theta_b;
    let phase = phase.max(-tb).min(tb);
    let pos = (phase + tb) * T::lit(scheme.m as f64) / (tb + tb);
    let idx = pos.ceil().to_f64_lossy() - 1.0;
    if !(idx > 0.0) {
        0
    } else {
        (idx as usize).min(scheme.m - 1)
    }
}

/// Recovers symbols from measured phases.
pub fn decode_key<T: Real>(scheme: &ModScheme<T>, phases: &[T]) -> Vec<usize> {
    phases.iter().map(|&p| decode_phase(scheme, p)).collect()
}

/// Probability that Eve receives an entire `key_bits`-bit key without error.
pub fn key_intercept_probability<T: Real>(ber_eve: T, key_bits: u32) -> Result<T> {
    if !(ber_eve >= T::zero() && ber_eve <= T::one()) {
        return Err(Error::invalid("ber_eve", "must lie in [0, 1]"));
    }
    if key_bits == 0 {
        return Err(Error::invalid("key_bits", "must be at least 1"));
    }
    Ok((T::one() - ber_eve).powi(key_bits as i32))
}
