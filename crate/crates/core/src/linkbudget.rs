//! Free-space link budget: channel gains, antenna patterns and the power
//! ratios (SNR, SIR, SINR) seen by Eve and by the master.
//!
//! All quantities are linear and in SI units: watts, meters, radians.
//! Conversions from dB, dBm and degrees happen at the file/CLI boundary.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modem::ModScheme;
use crate::num::{wrap_angle, Point2, Real};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default carrier of the reference hardware, Hz.
pub const DEFAULT_CARRIER_HZ: f64 = 2.4e9;

/// Floor of the sector model outside the main lobe, relative to boresight.
pub const DEFAULT_SECTOR_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadioParams<T> {
    /// Carrier wavelength λ, meters.
    pub wavelength: T,
    /// Noise power P_N at any receiver, watts.
    pub noise_power: T,
}

impl<T: Real> RadioParams<T> {
    pub fn new(wavelength: T, noise_power: T) -> Result<Self> {
        let radio = Self {
            wavelength,
            noise_power,
        };
        radio.validate()?;
        Ok(radio)
    }

    pub fn from_frequency(carrier_hz: T, noise_power: T) -> Result<Self> {
        if !(carrier_hz > T::zero()) || !carrier_hz.is_finite() {
            return Err(Error::invalid("carrier frequency", "must be positive"));
        }
        Self::new(T::lit(SPEED_OF_LIGHT) / carrier_hz, noise_power)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > T::zero()) || !self.wavelength.is_finite() {
            return Err(Error::invalid("wavelength", "must be positive and finite"));
        }
        if !(self.noise_power > T::zero()) || !self.noise_power.is_finite() {
            return Err(Error::invalid("noise power", "must be positive and finite"));
        }
        Ok(())
    }

    /// The (λ/4π)² free-space factor.
    pub fn free_space_factor(&self) -> T {
        let k = self.wavelength / (T::lit(4.0) * T::PI());
        k * k
    }
}

/// Transmit gain pattern in the plane.
///
/// `Directional` is an ideal sector: `boresight_gain` for azimuths within
/// ±θ_d/2 of boresight, `floor_gain` everywhere else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AntennaPattern<T> {
    Omni {
        gain: T,
    },
    Directional {
        boresight_gain: T,
        boresight_azimuth: T,
        directivity_angle: T,
        floor_gain: T,
    },
}

impl<T: Real> AntennaPattern<T> {
    pub fn omni(gain: T) -> Self {
        AntennaPattern::Omni { gain }
    }

    /// Sector pattern with the default floor of 10⁻³ × boresight.
    pub fn sector(boresight_gain: T, boresight_azimuth: T, directivity_angle: T) -> Self {
        AntennaPattern::Directional {
            boresight_gain,
            boresight_azimuth,
            directivity_angle,
            floor_gain: boresight_gain * T::lit(DEFAULT_SECTOR_FLOOR),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AntennaPattern::Omni { gain } => {
                if !(gain > T::zero()) || !gain.is_finite() {
                    return Err(Error::invalid("antenna gain", "must be positive"));
                }
            }
            AntennaPattern::Directional {
                boresight_gain,
                boresight_azimuth,
                directivity_angle,
                floor_gain,
            } => {
                if !(boresight_gain > T::zero()) || !boresight_gain.is_finite() {
                    return Err(Error::invalid("boresight gain", "must be positive"));
                }
                if !(floor_gain > T::zero()) || floor_gain > boresight_gain {
                    return Err(Error::invalid(
                        "floor gain",
                        "must be positive and not exceed boresight gain",
                    ));
                }
                let two_pi = T::PI() + T::PI();
                if !(directivity_angle > T::zero()) || directivity_angle > two_pi {
                    return Err(Error::invalid("directivity angle", "must lie in (0, 2π]"));
                }
                if !boresight_azimuth.is_finite() {
                    return Err(Error::invalid("boresight azimuth", "must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Gain toward `azimuth` (radians, absolute).
    pub fn gain_toward(&self, azimuth: T) -> T {
        match *self {
            AntennaPattern::Omni { gain } => gain,
            AntennaPattern::Directional {
                boresight_gain,
                boresight_azimuth,
                directivity_angle,
                floor_gain,
            } => {
                let off = wrap_angle(azimuth - boresight_azimuth).abs();
                if off <= directivity_angle / T::lit(2.0) {
                    boresight_gain
                } else {
                    floor_gain
                }
            }
        }
    }

    /// Omni gain, or boresight gain for a sector.
    pub fn reference_gain(&self) -> T {
        match *self {
            AntennaPattern::Omni { gain } => gain,
            AntennaPattern::Directional { boresight_gain, .. } => boresight_gain,
        }
    }

    pub fn directivity_angle(&self) -> T {
        match *self {
            AntennaPattern::Omni { .. } => T::PI() + T::PI(),
            AntennaPattern::Directional {
                directivity_angle, ..
            } => directivity_angle,
        }
    }

    pub fn is_omni(&self) -> bool {
        matches!(self, AntennaPattern::Omni { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeSpec<T> {
    pub position: Point2<T>,
    /// Transmit power, watts. Zero for a passive node.
    pub tx_power: T,
    pub antenna: AntennaPattern<T>,
    /// Receive antenna gain G_r, linear.
    pub rx_gain: T,
}

impl<T: Real> NodeSpec<T> {
    pub fn new(position: Point2<T>, tx_power: T, antenna: AntennaPattern<T>, rx_gain: T) -> Self {
        Self {
            position,
            tx_power,
            antenna,
            rx_gain,
        }
    }

    /// Omni node with unit transmit and receive gain.
    pub fn omni(position: Point2<T>, tx_power: T) -> Self {
        Self::new(position, tx_power, AntennaPattern::omni(T::one()), T::one())
    }

    /// Passive omni receiver.
    pub fn passive(position: Point2<T>) -> Self {
        Self::omni(position, T::zero())
    }

    pub fn at(self, position: Point2<T>) -> Self {
        Self { position, ..self }
    }

    pub fn with_power(self, tx_power: T) -> Self {
        Self { tx_power, ..self }
    }

    pub fn validate(&self, role: &'static str) -> Result<()> {
        if !self.position.is_finite() {
            return Err(Error::invalid(role, "position must be finite"));
        }
        if !(self.tx_power >= T::zero()) || !self.tx_power.is_finite() {
            return Err(Error::invalid(role, "transmit power must be finite and ≥ 0"));
        }
        if !(self.rx_gain > T::zero()) || !self.rx_gain.is_finite() {
            return Err(Error::invalid(role, "receive gain must be positive"));
        }
        self.antenna.validate()
    }
}

/// Complete description of one master/slave/Eve configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario<T> {
    pub radio: RadioParams<T>,
    /// Interference broadcaster and intended receiver.
    pub master: NodeSpec<T>,
    /// Key-generating IoT node.
    pub slave: NodeSpec<T>,
    pub eve: NodeSpec<T>,
    pub scheme: ModScheme<T>,
    /// Residual fraction β_si of the master's own transmit power left after
    /// self-interference cancellation, 0 < β_si ≤ 1.
    pub sic_rejection: T,
}

impl<T: Real> Scenario<T> {
    pub fn new(
        radio: RadioParams<T>,
        master: NodeSpec<T>,
        slave: NodeSpec<T>,
        eve: NodeSpec<T>,
        scheme: ModScheme<T>,
        sic_rejection: T,
    ) -> Result<Self> {
        let s = Self {
            radio,
            master,
            slave,
            eve,
            scheme,
            sic_rejection,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.radio.validate()?;
        self.master.validate("master")?;
        self.slave.validate("slave")?;
        self.eve.validate("eve")?;
        if self.master.position == self.slave.position {
            return Err(Error::CoincidentPoints("master and slave"));
        }
        if !(self.sic_rejection > T::zero()) || self.sic_rejection > T::one() {
            return Err(Error::invalid("self-interference rejection", "β_si must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Master–slave separation d.
    pub fn d(&self) -> T {
        self.master.position.distance(&self.slave.position)
    }

    /// P_I G_I / (P_S G_S), the interference-to-signal power-gain ratio that
    /// sets the Apollonius threshold. Uses reference (omni or boresight) gains.
    pub fn power_gain_ratio(&self) -> T {
        let num = self.master.tx_power * self.master.antenna.reference_gain();
        let den = self.slave.tx_power * self.slave.antenna.reference_gain();
        num / den
    }

    pub fn with_eve_at(self, position: Point2<T>) -> Self {
        Self {
            eve: self.eve.at(position),
            ..self
        }
    }
}

/// Free-space channel gain γ = (λ/4π)² · G_tx(θ) · G_rx / r².
pub fn channel_gain<T: Real>(
    tx: &NodeSpec<T>,
    rx_position: Point2<T>,
    rx_gain: T,
    radio: &RadioParams<T>,
) -> Result<T> {
    let r = tx.position.distance(&rx_position);
    if !(r > T::zero()) {
        return Err(Error::CoincidentPoints("transmitter and receiver"));
    }
    let g_tx = tx.antenna.gain_toward(tx.position.bearing_to(&rx_position));
    Ok(radio.free_space_factor() * g_tx * rx_gain / (r * r))
}

/// Received power from `tx` at `rx_position`, watts.
pub fn received_power<T: Real>(
    tx: &NodeSpec<T>,
    rx_position: Point2<T>,
    rx_gain: T,
    radio: &RadioParams<T>,
) -> Result<T> {
    Ok(tx.tx_power * channel_gain(tx, rx_position, rx_gain, radio)?)
}

/// Noise-limited SNR, P_S γ / P_N.
pub fn snr_at<T: Real>(
    rx_position: Point2<T>,
    source: &NodeSpec<T>,
    rx_gain: T,
    radio: &RadioParams<T>,
) -> Result<T> {
    radio.validate()?;
    Ok(received_power(source, rx_position, rx_gain, radio)? / radio.noise_power)
}

fn eve_powers<T: Real>(scenario: &Scenario<T>, eve_position: Point2<T>) -> Result<(T, T)> {
    let g = scenario.eve.rx_gain;
    let p_s = received_power(&scenario.slave, eve_position, g, &scenario.radio)
        .map_err(|_| Error::CoincidentPoints("eve and slave"))?;
    let p_i = received_power(&scenario.master, eve_position, g, &scenario.radio)
        .map_err(|_| Error::CoincidentPoints("eve and master"))?;
    Ok((p_s, p_i))
}

/// Interference-limited SIR at Eve, P_S γ_SE / (P_I γ_IE).
///
/// Infinite when the master is silent.
pub fn sir_at_eve<T: Real>(scenario: &Scenario<T>, eve_position: Point2<T>) -> Result<T> {
    let (p_s, p_i) = eve_powers(scenario, eve_position)?;
    Ok(p_s / p_i)
}

/// SIR at Eve through the reduced distance-ratio form
/// (P_S G_S / P_I G_I)·(r_I/r_S)², valid for omni antennas.
pub fn sir_at_eve_ratio_form<T: Real>(scenario: &Scenario<T>, eve_position: Point2<T>) -> Result<T> {
    let r_s = scenario.slave.position.distance(&eve_position);
    let r_i = scenario.master.position.distance(&eve_position);
    if !(r_s > T::zero()) {
        return Err(Error::CoincidentPoints("eve and slave"));
    }
    if !(r_i > T::zero()) {
        return Err(Error::CoincidentPoints("eve and master"));
    }
    let ratio = r_i / r_s;
    Ok(ratio * ratio / scenario.power_gain_ratio())
}

/// SINR at Eve with both interference and receiver noise.
pub fn sinr_at_eve<T: Real>(scenario: &Scenario<T>, eve_position: Point2<T>) -> Result<T> {
    let (p_s, p_i) = eve_powers(scenario, eve_position)?;
    Ok(p_s / (p_i + scenario.radio.noise_power))
}

/// SIR of the slave's signal at the master against its own residual
/// self-interference: P_S γ_IS / (β_si P_I).
pub fn sir_at_master<T: Real>(scenario: &Scenario<T>) -> Result<T> {
    if !(scenario.sic_rejection > T::zero()) {
        return Err(Error::invalid("self-interference rejection", "β_si must be positive"));
    }
    let gamma = channel_gain(
        &scenario.slave,
        scenario.master.position,
        scenario.master.rx_gain,
        &scenario.radio,
    )
    .map_err(|_| Error::CoincidentPoints("master and slave"))?;
    Ok(scenario.slave.tx_power * gamma / (scenario.sic_rejection * scenario.master.tx_power))
}

/// Largest master–slave distance at which [`sir_at_master`] still reaches
/// `sir_min`.
pub fn max_comm_distance<T: Real>(scenario: &Scenario<T>, sir_min: T) -> Result<T> {
    if !(sir_min > T::zero()) {
        return Err(Error::invalid("sir_min", "must be positive"));
    }
    let toward_master = scenario
        .slave
        .position
        .bearing_to(&scenario.master.position);
    let g_s = scenario.slave.antenna.gain_toward(toward_master);
    let g_i = scenario.master.rx_gain;
    let k = scenario.radio.wavelength / (T::lit(4.0) * T::PI());
    Ok(k * (g_s * g_i * scenario.slave.tx_power
        / (scenario.sic_rejection * scenario.master.tx_power * sir_min))
        .sqrt())
}

/// Noise-limited reach of `source` along its boresight for an eavesdropper
/// (or receiver) that needs `snr_min`.
pub fn max_eavesdrop_distance_directional<T: Real>(
    source: &NodeSpec<T>,
    radio: &RadioParams<T>,
    snr_min: T,
    rx_gain: T,
) -> Result<T> {
    if !(snr_min > T::zero()) {
        return Err(Error::invalid("snr_min", "must be positive"));
    }
    radio.validate()?;
    let g = source.antenna.reference_gain();
    Ok((radio.free_space_factor() * g * rx_gain * source.tx_power / (snr_min * radio.noise_power))
        .sqrt())
}

/// Boresight azimuth of a node's pattern (0 for omni).
pub fn boresight_of<T: Real>(antenna: &AntennaPattern<T>) -> T {
    match *antenna {
        AntennaPattern::Omni { .. } => T::zero(),
        AntennaPattern::Directional {
            boresight_azimuth, ..
        } => boresight_azimuth,
    }
}
