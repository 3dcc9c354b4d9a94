//! Security-region geometry.
//!
//! With omni antennas and an interference-limited Eve, the set of positions
//! where SIR ≥ SIR_min is `{p : r_I(p)/r_S(p) ≥ α_r}`, an Apollonius circle
//! around the slave when α_r > 1. The directional baseline instead has a
//! sector of reach r_max. Security factors compare the eavesdropping area
//! (BER < 10⁻¹) with the reliable-communication area (BER < 10⁻³).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linkbudget::{
    boresight_of, max_eavesdrop_distance_directional, sir_at_eve, snr_at, NodeSpec, RadioParams,
    Scenario,
};
use crate::modem::{ber, eve_ber, ModScheme, PhaseMode};
use crate::num::{Point2, Real};

/// α_r = √(P_I G_I / (P_S G_S) · SIR_min).
///
/// A zero power ratio (silent master) is accepted and yields α_r = 0.
pub fn alpha_r<T: Real>(p_ratio: T, sir_min: T) -> Result<T> {
    if !(p_ratio >= T::zero()) || !p_ratio.is_finite() {
        return Err(Error::invalid("p_ratio", "must be finite and non-negative"));
    }
    if !(sir_min > T::zero()) || !sir_min.is_finite() {
        return Err(Error::invalid("sir_min", "must be positive"));
    }
    Ok((p_ratio * sir_min).sqrt())
}

/// Apollonius circle bounding the eavesdropping region.
///
/// For α_r > 1 the region is the disk; for α_r < 1 it is the exterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EveRegion<T> {
    pub center: Point2<T>,
    pub radius: T,
    pub alpha_r: T,
}

impl<T: Real> EveRegion<T> {
    /// Whether an eavesdropper at `p` meets the SIR threshold.
    pub fn contains(&self, p: &Point2<T>) -> bool {
        let inside = p.distance(&self.center) <= self.radius;
        if self.alpha_r > T::one() {
            inside
        } else {
            !inside
        }
    }

    /// Disk area π R² (the eavesdropping area when α_r > 1).
    pub fn area(&self) -> T {
        T::PI() * self.radius * self.radius
    }
}

/// Eavesdropping locus: a circle, or the half-plane on the slave's side of
/// the perpendicular bisector when α_r = 1 exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EveLocus<T> {
    Circle(EveRegion<T>),
    HalfPlane { slave: Point2<T>, master: Point2<T> },
}

impl<T: Real> EveLocus<T> {
    pub fn contains(&self, p: &Point2<T>) -> bool {
        match self {
            EveLocus::Circle(c) => c.contains(p),
            EveLocus::HalfPlane { slave, master } => p.distance(master) >= p.distance(slave),
        }
    }

    pub fn circle(&self) -> Option<&EveRegion<T>> {
        match self {
            EveLocus::Circle(c) => Some(c),
            EveLocus::HalfPlane { .. } => None,
        }
    }

    /// Moves a locus from the canonical frame (slave at the origin, master
    /// at (d, 0)) to the actual node positions.
    pub fn placed(&self, slave: Point2<T>, master: Point2<T>) -> Self {
        match *self {
            EveLocus::Circle(c) => {
                let d = slave.distance(&master);
                let t = c.center.x / d;
                let off = c.center.y / d;
                let along = slave.lerp(&master, t);
                // Rotate the canonical y offset into the master-slave frame.
                let ux = (master.x - slave.x) / d;
                let uy = (master.y - slave.y) / d;
                let center = Point2::new(along.x - off * d * uy, along.y + off * d * ux);
                EveLocus::Circle(EveRegion { center, ..c })
            }
            EveLocus::HalfPlane { .. } => EveLocus::HalfPlane { slave, master },
        }
    }
}

/// Apollonius circle `{r_I / r_S = α_r}` in the canonical frame.
///
/// Radius |α_r/(α_r²−1)|·d, center at signed offset −d/(α_r²−1) from the
/// slave along the slave→master axis.
pub fn eavesdrop_circle<T: Real>(alpha_r: T, d: T) -> Result<EveLocus<T>> {
    if !(alpha_r > T::zero()) || !alpha_r.is_finite() {
        return Err(Error::invalid("alpha_r", "must be positive and finite"));
    }
    if !(d > T::zero()) || !d.is_finite() {
        return Err(Error::invalid("d", "must be positive"));
    }
    let slave = Point2::origin();
    let master = Point2::new(d, T::zero());
    if alpha_r == T::one() {
        return Ok(EveLocus::HalfPlane { slave, master });
    }
    let denom = alpha_r * alpha_r - T::one();
    Ok(EveLocus::Circle(EveRegion {
        center: Point2::new(-d / denom, T::zero()),
        radius: (alpha_r / denom).abs() * d,
        alpha_r,
    }))
}

/// Eavesdropping locus of a scenario for a given SIR threshold, placed at
/// the scenario's node positions.
pub fn eavesdrop_region<T: Real>(scenario: &Scenario<T>, sir_min: T) -> Result<EveLocus<T>> {
    let a = alpha_r(scenario.power_gain_ratio(), sir_min)?;
    if a == T::zero() {
        return Err(Error::invalid("alpha_r", "master is silent; every position is exposed"));
    }
    Ok(eavesdrop_circle(a, scenario.d())?.placed(scenario.slave.position, scenario.master.position))
}

/// Which security technique a report describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeTag {
    Proposed,
    Directional,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecurityReport<T> {
    pub scheme: SchemeTag,
    /// m², infinite when the eavesdropping region is unbounded.
    pub eavesdrop_area: T,
    pub comm_area: T,
    pub security_factor: T,
    pub secure: bool,
    pub diagnostic: Option<String>,
}

impl<T: Real> SecurityReport<T> {
    fn new(scheme: SchemeTag, eavesdrop_area: T, comm_area: T) -> Self {
        let sf = eavesdrop_area / comm_area;
        Self {
            scheme,
            eavesdrop_area,
            comm_area,
            security_factor: sf,
            secure: sf < T::one(),
            diagnostic: None,
        }
    }

    pub fn from_sectors(eve: &SectorRegion<T>, comm: &SectorRegion<T>) -> Self {
        Self::new(SchemeTag::Directional, eve.area(), comm.area())
    }
}

/// Circular sector of reach `r_max` around a directional transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorRegion<T> {
    pub apex: Point2<T>,
    pub boresight: T,
    /// θ_d / 2.
    pub half_angle: T,
    pub r_max: T,
}

impl<T: Real> SectorRegion<T> {
    /// (θ_d/2)·r_max².
    pub fn area(&self) -> T {
        self.half_angle * self.r_max * self.r_max
    }
}

/// Security factor of the interference scheme.
///
/// Eavesdropping area π R_E² against a communication disk π d_max² around
/// the master. With d = d_max this is |α_r/(1−α_r²)|² ≈ 1/α_r². For α_r ≤ 1
/// the eavesdropping region is unbounded and the report carries an infinite
/// factor and a diagnostic.
pub fn security_factor_proposed<T: Real>(alpha_r: T, d: T, d_max: T) -> Result<SecurityReport<T>> {
    if !(alpha_r >= T::zero()) || !alpha_r.is_finite() {
        return Err(Error::invalid("alpha_r", "must be finite and non-negative"));
    }
    if !(d > T::zero()) || !(d_max > T::zero()) {
        return Err(Error::invalid("d", "distances must be positive"));
    }
    let tol = T::lit(1e-12) * d_max;
    if d > d_max + tol {
        return Err(Error::invalid(
            "d",
            format!(
                "node separation {} exceeds the reliable range {}",
                d.to_f64_lossy(),
                d_max.to_f64_lossy()
            ),
        ));
    }
    let comm_area = T::PI() * d_max * d_max;
    if alpha_r <= T::one() {
        let mut r = SecurityReport::new(SchemeTag::Proposed, T::infinity(), comm_area);
        r.security_factor = T::infinity();
        r.secure = false;
        r.diagnostic = Some(format!(
            "alpha_r = {} <= 1: interference too weak, the eavesdropping region is unbounded",
            alpha_r.to_f64_lossy()
        ));
        return Ok(r);
    }
    let radius = alpha_r / (alpha_r * alpha_r - T::one()) * d;
    let mut r = SecurityReport::new(SchemeTag::Proposed, T::PI() * radius * radius, comm_area);
    if !r.secure {
        r.diagnostic = Some("eavesdropping region is larger than the communication region".into());
    }
    Ok(r)
}

/// Security factor of the directional baseline.
///
/// Eve and the intended receiver share G_r and P_N, so the sector reaches
/// scale as 1/√SNR_min and θ_d cancels. Areas are reported for a unit link
/// (P_s·γ(1 m)/P_N = 1, full-circle sector); use [`directional_sectors`]
/// for absolute areas.
pub fn security_factor_directional<T: Real>(
    snr_min_comm: T,
    snr_min_eve: T,
) -> Result<SecurityReport<T>> {
    if !(snr_min_comm > T::zero()) || !(snr_min_eve > T::zero()) {
        return Err(Error::invalid("snr_min", "thresholds must be positive"));
    }
    let sector = |snr: T| SectorRegion {
        apex: Point2::origin(),
        boresight: T::zero(),
        half_angle: T::PI(),
        r_max: (T::one() / snr).sqrt(),
    };
    Ok(SecurityReport::from_sectors(
        &sector(snr_min_eve),
        &sector(snr_min_comm),
    ))
}

/// Eavesdropping and communication sectors of a directional transmitter.
pub fn directional_sectors<T: Real>(
    source: &NodeSpec<T>,
    radio: &RadioParams<T>,
    rx_gain: T,
    snr_min_comm: T,
    snr_min_eve: T,
) -> Result<(SectorRegion<T>, SectorRegion<T>)> {
    let half_angle = source.antenna.directivity_angle() / T::lit(2.0);
    let sector = |snr| -> Result<SectorRegion<T>> {
        Ok(SectorRegion {
            apex: source.position,
            boresight: boresight_of(&source.antenna),
            half_angle,
            r_max: max_eavesdrop_distance_directional(source, radio, snr, rx_gain)?,
        })
    };
    Ok((sector(snr_min_eve)?, sector(snr_min_comm)?))
}

/// Axis-aligned rectangle, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extent<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
}

impl<T: Real> Extent<T> {
    pub fn new(x_min: T, x_max: T, y_min: T, y_max: T) -> Result<Self> {
        let e = Self {
            x_min,
            x_max,
            y_min,
            y_max,
        };
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || !(x_max > x_min) || !(y_max > y_min) {
            return Err(Error::DegenerateExtent(format!(
                "[{}, {}] × [{}, {}]",
                x_min.to_f64_lossy(),
                x_max.to_f64_lossy(),
                y_min.to_f64_lossy(),
                y_max.to_f64_lossy()
            )));
        }
        Ok(e)
    }

    /// Square of half-width `half` centered on the master–slave midpoint.
    pub fn around_nodes(scenario: &Scenario<T>, half: T) -> Result<Self> {
        let c = scenario
            .slave
            .position
            .lerp(&scenario.master.position, T::lit(0.5));
        Self::new(c.x - half, c.x + half, c.y - half, c.y + half)
    }

    pub fn contains(&self, p: &Point2<T>) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn area(&self) -> T {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }
}

/// BER sampled at the cell centers of a regular grid. `None` marks cells
/// whose center coincides with a node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerField<T> {
    pub extent: Extent<T>,
    pub nx: usize,
    pub ny: usize,
    pub scheme: SchemeTag,
    /// Row-major, `values[j * nx + i]` for column i, row j.
    pub values: Vec<Option<T>>,
}

impl<T: Real> BerField<T> {
    pub fn cell_size(&self) -> (T, T) {
        (
            (self.extent.x_max - self.extent.x_min) / T::lit(self.nx as f64),
            (self.extent.y_max - self.extent.y_min) / T::lit(self.ny as f64),
        )
    }

    pub fn cell_area(&self) -> T {
        let (dx, dy) = self.cell_size();
        dx * dy
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Point2<T> {
        cell_center(&self.extent, self.nx, self.ny, i, j)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        self.values[j * self.nx + i]
    }

    /// `(center, ber)` for every cell in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (Point2<T>, Option<T>)> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (self.cell_center(i, j), self.get(i, j))))
    }
}

fn cell_center<T: Real>(e: &Extent<T>, nx: usize, ny: usize, i: usize, j: usize) -> Point2<T> {
    let dx = (e.x_max - e.x_min) / T::lit(nx as f64);
    let dy = (e.y_max - e.y_min) / T::lit(ny as f64);
    Point2::new(
        e.x_min + dx * T::lit(i as f64 + 0.5),
        e.y_min + dy * T::lit(j as f64 + 0.5),
    )
}

/// Evaluates the BER an eavesdropper would see at every grid cell.
///
/// `Proposed`: SIR at Eve from both nodes, the M-PSK expression with θ_b
/// replaced by the compressed range. `Directional`: noise-limited SNR from
/// the slave's antenna pattern, conventional (θ_b = π) M-PSK, master silent.
pub fn ber_field<T: Real>(
    scenario: &Scenario<T>,
    extent: Extent<T>,
    resolution: usize,
    tag: SchemeTag,
) -> Result<BerField<T>> {
    ber_field_with_mode(scenario, extent, resolution, tag, PhaseMode::AmplitudeRatio)
}

pub fn ber_field_with_mode<T: Real>(
    scenario: &Scenario<T>,
    extent: Extent<T>,
    resolution: usize,
    tag: SchemeTag,
    mode: PhaseMode,
) -> Result<BerField<T>> {
    if resolution < 2 {
        return Err(Error::invalid("resolution", "need at least 2 points per axis"));
    }
    let extent = Extent::new(extent.x_min, extent.x_max, extent.y_min, extent.y_max)?;
    if !extent.contains(&scenario.master.position) || !extent.contains(&scenario.slave.position) {
        return Err(Error::DegenerateExtent("extent must enclose both nodes".into()));
    }
    let conventional = ModScheme::conventional(scenario.scheme.m())?;
    let n = resolution;
    let point_ber = |p: Point2<T>| -> Option<T> {
        if p == scenario.slave.position || p == scenario.master.position {
            return None;
        }
        match tag {
            SchemeTag::Proposed => {
                let sir = sir_at_eve(scenario, p).ok()?;
                eve_ber(&scenario.scheme, sir, mode).ok()
            }
            SchemeTag::Directional => {
                let snr = snr_at(p, &scenario.slave, scenario.eve.rx_gain, &scenario.radio).ok()?;
                Some(ber(&conventional, snr))
            }
        }
    };
    let values: Vec<Option<T>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|j| (0..n).map(move |i| (i, j)))
        .map(|(i, j)| point_ber(cell_center(&extent, n, n, i, j)))
        .collect();
    Ok(BerField {
        extent,
        nx: n,
        ny: n,
        scheme: tag,
        values,
    })
}

/// Which side of a BER cut to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSide {
    Below,
    Above,
}

/// Cell-counting area of `{BER < cut}` or `{BER > cut}`.
pub fn region_area_from_field<T: Real>(field: &BerField<T>, ber_cut: T, side: CutSide) -> T {
    let count = field
        .values
        .iter()
        .filter(|v| match (v, side) {
            (Some(b), CutSide::Below) => *b < ber_cut,
            (Some(b), CutSide::Above) => *b > ber_cut,
            (None, _) => false,
        })
        .count();
    T::lit(count as f64) * field.cell_area()
}
