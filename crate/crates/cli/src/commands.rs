//! Subcommand implementations. Each returns the artifacts it produces as
//! strings so the caller decides where they go.

use phykey::geometry::{
    alpha_r, ber_field_with_mode, directional_sectors, eavesdrop_region, region_area_from_field,
    security_factor_directional, security_factor_proposed, CutSide, EveLocus, Extent, SchemeTag,
    SectorRegion, SecurityReport,
};
use phykey::linkbudget::max_comm_distance;
use phykey::modem::{ber, eve_sir_threshold, key_intercept_probability, sinr_threshold, ModScheme};
use phykey::num::{db_to_linear, linear_to_db};
use phykey::simkernel::{ber_sweep, Sweep};
use phykey::Point2;
use serde::Serialize;

use crate::error::CliError;
use crate::scenario_file::Loaded;
use crate::table::{fmt_g9, Table};

/// BER that bounds the eavesdropping region.
pub const EVE_BER: f64 = 1e-1;
/// BER that bounds reliable communication.
pub const COMM_BER: f64 = 1e-3;
/// Key length used for the intercept annotation.
pub const KEY_BITS: u32 = 100;

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn parse_f64(s: &str, what: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| input(format!("{what}: cannot parse '{s}' as a number")))
}

/// `start:stop:points` linear spacing, or a comma list (which may hold
/// `-inf`).
pub fn parse_range(spec: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, points] => {
            let a = parse_f64(start, what)?;
            let b = parse_f64(stop, what)?;
            let n: usize = points
                .trim()
                .parse()
                .map_err(|_| input(format!("{what}: point count '{points}' is not an integer")))?;
            if n == 0 || !a.is_finite() || !b.is_finite() {
                return Err(input(format!("{what}: need finite bounds and at least one point")));
            }
            if n == 1 {
                vec![a]
            } else {
                (0..n)
                    .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        }
        [list] => list
            .split(',')
            .map(|v| parse_f64(v, what))
            .collect::<Result<_, _>>()?,
        _ => return Err(input(format!("{what}: expected start:stop:points or a comma list"))),
    };
    if values.iter().any(|v: &f64| v.is_nan()) {
        return Err(input(format!("{what}: NaN is not allowed")));
    }
    Ok(values)
}

/// Analytic BER curves: one column per phase range.
pub fn ber_curve(m: usize, theta_b_deg: &[f64], sinr_db: &[f64]) -> Result<String, CliError> {
    if theta_b_deg.is_empty() || sinr_db.is_empty() {
        return Err(input("ber-curve: need at least one θ_b and one SINR value"));
    }
    let schemes = theta_b_deg
        .iter()
        .map(|&t| ModScheme::new(m, t.to_radians()).map_err(|e| input(format!("--theta-b-deg {t}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut header = vec!["sinr_db".to_string()];
    header.extend(theta_b_deg.iter().map(|t| format!("ber_theta_{}", fmt_g9(*t))));
    let mut table = Table::new(header);
    for &db in sinr_db {
        let sinr = db_to_linear(db);
        let mut row = vec![db];
        row.extend(schemes.iter().map(|s| ber(s, sinr)));
        table.push(row);
    }
    Ok(table.to_csv())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapScheme {
    Proposed,
    Directional,
}

#[derive(Serialize)]
struct FieldSummary {
    resolution: usize,
    extent: Extent<f64>,
    /// Cell-count area with BER < 10⁻¹.
    eavesdrop_area_m2: f64,
    /// Cell-count area with BER < 10⁻³.
    reliable_area_m2: f64,
}

#[derive(Serialize)]
struct ModelRegion {
    /// SIR at which the compressed-range BER equals 10⁻¹.
    eve_sir_threshold_db: f64,
    alpha_r: f64,
    region: Option<EveLocus<f64>>,
    radius_over_d: Option<f64>,
}

#[derive(Serialize)]
struct ProposedSidecar {
    scheme: SchemeTag,
    d_m: f64,
    power_gain_ratio: f64,
    sir_min_db: f64,
    alpha_r: f64,
    region: Option<EveLocus<f64>>,
    radius_over_d: Option<f64>,
    d_max_m: f64,
    /// Security factor with d = d_max.
    security: SecurityReport<f64>,
    /// Security factor at the scenario's own separation, if d ≤ d_max.
    security_at_d: Option<SecurityReport<f64>>,
    model: ModelRegion,
    field: FieldSummary,
}

#[derive(Serialize)]
struct DirectionalSidecar {
    scheme: SchemeTag,
    eve_snr_min_db: f64,
    comm_snr_min_db: f64,
    eve_sector: SectorRegion<f64>,
    comm_sector: SectorRegion<f64>,
    security: SecurityReport<f64>,
    /// Factor from the BER-curve thresholds of conventional M-PSK.
    model_security: SecurityReport<f64>,
    model_eve_snr_db: f64,
    model_comm_snr_db: f64,
    field: FieldSummary,
}

fn radius_over_d(locus: &Option<EveLocus<f64>>, d: f64) -> Option<f64> {
    locus.as_ref().and_then(|l| l.circle()).map(|c| c.radius / d)
}

fn locus_for(loaded: &Loaded, sir_min: f64) -> Result<(f64, Option<EveLocus<f64>>), CliError> {
    let s = loaded.scenario();
    let a = alpha_r(s.power_gain_ratio(), sir_min)?;
    let locus = if a > 0.0 {
        Some(eavesdrop_region(s, sir_min)?)
    } else {
        None
    };
    Ok((a, locus))
}

struct ProposedReports {
    alpha_r: f64,
    d_max: f64,
    /// With d = d_max.
    normalized: SecurityReport<f64>,
    /// At the scenario's separation; `None` when d > d_max.
    at_d: Option<SecurityReport<f64>>,
}

fn proposed_reports(loaded: &Loaded) -> Result<ProposedReports, CliError> {
    let s = loaded.scenario();
    let alpha_r = alpha_r(s.power_gain_ratio(), loaded.analysis.eve_threshold)?;
    let d_max = max_comm_distance(s, loaded.analysis.comm_threshold)?;
    Ok(ProposedReports {
        alpha_r,
        d_max,
        normalized: security_factor_proposed(alpha_r, d_max, d_max)?,
        at_d: security_factor_proposed(alpha_r, s.d(), d_max).ok(),
    })
}

fn directional_reports(loaded: &Loaded) -> Result<SecurityReport<f64>, CliError> {
    Ok(security_factor_directional(
        loaded.analysis.comm_threshold,
        loaded.analysis.eve_threshold,
    )?)
}

/// BER map as long-format CSV plus the analytic sidecar JSON.
pub fn region_map(
    loaded: &Loaded,
    scheme: MapScheme,
    half_extent: Option<f64>,
    resolution: usize,
) -> Result<(String, String), CliError> {
    let s = loaded.scenario();
    let d = s.d();
    let half = half_extent.unwrap_or(2.0 * d);
    if !(half > 0.0) || !half.is_finite() {
        return Err(input("--extent: must be a positive half-width in meters"));
    }
    let extent = Extent::around_nodes(s, half).map_err(|e| input(format!("--extent: {e}")))?;
    if !extent.contains(&s.master.position) || !extent.contains(&s.slave.position) {
        return Err(input("--extent: region must enclose both nodes"));
    }
    if resolution < 2 {
        return Err(input("--res: need at least 2 points per axis"));
    }
    let tag = match scheme {
        MapScheme::Proposed => SchemeTag::Proposed,
        MapScheme::Directional => SchemeTag::Directional,
    };
    let field = ber_field_with_mode(s, extent, resolution, tag, loaded.analysis.phase_model)?;
    let mut table = Table::new(vec!["x_m".into(), "y_m".into(), "ber".into()]);
    for (p, b) in field.iter() {
        table.push(vec![p.x, p.y, b.unwrap_or(f64::NAN)]);
    }
    let summary = FieldSummary {
        resolution,
        extent,
        eavesdrop_area_m2: region_area_from_field(&field, EVE_BER, CutSide::Below),
        reliable_area_m2: region_area_from_field(&field, COMM_BER, CutSide::Below),
    };

    let json = match scheme {
        MapScheme::Proposed => {
            let (a, locus) = locus_for(loaded, loaded.analysis.eve_threshold)?;
            let reports = proposed_reports(loaded)?;
            let star = eve_sir_threshold(&s.scheme, EVE_BER, loaded.analysis.phase_model)?;
            let (a_star, l_star) = locus_for(loaded, star)?;
            serde_json::to_string_pretty(&ProposedSidecar {
                scheme: tag,
                d_m: d,
                power_gain_ratio: s.power_gain_ratio(),
                sir_min_db: loaded.analysis.eve_threshold_db,
                alpha_r: a,
                radius_over_d: radius_over_d(&locus, d),
                region: locus,
                d_max_m: reports.d_max,
                security: reports.normalized,
                security_at_d: reports.at_d,
                model: ModelRegion {
                    eve_sir_threshold_db: linear_to_db(star),
                    alpha_r: a_star,
                    radius_over_d: radius_over_d(&l_star, d),
                    region: l_star,
                },
                field: summary,
            })
        }
        MapScheme::Directional => {
            let (eve_sector, comm_sector) = directional_sectors(
                &s.slave,
                &s.radio,
                s.eve.rx_gain,
                loaded.analysis.comm_threshold,
                loaded.analysis.eve_threshold,
            )?;
            let conventional = ModScheme::conventional(s.scheme.m())?;
            let comm = sinr_threshold(&conventional, COMM_BER)?;
            let eve = sinr_threshold(&conventional, EVE_BER)?;
            serde_json::to_string_pretty(&DirectionalSidecar {
                scheme: tag,
                eve_snr_min_db: loaded.analysis.eve_threshold_db,
                comm_snr_min_db: loaded.analysis.comm_threshold_db,
                eve_sector,
                comm_sector,
                security: directional_reports(loaded)?,
                model_security: security_factor_directional(comm, eve)?,
                model_eve_snr_db: linear_to_db(eve),
                model_comm_snr_db: linear_to_db(comm),
                field: summary,
            })
        }
    }
    .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok((table.to_csv(), json + "\n"))
}

/// Swept quantity of the `simulate` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Eve's distance from the slave toward the master, meters.
    EveDistance,
    /// Same, as a fraction of d.
    EveRatio,
    /// P_I / P_S in dB.
    PRatioDb,
    /// Noise-limited SNR at Eve with the master silent, dB.
    SinrDb,
}

impl SweepAxis {
    fn name(self) -> &'static str {
        match self {
            SweepAxis::EveDistance => "eve_distance_m",
            SweepAxis::EveRatio => "eve_distance_over_d",
            SweepAxis::PRatioDb => "p_ratio_db",
            SweepAxis::SinrDb => "sinr_db",
        }
    }
}

/// Parses `axis:start:stop:points`.
pub fn parse_sweep(spec: &str) -> Result<(SweepAxis, Vec<f64>), CliError> {
    let (axis, range) = spec
        .split_once(':')
        .ok_or_else(|| input("--sweep: expected axis:start:stop:points"))?;
    let axis = match axis {
        "eve-distance" => SweepAxis::EveDistance,
        "eve-ratio" => SweepAxis::EveRatio,
        "p-ratio-db" => SweepAxis::PRatioDb,
        "sinr-db" => SweepAxis::SinrDb,
        other => {
            return Err(input(format!(
                "--sweep: unknown axis '{other}' (eve-distance, eve-ratio, p-ratio-db, sinr-db)"
            )))
        }
    };
    if range.split(':').count() != 3 {
        return Err(input("--sweep: expected axis:start:stop:points"));
    }
    Ok((axis, parse_range(range, "--sweep")?))
}

/// Point at `t` meters from the slave along the slave→master axis.
fn on_axis(loaded: &Loaded, t: f64) -> Point2<f64> {
    let s = loaded.scenario();
    s.slave.position.lerp(&s.master.position, t / s.d())
}

/// Monte-Carlo sweep table.
pub fn simulate(loaded: &Loaded, axis: SweepAxis, values: &[f64]) -> Result<String, CliError> {
    let d = loaded.scenario().d();
    let sweep = match axis {
        SweepAxis::EveDistance => Sweep::EvePositions(values.iter().map(|&t| on_axis(loaded, t)).collect()),
        SweepAxis::EveRatio => Sweep::EvePositions(values.iter().map(|&t| on_axis(loaded, t * d)).collect()),
        SweepAxis::PRatioDb => Sweep::PowerRatio(values.iter().map(|&v| db_to_linear(v)).collect()),
        SweepAxis::SinrDb => Sweep::SinrDb(values.to_vec()),
    };
    let results = ber_sweep(&loaded.trial, &sweep)?;
    let mut table = Table::new(
        [axis.name(), "ber_master", "ber_eve", "eve_ci_lo", "eve_ci_hi"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    for (v, r) in values.iter().zip(&results) {
        table.push(vec![*v, r.ber_master, r.ber_eve, r.ci_eve.lo, r.ci_eve.hi]);
    }
    Ok(table.to_csv())
}

#[derive(Serialize)]
struct Thresholds {
    eve_db: f64,
    comm_db: f64,
}

#[derive(Serialize)]
struct KeyIntercept {
    ber_eve: f64,
    key_bits: u32,
    probability: f64,
}

#[derive(Serialize)]
struct Comparison {
    d_m: f64,
    d_max_m: f64,
    alpha_r: f64,
    thresholds: Thresholds,
    proposed: SecurityReport<f64>,
    proposed_at_scenario_d: Option<SecurityReport<f64>>,
    directional: SecurityReport<f64>,
    proposed_more_secure: bool,
    key_intercept: KeyIntercept,
}

/// Security-factor comparison of both techniques.
pub fn compare(loaded: &Loaded) -> Result<String, CliError> {
    let reports = proposed_reports(loaded)?;
    let directional = directional_reports(loaded)?;
    let proposed = reports.normalized;
    let more_secure = proposed.security_factor < directional.security_factor;
    let c = Comparison {
        d_m: loaded.scenario().d(),
        d_max_m: reports.d_max,
        alpha_r: reports.alpha_r,
        thresholds: Thresholds {
            eve_db: loaded.analysis.eve_threshold_db,
            comm_db: loaded.analysis.comm_threshold_db,
        },
        proposed,
        proposed_at_scenario_d: reports.at_d,
        directional,
        proposed_more_secure: more_secure,
        key_intercept: KeyIntercept {
            ber_eve: EVE_BER,
            key_bits: KEY_BITS,
            probability: key_intercept_probability(EVE_BER, KEY_BITS)?,
        },
    };
    let json = serde_json::to_string_pretty(&c).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(json + "\n")
}
