//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion, with
//! indented detail lines, and exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use phykey::geometry::{
    ber_field, eavesdrop_circle, security_factor_directional, security_factor_proposed, Extent,
    SchemeTag,
};
use phykey::linkbudget::{channel_gain, NodeSpec, RadioParams, Scenario};
use phykey::modem::{
    ber, bit_errors, decode_phase, encode_key, eve_sir_threshold, key_intercept_probability,
    sinr_threshold, ModScheme, PhaseMode, SymbolPlacement,
};
use phykey::simkernel::{ber_sweep, first_crossing, sub_seed, Sweep, TrialConfig};
use phykey::special::q_function;
use phykey::Point2;
use phykey_cli::commands::{simulate, SweepAxis};
use phykey_cli::scenario_file::ScenarioFile;

struct Verdict {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.details.push(d.into());
        self
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn omni(p_s: f64, p_i: f64, d: f64, noise: f64, scheme: ModScheme<f64>) -> Scenario<f64> {
    Scenario::new(
        RadioParams::new(0.125, noise).unwrap(),
        NodeSpec::omni(Point2::new(d, 0.0), p_i),
        NodeSpec::omni(Point2::origin(), p_s),
        NodeSpec::passive(Point2::new(0.5 * d, 0.5 * d)),
        scheme,
        1e-5,
    )
    .unwrap()
}

fn c1() -> Verdict {
    let p = key_intercept_probability(0.1f64, 100).unwrap();
    let r = rel(p, 2.7e-5);
    Verdict::new(
        r <= 0.02,
        format!("key intercept (1-0.1)^100 = {p:.4e} vs 2.7e-5 (rel {:.2}%, tol 2%)", 100.0 * r),
    )
}

fn c2() -> Verdict {
    let sf = security_factor_directional(10f64.powf(1.5), 10.0).unwrap().security_factor;
    let r = rel(sf, 3.2);
    Verdict::new(
        r <= 0.02,
        format!("SF_directional 15 dB / 10 dB = {sf:.4} vs 3.2 (rel {:.2}%, tol 2%)", 100.0 * r),
    )
}

fn c3() -> Verdict {
    let r10 = eavesdrop_circle(10.0f64, 1.0).unwrap().circle().unwrap().radius;
    let a = 10f64.sqrt();
    let r3 = eavesdrop_circle(a, 1.0).unwrap().circle().unwrap().radius;
    let closed = a / (a * a - 1.0);
    let ok10 = rel(r10, 0.1) <= 0.02;
    let ok3 = (r3 - closed).abs() <= 1e-9;
    Verdict::new(
        ok10 && ok3,
        format!(
            "R_E(alpha=10) = {r10:.4}d vs 0.1d (rel {:.2}%, tol 2%); R_E(alpha=sqrt10) = {r3:.6}d vs closed form {closed:.6}d (tol 1e-9)",
            100.0 * rel(r10, 0.1)
        ),
    )
    .detail(format!(
        "info: published rounded value for P_I/P_S = 1 is 0.3d; the closed form at SIR_min = 10 dB gives {r3:.4}d ({:+.1}%)",
        100.0 * (r3 / 0.3 - 1.0)
    ))
}

fn c4() -> Verdict {
    let sf = security_factor_proposed(10.0f64, 1.0, 1.0).unwrap().security_factor;
    let r = rel(sf, 0.01);
    let mut worst: f64 = 0.0;
    let mut all_secure = true;
    for i in 0..=600 {
        let alpha = 2.0 * 10f64.powf(i as f64 * 3.0 / 600.0);
        let rep = security_factor_proposed(alpha, 1.0, 1.0).unwrap();
        all_secure &= rep.security_factor < 1.0 && rep.secure;
        worst = worst.max(rep.security_factor);
    }
    Verdict::new(
        r <= 0.021 && all_secure,
        format!(
            "SF_proposed(alpha=10, d=d_max) = {sf:.5} vs 1/alpha^2 = 0.01 (rel {:.2}%, tol 2.1%); SF < 1 on alpha in [2, 2000]: {all_secure} (max {worst:.4})",
            100.0 * r
        ),
    )
}

fn c5() -> Verdict {
    let wide = sinr_threshold(&ModScheme::new(4, PI).unwrap(), 0.1).unwrap();
    let narrow = sinr_threshold(&ModScheme::new(4, FRAC_PI_4).unwrap(), 0.1).unwrap();
    let gap = db(narrow) - db(wide);
    Verdict::new(
        (10.0..=12.0).contains(&gap),
        format!(
            "BER=0.1 threshold M=4: theta_b=45 deg {:.2} dB vs 180 deg {:.2} dB, gap {gap:.2} dB (accept 10-12 dB)",
            db(narrow),
            db(wide)
        ),
    )
}

/// Noise-limited Monte-Carlo at Eve against the closed-form BER.
fn c6() -> Verdict {
    let n = 1_000_000u64;
    let mut details = Vec::new();
    let mut pass = true;
    let mut count = 0;
    for m in [2usize, 4] {
        for (tb, tb_name) in [(PI, "180"), (FRAC_PI_2, "90"), (FRAC_PI_4, "45")] {
            let scheme = ModScheme::new(m, tb).unwrap();
            let targets = [1e-1, 1e-2, 1e-3];
            let sinr_db: Vec<f64> = targets
                .iter()
                .map(|&b| db(sinr_threshold(&scheme, b).unwrap()))
                .collect();
            let base = omni(1e-3, 0.0, 1.0, 1e-12, scheme);
            let mut cfg = TrialConfig::new(base, n, 0xC6 ^ (m as u64) << 8 ^ tb.to_bits());
            cfg.symbol_placement = SymbolPlacement::ArcCenter;
            let results = ber_sweep(&cfg, &Sweep::SinrDb(sinr_db.clone())).unwrap();
            let mut cont_cfg = cfg;
            cont_cfg.symbol_placement = SymbolPlacement::Continuous;
            cont_cfg.n_symbols = 200_000;
            let cont = ber_sweep(&cont_cfg, &Sweep::SinrDb(sinr_db.clone())).unwrap();
            for ((&target, r), (c, s_db)) in targets.iter().zip(&results).zip(cont.iter().zip(&sinr_db)) {
                let analytic = ber(&scheme, 10f64.powf(s_db / 10.0));
                let tol = (3.0 * r.ci_eve.half_width()).max(0.2 * analytic);
                let ok = (r.ber_eve - analytic).abs() <= tol;
                pass &= ok;
                count += 1;
                details.push(format!(
                    "{} M={m} theta_b={tb_name} SINR={s_db:.2} dB: analytic {analytic:.3e}, empirical {:.3e} (ratio {:.3}, tol ±{tol:.2e}); continuous-phase protocol {:.3e}",
                    if ok { "ok  " } else { "MISS" },
                    r.ber_eve,
                    r.ber_eve / analytic,
                    c.ber_eve
                ));
                debug_assert!((analytic / target - 1.0).abs() < 1e-6);
            }
        }
    }
    let hits = details.iter().filter(|d| d.starts_with("ok")).count();
    let mut v = Verdict::new(
        pass,
        format!("Monte-Carlo vs closed-form BER, 10^6 arc-center symbols: {hits}/{count} grid points within max(3 Wilson half-widths, 20%)"),
    );
    v.details = details;
    v
}

fn c7() -> Verdict {
    let scheme = ModScheme::new(4, FRAC_PI_2).unwrap();
    let star = eve_sir_threshold(&scheme, 0.1, PhaseMode::AmplitudeRatio).unwrap();
    let alpha = 10.0;
    let p_ratio = alpha * alpha / star;
    let s = omni(1e-3, 1e-3 * p_ratio, 1.0, 1e-12, scheme);
    let extent = Extent::new(-0.2, 1.2, -0.7, 0.7).unwrap();
    let field = ber_field(&s, extent, 400, SchemeTag::Proposed).unwrap();
    let locus = eavesdrop_circle(alpha, 1.0).unwrap();
    let circle = *locus.circle().unwrap();
    let (mut agree, mut total, mut inside) = (0usize, 0usize, 0usize);
    for (p, b) in field.iter() {
        let Some(b) = b else { continue };
        total += 1;
        let below = b < 0.1;
        inside += below as usize;
        agree += (below == locus.contains(&p)) as usize;
    }
    let frac = agree as f64 / total as f64;
    let area = inside as f64 * field.cell_area();
    let r = rel(area, circle.area());
    Verdict::new(
        frac >= 0.99 && r <= 0.05,
        format!(
            "400x400 field at alpha_r=10: {:.3}% of {total} cells agree with the circle (need 99%); area {area:.5} vs pi R_E^2 {:.5} (rel {:.2}%, tol 5%)",
            100.0 * frac,
            circle.area(),
            100.0 * r
        ),
    )
    .detail(format!(
        "info: circle SIR_min is the compressed-range BER=0.1 threshold {:.2} dB, so P_I/P_S = {p_ratio:.3}",
        db(star)
    ))
}

fn crossing(ratio: f64, placement: SymbolPlacement) -> Option<f64> {
    let scheme = ModScheme::new(4, FRAC_PI_2).unwrap();
    let s = omni(1e-3, 1e-3 * ratio, 1.0, 1e-12, scheme);
    let xs: Vec<f64> = (1..=60).map(|i| i as f64 / 100.0).collect();
    let mut cfg = TrialConfig::new(s, 200_000, 0xF167 + ratio as u64);
    cfg.symbol_placement = placement;
    let sweep = Sweep::EvePositions(xs.iter().map(|&x| Point2::new(x, 0.0)).collect());
    let ys: Vec<f64> = ber_sweep(&cfg, &sweep).unwrap().iter().map(|r| r.ber_eve).collect();
    first_crossing(&xs, &ys, 0.1)
}

fn c8() -> Verdict {
    let scheme = ModScheme::new(4, FRAC_PI_2).unwrap();
    let star = eve_sir_threshold(&scheme, 0.1, PhaseMode::AmplitudeRatio).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut details = Vec::new();
    for (ratio, lo, hi) in [(10.0, 0.05, 0.15), (1.0, 0.25, 0.40)] {
        let x = crossing(ratio, SymbolPlacement::ArcCenter);
        let ok = x.is_some_and(|x| (lo..=hi).contains(&x));
        pass &= ok;
        let shown = x.map_or("none".into(), |x| format!("{x:.3}d"));
        parts.push(format!("P_I/P_S={ratio}: {shown} in [{lo}, {hi}]d {}", if ok { "yes" } else { "NO" }));
        let a = (ratio * star).sqrt();
        let cont = crossing(ratio, SymbolPlacement::Continuous).map_or("none".into(), |x| format!("{x:.3}d"));
        details.push(format!(
            "info: P_I/P_S={ratio}: analytic axis crossing d/(alpha+1) = {:.3}d; continuous-phase protocol crosses at {cont}",
            1.0 / (a + 1.0)
        ));
    }
    let mut v = Verdict::new(
        pass,
        format!("Eve-distance BER=0.1 crossing along the slave-master axis (arc-center symbols): {}", parts.join("; ")),
    );
    v.details = details;
    v
}

/// Gaussian tail by composite Simpson.
fn q_simpson(x: f64) -> f64 {
    let tail = |a: f64| {
        let (b, n) = (12.0, 20_000);
        let h = (b - a) / n as f64;
        let f = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
        }
        s * h / 3.0
    };
    if x >= 0.0 {
        tail(x)
    } else {
        1.0 - tail(-x)
    }
}

fn uniform(seed: u64, i: u64) -> f64 {
    (sub_seed(seed, i) >> 11) as f64 / (1u64 << 53) as f64
}

fn c9() -> Verdict {
    let mut checks = Vec::new();

    let q_err = (0..100)
        .map(|i| {
            let x = -6.0 + 12.0 * uniform(9, i);
            (q_function(x) - q_simpson(x)).abs()
        })
        .fold(0.0, f64::max);
    checks.push(("Q vs Simpson < 1e-7", q_err < 1e-7, format!("max err {q_err:.1e}")));

    let mut round_trip = true;
    let mut gray = true;
    for m in [2usize, 4, 8, 16] {
        for tb in [PI, FRAC_PI_2, 0.3] {
            let s = ModScheme::new(m, tb).unwrap();
            let symbols: Vec<usize> = (0..2000).map(|i| (sub_seed(m as u64, i) % m as u64) as usize).collect();
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(m as u64);
            let ks = encode_key(&s, &symbols, &mut rng).unwrap();
            round_trip &= ks.phases.iter().zip(&symbols).all(|(&p, &sym)| decode_phase(&s, p) == sym);
        }
        gray &= (0..m - 1).all(|i| bit_errors(i, i + 1) == 1);
    }
    checks.push(("encode/decode round trip", round_trip, String::new()));
    checks.push(("gray adjacency M=2..16", gray, String::new()));

    let mut inv_err: f64 = 0.0;
    for m in [2usize, 4, 8] {
        for tb in [PI, FRAC_PI_2, FRAC_PI_4] {
            let s = ModScheme::new(m, tb).unwrap();
            for b in [1e-1, 1e-2, 1e-3] {
                inv_err = inv_err.max(rel(ber(&s, sinr_threshold(&s, b).unwrap()), b));
            }
        }
    }
    checks.push(("threshold inverse < 1e-6", inv_err < 1e-6, format!("max rel {inv_err:.1e}")));

    let radio = RadioParams::new(0.125, 1e-12).unwrap();
    let node = NodeSpec::omni(Point2::new(0.3, -0.2), 1e-3);
    let sq_err = (0..1000)
        .map(|i| {
            let r = 0.01 + 10.0 * uniform(3, i);
            let t = 2.0 * PI * uniform(4, i);
            let at = |r: f64| Point2::new(0.3 + r * t.cos(), -0.2 + r * t.sin());
            rel(
                channel_gain(&node, at(r), 1.0, &radio).unwrap() * r * r,
                channel_gain(&node, at(2.0 * r), 1.0, &radio).unwrap() * 4.0 * r * r,
            )
        })
        .fold(0.0, f64::max);
    checks.push(("inverse-square law", sq_err < 1e-12, format!("max rel {sq_err:.1e}")));

    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/default.json")).unwrap();
    let loaded = ScenarioFile::parse(&text, "default.json").unwrap().resolve().unwrap();
    let a = simulate(&loaded, SweepAxis::EveRatio, &[0.05, 0.2, 0.4]).unwrap();
    let b = simulate(&loaded, SweepAxis::EveRatio, &[0.05, 0.2, 0.4]).unwrap();
    checks.push(("byte-identical reruns", a == b, format!("{} bytes", a.len())));

    let pass = checks.iter().all(|c| c.1);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let mut v = Verdict::new(
        pass,
        if pass {
            format!("property suites: {} checks passed", checks.len())
        } else {
            format!("property suites: failed {}", failed.join(", "))
        },
    );
    for (name, ok, info) in checks {
        v = v.detail(format!("{} {name} {info}", if ok { "ok  " } else { "MISS" }));
    }
    v
}

type Criterion = (&'static str, fn() -> Verdict, Duration);

fn main() {
    let criteria: [Criterion; 9] = [
        ("C1", c1, Duration::from_secs(1)),
        ("C2", c2, Duration::from_secs(1)),
        ("C3", c3, Duration::from_secs(1)),
        ("C4", c4, Duration::from_secs(1)),
        ("C5", c5, Duration::from_secs(1)),
        ("C6", c6, Duration::from_secs(60)),
        ("C7", c7, Duration::from_secs(30)),
        ("C8", c8, Duration::from_secs(60)),
        ("C9", c9, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (id, f, budget) in criteria {
        let t = Instant::now();
        let v = f();
        let elapsed = t.elapsed();
        let in_time = elapsed <= budget;
        let pass = v.pass && in_time;
        failed += (!pass) as usize;
        println!(
            "[{}] {id} {} ({:.2} s, budget {} s{})",
            if pass { "PASS" } else { "FAIL" },
            v.summary,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
        for d in v.details {
            println!("       {d}");
        }
    }
    println!("acceptance: {}/9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
