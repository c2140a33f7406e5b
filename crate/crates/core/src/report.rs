//! Analytic reports, Monte Carlo comparison blocks and parameter sweeps,
//! with their JSON, CSV and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::config::{RunConfig, SweepParam};
use crate::error::{Error, Result};
use crate::hilbert::{
    breakdown_boundary, breakdown_overlap, resolution_limited_overlap, side_channel_leak_ratio_with, side_channel_table,
};
use crate::photon::{
    bob_table_wcp, eve_table_pns, poisson_weights, prob_at_least, split_sources, truncation_order, LossOrder,
    TAIL_TOLERANCE,
};
use crate::protocol::{polarization_suitability_table, protocol_audit, AuditFinding};
use crate::sim::{
    empirical_gamma, expected_timing_accuracy, security_verdict, simulate_exchange_with, Parallelism, SimulationResult,
    Verdict, VerdictInputs, VerdictLevel,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuitabilityReport {
    pub schema_version: u32,
    pub inputs: BTreeMap<String, String>,
    /// Mean photon number reaching Bob and the one Eve taps.
    pub mu_bob: f64,
    pub mu_eve: f64,
    pub p_bob_nonempty: f64,
    pub p_eve_multi: f64,
    pub s_ab_table: [[f64; 2]; 2],
    pub s_ab_sum: f64,
    pub s_ae_pns_table: [[f64; 2]; 2],
    pub s_ae_pns_sum: f64,
    /// PNS leak ratio; `None` when Bob's suitability sum is zero.
    pub gamma: Option<f64>,
    pub mode_overlap: f64,
    pub s_ae_side_table: [[f64; 2]; 2],
    pub s_ae_side_sum: f64,
    /// Side-channel leak ratio; `None` for a vacuum source at Bob.
    pub side_channel_ratio: Option<f64>,
    /// Overlap and arrival-time separation at which the side channel alone
    /// breaks privacy amplification (separation `null` if unbounded).
    pub breakdown_overlap: Option<f64>,
    pub breakdown_separation_ps: Option<f64>,
    pub total_leakage: f64,
    pub threshold: f64,
    pub policy: String,
    pub verdict: VerdictLevel,
    pub audit: Vec<AuditFinding>,
    pub notes: Vec<String>,
}

impl SuitabilityReport {
    /// Re-derives the verdict from the reported numbers alone.
    pub fn recomputed_verdict(&self) -> Verdict {
        security_verdict(VerdictInputs {
            s_ab_sum: self.s_ab_sum,
            pns_ratio: self.gamma.or((self.s_ae_pns_sum == 0.0).then_some(0.0)),
            side_channel_ratio: self.side_channel_ratio,
            policy: self.policy.parse().expect("policy names round-trip"),
            threshold: self.threshold,
        })
    }
}

fn echo(config: &RunConfig) -> BTreeMap<String, String> {
    config.echo().into_iter().collect()
}

/// Fully analytic suitability report; deterministic.
pub fn run_analyze(config: &RunConfig) -> Result<SuitabilityReport> {
    config.validate()?;
    let source = config.source()?;
    let channel = config.channel()?;
    let (eve_src, bob_src) = split_sources(&source, &channel, config.loss_order);
    let res = config.resolution()?;
    let [m0, m1] = config.modes()?;
    let mut notes = Vec::new();

    let bob = bob_table_wcp(&bob_src, &config.protocol);
    let pns = eve_table_pns(&eve_src, &config.protocol);
    let gamma = (bob.sum_ab > 0.0).then(|| pns.sum_ab / bob.sum_ab);
    let omega = resolution_limited_overlap(&m0, &m1, &res);
    let side = side_channel_table(omega);
    let side_report = if bob_src.is_vacuum() {
        None
    } else {
        Some(side_channel_leak_ratio_with(
            &bob_src,
            omega,
            &bob,
            config.ratio_convention,
            config.threshold,
        )?)
    };

    if source.is_vacuum() {
        notes.push("single-photon regime: no multi-photon pulses, so no photons are diverted to Eve".into());
    } else if bob_src.is_vacuum() {
        notes.push("no photons reach Bob (eta = 0)".into());
    }
    if gamma.is_none() {
        notes.push("gamma undefined: Bob's suitability sum is zero".into());
    }
    if side_report.is_none() {
        notes.push("side-channel ratio undefined for a vacuum pulse at Bob; excluded from the verdict".into());
    }
    if m0.spectral_label != m1.spectral_label {
        notes.push("distinct spectral labels: the bit values are fully distinguishable in frequency".into());
    }

    let verdict = security_verdict(VerdictInputs {
        s_ab_sum: bob.sum_ab,
        pns_ratio: gamma.or((pns.sum_ab == 0.0).then_some(0.0)),
        side_channel_ratio: side_report.as_ref().map(|r| r.leak_ratio),
        policy: config.policy,
        threshold: config.threshold,
    });

    let (breakdown_overlap_value, breakdown_separation_ps) = if bob_src.is_vacuum() {
        (None, None)
    } else {
        let dt = breakdown_boundary(&bob_src, config.sigma_ps, &res)?;
        (Some(breakdown_overlap(&bob_src)), dt.is_finite().then_some(dt))
    };

    Ok(SuitabilityReport {
        schema_version: SCHEMA_VERSION,
        inputs: echo(config),
        mu_bob: bob_src.mu,
        mu_eve: eve_src.mu,
        p_bob_nonempty: bob_src.p_nonempty(),
        p_eve_multi: eve_src.p_multi(),
        s_ab_table: bob.entries,
        s_ab_sum: bob.sum_ab,
        s_ae_pns_table: pns.entries,
        s_ae_pns_sum: pns.sum_ab,
        gamma,
        mode_overlap: omega,
        s_ae_side_table: side.entries,
        s_ae_side_sum: side.sum_ab,
        side_channel_ratio: side_report.map(|r| r.leak_ratio),
        breakdown_overlap: breakdown_overlap_value,
        breakdown_separation_ps,
        total_leakage: verdict.total_leakage,
        threshold: config.threshold,
        policy: config.policy.as_str().to_string(),
        verdict: verdict.level,
        audit: protocol_audit(&config.protocol),
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub expected_sift_rate: f64,
    pub sift_rate_z: f64,
    pub expected_gamma: Option<f64>,
    pub empirical_gamma: Option<f64>,
    pub gamma_relative_error: Option<f64>,
    pub gamma_z: Option<f64>,
    pub expected_timing_accuracy: Option<f64>,
    pub empirical_timing_accuracy: Option<f64>,
    pub timing_z: Option<f64>,
    pub analytic_verdict: VerdictLevel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub inputs: BTreeMap<String, String>,
    pub result: SimulationResult,
    pub comparison: Comparison,
}

impl SimulationReport {
    /// JSON with `elapsed` zeroed; equal seeds give byte-identical output.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.result = r.result.without_elapsed();
        serde_json::to_string_pretty(&r).expect("report serializes")
    }
}

fn z_score(observed: f64, expected: f64, sd: f64) -> f64 {
    if sd > 0.0 {
        (observed - expected) / sd
    } else if observed == expected {
        0.0
    } else {
        f64::INFINITY.copysign(observed - expected)
    }
}

/// Runs the Monte Carlo and sets it against the analytic expectations.
pub fn run_simulate(config: &RunConfig) -> Result<SimulationReport> {
    let sim = config.simulation()?;
    let analytic = run_analyze(config)?;
    let parallelism = config.threads.map_or(Parallelism::Auto, Parallelism::Threads);
    let result = simulate_exchange_with(&sim, parallelism)?;
    let n = result.pulses as f64;

    let table = polarization_suitability_table(&config.protocol);
    let (eve_src, bob_src) = split_sources(&sim.source, &sim.channel, sim.loss_order);
    // Per-pulse event probabilities with i, j uniform.
    let p_entry = table.sum_ab / 4.0;
    let p_entry_sq = table.entries.iter().flatten().map(|p| p * p).sum::<f64>() / 4.0;
    let p_bob = bob_src.p_nonempty() * p_entry;
    let sift_z = z_score(result.sift_rate, p_bob, (p_bob * (1.0 - p_bob) / n).sqrt());

    let (expected_gamma, emp_gamma, gamma_rel, gamma_z) = if sim.eve.kind.uses_pns() && p_bob > 0.0 {
        let p_eve = eve_src.p_multi() * p_entry;
        let joint = multi_and_detectable(&sim)? * p_entry_sq;
        let g = p_eve / p_bob;
        // Delta-method variance of the ratio of two correlated counts.
        let var = (p_eve * (1.0 - p_eve) / p_bob.powi(2) - 2.0 * p_eve * (joint - p_eve * p_bob) / p_bob.powi(3)
            + p_eve.powi(2) * p_bob * (1.0 - p_bob) / p_bob.powi(4))
            / n;
        match empirical_gamma(&result, &sim.eve) {
            Ok(e) => (Some(g), Some(e), Some((e - g) / g), Some(z_score(e, g, var.sqrt()))),
            Err(_) => (Some(g), None, None, None),
        }
    } else {
        (None, None, None, None)
    };

    let equal_widths = sim.modes[0].width_ps == sim.modes[1].width_ps;
    let (exp_acc, emp_acc, timing_z) = match (sim.eve.resolution, result.timing_accuracy()) {
        (Some(res), Some(acc)) if equal_widths => {
            // Eve only sorts arrival times; spectral tags are not observed.
            let a = expected_timing_accuracy(sim.channel.separation_ps(), config.sigma_ps, res.delta_t_ps);
            let g = result.eve_timing_guesses as f64;
            (Some(a), Some(acc), Some(z_score(acc, a, (a * (1.0 - a) / g).sqrt())))
        }
        (_, acc) => (None, acc, None),
    };

    Ok(SimulationReport {
        schema_version: SCHEMA_VERSION,
        inputs: echo(config),
        result,
        comparison: Comparison {
            expected_sift_rate: p_bob,
            sift_rate_z: sift_z,
            expected_gamma,
            empirical_gamma: emp_gamma,
            gamma_relative_error: gamma_rel,
            gamma_z,
            expected_timing_accuracy: exp_acc,
            empirical_timing_accuracy: emp_acc,
            timing_z,
            analytic_verdict: analytic.verdict,
        },
    })
}

/// `P(Eve sees ≥ 2 photons and Bob ≥ 1)` under the configured loss order.
fn multi_and_detectable(sim: &crate::sim::SimulationConfig) -> Result<f64> {
    let (mu, eta) = (sim.source.mu, sim.channel.eta);
    Ok(match sim.loss_order {
        LossOrder::LossFirst => prob_at_least(mu * eta, 2),
        LossOrder::EveFirst => {
            let fock = poisson_weights(mu, truncation_order(mu, TAIL_TOLERANCE))?;
            fock.weights
                .iter()
                .enumerate()
                .skip(2)
                .map(|(n, w)| w * (1.0 - (1.0 - eta).powi(n as i32)))
                .sum()
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: f64,
    pub report: SuitabilityReport,
}

pub fn run_sweep(config: &RunConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let spec = config
        .sweep
        .ok_or_else(|| Error::config("sweep", "no sweep specified (set sweep.param/start/stop/steps)"))?;
    spec.grid()
        .into_iter()
        .map(|x| {
            let mut point = config.clone();
            point.sweep = None;
            point.set_sweep_value(spec.param, x);
            Ok(SweepRow {
                param: spec.param,
                value: x,
                report: run_analyze(&point)?,
            })
        })
        .collect()
}

/// Stable CSV header shared by analyze and sweep output.
pub const CSV_COLUMNS: &[&str] = &[
    "param",
    "value",
    "mu",
    "eta",
    "dt_separation_ps",
    "delta_t_ps",
    "sigma_ps",
    "mu_bob",
    "mu_eve",
    "s_ab_sum",
    "s_ae_pns_sum",
    "gamma",
    "mode_overlap",
    "s_ae_side_sum",
    "side_channel_ratio",
    "breakdown_separation_ps",
    "total_leakage",
    "verdict",
];

/// 17 significant digits, `.` decimal; empty for undefined values.
pub fn csv_real(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        Some(v) if v.is_nan() => "nan".into(),
        Some(v) if v > 0.0 => "inf".into(),
        Some(_) => "-inf".into(),
        None => String::new(),
    }
}

fn csv_row(param: &str, value: Option<f64>, r: &SuitabilityReport) -> String {
    let num = |key: &str| r.inputs.get(key).and_then(|v| v.parse::<f64>().ok());
    let separation = num("channel.bias1_ps")
        .zip(num("channel.bias0_ps"))
        .map(|(b1, b0)| b1 - b0);
    let cells = [
        param.to_string(),
        csv_real(value),
        csv_real(num("source.mu")),
        csv_real(num("channel.eta")),
        csv_real(separation),
        csv_real(num("eve.delta_t_ps")),
        csv_real(num("mode.sigma_ps")),
        csv_real(Some(r.mu_bob)),
        csv_real(Some(r.mu_eve)),
        csv_real(Some(r.s_ab_sum)),
        csv_real(Some(r.s_ae_pns_sum)),
        csv_real(r.gamma),
        csv_real(Some(r.mode_overlap)),
        csv_real(Some(r.s_ae_side_sum)),
        csv_real(r.side_channel_ratio),
        csv_real(r.breakdown_separation_ps),
        csv_real(Some(r.total_leakage)),
        r.verdict.to_string(),
    ];
    cells.join(",")
}

pub fn analyze_csv(report: &SuitabilityReport) -> String {
    format!("{}\n{}\n", CSV_COLUMNS.join(","), csv_row("none", None, report))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&csv_row(row.param.as_str(), Some(row.value), &row.report));
        out.push('\n');
    }
    out
}

pub const SIMULATION_CSV_COLUMNS: &[&str] = &[
    "seed",
    "pulses",
    "bob_detections",
    "sift_rate",
    "expected_sift_rate",
    "sift_rate_z",
    "eve_pns_hits",
    "empirical_gamma",
    "expected_gamma",
    "gamma_z",
    "eve_timing_guesses",
    "eve_timing_correct",
    "empirical_timing_accuracy",
    "expected_timing_accuracy",
    "timing_z",
    "eve_fraction",
    "n00",
    "n01",
    "n10",
    "n11",
];

pub fn simulation_csv(report: &SimulationReport) -> String {
    let (r, c) = (&report.result, &report.comparison);
    let cells = [
        r.seed.to_string(),
        r.pulses.to_string(),
        r.bob_detections.to_string(),
        csv_real(Some(r.sift_rate)),
        csv_real(Some(c.expected_sift_rate)),
        csv_real(Some(c.sift_rate_z)),
        r.eve_pns_hits.to_string(),
        csv_real(c.empirical_gamma),
        csv_real(c.expected_gamma),
        csv_real(c.gamma_z),
        r.eve_timing_guesses.to_string(),
        r.eve_timing_correct.to_string(),
        csv_real(c.empirical_timing_accuracy),
        csv_real(c.expected_timing_accuracy),
        csv_real(c.timing_z),
        csv_real(Some(r.eve_fraction)),
        r.per_config_counts[0][0].to_string(),
        r.per_config_counts[0][1].to_string(),
        r.per_config_counts[1][0].to_string(),
        r.per_config_counts[1][1].to_string(),
    ];
    format!("{}\n{}\n", SIMULATION_CSV_COLUMNS.join(","), cells.join(","))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".into(), |v| format!("{v:.9}"))
}

fn table_lines(out: &mut String, name: &str, t: &[[f64; 2]; 2]) {
    let _ = writeln!(out, "  {name:<14} [{:.9}, {:.9}]", t[0][0], t[0][1]);
    let _ = writeln!(out, "  {:<14} [{:.9}, {:.9}]", "", t[1][0], t[1][1]);
}

pub fn analyze_text(r: &SuitabilityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "suitability report (mu_bob = {}, mu_eve = {})", r.mu_bob, r.mu_eve);
    table_lines(&mut out, "S_AB", &r.s_ab_table);
    let _ = writeln!(out, "  {:<14} {:.9}", "sum S_AB", r.s_ab_sum);
    table_lines(&mut out, "S_AE (PNS)", &r.s_ae_pns_table);
    let _ = writeln!(out, "  {:<14} {}", "gamma", opt(r.gamma));
    let _ = writeln!(out, "  {:<14} {:.9}", "mode overlap", r.mode_overlap);
    table_lines(&mut out, "S_AE (timing)", &r.s_ae_side_table);
    let _ = writeln!(out, "  {:<14} {}", "side ratio", opt(r.side_channel_ratio));
    let _ = writeln!(out, "  {:<14} {}", "breakdown dt", opt(r.breakdown_separation_ps));
    let _ = writeln!(
        out,
        "  {:<14} {:.9} ({} policy, threshold {})",
        "leakage", r.total_leakage, r.policy, r.threshold
    );
    let _ = writeln!(out, "  {:<14} {}", "verdict", r.verdict);
    for f in &r.audit {
        let _ = writeln!(out, "  audit: {f}");
    }
    for n in &r.notes {
        let _ = writeln!(out, "  note: {n}");
    }
    out
}

pub fn simulation_text(s: &SimulationReport) -> String {
    let (r, c) = (&s.result, &s.comparison);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "simulation: {} pulses, seed {} ({:.3} s)",
        r.pulses, r.seed, r.elapsed
    );
    let _ = writeln!(out, "  {:<16} {:>14} {:>14} {:>9}", "", "empirical", "expected", "z");
    let _ = writeln!(
        out,
        "  {:<16} {:>14.9} {:>14.9} {:>9.3}",
        "sift rate", r.sift_rate, c.expected_sift_rate, c.sift_rate_z
    );
    if let Some(g) = c.expected_gamma {
        let _ = writeln!(
            out,
            "  {:<16} {:>14} {:>14.9} {:>9}",
            "gamma",
            opt(c.empirical_gamma),
            g,
            c.gamma_z.map_or("-".into(), |z| format!("{z:.3}"))
        );
    }
    if let Some(a) = c.empirical_timing_accuracy {
        let _ = writeln!(
            out,
            "  {:<16} {:>14.9} {:>14} {:>9}",
            "timing accuracy",
            a,
            opt(c.expected_timing_accuracy),
            c.timing_z.map_or("-".into(), |z| format!("{z:.3}"))
        );
    }
    let _ = writeln!(out, "  detections [i][j]: {:?}", r.per_config_counts);
    let _ = writeln!(out, "  eve fraction of sifted bits: {:.9}", r.eve_fraction);
    let _ = writeln!(out, "  analytic verdict: {}", c.analytic_verdict);
    out
}

pub fn sweep_text(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>14} {:>12} {:>12} {:>12} {:>10}",
        "value", "gamma", "overlap", "side ratio", "verdict"
    );
    for row in rows {
        let r = &row.report;
        let _ = writeln!(
            out,
            "{:>14.6} {:>12} {:>12.6} {:>12} {:>10}",
            row.value,
            r.gamma.map_or("-".into(), |g| format!("{g:.6}")),
            r.mode_overlap,
            r.side_channel_ratio.map_or("-".into(), |g| format!("{g:.6}")),
            r.verdict.to_string()
        );
    }
    out
}
