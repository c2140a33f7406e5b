//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; errors come back as `{"error": "..."}`.

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use suitability::config::RunConfig;
use suitability::report::{run_analyze, run_simulate};
use suitability::Result;

fn link(mu: f64, separation_ps: f64, sigma_ps: f64, delta_t_ps: f64) -> RunConfig {
    RunConfig {
        mu,
        bias_ps: [0.0, separation_ps],
        sigma_ps,
        delta_t_ps,
        ..RunConfig::default()
    }
}

fn respond<T: Serialize>(value: Result<T>) -> String {
    match value {
        Ok(v) => serde_json::to_string(&v).expect("serializable"),
        Err(e) => serde_json::json!({ "error": e.to_string() }).to_string(),
    }
}

/// Full analytic report for one link setting.
#[wasm_bindgen]
pub fn analyze(mu: f64, separation_ps: f64, sigma_ps: f64, delta_t_ps: f64) -> String {
    respond(run_analyze(&link(mu, separation_ps, sigma_ps, delta_t_ps)))
}

#[derive(Serialize)]
struct Curves {
    separation_ps: Vec<f64>,
    mode_overlap: Vec<f64>,
    side_channel_ratio: Vec<Option<f64>>,
    pns_ratio: Option<f64>,
    breakdown_separation_ps: Option<f64>,
}

/// Side-channel leak ratio and mode overlap against arrival-time separation
/// on `points` values in `[0, max_separation_ps]`.
#[wasm_bindgen]
pub fn leakage_curves(mu: f64, sigma_ps: f64, delta_t_ps: f64, max_separation_ps: f64, points: usize) -> String {
    let build = || -> Result<Curves> {
        let points = points.clamp(2, 2000);
        let mut curves = Curves {
            separation_ps: Vec::with_capacity(points),
            mode_overlap: Vec::with_capacity(points),
            side_channel_ratio: Vec::with_capacity(points),
            pns_ratio: None,
            breakdown_separation_ps: None,
        };
        for k in 0..points {
            let dt = max_separation_ps * k as f64 / (points - 1) as f64;
            let r = run_analyze(&link(mu, dt, sigma_ps, delta_t_ps))?;
            if k == 0 {
                curves.pns_ratio = r.gamma;
                curves.breakdown_separation_ps = r.breakdown_separation_ps;
            }
            curves.separation_ps.push(dt);
            curves.mode_overlap.push(r.mode_overlap);
            curves.side_channel_ratio.push(r.side_channel_ratio);
        }
        Ok(curves)
    };
    respond(build())
}

/// Monte Carlo exchange with the combined PNS and timing attack.
#[wasm_bindgen]
pub fn simulate(mu: f64, separation_ps: f64, sigma_ps: f64, delta_t_ps: f64, pulses: u32, seed: u32) -> String {
    let mut cfg = link(mu, separation_ps, sigma_ps, delta_t_ps);
    cfg.pulses = u64::from(pulses.clamp(1, 5_000_000));
    cfg.seed = u64::from(seed);
    respond(run_simulate(&cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_returns_report_json() {
        let v: serde_json::Value = serde_json::from_str(&analyze(0.1, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!(v["verdict"], "SECURE");
        assert_eq!(v["mode_overlap"], 1.0);
    }

    #[test]
    fn errors_are_reported_as_json() {
        let v: serde_json::Value = serde_json::from_str(&analyze(-1.0, 0.0, 1.0, 0.0)).unwrap();
        assert!(v["error"].as_str().unwrap().contains("source.mu"));
    }

    #[test]
    fn curves_cross_breakdown() {
        let v: serde_json::Value = serde_json::from_str(&leakage_curves(0.1, 1.0, 0.0, 4.0, 41)).unwrap();
        let ratios = v["side_channel_ratio"].as_array().unwrap();
        assert_eq!(ratios.len(), 41);
        assert_eq!(ratios[0], 0.0);
        assert!(ratios[40].as_f64().unwrap() > 1.0);
        assert!((v["breakdown_separation_ps"].as_f64().unwrap() - 0.8f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn simulation_is_seeded() {
        let a = simulate(0.5, 1.0, 1.0, 0.0, 20_000, 7);
        let b = simulate(0.5, 1.0, 1.0, 0.0, 20_000, 7);
        let strip = |s: &str| {
            let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
            v["result"]["elapsed"] = 0.0.into();
            v
        };
        assert_eq!(strip(&a), strip(&b));
    }
}
