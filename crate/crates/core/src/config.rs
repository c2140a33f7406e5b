//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment. Every key has a default,
//! so an empty file is a valid configuration. [`RunConfig::emit`] writes
//! every key in a fixed order and [`RunConfig::parse`] reads it back
//! unchanged.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{ModeWavefunction, RatioConvention, ResolutionModel, DEFAULT_SECURE_THRESHOLD};
use crate::photon::{ChannelModel, CoherentSourceModel, LossOrder, MAX_MU};
use crate::protocol::{PolarizationState, ProtocolConfig};
use crate::qstate::{C64, TOLERANCE};
use crate::sim::{CombinationPolicy, EveKind, EveStrategy, SimulationConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    #[default]
    Analyze,
    Simulate,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Mu,
    Eta,
    DtSeparation,
    DeltaT,
    Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn grid(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        (0..self.steps)
            .map(|k| self.start + span * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub mu: f64,
    pub eta: f64,
    pub length_km: f64,
    pub bias_ps: [f64; 2],
    pub loss_order: LossOrder,
    pub sigma_ps: f64,
    pub spectral_labels: [Option<f64>; 2],
    pub eve: EveKind,
    pub delta_t_ps: f64,
    pub pulses: u64,
    pub seed: u64,
    /// `None` uses the global thread pool.
    pub threads: Option<usize>,
    pub protocol: ProtocolConfig,
    pub policy: CombinationPolicy,
    pub threshold: f64,
    pub ratio_convention: RatioConvention,
    pub sweep: Option<SweepSpec>,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Analyze,
            mu: 0.1,
            eta: 1.0,
            length_km: 0.0,
            bias_ps: [0.0, 0.0],
            loss_order: LossOrder::EveFirst,
            sigma_ps: 1.0,
            spectral_labels: [None, None],
            eve: EveKind::Combined,
            delta_t_ps: 0.0,
            pulses: 1_000_000,
            seed: 42,
            threads: None,
            protocol: ProtocolConfig::default(),
            policy: CombinationPolicy::Max,
            threshold: DEFAULT_SECURE_THRESHOLD,
            ratio_convention: RatioConvention::Closed,
            sweep: None,
            output_format: OutputFormat::Text,
            output_path: None,
        }
    }
}

/// Every accepted key, in emission order.
pub const KEYS: &[&str] = &[
    "run.command",
    "source.mu",
    "channel.eta",
    "channel.length_km",
    "channel.bias0_ps",
    "channel.bias1_ps",
    "channel.loss_order",
    "mode.sigma_ps",
    "mode.spectral0",
    "mode.spectral1",
    "eve.strategy",
    "eve.delta_t_ps",
    "sim.pulses",
    "sim.seed",
    "sim.threads",
    "protocol.alice0",
    "protocol.alice1",
    "protocol.bob0",
    "protocol.bob1",
    "verdict.policy",
    "verdict.threshold",
    "report.ratio_convention",
    "sweep.param",
    "sweep.start",
    "sweep.stop",
    "sweep.steps",
    "output.format",
    "output.path",
];

/// Sweep fields are collected separately because they only validate as a
/// group.
#[derive(Default)]
struct PartialSweep {
    param: Option<SweepParam>,
    start: Option<f64>,
    stop: Option<f64>,
    steps: Option<usize>,
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| Error::config(key, format!("cannot parse `{value}`: {e}")))
}

fn finite(key: &str, value: &str) -> Result<f64> {
    let x: f64 = number(key, value)?;
    if !x.is_finite() {
        return Err(Error::config(key, "must be finite"));
    }
    Ok(x)
}

fn optional<T>(key: &str, value: &str, f: impl Fn(&str, &str) -> Result<T>) -> Result<Option<T>> {
    if value == "none" || value.is_empty() {
        Ok(None)
    } else {
        f(key, value).map(Some)
    }
}

fn jones(key: &str, value: &str) -> Result<PolarizationState> {
    let parts = value
        .split(',')
        .map(|p| finite(key, p.trim()))
        .collect::<Result<Vec<_>>>()?;
    let [hr, hi, vr, vi] = parts[..] else {
        return Err(Error::config(key, "expected four numbers: h_re,h_im,v_re,v_im"));
    };
    let (h, v) = (C64::new(hr, hi), C64::new(vr, vi));
    let norm = (h.norm_sqr() + v.norm_sqr()).sqrt();
    let state = if (norm - 1.0).abs() <= TOLERANCE {
        PolarizationState::new(h, v)
    } else {
        PolarizationState::normalized(h, v)
    };
    state.map_err(|e| Error::config(key, e.to_string()))
}

fn emit_jones(p: &PolarizationState) -> String {
    format!("{},{},{},{}", p.h().re, p.h().im, p.v().re, p.v().im)
}

fn parse_enum<T>(key: &str, value: &str, table: &[(&str, T)]) -> Result<T>
where
    T: Copy,
{
    table
        .iter()
        .find(|(name, _)| *name == value)
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let names: Vec<_> = table.iter().map(|(n, _)| *n).collect();
            Error::config(key, format!("`{value}` is not one of {}", names.join(", ")))
        })
}

fn enum_name<T: PartialEq + Copy>(value: T, table: &[(&'static str, T)]) -> &'static str {
    table
        .iter()
        .find(|(_, v)| *v == value)
        .map(|(n, _)| *n)
        .expect("table covers every variant")
}

const COMMANDS: &[(&str, Command)] = &[
    ("analyze", Command::Analyze),
    ("simulate", Command::Simulate),
    ("sweep", Command::Sweep),
];
const FORMATS: &[(&str, OutputFormat)] = &[
    ("text", OutputFormat::Text),
    ("json", OutputFormat::Json),
    ("csv", OutputFormat::Csv),
];
const LOSS_ORDERS: &[(&str, LossOrder)] = &[("eve_first", LossOrder::EveFirst), ("loss_first", LossOrder::LossFirst)];
const CONVENTIONS: &[(&str, RatioConvention)] =
    &[("closed", RatioConvention::Closed), ("tables", RatioConvention::Tables)];
const STRATEGIES: &[(&str, EveKind)] = &[
    ("none", EveKind::None),
    ("pns", EveKind::Pns),
    ("timing_qnd", EveKind::TimingQnd),
    ("combined", EveKind::Combined),
];
const POLICIES: &[(&str, CombinationPolicy)] = &[("max", CombinationPolicy::Max), ("sum", CombinationPolicy::Sum)];
pub const SWEEP_PARAMS: &[(&str, SweepParam)] = &[
    ("mu", SweepParam::Mu),
    ("eta", SweepParam::Eta),
    ("dt_separation", SweepParam::DtSeparation),
    ("delta_t", SweepParam::DeltaT),
    ("sigma", SweepParam::Sigma),
];

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        enum_name(self, SWEEP_PARAMS)
    }
}

impl Command {
    pub fn as_str(self) -> &'static str {
        enum_name(self, COMMANDS)
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_enum("output.format", s, FORMATS)
    }
}

impl RunConfig {
    /// Parses `text` on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Applies the assignments in `text` on top of `self`, then validates.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let pairs = text
            .lines()
            .enumerate()
            .filter_map(|(n, line)| {
                let line = line.split('#').next().unwrap_or("").trim();
                (!line.is_empty()).then_some((n + 1, line))
            })
            .map(|(n, line)| {
                line.split_once('=')
                    .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                    .ok_or_else(|| Error::config(format!("line {n}"), format!("expected `key = value`, got `{line}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.apply_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    /// Applies `key=value` overrides such as those given with `--set`.
    pub fn apply_overrides<'a>(&mut self, overrides: impl IntoIterator<Item = &'a str>) -> Result<()> {
        let pairs = overrides
            .into_iter()
            .map(|s| {
                s.split_once('=')
                    .map(|(k, v)| (k.trim(), v.trim()))
                    .ok_or_else(|| Error::config(s, "expected key=value"))
            })
            .collect::<Result<Vec<_>>>()?;
        self.apply_pairs(pairs)
    }

    fn apply_pairs<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<()> {
        let mut sweep = match self.sweep {
            Some(s) => PartialSweep {
                param: Some(s.param),
                start: Some(s.start),
                stop: Some(s.stop),
                steps: Some(s.steps),
            },
            None => PartialSweep::default(),
        };
        for (key, value) in pairs {
            self.set(key, value, &mut sweep)?;
        }
        self.sweep = match sweep {
            PartialSweep {
                param: None,
                start: None,
                stop: None,
                steps: None,
            } => None,
            PartialSweep {
                param: Some(param),
                start: Some(start),
                stop: Some(stop),
                steps: Some(steps),
            } => Some(SweepSpec {
                param,
                start,
                stop,
                steps,
            }),
            _ => {
                return Err(Error::config(
                    "sweep",
                    "sweep.param, sweep.start, sweep.stop and sweep.steps must be given together",
                ))
            }
        };
        self.validate()
    }

    fn set(&mut self, key: &str, value: &str, sweep: &mut PartialSweep) -> Result<()> {
        match key {
            "run.command" => self.command = parse_enum(key, value, COMMANDS)?,
            "source.mu" => self.mu = finite(key, value)?,
            "channel.eta" => self.eta = finite(key, value)?,
            "channel.length_km" => self.length_km = finite(key, value)?,
            "channel.bias0_ps" => self.bias_ps[0] = finite(key, value)?,
            "channel.bias1_ps" => self.bias_ps[1] = finite(key, value)?,
            "channel.loss_order" => self.loss_order = parse_enum(key, value, LOSS_ORDERS)?,
            "mode.sigma_ps" => self.sigma_ps = finite(key, value)?,
            "mode.spectral0" => self.spectral_labels[0] = optional(key, value, finite)?,
            "mode.spectral1" => self.spectral_labels[1] = optional(key, value, finite)?,
            "eve.strategy" => self.eve = parse_enum(key, value, STRATEGIES)?,
            "eve.delta_t_ps" => self.delta_t_ps = finite(key, value)?,
            "sim.pulses" => self.pulses = number(key, value)?,
            "sim.seed" => self.seed = number(key, value)?,
            "sim.threads" => self.threads = optional(key, value, number)?,
            "protocol.alice0" => self.protocol.alice_states[0] = jones(key, value)?,
            "protocol.alice1" => self.protocol.alice_states[1] = jones(key, value)?,
            "protocol.bob0" => self.protocol.bob_targets[0] = jones(key, value)?,
            "protocol.bob1" => self.protocol.bob_targets[1] = jones(key, value)?,
            "verdict.policy" => self.policy = parse_enum(key, value, POLICIES)?,
            "verdict.threshold" => self.threshold = finite(key, value)?,
            "report.ratio_convention" => self.ratio_convention = parse_enum(key, value, CONVENTIONS)?,
            "sweep.param" => sweep.param = Some(parse_enum(key, value, SWEEP_PARAMS)?),
            "sweep.start" => sweep.start = Some(finite(key, value)?),
            "sweep.stop" => sweep.stop = Some(finite(key, value)?),
            "sweep.steps" => sweep.steps = Some(number(key, value)?),
            "output.format" => self.output_format = parse_enum(key, value, FORMATS)?,
            "output.path" => self.output_path = optional(key, value, |_, v| Ok(PathBuf::from(v)))?,
            other => return Err(Error::config(other, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: String| Err(Error::config(key, reason));
        if !(0.0..=MAX_MU).contains(&self.mu) {
            return bad("source.mu", format!("{} is outside [0, {MAX_MU}]", self.mu));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return bad("channel.eta", format!("{} is outside [0, 1]", self.eta));
        }
        if self.length_km < 0.0 {
            return bad("channel.length_km", "must be >= 0".into());
        }
        if self.sigma_ps <= 0.0 {
            return bad("mode.sigma_ps", "must be > 0".into());
        }
        if self.delta_t_ps < 0.0 {
            return bad("eve.delta_t_ps", "must be >= 0".into());
        }
        if self.pulses == 0 {
            return bad("sim.pulses", "must be >= 1".into());
        }
        if self.threads == Some(0) {
            return bad("sim.threads", "must be >= 1".into());
        }
        if self.threshold <= 0.0 {
            return bad("verdict.threshold", "must be > 0".into());
        }
        if let Some(s) = self.sweep {
            if s.steps < 2 {
                return bad("sweep.steps", format!("{} < 2", s.steps));
            }
            let mut probe = self.clone();
            probe.sweep = None;
            for x in [s.start, s.stop] {
                probe.set_sweep_value(s.param, x);
                probe.validate().map_err(|e| match e {
                    Error::Config { key, reason } => {
                        Error::config("sweep", format!("endpoint {x} makes {key} invalid: {reason}"))
                    }
                    other => other,
                })?;
            }
        }
        Ok(())
    }

    /// Sets the swept parameter; `dt_separation` moves bit 1's arrival time
    /// relative to bit 0.
    pub fn set_sweep_value(&mut self, param: SweepParam, x: f64) {
        match param {
            SweepParam::Mu => self.mu = x,
            SweepParam::Eta => self.eta = x,
            SweepParam::DtSeparation => self.bias_ps[1] = self.bias_ps[0] + x,
            SweepParam::DeltaT => self.delta_t_ps = x,
            SweepParam::Sigma => self.sigma_ps = x,
        }
    }

    /// `key = value` lines for every key, in [`KEYS`] order.
    pub fn emit(&self) -> String {
        let opt = |x: Option<f64>| x.map_or("none".to_string(), |v| v.to_string());
        let mut lines = vec![
            ("run.command", self.command.as_str().to_string()),
            ("source.mu", self.mu.to_string()),
            ("channel.eta", self.eta.to_string()),
            ("channel.length_km", self.length_km.to_string()),
            ("channel.bias0_ps", self.bias_ps[0].to_string()),
            ("channel.bias1_ps", self.bias_ps[1].to_string()),
            (
                "channel.loss_order",
                enum_name(self.loss_order, LOSS_ORDERS).to_string(),
            ),
            ("mode.sigma_ps", self.sigma_ps.to_string()),
            ("mode.spectral0", opt(self.spectral_labels[0])),
            ("mode.spectral1", opt(self.spectral_labels[1])),
            ("eve.strategy", self.eve.as_str().to_string()),
            ("eve.delta_t_ps", self.delta_t_ps.to_string()),
            ("sim.pulses", self.pulses.to_string()),
            ("sim.seed", self.seed.to_string()),
            (
                "sim.threads",
                self.threads.map_or("none".to_string(), |t| t.to_string()),
            ),
            ("protocol.alice0", emit_jones(&self.protocol.alice_states[0])),
            ("protocol.alice1", emit_jones(&self.protocol.alice_states[1])),
            ("protocol.bob0", emit_jones(&self.protocol.bob_targets[0])),
            ("protocol.bob1", emit_jones(&self.protocol.bob_targets[1])),
            ("verdict.policy", self.policy.as_str().to_string()),
            ("verdict.threshold", self.threshold.to_string()),
            (
                "report.ratio_convention",
                enum_name(self.ratio_convention, CONVENTIONS).to_string(),
            ),
        ];
        if let Some(s) = self.sweep {
            lines.extend([
                ("sweep.param", s.param.as_str().to_string()),
                ("sweep.start", s.start.to_string()),
                ("sweep.stop", s.stop.to_string()),
                ("sweep.steps", s.steps.to_string()),
            ]);
        }
        lines.push(("output.format", enum_name(self.output_format, FORMATS).to_string()));
        lines.push((
            "output.path",
            self.output_path
                .as_ref()
                .map_or("none".to_string(), |p| p.display().to_string()),
        ));
        lines.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Flat view of the emitted configuration, echoed into reports.
    pub fn echo(&self) -> Vec<(String, String)> {
        self.emit()
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    pub fn source(&self) -> Result<CoherentSourceModel> {
        CoherentSourceModel::new(self.mu)
    }

    pub fn channel(&self) -> Result<ChannelModel> {
        ChannelModel::new(self.eta, self.length_km, self.bias_ps)
    }

    pub fn resolution(&self) -> Result<ResolutionModel> {
        ResolutionModel::new(self.delta_t_ps)
    }

    pub fn modes(&self) -> Result<[ModeWavefunction; 2]> {
        let mut modes = [
            ModeWavefunction::new(self.bias_ps[0], self.sigma_ps)?,
            ModeWavefunction::new(self.bias_ps[1], self.sigma_ps)?,
        ];
        for (m, label) in modes.iter_mut().zip(self.spectral_labels) {
            m.spectral_label = label;
        }
        Ok(modes)
    }

    pub fn strategy(&self) -> Result<EveStrategy> {
        let res = self.eve.uses_timing().then(|| self.resolution()).transpose()?;
        EveStrategy::new(self.eve, res)
    }

    pub fn simulation(&self) -> Result<SimulationConfig> {
        let cfg = SimulationConfig {
            source: self.source()?,
            channel: self.channel()?,
            loss_order: self.loss_order,
            protocol: self.protocol.clone(),
            modes: self.modes()?,
            eve: self.strategy()?,
            n_pulses: self.pulses,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
        assert_eq!(RunConfig::parse("# nothing\n\n   \n").unwrap(), RunConfig::default());
    }

    #[test]
    fn parses_a_typical_file() {
        let cfg = RunConfig::parse(
            "source.mu = 0.5   # brighter\n\
             channel.bias1_ps = 3.5\n\
             eve.strategy = pns\n\
             protocol.bob0 = 1, 0, 1, 0\n\
             mode.spectral1 = 2\n",
        )
        .unwrap();
        assert_eq!(cfg.mu, 0.5);
        assert_eq!(cfg.bias_ps, [0.0, 3.5]);
        assert_eq!(cfg.eve, EveKind::Pns);
        assert_eq!(cfg.spectral_labels, [None, Some(2.0)]);
        let b0 = cfg.protocol.bob_targets[0];
        assert!((b0.h().re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_key_path() {
        let err = |text: &str| match RunConfig::parse(text) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(err("source.mu = abc"), "source.mu");
        assert_eq!(err("channel.eta = 1.5"), "channel.eta");
        assert_eq!(err("bogus.key = 1"), "bogus.key");
        assert_eq!(err("protocol.alice0 = 1,0,0"), "protocol.alice0");
        assert_eq!(err("protocol.alice0 = 0,0,0,0"), "protocol.alice0");
        assert_eq!(err("just text"), "line 1");
        assert_eq!(err("sweep.param = mu"), "sweep");
        assert_eq!(
            err("sweep.param = mu\nsweep.start=0\nsweep.stop=1\nsweep.steps=1"),
            "sweep.steps"
        );
        assert_eq!(err("sweep.param = rho\n"), "sweep.param");
        assert_eq!(
            err("sweep.param = eta\nsweep.start=0\nsweep.stop=2\nsweep.steps=5"),
            "sweep"
        );
    }

    #[test]
    fn overrides_apply_after_file() {
        let mut cfg = RunConfig::parse("source.mu = 0.5\nsim.seed = 1").unwrap();
        cfg.apply_overrides(["source.mu=0.2", "sim.threads = 4"]).unwrap();
        assert_eq!(cfg.mu, 0.2);
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.threads, Some(4));
        assert!(cfg.apply_overrides(["nonsense"]).is_err());
    }

    #[test]
    fn emit_then_parse_is_identity() {
        let mut cfg = RunConfig {
            mu: 0.123_456_789_012_345_67,
            bias_ps: [-1.5e-3, 7.25],
            ..RunConfig::default()
        };
        cfg.protocol.alice_states[1] = PolarizationState::normalized(C64::new(0.3, 0.1), C64::new(-0.2, 0.9)).unwrap();
        cfg.sweep = Some(SweepSpec {
            param: SweepParam::DeltaT,
            start: 0.0,
            stop: 10.0,
            steps: 11,
        });
        cfg.output_path = Some("out/report.json".into());
        cfg.spectral_labels = [Some(1.0), None];
        cfg.threads = Some(2);
        assert_eq!(RunConfig::parse(&cfg.emit()).unwrap(), cfg);
    }

    #[test]
    fn sweep_grid_endpoints() {
        let s = SweepSpec {
            param: SweepParam::Mu,
            start: 0.01,
            stop: 1.0,
            steps: 50,
        };
        let g = s.grid();
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[49], 1.0);
    }
}
