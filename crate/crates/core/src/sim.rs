//! Seeded pulse-level Monte Carlo of the Alice → Bob exchange with an
//! eavesdropper doing photon-number splitting and/or QND arrival-time
//! measurements, plus the security verdict that combines leak paths.
//!
//! Pulses are processed in fixed batches of [`BATCH_PULSES`]; batch `b`
//! draws from ChaCha8 stream `b` of the configured seed. Counts are summed
//! across batches, so the result does not depend on how batches are
//! scheduled across threads.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{ModeWavefunction, ResolutionModel, DEFAULT_SECURE_THRESHOLD};
use crate::photon::{poisson_weights, truncation_order, ChannelModel, CoherentSourceModel, LossOrder, TAIL_TOLERANCE};
use crate::protocol::{polarization_suitability_table, Bit, ProtocolConfig};

pub const BATCH_PULSES: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveKind {
    None,
    Pns,
    TimingQnd,
    Combined,
}

impl EveKind {
    pub fn uses_pns(self) -> bool {
        matches!(self, EveKind::Pns | EveKind::Combined)
    }

    pub fn uses_timing(self) -> bool {
        matches!(self, EveKind::TimingQnd | EveKind::Combined)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EveKind::None => "none",
            EveKind::Pns => "pns",
            EveKind::TimingQnd => "timing_qnd",
            EveKind::Combined => "combined",
        }
    }
}

impl std::str::FromStr for EveKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(EveKind::None),
            "pns" => Ok(EveKind::Pns),
            "timing_qnd" => Ok(EveKind::TimingQnd),
            "combined" => Ok(EveKind::Combined),
            other => Err(format!(
                "unknown strategy `{other}` (expected none, pns, timing_qnd or combined)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EveStrategy {
    pub kind: EveKind,
    /// Present iff the strategy measures arrival times.
    pub resolution: Option<ResolutionModel>,
}

impl EveStrategy {
    pub fn new(kind: EveKind, resolution: Option<ResolutionModel>) -> Result<Self> {
        if kind.uses_timing() != resolution.is_some() {
            return Err(Error::param(
                "eve.resolution",
                format!(
                    "strategy {} {} a timing resolution",
                    kind.as_str(),
                    if kind.uses_timing() {
                        "requires"
                    } else {
                        "does not take"
                    }
                ),
            ));
        }
        Ok(Self { kind, resolution })
    }

    pub fn none() -> Self {
        Self {
            kind: EveKind::None,
            resolution: None,
        }
    }

    pub fn pns() -> Self {
        Self {
            kind: EveKind::Pns,
            resolution: None,
        }
    }

    pub fn timing(res: ResolutionModel) -> Self {
        Self {
            kind: EveKind::TimingQnd,
            resolution: Some(res),
        }
    }

    pub fn combined(res: ResolutionModel) -> Self {
        Self {
            kind: EveKind::Combined,
            resolution: Some(res),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub source: CoherentSourceModel,
    pub channel: ChannelModel,
    pub loss_order: LossOrder,
    pub protocol: ProtocolConfig,
    /// Temporal mode of each bit value.
    pub modes: [ModeWavefunction; 2],
    pub eve: EveStrategy,
    pub n_pulses: u64,
    pub seed: u64,
}

impl SimulationConfig {
    /// Default protocol, lossless channel, modes of width `sigma_ps`
    /// centred on the channel's timing bias.
    pub fn new(
        source: CoherentSourceModel,
        channel: ChannelModel,
        sigma_ps: f64,
        eve: EveStrategy,
        n_pulses: u64,
        seed: u64,
    ) -> Result<Self> {
        let modes = [
            ModeWavefunction::new(channel.bias_ps[0], sigma_ps)?,
            ModeWavefunction::new(channel.bias_ps[1], sigma_ps)?,
        ];
        let cfg = Self {
            source,
            channel,
            loss_order: LossOrder::default(),
            protocol: ProtocolConfig::default(),
            modes,
            eve,
            n_pulses,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pulses == 0 {
            return Err(Error::param("n_pulses", "must be >= 1"));
        }
        EveStrategy::new(self.eve.kind, self.eve.resolution)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// One thread, batches in order.
    Sequential,
    /// A dedicated pool of the given width.
    Threads(usize),
    /// Whatever the global pool provides.
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub pulses: u64,
    pub bob_detections: u64,
    pub sift_rate: f64,
    pub eve_pns_hits: u64,
    pub eve_timing_correct: u64,
    pub eve_timing_guesses: u64,
    /// Bob's detections for which Eve also holds the sifted bit value,
    /// through any active strategy.
    pub eve_known_sifted: u64,
    /// `eve_known_sifted / bob_detections` (0 without detections).
    pub eve_fraction: f64,
    /// Bob's detections indexed `[alice bit][bob setting]`.
    pub per_config_counts: [[u64; 2]; 2],
    pub seed: u64,
    pub elapsed: f64,
}

impl SimulationResult {
    pub fn timing_accuracy(&self) -> Option<f64> {
        (self.eve_timing_guesses > 0).then(|| self.eve_timing_correct as f64 / self.eve_timing_guesses as f64)
    }

    /// The result with the wall-clock field zeroed, for reproducibility
    /// comparisons.
    pub fn without_elapsed(&self) -> Self {
        Self {
            elapsed: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    bob: u64,
    pns: u64,
    timing_correct: u64,
    timing_guesses: u64,
    known: u64,
    per_config: [[u64; 2]; 2],
}

impl Counts {
    fn merge(mut self, other: Self) -> Self {
        self.bob += other.bob;
        self.pns += other.pns;
        self.timing_correct += other.timing_correct;
        self.timing_guesses += other.timing_guesses;
        self.known += other.known;
        for i in 0..2 {
            for j in 0..2 {
                self.per_config[i][j] += other.per_config[i][j];
            }
        }
        self
    }
}

/// Everything a batch needs, precomputed once per run.
struct Kernel {
    seed: u64,
    n_pulses: u64,
    entries: [[f64; 2]; 2],
    cdf: Vec<f64>,
    eta: f64,
    loss_order: LossOrder,
    pns: bool,
    timing: Option<(ResolutionModel, [ModeWavefunction; 2])>,
}

impl Kernel {
    fn new(config: &SimulationConfig) -> Result<Self> {
        // The photon number is drawn at Alice's output; loss thins it.
        let mu = config.source.mu;
        let fock = poisson_weights(mu, truncation_order(mu, TAIL_TOLERANCE))?;
        Ok(Self {
            seed: config.seed,
            n_pulses: config.n_pulses,
            entries: polarization_suitability_table(&config.protocol).entries,
            cdf: fock.cdf(),
            eta: config.channel.eta,
            loss_order: config.loss_order,
            pns: config.eve.kind.uses_pns(),
            timing: config
                .eve
                .resolution
                .filter(|_| config.eve.kind.uses_timing())
                .map(|r| (r, config.modes)),
        })
    }

    fn batches(&self) -> u64 {
        self.n_pulses.div_ceil(BATCH_PULSES)
    }

    fn photon_number(&self, u: f64) -> u32 {
        self.cdf.iter().position(|&c| u < c).unwrap_or(self.cdf.len()) as u32
    }

    fn run_batch(&self, batch: u64) -> Counts {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(batch);
        let start = batch * BATCH_PULSES;
        let end = (start + BATCH_PULSES).min(self.n_pulses);
        let mut c = Counts::default();
        for _ in start..end {
            let bits = rng.next_u64();
            let i = (bits & 1) as usize;
            let j = ((bits >> 1) & 1) as usize;
            let n_source = self.photon_number(rng.random::<f64>());
            let n_bob = if self.eta < 1.0 {
                (0..n_source).filter(|_| rng.random::<f64>() < self.eta).count() as u32
            } else {
                n_source
            };
            let n_eve = match self.loss_order {
                LossOrder::EveFirst => n_source,
                LossOrder::LossFirst => n_bob,
            };
            let p = self.entries[i][j];

            let detected = n_bob >= 1 && rng.random::<f64>() < p;
            let pns_hit = self.pns && n_eve >= 2 && rng.random::<f64>() < p;
            let mut timing_guess = None;
            if let Some((res, modes)) = &self.timing {
                if n_eve >= 1 {
                    let mode = &modes[i];
                    let z: f64 = rng.sample(StandardNormal);
                    let dither = rng.random::<f64>() - 0.5;
                    let t = mode.center_ps + mode.width_ps * z + res.delta_t_ps * dither;
                    let guess = eve_timing_guess(t, modes, res).index();
                    c.timing_guesses += 1;
                    c.timing_correct += u64::from(guess == i);
                    timing_guess = Some(guess);
                }
            }

            c.pns += u64::from(pns_hit);
            if detected {
                c.bob += 1;
                c.per_config[i][j] += 1;
                // Bob's sifted bit is his setting j.
                if pns_hit || timing_guess == Some(j) {
                    c.known += 1;
                }
            }
        }
        c
    }
}

/// Runs the exchange with the default [`Parallelism`].
pub fn simulate_exchange(config: &SimulationConfig) -> Result<SimulationResult> {
    simulate_exchange_with(config, Parallelism::default())
}

pub fn simulate_exchange_with(config: &SimulationConfig, parallelism: Parallelism) -> Result<SimulationResult> {
    config.validate()?;
    let clock = Stopwatch::start();
    let kernel = Kernel::new(config)?;
    let counts = run_batches(&kernel, parallelism)?;
    let pulses = config.n_pulses;
    Ok(SimulationResult {
        pulses,
        bob_detections: counts.bob,
        sift_rate: counts.bob as f64 / pulses as f64,
        eve_pns_hits: counts.pns,
        eve_timing_correct: counts.timing_correct,
        eve_timing_guesses: counts.timing_guesses,
        eve_known_sifted: counts.known,
        eve_fraction: if counts.bob > 0 {
            counts.known as f64 / counts.bob as f64
        } else {
            0.0
        },
        per_config_counts: counts.per_config,
        seed: config.seed,
        elapsed: clock.seconds(),
    })
}

fn run_sequential(kernel: &Kernel) -> Counts {
    (0..kernel.batches())
        .map(|b| kernel.run_batch(b))
        .fold(Counts::default(), Counts::merge)
}

#[cfg(feature = "parallel")]
fn run_batches(kernel: &Kernel, parallelism: Parallelism) -> Result<Counts> {
    use rayon::prelude::*;
    let par = || {
        (0..kernel.batches())
            .into_par_iter()
            .map(|b| kernel.run_batch(b))
            .reduce(Counts::default, Counts::merge)
    };
    match parallelism {
        Parallelism::Sequential => Ok(run_sequential(kernel)),
        Parallelism::Auto => Ok(par()),
        Parallelism::Threads(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::param("threads", e.to_string()))?;
            Ok(pool.install(par))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn run_batches(kernel: &Kernel, _parallelism: Parallelism) -> Result<Counts> {
    Ok(run_sequential(kernel))
}

struct Stopwatch(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Stopwatch {
    fn start() -> Self {
        Self(
            #[cfg(not(target_arch = "wasm32"))]
            std::time::Instant::now(),
        )
    }

    fn seconds(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.0.elapsed().as_secs_f64();
        #[cfg(target_arch = "wasm32")]
        0.0
    }
}

/// Maximum-likelihood bit for an arrival time `t`, comparing the two
/// modes' intensity profiles after smearing by Eve's resolution. Ties go
/// to bit 0.
pub fn eve_timing_guess(t: f64, modes: &[ModeWavefunction; 2], res: &ResolutionModel) -> Bit {
    let log_likelihood = |m: &ModeWavefunction| {
        let s = m.smeared(res).width_ps;
        let d = (t - m.center_ps) / s;
        -s.ln() - 0.5 * d * d
    };
    Bit::from(log_likelihood(&modes[1]) > log_likelihood(&modes[0]))
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Expected accuracy of [`eve_timing_guess`] for two equal-width modes
/// `separation_ps` apart, when arrival times carry Gaussian jitter `sigma_ps`
/// plus a uniform bin error of width `delta_t_ps`.
pub fn expected_timing_accuracy(separation_ps: f64, sigma_ps: f64, delta_t_ps: f64) -> f64 {
    let half = 0.5 * separation_ps.abs();
    if half == 0.0 {
        return 0.5;
    }
    if delta_t_ps == 0.0 {
        return std_normal_cdf(half / sigma_ps);
    }
    // Average of Φ((half − v)/σ) over v uniform on ±δT/2, using ∫Φ = xΦ + φ.
    let antiderivative = |x: f64| x * std_normal_cdf(x) + std_normal_pdf(x);
    let hi = (half + 0.5 * delta_t_ps) / sigma_ps;
    let lo = (half - 0.5 * delta_t_ps) / sigma_ps;
    sigma_ps / delta_t_ps * (antiderivative(hi) - antiderivative(lo))
}

/// `eve_pns_hits / bob_detections`, the empirical counterpart of Γ.
pub fn empirical_gamma(result: &SimulationResult, strategy: &EveStrategy) -> Result<f64> {
    if !strategy.kind.uses_pns() {
        return Err(Error::UndefinedRatio(
            "strategy does not include photon-number splitting",
        ));
    }
    if result.bob_detections == 0 {
        return Err(Error::UndefinedRatio("no detections at Bob"));
    }
    Ok(result.eve_pns_hits as f64 / result.bob_detections as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombinationPolicy {
    /// Worst single leak path.
    #[default]
    Max,
    Sum,
}

impl std::str::FromStr for CombinationPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "max" => Ok(Self::Max),
            "sum" => Ok(Self::Sum),
            other => Err(format!("unknown policy `{other}` (expected max or sum)")),
        }
    }
}

impl CombinationPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Max => "max",
            Self::Sum => "sum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum VerdictLevel {
    Secure,
    Marginal,
    Insecure,
}

impl fmt::Display for VerdictLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictLevel::Secure => "SECURE",
            VerdictLevel::Marginal => "MARGINAL",
            VerdictLevel::Insecure => "INSECURE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerdictInputs {
    pub s_ab_sum: f64,
    /// `None` when the path is undefined and excluded.
    pub pns_ratio: Option<f64>,
    pub side_channel_ratio: Option<f64>,
    pub policy: CombinationPolicy,
    pub threshold: f64,
}

impl VerdictInputs {
    pub fn new(s_ab_sum: f64, pns_ratio: Option<f64>, side_channel_ratio: Option<f64>) -> Self {
        Self {
            s_ab_sum,
            pns_ratio,
            side_channel_ratio,
            policy: CombinationPolicy::Max,
            threshold: DEFAULT_SECURE_THRESHOLD,
        }
    }

    /// Builds path ratios from suitability sums: `0` when Eve's sum is 0,
    /// `∞` when only Bob's is.
    pub fn from_sums(s_ab_sum: f64, s_ae_pns_sum: f64, s_ae_side_sum: f64) -> Self {
        Self::new(
            s_ab_sum,
            Some(ratio_or_limit(s_ae_pns_sum, s_ab_sum)),
            Some(ratio_or_limit(s_ae_side_sum, s_ab_sum)),
        )
    }
}

fn ratio_or_limit(eve: f64, bob: f64) -> f64 {
    if eve <= 0.0 {
        0.0
    } else if bob <= 0.0 {
        f64::INFINITY
    } else {
        eve / bob
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub level: VerdictLevel,
    pub total_leakage: f64,
    pub inputs: VerdictInputs,
}

/// INSECURE once the combined leakage reaches 1 (privacy amplification
/// would have to remove every bit), MARGINAL from the threshold on.
pub fn security_verdict(inputs: VerdictInputs) -> Verdict {
    let paths = [inputs.pns_ratio, inputs.side_channel_ratio];
    let defined = paths.iter().flatten().copied();
    let total_leakage = match inputs.policy {
        CombinationPolicy::Max => defined.fold(0.0, f64::max),
        CombinationPolicy::Sum => defined.sum(),
    };
    let level = if total_leakage >= 1.0 {
        VerdictLevel::Insecure
    } else if total_leakage >= inputs.threshold {
        VerdictLevel::Marginal
    } else {
        VerdictLevel::Secure
    };
    Verdict {
        level,
        total_leakage,
        inputs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon::gamma_closed_form;
    use approx::assert_abs_diff_eq;

    fn config(mu: f64, eve: EveStrategy, n: u64, seed: u64) -> SimulationConfig {
        SimulationConfig::new(
            CoherentSourceModel::new(mu).unwrap(),
            ChannelModel::lossless(),
            1.0,
            eve,
            n,
            seed,
        )
        .unwrap()
    }

    fn z_binomial(count: u64, n: u64, p: f64) -> f64 {
        let n = n as f64;
        (count as f64 - n * p) / (n * p * (1.0 - p)).sqrt()
    }

    #[test]
    fn vacuum_source_is_silent() {
        let r = simulate_exchange(&config(0.0, EveStrategy::combined(ResolutionModel::ideal()), 50_000, 7)).unwrap();
        assert_eq!(r.bob_detections, 0);
        assert_eq!(r.eve_pns_hits, 0);
        assert_eq!(r.eve_timing_guesses, 0);
        assert_eq!(r.eve_fraction, 0.0);
    }

    #[test]
    fn sift_rate_matches_quarter_of_nonempty_probability() {
        let n = 1_000_000;
        let r = simulate_exchange(&config(0.1, EveStrategy::none(), n, 42)).unwrap();
        let p = 0.25 * -(-0.1f64).exp_m1();
        assert_abs_diff_eq!(p, 0.023_790_645_491_010_1, epsilon = 1e-15);
        assert!(z_binomial(r.bob_detections, n, p).abs() < 3.0);
        assert_eq!(r.per_config_counts[0][1], 0);
        assert_eq!(r.per_config_counts[1][0], 0);
        assert_eq!(r.sift_rate, r.bob_detections as f64 / n as f64);
    }

    #[test]
    fn gamma_converges_at_unit_mu() {
        let eve = EveStrategy::pns();
        let r = simulate_exchange(&config(1.0, eve, 1_000_000, 3)).unwrap();
        let g = empirical_gamma(&r, &eve).unwrap();
        let want = gamma_closed_form(1.0).unwrap();
        assert!((g - want).abs() / want < 0.02, "{g} vs {want}");
        assert!(empirical_gamma(&r, &EveStrategy::none()).is_err());
    }

    #[test]
    fn identical_modes_leave_eve_guessing() {
        let r = simulate_exchange(&config(0.5, EveStrategy::timing(ResolutionModel::ideal()), 400_000, 11)).unwrap();
        let n = r.eve_timing_guesses;
        assert!(z_binomial(r.eve_timing_correct, n, 0.5).abs() < 3.0);
    }

    #[test]
    fn determinism_across_partitions() {
        let cfg = config(
            0.3,
            EveStrategy::combined(ResolutionModel::new(0.5).unwrap()),
            100_003,
            99,
        );
        let a = simulate_exchange_with(&cfg, Parallelism::Sequential).unwrap();
        let b = simulate_exchange_with(&cfg, Parallelism::Threads(3)).unwrap();
        let c = simulate_exchange_with(&cfg, Parallelism::Auto).unwrap();
        assert_eq!(a.without_elapsed(), b.without_elapsed());
        assert_eq!(a.without_elapsed(), c.without_elapsed());
        let other = simulate_exchange(&SimulationConfig { seed: 100, ..cfg }).unwrap();
        assert_ne!(a.bob_detections, other.bob_detections);
    }

    #[test]
    fn lossy_channel_lowers_sift_rate() {
        let mut cfg = config(0.4, EveStrategy::pns(), 400_000, 5);
        cfg.channel = ChannelModel::new(0.25, 10.0, [0.0, 0.0]).unwrap();
        let r = simulate_exchange(&cfg).unwrap();
        let p = 0.25 * -(-0.1f64).exp_m1();
        assert!(z_binomial(r.bob_detections, cfg.n_pulses, p).abs() < 3.0);
        // Eve taps the undiminished pulse.
        let q = 0.25 * crate::photon::prob_at_least(0.4, 2);
        assert!(z_binomial(r.eve_pns_hits, cfg.n_pulses, q).abs() < 3.0);
    }

    #[test]
    fn guess_examples() {
        let ideal = ResolutionModel::ideal();
        let modes = [
            ModeWavefunction::new(0.0, 1.0).unwrap(),
            ModeWavefunction::new(50.0, 1.0).unwrap(),
        ];
        assert_eq!(eve_timing_guess(0.0, &modes, &ideal), Bit::Zero);
        assert_eq!(eve_timing_guess(49.0, &modes, &ideal), Bit::One);
        assert_eq!(eve_timing_guess(25.0, &modes, &ideal), Bit::Zero);
        let same = [modes[0], modes[0]];
        assert_eq!(eve_timing_guess(0.3, &same, &ideal), Bit::Zero);
    }

    #[test]
    fn expected_accuracy_limits() {
        assert_abs_diff_eq!(
            expected_timing_accuracy(2.0, 1.0, 0.0),
            0.841_344_746_068_542_9,
            epsilon = 1e-15
        );
        assert_eq!(expected_timing_accuracy(0.0, 1.0, 3.0), 0.5);
        // Tiny bins reduce to the ideal detector.
        assert_abs_diff_eq!(
            expected_timing_accuracy(2.0, 1.0, 1e-6),
            expected_timing_accuracy(2.0, 1.0, 0.0),
            epsilon = 1e-10
        );
        let mut prev = 1.0;
        for k in 0..200 {
            let a = expected_timing_accuracy(2.0, 1.0, 0.1 * k as f64);
            assert!(a <= prev + 1e-15 && a >= 0.5);
            prev = a;
        }
    }

    #[test]
    fn strategy_validation() {
        assert!(EveStrategy::new(EveKind::Pns, Some(ResolutionModel::ideal())).is_err());
        assert!(EveStrategy::new(EveKind::TimingQnd, None).is_err());
        assert!(EveStrategy::new(EveKind::Combined, Some(ResolutionModel::ideal())).is_ok());
        assert_eq!("timing_qnd".parse::<EveKind>().unwrap(), EveKind::TimingQnd);
    }

    #[test]
    fn verdict_examples() {
        let g = gamma_closed_form(0.1).unwrap();
        let secure = security_verdict(VerdictInputs::new(-(-0.1f64).exp_m1(), Some(g), Some(0.0)));
        assert_eq!(secure.level, VerdictLevel::Secure);
        assert_abs_diff_eq!(secure.total_leakage, 0.049_166_805_522_495_04, epsilon = 1e-15);

        let insecure = security_verdict(VerdictInputs::new(0.095, Some(g), Some(10.508_331_944_775_05)));
        assert_eq!(insecure.level, VerdictLevel::Insecure);
        assert!(insecure.total_leakage >= 10.5);

        let single_photon = security_verdict(VerdictInputs::from_sums(0.0, 0.0, 0.0));
        assert_eq!(single_photon.level, VerdictLevel::Secure);
        assert_eq!(single_photon.total_leakage, 0.0);

        let mut marginal = VerdictInputs::new(1.0, Some(0.08), Some(0.05));
        assert_eq!(security_verdict(marginal).level, VerdictLevel::Secure);
        marginal.policy = CombinationPolicy::Sum;
        assert_eq!(security_verdict(marginal).level, VerdictLevel::Marginal);
        assert_eq!(
            security_verdict(VerdictInputs::from_sums(0.0, 0.1, 0.0)).total_leakage,
            f64::INFINITY
        );
    }
}
