//! Weak coherent pulses: Poisson photon-number statistics, the number-state
//! density matrix, and the Bob / Eve (photon-number-splitting) suitabilities
//! with their leak ratio Γ.
//!
//! The suitabilities are available both as closed forms and as traces over a
//! truncated number ⊗ polarization space; the two routes are checked
//! against each other in the tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{
    alice_gun_density, bob_target_density, polarization_suitability_table, Bit, ProtocolConfig, SuitabilityTable,
};
use crate::qstate::{CMatrix, DensityMatrix, HilbertLabel, C64};

/// Largest mean photon number accepted.
pub const MAX_MU: f64 = 50.0;

/// Poisson mass allowed beyond a truncated number space.
pub const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentSourceModel {
    /// Mean photon number per pulse, `|α|²`.
    pub mu: f64,
}

impl CoherentSourceModel {
    pub fn new(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::param("mu", format!("{mu} is not a finite value >= 0")));
        }
        if mu > MAX_MU {
            return Err(Error::param("mu", format!("{mu} exceeds the cap of {MAX_MU}")));
        }
        Ok(Self { mu })
    }

    pub fn vacuum() -> Self {
        Self { mu: 0.0 }
    }

    pub fn is_vacuum(&self) -> bool {
        self.mu == 0.0
    }

    /// `P(n ≥ 1)`, the probability that a pulse carries any photon.
    pub fn p_nonempty(&self) -> f64 {
        prob_at_least(self.mu, 1)
    }

    /// `P(n ≥ 2)`, the probability of a multi-photon pulse.
    pub fn p_multi(&self) -> f64 {
        prob_at_least(self.mu, 2)
    }
}

/// Where Eve's beam-splitting cloud sits relative to the channel loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossOrder {
    /// Eve taps the pulse at Alice's output, Bob sees the attenuated pulse.
    #[default]
    EveFirst,
    /// Loss acts first; Eve and Bob both see the attenuated pulse.
    LossFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub eta: f64,
    /// Informational only.
    pub length_km: f64,
    /// Arrival-time offset of bit 0 and bit 1, in picoseconds.
    pub bias_ps: [f64; 2],
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            eta: 1.0,
            length_km: 0.0,
            bias_ps: [0.0, 0.0],
        }
    }
}

impl ChannelModel {
    pub fn new(eta: f64, length_km: f64, bias_ps: [f64; 2]) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::param("eta", format!("{eta} is outside [0, 1]")));
        }
        if !length_km.is_finite() || length_km < 0.0 {
            return Err(Error::param("length_km", format!("{length_km} must be >= 0")));
        }
        if bias_ps.iter().any(|b| !b.is_finite()) {
            return Err(Error::param("bias_ps", "timing offsets must be finite"));
        }
        Ok(Self {
            eta,
            length_km,
            bias_ps,
        })
    }

    pub fn lossless() -> Self {
        Self::default()
    }

    pub fn separation_ps(&self) -> f64 {
        (self.bias_ps[1] - self.bias_ps[0]).abs()
    }
}

/// Coherent amplitude scaling `α → √η α`, i.e. `μ → ημ`.
pub fn attenuate(source: &CoherentSourceModel, channel: &ChannelModel) -> CoherentSourceModel {
    CoherentSourceModel {
        mu: source.mu * channel.eta,
    }
}

/// Sources seen by Eve and by Bob under the given loss placement.
pub fn split_sources(
    source: &CoherentSourceModel,
    channel: &ChannelModel,
    order: LossOrder,
) -> (CoherentSourceModel, CoherentSourceModel) {
    let bob = attenuate(source, channel);
    match order {
        LossOrder::EveFirst => (*source, bob),
        LossOrder::LossFirst => (bob, bob),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockDistribution {
    pub mu: f64,
    pub n_max: usize,
    pub weights: Vec<f64>,
}

impl FockDistribution {
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Cumulative sums of `weights`.
    pub fn cdf(&self) -> Vec<f64> {
        self.weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect()
    }
}

/// `P(n) = e^{−μ} μⁿ / n!` for `n = 0..=n_max`, by the multiplicative
/// recurrence from `P(0)`.
fn raw_weights(mu: f64, n_max: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n_max + 1);
    let mut p = (-mu).exp();
    w.push(p);
    for n in 1..=n_max {
        p *= mu / n as f64;
        w.push(p);
    }
    w
}

/// `P(N > n)`, summed from the far tail so that small tails keep their
/// relative precision.
pub fn poisson_tail_above(mu: f64, n: usize) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    prob_at_least(mu, n + 1)
}

/// `P(N ≥ k)` for `N ~ Poisson(μ)`.
pub fn prob_at_least(mu: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if mu == 0.0 {
        return 0.0;
    }
    if k == 1 {
        return -(-mu).exp_m1();
    }
    if (k as f64) > mu {
        // Terms decrease past the mode; sum upward from k.
        let mut term = raw_weights(mu, k)[k];
        let mut sum = 0.0;
        let mut n = k;
        while term > sum * 1e-18 && term > 0.0 {
            sum += term;
            n += 1;
            term *= mu / n as f64;
        }
        sum
    } else {
        let head: f64 = raw_weights(mu, k - 1).iter().sum();
        (1.0 - head).max(0.0)
    }
}

/// Smallest `n_max` whose Poisson tail beyond `n_max` is below `tail_tol`.
pub fn truncation_order(mu: f64, tail_tol: f64) -> usize {
    let mut n = 0;
    while poisson_tail_above(mu, n) >= tail_tol {
        n += 1;
    }
    n
}

pub fn poisson_weights(mu: f64, n_max: usize) -> Result<FockDistribution> {
    CoherentSourceModel::new(mu)?;
    let tail = poisson_tail_above(mu, n_max);
    if tail >= TAIL_TOLERANCE {
        return Err(Error::Truncation {
            n_max,
            required: truncation_order(mu, TAIL_TOLERANCE),
            tail,
        });
    }
    Ok(FockDistribution {
        mu,
        n_max,
        weights: raw_weights(mu, n_max),
    })
}

/// `(Σ_n P(n)|n⟩⟨n|) ⊗ ρ_pol` on the truncated space, renormalized to unit
/// trace.
pub fn weak_coherent_density(source: &CoherentSourceModel, pol: &DensityMatrix, n_max: usize) -> Result<DensityMatrix> {
    let fock = poisson_weights(source.mu, n_max)?;
    let number = number_density(&fock)?;
    crate::qstate::tensor_product(&number, pol)
}

fn number_density(fock: &FockDistribution) -> Result<DensityMatrix> {
    let space = HilbertLabel::number(fock.n_max)?;
    let mass = fock.mass();
    let diag = CMatrix::from_fn(fock.n_max + 1, fock.n_max + 1, |r, c| {
        if r == c {
            C64::new(fock.weights[r] / mass, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    DensityMatrix::new(space, diag)
}

/// `Σ_{n ≥ min_photons} |n⟩⟨n|` on `0..=n_max`.
fn number_projector(min_photons: usize, n_max: usize) -> CMatrix {
    CMatrix::from_fn(n_max + 1, n_max + 1, |r, c| {
        if r == c && r >= min_photons {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `Tr(ρ_source (Π_{n ≥ min_photons} ⊗ ρ_B,j))` built explicitly on the
/// truncated number ⊗ polarization space.
pub fn number_space_suitability(
    source: &CoherentSourceModel,
    config: &ProtocolConfig,
    i: Bit,
    j: Bit,
    min_photons: usize,
) -> Result<f64> {
    let n_max = truncation_order(source.mu, TAIL_TOLERANCE).max(min_photons);
    let rho = weak_coherent_density(source, &alice_gun_density(config, i), n_max)?;
    let target = number_projector(min_photons, n_max).kronecker(bob_target_density(config, j).entries());
    rho.expectation(&target)
}

/// `P(n ≥ 1) · Tr(ρ_A,i ρ_B,j)`; `(1 − e^{−μ}) δ_ij / 2` for the default
/// protocol.
pub fn bob_suitability_wcp(source: &CoherentSourceModel, config: &ProtocolConfig, i: Bit, j: Bit) -> f64 {
    source.p_nonempty() * polarization_suitability_table(config).get(i, j)
}

/// `P(n ≥ 2) · Tr(ρ_A,i ρ_E,j)` with Eve repeating Bob's measurement on the
/// surplus photons.
pub fn eve_suitability_pns(source: &CoherentSourceModel, config: &ProtocolConfig, i: Bit, j: Bit) -> f64 {
    source.p_multi() * polarization_suitability_table(config).get(i, j)
}

pub fn bob_table_wcp(source: &CoherentSourceModel, config: &ProtocolConfig) -> SuitabilityTable {
    polarization_suitability_table(config).scaled(source.p_nonempty())
}

pub fn eve_table_pns(source: &CoherentSourceModel, config: &ProtocolConfig) -> SuitabilityTable {
    polarization_suitability_table(config).scaled(source.p_multi())
}

/// `Γ = Σ S_AE / Σ S_AB`, with Eve and Bob seeing the same source.
pub fn pns_leak_ratio(source: &CoherentSourceModel, config: &ProtocolConfig) -> Result<f64> {
    pns_leak_ratio_split(source, source, config)
}

/// Γ when Eve and Bob see differently attenuated pulses.
pub fn pns_leak_ratio_split(
    eve: &CoherentSourceModel,
    bob: &CoherentSourceModel,
    config: &ProtocolConfig,
) -> Result<f64> {
    let s_ab = bob_table_wcp(bob, config).sum_ab;
    if s_ab <= 0.0 {
        return Err(Error::UndefinedRatio(
            "Bob's suitability sum is zero (vacuum source or blind analyzers)",
        ));
    }
    Ok(eve_table_pns(eve, config).sum_ab / s_ab)
}

/// `(1 − e^{−μ} − μ e^{−μ}) / (1 − e^{−μ})` evaluated without cancellation.
pub fn gamma_closed_form(mu: f64) -> Result<f64> {
    if mu <= 0.0 {
        return Err(Error::UndefinedRatio("Γ is undefined for μ = 0"));
    }
    Ok(prob_at_least(mu, 2) / prob_at_least(mu, 1))
}

/// First-order approximation `Γ ≈ μ`.
///
/// Note the exact ratio behaves as `μ/2` for small `μ`.
pub fn gamma_small_alpha(mu: f64) -> f64 {
    mu
}
