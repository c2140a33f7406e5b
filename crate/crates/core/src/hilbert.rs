//! Degrees of freedom beyond polarization: temporal wavepackets with an
//! optional spectral tag, Eve's side-channel suitability when she resolves
//! them, and the Hong–Ou–Mandel overlap check.
//!
//! Temporal modes are real Gaussian amplitudes
//! `ψ(t) = (2πσ²)^{-1/4} exp(−(t − t_c)² / 4σ²)`, so `σ` is the standard
//! deviation of the intensity `|ψ|²`. Times are in picoseconds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photon::{CoherentSourceModel, FockDistribution};
use crate::protocol::{Bit, PolarizationState, SuitabilityTable};
use crate::quadrature;

/// Leak ratio at or above which a link is reported as not secure.
pub const DEFAULT_SECURE_THRESHOLD: f64 = 0.11;

const BISECTION_STEPS: usize = 200;
const BOUNDARY_TOLERANCE_PS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeWavefunction {
    pub center_ps: f64,
    pub width_ps: f64,
    /// Discrete stand-in for the wave-vector content; distinct labels are
    /// orthogonal.
    pub spectral_label: Option<f64>,
}

impl ModeWavefunction {
    pub fn new(center_ps: f64, width_ps: f64) -> Result<Self> {
        if !(width_ps > 0.0 && width_ps.is_finite()) {
            return Err(Error::param("width_ps", format!("{width_ps} must be > 0")));
        }
        if !center_ps.is_finite() {
            return Err(Error::param("center_ps", "must be finite"));
        }
        Ok(Self {
            center_ps,
            width_ps,
            spectral_label: None,
        })
    }

    pub fn with_spectral_label(mut self, label: f64) -> Self {
        self.spectral_label = Some(label);
        self
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        let s2 = self.width_ps * self.width_ps;
        let d = t - self.center_ps;
        (2.0 * PI * s2).powf(-0.25) * (-d * d / (4.0 * s2)).exp()
    }

    pub fn intensity(&self, t: f64) -> f64 {
        let a = self.amplitude(t);
        a * a
    }

    /// The same mode as recorded by a detector with time bins of `res`.
    pub fn smeared(&self, res: &ResolutionModel) -> Self {
        Self {
            width_ps: (self.width_ps.powi(2) + res.delta_t_ps.powi(2) / 12.0).sqrt(),
            ..*self
        }
    }
}

fn spectral_factor(a: &ModeWavefunction, b: &ModeWavefunction) -> f64 {
    if a.spectral_label == b.spectral_label {
        1.0
    } else {
        0.0
    }
}

/// `⟨Ω_a|Ω_b⟩` for two Gaussian modes, times the spectral overlap.
pub fn mode_overlap(a: &ModeWavefunction, b: &ModeWavefunction) -> f64 {
    let (sa2, sb2) = (a.width_ps.powi(2), b.width_ps.powi(2));
    let sum = sa2 + sb2;
    let d = a.center_ps - b.center_ps;
    let prefactor = (2.0 * a.width_ps * b.width_ps / sum).sqrt();
    spectral_factor(a, b) * prefactor * (-d * d / (4.0 * sum)).exp()
}

/// `∫ ψ_a ψ_b dt` by adaptive quadrature; the numerical counterpart of
/// [`mode_overlap`].
pub fn mode_overlap_quadrature(a: &ModeWavefunction, b: &ModeWavefunction) -> Result<f64> {
    let span = 40.0 * a.width_ps.max(b.width_ps);
    let lo = a.center_ps.min(b.center_ps) - span;
    let hi = a.center_ps.max(b.center_ps) + span;
    let value = quadrature::integrate(|t| a.amplitude(t) * b.amplitude(t), lo, hi, 1e-13, 1e-300)?;
    Ok(spectral_factor(a, b) * value)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResolutionModel {
    /// Eve's timing bin width δT in picoseconds; 0 is ideal.
    pub delta_t_ps: f64,
}

impl ResolutionModel {
    pub fn new(delta_t_ps: f64) -> Result<Self> {
        if !(delta_t_ps >= 0.0 && delta_t_ps.is_finite()) {
            return Err(Error::param("delta_t_ps", format!("{delta_t_ps} must be >= 0")));
        }
        Ok(Self { delta_t_ps })
    }

    pub fn ideal() -> Self {
        Self { delta_t_ps: 0.0 }
    }
}

/// Overlap as seen through Eve's finite timing resolution: each width is
/// inflated by the variance `δT²/12` of a uniform bin.
pub fn resolution_limited_overlap(a: &ModeWavefunction, b: &ModeWavefunction, res: &ResolutionModel) -> f64 {
    mode_overlap(&a.smeared(res), &b.smeared(res))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullPhotonState {
    pub number: FockDistribution,
    pub mode: ModeWavefunction,
    #[serde(skip)]
    pub polarization: PolarizationState,
    pub bit: Bit,
}

impl FullPhotonState {
    /// `⟨Ψ_self|Ψ_other⟩` over mode and polarization.
    pub fn single_photon_overlap(&self, other: &Self) -> nalgebra::Complex<f64> {
        self.polarization.inner(&other.polarization) * mode_overlap(&self.mode, &other.mode)
    }
}

/// `I(t) = |ψ_a(t)Π_a + ψ_b(t)Π_b|²` on the given time grid.
///
/// The cross term carries `Re⟨Π_a|Π_b⟩` and the spectral factor, so
/// orthogonal polarizations or distinct spectral tags show no interference.
pub fn interference_pattern(a: &FullPhotonState, b: &FullPhotonState, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::Domain("time grid is empty".into()));
    }
    if grid
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::Domain("time grid must be strictly increasing".into()));
    }
    let cross = a.polarization.inner(&b.polarization).re * spectral_factor(&a.mode, &b.mode);
    Ok(grid
        .iter()
        .map(|&t| {
            let (pa, pb) = (a.mode.amplitude(t), b.mode.amplitude(t));
            pa * pa + pb * pb + 2.0 * cross * pa * pb
        })
        .collect())
}

/// Overlap `ω` Eve faces when sorting arrival times of the two encoded
/// states; independent of their polarizations.
pub fn side_channel_overlap(state0: &FullPhotonState, state1: &FullPhotonState, res: &ResolutionModel) -> f64 {
    resolution_limited_overlap(&state0.mode, &state1.mode, res)
}

/// `S_AE_ij = ½ δ_ij (1 − ω)` for a timing-resolving eavesdropper with two
/// encoded target states.
pub fn eve_suitability_sidechannel(
    state0: &FullPhotonState,
    state1: &FullPhotonState,
    res: &ResolutionModel,
    i: Bit,
    j: Bit,
) -> f64 {
    side_channel_entry(side_channel_overlap(state0, state1, res), i, j)
}

fn side_channel_entry(omega: f64, i: Bit, j: Bit) -> f64 {
    if i == j {
        0.5 * (1.0 - omega)
    } else {
        0.0
    }
}

pub fn side_channel_table(omega: f64) -> SuitabilityTable {
    let mut entries = [[0.0; 2]; 2];
    for i in Bit::BOTH {
        for j in Bit::BOTH {
            entries[i.index()][j.index()] = side_channel_entry(omega, i, j);
        }
    }
    SuitabilityTable::from_entries(entries)
}

/// How the side-channel leak ratio is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioConvention {
    /// `(1 − ω) / (1 − e^{−μ})`.
    #[default]
    Closed,
    /// `Σ S_AE / Σ S_AB` with Bob's actual protocol table; coincides with
    /// `Closed` for a protocol with a `½δ_ij` table.
    Tables,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageReport {
    pub mode_overlap: f64,
    pub s_ae_table: [[f64; 2]; 2],
    pub leak_ratio: f64,
    pub secure: bool,
    pub breakdown: bool,
}

impl LeakageReport {
    fn new(omega: f64, leak_ratio: f64, threshold: f64) -> Self {
        let breakdown = leak_ratio >= 1.0;
        Self {
            mode_overlap: omega,
            s_ae_table: side_channel_table(omega).entries,
            leak_ratio,
            secure: !breakdown && leak_ratio < threshold,
            breakdown,
        }
    }
}

/// Share of Bob's bits Eve recovers through the timing side channel.
///
/// The ratio is not clamped: Eve measures every pulse, so values above 1
/// are meaningful and flag a privacy-amplification breakdown.
pub fn side_channel_leak_ratio(
    source: &CoherentSourceModel,
    state0: &FullPhotonState,
    state1: &FullPhotonState,
    res: &ResolutionModel,
) -> Result<LeakageReport> {
    let omega = side_channel_overlap(state0, state1, res);
    Ok(LeakageReport::new(
        omega,
        leak_ratio_from_overlap(source, omega)?,
        DEFAULT_SECURE_THRESHOLD,
    ))
}

/// Same as [`side_channel_leak_ratio`] with an explicit normalization and
/// security threshold; `bob_table` is only used by [`RatioConvention::Tables`].
pub fn side_channel_leak_ratio_with(
    source: &CoherentSourceModel,
    omega: f64,
    bob_table: &SuitabilityTable,
    convention: RatioConvention,
    threshold: f64,
) -> Result<LeakageReport> {
    let ratio = match convention {
        RatioConvention::Closed => leak_ratio_from_overlap(source, omega)?,
        RatioConvention::Tables => {
            if bob_table.sum_ab <= 0.0 {
                return Err(Error::UndefinedRatio("Bob's suitability sum is zero"));
            }
            side_channel_table(omega).sum_ab / bob_table.sum_ab
        }
    };
    Ok(LeakageReport::new(omega, ratio, threshold))
}

/// `(1 − ω) / (1 − e^{−μ})`.
pub fn leak_ratio_from_overlap(source: &CoherentSourceModel, omega: f64) -> Result<f64> {
    if source.is_vacuum() {
        return Err(Error::UndefinedRatio("side-channel ratio is undefined for μ = 0"));
    }
    Ok((1.0 - omega) / source.p_nonempty())
}

/// Mode overlap at which the side-channel ratio reaches 1: `ω* = e^{−μ}`.
pub fn breakdown_overlap(source: &CoherentSourceModel) -> f64 {
    (-source.mu).exp()
}

/// Hong–Ou–Mandel coincidence probability `½(1 − |⟨Ψ_a|Ψ_b⟩|²)`.
pub fn hom_coincidence(a: &FullPhotonState, b: &FullPhotonState) -> f64 {
    0.5 * (1.0 - a.single_photon_overlap(b).norm_sqr())
}

/// Arrival-time separation (ps) at which the side-channel ratio reaches 1
/// for equal-width modes, found by bisection.
///
/// Returns `f64::INFINITY` when `1 − e^{−μ}` rounds to 1, in which case the
/// ratio only reaches 1 in the limit of fully separated modes.
pub fn breakdown_boundary(source: &CoherentSourceModel, width_ps: f64, res: &ResolutionModel) -> Result<f64> {
    if source.is_vacuum() {
        return Err(Error::UndefinedRatio("breakdown boundary is undefined for μ = 0"));
    }
    let base = ModeWavefunction::new(0.0, width_ps)?;
    let ratio_at = |dt: f64| -> f64 {
        let shifted = ModeWavefunction { center_ps: dt, ..base };
        (1.0 - resolution_limited_overlap(&base, &shifted, res)) / source.p_nonempty()
    };
    if source.p_nonempty() >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let mut lo = 0.0;
    let mut hi = base.smeared(res).width_ps;
    let mut steps = 0;
    while ratio_at(hi) < 1.0 {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps >= BISECTION_STEPS || !hi.is_finite() {
            return Err(Error::NonConvergence(steps));
        }
    }
    while hi - lo > BOUNDARY_TOLERANCE_PS {
        let mid = 0.5 * (lo + hi);
        if ratio_at(mid) >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
        if steps >= BISECTION_STEPS {
            return Err(Error::NonConvergence(steps));
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon::poisson_weights;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn mode(c: f64, w: f64) -> ModeWavefunction {
        ModeWavefunction::new(c, w).unwrap()
    }

    fn state(c: f64, pol: PolarizationState, bit: Bit) -> FullPhotonState {
        FullPhotonState {
            number: poisson_weights(0.1, 8).unwrap(),
            mode: mode(c, 1.0),
            polarization: pol,
            bit,
        }
    }

    #[test]
    fn overlap_examples() {
        assert_abs_diff_eq!(mode_overlap(&mode(3.0, 2.0), &mode(3.0, 2.0)), 1.0, epsilon = 1e-15);
        let half = (8.0 * 2f64.ln()).sqrt();
        assert_abs_diff_eq!(mode_overlap(&mode(0.0, 1.0), &mode(half, 1.0)), 0.5, epsilon = 1e-14);
        assert!(mode_overlap(&mode(0.0, 1.0), &mode(20.0, 1.0)) < 1e-21);
        let tagged = mode(0.0, 1.0).with_spectral_label(1.5);
        assert_eq!(mode_overlap(&mode(0.0, 1.0), &tagged), 0.0);
        assert_abs_diff_eq!(mode_overlap(&tagged, &tagged), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn overlap_matches_quadrature_with_unequal_widths() {
        for &(ca, wa, cb, wb) in &[(0.0, 1.0, 0.5, 2.0), (-3.0, 0.2, 1.0, 4.0), (10.0, 5.0, 12.0, 0.7)] {
            let (a, b) = (mode(ca, wa), mode(cb, wb));
            assert_relative_eq!(
                mode_overlap(&a, &b),
                mode_overlap_quadrature(&a, &b).unwrap(),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn resolution_smearing() {
        let (a, b) = (mode(0.0, 1.0), mode(3.0, 1.0));
        assert_eq!(
            resolution_limited_overlap(&a, &b, &ResolutionModel::ideal()),
            mode_overlap(&a, &b)
        );
        let coarse = ResolutionModel::new(1e4).unwrap();
        assert!(resolution_limited_overlap(&a, &b, &coarse) > 0.9999);
        let mut prev = 0.0;
        for k in 0..100 {
            let w = resolution_limited_overlap(&a, &b, &ResolutionModel::new(k as f64 * 0.25).unwrap());
            assert!(w >= prev);
            prev = w;
        }
    }

    #[test]
    fn interference_examples() {
        let grid: Vec<f64> = (0..81).map(|k| -10.0 + 0.25 * k as f64).collect();
        let h = state(0.0, PolarizationState::horizontal(), Bit::Zero);
        let v = state(0.0, PolarizationState::vertical(), Bit::One);
        let same = interference_pattern(&h, &h, &grid).unwrap();
        let orth = interference_pattern(&h, &v, &grid).unwrap();
        for (k, &t) in grid.iter().enumerate() {
            let i0 = h.mode.intensity(t);
            assert_abs_diff_eq!(same[k], 4.0 * i0, epsilon = 1e-14);
            assert_abs_diff_eq!(orth[k], 2.0 * i0, epsilon = 1e-14);
        }
        assert!(interference_pattern(&h, &v, &[]).is_err());
        assert!(interference_pattern(&h, &v, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn side_channel_suitability_limits() {
        let ideal = ResolutionModel::ideal();
        let a = state(0.0, PolarizationState::horizontal(), Bit::Zero);
        let same = state(0.0, PolarizationState::anti_diagonal(), Bit::One);
        let far = state(100.0, PolarizationState::anti_diagonal(), Bit::One);
        for i in Bit::BOTH {
            for j in Bit::BOTH {
                assert_abs_diff_eq!(
                    eve_suitability_sidechannel(&a, &same, &ideal, i, j),
                    0.0,
                    epsilon = 1e-15
                );
                let want = if i == j { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(
                    eve_suitability_sidechannel(&a, &far, &ideal, i, j),
                    want,
                    epsilon = 1e-15
                );
            }
        }
        let mid = state((8.0 * 2f64.ln()).sqrt(), PolarizationState::anti_diagonal(), Bit::One);
        assert_abs_diff_eq!(
            eve_suitability_sidechannel(&a, &mid, &ideal, Bit::One, Bit::One),
            0.25,
            epsilon = 1e-14
        );
    }

    #[test]
    fn leak_ratio_examples() {
        let ideal = ResolutionModel::ideal();
        let src = CoherentSourceModel::new(0.1).unwrap();
        let a = state(0.0, PolarizationState::horizontal(), Bit::Zero);
        let same = state(0.0, PolarizationState::anti_diagonal(), Bit::One);
        let r = side_channel_leak_ratio(&src, &a, &same, &ideal).unwrap();
        assert_eq!(r.leak_ratio, 0.0);
        assert!(r.secure && !r.breakdown);

        let far = state(1e3, PolarizationState::anti_diagonal(), Bit::One);
        let r = side_channel_leak_ratio(&src, &a, &far, &ideal).unwrap();
        assert_abs_diff_eq!(r.leak_ratio, 10.508_331_944_775_05, epsilon = 1e-12);
        assert!(r.breakdown && !r.secure);

        assert!(side_channel_leak_ratio(&CoherentSourceModel::vacuum(), &a, &far, &ideal).is_err());
    }

    #[test]
    fn table_convention_agrees_for_default_protocol() {
        let src = CoherentSourceModel::new(0.3).unwrap();
        let bob = crate::photon::bob_table_wcp(&src, &Default::default());
        let closed = side_channel_leak_ratio_with(&src, 0.4, &bob, RatioConvention::Closed, 0.11).unwrap();
        let tables = side_channel_leak_ratio_with(&src, 0.4, &bob, RatioConvention::Tables, 0.11).unwrap();
        assert_relative_eq!(closed.leak_ratio, tables.leak_ratio, max_relative = 1e-14);
    }

    #[test]
    fn hom_examples() {
        let h = state(0.0, PolarizationState::horizontal(), Bit::Zero);
        let v = state(0.0, PolarizationState::vertical(), Bit::One);
        assert_abs_diff_eq!(hom_coincidence(&h, &h), 0.0, epsilon = 1e-12);
        assert_eq!(hom_coincidence(&h, &v), 0.5);
        let shifted = state((8.0 * 2f64.ln()).sqrt(), PolarizationState::horizontal(), Bit::One);
        assert_abs_diff_eq!(hom_coincidence(&h, &shifted), 0.375, epsilon = 1e-14);
    }

    #[test]
    fn boundary_matches_algebra() {
        let src = CoherentSourceModel::new(0.1).unwrap();
        let dt = breakdown_boundary(&src, 1.0, &ResolutionModel::ideal()).unwrap();
        assert_abs_diff_eq!(dt, 0.8_f64.sqrt(), epsilon = 1e-8);

        let mut prev = 0.0;
        for k in 1..=30 {
            let s = CoherentSourceModel::new(0.1 * k as f64).unwrap();
            let d = breakdown_boundary(&s, 1.0, &ResolutionModel::ideal()).unwrap();
            assert!(d > prev);
            prev = d;
            let blurred = breakdown_boundary(&s, 1.0, &ResolutionModel::new(2.0).unwrap()).unwrap();
            assert!(blurred > d);
        }
        assert!(breakdown_boundary(&CoherentSourceModel::vacuum(), 1.0, &ResolutionModel::ideal()).is_err());
        let bright = CoherentSourceModel::new(45.0).unwrap();
        assert_eq!(
            breakdown_boundary(&bright, 1.0, &ResolutionModel::ideal()).unwrap(),
            f64::INFINITY
        );
    }
}
