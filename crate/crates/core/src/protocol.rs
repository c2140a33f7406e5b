//! Two-state polarization protocol: Alice's gun states, Bob's analyzer
//! targets and the lossless 2×2 suitability table.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{fidelity_product, CVector, DensityMatrix, HilbertLabel, PureState, C64, TOLERANCE};

/// A key bit, also used to index Bob's analyzer setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub const BOTH: [Bit; 2] = [Bit::Zero, Bit::One];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            _ => Err(Error::param("bit", format!("{i} is not 0 or 1"))),
        }
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Unit Jones vector over the {H, V} basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationState(Vector2<C64>);

impl PolarizationState {
    pub fn new(h: C64, v: C64) -> Result<Self> {
        let vec = Vector2::new(h, v);
        let norm = vec.norm();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self(vec))
    }

    /// Scales `(h, v)` to unit norm; fails on the zero vector.
    pub fn normalized(h: C64, v: C64) -> Result<Self> {
        let vec = Vector2::new(h, v);
        let norm = vec.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self(vec.unscale(norm)))
    }

    pub fn horizontal() -> Self {
        Self(Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)))
    }

    pub fn vertical() -> Self {
        Self(Vector2::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0)))
    }

    /// (|H⟩ + |V⟩)/√2
    pub fn diagonal() -> Self {
        Self(Vector2::new(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)))
    }

    /// (|H⟩ − |V⟩)/√2
    pub fn anti_diagonal() -> Self {
        Self(Vector2::new(
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(-FRAC_1_SQRT_2, 0.0),
        ))
    }

    pub fn h(&self) -> C64 {
        self.0.x
    }

    pub fn v(&self) -> C64 {
        self.0.y
    }

    pub fn with_global_phase(&self, phase: f64) -> Self {
        Self(self.0 * C64::from_polar(1.0, phase))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn to_pure_state(&self) -> PureState {
        PureState::new(
            HilbertLabel::polarization(),
            CVector::from_column_slice(self.0.as_slice()),
        )
        .expect("unit norm is a type invariant")
    }

    pub fn density(&self) -> DensityMatrix {
        self.to_pure_state().projector()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub alice_states: [PolarizationState; 2],
    pub bob_targets: [PolarizationState; 2],
}

impl Default for ProtocolConfig {
    /// Alice sends |H⟩ or (|H⟩−|V⟩)/√2; Bob analyzes along (|H⟩+|V⟩)/√2 or |V⟩,
    /// so each analyzer only fires for the matching bit.
    fn default() -> Self {
        Self {
            alice_states: [PolarizationState::horizontal(), PolarizationState::anti_diagonal()],
            bob_targets: [PolarizationState::diagonal(), PolarizationState::vertical()],
        }
    }
}

/// Gun density matrix for Alice's bit `i`.
pub fn alice_gun_density(config: &ProtocolConfig, i: Bit) -> DensityMatrix {
    config.alice_states[i.index()].density()
}

/// Target density matrix for Bob's analyzer setting `j`.
pub fn bob_target_density(config: &ProtocolConfig, j: Bit) -> DensityMatrix {
    config.bob_targets[j.index()].density()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuitabilityTable {
    /// Indexed `[alice bit][bob setting]`.
    pub entries: [[f64; 2]; 2],
    pub sum_ab: f64,
}

impl SuitabilityTable {
    pub fn from_entries(entries: [[f64; 2]; 2]) -> Self {
        let sum_ab = entries.iter().flatten().sum();
        Self { entries, sum_ab }
    }

    pub fn get(&self, i: Bit, j: Bit) -> f64 {
        self.entries[i.index()][j.index()]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_entries(self.entries.map(|row| row.map(|x| x * factor)))
    }
}

/// Lossless, unit-efficiency table `Tr(ρ_A,i ρ_B,j)`.
pub fn polarization_suitability_table(config: &ProtocolConfig) -> SuitabilityTable {
    let mut entries = [[0.0; 2]; 2];
    for i in Bit::BOTH {
        let gun = alice_gun_density(config, i);
        for j in Bit::BOTH {
            let target = bob_target_density(config, j);
            entries[i.index()][j.index()] = fidelity_product(&gun, &target).expect("both factors are polarization");
        }
    }
    SuitabilityTable::from_entries(entries)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "finding", rename_all = "snake_case")]
pub enum AuditFinding {
    /// Bob's analyzer `j` fires for Alice's other bit `i`.
    OffDiagonalLeak {
        i: usize,
        j: usize,
        value: f64,
    },
    DiagonalAsymmetry {
        d00: f64,
        d11: f64,
    },
    DegenerateAliceStates {
        overlap: f64,
    },
}

impl fmt::Display for AuditFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditFinding::OffDiagonalLeak { i, j, value } => {
                write!(f, "off-diagonal entry ({i},{j}) = {value}")
            }
            AuditFinding::DiagonalAsymmetry { d00, d11 } => {
                write!(f, "diagonal asymmetry: S00 = {d00}, S11 = {d11}")
            }
            AuditFinding::DegenerateAliceStates { overlap } => {
                write!(f, "Alice's states are parallel (|<Π0|Π1>|² = {overlap})")
            }
        }
    }
}

/// Flags departures from the δ_ij structure the analysis relies on.
pub fn protocol_audit(config: &ProtocolConfig) -> Vec<AuditFinding> {
    let table = polarization_suitability_table(config);
    let mut findings = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let value = table.entries[i][j];
            if i != j && value > TOLERANCE {
                findings.push(AuditFinding::OffDiagonalLeak { i, j, value });
            }
        }
    }
    let (d00, d11) = (table.entries[0][0], table.entries[1][1]);
    if (d00 - d11).abs() > TOLERANCE {
        findings.push(AuditFinding::DiagonalAsymmetry { d00, d11 });
    }
    let overlap = config.alice_states[0].inner(&config.alice_states[1]).norm_sqr();
    if (overlap - 1.0).abs() <= TOLERANCE {
        findings.push(AuditFinding::DegenerateAliceStates { overlap });
    }
    findings
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_real(rho: &DensityMatrix, expected: [[f64; 2]; 2]) {
        for r in 0..2 {
            for c in 0..2 {
                assert_abs_diff_eq!(rho.get(r, c).re, expected[r][c], epsilon = 1e-12);
                assert_abs_diff_eq!(rho.get(r, c).im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn default_gun_and_target_densities() {
        let cfg = ProtocolConfig::default();
        assert_real(&alice_gun_density(&cfg, Bit::Zero), [[1.0, 0.0], [0.0, 0.0]]);
        assert_real(&alice_gun_density(&cfg, Bit::One), [[0.5, -0.5], [-0.5, 0.5]]);
        assert_real(&bob_target_density(&cfg, Bit::Zero), [[0.5, 0.5], [0.5, 0.5]]);
        assert_real(&bob_target_density(&cfg, Bit::One), [[0.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn degenerate_config_is_accepted_and_flagged() {
        let cfg = ProtocolConfig {
            alice_states: [PolarizationState::horizontal(); 2],
            ..ProtocolConfig::default()
        };
        assert_real(&alice_gun_density(&cfg, Bit::One), [[1.0, 0.0], [0.0, 0.0]]);
        assert!(protocol_audit(&cfg)
            .iter()
            .any(|f| matches!(f, AuditFinding::DegenerateAliceStates { .. })));
    }

    #[test]
    fn default_table_is_half_delta() {
        let t = polarization_suitability_table(&ProtocolConfig::default());
        let want = [[0.5, 0.0], [0.0, 0.5]];
        for (row, want_row) in t.entries.iter().zip(want) {
            for (got, w) in row.iter().zip(want_row) {
                assert_abs_diff_eq!(*got, w, epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(t.sum_ab, 1.0, epsilon = 1e-12);
        assert!(protocol_audit(&ProtocolConfig::default()).is_empty());
    }

    #[test]
    fn rectilinear_matched_table_is_identity() {
        let hv = [PolarizationState::horizontal(), PolarizationState::vertical()];
        let t = polarization_suitability_table(&ProtocolConfig {
            alice_states: hv,
            bob_targets: hv,
        });
        assert_eq!(t.entries.map(|r| r.map(f64::round)), [[1.0, 0.0], [0.0, 1.0]]);
        assert_abs_diff_eq!(t.entries[0][1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn conjugate_bases_give_quarter_everywhere() {
        let t = polarization_suitability_table(&ProtocolConfig {
            alice_states: [PolarizationState::horizontal(), PolarizationState::vertical()],
            bob_targets: [PolarizationState::diagonal(), PolarizationState::anti_diagonal()],
        });
        for v in t.entries.iter().flatten() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn horizontal_bob_target_leaks() {
        let cfg = ProtocolConfig {
            bob_targets: [PolarizationState::diagonal(), PolarizationState::horizontal()],
            ..ProtocolConfig::default()
        };
        let findings = protocol_audit(&cfg);
        match findings.first() {
            Some(AuditFinding::OffDiagonalLeak { i: 0, j: 1, value }) => {
                assert_abs_diff_eq!(*value, 1.0, epsilon = 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn global_phase_leaves_table_unchanged() {
        let base = ProtocolConfig::default();
        let mut shifted = base.clone();
        shifted.alice_states[1] = shifted.alice_states[1].with_global_phase(1.234);
        shifted.bob_targets[0] = shifted.bob_targets[0].with_global_phase(-0.5);
        let a = polarization_suitability_table(&base);
        let b = polarization_suitability_table(&shifted);
        for (x, y) in a.entries.iter().flatten().zip(b.entries.iter().flatten()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn bit_index_roundtrip() {
        assert_eq!(Bit::from_index(1).unwrap(), Bit::One);
        assert!(Bit::from_index(2).is_err());
        assert_eq!(Bit::from(false), Bit::Zero);
    }
}
