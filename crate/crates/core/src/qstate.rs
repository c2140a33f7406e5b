//! Dense density-matrix algebra over small labeled Hilbert spaces and the
//! gun/target suitability metric.
//!
//! Every [`DensityMatrix`] that leaves this module is Hermitian, has unit
//! trace and is positive semidefinite to within [`TOLERANCE`]. Operators
//! that are not states (projectors summed over several levels, for example)
//! are plain [`CMatrix`] values and are only ever consumed through
//! [`DensityMatrix::expectation`].

use std::fmt;

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Absolute tolerance for every invariant check in this crate.
pub const TOLERANCE: f64 = 1e-12;

/// Default cap on the dimension of any space handled here.
pub const DEFAULT_MAX_DIMENSION: usize = 256;

/// Name and dimension of a (possibly composite) Hilbert space factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HilbertLabel {
    name: String,
    dimension: usize,
}

impl HilbertLabel {
    pub fn new(name: impl Into<String>, dimension: usize) -> Result<Self> {
        Self::with_cap(name, dimension, DEFAULT_MAX_DIMENSION)
    }

    pub fn with_cap(name: impl Into<String>, dimension: usize, max: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Domain("Hilbert space dimension must be >= 1".into()));
        }
        if dimension > max {
            return Err(Error::DimensionCap { dim: dimension, max });
        }
        Ok(Self {
            name: name.into(),
            dimension,
        })
    }

    pub fn polarization() -> Self {
        Self {
            name: "polarization".into(),
            dimension: 2,
        }
    }

    pub fn number(n_max: usize) -> Result<Self> {
        Self::new("number", n_max + 1)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn tensor(&self, other: &Self, max: usize) -> Result<Self> {
        Self::with_cap(
            format!("{}⊗{}", self.name, other.name),
            self.dimension * other.dimension,
            max,
        )
    }
}

impl fmt::Display for HilbertLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name, self.dimension)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: HilbertLabel,
    amplitudes: CVector,
}

impl PureState {
    /// Wraps `amplitudes`, which must already have unit norm.
    pub fn new(space: HilbertLabel, amplitudes: CVector) -> Result<Self> {
        check_len(&space, amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { space, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(space: HilbertLabel, amplitudes: CVector) -> Result<Self> {
        check_len(&space, amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            space,
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(space: HilbertLabel, index: usize) -> Result<Self> {
        if index >= space.dimension() {
            return Err(Error::Domain(format!("basis index {index} out of range for {space}")));
        }
        let mut v = CVector::zeros(space.dimension());
        v[index] = C64::new(1.0, 0.0);
        Ok(Self { space, amplitudes: v })
    }

    pub fn space(&self) -> &HilbertLabel {
        &self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        same_space(&self.space, &other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            space: self.space.clone(),
            entries: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

fn check_len(space: &HilbertLabel, len: usize) -> Result<()> {
    if space.dimension() != len {
        return Err(Error::DimensionMismatch {
            left: space.to_string(),
            right: format!("vector of length {len}"),
        });
    }
    Ok(())
}

fn same_space(a: &HilbertLabel, b: &HilbertLabel) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            left: a.to_string(),
            right: b.to_string(),
        });
    }
    Ok(())
}

/// A failed density-matrix invariant and how badly it failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "invariant", rename_all = "snake_case")]
pub enum Violation {
    NotSquare { rows: usize, cols: usize },
    NotHermitian { max_deviation: f64 },
    Trace { trace: f64 },
    NotPositive { min_eigenvalue: f64 },
    NonFinite,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSquare { rows, cols } => write!(f, "not square ({rows}x{cols})"),
            Violation::NotHermitian { max_deviation } => {
                write!(f, "not Hermitian (max |A - A†| = {max_deviation:e})")
            }
            Violation::Trace { trace } => write!(f, "trace = {trace}, expected 1"),
            Violation::NotPositive { min_eigenvalue } => {
                write!(f, "not positive semidefinite (eigenvalue {min_eigenvalue})")
            }
            Violation::NonFinite => write!(f, "non-finite entries"),
        }
    }
}

/// Checks a raw complex matrix against the density-matrix invariants.
///
/// Returns an empty list iff the matrix is square, Hermitian, has unit trace
/// and no eigenvalue below `-TOLERANCE`. Positivity is checked on the
/// Hermitian part through a full eigendecomposition so that the offending
/// eigenvalue can be reported.
pub fn validate(matrix: &CMatrix) -> Vec<Violation> {
    let (rows, cols) = matrix.shape();
    if rows != cols || rows == 0 {
        return vec![Violation::NotSquare { rows, cols }];
    }
    if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return vec![Violation::NonFinite];
    }
    let mut out = Vec::new();
    let adjoint = matrix.adjoint();
    let max_deviation = (matrix - &adjoint).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_deviation > TOLERANCE {
        out.push(Violation::NotHermitian { max_deviation });
    }
    let trace = matrix.trace();
    if (trace.re - 1.0).abs() > TOLERANCE || trace.im.abs() > TOLERANCE {
        out.push(Violation::Trace { trace: trace.re });
    }
    let hermitian = (matrix + adjoint).scale(0.5);
    let min_eigenvalue = hermitian
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -TOLERANCE {
        out.push(Violation::NotPositive { min_eigenvalue });
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: HilbertLabel,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates `entries` and wraps them.
    pub fn new(space: HilbertLabel, entries: CMatrix) -> Result<Self> {
        if entries.nrows() != space.dimension() {
            return Err(Error::DimensionMismatch {
                left: space.to_string(),
                right: format!("{}x{} matrix", entries.nrows(), entries.ncols()),
            });
        }
        let violations = validate(&entries);
        if !violations.is_empty() {
            return Err(Error::InvalidDensity(violations));
        }
        Ok(Self { space, entries })
    }

    /// Real matrix convenience constructor, row-major.
    pub fn from_real_rows(space: HilbertLabel, rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = CMatrix::from_fn(n, n, |r, c| C64::new(rows[r].get(c).copied().unwrap_or(f64::NAN), 0.0));
        Self::new(space, m)
    }

    /// Caller guarantees the invariants hold (up to rounding).
    pub(crate) fn from_parts_unchecked(space: HilbertLabel, entries: CMatrix) -> Self {
        debug_assert!(validate(&entries).is_empty(), "{:?}", validate(&entries));
        Self { space, entries }
    }

    pub fn maximally_mixed(space: HilbertLabel) -> Self {
        let d = space.dimension();
        let entries = CMatrix::identity(d, d).unscale(d as f64);
        Self { space, entries }
    }

    pub fn space(&self) -> &HilbertLabel {
        &self.space
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `Tr(ρ O)` for an arbitrary operator on the same space.
    pub fn expectation(&self, operator: &CMatrix) -> Result<f64> {
        if operator.shape() != self.entries.shape() {
            return Err(Error::DimensionMismatch {
                left: self.space.to_string(),
                right: format!("{}x{} operator", operator.nrows(), operator.ncols()),
            });
        }
        Ok(trace_of_product(&self.entries, operator))
    }

    /// Sums the diagonal blocks of a bipartite matrix over the second factor,
    /// leaving the reduced state of the first factor.
    pub fn partial_trace_second(&self, first: &HilbertLabel, second_dim: usize) -> Result<Self> {
        let d1 = first.dimension();
        if d1 * second_dim != self.dimension() {
            return Err(Error::DimensionMismatch {
                left: self.space.to_string(),
                right: format!("{first} ⊗ [{second_dim}]"),
            });
        }
        let reduced = CMatrix::from_fn(d1, d1, |a, b| {
            (0..second_dim)
                .map(|k| self.entries[(a * second_dim + k, b * second_dim + k)])
                .sum()
        });
        Ok(Self::from_parts_unchecked(first.clone(), reduced))
    }
}

/// `Re Tr(A B)` without forming the product.
fn trace_of_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

/// `ρ = (1/N) Σ |Ψ_i⟩⟨Ψ_i|`, the uniform mixture over the given states.
pub fn density_from_states(states: &[PureState]) -> Result<DensityMatrix> {
    let first = states
        .first()
        .ok_or_else(|| Error::Domain("at least one state is required".into()))?;
    let space = first.space.clone();
    let d = space.dimension();
    let mut acc = CMatrix::zeros(d, d);
    for s in states {
        same_space(&space, &s.space)?;
        acc += &s.amplitudes * s.amplitudes.adjoint();
    }
    acc.unscale_mut(states.len() as f64);
    Ok(DensityMatrix::from_parts_unchecked(space, acc))
}

/// `F = Tr(ρ_a ρ_b)`.
pub fn fidelity_product(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_space(&a.space, &b.space)?;
    Ok(trace_of_product(&a.entries, &b.entries))
}

/// `Tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    trace_of_product(&rho.entries, &rho.entries)
}

/// Suitability of a gun state for a target, kept together with the two
/// traces it is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuitabilityValue {
    pub value: f64,
    pub f_gt: f64,
    pub f_tt: f64,
}

/// `S_GT = Tr(ρ_G ρ_T) / Tr(ρ_T ρ_T)`.
///
/// With a single pure target `F_TT = 1` and this is the plain overlap
/// `Tr(ρ_G ρ_T)`.
pub fn suitability(gun: &DensityMatrix, target: &DensityMatrix) -> Result<SuitabilityValue> {
    let f_gt = fidelity_product(gun, target)?;
    let f_tt = purity(target);
    if f_tt <= TOLERANCE {
        return Err(Error::DegenerateTarget(f_tt));
    }
    Ok(SuitabilityValue {
        value: f_gt / f_tt,
        f_gt,
        f_tt,
    })
}

pub fn tensor_product(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    tensor_product_capped(a, b, DEFAULT_MAX_DIMENSION)
}

pub fn tensor_product_capped(a: &DensityMatrix, b: &DensityMatrix, max_dimension: usize) -> Result<DensityMatrix> {
    let space = a.space.tensor(&b.space, max_dimension)?;
    Ok(DensityMatrix {
        space,
        entries: a.entries.kronecker(&b.entries),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn pol(h: f64, v: f64) -> PureState {
        PureState::normalized(HilbertLabel::polarization(), CVector::from_vec(vec![c(h), c(v)])).unwrap()
    }

    fn assert_matrix(rho: &DensityMatrix, expected: &[[f64; 2]; 2]) {
        for r in 0..2 {
            for col in 0..2 {
                assert_abs_diff_eq!(rho.get(r, col).re, expected[r][col], epsilon = 1e-12);
                assert_abs_diff_eq!(rho.get(r, col).im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn density_of_single_states() {
        let h = density_from_states(&[pol(1.0, 0.0)]).unwrap();
        assert_matrix(&h, &[[1.0, 0.0], [0.0, 0.0]]);

        let anti = density_from_states(&[pol(1.0, -1.0)]).unwrap();
        assert_matrix(&anti, &[[0.5, -0.5], [-0.5, 0.5]]);

        let mixed = density_from_states(&[pol(1.0, 0.0), pol(0.0, 1.0)]).unwrap();
        assert_matrix(&mixed, &[[0.5, 0.0], [0.0, 0.5]]);
    }

    #[test]
    fn density_errors() {
        assert!(matches!(density_from_states(&[]), Err(Error::Domain(_))));
        let three = PureState::basis(HilbertLabel::new("qutrit", 3).unwrap(), 0).unwrap();
        assert!(matches!(
            density_from_states(&[pol(1.0, 0.0), three]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_examples() {
        let a0 = pol(1.0, 0.0).projector();
        let b0 = pol(1.0, 1.0).projector();
        assert_abs_diff_eq!(fidelity_product(&a0, &b0).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity_product(&b0, &b0).unwrap(), 1.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(HilbertLabel::polarization());
        assert_abs_diff_eq!(fidelity_product(&mixed, &mixed).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn purity_examples() {
        assert_abs_diff_eq!(purity(&pol(0.3, 0.7).projector()), 1.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(HilbertLabel::polarization());
        assert_abs_diff_eq!(purity(&mixed), 0.5, epsilon = 1e-12);
        let rho = DensityMatrix::from_real_rows(HilbertLabel::polarization(), &[&[0.9, 0.0], &[0.0, 0.1]]).unwrap();
        assert_abs_diff_eq!(purity(&rho), 0.82, epsilon = 1e-12);
    }

    #[test]
    fn suitability_examples() {
        let t = pol(1.0, 2.0).projector();
        assert_abs_diff_eq!(suitability(&t, &t).unwrap().value, 1.0, epsilon = 1e-12);

        let mixed = DensityMatrix::maximally_mixed(HilbertLabel::polarization());
        let s = suitability(&mixed, &t).unwrap();
        assert_abs_diff_eq!(s.value, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.f_gt, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.f_tt, 1.0, epsilon = 1e-12);

        let a0 = pol(1.0, 0.0).projector();
        let b1 = pol(0.0, 1.0).projector();
        assert_abs_diff_eq!(suitability(&a0, &b1).unwrap().value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn tensor_examples() {
        let mixed = DensityMatrix::maximally_mixed(HilbertLabel::polarization());
        let both = tensor_product(&mixed, &mixed).unwrap();
        assert_eq!(both.dimension(), 4);
        for r in 0..4 {
            for col in 0..4 {
                let want = if r == col { 0.25 } else { 0.0 };
                assert_abs_diff_eq!(both.get(r, col).re, want, epsilon = 1e-12);
            }
        }

        let vacuum = PureState::basis(HilbertLabel::number(1).unwrap(), 0)
            .unwrap()
            .projector();
        let joint = tensor_product(&vacuum, &pol(1.0, 0.0).projector()).unwrap();
        assert_eq!(joint.space().name(), "number⊗polarization");
        assert_abs_diff_eq!(joint.get(0, 0).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(purity(&joint), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tensor_respects_cap() {
        let big = DensityMatrix::maximally_mixed(HilbertLabel::new("big", 20).unwrap());
        assert!(matches!(
            tensor_product(&big, &big),
            Err(Error::DimensionCap { dim: 400, max: 256 })
        ));
        assert!(HilbertLabel::new("huge", 257).is_err());
    }

    #[test]
    fn validate_examples() {
        let ok = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert!(validate(&ok).is_empty());

        let indefinite = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.6), c(0.6), c(0.5)]);
        let v = validate(&indefinite);
        assert_eq!(v.len(), 1);
        match v[0] {
            Violation::NotPositive { min_eigenvalue } => {
                assert_abs_diff_eq!(min_eigenvalue, -0.1, epsilon = 1e-12)
            }
            ref other => panic!("unexpected {other:?}"),
        }

        let heavy = CMatrix::from_row_slice(2, 2, &[c(0.7), c(0.0), c(0.0), c(0.7)]);
        match validate(&heavy).as_slice() {
            [Violation::Trace { trace }] => assert_abs_diff_eq!(*trace, 1.4, epsilon = 1e-12),
            other => panic!("unexpected {other:?}"),
        }

        let skew = CMatrix::from_row_slice(2, 2, &[c(0.5), C64::new(0.0, 0.1), C64::new(0.0, 0.1), c(0.5)]);
        assert!(matches!(validate(&skew).as_slice(), [Violation::NotHermitian { .. }]));

        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(
            validate(&rect).as_slice(),
            [Violation::NotSquare { rows: 2, cols: 3 }]
        ));
    }

    #[test]
    fn rejects_unnormalized_state() {
        let v = CVector::from_vec(vec![c(1.0), c(1.0)]);
        assert!(matches!(
            PureState::new(HilbertLabel::polarization(), v),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn partial_trace_recovers_factor() {
        let number = HilbertLabel::number(2).unwrap();
        let n = DensityMatrix::from_real_rows(number.clone(), &[&[0.5, 0.0, 0.0], &[0.0, 0.3, 0.0], &[0.0, 0.0, 0.2]])
            .unwrap();
        let joint = tensor_product(&n, &pol(1.0, -1.0).projector()).unwrap();
        let back = joint.partial_trace_second(&number, 2).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(back.get(k, k).re, n.get(k, k).re, epsilon = 1e-12);
        }
    }
}
