//! Phase-space grid arithmetic, weight functions, and weighted mixed norms.
//!
//! The phase space is the finite group `Z_N x Z_N` under componentwise
//! addition mod `N`, carrying counting measure: every integral of the
//! continuum theory becomes a plain sum. The explicit powers of `N` this
//! introduces into the classical identities are listed in the crate docs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Representative of `t mod N` in `[-floor(N/2), ceil(N/2) - 1]`.
///
/// For odd `N` the range is symmetric about zero, so negating a grid point
/// negates its representative. For even `N` the point `-N/2` has no
/// counterpart of opposite sign.
pub fn centered_rep(t: i64, n: usize) -> Result<i64> {
    if n < 2 {
        return Err(Error::InvalidGrid(n));
    }
    let n = n as i64;
    let mut r = t.rem_euclid(n);
    if r >= (n + 1) / 2 {
        r -= n;
    }
    Ok(r)
}

pub(crate) fn imod(t: i64, n: usize) -> usize {
    t.rem_euclid(n as i64) as usize
}

/// Table of `w[j] = exp(-2 pi i j / n)` for `j = 0..n`.
///
/// Indexing with products reduced mod `n` keeps all transform kernels exactly
/// periodic and bitwise reproducible.
pub(crate) fn unit_roots(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(1.0, -TAU * j as f64 / n as f64))
        .collect()
}

/// A point `z = (time shift, modulation)` of `Z_N x Z_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhasePoint {
    pub time: usize,
    pub freq: usize,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { time: 0, freq: 0 };

    pub fn new(time: usize, freq: usize) -> Self {
        PhasePoint { time, freq }
    }
}

/// The finite phase space `Z_N x Z_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseGrid {
    n: usize,
}

impl PhaseGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(n));
        }
        Ok(PhaseGrid { n })
    }

    /// Side length `N`.
    pub fn side(self) -> usize {
        self.n
    }

    /// Number of phase-space points, `N^2`.
    pub fn point_count(self) -> usize {
        self.n * self.n
    }

    pub fn require_same(self, other: PhaseGrid) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// The Weyl-family operations need `2` to be invertible mod `N`.
    pub fn require_odd(self) -> Result<()> {
        if self.n % 2 == 0 {
            return Err(Error::EvenGrid(self.n));
        }
        Ok(())
    }

    /// Multiplicative inverse of 2 mod `N` (odd `N` only).
    pub fn half(self) -> Result<usize> {
        self.require_odd()?;
        Ok((self.n + 1) / 2)
    }

    pub fn wrap(self, time: i64, freq: i64) -> PhasePoint {
        PhasePoint {
            time: imod(time, self.n),
            freq: imod(freq, self.n),
        }
    }

    pub fn add(self, a: PhasePoint, b: PhasePoint) -> PhasePoint {
        PhasePoint {
            time: (a.time + b.time) % self.n,
            freq: (a.freq + b.freq) % self.n,
        }
    }

    pub fn sub(self, a: PhasePoint, b: PhasePoint) -> PhasePoint {
        self.wrap(a.time as i64 - b.time as i64, a.freq as i64 - b.freq as i64)
    }

    pub fn neg(self, a: PhasePoint) -> PhasePoint {
        self.wrap(-(a.time as i64), -(a.freq as i64))
    }

    /// Centered representatives of both coordinates.
    pub fn centered(self, z: PhasePoint) -> (i64, i64) {
        // Unwraps are safe: the grid was validated at construction.
        (
            centered_rep(z.time as i64, self.n).expect("valid grid"),
            centered_rep(z.freq as i64, self.n).expect("valid grid"),
        )
    }

    /// All points in row-major order (time major, then frequency).
    pub fn points(self) -> impl Iterator<Item = PhasePoint> {
        let n = self.n;
        (0..n).flat_map(move |time| (0..n).map(move |freq| PhasePoint { time, freq }))
    }

    pub(crate) fn index(self, z: PhasePoint) -> usize {
        z.time * self.n + z.freq
    }
}

/// A complex function on the phase space: STFTs, symbols, distributions.
///
/// Values are stored row-major with the time shift as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    grid: PhaseGrid,
    values: Vec<Complex64>,
}

impl PhaseField {
    pub fn new(grid: PhaseGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.point_count() {
            return Err(Error::DimensionMismatch(format!(
                "phase field needs {} values, got {}",
                grid.point_count(),
                values.len()
            )));
        }
        Ok(PhaseField { grid, values })
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        PhaseField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.point_count()],
        }
    }

    pub fn from_fn(grid: PhaseGrid, mut f: impl FnMut(PhasePoint) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.point_count());
        for z in grid.points() {
            values.push(f(z));
        }
        PhaseField { grid, values }
    }

    /// Indicator of a single point.
    pub fn delta(grid: PhaseGrid, z: PhasePoint) -> Self {
        let mut field = PhaseField::zeros(grid);
        *field.at_mut(z) = Complex64::new(1.0, 0.0);
        field
    }

    pub fn constant(grid: PhaseGrid, value: Complex64) -> Self {
        PhaseField {
            grid,
            values: vec![value; grid.point_count()],
        }
    }

    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, z: PhasePoint) -> Complex64 {
        self.values[self.grid.index(z)]
    }

    pub fn at_mut(&mut self, z: PhasePoint) -> &mut Complex64 {
        let idx = self.grid.index(z);
        &mut self.values[idx]
    }

    /// Cyclic translation: `(T_w f)(z) = f(z - w)`.
    pub fn translate(&self, w: PhasePoint) -> PhaseField {
        PhaseField::from_fn(self.grid, |z| self.at(self.grid.sub(z, w)))
    }

    /// Reflection through the origin: `f(z) -> f(-z)`.
    pub fn reflect(&self) -> PhaseField {
        PhaseField::from_fn(self.grid, |z| self.at(self.grid.neg(z)))
    }

    pub fn conj(&self) -> PhaseField {
        PhaseField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Pointwise squared modulus, returned as a real-valued field.
    pub fn abs_squared(&self) -> PhaseField {
        PhaseField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .map(|v| Complex64::new(v.norm_sqr(), 0.0))
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> PhaseField {
        PhaseField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &PhaseField) -> Result<PhaseField> {
        self.grid.require_same(other.grid)?;
        Ok(PhaseField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &PhaseField) -> Result<PhaseField> {
        self.grid.require_same(other.grid)?;
        Ok(PhaseField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Pointwise product.
    pub fn mul(&self, other: &PhaseField) -> Result<PhaseField> {
        self.grid.require_same(other.grid)?;
        Ok(PhaseField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag_abs(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Largest pointwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &PhaseField) -> Result<f64> {
        self.grid.require_same(other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Cyclic convolution on the phase space: `(f * g)(z) = sum_w f(z - w) g(w)`.
pub fn cyclic_convolve(f: &PhaseField, g: &PhaseField) -> Result<PhaseField> {
    f.grid().require_same(g.grid())?;
    let grid = f.grid();
    let mut out = PhaseField::zeros(grid);
    for z in grid.points() {
        let mut acc = Complex64::new(0.0, 0.0);
        for w in grid.points() {
            acc += f.at(grid.sub(z, w)) * g.at(w);
        }
        *out.at_mut(z) = acc;
    }
    Ok(out)
}

/// Role a weight grid is meant to play, mirroring its admissibility checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightKind {
    /// Candidate for a submultiplicative weight `v`; must be symmetric under
    /// negation of phase-space points.
    SubmultiplicativeCandidate,
    /// Candidate for a `v`-moderate weight `m`; only positivity is required.
    ModerateCandidate,
}

/// Strictly positive weight function on the phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightGrid {
    grid: PhaseGrid,
    values: Vec<f64>,
    kind: WeightKind,
    label: String,
}

/// Relative tolerance used by the admissibility checks.
pub const WEIGHT_CHECK_TOL: f64 = 1e-12;

impl WeightGrid {
    /// Build a weight from raw values, enforcing positivity and (for
    /// submultiplicative candidates) symmetry under negation.
    pub fn new(
        grid: PhaseGrid,
        values: Vec<f64>,
        kind: WeightKind,
        label: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != grid.point_count() {
            return Err(Error::DimensionMismatch(format!(
                "weight grid needs {} values, got {}",
                grid.point_count(),
                values.len()
            )));
        }
        if !values.iter().all(|&v| v.is_finite() && v > 0.0) {
            return Err(Error::NonPositiveWeight);
        }
        let weight = WeightGrid {
            grid,
            values,
            kind,
            label: label.into(),
        };
        if kind == WeightKind::SubmultiplicativeCandidate {
            let dev = weight.negation_symmetry_deviation();
            if dev > WEIGHT_CHECK_TOL {
                return Err(Error::AsymmetricWeight(dev));
            }
        }
        Ok(weight)
    }

    /// The constant weight 1.
    pub fn ones(grid: PhaseGrid) -> Self {
        WeightGrid {
            grid,
            values: vec![1.0; grid.point_count()],
            kind: WeightKind::SubmultiplicativeCandidate,
            label: "one".to_string(),
        }
    }

    /// Polynomial weight `v_s(z) = (1 + |z|^2)^(s/2)` in the centered-
    /// representative metric.
    ///
    /// Symmetric under negation for every `N`, since centered representatives
    /// enter only through their squares.
    pub fn polynomial(grid: PhaseGrid, s: f64) -> Result<Self> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::bad_spec(
                &format!("poly:{s}"),
                "polynomial weight exponent must be nonnegative",
            ));
        }
        let values = grid
            .points()
            .map(|z| {
                let (ck, cl) = grid.centered(z);
                (1.0 + (ck * ck + cl * cl) as f64).powf(s / 2.0)
            })
            .collect();
        WeightGrid::new(
            grid,
            values,
            WeightKind::SubmultiplicativeCandidate,
            format!("poly:{s}"),
        )
    }

    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    /// Human-readable origin of the weight ("one", "poly:1", "file:...").
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, z: PhasePoint) -> f64 {
        self.values[self.grid.index(z)]
    }

    /// Pointwise reciprocal `1/m`, as used by the mixed-norm duality pairing.
    pub fn reciprocal(&self) -> WeightGrid {
        WeightGrid {
            grid: self.grid,
            values: self.values.iter().map(|v| 1.0 / v).collect(),
            kind: WeightKind::ModerateCandidate,
            label: format!("recip({})", self.label),
        }
    }

    /// Maximum relative deviation from `w(-z) = w(z)`.
    pub fn negation_symmetry_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for z in self.grid.points() {
            let a = self.at(z);
            let b = self.at(self.grid.neg(z));
            worst = worst.max((a - b).abs() / a.max(b));
        }
        worst
    }

    pub fn is_negation_symmetric(&self) -> bool {
        self.negation_symmetry_deviation() <= WEIGHT_CHECK_TOL
    }

    /// Exhaustive submultiplicativity check over all `N^4` pairs.
    ///
    /// The worst ratio is `max v(z1 + z2) / (v(z1) v(z2))`; the weight passes
    /// when it does not exceed `1 + rel_tol`. The reported pair is the first
    /// one attaining the maximum in row-major scan order.
    pub fn check_submultiplicative(&self, rel_tol: f64) -> SubmultiplicativityCheck {
        let mut worst_ratio = f64::NEG_INFINITY;
        let mut worst_pair = (PhasePoint::ORIGIN, PhasePoint::ORIGIN);
        for z1 in self.grid.points() {
            for z2 in self.grid.points() {
                let ratio = self.at(self.grid.add(z1, z2)) / (self.at(z1) * self.at(z2));
                if ratio > worst_ratio {
                    worst_ratio = ratio;
                    worst_pair = (z1, z2);
                }
            }
        }
        SubmultiplicativityCheck {
            passes: worst_ratio <= 1.0 + rel_tol,
            worst_ratio,
            worst_pair,
        }
    }

    /// Smallest constant `C` with `m(z1 + z2) <= C v(z1) m(z2)` on the grid,
    /// where `self` plays the role of `m`.
    ///
    /// The maximum is attained; the witness pair achieving it is returned.
    pub fn moderate_constant(&self, v: &WeightGrid) -> Result<ModerateConstant> {
        self.grid.require_same(v.grid)?;
        let mut constant = f64::NEG_INFINITY;
        let mut witness = (PhasePoint::ORIGIN, PhasePoint::ORIGIN);
        for z1 in self.grid.points() {
            for z2 in self.grid.points() {
                let ratio = self.at(self.grid.add(z1, z2)) / (v.at(z1) * self.at(z2));
                if ratio > constant {
                    constant = ratio;
                    witness = (z1, z2);
                }
            }
        }
        Ok(ModerateConstant { constant, witness })
    }
}

/// Outcome of the exhaustive submultiplicativity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubmultiplicativityCheck {
    pub passes: bool,
    pub worst_ratio: f64,
    pub worst_pair: (PhasePoint, PhasePoint),
}

/// The exact moderateness constant on the grid, with a witness pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModerateConstant {
    pub constant: f64,
    pub witness: (PhasePoint, PhasePoint),
}

/// An exponent in `[1, oo]` for the mixed norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Exponent::Finite(p))
    }

    /// Conjugate exponent: `1/p + 1/p' = 1`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "inf" | "Inf" | "INF" | "oo" | "infinity" => Ok(Exponent::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::bad_spec(other, "expected a number or 'inf'"))?;
                Exponent::finite(p)
            }
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Exponent::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Parameters `(p, q, m)` of a weighted mixed norm.
#[derive(Debug, Clone)]
pub struct MixedNormParams {
    pub p: Exponent,
    pub q: Exponent,
    pub weight: WeightGrid,
}

impl MixedNormParams {
    pub fn new(p: Exponent, q: Exponent, weight: WeightGrid) -> Self {
        MixedNormParams { p, q, weight }
    }

    /// Unweighted parameters with the given exponents.
    pub fn unweighted(grid: PhaseGrid, p: Exponent, q: Exponent) -> Self {
        MixedNormParams {
            p,
            q,
            weight: WeightGrid::ones(grid),
        }
    }
}

/// Weighted mixed norm: inner exponent `p` over the time shift, outer
/// exponent `q` over the modulation, with sums replaced by maxima at
/// infinite exponents.
pub fn mixed_norm(field: &PhaseField, params: &MixedNormParams) -> Result<f64> {
    field.grid().require_same(params.weight.grid())?;
    let n = field.grid().side();
    let mut outer_sum = 0.0f64;
    let mut outer_max = 0.0f64;
    for freq in 0..n {
        let mut inner_sum = 0.0f64;
        let mut inner_max = 0.0f64;
        for time in 0..n {
            let z = PhasePoint { time, freq };
            let a = field.at(z).norm() * params.weight.at(z);
            match params.p {
                Exponent::Finite(p) => inner_sum += a.powf(p),
                Exponent::Infinity => inner_max = inner_max.max(a),
            }
        }
        let inner = match params.p {
            Exponent::Finite(p) => inner_sum.powf(1.0 / p),
            Exponent::Infinity => inner_max,
        };
        match params.q {
            Exponent::Finite(q) => outer_sum += inner.powf(q),
            Exponent::Infinity => outer_max = outer_max.max(inner),
        }
    }
    Ok(match params.q {
        Exponent::Finite(q) => outer_sum.powf(1.0 / q),
        Exponent::Infinity => outer_max,
    })
}
