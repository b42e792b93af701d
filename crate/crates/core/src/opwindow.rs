//! Hilbert-Schmidt operator windows: the operator-windowed STFT, its adjoint
//! and inversion, SVD-based nuclear bounds, and the two-sided norm
//! equivalence between modulation norms and operator-STFT mixed norms.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{
    imod, mixed_norm, unit_roots, Exponent, MixedNormParams, PhaseField, PhaseGrid, PhasePoint,
    WeightGrid,
};
use crate::linalg;
use crate::rng::{random_signal, SplitMix64};
use crate::tfshift::{gaussian_window, m1v_norm, mod_norm, Signal};

/// Singular values below this fraction of the largest are dropped from the
/// nuclear bound.
pub const SVD_RELATIVE_CUTOFF: f64 = 1e-13;

/// Relative slack granted to the sandwich verdict.
pub const SANDWICH_TOL: f64 = 1e-12;

/// A linear operator on `C^N`, stored as its matrix (the discrete integral
/// kernel). The Hilbert-Schmidt norm is the Frobenius norm.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    grid: PhaseGrid,
    entries: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn new(grid: PhaseGrid, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != grid.side() * grid.side() {
            return Err(Error::DimensionMismatch(format!(
                "operator needs {} entries, got {}",
                grid.side() * grid.side(),
                entries.len()
            )));
        }
        Ok(OperatorMatrix { grid, entries })
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        OperatorMatrix {
            grid,
            entries: vec![Complex64::new(0.0, 0.0); grid.side() * grid.side()],
        }
    }

    pub fn identity(grid: PhaseGrid) -> Self {
        let mut op = OperatorMatrix::zeros(grid);
        for i in 0..grid.side() {
            op.entries[i * grid.side() + i] = Complex64::new(1.0, 0.0);
        }
        op
    }

    pub fn from_fn(grid: PhaseGrid, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let n = grid.side();
        let mut entries = Vec::with_capacity(n * n);
        for row in 0..n {
            for col in 0..n {
                entries.push(f(row, col));
            }
        }
        OperatorMatrix { grid, entries }
    }

    /// Rank-one operator `left (x) right`, sending `psi` to
    /// `<psi, right> left`.
    pub fn rank_one(left: &Signal, right: &Signal) -> Result<Self> {
        left.grid().require_same(right.grid())?;
        Ok(OperatorMatrix::from_fn(left.grid(), |row, col| {
            left.at(row) * right.at(col).conj()
        }))
    }

    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.grid.side() + col]
    }

    pub fn apply(&self, psi: &Signal) -> Result<Signal> {
        self.grid.require_same(psi.grid())?;
        let n = self.grid.side();
        Ok(Signal::from_fn(self.grid, |row| {
            let mut acc = Complex64::new(0.0, 0.0);
            for col in 0..n {
                acc += self.entries[row * n + col] * psi.at(col);
            }
            acc
        }))
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix::from_fn(self.grid, |row, col| self.at(col, row).conj())
    }

    pub fn mul(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.grid.require_same(other.grid)?;
        let n = self.grid.side();
        Ok(OperatorMatrix::from_fn(self.grid, |row, col| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += self.entries[row * n + k] * other.entries[k * n + col];
            }
            acc
        }))
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.grid.require_same(other.grid)?;
        Ok(OperatorMatrix {
            grid: self.grid,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.grid.require_same(other.grid)?;
        Ok(OperatorMatrix {
            grid: self.grid,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> OperatorMatrix {
        OperatorMatrix {
            grid: self.grid,
            entries: self.entries.iter().map(|v| v * c).collect(),
        }
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.grid.side();
        (0..n).map(|i| self.entries[i * n + i]).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        self.grid.require_same(other.grid)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest modulus among entries of `T - T*`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.grid.side();
        let mut worst = 0.0f64;
        for row in 0..n {
            for col in row..n {
                let dev = (self.at(row, col) - self.at(col, row).conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Phase-space conjugation `pi(z) S pi(z)*`, evaluated entrywise:
    /// the result at `(t, t')` is `e^(2 pi i freq (t - t') / N) S(t-x, t'-x)`.
    pub fn conjugate_by_shift(&self, z: PhasePoint) -> OperatorMatrix {
        let n = self.grid.side();
        let w = unit_roots(n);
        OperatorMatrix::from_fn(self.grid, |row, col| {
            let phase = w[(z.freq * imod(row as i64 - col as i64, n)) % n].conj();
            phase
                * self.at(
                    imod(row as i64 - z.time as i64, n),
                    imod(col as i64 - z.time as i64, n),
                )
        })
    }

    /// Eigendecomposition of the Hermitian part (callers check
    /// Hermitian-ness first where it matters).
    pub fn hermitian_eigen(&self) -> linalg::HermitianEigen {
        linalg::hermitian_eigen(&self.entries, self.grid.side())
    }

    /// Thin SVD with the nuclear-bound cutoff.
    pub fn svd(&self, rel_cutoff: f64) -> linalg::Svd {
        linalg::svd(&self.entries, self.grid.side(), rel_cutoff)
    }
}

/// The operator-windowed STFT of one signal: a signal value at every
/// phase-space point, stored as an `N x N x N` tensor with the component
/// index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: PhaseGrid,
    values: Vec<Complex64>,
}

impl VectorField {
    pub fn new(grid: PhaseGrid, values: Vec<Complex64>) -> Result<Self> {
        let expected = grid.point_count() * grid.side();
        if values.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "vector field needs {} values, got {}",
                expected,
                values.len()
            )));
        }
        Ok(VectorField { grid, values })
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        VectorField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.point_count() * grid.side()],
        }
    }

    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The signal attached to the phase-space point `z`.
    pub fn at(&self, z: PhasePoint) -> &[Complex64] {
        let n = self.grid.side();
        let base = (z.time * n + z.freq) * n;
        &self.values[base..base + n]
    }

    pub fn signal_at(&self, z: PhasePoint) -> Signal {
        Signal::new(self.grid, self.at(z).to_vec()).expect("sized by construction")
    }

    /// Pointwise `l^2` norms as a real-valued phase field.
    pub fn norm_field(&self) -> PhaseField {
        PhaseField::from_fn(self.grid, |z| {
            let norm = self.at(z).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            Complex64::new(norm, 0.0)
        })
    }

    /// Inner product `sum_z <self(z), other(z)>`.
    pub fn inner(&self, other: &VectorField) -> Result<Complex64> {
        self.grid.require_same(other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Operator-windowed STFT: the value at `z` is `S pi(z)* psi`.
///
/// For a fixed time shift `x` the modulation axis is a DFT of
/// `S[r, u-x] psi(u)` over `u`, evaluated here by direct summation.
pub fn op_stft(op: &OperatorMatrix, psi: &Signal) -> Result<VectorField> {
    op.grid().require_same(psi.grid())?;
    let grid = op.grid();
    let n = grid.side();
    let w = unit_roots(n);
    let psi_values = psi.values();
    let entries = op.entries();
    let mut out = VectorField::zeros(grid);
    let mut windowed = vec![Complex64::new(0.0, 0.0); n * n];
    for x in 0..n {
        for r in 0..n {
            let row = &entries[r * n..(r + 1) * n];
            for (u, slot) in windowed[r * n..(r + 1) * n].iter_mut().enumerate() {
                *slot = row[imod(u as i64 - x as i64, n)] * psi_values[u];
            }
        }
        for freq in 0..n {
            let base = (x * n + freq) * n;
            for r in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for u in 0..n {
                    acc += windowed[r * n + u] * w[(freq * u) % n];
                }
                out.values[base + r] = acc;
            }
        }
    }
    Ok(out)
}

/// Synthesis map `sum_z pi(z) S* field(z)`, the adjoint of [`op_stft`].
pub fn op_stft_adjoint(op: &OperatorMatrix, field: &VectorField) -> Result<Signal> {
    op.grid().require_same(field.grid())?;
    let grid = op.grid();
    let n = grid.side();
    let w = unit_roots(n);
    let entries = op.entries();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    // For fixed x, sum_freq e^(2 pi i freq t / N) field(x, freq) first, then
    // contract against conj(S[r, t-x]).
    let mut partial = vec![Complex64::new(0.0, 0.0); n * n]; // [t][r]
    for x in 0..n {
        partial
            .iter_mut()
            .for_each(|v| *v = Complex64::new(0.0, 0.0));
        for freq in 0..n {
            let column = field.at(PhasePoint::new(x, freq));
            for t in 0..n {
                let phase = w[(freq * t) % n].conj();
                for r in 0..n {
                    partial[t * n + r] += phase * column[r];
                }
            }
        }
        for (t, out_t) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..n {
                acc += entries[r * n + imod(t as i64 - x as i64, n)].conj() * partial[t * n + r];
            }
            *out_t += acc;
        }
    }
    Signal::new(grid, out)
}

/// Weighted mixed norm of the pointwise `l^2` norms of a vector field.
pub fn field_mixed_norm(field: &VectorField, params: &MixedNormParams) -> Result<f64> {
    mixed_norm(&field.norm_field(), params)
}

/// Upper bound for the nuclear norm of the adjoint window, computed from the
/// singular value decomposition `S = sum_n sigma_n u_n (x) v_n` as
/// `sum_n sigma_n ||v_n||_{M1_v}`.
///
/// The true norm is an infimum over all rank-one decompositions; the SVD
/// gives one of them, so this is an upper bound, which is the safe direction
/// for both sandwich constants.
pub fn nuclear_bound(op: &OperatorMatrix, v: &WeightGrid) -> Result<f64> {
    op.grid().require_same(v.grid())?;
    let svd = op.svd(SVD_RELATIVE_CUTOFF);
    let mut bound = 0.0;
    for (sigma, right) in svd.singular_values.iter().zip(&svd.right) {
        let window = Signal::new(op.grid(), right.clone())?;
        bound += sigma * m1v_norm(&window, v)?;
    }
    Ok(bound)
}

/// Finite-rank window storing the given signals against the standard basis:
/// `S = sum_n e_n (x) w_n`. The pointwise operator-STFT norms then collect
/// the individual STFT magnitudes in quadrature.
pub fn multiwindow_op(windows: &[Signal]) -> Result<OperatorMatrix> {
    let first = windows.first().ok_or(Error::EmptyWindows)?;
    let grid = first.grid();
    if windows.len() > grid.side() {
        return Err(Error::WindowCapacity {
            requested: windows.len(),
            capacity: grid.side(),
        });
    }
    for w in windows {
        w.grid().require_same(grid)?;
    }
    Ok(OperatorMatrix::from_fn(grid, |row, col| {
        if row < windows.len() {
            windows[row].at(col).conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// The constants entering the norm-equivalence sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceConstants {
    /// Lower sandwich constant.
    pub lower: f64,
    /// Upper sandwich constant.
    pub upper: f64,
    /// Moderateness constant of the norm weight `m` relative to `v`.
    pub moderate_constant: f64,
    /// Moderateness constant of `v` relative to itself.
    pub self_moderate_constant: f64,
    /// SVD nuclear bound of the window.
    pub nuclear_bound: f64,
    /// Hilbert-Schmidt norm of the window.
    pub hs_norm: f64,
    /// Weighted absolute Gaussian self-STFT sum.
    pub gaussian_m1v: f64,
}

/// Sandwich constants for the window `op`, norm weight `m` and window-class
/// weight `v`:
///
/// ```text
/// upper = (C_v^m / N) * B
/// lower = N^2 ||S||_HS^2 / (C_v^m * C_v^v * B * G)
/// ```
///
/// with `B` the nuclear bound and `G` the Gaussian `M1_v` sum. These are the
/// counting-measure constants produced by the analysis bound (one mixed-norm
/// Young step, `C_v^m / N`), the synthesis bound (a second Young step at
/// weight `v`, contributing `C_v^v B G / N`), and the inversion identity
/// (`N ||S||_HS^2`). For `m = v` the two moderateness constants coincide.
pub fn equivalence_constants(
    op: &OperatorMatrix,
    m: &WeightGrid,
    v: &WeightGrid,
) -> Result<EquivalenceConstants> {
    op.grid().require_same(m.grid())?;
    op.grid().require_same(v.grid())?;
    // Both Young steps fold the window class through a reflection, so the
    // constants are bounds only for negation-symmetric v.
    let deviation = v.negation_symmetry_deviation();
    if deviation > crate::grid::WEIGHT_CHECK_TOL {
        return Err(Error::AsymmetricWeight(deviation));
    }
    let hs = op.hs_norm();
    if hs == 0.0 {
        return Err(Error::DegenerateWindow);
    }
    let n = op.grid().side() as f64;
    let bound = nuclear_bound(op, v)?;
    let c_vm = m.moderate_constant(v)?.constant;
    let c_vv = v.moderate_constant(v)?.constant;
    let gaussian = m1v_norm(&gaussian_window(op.grid()), v)?;
    Ok(EquivalenceConstants {
        lower: n * n * hs * hs / (c_vm * c_vv * bound * gaussian),
        upper: c_vm / n * bound,
        moderate_constant: c_vm,
        self_moderate_constant: c_vv,
        nuclear_bound: bound,
        hs_norm: hs,
        gaussian_m1v: gaussian,
    })
}

/// Empirical check of the norm-equivalence sandwich on a seeded ensemble.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub p: Exponent,
    pub q: Exponent,
    /// Label of the mixed-norm weight `m`.
    pub norm_weight: String,
    /// Label of the window-class weight `v`.
    pub window_weight: String,
    pub constants: EquivalenceConstants,
    pub seed: u64,
    pub sample_count: usize,
    pub ratio_min: f64,
    pub ratio_median: f64,
    pub ratio_max: f64,
    /// True when every sampled ratio lies in
    /// `[lower (1 - tolerance), upper (1 + tolerance)]`.
    pub verdict: bool,
    pub tolerance: f64,
    pub ratios: Vec<f64>,
}

impl EquivalenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,value\n");
        let c = &self.constants;
        let rows: Vec<(&str, String)> = vec![
            ("n", self.n.to_string()),
            ("p", self.p.to_string()),
            ("q", self.q.to_string()),
            ("norm_weight", self.norm_weight.clone()),
            ("window_weight", self.window_weight.clone()),
            ("hs_norm", c.hs_norm.to_string()),
            ("nuclear_bound", c.nuclear_bound.to_string()),
            ("moderate_constant", c.moderate_constant.to_string()),
            (
                "self_moderate_constant",
                c.self_moderate_constant.to_string(),
            ),
            ("gaussian_m1v", c.gaussian_m1v.to_string()),
            ("lower", c.lower.to_string()),
            ("upper", c.upper.to_string()),
            ("seed", self.seed.to_string()),
            ("sample_count", self.sample_count.to_string()),
            ("ratio_min", self.ratio_min.to_string()),
            ("ratio_median", self.ratio_median.to_string()),
            ("ratio_max", self.ratio_max.to_string()),
            ("tolerance", self.tolerance.to_string()),
            (
                "verdict",
                if self.verdict { "pass" } else { "fail" }.to_string(),
            ),
        ];
        for (name, value) in rows {
            out.push_str(name);
            out.push(',');
            out.push_str(&value);
            out.push('\n');
        }
        out.push_str("sample,ratio\n");
        for (i, ratio) in self.ratios.iter().enumerate() {
            out.push_str(&format!("{i},{ratio}\n"));
        }
        out
    }
}

/// Draw `count` signals with i.i.d. complex standard normal entries from the
/// split streams of `seed`, and compare the operator-STFT mixed norm against
/// the modulation norm sample by sample.
pub fn equivalence_report(
    op: &OperatorMatrix,
    params: &MixedNormParams,
    v: &WeightGrid,
    seed: u64,
    count: usize,
) -> Result<EquivalenceReport> {
    equivalence_report_with_tol(op, params, v, seed, count, SANDWICH_TOL)
}

pub fn equivalence_report_with_tol(
    op: &OperatorMatrix,
    params: &MixedNormParams,
    v: &WeightGrid,
    seed: u64,
    count: usize,
    tolerance: f64,
) -> Result<EquivalenceReport> {
    if count == 0 {
        return Err(Error::DimensionMismatch(
            "sample count must be at least 1".into(),
        ));
    }
    let constants = equivalence_constants(op, &params.weight, v)?;
    let grid = op.grid();
    let root = SplitMix64::new(seed);
    let mut ratios = Vec::with_capacity(count);
    for index in 0..count {
        let mut stream = root.split(index as u64);
        let psi = random_signal(grid, &mut stream);
        let denominator = mod_norm(&psi, params)?;
        // A nonzero signal has nonzero modulation norm; Gaussian draws are
        // nonzero with probability one.
        assert!(
            denominator > 0.0,
            "drew a signal with vanishing modulation norm"
        );
        let numerator = field_mixed_norm(&op_stft(op, &psi)?, params)?;
        ratios.push(numerator / denominator);
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("ratios are finite"));
    let ratio_min = sorted[0];
    let ratio_max = sorted[sorted.len() - 1];
    let ratio_median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    let verdict = ratio_min >= constants.lower * (1.0 - tolerance)
        && ratio_max <= constants.upper * (1.0 + tolerance);
    Ok(EquivalenceReport {
        n: grid.side(),
        p: params.p,
        q: params.q,
        norm_weight: params.weight.label().to_string(),
        window_weight: v.label().to_string(),
        constants,
        seed,
        sample_count: count,
        ratio_min,
        ratio_median,
        ratio_max,
        verdict,
        tolerance,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::WeightKind;
    use crate::rng::{random_low_rank_operator, random_operator};
    use crate::tfshift::{l2_params, stft, tf_shift};

    fn seeded_signal(grid: PhaseGrid, seed: u64) -> Signal {
        let mut rng = SplitMix64::new(seed);
        random_signal(grid, &mut rng)
    }

    #[test]
    fn rank_one_window_reduces_to_scalar_stft() {
        let grid = PhaseGrid::new(6).unwrap();
        let psi = seeded_signal(grid, 3);
        let phi = seeded_signal(grid, 5);
        let mut xi = seeded_signal(grid, 7);
        xi = xi.scale(Complex64::new(1.0 / xi.norm(), 0.0));
        let op = OperatorMatrix::rank_one(&xi, &phi).unwrap();
        let field = op_stft(&op, &psi).unwrap();
        let coeffs = stft(&psi, &phi).unwrap();
        for z in grid.points() {
            let expect = xi.scale(coeffs.at(z));
            let got = field.signal_at(z);
            assert!(got.max_abs_diff(&expect).unwrap() <= 1e-12);
            let norms = field.norm_field();
            assert!((norms.at(z).re - coeffs.at(z).norm()).abs() <= 1e-12);
        }
    }

    #[test]
    fn identity_window_has_constant_pointwise_norm() {
        let grid = PhaseGrid::new(5).unwrap();
        let psi = seeded_signal(grid, 11);
        let field = op_stft(&OperatorMatrix::identity(grid), &psi).unwrap();
        let norms = field.norm_field();
        for z in grid.points() {
            assert!((norms.at(z).re - psi.norm()).abs() <= 1e-12);
        }
    }

    #[test]
    fn op_stft_satisfies_generalized_moyal() {
        for (n, seed) in [(3usize, 13u64), (4, 17), (5, 19)] {
            let grid = PhaseGrid::new(n).unwrap();
            let mut rng = SplitMix64::new(seed);
            let op = random_operator(grid, &mut rng);
            let psi = random_signal(grid, &mut rng);
            let field = op_stft(&op, &psi).unwrap();
            let expect = n as f64 * op.hs_norm().powi(2) * psi.norm().powi(2);
            assert!((field.energy() - expect).abs() <= 1e-11 * expect, "N={n}");
        }
    }

    #[test]
    fn op_stft_matches_direct_shift_application() {
        // Independent route: apply pi(z)* explicitly, then the matrix.
        let grid = PhaseGrid::new(7).unwrap();
        let mut rng = SplitMix64::new(23);
        let op = random_operator(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let field = op_stft(&op, &psi).unwrap();
        for z in grid.points() {
            let direct = op
                .apply(&crate::tfshift::tf_shift_adjoint(z, &psi))
                .unwrap();
            assert!(field.signal_at(z).max_abs_diff(&direct).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn adjoint_pairs_with_analysis() {
        let grid = PhaseGrid::new(5).unwrap();
        let mut rng = SplitMix64::new(29);
        let op = random_operator(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let other = VectorField::new(
            grid,
            (0..grid.point_count() * grid.side())
                .map(|_| rng.next_complex_normal())
                .collect(),
        )
        .unwrap();
        let lhs = op_stft(&op, &psi).unwrap().inner(&other).unwrap();
        let rhs = psi.inner(&op_stft_adjoint(&op, &other).unwrap()).unwrap();
        assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn adjoint_of_zero_field_is_zero() {
        let grid = PhaseGrid::new(4).unwrap();
        let op = random_operator(grid, &mut SplitMix64::new(31));
        let out = op_stft_adjoint(&op, &VectorField::zeros(grid)).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn analysis_followed_by_synthesis_is_scaled_identity() {
        for (n, seed) in [(3usize, 37u64), (4, 41), (5, 43)] {
            let grid = PhaseGrid::new(n).unwrap();
            let mut rng = SplitMix64::new(seed);
            let op = random_operator(grid, &mut rng);
            let psi = random_signal(grid, &mut rng);
            let back = op_stft_adjoint(&op, &op_stft(&op, &psi).unwrap()).unwrap();
            let expect = psi.scale(Complex64::new(n as f64 * op.hs_norm().powi(2), 0.0));
            assert!(
                back.max_abs_diff(&expect).unwrap() <= 1e-10 * expect.norm(),
                "N={n}"
            );
        }
    }

    #[test]
    fn op_stft_shift_covariance_moves_pointwise_norms() {
        let grid = PhaseGrid::new(4).unwrap();
        let mut rng = SplitMix64::new(47);
        let op = random_operator(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let base = op_stft(&op, &psi).unwrap().norm_field();
        for z in grid.points() {
            let shifted = op_stft(&op, &tf_shift(z, &psi)).unwrap().norm_field();
            for zp in grid.points() {
                let expect = base.at(grid.sub(zp, z)).re;
                assert!((shifted.at(zp).re - expect).abs() <= 1e-11);
            }
        }
    }

    #[test]
    fn pointwise_norm_equals_conjugated_window_action() {
        let grid = PhaseGrid::new(5).unwrap();
        let mut rng = SplitMix64::new(53);
        let op = random_operator(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let field = op_stft(&op, &psi).unwrap().norm_field();
        for z in grid.points() {
            let conj = op.conjugate_by_shift(z).apply(&psi).unwrap();
            assert!((field.at(z).re - conj.norm()).abs() <= 1e-11);
        }
    }

    #[test]
    fn field_mixed_norm_l2_is_tensor_frobenius() {
        let grid = PhaseGrid::new(5).unwrap();
        let mut rng = SplitMix64::new(59);
        let field = VectorField::new(
            grid,
            (0..grid.point_count() * grid.side())
                .map(|_| rng.next_complex_normal())
                .collect(),
        )
        .unwrap();
        let got = field_mixed_norm(&field, &l2_params(grid)).unwrap();
        assert!((got - field.energy().sqrt()).abs() <= 1e-12 * got);
    }

    #[test]
    fn multiwindow_single_window_recovers_scalar_norms() {
        let grid = PhaseGrid::new(6).unwrap();
        let psi = seeded_signal(grid, 61);
        let phi = seeded_signal(grid, 67);
        let op = multiwindow_op(std::slice::from_ref(&phi)).unwrap();
        let field = op_stft(&op, &psi).unwrap();
        let coeffs = stft(&psi, &phi).unwrap();
        let params = MixedNormParams::unweighted(grid, Exponent::Finite(1.0), Exponent::Infinity);
        let lhs = field_mixed_norm(&field, &params).unwrap();
        let rhs = mixed_norm(&coeffs, &params).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn multiwindow_duplicate_window_scales_by_sqrt_two() {
        let grid = PhaseGrid::new(5).unwrap();
        let phi0 = gaussian_window(grid);
        let psi = seeded_signal(grid, 71);
        let op = multiwindow_op(&[phi0.clone(), phi0.clone()]).unwrap();
        let norms = op_stft(&op, &psi).unwrap().norm_field();
        let coeffs = stft(&psi, &phi0).unwrap();
        for z in grid.points() {
            let expect = 2.0f64.sqrt() * coeffs.at(z).norm();
            assert!((norms.at(z).re - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn multiwindow_collects_square_sums() {
        let grid = PhaseGrid::new(5).unwrap();
        let psi = seeded_signal(grid, 73);
        let w1 = gaussian_window(grid);
        let w2 = tf_shift(PhasePoint::new(1, 0), &w1);
        let op = multiwindow_op(&[w1.clone(), w2.clone()]).unwrap();
        let norms = op_stft(&op, &psi).unwrap().norm_field();
        let v1 = stft(&psi, &w1).unwrap();
        let v2 = stft(&psi, &w2).unwrap();
        for z in grid.points() {
            let expect = (v1.at(z).norm_sqr() + v2.at(z).norm_sqr()).sqrt();
            assert!((norms.at(z).re - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn multiwindow_rejects_bad_counts() {
        let grid = PhaseGrid::new(3).unwrap();
        assert!(matches!(multiwindow_op(&[]), Err(Error::EmptyWindows)));
        let w = gaussian_window(grid);
        let too_many = vec![w.clone(), w.clone(), w.clone(), w];
        assert!(matches!(
            multiwindow_op(&too_many),
            Err(Error::WindowCapacity {
                requested: 4,
                capacity: 3
            })
        ));
    }

    #[test]
    fn nuclear_bound_of_rank_one_is_window_m1v_norm() {
        let grid = PhaseGrid::new(7).unwrap();
        let mut xi = seeded_signal(grid, 79);
        xi = xi.scale(Complex64::new(1.0 / xi.norm(), 0.0));
        let phi = seeded_signal(grid, 83);
        let op = OperatorMatrix::rank_one(&xi, &phi).unwrap();
        let v = WeightGrid::polynomial(grid, 1.0).unwrap();
        let got = nuclear_bound(&op, &v).unwrap();
        let expect = m1v_norm(&phi, &v).unwrap();
        assert!((got - expect).abs() <= 1e-7 * expect);
    }

    #[test]
    fn nuclear_bound_of_zero_operator_vanishes() {
        let grid = PhaseGrid::new(4).unwrap();
        let v = WeightGrid::ones(grid);
        assert_eq!(
            nuclear_bound(&OperatorMatrix::zeros(grid), &v).unwrap(),
            0.0
        );
    }

    #[test]
    fn nuclear_bound_shift_conjugation_is_weight_bounded() {
        // ||pi(z) S pi(z)*|| bound <= v(z) * bound(S) for a weight that is
        // exactly submultiplicative on the grid.
        let grid = PhaseGrid::new(5).unwrap();
        let values: Vec<f64> = grid
            .points()
            .map(|z| {
                let (ck, cl) = grid.centered(z);
                1.0 + ((ck * ck + cl * cl) as f64).sqrt()
            })
            .collect();
        let v = WeightGrid::new(
            grid,
            values,
            WeightKind::SubmultiplicativeCandidate,
            "metric",
        )
        .unwrap();
        let mut rng = SplitMix64::new(89);
        let op = random_low_rank_operator(grid, 3, &mut rng);
        let base = nuclear_bound(&op, &v).unwrap();
        for z in grid.points() {
            let shifted = nuclear_bound(&op.conjugate_by_shift(z), &v).unwrap();
            assert!(shifted <= v.at(z) * base * (1.0 + 1e-9));
        }
    }

    #[test]
    fn equivalence_constants_match_rank_one_gaussian_formulas() {
        let grid = PhaseGrid::new(9).unwrap();
        let n = grid.side() as f64;
        let phi0 = gaussian_window(grid);
        let mut xi = seeded_signal(grid, 97);
        xi = xi.scale(Complex64::new(1.0 / xi.norm(), 0.0));
        let op = OperatorMatrix::rank_one(&xi, &phi0).unwrap();
        let ones = WeightGrid::ones(grid);
        let constants = equivalence_constants(&op, &ones, &ones).unwrap();
        let g = m1v_norm(&phi0, &ones).unwrap();
        assert!((constants.upper - g / n).abs() <= 1e-7 * constants.upper);
        assert!((constants.lower - n * n / (g * g)).abs() <= 1e-7 * constants.lower);
        assert!((constants.hs_norm - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn equivalence_constants_order_for_random_windows() {
        for (n, seed) in [(5usize, 101u64), (7, 103)] {
            let grid = PhaseGrid::new(n).unwrap();
            let mut rng = SplitMix64::new(seed);
            let op = random_operator(grid, &mut rng);
            let m = WeightGrid::polynomial(grid, 1.0).unwrap();
            let v = WeightGrid::polynomial(grid, 1.0).unwrap();
            let constants = equivalence_constants(&op, &m, &v).unwrap();
            assert!(constants.lower <= constants.upper, "N={n}");
        }
    }

    #[test]
    fn equivalence_constants_reject_asymmetric_window_class() {
        let grid = PhaseGrid::new(5).unwrap();
        let mut values = vec![1.0; grid.point_count()];
        values[grid.index(PhasePoint::new(1, 0))] = 4.0;
        let lopsided =
            WeightGrid::new(grid, values, WeightKind::ModerateCandidate, "lopsided").unwrap();
        let ones = WeightGrid::ones(grid);
        let op = OperatorMatrix::identity(grid);
        assert!(matches!(
            equivalence_constants(&op, &ones, &lopsided),
            Err(Error::AsymmetricWeight(_))
        ));
    }

    #[test]
    fn equivalence_constants_reject_zero_window() {
        let grid = PhaseGrid::new(4).unwrap();
        let ones = WeightGrid::ones(grid);
        assert!(matches!(
            equivalence_constants(&OperatorMatrix::zeros(grid), &ones, &ones),
            Err(Error::DegenerateWindow)
        ));
    }

    #[test]
    fn rank_one_gaussian_report_has_unit_ratios_at_l2() {
        let grid = PhaseGrid::new(8).unwrap();
        let phi0 = gaussian_window(grid);
        let op = OperatorMatrix::rank_one(&phi0, &phi0).unwrap();
        let ones = WeightGrid::ones(grid);
        let params = l2_params(grid);
        let report = equivalence_report(&op, &params, &ones, 5, 24).unwrap();
        assert!(report.verdict);
        assert!((report.ratio_min - 1.0).abs() <= 1e-12);
        assert!((report.ratio_max - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn multiwindow_report_passes_at_l1() {
        let grid = PhaseGrid::new(7).unwrap();
        let phi0 = gaussian_window(grid);
        let op = multiwindow_op(&[phi0.clone(), tf_shift(PhasePoint::new(1, 0), &phi0)]).unwrap();
        let ones = WeightGrid::ones(grid);
        let params =
            MixedNormParams::unweighted(grid, Exponent::Finite(1.0), Exponent::Finite(1.0));
        let report = equivalence_report(&op, &params, &ones, 9, 16).unwrap();
        assert!(
            report.verdict,
            "ratios [{}, {}] outside [{}, {}]",
            report.ratio_min, report.ratio_max, report.constants.lower, report.constants.upper
        );
    }

    #[test]
    fn equivalence_report_rejects_zero_window() {
        let grid = PhaseGrid::new(4).unwrap();
        let ones = WeightGrid::ones(grid);
        let params = l2_params(grid);
        assert!(matches!(
            equivalence_report(&OperatorMatrix::zeros(grid), &params, &ones, 1, 4),
            Err(Error::DegenerateWindow)
        ));
    }

    #[test]
    fn equivalence_report_needs_at_least_one_sample() {
        let grid = PhaseGrid::new(4).unwrap();
        let phi0 = gaussian_window(grid);
        let op = OperatorMatrix::rank_one(&phi0, &phi0).unwrap();
        let ones = WeightGrid::ones(grid);
        assert!(equivalence_report(&op, &l2_params(grid), &ones, 1, 0).is_err());
    }

    #[test]
    fn reports_serialize_to_json_and_csv() {
        let grid = PhaseGrid::new(5).unwrap();
        let phi0 = gaussian_window(grid);
        let op = OperatorMatrix::rank_one(&phi0, &phi0).unwrap();
        let ones = WeightGrid::ones(grid);
        let report = equivalence_report(&op, &l2_params(grid), &ones, 2, 4).unwrap();
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["n"], 5);
        assert_eq!(json["p"], "2");
        let csv = report.to_csv();
        assert!(csv.starts_with("quantity,value\n"));
        assert!(csv.contains("verdict,pass"));
        assert!(csv.contains("sample,ratio"));
    }
}
