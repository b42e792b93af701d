//! Discrete Weyl calculus and Cohen's class distributions.
//!
//! Everything here lives on grids of odd side, where `2` is invertible mod
//! `N`; `h` denotes that inverse throughout, standing in for the half-point
//! shifts of the continuum formulas.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{imod, unit_roots, PhaseField, PhaseGrid, PhasePoint};
use crate::opwindow::OperatorMatrix;
use crate::tfshift::{tf_shift_adjoint, Signal};

/// A phase-space symbol for the Weyl calculus. Requires odd `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylSymbol {
    field: PhaseField,
}

impl WeylSymbol {
    pub fn new(field: PhaseField) -> Result<Self> {
        field.grid().require_odd()?;
        Ok(WeylSymbol { field })
    }

    pub fn field(&self) -> &PhaseField {
        &self.field
    }

    pub fn into_field(self) -> PhaseField {
        self.field
    }

    pub fn grid(&self) -> PhaseGrid {
        self.field.grid()
    }
}

/// Cohen's class distributions are plain phase fields; they are real-valued
/// exactly when the generating operator is self-adjoint.
pub type CohenDistribution = PhaseField;

/// Cross-Wigner distribution
/// `W(x, w) = sum_t psi(x + h t) conj(phi(x - h t)) e^(-2 pi i w t / N)`.
pub fn wigner(psi: &Signal, phi: &Signal) -> Result<PhaseField> {
    psi.grid().require_same(phi.grid())?;
    let grid = psi.grid();
    let h = grid.half()?;
    let n = grid.side();
    let w = unit_roots(n);
    Ok(PhaseField::from_fn(grid, |z| {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..n {
            let plus = (z.time + h * t) % n;
            let minus = imod(z.time as i64 - (h * t % n) as i64, n);
            acc += psi.at(plus) * phi.at(minus).conj() * w[(z.freq * t) % n];
        }
        acc
    }))
}

/// Weyl quantization: operator with kernel
/// `k(x, y) = (1/N) sum_w a(h (x + y), w) e^(2 pi i w (x - y) / N)`.
///
/// With this scaling the pairing `<L_a phi, psi> = (1/N) sum_z a(z)
/// conj(W(psi, phi)(z))` holds exactly.
pub fn weyl_quantize(symbol: &WeylSymbol) -> OperatorMatrix {
    let grid = symbol.grid();
    let n = grid.side();
    let h = grid.half().expect("symbol grid is odd");
    let w = unit_roots(n);
    let scale = 1.0 / n as f64;
    OperatorMatrix::from_fn(grid, |x, y| {
        let mid = (h * ((x + y) % n)) % n;
        let diff = imod(x as i64 - y as i64, n);
        let mut acc = Complex64::new(0.0, 0.0);
        for freq in 0..n {
            acc += symbol.field().at(PhasePoint::new(mid, freq)) * w[(freq * diff) % n].conj();
        }
        acc * scale
    })
}

/// Weyl symbol of an operator: exact inverse of [`weyl_quantize`],
/// `a(u, w) = sum_t k(u + h t, u - h t) e^(-2 pi i w t / N)`.
pub fn weyl_symbol(op: &OperatorMatrix) -> Result<WeylSymbol> {
    let grid = op.grid();
    let h = grid.half()?;
    let n = grid.side();
    let w = unit_roots(n);
    let field = PhaseField::from_fn(grid, |z| {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..n {
            let row = (z.time + h * t) % n;
            let col = imod(z.time as i64 - (h * t % n) as i64, n);
            acc += op.at(row, col) * w[(z.freq * t) % n];
        }
        acc
    });
    WeylSymbol::new(field)
}

/// Symplectic Fourier transform
/// `F(x, w) = sum_{x', w'} f(x', w') e^(-2 pi i (x' w - x w') / N)`.
///
/// Defined for every `N`; applying it twice multiplies by `N^2`.
pub fn symplectic_ft(field: &PhaseField) -> PhaseField {
    let grid = field.grid();
    let n = grid.side();
    let w = unit_roots(n);
    // Stage 1: DFT with positive kernel over the frequency argument.
    let mut stage = vec![Complex64::new(0.0, 0.0); n * n]; // [x'][x]
    for xp in 0..n {
        for x in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for wp in 0..n {
                acc += field.at(PhasePoint::new(xp, wp)) * w[(x * wp) % n].conj();
            }
            stage[xp * n + x] = acc;
        }
    }
    // Stage 2: DFT with negative kernel over the time argument.
    PhaseField::from_fn(grid, |z| {
        let mut acc = Complex64::new(0.0, 0.0);
        for xp in 0..n {
            acc += stage[xp * n + z.time] * w[(xp * z.freq) % n];
        }
        acc
    })
}

fn symmetrized_shift_phase(grid: PhaseGrid, z: PhasePoint) -> Complex64 {
    // rho(k, l) = e^(-2 pi i h k l / N) pi(k, l).
    let n = grid.side();
    let h = grid.half().expect("odd grid");
    let w = unit_roots(n);
    w[(h * z.time % n) * z.freq % n]
}

/// The symmetrized time-frequency shift `rho(z)` as a matrix.
pub fn symmetrized_shift(grid: PhaseGrid, z: PhasePoint) -> Result<OperatorMatrix> {
    grid.require_odd()?;
    let n = grid.side();
    let w = unit_roots(n);
    let phase = symmetrized_shift_phase(grid, z);
    Ok(OperatorMatrix::from_fn(grid, |row, col| {
        if col == imod(row as i64 - z.time as i64, n) {
            phase * w[(z.freq * row) % n].conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Spreading function `F_W(T)(z) = N tr(T rho(z)*)`: the coefficients of the
/// operator in the symmetrized-shift basis.
///
/// The scale `N` is the unique one matching the symplectic Fourier transform
/// of the Weyl symbol, `F_W(T) = F_sigma(a_T)`; see
/// [`calibrate_spreading_scale`] for the empirical determination.
pub fn spreading(op: &OperatorMatrix) -> Result<PhaseField> {
    let grid = op.grid();
    grid.require_odd()?;
    let n = grid.side();
    let w = unit_roots(n);
    Ok(PhaseField::from_fn(grid, |z| {
        // tr(T rho(z)*) = sum_t T[t, t - k] conj(rho_phase e^(2 pi i l t / N))
        let phase = symmetrized_shift_phase(grid, z).conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..n {
            let col = imod(t as i64 - z.time as i64, n);
            acc += op.at(t, col) * w[(z.freq * t) % n];
        }
        acc * phase * n as f64
    }))
}

/// Reassemble an operator from its spreading function:
/// `T = (1/N^2) sum_z F(z) rho(z)`.
pub fn spreading_inverse(field: &PhaseField) -> Result<OperatorMatrix> {
    let grid = field.grid();
    grid.require_odd()?;
    let n = grid.side();
    let w = unit_roots(n);
    let scale = 1.0 / (n * n) as f64;
    Ok(OperatorMatrix::from_fn(grid, |row, col| {
        // Only the shift k = row - col contributes to this entry.
        let k = imod(row as i64 - col as i64, n);
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..n {
            let z = PhasePoint::new(k, l);
            acc += field.at(z) * symmetrized_shift_phase(grid, z) * w[(l * row) % n].conj();
        }
        acc * scale
    }))
}

/// Empirical spreading scale: the ratio between the symplectic Fourier
/// transform of the Weyl symbol and the raw shift coefficients
/// `tr(T rho(z)*)`, measured on a deterministic generic operator.
///
/// Returns the grid-wide median of pointwise ratios; equals `N`.
pub fn calibrate_spreading_scale(grid: PhaseGrid) -> Result<f64> {
    grid.require_odd()?;
    let n = grid.side();
    // A generic fixed operator: entries (1 + r + c^2, r - c).
    let op = OperatorMatrix::from_fn(grid, |r, c| {
        Complex64::new(1.0 + r as f64 + (c * c) as f64, r as f64 - c as f64)
    });
    let reference = symplectic_ft(weyl_symbol(&op)?.field());
    let w = unit_roots(n);
    let mut ratios = Vec::new();
    for z in grid.points() {
        let phase = symmetrized_shift_phase(grid, z).conj();
        let mut raw = Complex64::new(0.0, 0.0);
        for t in 0..n {
            raw += op.at(t, imod(t as i64 - z.time as i64, n)) * w[(z.freq * t) % n];
        }
        raw *= phase;
        if raw.norm() > 1e-9 * op.hs_norm() {
            let ratio = reference.at(z) / raw;
            ratios.push(ratio.re);
            // The ratio must be real for the calibration to make sense.
            if ratio.im.abs() > 1e-6 * ratio.norm() {
                return Err(Error::BadFormat(format!(
                    "spreading calibration produced a non-real ratio {ratio}"
                )));
            }
        }
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    Ok(ratios[ratios.len() / 2])
}

/// Cohen's class distribution of `psi` generated by the operator `T`:
/// `Q(z) = <T pi(z)* psi, pi(z)* psi>`.
pub fn cohen(op: &OperatorMatrix, psi: &Signal) -> Result<CohenDistribution> {
    op.grid().require_same(psi.grid())?;
    let grid = op.grid();
    let mut out = PhaseField::zeros(grid);
    for z in grid.points() {
        let shifted = tf_shift_adjoint(z, psi);
        let image = op.apply(&shifted)?;
        *out.at_mut(z) = image.inner(&shifted)?;
    }
    Ok(out)
}

/// Default relative tolerance for the Hermitian and positivity checks.
pub const PSD_TOL: f64 = 1e-10;

/// Positive-semidefinite square root via eigendecomposition, with negative
/// eigenvalues inside the tolerance band clipped to zero.
pub fn psd_sqrt(op: &OperatorMatrix) -> Result<OperatorMatrix> {
    psd_sqrt_with_tol(op, PSD_TOL)
}

pub fn psd_sqrt_with_tol(op: &OperatorMatrix, rel_tol: f64) -> Result<OperatorMatrix> {
    let scale = op.hs_norm();
    if scale == 0.0 {
        return Ok(OperatorMatrix::zeros(op.grid()));
    }
    let deviation = op.hermitian_deviation();
    if deviation > rel_tol * scale {
        return Err(Error::NotHermitian(deviation / scale));
    }
    let eigen = op.hermitian_eigen();
    let min = eigen.values.last().copied().unwrap_or(0.0);
    if min < -rel_tol * scale {
        return Err(Error::NotPositive(min, scale));
    }
    let n = op.grid().side();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for (lambda, vector) in eigen.values.iter().zip(&eigen.vectors) {
        // Eigenvalues inside the tolerance band are numerically zero; taking
        // their square roots would amplify 1e-16-level noise to 1e-8.
        if *lambda <= rel_tol * scale {
            continue;
        }
        let root = lambda.sqrt();
        for row in 0..n {
            for col in 0..n {
                entries[row * n + col] += vector[row] * vector[col].conj() * root;
            }
        }
    }
    OperatorMatrix::new(op.grid(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{mixed_norm, Exponent, MixedNormParams};
    use crate::opwindow::{field_mixed_norm, op_stft};
    use crate::rng::{random_field, random_operator, random_signal, SplitMix64};
    use crate::tfshift::{gaussian_window, stft, tf_shift};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn wigner_of_impulse_sits_on_zero_time() {
        let grid = PhaseGrid::new(5).unwrap();
        let delta = Signal::delta(grid, 0);
        let w = wigner(&delta, &delta).unwrap();
        for z in grid.points() {
            let expect = if z.time == 0 { 1.0 } else { 0.0 };
            assert!((w.at(z) - c(expect, 0.0)).norm() <= 1e-15);
        }
    }

    #[test]
    fn wigner_frequency_marginal_gives_time_density() {
        let grid = PhaseGrid::new(7).unwrap();
        let mut rng = SplitMix64::new(3);
        let psi = random_signal(grid, &mut rng);
        let w = wigner(&psi, &psi).unwrap();
        for x in 0..grid.side() {
            let marginal: Complex64 = (0..grid.side())
                .map(|freq| w.at(PhasePoint::new(x, freq)))
                .sum();
            let expect = grid.side() as f64 * psi.at(x).norm_sqr();
            assert!((marginal - c(expect, 0.0)).norm() <= 1e-10);
        }
    }

    #[test]
    fn wigner_satisfies_moyal_type_identity() {
        let grid = PhaseGrid::new(5).unwrap();
        let mut rng = SplitMix64::new(5);
        let psi = random_signal(grid, &mut rng);
        let phi = random_signal(grid, &mut rng);
        let w = wigner(&psi, &phi).unwrap();
        let energy: f64 = grid.points().map(|z| w.at(z).norm_sqr()).sum();
        let expect = grid.side() as f64 * psi.norm().powi(2) * phi.norm().powi(2);
        assert!((energy - expect).abs() <= 1e-10 * expect);
    }

    #[test]
    fn wigner_rejects_even_grids() {
        let grid = PhaseGrid::new(4).unwrap();
        let delta = Signal::delta(grid, 0);
        assert!(matches!(wigner(&delta, &delta), Err(Error::EvenGrid(4))));
    }

    #[test]
    fn constant_symbol_quantizes_to_identity() {
        let grid = PhaseGrid::new(7).unwrap();
        let symbol = WeylSymbol::new(PhaseField::constant(grid, c(1.0, 0.0))).unwrap();
        let op = weyl_quantize(&symbol);
        assert!(op.max_abs_diff(&OperatorMatrix::identity(grid)).unwrap() <= 1e-13);
    }

    #[test]
    fn symbol_and_quantization_invert_each_other() {
        for n in [5usize, 7] {
            let grid = PhaseGrid::new(n).unwrap();
            let mut rng = SplitMix64::new(7 + n as u64);
            let field = random_field(grid, &mut rng);
            let symbol = WeylSymbol::new(field.clone()).unwrap();
            let round = weyl_symbol(&weyl_quantize(&symbol)).unwrap();
            assert!(round.field().max_abs_diff(&field).unwrap() <= 1e-12);

            let op = random_operator(grid, &mut rng);
            let back = weyl_quantize(&weyl_symbol(&op).unwrap());
            assert!(back.max_abs_diff(&op).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn weyl_pairing_matches_wigner_duality() {
        // <L_a phi, psi> = (1/N) sum_z a(z) conj(W(psi, phi)(z)); the 1/N is
        // pinned by brute force at N = 3 and must persist at N = 5.
        for n in [3usize, 5] {
            let grid = PhaseGrid::new(n).unwrap();
            let mut rng = SplitMix64::new(11 + n as u64);
            let field = random_field(grid, &mut rng);
            let phi = random_signal(grid, &mut rng);
            let psi = random_signal(grid, &mut rng);
            let op = weyl_quantize(&WeylSymbol::new(field.clone()).unwrap());
            let lhs = op.apply(&phi).unwrap().inner(&psi).unwrap();
            let w = wigner(&psi, &phi).unwrap();
            let rhs: Complex64 = grid
                .points()
                .map(|z| field.at(z) * w.at(z).conj())
                .sum::<Complex64>()
                / n as f64;
            assert!((lhs - rhs).norm() <= 1e-11 * lhs.norm().max(1.0), "N={n}");
        }
    }

    #[test]
    fn quantization_intertwines_translation_with_conjugation() {
        let grid = PhaseGrid::new(5).unwrap();
        let mut rng = SplitMix64::new(13);
        let field = random_field(grid, &mut rng);
        let op = weyl_quantize(&WeylSymbol::new(field.clone()).unwrap());
        for z in grid.points() {
            let translated = weyl_quantize(&WeylSymbol::new(field.translate(z)).unwrap());
            let conjugated = op.conjugate_by_shift(z);
            assert!(translated.max_abs_diff(&conjugated).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn identity_has_constant_symbol_and_projections_real_symbols() {
        let grid = PhaseGrid::new(5).unwrap();
        let symbol = weyl_symbol(&OperatorMatrix::identity(grid)).unwrap();
        assert!(
            symbol
                .field()
                .max_abs_diff(&PhaseField::constant(grid, c(1.0, 0.0)))
                .unwrap()
                <= 1e-13
        );

        let phi0 = gaussian_window(grid);
        let proj = OperatorMatrix::rank_one(&phi0, &phi0).unwrap();
        let symbol = weyl_symbol(&proj).unwrap();
        assert!(symbol.field().max_imag_abs() <= 1e-13);
    }

    #[test]
    fn weyl_symbol_is_linear() {
        let grid = PhaseGrid::new(5).unwrap();
        let mut rng = SplitMix64::new(17);
        let a = random_operator(grid, &mut rng);
        let b = random_operator(grid, &mut rng);
        let alpha = c(0.7, -0.3);
        let beta = c(-1.2, 0.4);
        let combined = weyl_symbol(&a.scale(alpha).add(&b.scale(beta)).unwrap()).unwrap();
        let separate = weyl_symbol(&a)
            .unwrap()
            .into_field()
            .scale(alpha)
            .add(&weyl_symbol(&b).unwrap().into_field().scale(beta))
            .unwrap();
        assert!(combined.field().max_abs_diff(&separate).unwrap() <= 1e-12);
    }

    #[test]
    fn symplectic_ft_of_constant_concentrates_at_origin() {
        let grid = PhaseGrid::new(4).unwrap();
        let f = symplectic_ft(&PhaseField::constant(grid, c(1.0, 0.0)));
        let expect = PhaseField::delta(grid, PhasePoint::ORIGIN).scale(c(16.0, 0.0));
        assert!(f.max_abs_diff(&expect).unwrap() <= 1e-12);
    }

    #[test]
    fn symplectic_ft_of_impulse_is_flat() {
        let grid = PhaseGrid::new(5).unwrap();
        let f = symplectic_ft(&PhaseField::delta(grid, PhasePoint::ORIGIN));
        assert!(
            f.max_abs_diff(&PhaseField::constant(grid, c(1.0, 0.0)))
                .unwrap()
                <= 1e-13
        );
    }

    #[test]
    fn symplectic_ft_is_an_involution_up_to_n_squared() {
        let grid = PhaseGrid::new(4).unwrap();
        let mut rng = SplitMix64::new(19);
        let f = random_field(grid, &mut rng);
        let twice = symplectic_ft(&symplectic_ft(&f));
        let expect = f.scale(c(16.0, 0.0));
        assert!(twice.max_abs_diff(&expect).unwrap() <= 1e-11);
    }

    #[test]
    fn spreading_of_symmetrized_shift_is_point_mass() {
        let grid = PhaseGrid::new(5).unwrap();
        let n = grid.side() as f64;
        let w0 = PhasePoint::new(2, 3);
        let rho = symmetrized_shift(grid, w0).unwrap();
        let f = spreading(&rho).unwrap();
        for z in grid.points() {
            let expect = if z == w0 { n * n } else { 0.0 };
            assert!((f.at(z) - c(expect, 0.0)).norm() <= 1e-10);
        }
    }

    #[test]
    fn spreading_of_identity_is_supported_at_origin() {
        let grid = PhaseGrid::new(7).unwrap();
        let f = spreading(&OperatorMatrix::identity(grid)).unwrap();
        for z in grid.points() {
            if z != PhasePoint::ORIGIN {
                assert!(f.at(z).norm() <= 1e-12);
            }
        }
        assert!((f.at(PhasePoint::ORIGIN) - c(49.0, 0.0)).norm() <= 1e-11);
    }

    #[test]
    fn spreading_matches_symplectic_ft_of_symbol() {
        // Calibrated at N = 3, then asserted at N = 5 and N = 7.
        assert!(
            (calibrate_spreading_scale(PhaseGrid::new(3).unwrap()).unwrap() - 3.0).abs() <= 1e-9
        );
        for n in [5usize, 7] {
            let grid = PhaseGrid::new(n).unwrap();
            let mut rng = SplitMix64::new(23 + n as u64);
            let op = random_operator(grid, &mut rng);
            let lhs = spreading(&op).unwrap();
            let rhs = symplectic_ft(weyl_symbol(&op).unwrap().field());
            assert!(
                lhs.max_abs_diff(&rhs).unwrap() <= 1e-10 * op.hs_norm(),
                "N={n}"
            );
        }
    }

    #[test]
    fn spreading_inverse_reassembles_the_operator() {
        let grid = PhaseGrid::new(5).unwrap();
        let mut rng = SplitMix64::new(29);
        let op = random_operator(grid, &mut rng);
        let back = spreading_inverse(&spreading(&op).unwrap()).unwrap();
        assert!(back.max_abs_diff(&op).unwrap() <= 1e-12);
    }

    #[test]
    fn cohen_of_projection_is_the_spectrogram() {
        let grid = PhaseGrid::new(6).unwrap();
        let mut rng = SplitMix64::new(31);
        let phi = random_signal(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let q = cohen(&OperatorMatrix::rank_one(&phi, &phi).unwrap(), &psi).unwrap();
        let spec = stft(&psi, &phi).unwrap().abs_squared();
        assert!(q.max_abs_diff(&spec).unwrap() <= 1e-11);
    }

    #[test]
    fn cohen_of_gram_window_is_squared_field_norm() {
        let grid = PhaseGrid::new(5).unwrap();
        let mut rng = SplitMix64::new(37);
        let s = random_operator(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let q = cohen(&s.adjoint().mul(&s).unwrap(), &psi).unwrap();
        let norms = op_stft(&s, &psi).unwrap().norm_field().abs_squared();
        assert!(q.max_abs_diff(&norms).unwrap() <= 1e-10);
    }

    #[test]
    fn cohen_is_shift_covariant() {
        let grid = PhaseGrid::new(5).unwrap();
        let mut rng = SplitMix64::new(41);
        let t = random_operator(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let base = cohen(&t, &psi).unwrap();
        for shift in grid.points() {
            let moved = cohen(&t, &tf_shift(shift, &psi)).unwrap();
            for z in grid.points() {
                let expect = base.at(grid.sub(z, shift));
                assert!((moved.at(z) - expect).norm() <= 1e-11);
            }
        }
    }

    #[test]
    fn disjoint_support_window_annihilates_the_impulse() {
        let grid = PhaseGrid::new(9).unwrap();
        let phi1 = Signal::from_fn(grid, |u| match u {
            0 => c(1.0, 0.5),
            1 => c(-0.3, 0.2),
            _ => c(0.0, 0.0),
        });
        let phi2 = Signal::from_fn(grid, |u| match u {
            4 => c(0.8, -0.1),
            5 => c(0.4, 0.6),
            _ => c(0.0, 0.0),
        });
        let t = OperatorMatrix::rank_one(&phi1, &phi2).unwrap();
        let q = cohen(&t, &Signal::delta(grid, 0)).unwrap();
        assert!(q.max_abs() <= 1e-13);
    }

    #[test]
    fn cohen_positivity_tracks_operator_positivity() {
        let grid = PhaseGrid::new(5).unwrap();
        let mut rng = SplitMix64::new(43);
        let a = random_operator(grid, &mut rng);
        let psd = a.adjoint().mul(&a).unwrap();
        for seed in 0..10u64 {
            let mut rng = SplitMix64::new(1000 + seed);
            let psi = random_signal(grid, &mut rng);
            let q = cohen(&psd, &psi).unwrap();
            for z in grid.points() {
                assert!(q.at(z).re >= -1e-10 * psd.hs_norm());
            }
        }

        // An indefinite Hermitian operator admits a witness signal through
        // its most negative eigenvector.
        let h = a.add(&a.adjoint()).unwrap().scale(c(0.5, 0.0));
        let eigen = h.hermitian_eigen();
        let min_index = eigen.values.len() - 1;
        assert!(eigen.values[min_index] < 0.0);
        let witness = Signal::new(grid, eigen.vectors[min_index].clone()).unwrap();
        let q = cohen(&h, &witness).unwrap();
        assert!(q.at(PhasePoint::ORIGIN).re < 0.0);
    }

    #[test]
    fn cohen_mixed_norm_agrees_with_field_norm_route() {
        // The square root of the Gram-window distribution has exactly the
        // mixed norm of the operator STFT, for every p, q, m.
        let grid = PhaseGrid::new(5).unwrap();
        let mut rng = SplitMix64::new(47);
        let s = random_operator(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let q = cohen(&s.adjoint().mul(&s).unwrap(), &psi).unwrap();
        let sqrt_q = PhaseField::from_fn(grid, |z| c(q.at(z).re.max(0.0).sqrt(), 0.0));
        let field = op_stft(&s, &psi).unwrap();
        for (p, qexp) in [
            (Exponent::Finite(1.0), Exponent::Finite(1.0)),
            (Exponent::Finite(2.0), Exponent::Infinity),
            (Exponent::Infinity, Exponent::Finite(1.0)),
        ] {
            let params = MixedNormParams::new(
                p,
                qexp,
                crate::grid::WeightGrid::polynomial(grid, 1.0).unwrap(),
            );
            let lhs = mixed_norm(&sqrt_q, &params).unwrap();
            let rhs = field_mixed_norm(&field, &params).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
        }
    }

    #[test]
    fn translated_symbol_norms_match_operator_stft_norms() {
        // The Weyl route and the operator-window route agree pointwise:
        // ||L_{T_z a} psi|| = ||(op_stft of L_a)(z)||.
        let grid = PhaseGrid::new(5).unwrap();
        let mut rng = SplitMix64::new(53);
        let field = random_field(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let op = weyl_quantize(&WeylSymbol::new(field.clone()).unwrap());
        let norms = op_stft(&op, &psi).unwrap().norm_field();
        for z in grid.points() {
            let translated = weyl_quantize(&WeylSymbol::new(field.translate(z)).unwrap());
            let direct = translated.apply(&psi).unwrap().norm();
            assert!((norms.at(z).re - direct).abs() <= 1e-11);
        }
    }

    #[test]
    fn psd_sqrt_fixes_projections_and_identity() {
        let grid = PhaseGrid::new(6).unwrap();
        let id = OperatorMatrix::identity(grid);
        assert!(psd_sqrt(&id).unwrap().max_abs_diff(&id).unwrap() <= 1e-12);

        let phi0 = gaussian_window(grid);
        let proj = OperatorMatrix::rank_one(&phi0, &phi0).unwrap();
        assert!(psd_sqrt(&proj).unwrap().max_abs_diff(&proj).unwrap() <= 1e-11);
    }

    #[test]
    fn psd_sqrt_squares_back_to_the_operator() {
        let grid = PhaseGrid::new(8).unwrap();
        let mut rng = SplitMix64::new(59);
        let a = random_operator(grid, &mut rng);
        let t = a.adjoint().mul(&a).unwrap();
        let root = psd_sqrt(&t).unwrap();
        assert!(root.hermitian_deviation() <= 1e-11 * root.hs_norm());
        let err = root.mul(&root).unwrap().max_abs_diff(&t).unwrap();
        assert!(err <= 1e-9 * t.hs_norm());
    }

    #[test]
    fn psd_sqrt_rejects_bad_inputs() {
        let grid = PhaseGrid::new(4).unwrap();
        let mut rng = SplitMix64::new(61);
        let a = random_operator(grid, &mut rng);
        assert!(matches!(psd_sqrt(&a), Err(Error::NotHermitian(_))));

        let h = a.add(&a.adjoint()).unwrap().scale(c(0.5, 0.0));
        assert!(matches!(psd_sqrt(&h), Err(Error::NotPositive(_, _))));
    }
}
