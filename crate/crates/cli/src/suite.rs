//! The exact-identity battery behind `owtf identity-suite`: every discrete
//! identity the library is built on, evaluated on seeded random data with one
//! pass/fail row each.

use owtf_core::grid::{mixed_norm, PhaseField, PhaseGrid};
use owtf_core::locops::{localization, op_conv, smoothed_spectrogram, MaskField};
use owtf_core::opwindow::{op_stft, op_stft_adjoint, OperatorMatrix, VectorField};
use owtf_core::rng::{random_field, random_operator, random_signal, SplitMix64};
use owtf_core::tfshift::{gaussian_window, l2_params, mod_norm, stft};
use owtf_core::weylcohen::{
    calibrate_spreading_scale, cohen, spreading, symplectic_ft, weyl_quantize, weyl_symbol, wigner,
    WeylSymbol,
};
use owtf_core::Complex64;
use owtf_core::Result;

use crate::output::ValueRow;

const TOL: f64 = 1e-9;

/// Run every identity at grid side `n` (odd, for the Weyl family) with draws
/// derived from `seed`. Returns one row per identity.
pub fn run_suite(n: usize, seed: u64) -> Result<Vec<ValueRow>> {
    let grid = PhaseGrid::new(n)?;
    grid.require_odd()?;
    let root = SplitMix64::new(seed);
    let draw = |index: u64| root.split(index);
    let mut rows = Vec::new();

    let nf = n as f64;
    let phi0 = gaussian_window(grid);

    // Scalar STFT energy.
    {
        let mut rng = draw(0);
        let psi = random_signal(grid, &mut rng);
        let phi = random_signal(grid, &mut rng);
        let coeffs = stft(&psi, &phi)?;
        let energy: f64 = grid.points().map(|z| coeffs.at(z).norm_sqr()).sum();
        let expect = nf * psi.norm().powi(2) * phi.norm().powi(2);
        rows.push(ValueRow::check(
            "stft-energy",
            (energy - expect).abs() / expect,
            TOL,
        ));
    }

    // Operator STFT energy, adjointness, inversion.
    {
        let mut rng = draw(1);
        let op = random_operator(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let field = op_stft(&op, &psi)?;
        let expect = nf * op.hs_norm().powi(2) * psi.norm().powi(2);
        rows.push(ValueRow::check(
            "operator-stft-energy",
            (field.energy() - expect).abs() / expect,
            TOL,
        ));

        let probe = VectorField::new(
            grid,
            (0..grid.point_count() * n)
                .map(|_| rng.next_complex_normal())
                .collect(),
        )?;
        let lhs = field.inner(&probe)?;
        let rhs = psi.inner(&op_stft_adjoint(&op, &probe)?)?;
        rows.push(ValueRow::check(
            "analysis-synthesis-adjointness",
            (lhs - rhs).norm() / lhs.norm().max(1.0),
            TOL,
        ));

        let back = op_stft_adjoint(&op, &field)?;
        let scale = nf * op.hs_norm().powi(2);
        let err = back.sub(&psi.scale(Complex64::new(scale, 0.0)))?.norm() / (scale * psi.norm());
        rows.push(ValueRow::check("inversion", err, TOL));
    }

    // Modulation norm at p = q = 2 against the plain l2 norm.
    {
        let mut rng = draw(2);
        let psi = random_signal(grid, &mut rng);
        let got = mod_norm(&psi, &l2_params(grid))?;
        let expect = nf.sqrt() * psi.norm();
        rows.push(ValueRow::check(
            "modulation-l2",
            (got - expect).abs() / expect,
            TOL,
        ));
    }

    // Weyl pairing, round trip, translation covariance.
    {
        let mut rng = draw(3);
        let symbol_field = random_field(grid, &mut rng);
        let phi = random_signal(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let op = weyl_quantize(&WeylSymbol::new(symbol_field.clone())?);
        let lhs = op.apply(&phi)?.inner(&psi)?;
        let w = wigner(&psi, &phi)?;
        let rhs: Complex64 = grid
            .points()
            .map(|z| symbol_field.at(z) * w.at(z).conj())
            .sum::<Complex64>()
            / nf;
        rows.push(ValueRow::check(
            "weyl-pairing",
            (lhs - rhs).norm() / lhs.norm().max(1.0),
            TOL,
        ));

        let round = weyl_symbol(&op)?;
        rows.push(ValueRow::check(
            "weyl-round-trip",
            round.field().max_abs_diff(&symbol_field)? / symbol_field.max_abs(),
            TOL,
        ));

        let mut worst = 0.0f64;
        for z in grid.points() {
            let translated = weyl_quantize(&WeylSymbol::new(symbol_field.translate(z))?);
            let conjugated = op.conjugate_by_shift(z);
            worst = worst.max(translated.max_abs_diff(&conjugated)?);
        }
        rows.push(ValueRow::check(
            "symbol-translation-covariance",
            worst / op.hs_norm(),
            TOL,
        ));
    }

    // Spreading transform: calibration, symbol identity, convolution
    // identity.
    {
        let calibration = calibrate_spreading_scale(grid)?;
        rows.push(ValueRow::check(
            "spreading-calibration",
            (calibration - nf).abs() / nf,
            TOL,
        ));

        let mut rng = draw(4);
        let op = random_operator(grid, &mut rng);
        let lhs = spreading(&op)?;
        let rhs = symplectic_ft(weyl_symbol(&op)?.field());
        rows.push(ValueRow::check(
            "spreading-matches-symbol",
            lhs.max_abs_diff(&rhs)? / lhs.max_abs(),
            TOL,
        ));

        let mask = MaskField::new(random_field(grid, &mut rng));
        let conv = op_conv(&mask, &op)?;
        let product = symplectic_ft(mask.field()).mul(&spreading(&op)?)?;
        rows.push(ValueRow::check(
            "spreading-convolution",
            spreading(&conv)?.max_abs_diff(&product)? / product.max_abs().max(1.0),
            TOL,
        ));
    }

    // Cohen's class: spectrogram case and Gram-window case.
    {
        let mut rng = draw(5);
        let phi = random_signal(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let q = cohen(&OperatorMatrix::rank_one(&phi, &phi)?, &psi)?;
        let spec = stft(&psi, &phi)?.abs_squared();
        rows.push(ValueRow::check(
            "spectrogram-distribution",
            q.max_abs_diff(&spec)? / spec.max_abs(),
            TOL,
        ));

        let s = random_operator(grid, &mut rng);
        let gram = s.adjoint().mul(&s)?;
        let q = cohen(&gram, &psi)?;
        let norms = op_stft(&s, &psi)?.norm_field().abs_squared();
        rows.push(ValueRow::check(
            "gram-window-distribution",
            q.max_abs_diff(&norms)? / norms.max_abs(),
            TOL,
        ));
    }

    // Localization operators: convolution identity, covariance, smoothing.
    {
        let mut rng = draw(6);
        let raw = random_field(grid, &mut rng);
        let mask = MaskField::new(PhaseField::from_fn(grid, |z| {
            Complex64::new(raw.at(z).norm_sqr(), 0.0)
        }));
        let psi = random_signal(grid, &mut rng);

        let direct = localization(&mask, &phi0, &phi0)?;
        let via_conv = op_conv(&mask, &OperatorMatrix::rank_one(&phi0, &phi0)?)?;
        rows.push(ValueRow::check(
            "localization-convolution",
            direct.max_abs_diff(&via_conv)? / direct.hs_norm(),
            TOL,
        ));

        let mut worst = 0.0f64;
        for z in grid.points() {
            let lhs = direct.conjugate_by_shift(z);
            let rhs = localization(&mask.translate(z), &phi0, &phi0)?;
            worst = worst.max(lhs.max_abs_diff(&rhs)?);
        }
        rows.push(ValueRow::check(
            "localization-covariance",
            worst / direct.hs_norm(),
            TOL,
        ));

        let smoothed = smoothed_spectrogram(&mask, &phi0, &psi)?;
        let q = cohen(&direct, &psi)?;
        rows.push(ValueRow::check(
            "smoothed-spectrogram",
            smoothed.max_abs_diff(&q)? / q.max_abs(),
            TOL,
        ));

        let mass = smoothed.sum().re;
        let expect = mask.field().sum().re * nf * psi.norm().powi(2);
        rows.push(ValueRow::check(
            "smoothing-mass",
            (mass - expect).abs() / expect.abs(),
            TOL,
        ));
    }

    // Mixed-norm route through the square root of the Gram distribution.
    {
        let mut rng = draw(7);
        let s = random_operator(grid, &mut rng);
        let psi = random_signal(grid, &mut rng);
        let q = cohen(&s.adjoint().mul(&s)?, &psi)?;
        let sqrt_q = PhaseField::from_fn(grid, |z| Complex64::new(q.at(z).re.max(0.0).sqrt(), 0.0));
        let params = l2_params(grid);
        let lhs = mixed_norm(&sqrt_q, &params)?;
        let rhs = owtf_core::opwindow::field_mixed_norm(&op_stft(&s, &psi)?, &params)?;
        rows.push(ValueRow::check(
            "sqrt-distribution-norm",
            (lhs - rhs).abs() / rhs,
            TOL,
        ));
    }

    Ok(rows)
}
