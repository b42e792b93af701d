//! Time-frequency shifts, the short-time Fourier transform, the reference
//! Gaussian window, and the discrete modulation norms built from it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{
    centered_rep, imod, mixed_norm, unit_roots, Exponent, MixedNormParams, PhaseField, PhaseGrid,
    PhasePoint, WeightGrid,
};

/// A complex signal on `Z_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    grid: PhaseGrid,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(grid: PhaseGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.side() {
            return Err(Error::DimensionMismatch(format!(
                "signal needs {} samples, got {}",
                grid.side(),
                values.len()
            )));
        }
        Ok(Signal { grid, values })
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        Signal {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.side()],
        }
    }

    /// Unit impulse at sample `t`.
    pub fn delta(grid: PhaseGrid, t: usize) -> Self {
        let mut s = Signal::zeros(grid);
        s.values[t % grid.side()] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_fn(grid: PhaseGrid, f: impl FnMut(usize) -> Complex64) -> Self {
        Signal {
            grid,
            values: (0..grid.side()).map(f).collect(),
        }
    }

    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, t: usize) -> Complex64 {
        self.values[t % self.grid.side()]
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// Inner product, antilinear in the second argument.
    pub fn inner(&self, other: &Signal) -> Result<Complex64> {
        self.grid.require_same(other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn scale(&self, c: Complex64) -> Signal {
        Signal {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Signal) -> Result<Signal> {
        self.grid.require_same(other.grid)?;
        Ok(Signal {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.grid.require_same(other.grid)?;
        Ok(Signal {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Signal) -> Result<f64> {
        self.grid.require_same(other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Time-frequency shift: `(pi(z) psi)(t) = e^(2 pi i l t / N) psi(t - k)`
/// for `z = (k, l)`. Unitary on `C^N`.
pub fn tf_shift(z: PhasePoint, psi: &Signal) -> Signal {
    let n = psi.grid().side();
    let w = unit_roots(n);
    Signal::from_fn(psi.grid(), |t| {
        let phase = w[(z.freq * t) % n].conj();
        phase * psi.at(imod(t as i64 - z.time as i64, n))
    })
}

/// Adjoint shift: `(pi(z)* psi)(t) = e^(-2 pi i l (t + k) / N) psi(t + k)`.
pub fn tf_shift_adjoint(z: PhasePoint, psi: &Signal) -> Signal {
    let n = psi.grid().side();
    let w = unit_roots(n);
    Signal::from_fn(psi.grid(), |t| {
        let s = (t + z.time) % n;
        w[(z.freq * s) % n] * psi.at(s)
    })
}

/// Short-time Fourier transform `V(k, l) = <psi, pi(k, l) window>`.
///
/// Each fixed time shift `k` is an `N`-point DFT of `psi(t) conj(window(t-k))`.
pub fn stft(psi: &Signal, window: &Signal) -> Result<PhaseField> {
    psi.grid().require_same(window.grid())?;
    let grid = psi.grid();
    let n = grid.side();
    let w = unit_roots(n);
    let mut out = PhaseField::zeros(grid);
    for k in 0..n {
        // Windowed slice for this shift, then DFT over t.
        let windowed: Vec<Complex64> = (0..n)
            .map(|t| psi.at(t) * window.at(imod(t as i64 - k as i64, n)).conj())
            .collect();
        for l in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, value) in windowed.iter().enumerate() {
                acc += value * w[(l * t) % n];
            }
            *out.at_mut(PhasePoint::new(k, l)) = acc;
        }
    }
    Ok(out)
}

/// Number of periodization terms on each side of the Gaussian window.
///
/// `exp(-pi (t + 3N)^2 / N)` is below 1e-30 for every centered `t` once
/// `N >= 4`, so three wraps reach machine precision.
const GAUSSIAN_WRAPS: i64 = 3;

/// The reference window: unit-norm periodized Gaussian
/// `c * sum_j exp(-pi (t + jN)^2 / N)` over centered representatives.
///
/// Strictly positive and even; the width `exp(-pi t^2 / N)` balances time and
/// frequency spreads on `Z_N`.
pub fn gaussian_window(grid: PhaseGrid) -> Signal {
    let n = grid.side();
    let mut values = Vec::with_capacity(n);
    for t in 0..n {
        let ct = centered_rep(t as i64, n).expect("valid grid") as f64;
        let mut acc = 0.0f64;
        for j in -GAUSSIAN_WRAPS..=GAUSSIAN_WRAPS {
            let x = ct + (j * n as i64) as f64;
            acc += (-std::f64::consts::PI * x * x / n as f64).exp();
        }
        values.push(Complex64::new(acc, 0.0));
    }
    let norm = values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    Signal {
        grid,
        values: values.into_iter().map(|v| v / norm).collect(),
    }
}

/// Weighted absolute STFT sum against the reference Gaussian:
/// `sum_z |V_phi0(phi)(z)| v(z)`. The discrete counterpart of the
/// test-function norm that gauges admissibility of windows.
pub fn m1v_norm(phi: &Signal, v: &WeightGrid) -> Result<f64> {
    phi.grid().require_same(v.grid())?;
    let coeffs = stft(phi, &gaussian_window(phi.grid()))?;
    Ok(phi
        .grid()
        .points()
        .map(|z| coeffs.at(z).norm() * v.at(z))
        .sum())
}

/// Modulation norm: weighted mixed norm of the Gaussian-window STFT.
///
/// A genuine norm on `C^N`: it vanishes only on the zero signal.
pub fn mod_norm(psi: &Signal, params: &MixedNormParams) -> Result<f64> {
    psi.grid().require_same(params.weight.grid())?;
    let coeffs = stft(psi, &gaussian_window(psi.grid()))?;
    mixed_norm(&coeffs, params)
}

/// Gaussian atom: the reference window shifted to the phase-space point `z`.
pub fn gaussian_atom(grid: PhaseGrid, z: PhasePoint) -> Signal {
    tf_shift(z, &gaussian_window(grid))
}

/// Gaussian-enveloped quadratic chirp, useful as a visually interesting test
/// signal. `rate` controls how fast the instantaneous frequency sweeps.
pub fn chirp(grid: PhaseGrid, rate: f64) -> Signal {
    let n = grid.side() as f64;
    let envelope = gaussian_window(grid);
    Signal::from_fn(grid, |t| {
        let ct = centered_rep(t as i64, grid.side()).expect("valid grid") as f64;
        let phase = std::f64::consts::PI * rate * ct * ct / n;
        envelope.at(t) * Complex64::from_polar(1.0, phase)
    })
}

/// Convenience: `p = q = 2`, unit weight.
pub fn l2_params(grid: PhaseGrid) -> MixedNormParams {
    MixedNormParams::unweighted(grid, Exponent::Finite(2.0), Exponent::Finite(2.0))
}
