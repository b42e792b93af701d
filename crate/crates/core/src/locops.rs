//! Operator convolutions, time-frequency localization operators, and
//! smoothed spectrograms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{cyclic_convolve, PhaseField, PhaseGrid, PhasePoint};
use crate::opwindow::OperatorMatrix;
use crate::tfshift::{stft, tf_shift, Signal};

/// A phase-space multiplier (the mask applied to STFT coefficients).
///
/// Nonnegativity is detected at construction and carried as a hint for
/// downstream positivity checks; it is never assumed without verification.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskField {
    field: PhaseField,
    nonnegative: bool,
}

impl MaskField {
    pub fn new(field: PhaseField) -> Self {
        let nonnegative = field.values().iter().all(|v| v.im == 0.0 && v.re >= 0.0);
        MaskField { field, nonnegative }
    }

    /// The all-ones mask.
    pub fn ones(grid: PhaseGrid) -> Self {
        MaskField::new(PhaseField::constant(grid, Complex64::new(1.0, 0.0)))
    }

    /// Point mass at the origin.
    pub fn delta(grid: PhaseGrid) -> Self {
        MaskField::new(PhaseField::delta(grid, PhasePoint::ORIGIN))
    }

    /// Indicator of the centered disk of the given radius, in the
    /// centered-representative metric.
    pub fn disk(grid: PhaseGrid, radius: f64) -> Self {
        MaskField::new(PhaseField::from_fn(grid, |z| {
            let (ck, cl) = grid.centered(z);
            if ((ck * ck + cl * cl) as f64).sqrt() <= radius {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Gaussian bump `exp(-|z|^2 / (2 sigma^2))` in the centered metric.
    pub fn gauss(grid: PhaseGrid, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::bad_spec(
                &format!("gauss:{sigma}"),
                "gaussian mask width must be positive",
            ));
        }
        Ok(MaskField::new(PhaseField::from_fn(grid, |z| {
            let (ck, cl) = grid.centered(z);
            let r2 = (ck * ck + cl * cl) as f64;
            Complex64::new((-r2 / (2.0 * sigma * sigma)).exp(), 0.0)
        })))
    }

    pub fn grid(&self) -> PhaseGrid {
        self.field.grid()
    }

    pub fn field(&self) -> &PhaseField {
        &self.field
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn translate(&self, w: PhasePoint) -> MaskField {
        MaskField {
            field: self.field.translate(w),
            nonnegative: self.nonnegative,
        }
    }

    pub fn conj(&self) -> MaskField {
        MaskField {
            field: self.field.conj(),
            nonnegative: self.nonnegative,
        }
    }
}

/// Worker count for the convolution sums, from `OWTF_THREADS` (default 1).
///
/// Results are bitwise reproducible for a fixed thread count: the phase-space
/// sum is chunked and the partial sums are merged in fixed chunk order.
pub(crate) fn thread_count() -> usize {
    std::env::var("OWTF_THREADS")
        .ok()
        .and_then(|raw| raw.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1)
}

/// Operator convolution `f * S = sum_z f(z) pi(z) S pi(z)*`, by the direct
/// sum over all phase-space points.
pub fn op_conv(mask: &MaskField, op: &OperatorMatrix) -> Result<OperatorMatrix> {
    mask.grid().require_same(op.grid())?;
    let grid = op.grid();
    let points: Vec<PhasePoint> = grid.points().collect();
    let threads = thread_count().min(points.len());

    let accumulate = |chunk: &[PhasePoint]| -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); grid.side() * grid.side()];
        for &z in chunk {
            let weight = mask.field().at(z);
            if weight.re == 0.0 && weight.im == 0.0 {
                continue;
            }
            let term = op.conjugate_by_shift(z);
            for (slot, value) in acc.iter_mut().zip(term.entries()) {
                *slot += weight * value;
            }
        }
        acc
    };

    let total = if threads <= 1 {
        accumulate(&points)
    } else {
        let chunk_len = points.len().div_ceil(threads);
        let partials: Vec<Vec<Complex64>> = std::thread::scope(|scope| {
            let handles: Vec<_> = points
                .chunks(chunk_len)
                .map(|chunk| scope.spawn(move || accumulate(chunk)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker"))
                .collect()
        });
        let mut acc = vec![Complex64::new(0.0, 0.0); grid.side() * grid.side()];
        for partial in partials {
            for (slot, value) in acc.iter_mut().zip(partial) {
                *slot += value;
            }
        }
        acc
    };
    OperatorMatrix::new(grid, total)
}

/// Time-frequency localization operator: mask the STFT against the analysis
/// window, then resynthesize with the synthesis window,
/// `psi -> sum_z f(z) V_analysis(psi)(z) pi(z) synthesis`.
///
/// As a matrix this is `sum_z f(z) (pi(z) synthesis) (x) (pi(z) analysis)`,
/// which coincides with `op_conv(f, synthesis (x) analysis)`.
pub fn localization(
    mask: &MaskField,
    analysis: &Signal,
    synthesis: &Signal,
) -> Result<OperatorMatrix> {
    mask.grid().require_same(analysis.grid())?;
    mask.grid().require_same(synthesis.grid())?;
    let grid = mask.grid();
    let n = grid.side();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for z in grid.points() {
        let weight = mask.field().at(z);
        if weight.re == 0.0 && weight.im == 0.0 {
            continue;
        }
        let left = tf_shift(z, synthesis);
        let right = tf_shift(z, analysis);
        for row in 0..n {
            let lw = weight * left.at(row);
            for col in 0..n {
                entries[row * n + col] += lw * right.at(col).conj();
            }
        }
    }
    OperatorMatrix::new(grid, entries)
}

/// Smoothed spectrogram: the reflected mask convolved with the spectrogram,
/// `(reflect(f) * |V_window(psi)|^2)(z)`.
///
/// The reflection makes this exactly the Cohen distribution generated by
/// `localization(f, window, window)`.
pub fn smoothed_spectrogram(mask: &MaskField, window: &Signal, psi: &Signal) -> Result<PhaseField> {
    mask.grid().require_same(window.grid())?;
    mask.grid().require_same(psi.grid())?;
    let spectrogram = stft(psi, window)?.abs_squared();
    cyclic_convolve(&mask.field().reflect(), &spectrogram)
}
