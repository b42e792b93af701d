//! Operator-windowed time-frequency analysis on the finite phase space
//! `Z_N x Z_N`.
//!
//! Signals are complex vectors of length `N`. The short-time Fourier
//! transform pairs a signal with a window signal; the operator STFT pairs it
//! with a Hilbert-Schmidt operator window, attaching a whole signal to every
//! phase-space point. On top of these the crate provides weighted mixed norms
//! and modulation norms, operator convolutions and localization operators,
//! the discrete Weyl calculus, Cohen's class distributions, and the
//! norm-equivalence sandwich tying them together, plus a binary array format
//! and seeded ensembles for reproducible experiments.
//!
//! # Normalization ledger
//!
//! The phase space carries counting measure, so identities acquire explicit
//! powers of `N` relative to their continuum analogues. They are fixed once,
//! here, and exposed programmatically through [`report::ConstantsLedger`]:
//!
//! | identity | discrete form |
//! |---|---|
//! | STFT energy | `sum_z \|V_phi(psi)(z)\|^2 = N \|\|psi\|\|^2 \|\|phi\|\|^2` |
//! | operator STFT energy | `sum_z \|\|S pi(z)* psi\|\|^2 = N \|\|S\|\|_HS^2 \|\|psi\|\|^2` |
//! | inversion | `(analysis then synthesis) = N \|\|S\|\|_HS^2 Id` |
//! | window change | `\|\|V_phi psi\|\|_{p,q,m} <= (C_v^m / N) \|\|phi\|\|_{M1_v} \|\|psi\|\|_{M^{p,q}_m}` |
//! | Weyl pairing | `<L_a phi, psi> = (1/N) sum_z a(z) conj(W(psi, phi)(z))` |
//! | spreading transform | `F_W(T)(z) = N tr(T rho(z)*)` |
//! | symplectic Fourier | `F_sigma(F_sigma(f)) = N^2 f` |
//!
//! The sandwich constants in [`opwindow::equivalence_constants`] are the
//! counting-measure versions produced by these factors.
//!
//! # Quick start
//!
//! Sample the norm-equivalence sandwich for the rank-one Gaussian window,
//! where the `p = q = 2` ratio is identically one:
//!
//! ```
//! use owtf_core::grid::{PhaseGrid, WeightGrid};
//! use owtf_core::opwindow::{equivalence_report, OperatorMatrix};
//! use owtf_core::tfshift::{gaussian_window, l2_params};
//!
//! let grid = PhaseGrid::new(9)?;
//! let window = gaussian_window(grid);
//! let op = OperatorMatrix::rank_one(&window, &window)?;
//! let ones = WeightGrid::ones(grid);
//! let report = equivalence_report(&op, &l2_params(grid), &ones, 7, 16)?;
//! assert!(report.verdict);
//! assert!((report.ratio_max - 1.0).abs() < 1e-9);
//! # Ok::<(), owtf_core::Error>(())
//! ```

pub use num_complex;
pub use num_complex::Complex64;

pub mod error;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod locops;
pub mod opwindow;
pub mod report;
pub mod rng;
pub mod specs;
pub mod tfshift;
pub mod weylcohen;

pub use error::{Error, Result};
pub use grid::{
    centered_rep, cyclic_convolve, mixed_norm, Exponent, MixedNormParams, PhaseField, PhaseGrid,
    PhasePoint, WeightGrid, WeightKind,
};
pub use locops::{localization, op_conv, smoothed_spectrogram, MaskField};
pub use opwindow::{
    equivalence_constants, equivalence_report, field_mixed_norm, multiwindow_op, nuclear_bound,
    op_stft, op_stft_adjoint, EquivalenceConstants, EquivalenceReport, OperatorMatrix, VectorField,
};
pub use tfshift::{gaussian_window, m1v_norm, mod_norm, stft, tf_shift, tf_shift_adjoint, Signal};
pub use weylcohen::{
    cohen, psd_sqrt, spreading, spreading_inverse, symplectic_ft, weyl_quantize, weyl_symbol,
    wigner, WeylSymbol,
};
