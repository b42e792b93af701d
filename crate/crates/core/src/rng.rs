//! Seeded, splittable pseudo-randomness for the signal and operator
//! ensembles.
//!
//! SplitMix64 plus Box-Muller, written out in full so that reports are
//! byte-identical across platforms and toolchain versions for a fixed seed.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::grid::{PhaseField, PhaseGrid};
use crate::opwindow::OperatorMatrix;
use crate::tfshift::Signal;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 generator.
#[derive(Debug, Clone, Copy)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `(0, 1]`.
    pub fn next_unit(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / (1u64 << 53) as f64)
    }

    /// Independent stream for the given index; a pure function of
    /// `(current state, index)`, so sample `i` of a run never depends on how
    /// many draws earlier samples consumed.
    pub fn split(&self, index: u64) -> SplitMix64 {
        let mut probe = SplitMix64 {
            state: self
                .state
                .wrapping_add((index ^ 0xD1B5_4A32_D192_ED03).wrapping_mul(GOLDEN)),
        };
        let reseeded = probe.next_u64();
        SplitMix64 { state: reseeded }
    }

    /// Standard normal pair via Box-Muller.
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_unit();
        let u2 = self.next_unit();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = TAU * u2;
        (radius * angle.cos(), radius * angle.sin())
    }

    /// Complex draw with independent standard normal real and imaginary
    /// parts.
    pub fn next_complex_normal(&mut self) -> Complex64 {
        let (re, im) = self.next_normal_pair();
        Complex64::new(re, im)
    }
}

/// Signal with i.i.d. complex standard normal entries.
pub fn random_signal(grid: PhaseGrid, rng: &mut SplitMix64) -> Signal {
    Signal::from_fn(grid, |_| rng.next_complex_normal())
}

/// Operator with i.i.d. complex standard normal entries.
pub fn random_operator(grid: PhaseGrid, rng: &mut SplitMix64) -> OperatorMatrix {
    let entries = (0..grid.side() * grid.side())
        .map(|_| rng.next_complex_normal())
        .collect();
    OperatorMatrix::new(grid, entries).expect("sized by construction")
}

/// Random operator of rank at most `rank`, a sum of random outer products.
pub fn random_low_rank_operator(
    grid: PhaseGrid,
    rank: usize,
    rng: &mut SplitMix64,
) -> OperatorMatrix {
    let mut sum = OperatorMatrix::zeros(grid);
    for _ in 0..rank {
        let left = random_signal(grid, rng);
        let right = random_signal(grid, rng);
        sum = sum
            .add(&OperatorMatrix::rank_one(&left, &right).expect("same grid"))
            .expect("same grid");
    }
    sum
}

/// Phase field with i.i.d. complex standard normal entries.
pub fn random_field(grid: PhaseGrid, rng: &mut SplitMix64) -> PhaseField {
    PhaseField::from_fn(grid, |_| rng.next_complex_normal())
}
