//! String specs for weights, masks, signals, and operator windows, shared by
//! the command-line tool and the browser demo.

use crate::error::{Error, Result};
use crate::grid::{Exponent, PhaseGrid, WeightGrid, WeightKind};
use crate::io;
use crate::locops::{localization, MaskField};
use crate::opwindow::{multiwindow_op, OperatorMatrix};
use crate::rng::{random_low_rank_operator, random_signal, SplitMix64};
use crate::tfshift::{chirp, gaussian_atom, gaussian_window, tf_shift, Signal};
use crate::weylcohen::{weyl_quantize, WeylSymbol};

fn tail<'a>(spec: &'a str, prefix: &str) -> Option<&'a str> {
    spec.strip_prefix(prefix)
}

/// Weight specs: `one`, `poly:<s>`, `file:<path>`.
///
/// `kind` governs the admissibility checks applied to file-loaded grids:
/// window-class weights must be symmetric under negation, plain mixed-norm
/// weights only positive. The built-in families satisfy both.
pub fn parse_weight(spec: &str, grid: PhaseGrid, kind: WeightKind) -> Result<WeightGrid> {
    let spec = spec.trim();
    if spec == "one" || spec == "ones" {
        return Ok(WeightGrid::ones(grid));
    }
    if let Some(arg) = tail(spec, "poly:") {
        let s: f64 = arg
            .parse()
            .map_err(|_| Error::bad_spec(spec, "expected poly:<s> with numeric s"))?;
        return WeightGrid::polynomial(grid, s);
    }
    if let Some(path) = tail(spec, "file:") {
        let weight = io::load_weight(path, kind)?;
        weight.grid().require_same(grid)?;
        return Ok(weight);
    }
    Err(Error::bad_spec(
        spec,
        "expected one, poly:<s>, or file:<path>",
    ))
}

/// Mask specs: `ones`, `delta`, `disk:<radius>`, `gauss:<sigma>`,
/// `file:<path>`.
pub fn parse_mask(spec: &str, grid: PhaseGrid) -> Result<MaskField> {
    let spec = spec.trim();
    if spec == "ones" || spec == "one" {
        return Ok(MaskField::ones(grid));
    }
    if spec == "delta" {
        return Ok(MaskField::delta(grid));
    }
    if let Some(arg) = tail(spec, "disk:") {
        let radius: f64 = arg
            .parse()
            .map_err(|_| Error::bad_spec(spec, "expected disk:<radius>"))?;
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::bad_spec(spec, "disk radius must be nonnegative"));
        }
        return Ok(MaskField::disk(grid, radius));
    }
    if let Some(arg) = tail(spec, "gauss:") {
        let sigma: f64 = arg
            .parse()
            .map_err(|_| Error::bad_spec(spec, "expected gauss:<sigma>"))?;
        return MaskField::gauss(grid, sigma);
    }
    if let Some(path) = tail(spec, "file:") {
        let field = io::load_field(path)?;
        field.grid().require_same(grid)?;
        return Ok(MaskField::new(field));
    }
    Err(Error::bad_spec(
        spec,
        "expected ones, delta, disk:<radius>, gauss:<sigma>, or file:<path>",
    ))
}

/// Signal specs: `gauss`, `delta[:t]`, `random:<seed>`, `chirp[:rate]`,
/// `atom:<k>,<l>`, `twoatoms`, `file:<path>`.
pub fn parse_signal(spec: &str, grid: PhaseGrid) -> Result<Signal> {
    let spec = spec.trim();
    if spec == "gauss" {
        return Ok(gaussian_window(grid));
    }
    if spec == "delta" {
        return Ok(Signal::delta(grid, 0));
    }
    if let Some(arg) = tail(spec, "delta:") {
        let t: usize = arg
            .parse()
            .map_err(|_| Error::bad_spec(spec, "expected delta:<t>"))?;
        return Ok(Signal::delta(grid, t));
    }
    if let Some(arg) = tail(spec, "random:") {
        let seed: u64 = arg
            .parse()
            .map_err(|_| Error::bad_spec(spec, "expected random:<seed>"))?;
        return Ok(random_signal(grid, &mut SplitMix64::new(seed)));
    }
    if spec == "chirp" {
        return Ok(chirp(grid, 1.0));
    }
    if let Some(arg) = tail(spec, "chirp:") {
        let rate: f64 = arg
            .parse()
            .map_err(|_| Error::bad_spec(spec, "expected chirp:<rate>"))?;
        return Ok(chirp(grid, rate));
    }
    if let Some(arg) = tail(spec, "atom:") {
        let (k, l) = parse_point(spec, arg)?;
        return Ok(gaussian_atom(grid, grid.wrap(k, l)));
    }
    if spec == "twoatoms" {
        // Two Gabor atoms in opposite phase-space quadrants.
        let n = grid.side() as i64;
        let a = gaussian_atom(grid, grid.wrap(n / 4, n / 4));
        let b = gaussian_atom(grid, grid.wrap(-n / 4, -n / 4));
        return a.add(&b);
    }
    if let Some(path) = tail(spec, "file:") {
        let signal = io::load_signal(path)?;
        signal.grid().require_same(grid)?;
        return Ok(signal);
    }
    Err(Error::bad_spec(
        spec,
        "expected gauss, delta[:t], random:<seed>, chirp[:rate], atom:<k>,<l>, twoatoms, or file:<path>",
    ))
}

fn parse_point(spec: &str, arg: &str) -> Result<(i64, i64)> {
    let mut parts = arg.splitn(2, ',');
    let k = parts
        .next()
        .and_then(|p| p.trim().parse::<i64>().ok())
        .ok_or_else(|| Error::bad_spec(spec, "expected <k>,<l>"))?;
    let l = parts
        .next()
        .and_then(|p| p.trim().parse::<i64>().ok())
        .ok_or_else(|| Error::bad_spec(spec, "expected <k>,<l>"))?;
    Ok((k, l))
}

/// Operator specs: `rankone:gauss`, `multiwindow:<k>`, `random:<seed>`,
/// `rank:<r>:<seed>`, `weyl:<symbol-file>`, `locop:<mask-spec>`,
/// `psdlocop:<mask-spec>`, `identity`, `file:<path>`.
pub fn parse_operator(spec: &str, grid: PhaseGrid) -> Result<OperatorMatrix> {
    let spec = spec.trim();
    if spec == "rankone:gauss" {
        let phi0 = gaussian_window(grid);
        return OperatorMatrix::rank_one(&phi0, &phi0);
    }
    if spec == "identity" {
        return Ok(OperatorMatrix::identity(grid));
    }
    if let Some(arg) = tail(spec, "multiwindow:") {
        let count: usize = arg
            .parse()
            .map_err(|_| Error::bad_spec(spec, "expected multiwindow:<k>"))?;
        return multiwindow_op(&multiwindow_windows(grid, count));
    }
    if let Some(arg) = tail(spec, "random:") {
        let seed: u64 = arg
            .parse()
            .map_err(|_| Error::bad_spec(spec, "expected random:<seed>"))?;
        return Ok(crate::rng::random_operator(
            grid,
            &mut SplitMix64::new(seed),
        ));
    }
    if let Some(arg) = tail(spec, "rank:") {
        let mut parts = arg.splitn(2, ':');
        let rank: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Error::bad_spec(spec, "expected rank:<r>:<seed>"))?;
        let seed: u64 = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Error::bad_spec(spec, "expected rank:<r>:<seed>"))?;
        return Ok(random_low_rank_operator(
            grid,
            rank,
            &mut SplitMix64::new(seed),
        ));
    }
    if let Some(path) = tail(spec, "weyl:") {
        let field = io::load_field(path)?;
        field.grid().require_same(grid)?;
        return Ok(weyl_quantize(&WeylSymbol::new(field)?));
    }
    if let Some(mask_spec) = tail(spec, "locop:") {
        let mask = parse_mask(mask_spec, grid)?;
        let phi0 = gaussian_window(grid);
        return localization(&mask, &phi0, &phi0);
    }
    if let Some(mask_spec) = tail(spec, "psdlocop:") {
        // PSD square root of a nonnegative-mask localization operator.
        let mask = parse_mask(mask_spec, grid)?;
        let phi0 = gaussian_window(grid);
        let op = localization(&mask, &phi0, &phi0)?;
        return crate::weylcohen::psd_sqrt(&op);
    }
    if let Some(path) = tail(spec, "file:") {
        let op = io::load_operator(path)?;
        op.grid().require_same(grid)?;
        return Ok(op);
    }
    Err(Error::bad_spec(
        spec,
        "expected rankone:gauss, multiwindow:<k>, random:<seed>, rank:<r>:<seed>, \
         weyl:<file>, locop:<mask>, psdlocop:<mask>, identity, or file:<path>",
    ))
}

/// The window family used by `multiwindow:<k>`: the Gaussian and its shifts
/// along a fixed small-point enumeration of phase space.
pub fn multiwindow_windows(grid: PhaseGrid, count: usize) -> Vec<Signal> {
    let phi0 = gaussian_window(grid);
    let shifts = [
        (0i64, 0i64),
        (1, 0),
        (0, 1),
        (1, 1),
        (-1, 0),
        (0, -1),
        (-1, -1),
        (1, -1),
        (-1, 1),
    ];
    (0..count)
        .map(|i| {
            let (k, l) = shifts[i % shifts.len()];
            let step = (i / shifts.len()) as i64 + 1;
            tf_shift(grid.wrap(k * step, l * step), &phi0)
        })
        .collect()
}

/// Exponent spec: a number at least 1, or `inf`.
pub fn parse_exponent(spec: &str) -> Result<Exponent> {
    Exponent::parse(spec)
}
