//! The `OWTF1` binary array format.
//!
//! Layout: magic bytes `O W T F 0x01`, an unsigned 32-bit little-endian rank,
//! `rank` unsigned 32-bit little-endian dimensions, then the values row-major
//! as IEEE-754 little-endian f64 pairs (real part, imaginary part).
//!
//! Rank 1 holds signals, rank 2 holds phase fields, operators and weight
//! grids, rank 3 holds vector fields.

use num_complex::Complex64;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{PhaseField, PhaseGrid, WeightGrid, WeightKind};
use crate::opwindow::{OperatorMatrix, VectorField};
use crate::tfshift::Signal;

pub const MAGIC: [u8; 5] = *b"OWTF\x01";

/// Element cap to keep bogus headers from allocating unbounded memory.
const MAX_ELEMENTS: u64 = 1 << 26;

pub fn write_array(writer: &mut impl Write, dims: &[u32], values: &[Complex64]) -> Result<()> {
    let expected: u64 = dims.iter().map(|&d| d as u64).product();
    if expected != values.len() as u64 {
        return Err(Error::DimensionMismatch(format!(
            "dims {:?} describe {} values, got {}",
            dims,
            expected,
            values.len()
        )));
    }
    writer.write_all(&MAGIC)?;
    writer.write_all(&(dims.len() as u32).to_le_bytes())?;
    for &d in dims {
        writer.write_all(&d.to_le_bytes())?;
    }
    for v in values {
        writer.write_all(&v.re.to_le_bytes())?;
        writer.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_array(reader: &mut impl Read) -> Result<(Vec<u32>, Vec<Complex64>)> {
    let mut magic = [0u8; 5];
    reader.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(Error::BadFormat(format!(
            "bad magic {magic:02x?}, expected {MAGIC:02x?}"
        )));
    }
    let mut word = [0u8; 4];
    reader.read_exact(&mut word)?;
    let rank = u32::from_le_bytes(word);
    if rank == 0 || rank > 3 {
        return Err(Error::BadFormat(format!("unsupported rank {rank}")));
    }
    let mut dims = Vec::with_capacity(rank as usize);
    for _ in 0..rank {
        reader.read_exact(&mut word)?;
        let d = u32::from_le_bytes(word);
        if d == 0 {
            return Err(Error::BadFormat("zero dimension".into()));
        }
        dims.push(d);
    }
    let count: u64 = dims.iter().map(|&d| d as u64).product();
    if count > MAX_ELEMENTS {
        return Err(Error::BadFormat(format!(
            "array too large: {count} elements"
        )));
    }
    let mut values = Vec::with_capacity(count as usize);
    let mut pair = [0u8; 16];
    for _ in 0..count {
        reader.read_exact(&mut pair)?;
        let re = f64::from_le_bytes(pair[0..8].try_into().expect("slice of 8"));
        let im = f64::from_le_bytes(pair[8..16].try_into().expect("slice of 8"));
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::BadFormat("non-finite value".into()));
        }
        values.push(Complex64::new(re, im));
    }
    Ok((dims, values))
}

fn square_grid(dims: &[u32], what: &str) -> Result<PhaseGrid> {
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::BadFormat(format!(
            "{what} needs a square rank-2 array, got dims {dims:?}"
        )));
    }
    PhaseGrid::new(dims[0] as usize)
}

pub fn write_signal(writer: &mut impl Write, signal: &Signal) -> Result<()> {
    write_array(writer, &[signal.grid().side() as u32], signal.values())
}

pub fn read_signal(reader: &mut impl Read) -> Result<Signal> {
    let (dims, values) = read_array(reader)?;
    if dims.len() != 1 {
        return Err(Error::BadFormat(format!(
            "signal needs a rank-1 array, got dims {dims:?}"
        )));
    }
    Signal::new(PhaseGrid::new(dims[0] as usize)?, values)
}

pub fn write_field(writer: &mut impl Write, field: &PhaseField) -> Result<()> {
    let n = field.grid().side() as u32;
    write_array(writer, &[n, n], field.values())
}

pub fn read_field(reader: &mut impl Read) -> Result<PhaseField> {
    let (dims, values) = read_array(reader)?;
    PhaseField::new(square_grid(&dims, "phase field")?, values)
}

pub fn write_operator(writer: &mut impl Write, op: &OperatorMatrix) -> Result<()> {
    let n = op.grid().side() as u32;
    write_array(writer, &[n, n], op.entries())
}

pub fn read_operator(reader: &mut impl Read) -> Result<OperatorMatrix> {
    let (dims, values) = read_array(reader)?;
    OperatorMatrix::new(square_grid(&dims, "operator")?, values)
}

pub fn write_weight(writer: &mut impl Write, weight: &WeightGrid) -> Result<()> {
    let n = weight.grid().side() as u32;
    let values: Vec<Complex64> = weight
        .values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    write_array(writer, &[n, n], &values)
}

/// Weight grids are stored as complex arrays with vanishing imaginary part;
/// positivity and (for submultiplicative candidates) symmetry are validated
/// on load.
pub fn read_weight(reader: &mut impl Read, kind: WeightKind, label: &str) -> Result<WeightGrid> {
    let (dims, values) = read_array(reader)?;
    let grid = square_grid(&dims, "weight grid")?;
    let mut real = Vec::with_capacity(values.len());
    for v in &values {
        if v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
            return Err(Error::BadFormat("weight grid has a non-real value".into()));
        }
        real.push(v.re);
    }
    WeightGrid::new(grid, real, kind, label)
}

pub fn write_vector_field(writer: &mut impl Write, field: &VectorField) -> Result<()> {
    let n = field.grid().side() as u32;
    write_array(writer, &[n, n, n], field.values())
}

pub fn read_vector_field(reader: &mut impl Read) -> Result<VectorField> {
    let (dims, values) = read_array(reader)?;
    if dims.len() != 3 || dims[0] != dims[1] || dims[1] != dims[2] {
        return Err(Error::BadFormat(format!(
            "vector field needs a cubic rank-3 array, got dims {dims:?}"
        )));
    }
    VectorField::new(PhaseGrid::new(dims[0] as usize)?, values)
}

pub fn save_signal(path: impl AsRef<Path>, signal: &Signal) -> Result<()> {
    write_signal(&mut BufWriter::new(File::create(path)?), signal)
}

pub fn load_signal(path: impl AsRef<Path>) -> Result<Signal> {
    read_signal(&mut BufReader::new(File::open(path)?))
}

pub fn save_field(path: impl AsRef<Path>, field: &PhaseField) -> Result<()> {
    write_field(&mut BufWriter::new(File::create(path)?), field)
}

pub fn load_field(path: impl AsRef<Path>) -> Result<PhaseField> {
    read_field(&mut BufReader::new(File::open(path)?))
}

pub fn save_operator(path: impl AsRef<Path>, op: &OperatorMatrix) -> Result<()> {
    write_operator(&mut BufWriter::new(File::create(path)?), op)
}

pub fn load_operator(path: impl AsRef<Path>) -> Result<OperatorMatrix> {
    read_operator(&mut BufReader::new(File::open(path)?))
}

pub fn save_weight(path: impl AsRef<Path>, weight: &WeightGrid) -> Result<()> {
    write_weight(&mut BufWriter::new(File::create(path)?), weight)
}

pub fn load_weight(path: impl AsRef<Path>, kind: WeightKind) -> Result<WeightGrid> {
    let label = format!("file:{}", path.as_ref().display());
    read_weight(&mut BufReader::new(File::open(path)?), kind, &label)
}

pub fn save_vector_field(path: impl AsRef<Path>, field: &VectorField) -> Result<()> {
    write_vector_field(&mut BufWriter::new(File::create(path)?), field)
}

pub fn load_vector_field(path: impl AsRef<Path>) -> Result<VectorField> {
    read_vector_field(&mut BufReader::new(File::open(path)?))
}
