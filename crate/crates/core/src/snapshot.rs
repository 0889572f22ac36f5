//! Flat binary snapshot files, one state per file.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic      8 bytes   "QHDSNAP\0"
//! version    u32       1
//! dim        u32
//! n          u32       points per axis
//! length     f64       domain extent L
//! time       f64
//! n_fields   u32
//! names      n_fields x { u16 byte length, UTF-8 bytes }
//! payload    n_fields x n^dim f64 values, row-major
//! ```
//!
//! Fields are written in the order `rho`, `u0`..`u{dim-1}`, `theta`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{QhdError, Result};
use crate::field::ScalarField;
use crate::grid::make_grid;
use crate::scalar::Scalar;
use crate::state::State;

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"QHDSNAP\0";
pub const SNAPSHOT_VERSION: u32 = 1;

pub fn write_snapshot<T: Scalar>(path: &Path, state: &State<T>) -> Result<()> {
    let grid = state.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.points_per_axis() as u32).to_le_bytes())?;
    w.write_all(&grid.length().as_f64().to_le_bytes())?;
    w.write_all(&state.time.as_f64().to_le_bytes())?;

    let mut names: Vec<String> = vec!["rho".into()];
    for j in 0..grid.dim() {
        names.push(format!("u{j}"));
    }
    names.push("theta".into());
    w.write_all(&(names.len() as u32).to_le_bytes())?;
    for name in &names {
        let bytes = name.as_bytes();
        w.write_all(&(bytes.len() as u16).to_le_bytes())?;
        w.write_all(bytes)?;
    }

    let mut write_field = |f: &ScalarField<T>| -> Result<()> {
        for v in f.data() {
            w.write_all(&v.as_f64().to_le_bytes())?;
        }
        Ok(())
    };
    write_field(&state.rho)?;
    for j in 0..grid.dim() {
        write_field(state.u.component(j))?;
    }
    write_field(&state.theta)?;
    Ok(())
}

pub fn read_snapshot<T: Scalar>(path: &Path) -> Result<State<T>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(QhdError::BadSnapshot(format!(
            "{}: bad magic",
            path.display()
        )));
    }
    let version = read_u32(&mut r)?;
    if version != SNAPSHOT_VERSION {
        return Err(QhdError::BadSnapshot(format!(
            "{}: unsupported version {version}",
            path.display()
        )));
    }
    let dim = read_u32(&mut r)? as usize;
    let n = read_u32(&mut r)? as usize;
    let length = read_f64(&mut r)?;
    let time = read_f64(&mut r)?;
    let n_fields = read_u32(&mut r)? as usize;
    if n_fields != dim + 2 {
        return Err(QhdError::BadSnapshot(format!(
            "{}: expected {} fields, found {n_fields}",
            path.display(),
            dim + 2
        )));
    }
    let mut names = Vec::with_capacity(n_fields);
    for _ in 0..n_fields {
        let len = read_u16(&mut r)? as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf)?;
        names.push(String::from_utf8(buf).map_err(|_| {
            QhdError::BadSnapshot(format!("{}: non-UTF8 field name", path.display()))
        })?);
    }

    let grid = make_grid::<T>(dim, T::lit(length), n)?;
    let total = grid.num_points();
    let read_field = |r: &mut BufReader<File>| -> Result<ScalarField<T>> {
        let mut data = Vec::with_capacity(total);
        for _ in 0..total {
            data.push(T::lit(read_f64(r)?));
        }
        ScalarField::from_data(&grid, data)
    };

    let mut state = State::zero(&grid);
    state.time = T::lit(time);
    for name in &names {
        let field = read_field(&mut r)?;
        match name.as_str() {
            "rho" => state.rho = field,
            "theta" => state.theta = field,
            other => {
                let j: usize = other
                    .strip_prefix('u')
                    .and_then(|s| s.parse().ok())
                    .filter(|&j| j < dim)
                    .ok_or_else(|| {
                        QhdError::BadSnapshot(format!(
                            "{}: unknown field `{other}`",
                            path.display()
                        ))
                    })?;
                *state.u.component_mut(j) = field;
            }
        }
    }
    if !state.is_finite() {
        return Err(QhdError::NonFinite("snapshot payload"));
    }
    Ok(state)
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u16(r: &mut impl Read) -> Result<u16> {
    let mut b = [0u8; 2];
    r.read_exact(&mut b)?;
    Ok(u16::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
