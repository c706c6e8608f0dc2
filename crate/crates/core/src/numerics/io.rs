//! Plain-text matrix export: a header line `y0 y1 ny z0 z1 nz`, then `ny`
//! rows of `nz` space-separated values.

use std::io::{BufRead, Write};
use std::str::FromStr;

use super::{Grid, NumericsError, Provenance, SolutionField};
use crate::Scalar;

pub fn write_matrix<F: Scalar, W: Write>(field: &SolutionField<F>, mut out: W) -> std::io::Result<()> {
    let g = &field.grid;
    writeln!(out, "{} {} {} {} {} {}", g.y.0, g.y.1, g.ny, g.z.0, g.z.1, g.nz)?;
    for i in 0..g.ny {
        let row: Vec<String> = (0..g.nz).map(|j| field.get(i, j).to_string()).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

fn num<T: FromStr>(tok: Option<&str>, what: &str) -> Result<T, NumericsError> {
    let tok = tok.ok_or_else(|| NumericsError::Format(format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| NumericsError::Format(format!("bad {what} `{tok}`")))
}

pub fn read_matrix<F: Scalar + FromStr, R: BufRead>(input: R) -> Result<SolutionField<F>, NumericsError> {
    let mut lines = input.lines().map(|l| l.map_err(|e| NumericsError::Format(e.to_string())));
    let header = lines
        .next()
        .ok_or_else(|| NumericsError::Format("empty input".into()))??;
    let mut h = header.split_whitespace();
    let y0: F = num(h.next(), "y0")?;
    let y1: F = num(h.next(), "y1")?;
    let ny: usize = num(h.next(), "ny")?;
    let z0: F = num(h.next(), "z0")?;
    let z1: F = num(h.next(), "z1")?;
    let nz: usize = num(h.next(), "nz")?;
    let grid = Grid::new((y0, y1), (z0, z1), ny, nz)?;
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..ny {
        let line = lines
            .next()
            .ok_or_else(|| NumericsError::Format(format!("missing row {i}")))??;
        let row: Vec<&str> = line.split_whitespace().collect();
        if row.len() != nz {
            return Err(NumericsError::Format(format!("row {i} has {} values, expected {nz}", row.len())));
        }
        for tok in row {
            values.push(num(Some(tok), "value")?);
        }
    }
    SolutionField::from_values(grid, values, Provenance::Imported)
}
