//! File formats shared by the library and the command-line tool.
//!
//! | file            | layout                                      |
//! |-----------------|---------------------------------------------|
//! | dataset         | CSV `x0,...,x{m-1},y`                       |
//! | coefficient     | JSON `{kind, atoms, weights, values}`       |
//! | ensemble units  | CSV `run,unit,a0,...,b,c,final_loss`        |
//! | loss traces     | CSV `run,epoch,loss`                        |
//! | spectrum        | CSV `a,b,value`, a-major                    |
//! | spectrum binary | u64 na, u64 nb, then na·nb f64, all LE      |
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces the in-memory values exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{Coefficient, Dataset, MeasureKind, ParamMeasure, Unit};
use crate::error::{Error, Result};
use crate::experiments::{Normalization, Spectrum};
use crate::training::{EnsembleRun, EnsembleUnit};

fn parse_f64(field: &str, line: u64) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: '{field}' is not a number")))
}

fn parse_usize(field: &str, line: u64) -> Result<usize> {
    field.trim().parse().map_err(|_| {
        Error::Parse(format!(
            "line {line}: '{field}' is not a non-negative integer"
        ))
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    Ok(csv::Writer::from_path(path)?)
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?)
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

pub fn write_dataset_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header: Vec<String> = (0..ds.dim()).map(|d| format!("x{d}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for (x, y) in ds.samples() {
        w.write_record(x.iter().chain(std::iter::once(&y)).map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset_csv(path: &Path) -> Result<Dataset> {
    let mut r = csv_reader(path)?;
    let header = r.headers()?.clone();
    let cols = header.len();
    let expected_header = (0..cols.saturating_sub(1))
        .map(|d| format!("x{d}"))
        .chain(std::iter::once("y".to_string()));
    if cols < 2 || !header.iter().eq(expected_header) {
        return Err(Error::Parse(format!(
            "dataset header must be x0,...,x{{m-1}},y, got '{}'",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let dim = cols - 1;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = line_of(&rec);
        for (k, field) in rec.iter().enumerate() {
            let v = parse_f64(field, line)?;
            if k < dim {
                x.push(v);
            } else {
                y.push(v);
            }
        }
    }
    if y.is_empty() {
        return Err(Error::Empty("dataset file"));
    }
    Dataset::new(dim, x, y)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub kind: MeasureKind,
    /// One `[a..., b]` entry per atom.
    pub atoms: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
}

impl CoefficientFile {
    pub fn new(meas: &ParamMeasure, coeff: &Coefficient) -> Result<Self> {
        coeff.check_matches(meas)?;
        let atoms = (0..meas.len())
            .map(|k| {
                meas.a(k)
                    .iter()
                    .copied()
                    .chain(std::iter::once(meas.b(k)))
                    .collect()
            })
            .collect();
        Ok(Self {
            kind: meas.kind().clone(),
            atoms,
            weights: meas.weights().to_vec(),
            values: coeff.values().to_vec(),
        })
    }

    pub fn into_parts(self) -> Result<(ParamMeasure, Coefficient)> {
        let dim = self
            .atoms
            .first()
            .map(|a| a.len().saturating_sub(1))
            .ok_or(Error::Empty("coefficient file atoms"))?;
        let mut a = Vec::with_capacity(self.atoms.len() * dim);
        let mut b = Vec::with_capacity(self.atoms.len());
        for atom in &self.atoms {
            if atom.len() != dim + 1 || dim == 0 {
                return Err(Error::Parse(
                    "every atom must hold [a..., b] with the same dimension".into(),
                ));
            }
            a.extend_from_slice(&atom[..dim]);
            b.push(atom[dim]);
        }
        let meas = ParamMeasure::from_parts(dim, a, b, self.weights, self.kind)?;
        let coeff = Coefficient::new(self.values)?;
        coeff.check_matches(&meas)?;
        Ok((meas, coeff))
    }
}

pub fn write_coefficient_json(meas: &ParamMeasure, coeff: &Coefficient, path: &Path) -> Result<()> {
    let file = CoefficientFile::new(meas, coeff)?;
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &file)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_coefficient_json(path: &Path) -> Result<(ParamMeasure, Coefficient)> {
    let file: CoefficientFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    file.into_parts()
}

fn unit_header(dim: usize) -> Vec<String> {
    let mut h = vec!["run".to_string(), "unit".to_string()];
    h.extend((0..dim).map(|d| format!("a{d}")));
    h.extend(["b", "c", "final_loss"].map(String::from));
    h
}

pub fn write_units_csv(units: &[EnsembleUnit], dim: usize, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(unit_header(dim))?;
    for u in units {
        if u.unit.a.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: u.unit.a.len(),
            });
        }
        let mut rec = vec![u.run.to_string(), u.index.to_string()];
        rec.extend(u.unit.a.iter().map(|v| v.to_string()));
        rec.extend([u.unit.b, u.unit.c, u.final_loss].map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_units_csv(path: &Path) -> Result<Vec<EnsembleUnit>> {
    let mut r = csv_reader(path)?;
    let header = r.headers()?.clone();
    let dim = header.len().saturating_sub(5);
    if dim == 0
        || !header
            .iter()
            .eq(unit_header(dim).iter().map(String::as_str))
    {
        return Err(Error::Parse(format!(
            "unit header must be run,unit,a0,...,b,c,final_loss, got '{}'",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut units = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let num = |k: usize| parse_f64(&rec[k], line);
        let a = (0..dim).map(|d| num(2 + d)).collect::<Result<Vec<_>>>()?;
        units.push(EnsembleUnit {
            run: parse_usize(&rec[0], line)?,
            index: parse_usize(&rec[1], line)?,
            unit: Unit {
                a,
                b: num(2 + dim)?,
                c: num(3 + dim)?,
            },
            final_loss: num(4 + dim)?,
        });
    }
    Ok(units)
}

pub fn write_traces_csv(runs: &[EnsembleRun], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["run", "epoch", "loss"])?;
    for r in runs {
        for (epoch, loss) in r.trace.iter().enumerate() {
            w.write_record([r.run.to_string(), epoch.to_string(), loss.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_spectrum_csv(spec: &Spectrum, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["a", "b", "value"])?;
    for (ia, a) in spec.a_grid().iter().enumerate() {
        for (ib, b) in spec.b_grid().iter().enumerate() {
            w.write_record([a.to_string(), b.to_string(), spec.get(ia, ib).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads an a-major `a,b,value` file. The grids are recovered from the
/// first run of b values and the distinct a values; the result is tagged
/// `MaxAbsOne` when max |value| is exactly 1.
pub fn read_spectrum_csv(path: &Path) -> Result<Spectrum> {
    let mut r = csv_reader(path)?;
    let header = r.headers()?.clone();
    if !header.iter().eq(["a", "b", "value"]) {
        return Err(Error::Parse("spectrum header must be a,b,value".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = line_of(&rec);
        if rec.len() != 3 {
            return Err(Error::Parse(format!("line {line}: expected 3 fields")));
        }
        rows.push((
            parse_f64(&rec[0], line)?,
            parse_f64(&rec[1], line)?,
            parse_f64(&rec[2], line)?,
        ));
    }
    let first_a = rows.first().ok_or(Error::Empty("spectrum file"))?.0;
    let b_grid: Vec<f64> = rows
        .iter()
        .take_while(|r| r.0 == first_a)
        .map(|r| r.1)
        .collect();
    let nb = b_grid.len();
    if rows.len() % nb != 0 {
        return Err(Error::GridMismatch(
            "spectrum rows do not form a full grid".into(),
        ));
    }
    let mut a_grid = Vec::with_capacity(rows.len() / nb);
    for (k, row) in rows.chunks_exact(nb).enumerate() {
        let a = row[0].0;
        if row.iter().any(|r| r.0 != a) || row.iter().map(|r| r.1).ne(b_grid.iter().copied()) {
            return Err(Error::GridMismatch(format!(
                "spectrum block {k} is not a-major on a shared b grid"
            )));
        }
        a_grid.push(a);
    }
    let values: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let spec = Spectrum::new(a_grid, b_grid, values, Normalization::RawSum)?;
    if spec.max_abs() == 1.0 {
        Ok(spec.normalized())
    } else {
        Ok(spec)
    }
}

/// Row-major f64 matrix with a (rows, cols) u64 header, little-endian.
pub fn write_matrix_binary(rows: usize, cols: usize, values: &[f64], path: &Path) -> Result<()> {
    if values.len() != rows * cols {
        return Err(Error::length("matrix values", rows * cols, values.len()));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(rows as u64).to_le_bytes())?;
    w.write_all(&(cols as u64).to_le_bytes())?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_binary(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.len() < 16 {
        return Err(Error::Parse("binary matrix is missing its header".into()));
    }
    let word = |k: usize| u64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().expect("8 bytes"));
    let (rows, cols) = (word(0) as usize, word(1) as usize);
    let body = &bytes[16..];
    if rows.checked_mul(cols).and_then(|n| n.checked_mul(8)) != Some(body.len()) {
        return Err(Error::Parse(format!(
            "binary matrix body has {} bytes, expected {rows}x{cols} f64",
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((rows, cols, values))
}

pub fn write_spectrum_binary(spec: &Spectrum, path: &Path) -> Result<()> {
    write_matrix_binary(
        spec.a_grid().len(),
        spec.b_grid().len(),
        spec.values(),
        path,
    )
}

/// `x,fit` rows.
pub fn write_fit_csv(x: &[f64], fit: &[f64], path: &Path) -> Result<()> {
    if x.len() != fit.len() {
        return Err(Error::length("fitted values", x.len(), fit.len()));
    }
    let mut w = csv_writer(path)?;
    w.write_record(["x", "fit"])?;
    for (x, f) in x.iter().zip(fit) {
        w.write_record([x.to_string(), f.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
