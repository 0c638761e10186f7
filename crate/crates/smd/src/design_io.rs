//! Design CSV files: header `slice,x1,...,xp`, 1-based slice labels.

use std::io::{Read, Write};
use std::path::Path;

use smd_core::{PointSet, SlicedDesign};

use crate::error::{CliError, Result};

/// `%.17g`: 17 significant digits, shortest of fixed or exponent notation,
/// trailing zeros removed. Lossless for every finite `f64`.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_design<W: Write>(design: &SlicedDesign, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let map = |e: csv::Error| CliError::Runtime(format!("writing design: {e}"));
    let mut header = vec!["slice".to_string()];
    header.extend((1..=design.dim()).map(|j| format!("x{j}")));
    w.write_record(&header).map_err(map)?;
    for (i, x) in design.points().iter().enumerate() {
        let mut row = vec![(design.labels()[i] + 1).to_string()];
        row.extend(x.iter().map(|&v| format_g17(v)));
        w.write_record(&row).map_err(map)?;
    }
    w.flush().map_err(|e| CliError::Runtime(format!("writing design: {e}")))?;
    Ok(())
}

pub fn write_design_file(design: &SlicedDesign, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_design(design, std::io::BufWriter::new(file))
}

/// Reads a design with `p` coordinates per row. Errors name the offending
/// line (the header is line 1).
pub fn read_design<R: Read>(input: R, p: usize, name: &Path) -> Result<SlicedDesign> {
    let err = |line: u64, message: String| CliError::Design {
        path: name.to_path_buf(),
        line,
        message,
    };
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let header = r.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let mut expected = vec!["slice".to_string()];
    expected.extend((1..=p).map(|j| format!("x{j}")));
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != expected {
        return Err(err(1, format!("expected header {}", expected.join(","))));
    }

    let mut points = PointSet::new(p);
    let mut labels = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |pos| pos.line());
            err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |pos| pos.line());
        if record.len() != p + 1 {
            return Err(err(
                line,
                format!("expected {} columns, found {}", p + 1, record.len()),
            ));
        }
        let slice: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| err(line, format!("invalid slice label {:?}", &record[0])))?;
        if slice == 0 {
            return Err(err(line, "slice labels start at 1".into()));
        }
        let mut x = Vec::with_capacity(p);
        for field in record.iter().skip(1) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| err(line, format!("invalid coordinate {field:?}")))?;
            if !v.is_finite() {
                return Err(err(line, format!("non-finite coordinate {field:?}")));
            }
            x.push(v);
        }
        points.push(&x)?;
        labels.push(slice - 1);
    }
    if labels.is_empty() {
        return Err(err(1, "design has no rows".into()));
    }
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    SlicedDesign::new(points, labels, k).map_err(|e| err(0, e.to_string()))
}

pub fn read_design_file(path: &Path, p: usize) -> Result<SlicedDesign> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_design(std::io::BufReader::new(file), p, path)
}
