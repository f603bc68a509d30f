//! `cgrid v1` text format: a header line `cgrid v1 <n> <L>` followed by
//! `n²` lines `<re> <im>` in storage order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{ComplexField, GridSpec};
use crate::error::{Error, Result};

pub fn write_cgrid<W: Write>(f: &ComplexField, mut w: W) -> Result<()> {
    let spec = f.spec();
    writeln!(w, "cgrid v1 {} {:e}", spec.n(), spec.half_width())?;
    for c in f.as_slice() {
        writeln!(w, "{:.16e} {:.16e}", c.re, c.im)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_f64(tok: Option<&str>, line: usize) -> Result<f64> {
    let tok = tok.ok_or_else(|| Error::Parse(format!("line {line}: missing value")))?;
    tok.parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad number `{tok}`")))
}

pub fn read_cgrid<R: BufRead>(r: R) -> Result<ComplexField> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty file".into()))??;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("cgrid") || toks.next() != Some("v1") {
        return Err(Error::Parse("missing `cgrid v1` header".into()));
    }
    let n: usize = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse("bad grid size in header".into()))?;
    let l = parse_f64(toks.next(), 1)?;
    let spec = GridSpec::new(n, l)?;

    let mut data = Vec::with_capacity(spec.len());
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut t = line.split_whitespace();
        let re = parse_f64(t.next(), i + 2)?;
        let im = parse_f64(t.next(), i + 2)?;
        data.push(Complex64::new(re, im));
    }
    if data.len() != spec.len() {
        return Err(Error::Parse(format!(
            "expected {} samples, found {}",
            spec.len(),
            data.len()
        )));
    }
    ComplexField::new(spec, data)
}

pub fn save_cgrid(f: &ComplexField, path: impl AsRef<Path>) -> Result<()> {
    write_cgrid(f, BufWriter::new(File::create(path)?))
}

pub fn load_cgrid(path: impl AsRef<Path>) -> Result<ComplexField> {
    read_cgrid(BufReader::new(File::open(path)?))
}
