//! Table and JSON writers. Floats use Rust's shortest round-trip formatting.

use serde::Serialize;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use crate::args::Format;
use teig_core::dispersion::Dispersion;
use teig_core::spectra::{LatticeMatch, ZeroKind};
use teig_core::{ContourBox, EigenvalueRecord, C};

pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl From<&Option<PathBuf>> for Sink {
    fn from(p: &Option<PathBuf>) -> Self {
        match p {
            Some(p) => Sink::File(p.clone()),
            None => Sink::Stdout,
        }
    }
}

impl Sink {
    fn open(&self) -> io::Result<Box<dyn Write>> {
        Ok(match self {
            Sink::Stdout => Box::new(io::stdout().lock()),
            Sink::File(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        })
    }
}

/// Shortest round-trip text, switching to exponent form for extreme magnitudes.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

fn write_csv(sink: &Sink, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(sink.open()?);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()
}

pub fn write_json<T: Serialize>(sink: &Sink, value: &T) -> io::Result<()> {
    let mut w = sink.open()?;
    serde_json::to_writer_pretty(&mut w, value).map_err(io::Error::other)?;
    writeln!(w)?;
    w.flush()
}

pub fn kind_name(k: ZeroKind) -> &'static str {
    match k {
        ZeroKind::Origin => "origin",
        ZeroKind::RealPositive => "real_positive",
        ZeroKind::RealNegative => "real_negative",
        ZeroKind::ComplexPair => "complex_pair",
    }
}

#[derive(Serialize)]
struct RecordRow {
    re_lambda: f64,
    im_lambda: f64,
    multiplicity: u32,
    kind: ZeroKind,
    index_hint: Option<u32>,
    residual: f64,
}

pub fn write_records(sink: &Sink, format: Format, records: &[EigenvalueRecord]) -> io::Result<()> {
    match format {
        Format::Json => {
            let rows: Vec<RecordRow> = records
                .iter()
                .map(|r| RecordRow { re_lambda: r.lambda.re, im_lambda: r.lambda.im, multiplicity: r.multiplicity, kind: r.kind, index_hint: r.index_hint, residual: r.residual })
                .collect();
            write_json(sink, &rows)
        }
        Format::Csv => write_csv(
            sink,
            &["re_lambda", "im_lambda", "multiplicity", "kind", "index_hint", "residual"],
            records.iter().map(|r| {
                vec![
                    num(r.lambda.re),
                    num(r.lambda.im),
                    r.multiplicity.to_string(),
                    kind_name(r.kind).to_string(),
                    r.index_hint.map(|n| n.to_string()).unwrap_or_default(),
                    num(r.residual),
                ]
            }),
        ),
    }
}

/// `|D|` and `arg D` on an `n_re × n_im` grid spanning the region.
pub fn write_plot(path: &PathBuf, f: &dyn Dispersion<f64>, region: &ContourBox, n_re: usize, n_im: usize) -> io::Result<()> {
    let mut rows = Vec::with_capacity(n_re * n_im);
    for i in 0..n_im {
        let im = region.im_lo + (region.im_hi - region.im_lo) * i as f64 / (n_im - 1) as f64;
        for j in 0..n_re {
            let re = region.re_lo + (region.re_hi - region.re_lo) * j as f64 / (n_re - 1) as f64;
            let v = f.eval(C::new(re, im)).map_err(io::Error::other)?.value;
            rows.push(vec![num(re), num(im), num(v.norm()), num(v.arg())]);
        }
    }
    write_csv(&Sink::File(path.clone()), &["re", "im", "abs_D", "arg_D"], rows)
}

#[derive(Serialize)]
struct GridRow {
    grid: &'static str,
    n: usize,
    lambda: f64,
    re: f64,
    im: f64,
}

pub fn write_grid(sink: &Sink, format: Format, phi: &[(f64, C<f64>)], dphi: &[(f64, C<f64>)]) -> io::Result<()> {
    let rows: Vec<GridRow> = phi
        .iter()
        .enumerate()
        .map(|(i, (l, v))| GridRow { grid: "phi", n: i + 1, lambda: *l, re: v.re, im: v.im })
        .chain(dphi.iter().enumerate().map(|(i, (l, v))| GridRow { grid: "dphi", n: i + 1, lambda: *l, re: v.re, im: v.im }))
        .collect();
    match format {
        Format::Json => write_json(sink, &rows),
        Format::Csv => write_csv(
            sink,
            &["grid", "n", "lambda", "re", "im"],
            rows.iter().map(|r| vec![r.grid.to_string(), r.n.to_string(), num(r.lambda), num(r.re), num(r.im)]),
        ),
    }
}

#[derive(Serialize)]
struct LatticeRow {
    n: u32,
    lattice: f64,
    lambda: f64,
    multiplicity: u32,
    deviation: f64,
}

pub fn write_lattice(sink: &Sink, format: Format, rows: &[LatticeMatch<f64>]) -> io::Result<()> {
    let rows: Vec<LatticeRow> =
        rows.iter().map(|m| LatticeRow { n: m.n, lattice: m.lattice, lambda: m.zero.lambda.re, multiplicity: m.zero.multiplicity, deviation: m.deviation() }).collect();
    match format {
        Format::Json => write_json(sink, &rows),
        Format::Csv => write_csv(
            sink,
            &["n", "lattice", "lambda", "multiplicity", "deviation"],
            rows.iter().map(|r| vec![r.n.to_string(), num(r.lattice), num(r.lambda), r.multiplicity.to_string(), num(r.deviation)]),
        ),
    }
}
