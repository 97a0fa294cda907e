//! Dataset CSV files.
//!
//! ```text
//! # generator: sinusoid1d
//! # seed: 7
//! # domain: 0.0000000000000000e0 2.0000000000000000e0
//! x1,f1,f2,f3
//! 1.2500000000000000e-1,...
//! ```
//!
//! The header names `d` point columns `x1..xd` followed by `m` value columns
//! `f1..fm`. Lines starting with `#` are comments; the writer uses `key: value`
//! comments for provenance and the domain box (`lo hi` per dimension). Without
//! a `domain` comment the bounding box of the points is used. Value rows are
//! sorted on load.

use std::fs;
use std::io::Write;
use std::path::Path;

use multisurf_core::{DomainBox, MultiSurfaceDataset, Provenance};

use crate::error::{Error, Result};

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn header(d: usize, m: usize) -> Vec<String> {
    (1..=d).map(|i| format!("x{i}")).chain((1..=m).map(|i| format!("f{i}"))).collect()
}

/// Splits a header into point and value column counts.
fn parse_header(fields: &csv::StringRecord, line: u64, values_required: bool) -> Result<(usize, usize)> {
    let bad = |msg: String| Error::Parse { line, msg };
    let d = fields.iter().take_while(|f| f.starts_with('x')).count();
    let m = fields.len() - d;
    if d == 0 {
        return Err(bad("header needs at least one x column".into()));
    }
    if values_required && m == 0 {
        return Err(bad("header needs at least one f column".into()));
    }
    if fields.iter().collect::<Vec<_>>() != header(d, m) {
        return Err(bad(format!("expected header {}", header(d, m).join(","))));
    }
    Ok((d, m))
}

struct Parsed {
    d: usize,
    m: usize,
    cells: Vec<f64>,
    /// `(line, key, value)` of every `# key: value` comment.
    meta: Vec<(u64, String, String)>,
}

fn parse(text: &str, values_required: bool) -> Result<Parsed> {
    let meta = text
        .lines()
        .zip(1u64..)
        .filter_map(|(l, n)| Some((n, l.strip_prefix('#')?.split_once(':')?)))
        .map(|(n, (k, v))| (n, k.trim().to_string(), v.trim().to_string()))
        .collect();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line());
        Error::Parse { line, msg: e.to_string() }
    };
    let head = rdr.headers().map_err(csv_err)?.clone();
    let head_line = head.position().map_or(1, |p| p.line());
    let (d, m) = parse_header(&head, head_line, values_required)?;
    let mut cells = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != d + m {
            return Err(Error::Parse { line, msg: format!("expected {} fields, found {}", d + m, rec.len()) });
        }
        for field in rec.iter() {
            let v: f64 = field.parse().map_err(|_| Error::Parse { line, msg: format!("not a number: `{field}`") })?;
            cells.push(v);
        }
    }
    Ok(Parsed { d, m, cells, meta })
}

fn get<'a>(meta: &'a [(u64, String, String)], key: &str) -> Option<(u64, &'a str)> {
    meta.iter().find(|(_, k, _)| k == key).map(|(n, _, v)| (*n, v.as_str()))
}

fn parse_domain((line, spec): (u64, &str), d: usize) -> Result<DomainBox> {
    let nums: Vec<f64> = spec
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse { line, msg: format!("bad domain entry `{t}`") }))
        .collect::<Result<_>>()?;
    if nums.len() != 2 * d {
        return Err(Error::DimensionMismatch { expected: 2 * d, found: nums.len() });
    }
    let bounds: Vec<(f64, f64)> = nums.chunks(2).map(|c| (c[0], c[1])).collect();
    DomainBox::new(&bounds).map_err(Error::Data)
}

fn bounding_box(points: &[f64], d: usize) -> Result<DomainBox> {
    let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
    for p in points.chunks_exact(d) {
        for (b, &x) in bounds.iter_mut().zip(p) {
            *b = (b.0.min(x), b.1.max(x));
        }
    }
    DomainBox::new(&bounds).map_err(Error::Data)
}

/// Parses dataset CSV text.
pub fn read_dataset(text: &str) -> Result<MultiSurfaceDataset> {
    let p = parse(text, true)?;
    let (d, m) = (p.d, p.m);
    let mut points = Vec::with_capacity(p.cells.len() / (d + m) * d);
    let mut values = Vec::with_capacity(p.cells.len() / (d + m) * m);
    for row in p.cells.chunks_exact(d + m) {
        points.extend_from_slice(&row[..d]);
        values.extend_from_slice(&row[d..]);
    }
    let domain = match get(&p.meta, "domain") {
        Some(s) => parse_domain(s, d)?,
        None => bounding_box(&points, d)?,
    };
    let provenance = Provenance {
        generator: get(&p.meta, "generator").map_or("", |g| g.1).to_string(),
        seed: get(&p.meta, "seed").and_then(|s| s.1.parse().ok()),
        noise: get(&p.meta, "noise").and_then(|s| s.1.parse().ok()).unwrap_or(0.0),
        notes: get(&p.meta, "notes").map_or("", |g| g.1).to_string(),
    };
    let ds = MultiSurfaceDataset::new(points, values, m, domain, provenance).map_err(Error::Data)?;
    if ds.resorted_rows() > 0 {
        log::warn!("{} rows had non-ascending values and were sorted", ds.resorted_rows());
    }
    Ok(ds)
}

pub fn load_csv(path: &Path) -> Result<MultiSurfaceDataset> {
    read_dataset(&fs::read_to_string(path).map_err(Error::io(path))?)
}

/// Reads only the point columns of a CSV whose header starts with
/// `x1..xd`; value columns, if any, are ignored.
pub fn read_points(text: &str, d: usize) -> Result<Vec<f64>> {
    let p = parse(text, false)?;
    if p.d != d {
        return Err(Error::DimensionMismatch { expected: d, found: p.d });
    }
    Ok(p.cells.chunks_exact(p.d + p.m).flat_map(|r| r[..d].to_vec()).collect())
}

pub fn load_points(path: &Path, d: usize) -> Result<Vec<f64>> {
    read_points(&fs::read_to_string(path).map_err(Error::io(path))?, d)
}

/// Writes `points` with the row-major `values` (`m` per point) in dataset
/// format, with optional `key: value` comment lines first. `m` must be
/// positive.
pub fn write_table<W: Write>(w: W, d: usize, m: usize, points: &[f64], values: &[f64], comments: &[(&str, String)]) -> Result<()> {
    let mut w = w;
    let io = Error::io("<output>");
    let mut buf = String::new();
    for (k, v) in comments {
        buf.push_str(&format!("# {k}: {v}\n"));
    }
    w.write_all(buf.as_bytes()).map_err(io)?;
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    let to_err = |e: csv::Error| Error::Io { path: "<output>".into(), source: e.into() };
    wtr.write_record(header(d, m)).map_err(to_err)?;
    for (p, v) in points.chunks_exact(d).zip(values.chunks_exact(m)) {
        wtr.write_record(p.iter().chain(v).map(|&x| fmt_f64(x))).map_err(to_err)?;
    }
    wtr.flush().map_err(Error::io("<output>"))
}

/// Serializes a dataset with its provenance and domain as comments.
pub fn write_dataset<W: Write>(w: W, ds: &MultiSurfaceDataset) -> Result<()> {
    let dom = ds.domain();
    let domain = dom.lo().iter().zip(dom.hi()).map(|(l, h)| format!("{} {}", fmt_f64(*l), fmt_f64(*h))).collect::<Vec<_>>().join(" ");
    let prov = &ds.provenance;
    let mut comments = Vec::new();
    if !prov.generator.is_empty() {
        comments.push(("generator", prov.generator.clone()));
    }
    if let Some(seed) = prov.seed {
        comments.push(("seed", seed.to_string()));
    }
    comments.push(("noise", fmt_f64(prov.noise)));
    if !prov.notes.is_empty() {
        comments.push(("notes", prov.notes.replace('\n', " ")));
    }
    comments.push(("domain", domain));
    write_table(w, ds.dims(), ds.surfaces(), ds.points(), ds.values(), &comments)
}

pub fn save_csv(path: &Path, ds: &MultiSurfaceDataset) -> Result<()> {
    let mut buf = Vec::new();
    write_dataset(&mut buf, ds)?;
    fs::write(path, buf).map_err(Error::io(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_sorts() {
        let text = "# generator: toy\n# seed: 3\nx1,f1,f2\n0.5,2,1\n# trailing\n1.0,0,1\n";
        let ds = read_dataset(text).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.row(0), &[1.0, 2.0]);
        assert_eq!(ds.resorted_rows(), 1);
        assert_eq!(ds.provenance.generator, "toy");
        assert_eq!(ds.provenance.seed, Some(3));
        assert_eq!(ds.domain().lo(), &[0.5]);
        assert_eq!(ds.domain().hi(), &[1.0]);
    }

    #[test]
    fn parse_error_line_numbers() {
        let err = read_dataset("# c\nx1,f1\n0.0,1.0\n0.5,abc\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        let err = read_dataset("x1,f1\n0.0,1.0\n0.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = read_dataset("x1,g1\n0.0,1.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        assert!(matches!(read_dataset("x1,x2\n0,1\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn domain_comment_is_checked() {
        let err = read_dataset("# domain: 0 1 0 1\nx1,f1\n0.5,1\n").unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 4 }));
        let err = read_dataset("# domain: 0 1\nx1,f1\n1.5,1\n").unwrap_err();
        assert!(matches!(err, Error::Data(_)));
    }

    #[test]
    fn points_ignore_value_columns() {
        assert_eq!(read_points("x1,x2,f1\n1,2,3\n4,5,6\n", 2).unwrap(), vec![1.0, 2.0, 4.0, 5.0]);
        assert_eq!(read_points("x1\n1\n", 1).unwrap(), vec![1.0]);
        assert!(matches!(read_points("x1\n1\n", 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn formatting_has_17_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
