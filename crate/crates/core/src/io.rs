//! Plain-text field files and CSV tables.
//!
//! A field file is a block of `# key = value` header lines followed by
//! `i,j,v1[,v2]` rows in row-major order (`j` outer). Floats use
//! `{:.16e}`, which round-trips every `f64`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, Grid, ScalarField, VectorField};
use crate::spin_energy::SpinField;

pub const FIELD_FORMAT: &str = "chiral-field-1";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Vector,
}

impl FieldKind {
    fn name(self) -> &'static str {
        match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Vector => "vector",
        }
    }
}

fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Periodic => "periodic",
        Boundary::Open => "open",
        Boundary::PeriodicY => "periodic_y",
    }
}

fn parse_boundary(s: &str) -> Result<Boundary> {
    match s {
        "periodic" => Ok(Boundary::Periodic),
        "open" => Ok(Boundary::Open),
        "periodic_y" => Ok(Boundary::PeriodicY),
        _ => Err(Error::Parse(format!("unknown boundary '{s}'"))),
    }
}

/// Field read back from a file, with its free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub grid: Grid,
    pub kind: FieldKind,
    pub meta: BTreeMap<String, String>,
    /// One entry per cell; scalars use only the first component.
    pub values: Vec<[f64; 2]>,
}

impl FieldFile {
    pub fn meta_f64(&self, key: &str) -> Result<Option<f64>> {
        self.meta
            .get(key)
            .map(|v| v.parse::<f64>().map_err(|e| Error::Parse(format!("{key}: {e}"))))
            .transpose()
    }

    pub fn into_spins(self) -> Result<SpinField> {
        if self.kind != FieldKind::Vector {
            return Err(Error::Parse("expected a vector field".into()));
        }
        SpinField::new(VectorField::from_values(self.grid, self.values)?)
    }

    pub fn into_scalar(self) -> Result<ScalarField> {
        if self.kind != FieldKind::Scalar {
            return Err(Error::Parse("expected a scalar field".into()));
        }
        ScalarField::from_values(self.grid, self.values.into_iter().map(|v| v[0]).collect())
    }
}

fn write_header<W: Write>(w: &mut W, grid: &Grid, kind: FieldKind, meta: &[(&str, String)]) -> std::io::Result<()> {
    writeln!(w, "# format = {FIELD_FORMAT}")?;
    writeln!(w, "# kind = {}", kind.name())?;
    writeln!(w, "# nx = {}", grid.nx())?;
    writeln!(w, "# ny = {}", grid.ny())?;
    writeln!(w, "# spacing = {}", fmt_f64(grid.spacing()))?;
    writeln!(w, "# boundary = {}", boundary_name(grid.boundary()))?;
    writeln!(w, "# origin = {},{}", grid.origin()[0], grid.origin()[1])?;
    for (k, v) in meta {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

pub fn write_vector_field<W: Write>(w: &mut W, f: &VectorField, meta: &[(&str, String)]) -> Result<()> {
    if f.rect() != f.grid().full_rect() {
        return Err(Error::Dimension("only whole-grid fields can be written".into()));
    }
    let io = |e: std::io::Error| Error::Parse(e.to_string());
    write_header(w, f.grid(), FieldKind::Vector, meta).map_err(io)?;
    writeln!(w, "i,j,v1,v2").map_err(io)?;
    for ((i, j), v) in f.iter() {
        writeln!(w, "{i},{j},{},{}", fmt_f64(v[0]), fmt_f64(v[1])).map_err(io)?;
    }
    Ok(())
}

pub fn write_scalar_field<W: Write>(w: &mut W, f: &ScalarField, meta: &[(&str, String)]) -> Result<()> {
    if f.rect() != f.grid().full_rect() {
        return Err(Error::Dimension("only whole-grid fields can be written".into()));
    }
    let io = |e: std::io::Error| Error::Parse(e.to_string());
    write_header(w, f.grid(), FieldKind::Scalar, meta).map_err(io)?;
    writeln!(w, "i,j,v1").map_err(io)?;
    for ((i, j), v) in f.iter() {
        writeln!(w, "{i},{j},{}", fmt_f64(v)).map_err(io)?;
    }
    Ok(())
}

pub fn read_field<R: BufRead>(r: R) -> Result<FieldFile> {
    let mut meta = BTreeMap::new();
    let mut values = Vec::new();
    let mut header_seen = false;
    let mut kind = None;
    let mut expected = (0usize, 0usize);
    let mut nx = 0usize;
    for (ln, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: malformed header", ln + 1)))?;
            meta.insert(k.trim().to_string(), v.trim().to_string());
            continue;
        }
        if !header_seen {
            let k = match meta.get("kind").map(String::as_str) {
                Some("scalar") => FieldKind::Scalar,
                Some("vector") => FieldKind::Vector,
                other => return Err(Error::Parse(format!("unknown field kind {other:?}"))),
            };
            let cols = if k == FieldKind::Scalar { "i,j,v1" } else { "i,j,v1,v2" };
            if line != cols {
                return Err(Error::Parse(format!("line {}: expected column header '{cols}'", ln + 1)));
            }
            nx = get_usize(&meta, "nx")?;
            kind = Some(k);
            header_seen = true;
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        let k = kind.expect("kind set with header");
        let width = if k == FieldKind::Scalar { 3 } else { 4 };
        if parts.len() != width {
            return Err(Error::Parse(format!("line {}: expected {width} columns", ln + 1)));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)));
        let idx = |s: &str| s.trim().parse::<usize>().map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)));
        let (i, j) = (idx(parts[0])?, idx(parts[1])?);
        if (i, j) != expected {
            return Err(Error::Parse(format!("line {}: cells out of order", ln + 1)));
        }
        expected = if i + 1 == nx { (0, j + 1) } else { (i + 1, j) };
        let v1 = num(parts[2])?;
        let v2 = if width == 4 { num(parts[3])? } else { 0.0 };
        values.push([v1, v2]);
    }
    let kind = kind.ok_or_else(|| Error::Parse("missing column header".into()))?;
    let ny = get_usize(&meta, "ny")?;
    let spacing: f64 = get(&meta, "spacing")?
        .parse()
        .map_err(|e| Error::Parse(format!("spacing: {e}")))?;
    let boundary = parse_boundary(get(&meta, "boundary")?)?;
    let origin = match meta.get("origin") {
        Some(o) => {
            let (a, b) = o.split_once(',').ok_or_else(|| Error::Parse("origin must be 'a,b'".into()))?;
            let p = |s: &str| s.trim().parse::<i64>().map_err(|e| Error::Parse(format!("origin: {e}")));
            [p(a)?, p(b)?]
        }
        None => [0, 0],
    };
    let grid = Grid::new(spacing, nx, ny, boundary)?.with_origin(origin);
    if values.len() != grid.cell_count() {
        return Err(Error::Parse(format!(
            "expected {} rows, found {}",
            grid.cell_count(),
            values.len()
        )));
    }
    for k in ["format", "kind", "nx", "ny", "spacing", "boundary", "origin"] {
        meta.remove(k);
    }
    Ok(FieldFile {
        grid,
        kind,
        meta,
        values,
    })
}

fn get<'a>(meta: &'a BTreeMap<String, String>, k: &str) -> Result<&'a str> {
    meta.get(k)
        .map(String::as_str)
        .ok_or_else(|| Error::Parse(format!("missing header key '{k}'")))
}

fn get_usize(meta: &BTreeMap<String, String>, k: &str) -> Result<usize> {
    get(meta, k)?
        .parse()
        .map_err(|e| Error::Parse(format!("{k}: {e}")))
}

/// CSV text with a header row.
pub fn csv_table<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}
