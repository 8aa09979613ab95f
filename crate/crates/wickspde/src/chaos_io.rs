//! Chaos-field files.
//!
//! A text header is followed by one record per stored coefficient:
//!
//! ```text
//! wickspde-chaos 1
//! kind real-grid
//! basis gaussian-hermite
//! index-set K=3 N=3
//! grid space:256:20:-10
//! records 2
//! index ()
//! nodes 256
//! <256 little-endian f64>
//! index (0,1)
//! ...
//! ```
//!
//! Scalar payloads are decimal text on the `index` line (`re im` when
//! complex). Complex grid payloads interleave real and imaginary parts.
//! Decimal output uses the shortest round-trip form, so files re-read
//! bit-identically.

use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;
use wickspde_core::chaos::{BasisTag, ChaosField, Coefficient, CoefficientKind};
use wickspde_core::grid::{Axis, AxisRole, GridFunction, GridSpec};
use wickspde_core::multiindex::{IndexSet, MultiIndex};

const MAGIC: &str = "wickspde-chaos 1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed chaos file: {0}")]
    Malformed(String),
    #[error("file holds {found} coefficients, expected {expected}")]
    WrongKind { found: &'static str, expected: &'static str },
    #[error(transparent)]
    Core(#[from] wickspde_core::Error),
}

fn malformed(msg: impl Into<String>) -> FormatError {
    FormatError::Malformed(msg.into())
}

pub fn format_grid(g: &GridSpec) -> String {
    g.axes()
        .iter()
        .map(|a| {
            let role = if a.role == AxisRole::Time { "time" } else { "space" };
            format!("{role}:{}:{}:{}", a.nodes, a.length, a.origin)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_grid(s: &str) -> Result<GridSpec, FormatError> {
    let axes = s
        .split_whitespace()
        .map(|tok| {
            let p: Vec<&str> = tok.split(':').collect();
            if p.len() != 4 {
                return Err(malformed(format!("bad axis {tok:?}")));
            }
            let nodes = p[1].parse().map_err(|_| malformed(format!("bad node count in {tok:?}")))?;
            let length = p[2].parse().map_err(|_| malformed(format!("bad length in {tok:?}")))?;
            let origin = p[3].parse().map_err(|_| malformed(format!("bad origin in {tok:?}")))?;
            let axis = match p[0] {
                "space" => Axis::space(nodes, length),
                "time" => Axis::time(nodes, length),
                r => return Err(malformed(format!("bad axis role {r:?}"))),
            };
            Ok(axis.with_origin(origin))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GridSpec::new(&axes)?)
}

/// Coefficient types with a file representation.
pub trait Persist: Coefficient + Sized {
    fn write_space(space: &Self::Space, out: &mut dyn Write) -> std::io::Result<()>;
    fn read_space(line: Option<&str>) -> Result<Self::Space, FormatError>;
    fn write_record(&self, alpha: &MultiIndex, out: &mut dyn Write) -> std::io::Result<()>;
    fn read_record(rest: &str, space: &Self::Space, input: &mut dyn BufRead) -> Result<Self, FormatError>;
}

fn scalar_space(line: Option<&str>) -> Result<(), FormatError> {
    match line {
        None => Ok(()),
        Some(l) => Err(malformed(format!("scalar field with a grid line {l:?}"))),
    }
}

impl Persist for f64 {
    fn write_space(_: &(), _: &mut dyn Write) -> std::io::Result<()> {
        Ok(())
    }
    fn read_space(line: Option<&str>) -> Result<(), FormatError> {
        scalar_space(line)
    }
    fn write_record(&self, alpha: &MultiIndex, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "index {alpha} {self:?}")
    }
    fn read_record(rest: &str, _: &(), _: &mut dyn BufRead) -> Result<Self, FormatError> {
        rest.trim().parse().map_err(|_| malformed(format!("bad scalar {rest:?}")))
    }
}

impl Persist for Complex64 {
    fn write_space(_: &(), _: &mut dyn Write) -> std::io::Result<()> {
        Ok(())
    }
    fn read_space(line: Option<&str>) -> Result<(), FormatError> {
        scalar_space(line)
    }
    fn write_record(&self, alpha: &MultiIndex, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "index {alpha} {:?} {:?}", self.re, self.im)
    }
    fn read_record(rest: &str, _: &(), _: &mut dyn BufRead) -> Result<Self, FormatError> {
        let mut it = rest.split_whitespace().map(str::parse::<f64>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(re)), Some(Ok(im)), None) => Ok(Complex64::new(re, im)),
            _ => Err(malformed(format!("bad complex scalar {rest:?}"))),
        }
    }
}

fn write_grid_header(g: &GridSpec, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "grid {}", format_grid(g))
}

fn read_grid_header(line: Option<&str>) -> Result<GridSpec, FormatError> {
    parse_grid(line.ok_or_else(|| malformed("grid-valued field without a grid line"))?)
}

fn read_floats(rest: &str, grid: &GridSpec, per_node: usize, input: &mut dyn BufRead) -> Result<Vec<f64>, FormatError> {
    if !rest.trim().is_empty() {
        return Err(malformed(format!("unexpected text after a grid index: {rest:?}")));
    }
    let nodes_line = read_line(input)?.ok_or_else(|| malformed("missing nodes line"))?;
    let nodes: usize = nodes_line
        .strip_prefix("nodes ")
        .and_then(|n| n.trim().parse().ok())
        .ok_or_else(|| malformed(format!("bad nodes line {nodes_line:?}")))?;
    if nodes != grid.len() {
        return Err(malformed(format!("record declares {nodes} nodes, grid has {}", grid.len())));
    }
    let mut buf = vec![0u8; nodes * per_node * 8];
    input.read_exact(&mut buf)?;
    let mut nl = [0u8; 1];
    input.read_exact(&mut nl)?;
    if nl[0] != b'\n' {
        return Err(malformed("payload not terminated by a newline"));
    }
    Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}

fn write_floats(alpha: &MultiIndex, nodes: usize, values: impl Iterator<Item = f64>, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "index {alpha}")?;
    writeln!(out, "nodes {nodes}")?;
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    out.write_all(b"\n")
}

impl Persist for GridFunction<f64> {
    fn write_space(g: &GridSpec, out: &mut dyn Write) -> std::io::Result<()> {
        write_grid_header(g, out)
    }
    fn read_space(line: Option<&str>) -> Result<GridSpec, FormatError> {
        read_grid_header(line)
    }
    fn write_record(&self, alpha: &MultiIndex, out: &mut dyn Write) -> std::io::Result<()> {
        write_floats(alpha, self.data().len(), self.data().iter().copied(), out)
    }
    fn read_record(rest: &str, g: &GridSpec, input: &mut dyn BufRead) -> Result<Self, FormatError> {
        Ok(GridFunction::from_data(*g, read_floats(rest, g, 1, input)?)?)
    }
}

impl Persist for GridFunction<Complex64> {
    fn write_space(g: &GridSpec, out: &mut dyn Write) -> std::io::Result<()> {
        write_grid_header(g, out)
    }
    fn read_space(line: Option<&str>) -> Result<GridSpec, FormatError> {
        read_grid_header(line)
    }
    fn write_record(&self, alpha: &MultiIndex, out: &mut dyn Write) -> std::io::Result<()> {
        write_floats(alpha, self.data().len(), self.data().iter().flat_map(|c| [c.re, c.im]), out)
    }
    fn read_record(rest: &str, g: &GridSpec, input: &mut dyn BufRead) -> Result<Self, FormatError> {
        let v = read_floats(rest, g, 2, input)?;
        Ok(GridFunction::from_data(*g, v.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect())?)
    }
}

pub fn write_chaos<C: Persist>(field: &ChaosField<C>, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "kind {}", C::KIND.name())?;
    writeln!(out, "basis {}", field.basis().name())?;
    writeln!(out, "index-set {}", field.index_set().header())?;
    C::write_space(field.space(), out)?;
    writeln!(out, "records {}", field.stored_count())?;
    for (_, alpha, c) in field.iter() {
        c.write_record(alpha, out)?;
    }
    Ok(())
}

pub fn to_bytes<C: Persist>(field: &ChaosField<C>) -> Vec<u8> {
    let mut v = Vec::new();
    write_chaos(field, &mut v).expect("writing to memory cannot fail");
    v
}

fn read_line(input: &mut dyn BufRead) -> Result<Option<String>, FormatError> {
    let mut s = String::new();
    if input.read_line(&mut s)? == 0 {
        return Ok(None);
    }
    Ok(Some(s.trim_end_matches('\n').to_owned()))
}

fn field_line(input: &mut dyn BufRead, key: &str) -> Result<String, FormatError> {
    let line = read_line(input)?.ok_or_else(|| malformed(format!("missing `{key}` line")))?;
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .map(str::to_owned)
        .ok_or_else(|| malformed(format!("expected `{key}`, found {line:?}")))
}

/// Coefficient kind declared by a file header, without reading further.
pub fn peek_kind(bytes: &[u8]) -> Result<CoefficientKind, FormatError> {
    let mut input = bytes;
    if read_line(&mut input)?.as_deref() != Some(MAGIC) {
        return Err(malformed("missing magic line"));
    }
    let kind = field_line(&mut input, "kind")?;
    CoefficientKind::parse(&kind).ok_or_else(|| malformed(format!("unknown kind {kind:?}")))
}

pub fn read_chaos<C: Persist>(input: &mut dyn BufRead) -> Result<ChaosField<C>, FormatError> {
    if read_line(input)?.as_deref() != Some(MAGIC) {
        return Err(malformed("missing magic line"));
    }
    let kind = field_line(input, "kind")?;
    let kind = CoefficientKind::parse(&kind).ok_or_else(|| malformed(format!("unknown kind {kind:?}")))?;
    if kind != C::KIND {
        return Err(FormatError::WrongKind { found: kind.name(), expected: C::KIND.name() });
    }
    let basis = field_line(input, "basis")?;
    let basis = BasisTag::parse(&basis).ok_or_else(|| malformed(format!("unknown basis {basis:?}")))?;
    let (k, n) = IndexSet::parse_header(&field_line(input, "index-set")?)?;
    let mut line = read_line(input)?.ok_or_else(|| malformed("truncated header"))?;
    let grid_line = match line.strip_prefix("grid ") {
        Some(g) => {
            let g = g.to_owned();
            line = read_line(input)?.ok_or_else(|| malformed("truncated header"))?;
            Some(g)
        }
        None => None,
    };
    let space = C::read_space(grid_line.as_deref())?;
    let records: usize = line
        .strip_prefix("records ")
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| malformed(format!("bad records line {line:?}")))?;
    let mut field: ChaosField<C> = ChaosField::zero(Arc::new(IndexSet::enumerate(k, n)), space.clone(), basis);
    for _ in 0..records {
        let line = read_line(input)?.ok_or_else(|| malformed("truncated record list"))?;
        let rest = line.strip_prefix("index ").ok_or_else(|| malformed(format!("bad record line {line:?}")))?;
        let close = rest.find(')').ok_or_else(|| malformed(format!("bad multi-index in {line:?}")))?;
        let alpha: MultiIndex = rest[..=close].parse()?;
        let value = C::read_record(&rest[close + 1..], &space, input)?;
        field.set(&alpha, value)?;
    }
    Ok(field)
}

pub fn from_bytes<C: Persist>(mut bytes: &[u8]) -> Result<ChaosField<C>, FormatError> {
    read_chaos(&mut bytes)
}

pub fn save<C: Persist>(field: &ChaosField<C>, path: &std::path::Path) -> Result<(), FormatError> {
    std::fs::write(path, to_bytes(field))?;
    Ok(())
}

pub fn load<C: Persist>(path: &std::path::Path) -> Result<ChaosField<C>, FormatError> {
    from_bytes(&std::fs::read(path)?)
}
