//! Text formats: `pgraph v1` edge lists, vertex-set files and the CSV tables
//! produced by the solvers.

use std::io::{BufRead, Write};

use crate::capacity::SequencePoint;
use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::plaplace::{p_laplacian_at, PExponent, PotentialSolution};

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

/// Reads `pgraph v1 <n>` followed by one `x y weight` line per undirected
/// edge. Blank lines and lines starting with `#` are skipped.
pub fn read_pgraph<R: BufRead>(reader: R) -> Result<WeightedGraph> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty() && !s.trim_start().starts_with('#')));
    let (no, header) = match lines.next() {
        Some((no, l)) => (no, l?),
        None => return Err(Error::Parse("empty input, expected `pgraph v1 <n>`".into())),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    let n = match fields.as_slice() {
        ["pgraph", "v1", n] => n
            .parse::<usize>()
            .map_err(|e| parse_err(no, format!("vertex count: {e}")))?,
        _ => return Err(parse_err(no, "expected header `pgraph v1 <n>`")),
    };
    let mut edges = Vec::new();
    for (no, line) in lines {
        let line = line?;
        let mut it = line.split_whitespace();
        let (x, y, w) = match (it.next(), it.next(), it.next(), it.next()) {
            (Some(x), Some(y), Some(w), None) => (x, y, w),
            _ => return Err(parse_err(no, "expected `x y weight`")),
        };
        let x = x.parse::<usize>().map_err(|e| parse_err(no, e))?;
        let y = y.parse::<usize>().map_err(|e| parse_err(no, e))?;
        let w = w.parse::<f64>().map_err(|e| parse_err(no, e))?;
        edges.push((x, y, w));
    }
    WeightedGraph::from_edges(n, &edges)
}

/// Writes each undirected edge once, `x < y`, in increasing order.
pub fn write_pgraph<W: Write>(g: &WeightedGraph, mut out: W) -> Result<()> {
    writeln!(out, "pgraph v1 {}", g.vertex_count())?;
    for (x, y, w) in g.edges() {
        writeln!(out, "{x} {y} {w}")?;
    }
    Ok(())
}

/// One vertex id per line; blank lines and `#` comments are skipped.
pub fn read_vertex_set<R: BufRead>(g: &WeightedGraph, reader: R) -> Result<VertexSet> {
    let mut ids = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        ids.push(t.parse::<usize>().map_err(|e| parse_err(i + 1, e))?);
    }
    VertexSet::new(g, ids)
}

pub fn write_vertex_set<W: Write>(set: &VertexSet, mut out: W) -> Result<()> {
    for x in set.iter() {
        writeln!(out, "{x}")?;
    }
    Ok(())
}

/// CSV `vertex,u,residual` over the vertices with a value. The residual
/// `|Delta_p u|` is filled in on the free set only.
pub fn write_solution_csv<W: Write>(
    g: &WeightedGraph,
    sol: &PotentialSolution,
    p: &PExponent,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["vertex", "u", "residual"]).map_err(csv_err)?;
    let free = sol.free_set.mask(g.vertex_count());
    for (x, &u) in sol.u.iter().enumerate() {
        if u.is_nan() {
            continue;
        }
        let residual = if free[x] {
            num(p_laplacian_at(g, &sol.u, x, p).abs())
        } else {
            String::new()
        };
        w.write_record([x.to_string(), num(u), residual])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV `R,value,increment`; the first increment is empty.
pub fn write_sequence_csv<W: Write>(points: &[SequencePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["R", "value", "increment"]).map_err(csv_err)?;
    for pt in points {
        let inc = if pt.increment.is_nan() {
            String::new()
        } else {
            num(pt.increment)
        };
        w.write_record([pt.radius.to_string(), num(pt.value), inc])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip decimal, switching to exponent form for very small or
/// very large magnitudes.
pub(crate) fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
