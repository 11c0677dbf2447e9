//! CSV form of a net: a `# kind=<kind> mesh=<mesh>` comment line followed by
//! rows `id,coord...,weight`. Lattice coordinates are written as exact
//! fractions `k/n`, cone points as `theta` followed by the base coordinates,
//! and the apex / star as the single tokens `apex` / `star`.

use std::io::{BufRead, Write};

use super::{FiniteSpace, Model};
use crate::error::{Error, Result};

pub fn write_space_csv<W: Write>(space: &FiniteSpace, mut out: W) -> Result<()> {
    writeln!(out, "# kind={} mesh={}", space.kind(), space.mesh())?;
    for (i, (p, w)) in space.points().iter().zip(space.weights()).enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(p.tokens());
        row.push(format!("{w}"));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Read a net written by [`write_space_csv`]; the payload model must be
/// supplied by the caller.
pub fn read_space_csv<R: BufRead>(input: R, model: Model) -> Result<FiniteSpace> {
    let mut mesh = None;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let parse_err = |reason: String| Error::Parse {
            line: lineno,
            reason,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            for field in header.split_whitespace() {
                match field.split_once('=') {
                    Some(("kind", kind)) if kind != model.kind().as_str() => {
                        return Err(parse_err(format!(
                            "file holds a {kind} net, expected {}",
                            model.kind()
                        )));
                    }
                    Some(("mesh", m)) => {
                        mesh = Some(m.parse::<f64>().map_err(|e| parse_err(e.to_string()))?);
                    }
                    _ => {}
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 3 {
            return Err(parse_err("expected id, coordinates and weight".into()));
        }
        let id: usize = fields[0].parse().map_err(|_| parse_err(format!("bad id `{}`", fields[0])))?;
        if id != points.len() {
            return Err(parse_err(format!("id {id} out of sequence")));
        }
        let w: f64 = fields[fields.len() - 1]
            .parse()
            .map_err(|_| parse_err("bad weight".into()))?;
        let p = model
            .parse_tokens(&fields[1..fields.len() - 1])
            .map_err(parse_err)?;
        points.push(p);
        weights.push(w);
    }
    let mesh = mesh.ok_or_else(|| Error::Parse {
        line: 1,
        reason: "missing `# kind=... mesh=...` header".into(),
    })?;
    FiniteSpace::from_parts(model, points, weights, mesh)
}
