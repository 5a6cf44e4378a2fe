use super::grid::{GridSpec, RadialGrid};
use super::BallKernel;
use crate::error::{Error, Result};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

const MAGIC: &str = "# sbh-kernel v1";

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Text table: header with the grid spec, then the two operator matrices and origin rows.
pub fn write_kernel<W: Write>(kernel: &BallKernel, mut w: W) -> Result<()> {
    let n = kernel.len();
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "# spec {}", serde_json::to_string(&kernel.spec()).map_err(|e| perr(e.to_string()))?)?;
    writeln!(w, "# nodes {n}")?;
    let mut row = |tag: &str, vals: &[f64]| -> Result<()> {
        write!(w, "{tag}")?;
        for v in vals {
            write!(w, " {v:e}")?;
        }
        writeln!(w)?;
        Ok(())
    };
    for i in 0..n {
        row("P", &kernel.plain[i * n..(i + 1) * n])?;
    }
    for i in 0..n {
        row("W", &kernel.weighted[i * n..(i + 1) * n])?;
    }
    row("P0", &kernel.origin_plain)?;
    row("W0", &kernel.origin_weighted)?;
    Ok(())
}

pub fn read_kernel<R: BufRead>(r: R) -> Result<BallKernel> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| perr("empty kernel file"))??;
    if first.trim() != MAGIC {
        return Err(perr(format!("bad header line: {first}")));
    }
    let mut spec: Option<GridSpec> = None;
    let (mut plain, mut weighted, mut p0, mut w0) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for line in lines {
        let line = line?;
        if let Some(rest) = line.strip_prefix("# spec ") {
            spec = Some(serde_json::from_str(rest).map_err(|e| perr(e.to_string()))?);
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let tag = it.next().unwrap_or("");
        let vals: Vec<f64> =
            it.map(|t| t.parse::<f64>().map_err(|e| perr(format!("{tag} row: {e}")))).collect::<Result<_>>()?;
        match tag {
            "P" => plain.extend(vals),
            "W" => weighted.extend(vals),
            "P0" => p0 = vals,
            "W0" => w0 = vals,
            _ => return Err(perr(format!("unknown row tag {tag}"))),
        }
    }
    let spec = spec.ok_or_else(|| perr("missing spec"))?;
    let grid = RadialGrid::new(spec)?;
    let n = grid.len();
    if plain.len() != n * n || weighted.len() != n * n || p0.len() != n || w0.len() != n {
        return Err(perr("kernel table size does not match the grid spec"));
    }
    Ok(BallKernel { grid, plain, weighted, origin_plain: p0, origin_weighted: w0 })
}

/// Reads the cached kernel at `path` if it was built for `spec`, otherwise builds and stores it.
pub fn load_or_build(path: &Path, spec: GridSpec) -> Result<BallKernel> {
    if let Ok(f) = std::fs::File::open(path) {
        if let Ok(k) = read_kernel(BufReader::new(f)) {
            if k.spec() == spec {
                return Ok(k);
            }
        }
    }
    let k = BallKernel::build(spec)?;
    let f = std::fs::File::create(path)?;
    let mut w = BufWriter::new(f);
    write_kernel(&k, &mut w)?;
    w.flush()?;
    Ok(k)
}
