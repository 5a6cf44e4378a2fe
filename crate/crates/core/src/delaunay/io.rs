use super::{RadialProfile, SolveOptions, SolveStats};
use crate::error::{Error, Result};
use crate::params::{emden_coeffs, validate_params};
use std::io::{BufRead, Write};

const MAGIC: &str = "# sbh-profile v1";

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Columnar text: header lines starting with `#`, then `t ū ū' ū'' ū'''` rows.
pub fn write_profile<W: Write>(profile: &RadialProfile, mut w: W) -> Result<()> {
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "# N {}", profile.params.n)?;
    writeln!(w, "# p {:e}", profile.params.p)?;
    writeln!(w, "# beta {:e}", profile.beta)?;
    writeln!(w, "# t_start {:e}", profile.t_start)?;
    writeln!(w, "# dt {:e}", profile.dt)?;
    writeln!(w, "# count {}", profile.len())?;
    writeln!(w, "# options {}", serde_json::to_string(&profile.options).map_err(|e| perr(e.to_string()))?)?;
    writeln!(w, "# stats {}", serde_json::to_string(&profile.stats).map_err(|e| perr(e.to_string()))?)?;
    writeln!(w, "# columns t ubar ubar_1 ubar_2 ubar_3")?;
    for (i, y) in profile.states.iter().enumerate() {
        writeln!(w, "{:e} {:e} {:e} {:e} {:e}", profile.t(i), y[0], y[1], y[2], y[3])?;
    }
    Ok(())
}

pub fn read_profile<R: BufRead>(r: R) -> Result<RadialProfile> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| perr("empty profile"))??;
    if first.trim() != MAGIC {
        return Err(perr(format!("bad header line: {first}")));
    }
    let mut n = None;
    let mut p = None;
    let mut beta = None;
    let mut t_start = None;
    let mut dt = None;
    let mut count = None;
    let mut options = SolveOptions::default();
    let mut stats = SolveStats::default();
    let mut states = Vec::new();
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            let (key, val) = rest.split_once(' ').unwrap_or((rest, ""));
            let num = |v: &str| v.trim().parse::<f64>().map_err(|e| perr(format!("{key}: {e}")));
            match key {
                "N" => n = Some(val.trim().parse::<i64>().map_err(|e| perr(format!("N: {e}")))?),
                "p" => p = Some(num(val)?),
                "beta" => beta = Some(num(val)?),
                "t_start" => t_start = Some(num(val)?),
                "dt" => dt = Some(num(val)?),
                "count" => count = Some(val.trim().parse::<usize>().map_err(|e| perr(format!("count: {e}")))?),
                "options" => options = serde_json::from_str(val).map_err(|e| perr(e.to_string()))?,
                "stats" => stats = serde_json::from_str(val).map_err(|e| perr(e.to_string()))?,
                _ => {}
            }
            continue;
        }
        let cols: Vec<f64> = line
            .split_whitespace()
            .map(|c| c.parse::<f64>().map_err(|e| perr(format!("row {}: {e}", states.len()))))
            .collect::<Result<_>>()?;
        if cols.len() != 5 {
            return Err(perr(format!("row {} has {} columns", states.len(), cols.len())));
        }
        states.push([cols[1], cols[2], cols[3], cols[4]]);
    }
    let n = n.ok_or_else(|| perr("missing N"))?;
    let p = p.ok_or_else(|| perr("missing p"))?;
    let params = validate_params(n, p)?;
    if let Some(c) = count {
        if c != states.len() {
            return Err(perr(format!("count {c} but {} rows", states.len())));
        }
    }
    if states.len() < 2 {
        return Err(perr("profile needs at least two rows"));
    }
    Ok(RadialProfile {
        params,
        coeffs: emden_coeffs(&params),
        t_start: t_start.ok_or_else(|| perr("missing t_start"))?,
        dt: dt.ok_or_else(|| perr("missing dt"))?,
        states,
        beta: beta.ok_or_else(|| perr("missing beta"))?,
        options,
        stats,
    })
}
