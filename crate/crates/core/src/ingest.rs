//! Sampled potentials and nonexistence certificates.
//!
//! A potential `q` is given by samples on `[a, b]` and interpolated linearly.
//! If `integral |q| < threshold`, the two-point problem with that `q` has only
//! the trivial solution. Meeting the threshold proves nothing.

use std::fmt;
use std::io::Read;
use std::path::Path;

use crate::bounds::lyapunov_threshold;
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::problem::Problem;

/// Endpoint mismatch tolerated when matching a signal to a problem.
pub const ENDPOINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct QSignal {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl QSignal {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::Domain(format!(
                "{} nodes but {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.len() < 2 {
            return Err(Error::Domain("a signal needs at least 2 nodes".into()));
        }
        if let Some(i) = nodes.iter().position(|t| !t.is_finite()) {
            return Err(Error::Domain(format!("node {i} is not finite")));
        }
        if let Some(i) = values.iter().position(|q| !q.is_finite()) {
            return Err(Error::Domain(format!("value {i} is not finite")));
        }
        if let Some(i) = nodes.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Domain(format!(
                "nodes not strictly increasing at index {}: {} then {}",
                i + 1,
                nodes[i],
                nodes[i + 1]
            )));
        }
        Ok(QSignal { nodes, values })
    }

    /// `q(t) = c` sampled at the two endpoints.
    pub fn constant(a: f64, b: f64, c: f64) -> Result<Self> {
        QSignal::new(vec![a, b], vec![c, c])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Checks the endpoints against `[a, b]` and snaps them onto it.
    pub fn matched_to(mut self, p: &Problem) -> Result<Self> {
        let (start, end) = (self.start(), self.end());
        if (start - p.a()).abs() > ENDPOINT_TOL || (end - p.b()).abs() > ENDPOINT_TOL {
            return Err(Error::Domain(format!(
                "signal spans [{start}, {end}] but the problem is on [{}, {}]",
                p.a(),
                p.b()
            )));
        }
        let last = self.nodes.len() - 1;
        self.nodes[0] = p.a();
        self.nodes[last] = p.b();
        QSignal::new(self.nodes, self.values)
    }

    pub fn scaled(&self, c: f64) -> Self {
        QSignal {
            nodes: self.nodes.clone(),
            values: self.values.iter().map(|q| q * c).collect(),
        }
    }
}

fn parse_field(field: Option<&str>, line: u64, name: &str) -> Result<f64> {
    let raw = field.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing column {name}"),
    })?;
    raw.trim().parse::<f64>().map_err(|e| Error::Parse {
        line,
        message: format!("column {name}: {raw:?}: {e}"),
    })
}

/// Reads a two-column `t,q` CSV with header and matches it to `p`.
pub fn load_q_csv<R: Read>(reader: R, p: &Problem) -> Result<QSignal> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let header = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != ["t", "q"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header \"t,q\", got {:?}", names.join(",")),
        });
    }

    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |pos| pos.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |pos| pos.line());
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 columns, got {}", record.len()),
            });
        }
        nodes.push(parse_field(record.get(0), line, "t")?);
        values.push(parse_field(record.get(1), line, "q")?);
    }
    QSignal::new(nodes, values)?.matched_to(p)
}

pub fn load_q_csv_path(path: &Path, p: &Problem) -> Result<QSignal> {
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_q_csv(std::io::BufReader::new(file), p)
}

/// Exact integral of `|interpolant|`, inserting the zero crossing on every
/// interval where the samples change sign.
pub fn integral_abs_q(q: &QSignal) -> f64 {
    q.nodes
        .windows(2)
        .zip(q.values.windows(2))
        .map(|(t, v)| {
            let (h, q0, q1) = (t[1] - t[0], v[0], v[1]);
            if q0 * q1 < 0.0 {
                let (a0, a1) = (q0.abs(), q1.abs());
                let cross = h * a0 / (a0 + a1);
                0.5 * cross * a0 + 0.5 * (h - cross) * a1
            } else {
                0.5 * h * (q0.abs() + q1.abs())
            }
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NoNontrivialSolution,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NoNontrivialSolution => f.write_str("NoNontrivialSolution"),
            Verdict::Inconclusive => f.write_str("Inconclusive"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub integral_abs_q: f64,
    pub threshold: f64,
    pub margin: f64,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"verdict\":\"{}\",\"integral_abs_q\":{},\"threshold\":{},\"margin\":{}}}",
            self.verdict,
            sig17(self.integral_abs_q),
            sig17(self.threshold),
            sig17(self.margin)
        )
    }
}

pub fn certify(p: &Problem, q: &QSignal) -> Result<Certificate> {
    let q = q.clone().matched_to(p)?;
    let integral = integral_abs_q(&q);
    let threshold = lyapunov_threshold(p);
    let verdict = if integral < threshold {
        Verdict::NoNontrivialSolution
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate {
        verdict,
        integral_abs_q: integral,
        threshold,
        margin: integral - threshold,
    })
}
