//! Closed-form maximum of `|G|`, the corrected Lyapunov threshold, and the
//! original (singular) threshold it replaces.
//!
//! With `A = (alpha - 1)(b - a)` and `B = 2 - alpha`:
//!
//! | regime        | `max |G|`          | threshold            |
//! |---------------|--------------------|----------------------|
//! | sub-critical  | `B`                | `1 / B`              |
//! | super-critical| `(A + B)^2 / (4A)` | `4A / (A + B)^2`     |
//!
//! The refuted threshold `4A / (A - B)^2` blows up at `A == B`, i.e. exactly
//! at the regime boundary.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::{ExtendedReal, Problem, Regime, RegimeKind};

/// Denominators within this many ulps of zero are treated as vanishing.
/// Decimal inputs such as `alpha = 1.2, L = 4` are not representable, so an
/// exact `== 0.0` test would miss the singularity they describe.
const SINGULAR_ULPS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KiraneThreshold {
    Finite(f64),
    Singular,
}

impl KiraneThreshold {
    pub fn finite(self) -> Option<f64> {
        match self {
            KiraneThreshold::Finite(v) => Some(v),
            KiraneThreshold::Singular => None,
        }
    }

    pub fn is_singular(self) -> bool {
        matches!(self, KiraneThreshold::Singular)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SStarLocation {
    Inside(f64),
    Outside(f64),
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub regime: Regime,
    pub max_abs_green: f64,
    pub lyapunov_threshold: f64,
    pub kirane_threshold: KiraneThreshold,
    pub s_star: SStarLocation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub length: f64,
    pub regime: RegimeKind,
    pub max_abs_green: f64,
    pub lyapunov_threshold: f64,
    pub kirane_threshold: KiraneThreshold,
    pub oracle_max: Option<f64>,
}

fn amgm_terms(p: &Problem) -> (f64, f64) {
    (p.slope() * p.length(), p.jump())
}

/// `(A + B)^2 / 4 - AB`, which equals `(A - B)^2 / 4`.
pub fn amgm_gap(a: f64, b: f64) -> f64 {
    (a + b) * (a + b) / 4.0 - a * b
}

/// Sub-critical closed form: `2 - alpha`.
pub fn sub_critical_max(p: &Problem) -> f64 {
    p.jump()
}

/// Super-critical closed form `[(alpha-1)L + (2-alpha)]^2 / (4 (alpha-1) L)`,
/// evaluated regardless of the actual regime.
pub fn super_critical_max(p: &Problem) -> f64 {
    let (a, b) = amgm_terms(p);
    (a + b) * (a + b) / (4.0 * a)
}

/// The two candidates discarded by the super-critical case analysis:
/// `-h1(a) = 2 - alpha` and `h1(s*) = [(alpha-1)L - (2-alpha)]^2 / (4 (alpha-1) L)`.
pub fn rejected_candidates(p: &Problem) -> (f64, f64) {
    let (a, b) = amgm_terms(p);
    (b, amgm_gap(a, b) / a)
}

pub fn max_abs_green(p: &Problem) -> f64 {
    match p.regime().kind {
        RegimeKind::SubCritical => sub_critical_max(p),
        RegimeKind::SuperCritical => super_critical_max(p),
    }
}

/// Corrected lower bound on `integral |q|` for a nontrivial solution to exist.
pub fn lyapunov_threshold(p: &Problem) -> f64 {
    match p.regime().kind {
        RegimeKind::SubCritical => 1.0 / p.jump(),
        RegimeKind::SuperCritical => {
            let (a, b) = amgm_terms(p);
            4.0 * a / ((a + b) * (a + b))
        }
    }
}

/// Original threshold `4A / (A - B)^2`; singular when `A == B`.
pub fn kirane_threshold(p: &Problem) -> KiraneThreshold {
    let (a, b) = amgm_terms(p);
    let den = a - b;
    if den.abs() <= SINGULAR_ULPS * f64::EPSILON * a.max(b) {
        KiraneThreshold::Singular
    } else {
        KiraneThreshold::Finite(4.0 * a / (den * den))
    }
}

pub fn s_star_location(p: &Problem) -> SStarLocation {
    match p.s_star() {
        ExtendedReal::Unbounded => SStarLocation::Unbounded,
        ExtendedReal::Finite(s) if p.contains(s) => SStarLocation::Inside(s),
        ExtendedReal::Finite(s) => SStarLocation::Outside(s),
    }
}

pub fn bound_report(p: &Problem) -> BoundReport {
    BoundReport {
        regime: p.regime(),
        max_abs_green: max_abs_green(p),
        lyapunov_threshold: lyapunov_threshold(p),
        kirane_threshold: kirane_threshold(p),
        s_star: s_star_location(p),
    }
}

impl SweepRow {
    pub fn from_problem(p: &Problem) -> Self {
        SweepRow {
            alpha: p.alpha(),
            length: p.length(),
            regime: p.regime().kind,
            max_abs_green: max_abs_green(p),
            lyapunov_threshold: lyapunov_threshold(p),
            kirane_threshold: kirane_threshold(p),
            oracle_max: None,
        }
    }
}

/// Validates a pair of grids, reporting every bad entry rather than the first.
pub(crate) fn validate_grids(alphas: &[f64], lengths: &[f64]) -> Result<()> {
    let mut problems = Vec::new();
    if alphas.is_empty() {
        problems.push("alpha grid is empty".to_string());
    }
    if lengths.is_empty() {
        problems.push("length grid is empty".to_string());
    }
    for (i, &alpha) in alphas.iter().enumerate() {
        if !(alpha.is_finite() && alpha > 1.0 && alpha <= 2.0) {
            problems.push(format!("alpha[{i}]={alpha} not in (1, 2]"));
        }
    }
    for (i, &length) in lengths.iter().enumerate() {
        if !(length.is_finite() && length > 0.0) {
            problems.push(format!("length[{i}]={length} not positive"));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidGrid(problems))
    }
}

/// All `(alpha, length)` problems on `[0, length]`, sorted by alpha then length.
pub fn sweep_problems(alphas: &[f64], lengths: &[f64]) -> Result<Vec<Problem>> {
    validate_grids(alphas, lengths)?;
    let mut pairs: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&alpha| lengths.iter().map(move |&l| (alpha, l)))
        .collect();
    pairs.sort_by(|x, y| match x.0.total_cmp(&y.0) {
        Ordering::Equal => x.1.total_cmp(&y.1),
        o => o,
    });
    pairs.dedup();
    pairs
        .into_iter()
        .map(|(alpha, l)| Problem::with_length(alpha, l))
        .collect()
}

pub fn threshold_comparison_sweep(alphas: &[f64], lengths: &[f64]) -> Result<Vec<SweepRow>> {
    let problems = sweep_problems(alphas, lengths)?;
    Ok(problems.par_iter().map(SweepRow::from_problem).collect())
}
