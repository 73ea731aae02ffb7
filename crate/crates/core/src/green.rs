//! Green's function of the two-point problem and its diagonal sections.
//!
//! On `[a, b]` the kernel is piecewise linear in `t`:
//!
//! ```text
//! g1(t, s) = (b - t)/(b - a) * [(alpha - 1)(s - a) - (2 - alpha)],   a <= s <= t <= b
//! g2(t, s) = (t - a)/(b - a) * [(alpha - 1)(b - s) + (2 - alpha)],   a <= t <= s <= b
//! ```
//!
//! Both branches are defined on the diagonal and differ there by exactly
//! `2 - alpha`. [`green`] reports both values when `t == s`.

use crate::error::{Error, Result};
use crate::problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `g1`, used for `s < t`.
    Lower,
    /// `g2`, used for `t < s`.
    Upper,
    /// `t == s`; both branches apply.
    DiagonalBoth,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::Lower => "g1",
            Branch::Upper => "g2",
            Branch::DiagonalBoth => "diag",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenValue {
    Lower(f64),
    Upper(f64),
    Diagonal { lower: f64, upper: f64 },
}

impl GreenValue {
    /// Canonical scalar; on the diagonal this is the `g1` value.
    pub fn value(&self) -> f64 {
        match *self {
            GreenValue::Lower(v) | GreenValue::Upper(v) => v,
            GreenValue::Diagonal { lower, .. } => lower,
        }
    }

    pub fn branch(&self) -> Branch {
        match self {
            GreenValue::Lower(_) => Branch::Lower,
            GreenValue::Upper(_) => Branch::Upper,
            GreenValue::Diagonal { .. } => Branch::DiagonalBoth,
        }
    }

    pub fn lower(&self) -> Option<f64> {
        match *self {
            GreenValue::Lower(v) => Some(v),
            GreenValue::Diagonal { lower, .. } => Some(lower),
            GreenValue::Upper(_) => None,
        }
    }

    pub fn upper(&self) -> Option<f64> {
        match *self {
            GreenValue::Upper(v) => Some(v),
            GreenValue::Diagonal { upper, .. } => Some(upper),
            GreenValue::Lower(_) => None,
        }
    }

    /// Largest magnitude over every branch value carried.
    pub fn max_abs(&self) -> f64 {
        match *self {
            GreenValue::Lower(v) | GreenValue::Upper(v) => v.abs(),
            GreenValue::Diagonal { lower, upper } => lower.abs().max(upper.abs()),
        }
    }
}

// Unchecked formulas shared with the oracle and the Nyström assembly.

#[inline]
pub(crate) fn g1_raw(p: &Problem, t: f64, s: f64) -> f64 {
    (p.b() - t) / p.length() * (p.slope() * (s - p.a()) - p.jump())
}

#[inline]
pub(crate) fn g2_raw(p: &Problem, t: f64, s: f64) -> f64 {
    (t - p.a()) / p.length() * (p.slope() * (p.b() - s) + p.jump())
}

#[inline]
pub(crate) fn h_prime_raw(p: &Problem, s: f64) -> f64 {
    (-2.0 * p.slope() * s + p.slope() * (p.a() + p.b()) + p.jump()) / p.length()
}

fn check_in(p: &Problem, name: &str, x: f64) -> Result<()> {
    if p.contains(x) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name}={x} outside [{}, {}]",
            p.a(),
            p.b()
        )))
    }
}

/// Lower branch, defined for `a <= s <= t <= b`.
pub fn g1(p: &Problem, t: f64, s: f64) -> Result<f64> {
    check_in(p, "t", t)?;
    check_in(p, "s", s)?;
    if s > t {
        return Err(Error::Domain(format!(
            "g1 requires s <= t, got t={t}, s={s}"
        )));
    }
    Ok(g1_raw(p, t, s))
}

/// Upper branch, defined for `a <= t <= s <= b`. Never negative.
pub fn g2(p: &Problem, t: f64, s: f64) -> Result<f64> {
    check_in(p, "t", t)?;
    check_in(p, "s", s)?;
    if t > s {
        return Err(Error::Domain(format!(
            "g2 requires t <= s, got t={t}, s={s}"
        )));
    }
    Ok(g2_raw(p, t, s))
}

pub fn green(p: &Problem, t: f64, s: f64) -> Result<GreenValue> {
    check_in(p, "t", t)?;
    check_in(p, "s", s)?;
    Ok(if s < t {
        GreenValue::Lower(g1_raw(p, t, s))
    } else if t < s {
        GreenValue::Upper(g2_raw(p, t, s))
    } else {
        GreenValue::Diagonal {
            lower: g1_raw(p, t, s),
            upper: g2_raw(p, t, s),
        }
    })
}

/// `h1(s) = g1(s, s)`.
pub fn h1(p: &Problem, s: f64) -> Result<f64> {
    check_in(p, "s", s)?;
    Ok(g1_raw(p, s, s))
}

/// `h2(s) = g2(s, s)`.
pub fn h2(p: &Problem, s: f64) -> Result<f64> {
    check_in(p, "s", s)?;
    Ok(g2_raw(p, s, s))
}

/// Common derivative of `h1` and `h2`; they differ by the constant `2 - alpha`.
pub fn h_prime(p: &Problem, s: f64) -> f64 {
    h_prime_raw(p, s)
}
