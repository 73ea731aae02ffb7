//! Boundary value problem instances and their length regime.
//!
//! A [`Problem`] is the triple `(alpha, a, b)` with `1 < alpha <= 2` and
//! `0 <= a < b`. The interval length `b - a` is compared against the critical
//! length `(2 - alpha) / (alpha - 1)` to decide which closed form governs the
//! maximum of the Green's function.

use std::fmt;

use crate::error::{Error, Result};

/// A real number that may be `+inf` as an explicit marker rather than a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Unbounded,
}

impl ExtendedReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::Unbounded => None,
        }
    }

    fn from_quotient(x: f64) -> Self {
        if x.is_finite() {
            ExtendedReal::Finite(x)
        } else {
            ExtendedReal::Unbounded
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeKind {
    /// `b - a < (2 - alpha) / (alpha - 1)`; `max |G| = 2 - alpha`.
    SubCritical,
    /// `b - a >= (2 - alpha) / (alpha - 1)`; the maximum sits at `s*`.
    SuperCritical,
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeKind::SubCritical => f.write_str("SubCritical"),
            RegimeKind::SuperCritical => f.write_str("SuperCritical"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub kind: RegimeKind,
    pub critical_length: ExtendedReal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    alpha: f64,
    a: f64,
    b: f64,
}

impl Problem {
    pub fn new(alpha: f64, a: f64, b: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 1.0 && alpha <= 2.0) {
            return Err(Error::InvalidProblem(format!(
                "alpha must satisfy 1 < alpha <= 2, got {alpha}"
            )));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "endpoints must be finite, got a={a}, b={b}"
            )));
        }
        if !(a >= 0.0 && a < b) {
            return Err(Error::InvalidProblem(format!(
                "endpoints must satisfy 0 <= a < b, got a={a}, b={b}"
            )));
        }
        Ok(Problem { alpha, a, b })
    }

    /// Problem on `[0, length]`.
    pub fn with_length(alpha: f64, length: f64) -> Result<Self> {
        Problem::new(alpha, 0.0, length)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// `2 - alpha`, exact in floating point for `alpha` in `[1, 2]`.
    pub fn jump(&self) -> f64 {
        2.0 - self.alpha
    }

    /// `alpha - 1`, exact in floating point for `alpha` in `[1, 2]`.
    pub fn slope(&self) -> f64 {
        self.alpha - 1.0
    }

    /// `(2 - alpha) / (alpha - 1)`.
    pub fn critical_length(&self) -> ExtendedReal {
        ExtendedReal::from_quotient(self.jump() / self.slope())
    }

    /// Exact comparison of `b - a` against the critical length; the boundary
    /// itself is super-critical.
    pub fn regime(&self) -> Regime {
        let critical_length = self.critical_length();
        let kind = match critical_length {
            ExtendedReal::Unbounded => RegimeKind::SubCritical,
            ExtendedReal::Finite(c) if self.length() < c => RegimeKind::SubCritical,
            ExtendedReal::Finite(_) => RegimeKind::SuperCritical,
        };
        Regime {
            kind,
            critical_length,
        }
    }

    /// Stationary point of both diagonal sections,
    /// `(b + a + (2 - alpha) / (alpha - 1)) / 2`.
    pub fn s_star(&self) -> ExtendedReal {
        match self.critical_length() {
            ExtendedReal::Finite(c) => ExtendedReal::from_quotient(0.5 * (self.b + self.a + c)),
            ExtendedReal::Unbounded => ExtendedReal::Unbounded,
        }
    }

    /// `a + (2 - alpha) / (alpha - 1)`: the zero of the `g1` bracket.
    pub fn sign_split(&self) -> ExtendedReal {
        match self.critical_length() {
            ExtendedReal::Finite(c) => ExtendedReal::from_quotient(self.a + c),
            ExtendedReal::Unbounded => ExtendedReal::Unbounded,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    /// `Some(x)` when `x` is finite and inside `[a, b]`.
    pub fn inside(&self, x: ExtendedReal) -> Option<f64> {
        x.finite().filter(|&v| self.contains(v))
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(alpha={}, a={}, b={})", self.alpha, self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, a: f64, b: f64) -> Problem {
        Problem::new(alpha, a, b).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(Problem::new(1.0, 0.0, 1.0).is_err());
        assert!(Problem::new(2.1, 0.0, 1.0).is_err());
        assert!(Problem::new(f64::NAN, 0.0, 1.0).is_err());
        assert!(Problem::new(1.5, -0.1, 1.0).is_err());
        assert!(Problem::new(1.5, 1.0, 1.0).is_err());
        assert!(Problem::new(1.5, 0.0, f64::INFINITY).is_err());
        assert!(Problem::new(2.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn critical_length_examples() {
        assert_eq!(
            p(2.0, 0.0, 1.0).critical_length(),
            ExtendedReal::Finite(0.0)
        );
        assert_eq!(
            p(1.5, 0.0, 2.0).critical_length(),
            ExtendedReal::Finite(1.0)
        );
        let c = p(1.2, 0.0, 1.0).critical_length().finite().unwrap();
        assert!((c - 4.0).abs() < 1e-14);
    }

    #[test]
    fn critical_length_near_one_stays_finite() {
        let q = p(1.0 + f64::EPSILON, 0.0, 1.0);
        let c = q.critical_length().finite().unwrap();
        assert!(c > 1e15);
        assert_eq!(q.regime().kind, RegimeKind::SubCritical);
    }

    #[test]
    fn regime_examples() {
        assert_eq!(p(1.2, 0.0, 1.0).regime().kind, RegimeKind::SubCritical);
        assert_eq!(p(1.5, 0.0, 2.0).regime().kind, RegimeKind::SuperCritical);
        // boundary b - a == critical length
        assert_eq!(p(1.5, 0.0, 1.0).regime().kind, RegimeKind::SuperCritical);
        assert_eq!(p(2.0, 0.0, 1e-9).regime().kind, RegimeKind::SuperCritical);
    }

    #[test]
    fn s_star_examples() {
        assert_eq!(p(1.5, 0.0, 2.0).s_star(), ExtendedReal::Finite(1.5));
        assert_eq!(p(2.0, 0.0, 1.0).s_star(), ExtendedReal::Finite(0.5));
        let q = p(1.2, 0.0, 1.0);
        let s = q.s_star().finite().unwrap();
        assert!((s - 2.5).abs() < 1e-14);
        assert_eq!(q.inside(q.s_star()), None);
    }
}
