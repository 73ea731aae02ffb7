//! Brute-force checks of the closed forms in [`crate::bounds`].
//!
//! Nothing here calls into `bounds`: the grid maximum is found by direct
//! evaluation of both kernel branches, with the analytic extremum candidates
//! (`s*` and `a + (2 - alpha)/(alpha - 1)`) injected as extra sample points.

use rayon::prelude::*;

use crate::green::{g1_raw, g2_raw, h_prime_raw, Branch};
use crate::problem::{Problem, RegimeKind};

pub const MIN_RESOLUTION: usize = 16;

/// Slack allowed on every inequality in [`check_branch_signs`].
pub const SIGN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMaxResult {
    pub max_abs: f64,
    pub arg_t: f64,
    pub arg_s: f64,
    /// `Lower` or `Upper`; the winning branch, also on the diagonal.
    pub branch: Branch,
    pub grid_n: usize,
}

/// Uniform closed grid of `n` points, endpoints exact.
pub fn closed_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
        .collect()
}

#[derive(Clone, Copy)]
struct Hit {
    value: f64,
    t: f64,
    s: f64,
    branch: Branch,
}

impl Hit {
    fn none() -> Self {
        Hit {
            value: f64::NEG_INFINITY,
            t: f64::NAN,
            s: f64::NAN,
            branch: Branch::Lower,
        }
    }

    // strict comparison: the first hit in scan order wins ties
    fn offer(&mut self, value: f64, t: f64, s: f64, branch: Branch) {
        if value > self.value {
            *self = Hit {
                value,
                t,
                s,
                branch,
            };
        }
    }

    fn offer_point(&mut self, p: &Problem, t: f64, s: f64) {
        if s <= t {
            self.offer(g1_raw(p, t, s).abs(), t, s, Branch::Lower);
        }
        if t <= s {
            self.offer(g2_raw(p, t, s).abs(), t, s, Branch::Upper);
        }
    }
}

fn injected_candidates(p: &Problem) -> Vec<f64> {
    [p.s_star(), p.sign_split()]
        .into_iter()
        .filter_map(|c| p.inside(c))
        .collect()
}

/// Maximum of `|G|` over both closed triangles on an `n x n` grid plus the
/// injected candidates. Ties resolve to the first point in row-major
/// `(t, s)` order, lower branch before upper on the diagonal, grid before
/// candidates.
pub fn grid_max_abs_green(p: &Problem, n: usize) -> GridMaxResult {
    let n = n.max(MIN_RESOLUTION);
    let nodes = closed_grid(p.a(), p.b(), n);

    let row_best: Vec<Hit> = nodes
        .par_iter()
        .map(|&t| {
            let mut best = Hit::none();
            for &s in &nodes {
                best.offer_point(p, t, s);
            }
            best
        })
        .collect();

    let mut best = Hit::none();
    for hit in row_best {
        best.offer(hit.value, hit.t, hit.s, hit.branch);
    }

    for c in injected_candidates(p) {
        best.offer_point(p, c, c);
        for &x in &nodes {
            best.offer_point(p, x, c);
        }
    }

    GridMaxResult {
        max_abs: best.value,
        arg_t: best.t,
        arg_s: best.s,
        branch: best.branch,
        grid_n: n,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyAudit {
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    /// Largest amount by which a bound was exceeded (0 when none was).
    pub worst: f64,
}

impl FamilyAudit {
    fn new(name: &'static str) -> Self {
        FamilyAudit {
            name,
            checked: 0,
            violations: 0,
            worst: 0.0,
        }
    }

    /// Records `lo <= x <= hi`.
    fn check(&mut self, lo: f64, x: f64, hi: f64) {
        self.checked += 1;
        let excess = (lo - x).max(x - hi).max(0.0);
        if excess > self.worst {
            self.worst = excess;
        }
        if excess > SIGN_SLACK {
            self.violations += 1;
        }
    }

    fn merge(&mut self, other: &FamilyAudit) {
        self.checked += other.checked;
        self.violations += other.violations;
        self.worst = self.worst.max(other.worst);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignAudit {
    pub families: Vec<FamilyAudit>,
}

impl SignAudit {
    pub fn violations(&self) -> usize {
        self.families.iter().map(|f| f.violations).sum()
    }

    pub fn worst(&self) -> f64 {
        self.families.iter().map(|f| f.worst).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

/// Audits the sign structure of both branches on an `n x n` grid.
///
/// * `ineq10`: `h1(s) <= g1(t,s) <= 0` for `a <= s <= t <= min(b, a + c)`
/// * `ineq12`: `0 <= g2(t,s) <= h2(s)` for `a <= t <= s <= b`
/// * `ineq22.1` (super-critical only): `0 <= g1 <= h1(s)` for
///   `a + c <= s <= t <= b` and `h1(s) <= g1 <= 0` for `a <= s <= a + c`, `s <= t`
///
/// where `c` is the critical length.
pub fn check_branch_signs(p: &Problem, n: usize) -> SignAudit {
    let n = n.max(MIN_RESOLUTION);
    let nodes = closed_grid(p.a(), p.b(), n);
    let split = p.sign_split().finite().unwrap_or(f64::INFINITY);
    let super_critical = p.regime().kind == RegimeKind::SuperCritical;
    let ineq10_limit = split.min(p.b());

    let rows: Vec<[FamilyAudit; 3]> = nodes
        .par_iter()
        .map(|&t| {
            let mut f10 = FamilyAudit::new("ineq10");
            let mut f12 = FamilyAudit::new("ineq12");
            let mut f22 = FamilyAudit::new("ineq22.1");
            for &s in &nodes {
                if t <= s {
                    let h2 = g2_raw(p, s, s);
                    f12.check(0.0, g2_raw(p, t, s), h2);
                }
                if s <= t {
                    let g1 = g1_raw(p, t, s);
                    let h1 = g1_raw(p, s, s);
                    if t <= ineq10_limit {
                        f10.check(h1, g1, 0.0);
                    }
                    if super_critical {
                        if s >= split {
                            f22.check(0.0, g1, h1);
                        } else {
                            f22.check(h1, g1, 0.0);
                        }
                    }
                }
            }
            [f10, f12, f22]
        })
        .collect();

    let mut total = [
        FamilyAudit::new("ineq10"),
        FamilyAudit::new("ineq12"),
        FamilyAudit::new("ineq22.1"),
    ];
    for row in &rows {
        for (acc, part) in total.iter_mut().zip(row) {
            acc.merge(part);
        }
    }
    SignAudit {
        families: total.into_iter().collect(),
    }
}

/// Largest gap between central differences of `h1`, `h2` and the analytic
/// slope, over `n` interior points of `[a + eps, b - eps]`.
pub fn fd_check_h_derivatives(p: &Problem, n: usize, eps: f64) -> f64 {
    let n = n.max(MIN_RESOLUTION);
    let h1 = |s: f64| g1_raw(p, s, s);
    let h2 = |s: f64| g2_raw(p, s, s);
    closed_grid(p.a() + eps, p.b() - eps, n)
        .into_iter()
        .map(|s| {
            let d1 = (h1(s + eps) - h1(s - eps)) / (2.0 * eps);
            let d2 = (h2(s + eps) - h2(s - eps)) / (2.0 * eps);
            let exact = h_prime_raw(p, s);
            (d1 - exact).abs().max((d2 - exact).abs())
        })
        .fold(0.0, f64::max)
}
