//! Nyström discretization of `u(t) = lambda * integral_a^b G(t,s) u(s) ds`
//! and the smallest positive `lambda` admitting a nontrivial solution.
//!
//! The operator is sampled with the composite midpoint rule. Solvability is
//! detected through sign changes of `det(I - lambda K)` on a geometric scan,
//! refined by bisection; the null vector comes from inverse iteration.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::bounds::{lyapunov_threshold, max_abs_green};
use crate::error::{Error, Result};
use crate::green::{g1_raw, g2_raw};
use crate::lu::{Determinant, Lu};
use crate::problem::Problem;

pub const MIN_KERNEL_NODES: usize = 8;
pub const MIN_SEARCH_NODES: usize = 64;

const INVERSE_ITERATION_SHIFT: f64 = 1e-10;
const INVERSE_ITERATION_MAX: usize = 20;
const INVERSE_ITERATION_TOL: f64 = 1e-10;

/// `K[i][j] = w_j * G(t_i, t_j)`, row-major.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub entries: Vec<f64>,
}

impl KernelMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// `I - lambda K` as a fresh row-major buffer.
    fn shifted(&self, lambda: f64) -> Vec<f64> {
        let n = self.n;
        let mut m: Vec<f64> = self.entries.iter().map(|k| -lambda * k).collect();
        for i in 0..n {
            m[i * n + i] += 1.0;
        }
        m
    }
}

/// Midpoint nodes `t_i = a + (i - 1/2) h`, equal weights `h = (b - a)/n`;
/// diagonal entries average the two branch values.
pub fn assemble_kernel(p: &Problem, n: usize) -> Result<KernelMatrix> {
    if n < MIN_KERNEL_NODES {
        return Err(Error::Domain(format!(
            "kernel needs at least {MIN_KERNEL_NODES} nodes, got {n}"
        )));
    }
    let h = p.length() / n as f64;
    let nodes: Vec<f64> = (0..n).map(|i| p.a() + (i as f64 + 0.5) * h).collect();
    let weights = vec![h; n];
    let entries: Vec<f64> = nodes
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, &t)| {
            let nodes = &nodes;
            (0..n).map(move |j| {
                let s = nodes[j];
                let g = match j.cmp(&i) {
                    std::cmp::Ordering::Less => g1_raw(p, t, s),
                    std::cmp::Ordering::Greater => g2_raw(p, t, s),
                    std::cmp::Ordering::Equal => 0.5 * (g1_raw(p, t, s) + g2_raw(p, t, s)),
                };
                h * g
            })
        })
        .collect();
    Ok(KernelMatrix {
        n,
        nodes,
        weights,
        entries,
    })
}

pub fn det_i_minus_lambda_k(k: &KernelMatrix, lambda: f64) -> Determinant {
    Lu::factor(k.shifted(lambda), k.n).determinant()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Scan ceiling; `None` means `50 pi^2 / (b - a)^2`.
    pub lambda_max: Option<f64>,
    /// Absolute width of the final bisection bracket.
    pub tol: f64,
    /// Geometric ratio between successive scan points.
    pub ratio: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            lambda_max: None,
            tol: 1e-8,
            ratio: 1.05,
        }
    }
}

pub fn default_lambda_max(p: &Problem) -> f64 {
    50.0 * PI * PI / (p.length() * p.length())
}

/// First scan point: half the smallest constant potential the Lyapunov
/// bound allows.
pub fn scan_start(p: &Problem) -> f64 {
    0.5 * lyapunov_threshold(p) / p.length()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicValue {
    pub lambda_star: f64,
    pub bracket: (f64, f64),
    pub det_residual: f64,
    /// Near-null vector of `I - lambda* K` at the kernel nodes, max-norm 1,
    /// largest component positive.
    pub eigenvector: Vec<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CharacteristicValue {
    /// Extends the sampled solution to any `t` in `[a, b]` through
    /// `u(t) = lambda* sum_j w_j G(t, t_j) u_j`.
    pub fn extend(&self, p: &Problem, t: f64) -> f64 {
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.eigenvector)
            .map(|((&s, &w), &u)| {
                let g = if s < t {
                    g1_raw(p, t, s)
                } else if t < s {
                    g2_raw(p, t, s)
                } else {
                    0.5 * (g1_raw(p, t, s) + g2_raw(p, t, s))
                };
                w * g * u
            })
            .sum();
        self.lambda_star * sum
    }
}

fn geometric_scan(start: f64, stop: f64, ratio: f64) -> Vec<f64> {
    let mut grid = vec![start];
    let mut x = start;
    while x < stop {
        x = (x * ratio).min(stop);
        grid.push(x);
    }
    grid
}

/// Finds the first sign change of `det(I - lambda K)` on the scan grid.
/// Determinants are evaluated in parallel batches; the answer depends only
/// on the sorted grid.
fn first_sign_change(
    k: &KernelMatrix,
    grid: &[f64],
    trace: &mut Vec<(f64, f64)>,
) -> Option<(f64, f64, f64, f64)> {
    let batch = rayon::current_num_threads().max(1);
    let mut prev: Option<(f64, f64)> = None;
    for chunk in grid.chunks(batch) {
        let signs: Vec<f64> = chunk
            .par_iter()
            .map(|&lam| det_i_minus_lambda_k(k, lam).sign)
            .collect();
        for (&lam, &sign) in chunk.iter().zip(&signs) {
            trace.push((lam, sign));
            if sign == 0.0 {
                return Some((lam, sign, lam, sign));
            }
            if let Some((pl, ps)) = prev {
                if ps != sign {
                    return Some((pl, ps, lam, sign));
                }
            }
            prev = Some((lam, sign));
        }
    }
    None
}

fn normalize(v: &mut [f64]) {
    let (idx, peak) =
        v.iter().enumerate().fold(
            (0, 0.0),
            |acc, (i, &x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc },
        );
    if peak > 0.0 {
        let scale = v[idx].signum() / peak;
        v.iter_mut().for_each(|x| *x *= scale);
    }
}

fn inverse_iteration(k: &KernelMatrix, lambda_star: f64) -> Vec<f64> {
    let mut shift = lambda_star * (1.0 + INVERSE_ITERATION_SHIFT);
    let mut lu = Lu::factor(k.shifted(shift), k.n);
    while lu.is_singular() {
        shift *= 1.0 + 100.0 * INVERSE_ITERATION_SHIFT;
        lu = Lu::factor(k.shifted(shift), k.n);
    }
    let mut x = vec![1.0; k.n];
    for _ in 0..INVERSE_ITERATION_MAX {
        let mut next = match lu.solve(&x) {
            Some(v) if v.iter().all(|y| y.is_finite()) => v,
            _ => break,
        };
        normalize(&mut next);
        let diff = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = next;
        if diff < INVERSE_ITERATION_TOL {
            break;
        }
    }
    x
}

/// Smallest positive characteristic value of the constant-potential problem.
pub fn smallest_characteristic_value(
    p: &Problem,
    n: usize,
    opts: &ScanOptions,
) -> Result<CharacteristicValue> {
    if n < MIN_SEARCH_NODES {
        return Err(Error::Domain(format!(
            "characteristic value search needs at least {MIN_SEARCH_NODES} nodes, got {n}"
        )));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    if opts.ratio.is_nan() || opts.ratio <= 1.0 {
        return Err(Error::Domain(format!(
            "ratio must exceed 1, got {}",
            opts.ratio
        )));
    }
    let lambda_start = scan_start(p);
    let lambda_max = opts.lambda_max.unwrap_or_else(|| default_lambda_max(p));
    if lambda_max.is_nan() || lambda_max <= 2.0 * lambda_start {
        return Err(Error::Domain(format!(
            "lambda_max={lambda_max} must exceed the Lyapunov bound {}",
            2.0 * lambda_start
        )));
    }

    let k = assemble_kernel(p, n)?;
    let grid = geometric_scan(lambda_start, lambda_max, opts.ratio);
    let mut trace = Vec::with_capacity(grid.len());
    let (mut lo, lo_sign, mut hi, _) = match first_sign_change(&k, &grid, &mut trace) {
        Some(b) => b,
        None => {
            return Err(Error::NoSignChange {
                lambda_start,
                lambda_max,
                trace,
            })
        }
    };

    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let sign = det_i_minus_lambda_k(&k, mid).sign;
        if sign == 0.0 {
            lo = mid;
            hi = mid;
        } else if sign == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let lambda_star = 0.5 * (lo + hi);
    let det_residual = det_i_minus_lambda_k(&k, lambda_star).value();
    let eigenvector = inverse_iteration(&k, lambda_star);
    Ok(CharacteristicValue {
        lambda_star,
        bracket: (lo, hi),
        det_residual,
        eigenvector,
        nodes: k.nodes,
        weights: k.weights,
    })
}

/// `10 (b - a) max|G| / n`: allowance for the first-order quadrature error.
pub fn discretization_slack(p: &Problem, n: usize) -> f64 {
    10.0 * p.length() * max_abs_green(p) / n as f64
}

/// `lambda* (b - a) - threshold`; non-negative up to [`discretization_slack`].
pub fn lyapunov_gap(p: &Problem, n: usize, opts: &ScanOptions) -> Result<f64> {
    let cv = smallest_characteristic_value(p, n, opts)?;
    Ok(gap_of(p, &cv))
}

pub fn gap_of(p: &Problem, cv: &CharacteristicValue) -> f64 {
    cv.lambda_star * p.length() - lyapunov_threshold(p)
}
