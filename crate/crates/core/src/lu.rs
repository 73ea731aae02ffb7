//! Dense LU factorization with partial pivoting, row-major storage.

/// `sign * exp(ln_abs)`; `sign` is `0.0` for a singular matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    pub sign: f64,
    pub ln_abs: f64,
}

impl Determinant {
    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    data: Vec<f64>,
    perm: Vec<usize>,
    swaps_odd: bool,
    singular: bool,
}

impl Lu {
    /// Factors the `n x n` row-major matrix in place.
    pub fn factor(mut data: Vec<f64>, n: usize) -> Lu {
        assert_eq!(data.len(), n * n, "matrix must be n x n");
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps_odd = false;
        let mut singular = false;

        for k in 0..n {
            let (pivot_row, pivot_abs) = (k..n)
                .map(|i| (i, data[i * n + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pivot_abs == 0.0 || !pivot_abs.is_finite() {
                singular = true;
                continue;
            }
            if pivot_row != k {
                for j in 0..n {
                    data.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
                swaps_odd = !swaps_odd;
            }
            let (head, tail) = data.split_at_mut((k + 1) * n);
            let pivot = &head[k * n..];
            let inv = 1.0 / pivot[k];
            for row in tail.chunks_exact_mut(n) {
                let l = row[k] * inv;
                row[k] = l;
                if l != 0.0 {
                    for (x, &u) in row[k + 1..].iter_mut().zip(&pivot[k + 1..n]) {
                        *x -= l * u;
                    }
                }
            }
        }

        Lu {
            n,
            data,
            perm,
            swaps_odd,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn determinant(&self) -> Determinant {
        if self.singular {
            return Determinant {
                sign: 0.0,
                ln_abs: f64::NEG_INFINITY,
            };
        }
        let mut sign = if self.swaps_odd { -1.0 } else { 1.0 };
        let mut ln_abs = 0.0;
        for k in 0..self.n {
            let d = self.data[k * self.n + k];
            if d < 0.0 {
                sign = -sign;
            }
            ln_abs += d.abs().ln();
        }
        Determinant { sign, ln_abs }
    }

    /// Solves `A x = rhs`; `None` when the factorization hit a zero pivot.
    pub fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        if self.singular {
            return None;
        }
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&i| rhs[i]).collect();
        for i in 0..n {
            let row = &self.data[i * n..i * n + i];
            let acc: f64 = row.iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= acc;
        }
        for i in (0..n).rev() {
            let row = &self.data[i * n..(i + 1) * n];
            let acc: f64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(u, y)| u * y)
                .sum();
            x[i] = (x[i] - acc) / row[i];
        }
        Some(x)
    }
}
