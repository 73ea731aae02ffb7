//! Parameter grids and the thread pool used by sweeps.

/// Orders `1.05, 1.10, ..., 2.00`.
pub fn standard_alphas() -> Vec<f64> {
    (1..=20).map(|k| (100 + 5 * k) as f64 / 100.0).collect()
}

pub const STANDARD_LENGTHS: [f64; 7] = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

/// `steps` evenly spaced points from `min` to `max` inclusive; `[min]` when
/// `steps == 1`.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let h = (max - min) / (steps - 1) as f64;
            (0..steps)
                .map(|i| {
                    if i == steps - 1 {
                        max
                    } else {
                        min + h * i as f64
                    }
                })
                .collect()
        }
    }
}

/// Thread count from `CFLK_THREADS`; `0` or unset means rayon's default.
pub fn thread_cap() -> usize {
    std::env::var("CFLK_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

/// Runs `f` on a pool capped by `CFLK_THREADS`.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let threads = thread_cap();
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_alphas_are_clean_decimals() {
        let a = standard_alphas();
        assert_eq!(a.len(), 20);
        assert_eq!(a[0], 1.05);
        assert_eq!(a[1], 1.1);
        assert_eq!(a[19], 2.0);
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
        let v = linspace(0.9, 1.1, 21);
        assert_eq!(v.len(), 21);
        assert_eq!(v[0], 0.9);
        assert_eq!(v[20], 1.1);
    }
}
