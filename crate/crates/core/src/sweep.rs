//! Grid evaluation and crossing search.
//!
//! With the `parallel` feature grid points are farmed out to rayon; results
//! always come back in grid order.

use crate::error::Result;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    seq_map(items, f)
}

/// Always sequential; the baseline for benchmarks.
pub fn seq_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
pub fn time_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (points - 1) as f64;
            (0..points)
                .map(|k| if k + 1 == points { stop } else { start + step * k as f64 })
                .collect()
        }
    }
}

/// Locates the first time in `[lo, hi]` at which `g` drops to `threshold`
/// or below, to within `tol`. Returns `None` when `g(lo) ≤ threshold` or
/// `g(hi) > threshold`, i.e. when there is no bracketed crossing.
pub fn bisect_vanishing<G>(g: G, lo: f64, hi: f64, threshold: f64, tol: f64) -> Result<Option<f64>>
where
    G: Fn(f64) -> Result<f64>,
{
    if g(lo)? <= threshold || g(hi)? > threshold {
        return Ok(None);
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if g(mid)? > threshold {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = time_grid(0.0, 2.0, 201);
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[200], 2.0);
        assert!((g[100] - 1.0).abs() < 1e-15);
        assert_eq!(time_grid(1.0, 2.0, 1), vec![1.0]);
    }

    #[test]
    fn map_preserves_order() {
        let xs: Vec<u64> = (0..1000).collect();
        assert_eq!(map(&xs, |x| x * x), seq_map(&xs, |x| x * x));
    }

    #[test]
    fn bisection_finds_crossing() {
        let t = bisect_vanishing(|t| Ok(1.0 - t), 0.0, 3.0, 0.0, 1e-9).unwrap().unwrap();
        assert!((t - 1.0).abs() < 1e-9);
        assert!(bisect_vanishing(|t| Ok(1.0 - t), 2.0, 3.0, 0.0, 1e-9)
            .unwrap()
            .is_none());
        assert!(bisect_vanishing(|_| Ok(1.0), 0.0, 3.0, 0.0, 1e-9).unwrap().is_none());
    }
}
