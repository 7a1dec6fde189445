//! Deterministic sample-point generation: boundary-inset grids and a
//! low-discrepancy sequence. Grids can hide symmetry cancellations, so
//! verification pipelines append a few quasi-random interior points.

/// Default relative margin kept away from each region boundary.
pub const DEFAULT_MARGIN: f64 = 0.01;

/// `count` evenly spaced points across `(lo, hi)`, inset from both ends by
/// `margin` (a fraction of the width). `count == 1` yields the midpoint.
pub fn axis_points(lo: f64, hi: f64, count: usize, margin: f64) -> Vec<f64> {
    assert!(lo < hi, "interval must be nonempty");
    assert!(count >= 1);
    let w = hi - lo;
    let (lo, hi) = (lo + margin * w, hi - margin * w);
    if count == 1 {
        return vec![(lo + hi) / 2.0];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Uniform grid over a box, `per_axis` points per axis, inset by `margin`.
pub fn grid(bounds: &[(f64, f64)], per_axis: usize, margin: f64) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = bounds
        .iter()
        .map(|&(lo, hi)| axis_points(lo, hi, per_axis, margin))
        .collect();
    let mut out = vec![vec![]];
    for axis in &axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for partial in &out {
            for &x in axis {
                let mut p = partial.clone();
                p.push(x);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// `count` points of the R_d low-discrepancy sequence (additive recurrence
/// on the plastic-constant powers), scaled into the interior of the box.
/// Fully deterministic.
pub fn quasirandom(bounds: &[(f64, f64)], count: usize) -> Vec<Vec<f64>> {
    let d = bounds.len();
    // unique real root > 1 of x^(d+1) = x + 1
    let mut phi = 1.5f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    let alphas: Vec<f64> = (1..=d).map(|i| (1.0 / phi).powi(i as i32)).collect();
    (0..count)
        .map(|k| {
            bounds
                .iter()
                .zip(&alphas)
                .map(|(&(lo, hi), &a)| {
                    let frac = (0.5 + a * (k + 1) as f64).fract();
                    lo + (hi - lo) * frac
                })
                .collect()
        })
        .collect()
}

/// The default verification sample set: an inset grid plus 32 quasi-random
/// interior points.
pub fn default_samples(bounds: &[(f64, f64)], per_axis: usize) -> Vec<Vec<f64>> {
    let mut pts = grid(bounds, per_axis, DEFAULT_MARGIN);
    pts.extend(quasirandom(bounds, 32));
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_and_margins() {
        let pts = grid(&[(0.0, 1.0), (-1.0, 1.0)], 5, 0.01);
        assert_eq!(pts.len(), 25);
        for p in &pts {
            assert!(p[0] >= 0.01 && p[0] <= 0.99);
            assert!(p[1] >= -0.98 && p[1] <= 0.98);
        }
    }

    #[test]
    fn quasirandom_is_interior_and_deterministic() {
        let a = quasirandom(&[(0.0, 2.0), (5.0, 6.0)], 100);
        let b = quasirandom(&[(0.0, 2.0), (5.0, 6.0)], 100);
        assert_eq!(a, b);
        for p in &a {
            assert!(p[0] > 0.0 && p[0] < 2.0);
            assert!(p[1] > 5.0 && p[1] < 6.0);
        }
    }
}
