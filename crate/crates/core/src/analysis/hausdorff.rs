use crate::error::{Error, Result};

fn dist2<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Directed Hausdorff distance `max_a min_b |a - b|`.
///
/// The inner scan stops as soon as a point of `b` is closer than the running
/// maximum, since such an `a` cannot raise the result.
pub fn directed_hausdorff<const D: usize>(a: &[[f64; D]], b: &[[f64; D]]) -> f64 {
    let mut worst2: f64 = 0.0;
    for pa in a {
        let mut nearest2 = f64::INFINITY;
        for pb in b {
            let d2 = dist2(pa, pb);
            if d2 < nearest2 {
                nearest2 = d2;
                if nearest2 <= worst2 {
                    break;
                }
            }
        }
        worst2 = worst2.max(nearest2);
    }
    worst2.sqrt()
}

/// Symmetric Hausdorff distance between two sampled orbits.
pub fn cycle_hausdorff<const D: usize>(a: &[[f64; D]], b: &[[f64; D]]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("point set", "must not be empty"));
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// Largest pairwise Euclidean distance. Quadratic in the number of points.
pub fn point_set_diameter<const D: usize>(points: &[[f64; D]]) -> f64 {
    let mut best2: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best2 = best2.max(dist2(p, q));
        }
    }
    best2.sqrt()
}
