//! Long-run behavior of trajectories and bracketing of the coupling strength
//! at which it changes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{ConflictAlpha, CoupledState, Epsilons, ModelParams, Orbit};
use crate::error::{Error, Region, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub total_steps: u64,
    /// Steps discarded before the tail window; `None` means half of `total_steps`.
    pub transient: Option<u64>,
    /// Max step displacement over the last `fixed_window` steps for a fixed point.
    pub tol_fixed: f64,
    pub fixed_window: u64,
    /// Return distance for a cycle, relative to the extent of the tail window.
    pub tol_cycle: f64,
    pub lag_max: usize,
    pub divergence_cap: f64,
    pub eps: Epsilons,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            total_steps: 70_000,
            transient: None,
            tol_fixed: 1e-8,
            fixed_window: 1000,
            tol_cycle: 1e-3,
            lag_max: 5000,
            divergence_cap: 1e9,
            eps: Epsilons::default(),
        }
    }
}

impl ClassifyOptions {
    pub fn transient_steps(&self) -> u64 {
        self.transient
            .unwrap_or(self.total_steps / 2)
            .min(self.total_steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttractorClass {
    FixedPoint {
        point: [f64; 4],
    },
    Cycle {
        /// Smallest lag whose return distance is within tolerance.
        lag: usize,
        /// The last `lag` states of the run.
        loop_points: Vec<[f64; 4]>,
        /// Diagonal of the bounding box of the tail window.
        extent: f64,
    },
    Divergent {
        step: u64,
    },
    Extinct {
        region: Region,
    },
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttractorTag {
    FixedPoint,
    Cycle,
    Divergent,
    Extinct,
    Undetermined,
}

impl AttractorTag {
    pub fn as_str(self) -> &'static str {
        match self {
            AttractorTag::FixedPoint => "fixed_point",
            AttractorTag::Cycle => "cycle",
            AttractorTag::Divergent => "divergent",
            AttractorTag::Extinct => "extinct",
            AttractorTag::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for AttractorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl AttractorClass {
    pub fn tag(&self) -> AttractorTag {
        match self {
            AttractorClass::FixedPoint { .. } => AttractorTag::FixedPoint,
            AttractorClass::Cycle { .. } => AttractorTag::Cycle,
            AttractorClass::Divergent { .. } => AttractorTag::Divergent,
            AttractorClass::Extinct { .. } => AttractorTag::Extinct,
            AttractorClass::Undetermined => AttractorTag::Undetermined,
        }
    }
}

/// A classified run together with its post-transient states.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub class: AttractorClass,
    /// States from the end of the transient to the end of the run. Empty when
    /// the run diverged.
    pub window: Vec<[f64; 4]>,
}

/// Simulates and classifies. Numerical failures other than divergence are
/// returned as errors; [`classify_attractor`] folds them into `Undetermined`.
pub fn observe(
    state0: &CoupledState,
    params: &ModelParams,
    alpha: ConflictAlpha,
    opts: &ClassifyOptions,
) -> Result<Observation> {
    let transient = opts.transient_steps();
    let diverged = |step| Observation {
        class: AttractorClass::Divergent { step },
        window: Vec::new(),
    };
    let x0 = state0.to_array();
    if exceeds(&x0, opts.divergence_cap) {
        return Ok(diverged(0));
    }

    let mut window = Vec::with_capacity((opts.total_steps - transient + 1) as usize);
    if transient == 0 {
        window.push(x0);
    }
    let orbit = Orbit::new(state0.clone(), *params, alpha, opts.eps);
    for item in orbit.take(opts.total_steps as usize) {
        let state = match item {
            Ok((state, _)) => state,
            Err(Error::Divergence { step, .. }) => return Ok(diverged(step)),
            Err(e) => return Err(e),
        };
        let x = state.to_array();
        if exceeds(&x, opts.divergence_cap) {
            return Ok(diverged(state.step));
        }
        if state.step >= transient {
            window.push(x);
        }
    }

    let class = classify_window(&window, opts);
    Ok(Observation { class, window })
}

pub fn classify_attractor(
    state0: &CoupledState,
    params: &ModelParams,
    alpha: ConflictAlpha,
    opts: &ClassifyOptions,
) -> AttractorClass {
    observe(state0, params, alpha, opts)
        .map(|o| o.class)
        .unwrap_or(AttractorClass::Undetermined)
}

fn exceeds(x: &[f64; 4], cap: f64) -> bool {
    x.iter().any(|v| !v.is_finite() || v.abs() > cap)
}

fn classify_window(window: &[[f64; 4]], opts: &ClassifyOptions) -> AttractorClass {
    let Some(last) = window.last() else {
        return AttractorClass::Undetermined;
    };
    for (region, cols) in [(Region::A, 0..2), (Region::B, 2..4)] {
        let extinct = window
            .iter()
            .all(|x| x[cols.clone()].iter().sum::<f64>() <= opts.eps.mass);
        if extinct {
            return AttractorClass::Extinct { region };
        }
    }

    let fixed_from = window.len().saturating_sub(opts.fixed_window as usize + 1);
    let settled = window[fixed_from..]
        .windows(2)
        .all(|w| max_abs_diff(&w[0], &w[1]) < opts.tol_fixed);
    if settled && window.len() > 1 {
        return AttractorClass::FixedPoint { point: *last };
    }

    let extent = bounding_extent(window);
    let threshold = opts.tol_cycle * extent;
    let max_lag = opts.lag_max.min(window.len().saturating_sub(1));
    for lag in 2..=max_lag {
        let returns = window[lag..]
            .iter()
            .zip(window)
            .all(|(later, earlier)| max_abs_diff(later, earlier) < threshold);
        if returns {
            return AttractorClass::Cycle {
                lag,
                loop_points: window[window.len() - lag..].to_vec(),
                extent,
            };
        }
    }
    AttractorClass::Undetermined
}

fn max_abs_diff(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Diagonal of the axis-aligned bounding box.
pub fn bounding_extent(points: &[[f64; 4]]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        for i in 0..4 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    (0..4).map(|i| (hi[i] - lo[i]).powi(2)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationBracket {
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub class_lo: AttractorTag,
    pub class_hi: AttractorTag,
    /// Midpoint of the final bracket.
    pub alpha_star: f64,
    pub width: f64,
}

/// Bisects on `alpha` between two couplings whose attractors differ in kind,
/// until the bracket is no wider than `resolution`.
pub fn bifurcation_bisect(
    params: &ModelParams,
    state0: &CoupledState,
    alpha_lo: f64,
    alpha_hi: f64,
    resolution: f64,
    opts: &ClassifyOptions,
) -> Result<BifurcationBracket> {
    if !(alpha_lo < alpha_hi) || !(resolution > 0.0) {
        return Err(Error::invalid(
            "bracket",
            format!("need lo < hi and resolution > 0, got [{alpha_lo}, {alpha_hi}] / {resolution}"),
        ));
    }
    let classify = |alpha: f64| -> Result<AttractorTag> {
        Ok(classify_attractor(state0, params, ConflictAlpha::new(alpha)?, opts).tag())
    };
    let mut lo = alpha_lo;
    let mut hi = alpha_hi;
    let class_lo = classify(lo)?;
    let mut class_hi = classify(hi)?;
    if class_lo == class_hi {
        return Err(Error::InvalidBracket(class_lo.to_string()));
    }
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        let tag = classify(mid)?;
        if tag == AttractorTag::Undetermined {
            return Err(Error::UndeterminedMidpoint { alpha: mid });
        }
        if tag == class_lo {
            lo = mid;
        } else {
            hi = mid;
            class_hi = tag;
        }
    }
    Ok(BifurcationBracket {
        alpha_lo: lo,
        alpha_hi: hi,
        class_lo,
        class_hi,
        alpha_star: 0.5 * (lo + hi),
        width: hi - lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const STD: ModelParams = ModelParams::STANDARD;

    fn alpha(v: f64) -> ConflictAlpha {
        ConflictAlpha::new(v).unwrap()
    }

    fn short() -> ClassifyOptions {
        ClassifyOptions {
            total_steps: 20_000,
            ..ClassifyOptions::default()
        }
    }

    #[test]
    fn uncoupled_run_settles_on_interior_point() {
        let s = CoupledState::from_pairs([3.0, 5.0], [7.0, 10.0]).unwrap();
        match classify_attractor(&s, &STD, ConflictAlpha::ZERO, &ClassifyOptions::default()) {
            AttractorClass::FixedPoint { point } => {
                for (g, w) in point.iter().zip([4.0, 32.0, 4.0, 32.0]) {
                    assert!((g - w).abs() < 1e-6, "{point:?}");
                }
            }
            other => panic!("expected fixed point, got {other:?}"),
        }
    }

    #[test]
    fn strong_coupling_run_is_a_cycle() {
        let s = CoupledState::from_pairs([3.0, 10.0], [5.0, 20.0]).unwrap();
        let class = classify_attractor(&s, &STD, alpha(0.05), &ClassifyOptions::default());
        match class {
            AttractorClass::Cycle {
                lag,
                loop_points,
                extent,
            } => {
                assert!(lag >= 2);
                assert_eq!(loop_points.len(), lag);
                assert!(extent > 1.0);
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn extinct_region_is_reported() {
        let s = CoupledState::from_pairs([3.0, 5.0], [0.0, 0.0]).unwrap();
        assert_eq!(
            classify_attractor(&s, &STD, alpha(0.01), &short()),
            AttractorClass::Extinct { region: Region::B }
        );
    }

    #[test]
    fn divergence_is_reported_with_step() {
        // prey without predators or crowding grows geometrically
        let p = ModelParams::new(0.5, 0.0, 0.0, 0.1, 0.0, 0.0).unwrap();
        let s = CoupledState::from_pairs([1.0, 1.0], [1.0, 1.0]).unwrap();
        match classify_attractor(&s, &p, ConflictAlpha::ZERO, &short()) {
            AttractorClass::Divergent { step } => assert_eq!(step, 52),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn period_two_orbit_is_found_exactly() {
        let window: Vec<[f64; 4]> = (0..200)
            .map(|n| {
                if n % 2 == 0 {
                    [1.0, 2.0, 3.0, 4.0]
                } else {
                    [2.0, 1.0, 4.0, 3.0]
                }
            })
            .collect();
        match classify_window(&window, &ClassifyOptions::default()) {
            AttractorClass::Cycle { lag, .. } => assert_eq!(lag, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classification_is_deterministic() {
        let s = CoupledState::from_pairs([3.0, 5.0], [7.0, 10.0]).unwrap();
        let a = classify_attractor(&s, &STD, alpha(0.05), &short());
        let b = classify_attractor(&s, &STD, alpha(0.05), &short());
        assert_eq!(a, b);
    }

    #[test]
    fn bisect_rejects_uniform_bracket() {
        let s = CoupledState::from_pairs([3.0, 10.0], [5.0, 20.0]).unwrap();
        let err = bifurcation_bisect(&STD, &s, 0.0, 0.001, 1e-4, &ClassifyOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::InvalidBracket(_)));
    }

    #[test]
    fn bisect_returns_wide_enough_bracket_unchanged() {
        let s = CoupledState::from_pairs([3.0, 10.0], [5.0, 20.0]).unwrap();
        let b = bifurcation_bisect(&STD, &s, 0.0, 0.05, 0.1, &ClassifyOptions::default()).unwrap();
        assert_eq!((b.alpha_lo, b.alpha_hi), (0.0, 0.05));
        assert_eq!(b.class_lo, AttractorTag::FixedPoint);
        assert_eq!(b.class_hi, AttractorTag::Cycle);
    }
}
