//! The coupled map: a discrete predator-prey update inside each region followed
//! by a conflict redistribution between the two regions' normalized profiles.
//!
//! One full step is
//!
//! ```text
//! (P, R) --lv--> (P~, R~) --normalize--> (p, r) --conflict--> (p', r') --denormalize--> (P', R')
//! ```
//!
//! where denormalization multiplies back by the post-update region masses, so
//! the conflict substep only moves population between positions of a region,
//! never between regions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Region, Result};

/// The six rate coefficients shared by both regions.
///
/// Prey: `P1 + P1 (a - b P2 - c P1)`, predator: `P2 + P2 (-d + e P1 - f P2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl ModelParams {
    /// The parameter set used throughout the reference experiments.
    pub const STANDARD: ModelParams = ModelParams {
        a: 0.2,
        b: 0.006,
        c: 0.002,
        d: 0.008,
        e: 0.002,
        f: 0.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Result<Self> {
        let params = ModelParams { a, b, c, d, e, f };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(
                    format!("params.{name}"),
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("e", self.e),
            ("f", self.f),
        ]
    }
}

/// Interaction strength in `[-1, 1]`. Positive values repel the two profiles,
/// negative values attract them, zero decouples the regions.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ConflictAlpha(f64);

impl ConflictAlpha {
    pub const ZERO: ConflictAlpha = ConflictAlpha(0.0);
    pub const REPULSIVE: ConflictAlpha = ConflictAlpha(1.0);
    pub const ATTRACTIVE: ConflictAlpha = ConflictAlpha(-1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (-1.0..=1.0).contains(&value) {
            Ok(ConflictAlpha(value))
        } else {
            Err(Error::invalid(
                "alpha",
                format!("must lie in [-1, 1], got {value}"),
            ))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ConflictAlpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        ConflictAlpha::new(value)
    }
}

impl From<ConflictAlpha> for f64 {
    fn from(alpha: ConflictAlpha) -> f64 {
        alpha.0
    }
}

/// Thresholds below which a region mass or a conflict normalizer counts as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epsilons {
    pub mass: f64,
    pub z: f64,
}

impl Default for Epsilons {
    fn default() -> Self {
        Epsilons {
            mass: 1e-12,
            z: 1e-12,
        }
    }
}

/// Populations of one region, one entry per position.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionState(Vec<f64>);

impl RegionState {
    pub fn new(populations: Vec<f64>) -> Result<Self> {
        if populations.len() < 2 {
            return Err(Error::invalid(
                "region",
                format!("needs at least 2 positions, got {}", populations.len()),
            ));
        }
        if let Some(v) = populations.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::invalid(
                "region",
                format!("populations must be finite and >= 0, got {v}"),
            ));
        }
        Ok(RegionState(populations))
    }

    pub fn pair(prey: f64, predator: f64) -> Result<Self> {
        RegionState::new(vec![prey, predator])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Both regions at discrete time `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState {
    pub region_a: RegionState,
    pub region_b: RegionState,
    pub step: u64,
}

impl CoupledState {
    pub fn new(region_a: RegionState, region_b: RegionState) -> Result<Self> {
        if region_a.len() != region_b.len() {
            return Err(Error::invalid(
                "state",
                format!(
                    "regions differ in length ({} vs {})",
                    region_a.len(),
                    region_b.len()
                ),
            ));
        }
        Ok(CoupledState {
            region_a,
            region_b,
            step: 0,
        })
    }

    /// Prey-predator pairs for both regions, at step 0.
    pub fn from_pairs(a: [f64; 2], b: [f64; 2]) -> Result<Self> {
        CoupledState::new(
            RegionState::pair(a[0], a[1])?,
            RegionState::pair(b[0], b[1])?,
        )
    }

    /// `(P1, P2, R1, R2)` layout, at step 0.
    pub fn from_array(x: [f64; 4]) -> Result<Self> {
        CoupledState::from_pairs([x[0], x[1]], [x[2], x[3]])
    }

    /// `(P1, P2, R1, R2)`; only meaningful for prey-predator regions.
    pub fn to_array(&self) -> [f64; 4] {
        let a = self.region_a.as_slice();
        let b = self.region_b.as_slice();
        [a[0], a[1], b[0], b[1]]
    }

    pub fn region(&self, region: Region) -> &RegionState {
        match region {
            Region::A => &self.region_a,
            Region::B => &self.region_b,
        }
    }
}

/// Nonnegative coordinates summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticVector(Vec<f64>);

/// Tolerance on the coordinate sum of a [`StochasticVector`].
pub const STOCHASTIC_SUM_TOL: f64 = 1e-12;

impl StochasticVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("stochastic vector", "empty"));
        }
        if let Some(v) = coords.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(
                "stochastic vector",
                format!("coordinate {v} outside [0, 1]"),
            ));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_SUM_TOL {
            return Err(Error::invalid(
                "stochastic vector",
                format!("coordinates sum to {sum}"),
            ));
        }
        Ok(StochasticVector(coords))
    }

    /// Divides nonnegative weights by their sum.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid(
                "weights",
                "need finite nonnegative entries with a positive sum",
            ));
        }
        Ok(StochasticVector(
            weights.iter().map(|w| w / total).collect(),
        ))
    }

    pub fn uniform(n: usize) -> Self {
        StochasticVector(vec![1.0 / n as f64; n])
    }

    /// Uniform over `support`, zero elsewhere.
    pub fn uniform_on(n: usize, support: &[usize]) -> Self {
        let mut v = vec![0.0; n];
        let m = support.len() as f64;
        for &i in support {
            v[i] = 1.0 / m;
        }
        StochasticVector(v)
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        StochasticVector(coords)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &StochasticVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(x, y)| x * y).sum()
    }

    pub fn max_abs_diff(&self, other: &StochasticVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Normalized profiles of both regions together with the masses that undo the
/// normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedPair {
    pub p: StochasticVector,
    pub r: StochasticVector,
    pub mass_a: f64,
    pub mass_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConflictStepInfo {
    /// `1 - alpha * inner`
    pub z: f64,
    /// `(p, r)`
    pub inner: f64,
}

/// Side effects of one full step.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepEvents {
    /// Coordinates that went negative in the predator-prey update and were set to 0.
    pub clamped: Vec<(Region, usize)>,
    /// The conflict substep was skipped because a region had no mass.
    pub conflict_skipped: bool,
}

/// One predator-prey update of a two-position region. Negative results are
/// clamped to zero; their indices are returned.
pub fn lv_step(params: &ModelParams, state: &RegionState) -> Result<(RegionState, Vec<usize>)> {
    let s = state.as_slice();
    if s.len() != 2 {
        return Err(Error::invalid(
            "region",
            format!("predator-prey update needs 2 positions, got {}", s.len()),
        ));
    }
    let (prey, pred) = (s[0], s[1]);
    let next = [
        prey + prey * (params.a - params.b * pred - params.c * prey),
        pred + pred * (-params.d + params.e * prey - params.f * pred),
    ];
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence {
            step: 0,
            values: next.to_vec(),
        });
    }
    let mut clamped = Vec::new();
    let mut out = next.to_vec();
    for (i, v) in out.iter_mut().enumerate() {
        if *v < 0.0 {
            *v = 0.0;
            clamped.push(i);
        }
    }
    Ok((RegionState(out), clamped))
}

pub fn normalize(state: &CoupledState, eps: &Epsilons) -> Result<NormalizedPair> {
    let mass_a = state.region_a.mass();
    if !(mass_a > eps.mass) {
        return Err(Error::ExtinctRegion(Region::A));
    }
    let mass_b = state.region_b.mass();
    if !(mass_b > eps.mass) {
        return Err(Error::ExtinctRegion(Region::B));
    }
    let scale = |xs: &[f64], m: f64| xs.iter().map(|x| x / m).collect::<Vec<_>>();
    Ok(NormalizedPair {
        p: StochasticVector::from_raw(scale(state.region_a.as_slice(), mass_a)),
        r: StochasticVector::from_raw(scale(state.region_b.as_slice(), mass_b)),
        mass_a,
        mass_b,
    })
}

/// One conflict composition:
/// `p'_i = p_i (1 - alpha r_i) / z`, `r'_i = r_i (1 - alpha p_i) / z`,
/// `z = 1 - alpha (p, r)`.
pub fn conflict_compose(
    p: &StochasticVector,
    r: &StochasticVector,
    alpha: ConflictAlpha,
    z_eps: f64,
) -> Result<(StochasticVector, StochasticVector, ConflictStepInfo)> {
    if p.len() != r.len() {
        return Err(Error::invalid(
            "conflict pair",
            format!("lengths differ ({} vs {})", p.len(), r.len()),
        ));
    }
    let al = alpha.value();
    let inner = p.dot(r);
    let z = 1.0 - al * inner;
    if z.abs() <= z_eps {
        return Err(Error::DegenerateNormalizer { z, iteration: None });
    }
    let (ps, rs) = (p.as_slice(), r.as_slice());
    // `1 - alpha x` is nonnegative for |alpha| <= 1 and x <= 1; the clamp keeps
    // a coordinate rounded to just above 1 from flipping its opponent's sign.
    let factor = |x: f64| (1.0 - al * x).max(0.0);
    let p_next = ps
        .iter()
        .zip(rs)
        .map(|(pi, ri)| pi * factor(*ri) / z)
        .collect();
    let r_next = rs
        .iter()
        .zip(ps)
        .map(|(ri, pi)| ri * factor(*pi) / z)
        .collect();
    Ok((
        StochasticVector(p_next),
        StochasticVector(r_next),
        ConflictStepInfo { z, inner },
    ))
}

pub fn denormalize(pair: &NormalizedPair, step: u64) -> CoupledState {
    let scale =
        |v: &StochasticVector, m: f64| RegionState(v.as_slice().iter().map(|x| x * m).collect());
    CoupledState {
        region_a: scale(&pair.p, pair.mass_a),
        region_b: scale(&pair.r, pair.mass_b),
        step,
    }
}

/// One application of the coupled map.
///
/// At `alpha = 0` the conflict substep is the identity and is not evaluated, so
/// the result is bit-for-bit two independent predator-prey updates.
pub fn full_step(
    state: &CoupledState,
    params: &ModelParams,
    alpha: ConflictAlpha,
    eps: &Epsilons,
) -> Result<(CoupledState, StepEvents)> {
    let with_step = |e: Error| match e {
        Error::Divergence { values, .. } => Error::Divergence {
            step: state.step + 1,
            values,
        },
        Error::DegenerateNormalizer { z, .. } => Error::DegenerateNormalizer {
            z,
            iteration: Some(state.step + 1),
        },
        other => other,
    };

    let (lv_a, clamped_a) = lv_step(params, &state.region_a).map_err(with_step)?;
    let (lv_b, clamped_b) = lv_step(params, &state.region_b).map_err(with_step)?;
    let mut events = StepEvents {
        clamped: clamped_a
            .into_iter()
            .map(|i| (Region::A, i))
            .chain(clamped_b.into_iter().map(|i| (Region::B, i)))
            .collect(),
        conflict_skipped: false,
    };
    let next_step = state.step + 1;
    let updated = CoupledState {
        region_a: lv_a,
        region_b: lv_b,
        step: next_step,
    };
    if alpha.value() == 0.0 {
        return Ok((updated, events));
    }

    let pair = match normalize(&updated, eps) {
        Ok(pair) => pair,
        Err(Error::ExtinctRegion(_)) => {
            events.conflict_skipped = true;
            return Ok((updated, events));
        }
        Err(e) => return Err(e),
    };
    let (p, r, _) = conflict_compose(&pair.p, &pair.r, alpha, eps.z).map_err(with_step)?;
    let next = denormalize(
        &NormalizedPair {
            p,
            r,
            mass_a: pair.mass_a,
            mass_b: pair.mass_b,
        },
        next_step,
    );
    Ok((next, events))
}

/// Iterator over successive states of the coupled map (excluding the start).
/// Yields at most one error, after which it is exhausted.
pub struct Orbit {
    state: CoupledState,
    params: ModelParams,
    alpha: ConflictAlpha,
    eps: Epsilons,
    failed: bool,
}

impl Orbit {
    pub fn new(
        state0: CoupledState,
        params: ModelParams,
        alpha: ConflictAlpha,
        eps: Epsilons,
    ) -> Self {
        Orbit {
            state: state0,
            params,
            alpha,
            eps,
            failed: false,
        }
    }
}

impl Iterator for Orbit {
    type Item = Result<(CoupledState, StepEvents)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        match full_step(&self.state, &self.params, self.alpha, &self.eps) {
            Ok((next, events)) => {
                self.state = next.clone();
                Some(Ok((next, events)))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

/// A simulated run. `events[k]` belongs to the step that produced `states[k]`;
/// `events[0]` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<CoupledState>,
    pub events: Vec<StepEvents>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn single(state: CoupledState) -> Self {
        Trajectory {
            states: vec![state],
            events: vec![StepEvents::default()],
        }
    }
}

pub fn simulate(
    state0: &CoupledState,
    params: &ModelParams,
    alpha: ConflictAlpha,
    steps: u64,
    eps: &Epsilons,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::invalid("steps", "must be at least 1"));
    }
    let mut traj = Trajectory::single(state0.clone());
    traj.states.reserve(steps as usize);
    traj.events.reserve(steps as usize);
    for item in Orbit::new(state0.clone(), *params, alpha, *eps).take(steps as usize) {
        let (state, events) = item?;
        traj.states.push(state);
        traj.events.push(events);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    const STD: ModelParams = ModelParams::STANDARD;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn lv_step_hand_evaluation() {
        // 3 + 3(0.2 - 0.03 - 0.006) = 3.492, 5 + 5(-0.008 + 0.006) = 4.99
        let (next, clamped) = lv_step(&STD, &RegionState::pair(3.0, 5.0).unwrap()).unwrap();
        assert!(close(next.as_slice()[0], 3.492, 1e-12));
        assert!(close(next.as_slice()[1], 4.99, 1e-12));
        assert!(clamped.is_empty());
    }

    #[test]
    fn lv_step_zero_and_interior_fixed_points() {
        let (zero, _) = lv_step(&STD, &RegionState::pair(0.0, 0.0).unwrap()).unwrap();
        assert_eq!(zero.as_slice(), &[0.0, 0.0]);
        let (eq, _) = lv_step(&STD, &RegionState::pair(4.0, 32.0).unwrap()).unwrap();
        assert!(close(eq.as_slice()[0], 4.0, 1e-12));
        assert!(close(eq.as_slice()[1], 32.0, 1e-12));
    }

    #[test]
    fn lv_step_clamps_negative_populations() {
        let (next, clamped) = lv_step(&STD, &RegionState::pair(1.0, 500.0).unwrap()).unwrap();
        assert_eq!(next.as_slice()[0], 0.0);
        assert_eq!(clamped, vec![0]);
    }

    #[test]
    fn lv_step_overflow_is_divergence() {
        let err = lv_step(&STD, &RegionState::pair(1e300, 1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn lv_step_rejects_non_pairs() {
        let three = RegionState::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(lv_step(&STD, &three).is_err());
    }

    #[test]
    fn normalize_divides_by_region_mass() {
        let s = CoupledState::from_pairs([3.492, 4.99], [8.19, 9.94]).unwrap();
        let pair = normalize(&s, &Epsilons::default()).unwrap();
        assert!(close(pair.mass_a, 8.482, 1e-12));
        assert!(close(pair.mass_b, 18.13, 1e-12));
        assert!(close(pair.p.as_slice()[0], 3.492 / 8.482, 1e-15));
        // 3.492 / 8.482 = 0.4116953..., so six printed digits agree only to 2e-6
        assert!(close(pair.p.as_slice()[0], 0.411694, 2e-6));
        assert!(close(pair.r.as_slice()[0], 0.451737, 1e-6));
        assert!(close(pair.r.as_slice()[1], 0.548263, 1e-6));
    }

    #[test]
    fn normalize_extinct_region() {
        let s = CoupledState::from_pairs([0.0, 0.0], [1.0, 1.0]).unwrap();
        assert!(matches!(
            normalize(&s, &Epsilons::default()),
            Err(Error::ExtinctRegion(Region::A))
        ));
        let s = CoupledState::from_pairs([1.0, 0.0], [0.0, 1.0]).unwrap();
        let pair = normalize(&s, &Epsilons::default()).unwrap();
        assert_eq!(pair.p.as_slice(), &[1.0, 0.0]);
        assert_eq!(pair.r.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn conflict_compose_three_positions() {
        // (p, r) = 0.24 + 0.102 + 0.036 = 0.378, z = 0.622
        let p = StochasticVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        let r = StochasticVector::new(vec![0.48, 0.34, 0.18]).unwrap();
        let (pn, rn, info) = conflict_compose(&p, &r, ConflictAlpha::REPULSIVE, 1e-12).unwrap();
        assert!(close(info.z, 0.622, 1e-15));
        assert!(close(info.inner, 0.378, 1e-15));
        let want_p = [0.26 / 0.622, 0.198 / 0.622, 0.164 / 0.622];
        let want_r = [0.24 / 0.622, 0.238 / 0.622, 0.144 / 0.622];
        for i in 0..3 {
            assert!(close(pn.as_slice()[i], want_p[i], 1e-15));
            assert!(close(rn.as_slice()[i], want_r[i], 1e-15));
        }
        assert!(close(pn.as_slice()[0], 0.4180064, 1e-7));
        assert!(close(rn.as_slice()[1], 0.3826366, 1e-7));
    }

    #[test]
    fn conflict_compose_identities() {
        let p = StochasticVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        let r = StochasticVector::new(vec![0.48, 0.34, 0.18]).unwrap();
        let (pn, rn, info) = conflict_compose(&p, &r, ConflictAlpha::ZERO, 1e-12).unwrap();
        assert_eq!((pn, rn, info.z), (p, r, 1.0));

        let p = StochasticVector::new(vec![1.0, 0.0]).unwrap();
        let r = StochasticVector::new(vec![0.0, 1.0]).unwrap();
        let (pn, rn, info) = conflict_compose(&p, &r, ConflictAlpha::REPULSIVE, 1e-12).unwrap();
        assert_eq!((pn, rn, info.z), (p, r, 1.0));
    }

    #[test]
    fn conflict_compose_never_goes_negative_after_rounding() {
        // reachable through rounding in long iterations, not through `new`
        let p = StochasticVector(vec![1.0 + f64::EPSILON, 0.0]);
        let r = StochasticVector::new(vec![1e-20, 1.0]).unwrap();
        let (_, rn, _) = conflict_compose(&p, &r, ConflictAlpha::REPULSIVE, 1e-12).unwrap();
        assert_eq!(rn.as_slice()[0], 0.0);
    }

    #[test]
    fn conflict_compose_degenerate_normalizer() {
        let p = StochasticVector::new(vec![1.0, 0.0]).unwrap();
        let err = conflict_compose(&p, &p, ConflictAlpha::REPULSIVE, 1e-12).unwrap_err();
        assert!(matches!(err, Error::DegenerateNormalizer { .. }));
    }

    #[test]
    fn denormalize_definition() {
        let pair = NormalizedPair {
            p: StochasticVector::new(vec![0.5, 0.5]).unwrap(),
            r: StochasticVector::new(vec![0.25, 0.75]).unwrap(),
            mass_a: 8.0,
            mass_b: 4.0,
        };
        let s = denormalize(&pair, 0);
        assert_eq!(s.to_array(), [4.0, 4.0, 1.0, 3.0]);

        let pair = NormalizedPair {
            p: StochasticVector::new(vec![1.0, 0.0]).unwrap(),
            r: StochasticVector::new(vec![1.0, 0.0]).unwrap(),
            mass_a: 7.0,
            mass_b: 7.0,
        };
        assert_eq!(denormalize(&pair, 0).to_array(), [7.0, 0.0, 7.0, 0.0]);
    }

    #[test]
    fn full_step_alpha_zero_is_two_lv_updates() {
        let s = CoupledState::from_pairs([3.0, 5.0], [7.0, 10.0]).unwrap();
        let (next, events) =
            full_step(&s, &STD, ConflictAlpha::ZERO, &Epsilons::default()).unwrap();
        let (a, _) = lv_step(&STD, &s.region_a).unwrap();
        let (b, _) = lv_step(&STD, &s.region_b).unwrap();
        assert_eq!(next.region_a, a);
        assert_eq!(next.region_b, b);
        assert_eq!(next.step, 1);
        assert_eq!(events, StepEvents::default());
    }

    #[test]
    fn full_step_skips_conflict_for_extinct_region() {
        let s = CoupledState::from_pairs([3.0, 5.0], [0.0, 0.0]).unwrap();
        let alpha = ConflictAlpha::new(0.5).unwrap();
        let (next, events) = full_step(&s, &STD, alpha, &Epsilons::default()).unwrap();
        assert!(events.conflict_skipped);
        let (a, _) = lv_step(&STD, &s.region_a).unwrap();
        assert_eq!(next.region_a, a);
        assert_eq!(next.region_b.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn full_step_keeps_symmetric_states_symmetric() {
        let mut s = CoupledState::from_pairs([3.0, 10.0], [3.0, 10.0]).unwrap();
        let alpha = ConflictAlpha::new(0.3).unwrap();
        for _ in 0..500 {
            s = full_step(&s, &STD, alpha, &Epsilons::default()).unwrap().0;
            assert_eq!(s.region_a, s.region_b);
        }
    }

    #[test]
    fn full_step_attaches_step_to_divergence() {
        let mut s = CoupledState::from_pairs([1e300, 1.0], [1.0, 1.0]).unwrap();
        s.step = 41;
        let err = full_step(
            &s,
            &STD,
            ConflictAlpha::new(0.1).unwrap(),
            &Epsilons::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Divergence { step: 42, .. }));
    }

    #[test]
    fn simulate_rejects_zero_steps() {
        let s = CoupledState::from_pairs([4.0, 32.0], [4.0, 32.0]).unwrap();
        assert!(simulate(&s, &STD, ConflictAlpha::ZERO, 0, &Epsilons::default()).is_err());
    }

    #[test]
    fn simulate_length_and_start() {
        let s = CoupledState::from_pairs([3.0, 5.0], [7.0, 10.0]).unwrap();
        let t = simulate(
            &s,
            &STD,
            ConflictAlpha::new(0.01).unwrap(),
            25,
            &Epsilons::default(),
        )
        .unwrap();
        assert_eq!(t.len(), 26);
        assert_eq!(t.events.len(), 26);
        assert_eq!(t.states[0], s);
        assert_eq!(t.states[25].step, 25);
    }

    #[test]
    fn alpha_validation() {
        assert!(ConflictAlpha::new(1.5).is_err());
        assert!(ConflictAlpha::new(f64::NAN).is_err());
        assert!(ConflictAlpha::new(-1.0).is_ok());
        assert!(ModelParams::new(0.2, -0.1, 0.0, 0.0, 0.0, 0.0).is_err());
    }
}
