//! Iterated conflict composition between two stochastic vectors, and the
//! closed-form descriptions of its limits.
//!
//! For `alpha > 0` (repulsion) two different starting vectors end up with
//! disjoint supports; at `alpha = 1` the limit depends only on the difference
//! `d = p - r`. For `alpha < 0` (attraction) both vectors converge to the same
//! limit, and at `alpha = -1` that limit is uniform on a common support whose
//! complement is only partially characterized (see [`prop1_vanishes`] and
//! [`prop2_vanishes`]).

use crate::dynamics::{conflict_compose, ConflictAlpha, StochasticVector};
use crate::error::{Error, Result};

/// Below this magnitude a difference coordinate counts as zero when deciding
/// whether `p` and `r` coincide.
const PROFILE_EPS: f64 = 1e-12;

/// `d_i = p_i - r_i` split by sign.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceProfile {
    pub d: Vec<f64>,
    pub n_plus: Vec<usize>,
    pub n_minus: Vec<usize>,
    /// Sum of the positive differences (equal to minus the sum of the negative ones).
    pub total: f64,
}

pub fn difference_profile(p: &StochasticVector, r: &StochasticVector) -> Result<DifferenceProfile> {
    check_len(p, r)?;
    let d: Vec<f64> = p
        .as_slice()
        .iter()
        .zip(r.as_slice())
        .map(|(a, b)| a - b)
        .collect();
    if d.iter().all(|x| x.abs() <= PROFILE_EPS) {
        return Err(Error::DegenerateProfile);
    }
    let n_plus: Vec<usize> = (0..d.len()).filter(|&i| d[i] > 0.0).collect();
    let n_minus: Vec<usize> = (0..d.len()).filter(|&i| d[i] < 0.0).collect();
    let total = n_plus.iter().map(|&i| d[i]).sum();
    Ok(DifferenceProfile {
        d,
        n_plus,
        n_minus,
        total,
    })
}

/// Limits of the purely repulsive (`alpha = 1`) iteration:
/// `p_inf = d / D` on the positive part, `r_inf = -d / D` on the negative part.
pub fn closed_form_repulsive(
    p: &StochasticVector,
    r: &StochasticVector,
) -> Result<(StochasticVector, StochasticVector)> {
    let profile = difference_profile(p, r)?;
    let n = profile.d.len();
    let mut p_inf = vec![0.0; n];
    let mut r_inf = vec![0.0; n];
    for &i in &profile.n_plus {
        p_inf[i] = profile.d[i] / profile.total;
    }
    for &i in &profile.n_minus {
        r_inf[i] = -profile.d[i] / profile.total;
    }
    Ok((
        StochasticVector::from_raw(p_inf),
        StochasticVector::from_raw(r_inf),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitClass {
    Orthogonal,
    Equal,
    /// Neither orthogonal nor equal. Not expected for converged runs.
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub p_limit: StochasticVector,
    pub r_limit: StochasticVector,
    pub iterations: u64,
    pub converged: bool,
    pub classification: LimitClass,
    pub final_inner: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateOptions {
    /// Stop once no coordinate moves by this much in one step.
    pub tol: f64,
    pub max_iter: u64,
    /// Inner product at or below which the limits count as orthogonal.
    pub ortho_tol: f64,
    /// Max-norm distance at or below which the limits count as equal.
    pub equal_tol: f64,
    pub z_eps: f64,
}

impl Default for IterateOptions {
    fn default() -> Self {
        IterateOptions {
            tol: 1e-12,
            max_iter: 1_000_000,
            ortho_tol: 1e-8,
            equal_tol: 1e-8,
            z_eps: 1e-12,
        }
    }
}

/// Applies [`conflict_compose`] until the step displacement drops below
/// `opts.tol` or `opts.max_iter` steps have run.
pub fn iterate_conflict(
    p0: &StochasticVector,
    r0: &StochasticVector,
    alpha: ConflictAlpha,
    opts: &IterateOptions,
) -> Result<LimitReport> {
    check_len(p0, r0)?;
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let mut p = p0.clone();
    let mut r = r0.clone();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let (pn, rn, _) = conflict_compose(&p, &r, alpha, opts.z_eps).map_err(|e| match e {
            Error::DegenerateNormalizer { z, .. } => Error::DegenerateNormalizer {
                z,
                iteration: Some(iterations + 1),
            },
            other => other,
        })?;
        iterations += 1;
        let moved = pn.max_abs_diff(&p).max(rn.max_abs_diff(&r));
        p = pn;
        r = rn;
        if moved < opts.tol {
            converged = true;
            break;
        }
    }
    let final_inner = p.dot(&r);
    let classification = if final_inner <= opts.ortho_tol {
        LimitClass::Orthogonal
    } else if p.max_abs_diff(&r) <= opts.equal_tol {
        LimitClass::Equal
    } else {
        LimitClass::Other
    };
    Ok(LimitReport {
        p_limit: p,
        r_limit: r,
        iterations,
        converged,
        classification,
        final_inner,
    })
}

/// `sigma_i = p_i + r_i`, `rho_i = p_i r_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaRho {
    pub sigma: f64,
    pub rho: f64,
}

pub fn sigma_rho(p: &StochasticVector, r: &StochasticVector, i: usize) -> Result<SigmaRho> {
    check_len(p, r)?;
    check_index(i, p.len())?;
    let (pi, ri) = (p.as_slice()[i], r.as_slice()[i]);
    Ok(SigmaRho {
        sigma: pi + ri,
        rho: pi * ri,
    })
}

/// Sufficient condition for coordinate `k` to vanish in the `alpha = -1` limit:
/// `k` is dominated by `i` in both sum and product, strictly in at least one.
pub fn prop1_vanishes(
    p: &StochasticVector,
    r: &StochasticVector,
    i: usize,
    k: usize,
) -> Result<bool> {
    let (si, sk) = pair_terms(p, r, i, k)?;
    Ok((si.sigma >= sk.sigma && si.rho > sk.rho) || (si.sigma > sk.sigma && si.rho >= sk.rho))
}

/// Sufficient condition for coordinate `k` to vanish in the `alpha = -1` limit
/// even though its sum exceeds that of `i`: `sigma_k > sigma_i`,
/// `rho_k < rho_i` and `2 rho_k + sigma_k <= 2 rho_i + sigma_i`.
pub fn prop2_vanishes(
    p: &StochasticVector,
    r: &StochasticVector,
    i: usize,
    k: usize,
) -> Result<bool> {
    let (si, sk) = pair_terms(p, r, i, k)?;
    Ok(
        sk.sigma > si.sigma
            && sk.rho < si.rho
            && 2.0 * sk.rho + sk.sigma <= 2.0 * si.rho + si.sigma,
    )
}

fn pair_terms(
    p: &StochasticVector,
    r: &StochasticVector,
    i: usize,
    k: usize,
) -> Result<(SigmaRho, SigmaRho)> {
    if i == k {
        return Err(Error::invalid(
            "index pair",
            format!("i and k must differ (both {i})"),
        ));
    }
    Ok((sigma_rho(p, r, i)?, sigma_rho(p, r, k)?))
}

/// Partition of the positions by whether both attractive limits vanish there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSets {
    /// Positions where both limits are zero.
    pub s0: Vec<usize>,
    /// The common support of the limits.
    pub s_inf: Vec<usize>,
    pub m: usize,
}

/// Uniform limit of the purely attractive iteration together with its support.
///
/// The support is read off the iterated limit (coordinates below `tol * 1e3`
/// in both vectors are dropped); the returned vector is the exact uniform
/// distribution on it, checked against the iterate to within `10 * tol`.
pub fn attractive_limit(
    p: &StochasticVector,
    r: &StochasticVector,
    tol: f64,
    max_iter: u64,
) -> Result<(StochasticVector, SupportSets)> {
    check_len(p, r)?;
    if !(p.dot(r) > 0.0) {
        return Err(Error::invalid(
            "conflict pair",
            "attractive limit needs (p, r) > 0",
        ));
    }
    let opts = IterateOptions {
        tol,
        max_iter,
        ..IterateOptions::default()
    };
    let report = iterate_conflict(p, r, ConflictAlpha::ATTRACTIVE, &opts)?;
    if !report.converged {
        return Err(Error::UndeterminedSupport {
            iterations: report.iterations,
        });
    }
    let cut = tol * 1e3;
    let n = p.len();
    let (ps, rs) = (report.p_limit.as_slice(), report.r_limit.as_slice());
    let (s0, s_inf): (Vec<usize>, Vec<usize>) = (0..n).partition(|&k| ps[k] < cut && rs[k] < cut);
    let m = s_inf.len();
    let uniform = StochasticVector::uniform_on(n, &s_inf);
    let gap = uniform
        .max_abs_diff(&report.p_limit)
        .max(uniform.max_abs_diff(&report.r_limit));
    if m == 0 || gap > 10.0 * tol {
        return Err(Error::UndeterminedSupport {
            iterations: report.iterations,
        });
    }
    Ok((uniform, SupportSets { s0, s_inf, m }))
}

fn check_len(p: &StochasticVector, r: &StochasticVector) -> Result<()> {
    if p.len() != r.len() {
        return Err(Error::invalid(
            "conflict pair",
            format!("lengths differ ({} vs {})", p.len(), r.len()),
        ));
    }
    Ok(())
}

fn check_index(i: usize, len: usize) -> Result<()> {
    if i >= len {
        return Err(Error::IndexOutOfRange { index: i, len });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[f64]) -> StochasticVector {
        StochasticVector::new(v.to_vec()).unwrap()
    }

    fn assert_vec_close(got: &StochasticVector, want: &[f64], tol: f64) {
        for (g, w) in got.as_slice().iter().zip(want) {
            assert!((g - w).abs() <= tol, "{:?} vs {:?}", got.as_slice(), want);
        }
    }

    #[test]
    fn profile_of_three_positions() {
        let prof = difference_profile(&sv(&[0.5, 0.3, 0.2]), &sv(&[0.48, 0.34, 0.18])).unwrap();
        assert_eq!(prof.n_plus, vec![0, 2]);
        assert_eq!(prof.n_minus, vec![1]);
        assert!((prof.total - 0.04).abs() < 1e-12);
        assert!((prof.d[1] + 0.04).abs() < 1e-12);
    }

    #[test]
    fn profile_of_swapped_pair_and_equal_pair() {
        let prof = difference_profile(&sv(&[0.7, 0.3]), &sv(&[0.3, 0.7])).unwrap();
        assert!((prof.total - 0.4).abs() < 1e-12);
        let err = difference_profile(&sv(&[0.5, 0.5]), &sv(&[0.5, 0.5])).unwrap_err();
        assert!(matches!(err, Error::DegenerateProfile));
    }

    #[test]
    fn closed_form_examples() {
        let (pl, rl) =
            closed_form_repulsive(&sv(&[0.5, 0.3, 0.2]), &sv(&[0.48, 0.34, 0.18])).unwrap();
        assert_vec_close(&pl, &[0.5, 0.0, 0.5], 1e-12);
        assert_vec_close(&rl, &[0.0, 1.0, 0.0], 1e-12);

        let (pl, rl) = closed_form_repulsive(&sv(&[0.7, 0.3]), &sv(&[0.3, 0.7])).unwrap();
        assert_vec_close(&pl, &[1.0, 0.0], 1e-12);
        assert_vec_close(&rl, &[0.0, 1.0], 1e-12);
    }

    #[test]
    fn closed_form_is_shift_invariant() {
        let p = sv(&[0.5, 0.3, 0.2]);
        let r = sv(&[0.48, 0.34, 0.18]);
        // shift with zero sum keeping both vectors inside the simplex
        let shift = [-0.1, 0.15, -0.05];
        let shifted = |v: &StochasticVector| {
            StochasticVector::from_raw(v.as_slice().iter().zip(shift).map(|(x, a)| x + a).collect())
        };
        let base = closed_form_repulsive(&p, &r).unwrap();
        let moved = closed_form_repulsive(&shifted(&p), &shifted(&r)).unwrap();
        assert_vec_close(&moved.0, base.0.as_slice(), 1e-12);
        assert_vec_close(&moved.1, base.1.as_slice(), 1e-12);
    }

    #[test]
    fn repulsive_iteration_matches_closed_form() {
        let p = sv(&[0.5, 0.3, 0.2]);
        let r = sv(&[0.48, 0.34, 0.18]);
        let rep =
            iterate_conflict(&p, &r, ConflictAlpha::REPULSIVE, &IterateOptions::default()).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.classification, LimitClass::Orthogonal);
        assert_vec_close(&rep.p_limit, &[0.5, 0.0, 0.5], 1e-6);
        assert_vec_close(&rep.r_limit, &[0.0, 1.0, 0.0], 1e-6);
    }

    #[test]
    fn equal_start_stays_equal() {
        // p(1 - p) is (0.24, 0.24), so the first step already lands on the uniform vector
        let p = sv(&[0.4, 0.6]);
        let rep =
            iterate_conflict(&p, &p, ConflictAlpha::REPULSIVE, &IterateOptions::default()).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.classification, LimitClass::Equal);
        assert_vec_close(&rep.p_limit, &[0.5, 0.5], 1e-15);
        assert_eq!(rep.p_limit, rep.r_limit);
    }

    #[test]
    fn attractive_iteration_concentrates() {
        let rep = iterate_conflict(
            &sv(&[0.6, 0.4]),
            &sv(&[0.5, 0.5]),
            ConflictAlpha::ATTRACTIVE,
            &IterateOptions::default(),
        )
        .unwrap();
        assert!(rep.converged);
        assert_eq!(rep.classification, LimitClass::Equal);
        assert_vec_close(&rep.p_limit, &[1.0, 0.0], 1e-10);
    }

    #[test]
    fn disjoint_supports_are_already_a_limit() {
        let rep = iterate_conflict(
            &sv(&[1.0, 0.0]),
            &sv(&[0.0, 1.0]),
            ConflictAlpha::REPULSIVE,
            &IterateOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.classification, LimitClass::Orthogonal);
    }

    #[test]
    fn sigma_rho_values() {
        let p = sv(&[0.6, 0.4]);
        let r = sv(&[0.5, 0.5]);
        let s = sigma_rho(&p, &r, 0).unwrap();
        assert!((s.sigma - 1.1).abs() < 1e-15 && (s.rho - 0.3).abs() < 1e-15);
        let s = sigma_rho(&p, &r, 1).unwrap();
        assert!((s.sigma - 0.9).abs() < 1e-15 && (s.rho - 0.2).abs() < 1e-15);
        let s = sigma_rho(&sv(&[1.0, 0.0]), &r, 1).unwrap();
        assert_eq!(s.rho, 0.0);
        assert!(matches!(
            sigma_rho(&p, &r, 2),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn prop1_examples() {
        assert!(prop1_vanishes(&sv(&[0.6, 0.4]), &sv(&[0.5, 0.5]), 0, 1).unwrap());
        let u = StochasticVector::uniform(3);
        assert!(!prop1_vanishes(&u, &u, 0, 2).unwrap());
        assert!(prop1_vanishes(&sv(&[0.5, 0.5]), &sv(&[0.9, 0.1]), 0, 1).unwrap());
    }

    #[test]
    fn prop2_examples() {
        // sigma = (0.65, 0.80, 0.55): sigma_1 > sigma_2 fails for i = 2, k = 1
        let p = sv(&[0.05, 0.50, 0.45]);
        let r = sv(&[0.60, 0.30, 0.10]);
        assert!(!prop2_vanishes(&p, &r, 1, 0).unwrap());
        // both sums and products of k below those of i: not a prop2 case
        assert!(!prop2_vanishes(&sv(&[0.6, 0.4]), &sv(&[0.5, 0.5]), 0, 1).unwrap());
        assert!(prop2_vanishes(&p, &r, 1, 1).is_err());
    }

    #[test]
    fn attractive_limit_examples() {
        let u = StochasticVector::uniform(4);
        let (lim, sets) = attractive_limit(&u, &u, 1e-12, 1_000_000).unwrap();
        assert_eq!(lim, u);
        assert!(sets.s0.is_empty());
        assert_eq!(sets.m, 4);

        let (lim, sets) =
            attractive_limit(&sv(&[0.6, 0.4]), &sv(&[0.5, 0.5]), 1e-12, 1_000_000).unwrap();
        assert_eq!(lim.as_slice(), &[1.0, 0.0]);
        assert_eq!(sets.s0, vec![1]);
        assert_eq!(sets.s_inf, vec![0]);

        let err =
            attractive_limit(&sv(&[1.0, 0.0]), &sv(&[0.0, 1.0]), 1e-12, 1_000_000).unwrap_err();
        assert!(matches!(err, Error::Invalid { .. }));
    }
}
