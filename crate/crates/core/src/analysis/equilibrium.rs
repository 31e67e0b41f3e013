//! Fixed points of the uncoupled and coupled maps.

use nalgebra::{Matrix4, Vector4};

use crate::dynamics::{full_step, ConflictAlpha, CoupledState, Epsilons, ModelParams};
use crate::error::{Error, Result};

/// Interior fixed point `(prey, predator)` of the uncoupled predator-prey map,
/// where both per-capita growth terms vanish.
pub fn lv_equilibrium(params: &ModelParams) -> Result<[f64; 2]> {
    let ModelParams { a, b, c, d, e, f } = *params;
    let denom = b * e + c * f;
    if !(denom > 0.0) {
        return Err(Error::NoInteriorEquilibrium);
    }
    let prey = (a * f + b * d) / denom;
    let predator = (a * e - c * d) / denom;
    if !(prey > 0.0 && predator > 0.0) {
        return Err(Error::NoInteriorEquilibrium);
    }
    Ok([prey, predator])
}

/// Evaluates the coupled map on the `(P1, P2, R1, R2)` layout.
pub fn map_point(
    x: [f64; 4],
    params: &ModelParams,
    alpha: ConflictAlpha,
    eps: &Epsilons,
) -> Result<[f64; 4]> {
    let state = CoupledState::from_array(x)?;
    Ok(full_step(&state, params, alpha, eps)?.0.to_array())
}

fn displacement(
    x: [f64; 4],
    params: &ModelParams,
    alpha: ConflictAlpha,
    eps: &Epsilons,
) -> Result<[f64; 4]> {
    let fx = map_point(x, params, alpha, eps)?;
    Ok(std::array::from_fn(|i| fx[i] - x[i]))
}

fn max_norm(v: &[f64; 4]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Intermediate quantities of the polynomial fixed-point system: the region
/// masses after the predator-prey update and the common right-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumSystemTerms {
    pub z1: f64,
    pub z2: f64,
    pub z: f64,
}

/// Residuals of the polynomial fixed-point system at `x = (P1, P2, R1, R2)`.
///
/// With `g`, `h` the prey and predator growth factors of each region,
/// `Z1 = P1 gA + P2 hA`, `Z2 = R1 gB + R2 hB` and
/// `Z = Z1 Z2 - alpha (P1 gA R1 gB + P2 hA R2 hB)`, the four equations read
///
/// ```text
/// gA (Z2 - alpha R1 gB) Z1 = Z      hA (Z2 - alpha R2 hB) Z1 = Z
/// gB (Z1 - alpha P1 gA) Z2 = Z      hB (Z1 - alpha P2 hA) Z2 = Z
/// ```
///
/// and each residual is `lhs - Z`. On interior points with no clamping the
/// residual equals `Z (F(x)_j - x_j) / x_j`, so its zero set coincides with
/// the fixed points of the coupled map.
pub fn equilibrium_residual(
    x: [f64; 4],
    params: &ModelParams,
    alpha: ConflictAlpha,
) -> Result<([f64; 4], EquilibriumSystemTerms)> {
    if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid(
            "point",
            format!("entries must be finite and >= 0, got {x:?}"),
        ));
    }
    let ModelParams { a, b, c, d, e, f } = *params;
    let al = alpha.value();
    let [p1, p2, r1, r2] = x;
    let ga = 1.0 + a - b * p2 - c * p1;
    let ha = 1.0 - d + e * p1 - f * p2;
    let gb = 1.0 + a - b * r2 - c * r1;
    let hb = 1.0 - d + e * r1 - f * r2;

    let (prey_a, pred_a, prey_b, pred_b) = (p1 * ga, p2 * ha, r1 * gb, r2 * hb);
    let z1 = prey_a + pred_a;
    let z2 = prey_b + pred_b;
    if z1.abs() <= 1e-12 || z2.abs() <= 1e-12 {
        return Err(Error::DegenerateTerms { z1, z2 });
    }
    let z = z1 * z2 - al * (prey_a * prey_b + pred_a * pred_b);
    let residual = [
        ga * (z2 - al * prey_b) * z1 - z,
        ha * (z2 - al * pred_b) * z1 - z,
        gb * (z1 - al * prey_a) * z2 - z,
        hb * (z1 - al * pred_a) * z2 - z,
    ];

    #[cfg(debug_assertions)]
    {
        let no_clamp = [prey_a, pred_a, prey_b, pred_b].iter().all(|v| *v >= 0.0);
        if no_clamp && x.iter().all(|v| *v > 1e-6) {
            if let Ok(g) = displacement(x, params, alpha, &Epsilons::default()) {
                for j in 0..4 {
                    let via_map = z * g[j] / x[j];
                    let scale = 1.0 + z.abs() * (1.0 + g[j].abs() / x[j]);
                    debug_assert!(
                        (via_map - residual[j]).abs() <= 1e-9 * scale,
                        "residual {j}: system {} vs map {via_map}",
                        residual[j]
                    );
                }
            }
        }
    }

    Ok((residual, EquilibriumSystemTerms { z1, z2, z }))
}

/// Verdict from the spectral radius, with a dead band around 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Undetermined,
}

pub const STABILITY_DEAD_BAND: f64 = 1e-3;

impl Stability {
    pub fn from_radius(radius: f64) -> Self {
        if radius < 1.0 - STABILITY_DEAD_BAND {
            Stability::Stable
        } else if radius > 1.0 + STABILITY_DEAD_BAND {
            Stability::Unstable
        } else {
            Stability::Undetermined
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub point: [f64; 4],
    /// `max |F(point) - point|`, recomputed after the solve.
    pub residual_norm: f64,
    /// Of the finite-difference Jacobian of the map at `point`.
    pub spectral_radius: f64,
    /// Power-iteration estimate of the same radius.
    pub power_radius: f64,
    pub stable: Stability,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: u32,
    pub power_iterations: usize,
    pub eps: Epsilons,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-10,
            max_iter: 200,
            max_halvings: 40,
            power_iterations: 200,
            eps: Epsilons::default(),
        }
    }
}

/// Forward-difference Jacobian of `g` with steps `max(1e-6, 1e-6 |x_i|)`.
pub fn fd_jacobian<G>(x: [f64; 4], gx: [f64; 4], mut g: G) -> Result<Matrix4<f64>>
where
    G: FnMut([f64; 4]) -> Result<[f64; 4]>,
{
    let mut jac = Matrix4::zeros();
    for i in 0..4 {
        let h = (1e-6 * x[i].abs()).max(1e-6);
        let mut xh = x;
        xh[i] += h;
        let gh = g(xh)?;
        for row in 0..4 {
            jac[(row, i)] = (gh[row] - gx[row]) / h;
        }
    }
    Ok(jac)
}

/// Finite-difference Jacobian of the coupled map itself.
pub fn map_jacobian(
    x: [f64; 4],
    params: &ModelParams,
    alpha: ConflictAlpha,
    eps: &Epsilons,
) -> Result<Matrix4<f64>> {
    let fx = map_point(x, params, alpha, eps)?;
    fd_jacobian(x, fx, |y| map_point(y, params, alpha, eps))
}

/// Largest eigenvalue modulus, from the real Schur form.
pub fn spectral_radius(jac: &Matrix4<f64>) -> f64 {
    jac.complex_eigenvalues()
        .iter()
        .map(|l| l.norm())
        .fold(0.0, f64::max)
}

/// Spectral radius by power iteration: the average growth rate of `|J^k v|`
/// over the second half of the iterations. The start vector has components
/// in both the symmetric and the antisymmetric subspace of region swaps.
///
/// When two eigenvalue pairs have nearly equal moduli, as at the symmetric
/// equilibria of the coupled map, a few hundred iterations leave an error of
/// order `1e-3`; [`spectral_radius`] is the reference.
pub fn power_spectral_radius(jac: &Matrix4<f64>, iterations: usize) -> f64 {
    let mut v = Vector4::new(1.0, 0.7, -0.4, 0.2).normalize();
    let settle = iterations / 2;
    let mut log_growth = 0.0;
    for k in 0..iterations {
        let w = jac * v;
        let norm = w.norm();
        if norm == 0.0 || !norm.is_finite() {
            return if norm == 0.0 { 0.0 } else { f64::INFINITY };
        }
        if k >= settle {
            log_growth += norm.ln();
        }
        v = w / norm;
    }
    (log_growth / (iterations - settle).max(1) as f64).exp()
}

/// Damped Newton iteration on `F(x) - x` from `seed`.
///
/// Each step solves with the forward-difference Jacobian, then halves the step
/// until the max-norm of the displacement decreases. Negative coordinates are
/// projected to zero.
pub fn solve_equilibrium(
    params: &ModelParams,
    alpha: ConflictAlpha,
    seed: [f64; 4],
    opts: &NewtonOptions,
) -> Result<EquilibriumResult> {
    if seed.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid(
            "seed",
            format!("entries must be finite and >= 0, got {seed:?}"),
        ));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let eps = opts.eps;
    let g = |x: [f64; 4]| displacement(x, params, alpha, &eps);

    let mut x = seed;
    let mut gx = g(x)?;
    let mut norm = max_norm(&gx);
    let mut iterations = 0;
    let failure = |x: [f64; 4], residual: f64, iterations: usize| Error::SolverFailure {
        best: x,
        residual,
        iterations,
    };

    while norm > opts.tol {
        if iterations == opts.max_iter {
            return Err(failure(x, norm, iterations));
        }
        iterations += 1;
        let jac = fd_jacobian(x, gx, g)?;
        let rhs = -Vector4::from(gx);
        let Some(delta) = jac.lu().solve(&rhs) else {
            return Err(failure(x, norm, iterations));
        };
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: [f64; 4] = std::array::from_fn(|i| (x[i] + lambda * delta[i]).max(0.0));
            if let Ok(gt) = g(trial) {
                let nt = max_norm(&gt);
                if nt < norm {
                    accepted = Some((trial, gt, nt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((xt, gt, nt)) => {
                x = xt;
                gx = gt;
                norm = nt;
            }
            None => return Err(failure(x, norm, iterations)),
        }
    }

    let residual_norm = max_norm(&g(x)?);
    let jac = map_jacobian(x, params, alpha, &eps)?;
    let spectral_radius = spectral_radius(&jac);
    let power_radius = power_spectral_radius(&jac, opts.power_iterations);
    Ok(EquilibriumResult {
        point: x,
        residual_norm,
        spectral_radius,
        power_radius,
        stable: Stability::from_radius(spectral_radius),
        iterations,
    })
}
