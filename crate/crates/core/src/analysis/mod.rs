//! Equilibria, stability and attractors of the coupled map.

pub mod attractor;
pub mod equilibrium;
pub mod hausdorff;

pub use attractor::{
    bifurcation_bisect, bounding_extent, classify_attractor, observe, AttractorClass, AttractorTag,
    BifurcationBracket, ClassifyOptions, Observation,
};
pub use equilibrium::{
    equilibrium_residual, fd_jacobian, lv_equilibrium, map_jacobian, map_point,
    power_spectral_radius, solve_equilibrium, spectral_radius, EquilibriumResult,
    EquilibriumSystemTerms, NewtonOptions, Stability,
};
pub use hausdorff::{cycle_hausdorff, directed_hausdorff, point_set_diameter};
