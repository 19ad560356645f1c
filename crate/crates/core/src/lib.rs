//! Weighted Fekete configurations on compact subsets of C^n, reference
//! equilibrium measures, and diagnostics for equidistribution,
//! transfinite diameters and the energy derivative identity.

pub mod basis;
pub mod diagnostics;
pub mod equilibrium;
pub mod error;
pub mod fekete;
pub mod geometry;
pub mod linalg;
pub mod vandermonde;

pub use basis::{
    enumerate_basis, evaluate, orthonormalize, EvaluationMatrix, MonomialBasis, MultiIndex,
    Normalizer,
};
pub use diagnostics::{
    concave_lemma_suite, derivative_check, empirical_measure, kolmogorov_distance_1d,
    moment_distance, transfinite_diameter, DerivativeReport, DiameterEstimate, LemmaReport,
    Projection,
};
pub use equilibrium::{
    arcsine_measure, energy_minimize_1d, equilibrium_mass, uniform_circle_measure, DiscreteMeasure,
    FrostmanReport,
};
pub use error::{Error, Result};
pub use fekete::{
    approximate_fekete, brute_force_fekete, exchange_refine, find_fekete, greedy_leja,
    multistart_fekete, Certainty, FeketeRun, Method, SearchOptions, SearchReport, SearchSpace,
};
pub use geometry::{build_mesh, eval_weight, CompactSet, Mesh, Point, SetKind, Weight, WeightKind};
pub use num_complex::Complex64;
pub use vandermonde::{log_abs_det, objective_d, objective_f, Configuration, LogDet};
