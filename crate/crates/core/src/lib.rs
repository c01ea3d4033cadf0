//! Perspective-3-Point solving through Grunert's quartic, with every real
//! root classified as a solution or an S-solution (a solution of a
//! supplementary problem), region analysis of the optical center against the
//! six inscribed-angle toroids of the control triangle, an independent
//! geometric brute-force solver, and reproducible verification campaigns for
//! the multi-solution structure.

pub mod experiments;
pub mod geom;
pub mod oracle;
pub mod quartic;
pub mod solver;

pub use geom::{
    circumsphere, classify_region, cones_intersect, subtended_angles, toroid_signed_excess, triangle_from_sides,
    ControlTriangle, GeomError, RegionReport, RegionStatus, ToroidLabel, ToroidSpec, Vec3, Vertex, ViewAngles,
};
pub use quartic::{
    grunert_coefficients, grunert_real_roots, quartic_real_roots, shifted_grunert_coefficients, GrunertQuartic, QuarticError,
    RealRoot, RootSet,
};
pub use solver::{
    back_substitute, positions_from_triplet, solve_from_center, solve_p3p, DepthTriplet, SolveError, SolveOptions,
    SolveReport, SupplementedPair, TripletClass,
};
