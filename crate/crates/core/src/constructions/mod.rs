//! Explicit polynomials and generators of convex forms that are not sos-convex.

mod catalog;
mod coverage;
mod generators;

pub use catalog::{
    all_entries, catalog, matrix_from_canonical, matrix_to_canonical, CatalogEntry, CatalogObject, NAMES,
};
pub use catalog::{choi, f26, f36, h34, h44, motzkin, p38, q64, robinson};
pub use coverage::{coverage_plan, BaseExample, CoveragePlan};
pub use generators::{
    build_thm58, construct, default_padding, dehomogenize_construction, extend_variables, find_alpha, find_alpha_with,
    find_gamma, motzkin_family, AlphaSearch, Construction, ConstructionRecipe, GammaEstimate, PipelineOptions,
    SamplingOptions,
};
