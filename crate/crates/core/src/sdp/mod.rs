//! Dense semidefinite programming and rounding of numerical solutions to
//! exact certificates. Floating point arithmetic is confined to this module.

mod facial;
mod gram;
mod ipm;
mod problem;

pub use gram::{
    dual_ray_to_separation, float_min_pivot, round_to_rational, sos_gram_search, DualRay, GramSearch, NumericGram,
};
pub(crate) use gram::{gaussian_moment, unreachable_terms};
pub use problem::{solve, SdpProblem, SdpSolution, SdpStatus, SolverOptions, SparseSym};

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

static ENABLED: AtomicBool = AtomicBool::new(true);
static RUNS: AtomicUsize = AtomicUsize::new(0);

/// Turns the numerical solver on or off for the whole process. While off,
/// every search fails with [`crate::Error::SolverDisabled`]; exact
/// verification is unaffected.
pub fn set_solver_enabled(enabled: bool) {
    ENABLED.store(enabled, Ordering::SeqCst);
}

pub fn solver_enabled() -> bool {
    ENABLED.load(Ordering::SeqCst)
}

/// Number of interior-point runs started in this process.
pub fn solver_runs() -> usize {
    RUNS.load(Ordering::SeqCst)
}

fn run_ipm(sf: &ipm::StandardForm, opts: &SolverOptions) -> crate::Result<ipm::IpmResult> {
    if !solver_enabled() {
        return Err(crate::Error::SolverDisabled);
    }
    RUNS.fetch_add(1, Ordering::SeqCst);
    Ok(ipm::run(sf, opts))
}
