//! Shared fixtures for the benchmarks.

use spat_core::{simulate, CycleTable, DemandProfile, TimingPlan};

/// `cycles` simulated 120 s cycles with peaked demand.
pub fn history(cycles: usize, seed: u64) -> CycleTable {
    simulate(&TimingPlan::fixed(120.0), &DemandProfile::peaked(seed), cycles).expect("fixed 120 s plan is feasible")
}
