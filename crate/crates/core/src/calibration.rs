//! Constants for bounds the theory states only up to a constant factor.
//!
//! Each was fitted on a pilot run whose seeds are disjoint from the acceptance runs:
//! the largest pilot ratio times [`SAFETY_MARGIN`], rounded up to a quarter.

pub const SAFETY_MARGIN: f64 = 1.5;

/// Per-trial max finite load of the bipartite interval protocol over `lg n lg lg n`, `n`
/// the side size.
///
/// Pilot: `n` in {1024, 4096, 16384}, 50 trials each, master seeds 1000 and 2000, about
/// 10 constrained failures per side node; largest ratio 1.57.
pub const BIPARTITE_LOAD: f64 = 2.5;

/// Per-trial max load of the Clos interval protocol over `k^(L-1) lg k lg lg k`.
///
/// Pilot: `k = 64, L = 2, K = 8`, 30 trials, master seed 3000, budgets up to 100000
/// constrained failures; largest ratio 0.83.
pub const CLOS_LOAD: f64 = 1.25;

/// Without failures, destination-path blocks on level `l` carry loads within a factor of
/// this around `k^l`, and every other node stays below this times `(lg k)^(L+1)`.
///
/// Pilot: `k = 64, L = 2, K = 8`, 50 tables, seeds 5000..5050; largest factor 2.91.
pub const CLOS_BALANCE: f64 = 4.5;

/// Drift-chain sum `Σ X_i` over `r lg r` for `φ = 3/2, ψ = 1/2, X_0 = 1, r = 100`.
///
/// Pilot: 10^5 chains, seed 4000; largest ratio 0.54.
pub const MARKOV_SUM: f64 = 0.85;
