//! Drift chains on the non-negative integers.
//!
//! Odd steps scale the state by `φ` and even steps by `ψ` in expectation, each step being a
//! sum of independent Bernoulli trials. A factor above one is realized by expanding the
//! trial pool: `m · X` trials at success probability `factor / m`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Horizons up to this value are outside the range the aggregation bound speaks about.
pub const MIN_HORIZON: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub phi: f64,
    pub psi: f64,
    pub x0: u64,
    pub horizon: u32,
    pub trials: u64,
    pub seed: u64,
    /// Trial-pool multiplier for drift factors above one.
    pub pool_multiplier: u32,
}

impl ChainParams {
    pub fn new(phi: f64, psi: f64, x0: u64, horizon: u32) -> Self {
        ChainParams { phi, psi, x0, horizon, trials: 1, seed: 0, pool_multiplier: 3 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi > 0.0 && self.psi > 0.0) {
            return Err(Error::param("drift factors must be positive"));
        }
        if !(self.phi * self.psi < 1.0) {
            return Err(Error::param(format!("phi * psi = {} must be below 1", self.phi * self.psi)));
        }
        let m = f64::from(self.pool_multiplier);
        if self.pool_multiplier == 0 || self.phi > m || self.psi > m {
            return Err(Error::param(format!("pool multiplier {} too small for the drift factors", self.pool_multiplier)));
        }
        Ok(())
    }

    /// `1 / sqrt(φψ)`.
    pub fn gamma(&self) -> f64 {
        1.0 / (self.phi * self.psi).sqrt()
    }

    /// Drift factor of the step producing `X_step`.
    pub fn factor(&self, step: u32) -> f64 {
        if step % 2 == 1 {
            self.phi
        } else {
            self.psi
        }
    }

    /// `(trials, p)` for one step out of state `x`.
    fn step_pool(&self, x: u64, factor: f64) -> (u64, f64) {
        if factor <= 1.0 {
            (x, factor)
        } else {
            let m = u64::from(self.pool_multiplier);
            (m * x, factor / m as f64)
        }
    }
}

/// Seed of chain `trial` under master seed `seed`.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `X_0, ..., X_r`.
pub fn simulate_chain(params: &ChainParams, rng: &mut dyn RngCore) -> Result<Vec<u64>> {
    params.validate()?;
    let mut xs = Vec::with_capacity(params.horizon as usize + 1);
    xs.push(params.x0);
    let mut x = params.x0;
    for step in 1..=params.horizon {
        let (trials, p) = params.step_pool(x, params.factor(step));
        x = if trials == 0 {
            0
        } else {
            Binomial::new(trials, p).map_err(|e| Error::param(e.to_string()))?.sample(rng)
        };
        xs.push(x);
    }
    Ok(xs)
}

/// Per-trial sums plus per-parity drift ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRun {
    pub sums: Vec<u64>,
    /// `Σ X_odd / Σ X_(odd-1)` over all trials.
    pub odd_ratio: f64,
    /// `Σ X_even / Σ X_(even-1)` over all trials, `X_0` excluded.
    pub even_ratio: f64,
}

pub fn run_chains(params: &ChainParams) -> Result<ChainRun> {
    params.validate()?;
    let per_trial: Vec<Result<(u64, [u64; 4])>> = (0..params.trials)
        .into_par_iter()
        .map(|t| {
            let xs = simulate_chain(params, &mut trial_rng(params.seed, t))?;
            let mut acc = [0u64; 4];
            for i in 1..xs.len() {
                let slot = if i % 2 == 1 { 0 } else { 2 };
                acc[slot] += xs[i];
                acc[slot + 1] += xs[i - 1];
            }
            Ok((xs.iter().sum(), acc))
        })
        .collect();
    let mut sums = Vec::with_capacity(per_trial.len());
    let mut acc = [0u64; 4];
    for r in per_trial {
        let (s, a) = r?;
        sums.push(s);
        for i in 0..4 {
            acc[i] += a[i];
        }
    }
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    Ok(ChainRun { sums, odd_ratio: ratio(acc[0], acc[1]), even_ratio: ratio(acc[2], acc[3]) })
}

/// `r lg r`.
pub fn aggregate_scale(horizon: u32) -> f64 {
    let r = f64::from(horizon);
    r * r.log2()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCheck {
    /// `false` when the horizon is at most [`MIN_HORIZON`]; nothing is checked then.
    pub in_range: bool,
    pub bound: f64,
    /// Fraction of trials whose sum exceeds `bound`.
    pub exceedance: f64,
    pub max_sum: u64,
    pub odd_ratio: f64,
    pub even_ratio: f64,
}

/// Fraction of chains with `Σ X_i > c · r lg r`.
pub fn aggregate_check(params: &ChainParams, c: f64) -> Result<AggregateCheck> {
    params.validate()?;
    let bound = c * aggregate_scale(params.horizon);
    if params.horizon <= MIN_HORIZON {
        return Ok(AggregateCheck {
            in_range: false,
            bound,
            exceedance: 0.0,
            max_sum: 0,
            odd_ratio: 0.0,
            even_ratio: 0.0,
        });
    }
    let run = run_chains(params)?;
    let over = run.sums.iter().filter(|&&s| s as f64 > bound).count();
    Ok(AggregateCheck {
        in_range: true,
        bound,
        exceedance: over as f64 / run.sums.len().max(1) as f64,
        max_sum: run.sums.iter().copied().max().unwrap_or(0),
        odd_ratio: run.odd_ratio,
        even_ratio: run.even_ratio,
    })
}

/// Constant `c` such that the largest pilot sum sits at `c · r lg r / margin`.
pub fn calibrate_constant(pilot: &ChainRun, horizon: u32, margin: f64) -> f64 {
    let max = pilot.sums.iter().copied().max().unwrap_or(0) as f64;
    margin * max / aggregate_scale(horizon)
}
