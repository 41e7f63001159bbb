//! Poisson sampling and per-trial RNG substreams.
//!
//! Exact sampling uses inversion by sequential search for small means and
//! Hormann's PTRS transformed rejection above lambda = 30. Every trial
//! gets its own ChaCha substream keyed on (seed, trial index), so results
//! do not depend on how trials are chunked across threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

/// Exact sampling refuses means above this; sequential cell counting at
/// such lambda is meaningless anyway since f64 loses integer resolution
/// long before the runtime becomes a problem.
pub const EXACT_LAMBDA_CAP: f64 = 1e9;
/// Auto mode switches from exact to the normal approximation here;
/// relative skewness lambda^(-1/2) is already below 1e-3.
pub const AUTO_NORMAL_SWITCH: f64 = 1e6;
/// Below this mean the normal approximation is not accepted.
pub const NORMAL_LAMBDA_FLOOR: f64 = 1e3;
/// Above 2^52 the rounded normal draw cannot resolve adjacent integers;
/// auto mode falls back to analytic-only results instead.
pub const NORMAL_LAMBDA_CAP: f64 = 4.5e15;

const INVERSION_LAMBDA_MAX: f64 = 30.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("lambda must be non-negative and finite, got {0}")]
    NegativeLambda(f64),
    #[error("exact sampler refuses lambda {0:e} > {EXACT_LAMBDA_CAP:e}")]
    ExactCapExceeded(f64),
    #[error("normal approximation requires lambda >= {NORMAL_LAMBDA_FLOOR:e}, got {0:e}")]
    BelowNormalFloor(f64),
    #[error("normal approximation loses integer resolution above lambda {NORMAL_LAMBDA_CAP:e}, got {0:e}")]
    AboveNormalCap(f64),
}

fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
}

fn splitmix64_next(state: &mut u64) -> u64 {
    splitmix64(state);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic substream for one trial: a 256-bit ChaCha key derived
/// from (seed, trial) with splitmix64.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut state = seed ^ trial.wrapping_mul(0xD1B54A32D192ED03);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64_next(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Draw from Poisson(lambda) with the exact algorithm for the regime.
pub fn sample_poisson<R: Rng>(lambda: f64, rng: &mut R) -> Result<u64, SampleError> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(SampleError::NegativeLambda(lambda));
    }
    if lambda > EXACT_LAMBDA_CAP {
        return Err(SampleError::ExactCapExceeded(lambda));
    }
    if lambda == 0.0 {
        return Ok(0);
    }
    if lambda <= INVERSION_LAMBDA_MAX {
        Ok(poisson_inversion(lambda, rng))
    } else {
        Ok(poisson_ptrs(lambda, rng))
    }
}

/// Inversion by sequential search (Devroye); valid for small lambda.
fn poisson_inversion<R: Rng>(lambda: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.gen();
    let mut p = (-lambda).exp();
    let mut cumulative = p;
    let mut k = 0u64;
    while u > cumulative {
        k += 1;
        p *= lambda / k as f64;
        cumulative += p;
        // guards against u landing in the rounding tail of the cdf
        if p < f64::MIN_POSITIVE && cumulative < u {
            break;
        }
    }
    k
}

/// Transformed rejection with squeeze (Hormann's PTRS), lambda > 10.
fn poisson_ptrs<R: Rng>(lambda: f64, rng: &mut R) -> u64 {
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);

    loop {
        let u: f64 = rng.gen::<f64>() - 0.5;
        let v: f64 = rng.gen();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln()
            <= k * loglam - lambda - ln_gamma(k + 1.0)
        {
            return k as u64;
        }
    }
}

/// Large-lambda normal approximation: `round(max(0, N(lambda, sqrt(lambda))))`.
pub fn sample_poisson_normal<R: Rng>(lambda: f64, rng: &mut R) -> Result<u64, SampleError> {
    if !lambda.is_finite() || lambda < NORMAL_LAMBDA_FLOOR {
        return Err(SampleError::BelowNormalFloor(lambda));
    }
    if lambda > NORMAL_LAMBDA_CAP {
        return Err(SampleError::AboveNormalCap(lambda));
    }
    let z: f64 = StandardNormal.sample(rng);
    Ok((lambda + lambda.sqrt() * z).max(0.0).round() as u64)
}
