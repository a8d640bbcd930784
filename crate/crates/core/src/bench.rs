//! Operation-count comparison of random-base square-and-multiply against
//! fast-base exponentiation on identical exponents.
//!
//! One unit is one full-width modular multiplication. Squarings count one
//! unit in the primary ratio and [`CHEAP_SQUARING_COST`] units in the
//! alternative one, since squaring is often cheaper than a general multiply.

use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{exp_fast_base, mod_exp, CostCounter, GroupParams};

pub const CHEAP_SQUARING_COST: f64 = 0.8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    /// Bit length of the subgroup order, i.e. of the exponents.
    pub bit_length: u64,
    pub cheap_squaring_cost: f64,
    pub mean_fast_steps: f64,
    pub mean_full_mults_baseline: f64,
    pub mean_full_mults_fast: f64,
    pub mean_squarings: f64,
    pub modulus_bits: u64,
    pub savings_ratio: f64,
    pub savings_ratio_cheap_squaring: f64,
    pub seed: u64,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_baseline_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_fast_ms: Option<f64>,
}

impl BenchReport {
    /// JSON with keys in sorted order.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&value).expect("report serializes")
    }
}

/// Baseline and fast counts for one exponent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialCounts {
    pub baseline: CostCounter,
    pub fast: CostCounter,
}

impl TrialCounts {
    pub fn savings_ratio(&self) -> f64 {
        savings(&self.baseline, &self.fast, 1.0)
    }
}

fn savings(baseline: &CostCounter, fast: &CostCounter, squaring_cost: f64) -> f64 {
    let saved = baseline.full_mults.saturating_sub(fast.full_mults) as f64;
    let total = baseline.full_mults as f64 + squaring_cost * baseline.squarings as f64;
    if total == 0.0 {
        0.0
    } else {
        saved / total
    }
}

/// Runs both exponentiations on one exponent; `base` is the random base of
/// the baseline.
pub fn bench_trial(
    params: &GroupParams,
    base: &crate::group::GroupElement,
    e: &num_bigint::BigUint,
) -> TrialCounts {
    let mut counts = TrialCounts::default();
    mod_exp(base, e, params, &mut counts.baseline);
    exp_fast_base(e, params, &mut counts.fast);
    counts
}

/// `trials` random exponents in `[1, p-1]`, each with a fresh random base.
/// Ratios are computed over the summed counts.
pub fn bench_exp(params: &GroupParams, trials: u64, seed: u64, wall_time: bool) -> Result<BenchReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut baseline = CostCounter::new();
    let mut fast = CostCounter::new();
    let (mut t_base, mut t_fast) = (Duration::ZERO, Duration::ZERO);
    for _ in 0..trials {
        let e = params.random_exponent(&mut rng);
        let base = params.pow_f(&params.random_exponent(&mut rng));
        let start = Instant::now();
        mod_exp(&base, e.value(), params, &mut baseline);
        let mid = Instant::now();
        exp_fast_base(e.value(), params, &mut fast);
        t_base += mid - start;
        t_fast += mid.elapsed();
    }
    let n = trials as f64;
    let mean = |v: u64| v as f64 / n;
    let ms = |d: Duration| d.as_secs_f64() * 1e3;
    Ok(BenchReport {
        bit_length: params.p().bits(),
        cheap_squaring_cost: CHEAP_SQUARING_COST,
        mean_fast_steps: mean(fast.fast_steps),
        mean_full_mults_baseline: mean(baseline.full_mults),
        mean_full_mults_fast: mean(fast.full_mults),
        mean_squarings: mean(baseline.squarings),
        modulus_bits: params.q().bits(),
        savings_ratio: savings(&baseline, &fast, 1.0),
        savings_ratio_cheap_squaring: savings(&baseline, &fast, CHEAP_SQUARING_COST),
        seed,
        trials,
        wall_time_baseline_ms: wall_time.then(|| ms(t_base)),
        wall_time_fast_ms: wall_time.then(|| ms(t_fast)),
    })
}

/// Expected ratio for uniformly random `n`-bit exponents with the top bit
/// set: `((n-1)/2) / ((n-1)/2 + (n-1)) = 1/3`.
pub fn expected_savings_ratio(bit_length: u64) -> f64 {
    let n = bit_length.to_f64().unwrap_or(0.0);
    if n <= 1.0 {
        return 0.0;
    }
    let mults = (n - 1.0) / 2.0;
    mults / (mults + (n - 1.0))
}
