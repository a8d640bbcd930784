//! Counted Diffie-Hellman and discrete-log oracles for a fixed base.
//!
//! The perfect oracles are backed by [`BsgsTable`] and therefore only work at
//! desk scale. [`NoisyDhOracle`] models an oracle with advantage `epsilon`,
//! and [`AmplifiedDhOracle`] turns such an oracle back into a reliable one
//! through random self-reduction and a majority vote.
//!
//! Oracle handles carry a mutable query counter and, for the randomized ones,
//! generator state. Invoke a given handle from one thread at a time.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::dlog::BsgsTable;
use crate::error::{Error, Result};
use crate::group::{Exponent, GroupElement, GroupParams};

/// Answers `(h^x, h^y) -> h^{xy}` for the base `h` returned by [`DhOracle::base`].
pub trait DhOracle {
    fn base(&self) -> &GroupElement;
    fn answer(&mut self, hx: &GroupElement, hy: &GroupElement) -> Result<GroupElement>;
    fn query_count(&self) -> u64;
}

/// Answers `h^x -> x mod p` for the base `h` returned by [`DlOracle::base`].
pub trait DlOracle {
    fn base(&self) -> &GroupElement;
    fn answer(&mut self, hx: &GroupElement) -> Result<Exponent>;
    fn query_count(&self) -> u64;
}

impl<O: DhOracle + ?Sized> DhOracle for &mut O {
    fn base(&self) -> &GroupElement {
        (**self).base()
    }
    fn answer(&mut self, hx: &GroupElement, hy: &GroupElement) -> Result<GroupElement> {
        (**self).answer(hx, hy)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

impl<O: DlOracle + ?Sized> DlOracle for &mut O {
    fn base(&self) -> &GroupElement {
        (**self).base()
    }
    fn answer(&mut self, hx: &GroupElement) -> Result<Exponent> {
        (**self).answer(hx)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

/// Exact DH oracle: solves both discrete logs and exponentiates.
#[derive(Clone, Debug)]
pub struct PerfectDhOracle {
    params: GroupParams,
    table: BsgsTable,
    queries: u64,
}

pub fn make_perfect_dh_oracle(params: &GroupParams, base: &GroupElement) -> Result<PerfectDhOracle> {
    Ok(PerfectDhOracle { params: params.clone(), table: BsgsTable::new(base, params)?, queries: 0 })
}

impl DhOracle for PerfectDhOracle {
    fn base(&self) -> &GroupElement {
        self.table.base()
    }

    fn answer(&mut self, hx: &GroupElement, hy: &GroupElement) -> Result<GroupElement> {
        self.queries += 1;
        let x = self.table.solve(hx)?;
        let y = self.table.solve(hy)?;
        Ok(self.params.pow(self.table.base(), &self.params.mul_exponents(&x, &y)))
    }

    fn query_count(&self) -> u64 {
        self.queries
    }
}

/// Exact DL oracle.
#[derive(Clone, Debug)]
pub struct PerfectDlOracle {
    table: BsgsTable,
    queries: u64,
}

pub fn make_perfect_dl_oracle(params: &GroupParams, base: &GroupElement) -> Result<PerfectDlOracle> {
    Ok(PerfectDlOracle { table: BsgsTable::new(base, params)?, queries: 0 })
}

impl DlOracle for PerfectDlOracle {
    fn base(&self) -> &GroupElement {
        self.table.base()
    }

    fn answer(&mut self, hx: &GroupElement) -> Result<Exponent> {
        self.queries += 1;
        self.table.solve(hx)
    }

    fn query_count(&self) -> u64 {
        self.queries
    }
}

/// Advantage and seed of a [`NoisyDhOracle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisySpec {
    epsilon: f64,
    seed: u64,
}

impl NoisySpec {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside (0, 1]")));
        }
        Ok(NoisySpec { epsilon, seed })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// With probability `epsilon` forwards to the inner oracle, otherwise answers
/// with a uniformly random subgroup element. The correct answer therefore
/// comes back with probability `epsilon + (1 - epsilon)/p`.
#[derive(Clone, Debug)]
pub struct NoisyDhOracle<O> {
    inner: O,
    params: GroupParams,
    epsilon: f64,
    rng: ChaCha20Rng,
    queries: u64,
}

pub fn make_noisy_dh_oracle<O: DhOracle>(inner: O, spec: NoisySpec, params: &GroupParams) -> NoisyDhOracle<O> {
    NoisyDhOracle {
        inner,
        params: params.clone(),
        epsilon: spec.epsilon,
        rng: ChaCha20Rng::seed_from_u64(spec.seed),
        queries: 0,
    }
}

impl<O> NoisyDhOracle<O> {
    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: DhOracle> DhOracle for NoisyDhOracle<O> {
    fn base(&self) -> &GroupElement {
        self.inner.base()
    }

    fn answer(&mut self, hx: &GroupElement, hy: &GroupElement) -> Result<GroupElement> {
        self.queries += 1;
        if self.rng.gen::<f64>() < self.epsilon {
            self.inner.answer(hx, hy)
        } else {
            Ok(self.params.random_element(&mut self.rng))
        }
    }

    fn query_count(&self) -> u64 {
        self.queries
    }
}

/// Slack constant in the repetition count `ceil(8 ln(1/delta) / epsilon^2)`.
pub const CHERNOFF_SLACK: f64 = 8.0;

/// Number of self-reduction rounds per amplified query.
pub fn repetitions(epsilon: f64, target_error: f64) -> u64 {
    (CHERNOFF_SLACK * (1.0 / target_error).ln() / (epsilon * epsilon)).ceil() as u64
}

/// Majority vote over blinded queries to a noisy oracle.
///
/// Each round draws `r, s` in `[1, p-1]`, asks the inner oracle for
/// `DH(h^{xr}, h^{ys})`, and unblinds the reply with `t = (rs)^{-1} mod p`.
/// A correct reply unblinds to `h^{xy}`; wrong replies scatter.
#[derive(Clone, Debug)]
pub struct AmplifiedDhOracle<O> {
    inner: O,
    params: GroupParams,
    rounds: u64,
    rng: ChaCha20Rng,
    queries: u64,
}

pub fn amplify<O: DhOracle>(
    noisy: O,
    epsilon: f64,
    target_error: f64,
    seed: u64,
    params: &GroupParams,
) -> Result<AmplifiedDhOracle<O>> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside (0, 1]")));
    }
    if !(target_error > 0.0 && target_error < 0.5) {
        return Err(Error::InvalidArgument(format!("target error {target_error} outside (0, 0.5)")));
    }
    Ok(AmplifiedDhOracle {
        inner: noisy,
        params: params.clone(),
        rounds: repetitions(epsilon, target_error),
        rng: ChaCha20Rng::seed_from_u64(seed),
        queries: 0,
    })
}

impl<O> AmplifiedDhOracle<O> {
    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

/// Most frequent element; ties go to the lexicographically smallest hex encoding.
fn majority(votes: HashMap<GroupElement, u64>) -> GroupElement {
    votes
        .into_iter()
        .map(|(el, n)| (n, el.to_hex(), el))
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
        .map(|(_, _, el)| el)
        .expect("at least one round")
}

impl<O: DhOracle> DhOracle for AmplifiedDhOracle<O> {
    fn base(&self) -> &GroupElement {
        self.inner.base()
    }

    fn answer(&mut self, hx: &GroupElement, hy: &GroupElement) -> Result<GroupElement> {
        self.queries += 1;
        let params = &self.params;
        for v in [hx, hy] {
            if !params.is_member(v.value()) {
                return Err(Error::NotMember(v.to_hex()));
            }
        }
        let mut votes: HashMap<GroupElement, u64> = HashMap::new();
        for _ in 0..self.rounds {
            let r = params.random_exponent(&mut self.rng);
            let s = params.random_exponent(&mut self.rng);
            let reply = self.inner.answer(&params.pow(hx, &r), &params.pow(hy, &s))?;
            let t = params.invert_exponent(&params.mul_exponents(&r, &s))?;
            *votes.entry(params.pow(&reply, &t)).or_default() += 1;
        }
        Ok(majority(votes))
    }

    fn query_count(&self) -> u64 {
        self.queries
    }
}
