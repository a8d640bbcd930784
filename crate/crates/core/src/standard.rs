//! Publishing parameters whose generator is `g = f^t` for a secret `t`.
//!
//! `g` is uniform over the non-identity elements, so the published standard
//! looks like any honestly chosen one. Whoever holds `t` can turn a
//! transcript `(g^a, g^b)` into a query `(g^a, f^b)` for an oracle that
//! leaks `F(f^{xy})` on base `f` and obtain `F(g^{ab})`.
//!
//! The simulated oracle here is a discrete-log solver, so it would break any
//! base; only the trapdoor mechanics are demonstrated. The trapdoor is
//! serialized separately and is never part of the published standard.

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{find_fast_generator, parse_hex, Exponent, GroupElement, GroupParams};
use crate::oracle::{make_perfect_dh_oracle, DhOracle, PerfectDhOracle};
use crate::protocol::{check_peer, derive_key, run_agreement, DerivedKey, Transcript};

/// A DH oracle for base `f` that reveals only `F(f^{xy})`.
pub trait MdhOracle {
    fn base(&self) -> &GroupElement;
    fn answer(&mut self, fx: &GroupElement, fy: &GroupElement) -> Result<DerivedKey>;
    fn query_count(&self) -> u64;
}

impl<O: MdhOracle + ?Sized> MdhOracle for &mut O {
    fn base(&self) -> &GroupElement {
        (**self).base()
    }
    fn answer(&mut self, fx: &GroupElement, fy: &GroupElement) -> Result<DerivedKey> {
        (**self).answer(fx, fy)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

/// Desk-scale MDH oracle with `F = derive_key`.
#[derive(Clone, Debug)]
pub struct SimulatedMdhOracle {
    dh: PerfectDhOracle,
}

pub fn make_simulated_mdh_oracle(params: &GroupParams) -> Result<SimulatedMdhOracle> {
    SimulatedMdhOracle::with_base(params, &params.generator())
}

impl SimulatedMdhOracle {
    /// Oracle for an explicit base instead of `params.f`.
    pub fn with_base(params: &GroupParams, base: &GroupElement) -> Result<Self> {
        Ok(SimulatedMdhOracle { dh: make_perfect_dh_oracle(params, base)? })
    }
}

impl MdhOracle for SimulatedMdhOracle {
    fn base(&self) -> &GroupElement {
        self.dh.base()
    }

    fn answer(&mut self, fx: &GroupElement, fy: &GroupElement) -> Result<DerivedKey> {
        self.dh.answer(fx, fy).map(|s| derive_key(&s))
    }

    fn query_count(&self) -> u64 {
        self.dh.query_count()
    }
}

/// Parameters as published: the group and the advertised generator `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublishedStandard {
    params: GroupParams,
    g: GroupElement,
}

/// Standard file. The fast generator is deliberately absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardFile {
    pub g: String,
    pub p: String,
    pub q: String,
}

impl PublishedStandard {
    pub fn new(params: &GroupParams, g: GroupElement) -> Result<Self> {
        let g = check_peer(params, g.into_value())?;
        Ok(PublishedStandard { params: params.clone(), g })
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn g(&self) -> &GroupElement {
        &self.g
    }

    pub fn to_file(&self) -> StandardFile {
        StandardFile { g: self.g.to_hex(), p: self.params.p().to_str_radix(16), q: self.params.q().to_str_radix(16) }
    }

    /// Reads a standard. The group's internal fast generator is rebuilt as
    /// the smallest element of order `p`, which is 2 for generated groups.
    pub fn from_file(file: &StandardFile) -> Result<Self> {
        let q = parse_hex(&file.q)?;
        let p = parse_hex(&file.p)?;
        let f = find_fast_generator(&q, &p)?;
        let params = GroupParams::new(q, p, f)?;
        let g = params.element_from_hex(&file.g)?;
        Self::new(&params, g)
    }
}

/// The secret exponent `t` with `g = f^t`, together with `f`.
#[derive(Clone, PartialEq, Eq)]
pub struct Trapdoor {
    t: Exponent,
    f: GroupElement,
}

impl std::fmt::Debug for Trapdoor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Trapdoor").field("f", &self.f).finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapdoorFile {
    pub f: String,
    pub t: String,
}

impl Trapdoor {
    pub fn t(&self) -> &Exponent {
        &self.t
    }

    pub fn f(&self) -> &GroupElement {
        &self.f
    }

    pub fn to_file(&self) -> TrapdoorFile {
        TrapdoorFile { f: self.f.to_hex(), t: self.t.to_hex() }
    }

    pub fn from_file(file: &TrapdoorFile, params: &GroupParams) -> Result<Self> {
        let f = check_peer(params, parse_hex(&file.f)?)?;
        let t = params.nonzero_exponent(&parse_hex(&file.t)?)?;
        Ok(Trapdoor { t, f })
    }
}

/// Draws `t` uniformly from `[1, p-1]` and publishes `g = f^t`.
pub fn forge_standard<R: Rng + ?Sized>(params: &GroupParams, rng: &mut R) -> (PublishedStandard, Trapdoor) {
    let t = params.random_exponent(rng);
    forge_with(params, t)
}

/// [`forge_standard`] with a chosen trapdoor.
pub fn forge_standard_with_trapdoor(params: &GroupParams, t: &BigUint) -> Result<(PublishedStandard, Trapdoor)> {
    Ok(forge_with(params, params.nonzero_exponent(t)?))
}

fn forge_with(params: &GroupParams, t: Exponent) -> (PublishedStandard, Trapdoor) {
    let g = params.pow_f(&t);
    (
        PublishedStandard { params: params.clone(), g },
        Trapdoor { t, f: params.generator() },
    )
}

/// Recovers `F(g^{ab})` from a transcript with one MDH query:
/// `f^b = (g^b)^{t^{-1}}`, then `DH_f(g^a, f^b) = F(f^{tab}) = F(g^{ab})`.
pub fn authority_recover<O: MdhOracle + ?Sized>(
    trapdoor: &Trapdoor,
    standard: &PublishedStandard,
    transcript: &Transcript,
    oracle: &mut O,
) -> Result<DerivedKey> {
    let params = &standard.params;
    if !params.is_member(trapdoor.f.value()) || params.pow(&trapdoor.f, &trapdoor.t) != standard.g {
        return Err(Error::TrapdoorMismatch);
    }
    if oracle.base() != &trapdoor.f {
        return Err(Error::OracleBase(oracle.base().to_hex(), trapdoor.f.to_hex()));
    }
    if transcript.generator != standard.g {
        return Err(Error::InvalidArgument("transcript was not produced under this standard".into()));
    }
    let msg_a = check_peer(params, transcript.msg_a.value().clone())?;
    let msg_b = check_peer(params, transcript.msg_b.value().clone())?;
    let u = params.invert_exponent(&trapdoor.t)?;
    let fb = params.pow(&msg_b, &u);
    oracle.answer(&msg_a, &fb)
}

/// Runs an honest agreement under the standard and checks that the
/// authority's recovered key equals both parties' keys.
pub fn verify_recovery<O: MdhOracle + ?Sized>(
    standard: &PublishedStandard,
    trapdoor: &Trapdoor,
    seed_a: u64,
    seed_b: u64,
    oracle: &mut O,
) -> Result<bool> {
    let run = run_agreement(&standard.params, &standard.g, seed_a, seed_b)?;
    let recovered = authority_recover(trapdoor, standard, &run.transcript, oracle)?;
    Ok(recovered == run.key_alice && recovered == run.key_bob)
}
