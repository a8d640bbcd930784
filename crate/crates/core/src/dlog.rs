//! Baby-step giant-step discrete logarithms for small subgroups.
//!
//! This is the ground truth behind every simulated oracle in the crate, so it
//! is deliberately restricted to orders of at most [`DEFAULT_MAX_ORDER_BITS`]
//! bits.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::group::{to_hex, Exponent, GroupElement, GroupParams};

pub const DEFAULT_MAX_ORDER_BITS: u64 = 48;

/// Precomputed baby steps `base^j, 0 <= j < m` for one base.
#[derive(Clone, Debug)]
pub struct BsgsTable {
    params: GroupParams,
    base: GroupElement,
    m: u64,
    baby: HashMap<BigUint, u64>,
    // base^{-m}
    giant: BigUint,
}

impl BsgsTable {
    pub fn new(base: &GroupElement, params: &GroupParams) -> Result<Self> {
        Self::with_bound(base, params, DEFAULT_MAX_ORDER_BITS)
    }

    pub fn with_bound(base: &GroupElement, params: &GroupParams, max_order_bits: u64) -> Result<Self> {
        let p = params.p();
        if p.bits() > max_order_bits {
            return Err(Error::ScaleBound(p.bits(), max_order_bits));
        }
        if !params.is_member(base.value()) {
            return Err(Error::NotMember(base.to_hex()));
        }
        if base.is_identity() {
            return Err(Error::Identity);
        }
        let q = params.q();
        let p_small = p.to_u64().expect("order below the scale bound");
        let mut m = p_small.sqrt();
        if m * m < p_small {
            m += 1;
        }
        let mut baby = HashMap::with_capacity(m as usize);
        let mut acc = BigUint::one();
        for j in 0..m {
            baby.entry(acc.clone()).or_insert(j);
            acc = (acc * base.value()) % q;
        }
        // acc = base^m
        let giant = acc.modpow(&(q - 2u32), q);
        Ok(BsgsTable { params: params.clone(), base: base.clone(), m, baby, giant })
    }

    pub fn base(&self) -> &GroupElement {
        &self.base
    }

    /// The `x` in `[0, p-1]` with `base^x = h`.
    pub fn solve(&self, h: &GroupElement) -> Result<Exponent> {
        let q = self.params.q();
        if !self.params.is_member(h.value()) {
            return Err(Error::NotMember(h.to_hex()));
        }
        let mut gamma = h.value().clone();
        for i in 0..self.m {
            if let Some(&j) = self.baby.get(&gamma) {
                let x = BigUint::from(i) * self.m + j;
                return Ok(self.params.exponent(&x));
            }
            gamma = (gamma * &self.giant) % q;
        }
        // unreachable when base generates the subgroup containing h
        Err(Error::NotMember(to_hex(h.value())))
    }
}

/// One-shot discrete log of `h` to `base`.
pub fn bsgs_dlog(h: &GroupElement, base: &GroupElement, params: &GroupParams) -> Result<Exponent> {
    BsgsTable::new(base, params)?.solve(h)
}
