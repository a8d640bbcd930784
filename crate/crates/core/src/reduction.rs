//! Moving a DH or DL oracle for the fast generator `f` to an arbitrary base
//! `g = f^r`.
//!
//! DH: first obtain `f^{1/r}` by running square-and-multiply on the exponent
//! `p - 2` *inside* the oracle (each oracle call multiplies exponents), then
//! two more calls finish the job. DL: two oracle calls and one inversion.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::group::{Exponent, GroupElement, GroupParams};
use crate::oracle::{DhOracle, DlOracle};

/// `2 * ceil(log2 p)`, the query budget of [`invert_exponent`].
pub fn invert_query_bound(p: &BigUint) -> u64 {
    2 * (p - 1u32).bits()
}

/// Query budget of [`dh_any_base`].
pub fn dh_any_base_query_bound(p: &BigUint) -> u64 {
    invert_query_bound(p) + 2
}

fn ensure_member(params: &GroupParams, v: &GroupElement) -> Result<()> {
    if params.is_member(v.value()) {
        Ok(())
    } else {
        Err(Error::NotMember(v.to_hex()))
    }
}

/// Given `fr = f^r` and a DH oracle for `f`, returns `f^{r^{-1} mod p}`.
///
/// Computes `f^{r^{p-2}}` with left-to-right square-and-multiply over the
/// bits of `p - 2`: a squaring is `h <- DH(h, h)`, a multiply (on a set bit)
/// is `h <- DH(h, fr)`.
pub fn invert_exponent<O: DhOracle + ?Sized>(
    oracle: &mut O,
    fr: &GroupElement,
    params: &GroupParams,
) -> Result<GroupElement> {
    ensure_member(params, fr)?;
    if fr.is_identity() {
        return Err(Error::Identity);
    }
    let e = params.p() - 2u32;
    let mut h = fr.clone();
    for i in (0..e.bits() - 1).rev() {
        h = oracle.answer(&h, &h)?;
        if e.bit(i) {
            h = oracle.answer(&h, fr)?;
        }
    }
    Ok(h)
}

/// DH for base `g` from a DH oracle for `f`: returns `g^{xy}` given `g^x`, `g^y`.
pub fn dh_any_base<O: DhOracle + ?Sized>(
    oracle_f: &mut O,
    g: &GroupElement,
    gx: &GroupElement,
    gy: &GroupElement,
    params: &GroupParams,
) -> Result<GroupElement> {
    for v in [g, gx, gy] {
        ensure_member(params, v)?;
    }
    if g.is_identity() {
        return Err(Error::Identity);
    }
    if g == oracle_f.base() {
        return oracle_f.answer(gx, gy);
    }
    // g = f^r
    let f_inv_r = invert_exponent(oracle_f, g, params)?;
    let fy = oracle_f.answer(&f_inv_r, gy)?;
    oracle_f.answer(gx, &fy)
}

/// DL for base `g` from a DL oracle for `f`. Exactly two oracle queries.
pub fn dl_any_base<O: DlOracle + ?Sized>(
    oracle_f: &mut O,
    g: &GroupElement,
    gx: &GroupElement,
    params: &GroupParams,
) -> Result<Exponent> {
    for v in [g, gx] {
        ensure_member(params, v)?;
    }
    if g.is_identity() {
        return Err(Error::Identity);
    }
    let r = oracle_f.answer(g)?;
    let rx = oracle_f.answer(gx)?;
    let s = params.invert_exponent(&r)?;
    Ok(params.mul_exponents(&s, &rx))
}
