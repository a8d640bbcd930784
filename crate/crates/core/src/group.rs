//! Arithmetic in the order-`p` subgroup of `F_q*`.
//!
//! Groups are safe-prime groups `q = 2p + 1` with `q ≡ 7 (mod 8)`, which makes
//! 2 a quadratic residue and therefore a generator of the subgroup of order
//! `p`. Multiplying by such a small generator is a shift followed by at most
//! one subtraction, which is what [`exp_fast_base`] exploits.
//!
//! Elements and exponents are plain arbitrary-precision integers wrapped in
//! newtypes; the [`GroupParams`] they belong to is passed alongside.

use std::fmt;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Smallest modulus size accepted by [`generate_params`] (q = 7).
pub const MIN_BITS: u64 = 3;
/// Largest modulus size accepted by [`generate_params`].
pub const MAX_BITS: u64 = 4096;
/// Candidate bound used by [`generate_params`].
pub const DEFAULT_MAX_ATTEMPTS: u64 = 5_000_000;

// Random Miller-Rabin rounds above 2^64; 4^-40 = 2^-80.
const MR_ROUNDS: usize = 40;
// Deterministic for n < 3.3 * 10^24.
const MR_FIXED_BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Lowercase big-endian hex without leading zeros (`"0"` for zero).
pub fn to_hex(v: &BigUint) -> String {
    v.to_str_radix(16)
}

/// Parses hex as written by [`to_hex`]. Upper-case digits are accepted.
pub fn parse_hex(s: &str) -> Result<BigUint> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::Hex(s.to_string()));
    }
    BigUint::parse_bytes(s.as_bytes(), 16).ok_or_else(|| Error::Hex(s.to_string()))
}

/// Element of the order-`p` subgroup, stored as its residue in `[1, q-1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(BigUint);

impl GroupElement {
    #[cfg(test)]
    pub(crate) fn from_trusted(v: BigUint) -> Self {
        GroupElement(v)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_value(self) -> BigUint {
        self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_one()
    }

    pub fn to_hex(&self) -> String {
        to_hex(&self.0)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement(0x{})", self.to_hex())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Exponent residue in `[0, p-1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent(BigUint);

impl Exponent {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_hex(&self) -> String {
        to_hex(&self.0)
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exponent(0x{})", self.to_hex())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Operation counts accumulated by the instrumented exponentiations.
///
/// Owned by the caller; pass a fresh counter per measurement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CostCounter {
    /// General full-width modular multiplications.
    pub full_mults: u64,
    /// Modular squarings.
    pub squarings: u64,
    /// Shift-and-reduce doublings or small-constant multiplications.
    pub fast_steps: u64,
}

impl CostCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, other: &CostCounter) {
        self.full_mults += other.full_mults;
        self.squarings += other.squarings;
        self.fast_steps += other.fast_steps;
    }
}

/// On-disk parameter file. All values lowercase hex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub cofactor: String,
    pub f: String,
    pub p: String,
    pub q: String,
}

/// Public description of the group: modulus `q`, prime order `p`, fast
/// generator `f` and `cofactor = (q-1)/p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupParams {
    q: BigUint,
    p: BigUint,
    f: BigUint,
    cofactor: BigUint,
}

impl GroupParams {
    /// Validates and assembles a parameter set.
    pub fn new(q: BigUint, p: BigUint, f: BigUint) -> Result<Self> {
        let three = BigUint::from(3u8);
        if p < three {
            return Err(Error::InvalidParams("p must be an odd prime".into()));
        }
        if !is_probable_prime(&q) {
            return Err(Error::InvalidParams(format!("q = {} is not prime", to_hex(&q))));
        }
        if !is_probable_prime(&p) {
            return Err(Error::InvalidParams(format!("p = {} is not prime", to_hex(&p))));
        }
        let q_minus_1 = &q - 1u32;
        let (cofactor, rem) = q_minus_1.div_rem(&p);
        if !rem.is_zero() {
            return Err(Error::InvalidParams("p does not divide q - 1".into()));
        }
        if f < BigUint::from(2u8) || f >= q {
            return Err(Error::InvalidParams("f must lie in [2, q-1]".into()));
        }
        if !f.modpow(&p, &q).is_one() {
            return Err(Error::InvalidParams("f does not generate the order-p subgroup".into()));
        }
        Ok(GroupParams { q, p, f, cofactor })
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn f(&self) -> &BigUint {
        &self.f
    }

    pub fn cofactor(&self) -> &BigUint {
        &self.cofactor
    }

    /// The fast generator as a group element.
    pub fn generator(&self) -> GroupElement {
        GroupElement(self.f.clone())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(BigUint::one())
    }

    pub fn is_member(&self, x: &BigUint) -> bool {
        !x.is_zero() && x < &self.q && x.modpow(&self.p, &self.q).is_one()
    }

    /// Checks subgroup membership and wraps `x`.
    pub fn element(&self, x: BigUint) -> Result<GroupElement> {
        if self.is_member(&x) {
            Ok(GroupElement(x))
        } else {
            Err(Error::NotMember(to_hex(&x)))
        }
    }

    pub fn element_from_hex(&self, s: &str) -> Result<GroupElement> {
        self.element(parse_hex(s)?)
    }

    /// Reduces `x` modulo `p`.
    pub fn exponent(&self, x: &BigUint) -> Exponent {
        Exponent(x % &self.p)
    }

    /// Like [`GroupParams::exponent`] but rejects `x ≡ 0 (mod p)`.
    pub fn nonzero_exponent(&self, x: &BigUint) -> Result<Exponent> {
        let e = self.exponent(x);
        if e.is_zero() {
            Err(Error::ZeroExponent)
        } else {
            Ok(e)
        }
    }

    /// Uniform exponent in `[1, p-1]`.
    pub fn random_exponent<R: Rng + ?Sized>(&self, rng: &mut R) -> Exponent {
        Exponent(rng.gen_biguint_range(&BigUint::one(), &self.p))
    }

    /// Uniform element of the subgroup, identity included.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let k = rng.gen_biguint_below(&self.p);
        GroupElement(self.f.modpow(&k, &self.q))
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement((&a.0 * &b.0) % &self.q)
    }

    /// Inverse in `F_q*`; stays inside the subgroup.
    pub fn invert(&self, a: &GroupElement) -> GroupElement {
        GroupElement(a.0.modpow(&(&self.q - 2u32), &self.q))
    }

    /// Uninstrumented `base^e mod q`.
    pub fn pow(&self, base: &GroupElement, e: &Exponent) -> GroupElement {
        GroupElement(base.0.modpow(&e.0, &self.q))
    }

    /// `f^e mod q` without instrumentation.
    pub fn pow_f(&self, e: &Exponent) -> GroupElement {
        GroupElement(self.f.modpow(&e.0, &self.q))
    }

    /// `(a * b) mod p`.
    pub fn mul_exponents(&self, a: &Exponent, b: &Exponent) -> Exponent {
        Exponent((&a.0 * &b.0) % &self.p)
    }

    /// `a^{-1} mod p`.
    pub fn invert_exponent(&self, a: &Exponent) -> Result<Exponent> {
        inv_mod(&a.0, &self.p).map(Exponent)
    }

    pub fn to_file(&self) -> ParamsFile {
        ParamsFile {
            cofactor: to_hex(&self.cofactor),
            f: to_hex(&self.f),
            p: to_hex(&self.p),
            q: to_hex(&self.q),
        }
    }

    /// Parses and fully re-validates a parameter file.
    pub fn from_file(file: &ParamsFile) -> Result<Self> {
        let params = GroupParams::new(parse_hex(&file.q)?, parse_hex(&file.p)?, parse_hex(&file.f)?)?;
        if parse_hex(&file.cofactor)? != params.cofactor {
            return Err(Error::InvalidParams("cofactor does not equal (q-1)/p".into()));
        }
        Ok(params)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("parameter file serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }

    /// SHA-256 over the compact canonical parameter file, hex encoded.
    pub fn id(&self) -> String {
        let canonical = serde_json::to_string(&self.to_file()).expect("parameter file serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// Generates a safe-prime group with `q` of exactly `bits` bits, `q ≡ 7 (mod 8)`
/// and `f = 2`. Deterministic in `seed`.
pub fn generate_params(bits: u64, seed: u64) -> Result<GroupParams> {
    generate_params_bounded(bits, seed, DEFAULT_MAX_ATTEMPTS)
}

/// [`generate_params`] with an explicit bound on the number of candidates.
pub fn generate_params_bounded(bits: u64, seed: u64, max_attempts: u64) -> Result<GroupParams> {
    if !(MIN_BITS..=MAX_BITS).contains(&bits) {
        return Err(Error::BitLength(bits));
    }
    // There are only 2^(bits-4) candidates of this shape; sampling 64x that
    // many misses a given one with probability about e^-64.
    let attempts = if bits < 40 {
        max_attempts.min(64u64 << bits.saturating_sub(4))
    } else {
        max_attempts
    };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let seven = BigUint::from(7u8);
    for _ in 0..attempts {
        let mut q = rng.gen_biguint(bits);
        q.set_bit(bits - 1, true);
        q |= &seven;
        if !sieve_safe_prime_candidate(&q) {
            continue;
        }
        let p: BigUint = &q >> 1;
        if !is_probable_prime(&p) || !is_probable_prime(&q) {
            continue;
        }
        return GroupParams::new(q, p, BigUint::from(2u8));
    }
    Err(Error::SearchExhausted(attempts))
}

fn sieve_safe_prime_candidate(q: &BigUint) -> bool {
    for &s in SMALL_PRIMES.iter().skip(1) {
        let s_big = BigUint::from(s);
        if q <= &s_big {
            break;
        }
        let r = (q % s).to_u32().expect("remainder below u32");
        // r == 0: s | q.  r == 1: s | p = (q-1)/2 unless p == s.
        if r == 0 || (r == 1 && (q >> 1u32) != s_big) {
            return false;
        }
    }
    true
}

/// Smallest `c >= 2` with `c^p ≡ 1 (mod q)`.
pub fn find_fast_generator(q: &BigUint, p: &BigUint) -> Result<BigUint> {
    if q < &BigUint::from(3u8) || !(q - 1u32).is_multiple_of(p) {
        return Err(Error::InvalidParams("p does not divide q - 1".into()));
    }
    let mut c = BigUint::from(2u8);
    while &c < q {
        if c.modpow(p, q).is_one() {
            return Ok(c);
        }
        c += 1u32;
    }
    Err(Error::InvalidParams("no element of order p below q".into()))
}

/// `true` iff `1 <= x <= q-1` and `x^p ≡ 1 (mod q)`.
pub fn is_subgroup_member(x: &BigUint, params: &GroupParams) -> bool {
    params.is_member(x)
}

/// Left-to-right square-and-multiply. Adds `bits(e) - 1` squarings and
/// `weight(e) - 1` full multiplications to `counter`.
pub fn mod_exp(
    base: &GroupElement,
    e: &BigUint,
    params: &GroupParams,
    counter: &mut CostCounter,
) -> GroupElement {
    GroupElement(square_and_multiply(&base.0, e, &params.q, counter, |acc, counter| {
        counter.full_mults += 1;
        (acc * &base.0) % &params.q
    }))
}

/// `2h mod q` by one shift and at most one subtraction.
pub fn fast_double(h: &BigUint, q: &BigUint, counter: &mut CostCounter) -> BigUint {
    counter.fast_steps += 1;
    let d = h << 1u32;
    if &d >= q {
        d - q
    } else {
        d
    }
}

/// `f^e mod q` where every multiply-by-`f` step is a [`fast_double`] (f = 2)
/// or a single-word multiply-and-reduce. Falls back to [`mod_exp`] when `f`
/// does not fit in a machine word.
pub fn exp_fast_base(e: &BigUint, params: &GroupParams, counter: &mut CostCounter) -> GroupElement {
    let Some(small) = params.f.to_u64() else {
        return mod_exp(&params.generator(), e, params, counter);
    };
    let q = &params.q;
    GroupElement(square_and_multiply(&params.f, e, q, counter, |acc, counter| {
        if small == 2 {
            fast_double(&acc, q, counter)
        } else {
            counter.fast_steps += 1;
            (acc * small) % q
        }
    }))
}

fn square_and_multiply<F>(
    base: &BigUint,
    e: &BigUint,
    q: &BigUint,
    counter: &mut CostCounter,
    mut mul_base: F,
) -> BigUint
where
    F: FnMut(BigUint, &mut CostCounter) -> BigUint,
{
    let bits = e.bits();
    if bits == 0 {
        return BigUint::one() % q;
    }
    let mut acc = base % q;
    for i in (0..bits - 1).rev() {
        acc = (&acc * &acc) % q;
        counter.squarings += 1;
        if e.bit(i) {
            acc = mul_base(acc, counter);
        }
    }
    acc
}

/// The `s` in `[1, m-1]` with `s * a ≡ 1 (mod m)`.
pub fn inv_mod(a: &BigUint, m: &BigUint) -> Result<BigUint> {
    let not_invertible = || Error::NotInvertible(to_hex(a), to_hex(m));
    if m <= &BigUint::one() {
        return Err(not_invertible());
    }
    let a_red = a % m;
    if a_red.is_zero() {
        return Err(not_invertible());
    }
    let a_int = BigInt::from_biguint(Sign::Plus, a_red);
    let m_int = BigInt::from_biguint(Sign::Plus, m.clone());
    let egcd = a_int.extended_gcd(&m_int);
    if !egcd.gcd.is_one() {
        return Err(not_invertible());
    }
    egcd.x.mod_floor(&m_int).to_biguint().ok_or_else(not_invertible)
}

/// Miller-Rabin. Deterministic below 2^64; otherwise 40 rounds with bases
/// drawn from a generator seeded by the candidate itself, so the answer is a
/// pure function of `n` with error below 2^-80.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        if small < 2 {
            return false;
        }
        for &s in SMALL_PRIMES.iter() {
            if small == s as u64 {
                return true;
            }
            if small % s as u64 == 0 {
                return false;
            }
        }
    } else {
        for &s in SMALL_PRIMES.iter() {
            if (n % s).is_zero() {
                return false;
            }
        }
    }

    let n_minus_1 = n - 1u32;
    let shift = n_minus_1.trailing_zeros().expect("n > 2");
    let d = &n_minus_1 >> shift;
    let witness = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            return true;
        }
        for _ in 1..shift {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                return true;
            }
        }
        false
    };

    if n.bits() <= 64 {
        return MR_FIXED_BASES.iter().all(|&a| {
            let a = BigUint::from(a);
            a >= n_minus_1 || witness(&a)
        });
    }

    let mut seed = [0u8; 32];
    seed.copy_from_slice(&Sha256::digest(n.to_bytes_be()));
    let mut rng = ChaCha20Rng::from_seed(seed);
    let two = BigUint::from(2u8);
    if !witness(&two) {
        return false;
    }
    (1..MR_ROUNDS).all(|_| witness(&rng.gen_biguint_range(&two, &n_minus_1)))
}

const SMALL_PRIMES: [u32; 168] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293,
    307, 311, 313, 317, 331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397, 401, 409, 419,
    421, 431, 433, 439, 443, 449, 457, 461, 463, 467, 479, 487, 491, 499, 503, 509, 521, 523, 541,
    547, 557, 563, 569, 571, 577, 587, 593, 599, 601, 607, 613, 617, 619, 631, 641, 643, 647, 653,
    659, 661, 673, 677, 683, 691, 701, 709, 719, 727, 733, 739, 743, 751, 757, 761, 769, 773, 787,
    797, 809, 811, 821, 823, 827, 829, 839, 853, 857, 859, 863, 877, 881, 883, 887, 907, 911, 919,
    929, 937, 941, 947, 953, 967, 971, 977, 983, 991, 997,
];
