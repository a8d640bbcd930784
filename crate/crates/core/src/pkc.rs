//! Broadcast ("celebrity") public-key encryption.
//!
//! The celebrity publishes `g = f^r`; a subscriber publishes `g^a`. Using `r`
//! and an MDH oracle the celebrity computes `F(g^{a^2})` with a single query;
//! the subscriber computes `g^{a^2} = (g^a)^a` directly. The key material is
//! hashed to a 256-bit key for a length-preserving stream layer, so the
//! ciphertext body has exactly the plaintext's length.
//!
//! The classical variant replaces the oracle by an ordinary static DH key
//! `g^b` of the celebrity.
//!
//! The stream layer is SHA-256 in counter mode. It is test-grade and not
//! meant for production use.

use num_bigint::BigUint;
use rand::Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{Exponent, GroupElement, GroupParams};
use crate::protocol::{check_peer, derive_key, DerivedKey};
use crate::standard::MdhOracle;

pub const VERSION_MDH: u8 = 1;
pub const VERSION_CLASSICAL: u8 = 2;
pub const RECIPIENT_DIGEST_LEN: usize = 10;
pub const HEADER_LEN: usize = 1 + RECIPIENT_DIGEST_LEN;

pub type SymmetricKey = [u8; 32];

/// Celebrity secret `r` and published generator `g = f^r`.
#[derive(Clone, PartialEq, Eq)]
pub struct CelebrityKey {
    r: Exponent,
    g: GroupElement,
}

impl CelebrityKey {
    pub fn from_secret(params: &GroupParams, r: &BigUint) -> Result<Self> {
        if r.bits() == 0 || r >= params.p() {
            return Err(Error::ZeroExponent);
        }
        let r = params.exponent(r);
        Ok(CelebrityKey { g: params.pow_f(&r), r })
    }

    pub fn r(&self) -> &Exponent {
        &self.r
    }

    pub fn g(&self) -> &GroupElement {
        &self.g
    }
}

impl std::fmt::Debug for CelebrityKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CelebrityKey").field("g", &self.g).finish_non_exhaustive()
    }
}

/// Subscriber secret `a` and public `g^a`.
#[derive(Clone, PartialEq, Eq)]
pub struct SubscriberKey {
    a: Exponent,
    public: GroupElement,
}

impl SubscriberKey {
    pub fn from_secret(g: &GroupElement, params: &GroupParams, a: &BigUint) -> Result<Self> {
        let g = check_peer(params, g.value().clone())?;
        if a.bits() == 0 || a >= params.p() {
            return Err(Error::ZeroExponent);
        }
        let a = params.exponent(a);
        Ok(SubscriberKey { public: params.pow(&g, &a), a })
    }

    pub fn a(&self) -> &Exponent {
        &self.a
    }

    pub fn public(&self) -> &GroupElement {
        &self.public
    }
}

impl std::fmt::Debug for SubscriberKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SubscriberKey").field("public", &self.public).finish_non_exhaustive()
    }
}

/// Celebrity key of the classical variant: static `b` with public `g^b`.
#[derive(Clone, PartialEq, Eq)]
pub struct ClassicalCelebrityKey {
    b: Exponent,
    g: GroupElement,
    public: GroupElement,
}

impl ClassicalCelebrityKey {
    pub fn from_secret(g: &GroupElement, params: &GroupParams, b: &BigUint) -> Result<Self> {
        let sk = SubscriberKey::from_secret(g, params, b)?;
        Ok(ClassicalCelebrityKey { b: sk.a, g: g.clone(), public: sk.public })
    }

    pub fn b(&self) -> &Exponent {
        &self.b
    }

    pub fn g(&self) -> &GroupElement {
        &self.g
    }

    pub fn public(&self) -> &GroupElement {
        &self.public
    }
}

impl std::fmt::Debug for ClassicalCelebrityKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClassicalCelebrityKey")
            .field("g", &self.g)
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

/// Version octet, recipient digest, body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub version: u8,
    pub recipient: [u8; RECIPIENT_DIGEST_LEN],
    pub body: Vec<u8>,
}

impl Ciphertext {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.body.len());
        out.push(self.version);
        out.extend_from_slice(&self.recipient);
        out.extend_from_slice(&self.body);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::MalformedCiphertext(format!("{} bytes, header needs {HEADER_LEN}", bytes.len())));
        }
        let mut recipient = [0u8; RECIPIENT_DIGEST_LEN];
        recipient.copy_from_slice(&bytes[1..HEADER_LEN]);
        Ok(Ciphertext { version: bytes[0], recipient, body: bytes[HEADER_LEN..].to_vec() })
    }
}

/// Digest identifying a recipient's public key in the header.
pub fn recipient_digest(public: &GroupElement) -> [u8; RECIPIENT_DIGEST_LEN] {
    let mut h = Sha256::new();
    h.update(b"fastgen recipient v1:");
    h.update(public.to_hex().as_bytes());
    let digest = h.finalize();
    let mut out = [0u8; RECIPIENT_DIGEST_LEN];
    out.copy_from_slice(&digest[..RECIPIENT_DIGEST_LEN]);
    out
}

/// SHA-256 of the key material.
pub fn symmetric_key(material: &DerivedKey) -> SymmetricKey {
    Sha256::digest(material.as_bytes()).into()
}

/// XOR with the keystream `SHA-256(key || counter_be64)`, counter from 0.
/// Applying it twice with the same key is the identity.
pub fn stream_encrypt(key: &SymmetricKey, msg: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(msg.len());
    for (counter, chunk) in msg.chunks(32).enumerate() {
        let mut h = Sha256::new();
        h.update(key);
        h.update((counter as u64).to_be_bytes());
        let block = h.finalize();
        out.extend(chunk.iter().zip(block.iter()).map(|(m, k)| m ^ k));
    }
    out
}

pub fn celebrity_keygen<R: Rng + ?Sized>(params: &GroupParams, rng: &mut R) -> CelebrityKey {
    let r = params.random_exponent(rng);
    CelebrityKey { g: params.pow_f(&r), r }
}

pub fn subscriber_keygen<R: Rng + ?Sized>(g: &GroupElement, params: &GroupParams, rng: &mut R) -> Result<SubscriberKey> {
    let g = check_peer(params, g.value().clone())?;
    let a = params.random_exponent(rng);
    Ok(SubscriberKey { public: params.pow(&g, &a), a })
}

pub fn classical_celebrity_keygen<R: Rng + ?Sized>(
    g: &GroupElement,
    params: &GroupParams,
    rng: &mut R,
) -> Result<ClassicalCelebrityKey> {
    let sk = subscriber_keygen(g, params, rng)?;
    Ok(ClassicalCelebrityKey { b: sk.a, g: g.clone(), public: sk.public })
}

/// Key material `F(g^{a^2})` as the celebrity computes it:
/// `f^a = (g^a)^{r^{-1}}`, then one oracle call on `(g^a, f^a)`.
pub fn celebrity_key_material<O: MdhOracle + ?Sized>(
    ck: &CelebrityKey,
    subscriber_public: &GroupElement,
    oracle: &mut O,
    params: &GroupParams,
) -> Result<DerivedKey> {
    let public = check_peer(params, subscriber_public.value().clone())?;
    if oracle.base() != &params.generator() {
        return Err(Error::OracleBase(oracle.base().to_hex(), params.generator().to_hex()));
    }
    let fa = params.pow(&public, &params.invert_exponent(&ck.r)?);
    oracle.answer(&public, &fa)
}

pub fn celebrity_encrypt<O: MdhOracle + ?Sized>(
    ck: &CelebrityKey,
    subscriber_public: &GroupElement,
    msg: &[u8],
    oracle: &mut O,
    params: &GroupParams,
) -> Result<Ciphertext> {
    let material = celebrity_key_material(ck, subscriber_public, oracle, params)?;
    Ok(Ciphertext {
        version: VERSION_MDH,
        recipient: recipient_digest(subscriber_public),
        body: stream_encrypt(&symmetric_key(&material), msg),
    })
}

fn check_header(ct: &Ciphertext, version: u8, public: &GroupElement) -> Result<()> {
    if ct.version != version || ct.recipient != recipient_digest(public) {
        return Err(Error::HeaderMismatch);
    }
    Ok(())
}

pub fn subscriber_decrypt(sk: &SubscriberKey, g: &GroupElement, ct: &Ciphertext, params: &GroupParams) -> Result<Vec<u8>> {
    check_header(ct, VERSION_MDH, &sk.public)?;
    if params.pow(g, &sk.a) != sk.public {
        return Err(Error::InvalidArgument("subscriber key was not made for this generator".into()));
    }
    // g^{a^2} = (g^a)^a
    let material = derive_key(&params.pow(&sk.public, &sk.a));
    Ok(stream_encrypt(&symmetric_key(&material), &ct.body))
}

pub fn classical_encrypt(
    ck: &ClassicalCelebrityKey,
    subscriber_public: &GroupElement,
    msg: &[u8],
    params: &GroupParams,
) -> Result<Ciphertext> {
    let public = check_peer(params, subscriber_public.value().clone())?;
    let material = derive_key(&params.pow(&public, &ck.b));
    Ok(Ciphertext {
        version: VERSION_CLASSICAL,
        recipient: recipient_digest(&public),
        body: stream_encrypt(&symmetric_key(&material), msg),
    })
}

pub fn classical_decrypt(
    sk: &SubscriberKey,
    celebrity_public: &GroupElement,
    ct: &Ciphertext,
    params: &GroupParams,
) -> Result<Vec<u8>> {
    check_header(ct, VERSION_CLASSICAL, &sk.public)?;
    let peer = check_peer(params, celebrity_public.value().clone())?;
    let material = derive_key(&params.pow(&peer, &sk.a));
    Ok(stream_encrypt(&symmetric_key(&material), &ct.body))
}

/// Answers `g^x -> g^{x^2}` for the base returned by [`SquaringOracle::base`].
pub trait SquaringOracle {
    fn base(&self) -> &GroupElement;
    fn answer(&mut self, gx: &GroupElement) -> Result<GroupElement>;
    fn query_count(&self) -> u64;
}

impl<O: SquaringOracle + ?Sized> SquaringOracle for &mut O {
    fn base(&self) -> &GroupElement {
        (**self).base()
    }
    fn answer(&mut self, gx: &GroupElement) -> Result<GroupElement> {
        (**self).answer(gx)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

/// Desk-scale squaring oracle backed by discrete logs.
#[derive(Clone, Debug)]
pub struct PerfectSquaringOracle {
    params: GroupParams,
    table: crate::dlog::BsgsTable,
    queries: u64,
}

pub fn make_perfect_squaring_oracle(params: &GroupParams, base: &GroupElement) -> Result<PerfectSquaringOracle> {
    Ok(PerfectSquaringOracle { params: params.clone(), table: crate::dlog::BsgsTable::new(base, params)?, queries: 0 })
}

impl SquaringOracle for PerfectSquaringOracle {
    fn base(&self) -> &GroupElement {
        self.table.base()
    }

    fn answer(&mut self, gx: &GroupElement) -> Result<GroupElement> {
        self.queries += 1;
        let x = self.table.solve(gx)?;
        Ok(self.params.pow(self.table.base(), &self.params.mul_exponents(&x, &x)))
    }

    fn query_count(&self) -> u64 {
        self.queries
    }
}

/// DH from a squaring oracle with exactly three queries:
/// `g^{2xy} = g^{(x+y)^2} / (g^{x^2} g^{y^2})`, then raise to `2^{-1} mod p`.
pub fn square_to_dh<O: SquaringOracle + ?Sized>(
    sq: &mut O,
    g: &GroupElement,
    gx: &GroupElement,
    gy: &GroupElement,
    params: &GroupParams,
) -> Result<GroupElement> {
    for v in [g, gx, gy] {
        if !params.is_member(v.value()) {
            return Err(Error::NotMember(v.to_hex()));
        }
    }
    if sq.base() != g {
        return Err(Error::OracleBase(sq.base().to_hex(), g.to_hex()));
    }
    let x2 = sq.answer(gx)?;
    let y2 = sq.answer(gy)?;
    let sum2 = sq.answer(&params.mul(gx, gy))?;
    let two_xy = params.mul(&sum2, &params.invert(&params.mul(&x2, &y2)));
    let half = params.invert_exponent(&params.exponent(&BigUint::from(2u8)))?;
    Ok(params.pow(&two_xy, &half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::generate_params;
    use crate::standard::make_simulated_mdh_oracle;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn fixture() -> GroupParams {
        GroupParams::new(23u32.into(), 11u32.into(), 2u32.into()).unwrap()
    }

    fn el(params: &GroupParams, v: u32) -> GroupElement {
        params.element(v.into()).unwrap()
    }

    #[test]
    fn keygen_fixture() {
        let params = fixture();
        let ck = CelebrityKey::from_secret(&params, &3u32.into()).unwrap();
        assert_eq!(ck.g(), &el(&params, 8));
        assert_eq!(CelebrityKey::from_secret(&params, &1u32.into()).unwrap().g(), &params.generator());
        let sk = SubscriberKey::from_secret(ck.g(), &params, &4u32.into()).unwrap();
        assert_eq!(sk.public(), &el(&params, 2));
        assert_eq!(SubscriberKey::from_secret(ck.g(), &params, &1u32.into()).unwrap().public(), ck.g());
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert!(matches!(subscriber_keygen(&params.identity(), &params, &mut rng), Err(Error::Identity)));
        for _ in 0..50 {
            let ck = celebrity_keygen(&params, &mut rng);
            assert!(params.is_member(ck.g().value()) && !ck.g().is_identity());
        }
    }

    #[test]
    fn encrypt_fixture() {
        let params = fixture();
        let ck = CelebrityKey::from_secret(&params, &3u32.into()).unwrap();
        let sk = SubscriberKey::from_secret(ck.g(), &params, &4u32.into()).unwrap();
        let mut o = make_simulated_mdh_oracle(&params).unwrap();
        // f^a = 2^{inv(3)} = 2^4 = 16 and g^{a^2} = 8^16 = 16
        let material = celebrity_key_material(&ck, sk.public(), &mut o, &params).unwrap();
        assert_eq!(material, derive_key(&el(&params, 16)));
        assert_eq!(o.query_count(), 1);

        let msg = b"hello subscriber";
        let ct = celebrity_encrypt(&ck, sk.public(), msg, &mut o, &params).unwrap();
        assert_eq!(o.query_count(), 2);
        assert_eq!(ct.body.len(), msg.len());
        assert_eq!(subscriber_decrypt(&sk, ck.g(), &ct, &params).unwrap(), msg);

        let empty = celebrity_encrypt(&ck, sk.public(), b"", &mut o, &params).unwrap();
        assert!(empty.body.is_empty());
        assert_eq!(empty.to_bytes().len(), HEADER_LEN);
    }

    #[test]
    fn decrypt_rejects_other_recipient() {
        let params = fixture();
        let ck = CelebrityKey::from_secret(&params, &3u32.into()).unwrap();
        let alice = SubscriberKey::from_secret(ck.g(), &params, &4u32.into()).unwrap();
        let carol = SubscriberKey::from_secret(ck.g(), &params, &5u32.into()).unwrap();
        let mut o = make_simulated_mdh_oracle(&params).unwrap();
        let ct = celebrity_encrypt(&ck, alice.public(), b"secret", &mut o, &params).unwrap();
        assert!(matches!(subscriber_decrypt(&carol, ck.g(), &ct, &params), Err(Error::HeaderMismatch)));
        let wrong_version = Ciphertext { version: VERSION_CLASSICAL, ..ct };
        assert!(matches!(subscriber_decrypt(&alice, ck.g(), &wrong_version, &params), Err(Error::HeaderMismatch)));
    }

    #[test]
    fn subscriber_with_a_equal_one() {
        let params = fixture();
        let ck = CelebrityKey::from_secret(&params, &3u32.into()).unwrap();
        let sk = SubscriberKey::from_secret(ck.g(), &params, &1u32.into()).unwrap();
        let mut o = make_simulated_mdh_oracle(&params).unwrap();
        assert_eq!(celebrity_key_material(&ck, sk.public(), &mut o, &params).unwrap(), derive_key(ck.g()));
    }

    #[test]
    fn key_material_consistency_random() {
        let params = generate_params(16, 4).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let mut o = make_simulated_mdh_oracle(&params).unwrap();
        for _ in 0..50 {
            let ck = celebrity_keygen(&params, &mut rng);
            let sk = subscriber_keygen(ck.g(), &params, &mut rng).unwrap();
            let direct = derive_key(&params.pow(ck.g(), &params.mul_exponents(sk.a(), sk.a())));
            assert_eq!(celebrity_key_material(&ck, sk.public(), &mut o, &params).unwrap(), direct);
        }
    }

    #[test]
    fn classical_fixture_and_roundtrip() {
        let params = fixture();
        let two = params.generator();
        let bob = ClassicalCelebrityKey::from_secret(&two, &params, &3u32.into()).unwrap();
        let alice = SubscriberKey::from_secret(&two, &params, &4u32.into()).unwrap();
        // shared = 2^{12 mod 11} = 2
        let ct = classical_encrypt(&bob, alice.public(), b"abc", &params).unwrap();
        let expect = stream_encrypt(&symmetric_key(&derive_key(&el(&params, 2))), b"abc");
        assert_eq!(ct.body, expect);
        assert_eq!(classical_decrypt(&alice, bob.public(), &ct, &params).unwrap(), b"abc");

        let one_b = ClassicalCelebrityKey::from_secret(&two, &params, &1u32.into()).unwrap();
        let one_a = SubscriberKey::from_secret(&two, &params, &1u32.into()).unwrap();
        let ct = classical_encrypt(&one_b, one_a.public(), b"x", &params).unwrap();
        assert_eq!(ct.body, stream_encrypt(&symmetric_key(&derive_key(&two)), b"x"));

        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let params = generate_params(64, 5).unwrap();
        let g = params.pow_f(&params.random_exponent(&mut rng));
        let bob = classical_celebrity_keygen(&g, &params, &mut rng).unwrap();
        for len in 0..100usize {
            let alice = subscriber_keygen(&g, &params, &mut rng).unwrap();
            let mut msg = vec![0u8; len * 7];
            rng.fill_bytes(&mut msg);
            let ct = classical_encrypt(&bob, alice.public(), &msg, &params).unwrap();
            assert_eq!(ct.body.len(), msg.len());
            assert_eq!(classical_decrypt(&alice, bob.public(), &ct, &params).unwrap(), msg);
        }
    }

    #[test]
    fn stream_layer() {
        let key = [7u8; 32];
        for len in [0usize, 1, 31, 32, 33, 1000] {
            let msg: Vec<u8> = (0..len).map(|i| i as u8).collect();
            let ct = stream_encrypt(&key, &msg);
            assert_eq!(ct.len(), len);
            assert_eq!(stream_encrypt(&key, &ct), msg);
        }
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let msg = [0x5au8; 16];
        let mut seen = std::collections::HashSet::new();
        for _ in 0..100 {
            let mut k = [0u8; 32];
            rng.fill_bytes(&mut k);
            assert!(seen.insert(stream_encrypt(&k, &msg)));
        }
    }

    #[test]
    fn ciphertext_bytes() {
        let ct = Ciphertext { version: 1, recipient: [9; 10], body: vec![1, 2, 3] };
        let bytes = ct.to_bytes();
        assert_eq!(bytes[0], 1);
        assert_eq!(&bytes[1..11], &[9; 10]);
        assert_eq!(&bytes[11..], &[1, 2, 3]);
        assert_eq!(Ciphertext::from_bytes(&bytes).unwrap(), ct);
        assert!(matches!(Ciphertext::from_bytes(&bytes[..5]), Err(Error::MalformedCiphertext(_))));
    }

    #[test]
    fn square_to_dh_fixture() {
        let params = fixture();
        let two = params.generator();
        let mut sq = make_perfect_squaring_oracle(&params, &two).unwrap();
        assert_eq!(sq.answer(&el(&params, 8)).unwrap(), el(&params, 6));
        assert_eq!(sq.answer(&el(&params, 16)).unwrap(), el(&params, 9));
        assert_eq!(sq.answer(&el(&params, 13)).unwrap(), el(&params, 9)); // 8*16 mod 23 = 13 = 2^7, 49 = 5 mod 11
        let mut sq = make_perfect_squaring_oracle(&params, &two).unwrap();
        assert_eq!(square_to_dh(&mut sq, &two, &el(&params, 8), &el(&params, 16), &params).unwrap(), el(&params, 2));
        assert_eq!(sq.query_count(), 3);

        let gx = el(&params, 8);
        let direct = sq.answer(&gx).unwrap();
        assert_eq!(square_to_dh(&mut sq, &two, &gx, &gx, &params).unwrap(), direct);
        assert_eq!(square_to_dh(&mut sq, &two, &gx, &two, &params).unwrap(), gx);

        let eight = el(&params, 8);
        assert!(matches!(square_to_dh(&mut sq, &eight, &gx, &gx, &params), Err(Error::OracleBase(..))));
    }

    #[test]
    fn square_to_dh_exhaustive_fixture() {
        let params = fixture();
        let e = |v: u32| params.exponent(&v.into());
        for r in 1..11 {
            let g = params.pow_f(&e(r));
            let mut sq = make_perfect_squaring_oracle(&params, &g).unwrap();
            for x in 0..11 {
                for y in 0..11 {
                    let got = square_to_dh(&mut sq, &g, &params.pow(&g, &e(x)), &params.pow(&g, &e(y)), &params).unwrap();
                    assert_eq!(got, params.pow(&g, &e(x * y)));
                }
            }
            assert_eq!(sq.query_count(), 3 * 121);
        }
    }
}
