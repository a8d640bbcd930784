//! Two-party key agreement and the key derivation function `F`.
//!
//! `F(s)` is the first 80 bits of SHA-256 over the canonical hex encoding of
//! `s`. When `p < 2^80` the key carries at most `log2 p` bits of entropy.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{exp_fast_base, mod_exp, parse_hex, CostCounter, Exponent, GroupElement, GroupParams};

pub const DERIVED_KEY_LEN: usize = 10;

#[derive(Clone, PartialEq, Eq)]
pub struct KeyPair {
    secret: Exponent,
    public: GroupElement,
}

impl KeyPair {
    /// Builds a key pair for a chosen secret in `[1, p-1]`.
    pub fn from_secret(params: &GroupParams, generator: &GroupElement, secret: &BigUint) -> Result<Self> {
        check_generator(params, generator)?;
        if secret.bits() == 0 || secret >= params.p() {
            return Err(Error::ZeroExponent);
        }
        let secret = params.exponent(secret);
        let public = public_for(params, generator, &secret);
        Ok(KeyPair { secret, public })
    }

    pub fn secret(&self) -> &Exponent {
        &self.secret
    }

    pub fn public(&self) -> &GroupElement {
        &self.public
    }

    pub fn to_file(&self) -> KeyFile {
        KeyFile { public: self.public.to_hex(), secret: Some(self.secret.to_hex()) }
    }
}

impl fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyPair").field("public", &self.public).finish_non_exhaustive()
    }
}

/// Output of `F`: 80 bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivedKey([u8; DERIVED_KEY_LEN]);

impl DerivedKey {
    pub fn from_bytes(bytes: [u8; DERIVED_KEY_LEN]) -> Self {
        DerivedKey(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; DERIVED_KEY_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Debug for DerivedKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DerivedKey({})", self.to_hex())
    }
}

impl fmt::Display for DerivedKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// The two public messages of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub params_id: String,
    pub generator: GroupElement,
    pub msg_a: GroupElement,
    pub msg_b: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptFile {
    pub g: String,
    pub msg_a: String,
    pub msg_b: String,
    pub params_id: String,
}

impl Transcript {
    pub fn to_file(&self) -> TranscriptFile {
        TranscriptFile {
            g: self.generator.to_hex(),
            msg_a: self.msg_a.to_hex(),
            msg_b: self.msg_b.to_hex(),
            params_id: self.params_id.clone(),
        }
    }

    /// Parses a transcript and screens both messages.
    pub fn from_file(file: &TranscriptFile, params: &GroupParams) -> Result<Self> {
        let generator = params.element_from_hex(&file.g)?;
        check_generator(params, &generator)?;
        let msg_a = parse_hex(&file.msg_a)?;
        let msg_b = parse_hex(&file.msg_b)?;
        Ok(Transcript {
            params_id: file.params_id.clone(),
            generator,
            msg_a: check_peer(params, msg_a)?,
            msg_b: check_peer(params, msg_b)?,
        })
    }
}

/// Key file. The secret is absent in public-only copies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub public: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secret: Option<String>,
}

impl KeyFile {
    pub fn public(&self, params: &GroupParams) -> Result<GroupElement> {
        params.element_from_hex(&self.public)
    }

    pub fn secret(&self) -> Result<BigUint> {
        let s = self.secret.as_deref().ok_or_else(|| Error::InvalidArgument("key file has no secret".into()))?;
        parse_hex(s)
    }

    /// Writes the file readable by the owner only (mode 0600 on unix).
    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        let mut opts = fs::OpenOptions::new();
        opts.write(true).create(true).truncate(true);
        #[cfg(unix)]
        {
            use std::os::unix::fs::OpenOptionsExt;
            opts.mode(0o600);
        }
        let mut file = opts.open(path)?;
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            file.set_permissions(fs::Permissions::from_mode(0o600))?;
        }
        file.write_all(json.as_bytes())?;
        file.write_all(b"\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

fn check_generator(params: &GroupParams, generator: &GroupElement) -> Result<()> {
    if !params.is_member(generator.value()) {
        return Err(Error::NotMember(generator.to_hex()));
    }
    if generator.is_identity() {
        return Err(Error::Identity);
    }
    Ok(())
}

/// Screens a received protocol message: subgroup member and not the identity.
pub fn check_peer(params: &GroupParams, v: BigUint) -> Result<GroupElement> {
    let el = params.element(v)?;
    if el.is_identity() {
        return Err(Error::Identity);
    }
    Ok(el)
}

fn public_for(params: &GroupParams, generator: &GroupElement, secret: &Exponent) -> GroupElement {
    let mut counter = CostCounter::new();
    if generator.value() == params.f() {
        exp_fast_base(secret.value(), params, &mut counter)
    } else {
        mod_exp(generator, secret.value(), params, &mut counter)
    }
}

/// Secret uniform in `[1, p-1]`, public `generator^secret`.
pub fn keygen<R: Rng + ?Sized>(params: &GroupParams, generator: &GroupElement, rng: &mut R) -> Result<KeyPair> {
    check_generator(params, generator)?;
    let secret = params.random_exponent(rng);
    let public = public_for(params, generator, &secret);
    Ok(KeyPair { secret, public })
}

pub fn keygen_seeded(params: &GroupParams, generator: &GroupElement, seed: u64) -> Result<KeyPair> {
    keygen(params, generator, &mut ChaCha20Rng::seed_from_u64(seed))
}

/// `peer_public^secret`, after screening the peer value.
pub fn shared_secret(own: &KeyPair, peer_public: &GroupElement, params: &GroupParams) -> Result<GroupElement> {
    let peer = check_peer(params, peer_public.value().clone())?;
    Ok(params.pow(&peer, &own.secret))
}

/// `F`: truncated SHA-256 of the canonical encoding.
pub fn derive_key(s: &GroupElement) -> DerivedKey {
    let digest = Sha256::digest(s.to_hex().as_bytes());
    let mut out = [0u8; DERIVED_KEY_LEN];
    out.copy_from_slice(&digest[..DERIVED_KEY_LEN]);
    DerivedKey(out)
}

/// Result of an in-process run of the protocol.
#[derive(Clone, Debug)]
pub struct Agreement {
    pub transcript: Transcript,
    pub shared_alice: GroupElement,
    pub shared_bob: GroupElement,
    pub key_alice: DerivedKey,
    pub key_bob: DerivedKey,
}

impl Agreement {
    pub fn keys_match(&self) -> bool {
        self.key_alice == self.key_bob
    }
}

/// Runs both parties with fixed key pairs.
pub fn agree_with_keys(
    params: &GroupParams,
    generator: &GroupElement,
    alice: &KeyPair,
    bob: &KeyPair,
) -> Result<Agreement> {
    check_generator(params, generator)?;
    let transcript = Transcript {
        params_id: params.id(),
        generator: generator.clone(),
        msg_a: alice.public.clone(),
        msg_b: bob.public.clone(),
    };
    let shared_alice = shared_secret(alice, &transcript.msg_b, params)?;
    let shared_bob = shared_secret(bob, &transcript.msg_a, params)?;
    Ok(Agreement {
        key_alice: derive_key(&shared_alice),
        key_bob: derive_key(&shared_bob),
        transcript,
        shared_alice,
        shared_bob,
    })
}

/// Simulates Alice (seed `seed_a`) and Bob (seed `seed_b`).
pub fn run_agreement(params: &GroupParams, generator: &GroupElement, seed_a: u64, seed_b: u64) -> Result<Agreement> {
    let alice = keygen_seeded(params, generator, seed_a)?;
    let bob = keygen_seeded(params, generator, seed_b)?;
    agree_with_keys(params, generator, &alice, &bob)
}
