//! C ABI for fastgen.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Group elements and exponents are
//! lowercase hex C strings. Every fallible call returns a [`FastgenStatus`];
//! the message for the most recent failure on the calling thread is
//! available from [`fastgen_last_error`].
//!
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`fastgen_string_free`]; byte buffers with
//! [`fastgen_bytes_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fastgen::bench::bench_exp;
use fastgen::group::{generate_params_bounded, parse_hex, DEFAULT_MAX_ATTEMPTS};
use fastgen::oracle::{make_perfect_dh_oracle, make_perfect_dl_oracle, DhOracle, DlOracle};
use fastgen::pkc::{celebrity_encrypt, subscriber_decrypt, Ciphertext, CelebrityKey, SubscriberKey};
use fastgen::protocol::{derive_key, keygen_seeded, shared_secret, KeyPair, Transcript, TranscriptFile, DERIVED_KEY_LEN};
use fastgen::reduction::{dh_any_base, dl_any_base};
use fastgen::standard::{
    authority_recover, forge_standard, forge_standard_with_trapdoor, make_simulated_mdh_oracle, PublishedStandard,
    SimulatedMdhOracle, StandardFile, Trapdoor, TrapdoorFile,
};
use fastgen::{Error, GroupElement, GroupParams};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Status codes. Values other than `Ok` and `Internal` match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FastgenStatus {
    Ok = 0,
    /// Bad parameters, arguments, hex, JSON, I/O or a null pointer.
    InvalidArgument = 2,
    /// Membership, identity, zero exponent, non-invertible or malformed input.
    Protocol = 3,
    /// Group too large for the discrete-log backed oracles.
    ScaleBound = 4,
    TrapdoorMismatch = 5,
    HeaderMismatch = 6,
    /// A panic was caught at the boundary.
    Internal = 70,
}

impl From<&Error> for FastgenStatus {
    fn from(e: &Error) -> Self {
        match e.exit_code() {
            3 => FastgenStatus::Protocol,
            4 => FastgenStatus::ScaleBound,
            5 => FastgenStatus::TrapdoorMismatch,
            6 => FastgenStatus::HeaderMismatch,
            _ => FastgenStatus::InvalidArgument,
        }
    }
}

/// Group parameters.
pub struct FastgenParams(GroupParams);

/// A secret exponent with its public value under some generator.
pub struct FastgenKeyPair {
    pair: KeyPair,
    generator: GroupElement,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn null_arg(name: &str) -> Error {
    Error::InvalidArgument(format!("{name} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Error>) -> FastgenStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FastgenStatus::Ok,
        Ok(Err(e)) => {
            set_last_error(e.to_string());
            FastgenStatus::from(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            FastgenStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, Error> {
    if s.is_null() {
        return Err(null_arg(name));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Error::InvalidArgument(format!("{name} is not UTF-8")))
}

unsafe fn opt_str<'a>(s: *const c_char, name: &str) -> Result<Option<&'a str>, Error> {
    if s.is_null() {
        Ok(None)
    } else {
        read_str(s, name).map(Some)
    }
}

unsafe fn handle<'a, T>(h: *const T, name: &str) -> Result<&'a T, Error> {
    h.as_ref().ok_or_else(|| null_arg(name))
}

unsafe fn bytes<'a>(data: *const u8, len: usize, name: &str) -> Result<&'a [u8], Error> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null_arg(name));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn put<T>(out: *mut T, value: T, name: &str) -> Result<(), Error> {
    if out.is_null() {
        return Err(null_arg(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String, name: &str) -> Result<(), Error> {
    let c = CString::new(s).map_err(|_| Error::InvalidArgument("string contains NUL".into()))?;
    if out.is_null() {
        return Err(null_arg(name));
    }
    out.write(c.into_raw());
    Ok(())
}

unsafe fn put_bytes(out: *mut *mut u8, out_len: *mut usize, data: Vec<u8>) -> Result<(), Error> {
    if out.is_null() || out_len.is_null() {
        return Err(null_arg("output buffer"));
    }
    let boxed = data.into_boxed_slice();
    out_len.write(boxed.len());
    out.write(Box::into_raw(boxed) as *mut u8);
    Ok(())
}

unsafe fn put_key(out: *mut u8, key: &[u8; DERIVED_KEY_LEN]) -> Result<(), Error> {
    if out.is_null() {
        return Err(null_arg("key output"));
    }
    ptr::copy_nonoverlapping(key.as_ptr(), out, DERIVED_KEY_LEN);
    Ok(())
}

fn generator(params: &GroupParams, hex: Option<&str>) -> Result<GroupElement, Error> {
    hex.map_or_else(|| Ok(params.generator()), |h| params.element_from_hex(h))
}

/// Length in bytes of derived session keys.
#[no_mangle]
pub extern "C" fn fastgen_derived_key_len() -> usize {
    DERIVED_KEY_LEN
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fastgen_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn fastgen_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `data`/`len` must be null or a buffer returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn fastgen_bytes_free(data: *mut u8, len: usize) {
    if !data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(data, len)));
    }
}

/// Generates a safe-prime group of `bits` bits with generator 2.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fastgen_params_generate(bits: u64, seed: u64, out: *mut *mut FastgenParams) -> FastgenStatus {
    guard(|| {
        let params = generate_params_bounded(bits, seed, DEFAULT_MAX_ATTEMPTS)?;
        put(out, Box::into_raw(Box::new(FastgenParams(params))), "out")
    })
}

/// Parses a parameter file (`{"cofactor","f","p","q"}` in hex).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fastgen_params_from_json(json: *const c_char, out: *mut *mut FastgenParams) -> FastgenStatus {
    guard(|| {
        let params = GroupParams::from_json(read_str(json, "json")?)?;
        put(out, Box::into_raw(Box::new(FastgenParams(params))), "out")
    })
}

/// # Safety
/// `params` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fastgen_params_to_json(params: *const FastgenParams, out: *mut *mut c_char) -> FastgenStatus {
    guard(|| put_string(out, handle(params, "params")?.0.to_json(), "out"))
}

/// # Safety
/// `params` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn fastgen_params_free(params: *mut FastgenParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Draws a key pair from `seed` under `generator_hex` (null for the fast
/// generator).
///
/// # Safety
/// Pointers must be valid; `generator_hex` may be null.
#[no_mangle]
pub unsafe extern "C" fn fastgen_keypair_generate(
    params: *const FastgenParams,
    generator_hex: *const c_char,
    seed: u64,
    out: *mut *mut FastgenKeyPair,
) -> FastgenStatus {
    guard(|| {
        let params = &handle(params, "params")?.0;
        let g = generator(params, opt_str(generator_hex, "generator")?)?;
        let pair = keygen_seeded(params, &g, seed)?;
        put(out, Box::into_raw(Box::new(FastgenKeyPair { pair, generator: g })), "out")
    })
}

/// Builds a key pair from an explicit secret in `[1, p-1]`.
///
/// # Safety
/// Pointers must be valid; `generator_hex` may be null.
#[no_mangle]
pub unsafe extern "C" fn fastgen_keypair_from_secret(
    params: *const FastgenParams,
    generator_hex: *const c_char,
    secret_hex: *const c_char,
    out: *mut *mut FastgenKeyPair,
) -> FastgenStatus {
    guard(|| {
        let params = &handle(params, "params")?.0;
        let g = generator(params, opt_str(generator_hex, "generator")?)?;
        let pair = KeyPair::from_secret(params, &g, &parse_hex(read_str(secret_hex, "secret")?)?)?;
        put(out, Box::into_raw(Box::new(FastgenKeyPair { pair, generator: g })), "out")
    })
}

/// # Safety
/// `pair` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fastgen_keypair_public(pair: *const FastgenKeyPair, out: *mut *mut c_char) -> FastgenStatus {
    guard(|| put_string(out, handle(pair, "pair")?.pair.public().to_hex(), "out"))
}

/// # Safety
/// `pair` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fastgen_keypair_secret(pair: *const FastgenKeyPair, out: *mut *mut c_char) -> FastgenStatus {
    guard(|| put_string(out, handle(pair, "pair")?.pair.secret().to_hex(), "out"))
}

/// # Safety
/// `pair` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn fastgen_keypair_free(pair: *mut FastgenKeyPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Screens `peer_public_hex` and writes the derived session key
/// (`fastgen_derived_key_len()` bytes) to `key_out`.
///
/// # Safety
/// Handles must be live; `key_out` must hold `fastgen_derived_key_len()` bytes.
#[no_mangle]
pub unsafe extern "C" fn fastgen_session_key(
    params: *const FastgenParams,
    own: *const FastgenKeyPair,
    peer_public_hex: *const c_char,
    key_out: *mut u8,
) -> FastgenStatus {
    guard(|| {
        let params = &handle(params, "params")?.0;
        let own = &handle(own, "own")?.pair;
        let peer = params.element_from_hex(read_str(peer_public_hex, "peer")?)?;
        put_key(key_out, derive_key(&shared_secret(own, &peer, params)?).as_bytes())
    })
}

/// Operation-count benchmark; writes the JSON report to `out`.
///
/// # Safety
/// `params` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fastgen_bench_exp(
    params: *const FastgenParams,
    trials: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> FastgenStatus {
    guard(|| put_string(out, bench_exp(&handle(params, "params")?.0, trials, seed, false)?.to_json(), "out"))
}

/// Computes `g^{xy}` for base `g` through a DH oracle for the fast generator.
///
/// # Safety
/// Pointers must be valid; `queries` may be null.
#[no_mangle]
pub unsafe extern "C" fn fastgen_reduce_dh(
    params: *const FastgenParams,
    base_hex: *const c_char,
    gx_hex: *const c_char,
    gy_hex: *const c_char,
    answer: *mut *mut c_char,
    queries: *mut u64,
) -> FastgenStatus {
    guard(|| {
        let params = &handle(params, "params")?.0;
        let g = params.element_from_hex(read_str(base_hex, "base")?)?;
        let gx = params.element_from_hex(read_str(gx_hex, "gx")?)?;
        let gy = params.element_from_hex(read_str(gy_hex, "gy")?)?;
        let mut oracle = make_perfect_dh_oracle(params, &params.generator())?;
        let h = dh_any_base(&mut oracle, &g, &gx, &gy, params)?;
        if !queries.is_null() {
            queries.write(oracle.query_count());
        }
        put_string(answer, h.to_hex(), "answer")
    })
}

/// Computes `log_g(gx)` through a DL oracle for the fast generator.
///
/// # Safety
/// Pointers must be valid; `queries` may be null.
#[no_mangle]
pub unsafe extern "C" fn fastgen_reduce_dl(
    params: *const FastgenParams,
    base_hex: *const c_char,
    gx_hex: *const c_char,
    answer: *mut *mut c_char,
    queries: *mut u64,
) -> FastgenStatus {
    guard(|| {
        let params = &handle(params, "params")?.0;
        let g = params.element_from_hex(read_str(base_hex, "base")?)?;
        let gx = params.element_from_hex(read_str(gx_hex, "gx")?)?;
        let mut oracle = make_perfect_dl_oracle(params, &params.generator())?;
        let x = dl_any_base(&mut oracle, &g, &gx, params)?;
        if !queries.is_null() {
            queries.write(oracle.query_count());
        }
        put_string(answer, x.to_hex(), "answer")
    })
}

/// Forges a standard. `trapdoor_hex` fixes the trapdoor; when null it is
/// drawn from `seed`. Both outputs are JSON documents.
///
/// # Safety
/// Pointers must be valid; `trapdoor_hex` may be null.
#[no_mangle]
pub unsafe extern "C" fn fastgen_forge(
    params: *const FastgenParams,
    seed: u64,
    trapdoor_hex: *const c_char,
    standard_json: *mut *mut c_char,
    trapdoor_json: *mut *mut c_char,
) -> FastgenStatus {
    guard(|| {
        let params = &handle(params, "params")?.0;
        let (standard, td) = match opt_str(trapdoor_hex, "trapdoor")? {
            Some(t) => forge_standard_with_trapdoor(params, &parse_hex(t)?)?,
            None => forge_standard(params, &mut ChaCha20Rng::seed_from_u64(seed)),
        };
        let std_json = serde_json::to_string(&standard.to_file())?;
        let td_json = serde_json::to_string(&td.to_file())?;
        put_string(standard_json, std_json, "standard_json")?;
        put_string(trapdoor_json, td_json, "trapdoor_json")
    })
}

/// Recovers the session key of a transcript (`{"g","msg_a","msg_b","params_id"}`)
/// made under a forged standard.
///
/// # Safety
/// Strings must be NUL-terminated; `key_out` must hold
/// `fastgen_derived_key_len()` bytes.
#[no_mangle]
pub unsafe extern "C" fn fastgen_recover(
    standard_json: *const c_char,
    trapdoor_json: *const c_char,
    transcript_json: *const c_char,
    key_out: *mut u8,
) -> FastgenStatus {
    guard(|| {
        let standard_file: StandardFile = serde_json::from_str(read_str(standard_json, "standard")?)?;
        let trapdoor_file: TrapdoorFile = serde_json::from_str(read_str(trapdoor_json, "trapdoor")?)?;
        let transcript_file: TranscriptFile = serde_json::from_str(read_str(transcript_json, "transcript")?)?;
        let standard = PublishedStandard::from_file(&standard_file)?;
        let params = standard.params();
        let trapdoor = Trapdoor::from_file(&trapdoor_file, params).map_err(|e| match e {
            Error::NotMember(_) | Error::Identity | Error::ZeroExponent => Error::TrapdoorMismatch,
            other => other,
        })?;
        let transcript = Transcript::from_file(&transcript_file, params)?;
        let mut oracle = SimulatedMdhOracle::with_base(params, trapdoor.f())?;
        put_key(key_out, authority_recover(&trapdoor, &standard, &transcript, &mut oracle)?.as_bytes())
    })
}

/// Serializes the transcript of an agreement between `alice` and `bob`
/// (made under the same generator) as JSON.
///
/// # Safety
/// Handles must be live; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fastgen_transcript(
    params: *const FastgenParams,
    alice: *const FastgenKeyPair,
    bob: *const FastgenKeyPair,
    out: *mut *mut c_char,
) -> FastgenStatus {
    guard(|| {
        let params = &handle(params, "params")?.0;
        let (alice, bob) = (handle(alice, "alice")?, handle(bob, "bob")?);
        if alice.generator != bob.generator {
            return Err(Error::InvalidArgument("key pairs use different generators".into()));
        }
        let run = fastgen::protocol::agree_with_keys(params, &alice.generator, &alice.pair, &bob.pair)?;
        put_string(out, serde_json::to_string(&run.transcript.to_file())?, "out")
    })
}

/// Broadcast encryption from a celebrity (secret `r`, public `f^r`) to a
/// subscriber whose public value is `(f^r)^a`. Uses the simulated
/// fast-generator oracle, so only desk-scale groups are supported.
///
/// # Safety
/// Pointers must be valid; `msg` may be null when `msg_len` is 0.
#[no_mangle]
pub unsafe extern "C" fn fastgen_pkc_encrypt(
    params: *const FastgenParams,
    celebrity_secret_hex: *const c_char,
    subscriber_public_hex: *const c_char,
    msg: *const u8,
    msg_len: usize,
    out: *mut *mut u8,
    out_len: *mut usize,
) -> FastgenStatus {
    guard(|| {
        let params = &handle(params, "params")?.0;
        let ck = CelebrityKey::from_secret(params, &parse_hex(read_str(celebrity_secret_hex, "celebrity secret")?)?)?;
        let recipient = params.element_from_hex(read_str(subscriber_public_hex, "subscriber public")?)?;
        let mut oracle = make_simulated_mdh_oracle(params)?;
        let ct = celebrity_encrypt(&ck, &recipient, bytes(msg, msg_len, "msg")?, &mut oracle, params)?;
        put_bytes(out, out_len, ct.to_bytes())
    })
}

/// Decrypts a broadcast ciphertext with the subscriber secret `a`.
///
/// # Safety
/// Pointers must be valid; `ct` may be null when `ct_len` is 0.
#[no_mangle]
pub unsafe extern "C" fn fastgen_pkc_decrypt(
    params: *const FastgenParams,
    subscriber_secret_hex: *const c_char,
    celebrity_public_hex: *const c_char,
    ct: *const u8,
    ct_len: usize,
    out: *mut *mut u8,
    out_len: *mut usize,
) -> FastgenStatus {
    guard(|| {
        let params = &handle(params, "params")?.0;
        let celebrity = params.element_from_hex(read_str(celebrity_public_hex, "celebrity public")?)?;
        let sk = SubscriberKey::from_secret(&celebrity, params, &parse_hex(read_str(subscriber_secret_hex, "subscriber secret")?)?)?;
        let ct = Ciphertext::from_bytes(bytes(ct, ct_len, "ct")?)?;
        put_bytes(out, out_len, subscriber_decrypt(&sk, &celebrity, &ct, params)?)
    })
}
