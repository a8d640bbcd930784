#ifndef FASTGEN_H
#define FASTGEN_H

#include <stddef.h>
#include <stdint.h>

// Status codes. Values other than `Ok` and `Internal` match the CLI exit codes.
typedef enum FastgenStatus {
  FASTGEN_STATUS_OK = 0,
  // Bad parameters, arguments, hex, JSON, I/O or a null pointer.
  FASTGEN_STATUS_INVALID_ARGUMENT = 2,
  // Membership, identity, zero exponent, non-invertible or malformed input.
  FASTGEN_STATUS_PROTOCOL = 3,
  // Group too large for the discrete-log backed oracles.
  FASTGEN_STATUS_SCALE_BOUND = 4,
  FASTGEN_STATUS_TRAPDOOR_MISMATCH = 5,
  FASTGEN_STATUS_HEADER_MISMATCH = 6,
  // A panic was caught at the boundary.
  FASTGEN_STATUS_INTERNAL = 70,
} FastgenStatus;

// A secret exponent with its public value under some generator.
typedef struct FastgenKeyPair FastgenKeyPair;

// Group parameters.
typedef struct FastgenParams FastgenParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Length in bytes of derived session keys.
size_t fastgen_derived_key_len(void);

// Message for the last failed call on this thread, or null. Valid until the
// next failing call on the same thread.
const char *fastgen_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void fastgen_string_free(char *s);

// # Safety
// `data`/`len` must be null or a buffer returned by this library, freed once.
void fastgen_bytes_free(uint8_t *data, size_t len);

// Generates a safe-prime group of `bits` bits with generator 2.
//
// # Safety
// `out` must be a valid pointer.
enum FastgenStatus fastgen_params_generate(uint64_t bits,
                                           uint64_t seed,
                                           struct FastgenParams **out);

// Parses a parameter file (`{"cofactor","f","p","q"}` in hex).
//
// # Safety
// `json` must be a NUL-terminated string; `out` a valid pointer.
enum FastgenStatus fastgen_params_from_json(const char *json, struct FastgenParams **out);

// # Safety
// `params` must be a live handle; `out` a valid pointer.
enum FastgenStatus fastgen_params_to_json(const struct FastgenParams *params, char **out);

// # Safety
// `params` must be null or a handle from this library, freed once.
void fastgen_params_free(struct FastgenParams *params);

// Draws a key pair from `seed` under `generator_hex` (null for the fast
// generator).
//
// # Safety
// Pointers must be valid; `generator_hex` may be null.
enum FastgenStatus fastgen_keypair_generate(const struct FastgenParams *params,
                                            const char *generator_hex,
                                            uint64_t seed,
                                            struct FastgenKeyPair **out);

// Builds a key pair from an explicit secret in `[1, p-1]`.
//
// # Safety
// Pointers must be valid; `generator_hex` may be null.
enum FastgenStatus fastgen_keypair_from_secret(const struct FastgenParams *params,
                                               const char *generator_hex,
                                               const char *secret_hex,
                                               struct FastgenKeyPair **out);

// # Safety
// `pair` must be a live handle; `out` a valid pointer.
enum FastgenStatus fastgen_keypair_public(const struct FastgenKeyPair *pair, char **out);

// # Safety
// `pair` must be a live handle; `out` a valid pointer.
enum FastgenStatus fastgen_keypair_secret(const struct FastgenKeyPair *pair, char **out);

// # Safety
// `pair` must be null or a handle from this library, freed once.
void fastgen_keypair_free(struct FastgenKeyPair *pair);

// Screens `peer_public_hex` and writes the derived session key
// (`fastgen_derived_key_len()` bytes) to `key_out`.
//
// # Safety
// Handles must be live; `key_out` must hold `fastgen_derived_key_len()` bytes.
enum FastgenStatus fastgen_session_key(const struct FastgenParams *params,
                                       const struct FastgenKeyPair *own,
                                       const char *peer_public_hex,
                                       uint8_t *key_out);

// Operation-count benchmark; writes the JSON report to `out`.
//
// # Safety
// `params` must be a live handle; `out` a valid pointer.
enum FastgenStatus fastgen_bench_exp(const struct FastgenParams *params,
                                     uint64_t trials,
                                     uint64_t seed,
                                     char **out);

// Computes `g^{xy}` for base `g` through a DH oracle for the fast generator.
//
// # Safety
// Pointers must be valid; `queries` may be null.
enum FastgenStatus fastgen_reduce_dh(const struct FastgenParams *params,
                                     const char *base_hex,
                                     const char *gx_hex,
                                     const char *gy_hex,
                                     char **answer,
                                     uint64_t *queries);

// Computes `log_g(gx)` through a DL oracle for the fast generator.
//
// # Safety
// Pointers must be valid; `queries` may be null.
enum FastgenStatus fastgen_reduce_dl(const struct FastgenParams *params,
                                     const char *base_hex,
                                     const char *gx_hex,
                                     char **answer,
                                     uint64_t *queries);

// Forges a standard. `trapdoor_hex` fixes the trapdoor; when null it is
// drawn from `seed`. Both outputs are JSON documents.
//
// # Safety
// Pointers must be valid; `trapdoor_hex` may be null.
enum FastgenStatus fastgen_forge(const struct FastgenParams *params,
                                 uint64_t seed,
                                 const char *trapdoor_hex,
                                 char **standard_json,
                                 char **trapdoor_json);

// Recovers the session key of a transcript (`{"g","msg_a","msg_b","params_id"}`)
// made under a forged standard.
//
// # Safety
// Strings must be NUL-terminated; `key_out` must hold
// `fastgen_derived_key_len()` bytes.
enum FastgenStatus fastgen_recover(const char *standard_json,
                                   const char *trapdoor_json,
                                   const char *transcript_json,
                                   uint8_t *key_out);

// Serializes the transcript of an agreement between `alice` and `bob`
// (made under the same generator) as JSON.
//
// # Safety
// Handles must be live; `out` a valid pointer.
enum FastgenStatus fastgen_transcript(const struct FastgenParams *params,
                                      const struct FastgenKeyPair *alice,
                                      const struct FastgenKeyPair *bob,
                                      char **out);

// Broadcast encryption from a celebrity (secret `r`, public `f^r`) to a
// subscriber whose public value is `(f^r)^a`. Uses the simulated
// fast-generator oracle, so only desk-scale groups are supported.
//
// # Safety
// Pointers must be valid; `msg` may be null when `msg_len` is 0.
enum FastgenStatus fastgen_pkc_encrypt(const struct FastgenParams *params,
                                       const char *celebrity_secret_hex,
                                       const char *subscriber_public_hex,
                                       const uint8_t *msg,
                                       size_t msg_len,
                                       uint8_t **out,
                                       size_t *out_len);

// Decrypts a broadcast ciphertext with the subscriber secret `a`.
//
// # Safety
// Pointers must be valid; `ct` may be null when `ct_len` is 0.
enum FastgenStatus fastgen_pkc_decrypt(const struct FastgenParams *params,
                                       const char *subscriber_secret_hex,
                                       const char *celebrity_public_hex,
                                       const uint8_t *ct,
                                       size_t ct_len,
                                       uint8_t **out,
                                       size_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FASTGEN_H */
