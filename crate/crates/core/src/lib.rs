//! Diffie-Hellman key agreement over prime-order subgroups of `F_q*` with
//! fast generators.
//!
//! * [`group`]: parameters, instrumented exponentiation, the shift-and-reduce
//!   fast path for small generators.
//! * [`dlog`], [`oracle`], [`reduction`]: desk-scale DH/DL oracles and the
//!   base-change reductions that move an oracle for one generator to any
//!   other, plus majority-vote amplification of a noisy oracle.
//! * [`protocol`]: the two-party key agreement and key derivation.
//! * [`standard`]: publishing parameters whose generator hides a trapdoor
//!   exponent, and recovering session keys with it.
//! * [`pkc`]: the broadcast ("celebrity") public-key scheme built on the same
//!   trapdoor, its classical counterpart, and the squaring-oracle reduction.
//! * [`bench`]: operation-count benchmark of fast-base exponentiation.

pub mod bench;
pub mod dlog;
pub mod error;
pub mod group;
pub mod oracle;
pub mod pkc;
pub mod protocol;
pub mod reduction;
pub mod standard;

pub use error::{Error, Result};
pub use group::{CostCounter, Exponent, GroupElement, GroupParams};
