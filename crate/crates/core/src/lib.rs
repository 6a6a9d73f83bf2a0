//! Secure-GDoF laboratory for symmetric Gaussian channels.
//!
//! Three settings share one channel law: a two-user interference channel with
//! confidential messages, a wiretap channel with a helper, and a two-user
//! multiple access wiretap channel. In each one the transmitters hold shared
//! randomness that is spent on chains of jamming layers: one layer masks a
//! message at the unintended receiver, the next layer cancels the image the
//! previous one created, and the chain stops once the leftover sits at or
//! below the noise floor.
//!
//! The crate provides
//! * exact PAM constellation math ([`constellation`]),
//! * the channel law and seeded coefficient sampling ([`channel`]),
//! * closed-form GDoF values and regions ([`gdof`]),
//! * per-regime transmit designs and receiver-side decompositions
//!   ([`scheme_ic`], [`scheme_wth`], [`scheme_macwt`]),
//! * layer decoders: peel-and-cancel and joint integer search ([`decoder`]),
//! * minimum-distance and outage-measure analysis ([`diophantine`]),
//! * the Monte Carlo experiment engine ([`simlab`]).

// Guards written as `!(x > 0.0)` double as NaN rejection; keep them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod constellation;
pub mod decoder;
pub mod design;
pub mod diophantine;
pub mod error;
pub mod gdof;
pub mod scheme_ic;
pub mod scheme_macwt;
pub mod scheme_wth;
pub mod simlab;
pub mod verify;

pub use error::{Error, Result};
