//! Numerical model of a triply resonant, all-dielectric cavity electro-optic
//! microwave–optical transducer.
//!
//! Rates and frequencies are angular (rad/s) throughout the library; the
//! file formats and the command-line front end use ordinary Hz.

// Negated comparisons are how non-finite inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coupling;
pub mod fitting;
pub mod microwave;
pub mod model;
pub mod noise;
pub mod optical;
pub mod quadrature;
pub mod transduction;
