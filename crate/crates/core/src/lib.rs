//! Verification and simulation toolkit for self-similar blowup of
//! corotational wave maps into warped-product targets.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod evolution;
pub mod exactmath;
pub mod geometry;
pub mod profile;
pub mod spectral;
