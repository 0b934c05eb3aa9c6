//! Exact algebra for quotient-polynomial graph parameter arrays.
//!
//! The crate is `no_std` with `alloc`: every routine is a pure function on
//! immutable values using arbitrary-precision integers and rationals.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod array;
pub mod enumerate;
pub mod factor;
pub mod linalg;
pub mod matrix;
mod modp;
pub mod numfield;
pub mod poly;
pub mod record;
pub mod resultant;
pub mod roots;
pub mod sieve;
pub mod sita;
pub mod spectral;
