//! Quantum OBDDs from characteristic polynomials.
//!
//! Boolean functions are described by linear polynomials over `Z_m` that
//! vanish exactly on their accepted inputs. [`fingerprint`] compiles such a
//! polynomial (or a set of them) into a read-once quantum branching program
//! of width `O(log m)`, [`qbp`] simulates programs exactly as state vectors,
//! and [`harness`] checks the one-sided error contract against brute-force
//! oracles.
//!
//! ```
//! use qobdd::charpoly::{mod_polynomial, Modulus};
//! use qobdd::fingerprint::compile_single;
//! use qobdd::goodset::sample;
//!
//! let m = Modulus::from_u64(3).unwrap();
//! let g = mod_polynomial(6, &m).unwrap();
//! let k = sample(0.2, &m, 0).unwrap();
//! let compiled = compile_single(&g, &k).unwrap();
//! let p = compiled.accept_probability(&[true, true, true, false, false, false]).unwrap();
//! assert!((p - 1.0).abs() < 1e-9);
//! ```

pub mod bits;
pub mod charpoly;
pub mod error;
pub mod fingerprint;
pub mod goodset;
pub mod harness;
pub mod hsf;
pub mod qbp;

pub use error::{Error, Result};
