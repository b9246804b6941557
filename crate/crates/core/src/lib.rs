//! Truncated deformation Hopf algebras and Drinfeld's functors `H ↦ H′`
//! and `H ↦ H^∨`, in exact rational arithmetic.
//!
//! Everything lives over `k[[h]]` cut at a finite h-order `N`; SERIES
//! presentations are additionally cut at degree `D`. Verdicts such as
//! [`drinfeld::Verdict::MemberUpToTruncation`] are claims about that
//! truncation.
//!
//! ```
//! use qdp::classical::{dual_lie_bialgebra, extract_lie_bialgebra, extract_poisson_structure, lie_bialgebra_equal};
//! use qdp::drinfeld::prime_presentation;
//! use qdp::examples::builtin_with;
//!
//! let p = builtin_with("heisenberg3", 4, 4).unwrap().quea;
//! let q = prime_presentation(&p).unwrap();
//! let got = extract_poisson_structure(&q).unwrap();
//! let want = dual_lie_bialgebra(&extract_lie_bialgebra(&p).unwrap());
//! assert!(lie_bialgebra_equal(&got, &want, None).unwrap());
//! ```

pub mod acceptance;
pub mod classical;
pub mod drinfeld;
pub mod error;
pub mod examples;
pub mod expr;
pub mod freealg;
pub mod hopf;
pub mod manifest;
pub mod pairing;
pub mod random;
pub mod report;
pub mod series;

pub use error::{Error, Result};
