//! Monte Carlo minimal polynomials of square matrices over small finite fields.

pub mod budget;
pub mod echelon;
pub mod error;
pub mod format;
pub mod gf;
pub mod linalg;
pub mod matgen;
pub mod minpoly;
pub mod oracle;
pub mod poly;
pub mod rng;
pub mod spin;
pub mod verify;

pub use budget::{bound_for, BoundParams, BoundReport, BoundTag, CallRecord};
pub use echelon::SemiEchelonDataSequence;
pub use error::{Error, Result};
pub use gf::{Elem, Field, FieldSpec, OpCounts};
pub use linalg::{Matrix, SparseConjugate};
pub use matgen::{Family, Generated, PrimaryCyclicSpec};
pub use minpoly::{
    min_poly_deterministic, min_poly_mc, Epsilon, MinPolyOptions, MinPolyResult, Status,
};
pub use poly::{FactoredPoly, Poly};
pub use rng::SeededRng;
pub use spin::{char_poly, CharPolyData};
pub use verify::{verify, verify_with_policy, Strategy, Verdict, VerifyOutcome, VerifyPolicy};
