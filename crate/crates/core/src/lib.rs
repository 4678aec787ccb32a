//! Exact computer algebra for the strength of homogeneous forms.
//!
//! The crate is organized bottom-up: [`arith`] (prime fields and the
//! rationals), [`polyring`] (weighted-graded polynomial rings), [`textio`]
//! (parsing and printing), [`groebner`] (Buchberger over standard-graded
//! rings), [`strength`] (verification, exhaustive and heuristic strength
//! searches, slice rank) and [`paperlab`] (the quartic `x²f+y²g+u²p+v²q`,
//! its deformation family and the supporting checks).

pub mod arith;
pub mod groebner;
pub mod linalg;
pub mod paperlab;
pub mod polyring;
pub mod strength;
pub mod textio;
