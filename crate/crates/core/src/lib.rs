//! Constructive reals, a Goedel-numbered oracle machine, and a refuter that
//! defeats every proposed total extension of an unextendible 0/1 function
//! on the halting set of that machine.

pub mod crn;
pub mod machine;
pub mod rational;
pub mod refuter;
pub mod space;
pub mod unextendible;

pub use crn::{
    crn_add, crn_approx, crn_from_rational, crn_mul, crn_neg, g_extensionality_counterexample,
    round_step_g, Bit, Crn,
};
pub use rational::Rational;
