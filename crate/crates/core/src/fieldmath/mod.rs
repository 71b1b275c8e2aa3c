//! Finite fields, polynomials, Hamming metrics and entropies.

mod gf;
mod metrics;
mod poly;

pub use gf::{gf_mul, modulus, FieldElem, SUPPORTED_KAPPAS};
pub use metrics::{
    binary_entropy, hamming, hamming_ball_bound, max_entropy_support, min_entropy, min_entropy_split_witness,
    relative_hamming, split_entropy, BallBound, Distribution, SplitWitness, PROB_TOL,
};
pub use poly::{lagrange_interpolate, Poly};
