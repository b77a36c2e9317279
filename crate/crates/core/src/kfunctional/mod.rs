//! K- and J-functionals, interpolation norms and quotient K-functionals.

pub mod asymptotics;
mod kvalue;
mod norms;
mod profile;
mod quotient;

pub use kvalue::{equivalence_factor, j_functional, k_functional, k_p, profile_of, Element};
pub use norms::{
    half_norm_membership, tail_membership, theta_c0_membership, theta_q_norm, C0Verdict,
    Membership, MembershipVerdict, Side, ThetaQNorm, EXPONENT_TOL,
};
pub use profile::{parse_q, KProfile, ThetaQ};
pub use quotient::{minimize_convex, quotient_k, QuotientK};
