//! Exact arithmetic over F_q(T) and its completion F_q((1/T)): continued
//! fractions, ε-approximation lattices, ε-zeta values and the approximants
//! j_ε of the quantum modular invariant, and Weyl sums for `A f mod A`.

pub mod abs;
pub mod cf;
pub mod check;
pub mod cli;
pub mod corpus;
pub mod equidist;
pub mod error;
pub mod field;
pub mod invariant;
pub mod laurent;
pub mod lattice;
pub mod pgl;
pub mod poly;
pub mod text;
pub mod zeta;

pub use abs::AbsValue;
pub use cf::{cf_expand, CfClass, CfExpansion, CfTail, ConvergentRow, HandleKind, RealHandle};
pub use equidist::{char_exponent, telescoping_check, weyl_sum, TelescopingReport, WeylSum};
pub use error::{Error, Result};
pub use field::{FieldElem, FieldSpec};
pub use invariant::{
    delta_g_eps, j_eps, j_tilde, jqt_limit_set, ClassValue, DeltaG, JResult, JValue, LimitClass, LimitSet,
};
pub use lattice::{
    eps_schedule, lambda_basis, lambda_dual, lambda_enumerate_monic, lambda_error,
    lambda_member_oracle, lambda_span, BasisEntry, EpsIndex, LambdaBasis, LatticeElement,
};
pub use laurent::{LaurentSeries, SeriesAbs};
pub use pgl::{pgl_transform, Mobius};
pub use poly::{enumerate, Constraint, Poly};
pub use zeta::{lattice_zeta, zeta_a, zeta_eps, zeta_fq, ZetaValue};
