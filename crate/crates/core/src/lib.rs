//! Exact-arithmetic verification of finitely presented noncommutative algebras
//! realized inside `M_N(Q[x])`, together with symbolic checks of bispectral
//! triples `L psi = psi F`, `psi B = theta psi`.
//!
//! The crate is organized bottom-up:
//!
//! * [`freealg`]: words and polynomials in the free algebra over `Q`.
//! * [`exactla`]: exact dense linear algebra over `Q`.
//! * [`matpoly`]: matrix polynomials, the target algebra of every presentation.
//! * [`presentations`]: evaluation, relation checks, truncated ideals and the
//!   degree-by-degree sandwich certification.
//! * [`bispectral`]: exponential-kernel matrices and differential operators.
//!
//! Batch work (word evaluation, ideal row generation, elimination row updates)
//! runs on rayon when the `parallel` feature is enabled; see [`par`].

pub mod bispectral;
pub mod exactla;
pub mod freealg;
pub mod matpoly;
pub mod par;
pub mod presentations;

pub use freealg::{Degree, FreePolynomial, Scalar, VarContext, Word};
pub use matpoly::MatrixPolynomial;
