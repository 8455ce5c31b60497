//! Numerical differential geometry for explicit self-dual Einstein Hermitian
//! 4-metrics.
//!
//! The crate is organised bottom-up:
//!
//! * [`jet`]: second-order forward-mode automatic differentiation in four
//!   variables, used to carry exact first and second derivatives of metric
//!   components and scalar fields.
//! * [`curvature`]: Christoffel symbols, Riemann/Ricci/scalar curvature and the
//!   block decomposition of the curvature operator on `Λ² = Λ⁺ ⊕ Λ⁻`.
//! * [`catalog`]: analytic coordinate charts (canonic generic-case metrics,
//!   separable Toda metrics, LeBrun–Pedersen, Gibbons–Hawking, space forms,
//!   Bianchi coframes).
//! * [`hermitian`]: extraction of the positive Hermitian structure from the
//!   self-dual Weyl tensor, Lee form, Killing field and integrability checks.
//! * [`frobenius`]: the integrable first-order system for `(p, q²)`, its
//!   closed-form solution and path integration.
//! * [`hyper`]: Einstein–Weyl / hyperhermitian identities.

pub mod catalog;
pub mod chart;
pub mod curvature;
pub mod error;
pub mod forms;
pub mod frobenius;
pub mod hermitian;
pub mod hyper;
pub mod jet;
pub mod linalg;
pub mod stencil;

pub use chart::{MetricChart, Sign};
pub use curvature::{curvature_package, CurvaturePackage};
pub use error::{GeometryError, Result};
pub use jet::Jet2;

/// Sign and normalisation conventions the engine is built on. Reports carry a
/// hash of this string so results computed under different conventions are
/// never compared silently.
pub const CONVENTIONS: &str = "\
christoffel gamma[a][b][c] = G^a_bc; \
riemann R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb; \
ricci R_bd = R^a_bad; sphere scalar +12; \
two-form inner product (p, q) = 1/2 p_ab q^ab; lambda-pm basis norm^2 2; \
curvature operator M_ij = 1/2 (B_i, R B_j); \
kahler F(X, Y) = g(JX, Y), J = -g^-1 F; (J a)_m = -a_s J^s_m; \
kappa = 3 (W+ F, F); \
lee theta = -1/2 J dF* = 1/3 d ln|kappa|; codifferential d*a = -g^ab nabla_a a_b; \
integrability D_X J = [X ^ theta, J]; \
killing K = J grad(kappa^-1/3), real cube root";
