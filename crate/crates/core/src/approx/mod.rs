//! Constructive approximation of nonnegative polynomials by sums of
//! `2d`-powers, one routine per topology, each returning a checkable
//! [`Certificate`].

mod certificate;
mod fattening;
mod fit;
mod module;
mod series;
mod sup;
mod tk;
mod witness;

pub use certificate::{
    Certificate, CertificateKind, Decomposition, ModuleTerm, Params, PointResidual, Residuals, SupResidual, VERIFY_TOL,
};
pub use fattening::{psd_on_fattening, FatteningReport, FatteningRow};
pub use module::{module_interpolate, EXACT_TOL, VALUE_TIE};
pub use series::{series_coefficients, series_root};
pub use sup::sup_approximate;
pub use tk::{tk_approximate, NODE_TIE};
pub use witness::strictness_witness;
