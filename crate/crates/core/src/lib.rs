//! Numerical toolkit for non-reversible Randers metric-measure spaces and
//! the sharpness of Hardy-type inequalities on them.

pub mod dual;
pub mod error;
pub mod finsler;
pub mod linalg;
pub mod quadrature;
pub mod families;
pub mod riccati;
pub mod hardy;
pub mod sharpness;
pub mod report;
