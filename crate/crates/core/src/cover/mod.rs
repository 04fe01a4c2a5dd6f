pub mod certificate;
pub mod lp;
pub mod mask;
pub mod periodic;
pub mod simplex;
pub mod transform;
