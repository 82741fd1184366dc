//! Statistical experiment drivers (placeholder while the lower layers land).

pub mod bourgain {}
