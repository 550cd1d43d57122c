//! Exact arithmetic over Q and Q(t), elliptic curves over both, and
//! certified criteria for injectivity of the specialization map.

pub mod descent;
pub mod ellcurve;
pub mod exact;
pub mod extend;
pub mod field;
pub mod par;
pub mod poly;
