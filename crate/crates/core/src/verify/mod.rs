//! Structural audits and end-to-end avoidance certificates.

mod audit;
mod certify;

pub use audit::{audit_growth, audit_lemmas, CellViolation, GrowthReport, LemmaAuditReport, LineViolation};
pub use certify::{certify, recheck, Certificate, CertifyError, PointVerdict};
