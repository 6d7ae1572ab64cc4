//! Game constants, dangerous rational points, their lines, levels and classes.

mod classify;
mod constants;
mod danger;
mod line;
mod point;

pub use classify::{
    class_threshold_factors, classify, classify_scan_oracle, ClassifiedPoint, ClassifyError,
};
pub use constants::{make_constants, CMode, ConstantsError, GameConstants};
pub use danger::{
    scan_theta_failures_seq, DangerField, DangerProbe, PointWindow, ProbeError, QCand,
};
#[cfg(feature = "parallel")]
pub use danger::scan_theta_failures_par;
pub use line::{find_line, find_line_exhaustive, Line, LineError};
pub use point::{in_c, DeltaNbhd, PointError, RatPoint};
