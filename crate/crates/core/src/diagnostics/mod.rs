//! Reference solutions and numerical quality measures.

pub mod condition;
pub mod infsup;
pub mod oscillation;
pub mod sweep;
pub mod terzaghi;

pub use condition::{condition_number, lanczos_extreme};
pub use infsup::{infsup_eigenvalue, infsup_test, InfSupResult, Pairing};
pub use oscillation::{checkerboard_fraction, has_checkerboard, pressure_jump_seminorm, smoothed_reference};
pub use sweep::{ellipse_sweep, sweep_peaks, sweep_point, SweepConfig, SweepRow};
pub use terzaghi::{
    consolidation_coefficient, max_abs_error, peak_overshoot, terzaghi_pressure, vermeer_critical_time,
};
