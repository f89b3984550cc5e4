//! One-dimensional consolidation reference solution and related scales.

use crate::material::MaterialParams;

/// Normalised excess pore pressure `P(Z, T)` of the consolidating column.
///
/// `Z` is the depth below the drained face divided by the column height and
/// `T` the dimensionless time. The series is truncated once the envelope
/// `2/M exp(-M²T)` of the next term drops below `tol`; at `T = 0` the
/// envelope does not decay and the sum stops after 10⁵ terms.
pub fn terzaghi_pressure(z: f64, t: f64, tol: f64) -> f64 {
    const CAP: usize = 100_000;
    let mut sum = 0.0;
    for m in 0..CAP {
        let mm = std::f64::consts::PI * (2 * m + 1) as f64 / 2.0;
        let envelope = 2.0 / mm * (-mm * mm * t).exp();
        if t > 0.0 && envelope < tol {
            break;
        }
        sum += envelope * (mm * z).sin();
    }
    sum
}

/// `c_v = (K/n0 + 4G/3) κ0 / (ρ_f g)`.
pub fn consolidation_coefficient(params: &MaterialParams, kappa0: f64) -> f64 {
    (params.k / params.n0 + 4.0 / 3.0 * params.g_shear) * kappa0 / (params.rho_f0 * params.gravity)
}

/// Smallest step for which implicit u-p solutions stay free of oscillations.
pub fn vermeer_critical_time(dh: f64, c_v: f64) -> f64 {
    dh * dh / (6.0 * c_v)
}

/// Relative excess of the largest numerical pressure over the largest
/// analytical one, `max P_num / max P_an - 1`. Samples are
/// `(Z, P_numeric, P_analytic)`.
pub fn peak_overshoot(samples: &[(f64, f64, f64)]) -> f64 {
    let pn = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let pa = samples.iter().map(|s| s.2).fold(f64::NEG_INFINITY, f64::max);
    if pa > 0.0 {
        pn / pa - 1.0
    } else {
        0.0
    }
}

/// Largest `|P_num - P_an|` over the samples, in units of the applied load.
pub fn max_abs_error(samples: &[(f64, f64, f64)]) -> f64 {
    samples.iter().map(|s| (s.1 - s.2).abs()).fold(0.0, f64::max)
}
