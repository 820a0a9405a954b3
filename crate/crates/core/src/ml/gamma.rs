use std::f64::consts::PI;

use crate::error::{domain, Result};

/// ln Gamma(x) for real x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma needs a finite positive argument, got {x}"));
    }
    Ok(libm::lgamma(x))
}

/// 1/Gamma(x) on the whole real line; zero at the poles 0, -1, -2, ...
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 0.5 {
        // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi.
        let s = libm::sin(PI * x) / PI;
        let y = 1.0 - x;
        return if y < 170.0 {
            s * libm::tgamma(y)
        } else {
            s * libm::lgamma(y).exp()
        };
    }
    if x < 170.0 {
        1.0 / libm::tgamma(x)
    } else {
        (-libm::lgamma(x)).exp()
    }
}

/// Closed form of int_z^x (x-y)^(-alpha) (y-z)^(-beta) dy
/// = (x-z)^(1-alpha-beta) Gamma(1-alpha) Gamma(1-beta) / Gamma(2-alpha-beta).
pub fn beta_integral(x: f64, z: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(x > z) {
        return domain(format!("beta_integral needs x > z, got x={x}, z={z}"));
    }
    if !(alpha < 1.0) || !(beta < 1.0) {
        return domain(format!(
            "beta_integral needs alpha < 1 and beta < 1, got alpha={alpha}, beta={beta}"
        ));
    }
    let lg = log_gamma(1.0 - alpha)? + log_gamma(1.0 - beta)? - log_gamma(2.0 - alpha - beta)?;
    Ok(((1.0 - alpha - beta) * (x - z).ln() + lg).exp())
}
