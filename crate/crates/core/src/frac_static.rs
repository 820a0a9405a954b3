//! Undriven fractional evolution. Under i hbar^alpha D^alpha Psi = Delta^alpha sigma_z Psi
//! the amplitudes evolve as c+(t) = E_alpha(-i (omega t)^alpha) c+ and
//! c-(t) = E_alpha(+i (omega t)^alpha) c-. The two factors are complex conjugates.

use num_complex::Complex64 as C64;

use crate::error::{domain, Result};
use crate::ml::MlConfig;
use crate::tls::{bloch, BlochVector, FracOrder, RabiParams, SpinState};

#[derive(Clone, Copy, Debug)]
pub struct StaticEvolution {
    pub alpha: FracOrder,
    pub params: RabiParams,
    pub initial: SpinState,
    pub ml: MlConfig,
}

impl StaticEvolution {
    pub fn new(alpha: FracOrder, params: RabiParams, initial: SpinState) -> Self {
        StaticEvolution { alpha, params, initial, ml: MlConfig::default() }
    }

    pub fn with_ml(mut self, ml: MlConfig) -> Self {
        self.ml = ml;
        self
    }

    /// E_alpha(-i (omega t)^alpha).
    pub fn envelope(&self, t: f64) -> Result<C64> {
        if !(t >= 0.0) {
            return domain(format!("time must be non-negative, got {t}"));
        }
        let a = self.alpha.get();
        let tau = (self.params.omega() * t).powf(a);
        self.ml.value(a, 1.0, C64::new(0.0, -tau))
    }

    /// Unnormalized state; its norm decays for alpha < 1.
    pub fn state(&self, t: f64) -> Result<SpinState> {
        let e = self.envelope(t)?;
        Ok(SpinState::new(e * self.initial.plus, e.conj() * self.initial.minus))
    }

    /// Normalized Bloch vector from the closed form; needs real initial amplitudes.
    pub fn polarization(&self, t: f64) -> Result<BlochVector> {
        let theta = self.initial.real_angle()?;
        let e = self.envelope(t)?;
        let m = e.norm_sqr();
        let e2 = e.conj() * e.conj();
        Ok(BlochVector { sx: e2.re * theta.sin() / m, sy: e2.im * theta.sin() / m, sz: theta.cos() })
    }

    /// Bloch components of the unnormalized state: sin(theta)|E|^2 (cos, sin) of the phase
    /// and cos(theta)|E|^2 along z.
    pub fn raw_polarization(&self, t: f64) -> Result<BlochVector> {
        let psi = self.state(t)?;
        let b = bloch(&psi);
        let n = psi.norm_sq() / self.initial.norm_sq();
        Ok(BlochVector { sx: b.sx * n, sy: b.sy * n, sz: b.sz * n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tls::{exact_rabi_state, state_from_angle};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ev(alpha: f64, theta: f64) -> StaticEvolution {
        StaticEvolution::new(
            FracOrder::new(alpha).unwrap(),
            RabiParams::dimensionless(0.0, 1.0).unwrap(),
            state_from_angle(theta),
        )
    }

    #[test]
    fn order_one_is_free_precession() {
        let e = ev(1.0, 1.2);
        let p = RabiParams::new(1.0, 0.0, 0.0, 1.0).unwrap();
        for &t in &[0.0, 0.5, 3.0, 17.0] {
            let a = e.state(t).unwrap();
            let b = exact_rabi_state(&p, &state_from_angle(1.2), t);
            assert!((a.plus - b.plus).norm() < 1e-14 && (a.minus - b.minus).norm() < 1e-14);
        }
    }

    #[test]
    fn initial_state_at_zero() {
        let s = ev(0.6, 0.9).state(0.0).unwrap();
        assert!((s.plus - state_from_angle(0.9).plus).norm() < 1e-15);
    }

    #[test]
    fn negative_time_rejected() {
        assert!(ev(0.5, 1.0).state(-1.0).is_err());
    }

    #[test]
    fn amplitudes_decay_below_one() {
        let s = ev(0.6, PI / 2.0).state(5.0).unwrap();
        assert!(s.plus.norm() < 1.0 / 2f64.sqrt() && s.minus.norm() < 1.0 / 2f64.sqrt());
        let r = ev(0.6, PI / 2.0).raw_polarization(5.0).unwrap();
        assert!(r.sx.hypot(r.sy) < 1.0);
    }

    #[test]
    fn agrees_with_the_volterra_oracle() {
        use crate::volterra::{solve_ftse, static_hamiltonian, OracleConfig, Scheme};
        let a = FracOrder::new(0.8).unwrap();
        let p = RabiParams::dimensionless(0.0, 1.0).unwrap();
        let psi0 = state_from_angle(PI / 2.0);
        let cfg = OracleConfig::new(2048, 2.0, Scheme::Trapezoidal).unwrap();
        let sol = solve_ftse(a, 1.0, &static_hamiltonian(a, &p), &psi0, &cfg).unwrap();
        let want = ev(0.8, PI / 2.0).state(2.0).unwrap();
        let got = sol.states.last().unwrap();
        assert!((got.plus - want.plus).norm() < 1e-6 && (got.minus - want.minus).norm() < 1e-6);
    }

    proptest! {
        #[test]
        fn closed_form_matches_state(alpha in 0.2..1.0f64, theta in 0.0..PI, t in 0.0..20.0f64) {
            let e = ev(alpha, theta);
            let a = e.polarization(t).unwrap();
            let b = bloch(&e.state(t).unwrap());
            prop_assert!((a.sx - b.sx).abs() < 1e-12);
            prop_assert!((a.sy - b.sy).abs() < 1e-12);
            prop_assert!((a.sz - b.sz).abs() < 1e-12);
        }

        #[test]
        fn sz_is_conserved_and_transverse_norm_fixed(alpha in 0.2..1.0f64, theta in 0.0..PI, t in 0.0..20.0f64) {
            let b = ev(alpha, theta).polarization(t).unwrap();
            prop_assert!((b.sz - theta.cos()).abs() < 1e-15);
            prop_assert!((b.sx * b.sx + b.sy * b.sy - theta.sin().powi(2)).abs() < 1e-12);
        }
    }
}
