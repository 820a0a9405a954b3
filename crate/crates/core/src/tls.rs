//! Two-level system basics: states, parameters, Bloch vectors and the exact
//! integer-order Rabi solution used as the reference for fidelities.

use num_complex::Complex64 as C64;

use crate::error::{domain, Result};

pub type Mat2 = [[C64; 2]; 2];

/// Fractional order alpha in (0, 1].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(FracOrder(alpha))
        } else {
            domain(format!("fractional order must lie in (0, 1], got {alpha}"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Amplitudes on the sigma_z eigenbasis (|+>, |->).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinState {
    pub plus: C64,
    pub minus: C64,
}

impl SpinState {
    pub fn new(plus: C64, minus: C64) -> Self {
        SpinState { plus, minus }
    }

    pub fn norm_sq(&self) -> f64 {
        self.plus.norm_sqr() + self.minus.norm_sqr()
    }

    pub fn normalized(&self) -> Result<SpinState> {
        let n = self.norm_sq().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return domain("cannot normalize a zero or non-finite state");
        }
        Ok(SpinState { plus: self.plus / n, minus: self.minus / n })
    }

    pub fn inner(&self, other: &SpinState) -> C64 {
        self.plus.conj() * other.plus + self.minus.conj() * other.minus
    }

    pub fn apply(m: &Mat2, s: &SpinState) -> SpinState {
        SpinState {
            plus: m[0][0] * s.plus + m[0][1] * s.minus,
            minus: m[1][0] * s.plus + m[1][1] * s.minus,
        }
    }

    /// Polar angle of a state with real amplitudes, theta = 2 atan2(c-, c+).
    pub fn real_angle(&self) -> Result<f64> {
        if self.plus.im != 0.0 || self.minus.im != 0.0 {
            return domain("state has complex amplitudes; no real polar angle");
        }
        if self.norm_sq() == 0.0 {
            return domain("zero state has no polar angle");
        }
        Ok(2.0 * self.minus.re.atan2(self.plus.re))
    }
}

/// Initial polar angle theta in [0, pi].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialAngle(f64);

impl InitialAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if (0.0..=std::f64::consts::PI).contains(&theta) {
            Ok(InitialAngle(theta))
        } else {
            domain(format!("initial angle must lie in [0, pi], got {theta}"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn state(self) -> SpinState {
        state_from_angle(self.0)
    }
}

/// Delta (level splitting, energy), xi (drive amplitude, energy),
/// Omega (drive frequency) and hbar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiParams {
    pub delta: f64,
    pub xi: f64,
    pub omega_drive: f64,
    pub hbar: f64,
}

impl RabiParams {
    pub fn new(delta: f64, xi: f64, omega_drive: f64, hbar: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return domain(format!("Delta must be positive, got {delta}"));
        }
        if !(xi >= 0.0 && xi.is_finite()) {
            return domain(format!("xi must be non-negative, got {xi}"));
        }
        if !(omega_drive >= 0.0 && omega_drive.is_finite()) {
            return domain(format!("Omega must be non-negative, got {omega_drive}"));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return domain(format!("hbar must be positive, got {hbar}"));
        }
        Ok(RabiParams { delta, xi, omega_drive, hbar })
    }

    /// Units with hbar = Delta = 1: lambda = xi/Delta, Omega given in units of omega.
    pub fn dimensionless(lambda: f64, omega_ratio: f64) -> Result<Self> {
        RabiParams::new(1.0, lambda, omega_ratio, 1.0)
    }

    /// Bare frequency omega = Delta / hbar.
    pub fn omega(&self) -> f64 {
        self.delta / self.hbar
    }

    /// Coupling ratio lambda = xi / Delta.
    pub fn lambda(&self) -> f64 {
        self.xi / self.delta
    }

    /// Drive frequency in units of omega.
    pub fn omega_ratio(&self) -> f64 {
        self.omega_drive / self.omega()
    }

    /// Rotating-frame detuning delta = Delta - hbar Omega / 2.
    pub fn detuning(&self) -> f64 {
        self.delta - 0.5 * self.hbar * self.omega_drive
    }

    /// Quasi-energy epsilon = sqrt(delta^2 + xi^2).
    pub fn epsilon(&self) -> f64 {
        self.detuning().hypot(self.xi)
    }

    /// Mixing angle gamma = atan2(xi, delta) in [0, pi].
    pub fn gamma_angle(&self) -> f64 {
        self.xi.atan2(self.detuning())
    }

    /// Exact resonance Omega = 2 omega, to relative precision 1e-12.
    pub fn is_resonant(&self) -> bool {
        (self.omega_drive - 2.0 * self.omega()).abs() <= 1e-12 * self.omega()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.sx * self.sx + self.sy * self.sy + self.sz * self.sz).sqrt()
    }
}

pub fn state_from_angle(theta: f64) -> SpinState {
    SpinState::new(C64::new((theta / 2.0).cos(), 0.0), C64::new((theta / 2.0).sin(), 0.0))
}

/// Bloch vector of the normalized state.
pub fn bloch(psi: &SpinState) -> BlochVector {
    let n = psi.norm_sq();
    let x = psi.plus.conj() * psi.minus;
    BlochVector {
        sx: 2.0 * x.re / n,
        sy: 2.0 * x.im / n,
        sz: (psi.plus.norm_sqr() - psi.minus.norm_sqr()) / n,
    }
}

/// |<psi0|psi>|^2 for the normalized states.
pub fn autocorrelation(psi0: &SpinState, psi: &SpinState) -> f64 {
    psi0.inner(psi).norm_sqr() / (psi0.norm_sq() * psi.norm_sq())
}

/// Rotating-frame eigenvectors f+ and f- of delta sigma_z + xi sigma_x.
pub fn floquet_basis(params: &RabiParams) -> (SpinState, SpinState) {
    let g = params.gamma_angle() / 2.0;
    (
        SpinState::new(C64::new(g.cos(), 0.0), C64::new(g.sin(), 0.0)),
        SpinState::new(C64::new(-g.sin(), 0.0), C64::new(g.cos(), 0.0)),
    )
}

/// Components (<f+|psi>, <f-|psi>) of a state in the rotating-frame eigenbasis.
pub fn tilde_components(params: &RabiParams, psi: &SpinState) -> (C64, C64) {
    let (fp, fm) = floquet_basis(params);
    (fp.inner(psi), fm.inner(psi))
}

/// For a theta-parametrized initial state: (cos((theta-gamma)/2), sin((theta-gamma)/2)).
pub fn tilde_coeffs(params: &RabiParams, theta: f64) -> (f64, f64) {
    let h = (theta - params.gamma_angle()) / 2.0;
    (h.cos(), h.sin())
}

/// Exact solution of i hbar dPsi/dt = [Delta sigma_z + xi(sigma_x cos Omega t + sigma_y sin Omega t)] Psi.
pub fn exact_rabi_state(params: &RabiParams, initial: &SpinState, t: f64) -> SpinState {
    if t == 0.0 {
        return *initial;
    }
    let (fp, fm) = floquet_basis(params);
    let (cp, cm) = (fp.inner(initial), fm.inner(initial));
    let ph = C64::from_polar(1.0, -params.epsilon() * t / params.hbar);
    let a = cp * ph;
    let b = cm * ph.conj();
    let rot = SpinState::new(a * fp.plus + b * fm.plus, a * fp.minus + b * fm.minus);
    let w = C64::from_polar(1.0, -params.omega_drive * t / 2.0);
    SpinState::new(w * rot.plus, w.conj() * rot.minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn poles_and_equator() {
        let b = bloch(&state_from_angle(0.0));
        assert_eq!((b.sx, b.sy, b.sz), (0.0, 0.0, 1.0));
        let b = bloch(&state_from_angle(PI / 2.0));
        assert!((b.sx - 1.0).abs() < 1e-15 && b.sy.abs() < 1e-15 && b.sz.abs() < 1e-15);
    }

    #[test]
    fn no_drive_is_free_precession() {
        let p = RabiParams::new(1.3, 0.0, 0.7, 1.0).unwrap();
        let psi0 = state_from_angle(1.1);
        let t = 2.4;
        let psi = exact_rabi_state(&p, &psi0, t);
        let want_plus = psi0.plus * C64::from_polar(1.0, -1.3 * t);
        let want_minus = psi0.minus * C64::from_polar(1.0, 1.3 * t);
        assert!((psi.plus - want_plus).norm() < 1e-14);
        assert!((psi.minus - want_minus).norm() < 1e-14);
    }

    #[test]
    fn resonant_drive_flops_fully() {
        // At Omega = 2 omega the population oscillates with period pi hbar / xi.
        let p = RabiParams::new(1.0, 0.1, 2.0, 1.0).unwrap();
        let psi = exact_rabi_state(&p, &state_from_angle(0.0), PI / 0.2);
        assert!(psi.plus.norm() < 1e-12);
        assert!((psi.minus.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RabiParams::new(0.0, 0.1, 1.0, 1.0).is_err());
        assert!(RabiParams::new(1.0, -0.1, 1.0, 1.0).is_err());
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(1.2).is_err());
        assert!(InitialAngle::new(4.0).is_err());
        assert!(SpinState::new(C64::new(0.0, 1.0), C64::new(0.0, 0.0)).real_angle().is_err());
    }

    proptest! {
        #[test]
        fn bloch_vector_of_pure_state_is_unit(re0 in -1.0..1.0f64, im0 in -1.0..1.0f64,
                                              re1 in -1.0..1.0f64, im1 in -1.0..1.0f64) {
            let s = SpinState::new(C64::new(re0, im0), C64::new(re1, im1));
            prop_assume!(s.norm_sq() > 1e-6);
            prop_assert!((bloch(&s).norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn exact_rabi_is_unitary(t in 0.0..50.0f64, xi in 0.0..0.5f64, om in 0.0..3.0f64, th in 0.0..PI) {
            let p = RabiParams::new(1.0, xi, om, 1.0).unwrap();
            let psi = exact_rabi_state(&p, &state_from_angle(th), t);
            prop_assert!((psi.norm_sq() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn gamma_angle_in_range(xi in 0.0..2.0f64, om in 0.0..5.0f64) {
            let g = RabiParams::new(1.0, xi, om, 1.0).unwrap().gamma_angle();
            prop_assert!((0.0..=PI).contains(&g));
        }

        #[test]
        fn tilde_coeffs_match_projection(th in 0.0..PI, xi in 0.0..1.0f64, om in 0.0..3.0f64) {
            let p = RabiParams::new(1.0, xi, om, 1.0).unwrap();
            let (a, b) = tilde_coeffs(&p, th);
            let (ca, cb) = tilde_components(&p, &state_from_angle(th));
            prop_assert!((ca - a).norm() < 1e-14 && (cb - b).norm() < 1e-14);
        }
    }
}
