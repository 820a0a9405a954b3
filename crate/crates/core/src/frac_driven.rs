//! Driven fractional evolution to leading order in lambda = xi / Delta.
//!
//! With E = E_alpha(-i (omega t)^alpha) and the first-order transition amplitude
//!
//!   P(t) = lambda^alpha int_0^t G(t - t') E_alpha(i (omega t')^alpha) e^{-i Omega t'} omega dt',
//!   G(s) = E_{alpha,alpha}(-i (omega s)^alpha) / (i (omega s)^{1-alpha}),
//!
//! the unnormalized amplitudes are g+ = E c+ + P c- and g- = conj(E) c- - conj(P) c+.
//! All kernels run in the dimensionless time omega t.

use num_complex::Complex64 as C64;

use crate::dd::Dd;
use crate::error::{convergence, domain, Result};
use crate::ml::MlConfig;
use crate::quad;
use crate::tls::{
    autocorrelation, exact_rabi_state, state_from_angle, tilde_coeffs, BlochVector, FracOrder, RabiParams,
    SpinState,
};

/// Largest omega t at which the series is the primary path for P.
/// The series is not attempted once (omega + Omega) t exceeds this: the cancellation
/// e^{(omega+Omega)t} would exhaust double-double precision.
pub const SERIES_CANCELLATION_LIMIT: f64 = 60.0;
const SERIES_CAP: usize = 400;
const QUAD_PIECES: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PMethod {
    Series,
    Quadrature,
}

#[derive(Clone, Copy, Debug)]
pub struct PAlphaResult {
    pub value: C64,
    pub method: PMethod,
    /// Series terms (j, m pairs) or integrand evaluations.
    pub terms: usize,
    pub est_error: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct DrivenState {
    pub g_plus: C64,
    pub g_minus: C64,
    /// Squared norm of the unnormalized pair.
    pub norm_sq: f64,
}

impl DrivenState {
    pub fn spin(&self) -> SpinState {
        SpinState::new(self.g_plus, self.g_minus)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DrivenModel {
    pub alpha: FracOrder,
    pub params: RabiParams,
    pub ml: MlConfig,
    /// Absolute tolerance for P.
    pub p_tol: f64,
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time must be finite and non-negative, got {t}"))
    }
}

impl DrivenModel {
    pub fn new(alpha: FracOrder, params: RabiParams) -> Self {
        DrivenModel { alpha, params, ml: MlConfig::default(), p_tol: 1e-12 }
    }

    pub fn with_ml(mut self, ml: MlConfig) -> Self {
        self.ml = ml;
        self
    }

    /// G_sigma(tau) = E_{alpha,alpha}(-i sigma omega^alpha tau^alpha) / (i hbar^alpha tau^{1-alpha}).
    pub fn greens_kernel(&self, sigma: i8, tau: f64) -> Result<C64> {
        if sigma != 1 && sigma != -1 {
            return domain(format!("sigma must be +1 or -1, got {sigma}"));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return domain(format!("Green's function needs tau > 0, got {tau}"));
        }
        let a = self.alpha.get();
        let om = self.params.omega();
        let e = self.ml.value(a, a, C64::new(0.0, -(sigma as f64) * (om * tau).powf(a)))?;
        Ok(e / (C64::new(0.0, self.params.hbar.powf(a)) * tau.powf(1.0 - a)))
    }

    /// E_alpha(-i (omega t)^alpha).
    pub fn envelope(&self, t: f64) -> Result<C64> {
        check_time(t)?;
        let a = self.alpha.get();
        self.ml.value(a, 1.0, C64::new(0.0, -(self.params.omega() * t).powf(a)))
    }

    /// P(t) by its power series, summed in double-double arithmetic.
    ///
    /// Expanding both Mittag-Leffler factors and the drive phase and integrating term by
    /// term gives, with tau = (omega t)^alpha and w = Omega t,
    ///
    ///   P = -i lambda^alpha tau e^{-i w} sum_j (i tau)^j / Gamma(alpha(j+1)+1)
    ///         sum_{n<=j} (-1)^n 1F1(alpha(n+1); alpha(j+1)+1; i w).
    ///
    /// The n-sum is carried per Kummer index m as R_m(j) = sum_n (-1)^n (alpha(n+1))_m / (c_j)_m,
    /// c_j = alpha(j+1)+1, updated from j-1 to j with one Pochhammer ratio per m.
    /// Terms cancel by up to e^{(omega+Omega)t}, hence the extended precision.
    pub fn p_alpha_series(&self, t: f64, tol: f64) -> Result<PAlphaResult> {
        check_time(t)?;
        if !(tol > 0.0) {
            return domain(format!("tolerance must be positive, got {tol}"));
        }
        let a = self.alpha.get();
        let lam_a = self.params.lambda().powf(a);
        let s = self.params.omega() * t;
        let zero = PAlphaResult { value: C64::new(0.0, 0.0), method: PMethod::Series, terms: 0, est_error: 0.0 };
        if s == 0.0 || lam_a == 0.0 {
            return Ok(zero);
        }
        let tau = s.powf(a);
        let w = self.params.omega_ratio() * s;
        let pref_abs = lam_a * tau;
        let tol_s = tol / pref_abs;

        // Bounds: |1F1(A; B; iw)| <= e^w for A <= B, so |j-term| <= b_j = tau^j (j+1) e^w / Gamma(c_j).
        let ln_tau = tau.ln();
        let ln_b = |j: usize| {
            let jf = j as f64;
            jf * ln_tau + (jf + 1.0).ln() + w - libm::lgamma(a * (jf + 1.0) + 1.0)
        };
        let mut j_max = None;
        let mut sum_b = 0.0;
        for j in 0..SERIES_CAP {
            sum_b += (ln_b(j) - w).exp();
            let b1 = ln_b(j + 1);
            let rho = (ln_b(j + 2) - b1).exp();
            if rho < 1.0 {
                let tail = b1.exp() / (1.0 - rho);
                if tail <= 0.25 * tol_s {
                    j_max = Some((j, tail));
                    break;
                }
            }
        }
        let Some((j_max, tail_j)) = j_max else {
            return convergence(format!(
                "P series at omega t = {s}: more than {SERIES_CAP} outer terms needed"
            ));
        };
        // Kummer tail: sum_{m>M} w^m/m! <= w^{M+1}/(M+1)! / (1 - w/(M+2)), weighted by sum_b.
        let mut m_max = None;
        let mut lead = 1.0; // w^{M+1}/(M+1)!
        for m in 0..SERIES_CAP {
            lead *= w / (m + 1) as f64;
            let q = w / (m + 2) as f64;
            if q < 1.0 {
                let tail = sum_b * lead / (1.0 - q);
                if tail <= 0.25 * tol_s {
                    m_max = Some((m, tail));
                    break;
                }
            }
        }
        let Some((m_max, tail_m)) = m_max else {
            return convergence(format!(
                "P series at Omega t = {w}: more than {SERIES_CAP} Kummer terms needed"
            ));
        };

        let mut u = Vec::with_capacity(m_max + 1);
        let mut um = Dd::ONE;
        for m in 0..=m_max {
            if m > 0 {
                um = um.mul_f64(w) / Dd::new(m as f64);
            }
            u.push(um);
        }
        let ln_tau_dd = Dd::new(tau).ln();
        let mut r = vec![Dd::ZERO; m_max + 1];
        let mut c_prev = Dd::ZERO;
        let (mut s_re, mut s_im) = (Dd::ZERO, Dd::ZERO);
        let mut absum = 0.0;
        for j in 0..=j_max {
            let aj = Dd::prod(a, (j + 1) as f64);
            let cj = aj + Dd::ONE;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let mut rho = Dd::ONE;
            let (mut t_re, mut t_im) = (Dd::ZERO, Dd::ZERO);
            let mut t_abs = 0.0;
            for m in 0..=m_max {
                let mf = Dd::new(m as f64);
                let nu = if m == 0 { Dd::ONE } else { aj / (aj + mf) };
                r[m] = if j == 0 { nu } else { r[m] * rho + nu.mul_f64(sign) };
                if j > 0 {
                    rho = rho * (c_prev + mf) / (cj + mf);
                }
                let v = u[m] * r[m];
                t_abs += v.to_f64().abs();
                match m % 4 {
                    0 => t_re = t_re + v,
                    1 => t_im = t_im + v,
                    2 => t_re = t_re - v,
                    _ => t_im = t_im - v,
                }
            }
            let q = (ln_tau_dd.mul_f64(j as f64) - cj.ln_gamma()).exp();
            let (mut x_re, mut x_im) = (q * t_re, q * t_im);
            // (i tau)^j: rotate by i^j.
            for _ in 0..(j % 4) {
                (x_re, x_im) = (-x_im, x_re);
            }
            s_re = s_re + x_re;
            s_im = s_im + x_im;
            absum += q.to_f64() * t_abs;
            c_prev = cj;
        }
        let sum = C64::new(s_re.to_f64(), s_im.to_f64());
        let value = C64::new(0.0, -lam_a * tau) * C64::from_polar(1.0, -w) * sum;
        let rounding = absum * 2f64.powi(-100) * (m_max + j_max + 10) as f64 + 4.0 * f64::EPSILON * sum.norm();
        let est_error = pref_abs * (tail_j + tail_m + rounding);
        if est_error > tol {
            return convergence(format!(
                "P series at omega t = {s}: rounding estimate {est_error:.2e} exceeds {tol:.1e}"
            ));
        }
        Ok(PAlphaResult { value, method: PMethod::Series, terms: (j_max + 1) * (m_max + 1), est_error })
    }

    /// P(t) by adaptive quadrature in u = (omega (t - t'))^alpha, which absorbs the kernel
    /// singularity: P = lambda^alpha/(i alpha) int_0^{tau} E_{a,a}(-iu) E_a(i s'^a) e^{-i r s'} du,
    /// s' = omega t - u^{1/alpha}, r = Omega/omega.
    pub fn p_alpha_quadrature(&self, t: f64, tol: f64) -> Result<PAlphaResult> {
        check_time(t)?;
        if !(tol > 0.0) {
            return domain(format!("tolerance must be positive, got {tol}"));
        }
        let a = self.alpha.get();
        let lam_a = self.params.lambda().powf(a);
        let s = self.params.omega() * t;
        if s == 0.0 || lam_a == 0.0 {
            return Ok(PAlphaResult { value: C64::new(0.0, 0.0), method: PMethod::Quadrature, terms: 0, est_error: 0.0 });
        }
        let r = self.params.omega_ratio();
        let tau = s.powf(a);
        let scale = lam_a / a;
        let ml = self.ml;
        let f = |u: f64| -> Result<C64> {
            let sp = (s - u.powf(1.0 / a)).max(0.0);
            let k = ml.value(a, a, C64::new(0.0, -u))?;
            let g = ml.value(a, 1.0, C64::new(0.0, sp.powf(a)))?;
            Ok(k * g * C64::from_polar(1.0, -r * sp))
        };
        let q = quad::integrate(f, 0.0, tau, tol / scale, 0.0, QUAD_PIECES)?;
        Ok(PAlphaResult {
            value: q.value * C64::new(0.0, -scale),
            method: PMethod::Quadrature,
            terms: q.evals,
            est_error: q.est_error * scale,
        })
    }

    /// P(t) by the series when it certifies the tolerance, quadrature otherwise.
    pub fn p_alpha(&self, t: f64) -> Result<PAlphaResult> {
        if (self.params.omega() + self.params.omega_drive) * t <= SERIES_CANCELLATION_LIMIT {
            if let Ok(p) = self.p_alpha_series(t, self.p_tol) {
                return Ok(p);
            }
        }
        self.p_alpha_quadrature(t, self.p_tol)
    }

    /// Normalized leading-order state for an arbitrary initial state.
    pub fn driven_state(&self, initial: &SpinState, t: f64) -> Result<DrivenState> {
        let e = self.envelope(t)?;
        let p = self.p_alpha(t)?.value;
        Ok(assemble(e, p, initial))
    }

    /// Leading-order Bloch vector in its published closed form, E = E_alpha(-i (omega t)^alpha):
    ///   sx = sin(th) Re(E*^2)/|E|^2 + 2 Re(E P)/|E|^2
    ///   sy = sin(th) Im(E*^2)/|E|^2 - 2 Im(E P)/|E|^2
    ///   sz = cos(th)
    /// It differs from `bloch(driven_state)` at first order in lambda; see
    /// `driven_polarization_first_order` for the expansion consistent with `driven_state`.
    pub fn driven_polarization(&self, theta: f64, t: f64) -> Result<BlochVector> {
        let e = self.envelope(t)?;
        let p = self.p_alpha(t)?.value;
        let m = e.norm_sqr();
        let e2 = e.conj() * e.conj();
        let ep = e * p;
        Ok(BlochVector {
            sx: (theta.sin() * e2.re + 2.0 * ep.re) / m,
            sy: (theta.sin() * e2.im - 2.0 * ep.im) / m,
            sz: theta.cos(),
        })
    }

    /// First-order expansion of `bloch(driven_state)` in P/E:
    ///   sx = sin(th) Re(E*^2)/|E|^2 - 2 cos(th) Re(E P)/|E|^2
    ///   sy = sin(th) Im(E*^2)/|E|^2 + 2 cos(th) Im(E P)/|E|^2
    ///   sz = cos(th) + 2 sin(th) Re(E P*)/|E|^2
    pub fn driven_polarization_first_order(&self, theta: f64, t: f64) -> Result<BlochVector> {
        let e = self.envelope(t)?;
        let p = self.p_alpha(t)?.value;
        let m = e.norm_sqr();
        let e2 = e.conj() * e.conj();
        let (st, ct) = theta.sin_cos();
        let ep = e * p;
        Ok(BlochVector {
            sx: (st * e2.re - 2.0 * ct * ep.re) / m,
            sy: (st * e2.im + 2.0 * ct * ep.im) / m,
            sz: ct + 2.0 * st * (e * p.conj()).re / m,
        })
    }

    /// Fidelity against the exact integer-order evolution, closed form in g+-.
    pub fn fidelity(&self, theta: f64, t: f64) -> Result<f64> {
        let g = self.driven_state(&state_from_angle(theta), t)?;
        Ok(fidelity_closed_form(&self.params, theta, &g, t))
    }

    /// |<Psi_1(t)|psi_alpha(t)>|^2 evaluated directly from the two states.
    pub fn fidelity_direct(&self, theta: f64, t: f64) -> Result<f64> {
        let psi0 = state_from_angle(theta);
        let g = self.driven_state(&psi0, t)?;
        let psi1 = exact_rabi_state(&self.params, &psi0, t);
        Ok(psi1.inner(&g.spin()).norm_sqr())
    }

    /// Small-lambda resonant form, valid at Omega = 2 omega:
    /// [1 + 2 Re(g+ g-* e^{i Omega t}) sin th]/2 + [(|g+|^2 - |g-|^2)/2] cos th.
    pub fn fidelity_resonant(&self, theta: f64, t: f64) -> Result<f64> {
        if !self.params.is_resonant() {
            return domain(format!(
                "resonant fidelity needs Omega = 2 omega, got Omega/omega = {}",
                self.params.omega_ratio()
            ));
        }
        let g = self.driven_state(&state_from_angle(theta), t)?;
        let x = C64::from_polar(1.0, self.params.omega_drive * t) * g.g_plus * g.g_minus.conj();
        let d = g.g_plus.norm_sqr() - g.g_minus.norm_sqr();
        Ok((1.0 + 2.0 * x.re * theta.sin()) / 2.0 + d / 2.0 * theta.cos())
    }

    /// A(t) = [1 + (|g+|^2 - |g-|^2) cos th]/2 + Re(g+ g-*) sin th.
    pub fn autocorrelation_driven(&self, theta: f64, t: f64) -> Result<f64> {
        let g = self.driven_state(&state_from_angle(theta), t)?;
        Ok(autocorrelation_closed_form(theta, &g))
    }
}

pub(crate) fn assemble(e: C64, p: C64, initial: &SpinState) -> DrivenState {
    let gp = e * initial.plus + p * initial.minus;
    let gm = e.conj() * initial.minus - p.conj() * initial.plus;
    let norm_sq = gp.norm_sqr() + gm.norm_sqr();
    let n = norm_sq.sqrt();
    DrivenState { g_plus: gp / n, g_minus: gm / n, norm_sq }
}

pub fn autocorrelation_closed_form(theta: f64, g: &DrivenState) -> f64 {
    let d = g.g_plus.norm_sqr() - g.g_minus.norm_sqr();
    (1.0 + d * theta.cos()) / 2.0 + (g.g_plus * g.g_minus.conj()).re * theta.sin()
}

/// F = 1/2 {1 + cos(th-ga)[D cos ga + 2 Re X sin ga]}
///     - sin(th-ga){sin(2 eps t/hbar) Im X - cos(2 eps t/hbar)[Re X cos ga - (D/2) sin ga]},
/// X = e^{i Omega t} g+ g-*, D = |g+|^2 - |g-|^2.
pub fn fidelity_closed_form(params: &RabiParams, theta: f64, g: &DrivenState, t: f64) -> f64 {
    let ga = params.gamma_angle();
    let x = C64::from_polar(1.0, params.omega_drive * t) * g.g_plus * g.g_minus.conj();
    let d = g.g_plus.norm_sqr() - g.g_minus.norm_sqr();
    let ph = 2.0 * params.epsilon() * t / params.hbar;
    let (sg, cg) = ga.sin_cos();
    0.5 * (1.0 + (theta - ga).cos() * (d * cg + 2.0 * x.re * sg))
        - (theta - ga).sin() * (ph.sin() * x.im - ph.cos() * (x.re * cg - 0.5 * d * sg))
}

/// The same closed form written with tilde coefficients; used to cross-check the
/// theta-specialized display above.
pub fn fidelity_tilde_form(params: &RabiParams, theta: f64, g: &DrivenState, t: f64) -> f64 {
    let (cp, cm) = tilde_coeffs(params, theta);
    let ga = params.gamma_angle();
    let x = C64::from_polar(1.0, params.omega_drive * t) * g.g_plus * g.g_minus.conj();
    let d = g.g_plus.norm_sqr() - g.g_minus.norm_sqr();
    let w = C64::from_polar(cp * cm, 2.0 * params.epsilon() * t / params.hbar);
    let (sg, cg) = ga.sin_cos();
    0.5 * (1.0 + (cp * cp - cm * cm) * (d * cg + 2.0 * x.re * sg)) - 2.0 * w.im * x.im
        + 2.0 * w.re * (x.re * cg - 0.5 * d * sg)
}

/// Autocorrelation of a driven state computed from the state itself.
pub fn autocorrelation_direct(theta: f64, g: &DrivenState) -> f64 {
    autocorrelation(&state_from_angle(theta), &g.spin())
}
