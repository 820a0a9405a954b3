//! Inverse-Laplace evaluation of E_{alpha,beta}(z) on an optimal parabolic contour
//! s(u) = mu (iu + 1)^2, following R. Garrappa's parameter selection
//! (SIAM J. Numer. Anal. 53, 2015), with residues of the poles left of the contour.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

const LOG_EPS_MACHINE: f64 = -36.043_653_389_117_15;

pub(super) struct ContourEval {
    pub value: C64,
    pub nodes: usize,
    /// |I_h - I_{h/2}|, the change under node doubling.
    pub est_error: f64,
    /// h/(2 pi) sum |integrand|, the scale of rounding in the trapezoid sum.
    pub scale: f64,
}

struct Param {
    mu: f64,
    h: f64,
    n: f64,
}

fn param_rb(phi_j: f64, phi_j1: f64, p: f64, q: f64, mut log_epsilon: f64) -> Option<Param> {
    let fac = 1.01;
    let f_max = (log_epsilon - LOG_EPS_MACHINE).exp();
    let sq_j = phi_j.sqrt();
    let threshold = 2.0 * (log_epsilon - LOG_EPS_MACHINE).sqrt();
    let sq_j1 = phi_j1.sqrt().min(threshold - sq_j);
    let (sqb_j, sqb_j1, f_bar);
    if p < 1e-14 && q < 1e-14 {
        sqb_j = sq_j;
        sqb_j1 = sq_j1;
        f_bar = 1.0;
    } else if p < 1e-14 {
        sqb_j = sq_j;
        let f_min = if sq_j > 0.0 { fac * (sq_j / (sq_j1 - sq_j)).powf(q) } else { fac };
        if f_min >= f_max {
            return None;
        }
        f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fq = f_bar.powf(-1.0 / q);
        sqb_j1 = (2.0 * sq_j1 - fq * sq_j) / (2.0 + fq);
    } else if q < 1e-14 {
        sqb_j1 = sq_j1;
        let f_min = fac * (sq_j1 / (sq_j1 - sq_j)).powf(p);
        if f_min >= f_max {
            return None;
        }
        f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / p);
        sqb_j = (2.0 * sq_j + fp * sq_j1) / (2.0 - fp);
    } else {
        let f_min = fac * (sq_j + sq_j1) / (sq_j1 - sq_j).powf(p.max(q));
        if f_min >= f_max {
            return None;
        }
        let f_min = f_min.max(1.5);
        f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / p);
        let fq = f_bar.powf(-1.0 / q);
        let w = -phi_j1 / log_epsilon;
        let den = 2.0 + w - (1.0 + w) * fp + fq;
        sqb_j = ((2.0 + w + fq) * sq_j + fp * sq_j1) / den;
        sqb_j1 = (-(1.0 + w) * fq * sq_j + (2.0 + w - (1.0 + w) * fp) * sq_j1) / den;
    }
    log_epsilon -= f_bar.ln();
    let w = -sqb_j1 * sqb_j1 / log_epsilon;
    let mu = (((1.0 + w) * sqb_j + sqb_j1) / (2.0 + w)).powi(2);
    let h = -2.0 * PI / log_epsilon * (sqb_j1 - sqb_j) / ((1.0 + w) * sqb_j + sqb_j1);
    let n = ((1.0 - log_epsilon / mu).sqrt() / h).ceil();
    if !(mu > 0.0 && h > 0.0 && n.is_finite()) {
        return None;
    }
    Some(Param { mu, h, n })
}

fn param_ru(phi_j: f64, p: f64, log_epsilon: f64) -> Option<Param> {
    let sq_phi_j = phi_j.sqrt();
    let mut phib = if phi_j > 0.0 { phi_j * 1.01 } else { 0.01 };
    let mut sqb = phib.sqrt();
    let (f_min, f_max, f_tar) = (1.0, 10.0, 5.0f64);
    let (mut n, mut a, mut sq_mu);
    let mut guard = 0;
    loop {
        let log_eps_phi = log_epsilon / phib;
        n = (phib / PI * (1.0 - 1.5 * log_eps_phi + (1.0 - 2.0 * log_eps_phi).sqrt())).ceil();
        a = PI * n / phib;
        sq_mu = sqb * (4.0 - a).abs() / (7.0 - (1.0 + 12.0 * a).sqrt()).abs();
        let fbar = ((sqb - sq_phi_j) / sq_mu).powf(-p);
        guard += 1;
        if p < 1e-14 || (f_min < fbar && fbar < f_max) || guard > 100 {
            break;
        }
        sqb = f_tar.powf(-1.0 / p) * sq_mu + sq_phi_j;
        phib = sqb * sqb;
    }
    let mut mu = sq_mu * sq_mu;
    let mut h = (-3.0 * a - 2.0 + 2.0 * (1.0 + 12.0 * a).sqrt()) / (4.0 - a) / n;
    let threshold = log_epsilon - LOG_EPS_MACHINE;
    if mu > threshold {
        let qq = if p.abs() < 1e-14 { 0.0 } else { f_tar.powf(-1.0 / p) * mu.sqrt() };
        let phib = (qq + phi_j.sqrt()).powi(2);
        if phib < threshold {
            let w = (LOG_EPS_MACHINE / (LOG_EPS_MACHINE - log_epsilon)).sqrt();
            let u = (-phib / LOG_EPS_MACHINE).sqrt();
            mu = threshold;
            n = (w * log_epsilon / 2.0 / PI / (u * w - 1.0)).ceil();
            h = w / n;
        } else {
            return None;
        }
    }
    if !(mu > 0.0 && h > 0.0 && n.is_finite() && n > 0.0) {
        return None;
    }
    Some(Param { mu, h, n })
}

pub(super) fn contour(alpha: f64, beta: f64, z: C64) -> ContourEval {
    let theta = z.arg();
    let az = z.norm();
    let kmin = (-alpha / 2.0 - theta / (2.0 * PI)).ceil() as i64;
    let kmax = (alpha / 2.0 - theta / (2.0 * PI)).floor() as i64;
    let mut poles: Vec<(f64, C64)> = (kmin..=kmax)
        .map(|k| C64::from_polar(az.powf(1.0 / alpha), (theta + 2.0 * PI * k as f64) / alpha))
        .map(|s| ((s.re + s.norm()) / 2.0, s))
        .filter(|(phi, _)| *phi > 1e-15)
        .collect();
    poles.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut s_star = vec![C64::new(0.0, 0.0)];
    let mut phi = vec![0.0];
    for (ph, s) in &poles {
        phi.push(*ph);
        s_star.push(*s);
    }
    let j1 = s_star.len();
    let mut p = vec![1.0; j1];
    p[0] = (-2.0 * (alpha - beta + 1.0)).max(0.0);
    let mut q = vec![1.0; j1];
    q[j1 - 1] = f64::INFINITY;
    phi.push(f64::INFINITY);

    let mut log_epsilon = 1e-15f64.ln();
    let admissible: Vec<usize> = (0..j1)
        .filter(|&j| phi[j] < (log_epsilon - LOG_EPS_MACHINE) && phi[j] < phi[j + 1])
        .collect();
    let (best_j, best) = loop {
        let mut best: Option<(usize, Param)> = None;
        for &j in &admissible {
            let prm = if j < j1 - 1 {
                param_rb(phi[j], phi[j + 1], p[j], q[j], log_epsilon)
            } else {
                param_ru(phi[j], p[j], log_epsilon)
            };
            if let Some(prm) = prm {
                if best.as_ref().is_none_or(|(_, b)| prm.n < b.n) {
                    best = Some((j, prm));
                }
            }
        }
        match best {
            Some((j, prm)) if prm.n <= 400.0 => break (j, prm),
            _ if log_epsilon < -5.0 => log_epsilon += 10f64.ln(),
            Some(b) => break b,
            None => {
                break (0, Param { mu: 1.0, h: 0.05, n: 200.0 });
            }
        }
    };

    let n = best.n as i64;
    let integrand = |u: f64| -> C64 {
        let s = best.mu * C64::new(1.0, u).powi(2);
        let sd = C64::new(-2.0 * best.mu * u, 2.0 * best.mu);
        let f = s.powf(alpha - beta) / (s.powf(alpha) - z) * sd;
        s.exp() * f
    };
    let mut coarse = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    for k in -n..=n {
        let v = integrand(best.h * k as f64);
        scale += v.norm();
        coarse += v;
    }
    let mut odd = C64::new(0.0, 0.0);
    for k in -n..n {
        let v = integrand(best.h * (k as f64 + 0.5));
        scale += v.norm();
        odd += v;
    }
    let to_int = |sum: C64, h: f64| sum * h / C64::new(0.0, 2.0 * PI);
    let i_h = to_int(coarse, best.h);
    let i_h2 = to_int(coarse + odd, best.h / 2.0);

    let residues: C64 = s_star[best_j + 1..]
        .iter()
        .map(|s| s.powf(1.0 - beta) * s.exp() / alpha)
        .sum();
    ContourEval {
        value: i_h2 + residues,
        nodes: (4 * n + 1) as usize,
        est_error: (i_h - i_h2).norm(),
        scale: scale * best.h / 2.0 / (2.0 * PI),
    }
}
