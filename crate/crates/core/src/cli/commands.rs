use std::collections::BTreeSet;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde_json::json;

use crate::checks;
use crate::frac_driven::{autocorrelation_closed_form, autocorrelation_direct, fidelity_closed_form, DrivenModel};
use crate::frac_static::StaticEvolution;
use crate::tls::{autocorrelation, bloch, exact_rabi_state, FracOrder, RabiParams, SpinState};
use crate::volterra::{
    oracle_observables, picard_iterate, rabi_hamiltonian, solve_ftse, static_hamiltonian, OracleConfig,
    OracleSolution, Scheme,
};

use super::config::{Output, RunConfig};
use super::format::{num, Cell, Table};
use super::{CliError, Document, HamiltonianArg, SchemeArg};

/// Cells past this omega t skip the series-vs-quadrature cross-check (the series is capped there).
const SERIES_CHECK_HORIZON: f64 = 10.0;

fn outputs(cfg: &RunConfig, default: &[Output], allowed: &[Output], cmd: &str) -> Result<Vec<Output>, CliError> {
    let set: BTreeSet<Output> = cfg.outputs.clone().unwrap_or_else(|| default.iter().copied().collect());
    if let Some(bad) = set.iter().find(|o| !allowed.contains(o)) {
        return Err(CliError::Usage(format!("output {} is not available for `{cmd}`", bad.name())));
    }
    if set.is_empty() {
        return Err(CliError::Usage("no outputs selected".into()));
    }
    Ok(set.into_iter().collect())
}

fn header(outs: &[Output]) -> Table {
    let mut cols = vec!["alpha", "t"];
    cols.extend(outs.iter().map(|o| o.name()));
    Table::new(&cols)
}

fn cells(cfg: &RunConfig) -> Vec<(FracOrder, f64)> {
    let times = cfg.times();
    cfg.alphas.iter().flat_map(|&a| times.iter().map(move |&t| (a, t))).collect()
}

fn params(cfg: &RunConfig) -> Result<RabiParams, CliError> {
    Ok(RabiParams::dimensionless(cfg.lambda, cfg.omega_drive)?)
}

fn cell_name(a: FracOrder, t: f64) -> String {
    format!("alpha={}, omega t={}", num(a.get()), num(t))
}

struct CellResult {
    values: Vec<f64>,
    violations: Vec<String>,
}

/// Runs `f` over the grid in parallel, returning rows in (alpha, t) order.
fn sweep<F>(cfg: &RunConfig, outs: &[Output], check: bool, f: F) -> Result<Document, CliError>
where
    F: Fn(FracOrder, f64) -> Result<CellResult, CliError> + Sync,
{
    let grid = cells(cfg);
    let results: Vec<CellResult> = grid
        .par_iter()
        .map(|&(a, t)| f(a, t).map_err(|e| e.context(cell_name(a, t))))
        .collect::<Result<_, _>>()?;
    let mut table = header(outs);
    let mut violations = Vec::new();
    for ((a, t), r) in grid.iter().zip(results) {
        let mut row = vec![Cell::Num(a.get()), Cell::Num(*t)];
        row.extend(r.values.into_iter().map(Cell::Num));
        table.rows.push(row);
        violations.extend(r.violations.into_iter().map(|v| format!("{}: {v}", cell_name(*a, *t))));
    }
    if check && !violations.is_empty() {
        let n = violations.len();
        violations.truncate(5);
        return Err(CliError::Numeric(format!("{n} check violation(s): {}", violations.join("; "))));
    }
    Ok(Document { table, trailer: Vec::new(), json: None })
}

fn require(violations: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        violations.push(what());
    }
}

pub fn cmd_static(cfg: &RunConfig, check: bool) -> Result<Document, CliError> {
    use Output::*;
    let outs = outputs(cfg, &[Sx, Sy, Sz], &[Sx, Sy, Sz, A], "static")?;
    let p = params(cfg)?;
    let psi0 = cfg.theta.state();
    let om = p.omega();
    sweep(cfg, &outs, check, |alpha, wt| {
        let ev = StaticEvolution::new(alpha, p, psi0).with_ml(cfg.ml);
        let t = wt / om;
        let b = ev.polarization(t)?;
        let psi = ev.state(t)?;
        let values = outs
            .iter()
            .map(|o| match o {
                Sx => b.sx,
                Sy => b.sy,
                Sz => b.sz,
                _ => autocorrelation(&psi0, &psi),
            })
            .collect();
        let mut violations = Vec::new();
        if check {
            let d = bloch(&psi);
            let dev = (d.sx - b.sx).abs().max((d.sy - b.sy).abs()).max((d.sz - b.sz).abs());
            require(&mut violations, dev <= 1e-10, || format!("closed form vs state Bloch vector differ by {dev:.2e}"));
        }
        Ok(CellResult { values, violations })
    })
}

pub fn cmd_driven(cfg: &RunConfig, check: bool) -> Result<Document, CliError> {
    use Output::*;
    let outs = outputs(cfg, &[Sx, Sy, Sz, A, F], &Output::ALL, "driven")?;
    let p = params(cfg)?;
    if outs.contains(&FRes) && !p.is_resonant() {
        return Err(CliError::Usage(format!(
            "F_res needs the resonant drive omega_drive = 2, got {}",
            num(cfg.omega_drive)
        )));
    }
    let theta = cfg.theta.get();
    let psi0 = cfg.theta.state();
    let om = p.omega();
    sweep(cfg, &outs, check, |alpha, wt| {
        let m = DrivenModel::new(alpha, p).with_ml(cfg.ml);
        let t = wt / om;
        let g = m.driven_state(&psi0, t)?;
        let b = bloch(&g.spin());
        let fid = fidelity_closed_form(&p, theta, &g, t);
        let ac = autocorrelation_closed_form(theta, &g);
        let mut values = Vec::with_capacity(outs.len());
        for o in &outs {
            values.push(match o {
                Sx => b.sx,
                Sy => b.sy,
                Sz => b.sz,
                A => ac,
                F => fid,
                FRes => m.fidelity_resonant(theta, t)?,
            });
        }
        let mut violations = Vec::new();
        if check {
            let direct = exact_rabi_state(&p, &psi0, t).inner(&g.spin()).norm_sqr();
            require(&mut violations, (fid - direct).abs() <= 1e-9, || {
                format!("fidelity closed form {} vs inner product {}", num(fid), num(direct))
            });
            let ad = autocorrelation_direct(theta, &g);
            require(&mut violations, (ac - ad).abs() <= 1e-10, || {
                format!("autocorrelation closed form {} vs inner product {}", num(ac), num(ad))
            });
            require(&mut violations, (-1e-12..=1.0 + 1e-9).contains(&fid) && (-1e-12..=1.0 + 1e-9).contains(&ac), || {
                format!("A={} or F={} outside [0, 1]", num(ac), num(fid))
            });
            require(&mut violations, b.norm() <= 1.0 + 1e-9, || format!("|s| = {} exceeds 1", num(b.norm())));
            if wt <= SERIES_CHECK_HORIZON {
                let s = m.p_alpha_series(t, 1e-10)?.value;
                let q = m.p_alpha_quadrature(t, 1e-10)?.value;
                let d = (s - q).norm();
                require(&mut violations, d <= 1e-7, || format!("P_alpha series vs quadrature differ by {d:.2e}"));
            }
        }
        Ok(CellResult { values, violations })
    })
}

pub struct OracleOptions {
    pub n_steps: usize,
    pub scheme: SchemeArg,
    pub hamiltonian: HamiltonianArg,
    pub picard_order: usize,
}

struct OracleSummary {
    alpha: f64,
    reference: &'static str,
    max_dev: f64,
    est_order: f64,
    scaling_ratio: f64,
}

fn run_oracle(alpha: FracOrder, p: &RabiParams, psi0: &SpinState, cfg: &OracleConfig, opts: &OracleOptions) -> Result<OracleSolution, CliError> {
    let sol = match (opts.hamiltonian, opts.picard_order) {
        (HamiltonianArg::Static, 0) => solve_ftse(alpha, p.hbar, &static_hamiltonian(alpha, p), psi0, cfg)?,
        (HamiltonianArg::Static, k) => picard_iterate(alpha, p.hbar, &static_hamiltonian(alpha, p), psi0, cfg, k)?,
        (HamiltonianArg::Rabi, 0) => solve_ftse(alpha, p.hbar, &rabi_hamiltonian(alpha, p), psi0, cfg)?,
        (HamiltonianArg::Rabi, k) => picard_iterate(alpha, p.hbar, &rabi_hamiltonian(alpha, p), psi0, cfg, k)?,
    };
    Ok(sol)
}

fn dist(a: [C64; 2], b: [C64; 2]) -> f64 {
    ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt()
}

/// Max distance between the normalized oracle state and the leading-order state,
/// sampled on at most ~256 oracle nodes.
fn leading_order_dev(alpha: FracOrder, p: &RabiParams, psi0: &SpinState, sol: &OracleSolution) -> Result<f64, CliError> {
    let m = DrivenModel::new(alpha, *p);
    let stride = (sol.times.len() / 256).max(1);
    let mut worst = 0.0f64;
    for k in (0..sol.times.len()).step_by(stride) {
        let o = sol.states[k].normalized()?;
        let g = m.driven_state(psi0, sol.times[k])?;
        worst = worst.max(dist([o.plus, o.minus], [g.g_plus, g.g_minus]));
    }
    Ok(worst)
}

pub fn cmd_oracle(cfg: &RunConfig, opts: &OracleOptions, check: bool) -> Result<(Document, Vec<String>), CliError> {
    use Output::*;
    let outs = outputs(cfg, &[Sx, Sy, Sz, A], &[Sx, Sy, Sz, A], "oracle")?;
    let p = params(cfg)?;
    let psi0 = cfg.theta.state();
    let om = p.omega();
    let scheme = match opts.scheme {
        SchemeArg::Rectangular => Scheme::Rectangular,
        SchemeArg::Trapezoidal => Scheme::Trapezoidal,
    };
    let ocfg = OracleConfig { picard_order: opts.picard_order, ..OracleConfig::new(opts.n_steps, cfg.t_max / om, scheme)? };
    let mut table = header(&outs);
    let mut summaries = Vec::new();
    for &alpha in &cfg.alphas {
        let at = |e: CliError| e.context(format!("alpha={}", num(alpha.get())));
        let sol = run_oracle(alpha, &p, &psi0, &ocfg, opts).map_err(at)?;
        let obs = oracle_observables(&sol, &psi0, om);
        let n = opts.n_steps;
        let picks: BTreeSet<usize> = if cfg.n_points > n {
            (0..=n).collect()
        } else {
            (0..cfg.n_points).map(|k| (k as f64 * n as f64 / (cfg.n_points - 1) as f64).round() as usize).collect()
        };
        for &k in &picks {
            let s = &obs[k];
            let mut row = vec![Cell::Num(alpha.get()), Cell::Num(s.t)];
            for o in &outs {
                row.push(Cell::Num(match o {
                    Sx => s.sx,
                    Sy => s.sy,
                    Sz => s.sz,
                    _ => s.a.unwrap_or(f64::NAN),
                }));
            }
            table.rows.push(row);
        }
        let mut summary = OracleSummary {
            alpha: alpha.get(),
            reference: "",
            max_dev: 0.0,
            est_order: sol.est_order,
            scaling_ratio: f64::NAN,
        };
        match opts.hamiltonian {
            HamiltonianArg::Static => {
                summary.reference = "mittag_leffler";
                let ev = StaticEvolution::new(alpha, p, psi0).with_ml(cfg.ml);
                for (t, s) in sol.times.iter().zip(&sol.states) {
                    let w = ev.state(*t).map_err(|e| at(e.into()))?;
                    summary.max_dev = summary.max_dev.max(dist([s.plus, s.minus], [w.plus, w.minus]));
                }
            }
            HamiltonianArg::Rabi if alpha.get() == 1.0 => {
                summary.reference = "exact_rabi";
                for (t, s) in sol.times.iter().zip(&sol.states) {
                    let w = exact_rabi_state(&p, &psi0, *t);
                    summary.max_dev = summary.max_dev.max(dist([s.plus, s.minus], [w.plus, w.minus]));
                }
            }
            HamiltonianArg::Rabi => {
                summary.reference = "leading_order";
                summary.max_dev = leading_order_dev(alpha, &p, &psi0, &sol).map_err(at)?;
                if cfg.lambda > 0.0 {
                    let half = RabiParams::dimensionless(cfg.lambda / 2.0, cfg.omega_drive)?;
                    let sol2 = run_oracle(alpha, &half, &psi0, &ocfg, opts).map_err(at)?;
                    let dev2 = leading_order_dev(alpha, &half, &psi0, &sol2).map_err(at)?;
                    summary.scaling_ratio = summary.max_dev / dev2;
                }
            }
        }
        summaries.push(summary);
    }
    let mut violations = Vec::new();
    if check {
        for s in &summaries {
            if s.reference != "leading_order" && s.max_dev > 1e-4 {
                violations.push(format!("alpha={}: max deviation {:.2e} from {} exceeds 1e-4", num(s.alpha), s.max_dev, s.reference));
            }
            if s.est_order.is_finite() && s.est_order < 0.9 {
                violations.push(format!("alpha={}: measured order {:.2} below 0.9", num(s.alpha), s.est_order));
            }
        }
    }
    let trailer = summaries
        .iter()
        .map(|s| {
            format!(
                "summary alpha={} reference={} max_dev={} est_order={} scaling_ratio={}",
                num(s.alpha),
                s.reference,
                num(s.max_dev),
                num(s.est_order),
                num(s.scaling_ratio)
            )
        })
        .collect();
    let json_num = |x: f64| serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number);
    let json = json!({
        "rows": table.to_json(),
        "summary": summaries.iter().map(|s| json!({
            "alpha": s.alpha,
            "reference": s.reference,
            "max_dev": json_num(s.max_dev),
            "est_order": json_num(s.est_order),
            "scaling_ratio": json_num(s.scaling_ratio),
        })).collect::<Vec<_>>(),
    });
    Ok((Document { table, trailer, json: Some(json) }, violations))
}

pub fn cmd_ml(cfg: &RunConfig, alpha: f64, beta: f64, z_re: f64, z_im: f64) -> Result<Document, CliError> {
    let e = cfg.ml.eval(alpha, beta, C64::new(z_re, z_im))?;
    let mut table = Table::new(&["alpha", "beta", "z_re", "z_im", "re", "im", "regime", "terms", "est_error"]);
    table.rows.push(vec![
        Cell::Num(alpha),
        Cell::Num(beta),
        Cell::Num(z_re),
        Cell::Num(z_im),
        Cell::Num(e.value.re),
        Cell::Num(e.value.im),
        Cell::Text(e.regime.to_string()),
        Cell::Int(e.terms as u64),
        Cell::Num(e.est_error),
    ]);
    Ok(Document { table, trailer: Vec::new(), json: None })
}

pub fn cmd_check(ids: &[u8]) -> (Document, Vec<u8>) {
    let mut table = Table::new(&["id", "name", "passed", "seconds", "detail"]);
    let mut failed = Vec::new();
    for &id in ids {
        let r = checks::run(id);
        eprintln!("{r}");
        if !r.passed {
            failed.push(id);
        }
        table.rows.push(vec![
            Cell::Int(id as u64),
            Cell::Text(r.name.into()),
            Cell::Bool(r.passed),
            Cell::Num((r.seconds * 100.0).round() / 100.0),
            Cell::Text(r.detail),
        ]);
    }
    (Document { table, trailer: Vec::new(), json: None }, failed)
}
