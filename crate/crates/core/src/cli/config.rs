//! Run configuration: defaults, flat key=value config files, flag overrides.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use crate::ml::MlConfig;
use crate::tls::{FracOrder, InitialAngle};

use super::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    Sx,
    Sy,
    Sz,
    A,
    F,
    FRes,
}

impl Output {
    pub const ALL: [Output; 6] = [Output::Sx, Output::Sy, Output::Sz, Output::A, Output::F, Output::FRes];

    pub fn name(self) -> &'static str {
        match self {
            Output::Sx => "sx",
            Output::Sy => "sy",
            Output::Sz => "sz",
            Output::A => "A",
            Output::F => "F",
            Output::FRes => "F_res",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        Output::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown output '{s}' (expected sx, sy, sz, A, F, F_res)")))
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub alphas: Vec<FracOrder>,
    pub theta: InitialAngle,
    pub lambda: f64,
    /// Omega / omega.
    pub omega_drive: f64,
    /// Horizon in units of omega t.
    pub t_max: f64,
    pub n_points: usize,
    /// None selects the per-command default.
    pub outputs: Option<BTreeSet<Output>>,
    pub ml: MlConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alphas: (2..=10).map(|k| FracOrder::new(k as f64 / 10.0).expect("grid orders are valid")).collect(),
            theta: InitialAngle::new(FRAC_PI_2).expect("pi/2 is a valid angle"),
            lambda: 0.1,
            omega_drive: 1.0,
            t_max: 20.0,
            n_points: 801,
            outputs: None,
            ml: MlConfig::default(),
        }
    }
}

fn number(key: &str, v: &str) -> Result<f64, CliError> {
    v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{key}: '{v}' is not a number")))
}

pub fn parse_alphas(v: &str) -> Result<Vec<FracOrder>, CliError> {
    let alphas = v
        .split(',')
        .map(|s| number("alpha", s).and_then(|a| FracOrder::new(a).map_err(CliError::from)))
        .collect::<Result<Vec<_>, _>>()?;
    if alphas.is_empty() {
        return Err(CliError::Usage("alpha list is empty".into()));
    }
    Ok(alphas)
}

pub fn parse_outputs(v: &str) -> Result<BTreeSet<Output>, CliError> {
    v.split(',').map(|s| Output::parse(s.trim())).collect()
}

impl RunConfig {
    /// Applies one key=value setting; keys match the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "alpha" => self.alphas = parse_alphas(value)?,
            "theta" => self.theta = InitialAngle::new(number(key, value)?)?,
            "lambda" => {
                let l = number(key, value)?;
                if !(l >= 0.0 && l.is_finite()) {
                    return Err(CliError::Usage(format!("lambda must be finite and >= 0, got {l}")));
                }
                self.lambda = l;
            }
            "omega_drive" | "omega-drive" => {
                let r = number(key, value)?;
                if !(r >= 0.0 && r.is_finite()) {
                    return Err(CliError::Usage(format!("omega_drive must be finite and >= 0, got {r}")));
                }
                self.omega_drive = r;
            }
            "t_max" | "t-max" => {
                let t = number(key, value)?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(CliError::Usage(format!("t_max must be positive, got {t}")));
                }
                self.t_max = t;
            }
            "n_points" | "n-points" => {
                let n: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("n_points: '{value}' is not an integer")))?;
                if n < 2 {
                    return Err(CliError::Usage(format!("n_points must be at least 2, got {n}")));
                }
                self.n_points = n;
            }
            "outputs" => self.outputs = Some(parse_outputs(value)?),
            "ml.taylor_radius" => self.ml.taylor_radius = Some(number(key, value)?),
            "ml.asymptotic_radius" => self.ml.asymptotic_radius = number(key, value)?,
            "ml.tol" => {
                let t = number(key, value)?;
                if !(t > 0.0) {
                    return Err(CliError::Usage(format!("ml.tol must be positive, got {t}")));
                }
                self.ml.tol = t;
            }
            _ => return Err(CliError::Usage(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("line {}: expected key=value", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Grid of omega t values, endpoints included.
    pub fn times(&self) -> Vec<f64> {
        let n = self.n_points - 1;
        (0..=n).map(|k| self.t_max * k as f64 / n as f64).collect()
    }
}
