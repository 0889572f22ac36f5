//! Run configuration and its key-value file format.
//!
//! The format is line-based text with `[section]` headers and `key = value`
//! pairs; `#` starts a comment. The full schema (all sections and keys,
//! with defaults) is documented in the repository README and in
//! `configs/default.cfg`.

use std::path::Path;

use crate::error::{QhdError, Result};
use crate::scalar::Scalar;
use crate::state::{FieldTarget, InitSpec, ModeSpec, PhysParams};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone)]
pub struct SimConfig<T> {
    pub grid_dim: usize,
    pub grid_length: T,
    pub grid_points: usize,
    pub params: PhysParams<T>,
    pub init: InitSpec<T>,
    pub t_max: T,
    pub cfl_safety: T,
    pub dt_max: T,
    pub output_every: T,
    pub output_dir: String,
    pub dealias: bool,
    pub regime_checks: bool,
    pub seed: u64,
}

impl<T: Scalar> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            grid_dim: 1,
            grid_length: T::lit(2.0) * T::PI(),
            grid_points: 64,
            params: PhysParams::defaults(),
            init: InitSpec::single_rho_mode(T::lit(0.01)),
            t_max: T::one(),
            cfl_safety: T::lit(0.4),
            dt_max: T::lit(0.05),
            output_every: T::lit(0.1),
            output_dir: "out".into(),
            dealias: true,
            regime_checks: true,
            seed: 0,
        }
    }
}

impl<T: Scalar> SimConfig<T> {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            QhdError::InvalidConfig(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut modes: Vec<ModeSpec<T>> = Vec::new();
        let mut explicit_modes = false;
        let mut random_count: Option<usize> = None;
        let mut random_max_mode: i64 = 4;
        let mut saw_version = false;
        let mut section = String::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| bad_line(lineno, raw, "unterminated section header"))?;
                section = name.trim().to_string();
                match section.as_str() {
                    "grid" | "phys" | "init" | "time" | "output" => {}
                    other => {
                        return Err(QhdError::InvalidConfig(format!(
                            "unknown section [{other}]"
                        )))
                    }
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad_line(lineno, raw, "expected key = value"))?;
            let key = key.trim();
            let value = value.trim();
            match (section.as_str(), key) {
                ("", "schema_version") => {
                    let v: u64 = parse_num(lineno, raw, value)?;
                    if v != SCHEMA_VERSION {
                        return Err(QhdError::InvalidConfig(format!(
                            "unsupported schema_version {v}, expected {SCHEMA_VERSION}"
                        )));
                    }
                    saw_version = true;
                }
                ("", "dealias") => cfg.dealias = parse_bool(lineno, raw, value)?,
                ("", "regime_checks") => cfg.regime_checks = parse_bool(lineno, raw, value)?,
                ("", "seed") => cfg.seed = parse_num(lineno, raw, value)?,
                ("grid", "dim") => cfg.grid_dim = parse_num(lineno, raw, value)?,
                ("grid", "L") => cfg.grid_length = parse_scalar(lineno, raw, value)?,
                ("grid", "N") => cfg.grid_points = parse_num(lineno, raw, value)?,
                ("phys", "hbar") => cfg.params.hbar = parse_scalar(lineno, raw, value)?,
                ("phys", "mu") => cfg.params.mu = parse_scalar(lineno, raw, value)?,
                ("phys", "lambda") => cfg.params.lambda = parse_scalar(lineno, raw, value)?,
                ("phys", "kappa") => cfg.params.kappa = parse_scalar(lineno, raw, value)?,
                ("init", "eps") => cfg.init.eps = parse_scalar(lineno, raw, value)?,
                ("init", "mean_rho") => cfg.init.mean_rho = parse_scalar(lineno, raw, value)?,
                ("init", "mode") => {
                    explicit_modes = true;
                    modes.push(parse_mode(lineno, raw, value)?);
                }
                ("init", "random_modes") => random_count = Some(parse_num(lineno, raw, value)?),
                ("init", "max_mode") => random_max_mode = parse_num(lineno, raw, value)?,
                ("time", "t_max") => cfg.t_max = parse_scalar(lineno, raw, value)?,
                ("time", "cfl_safety") => cfg.cfl_safety = parse_scalar(lineno, raw, value)?,
                ("time", "dt_max") => cfg.dt_max = parse_scalar(lineno, raw, value)?,
                ("output", "every") => cfg.output_every = parse_scalar(lineno, raw, value)?,
                ("output", "dir") => cfg.output_dir = value.to_string(),
                (sec, key) => {
                    return Err(QhdError::InvalidConfig(format!(
                        "unknown key `{key}` in section `[{sec}]`"
                    )))
                }
            }
        }
        if !saw_version {
            return Err(QhdError::InvalidConfig(
                "missing required key schema_version".into(),
            ));
        }
        if explicit_modes {
            cfg.init.modes = modes;
        } else if let Some(count) = random_count {
            let random = InitSpec::<T>::random(
                cfg.init.eps,
                count,
                random_max_mode,
                cfg.grid_dim,
                cfg.seed,
            );
            cfg.init.modes = random.modes;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        PhysParams::new(
            self.params.hbar,
            self.params.mu,
            self.params.lambda,
            self.params.kappa,
        )?;
        if self.regime_checks && self.init.eps > T::lit(0.1) {
            return Err(QhdError::InvalidConfig(format!(
                "init.eps = {} exceeds 0.1 while regime checks are enabled",
                self.init.eps.as_f64()
            )));
        }
        if !(self.init.eps >= T::zero()) {
            return Err(QhdError::InvalidConfig("init.eps must be >= 0".into()));
        }
        if !(self.t_max >= T::zero()) {
            return Err(QhdError::InvalidConfig("time.t_max must be >= 0".into()));
        }
        if !(self.cfl_safety > T::zero() && self.cfl_safety <= T::one()) {
            return Err(QhdError::InvalidConfig(
                "time.cfl_safety must lie in (0, 1]".into(),
            ));
        }
        if !(self.dt_max > T::zero()) {
            return Err(QhdError::InvalidConfig("time.dt_max must be > 0".into()));
        }
        if !(self.output_every > T::zero()) {
            return Err(QhdError::InvalidConfig("output.every must be > 0".into()));
        }
        Ok(())
    }
}

fn bad_line(lineno: usize, raw: &str, what: &str) -> QhdError {
    QhdError::InvalidConfig(format!("line {}: {what}: `{raw}`", lineno + 1))
}

fn parse_bool(lineno: usize, raw: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(bad_line(lineno, raw, "expected boolean")),
    }
}

fn parse_num<N: std::str::FromStr>(lineno: usize, raw: &str, v: &str) -> Result<N> {
    v.parse()
        .map_err(|_| bad_line(lineno, raw, "cannot parse number"))
}

fn parse_scalar<T: Scalar>(lineno: usize, raw: &str, v: &str) -> Result<T> {
    let f: f64 = parse_num(lineno, raw, v)?;
    if !f.is_finite() {
        return Err(bad_line(lineno, raw, "value must be finite"));
    }
    Ok(T::lit(f))
}

/// Mode syntax: `<field> <m1[,m2,m3]> <amplitude> [phase]` with field one of
/// `rho`, `u0`, `u1`, `u2`, `theta`.
fn parse_mode<T: Scalar>(lineno: usize, raw: &str, v: &str) -> Result<ModeSpec<T>> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    if parts.len() < 3 || parts.len() > 4 {
        return Err(bad_line(lineno, raw, "mode needs: field m[,m,m] amp [phase]"));
    }
    let field = match parts[0] {
        "rho" => FieldTarget::Rho,
        "u0" => FieldTarget::U(0),
        "u1" => FieldTarget::U(1),
        "u2" => FieldTarget::U(2),
        "theta" => FieldTarget::Theta,
        other => {
            return Err(bad_line(
                lineno,
                raw,
                &format!("unknown field `{other}` (rho, u0, u1, u2, theta)"),
            ))
        }
    };
    let mut wavevector = [0i64; 3];
    for (i, m) in parts[1].split(',').enumerate() {
        if i >= 3 {
            return Err(bad_line(lineno, raw, "at most 3 wavevector components"));
        }
        wavevector[i] = parse_num(lineno, raw, m.trim())?;
    }
    let amplitude = parse_scalar(lineno, raw, parts[2])?;
    let phase = if parts.len() == 4 {
        parse_scalar(lineno, raw, parts[3])?
    } else {
        T::zero()
    };
    Ok(ModeSpec {
        field,
        wavevector,
        amplitude,
        phase,
    })
}
