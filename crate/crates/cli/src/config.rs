//! Scenario description and the `key = value` config format.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use dcg_core::C64;

use crate::error::{CliError, Result};
use crate::presets::Preset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    TwoSpinHeisenberg,
    TwoSpinSxSz,
    SpinBosonDephasing,
    SpinBosonDissipative,
    FanoAnderson,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::TwoSpinHeisenberg,
        ModelKind::TwoSpinSxSz,
        ModelKind::SpinBosonDephasing,
        ModelKind::SpinBosonDissipative,
        ModelKind::FanoAnderson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::TwoSpinHeisenberg => "two-spin-heisenberg",
            ModelKind::TwoSpinSxSz => "two-spin-sxsz",
            ModelKind::SpinBosonDephasing => "spin-boson-dephasing",
            ModelKind::SpinBosonDissipative => "spin-boson-dissipative",
            ModelKind::FanoAnderson => "fano-anderson",
        }
    }

    /// Whether an exact reference solution exists.
    pub fn has_oracle(self) -> bool {
        self != ModelKind::SpinBosonDissipative
    }

    /// Models whose populations decouple from the coherences; their runs
    /// also emit a `t,rho00` file.
    pub fn population_model(self) -> bool {
        matches!(self, ModelKind::SpinBosonDissipative | ModelKind::FanoAnderson)
    }

    /// Default parameters, taken from the figure presets.
    pub fn default_params(self) -> ModelParams {
        match self {
            ModelKind::TwoSpinHeisenberg => Preset::Fig1.scenario().params,
            ModelKind::TwoSpinSxSz => Preset::Fig2.scenario().params,
            ModelKind::SpinBosonDephasing => Preset::Dephasing.scenario().params,
            ModelKind::SpinBosonDissipative => Preset::Fig3.scenario().params,
            ModelKind::FanoAnderson => Preset::Fano.scenario().params,
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|m| m.name()).collect();
                format!("unknown model '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Dcg(usize),
    Bms,
    Exact,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Dcg(n) => write!(f, "dcg{n}"),
            Method::Bms => f.write_str("bms"),
            Method::Exact => f.write_str("exact"),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dcg1" => Ok(Method::Dcg(1)),
            "dcg2" => Ok(Method::Dcg(2)),
            "dcg3" => Ok(Method::Dcg(3)),
            "dcg4" => Ok(Method::Dcg(4)),
            "bms" => Ok(Method::Bms),
            "exact" => Ok(Method::Exact),
            _ => Err(format!("unknown method '{s}' (expected dcg1..dcg4, bms or exact)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Ground,
    Excited,
    PlusState,
    Custom { rho00: f64, rho01: C64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    TwoSpin {
        lambda: f64,
        omega: f64,
        big_omega: f64,
        rho_b00: f64,
        rho_b01: C64,
    },
    SpinBoson {
        lambda: f64,
        eps_d: f64,
        g0: f64,
        s: f64,
        omega_c: f64,
        beta: f64,
    },
    Fano {
        lambda: f64,
        eps_d: f64,
        gamma_l0: f64,
        gamma_r0: f64,
        delta_l: f64,
        delta_r: f64,
        eps_l: f64,
        eps_r: f64,
    },
}

impl ModelParams {
    /// `(key, value)` pairs in config spelling.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        match *self {
            ModelParams::TwoSpin {
                lambda,
                omega,
                big_omega,
                rho_b00,
                rho_b01,
            } => vec![
                ("lambda", lambda),
                ("system.omega", omega),
                ("bath.omega", big_omega),
                ("bath.rho00", rho_b00),
                ("bath.rho01_re", rho_b01.re),
                ("bath.rho01_im", rho_b01.im),
            ],
            ModelParams::SpinBoson {
                lambda,
                eps_d,
                g0,
                s,
                omega_c,
                beta,
            } => vec![
                ("lambda", lambda),
                ("system.eps_d", eps_d),
                ("bath.g0", g0),
                ("bath.s", s),
                ("bath.omega_c", omega_c),
                ("bath.beta", beta),
            ],
            ModelParams::Fano {
                lambda,
                eps_d,
                gamma_l0,
                gamma_r0,
                delta_l,
                delta_r,
                eps_l,
                eps_r,
            } => vec![
                ("lambda", lambda),
                ("system.eps_d", eps_d),
                ("leads.gamma_l0", gamma_l0),
                ("leads.gamma_r0", gamma_r0),
                ("leads.delta_l", delta_l),
                ("leads.delta_r", delta_r),
                ("leads.eps_l", eps_l),
                ("leads.eps_r", eps_r),
            ],
        }
    }

    fn set(&mut self, key: &str, v: f64) -> bool {
        match self {
            ModelParams::TwoSpin {
                lambda,
                omega,
                big_omega,
                rho_b00,
                rho_b01,
            } => match key {
                "lambda" => *lambda = v,
                "system.omega" => *omega = v,
                "bath.omega" => *big_omega = v,
                "bath.rho00" => *rho_b00 = v,
                "bath.rho01_re" => rho_b01.re = v,
                "bath.rho01_im" => rho_b01.im = v,
                _ => return false,
            },
            ModelParams::SpinBoson {
                lambda,
                eps_d,
                g0,
                s,
                omega_c,
                beta,
            } => match key {
                "lambda" => *lambda = v,
                "system.eps_d" => *eps_d = v,
                "bath.g0" => *g0 = v,
                "bath.s" => *s = v,
                "bath.omega_c" => *omega_c = v,
                "bath.beta" => *beta = v,
                _ => return false,
            },
            ModelParams::Fano {
                lambda,
                eps_d,
                gamma_l0,
                gamma_r0,
                delta_l,
                delta_r,
                eps_l,
                eps_r,
            } => match key {
                "lambda" => *lambda = v,
                "system.eps_d" => *eps_d = v,
                "leads.gamma_l0" => *gamma_l0 = v,
                "leads.gamma_r0" => *gamma_r0 = v,
                "leads.delta_l" => *delta_l = v,
                "leads.delta_r" => *delta_r = v,
                "leads.eps_l" => *eps_l = v,
                "leads.eps_r" => *eps_r = v,
                _ => return false,
            },
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_points: usize,
}

impl TimeGrid {
    /// Uniform points from 0 to `t_max` inclusive.
    pub fn points(&self) -> Vec<f64> {
        let last = (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|k| if k + 1 == self.n_points { self.t_max } else { self.t_max * k as f64 / last })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model: ModelKind,
    pub methods: Vec<Method>,
    pub params: ModelParams,
    pub grid: TimeGrid,
    pub rho0: InitialState,
    pub output: PathBuf,
}

impl Scenario {
    /// Renders the scenario in config syntax; parsing the text gives the
    /// scenario back.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let methods: Vec<String> = self.methods.iter().map(|m| m.to_string()).collect();
        out.push_str(&format!("name = {}\n", self.name));
        out.push_str(&format!("model = {}\n", self.model.name()));
        out.push_str(&format!("methods = {}\n", methods.join(", ")));
        out.push_str(&format!("t_max = {}\n", self.grid.t_max));
        out.push_str(&format!("n_points = {}\n", self.grid.n_points));
        match self.rho0 {
            InitialState::Ground => out.push_str("rho0 = ground\n"),
            InitialState::Excited => out.push_str("rho0 = excited\n"),
            InitialState::PlusState => out.push_str("rho0 = plus-state\n"),
            InitialState::Custom { rho00, rho01 } => {
                out.push_str("rho0 = custom\n");
                out.push_str(&format!("rho0.rho00 = {rho00}\n"));
                out.push_str(&format!("rho0.rho01_re = {}\n", rho01.re));
                out.push_str(&format!("rho0.rho01_im = {}\n", rho01.im));
            }
        }
        for (k, v) in self.params.entries() {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out.push_str(&format!("output = {}\n", self.output.display()));
        out
    }
}

const COMMON_KEYS: [&str; 11] = [
    "preset",
    "name",
    "model",
    "methods",
    "t_max",
    "n_points",
    "rho0",
    "rho0.rho00",
    "rho0.rho01_re",
    "rho0.rho01_im",
    "output",
];

/// Parses a scenario. Every violated constraint is reported at once.
pub fn parse_config(text: &str) -> Result<Scenario> {
    let mut errors = Vec::new();
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(format!("line {}: expected 'key = value', got '{line}'", i + 1));
            continue;
        };
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if key.is_empty() {
            errors.push(format!("line {}: empty key", i + 1));
        } else if let Some((first, _)) = entries.get(&key) {
            errors.push(format!("line {}: key '{key}' already set on line {first}", i + 1));
        } else {
            entries.insert(key, (i + 1, value));
        }
    }
    let get = |k: &str| entries.get(k).map(|(_, v)| v.as_str());

    let base = match get("preset") {
        Some(p) => match p.parse::<Preset>() {
            Ok(p) => Some(p.scenario()),
            Err(e) => {
                errors.push(e);
                None
            }
        },
        None => None,
    };

    let model = match get("model") {
        Some(m) => m.parse::<ModelKind>().map_err(|e| errors.push(e)).ok(),
        None => base.as_ref().map(|b| b.model),
    };
    if base.is_none() {
        let missing: Vec<&str> = ["model", "methods", "t_max", "n_points"]
            .into_iter()
            .filter(|k| get(k).is_none())
            .collect();
        if !missing.is_empty() {
            errors.push(format!("missing required keys: {}", missing.join(", ")));
        }
    }
    let Some(model) = model else {
        return Err(CliError::Config(errors));
    };

    let mut params = match &base {
        Some(b) if b.model == model => b.params,
        _ => model.default_params(),
    };
    let param_keys: Vec<&str> = params.entries().into_iter().map(|(k, _)| k).collect();
    for (key, (line, value)) in &entries {
        if COMMON_KEYS.contains(&key.as_str()) {
            continue;
        }
        if !param_keys.contains(&key.as_str()) {
            errors.push(format!("line {line}: unknown key '{key}' for model {}", model.name()));
            continue;
        }
        match value.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                params.set(key, v);
            }
            _ => errors.push(format!("line {line}: '{key}' needs a finite number, got '{value}'")),
        }
    }

    let number = |key: &str, errors: &mut Vec<String>| -> Option<f64> {
        let (line, v) = entries.get(key)?;
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Some(x),
            _ => {
                errors.push(format!("line {line}: '{key}' needs a finite number, got '{v}'"));
                None
            }
        }
    };

    let methods = match get("methods") {
        Some(list) => {
            let mut out = Vec::new();
            for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match item.parse::<Method>() {
                    Ok(m) if out.contains(&m) => errors.push(format!("method {m} listed twice")),
                    Ok(m) => out.push(m),
                    Err(e) => errors.push(e),
                }
            }
            out
        }
        None => base.as_ref().map(|b| b.methods.clone()).unwrap_or_default(),
    };
    if methods.is_empty() && get("methods").is_some() {
        errors.push("methods must not be empty".into());
    }
    if methods.contains(&Method::Exact) && !model.has_oracle() {
        errors.push(format!("no exact solution is available for {}", model.name()));
    }

    let t_max = number("t_max", &mut errors).or(base.as_ref().map(|b| b.grid.t_max));
    if let Some(t) = t_max {
        if t.is_nan() || t <= 0.0 {
            errors.push(format!("t_max must be positive, got {t}"));
        }
    }
    let n_points = match entries.get("n_points") {
        Some((line, v)) => match v.parse::<usize>() {
            Ok(n) => Some(n),
            Err(_) => {
                errors.push(format!("line {line}: 'n_points' needs a non-negative integer, got '{v}'"));
                None
            }
        },
        None => base.as_ref().map(|b| b.grid.n_points),
    };
    if let Some(n) = n_points {
        if n < 2 {
            errors.push(format!("n_points ≥ 2 is required, got {n}"));
        }
    }

    let rho0 = parse_initial(&entries, base.as_ref().map(|b| b.rho0), &mut errors);
    if let Some(InitialState::Custom { rho00, rho01 }) = rho0 {
        if !(0.0..=1.0).contains(&rho00) || rho01.norm_sqr() > rho00 * (1.0 - rho00) + 1e-12 {
            errors.push("custom initial state is not a density matrix".into());
        }
    }

    validate_params(model, &params, &mut errors);

    if !errors.is_empty() {
        return Err(CliError::Config(errors));
    }
    let name = get("name")
        .map(str::to_string)
        .or(base.as_ref().map(|b| b.name.clone()))
        .unwrap_or_else(|| model.name().to_string());
    let output = get("output")
        .map(PathBuf::from)
        .or(base.as_ref().map(|b| b.output.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(Scenario {
        name,
        model,
        methods,
        params,
        grid: TimeGrid {
            t_max: t_max.expect("validated"),
            n_points: n_points.expect("validated"),
        },
        rho0: rho0.expect("validated"),
        output,
    })
}

fn parse_initial(
    entries: &BTreeMap<String, (usize, String)>,
    base: Option<InitialState>,
    errors: &mut Vec<String>,
) -> Option<InitialState> {
    let component = |key: &str, errors: &mut Vec<String>| -> Option<f64> {
        let (line, v) = entries.get(key)?;
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .or_else(|| {
                errors.push(format!("line {line}: '{key}' needs a finite number, got '{v}'"));
                None
            })
    };
    let custom_keys = ["rho0.rho00", "rho0.rho01_re", "rho0.rho01_im"];
    let has_custom = custom_keys.iter().any(|k| entries.contains_key(*k));
    let kind = entries.get("rho0").map(|(_, v)| v.as_str());
    let state = match kind {
        Some("ground") => InitialState::Ground,
        Some("excited") => InitialState::Excited,
        Some("plus-state") => InitialState::PlusState,
        Some("custom") => {
            let Some(rho00) = component("rho0.rho00", errors) else {
                if !entries.contains_key("rho0.rho00") {
                    errors.push("rho0 = custom needs rho0.rho00".into());
                }
                return None;
            };
            let re = component("rho0.rho01_re", errors).unwrap_or(0.0);
            let im = component("rho0.rho01_im", errors).unwrap_or(0.0);
            return Some(InitialState::Custom {
                rho00,
                rho01: C64::new(re, im),
            });
        }
        Some(other) => {
            errors.push(format!(
                "unknown initial state '{other}' (expected ground, excited, plus-state or custom)"
            ));
            return None;
        }
        None => base.unwrap_or(InitialState::Ground),
    };
    if has_custom {
        errors.push("rho0.* components need rho0 = custom".into());
    }
    Some(state)
}

fn validate_params(model: ModelKind, params: &ModelParams, errors: &mut Vec<String>) {
    if let Err(e) = crate::models::build(model, params) {
        errors.push(e.to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(text: &str) -> Vec<String> {
        match parse_config(text) {
            Err(CliError::Config(e)) => e,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let s = parse_config("model = two-spin-heisenberg\nmethods = dcg2\nt_max = 5\nn_points = 11\n").unwrap();
        assert_eq!(s.params, ModelKind::TwoSpinHeisenberg.default_params());
        assert_eq!(s.rho0, InitialState::Ground);
        assert_eq!(s.name, "two-spin-heisenberg");
        assert_eq!(s.grid.points().len(), 11);
        assert_eq!(s.grid.points()[10], 5.0);
    }

    #[test]
    fn comments_and_dotted_keys() {
        let text = "# header\nmodel = spin-boson-dissipative # trailing\nmethods = dcg2, bms\n\
                    t_max = 10\nn_points = 3\nbath.beta = 0.2\nrho0 = custom\nrho0.rho00 = 0.3\n";
        let s = parse_config(text).unwrap();
        match s.params {
            ModelParams::SpinBoson { beta, .. } => assert_eq!(beta, 0.2),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            s.rho0,
            InitialState::Custom {
                rho00: 0.3,
                rho01: C64::new(0.0, 0.0)
            }
        );
        assert_eq!(s.methods, vec![Method::Dcg(2), Method::Bms]);
    }

    #[test]
    fn reports_every_violation() {
        let e = errors("model = fano-anderson\nmethods = dcg2\nt_max = -1\nn_points = 1\nbath.beta = 1\n");
        assert!(e.iter().any(|m| m.contains("n_points ≥ 2")), "{e:?}");
        assert!(e.iter().any(|m| m.contains("t_max must be positive")));
        assert!(e.iter().any(|m| m.contains("unknown key 'bath.beta'")));
        let e = errors("methods = dcg2\n");
        assert!(e.iter().any(|m| m.contains("missing required keys: model, t_max, n_points")), "{e:?}");
        let e = errors("model = spin-boson-dissipative\nmethods = exact\nt_max = 1\nn_points = 2\n");
        assert!(e.iter().any(|m| m.contains("no exact solution")));
        let e = errors("preset = fig1\nmethods = dcg5\n");
        assert!(e.iter().any(|m| m.contains("unknown method 'dcg5'")));
        let e = errors("preset = fig1\nlambda = 1\nlambda = 2\n");
        assert!(e.iter().any(|m| m.contains("already set")));
        let e = errors("preset = fig1\nbath.rho00 = 1.5\n");
        assert!(e.iter().any(|m| m.contains("bath population")), "{e:?}");
        let e = errors("preset = fig1\nnot a pair\n");
        assert!(e.iter().any(|m| m.contains("expected 'key = value'")));
    }

    #[test]
    fn presets_round_trip_through_config_text() {
        for p in Preset::ALL {
            let s = p.scenario();
            assert_eq!(parse_config(&s.to_config()).unwrap(), s, "{}", p.name());
        }
    }

    #[test]
    fn preset_with_overrides() {
        let s = parse_config("preset = fig1\nn_points = 5\nsystem.omega = 1.5\n").unwrap();
        assert_eq!(s.grid, TimeGrid { t_max: 20.0, n_points: 5 });
        match s.params {
            ModelParams::TwoSpin { omega, lambda, .. } => assert_eq!((omega, lambda), (1.5, 0.25)),
            other => panic!("{other:?}"),
        }
    }
}
