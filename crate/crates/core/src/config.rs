//! Scenario configuration and its `key = value` text format.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::control_space::DiscretizationConfig;
use crate::dynamics::Bounds;
use crate::error::{invalid, FlockError, Result};
use crate::mrf::ControllerConfig;
use crate::potentials::PotentialParams;

/// Every key the config file accepts.
pub const CONFIG_KEYS: &[&str] = &[
    "k",
    "a",
    "b",
    "k_a",
    "k_r",
    "n_a",
    "delta_u",
    "dt",
    "t_p",
    "k_l",
    "k_c",
    "k_d",
    "k_v",
    "v_leader",
    "alpha",
    "r_coll",
    "u_max",
    "v_max",
    "n_agents",
    "steps",
    "gather_duration",
    "s_curve_amplitude",
    "s_curve_period",
    "spawn_radius",
    "rng_seed",
    "iterations",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    /// Total agent count, leader included.
    pub n_agents: usize,
    /// Simulator tick, s.
    pub dt: f64,
    pub steps: usize,
    /// Leader hovers at the origin for this long before setting off, s.
    pub gather_duration: f64,
    /// Leader speed once moving, m/s.
    pub leader_speed: f64,
    /// Peak heading deviation of the S-curve, rad.
    pub s_curve_amplitude: f64,
    pub s_curve_period: f64,
    pub spawn_radius: f64,
    pub rng_seed: u64,
    pub controller: ControllerConfig,
}

impl Default for ScenarioConfig {
    /// Simulation column of the reference parameter table with the default
    /// scenario geometry.
    fn default() -> Self {
        let t_p = 0.15;
        let u_max = 0.7;
        Self {
            n_agents: 7,
            dt: 0.05,
            steps: 1400,
            gather_duration: 10.0,
            leader_speed: 0.2,
            s_curve_amplitude: 0.9,
            s_curve_period: 25.0,
            spawn_radius: 2.5,
            rng_seed: 1,
            controller: ControllerConfig {
                k: 3,
                alpha: 0.8,
                iterations: 3,
                epsilon_converge: 1e-4,
                pair_weight: 1.0,
                discretization: DiscretizationConfig { n_a: 6, delta_u: 0.14, u_max, t_p },
                potentials: PotentialParams {
                    a: 8.0,
                    b: 10.0,
                    k_a: 1.5,
                    k_r: 0.2,
                    k_l: 4.0,
                    k_c: 7.0,
                    k_d: 15.0,
                    k_v: 2.0,
                    t_p,
                },
                bounds: Bounds { v_max: 0.35, u_max, r_coll: 0.12 },
            },
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_agents < 2 {
            return Err(invalid(format!("n_agents must be at least 2, got {}", self.n_agents)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.dt > self.controller.discretization.t_p {
            return Err(invalid("dt must not exceed the prediction horizon t_p"));
        }
        for (name, v) in [
            ("gather_duration", self.gather_duration),
            ("v_leader", self.leader_speed),
            ("s_curve_amplitude", self.s_curve_amplitude),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.s_curve_period.is_finite() && self.s_curve_period > 0.0) {
            return Err(invalid("s_curve_period must be positive"));
        }
        if !(self.spawn_radius.is_finite() && self.spawn_radius > 0.0) {
            return Err(invalid("spawn_radius must be positive"));
        }
        if (self.controller.discretization.u_max - self.controller.bounds.u_max).abs() > 0.0 {
            return Err(invalid("u_max differs between discretization and bounds"));
        }
        self.controller.validate()
    }

    /// Parses config text. Keys not present keep their default values.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| FlockError::Config {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|message| FlockError::Config { line: line_no, message })?;
        }
        cfg.validate().map_err(|e| match e {
            FlockError::Config { .. } => e,
            other => FlockError::Config { line: 0, message: other.to_string() },
        })?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("cannot parse `{value}` for key `{key}`"))
        }
        let c = &mut self.controller;
        match key {
            "k" => c.k = num(key, value)?,
            "a" => c.potentials.a = num(key, value)?,
            "b" => c.potentials.b = num(key, value)?,
            "k_a" => c.potentials.k_a = num(key, value)?,
            "k_r" => c.potentials.k_r = num(key, value)?,
            "n_a" => c.discretization.n_a = num(key, value)?,
            "delta_u" => c.discretization.delta_u = num(key, value)?,
            "dt" => self.dt = num(key, value)?,
            "t_p" => {
                let t: f64 = num(key, value)?;
                c.discretization.t_p = t;
                c.potentials.t_p = t;
            }
            "k_l" => c.potentials.k_l = num(key, value)?,
            "k_c" => c.potentials.k_c = num(key, value)?,
            "k_d" => c.potentials.k_d = num(key, value)?,
            "k_v" => c.potentials.k_v = num(key, value)?,
            "v_leader" => self.leader_speed = num(key, value)?,
            "alpha" => c.alpha = num(key, value)?,
            "r_coll" => c.bounds.r_coll = num(key, value)?,
            "u_max" => {
                let u: f64 = num(key, value)?;
                c.discretization.u_max = u;
                c.bounds.u_max = u;
            }
            "v_max" => c.bounds.v_max = num(key, value)?,
            "n_agents" => self.n_agents = num(key, value)?,
            "steps" => self.steps = num(key, value)?,
            "gather_duration" => self.gather_duration = num(key, value)?,
            "s_curve_amplitude" => self.s_curve_amplitude = num(key, value)?,
            "s_curve_period" => self.s_curve_period = num(key, value)?,
            "spawn_radius" => self.spawn_radius = num(key, value)?,
            "rng_seed" => self.rng_seed = num(key, value)?,
            "iterations" => c.iterations = num(key, value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Renders every key; `parse(to_config_string())` reproduces `self`.
    pub fn to_config_string(&self) -> String {
        let c = &self.controller;
        let values: Vec<(&str, String)> = vec![
            ("k", c.k.to_string()),
            ("a", c.potentials.a.to_string()),
            ("b", c.potentials.b.to_string()),
            ("k_a", c.potentials.k_a.to_string()),
            ("k_r", c.potentials.k_r.to_string()),
            ("n_a", c.discretization.n_a.to_string()),
            ("delta_u", c.discretization.delta_u.to_string()),
            ("dt", self.dt.to_string()),
            ("t_p", c.discretization.t_p.to_string()),
            ("k_l", c.potentials.k_l.to_string()),
            ("k_c", c.potentials.k_c.to_string()),
            ("k_d", c.potentials.k_d.to_string()),
            ("k_v", c.potentials.k_v.to_string()),
            ("v_leader", self.leader_speed.to_string()),
            ("alpha", c.alpha.to_string()),
            ("r_coll", c.bounds.r_coll.to_string()),
            ("u_max", c.bounds.u_max.to_string()),
            ("v_max", c.bounds.v_max.to_string()),
            ("n_agents", self.n_agents.to_string()),
            ("steps", self.steps.to_string()),
            ("gather_duration", self.gather_duration.to_string()),
            ("s_curve_amplitude", self.s_curve_amplitude.to_string()),
            ("s_curve_period", self.s_curve_period.to_string()),
            ("spawn_radius", self.spawn_radius.to_string()),
            ("rng_seed", self.rng_seed.to_string()),
            ("iterations", c.iterations.to_string()),
        ];
        let mut out = String::new();
        for (k, v) in values {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
