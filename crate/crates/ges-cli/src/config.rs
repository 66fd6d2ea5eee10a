//! Plain-text `key = value` experiment configuration. One file fully
//! determines a run; CLI flags override file keys. Every key is listed in
//! `--help` (see [`KNOWN_KEYS`]).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use ges_core::{
    GapFactor, GapSpec, MassPoint, MassSpringSpec, MlpSpec, Optimizer, OptimizerKind,
    PendulumSpec, QuadraticSpec, Spring,
};

use crate::CliError;

/// All accepted configuration keys with one-line documentation.
pub const KNOWN_KEYS: &[(&str, &str)] = &[
    ("experiment", "pendulum-gap | mass-spring-naive | synthetic-quadratic"),
    ("algorithm", "guided-es | vanilla-es | cma-es | first-order"),
    ("seeds", "comma-separated run seeds, e.g. 1,2,3,4,5"),
    ("out", "output directory for run artifacts"),
    ("run.budget", "episode budget per seed (objective evaluations)"),
    ("ges.alpha", "isotropic/subspace trade-off in [0,1]"),
    ("ges.sigma", "perturbation scale > 0"),
    ("ges.beta", "estimator scale > 0"),
    ("ges.pop", "antithetic pairs per iteration (costs 2*pop episodes)"),
    ("ges.k", "guiding subspace capacity"),
    ("ges.t_sim", "inner simulator descent steps per outer iteration"),
    ("ges.fitness_shaping", "rank-shape losses in the estimator (default false)"),
    ("opt.kind", "outer optimizer: sgd | adam | fromage"),
    ("opt.lr", "outer learning rate"),
    ("opt.normalize_grad", "normalize gradients before sgd/adam updates"),
    ("opt_sim.kind", "inner (simulator descent) optimizer kind"),
    ("opt_sim.lr", "inner learning rate"),
    ("cma.sigma0", "initial CMA-ES step size"),
    ("cma.lambda", "CMA-ES population (default 4 + floor(3 ln n))"),
    ("policy.hidden", "hidden units of the tanh policy"),
    ("pendulum.m", "bob mass, kg"),
    ("pendulum.l", "arm length, m"),
    ("pendulum.j", "rotational inertia, kg m^2"),
    ("pendulum.g", "gravity, m/s^2"),
    ("pendulum.b", "viscous damping"),
    ("pendulum.u_max", "torque limit, N m"),
    ("pendulum.dt", "integration step, s"),
    ("pendulum.horizon", "steps per episode"),
    ("pendulum.obs_history", "past (angle, velocity) pairs fed to the policy"),
    ("gap.m", "mass multiplier for the perturbed system: x or [lo,hi]"),
    ("gap.l", "length multiplier: x or [lo,hi]"),
    ("gap.b", "damping multiplier: x or [lo,hi]"),
    ("gap.seed", "seed for sampled gap ranges (default 0)"),
    ("ms.masses", "JSON [[x,y,mass],...]; rest lengths derive from positions"),
    ("ms.springs", "JSON [[i,j,stiffness,actuated01],...]"),
    ("ms.amplitude", "rest-length modulation amplitude in [0,1)"),
    ("ms.damping", "velocity damping rate, 1/s"),
    ("ms.gravity", "gravity, m/s^2"),
    ("ms.ground_y", "ground height, m"),
    ("ms.dt", "integration step, s"),
    ("ms.horizon", "steps per episode"),
    ("ms.robot_file", "key=value file with ms.* keys describing the robot"),
    ("quad.dim", "synthetic quadratic dimension"),
    ("quad.cond", "synthetic quadratic condition number"),
    ("quad.rot_deg", "surrogate rotation angle, degrees"),
    ("sweep.cap", "maximum grid size the sweep will accept (default 256)"),
];

fn known_key(key: &str) -> bool {
    KNOWN_KEYS.iter().any(|(k, _)| *k == key)
}

#[derive(Debug, Clone)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
    /// key -> "file:line" or "cli" for diagnostics.
    provenance: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn empty() -> Self {
        RawConfig {
            entries: BTreeMap::new(),
            provenance: BTreeMap::new(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text, &path.display().to_string())
    }

    pub fn from_text(text: &str, source: &str) -> Result<Self, CliError> {
        let mut cfg = RawConfig::empty();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = strip_comment(raw_line).trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!(
                    "{source}:{}: expected `key = value`, got `{raw_line}`",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if !known_key(key) {
                return Err(CliError::config(format!(
                    "{source}:{}: unknown key `{key}` (see --help for the key list)",
                    lineno + 1
                )));
            }
            cfg.set(key, value, &format!("{source}:{}", lineno + 1));
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str, provenance: &str) {
        self.entries.insert(key.to_string(), value.to_string());
        self.provenance
            .insert(key.to_string(), provenance.to_string());
    }

    /// Apply a `key=value` override (CLI), validating the key.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), CliError> {
        let Some((key, value)) = spec.split_once('=') else {
            return Err(CliError::config(format!(
                "--set expects key=value, got `{spec}`"
            )));
        };
        let key = key.trim();
        if !known_key(key) {
            return Err(CliError::config(format!(
                "--set: unknown key `{key}` (see --help for the key list)"
            )));
        }
        self.set(key, value.trim(), "cli");
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    fn where_set(&self, key: &str) -> String {
        self.provenance
            .get(key)
            .cloned()
            .unwrap_or_else(|| "default".to_string())
    }

    fn bad(&self, key: &str, what: &str) -> CliError {
        CliError::config(format!(
            "key `{key}` ({}): {what}",
            self.where_set(key)
        ))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| self.bad(key, &format!("`{v}` is not a number"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| self.bad(key, &format!("`{v}` is not a non-negative integer"))),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<u64>()
                .map_err(|_| self.bad(key, &format!("`{v}` is not a non-negative integer"))),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => Err(self.bad(key, &format!("`{v}` is not true/false"))),
        }
    }

    pub fn seeds(&self) -> Result<Vec<u64>, CliError> {
        let raw = self.get("seeds").unwrap_or("1,2,3,4,5");
        let mut seeds = Vec::new();
        for part in raw.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            seeds.push(part.parse::<u64>().map_err(|_| {
                self.bad("seeds", &format!("`{part}` is not a non-negative integer"))
            })?);
        }
        if seeds.is_empty() {
            return Err(self.bad("seeds", "the seed list is empty"));
        }
        let mut unique = seeds.clone();
        unique.sort_unstable();
        unique.dedup();
        if unique.len() != seeds.len() {
            return Err(self.bad("seeds", "seeds must be distinct"));
        }
        Ok(seeds)
    }

    fn gap_factor(&self, key: &str, default: f64) -> Result<GapFactor, CliError> {
        match self.get(key) {
            None => Ok(GapFactor::fixed(default)),
            Some(v) if v.starts_with('[') => {
                let pair: [f64; 2] = serde_json::from_str(v)
                    .map_err(|e| self.bad(key, &format!("`{v}` is not [lo,hi]: {e}")))?;
                Ok(GapFactor {
                    lo: pair[0],
                    hi: pair[1],
                })
            }
            Some(v) => {
                let x = v
                    .parse::<f64>()
                    .map_err(|_| self.bad(key, &format!("`{v}` is not a multiplier")))?;
                Ok(GapFactor::fixed(x))
            }
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(idx) if line[..idx].trim().is_empty() => "",
        Some(idx)
            if line[..idx]
                .chars()
                .last()
                .map(|c| c.is_whitespace())
                .unwrap_or(false) =>
        {
            &line[..idx]
        }
        _ => line,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    PendulumGap,
    MassSpringNaive,
    SyntheticQuadratic,
}

impl Experiment {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "pendulum-gap" => Ok(Experiment::PendulumGap),
            "mass-spring-naive" => Ok(Experiment::MassSpringNaive),
            "synthetic-quadratic" => Ok(Experiment::SyntheticQuadratic),
            other => Err(CliError::config(format!(
                "unknown experiment `{other}` (pendulum-gap | mass-spring-naive | synthetic-quadratic)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::PendulumGap => "pendulum-gap",
            Experiment::MassSpringNaive => "mass-spring-naive",
            Experiment::SyntheticQuadratic => "synthetic-quadratic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    GuidedEs,
    VanillaEs,
    CmaEs,
    FirstOrder,
}

impl Algorithm {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "guided-es" => Ok(Algorithm::GuidedEs),
            "vanilla-es" => Ok(Algorithm::VanillaEs),
            "cma-es" => Ok(Algorithm::CmaEs),
            "first-order" => Ok(Algorithm::FirstOrder),
            other => Err(CliError::config(format!(
                "unknown algorithm `{other}` (guided-es | vanilla-es | cma-es | first-order)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::GuidedEs => "guided-es",
            Algorithm::VanillaEs => "vanilla-es",
            Algorithm::CmaEs => "cma-es",
            Algorithm::FirstOrder => "first-order",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OptConfig {
    pub kind: OptimizerKind,
    pub lr: f64,
    pub normalize_grad: bool,
}

impl OptConfig {
    pub fn build(&self, n: usize, groups: Vec<Range<usize>>) -> Result<Optimizer, CliError> {
        let opt = match self.kind {
            OptimizerKind::Sgd => Optimizer::sgd(self.lr, n),
            OptimizerKind::Adam => Optimizer::adam(self.lr, n),
            OptimizerKind::Fromage => {
                Optimizer::fromage(self.lr, n, groups).map_err(CliError::from_core)?
            }
        };
        Ok(opt.with_normalize_grad(self.normalize_grad))
    }
}

fn parse_opt_kind(raw: &str) -> Result<OptimizerKind, CliError> {
    match raw {
        "sgd" => Ok(OptimizerKind::Sgd),
        "adam" => Ok(OptimizerKind::Adam),
        "fromage" => Ok(OptimizerKind::Fromage),
        other => Err(CliError::config(format!(
            "unknown optimizer kind `{other}` (sgd | adam | fromage)"
        ))),
    }
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub algorithm: Algorithm,
    pub seeds: Vec<u64>,
    pub budget: u64,
    pub output_dir: PathBuf,
    pub ges: ges_core::GesConfig,
    pub t_sim: usize,
    pub opt: OptConfig,
    pub opt_sim: OptConfig,
    pub cma_sigma0: f64,
    pub cma_lambda: Option<usize>,
    pub policy_hidden: usize,
    pub pendulum: PendulumSpec,
    pub gap: GapSpec,
    pub gap_seed: u64,
    pub mass_spring: MassSpringSpec,
    pub quadratic: QuadraticSpec,
    pub quad_rot_deg: f64,
    /// The resolved raw key/value view echoed into the manifest.
    pub echo: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn resolve(raw: &RawConfig) -> Result<Self, CliError> {
        let experiment = Experiment::parse(raw.get("experiment").ok_or_else(|| {
            CliError::config("missing key `experiment` (pendulum-gap | mass-spring-naive | synthetic-quadratic)")
        })?)?;
        let algorithm = Algorithm::parse(raw.get("algorithm").unwrap_or("guided-es"))?;
        let seeds = raw.seeds()?;
        let budget = raw.u64_or("run.budget", 8000)?;
        let output_dir = PathBuf::from(raw.get("out").unwrap_or("runs/out"));

        let ges = ges_core::GesConfig {
            alpha: raw.f64_or("ges.alpha", 0.5)?,
            sigma: raw.f64_or("ges.sigma", 0.1)?,
            beta: raw.f64_or("ges.beta", 2.0)?,
            population: raw.usize_or("ges.pop", 8)?,
            k: raw.usize_or("ges.k", 1)?,
            fitness_shaping: raw.bool_or("ges.fitness_shaping", false)?,
        };
        ges.validate().map_err(CliError::from_core)?;
        let t_sim = raw.usize_or("ges.t_sim", 10)?;

        let opt = OptConfig {
            kind: parse_opt_kind(raw.get("opt.kind").unwrap_or("fromage"))?,
            lr: raw.f64_or("opt.lr", 0.1)?,
            normalize_grad: raw.bool_or("opt.normalize_grad", false)?,
        };
        let opt_sim = OptConfig {
            kind: parse_opt_kind(raw.get("opt_sim.kind").unwrap_or("fromage"))?,
            lr: raw.f64_or("opt_sim.lr", 0.1)?,
            normalize_grad: false,
        };

        let default_pendulum = PendulumSpec {
            horizon: 800,
            ..PendulumSpec::default()
        };
        let pendulum = PendulumSpec {
            m: raw.f64_or("pendulum.m", default_pendulum.m)?,
            l: raw.f64_or("pendulum.l", default_pendulum.l)?,
            j: raw.f64_or("pendulum.j", default_pendulum.j)?,
            g: raw.f64_or("pendulum.g", default_pendulum.g)?,
            b: raw.f64_or("pendulum.b", default_pendulum.b)?,
            u_max: raw.f64_or("pendulum.u_max", default_pendulum.u_max)?,
            dt: raw.f64_or("pendulum.dt", default_pendulum.dt)?,
            horizon: raw.usize_or("pendulum.horizon", default_pendulum.horizon)?,
            obs_history: raw.usize_or("pendulum.obs_history", default_pendulum.obs_history)?,
        };
        pendulum.validate().map_err(CliError::from_core)?;

        let gap = GapSpec {
            m: raw.gap_factor("gap.m", 1.15)?,
            l: raw.gap_factor("gap.l", 1.0)?,
            b: raw.gap_factor("gap.b", 2.0)?,
        };
        let gap_seed = raw.u64_or("gap.seed", 0)?;

        let mass_spring = resolve_mass_spring(raw)?;
        mass_spring.validate().map_err(CliError::from_core)?;

        let quadratic = QuadraticSpec {
            dim: raw.usize_or("quad.dim", 20)?,
            cond: raw.f64_or("quad.cond", 10.0)?,
        };
        let quad_rot_deg = raw.f64_or("quad.rot_deg", 0.0)?;

        let policy_hidden = raw.usize_or("policy.hidden", 16)?;
        if policy_hidden == 0 {
            return Err(CliError::config("policy.hidden must be >= 1"));
        }

        let mut echo = raw.entries().clone();
        echo.insert("experiment".into(), experiment.name().into());
        echo.insert("algorithm".into(), algorithm.name().into());
        echo.insert(
            "seeds".into(),
            seeds
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        echo.insert("run.budget".into(), budget.to_string());
        echo.insert("out".into(), output_dir.display().to_string());

        Ok(ExperimentConfig {
            experiment,
            algorithm,
            seeds,
            budget,
            output_dir,
            ges,
            t_sim,
            opt,
            opt_sim,
            cma_sigma0: raw.f64_or("cma.sigma0", 0.3)?,
            cma_lambda: match raw.get("cma.lambda") {
                None => None,
                Some(_) => Some(raw.usize_or("cma.lambda", 0)?),
            },
            policy_hidden,
            pendulum,
            gap,
            gap_seed,
            mass_spring,
            quadratic,
            quad_rot_deg,
            echo,
        })
    }

    /// Policy architecture for the chosen experiment.
    pub fn policy(&self) -> Option<MlpSpec> {
        match self.experiment {
            Experiment::PendulumGap => Some(MlpSpec::tanh_policy(
                self.pendulum.obs_dim(),
                self.policy_hidden,
                1,
            )),
            Experiment::MassSpringNaive => Some(MlpSpec::tanh_policy(
                self.mass_spring.control_features,
                self.policy_hidden,
                self.mass_spring.actuated_count(),
            )),
            Experiment::SyntheticQuadratic => None,
        }
    }

    /// Milliseconds of system time per episode, used for the deterministic
    /// wall_ms column.
    pub fn episode_ms(&self) -> f64 {
        match self.experiment {
            Experiment::PendulumGap => self.pendulum.dt * self.pendulum.horizon as f64 * 1000.0,
            Experiment::MassSpringNaive => {
                self.mass_spring.dt * self.mass_spring.horizon as f64 * 1000.0
            }
            Experiment::SyntheticQuadratic => 0.0,
        }
    }
}

fn resolve_mass_spring(raw: &RawConfig) -> Result<MassSpringSpec, CliError> {
    // Robot file first, inline ms.* keys override.
    let mut merged = RawConfig::empty();
    if let Some(path) = raw.get("ms.robot_file") {
        let file_cfg = RawConfig::from_file(Path::new(path))?;
        for (k, v) in file_cfg.entries() {
            if !k.starts_with("ms.") {
                return Err(CliError::config(format!(
                    "robot file {path}: key `{k}` is not an ms.* key"
                )));
            }
            merged.set(k, v, &format!("robot file {path}"));
        }
    }
    for (k, v) in raw.entries() {
        if k.starts_with("ms.") && k != "ms.robot_file" {
            merged.set(k, v, &raw.where_set(k));
        }
    }
    let raw = &merged;

    let mut spec = MassSpringSpec::default();
    if let Some(v) = raw.get("ms.masses") {
        let parsed: Vec<[f64; 3]> = serde_json::from_str(v)
            .map_err(|e| CliError::config(format!("ms.masses: expected [[x,y,mass],...]: {e}")))?;
        spec.masses = parsed
            .iter()
            .map(|[x, y, m]| MassPoint {
                pos: [*x, *y],
                mass: *m,
            })
            .collect();
    }
    if let Some(v) = raw.get("ms.springs") {
        let parsed: Vec<[f64; 4]> = serde_json::from_str(v).map_err(|e| {
            CliError::config(format!(
                "ms.springs: expected [[i,j,stiffness,actuated01],...]: {e}"
            ))
        })?;
        spec.springs = parsed
            .iter()
            .map(|[i, j, k, act]| Spring {
                i: *i as usize,
                j: *j as usize,
                rest_length: 1.0,
                stiffness: *k,
                actuated: *act != 0.0,
            })
            .collect();
        // Rest lengths are pinned to the initial geometry.
        spec.reset_rest_lengths();
    }
    spec.actuation_amplitude = raw.f64_or("ms.amplitude", spec.actuation_amplitude)?;
    spec.damping_vel = raw.f64_or("ms.damping", spec.damping_vel)?;
    spec.gravity = raw.f64_or("ms.gravity", spec.gravity)?;
    spec.ground_y = raw.f64_or("ms.ground_y", spec.ground_y)?;
    spec.dt = raw.f64_or("ms.dt", spec.dt)?;
    spec.horizon = raw.usize_or("ms.horizon", spec.horizon)?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_minimal_config() {
        let raw = RawConfig::from_text(
            "# comment\nexperiment = pendulum-gap\nseeds = 1,2\nrun.budget = 100\n",
            "test",
        )
        .unwrap();
        let cfg = ExperimentConfig::resolve(&raw).unwrap();
        assert_eq!(cfg.experiment, Experiment::PendulumGap);
        assert_eq!(cfg.seeds, vec![1, 2]);
        assert_eq!(cfg.budget, 100);
    }

    #[test]
    fn unknown_keys_are_rejected_with_line_numbers() {
        let err = RawConfig::from_text("experiment = pendulum-gap\nbogus.key = 3\n", "cfg")
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cfg:2"), "{msg}");
        assert!(msg.contains("bogus.key"), "{msg}");
    }

    #[test]
    fn malformed_lines_are_rejected() {
        let err = RawConfig::from_text("experiment pendulum-gap\n", "cfg").unwrap_err();
        assert!(err.to_string().contains("cfg:1"));
    }

    #[test]
    fn duplicate_seeds_are_rejected() {
        let raw =
            RawConfig::from_text("experiment = pendulum-gap\nseeds = 1,1\n", "cfg").unwrap();
        assert!(ExperimentConfig::resolve(&raw).is_err());
    }

    #[test]
    fn overrides_win_over_file_keys() {
        let mut raw = RawConfig::from_text(
            "experiment = pendulum-gap\nges.alpha = 0.5\n",
            "cfg",
        )
        .unwrap();
        raw.apply_override("ges.alpha=0.25").unwrap();
        let cfg = ExperimentConfig::resolve(&raw).unwrap();
        assert_eq!(cfg.ges.alpha, 0.25);
    }

    #[test]
    fn inline_comments_are_stripped() {
        let raw = RawConfig::from_text(
            "experiment = pendulum-gap # the transfer task\n",
            "cfg",
        )
        .unwrap();
        assert_eq!(raw.get("experiment"), Some("pendulum-gap"));
    }

    #[test]
    fn custom_robot_geometry_resolves_rest_lengths() {
        let raw = RawConfig::from_text(
            concat!(
                "experiment = mass-spring-naive\n",
                "ms.masses = [[0.0,0.0,0.1],[0.2,0.0,0.1]]\n",
                "ms.springs = [[0,1,400,1]]\n",
            ),
            "cfg",
        )
        .unwrap();
        let cfg = ExperimentConfig::resolve(&raw).unwrap();
        assert_eq!(cfg.mass_spring.masses.len(), 2);
        assert!((cfg.mass_spring.springs[0].rest_length - 0.2).abs() < 1e-12);
        assert!(cfg.mass_spring.springs[0].actuated);
    }

    #[test]
    fn gap_factor_accepts_scalar_and_range() {
        let raw = RawConfig::from_text(
            "experiment = pendulum-gap\ngap.m = 1.3\ngap.b = [1.5, 1.8]\n",
            "cfg",
        )
        .unwrap();
        let cfg = ExperimentConfig::resolve(&raw).unwrap();
        assert_eq!(cfg.gap.m, GapFactor::fixed(1.3));
        assert_eq!(cfg.gap.b, GapFactor { lo: 1.5, hi: 1.8 });
    }
}
