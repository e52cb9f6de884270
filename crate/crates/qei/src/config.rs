//! Run configuration: JSON schema, defaults and validation.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use qei_core::mode_catalog::{build_cylinder_catalog, build_sl_catalog, ModeCatalog, StaticGeometry};
use qei_core::states::StateSpec;
use qei_core::window::Bump;
use qei_core::C64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One metric profile on the spatial circle.
///
/// `"ultrastatic"` means the constant 1; a number is a constant; an array is
/// sampled on the catalog grid; `{mean, amplitude, harmonic}` is
/// `mean + amplitude·cos(2π·harmonic·x/L)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    Keyword(String),
    Constant(f64),
    Samples(Vec<f64>),
    Harmonic { mean: f64, amplitude: f64, harmonic: u32 },
}

impl Default for Profile {
    fn default() -> Self {
        Profile::Keyword("ultrastatic".into())
    }
}

impl Profile {
    fn is_unit(&self) -> bool {
        match self {
            Profile::Keyword(_) => true,
            Profile::Constant(c) => *c == 1.0,
            Profile::Samples(s) => s.iter().all(|&v| v == 1.0),
            Profile::Harmonic { mean, amplitude, .. } => *mean == 1.0 && *amplitude == 0.0,
        }
    }

    fn sample(&self, field: &str, circumference: f64, grid: usize) -> Result<Vec<f64>, CliError> {
        let dx = circumference / grid as f64;
        match self {
            Profile::Keyword(k) if k == "ultrastatic" => Ok(vec![1.0; grid]),
            Profile::Keyword(k) => Err(CliError::field(field, format!("unknown keyword {k:?}, expected \"ultrastatic\""))),
            Profile::Constant(c) => Ok(vec![*c; grid]),
            Profile::Samples(s) if s.len() == grid => Ok(s.clone()),
            Profile::Samples(s) => Err(CliError::field(
                field,
                format!("{} samples given but the catalog grid has G = {grid} points", s.len()),
            )),
            Profile::Harmonic { mean, amplitude, harmonic } => Ok((0..grid)
                .map(|i| mean + amplitude * (2.0 * PI * *harmonic as f64 * i as f64 * dx / circumference).cos())
                .collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(rename = "L")]
    pub circumference: f64,
    pub m: f64,
    #[serde(default)]
    pub g00: Profile,
    #[serde(default)]
    pub h: Profile,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            circumference: 2.0 * PI,
            m: 1.0,
            g00: Profile::default(),
            h: Profile::default(),
        }
    }
}

impl GeometryConfig {
    pub fn is_ultrastatic(&self) -> bool {
        self.g00.is_unit() && self.h.is_unit()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogConfig {
    #[serde(rename = "J")]
    pub modes: usize,
    /// Grid of the finite-difference backend (also used to tabulate modes).
    #[serde(rename = "G", default = "default_grid")]
    pub grid: usize,
}

fn default_grid() -> usize {
    512
}

impl Default for CatalogConfig {
    fn default() -> Self {
        Self { modes: 256, grid: 512 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    #[serde(rename = "N")]
    pub modes: usize,
    pub n_max: usize,
}

/// Test state in JSON. Complex numbers are `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateConfig {
    Ground,
    Kms { beta: f64 },
    Coherent { amplitudes: Vec<(usize, [f64; 2])> },
    Squeezed { modes: Vec<(usize, f64, f64)> },
    Particle { mode: usize },
    Pair { mode: usize, epsilon: [f64; 2] },
    Mixture { components: Vec<(f64, StateConfig)> },
}

impl StateConfig {
    pub fn to_spec(&self) -> StateSpec {
        let c = |z: [f64; 2]| C64::new(z[0], z[1]);
        match self {
            StateConfig::Ground => StateSpec::Ground,
            StateConfig::Kms { beta } => StateSpec::Kms { beta: *beta },
            StateConfig::Coherent { amplitudes } => StateSpec::Coherent {
                amplitudes: amplitudes.iter().map(|&(j, z)| (j, c(z))).collect(),
            },
            StateConfig::Squeezed { modes } => StateSpec::Squeezed { modes: modes.clone() },
            StateConfig::Particle { mode } => StateSpec::SingleParticle { mode: *mode },
            StateConfig::Pair { mode, epsilon } => StateSpec::SuperposedPair { mode: *mode, epsilon: c(*epsilon) },
            StateConfig::Mixture { components } => StateSpec::Mixture {
                components: components.iter().map(|(w, s)| (*w, s.to_spec())).collect(),
            },
        }
    }

    pub fn from_spec(spec: &StateSpec) -> Self {
        let z = |c: C64| [c.re, c.im];
        match spec {
            StateSpec::Ground => StateConfig::Ground,
            StateSpec::Kms { beta } => StateConfig::Kms { beta: *beta },
            StateSpec::Coherent { amplitudes } => StateConfig::Coherent {
                amplitudes: amplitudes.iter().map(|&(j, a)| (j, z(a))).collect(),
            },
            StateSpec::Squeezed { modes } => StateConfig::Squeezed { modes: modes.clone() },
            StateSpec::SingleParticle { mode } => StateConfig::Particle { mode: *mode },
            StateSpec::SuperposedPair { mode, epsilon } => StateConfig::Pair { mode: *mode, epsilon: z(*epsilon) },
            StateSpec::Mixture { components } => StateConfig::Mixture {
                components: components.iter().map(|(w, s)| (*w, Self::from_spec(s))).collect(),
            },
        }
    }

    /// Field-level check of mode indices against `J`.
    fn check_modes(&self, field: &str, j: usize) -> Result<(), CliError> {
        let check = |k: usize, what: &str| {
            if k < j {
                Ok(())
            } else {
                Err(CliError::field(
                    &format!("{field}.{what}"),
                    format!("mode index {k} is out of range for J = {j} (indices are 0-based)"),
                ))
            }
        };
        match self {
            StateConfig::Ground | StateConfig::Kms { .. } => Ok(()),
            StateConfig::Coherent { amplitudes } => {
                amplitudes.iter().enumerate().try_for_each(|(i, a)| check(a.0, &format!("amplitudes[{i}]")))
            }
            StateConfig::Squeezed { modes } => modes.iter().enumerate().try_for_each(|(i, m)| check(m.0, &format!("modes[{i}]"))),
            StateConfig::Particle { mode } | StateConfig::Pair { mode, .. } => check(*mode, "mode"),
            StateConfig::Mixture { components } => components
                .iter()
                .enumerate()
                .try_for_each(|(i, c)| c.1.check_modes(&format!("{field}.components[{i}]"), j)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub center: f64,
    /// Half-width of the support.
    pub width: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl WindowConfig {
    pub fn bump(&self) -> Result<Bump, qei_core::Error> {
        Bump::new(self.center, self.width, self.amplitude)
    }
}

/// The ten acceptance campaigns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Campaign {
    Foundation,
    QStep,
    StaticQwei,
    Quiescence,
    Bochner,
    GeneratorIdentity,
    Passivity,
    WorkIdentity,
    ProofChain,
    Microlocal,
}

impl Campaign {
    pub const ALL: [Campaign; 10] = [
        Campaign::Foundation,
        Campaign::QStep,
        Campaign::StaticQwei,
        Campaign::Quiescence,
        Campaign::Bochner,
        Campaign::GeneratorIdentity,
        Campaign::Passivity,
        Campaign::WorkIdentity,
        Campaign::ProofChain,
        Campaign::Microlocal,
    ];

    /// 1-based criterion number.
    pub fn number(self) -> usize {
        Self::ALL.iter().position(|&c| c == self).unwrap() + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Campaign::Foundation => "foundation",
            Campaign::QStep => "q_step",
            Campaign::StaticQwei => "static_qwei",
            Campaign::Quiescence => "quiescence",
            Campaign::Bochner => "bochner",
            Campaign::GeneratorIdentity => "generator_identity",
            Campaign::Passivity => "passivity",
            Campaign::WorkIdentity => "work_identity",
            Campaign::ProofChain => "proof_chain",
            Campaign::Microlocal => "microlocal",
        }
    }

    /// Runtime budget in seconds.
    pub fn budget_seconds(self) -> f64 {
        match self {
            Campaign::Foundation | Campaign::Quiescence => 30.0,
            Campaign::QStep => 10.0,
            Campaign::StaticQwei => 300.0,
            Campaign::Bochner | Campaign::ProofChain => 60.0,
            Campaign::GeneratorIdentity | Campaign::WorkIdentity => 120.0,
            Campaign::Passivity => 180.0,
            Campaign::Microlocal => 240.0,
        }
    }
}

/// Tolerances of the acceptance checks. All must be positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub symplectic_analytic: f64,
    pub symplectic_numeric: f64,
    pub weyl: f64,
    pub sl_frequency: f64,
    pub q_exact: f64,
    pub q_oracle: f64,
    pub tol_num_max: f64,
    pub gamma_final: f64,
    pub left_continuity: f64,
    pub growth_exponent: f64,
    pub generator: f64,
    pub passivity: f64,
    pub displacement: f64,
    pub work: f64,
    pub ground_work: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symplectic_analytic: 1e-12,
            symplectic_numeric: 1e-6,
            weyl: 1e-6,
            sl_frequency: 1e-4,
            q_exact: 1e-12,
            q_oracle: 1e-3,
            tol_num_max: 1e-6,
            gamma_final: 1e-8,
            left_continuity: 1e-9,
            growth_exponent: 0.2,
            generator: 1e-6,
            passivity: 1e-9,
            displacement: 1e-8,
            work: 1e-6,
            ground_work: 1e-9,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<(), CliError> {
        let all = [
            ("symplectic_analytic", self.symplectic_analytic),
            ("symplectic_numeric", self.symplectic_numeric),
            ("weyl", self.weyl),
            ("sl_frequency", self.sl_frequency),
            ("q_exact", self.q_exact),
            ("q_oracle", self.q_oracle),
            ("tol_num_max", self.tol_num_max),
            ("gamma_final", self.gamma_final),
            ("left_continuity", self.left_continuity),
            ("growth_exponent", self.growth_exponent),
            ("generator", self.generator),
            ("passivity", self.passivity),
            ("displacement", self.displacement),
            ("work", self.work),
            ("ground_work", self.ground_work),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::field(&format!("tolerances.{name}"), format!("must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Trial counts of the randomized campaigns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sizes {
    pub qwei_triples: usize,
    pub qwei_min_negative: usize,
    pub bochner_samples: usize,
    pub generator_trials: usize,
    pub passivity_words: usize,
    pub passivity_mixtures: usize,
    pub work_processes: usize,
    pub chain_words: usize,
    pub microlocal_min_matches: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Self {
            qwei_triples: 400,
            qwei_min_negative: 20,
            bochner_samples: 50,
            generator_trials: 100,
            passivity_words: 1000,
            passivity_mixtures: 20,
            work_processes: 50,
            chain_words: 200,
            microlocal_min_matches: 22,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for reports, tables and metadata.
    pub dir: Option<PathBuf>,
}

/// Complete run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub catalog: CatalogConfig,
    #[serde(default)]
    pub states: Vec<StateConfig>,
    #[serde(default)]
    pub windows: Vec<WindowConfig>,
    /// Spatial positions used by the `energy` and `qwei` tables.
    #[serde(default)]
    pub positions: Vec<f64>,
    #[serde(default = "default_truncation")]
    pub truncation: TruncationConfig,
    /// Truncation of the passivity campaigns; thermal states at `β = 0.5`
    /// need more levels than the reference truncation offers.
    #[serde(default = "default_passivity_truncation")]
    pub passivity_truncation: TruncationConfig,
    #[serde(default = "all_campaigns")]
    pub campaigns: Vec<Campaign>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sizes: Sizes,
    pub seed: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_truncation() -> TruncationConfig {
    TruncationConfig { modes: 2, n_max: 8 }
}

fn default_passivity_truncation() -> TruncationConfig {
    TruncationConfig { modes: 1, n_max: 20 }
}

fn all_campaigns() -> Vec<Campaign> {
    Campaign::ALL.to_vec()
}

/// Seed of the reference configuration.
pub const REFERENCE_SEED: u64 = 20_240_611;

impl RunConfig {
    /// Reference configuration: `L = 2π`, `m = 1`, `J = 256`, `N = 2`,
    /// `n_max = 8`, all campaigns.
    pub fn reference() -> Self {
        Self {
            geometry: GeometryConfig::default(),
            catalog: CatalogConfig::default(),
            states: vec![
                StateConfig::Ground,
                StateConfig::Kms { beta: 1.0 },
                StateConfig::Pair { mode: 1, epsilon: [0.2, 0.0] },
                StateConfig::Squeezed { modes: vec![(1, 0.4, 0.0)] },
                StateConfig::Coherent { amplitudes: vec![(0, [0.5, 0.0]), (2, [0.0, 0.3])] },
            ],
            windows: vec![
                WindowConfig { center: 0.0, width: 0.5, amplitude: 1.0 },
                WindowConfig { center: 0.0, width: 1.0, amplitude: 1.0 },
                WindowConfig { center: 0.0, width: 2.0, amplitude: 1.0 },
            ],
            positions: vec![0.0, 0.5 * PI, PI],
            truncation: default_truncation(),
            passivity_truncation: default_passivity_truncation(),
            campaigns: all_campaigns(),
            tolerances: Tolerances::default(),
            sizes: Sizes::default(),
            seed: REFERENCE_SEED,
            threads: None,
            output: OutputConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.geometry;
        if !(g.circumference > 0.0 && g.circumference.is_finite()) {
            return Err(CliError::field("geometry.L", format!("must be positive, got {}", g.circumference)));
        }
        if !(g.m > 0.0 && g.m.is_finite()) {
            return Err(CliError::field("geometry.m", format!("mass must be positive for a gapped spectrum, got {}", g.m)));
        }
        if self.catalog.modes == 0 {
            return Err(CliError::field("catalog.J", "need at least one mode".into()));
        }
        if self.catalog.grid < 8 {
            return Err(CliError::field("catalog.G", format!("grid of {} points is too coarse", self.catalog.grid)));
        }
        for (name, p) in [("geometry.g00", &g.g00), ("geometry.h", &g.h)] {
            let s = p.sample(name, g.circumference, self.catalog.grid)?;
            if let Some(v) = s.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(CliError::field(name, format!("metric samples must be positive, found {v}")));
            }
        }
        let j = self.catalog.modes;
        for (i, s) in self.states.iter().enumerate() {
            s.check_modes(&format!("states[{i}]"), j)?;
            s.to_spec()
                .validate(j)
                .map_err(|e| CliError::field(&format!("states[{i}]"), e.to_string()))?;
        }
        for (i, w) in self.windows.iter().enumerate() {
            w.bump().map_err(|e| CliError::field(&format!("windows[{i}]"), e.to_string()))?;
        }
        if let Some(x) = self.positions.iter().find(|x| !x.is_finite()) {
            return Err(CliError::field("positions", format!("non-finite position {x}")));
        }
        for (name, t) in [("truncation", self.truncation), ("passivity_truncation", self.passivity_truncation)] {
            if t.modes == 0 || t.n_max == 0 {
                return Err(CliError::field(name, "N and n_max must be at least 1".into()));
            }
            if t.modes > j {
                return Err(CliError::field(&format!("{name}.N"), format!("{} truncated modes exceed J = {j}", t.modes)));
            }
        }
        if let Some(0) = self.threads {
            return Err(CliError::field("threads", "must be at least 1".into()));
        }
        self.tolerances.validate()
    }

    /// Catalog described by the geometry block: analytic on the ultrastatic
    /// cylinder, finite-difference otherwise.
    pub fn build_catalog(&self) -> Result<ModeCatalog, qei_core::Error> {
        let g = &self.geometry;
        if g.is_ultrastatic() {
            build_cylinder_catalog(g.circumference, g.m, self.catalog.modes)
        } else {
            build_sl_catalog(&self.static_geometry()?, self.catalog.modes)
        }
    }

    /// Sampled geometry on the `G` grid.
    pub fn static_geometry(&self) -> Result<StaticGeometry, qei_core::Error> {
        let g = &self.geometry;
        let n = self.catalog.grid;
        let sample = |p: &Profile, name: &str| {
            p.sample(name, g.circumference, n)
                .map_err(|e| qei_core::Error::InvalidInput(e.to_string()))
        };
        StaticGeometry::new(g.circumference, g.m, sample(&g.g00, "geometry.g00")?, sample(&g.h, "geometry.h")?)
    }

    pub fn state_specs(&self) -> Vec<StateSpec> {
        self.states.iter().map(StateConfig::to_spec).collect()
    }

    pub fn bumps(&self) -> Vec<Bump> {
        self.windows.iter().map(|w| w.bump().expect("validated window")).collect()
    }
}
