//! Run configuration: a TOML file with one section per concern, or a run
//! manifest (`manifest.json`) whose embedded configuration is reused as is.
//!
//! Relative paths inside a configuration resolve against the directory of
//! the file that names them; manifests store them already absolute.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use turnpike_core::costs::{Horizon, TrackingTarget};
use turnpike_core::domain::extend::extend_by_zero;
use turnpike_core::domain::io::{mask_from_text, read_mask};
use turnpike_core::domain::{AdmissibleClass, Block, DomainMask, GridSpec};
use turnpike_core::optimizer::{AnnealSchedule, TemperatureScale};
use turnpike_core::pde::poisson::solve_poisson;
use turnpike_core::ScalarField;

use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_probe: Option<GammaSection>,
}

/// Observation region, admissible class and tracking data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub omega: Block,
    pub max_components: usize,
    pub source: FieldSpec,
    #[serde(default)]
    pub initial: FieldSpec,
    pub target: FieldSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Poisson,
    Heat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    pub equation: Equation,
    pub mask: MaskSpec,
    pub source: FieldSpec,
    #[serde(default)]
    pub initial: FieldSpec,
    /// Final time (heat only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Keep every `stride`-th heat state (heat only; 0 keeps the final state only).
    #[serde(default)]
    pub stride: usize,
}

/// Annealing parameters; the seed always comes from the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub initial_temperature: f64,
    pub cooling: f64,
    pub steps_per_temperature: usize,
    pub budget: usize,
    #[serde(default)]
    pub scale: TemperatureScale,
}

impl ScheduleSpec {
    pub fn with_seed(&self, seed: u64) -> AnnealSchedule {
        AnnealSchedule {
            initial_temperature: self.initial_temperature,
            cooling: self.cooling,
            steps_per_temperature: self.steps_per_temperature,
            budget: self.budget,
            seed,
            scale: self.scale,
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub horizon: Horizon,
    pub init: MaskSpec,
    pub schedule: ScheduleSpec,
    #[serde(default = "yes")]
    pub polish: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub horizons: Vec<f64>,
    pub restarts: usize,
    pub init: MaskSpec,
    pub steady: ScheduleSpec,
    pub transient: ScheduleSpec,
    #[serde(default = "yes")]
    pub polish: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSection {
    pub base: MaskSpec,
    /// Lower-left cell of the hole.
    pub anchor: [usize; 2],
    /// Side of the largest hole; the schedule shrinks it one cell at a time.
    pub max_hole: usize,
    /// Defaults to the problem's source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<FieldSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaskSpec {
    /// All non-frame cells minus the listed blocks.
    Interior {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        holes: Vec<Block>,
    },
    Block { block: Block },
    /// Mask file (`.txt` or `.json`).
    File { path: PathBuf },
    /// Rows of `0`/`1`, top row first.
    Inline { rows: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    #[default]
    Zero,
    Constant { value: f64 },
    Indicator { block: Block, value: f64 },
    /// `amplitude * sin(m π x / Lx) * sin(n π y / Ly)`.
    SinSin {
        amplitude: f64,
        #[serde(default = "unit_modes")]
        modes: [u32; 2],
        #[serde(default = "unit_extent")]
        extent: [f64; 2],
    },
    /// Zero extension of the Poisson solution on `mask` with the problem's
    /// source (targets only).
    Planted { mask: MaskSpec },
    /// Field file (`.csv` with `i,j,value` rows, or `.json`).
    File { path: PathBuf },
}

fn unit_modes() -> [u32; 2] {
    [1, 1]
}

fn unit_extent() -> [f64; 2] {
    [1.0, 1.0]
}

fn absolutize(path: &mut PathBuf, base: &Path) {
    if path.is_relative() {
        *path = base.join(&*path);
    }
}

impl MaskSpec {
    fn resolve_paths(&mut self, base: &Path) {
        if let MaskSpec::File { path } = self {
            absolutize(path, base);
        }
    }

    pub fn build(&self, grid: &GridSpec, key: &str) -> CliResult<DomainMask> {
        let mask = match self {
            MaskSpec::Interior { holes } => DomainMask::interior_without(*grid, holes),
            MaskSpec::Block { block } => DomainMask::block(*grid, *block),
            MaskSpec::File { path } => {
                let mask = read_mask(path).map_err(|e| CliError::config(key, e))?;
                if mask.grid() != grid {
                    return Err(CliError::Config(format!(
                        "{key}: mask file {} is on a {} grid, expected {}",
                        path.display(),
                        mask.grid().describe(),
                        grid.describe()
                    )));
                }
                return Ok(mask);
            }
            MaskSpec::Inline { rows } => {
                let mut text = format!("{} {} {:?}", grid.nx, grid.ny, grid.h);
                if grid.origin != [0.0, 0.0] {
                    text.push_str(&format!(" {:?} {:?}", grid.origin[0], grid.origin[1]));
                }
                for row in rows {
                    text.push('\n');
                    text.push_str(row);
                }
                mask_from_text(&text)
            }
        };
        mask.map_err(|e| CliError::config(key, e))
    }
}

impl FieldSpec {
    fn resolve_paths(&mut self, base: &Path) {
        match self {
            FieldSpec::File { path } => absolutize(path, base),
            FieldSpec::Planted { mask } => mask.resolve_paths(base),
            _ => {}
        }
    }

    /// Builds the field; `source` is needed only by planted targets.
    pub fn build(&self, grid: &GridSpec, source: Option<&ScalarField>, key: &str) -> CliResult<ScalarField> {
        let field = match self {
            FieldSpec::Zero => ScalarField::zeros(*grid),
            FieldSpec::Constant { value } => ScalarField::from_fn(*grid, |_, _| *value),
            FieldSpec::Indicator { block, value } => {
                if !block.fits(grid) {
                    return Err(CliError::Config(format!("{key}: block {block:?} exceeds the grid")));
                }
                ScalarField::indicator(*grid, *block, *value)
            }
            FieldSpec::SinSin {
                amplitude,
                modes,
                extent,
            } => {
                let (kx, ky) = (modes[0] as f64 * PI / extent[0], modes[1] as f64 * PI / extent[1]);
                ScalarField::from_fn(*grid, |x, y| amplitude * (kx * x).sin() * (ky * y).sin())
            }
            FieldSpec::Planted { mask } => {
                let source = source.ok_or_else(|| {
                    CliError::Config(format!("{key}: a planted field needs a source"))
                })?;
                let mask = mask.build(grid, &format!("{key}.mask"))?;
                let p = solve_poisson(&mask, source)?;
                extend_by_zero(&mask, &p)?
            }
            FieldSpec::File { path } => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{key}: cannot read {}: {e}", path.display())))?;
                let parsed = if path.extension().is_some_and(|e| e == "json") {
                    ScalarField::from_json(&text)
                } else {
                    ScalarField::from_csv(*grid, &text)
                };
                let field = parsed.map_err(|e| CliError::Config(format!("{key}: {}: {e}", path.display())))?;
                if field.grid != *grid {
                    return Err(CliError::Config(format!(
                        "{key}: field file {} does not match the grid",
                        path.display()
                    )));
                }
                field
            }
        };
        Ok(field)
    }
}

/// Everything an optimization run needs, built from `[grid]` and `[problem]`.
pub struct Problem {
    pub class: AdmissibleClass,
    pub target: TrackingTarget,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Reads a TOML configuration or a `manifest.json`; the returned seed is
    /// the one recorded in a manifest, if any.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        let mut config = if is_json {
            let manifest: Manifest = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let mut config = manifest.config;
            config.seed = Some(manifest.seed);
            config
        } else {
            Self::from_toml(&text).map_err(|e| match e {
                CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
                other => other,
            })?
        };
        let base = path
            .parent()
            .map(|p| if p.as_os_str().is_empty() { Path::new(".") } else { p })
            .unwrap_or(Path::new("."));
        let base = base
            .canonicalize()
            .map_err(|e| CliError::Config(format!("{}: {e}", base.display())))?;
        config.resolve_paths(&base);
        config.grid.validate().map_err(|e| CliError::config("grid", e))?;
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        if let Some(p) = &mut self.problem {
            p.source.resolve_paths(base);
            p.initial.resolve_paths(base);
            p.target.resolve_paths(base);
        }
        if let Some(s) = &mut self.solve {
            s.mask.resolve_paths(base);
            s.source.resolve_paths(base);
            s.initial.resolve_paths(base);
        }
        if let Some(o) = &mut self.optimize {
            o.init.resolve_paths(base);
        }
        if let Some(s) = &mut self.sweep {
            s.init.resolve_paths(base);
        }
        if let Some(g) = &mut self.gamma_probe {
            g.base.resolve_paths(base);
            if let Some(f) = &mut g.source {
                f.resolve_paths(base);
            }
        }
    }

    pub fn section<'a, T>(&self, value: &'a Option<T>, name: &str) -> CliResult<&'a T> {
        value
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("missing [{name}] section")))
    }

    pub fn problem(&self) -> CliResult<Problem> {
        let p = self.section(&self.problem, "problem")?;
        let grid = &self.grid;
        if !p.omega.fits(grid) {
            return Err(CliError::Config(format!("problem.omega: block {:?} exceeds the grid", p.omega)));
        }
        let omega = DomainMask::block(*grid, p.omega).map_err(|e| CliError::config("problem.omega", e))?;
        let class = AdmissibleClass::new(omega.clone(), p.max_components)
            .map_err(|e| CliError::config("problem.max_components", e))?;
        let f = p.source.build(grid, None, "problem.source")?;
        let y0 = p.initial.build(grid, None, "problem.initial")?;
        let z = p.target.build(grid, Some(&f), "problem.target")?;
        let target = TrackingTarget::new(z, omega, f, y0).map_err(|e| CliError::config("problem.target", e))?;
        Ok(Problem { class, target })
    }
}
