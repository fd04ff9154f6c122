//! JSON run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use steklov_core::design::{OuterOptions, PolarGrid};
use steklov_core::mesh::{build_unit_disk, build_unit_square, Mesh};
use steklov_core::modular::DesignDensity;
use steklov_core::state::SolverOptions;
use steklov_core::young::{grows_more_slowly, YoungFunction, YoungSpec};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Square { n: usize },
    Disk { level: usize },
}

impl DomainSpec {
    pub fn build(&self) -> Result<Mesh, CliError> {
        let mesh = match *self {
            DomainSpec::Square { n } => build_unit_square(n),
            DomainSpec::Disk { level } => build_unit_disk(level),
        };
        mesh.map_err(|e| CliError::Config(format!("domain: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    One(f64),
    Many(Vec<f64>),
}

impl AlphaSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            AlphaSpec::One(a) => vec![*a],
            AlphaSpec::Many(v) => v.clone(),
        }
    }
}

/// Density for the `solve` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    /// `φ ≡ c/|Ω|`.
    Uniform,
    /// Cells whose barycentre lies in the disk `|x − center| < radius`.
    Ball { center: [f64; 2], radius: f64 },
    /// Cells whose barycentre satisfies `normal · x > offset`.
    HalfPlane { normal: [f64; 2], offset: f64 },
    /// Per-cell CSV as written by `optimize`.
    File { path: PathBuf },
}

impl DensitySpec {
    pub fn build(&self, mesh: &Mesh, c: f64) -> Result<DesignDensity, CliError> {
        let cfg = |e: steklov_core::Error| CliError::Config(format!("density: {e}"));
        match self {
            DensitySpec::Uniform => DesignDensity::uniform(mesh, c / mesh.total_area()).map_err(cfg),
            DensitySpec::Ball { center, radius } => {
                let cells = mesh.locate_cells_by_predicate(|p| (p[0] - center[0]).hypot(p[1] - center[1]) < *radius);
                DesignDensity::indicator(mesh, &cells).map_err(cfg)
            }
            DensitySpec::HalfPlane { normal, offset } => {
                let cells = mesh.locate_cells_by_predicate(|p| normal[0] * p[0] + normal[1] * p[1] > *offset);
                DesignDensity::indicator(mesh, &cells).map_err(cfg)
            }
            DensitySpec::File { path } => {
                let file = std::fs::File::open(path).map_err(|e| CliError::Config(format!("density file {}: {e}", path.display())))?;
                DesignDensity::from_csv(mesh, std::io::BufReader::new(file)).map_err(cfg)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarSpec {
    pub rings: usize,
    pub angles: usize,
}

impl Default for PolarSpec {
    fn default() -> Self {
        PolarSpec { rings: 24, angles: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub young: YoungSpec,
    /// Growth of the boundary term; the bulk law is used when absent.
    #[serde(default)]
    pub boundary_young: Option<YoungSpec>,
    pub domain: DomainSpec,
    #[serde(default = "default_alpha")]
    pub alpha: AlphaSpec,
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub c_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub density: Option<DensitySpec>,
    /// Nodal or polar CSV for `symmetry`; an optimal pair is computed when absent.
    #[serde(default)]
    pub field: Option<PathBuf>,
    #[serde(default)]
    pub polar: PolarSpec,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub outer: OuterOptions,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_alpha() -> AlphaSpec {
    AlphaSpec::One(0.0)
}

fn default_samples() -> usize {
    1000
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Validated configuration with the built objects.
pub struct Resolved {
    pub config: RunConfig,
    pub young: YoungFunction,
    pub boundary: YoungFunction,
    pub mesh: Mesh,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Only the growth laws, for commands that need no mesh.
    pub fn laws(&self) -> Result<(YoungFunction, YoungFunction), CliError> {
        let young = self.young.build().map_err(|e| CliError::Config(format!("young: {e}")))?;
        let boundary = match &self.boundary_young {
            None => young.clone(),
            Some(spec) => {
                let h = spec.build().map_err(|e| CliError::Config(format!("boundary_young: {e}")))?;
                if !grows_more_slowly(&h, &young) {
                    return Err(CliError::Config(format!("boundary law {} does not grow more slowly than {}", h.describe(), young.describe())));
                }
                h
            }
        };
        Ok((young, boundary))
    }

    pub fn resolve(self) -> Result<Resolved, CliError> {
        let (young, boundary) = self.laws()?;
        self.solver.validate().map_err(|e| CliError::Config(format!("solver: {e}")))?;
        let mesh = self.domain.build()?;
        let area = mesh.total_area();
        if !(self.c >= 0.0 && self.c <= area) {
            return Err(CliError::Config(format!("c = {} outside [0, {area}]", self.c)));
        }
        if let Some(grid) = &self.c_grid {
            if grid.iter().any(|c| !(*c > 0.0 && *c < area)) {
                return Err(CliError::Config(format!("c_grid entries must lie in (0, {area})")));
            }
        }
        if self.alpha.values().iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
            return Err(CliError::Config("alpha values must be finite and nonnegative".into()));
        }
        PolarGrid::new(self.polar.rings, self.polar.angles).map_err(|e| CliError::Config(format!("polar: {e}")))?;
        Ok(Resolved { config: self, young, boundary, mesh })
    }
}
