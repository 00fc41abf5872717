use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use hypermin::stability::{Domain, Grid};
use hypermin::{Model, SurfaceKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceArg {
    Helicoid,
    CatSpherical,
    CatHyperbolic,
    CatParabolic,
    CatBall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Hyperboloid,
    Ball,
    UpperHalf,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Hyperboloid => Model::Hyperboloid,
            ModelArg::Ball => Model::Ball,
            ModelArg::UpperHalf => Model::UpperHalf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Obj,
    Csv,
    Svg,
    Json,
}

/// Test hook for `check`: corrupts one transform so that its check fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    RoundTrip,
}

fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

fn parse_domain(s: &str) -> Result<[f64; 4], String> {
    parse_list::<4>(s)
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    parse_list::<2>(s)
}

fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let v = parse_list::<2>(s)?;
    if v.iter().any(|x| *x < 1.0 || x.fract() != 0.0) {
        return Err(format!("grid sizes must be positive integers, got {s}"));
    }
    Ok([v[0] as usize, v[1] as usize])
}

/// Options shared by every subcommand. Each is optional so that the
/// config file can fill in what the command line leaves out.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Common {
    #[arg(long, global = true, value_enum)]
    pub surface: Option<SurfaceArg>,
    /// Helicoid pitch.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Spherical or hyperbolic catenoid parameter.
    #[arg(long, global = true)]
    pub atilde: Option<f64>,
    /// Ball-model catenoid parameter (distance of the waist to the axis).
    #[arg(long, global = true)]
    pub abar: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelArg>,
    /// Parameter domain `u0,u1,v0,v1`.
    #[arg(long, global = true, value_parser = parse_domain, allow_hyphen_values = true)]
    pub domain: Option<[f64; 4]>,
    /// Node counts `Nu,Nv`.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<[usize; 2]>,
    /// Mesh spacing for the stability commands (overridden by --grid).
    #[arg(long, global = true)]
    pub spacing: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Flat JSON file with defaults for any of these options.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Pitches for `sweep` and `conjugacy`.
    #[arg(long = "a-values", global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub a_values: Option<Vec<f64>>,
    /// Half-widths of the square schedule.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ks: Option<Vec<f64>>,
    /// Bisection bracket `lo,hi` for `critical`.
    #[arg(long, global = true, value_parser = parse_pair)]
    pub bracket: Option<[f64; 2]>,
    /// Additional SVG plot written next to the CSV.
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,
    /// Also report Richardson-extrapolated eigenvalues.
    #[arg(long, global = true)]
    #[serde(default)]
    pub richardson: bool,
    /// Include constant-v rulings as polylines in OBJ output.
    #[arg(long, global = true)]
    #[serde(default)]
    pub rulings: bool,
    #[arg(long, global = true, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

impl Common {
    /// Fill every unset option from `base`.
    fn or(self, base: Common) -> Common {
        Common {
            surface: self.surface.or(base.surface),
            a: self.a.or(base.a),
            atilde: self.atilde.or(base.atilde),
            abar: self.abar.or(base.abar),
            model: self.model.or(base.model),
            domain: self.domain.or(base.domain),
            grid: self.grid.or(base.grid),
            spacing: self.spacing.or(base.spacing),
            tol: self.tol.or(base.tol),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            config: self.config,
            a_values: self.a_values.or(base.a_values),
            ks: self.ks.or(base.ks),
            bracket: self.bracket.or(base.bracket),
            plot: self.plot.or(base.plot),
            richardson: self.richardson || base.richardson,
            rulings: self.rulings || base.rulings,
            inject_fault: self.inject_fault.or(base.inject_fault),
        }
    }
}

/// Fully resolved settings: flags over config file over defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub opts: Common,
}

fn load_file(path: &Path) -> Result<Common> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

impl RunConfig {
    pub fn resolve(flags: Common) -> Result<Self> {
        let opts = match &flags.config {
            Some(path) => {
                let file = load_file(path)?;
                flags.or(file)
            }
            None => flags,
        };
        Ok(RunConfig { opts })
    }

    pub fn surface(&self) -> Result<SurfaceKind> {
        let o = &self.opts;
        let need = |v: Option<f64>, name: &str| v.with_context(|| format!("--{name} is required for this surface"));
        Ok(match o.surface.unwrap_or(SurfaceArg::Helicoid) {
            SurfaceArg::Helicoid => SurfaceKind::Helicoid { a: need(o.a, "a")? },
            SurfaceArg::CatSpherical => SurfaceKind::SphericalCatenoid { a_tilde: need(o.atilde, "atilde")? },
            SurfaceArg::CatHyperbolic => SurfaceKind::HyperbolicCatenoid { a_tilde: need(o.atilde, "atilde")? },
            SurfaceArg::CatParabolic => SurfaceKind::ParabolicCatenoid,
            SurfaceArg::CatBall => SurfaceKind::BallCatenoid { a_bar: need(o.abar, "abar")? },
        })
    }

    pub fn model(&self) -> Model {
        self.opts.model.unwrap_or(ModelArg::Ball).into()
    }

    pub fn domain_or(&self, default: [f64; 4]) -> Result<Domain> {
        let [u0, u1, v0, v1] = self.opts.domain.unwrap_or(default);
        Ok(Domain::new(u0, u1, v0, v1)?)
    }

    pub fn grid(&self) -> Option<Grid> {
        self.opts.grid.map(|[nu, nv]| Grid { nu, nv })
    }

    pub fn spacing_or(&self, default: f64) -> Result<f64> {
        let h = self.opts.spacing.unwrap_or(default);
        if !(h > 0.0 && h.is_finite()) {
            bail!("--spacing must be positive, got {h}");
        }
        Ok(h)
    }

    pub fn tol_or(&self, default: f64) -> Result<f64> {
        let t = self.opts.tol.unwrap_or(default);
        if !(t > 0.0 && t.is_finite()) {
            bail!("--tol must be positive, got {t}");
        }
        Ok(t)
    }

    pub fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.opts.format.unwrap_or(default);
        if !allowed.contains(&f) {
            bail!("format {f:?} is not available for this command (choose from {allowed:?})");
        }
        Ok(f)
    }
}
