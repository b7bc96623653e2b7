use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use rotabouss::{PhysicalParams, SpaceFlag};

#[derive(Debug, Parser)]
#[command(name = "rotabouss", version, about = "Onset, reduction and simulation of rotating stratified convection")]
pub struct Cli {
    /// Worker threads for parallel scans (overrides ROTABOUSS_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Eigenvalues of every lattice index in a truncation.
    Spectrum(SpectrumArgs),
    /// Critical Rayleigh numbers, or the leading growth rate along a Rayleigh scan.
    Critical(CriticalArgs),
    /// Critical Rayleigh number against Rossby number.
    Asymptotics(AsymptoticsArgs),
    /// Reduced amplitude model near the steady onset.
    Reduce(ReduceArgs),
    /// Nonlinear time integration seeded by an eigenmode.
    Simulate(SimulateArgs),
    /// Acceptance checks with a pass/fail table.
    Verify(VerifyArgs),
    /// Re-run the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Critical(_) => "critical",
            Command::Asymptotics(_) => "asymptotics",
            Command::Reduce(_) => "reduce",
            Command::Simulate(_) => "simulate",
            Command::Verify(_) => "verify",
            Command::Replay(_) => "replay",
        }
    }

    pub fn out_mut(&mut self) -> Option<&mut Option<PathBuf>> {
        match self {
            Command::Spectrum(a) => Some(&mut a.out),
            Command::Critical(a) => Some(&mut a.out),
            Command::Asymptotics(a) => Some(&mut a.out),
            Command::Reduce(a) => Some(&mut a.out),
            Command::Simulate(a) => Some(&mut a.out),
            Command::Verify(a) => Some(&mut a.out),
            Command::Replay(_) => None,
        }
    }
}

/// Physical parameters from `--config` and/or individual flags; flags win.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ParamArgs {
    /// JSON file with sigma, ro, rayleigh, alpha1, alpha2.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub ro: Option<f64>,
    #[arg(long)]
    pub rayleigh: Option<f64>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
}

impl ParamArgs {
    /// Merges the config file with the flags. Missing `rayleigh` defaults to 0,
    /// missing `ro` to `ro_default` when one is given.
    pub fn resolve(&self, ro_default: Option<f64>) -> Result<PhysicalParams, String> {
        #[derive(Deserialize, Default)]
        #[serde(deny_unknown_fields)]
        struct Partial {
            sigma: Option<f64>,
            ro: Option<f64>,
            rayleigh: Option<f64>,
            alpha1: Option<f64>,
            alpha2: Option<f64>,
        }
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                serde_json::from_str::<Partial>(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
            None => Partial::default(),
        };
        let pick = |flag: Option<f64>, file: Option<f64>, name: &str, default: Option<f64>| {
            flag.or(file)
                .or(default)
                .ok_or_else(|| format!("missing parameter '{name}' (give --{name} or --config)"))
        };
        let p = PhysicalParams::new(
            pick(self.sigma, file.sigma, "sigma", None)?,
            pick(self.ro, file.ro, "ro", ro_default)?,
            pick(self.rayleigh, file.rayleigh, "rayleigh", Some(0.0))?,
            pick(self.alpha1, file.alpha1, "alpha1", None)?,
            pick(self.alpha2, file.alpha2, "alpha2", None)?,
        )
        .map_err(|e| e.to_string())?;
        Ok(p)
    }

    /// The same parameters spelled out as flags, with no file reference.
    pub fn pinned(p: &PhysicalParams) -> Self {
        Self {
            config: None,
            sigma: Some(p.sigma),
            ro: Some(p.ro),
            rayleigh: Some(p.rayleigh),
            alpha1: Some(p.alpha1),
            alpha2: Some(p.alpha2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Space {
    Full,
    Sym,
}

impl From<Space> for SpaceFlag {
    fn from(s: Space) -> Self {
        match s {
            Space::Full => SpaceFlag::FullSpace,
            Space::Sym => SpaceFlag::SymmetricSpace,
        }
    }
}

/// `lo:hi:n`, a uniform grid of `n` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scan {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for Scan {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || format!("expected lo:hi:n, got '{s}'");
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        if !(lo <= hi) || n < 1 || (n == 1 && lo != hi) {
            return Err(format!("need lo <= hi and n >= 1 in '{s}'"));
        }
        Ok(Scan { lo, hi, n })
    }
}

impl Scan {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 8)]
    pub jmax: i64,
    #[arg(long, default_value_t = 8)]
    pub kmax: i64,
    #[arg(long, default_value_t = 4)]
    pub lmax: i64,
    #[arg(long, value_enum, default_value_t = Space::Full)]
    pub space: Space,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CriticalArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Onset criterion: steady, hopf or both.
    #[arg(long, default_value = "steady")]
    pub mode: String,
    #[arg(long, default_value_t = 8)]
    pub jmax: i64,
    #[arg(long, default_value_t = 8)]
    pub kmax: i64,
    /// Leading growth rate over `lo:hi:n` Rayleigh numbers instead of the critical values.
    #[arg(long)]
    pub scan: Option<Scan>,
    #[arg(long, default_value_t = 4)]
    pub lmax: i64,
    #[arg(long, value_enum, default_value_t = Space::Full)]
    pub space: Space,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AsymptoticsArgs {
    /// `ro` may be omitted; only sigma and the wavenumbers enter.
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub ro_list: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(group = clap::ArgGroup::new("rvalues").required(true).args(["r", "r_scan"]))]
pub struct ReduceArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub r_scan: Option<Scan>,
    #[arg(long, default_value_t = 8)]
    pub jmax: i64,
    #[arg(long, default_value_t = 8)]
    pub kmax: i64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Rayleigh number; overrides the parameter set.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 32)]
    pub nx: usize,
    #[arg(long, default_value_t = 16)]
    pub nz: usize,
    #[arg(long, default_value_t = 2e-3)]
    pub dt: f64,
    /// End time (absolute, so a restart continues from the checkpoint time).
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub seed_amp: f64,
    /// `j,l` of the seeded eigenmode.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1, 1])]
    pub seed_mode: Vec<i64>,
    #[arg(long, value_enum, default_value_t = Space::Full)]
    pub symmetry: Space,
    #[arg(long, default_value_t = 0.1)]
    pub diag_every: f64,
    #[arg(long, default_value = "sbdf2")]
    pub scheme: String,
    #[arg(long)]
    pub no_dealias: bool,
    /// Drop the advection term.
    #[arg(long)]
    pub linear: bool,
    #[arg(long)]
    pub stop_on_steady: bool,
    /// Start from this checkpoint instead of an eigenmode seed.
    #[arg(long)]
    pub restart: Option<PathBuf>,
    /// Write the final state here.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Skip the long simulator runs.
    #[arg(long)]
    pub quick: bool,
    /// Run only these check ids.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<String>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Output path for the regenerated CSV; defaults to the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
