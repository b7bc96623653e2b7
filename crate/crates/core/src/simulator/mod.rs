//! Pseudo-spectral solver for y-independent solutions of the full nonlinear
//! problem on one horizontal period, with free-slip walls handled by parity.

pub mod checkpoint;
pub mod period;
pub mod scheme;

use log::{debug, warn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use period::{measure_period, PeriodEstimate};
pub use scheme::{time_scheme, ImexEuler, RateTable, Sbdf2, TimeScheme, SCHEME_NAMES};

use crate::error::{Error, Result};
use crate::field::{advect, Grid, Spectral, Transform, T, U, V, W};
use crate::operator::{coupling, diffusion_rates};
use crate::params::{PhysicalParams, SpaceFlag, WaveIndex};
use crate::spectrum::{assemble_eigenvector, eigen_triple, EigenVariant};

/// Any field value above this aborts the run.
pub const BLOW_UP: f64 = 1e6;
/// Relative change per unit time below which the state counts as steady.
pub const STEADY_TOL: f64 = 1e-8;
/// Steady-state detection is suppressed before this time.
pub const STEADY_AFTER: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: PhysicalParams,
    pub nx: usize,
    pub nz: usize,
    pub dt: f64,
    pub t_end: f64,
    pub symmetry: SpaceFlag,
    pub dealias: bool,
    /// `(j, k, l)` of the seeded eigenmode; `k` must be 0.
    pub seed_mode: (i64, i64, i64),
    pub seed_amp: f64,
    pub scheme: String,
    /// Switch for the advection term; off gives the linearized dynamics.
    pub nonlinear: bool,
    pub diag_every: f64,
    pub stop_on_steady: bool,
}

impl SimConfig {
    pub fn new(params: PhysicalParams) -> Self {
        Self {
            params,
            nx: 32,
            nz: 16,
            dt: 2e-3,
            t_end: 10.0,
            symmetry: SpaceFlag::FullSpace,
            dealias: true,
            seed_mode: (1, 0, 1),
            seed_amp: 1e-4,
            scheme: "sbdf2".into(),
            nonlinear: true,
            diag_every: 0.1,
            stop_on_steady: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {}", self.dt)));
        }
        if !(self.t_end >= 0.0) || !(self.diag_every > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need t_end >= 0 and diag_every > 0, got {} and {}",
                self.t_end, self.diag_every
            )));
        }
        if self.seed_mode.1 != 0 {
            return Err(Error::Precondition(format!(
                "seed mode must have k = 0, got {:?}",
                self.seed_mode
            )));
        }
        time_scheme(&self.scheme)?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.nx, self.nz, self.params.alpha1)
    }

    pub fn seed_index(&self) -> Result<WaveIndex> {
        let (j, k, l) = self.seed_mode;
        WaveIndex::new(j, k, l, &self.params)
    }

    /// Diagnostic output stride in steps (at least one).
    pub fn diag_stride(&self) -> usize {
        ((self.diag_every / self.dt).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub s: Spectral,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagRow {
    pub t: f64,
    pub ke: f64,
    pub te: f64,
    /// Amplitude of the seeded mode on the cosine-in-x eigenvector.
    pub re_wmode: f64,
    /// Amplitude on the sine-in-x eigenvector.
    pub im_wmode: f64,
    /// Rate of change of the log modal amplitude since the previous row.
    pub growth_rate: f64,
    pub div_max: f64,
}

impl DiagRow {
    pub const HEADER: [&'static str; 7] =
        ["t", "ke", "te", "re_wmode", "im_wmode", "growth_rate", "div_max"];

    pub fn values(&self) -> [f64; 7] {
        [
            self.t,
            self.ke,
            self.te,
            self.re_wmode,
            self.im_wmode,
            self.growth_rate,
            self.div_max,
        ]
    }

    pub fn amplitude(&self) -> f64 {
        self.re_wmode.hypot(self.im_wmode)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Steady { t: f64 },
    Decayed,
    Oscillating { period: f64 },
    Unsettled,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub rows: Vec<DiagRow>,
    pub state: SimState,
    pub outcome: Outcome,
}

/// Coefficients `(X, Y)` of the `(j, 0, l)` mode in `w = X cos(ax) sin(lπz) + Y sin(ax) sin(lπz)`.
pub fn mode_amplitude(s: &Spectral, j: i64, l: i64) -> (f64, f64) {
    let c = Complex64::new(0.0, 4.0) * s.c[W][s.grid.slot(j, l)];
    (c.re, -c.im)
}

/// `(kinetic, thermal)` energies `½∫|u|²` and `½∫T²` over one cell.
pub fn energies(s: &Spectral) -> (f64, f64) {
    let g = s.grid;
    let part = |q: usize| -> f64 {
        (0..g.len())
            .map(|i| (s.c[q][i] * s.c[q][g.mirror(i)]).re)
            .sum::<f64>()
            * g.lx()
            * 0.5
    };
    (part(U) + part(V) + part(W), part(T))
}

/// The state moved by `shift` in x: `f(x) ↦ f(x − shift)`.
pub fn translate_x(state: &SimState, shift: f64) -> SimState {
    let mut out = state.clone();
    let g = state.s.grid;
    for c in out.s.c.iter_mut() {
        for (i, z) in c.iter_mut().enumerate() {
            let ph = -g.alpha1 * g.jx(i) as f64 * shift;
            *z *= Complex64::from_polar(1.0, ph);
        }
    }
    out.s.make_hermitian();
    out
}

/// `eps` times the real part of the leading eigenvector of the seed mode
/// (the cosine-in-x member, which lies in the symmetric subspace).
pub fn seed_from_eigenvector(config: &SimConfig, eps: f64) -> Result<SimState> {
    if !(eps >= 0.0) {
        return Err(Error::Precondition(format!("seed amplitude must be >= 0, got {eps}")));
    }
    let idx = config.seed_index()?;
    let grid = config.grid()?;
    let beta = eigen_triple(&config.params, &idx)?.beta1;
    let f = assemble_eigenvector(&config.params, &idx, beta, EigenVariant::First, grid)?;
    let tr = Transform::new(grid);
    let mut s = Spectral::from_grid(&f.re, &tr);
    s.scale(eps);
    constrain(&mut s, config);
    Ok(SimState { s, t: 0.0 })
}

fn constrain(s: &mut Spectral, config: &SimConfig) {
    s.project();
    s.remove_mean_flow();
    s.enforce_z_parity();
    if config.symmetry == SpaceFlag::SymmetricSpace {
        s.enforce_x_symmetry();
    }
    if config.dealias {
        s.dealias();
    }
}

pub struct Simulator {
    pub config: SimConfig,
    pub grid: Grid,
    tr: Transform,
    rates: RateTable,
    scheme: Box<dyn TimeScheme>,
    pub state: SimState,
    t0: f64,
    steps: u64,
    cfl_warned: bool,
}

impl Simulator {
    pub fn new(config: SimConfig, mut state: SimState) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        if state.s.grid.nx != grid.nx || state.s.grid.nz != grid.nz {
            return Err(Error::Config(format!(
                "state grid {} x {} does not match config {} x {}",
                state.s.grid.nx, state.s.grid.nz, grid.nx, grid.nz
            )));
        }
        state.s.grid = grid;
        constrain(&mut state.s, &config);
        let rates = (0..grid.len())
            .map(|i| {
                let (kx, kz) = grid.wavevector(i);
                diffusion_rates(&config.params, kx, kz)
            })
            .collect();
        Ok(Self {
            scheme: time_scheme(&config.scheme)?,
            tr: Transform::new(grid),
            t0: state.t,
            grid,
            rates,
            config,
            state,
            steps: 0,
            cfl_warned: false,
        })
    }

    pub fn transform(&self) -> &Transform {
        &self.tr
    }

    /// The explicit part of the tendency at `s`.
    pub fn explicit_tendency(&self, s: &Spectral) -> Spectral {
        let mut e = coupling(&self.config.params, s);
        if self.config.nonlinear {
            e.axpy(1.0, &advect(s, s, &self.tr, self.config.dealias));
        }
        e
    }

    pub fn step(&mut self) -> Result<()> {
        let e = self.explicit_tendency(&self.state.s);
        let mut next = self.scheme.advance(&self.state.s, e, &self.rates, self.config.dt);
        constrain(&mut next, &self.config);
        self.steps += 1;
        let t = self.t0 + self.steps as f64 * self.config.dt;
        let m = next.max_abs_coeff();
        if !(m <= BLOW_UP) {
            return Err(Error::BlowUp { t, max_abs: m });
        }
        self.state = SimState { s: next, t };
        Ok(())
    }

    fn diagnose(&mut self, prev_amp: Option<(f64, f64)>) -> Result<DiagRow> {
        let s = &self.state.s;
        let (ke, te) = energies(s);
        let (_, _, l) = self.config.seed_mode;
        let (x, y) = mode_amplitude(s, self.config.seed_mode.0, l);
        let amp = x.hypot(y);
        let growth_rate = match prev_amp {
            Some((a0, t0)) if a0 > 0.0 && amp > 0.0 && self.state.t > t0 => {
                (amp / a0).ln() / (self.state.t - t0)
            }
            _ => f64::NAN,
        };
        let phys = s.to_grid(&self.tr);
        let max_abs = phys.max_abs();
        if !(max_abs <= BLOW_UP) {
            return Err(Error::BlowUp {
                t: self.state.t,
                max_abs,
            });
        }
        let umax = phys
            .u
            .iter()
            .chain(&phys.v)
            .chain(&phys.w)
            .fold(0.0f64, |m, x| m.max(x.abs()));
        let g = self.grid;
        let kmax = (g.nx as f64 * g.alpha1).max(g.nz as f64 * std::f64::consts::PI);
        let cfl = self.config.dt * umax * kmax;
        if cfl >= 0.5 && !self.cfl_warned {
            warn!("CFL number {cfl:.3} >= 0.5 at t = {}", self.state.t);
            self.cfl_warned = true;
        }
        Ok(DiagRow {
            t: self.state.t,
            ke,
            te,
            re_wmode: x,
            im_wmode: y,
            growth_rate,
            div_max: s.divergence_max(&self.tr),
        })
    }

    /// Integrates to `config.t_end`, recording diagnostics every
    /// `diag_every` and checking for a steady state.
    pub fn run(&mut self) -> Result<RunResult> {
        let n = ((self.config.t_end - self.state.t) / self.config.dt).round().max(0.0) as u64;
        let stride = self.config.diag_stride() as u64;
        let mut rows = vec![self.diagnose(None)?];
        let mut last = self.state.s.clone();
        let mut steady_at = None;
        for i in 1..=n {
            self.step()?;
            if i % stride == 0 || i == n {
                let prev = rows.last().map(|r| (r.amplitude(), r.t));
                rows.push(self.diagnose(prev)?);
                let span = self.state.t - rows[rows.len() - 2].t;
                let mut d = self.state.s.clone();
                d.axpy(-1.0, &last);
                let norm = self.state.s.inner(&self.state.s).sqrt();
                let change = d.inner(&d).sqrt() / (norm * span);
                if self.state.t >= STEADY_AFTER && norm > 0.0 && change < STEADY_TOL {
                    if steady_at.is_none() {
                        debug!("steady state reached at t = {}", self.state.t);
                        steady_at = Some(self.state.t);
                    }
                    if self.config.stop_on_steady {
                        break;
                    }
                } else {
                    steady_at = None;
                }
                last = self.state.s.clone();
            }
        }
        let outcome = classify(&rows, steady_at);
        Ok(RunResult {
            rows,
            state: self.state.clone(),
            outcome,
        })
    }
}

fn classify(rows: &[DiagRow], steady_at: Option<f64>) -> Outcome {
    let (first, last) = (rows[0].ke, rows[rows.len() - 1].ke);
    if let Some(t) = steady_at {
        return Outcome::Steady { t };
    }
    if first > 0.0 && last < 1e-8 * first {
        return Outcome::Decayed;
    }
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.re_wmode).collect();
    match measure_period(&t, &y) {
        Ok(p) => Outcome::Oscillating { period: p.period },
        Err(_) => Outcome::Unsettled,
    }
}

/// Seeds from the configured eigenmode and integrates.
pub fn run(config: &SimConfig) -> Result<RunResult> {
    let seed = seed_from_eigenvector(config, config.seed_amp)?;
    Simulator::new(config.clone(), seed)?.run()
}
