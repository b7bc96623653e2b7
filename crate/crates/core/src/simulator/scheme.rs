//! Implicit–explicit time schemes: diffusion implicit per mode, everything
//! else explicit.

use crate::error::{Error, Result};
use crate::field::Spectral;

/// Diffusion rate of every component at every spectral slot.
pub type RateTable = Vec<[f64; 4]>;

pub trait TimeScheme: Send {
    fn name(&self) -> &'static str;
    fn order(&self) -> u32;
    /// Forgets any stored history, so the next step is a start step.
    fn reset(&mut self);
    /// Advances `y` by `dt`, given the explicit tendency evaluated at `y`.
    fn advance(&mut self, y: &Spectral, explicit: Spectral, rates: &RateTable, dt: f64) -> Spectral;
}

fn euler(y: &Spectral, e: &Spectral, rates: &RateTable, dt: f64) -> Spectral {
    let mut out = Spectral::zeros(y.grid);
    for (q, c) in out.c.iter_mut().enumerate() {
        for (i, x) in c.iter_mut().enumerate() {
            *x = (y.c[q][i] + e.c[q][i] * dt) / (1.0 - dt * rates[i][q]);
        }
    }
    out
}

/// First-order backward/forward Euler.
#[derive(Debug, Default)]
pub struct ImexEuler;

impl TimeScheme for ImexEuler {
    fn name(&self) -> &'static str {
        "imex-euler"
    }
    fn order(&self) -> u32 {
        1
    }
    fn reset(&mut self) {}
    fn advance(&mut self, y: &Spectral, explicit: Spectral, rates: &RateTable, dt: f64) -> Spectral {
        euler(y, &explicit, rates, dt)
    }
}

/// Second-order semi-implicit backward differentiation with extrapolated
/// explicit terms. Starts with one IMEX Euler step.
#[derive(Debug, Default)]
pub struct Sbdf2 {
    prev: Option<(Spectral, Spectral)>,
}

impl TimeScheme for Sbdf2 {
    fn name(&self) -> &'static str {
        "sbdf2"
    }
    fn order(&self) -> u32 {
        2
    }
    fn reset(&mut self) {
        self.prev = None;
    }
    fn advance(&mut self, y: &Spectral, explicit: Spectral, rates: &RateTable, dt: f64) -> Spectral {
        let out = match &self.prev {
            None => euler(y, &explicit, rates, dt),
            Some((y0, e0)) => {
                let mut out = Spectral::zeros(y.grid);
                for (q, c) in out.c.iter_mut().enumerate() {
                    for (i, x) in c.iter_mut().enumerate() {
                        let rhs = y.c[q][i] * 4.0 - y0.c[q][i]
                            + (explicit.c[q][i] * 2.0 - e0.c[q][i]) * (2.0 * dt);
                        *x = rhs / (3.0 - 2.0 * dt * rates[i][q]);
                    }
                }
                out
            }
        };
        self.prev = Some((y.clone(), explicit));
        out
    }
}

pub const SCHEME_NAMES: [&str; 2] = ["imex-euler", "sbdf2"];

pub fn time_scheme(name: &str) -> Result<Box<dyn TimeScheme>> {
    match name {
        "imex-euler" => Ok(Box::new(ImexEuler)),
        "sbdf2" => Ok(Box::new(Sbdf2::default())),
        other => Err(Error::UnknownStrategy {
            kind: "time scheme",
            name: other.to_string(),
            available: SCHEME_NAMES.join(", "),
        }),
    }
}
