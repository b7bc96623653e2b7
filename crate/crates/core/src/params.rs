//! Control parameters and the Fourier wavenumber lattice.
//!
//! Fields are `2π/α₁`-periodic in x, `2π/α₂`-periodic in y and expanded in
//! `sin(lπz)` / `cos(lπz)` vertically, so every linear mode is labelled by an
//! integer triple `(j, k, l)`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

/// Dimensionless controls of the stratified rotating Boussinesq system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Prandtl number.
    pub sigma: f64,
    /// Rossby number.
    pub ro: f64,
    /// Thermal Rayleigh number.
    pub rayleigh: f64,
    /// Base x-wavenumber; the cell is `2π/alpha1` long in x.
    pub alpha1: f64,
    /// Base y-wavenumber.
    pub alpha2: f64,
}

impl PhysicalParams {
    pub fn new(sigma: f64, ro: f64, rayleigh: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        let p = Self {
            sigma,
            ro,
            rayleigh,
            alpha1,
            alpha2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sigma", self.sigma),
            ("ro", self.ro),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !self.rayleigh.is_finite() || self.rayleigh < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "rayleigh must be finite and >= 0, got {}",
                self.rayleigh
            )));
        }
        Ok(())
    }

    pub fn with_rayleigh(&self, rayleigh: f64) -> Self {
        Self { rayleigh, ..*self }
    }

    /// Reads the JSON config `{"sigma", "ro", "rayleigh", "alpha1", "alpha2"}`.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    /// `j²α₁² + k²α₂²`.
    pub fn alpha_sq(&self, j: i64, k: i64) -> f64 {
        let (j, k) = (j as f64, k as f64);
        j * j * self.alpha1 * self.alpha1 + k * k * self.alpha2 * self.alpha2
    }
}

/// Which of the three index families a lattice point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatticeClass {
    /// `j ≥ 0, (j,k) ≠ (0,0), l ≥ 1`: the Rayleigh-dependent triples.
    Lambda1,
    /// `j ≥ 0, (j,k) ≠ (0,0), l = 0`: horizontal vortical modes.
    Lambda2,
    /// `(j,k) = (0,0), l ≥ 1`: horizontally uniform modes.
    Lambda3,
}

impl fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeClass::Lambda1 => "Lambda1",
            LatticeClass::Lambda2 => "Lambda2",
            LatticeClass::Lambda3 => "Lambda3",
        })
    }
}

pub fn classify(j: i64, k: i64, l: i64) -> Result<LatticeClass> {
    let out = || Error::OutOfLattice { j, k, l };
    if j < 0 || l < 0 {
        return Err(out());
    }
    match ((j, k) == (0, 0), l) {
        (true, 0) => Err(out()),
        (true, _) => Ok(LatticeClass::Lambda3),
        (false, 0) => Ok(LatticeClass::Lambda2),
        (false, _) => Ok(LatticeClass::Lambda1),
    }
}

/// A lattice point together with its derived squared wavenumbers.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WaveIndex {
    pub j: i64,
    pub k: i64,
    pub l: i64,
    /// `α²_jk = j²α₁² + k²α₂²`.
    pub alpha_sq: f64,
    /// `γ²_jkl = α²_jk + l²π²`.
    pub gamma_sq: f64,
    pub cls: LatticeClass,
}

impl WaveIndex {
    pub fn new(j: i64, k: i64, l: i64, params: &PhysicalParams) -> Result<Self> {
        let cls = classify(j, k, l)?;
        let alpha_sq = params.alpha_sq(j, k);
        let lf = l as f64;
        Ok(Self {
            j,
            k,
            l,
            alpha_sq,
            gamma_sq: alpha_sq + lf * lf * PI2,
            cls,
        })
    }

    pub fn triple(&self) -> (i64, i64, i64) {
        (self.j, self.k, self.l)
    }

    /// `l²π²`.
    pub fn vertical_sq(&self) -> f64 {
        let l = self.l as f64;
        l * l * PI2
    }
}

impl PartialEq for WaveIndex {
    fn eq(&self, other: &Self) -> bool {
        self.triple() == other.triple()
    }
}

impl Eq for WaveIndex {}

impl Hash for WaveIndex {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.triple().hash(state)
    }
}

impl fmt::Display for WaveIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.j, self.k, self.l)
    }
}

/// Truncation bounds for lattice scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub jmax: i64,
    pub kmax: i64,
    pub lmax: i64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            jmax: 8,
            kmax: 8,
            lmax: 4,
        }
    }
}

impl Truncation {
    pub fn new(jmax: i64, kmax: i64, lmax: i64) -> Self {
        Self { jmax, kmax, lmax }
    }
}

/// Enumerates the truncated lattice `|j| ≤ jmax, |k| ≤ kmax, l ≤ lmax` in
/// lexicographic `(l, j, k)` order.
///
/// Points with `j = 0` are kept only for `k > 0`: `(0, -k, l)` spans the same
/// real modes as `(0, k, l)`.
pub fn lattice(trunc: Truncation, params: &PhysicalParams) -> Result<Vec<WaveIndex>> {
    let Truncation { jmax, kmax, lmax } = trunc;
    if jmax < 0 || kmax < 0 || lmax < 1 || jmax + kmax < 1 {
        return Err(Error::Precondition(format!(
            "lattice truncation needs jmax, kmax >= 0 with jmax + kmax >= 1 and lmax >= 1, got ({jmax}, {kmax}, {lmax})"
        )));
    }
    let mut out = Vec::new();
    for l in 0..=lmax {
        for j in 0..=jmax {
            for k in -kmax..=kmax {
                if j == 0 && k < 0 {
                    continue;
                }
                if let Ok(idx) = WaveIndex::new(j, k, l, params) {
                    out.push(idx);
                }
            }
        }
    }
    Ok(out)
}

/// Function space the spectrum is computed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceFlag {
    /// All fields satisfying the boundary and periodicity conditions.
    FullSpace,
    /// The subspace `(u,v,w,T)(-x,-y,z) = (-u,-v,w,T)(x,y,z)`.
    SymmetricSpace,
}

impl FromStr for SpaceFlag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(SpaceFlag::FullSpace),
            "sym" | "symmetric" => Ok(SpaceFlag::SymmetricSpace),
            other => Err(Error::Config(format!(
                "space must be 'full' or 'sym', got '{other}'"
            ))),
        }
    }
}

impl fmt::Display for SpaceFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceFlag::FullSpace => "full",
            SpaceFlag::SymmetricSpace => "sym",
        })
    }
}
