//! Spectrum of the linearized operator `L_R` about the motionless state.
//!
//! Every `(j,k,l)` with `l ≥ 1` contributes the three zeros of a cubic (twice
//! in the full space, once in the symmetric subspace). The remaining lattice
//! families have closed-form, Rayleigh-independent eigenvalues.

pub mod cubic;
pub mod eigenfield;

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{lattice, LatticeClass, PhysicalParams, SpaceFlag, Truncation, WaveIndex};

pub use cubic::{companion_eigenvalues, solve_cubic, CubicCoeffs, EigenTriple};
pub use eigenfield::{assemble_dual, assemble_eigenvector, linear_residual, EigenVariant};

/// Coefficients of the characteristic cubic of `L_R` on `E_jkl`.
pub fn cubic_coeffs(params: &PhysicalParams, idx: &WaveIndex) -> Result<CubicCoeffs> {
    if idx.cls != LatticeClass::Lambda1 {
        return Err(Error::WrongClass {
            index: *idx,
            found: idx.cls,
            expected: "Lambda1",
        });
    }
    let PhysicalParams {
        sigma: s,
        ro,
        rayleigh: r,
        ..
    } = *params;
    let g2 = idx.gamma_sq;
    let a2 = idx.alpha_sq;
    let lp2 = idx.vertical_sq();
    Ok(CubicCoeffs {
        c2: (2.0 * s + 1.0) * g2,
        c1: (s * s + 2.0 * s) * g2 * g2 + lp2 / (ro * ro * g2) - s * r * a2 / g2,
        c0: s * s * g2 * g2 * g2 - s * s * r * a2 + lp2 / (ro * ro),
    })
}

pub fn eigen_triple(params: &PhysicalParams, idx: &WaveIndex) -> Result<EigenTriple> {
    let c = cubic_coeffs(params, idx)?;
    Ok(solve_cubic(&c)?.with_index(*idx))
}

/// Which eigenvector family an eigenvalue belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Zero `q` (1..=3) of the cubic, ordered by descending real part.
    Root(u8),
    /// Horizontal vortical mode `ψ₁` (sine) or `ψ₂` (cosine) of a `Λ₂` index.
    Vortical(u8),
    /// Horizontally uniform temperature mode, `-l²π²`.
    Temperature,
    /// Horizontally uniform inertial oscillation, `-σl²π² ∓ i/Ro`.
    CoriolisMinus,
    CoriolisPlus,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Root(q) => write!(f, "{q}"),
            Branch::Vortical(q) => write!(f, "psi{q}"),
            Branch::Temperature => f.write_str("temperature"),
            Branch::CoriolisMinus => f.write_str("coriolis-"),
            Branch::CoriolisPlus => f.write_str("coriolis+"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub beta: Complex64,
    pub branch: Branch,
}

/// All eigenvalues carried by one lattice index, repeated by multiplicity.
pub fn spectrum_at(
    params: &PhysicalParams,
    idx: &WaveIndex,
    space: SpaceFlag,
) -> Result<Vec<Eigenvalue>> {
    let s = params.sigma;
    let full = space == SpaceFlag::FullSpace;
    let ev = |beta: Complex64, branch| Eigenvalue { beta, branch };
    Ok(match idx.cls {
        LatticeClass::Lambda1 => {
            let t = eigen_triple(params, idx)?;
            let copies = if full { 2 } else { 1 };
            let mut out = Vec::with_capacity(3 * copies);
            for (q, beta) in t.roots().into_iter().enumerate() {
                for _ in 0..copies {
                    out.push(ev(beta, Branch::Root(q as u8 + 1)));
                }
            }
            out
        }
        LatticeClass::Lambda2 => {
            // ψ₁ is odd under (x,y) -> (-x,-y) and lies in the symmetric
            // subspace; ψ₂ (cosines) does not.
            let beta = Complex64::new(-s * idx.alpha_sq, 0.0);
            let mut out = vec![ev(beta, Branch::Vortical(1))];
            if full {
                out.push(ev(beta, Branch::Vortical(2)));
            }
            out
        }
        LatticeClass::Lambda3 => {
            let lp2 = idx.vertical_sq();
            let mut out = vec![ev(Complex64::new(-lp2, 0.0), Branch::Temperature)];
            if full {
                let w = 1.0 / params.ro;
                out.push(ev(Complex64::new(-s * lp2, -w), Branch::CoriolisMinus));
                out.push(ev(Complex64::new(-s * lp2, w), Branch::CoriolisPlus));
            }
            out
        }
    })
}

/// Leading eigenvalue over a truncated lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRate {
    pub re: f64,
    pub beta: Complex64,
    pub index: WaveIndex,
    pub branch: Branch,
}

/// Largest real part over every eigenvalue of the truncated lattice; ties go to
/// the earlier lattice entry.
pub fn growth_rate(
    params: &PhysicalParams,
    trunc: Truncation,
    space: SpaceFlag,
) -> Result<GrowthRate> {
    let lat = lattice(trunc, params)?;
    growth_rate_over(params, &lat, space)
}

pub fn growth_rate_over(
    params: &PhysicalParams,
    indices: &[WaveIndex],
    space: SpaceFlag,
) -> Result<GrowthRate> {
    let per_index: Vec<Result<Option<GrowthRate>>> = indices
        .par_iter()
        .map(|idx| {
            let evs = spectrum_at(params, idx, space)?;
            let mut best: Option<GrowthRate> = None;
            for e in evs {
                if best.map_or(true, |b| e.beta.re > b.re) {
                    best = Some(GrowthRate {
                        re: e.beta.re,
                        beta: e.beta,
                        index: *idx,
                        branch: e.branch,
                    });
                }
            }
            Ok(best)
        })
        .collect();
    let mut best: Option<GrowthRate> = None;
    for r in per_index {
        if let Some(g) = r? {
            if best.map_or(true, |b| g.re > b.re) {
                best = Some(g);
            }
        }
    }
    best.ok_or_else(|| Error::Precondition("empty lattice".into()))
}

/// Coefficients of the eigenvector `φ¹ + A₁φ² + A₂φ³` and of its dual
/// `φ¹ + C₁φ² + C₂φ³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvectorCoeffs {
    pub a1: Complex64,
    pub a2: Complex64,
    pub c1d: Complex64,
    pub c2d: Complex64,
}

pub fn eigvec_coeffs(
    beta: Complex64,
    params: &PhysicalParams,
    idx: &WaveIndex,
) -> Result<EigenvectorCoeffs> {
    let g2 = idx.gamma_sq;
    let shift_v = beta + params.sigma * g2;
    let shift_t = beta + g2;
    let tol = 1e-12 * g2;
    if shift_v.norm() < tol || shift_t.norm() < tol {
        return Err(Error::SingularShift {
            re: beta.re,
            im: beta.im,
        });
    }
    let ro = params.ro;
    Ok(EigenvectorCoeffs {
        a1: -1.0 / (ro * shift_v),
        a2: 1.0 / shift_t,
        c1d: 1.0 / (ro * shift_v),
        c2d: params.sigma * params.rayleigh / shift_t,
    })
}
