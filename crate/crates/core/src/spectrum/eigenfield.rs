//! Eigenfields of `L_R` for `k = 0` indices, sampled on an `(x, z)` grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigvec_coeffs;
use crate::error::{Error, Result};
use crate::field::{ComplexField, FieldOnGrid, Grid, Spectral, Transform};
use crate::operator::eigen_defect;
use crate::params::{LatticeClass, PhysicalParams, WaveIndex};

/// Sine-in-x (`First`) or cosine-in-x (`Second`) member of an eigen-pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenVariant {
    First,
    Second,
}

fn check_index(idx: &WaveIndex, grid: &Grid) -> Result<()> {
    if idx.cls != LatticeClass::Lambda1 {
        return Err(Error::WrongClass {
            index: *idx,
            found: idx.cls,
            expected: "Lambda1",
        });
    }
    if idx.k != 0 {
        return Err(Error::Precondition(format!(
            "grid eigenfields need k = 0, got {idx}"
        )));
    }
    if 2 * idx.j >= grid.nx as i64 || idx.l >= grid.nz as i64 {
        return Err(Error::Precondition(format!(
            "{idx} is not resolved on a {} x {} grid",
            grid.nx, grid.nz
        )));
    }
    Ok(())
}

/// `φ¹ + c₁φ² + c₂φ³` (or `φ⁴ + c₁φ⁵ + c₂φ⁶`) with complex `c₁, c₂`.
fn combine(
    idx: &WaveIndex,
    grid: Grid,
    variant: EigenVariant,
    c1: Complex64,
    c2: Complex64,
) -> ComplexField {
    let a = (idx.j as f64) * grid.alpha1;
    let lp = idx.l as f64 * std::f64::consts::PI;
    let r = lp / a;
    let part = |pick: fn(Complex64) -> f64, base: f64| {
        FieldOnGrid::from_fn(grid, |x, z| {
            let (s, c) = (a * x).sin_cos();
            let (sz, cz) = (lp * z).sin_cos();
            let (hu, hw) = match variant {
                EigenVariant::First => (-r * s * cz, c * sz),
                EigenVariant::Second => (r * c * cz, s * sz),
            };
            [base * hu, pick(c1) * hu, base * hw, pick(c2) * hw]
        })
    };
    ComplexField {
        re: part(|c| c.re, 1.0),
        im: part(|c| c.im, 0.0),
    }
}

/// Eigenvector of `L_R` at `idx` for the root `beta`, normalized to unit
/// coefficient on the `w`-carrying basis field.
pub fn assemble_eigenvector(
    params: &PhysicalParams,
    idx: &WaveIndex,
    beta: Complex64,
    variant: EigenVariant,
    grid: Grid,
) -> Result<ComplexField> {
    check_index(idx, &grid)?;
    let c = eigvec_coeffs(beta, params, idx)?;
    Ok(combine(idx, grid, variant, c.a1, c.a2))
}

/// Dual vector of `L_R` at `idx` for the root `beta`.
pub fn assemble_dual(
    params: &PhysicalParams,
    idx: &WaveIndex,
    beta: Complex64,
    variant: EigenVariant,
    grid: Grid,
) -> Result<ComplexField> {
    check_index(idx, &grid)?;
    let c = eigvec_coeffs(beta, params, idx)?;
    Ok(combine(idx, grid, variant, c.c1d, c.c2d))
}

/// `‖L_R ψ − βψ‖ / ‖ψ‖` with `L_R` discretized spectrally on the field's grid.
pub fn linear_residual(params: &PhysicalParams, field: &ComplexField, beta: Complex64) -> Result<f64> {
    let norm = field.norm();
    if !(norm > 0.0) {
        return Err(Error::Precondition("linear_residual of a zero field".into()));
    }
    let tr = Transform::new(field.re.grid);
    let re = Spectral::from_grid(&field.re, &tr);
    let im = Spectral::from_grid(&field.im, &tr);
    let (dr, di) = eigen_defect(params, &re, &im, beta);
    let dn = (dr.inner(&dr) + di.inner(&di)).max(0.0).sqrt();
    Ok(dn / norm)
}
