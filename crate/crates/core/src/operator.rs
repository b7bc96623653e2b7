//! The linearized operator `L_R` about the motionless state, applied mode by
//! mode on the extended cell.

use num_complex::Complex64;

use crate::field::{Spectral, T, U, V, W};
use crate::params::PhysicalParams;

/// Diffusion rates per mode: `-σ|k|²` for velocity, `-|k|²` for temperature.
pub fn diffusion_rates(params: &PhysicalParams, kx: f64, kz: f64) -> [f64; 4] {
    let k2 = kx * kx + kz * kz;
    let d = -params.sigma * k2;
    [d, d, d, -k2]
}

/// Coriolis, buoyancy and stratification terms, `P(v/Ro, -u/Ro, σRT, w)`.
pub fn coupling(params: &PhysicalParams, s: &Spectral) -> Spectral {
    let mut out = Spectral::zeros(s.grid);
    let inv_ro = 1.0 / params.ro;
    let sr = params.sigma * params.rayleigh;
    for i in 0..s.grid.len() {
        out.c[U][i] = s.c[V][i] * inv_ro;
        out.c[V][i] = -s.c[U][i] * inv_ro;
        out.c[W][i] = s.c[T][i] * sr;
        out.c[T][i] = s.c[W][i];
    }
    out.project();
    out
}

/// `L_R s` with the pressure eliminated by the Leray projection.
pub fn apply_linear(params: &PhysicalParams, s: &Spectral) -> Spectral {
    let mut out = coupling(params, s);
    let g = s.grid;
    let mut diff = Spectral::zeros(g);
    for i in 0..g.len() {
        let (kx, kz) = g.wavevector(i);
        let d = diffusion_rates(params, kx, kz);
        for q in 0..4 {
            diff.c[q][i] = s.c[q][i] * d[q];
        }
    }
    diff.project();
    out.axpy(1.0, &diff);
    out
}

/// `L_R` on the complex field `re + i·im`, minus `β` times the field.
pub fn eigen_defect(
    params: &PhysicalParams,
    re: &Spectral,
    im: &Spectral,
    beta: Complex64,
) -> (Spectral, Spectral) {
    let mut r = apply_linear(params, re);
    r.axpy(-beta.re, re);
    r.axpy(beta.im, im);
    let mut i = apply_linear(params, im);
    i.axpy(-beta.re, im);
    i.axpy(-beta.im, re);
    (r, i)
}
