//! Center-manifold reduction at the steady onset: interaction coefficients of
//! the quadratic term, the slaved modes, the cubic coefficient `δ` and the
//! reduced amplitude equations
//!
//! ```text
//! dx/dt = βx + δ(x² + y²)x,   dy/dt = βy + δ(x² + y²)y.
//! ```

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::critical::{rc1, steady_threshold};
use crate::error::{Error, Result};
use crate::field::{advect, ComplexField, FieldOnGrid, Grid, Spectral, Transform, T, U, V, W};
use crate::params::{PhysicalParams, WaveIndex};
use crate::spectrum::{assemble_dual, assemble_eigenvector, eigen_triple, eigvec_coeffs, EigenVariant};

/// Projection of one quadratic interaction onto the modes it excites:
/// `v ∝ sin 2ax, cos 2ax` (the `(2j₁, 0, 0)` pair) and `u, v ∝ cos 2πz`,
/// `T ∝ sin 2πz` (the `(0, 0, 2)` family), with `a = j₁α₁`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeProjection {
    pub v_sin2x: f64,
    pub v_cos2x: f64,
    pub u_cos2z: f64,
    pub v_cos2z: f64,
    pub t_sin2z: f64,
}

impl ModeProjection {
    fn max_rel_diff(&self, other: &ModeProjection) -> f64 {
        let a = [self.v_sin2x, self.v_cos2x, self.u_cos2z, self.v_cos2z, self.t_sin2z];
        let b = [other.v_sin2x, other.v_cos2x, other.u_cos2z, other.v_cos2z, other.t_sin2z];
        let scale = a.iter().chain(&b).fold(0.0f64, |m, x| m.max(x.abs()));
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs() / scale.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

/// `G(ψ_a, ψ_b)` and `G(ψ_a, Ψ_b)` for `a, b ∈ {1, 2}` (indexed `[a-1][b-1]`),
/// where `ψ` are the critical eigenvectors and `Ψ` their duals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionTable {
    pub j1: i64,
    pub direct: [[ModeProjection; 2]; 2],
    pub dual: [[ModeProjection; 2]; 2],
}

impl InteractionTable {
    /// Largest relative entry difference between two tables, per pair.
    pub fn max_rel_diff(&self, other: &InteractionTable) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                m = m.max(self.direct[a][b].max_rel_diff(&other.direct[a][b]));
                m = m.max(self.dual[a][b].max_rel_diff(&other.dual[a][b]));
            }
        }
        m
    }
}

/// Real eigenvector / dual coefficients at a real root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealCoeffs {
    pub a1: f64,
    pub a2: f64,
    pub c1: f64,
    pub c2: f64,
}

fn real_coeffs(params: &PhysicalParams, idx: &WaveIndex, beta: f64) -> Result<RealCoeffs> {
    let c = eigvec_coeffs(Complex64::new(beta, 0.0), params, idx)?;
    Ok(RealCoeffs {
        a1: c.a1.re,
        a2: c.a2.re,
        c1: c.c1d.re,
        c2: c.c2d.re,
    })
}

fn critical_index(params: &PhysicalParams, j1: i64) -> Result<WaveIndex> {
    if j1 < 1 {
        return Err(Error::Precondition(format!("critical j must be >= 1, got {j1}")));
    }
    WaveIndex::new(j1, 0, 1, params)
}

/// Interactions when the second argument carries `k1` on its `v` part and
/// `k2` on its `T` part.
fn closed_form_block(a: f64, k1: f64, k2: f64) -> [[ModeProjection; 2]; 2] {
    let h = PI * PI / (2.0 * a);
    let t = -k2 * PI / 2.0;
    [
        [
            ModeProjection {
                v_sin2x: -k1 * h,
                t_sin2z: t,
                ..Default::default()
            },
            ModeProjection {
                u_cos2z: -h,
                v_cos2z: -k1 * h,
                v_cos2x: k1 * h,
                ..Default::default()
            },
        ],
        [
            ModeProjection {
                u_cos2z: h,
                v_cos2z: k1 * h,
                v_cos2x: k1 * h,
                ..Default::default()
            },
            ModeProjection {
                v_sin2x: k1 * h,
                t_sin2z: t,
                ..Default::default()
            },
        ],
    ]
}

/// Closed-form interaction table at the real root `beta` of `(j1, 0, 1)`.
pub fn interaction_integrals(params: &PhysicalParams, j1: i64, beta: f64) -> Result<InteractionTable> {
    let idx = critical_index(params, j1)?;
    let c = real_coeffs(params, &idx, beta)?;
    let a = j1 as f64 * params.alpha1;
    Ok(InteractionTable {
        j1,
        direct: closed_form_block(a, c.a1, c.a2),
        dual: closed_form_block(a, c.c1, c.c2),
    })
}

fn test_modes(grid: Grid, a: f64) -> [FieldOnGrid; 5] {
    let m = |q: usize, f: fn(f64, f64, f64) -> f64| {
        FieldOnGrid::from_fn(grid, move |x, z| {
            let mut s = [0.0; 4];
            s[q] = f(a, x, z);
            s
        })
    };
    [
        m(V, |a, x, _| (2.0 * a * x).sin()),
        m(V, |a, x, _| (2.0 * a * x).cos()),
        m(U, |_, _, z| (2.0 * PI * z).cos()),
        m(V, |_, _, z| (2.0 * PI * z).cos()),
        m(T, |_, _, z| (2.0 * PI * z).sin()),
    ]
}

fn project_onto(g: &FieldOnGrid, modes: &[FieldOnGrid; 5]) -> ModeProjection {
    let c: Vec<f64> = modes.iter().map(|m| g.inner(m) / m.inner(m)).collect();
    ModeProjection {
        v_sin2x: c[0],
        v_cos2x: c[1],
        u_cos2z: c[2],
        v_cos2z: c[3],
        t_sin2z: c[4],
    }
}

/// The same table computed by evaluating `G` pseudo-spectrally on `grid` and
/// projecting by quadrature. Also returns the largest grid value of the part
/// of any `G` not captured by the five modes.
pub fn interaction_by_quadrature(
    params: &PhysicalParams,
    j1: i64,
    beta: f64,
    grid: Grid,
) -> Result<(InteractionTable, f64)> {
    let idx = critical_index(params, j1)?;
    let tr = Transform::new(grid);
    let b = Complex64::new(beta, 0.0);
    let spec = |f: ComplexField| Spectral::from_grid(&f.re, &tr);
    let psi = [
        spec(assemble_eigenvector(params, &idx, b, EigenVariant::First, grid)?),
        spec(assemble_eigenvector(params, &idx, b, EigenVariant::Second, grid)?),
    ];
    let dual = [
        spec(assemble_dual(params, &idx, b, EigenVariant::First, grid)?),
        spec(assemble_dual(params, &idx, b, EigenVariant::Second, grid)?),
    ];
    let modes = test_modes(grid, j1 as f64 * params.alpha1);
    let mut leftover: f64 = 0.0;
    let mut block = |second: &[Spectral; 2]| {
        let mut out = [[ModeProjection::default(); 2]; 2];
        for (ia, pa) in psi.iter().enumerate() {
            for (ib, pb) in second.iter().enumerate() {
                let g = advect(pa, pb, &tr, false).to_grid(&tr);
                let p = project_onto(&g, &modes);
                let mut rest = g.clone();
                for (c, m) in [p.v_sin2x, p.v_cos2x, p.u_cos2z, p.v_cos2z, p.t_sin2z]
                    .iter()
                    .zip(&modes)
                {
                    rest.axpy(-c, m);
                }
                leftover = leftover.max(rest.max_abs());
                out[ia][ib] = p;
            }
        }
        out
    };
    let direct = block(&psi);
    let dual_block = block(&dual);
    Ok((
        InteractionTable {
            j1,
            direct,
            dual: dual_block,
        },
        leftover,
    ))
}

/// Leading-order center-manifold function
/// `Φ = p(x² − y²)ψ₁' + p(2xy)ψ₂' + q(x² + y²)ψ₃'`, where `ψ₁' = (0, −2a sin 2ax, 0, 0)`,
/// `ψ₂' = (0, 2a cos 2ax, 0, 0)` and `ψ₃' = (0, 0, 0, sin 2πz)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterManifoldCoeffs {
    pub j1: i64,
    /// `p = A₁π²/(σ α⁴)` with `α² = (2j₁α₁)²`.
    pub vortical: f64,
    /// `q = −A₂/(8π)`.
    pub thermal: f64,
}

impl CenterManifoldCoeffs {
    pub fn phi_sin(&self, x: f64, y: f64) -> f64 {
        self.vortical * (x * x - y * y)
    }

    pub fn phi_cos(&self, x: f64, y: f64) -> f64 {
        self.vortical * 2.0 * x * y
    }

    pub fn phi_thermal(&self, x: f64, y: f64) -> f64 {
        self.thermal * (x * x + y * y)
    }
}

/// Coefficients of the slaved modes, with eigenvector coefficients at `β = 0`.
pub fn center_manifold_coeffs(params: &PhysicalParams, j1: i64) -> Result<CenterManifoldCoeffs> {
    let idx = critical_index(params, j1)?;
    let c = real_coeffs(params, &idx, 0.0)?;
    let a4 = params.alpha_sq(2 * j1, 0).powi(2);
    Ok(CenterManifoldCoeffs {
        j1,
        vortical: c.a1 * PI * PI / (params.sigma * a4),
        thermal: -c.a2 / (8.0 * PI),
    })
}

/// Cubic coefficient of the reduced equations, from the closed form with
/// every coefficient evaluated at `β = 0` and `R` at the `(j1, 0, 1)` threshold.
pub fn delta(params: &PhysicalParams, j1: i64) -> Result<f64> {
    let d = delta_unchecked(params, j1)?;
    if !(d < 0.0) {
        return Err(Error::PositiveDelta(d));
    }
    Ok(d)
}

fn delta_unchecked(params: &PhysicalParams, j1: i64) -> Result<f64> {
    let idx = critical_index(params, j1)?;
    let at = params.with_rayleigh(steady_threshold(params, &idx));
    let c = real_coeffs(&at, &idx, 0.0)?;
    let s = params.sigma;
    let a4 = params.alpha_sq(2 * j1, 0).powi(2);
    let pi2 = PI * PI;
    let ac1 = c.a1 * c.c1;
    let ac2 = c.a2 * c.c2;
    let num = 2.0 * ac1 * pi2 * pi2 / (s * a4) + ac2 / 8.0;
    let den = pi2 / params.alpha_sq(j1, 0) * (1.0 + ac1) + 1.0 + ac2;
    Ok(-num / den)
}

/// Solves `L_R Φ = −g` mode by mode, skipping the mean and the critical
/// wavenumbers (where `g` has no component and `L_R` is singular).
fn solve_slaved(params: &PhysicalParams, g: &Spectral, j1: i64) -> Spectral {
    let grid = g.grid;
    let mut out = Spectral::zeros(grid);
    let (s, inv_ro, sr) = (params.sigma, 1.0 / params.ro, params.sigma * params.rayleigh);
    for i in 0..grid.len() {
        let (j, m) = (grid.jx(i), grid.mz(i));
        if (j == 0 && m == 0) || (j.abs() == j1 && m.abs() == 1) {
            continue;
        }
        let (kx, kz) = grid.wavevector(i);
        let k2 = kx * kx + kz * kz;
        #[rustfmt::skip]
        let raw = Matrix4::new(
            -s * k2, inv_ro, 0.0, 0.0,
            -inv_ro, -s * k2, 0.0, 0.0,
            0.0, 0.0, -s * k2, sr,
            0.0, 0.0, 1.0, -k2,
        );
        #[rustfmt::skip]
        let p = Matrix4::new(
            1.0 - kx * kx / k2, 0.0, -kx * kz / k2, 0.0,
            0.0, 1.0, 0.0, 0.0,
            -kx * kz / k2, 0.0, 1.0 - kz * kz / k2, 0.0,
            0.0, 0.0, 0.0, 1.0,
        );
        let m4 = p * raw * p + (Matrix4::identity() - p);
        let lu = m4.lu();
        let rhs_re = -Vector4::new(g.c[U][i].re, g.c[V][i].re, g.c[W][i].re, g.c[T][i].re);
        let rhs_im = -Vector4::new(g.c[U][i].im, g.c[V][i].im, g.c[W][i].im, g.c[T][i].im);
        if let (Some(xr), Some(xi)) = (lu.solve(&rhs_re), lu.solve(&rhs_im)) {
            for q in 0..4 {
                out.c[q][i] = Complex64::new(xr[q], xi[q]);
            }
        }
    }
    out
}

/// `δ` computed without the closed form: the slaved field
/// `Φ = −L_R⁻¹ G(ψ₁, ψ₁)` is obtained by inverting the discretized operator,
/// and `δ = ⟨G(ψ₁, Φ) + G(Φ, ψ₁), Ψ₁⟩ / ⟨ψ₁, Ψ₁⟩`.
pub fn delta_by_quadrature(params: &PhysicalParams, j1: i64, grid: Grid) -> Result<f64> {
    let idx = critical_index(params, j1)?;
    let at = params.with_rayleigh(steady_threshold(params, &idx));
    let tr = Transform::new(grid);
    let zero = Complex64::new(0.0, 0.0);
    let psi = Spectral::from_grid(
        &assemble_eigenvector(&at, &idx, zero, EigenVariant::First, grid)?.re,
        &tr,
    );
    let dual = Spectral::from_grid(&assemble_dual(&at, &idx, zero, EigenVariant::First, grid)?.re, &tr);
    let g11 = advect(&psi, &psi, &tr, false);
    let phi = solve_slaved(&at, &g11, j1);
    let mut cubic = advect(&psi, &phi, &tr, false);
    cubic.axpy(1.0, &advect(&phi, &psi, &tr, false));
    Ok(cubic.inner(&dual) / psi.inner(&dual))
}

/// `(βx + δr²x, βy + δr²y)`.
pub fn amplitude_rhs(x: f64, y: f64, beta: f64, delta: f64) -> (f64, f64) {
    let r2 = x * x + y * y;
    (beta * x + delta * r2 * x, beta * y + delta * r2 * y)
}

/// Classical fourth-order Runge–Kutta with a uniform step no larger than `dt`.
/// Returns `(t, x, y)` samples including both end points.
pub fn integrate_amplitude(
    beta: f64,
    delta: f64,
    x0: f64,
    y0: f64,
    t_end: f64,
    dt: f64,
) -> Result<Vec<(f64, f64, f64)>> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Precondition(format!(
            "need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let n = (t_end / dt).ceil().max(1.0) as usize;
    let h = t_end / n as f64;
    let f = |x: f64, y: f64| amplitude_rhs(x, y, beta, delta);
    let mut out = Vec::with_capacity(n + 1);
    let (mut x, mut y) = (x0, y0);
    out.push((0.0, x, y));
    for i in 0..n {
        let k1 = f(x, y);
        let k2 = f(x + 0.5 * h * k1.0, y + 0.5 * h * k1.1);
        let k3 = f(x + 0.5 * h * k2.0, y + 0.5 * h * k2.1);
        let k4 = f(x + h * k3.0, y + h * k3.1);
        x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        out.push(((i + 1) as f64 * h, x, y));
    }
    Ok(out)
}

/// Reduced model of the steady bifurcation for one parameter family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeModel {
    pub params: PhysicalParams,
    pub j1: i64,
    pub r_c1: f64,
    pub delta: f64,
    pub cm: CenterManifoldCoeffs,
}

impl AmplitudeModel {
    /// Locates the critical index by a lattice scan and requires it to be
    /// unique with `k = 0`.
    pub fn new(params: &PhysicalParams, jmax: i64, kmax: i64) -> Result<Self> {
        let crit = rc1(params, jmax, kmax)?;
        if !crit.unique {
            return Err(Error::Precondition(format!(
                "steady critical index is not unique: {:?}",
                crit.minimizers.iter().map(|w| w.triple()).collect::<Vec<_>>()
            )));
        }
        let j1 = crit.argmin.j;
        Ok(Self {
            params: *params,
            j1,
            r_c1: crit.r_crit,
            delta: delta(params, j1)?,
            cm: center_manifold_coeffs(params, j1)?,
        })
    }

    /// Leading real eigenvalue at `(j1, 0, 1)` for Rayleigh number `r`.
    pub fn beta_of_r(&self, r: f64) -> Result<f64> {
        let p = self.params.with_rayleigh(r);
        let idx = WaveIndex::new(self.j1, 0, 1, &p)?;
        let b = eigen_triple(&p, &idx)?.beta1;
        if b.im != 0.0 {
            return Err(Error::Precondition(format!(
                "leading root at {idx} is complex ({b}) for R = {r}"
            )));
        }
        Ok(b.re)
    }

    /// `sqrt(−β/δ)`, the radius of the circle of bifurcated steady states.
    pub fn radius_pred(&self, r: f64) -> Result<f64> {
        if r < self.r_c1 * (1.0 - 1e-12) {
            return Err(Error::Precondition(format!(
                "predicted radius needs R >= R_c1 = {}, got {r}",
                self.r_c1
            )));
        }
        let b = self.beta_of_r(r)?.max(0.0);
        Ok((-b / self.delta).sqrt())
    }

    pub fn integrate(&self, r: f64, x0: f64, y0: f64, t_end: f64, dt: f64) -> Result<Vec<(f64, f64, f64)>> {
        integrate_amplitude(self.beta_of_r(r)?, self.delta, x0, y0, t_end, dt)
    }
}

pub fn predicted_radius(model: &AmplitudeModel, r: f64) -> Result<f64> {
    model.radius_pred(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steady() -> PhysicalParams {
        PhysicalParams::new(2.0, 1.0, 0.0, 5f64.sqrt(), 3.0).unwrap()
    }

    #[test]
    fn steady_example_delta() {
        let d = delta(&steady(), 1).unwrap();
        assert!((d + 0.08334).abs() < 1e-4, "{d}");
        let g = Grid::new(32, 16, steady().alpha1).unwrap();
        let q = delta_by_quadrature(&steady(), 1, g).unwrap();
        assert!((q - d).abs() < 1e-10 * d.abs(), "{q} vs {d}");
    }

    #[test]
    fn closed_form_table_matches_quadrature() {
        let p = steady().with_rayleigh(658.0);
        let g = Grid::new(16, 8, p.alpha1).unwrap();
        let t = interaction_integrals(&p, 1, 0.0).unwrap();
        let (q, rest) = interaction_by_quadrature(&p, 1, 0.0, g).unwrap();
        assert!(t.max_rel_diff(&q) < 1e-10, "{t:?}\n{q:?}");
        assert!(rest < 1e-10);
        let gamma2 = 5.0 + PI * PI;
        assert!((t.direct[0][0].t_sin2z + PI / (2.0 * gamma2)).abs() < 1e-12);
    }

    #[test]
    fn center_manifold_coefficients() {
        let c = center_manifold_coeffs(&steady(), 1).unwrap();
        assert!((c.thermal + 0.002676).abs() < 1e-6);
        assert!(c.vortical < 0.0);
        assert_eq!(c.phi_sin(0.0, 0.0), 0.0);
        assert_eq!(c.phi_thermal(0.0, 0.0), 0.0);
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(amplitude_rhs(0.0, 0.0, 0.3, -1.0), (0.0, 0.0));
        assert_eq!(amplitude_rhs(1.0, 0.0, -1.0, -1.0), (-2.0, 0.0));
        let (b, d) = (0.1, -0.0833);
        let r = (-b / d as f64).sqrt();
        let (x, y) = (r * 0.6, r * 0.8);
        let (dx, dy) = amplitude_rhs(x, y, b, d);
        assert!((x * dx + y * dy).abs() < 1e-15);
    }

    #[test]
    fn trajectory_reaches_the_circle() {
        let tr = integrate_amplitude(0.1, -0.0833, 0.01, 0.0, 300.0, 0.01).unwrap();
        let &(_, x, y) = tr.last().unwrap();
        assert!(((x * x + y * y).sqrt() - (0.1f64 / 0.0833).sqrt()).abs() < 1e-6);
        let a = 37f64.to_radians();
        let tr = integrate_amplitude(0.1, -0.0833, 0.01 * a.cos(), 0.01 * a.sin(), 300.0, 0.01).unwrap();
        for (_, x, y) in tr {
            assert!((y.atan2(x) - a).abs() < 1e-9);
        }
        let tr = integrate_amplitude(-0.2, -0.0833, 0.5, 0.5, 100.0, 0.01).unwrap();
        let &(_, x, y) = tr.last().unwrap();
        assert!(x.hypot(y) < 1e-8);
    }

    #[test]
    fn model_radius() {
        let m = AmplitudeModel::new(&steady(), 8, 8).unwrap();
        assert!(m.radius_pred(m.r_c1).unwrap() < 1e-6);
        let r = m.radius_pred(1.05 * m.r_c1).unwrap();
        assert!((r - 2.426).abs() < 2e-3, "{r}");
        assert!(m.radius_pred(0.95 * m.r_c1).is_err());
    }
}
