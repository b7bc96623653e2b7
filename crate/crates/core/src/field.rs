//! Grid fields and their Fourier representation on the parity-extended cell.
//!
//! A y-independent field `(u, v, w, T)` on `[0, Lx) × [0, 1]` with free-slip
//! walls extends to a doubly periodic field on `[0, Lx) × [0, 2)`: `u, v` even
//! in z, `w, T` odd in z. On that domain a plain 2-D FFT diagonalizes every
//! linear operator in the problem, and the boundary conditions hold by parity.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const U: usize = 0;
pub const V: usize = 1;
pub const W: usize = 2;
pub const T: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Vertical parity of `u, v, w, T`.
pub const Z_PARITY: [Parity; 4] = [Parity::Even, Parity::Even, Parity::Odd, Parity::Odd];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `nx` points in x over one period, `nz + 1` points on `[0, 1]` in z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub nz: usize,
    pub alpha1: f64,
}

impl Grid {
    pub fn new(nx: usize, nz: usize, alpha1: f64) -> Result<Self> {
        if nx < 4 || nx % 2 != 0 || nz < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs even nx >= 4 and nz >= 2, got {nx} x {nz}"
            )));
        }
        if !(alpha1.is_finite() && alpha1 > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha1 = {alpha1}")));
        }
        Ok(Self { nx, nz, alpha1 })
    }

    pub fn lx(&self) -> f64 {
        2.0 * PI / self.alpha1
    }

    /// Points per period of the extended z direction.
    pub fn nz2(&self) -> usize {
        2 * self.nz
    }

    /// Length of an extended (or spectral) array.
    pub fn len(&self) -> usize {
        self.nx * self.nz2()
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.lx() * ix as f64 / self.nx as f64
    }

    pub fn z(&self, iz: usize) -> f64 {
        iz as f64 / self.nz as f64
    }

    /// Signed x mode number of a spectral slot.
    pub fn jx(&self, i: usize) -> i64 {
        let j = (i / self.nz2()) as i64;
        let n = self.nx as i64;
        if j <= n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Signed z mode number of a spectral slot.
    pub fn mz(&self, i: usize) -> i64 {
        let m = (i % self.nz2()) as i64;
        let n = self.nz2() as i64;
        if m <= n / 2 {
            m
        } else {
            m - n
        }
    }

    /// Slot of mode `(j, m)` (negative numbers wrap).
    pub fn slot(&self, j: i64, m: i64) -> usize {
        let jx = j.rem_euclid(self.nx as i64) as usize;
        let mz = m.rem_euclid(self.nz2() as i64) as usize;
        jx * self.nz2() + mz
    }

    /// Slot of `(-j, -m)`.
    pub fn mirror(&self, i: usize) -> usize {
        let n2 = self.nz2();
        let (jx, mz) = (i / n2, i % n2);
        ((self.nx - jx) % self.nx) * n2 + (n2 - mz) % n2
    }

    /// Physical wavenumbers `(α₁ j, π m)`.
    pub fn wavevector(&self, i: usize) -> (f64, f64) {
        (self.alpha1 * self.jx(i) as f64, PI * self.mz(i) as f64)
    }

    fn is_nyquist(&self, i: usize) -> (bool, bool) {
        (
            self.jx(i) == self.nx as i64 / 2,
            self.mz(i) == self.nz as i64,
        )
    }

    /// Whether a mode survives the 2/3 truncation.
    pub fn resolved(&self, i: usize) -> bool {
        let jcut = (self.nx as i64 - 1) / 3;
        let mcut = (self.nz2() as i64 - 1) / 3;
        self.jx(i).abs() <= jcut && self.mz(i).abs() <= mcut
    }
}

/// Samples of `(u, v, w, T)` on the `nx × (nz + 1)` grid covering
/// `[0, Lx) × [0, 1]`, row-major in `[ix][iz]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOnGrid {
    pub grid: Grid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub t: Vec<f64>,
}

impl FieldOnGrid {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.nx * (grid.nz + 1);
        Self {
            grid,
            u: vec![0.0; n],
            v: vec![0.0; n],
            w: vec![0.0; n],
            t: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> [f64; 4]) -> Self {
        let mut out = Self::zeros(grid);
        for ix in 0..grid.nx {
            for iz in 0..=grid.nz {
                let s = f(grid.x(ix), grid.z(iz));
                let k = out.at(ix, iz);
                out.u[k] = s[U];
                out.v[k] = s[V];
                out.w[k] = s[W];
                out.t[k] = s[T];
            }
        }
        out
    }

    pub fn at(&self, ix: usize, iz: usize) -> usize {
        ix * (self.grid.nz + 1) + iz
    }

    pub fn components(&self) -> [&[f64]; 4] {
        [&self.u, &self.v, &self.w, &self.t]
    }

    pub fn components_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [&mut self.u, &mut self.v, &mut self.w, &mut self.t]
    }

    /// `∫∫ a·b` over `[0, Lx] × [0, 1]`, summed over the four components.
    /// Periodic rectangle rule in x, trapezoid rule in z; both are exact for
    /// the trigonometric products the grid resolves.
    pub fn inner(&self, other: &FieldOnGrid) -> f64 {
        let g = self.grid;
        let hx = g.lx() / g.nx as f64;
        let hz = 1.0 / g.nz as f64;
        let mut sum = 0.0;
        for (a, b) in self.components().iter().zip(other.components()) {
            for ix in 0..g.nx {
                for iz in 0..=g.nz {
                    let wz = if iz == 0 || iz == g.nz { 0.5 } else { 1.0 };
                    let k = ix * (g.nz + 1) + iz;
                    sum += wz * a[k] * b[k];
                }
            }
        }
        sum * hx * hz
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.components()
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `max |w|, |T|` on the walls `z = 0, 1`.
    pub fn wall_residual(&self) -> f64 {
        let g = self.grid;
        let mut m: f64 = 0.0;
        for ix in 0..g.nx {
            for iz in [0, g.nz] {
                let k = self.at(ix, iz);
                m = m.max(self.w[k].abs()).max(self.t[k].abs());
            }
        }
        m
    }

    pub fn scale(&mut self, a: f64) {
        for c in self.components_mut() {
            c.iter_mut().for_each(|x| *x *= a);
        }
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &FieldOnGrid) {
        for (c, o) in self.components_mut().into_iter().zip(other.components()) {
            c.iter_mut().zip(o).for_each(|(x, y)| *x += a * y);
        }
    }
}

/// A complex field stored as real and imaginary grid parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub re: FieldOnGrid,
    pub im: FieldOnGrid,
}

impl ComplexField {
    pub fn real(re: FieldOnGrid) -> Self {
        let im = FieldOnGrid::zeros(re.grid);
        Self { re, im }
    }

    /// Non-conjugating pairing `∫∫ a·b`.
    pub fn bilinear(&self, other: &ComplexField) -> Complex64 {
        Complex64::new(
            self.re.inner(&other.re) - self.im.inner(&other.im),
            self.re.inner(&other.im) + self.im.inner(&other.re),
        )
    }

    pub fn norm(&self) -> f64 {
        (self.re.inner(&self.re) + self.im.inner(&self.im))
            .max(0.0)
            .sqrt()
    }
}

/// Cached 2-D FFT plans for one grid.
#[derive(Clone)]
pub struct Transform {
    pub grid: Grid,
    fz: Arc<dyn Fft<f64>>,
    bz: Arc<dyn Fft<f64>>,
    fx: Arc<dyn Fft<f64>>,
    bx: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform").field("grid", &self.grid).finish()
    }
}

impl Transform {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            fz: planner.plan_fft_forward(grid.nz2()),
            bz: planner.plan_fft_inverse(grid.nz2()),
            fx: planner.plan_fft_forward(grid.nx),
            bx: planner.plan_fft_inverse(grid.nx),
        }
    }

    fn fft2(&self, buf: &mut [Complex64], inverse: bool) {
        let (nx, n2) = (self.grid.nx, self.grid.nz2());
        let (pz, px) = if inverse {
            (&self.bz, &self.bx)
        } else {
            (&self.fz, &self.fx)
        };
        pz.process(buf);
        let mut tr = vec![ZERO; buf.len()];
        for ix in 0..nx {
            for iz in 0..n2 {
                tr[iz * nx + ix] = buf[ix * n2 + iz];
            }
        }
        px.process(&mut tr);
        for ix in 0..nx {
            for iz in 0..n2 {
                buf[ix * n2 + iz] = tr[iz * nx + ix];
            }
        }
    }

    /// Coefficients of two real extended fields, normalized so that
    /// `f = Σ ĉ e^{i(α₁ j x + π m z)}`. Both fields go through one complex
    /// transform.
    pub fn forward_pair(&self, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let g = self.grid;
        let mut z: Vec<Complex64> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect();
        self.fft2(&mut z, false);
        let s = 1.0 / g.len() as f64;
        let mut ah = vec![ZERO; g.len()];
        let mut bh = vec![ZERO; g.len()];
        for i in 0..g.len() {
            let zm = z[g.mirror(i)].conj();
            ah[i] = (z[i] + zm) * (0.5 * s);
            bh[i] = (z[i] - zm) * Complex64::new(0.0, -0.5 * s);
        }
        (ah, bh)
    }

    /// Inverse of [`Transform::forward_pair`] for Hermitian coefficient sets.
    pub fn inverse_pair(&self, ah: &[Complex64], bh: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let mut z: Vec<Complex64> = ah
            .iter()
            .zip(bh)
            .map(|(&a, &b)| a + Complex64::new(-b.im, b.re))
            .collect();
        self.fft2(&mut z, true);
        (z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect())
    }
}

/// Parity extension of one component from `[0, 1]` to `[0, 2)`.
pub fn extend(grid: &Grid, half: &[f64], parity: Parity) -> Vec<f64> {
    let (nx, nz, n2) = (grid.nx, grid.nz, grid.nz2());
    let s = parity.sign();
    let mut out = vec![0.0; grid.len()];
    for ix in 0..nx {
        let row = &half[ix * (nz + 1)..(ix + 1) * (nz + 1)];
        for iz in 0..n2 {
            out[ix * n2 + iz] = if iz <= nz { row[iz] } else { s * row[n2 - iz] };
        }
    }
    out
}

/// Restriction of an extended component to `[0, 1]`.
pub fn restrict(grid: &Grid, ext: &[f64]) -> Vec<f64> {
    let (nx, nz, n2) = (grid.nx, grid.nz, grid.nz2());
    let mut out = Vec::with_capacity(nx * (nz + 1));
    for ix in 0..nx {
        out.extend_from_slice(&ext[ix * n2..ix * n2 + nz + 1]);
    }
    out
}

/// Fourier coefficients of `(u, v, w, T)` on the extended cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectral {
    pub grid: Grid,
    pub c: [Vec<Complex64>; 4],
}

impl Spectral {
    pub fn zeros(grid: Grid) -> Self {
        let z = vec![ZERO; grid.len()];
        Self {
            grid,
            c: [z.clone(), z.clone(), z.clone(), z],
        }
    }

    pub fn from_grid(field: &FieldOnGrid, tr: &Transform) -> Self {
        let g = field.grid;
        let ext: Vec<Vec<f64>> = field
            .components()
            .iter()
            .zip(Z_PARITY)
            .map(|(c, p)| extend(&g, c, p))
            .collect();
        let (u, v) = tr.forward_pair(&ext[U], &ext[V]);
        let (w, t) = tr.forward_pair(&ext[W], &ext[T]);
        Self {
            grid: g,
            c: [u, v, w, t],
        }
    }

    /// Extended physical samples of all four components.
    pub fn physical(&self, tr: &Transform) -> [Vec<f64>; 4] {
        let (u, v) = tr.inverse_pair(&self.c[U], &self.c[V]);
        let (w, t) = tr.inverse_pair(&self.c[W], &self.c[T]);
        [u, v, w, t]
    }

    pub fn to_grid(&self, tr: &Transform) -> FieldOnGrid {
        let g = self.grid;
        let [u, v, w, t] = self.physical(tr);
        FieldOnGrid {
            grid: g,
            u: restrict(&g, &u),
            v: restrict(&g, &v),
            w: restrict(&g, &w),
            t: restrict(&g, &t),
        }
    }

    /// Leray projection of `(u, w)` onto divergence-free fields, mode by mode.
    pub fn project(&mut self) {
        let g = self.grid;
        let [u, _, w, _] = &mut self.c;
        for i in 0..g.len() {
            let (kx, kz) = g.wavevector(i);
            let k2 = kx * kx + kz * kz;
            if k2 == 0.0 {
                continue;
            }
            let d = (u[i] * kx + w[i] * kz) / k2;
            u[i] -= d * kx;
            w[i] -= d * kz;
        }
    }

    /// Coefficients of `∂ₓu + ∂_z w`.
    pub fn divergence(&self) -> Vec<Complex64> {
        let g = self.grid;
        (0..g.len())
            .map(|i| {
                let (kx, kz) = g.wavevector(i);
                Complex64::new(0.0, 1.0) * (self.c[U][i] * kx + self.c[W][i] * kz)
            })
            .collect()
    }

    /// Max-norm of the divergence on the grid.
    pub fn divergence_max(&self, tr: &Transform) -> f64 {
        let d = self.divergence();
        let (p, _) = tr.inverse_pair(&d, &vec![ZERO; d.len()]);
        p.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Zeroes modes outside the 2/3-rule band.
    pub fn dealias(&mut self) {
        let g = self.grid;
        for c in self.c.iter_mut() {
            for (i, x) in c.iter_mut().enumerate() {
                if !g.resolved(i) {
                    *x = ZERO;
                }
            }
        }
    }

    /// Restores the vertical parity of each component.
    pub fn enforce_z_parity(&mut self) {
        let g = self.grid;
        for (c, p) in self.c.iter_mut().zip(Z_PARITY) {
            let s = p.sign();
            for i in 0..g.len() {
                let o = g.slot(g.jx(i), -g.mz(i));
                if o > i {
                    let a = (c[i] + c[o] * s) * 0.5;
                    c[i] = a;
                    c[o] = a * s;
                } else if o == i && s < 0.0 {
                    c[i] = ZERO;
                }
            }
        }
    }

    /// Projection onto `(u,v,w,T)(-x,z) = (-u,-v,w,T)(x,z)`.
    pub fn enforce_x_symmetry(&mut self) {
        let g = self.grid;
        for (q, c) in self.c.iter_mut().enumerate() {
            let s = if q == U || q == V { -1.0 } else { 1.0 };
            for i in 0..g.len() {
                let o = g.slot(-g.jx(i), g.mz(i));
                if o > i {
                    let a = (c[i] + c[o] * s) * 0.5;
                    c[i] = a;
                    c[o] = a * s;
                } else if o == i && s < 0.0 {
                    c[i] = ZERO;
                }
            }
        }
    }

    /// Distance from the symmetric subspace: max coefficient of the
    /// antisymmetric part.
    pub fn antisymmetric_residual(&self) -> f64 {
        let mut sym = self.clone();
        sym.enforce_x_symmetry();
        self.c
            .iter()
            .zip(&sym.c)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    /// Zero horizontal mean flow.
    pub fn remove_mean_flow(&mut self) {
        let o = self.grid.slot(0, 0);
        self.c[U][o] = ZERO;
        self.c[V][o] = ZERO;
    }

    /// Makes the coefficients those of a real field.
    pub fn make_hermitian(&mut self) {
        let g = self.grid;
        for c in self.c.iter_mut() {
            for i in 0..g.len() {
                let o = g.mirror(i);
                if o >= i {
                    let a = (c[i] + c[o].conj()) * 0.5;
                    c[i] = a;
                    c[o] = a.conj();
                }
            }
        }
    }

    /// `∫∫ a·b` over `[0, Lx] × [0, 1]` by Parseval.
    pub fn inner(&self, other: &Spectral) -> f64 {
        let g = self.grid;
        let mut s = 0.0;
        for (a, b) in self.c.iter().zip(&other.c) {
            for i in 0..g.len() {
                s += (a[i] * b[g.mirror(i)]).re;
            }
        }
        s * g.lx()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.c
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, x| m.max(x.norm()))
    }

    pub fn scale(&mut self, a: f64) {
        for c in self.c.iter_mut() {
            c.iter_mut().for_each(|x| *x *= a);
        }
    }

    pub fn axpy(&mut self, a: f64, other: &Spectral) {
        for (c, o) in self.c.iter_mut().zip(&other.c) {
            c.iter_mut().zip(o).for_each(|(x, y)| *x += y * a);
        }
    }

    /// Random real, divergence-free field with parity-consistent modes
    /// `|j| ≤ max_j`, `|m| ≤ max_m`, and no mean flow.
    pub fn random(grid: Grid, rng: &mut impl Rng, max_j: i64, max_m: i64) -> Self {
        let mut s = Self::zeros(grid);
        for c in s.c.iter_mut() {
            for j in -max_j..=max_j {
                for m in -max_m..=max_m {
                    c[grid.slot(j, m)] =
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
        }
        s.make_hermitian();
        s.enforce_z_parity();
        s.project();
        s.remove_mean_flow();
        s
    }
}

/// Multiplies coefficients by `i α₁ j` (Nyquist column zeroed).
pub fn dx(grid: &Grid, c: &[Complex64]) -> Vec<Complex64> {
    (0..grid.len())
        .map(|i| {
            if grid.is_nyquist(i).0 {
                ZERO
            } else {
                c[i] * Complex64::new(0.0, grid.wavevector(i).0)
            }
        })
        .collect()
}

/// Multiplies coefficients by `i π m` (Nyquist row zeroed).
pub fn dz(grid: &Grid, c: &[Complex64]) -> Vec<Complex64> {
    (0..grid.len())
        .map(|i| {
            if grid.is_nyquist(i).1 {
                ZERO
            } else {
                c[i] * Complex64::new(0.0, grid.wavevector(i).1)
            }
        })
        .collect()
}

/// The quadratic term `G(a, b) = -P[(a·∇) b]`, with the velocity part
/// projected and, optionally, the result truncated by the 2/3 rule.
pub fn advect(a: &Spectral, b: &Spectral, tr: &Transform, dealias: bool) -> Spectral {
    let g = a.grid;
    let (au, aw) = tr.inverse_pair(&a.c[U], &a.c[W]);
    let mut prod: [Vec<f64>; 4] = Default::default();
    for pair in [[U, V], [W, T]] {
        let bx0 = dx(&g, &b.c[pair[0]]);
        let bx1 = dx(&g, &b.c[pair[1]]);
        let bz0 = dz(&g, &b.c[pair[0]]);
        let bz1 = dz(&g, &b.c[pair[1]]);
        let (px0, px1) = tr.inverse_pair(&bx0, &bx1);
        let (pz0, pz1) = tr.inverse_pair(&bz0, &bz1);
        for (q, (px, pz)) in [(pair[0], (&px0, &pz0)), (pair[1], (&px1, &pz1))] {
            prod[q] = (0..g.len())
                .map(|i| -(au[i] * px[i] + aw[i] * pz[i]))
                .collect();
        }
    }
    let (u, v) = tr.forward_pair(&prod[U], &prod[V]);
    let (w, t) = tr.forward_pair(&prod[W], &prod[T]);
    let mut out = Spectral {
        grid: g,
        c: [u, v, w, t],
    };
    out.project();
    if dealias {
        out.dealias();
    }
    out
}
