//! Monic cubics `β³ + c2 β² + c1 β + c0` and their roots.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::WaveIndex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoeffs {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl CubicCoeffs {
    pub fn new(c2: f64, c1: f64, c0: f64) -> Self {
        Self { c2, c1, c0 }
    }

    pub fn eval(&self, b: Complex64) -> Complex64 {
        ((b + self.c2) * b + self.c1) * b + self.c0
    }

    pub fn derivative(&self, b: Complex64) -> Complex64 {
        (b * 3.0 + 2.0 * self.c2) * b + self.c1
    }

    /// `1 + max |c_i|`, the reference magnitude for Vieta residuals.
    pub fn scale(&self) -> f64 {
        1.0 + self.c2.abs().max(self.c1.abs()).max(self.c0.abs())
    }

    fn is_finite(&self) -> bool {
        self.c2.is_finite() && self.c1.is_finite() && self.c0.is_finite()
    }
}

/// The three zeros of a cubic, ordered by descending real part (ties broken by
/// descending imaginary part).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenTriple {
    pub beta1: Complex64,
    pub beta2: Complex64,
    pub beta3: Complex64,
    pub index: Option<WaveIndex>,
}

impl EigenTriple {
    pub fn roots(&self) -> [Complex64; 3] {
        [self.beta1, self.beta2, self.beta3]
    }

    /// Absolute Vieta residuals `(|Σβ + c2|, |Σβᵢβⱼ - c1|, |Πβ + c0|)`.
    pub fn vieta_residuals(&self, c: &CubicCoeffs) -> (f64, f64, f64) {
        let [a, b, d] = self.roots();
        (
            (a + b + d + c.c2).norm(),
            (a * b + a * d + b * d - c.c1).norm(),
            (a * b * d + c.c0).norm(),
        )
    }

    pub fn with_index(mut self, index: WaveIndex) -> Self {
        self.index = Some(index);
        self
    }
}

/// Companion-matrix eigenvalues of the rescaled cubic, without polishing.
///
/// With `β = s μ`, `s = max(|c2|, |c1|^½, |c0|^⅓)`, the cubic in `μ` has O(1)
/// coefficients, which keeps the Schur iteration accurate when the raw
/// coefficients span many decades (small Rossby numbers).
pub fn companion_eigenvalues(c: &CubicCoeffs) -> [Complex64; 3] {
    let s = c.c2.abs().max(c.c1.abs().sqrt()).max(c.c0.abs().cbrt());
    if s == 0.0 {
        return [Complex64::new(0.0, 0.0); 3];
    }
    let (a2, a1, a0) = (c.c2 / s, c.c1 / (s * s), c.c0 / (s * s * s));
    #[rustfmt::skip]
    let m = Matrix3::new(
        -a2, -a1, -a0,
        1.0, 0.0, 0.0,
        0.0, 1.0, 0.0,
    );
    let ev = m.complex_eigenvalues();
    [ev[0] * s, ev[1] * s, ev[2] * s]
}

fn newton_polish(c: &CubicCoeffs, mut b: Complex64, real: bool) -> Complex64 {
    let mut res = c.eval(b).norm();
    for _ in 0..3 {
        let d = c.derivative(b);
        if d.norm() == 0.0 || res == 0.0 {
            break;
        }
        let mut next = b - c.eval(b) / d;
        if real {
            next.im = 0.0;
        }
        let next_res = c.eval(next).norm();
        if !(next_res < res) {
            break;
        }
        b = next;
        res = next_res;
    }
    b
}

pub fn solve_cubic(c: &CubicCoeffs) -> Result<EigenTriple> {
    if !c.is_finite() {
        return Err(Error::NonConvergence(format!(
            "non-finite coefficients {c:?}"
        )));
    }
    let mut ev = companion_eigenvalues(c);
    // A real cubic always has a real zero: take the one closest to the axis.
    ev.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));
    let s = c.c2.abs().max(c.c1.abs().sqrt()).max(c.c0.abs().cbrt()).max(1.0);
    let real_root = newton_polish(c, Complex64::new(ev[0].re, 0.0), true);
    let (b, d) = (ev[1], ev[2]);
    let pair_is_real = b.im.abs().max(d.im.abs()) <= 1e-13 * s;
    let rest = if pair_is_real {
        [
            newton_polish(c, Complex64::new(b.re, 0.0), true),
            newton_polish(c, Complex64::new(d.re, 0.0), true),
        ]
    } else {
        // Symmetrize the conjugate pair before polishing the upper member.
        let upper = if b.im > 0.0 { b } else { d };
        let lower = if b.im > 0.0 { d } else { b };
        let mid = (upper + lower.conj()) * 0.5;
        let p = newton_polish(c, mid, false);
        let p = if p.im < 0.0 { p.conj() } else { p };
        [p, p.conj()]
    };
    let mut roots = [real_root, rest[0], rest[1]];
    if roots.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(Error::NonConvergence(format!("roots {roots:?} for {c:?}")));
    }
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(EigenTriple {
        beta1: roots[0],
        beta2: roots[1],
        beta3: roots[2],
        index: None,
    })
}
