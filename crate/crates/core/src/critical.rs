//! Critical Rayleigh numbers for steady and oscillatory onset, the uniqueness
//! conditions on the critical wavenumber, and exchange-of-stability scans.

use std::fmt;

use log::debug;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{PhysicalParams, SpaceFlag, Truncation, WaveIndex, PI2};
use crate::spectrum::{cubic_coeffs, growth_rate, growth_rate_over, spectrum_at};

/// Relative gap below which two lattice thresholds count as tied.
pub const TIE_TOL: f64 = 1e-9;

/// `((x + π²)³ + b) / x`, the neutral Rayleigh number as a function of `α²`.
pub fn f_b(x: f64, b: f64) -> f64 {
    let s = x + PI2;
    (s * s * s + b) / x
}

fn stationarity(x: f64, b: f64) -> f64 {
    let s = x + PI2;
    (2.0 * x - PI2) * s * s - b
}

/// Unique minimizer of `f_b` on `x > 0`: the root of `(2x − π²)(x + π²)² = b`.
pub fn x_star(b: f64) -> Result<f64> {
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::Precondition(format!("x_star needs finite b >= 0, got {b}")));
    }
    let lo0 = PI2 / 2.0;
    if b == 0.0 {
        return Ok(lo0);
    }
    let (mut lo, mut hi) = (lo0, lo0 + (b / 2.0).cbrt() + PI2);
    while stationarity(hi, b) < 0.0 {
        hi *= 2.0;
    }
    // The left side is increasing on (π²/2, ∞): Newton with a bisection fallback.
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let g = stationarity(x, b);
        if g == 0.0 {
            return Ok(x);
        }
        if g < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let s = x + PI2;
        let dg = 2.0 * s * s + 2.0 * (2.0 * x - PI2) * s;
        let newton = x - g / dg;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        x = next;
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let best = [lo, x, hi]
        .into_iter()
        .min_by(|p, q| stationarity(*p, b).abs().total_cmp(&stationarity(*q, b).abs()))
        .unwrap_or(x);
    Ok(best)
}

/// Samples of `f_b` with its minimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeutralCurve {
    pub b: f64,
    pub samples: Vec<(f64, f64)>,
    pub x_star: f64,
}

pub fn neutral_curve(b: f64, xs: &[f64]) -> Result<NeutralCurve> {
    if xs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Precondition("neutral curve abscissae must be > 0".into()));
    }
    Ok(NeutralCurve {
        b,
        samples: xs.iter().map(|&x| (x, f_b(x, b))).collect(),
        x_star: x_star(b)?,
    })
}

/// `π²/(σ²Ro²)`, the offset of the steady neutral curve.
pub fn steady_offset(params: &PhysicalParams) -> f64 {
    PI2 / (params.sigma * params.sigma * params.ro * params.ro)
}

/// `π²/((σ+1)²Ro²)`, the offset of the oscillatory neutral curve.
pub fn hopf_offset(params: &PhysicalParams) -> f64 {
    let s1 = params.sigma + 1.0;
    PI2 / (s1 * s1 * params.ro * params.ro)
}

/// Rayleigh number at which the constant term of the cubic at `idx` vanishes.
pub fn steady_threshold(params: &PhysicalParams, idx: &WaveIndex) -> f64 {
    let (s, ro) = (params.sigma, params.ro);
    idx.gamma_sq.powi(3) / idx.alpha_sq + idx.vertical_sq() / (s * s * ro * ro * idx.alpha_sq)
}

/// Rayleigh number at which the cubic at `idx` has a purely imaginary pair.
pub fn hopf_threshold(params: &PhysicalParams, idx: &WaveIndex) -> f64 {
    let (s1, ro) = (params.sigma + 1.0, params.ro);
    2.0 * s1 * idx.gamma_sq.powi(3) / idx.alpha_sq
        + 2.0 * idx.vertical_sq() / (s1 * ro * ro * idx.alpha_sq)
}

/// Closed form of `R_c1` when the minimum sits at `(j1, 0, 1)`.
pub fn steady_closed_form(params: &PhysicalParams, j1: i64) -> f64 {
    f_b(params.alpha_sq(j1, 0), steady_offset(params))
}

/// Upper bound on `Ro²` for the oscillatory branch at `idx` to be reachable.
pub fn hopf_rossby_bound(params: &PhysicalParams, idx: &WaveIndex) -> f64 {
    let s = params.sigma;
    (1.0 - s) * idx.vertical_sq() / (s * s * (1.0 + s) * idx.gamma_sq.powi(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Onset {
    Steady,
    Hopf,
}

impl fmt::Display for Onset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Onset::Steady => "steady",
            Onset::Hopf => "hopf",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalResult {
    pub r_crit: f64,
    pub onset: Onset,
    pub argmin: WaveIndex,
    /// Every scanned index whose threshold is within [`TIE_TOL`] of the minimum.
    pub minimizers: Vec<WaveIndex>,
    /// Minimum attained at a single index, and that index has `k = 0`.
    pub unique: bool,
    pub hopf_admissible: Option<bool>,
    pub hopf_freq: Option<f64>,
}

fn scan_minimum(
    params: &PhysicalParams,
    jmax: i64,
    kmax: i64,
    threshold: impl Fn(&PhysicalParams, &WaveIndex) -> f64 + Sync,
) -> Result<(WaveIndex, f64, Vec<WaveIndex>)> {
    if jmax < 1 || kmax < 0 {
        return Err(Error::Precondition(format!(
            "critical scans need jmax >= 1 and kmax >= 0, got ({jmax}, {kmax})"
        )));
    }
    let mut pts = Vec::new();
    for j in 0..=jmax {
        for k in -kmax..=kmax {
            if (j == 0 && k <= 0) || (j, k) == (0, 0) {
                continue;
            }
            pts.push(WaveIndex::new(j, k, 1, params)?);
        }
    }
    let vals: Vec<f64> = pts.par_iter().map(|w| threshold(params, w)).collect();
    let mut best = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v < vals[best] {
            best = i;
        }
    }
    let vmin = vals[best];
    let ties: Vec<WaveIndex> = pts
        .iter()
        .zip(&vals)
        .filter(|(_, v)| (*v - vmin).abs() <= TIE_TOL * vmin.abs())
        .map(|(w, _)| *w)
        .collect();
    let arg = pts[best];
    if arg.j == jmax || (kmax > 0 && arg.k.abs() == kmax) {
        return Err(Error::TruncationTooSmall { index: arg });
    }
    Ok((arg, vmin, ties))
}

/// Steady critical Rayleigh number over `(j, k, 1)`, `j ≤ jmax`, `|k| ≤ kmax`.
pub fn rc1(params: &PhysicalParams, jmax: i64, kmax: i64) -> Result<CriticalResult> {
    let (argmin, r, ties) = scan_minimum(params, jmax, kmax, steady_threshold)?;
    debug!("R_c1 = {r} at {argmin}, {} minimizer(s)", ties.len());
    Ok(CriticalResult {
        r_crit: r,
        onset: Onset::Steady,
        argmin,
        unique: ties.len() == 1 && argmin.k == 0,
        minimizers: ties,
        hopf_admissible: None,
        hopf_freq: None,
    })
}

/// Oscillatory critical Rayleigh number; requires `σ < 1`.
pub fn rc2(params: &PhysicalParams, jmax: i64, kmax: i64) -> Result<CriticalResult> {
    if !(params.sigma < 1.0) {
        return Err(Error::SigmaOutOfRange(params.sigma));
    }
    let (argmin, r, ties) = scan_minimum(params, jmax, kmax, hopf_threshold)?;
    let at = params.with_rayleigh(r);
    let c = cubic_coeffs(&at, &argmin)?;
    let a2 = c.c0 / ((2.0 * params.sigma + 1.0) * argmin.gamma_sq);
    let admissible = params.ro * params.ro < hopf_rossby_bound(params, &argmin);
    debug!("R_c2 = {r} at {argmin}, a^2 = {a2}, admissible = {admissible}");
    Ok(CriticalResult {
        r_crit: r,
        onset: Onset::Hopf,
        argmin,
        unique: ties.len() == 1 && argmin.k == 0,
        minimizers: ties,
        hopf_admissible: Some(admissible),
        hopf_freq: (a2 > 0.0).then(|| a2.sqrt()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionStatus {
    Holds,
    HoldsGenerically,
    Fails,
}

impl fmt::Display for ConditionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionStatus::Holds => "holds",
            ConditionStatus::HoldsGenerically => "holds_generically",
            ConditionStatus::Fails => "fails",
        })
    }
}

/// Outcome of a sufficient condition for a unique critical index `(j_c, 0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub status: ConditionStatus,
    pub x_star: f64,
    /// Critical `j` when the condition holds.
    pub j_crit: Option<i64>,
    /// Minimizing `(j, k)` pairs of the lattice scan when it fails.
    pub witness: Vec<(i64, i64)>,
}

fn unique_wavenumber_condition(
    params: &PhysicalParams,
    b: f64,
    threshold: impl Fn(&PhysicalParams, &WaveIndex) -> f64 + Sync,
) -> Result<ConditionCheck> {
    let xb = x_star(b)?;
    let (a1, a2) = (params.alpha_sq(1, 0), params.alpha_sq(0, 1));
    let done = |status, j| ConditionCheck {
        status,
        x_star: xb,
        j_crit: Some(j),
        witness: vec![],
    };
    if xb <= a1 && a1 < a2 {
        return Ok(done(ConditionStatus::Holds, 1));
    }
    // Boundary cases such as α₁² = x_b/5 should survive rounding of α₁².
    let generic_shape = a1 <= xb / 5.0 * (1.0 + 1e-12) && 2.0 * xb < a2;
    if generic_shape {
        let js = (xb / a1).sqrt().floor() as i64;
        let (lo, hi) = (f_b(params.alpha_sq(js, 0), b), f_b(params.alpha_sq(js + 1, 0), b));
        if (lo - hi).abs() > TIE_TOL * lo.min(hi) {
            let j = if lo < hi { js } else { js + 1 };
            return Ok(done(ConditionStatus::HoldsGenerically, j));
        }
    }
    // Report the actual minimizers over a box that contains them.
    let reach = (4.0 * xb + 4.0 * PI2).sqrt();
    let jmax = (reach / params.alpha1).ceil() as i64 + 2;
    let kmax = (reach / params.alpha2).ceil() as i64 + 2;
    let (_, _, ties) = scan_minimum(params, jmax, kmax, threshold)?;
    Ok(ConditionCheck {
        status: ConditionStatus::Fails,
        x_star: xb,
        j_crit: None,
        witness: ties.iter().map(|w| (w.j, w.k)).collect(),
    })
}

/// Sufficient condition for a unique steady critical index; requires `σ > 1`.
pub fn check_c6(params: &PhysicalParams) -> Result<ConditionCheck> {
    if !(params.sigma > 1.0) {
        return Err(Error::Precondition(format!(
            "steady uniqueness check needs sigma > 1, got {}",
            params.sigma
        )));
    }
    unique_wavenumber_condition(params, steady_offset(params), steady_threshold)
}

/// Sufficient condition for a unique oscillatory critical index; requires `σ < 1`.
pub fn check_c7(params: &PhysicalParams) -> Result<ConditionCheck> {
    if !(params.sigma < 1.0) {
        return Err(Error::Precondition(format!(
            "oscillatory uniqueness check needs sigma < 1, got {}",
            params.sigma
        )));
    }
    unique_wavenumber_condition(params, hopf_offset(params), hopf_threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PesRow {
    pub r: f64,
    pub re_beta: f64,
    pub im_beta: f64,
    pub index: WaveIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PesScan {
    pub rows: Vec<PesRow>,
    /// First pair of consecutive samples across which the leading real part
    /// changes sign from non-positive to positive.
    pub bracket: Option<(f64, f64)>,
}

/// Leading eigenvalue on a uniform grid of Rayleigh numbers, over the truncated
/// lattice or over `only` when given.
pub fn pes_scan(
    params: &PhysicalParams,
    r_lo: f64,
    r_hi: f64,
    n: usize,
    space: SpaceFlag,
    trunc: Truncation,
    only: Option<&[WaveIndex]>,
) -> Result<PesScan> {
    if !(r_lo < r_hi) || n < 3 || r_lo < 0.0 {
        return Err(Error::Precondition(format!(
            "pes_scan needs 0 <= r_lo < r_hi and n >= 3, got [{r_lo}, {r_hi}], n = {n}"
        )));
    }
    let rs: Vec<f64> = (0..n)
        .map(|i| r_lo + (r_hi - r_lo) * i as f64 / (n - 1) as f64)
        .collect();
    let rows = rs
        .par_iter()
        .map(|&r| {
            let p = params.with_rayleigh(r);
            let g = match only {
                Some(idx) => growth_rate_over(&p, idx, space)?,
                None => growth_rate(&p, trunc, space)?,
            };
            Ok(PesRow {
                r,
                re_beta: g.beta.re,
                im_beta: g.beta.im,
                index: g.index,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bracket = rows
        .windows(2)
        .find(|w| w[0].re_beta <= 0.0 && w[1].re_beta > 0.0)
        .map(|w| (w[0].r, w[1].r));
    Ok(PesScan { rows, bracket })
}

/// All eigenvalues at one index, for reporting.
pub fn spectrum_table(
    params: &PhysicalParams,
    idx: &WaveIndex,
    space: SpaceFlag,
) -> Result<Vec<Complex64>> {
    Ok(spectrum_at(params, idx, space)?.iter().map(|e| e.beta).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub ro: f64,
    pub b: f64,
    pub x_star: f64,
    /// `min_x f_b(x)` over the continuum.
    pub r_continuous: f64,
    /// `min f_b(α²)` over lattice wavenumbers.
    pub r_lattice: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Asymptotics {
    /// Least-squares slope of `ln R_c1` against `ln Ro` (continuous minimum).
    pub slope: f64,
    pub slope_lattice: f64,
    pub rows: Vec<AsymptoticRow>,
}

/// Minimum of the unimodal `f_b` over `{j²α₁² + k²α₂²} \ {0}`.
fn lattice_minimum(b: f64, alpha1: f64, alpha2: f64, xb: f64) -> f64 {
    let (q1, q2) = (alpha1 * alpha1, alpha2 * alpha2);
    let mut best = f64::INFINITY;
    let mut k = 0i64;
    loop {
        let base = (k * k) as f64 * q2;
        if base > xb {
            // j = 0 with the smallest such k; larger k only increase f_b.
            best = best.min(f_b(base, b));
            break;
        }
        let js = ((xb - base) / q1).sqrt().floor() as i64;
        for j in [js, js + 1] {
            let x = base + (j * j) as f64 * q1;
            if x > 0.0 {
                best = best.min(f_b(x, b));
            }
        }
        k += 1;
    }
    best
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Scaling of the steady critical Rayleigh number with the Rossby number.
pub fn ro_asymptotics(sigma: f64, alpha1: f64, alpha2: f64, ro_list: &[f64]) -> Result<Asymptotics> {
    if !(sigma > 1.0) {
        return Err(Error::Precondition(format!(
            "asymptotics need sigma > 1, got {sigma}"
        )));
    }
    if ro_list.len() < 4 {
        return Err(Error::Precondition(format!(
            "need at least 4 Rossby numbers, got {}",
            ro_list.len()
        )));
    }
    if ro_list.iter().any(|r| !(r.is_finite() && *r > 0.0))
        || ro_list.windows(2).any(|w| !(w[1] < w[0]))
    {
        return Err(Error::Precondition(
            "Rossby numbers must be positive and strictly decreasing".into(),
        ));
    }
    let span = (ro_list[0] / ro_list[ro_list.len() - 1]).log10();
    if span < 2.0 - 1e-12 {
        return Err(Error::Precondition(format!(
            "Rossby numbers must span at least 2 decades, got {span:.3}"
        )));
    }
    let rows = ro_list
        .iter()
        .map(|&ro| {
            let b = PI2 / (sigma * sigma * ro * ro);
            let xb = x_star(b)?;
            Ok(AsymptoticRow {
                ro,
                b,
                x_star: xb,
                r_continuous: f_b(xb, b),
                r_lattice: lattice_minimum(b, alpha1, alpha2, xb),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = rows.iter().map(|r| r.ro.ln()).collect();
    let lc: Vec<f64> = rows.iter().map(|r| r.r_continuous.ln()).collect();
    let ll: Vec<f64> = rows.iter().map(|r| r.r_lattice.ln()).collect();
    Ok(Asymptotics {
        slope: ls_slope(&lx, &lc),
        slope_lattice: ls_slope(&lx, &ll),
        rows,
    })
}

/// A named onset type: its neutral threshold, lattice minimization and
/// uniqueness condition.
pub trait OnsetCriterion: Send + Sync {
    fn name(&self) -> &'static str;
    fn onset(&self) -> Onset;
    fn threshold(&self, params: &PhysicalParams, idx: &WaveIndex) -> f64;
    fn critical(&self, params: &PhysicalParams, jmax: i64, kmax: i64) -> Result<CriticalResult>;
    fn condition(&self, params: &PhysicalParams) -> Result<ConditionCheck>;
}

pub struct SteadyOnset;
pub struct HopfOnset;

impl OnsetCriterion for SteadyOnset {
    fn name(&self) -> &'static str {
        "steady"
    }
    fn onset(&self) -> Onset {
        Onset::Steady
    }
    fn threshold(&self, params: &PhysicalParams, idx: &WaveIndex) -> f64 {
        steady_threshold(params, idx)
    }
    fn critical(&self, params: &PhysicalParams, jmax: i64, kmax: i64) -> Result<CriticalResult> {
        rc1(params, jmax, kmax)
    }
    fn condition(&self, params: &PhysicalParams) -> Result<ConditionCheck> {
        check_c6(params)
    }
}

impl OnsetCriterion for HopfOnset {
    fn name(&self) -> &'static str {
        "hopf"
    }
    fn onset(&self) -> Onset {
        Onset::Hopf
    }
    fn threshold(&self, params: &PhysicalParams, idx: &WaveIndex) -> f64 {
        hopf_threshold(params, idx)
    }
    fn critical(&self, params: &PhysicalParams, jmax: i64, kmax: i64) -> Result<CriticalResult> {
        rc2(params, jmax, kmax)
    }
    fn condition(&self, params: &PhysicalParams) -> Result<ConditionCheck> {
        check_c7(params)
    }
}

pub const ONSET_NAMES: [&str; 2] = ["steady", "hopf"];

pub fn onset_criterion(name: &str) -> Result<Box<dyn OnsetCriterion>> {
    match name {
        "steady" => Ok(Box::new(SteadyOnset)),
        "hopf" => Ok(Box::new(HopfOnset)),
        other => Err(Error::UnknownStrategy {
            kind: "onset criterion",
            name: other.to_string(),
            available: ONSET_NAMES.join(", "),
        }),
    }
}
