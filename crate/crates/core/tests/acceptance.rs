//! Acceptance criteria, one test each. Every test prints a single
//! `PASS`/`FAIL` line and asserts at the stated tolerance. Reference values
//! come from the oracles in this file, not from the library.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rotabouss::critical::{rc1, rc2, ro_asymptotics};
use rotabouss::field::{advect, FieldOnGrid, Grid, Spectral, Transform};
use rotabouss::reduction::{delta, interaction_integrals, ModeProjection};
use rotabouss::simulator::{self, measure_period, translate_x, Outcome, SimConfig, SimState, Simulator};
use rotabouss::spectrum::{
    assemble_dual, assemble_eigenvector, cubic_coeffs, eigen_triple, linear_residual, solve_cubic,
    spectrum_at, EigenVariant,
};
use rotabouss::verify::linear_growth;
use rotabouss::{lattice, PhysicalParams, SpaceFlag, Truncation, WaveIndex};

const PI2: f64 = PI * PI;

/// Writes to the stdout handle directly so the line survives test-output capture.
fn say(line: String) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn report(n: u32, name: &str, passed: bool, detail: String) {
    say(format!("{} criterion {n:>2} ({name}): {detail}", if passed { "PASS" } else { "FAIL" }));
    assert!(passed, "criterion {n} ({name}) failed: {detail}");
}

// ---------------------------------------------------------------- oracles

/// Roots of `β³ + c2β² + c1β + c0` by Cardano's formula with Newton polishing,
/// ordered by descending real part, then descending imaginary part.
fn cardano(c2: f64, c1: f64, c0: f64) -> [Complex64; 3] {
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2.powi(3) / 27.0 - c2 * c1 / 3.0 + c0;
    let disc = Complex64::new(q * q / 4.0 + p.powi(3) / 27.0, 0.0);
    let s = disc.sqrt();
    let (a, b) = (-q / 2.0 + s, -q / 2.0 - s);
    let u = if a.norm() >= b.norm() { a } else { b }.powf(1.0 / 3.0);
    let v = if u.norm() > 0.0 { -p / (3.0 * u) } else { Complex64::new(0.0, 0.0) };
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut r = [u + v, w * u + w.conj() * v, w.conj() * u + w * v].map(|t| t - c2 / 3.0);
    for x in r.iter_mut() {
        for _ in 0..4 {
            let f = ((*x + c2) * *x + c1) * *x + c0;
            let d = (*x * 3.0 + 2.0 * c2) * *x + c1;
            if d.norm() > 0.0 {
                *x -= f / d;
            }
        }
        if x.im.abs() < 1e-12 * x.norm().max(1.0) {
            x.im = 0.0;
        }
    }
    r.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap().then(b.im.partial_cmp(&a.im).unwrap()));
    r
}

/// Coefficients of the `(j, k, l)` cubic written out from the model.
fn raw_cubic(p: &PhysicalParams, j: i64, k: i64, l: i64, r: f64) -> (f64, f64, f64) {
    let a2 = (j as f64 * p.alpha1).powi(2) + (k as f64 * p.alpha2).powi(2);
    let lp2 = (l * l) as f64 * PI2;
    let g2 = a2 + lp2;
    let (s, ro) = (p.sigma, p.ro);
    (
        (2.0 * s + 1.0) * g2,
        (s * s + 2.0 * s) * g2 * g2 + lp2 / (ro * ro * g2) - s * r * a2 / g2,
        s * s * g2.powi(3) - s * s * r * a2 + lp2 / (ro * ro),
    )
}

fn fb(x: f64, b: f64) -> f64 {
    ((x + PI2).powi(3) + b) / x
}

/// Minimizer of `fb` by bisection on its derivative's numerator.
fn xb(b: f64) -> f64 {
    let g = |x: f64| (2.0 * x - PI2) * (x + PI2).powi(2) - b;
    let (mut lo, mut hi) = (PI2 / 2.0, PI2 / 2.0 + 1.0);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if g(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

fn steady_params() -> PhysicalParams {
    PhysicalParams::new(2.0, 1.0, 0.0, 5f64.sqrt(), 3.0).unwrap()
}

fn hopf_params() -> PhysicalParams {
    PhysicalParams::new(0.5, 0.04, 0.0, 1.0, 4.5).unwrap()
}

fn steady_offset(p: &PhysicalParams) -> f64 {
    PI2 / (p.sigma * p.ro).powi(2)
}

/// Brute-force minimum of the steady threshold over `j ≤ 12, |k| ≤ 8`.
fn brute_rc1(p: &PhysicalParams) -> (f64, (i64, i64)) {
    let b = steady_offset(p);
    let mut best = (f64::INFINITY, (0, 0));
    for j in 0..=12i64 {
        for k in 0..=8i64 {
            if j == 0 && k == 0 {
                continue;
            }
            let x = (j as f64 * p.alpha1).powi(2) + (k as f64 * p.alpha2).powi(2);
            let v = fb(x, b);
            if v < best.0 {
                best = (v, (j, k));
            }
        }
    }
    best
}

fn brute_rc2(p: &PhysicalParams) -> (f64, (i64, i64)) {
    let b = PI2 / ((p.sigma + 1.0) * p.ro).powi(2);
    let mut best = (f64::INFINITY, (0, 0));
    for j in 0..=12i64 {
        for k in 0..=8i64 {
            if j == 0 && k == 0 {
                continue;
            }
            let x = (j as f64 * p.alpha1).powi(2) + (k as f64 * p.alpha2).powi(2);
            let v = 2.0 * (p.sigma + 1.0) * fb(x, b);
            if v < best.0 {
                best = (v, (j, k));
            }
        }
    }
    best
}

fn sample_admissible(rng: &mut StdRng) -> PhysicalParams {
    let sigma = 1.0 + rng.gen_range(1e-6..=9.0);
    let ro = 10f64.powf(rng.gen_range(0.05f64.log10()..=1.0));
    let b = PI2 / (sigma * ro).powi(2);
    let a1sq = xb(b) * rng.gen_range(1.0..3.0);
    let a2sq = a1sq * rng.gen_range(1.05..3.0);
    PhysicalParams::new(sigma, ro, 0.0, a1sq.sqrt(), a2sq.sqrt()).unwrap()
}

/// The cubic coefficient for `j₁ = 1` from the parameters alone.
fn delta_oracle(p: &PhysicalParams) -> f64 {
    let (s, ro) = (p.sigma, p.ro);
    let a2 = p.alpha1 * p.alpha1;
    let g2 = a2 + PI2;
    let rc = fb(a2, steady_offset(p));
    let a1c = -1.0 / (ro * s * g2);
    let c1c = 1.0 / (ro * s * g2);
    let a2c = 1.0 / g2;
    let c2c = s * rc / g2;
    let num = 2.0 * a1c * c1c * PI2 * PI2 / (s * 16.0 * a2 * a2) + a2c * c2c / 8.0;
    let den = PI2 / a2 * (1.0 + a1c * c1c) + 1.0 + a2c * c2c;
    -num / den
}

// ---------------------------------------------------------------- criteria

#[test]
fn criterion_01_closed_form_agreement() {
    let t = std::time::Instant::now();
    let mut rng = StdRng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    let mut wrong_index = 0;
    for _ in 0..50 {
        let p = sample_admissible(&mut rng);
        let scan = rc1(&p, 8, 6).unwrap();
        let (oracle, jk) = brute_rc1(&p);
        let closed = fb(p.alpha1 * p.alpha1, steady_offset(&p));
        if jk != (1, 0) || scan.argmin.triple() != (1, 0, 1) {
            wrong_index += 1;
        }
        worst = worst
            .max((scan.r_crit - closed).abs() / closed)
            .max((oracle - closed).abs() / closed);
    }
    let secs = t.elapsed().as_secs_f64();
    report(
        1,
        "closed form",
        worst <= 1e-12 && wrong_index == 0 && secs < 5.0,
        format!("max rel diff {worst:.2e}, wrong argmin {wrong_index}, {secs:.2}s"),
    );
}

#[test]
fn criterion_02_vieta_suite() {
    let t = std::time::Instant::now();
    let mut rng = StdRng::seed_from_u64(102);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p = PhysicalParams::new(
            10f64.powf(rng.gen_range(-1.0..1.0)),
            10f64.powf(rng.gen_range(-3.0..1.0)),
            10f64.powf(rng.gen_range(0.0..6.0)),
            10f64.powf(rng.gen_range(-0.5..0.5)),
            10f64.powf(rng.gen_range(-0.5..0.5)),
        )
        .unwrap();
        let (j, k, l) = (rng.gen_range(1..6), rng.gen_range(-4..5), rng.gen_range(1..4));
        let idx = WaveIndex::new(j, k, l, &p).unwrap();
        let c = cubic_coeffs(&p, &idx).unwrap();
        let (c2, c1, c0) = raw_cubic(&p, j, k, l, p.rayleigh);
        let scale = 1.0 + c2.abs().max(c1.abs()).max(c0.abs());
        assert!((c.c2 - c2).abs() <= 1e-12 * scale && (c.c1 - c1).abs() <= 1e-12 * scale);
        let [a, b, d] = solve_cubic(&c).unwrap().roots();
        let r1 = (a + b + d + c2).norm();
        let r2 = (a * b + a * d + b * d - c1).norm();
        let r3 = (a * b * d + c0).norm();
        worst = worst.max(r1.max(r2).max(r3) / scale);
    }
    let secs = t.elapsed().as_secs_f64();
    report(
        2,
        "Vieta suite",
        worst <= 1e-9 && secs < 2.0,
        format!("max scaled residual {worst:.2e} over 1e4 cubics, {secs:.2}s"),
    );
}

#[test]
fn criterion_03_exchange_of_stability_steady() {
    let p = steady_params();
    let (rc, jk) = brute_rc1(&p);
    let scan = rc1(&p, 8, 8).unwrap();
    let idx = scan.argmin;
    let g2 = idx.gamma_sq;
    let at = |f: f64| {
        let (c2, c1, c0) = raw_cubic(&p, jk.0, jk.1, 1, rc * f);
        cardano(c2, c1, c0)
    };
    let lib0 = eigen_triple(&p.with_rayleigh(rc), &idx).unwrap().beta1;
    let zero_ok = lib0.norm() <= 1e-9 * g2 && at(1.0)[0].norm() <= 1e-9 * g2;
    let lo = eigen_triple(&p.with_rayleigh(rc * (1.0 - 1e-3)), &idx).unwrap().beta1;
    let hi = eigen_triple(&p.with_rayleigh(rc * (1.0 + 1e-3)), &idx).unwrap().beta1;
    let flip_ok = lo.re < 0.0 && hi.re > 0.0 && lo.im == 0.0 && hi.im == 0.0;
    let oracle_ok = (lo - at(1.0 - 1e-3)[0]).norm() < 1e-9 && (hi - at(1.0 + 1e-3)[0]).norm() < 1e-9;
    let mut others = f64::NEG_INFINITY;
    for f in [1.0 - 1e-3, 1.0, 1.0 + 1e-3] {
        let q = p.with_rayleigh(rc * f);
        let lead = eigen_triple(&q, &idx).unwrap().beta1;
        for w in lattice(Truncation::default(), &q).unwrap() {
            for e in spectrum_at(&q, &w, SpaceFlag::FullSpace).unwrap() {
                if !(w == idx && e.beta == lead) {
                    others = others.max(e.beta.re);
                }
            }
        }
    }
    report(
        3,
        "steady exchange of stability",
        (scan.r_crit / rc - 1.0).abs() < 1e-13 && zero_ok && flip_ok && oracle_ok && others < -1e-3,
        format!(
            "R_c1 = {rc:.9} at ({}, {}, 1), |beta(R_c1)| = {:.1e}, beta at -/+1e-3: {:.4e} / {:.4e}, max other Re {others:.4}",
            jk.0,
            jk.1,
            lib0.norm(),
            lo.re,
            hi.re
        ),
    );
}

#[test]
fn criterion_04_exchange_of_stability_hopf() {
    let p = hopf_params();
    let (rc, jk) = brute_rc2(&p);
    let crit = rc2(&p, 12, 8).unwrap();
    let (c2, _, c0) = raw_cubic(&p, jk.0, jk.1, 1, rc);
    let a = (c0 / c2).sqrt();
    let idx = WaveIndex::new(jk.0, jk.1, 1, &p).unwrap();
    let g2 = idx.gamma_sq;
    let s = p.sigma;
    let t = eigen_triple(&p.with_rayleigh(rc), &idx).unwrap();
    let re_ok = t.beta1.re.abs() <= 1e-9 * g2 && t.beta2.re.abs() <= 1e-9 * g2;
    let b3_ok = (t.beta3 + (2.0 * s + 1.0) * g2).norm() <= 1e-9 * g2;
    let lib_freq = crit.hopf_freq.unwrap();
    let freq_ok = (t.beta1.im.abs() / a - 1.0).abs() <= 1e-9 && (lib_freq / a - 1.0).abs() <= 1e-9;
    let bound = (1.0 - s) * PI2 / (s * s * (1.0 + s) * g2.powi(3));
    let adm_ok = p.ro * p.ro < bound && crit.hopf_admissible == Some(true);
    report(
        4,
        "oscillatory exchange of stability",
        (crit.r_crit / rc - 1.0).abs() < 1e-13 && re_ok && b3_ok && freq_ok && adm_ok,
        format!(
            "R_c2 = {rc:.8} at ({}, {}, 1), Re beta = {:.1e}, a = {a:.10} (library {lib_freq:.10}), Ro^2 = {:.2e} < {bound:.3e}",
            jk.0,
            jk.1,
            t.beta1.re,
            p.ro * p.ro
        ),
    );
}

fn oracle_slope(sigma: f64, ros: &[f64]) -> f64 {
    let xs: Vec<f64> = ros.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = ros
        .iter()
        .map(|&ro| {
            let b = PI2 / (sigma * ro).powi(2);
            fb(xb(b), b).ln()
        })
        .collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn decades(hi: f64, lo: f64) -> Vec<f64> {
    (0..9).map(|i| hi * (lo / hi).powf(i as f64 / 8.0)).collect()
}

#[test]
fn criterion_05_rossby_asymptotics() {
    let p = steady_params();
    let ros = decades(1e-2, 1e-4);
    let lib = ro_asymptotics(p.sigma, p.alpha1, p.alpha2, &ros).unwrap();
    let oracle = oracle_slope(p.sigma, &ros);
    assert!((lib.slope - oracle).abs() < 1e-9, "{} vs {oracle}", lib.slope);
    report(
        5,
        "Rossby asymptotics",
        (lib.slope + 4.0 / 3.0).abs() <= 0.03,
        format!("slope {:.4} over Ro in [1e-4, 1e-2] (oracle {oracle:.4}), target -4/3 +- 0.03", lib.slope),
    );
}

#[test]
fn supplementary_rossby_asymptotics_deep() {
    let p = steady_params();
    let ros = decades(1e-6, 1e-8);
    let lib = ro_asymptotics(p.sigma, p.alpha1, p.alpha2, &ros).unwrap();
    let ok = (lib.slope + 4.0 / 3.0).abs() <= 0.03 && (lib.slope - oracle_slope(p.sigma, &ros)).abs() < 1e-9;
    say(format!(
        "{} supplementary (Rossby asymptotics, Ro in [1e-8, 1e-6]): slope {:.4}",
        if ok { "PASS" } else { "FAIL" },
        lib.slope
    ));
    assert!(ok);
}

/// `-(a·∇)b` for the two critical eigenfields with analytic derivatives.
/// `first` and `second` select the x-variant; `(k1, k2)` are the `v` and `T`
/// coefficients of the second argument.
fn advection_analytic(x: f64, z: f64, aa: f64, first: bool, second: bool, k1: f64, k2: f64) -> [f64; 4] {
    let r = PI / aa;
    let (s, c) = (aa * x).sin_cos();
    let (sz, cz) = (PI * z).sin_cos();
    let (ua, wa) = if first { (-r * s * cz, c * sz) } else { (r * c * cz, s * sz) };
    // Second argument: horizontal part h(x)·cos(πz), vertical part g(x)·sin(πz).
    let (h, hx, g, gx) = if second {
        (-r * s, -r * aa * c, c, -aa * s)
    } else {
        (r * c, -r * aa * s, s, aa * c)
    };
    let adv_h = -(ua * hx * cz + wa * h * (-PI * sz));
    let adv_g = -(ua * gx * sz + wa * g * (PI * cz));
    [adv_h, k1 * adv_h, adv_g, k2 * adv_g]
}

fn project_analytic(aa: f64, alpha1: f64, first: bool, second: bool, k1: f64, k2: f64) -> ModeProjection {
    let (nx, nz) = (48, 32);
    let lx = 2.0 * PI / alpha1;
    let mut acc = [0.0; 5];
    let mut norms = [0.0; 5];
    for ix in 0..nx {
        let x = lx * ix as f64 / nx as f64;
        for iz in 0..nz {
            // Uniform nodes on the doubled period [0, 2); all integrands are even in z.
            let z = 2.0 * iz as f64 / nz as f64;
            let f = advection_analytic(x, z, aa, first, second, k1, k2);
            let modes = [
                (1, (2.0 * aa * x).sin()),
                (1, (2.0 * aa * x).cos()),
                (0, (2.0 * PI * z).cos()),
                (1, (2.0 * PI * z).cos()),
                (3, (2.0 * PI * z).sin()),
            ];
            for (m, (q, val)) in modes.iter().enumerate() {
                acc[m] += f[*q] * val;
                norms[m] += val * val;
            }
        }
    }
    let c: Vec<f64> = acc.iter().zip(&norms).map(|(a, n)| a / n).collect();
    ModeProjection {
        v_sin2x: c[0],
        v_cos2x: c[1],
        u_cos2z: c[2],
        v_cos2z: c[3],
        t_sin2z: c[4],
    }
}

fn entries(m: &ModeProjection) -> [f64; 5] {
    [m.v_sin2x, m.v_cos2x, m.u_cos2z, m.v_cos2z, m.t_sin2z]
}

#[test]
fn criterion_06_reduction_oracle() {
    let t = std::time::Instant::now();
    let p = steady_params();
    let mut table_err: f64 = 0.0;
    for r in [600.0, 658.0, 720.0] {
        let q = p.with_rayleigh(r);
        let (c2, c1, c0) = raw_cubic(&q, 1, 0, 1, r);
        let beta = cardano(c2, c1, c0)[0].re;
        for b in [0.0, beta] {
            let tab = interaction_integrals(&q, 1, b).unwrap();
            let g2 = q.alpha1.powi(2) + PI2;
            let k = [
                (-1.0 / (q.ro * (b + q.sigma * g2)), 1.0 / (b + g2)),
                (1.0 / (q.ro * (b + q.sigma * g2)), q.sigma * r / (b + g2)),
            ];
            for (side, (k1, k2)) in k.iter().enumerate() {
                let block = if side == 0 { &tab.direct } else { &tab.dual };
                for (ia, first) in [true, false].iter().enumerate() {
                    for (ib, second) in [true, false].iter().enumerate() {
                        let o = project_analytic(q.alpha1, q.alpha1, *first, *second, *k1, *k2);
                        let (lib, ora) = (entries(&block[ia][ib]), entries(&o));
                        let scale = ora.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                        for (l, o) in lib.iter().zip(&ora) {
                            table_err = table_err.max((l - o).abs() / scale);
                        }
                    }
                }
            }
        }
    }
    let d = delta(&p, 1).unwrap();
    let oracle = delta_oracle(&p);
    let d_err = (d - oracle).abs() / oracle.abs();
    let mut rng = StdRng::seed_from_u64(106);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let q = sample_admissible(&mut rng);
        let v = delta_oracle(&q);
        let lib = delta(&q, 1).expect("negative delta");
        assert!((lib / v - 1.0).abs() < 1e-12);
        worst = worst.max(v);
    }
    let secs = t.elapsed().as_secs_f64();
    report(
        6,
        "reduction oracle",
        table_err <= 1e-10 && d < 0.0 && d_err <= 1e-12 && worst < 0.0 && secs < 10.0,
        format!(
            "table rel err {table_err:.1e}, delta = {d:.12} (oracle rel err {d_err:.1e}), max delta over sweep {worst:.4}, {secs:.2}s"
        ),
    );
}

fn sp_norm(s: &Spectral) -> f64 {
    s.inner(s).sqrt()
}

#[test]
fn criterion_07_bilinear_identities() {
    let t = std::time::Instant::now();
    let p = steady_params().with_rayleigh(658.042658);
    let grid = Grid::new(64, 32, p.alpha1).unwrap();
    let tr = Transform::new(grid);
    let mut rng = StdRng::seed_from_u64(107);
    let mut worst = [0.0f64; 4];
    let crit = WaveIndex::new(1, 0, 1, &p).unwrap();
    let crit_beta = eigen_triple(&p, &crit).unwrap().beta1;
    let aa = 2.0 * p.alpha1;
    for trial in 0..100 {
        let a = Spectral::random(grid, &mut rng, 10, 10);
        let b = Spectral::random(grid, &mut rng, 10, 10);
        let c = Spectral::random(grid, &mut rng, 10, 10);
        let gab = advect(&a, &b, &tr, false);
        let gac = advect(&a, &c, &tr, false);
        worst[0] = worst[0].max(gab.inner(&b).abs() / (sp_norm(&gab) * sp_norm(&b)));
        worst[1] = worst[1].max((gab.inner(&c) + gac.inner(&b)).abs() / (sp_norm(&gab) * sp_norm(&c)));

        let (j, l) = [(1, 1), (2, 1), (1, 2), (3, 2)][trial % 4];
        let idx = WaveIndex::new(j, 0, l, &p).unwrap();
        let roots = eigen_triple(&p, &idx).unwrap().roots();
        let mut member = || {
            let mut s = Spectral::zeros(grid);
            for beta in roots {
                for v in [EigenVariant::First, EigenVariant::Second] {
                    let f = assemble_eigenvector(&p, &idx, beta, v, grid).unwrap();
                    s.axpy(rng.gen_range(-1.0..1.0), &Spectral::from_grid(&f.re, &tr));
                }
            }
            s
        };
        let (x, y, z) = (member(), member(), member());
        let gxy = advect(&x, &y, &tr, false);
        worst[2] = worst[2].max(gxy.inner(&z).abs() / (sp_norm(&gxy) * sp_norm(&z)));

        let v = if trial % 2 == 0 { EigenVariant::First } else { EigenVariant::Second };
        let psi = Spectral::from_grid(&assemble_eigenvector(&p, &crit, crit_beta, v, grid).unwrap().re, &tr);
        let slaved = match trial % 3 {
            0 => FieldOnGrid::from_fn(grid, |x, _| [0.0, (aa * x).sin(), 0.0, 0.0]),
            1 => FieldOnGrid::from_fn(grid, |x, _| [0.0, (aa * x).cos(), 0.0, 0.0]),
            _ => FieldOnGrid::from_fn(grid, |_, z| [0.0, 0.0, 0.0, (2.0 * PI * z).sin()]),
        };
        let g = advect(&Spectral::from_grid(&slaved, &tr), &psi, &tr, false);
        worst[3] = worst[3].max(g.to_grid(&tr).max_abs());
    }
    let secs = t.elapsed().as_secs_f64();
    let m = worst.iter().fold(0.0f64, |a, b| a.max(*b));
    report(
        7,
        "bilinear identities",
        m <= 1e-10 && secs < 30.0,
        format!(
            "antisymmetry {:.1e}, exchange {:.1e}, single space {:.1e}, annihilation {:.1e}, {secs:.2}s",
            worst[0], worst[1], worst[2], worst[3]
        ),
    );
}

/// `∫∫ Σ a·b` over one cell by the rectangle rule in x and trapezoid rule in z,
/// without conjugation.
fn pairing(a: &rotabouss::field::ComplexField, b: &rotabouss::field::ComplexField) -> Complex64 {
    let g = a.re.grid;
    let mut s = Complex64::new(0.0, 0.0);
    let comps = |f: &rotabouss::field::ComplexField, i: usize| -> [Complex64; 4] {
        [
            Complex64::new(f.re.u[i], f.im.u[i]),
            Complex64::new(f.re.v[i], f.im.v[i]),
            Complex64::new(f.re.w[i], f.im.w[i]),
            Complex64::new(f.re.t[i], f.im.t[i]),
        ]
    };
    for ix in 0..g.nx {
        for iz in 0..=g.nz {
            let wz = if iz == 0 || iz == g.nz { 0.5 } else { 1.0 };
            let i = a.re.at(ix, iz);
            let (ca, cb) = (comps(a, i), comps(b, i));
            for q in 0..4 {
                s += ca[q] * cb[q] * wz;
            }
        }
    }
    s * (g.lx() / g.nx as f64) / g.nz as f64
}

fn cnorm(a: &rotabouss::field::ComplexField) -> f64 {
    let conj = rotabouss::field::ComplexField {
        re: a.re.clone(),
        im: {
            let mut m = a.im.clone();
            m.scale(-1.0);
            m
        },
    };
    pairing(a, &conj).re.sqrt()
}

#[test]
fn criterion_08_eigenpairs_and_orthogonality() {
    let t = std::time::Instant::now();
    let mut res: f64 = 0.0;
    let mut orth: f64 = 0.0;
    for (p0, (rc, jk)) in [
        (steady_params(), brute_rc1(&steady_params())),
        (hopf_params(), brute_rc2(&hopf_params())),
    ] {
        let p = p0.with_rayleigh(rc);
        let idx = WaveIndex::new(jk.0, 0, 1, &p).unwrap();
        let grid = Grid::new(4 * jk.0 as usize + 4, 8, p.alpha1).unwrap();
        let (c2, c1, c0) = raw_cubic(&p, jk.0, 0, 1, rc);
        let roots = cardano(c2, c1, c0);
        for v in [EigenVariant::First, EigenVariant::Second] {
            for (q, &bq) in roots.iter().enumerate() {
                let psi = assemble_eigenvector(&p, &idx, bq, v, grid).unwrap();
                res = res.max(linear_residual(&p, &psi, bq).unwrap());
                for (qs, &bs) in roots.iter().enumerate() {
                    if qs != q {
                        let dual = assemble_dual(&p, &idx, bs, v, grid).unwrap();
                        orth = orth.max(pairing(&psi, &dual).norm() / (cnorm(&psi) * cnorm(&dual)));
                    }
                }
            }
        }
        for &bq in &roots {
            let dual = assemble_dual(&p, &idx, bq, EigenVariant::First, grid).unwrap();
            let other = assemble_eigenvector(&p, &idx, bq, EigenVariant::Second, grid).unwrap();
            orth = orth.max(pairing(&other, &dual).norm() / (cnorm(&other) * cnorm(&dual)));
            for (j, l) in [(jk.0 + 1, 1), (jk.0, 2)] {
                let w = WaveIndex::new(j, 0, l, &p).unwrap();
                let (c2, c1, c0) = raw_cubic(&p, j, 0, l, rc);
                for bw in cardano(c2, c1, c0) {
                    let f = assemble_eigenvector(&p, &w, bw, EigenVariant::First, grid).unwrap();
                    orth = orth.max(pairing(&f, &dual).norm() / (cnorm(&f) * cnorm(&dual)));
                }
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    report(
        8,
        "eigenpair residual",
        res <= 1e-8 && orth <= 1e-10 && secs < 5.0,
        format!("max residual {res:.1e}, max normalized pairing {orth:.1e}, {secs:.2}s"),
    );
}

fn steady_config(factor: f64) -> (SimConfig, f64) {
    let p = steady_params();
    let (rc, jk) = brute_rc1(&p);
    assert_eq!(jk, (1, 0));
    let mut c = SimConfig::new(p.with_rayleigh(factor * rc));
    c.nx = 64;
    c.nz = 32;
    c.dt = 2e-3;
    c.t_end = 200.0;
    c.seed_mode = (1, 0, 1);
    c.seed_amp = 1e-2;
    c.diag_every = 1.0;
    c.stop_on_steady = true;
    (c, rc)
}

#[test]
fn criterion_09_steady_bifurcation() {
    let t = std::time::Instant::now();
    let (c, _) = steady_config(1.05);
    let (c2, c1, c0) = raw_cubic(&c.params, 1, 0, 1, c.params.rayleigh);
    let beta = cardano(c2, c1, c0)[0].re;
    let pred = (-beta / delta_oracle(&c.params)).sqrt();
    let up = simulator::run(&c).unwrap();
    let amp = up.rows.last().unwrap().amplitude();
    let steady = matches!(up.outcome, Outcome::Steady { .. });
    let amp_ok = steady && (amp / pred - 1.0).abs() <= 0.15;

    let (mut cd, _) = steady_config(0.95);
    cd.t_end = 50.0;
    cd.stop_on_steady = false;
    let down = simulator::run(&cd).unwrap();
    let ratio = down.rows.last().unwrap().ke / down.rows[0].ke;

    let shift = c.grid().unwrap().lx() * 0.3;
    let moved = translate_x(&up.state, shift);
    let mut cs = c.clone();
    cs.t_end = moved.t + 10.0;
    cs.stop_on_steady = false;
    let after = Simulator::new(cs, moved.clone()).unwrap().run().unwrap();
    let mut d = after.state.s.clone();
    d.axpy(-1.0, &moved.s);
    let drift = sp_norm(&d) / sp_norm(&moved.s);
    let (x0, y0) = simulator::mode_amplitude(&up.state.s, 1, 1);
    let (x1, y1) = simulator::mode_amplitude(&moved.s, 1, 1);
    let turned = (y1.atan2(x1) - y0.atan2(x0) - c.params.alpha1 * shift).rem_euclid(2.0 * PI);
    let phase_ok = turned.min(2.0 * PI - turned) < 1e-9;
    let secs = t.elapsed().as_secs_f64();
    report(
        9,
        "steady bifurcation",
        amp_ok && ratio < 1e-8 && drift < 1e-6 && phase_ok && secs < 300.0,
        format!(
            "{:?}, amplitude {amp:.5} vs predicted {pred:.5} ({:+.2}%), decay ratio {ratio:.1e} at t = 50, shifted-state drift {drift:.1e}, {secs:.1}s",
            up.outcome,
            100.0 * (amp / pred - 1.0)
        ),
    );
}

fn hopf_config(factor: f64) -> (SimConfig, f64) {
    let p = hopf_params();
    let (rc, jk) = brute_rc2(&p);
    let (c2, _, c0) = raw_cubic(&p, jk.0, jk.1, 1, rc);
    let mut c = SimConfig::new(p.with_rayleigh(factor * rc));
    c.nx = 32;
    c.nz = 16;
    c.dt = 1e-3;
    c.t_end = 6.0;
    c.symmetry = SpaceFlag::SymmetricSpace;
    c.seed_mode = (jk.0, 0, 1);
    c.seed_amp = 1e-4;
    c.diag_every = 0.01;
    (c, (c0 / c2).sqrt())
}

fn wmode_period(c: &SimConfig) -> rotabouss::simulator::PeriodEstimate {
    let rows = simulator::run(c).unwrap().rows;
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.re_wmode).collect();
    measure_period(&t, &y).unwrap()
}

#[test]
fn criterion_10_hopf_onset() {
    let t = std::time::Instant::now();
    let (c, a) = hopf_config(1.03);
    let up = wmode_period(&c);
    let target = 2.0 * PI / a;
    let (cd, _) = hopf_config(0.97);
    let down = wmode_period(&cd);
    let secs = t.elapsed().as_secs_f64();
    report(
        10,
        "Hopf onset",
        (up.period / target - 1.0).abs() <= 0.10 && down.growth < 0.0 && secs < 300.0,
        format!(
            "period {:.4} vs 2pi/a = {target:.4} ({:+.1}%), envelope rate {:.4} at 1.03 R_c2 and {:.4} at 0.97 R_c2; criticality not determined within the linear window",
            up.period,
            100.0 * (up.period / target - 1.0),
            up.growth,
            down.growth
        ),
    );
}

#[test]
fn supplementary_hopf_linear_frequency() {
    let (c, _) = hopf_config(1.03);
    let up = wmode_period(&c);
    let (c2, c1, c0) = raw_cubic(&c.params, c.seed_mode.0, 0, 1, c.params.rayleigh);
    let beta = cardano(c2, c1, c0)[0];
    let target = 2.0 * PI / beta.im.abs();
    let ok = (up.period / target - 1.0).abs() <= 0.02 && (up.growth / beta.re - 1.0).abs() <= 0.05;
    say(format!(
        "{} supplementary (Hopf linear frequency): period {:.4} vs 2pi/Im beta = {target:.4}, envelope {:.4} vs Re beta {:.4}",
        if ok { "PASS" } else { "FAIL" },
        up.period,
        up.growth,
        beta.re
    ));
    assert!(ok);
}

#[test]
fn criterion_11_linear_consistency() {
    let t = std::time::Instant::now();
    let dt = 1e-3;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    let mut check = |name: String, g: Complex64, beta: Complex64| {
        let e = (g - beta).norm() / beta.norm();
        worst = worst.max(e);
        parts.push(format!("{name} {e:.1e}"));
    };
    for (p0, (rc, jk), factors) in [
        (steady_params(), brute_rc1(&steady_params()), [1.05, 0.95]),
        (hopf_params(), brute_rc2(&hopf_params()), [1.03, 0.97]),
    ] {
        for f in factors {
            let p = p0.with_rayleigh(f * rc);
            let idx = WaveIndex::new(jk.0, 0, 1, &p).unwrap();
            let grid = Grid::new(4 * jk.0 as usize + 4, 8, p.alpha1).unwrap();
            let (c2, c1, c0) = raw_cubic(&p, jk.0, 0, 1, p.rayleigh);
            let beta = cardano(c2, c1, c0)[0];
            let psi = assemble_eigenvector(&p, &idx, beta, EigenVariant::First, grid).unwrap();
            let dual = assemble_dual(&p, &idx, beta, EigenVariant::First, grid).unwrap();
            let g = linear_growth(&p, &psi.re, &dual, dt).unwrap();
            check(format!("({}, 0, 1) at {f}R", jk.0), g, beta);
        }
    }
    let p = steady_params().with_rayleigh(700.0);
    let grid = Grid::new(16, 8, p.alpha1).unwrap();
    let temp = FieldOnGrid::from_fn(grid, |_, z| [0.0, 0.0, 0.0, (PI * z).sin()]);
    let g = linear_growth(&p, &temp, &rotabouss::field::ComplexField::real(temp.clone()), dt).unwrap();
    check("(0, 0, 1)".into(), g, Complex64::new(-PI2, 0.0));
    let a = p.alpha1;
    let vort = FieldOnGrid::from_fn(grid, |x, _| [0.0, (a * x).sin(), 0.0, 0.0]);
    let g = linear_growth(&p, &vort, &rotabouss::field::ComplexField::real(vort.clone()), dt).unwrap();
    check("(1, 0, 0)".into(), g, Complex64::new(-p.sigma * a * a, 0.0));
    let secs = t.elapsed().as_secs_f64();
    report(
        11,
        "linear-operator consistency",
        worst <= 1e-4 && secs < 30.0,
        format!("{}, {secs:.2}s", parts.join(", ")),
    );
}

#[test]
fn linear_run_is_a_single_mode() {
    // With the advection switched off an eigenmode seed excites nothing else.
    let p = steady_params().with_rayleigh(700.0);
    let mut c = SimConfig::new(p);
    c.nx = 16;
    c.nz = 8;
    c.nonlinear = false;
    let s = simulator::seed_from_eigenvector(&c, 1.0).unwrap();
    let mut sim = Simulator::new(c, SimState { s: s.s.clone(), t: 0.0 }).unwrap();
    for _ in 0..100 {
        sim.step().unwrap();
    }
    let g = sim.state.s.grid;
    let mut off = 0.0f64;
    for q in 0..4 {
        for i in 0..g.len() {
            if !(g.jx(i).abs() == 1 && g.mz(i).abs() == 1) {
                off = off.max(sim.state.s.c[q][i].norm());
            }
        }
    }
    assert!(off < 1e-15, "{off}");
}
