use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::json;

use rotabouss::critical::{onset_criterion, pes_scan, ro_asymptotics, ONSET_NAMES};
use rotabouss::reduction::AmplitudeModel;
use rotabouss::simulator::{self, read_checkpoint, write_checkpoint, DiagRow, SimConfig, Simulator};
use rotabouss::spectrum::spectrum_at;
use rotabouss::verify::run_checks;
use rotabouss::{lattice, Error, Truncation};

use crate::args::*;
use crate::output::{num, Table};

/// Why a command did not succeed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::UnknownStrategy { .. } | Error::InvalidParameter(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Numeric(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Numeric(e)
    }
}

pub struct Done {
    /// The command with parameters resolved, as recorded in the manifest.
    pub pinned: Command,
    pub table: Table,
    pub summary: serde_json::Value,
    pub extra_outputs: Vec<PathBuf>,
    /// Set when the command ran but its checks did not all pass.
    pub failed: Option<String>,
    /// Human-readable lines for the terminal.
    pub notes: Vec<String>,
}

impl Done {
    fn new(pinned: Command, table: Table, summary: serde_json::Value) -> Self {
        Self {
            pinned,
            table,
            summary,
            extra_outputs: Vec::new(),
            failed: None,
            notes: Vec::new(),
        }
    }
}

pub fn run(cmd: &Command) -> Result<Done, Failure> {
    match cmd {
        Command::Spectrum(a) => spectrum(a),
        Command::Critical(a) => critical(a),
        Command::Asymptotics(a) => asymptotics(a),
        Command::Reduce(a) => reduce(a),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
        Command::Replay(_) => unreachable!("replay is resolved before dispatch"),
    }
}

fn spectrum(a: &SpectrumArgs) -> Result<Done, Failure> {
    let p = a.params.resolve(None).map_err(Failure::Usage)?;
    let lat = lattice(Truncation::new(a.jmax, a.kmax, a.lmax), &p)?;
    let space = a.space.into();
    let per_index = lat
        .par_iter()
        .map(|idx| spectrum_at(&p, idx, space).map(|evs| (idx, evs)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&["j", "k", "l", "class", "branch", "re_beta", "im_beta"]);
    for (idx, evs) in per_index {
        for e in evs {
            t.push(vec![
                idx.j.to_string(),
                idx.k.to_string(),
                idx.l.to_string(),
                idx.cls.to_string(),
                e.branch.to_string(),
                num(e.beta.re),
                num(e.beta.im),
            ]);
        }
    }
    let mut pinned = a.clone();
    pinned.params = ParamArgs::pinned(&p);
    Ok(Done::new(Command::Spectrum(pinned), t, json!({ "indices": lat.len() })))
}

fn critical(a: &CriticalArgs) -> Result<Done, Failure> {
    let p = a.params.resolve(None).map_err(Failure::Usage)?;
    let mut pinned = a.clone();
    pinned.params = ParamArgs::pinned(&p);
    if let Some(scan) = a.scan {
        let trunc = Truncation::new(a.jmax, a.kmax, a.lmax);
        let s = pes_scan(&p, scan.lo, scan.hi, scan.n, a.space.into(), trunc, None)?;
        let mut t = Table::new(&["R", "re_beta_max", "im_beta_at_max", "j", "k", "l"]);
        for r in &s.rows {
            t.push(vec![
                num(r.r),
                num(r.re_beta),
                num(r.im_beta),
                r.index.j.to_string(),
                r.index.k.to_string(),
                r.index.l.to_string(),
            ]);
        }
        let mut done = Done::new(Command::Critical(pinned), t, json!({ "bracket": s.bracket }));
        if let Some((lo, hi)) = s.bracket {
            done.notes.push(format!("leading growth rate changes sign in R in [{lo}, {hi}]"));
        }
        return Ok(done);
    }
    let modes: Vec<&str> = if a.mode == "both" { ONSET_NAMES.to_vec() } else { vec![a.mode.as_str()] };
    let mut t = Table::new(&[
        "mode",
        "r_crit",
        "j",
        "k",
        "l",
        "unique",
        "minimizers",
        "hopf_freq",
        "hopf_admissible",
    ]);
    let mut notes = Vec::new();
    for m in modes {
        let crit = onset_criterion(m)?;
        let res = match crit.critical(&p, a.jmax, a.kmax) {
            Ok(r) => r,
            Err(Error::SigmaOutOfRange(s)) if a.mode == "both" => {
                notes.push(format!("{m}: skipped, needs sigma < 1 (sigma = {s})"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let (j, k, l) = res.argmin.triple();
        notes.push(format!("{m}: R_crit = {} at ({j}, {k}, {l})", res.r_crit));
        t.push(vec![
            m.to_string(),
            num(res.r_crit),
            j.to_string(),
            k.to_string(),
            l.to_string(),
            res.unique.to_string(),
            res.minimizers.len().to_string(),
            res.hopf_freq.map_or(String::new(), num),
            res.hopf_admissible.map_or(String::new(), |b| b.to_string()),
        ]);
    }
    let mut done = Done::new(Command::Critical(pinned), t, json!({}));
    done.notes = notes;
    Ok(done)
}

fn asymptotics(a: &AsymptoticsArgs) -> Result<Done, Failure> {
    let p = a.params.resolve(Some(1.0)).map_err(Failure::Usage)?;
    let res = ro_asymptotics(p.sigma, p.alpha1, p.alpha2, &a.ro_list)?;
    let mut t = Table::new(&["ro", "b", "x_star", "r_continuous", "r_lattice"]);
    for r in &res.rows {
        t.push(vec![num(r.ro), num(r.b), num(r.x_star), num(r.r_continuous), num(r.r_lattice)]);
    }
    let mut pinned = a.clone();
    pinned.params = ParamArgs::pinned(&p);
    let mut done = Done::new(
        Command::Asymptotics(pinned),
        t,
        json!({ "slope": res.slope, "slope_lattice": res.slope_lattice }),
    );
    done.notes.push(format!(
        "log-log slope {:.6} (continuous), {:.6} (lattice)",
        res.slope, res.slope_lattice
    ));
    Ok(done)
}

fn reduce(a: &ReduceArgs) -> Result<Done, Failure> {
    let p = a.params.resolve(None).map_err(Failure::Usage)?;
    let model = AmplitudeModel::new(&p, a.jmax, a.kmax)?;
    let rs = match (a.r, a.r_scan) {
        (Some(r), _) => vec![r],
        (None, Some(s)) => s.points(),
        (None, None) => return Err(Failure::Usage("give --r or --r-scan".into())),
    };
    let mut t = Table::new(&["R", "beta", "delta", "radius_pred"]);
    for r in rs {
        let beta = model.beta_of_r(r)?;
        // Below onset the trivial state is the attractor and no circle exists.
        let radius = match model.radius_pred(r) {
            Ok(v) => v,
            Err(Error::Precondition(_)) => f64::NAN,
            Err(e) => return Err(e.into()),
        };
        t.push(vec![num(r), num(beta), num(model.delta), num(radius)]);
    }
    let mut pinned = a.clone();
    pinned.params = ParamArgs::pinned(&p);
    let mut done = Done::new(
        Command::Reduce(pinned),
        t,
        json!({ "r_c1": model.r_c1, "j1": model.j1, "delta": model.delta }),
    );
    done.notes.push(format!("R_c1 = {}, j1 = {}, delta = {}", model.r_c1, model.j1, model.delta));
    Ok(done)
}

fn simulate(a: &SimulateArgs) -> Result<Done, Failure> {
    let mut p = a.params.resolve(None).map_err(Failure::Usage)?;
    if let Some(r) = a.r {
        p = p.with_rayleigh(r);
    }
    let config = SimConfig {
        params: p,
        nx: a.nx,
        nz: a.nz,
        dt: a.dt,
        t_end: a.t_end,
        symmetry: a.symmetry.into(),
        dealias: !a.no_dealias,
        seed_mode: (a.seed_mode[0], 0, a.seed_mode[1]),
        seed_amp: a.seed_amp,
        scheme: a.scheme.clone(),
        nonlinear: !a.linear,
        diag_every: a.diag_every,
        stop_on_steady: a.stop_on_steady,
    };
    config.validate()?;
    let res = match &a.restart {
        Some(path) => {
            let state = read_checkpoint(path, p.alpha1)?;
            Simulator::new(config.clone(), state)?.run()?
        }
        None => simulator::run(&config)?,
    };
    let mut t = Table::new(&DiagRow::HEADER);
    for r in &res.rows {
        t.push(r.values().iter().map(|&x| num(x)).collect());
    }
    let mut pinned = a.clone();
    pinned.params = ParamArgs::pinned(&p);
    pinned.r = None;
    let last = res.rows.last().copied();
    let mut done = Done::new(
        Command::Simulate(pinned),
        t,
        json!({
            "outcome": res.outcome,
            "t_final": res.state.t,
            "amplitude": last.map(|r| r.amplitude()),
            "config": config,
        }),
    );
    if let Some(path) = &a.checkpoint {
        write_checkpoint(path, &res.state)?;
        done.extra_outputs.push(path.clone());
    }
    done.notes.push(format!(
        "{:?} at t = {:.6}, mode amplitude {:.6e}",
        res.outcome,
        res.state.t,
        last.map_or(0.0, |r| r.amplitude())
    ));
    Ok(done)
}

fn verify(a: &VerifyArgs) -> Result<Done, Failure> {
    let reports = run_checks(a.quick, a.only.as_deref())?;
    let mut t = Table::new(&["id", "criterion", "passed", "seconds", "detail"]);
    let mut notes = vec![format!("{:<24} {:>9}  {:<6} {:>8}  detail", "check", "criterion", "result", "seconds")];
    for r in &reports {
        let crit = r.criterion.map_or(String::from("-"), |c| c.to_string());
        t.push(vec![r.id.clone(), crit.clone(), r.passed.to_string(), num(r.seconds), r.detail.clone()]);
        notes.push(format!(
            "{:<24} {:>9}  {:<6} {:>8.2}  {}",
            r.id,
            crit,
            if r.passed { "PASS" } else { "FAIL" },
            r.seconds,
            r.detail
        ));
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
    let passed = reports.len() - failed.len();
    notes.push(format!("{passed}/{} checks passed", reports.len()));
    let mut done = Done::new(
        Command::Verify(a.clone()),
        t,
        json!({ "passed": passed, "failed": failed }),
    );
    if !failed.is_empty() {
        done.failed = Some(format!("failing checks: {}", failed.join(", ")));
    }
    done.notes = notes;
    Ok(done)
}
