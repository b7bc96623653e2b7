mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;
use output::{manifest_path, Manifest};

const USAGE_ERROR: u8 = 2;
const FAILURE: u8 = 1;

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, String> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("ROTABOUSS_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("ROTABOUSS_THREADS must be a positive integer, got '{v}'")),
        _ => Ok(None),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(USAGE_ERROR)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(FAILURE)
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode, Failure> {
    match thread_count(cli.threads).map_err(Failure::Usage)? {
        Some(0) => return Err(Failure::Usage("thread count must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Numeric(e.into()))?,
        None => {}
    }

    let mut command = cli.command;
    if let Command::Replay(r) = &command {
        let m = Manifest::read(&r.manifest).map_err(|e| Failure::Usage(format!("{e:#}")))?;
        let out = r.out.clone();
        command = m.command;
        if let (Some(new), Some(slot)) = (out, command.out_mut()) {
            *slot = Some(new);
        }
    }

    let start = Instant::now();
    let done = commands::run(&command)?;
    let out = command.out_mut().and_then(|o| o.clone());

    let to_stdout = out.is_none() && !matches!(command, Command::Verify(_));
    let mut outputs = Vec::new();
    if out.is_some() || to_stdout {
        if let Some(p) = done.table.emit(out.as_deref())? {
            outputs.push(p);
        }
    }
    outputs.extend(done.extra_outputs.iter().cloned());
    for line in &done.notes {
        if to_stdout {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }

    if let Some(csv) = &out {
        let manifest = Manifest {
            subcommand: done.pinned.name().to_string(),
            argv: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: done.pinned,
            outputs,
            threads: rayon::current_num_threads(),
            duration_seconds: start.elapsed().as_secs_f64(),
            summary: done.summary,
        };
        manifest.write(&manifest_path(csv))?;
    }

    match done.failed {
        Some(msg) => {
            eprintln!("error: {msg}");
            Ok(ExitCode::from(FAILURE))
        }
        None => Ok(ExitCode::SUCCESS),
    }
}
