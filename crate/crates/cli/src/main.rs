mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind as ClapKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Command, Global};
use commands::{GenArgs, SimArgs};
use output::{emit, CliError, CliResult, Manifest};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ClapKind::DisplayHelp | ClapKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::invalid(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.kind.exit_code() as u8);
        }
    };
    if cli.global.threads > 0 {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global();
    }
    match run(&cli.global, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.kind.exit_code() as u8)
        }
    }
}

fn run(global: &Global, command: Command) -> CliResult<()> {
    let start = Instant::now();
    let finish = |mut manifest: Manifest, payload| {
        if global.timing {
            manifest.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        emit(global, &manifest, payload)
    };
    match command {
        Command::Centrality { input } => {
            let l = commands::load(&input)?;
            let mut m = Manifest::new("centrality", json!({ "input": input }), global);
            m.inputs.push(l.digest.clone());
            finish(m, commands::centrality(global, &l)?)
        }
        Command::Stationary { input, walk, check, regularize } => {
            let l = commands::load(&input)?;
            let params = json!({ "input": input, "walk": walk, "check": check, "regularize": regularize });
            let mut m = Manifest::new("stationary", params, global);
            m.inputs.push(l.digest.clone());
            finish(m, commands::stationary(global, &l, walk, check, regularize)?)
        }
        Command::Hitting { input, walk, method, target, full_matrix, verbatim_eq26, regularize } => {
            let l = commands::load(&input)?;
            let params = json!({
                "input": input, "walk": walk, "method": method, "target": target,
                "full_matrix": full_matrix, "verbatim_eq26": verbatim_eq26, "regularize": regularize,
            });
            let mut m = Manifest::new("hitting", params, global);
            m.inputs.push(l.digest.clone());
            let payload = commands::hitting(global, &l, walk, method, &target, full_matrix, verbatim_eq26, regularize)?;
            finish(m, payload)
        }
        Command::Generate { model, n, p, m_attach, k, beta, m, l, largest_component } => {
            let params = json!({
                "model": model, "n": n, "p": p, "m_attach": m_attach, "k": k, "beta": beta,
                "m": m, "l": l, "largest_component": largest_component,
            });
            let manifest = Manifest::new("generate", params, global);
            let line = serde_json::to_string(&manifest).expect("manifest serialises");
            let a = GenArgs { model, n, p, m_attach, k, beta, m, l, largest_component };
            let payload = commands::generate_cmd(global, &a, &line)?;
            finish(manifest, payload)
        }
        Command::RoseOracle { m, walk } => {
            let manifest = Manifest::new("rose-oracle", json!({ "m": m, "walk": walk }), global);
            finish(manifest, commands::rose_oracle_cmd(m, walk)?)
        }
        Command::Compare { input } => {
            let l = commands::load(&input)?;
            let mut m = Manifest::new("compare", json!({ "input": input }), global);
            m.inputs.push(l.digest.clone());
            finish(m, commands::compare(global, &l, &input.graph)?)
        }
        Command::Scaling { kind, m_range } => {
            let manifest = Manifest::new("scaling", json!({ "kind": kind, "m_range": m_range }), global);
            finish(manifest, commands::scaling(kind, &m_range)?)
        }
        Command::Simulate { input, walk, mode, source, target, trials, max_steps, burn_in, regularize } => {
            let l = commands::load(&input)?;
            let params = json!({
                "input": input, "walk": walk, "mode": mode, "source": source, "target": target,
                "trials": trials, "max_steps": max_steps, "burn_in": burn_in, "regularize": regularize,
            });
            let mut m = Manifest::new("simulate", params, global);
            m.inputs.push(l.digest.clone());
            let a = SimArgs { walk, mode, source, target, trials, max_steps, burn_in, regularize };
            finish(m, commands::simulate(global, &l, &a)?)
        }
    }
}
