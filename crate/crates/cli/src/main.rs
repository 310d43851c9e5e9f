mod commands;
mod config;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::Command;

pub use error::{CliError, Result};

fn cli() -> Command {
    Command::new("lrid")
        .about("Long-range identification toolkit: templates, evaluation, fusion, losses, tracking, turbulence")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(commands::data::ingest_command())
        .subcommand(commands::data::export_command())
        .subcommand(commands::data::protocol_gen_command())
        .subcommand(commands::eval::command())
        .subcommand(commands::fusion::train_command())
        .subcommand(commands::fusion::apply_command())
        .subcommand(commands::loss::command())
        .subcommand(commands::track::track_command())
        .subcommand(commands::track::scenario_command())
        .subcommand(commands::turbsim::command())
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Info)
        .format(|buf, record| writeln!(buf, "[{}] {}", record.level(), record.args()))
        .target(env_logger::Target::Stderr)
        .init();

    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let result = match name {
        "ingest" => commands::data::ingest(sub),
        "export" => commands::data::export(sub),
        "protocol-gen" => commands::data::protocol_gen(sub),
        "eval" => commands::eval::run(sub),
        "fuse-train" => commands::fusion::train(sub),
        "fuse-apply" => commands::fusion::apply(sub),
        "loss-demo" => commands::loss::run(sub),
        "track" => commands::track::track(sub),
        "scenario-gen" => commands::track::scenario(sub),
        "turbsim" => commands::turbsim::run(sub),
        _ => unreachable!("clap rejects unknown subcommands"),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
