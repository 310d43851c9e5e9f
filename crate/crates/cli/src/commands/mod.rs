pub mod data;
pub mod eval;
pub mod fusion;
pub mod loss;
pub mod track;
pub mod turbsim;

use std::path::PathBuf;

use clap::ArgMatches;

pub fn path_arg(m: &ArgMatches, name: &str) -> PathBuf {
    PathBuf::from(m.get_one::<String>(name).expect("required argument"))
}

/// Writes a JSON value to stdout on one line.
pub fn print_json(v: &serde_json::Value) {
    println!("{v}");
}
