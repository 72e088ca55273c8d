use clap::Parser;
use headway_interference::cli::{execute, Args};

fn main() {
    std::process::exit(execute(&Args::parse()));
}
