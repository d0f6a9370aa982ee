//! The `l2eis` command line: coefficient tables, derivative values, series
//! evaluation, the lattice oracle and catalog verification.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or configuration error,
//! 3 work budget exceeded.

pub mod args;
pub mod commands;
pub mod exit;

use std::ffi::OsString;

use clap::Parser;

use args::{Cli, Command};
use exit::Failure;

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => return exit::from_clap_error(e),
    };
    let g = &cli.global;
    let result = commands::check_globals(g).and_then(|()| match &cli.command {
        Command::Coeff(a) => commands::coeff(a, g),
        Command::Deriv(a) => commands::deriv(a, g),
        Command::Eval(a) => commands::eval(a, g),
        Command::Oracle(a) => commands::oracle(a, g),
        Command::Verify(a) => commands::verify(a, g),
    });
    let out = g.out.as_deref();
    match result {
        Ok(o) => match emit(&o.text, out) {
            Ok(()) if o.failed => exit::VERIFICATION_FAILURE,
            Ok(()) => exit::SUCCESS,
            Err(f) => report(f),
        },
        Err(Failure::BudgetWithOutput(text)) => {
            let _ = emit(&text, out);
            eprintln!("l2eis: work budget exceeded");
            exit::BUDGET
        }
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> u8 {
    match &f {
        Failure::Usage(m) => eprintln!("l2eis: {m}"),
        Failure::Budget(m) => eprintln!("l2eis: work budget exceeded: {m}"),
        Failure::BudgetWithOutput(_) => eprintln!("l2eis: work budget exceeded"),
    }
    f.code()
}
