//! `cmcd`: fixtures, dualization, differentials, orbits and verification
//! suites for CMC graphs and their spacelike duals.
//!
//! Exit status: 0 on success, 1 when a verification or computation fails,
//! 2 on a usage error. `CMCD_THREADS` sets the worker count.

mod commands;
mod spec;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches};

use commands::{registry, Command, Failure};
use spec::{CommandSpec, UsageError, PARAM};

fn cli() -> clap::Command {
    let mut app = clap::Command::new("cmcd")
        .about("Conformal duality between CMC graphs and spacelike graphs")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for c in registry() {
        let mut sub = clap::Command::new(c.name())
            .about(c.about())
            .arg(Arg::new("config").long("config").value_name("FILE").help("key = value file; flags win"));
        for k in c.keys() {
            let help = match k.default {
                Some(d) => format!("{} [default: {d}]", k.help),
                None => k.help.to_string(),
            };
            let arg = Arg::new(k.name).value_name("VALUE").allow_negative_numbers(true).help(help);
            sub = sub.arg(if Some(k.name) == c.positional() {
                arg.index(1)
            } else if k.name == PARAM {
                arg.long(k.name).action(ArgAction::Append).value_name("NAME=VALUE")
            } else {
                arg.long(k.name)
            });
        }
        app = app.subcommand(sub);
    }
    app
}

fn resolve(c: &dyn Command, m: &ArgMatches) -> Result<CommandSpec, UsageError> {
    let mut flags = BTreeMap::new();
    for k in c.keys().iter().filter(|k| k.name != PARAM) {
        if let Some(v) = m.get_one::<String>(k.name) {
            flags.insert(k.name.to_string(), v.clone());
        }
    }
    let params = if c.keys().iter().any(|k| k.name == PARAM) {
        m.get_many::<String>(PARAM).map(|v| v.cloned().collect()).unwrap_or_default()
    } else {
        vec![]
    };
    let config = m.get_one::<String>("config").map(PathBuf::from);
    CommandSpec::resolve(c.name(), c.keys(), flags, params, config.as_deref())
}

fn init_threads() -> Result<(), UsageError> {
    let Ok(v) = std::env::var("CMCD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| UsageError::new("CMCD_THREADS", format!("'{v}' is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| UsageError::new("CMCD_THREADS", e.to_string()))
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let c = *registry().iter().find(|c| c.name() == name).expect("registered subcommand");
    let outcome =
        init_threads().map_err(Failure::Usage).and_then(|_| resolve(c, sub).map_err(Failure::Usage)).and_then(|s| c.run(&s));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(e) => eprintln!("cmcd {name}: {e}"),
                Failure::Verification(m) => eprintln!("cmcd {name}: verification failed: {m}"),
                Failure::Runtime(m) => eprintln!("cmcd {name}: {m}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
