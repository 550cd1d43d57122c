use std::fs;
use std::process::ExitCode;

use clap::Parser;
use speccert::run::{EXIT_ERROR, EXIT_OK};
use speccert::{exit_code, load_toml, replay, run_job, Bundle, CliError, Options};
use speccert_core::par::Exec;

/// Certify injectivity of specialization maps of elliptic curves over Q(t).
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// Job file (TOML).
    #[arg(long, value_name = "FILE")]
    job: Option<String>,
    /// Write certificates here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
    /// Re-run a certificate file and compare.
    #[arg(long, value_name = "CERT", conflicts_with = "job")]
    replay: Option<String>,
    /// Run the built-in fixture suite.
    #[arg(long, conflicts_with_all = ["job", "replay"])]
    selftest: bool,
    /// Only fixtures whose name contains this.
    #[arg(long, value_name = "NAME", requires = "selftest")]
    filter: Option<String>,
    /// Record wall-clock time per certificate (breaks byte-identical output).
    #[arg(long)]
    timing: bool,
    /// Single-threaded execution.
    #[arg(long)]
    sequential: bool,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SPECCERT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::new("E-ENV", format!("SPECCERT_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::new("E-ENV", e.to_string()))
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new("E-IO", format!("{path}: {e}")))
}

fn emit(text: &str, out: Option<&str>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::new("E-IO", format!("{path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main_inner(args: Args) -> Result<i32, CliError> {
    configure_threads()?;
    let opts = Options {
        exec: if args.sequential { Exec::Sequential } else { Exec::Parallel },
        timing: args.timing,
    };
    if args.selftest {
        let (lines, ok) = speccert::selftest::selftest(args.filter.as_deref(), opts.exec);
        emit(&(lines.join("\n") + "\n"), args.out.as_deref())?;
        return Ok(if ok { EXIT_OK } else { EXIT_ERROR });
    }
    if let Some(path) = &args.replay {
        let bundle = Bundle::from_json(&read(path)?)?;
        let lines = replay(&bundle, opts)?;
        emit(&(lines.join("\n") + "\n"), args.out.as_deref())?;
        return Ok(EXIT_OK);
    }
    let Some(path) = &args.job else {
        return Err(CliError::new("E-USAGE", "one of --job, --replay or --selftest is required"));
    };
    let (job, src) = load_toml(path, &read(path)?)?;
    let bundle = run_job(&job, &src, opts)?;
    emit(&bundle.to_json(), args.out.as_deref())?;
    Ok(exit_code(&bundle))
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match main_inner(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
