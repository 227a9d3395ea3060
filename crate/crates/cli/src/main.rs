use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rotfric::config::default_config;
use rotfric::{exit, load_verify, requested_threads, run_config, verify};
use rotfric_core::UnitSystem;

#[derive(Parser)]
#[command(
    name = "rotfric",
    version,
    about = "Radiated power and friction torque of a spinning nanoparticle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a scenario file and write its CSV.
    Run {
        config: PathBuf,
        /// Write the CSV here instead of `output.path`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the response and noise kernels against a discrete oscillator bath.
    Verify { config: PathBuf },
    /// Print the default scenario (10 nm gold sphere near a conductor) as TOML.
    PrintDefaults,
}

fn fail(code: u8, err: anyhow::Error) -> ExitCode {
    eprintln!("error: {err:#}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match requested_threads() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                return fail(exit::VALIDATION, e.into());
            }
        }
        Ok(None) => {}
        Err(e) => return fail(exit::VALIDATION, e),
    }

    match cli.command {
        Command::PrintDefaults => match default_config().to_toml() {
            Ok(s) => {
                print!("{s}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(exit::VALIDATION, e),
        },
        Command::Run { config, output } => match run_config(&config, output.as_deref()) {
            Ok(out) => {
                for w in &out.warnings {
                    eprintln!("warning: {w}");
                }
                println!("{}; wrote {}", out.summary, out.output.display());
                if out.all_failed {
                    eprintln!("error: every sweep point failed");
                    ExitCode::from(exit::ALL_POINTS_FAILED)
                } else {
                    ExitCode::SUCCESS
                }
            }
            Err(e) => fail(exit::VALIDATION, e),
        },
        Command::Verify { config } => {
            let (units, v) = match load_verify(&config) {
                Ok(x) => x,
                Err(e) => return fail(exit::VALIDATION, e),
            };
            let units = match UnitSystem::new(units.omega_c_rad_s) {
                Ok(u) => u,
                Err(e) => return fail(exit::VALIDATION, e.into()),
            };
            match verify::run_verify(&v, &units) {
                Ok(out) => {
                    print!("{}", out.report);
                    let worst = out
                        .worst
                        .as_ref()
                        .map(|w| {
                            format!(
                                "{} at omega = {:.6e} rad/s, rel_error = {:.3e}{}",
                                w.component,
                                w.omega_rad_s,
                                w.rel_error,
                                if w.flagged {
                                    " (bath invariant violated)"
                                } else {
                                    ""
                                }
                            )
                        })
                        .unwrap_or_else(|| "none".into());
                    if out.passed {
                        println!(
                            "verify: PASS (tolerance {:.1e}); worst {worst}",
                            v.tolerance
                        );
                        ExitCode::SUCCESS
                    } else {
                        println!(
                            "verify: FAIL (tolerance {:.1e}); worst {worst}",
                            v.tolerance
                        );
                        ExitCode::from(exit::VERIFICATION_FAILED)
                    }
                }
                Err(e) => fail(exit::VALIDATION, e),
            }
        }
    }
}
