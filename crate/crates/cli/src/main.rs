use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zslab_cli::{parse_config_with, render_text, run_suites, select_suites, VerificationReport, WindowOverrides};

#[derive(Parser)]
#[command(name = "zslab", version, about = "Finite-window verification of Zappa-Szép product systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long = "radius-p")]
    radius_p: Option<i64>,
    #[arg(long = "radius-g")]
    radius_g: Option<i64>,
    #[arg(long = "fock-ball")]
    fock_ball: Option<i64>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Zappa-Szép axioms on the window.
    ValidateZs(Common),
    /// Check the action axioms.
    ValidateAction(Common),
    /// Build X⋈G and validate it.
    Bowtie(Common),
    /// Build X⋈̃G and validate it.
    BowtieTilde(Common),
    /// Build the truncated Fock representation and check it.
    Fock(Common),
    /// Run the suites named in the config or on the command line.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated suite names.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
    },
    /// Render a saved JSON report as text.
    Report { path: PathBuf },
}

fn run(common: &Common, suites: Option<Vec<String>>) -> Result<VerificationReport, (u8, String)> {
    let text = std::fs::read_to_string(&common.config).map_err(|e| (2, format!("{}: {e}", common.config.display())))?;
    let over = WindowOverrides {
        radius_p: common.radius_p,
        radius_g: common.radius_g,
        fock_ball: common.fock_ball,
        tolerance: common.tolerance,
    };
    let mut cfg = parse_config_with(&text, &over).map_err(|e| (2, format!("{}: {e}", common.config.display())))?;
    if let Some(names) = suites {
        select_suites(&mut cfg, &names).map_err(|e| (2, e))?;
    }
    let report = run_suites(&cfg).map_err(|e| (2, format!("construction failed at {e}")))?;
    if let Some(out) = &common.out {
        let json = serde_json::to_string_pretty(&report).expect("reports serialize");
        std::fs::write(out, json + "\n").map_err(|e| (2, format!("{}: {e}", out.display())))?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let one = |s: &str| Some(vec![s.to_string()]);
    let result = match &cli.command {
        Command::ValidateZs(c) => run(c, one("zs-axioms")),
        Command::ValidateAction(c) => run(c, one("action-axioms")),
        Command::Bowtie(c) => run(c, one("bowtie")),
        Command::BowtieTilde(c) => run(c, one("bowtie-tilde")),
        Command::Fock(c) => run(c, Some(vec!["toeplitz".into(), "covariance".into()])),
        Command::Verify { common, suite } => run(common, (!suite.is_empty()).then(|| suite.clone())),
        Command::Report { path } => std::fs::read_to_string(path)
            .map_err(|e| (2, format!("{}: {e}", path.display())))
            .and_then(|t| serde_json::from_str::<VerificationReport>(&t).map_err(|e| (2, format!("{}: {e}", path.display())))),
    };
    match result {
        Ok(report) => {
            print!("{}", render_text(&report));
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
