use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modlie_cli::commands::{self, Command, RepChoice, EXIT_USAGE};
use modlie_cli::RunConfig;

#[derive(Parser)]
#[command(
    name = "modlie",
    version,
    about = "Modular Lie algebra computations and verification"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Global {
    /// Flat key = value file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    family: Option<String>,
    #[arg(long, global = true)]
    rank: Option<String>,
    /// Characteristic; 0 for the integral form over Q.
    #[arg(long, global = true)]
    p: Option<String>,
    #[arg(long, global = true)]
    case: Option<String>,
    /// Character values, e.g. `x(-e1)=1,h(1)=0`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    chi: Option<String>,
    /// Weight values on the simple coroots, e.g. `1=0,2=3`.
    #[arg(long, global = true)]
    lambda: Option<String>,
    /// Constants sampled by the invertibility scan.
    #[arg(long = "c-beta", global = true, allow_hyphen_values = true)]
    c_beta: Option<String>,
    #[arg(long, global = true)]
    bound: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Random submodule searches above the Burnside threshold.
    #[arg(long, global = true)]
    trials: Option<String>,
    /// JSON report path; `-` prints the report instead of the summary.
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Roots, base and Weyl orbits.
    Roots,
    /// Integral structure constants of the Chevalley basis.
    StructTable,
    /// PBW normal form of an expression.
    Normalform { expr: String },
    /// Whether an expression commutes with every generator.
    Central { expr: String },
    /// Sign solving and oracle checks for every A_beta spec of a case.
    VerifyLee {
        #[arg(long, default_value = "auto")]
        rep: RepChoice,
    },
    /// Build a baby Verma module and check its identities.
    BabyVerma {
        /// Write the generator matrices as sparse text.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Irreducibility of the baby Verma module.
    Irreducible,
    /// Truncated independence of a product-form candidate.
    Independence {
        #[arg(long, default_value = "auto")]
        rep: RepChoice,
    },
    /// Closure of coordinate subalgebras extended by coroots.
    CheckSubalgebra {
        #[arg(long)]
        sub_rank: Option<usize>,
    },
}

fn configure(g: &Global) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &g.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.load_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let flags = [
        ("family", &g.family),
        ("rank", &g.rank),
        ("p", &g.p),
        ("case", &g.case),
        ("chi", &g.chi),
        ("lambda", &g.lambda),
        ("c_beta", &g.c_beta),
        ("bound", &g.bound),
        ("seed", &g.seed),
        ("trials", &g.trials),
        ("out", &g.out),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)
                .map_err(|e| format!("--{}: {e}", key.replace('_', "-")))?;
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match configure(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let cmd = match cli.command {
        Cmd::Roots => Command::Roots,
        Cmd::StructTable => Command::StructTable,
        Cmd::Normalform { expr } => Command::NormalForm { expr },
        Cmd::Central { expr } => Command::Central { expr },
        Cmd::VerifyLee { rep } => Command::VerifyLee { rep },
        Cmd::BabyVerma { export } => Command::BabyVerma { export },
        Cmd::Irreducible => Command::Irreducible,
        Cmd::Independence { rep } => Command::Independence { rep },
        Cmd::CheckSubalgebra { sub_rank } => Command::CheckSubalgebra { sub_rank },
    };
    let outcome = commands::run(&cmd, &cfg);
    if outcome.code == EXIT_USAGE && cfg.out.is_none() {
        eprintln!("{}", outcome.summary);
        return ExitCode::from(EXIT_USAGE as u8);
    }
    match cfg.out.as_deref().and_then(|p| p.to_str()) {
        Some("-") => print!("{}", outcome.report_text()),
        Some(_) => {
            let path = cfg.out.as_ref().unwrap();
            if let Err(e) = std::fs::write(path, outcome.report_text()) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE as u8);
            }
            println!("{}", outcome.summary);
        }
        None => println!("{}", outcome.summary),
    }
    ExitCode::from(outcome.code as u8)
}
