use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use germ_moduli::cli::run::{batch_value, run_many};
use germ_moduli::cli::{catalog, emit, exit_code, run, Command, CurveDocument, Format, RunConfig};
use germ_moduli::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Action {
    Semiring,
    Normalize,
    Saito,
    Classify,
    Dimension,
    Action,
    Equiv,
    /// List the bundled catalog.
    Catalog,
    /// Print the input document in canonical form.
    Emit,
}

impl Action {
    fn command(self) -> Option<Command> {
        Some(match self {
            Action::Semiring => Command::Semiring,
            Action::Normalize => Command::Normalize,
            Action::Saito => Command::Saito,
            Action::Classify => Command::Classify,
            Action::Dimension => Command::Dimension,
            Action::Action => Command::Action,
            Action::Equiv => Command::Equiv,
            Action::Catalog | Action::Emit => return None,
        })
    }
}

/// Exact invariants of plane curve germs.
///
/// Exit status: 0 on success, 2 when the curve is unclassified or the
/// requested quantity is unsupported, 1 on input errors.
#[derive(Parser, Debug)]
#[command(name = "germ-moduli", version)]
struct Args {
    #[arg(value_enum)]
    command: Action,
    /// Curve document (JSON); `-` reads standard input.
    #[arg(long, conflicts_with = "catalog")]
    input: Option<PathBuf>,
    /// Bundled catalog entry, or `all`.
    #[arg(long)]
    catalog: Option<String>,
    /// Series working precision N0 (at least 8).
    #[arg(long, default_value_t = 32)]
    truncation: usize,
    /// Target degree bound D for the Saito slice (default 2 deg f); smaller degrees are tried first and 2D is the last resort.
    #[arg(long)]
    degree_bound: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Offset into the generic-scalar sequence.
    #[arg(long, default_value_t = 0)]
    seed: usize,
    /// One-based branch permutation, e.g. 2,1.
    #[arg(long, value_delimiter = ',')]
    marking: Option<Vec<usize>>,
    /// Jets for `action`: coefficients of t, t^2, ... per branch, e.g. "1,2;1".
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Reduce to an orbit representative in `action`.
    #[arg(long)]
    reduce: bool,
    /// Second curve for `equiv`: a file path or `catalog:NAME`.
    #[arg(long)]
    against: Option<String>,
    /// Process catalog entries concurrently with `--catalog all`.
    #[arg(long)]
    parallel: bool,
}

fn load(path: &str) -> Result<CurveDocument> {
    if let Some(name) = path.strip_prefix("catalog:") {
        return catalog::lookup(name);
    }
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Error::Input(format!("stdin: {e}")))?
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{path}: {e}")))?
    };
    CurveDocument::parse(&text)
}

fn documents(args: &Args) -> Result<Vec<CurveDocument>> {
    match (&args.input, &args.catalog) {
        (Some(p), _) => Ok(vec![load(&p.to_string_lossy())?]),
        (None, Some(n)) if n == "all" => Ok(catalog::entries()),
        (None, Some(n)) => Ok(vec![catalog::lookup(n)?]),
        (None, None) => Err(Error::Input("give --input FILE or --catalog NAME".into())),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("germ-moduli: {e}");
    ExitCode::from(exit_code(&Err(e.clone())) as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.command == Action::Catalog {
        for d in catalog::entries() {
            println!("{:<20} {}", d.name.unwrap_or_default(), d.description.unwrap_or_default());
        }
        return ExitCode::SUCCESS;
    }
    let docs = match documents(&args) {
        Ok(d) => d,
        Err(e) => return fail(&e),
    };
    let Some(cmd) = args.command.command() else {
        for d in &docs {
            println!("{}", d.emit());
        }
        return ExitCode::SUCCESS;
    };
    let against = match args.against.as_deref().map(load).transpose() {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let cfg = RunConfig {
        truncation: args.truncation,
        degree_bound: args.degree_bound,
        format: args.format,
        seed: args.seed,
        marking: args.marking.clone(),
        phi: args.phi.clone(),
        reduce: args.reduce,
        against,
    };
    if docs.len() == 1 {
        let r = run(cmd, &docs[0], &cfg);
        return match &r {
            Ok(rep) => {
                print!("{}", emit(&rep.value, cfg.format));
                ExitCode::from(exit_code(&r) as u8)
            }
            Err(e) => fail(e),
        };
    }
    let results = run_many(cmd, &docs, &cfg, args.parallel);
    print!("{}", emit(&batch_value(&docs, &results), cfg.format));
    ExitCode::from(results.iter().map(exit_code).max().unwrap_or(0) as u8)
}
