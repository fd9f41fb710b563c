use std::process::ExitCode;

use clap::Parser;
use twistlab::cli::{
    parse_complex, parse_list, run, CoeffMethod, Command, OutputFormat, RunConfig,
};

/// Standard twists of L-functions: invariants, residues and functional-equation checks.
#[derive(Parser, Debug)]
#[command(name = "twistlab", version, about)]
struct Args {
    /// invariants | sine | coeffs | spectrum | residues | eval | verify-fe | compat | probe-growth | residue-identity
    command: String,

    /// Descriptor JSON file or catalog name.
    #[arg(long)]
    desc: String,

    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,

    /// Complex point, e.g. "-1+10i".
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,

    #[arg(long)]
    k: Option<usize>,

    /// Number of structural coefficients.
    #[arg(long = "M")]
    m: Option<usize>,

    /// Comma-separated X ladder.
    #[arg(long = "X")]
    x: Option<String>,

    #[arg(long, default_value_t = 1e-10, allow_hyphen_values = true)]
    tol: f64,

    #[arg(long, default_value = "text")]
    format: String,

    #[arg(long)]
    out: Option<String>,

    /// recursion | rayfit
    #[arg(long, default_value = "recursion")]
    method: String,

    /// Companion index for probe-growth.
    #[arg(long, default_value_t = 0)]
    ell: usize,

    /// Comma-separated t grid for probe-growth.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,

    /// Highest order checked by residue-identity.
    #[arg(long, default_value_t = 2)]
    nu_max: usize,
}

fn config(args: Args) -> twistlab::Result<RunConfig> {
    let mut cfg = RunConfig::new(args.desc, args.command.parse::<Command>()?);
    cfg.alpha = args.alpha;
    cfg.s = args.s.as_deref().map(parse_complex).transpose()?;
    cfg.k = args.k;
    cfg.m = args.m;
    cfg.x_ladder = args.x.as_deref().map(parse_list).transpose()?;
    cfg.tol = args.tol;
    cfg.output_format = args.format.parse::<OutputFormat>()?;
    cfg.output_path = args.out;
    cfg.method = args.method.parse::<CoeffMethod>()?;
    cfg.ell = args.ell;
    cfg.t_grid = args.t.as_deref().map(parse_list).transpose()?;
    cfg.nu_max = args.nu_max;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let cfg = match config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = run(&cfg);
    if let Some(err) = &outcome.error {
        eprintln!("error: {err}");
    } else if cfg.output_path.is_none() {
        print!("{}", outcome.report);
    }
    ExitCode::from(outcome.exit_code as u8)
}
