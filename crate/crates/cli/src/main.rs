mod catalog_cmd;
mod expr_cmd;
mod hs_cmd;
mod out;
mod problem;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use out::{Fail, Output};

#[derive(Parser, Debug)]
#[command(name = "tresse", version, about = "Symmetry reduction, quotient PDEs and the Hunter-Saxton solution pipeline")]
struct Cli {
    /// Directory for CSV/JSON artifacts (default: $TRESSE_OUT_DIR, else the working directory).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Seed for probabilistic zero tests.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Staged verification of catalog entries.
    Verify(VerifyArgs),
    /// Hunter-Saxton solutions.
    #[command(subcommand)]
    Hs(HsCmd),
    /// Catalog listing, solutions and characteristics.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Expression utilities.
    #[command(subcommand)]
    Expr(ExprCmd),
    /// Runs a JSON problem file.
    Run {
        file: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Catalog entry name.
    pub entry: Option<String>,
    #[arg(long)]
    pub all: bool,
    /// Also write verify.json with every stage item.
    #[arg(long)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum HsCmd {
    /// Surface samples of the parametrized solution for g and C.
    Solve(hs_cmd::SolveArgs),
    /// g, C and diagnostics for Cauchy data u(t0, x) = u0(x).
    Cauchy(hs_cmd::CauchyArgs),
    /// Points where ∂X/∂w = 0.
    Singular(hs_cmd::SingularArgs),
    /// Action of a symmetry flow on g.
    Transform(hs_cmd::TransformArgs),
}

#[derive(Subcommand, Debug)]
pub enum CatalogCmd {
    /// Lists the entries.
    List,
    /// Instantiates an entry's solution for chosen functions and parameters.
    Solve(catalog_cmd::SolveArgs),
    /// Integrates a first-order quotient by characteristics.
    Characteristics(catalog_cmd::CharArgs),
}

#[derive(Subcommand, Debug)]
pub enum ExprCmd {
    /// Prints the normal form.
    Parse { expr: String },
    /// Partial or total derivative.
    Diff {
        expr: String,
        /// Variable for ∂/∂v.
        #[arg(long)]
        var: Option<String>,
        /// t or x for the total derivative D_t or D_x.
        #[arg(long)]
        total: Option<String>,
    },
    /// Zero test; exit 0 when the expression vanishes.
    Zero { expr: String },
}

fn dispatch(cmd: Cmd, out: &Output, seed: u64) -> out::Outcome {
    match cmd {
        Cmd::Verify(a) => catalog_cmd::verify(&a, out),
        Cmd::Hs(HsCmd::Solve(a)) => hs_cmd::solve(&a, out),
        Cmd::Hs(HsCmd::Cauchy(a)) => hs_cmd::cauchy(&a, out),
        Cmd::Hs(HsCmd::Singular(a)) => hs_cmd::singular(&a, out),
        Cmd::Hs(HsCmd::Transform(a)) => hs_cmd::transform(&a),
        Cmd::Catalog(CatalogCmd::List) => catalog_cmd::list(),
        Cmd::Catalog(CatalogCmd::Solve(a)) => catalog_cmd::solve(&a),
        Cmd::Catalog(CatalogCmd::Characteristics(a)) => catalog_cmd::characteristics(&a, out),
        Cmd::Expr(e) => expr_cmd::run(e),
        Cmd::Run { file } => {
            let argv = match problem::plan(problem::load(&file)?)? {
                problem::Plan::Inline(e) => return problem::run_inline(&e),
                problem::Plan::Argv(argv) => argv,
            };
            log::info!("problem file runs: {}", argv.join(" "));
            let cli = Cli::try_parse_from(&argv).map_err(|e| Fail::Usage(format!("problem file: {e}")))?;
            let seed = if cli.seed != 0x5eed { cli.seed } else { seed };
            tresse::sym::set_default_seed(seed);
            dispatch(cli.cmd, out, seed)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    tresse::sym::set_default_seed(cli.seed);
    let out = Output::new(cli.out_dir.clone());
    match dispatch(cli.cmd, &out, cli.seed) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
