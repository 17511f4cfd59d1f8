use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gdaha::pipeline::Tolerances;
use gdaha::C64;

#[derive(Debug, Parser)]
#[command(name = "gdaha", version, about = "Representations of generalized DAHAs, Deligne-Simpson tuples and their monodromy")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Target residual of the Deligne-Simpson solver.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol_solver: f64,
    /// Local tolerance of the transport integrator.
    #[arg(long, global = true, default_value_t = 1e-11)]
    pub tol_transport: f64,
    /// Rank threshold for subspaces and centralizers.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_rank: f64,
    /// Bound on relation, product and spectrum residuals.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_relations: f64,
    /// Bound on the conjugacy match of the two diagram routes.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_diagram: f64,
}

impl Common {
    pub fn tolerances(&self) -> anyhow::Result<Tolerances> {
        let t = Tolerances {
            solver: self.tol_solver,
            transport: self.tol_transport,
            rank: self.tol_rank,
            relations: self.tol_relations,
            diagram: self.tol_diagram,
        };
        for (name, v) in [("solver", t.solver), ("transport", t.transport), ("rank", t.rank), ("relations", t.relations), ("diagram", t.diagram)] {
            if !(v > 0.0) {
                return Err(gdaha::Error::Parse(format!("tolerance {name} must be positive, got {v}")).into());
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Additive,
    Multiplicative,
}

#[derive(Debug, Args)]
pub struct Contour {
    /// Real punctures, increasing; defaults to 0, 1, ..., m-1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<f64>>,
    /// Real base points to the right of the punctures; defaults to m, m+1, ...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub base: Option<Vec<f64>>,
    /// Detour radius around punctures and base points.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived parameters (mu, xi, hbar, u, t, q) and diagnostics.
    Params {
        #[arg(long)]
        params: PathBuf,
    },
    /// Exact regular representation of the degenerate cyclotomic algebra.
    Algebra {
        #[arg(long)]
        n: usize,
        /// Comma-separated exact rationals, e.g. `1/3,-2/7`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        nu: String,
        /// Include the exact generator matrices in the output.
        #[arg(long)]
        matrices: bool,
    },
    /// Solves an additive or multiplicative Deligne-Simpson problem.
    SolveDs {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Kind::Additive)]
        kind: Kind,
        #[arg(long, default_value_t = 300)]
        max_iter: usize,
        #[arg(long, default_value_t = 32)]
        starts: usize,
    },
    /// Monodromy of the KZ connection of a module.
    Monodromy {
        #[arg(long)]
        params: PathBuf,
        /// Additive tuples (`solve-ds` output); n files give the induced `B_n`-module at nu = 0.
        #[arg(long = "ds", conflicts_with = "rep")]
        ds: Vec<PathBuf>,
        /// A module written by `continue-rep`.
        #[arg(long)]
        rep: Option<PathBuf>,
        #[command(flatten)]
        contour: Contour,
    },
    /// Riemann-Hilbert map of an additive tuple.
    Rh {
        #[arg(long)]
        ds: PathBuf,
        #[command(flatten)]
        contour: Contour,
    },
    /// Compares monodromy-then-restriction with restriction-then-Riemann-Hilbert.
    Diagram {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        ds: PathBuf,
        #[command(flatten)]
        contour: Contour,
    },
    /// Isomonodromic flow of a D4 tuple along a path of cross-ratios.
    Flow {
        #[arg(long)]
        ds: PathBuf,
        /// Path points `re:im`, comma-separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_point, allow_hyphen_values = true, conflicts_with = "arc")]
        kappa: Vec<C64>,
        /// Circular arc `center_re,center_im,radius,theta0,theta1,steps`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        arc: Option<Vec<f64>>,
        /// Gauss-Newton tolerance on the invariants.
        #[arg(long, default_value_t = 1e-10)]
        flow_tol: f64,
        #[arg(long, default_value_t = 30)]
        flow_max_iter: usize,
        /// Length of the trace words used as invariants.
        #[arg(long, default_value_t = 4)]
        word_len: usize,
    },
    /// Continues an induced `B_n`-module from nu = 0 to the nu of the parameter file.
    ContinueRep {
        #[arg(long)]
        params: PathBuf,
        #[arg(long = "ds", required = true)]
        ds: Vec<PathBuf>,
        #[arg(long, default_value_t = 5)]
        steps: usize,
    },
    /// Runs solve-ds, monodromy, both restriction maps, RH and the match for n = 1.
    Pipeline {
        #[arg(long)]
        params: PathBuf,
        #[command(flatten)]
        contour: Contour,
        #[arg(long, default_value_t = 300)]
        max_iter: usize,
        #[arg(long, default_value_t = 32)]
        starts: usize,
    },
}

fn parse_point(s: &str) -> Result<C64, String> {
    let (re, im) = s.split_once(':').unwrap_or((s, "0"));
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(C64::new(p(re)?, p(im)?))
}
