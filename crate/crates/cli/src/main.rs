mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exact Mukai-lattice, Riemann-Roch and Schubert computations.
#[derive(Debug, Parser)]
#[command(name = "mukai", version)]
pub struct Cli {
    /// Print a JSON object instead of aligned text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Manifold document (a ring, or a flag when it has s_coords).
    #[arg(long, global = true, value_name = "PATH")]
    pub manifold: Option<PathBuf>,
    /// Flag document.
    #[arg(long, global = true, value_name = "PATH")]
    pub flag: Option<PathBuf>,
    /// Bundle document; repeat for commands taking two bundles.
    #[arg(long, global = true, value_name = "PATH")]
    pub bundle: Vec<PathBuf>,
    /// Integer parameter: twist power, Pieri index, symmetric power.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// Casson-Donaldson registry file.
    #[arg(long, global = true, value_name = "PATH")]
    pub registry: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Chern character and Mukai vector of a bundle.
    Mukai,
    /// Euler form χ(E1, E2) and its symmetric/skew parts.
    Chi,
    /// Mukai pairing of two bundles (on the K3 surface when --flag is given).
    Pair,
    /// Restriction of a Mukai vector to the K3 surface of a flag.
    Restrict,
    /// Expected dimensions of moduli spaces.
    Vdim,
    /// Twist a Mukai vector by exp(k·L).
    Twist {
        /// Twisting class L as comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        by: String,
    },
    /// Reflection α_m(m') = -m' - h(m, m')·m of the second bundle by the first.
    Reflect {
        /// Declared value of h(m, m'); defaults to the topological χ.
        #[arg(long, allow_hyphen_values = true)]
        h: Option<i64>,
    },
    /// Check that a manifold document with its surface class is a flag.
    ValidateFlag { path: PathBuf },
    /// The plain double of a flag glued to itself.
    Double,
    /// Gluing, smoothness and joint obstruction checks.
    GlueCheck { path: PathBuf },
    /// Dimension of the smoothing deformations of a gluing.
    DeformDims {
        path: PathBuf,
        /// Known h^0 of the section line bundle, overriding Riemann-Roch.
        #[arg(long)]
        h0: Option<u64>,
    },
    /// Casson-Donaldson registry operations.
    Cd {
        #[command(subcommand)]
        op: CdOp,
    },
    /// Schubert calculus on G(2, n).
    Schubert {
        #[command(subcommand)]
        op: SchubertOp,
    },
    /// Literature constants and open quantities.
    Constants,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SeedKind {
    LineBundle,
    Skyscraper,
}

#[derive(Debug, Subcommand)]
pub enum CdOp {
    /// Create an empty registry file.
    Init,
    /// List the entries.
    Show,
    /// Re-derive every closure entry.
    Verify,
    /// Seed the registry with a line bundle or skyscraper sheaf on --manifold.
    Seed {
        #[arg(long, value_enum)]
        kind: SeedKind,
        /// First Chern class of the line bundle.
        #[arg(long, allow_hyphen_values = true)]
        c1: Option<String>,
    },
    /// Add the family α_m(T_L^k m') with value CD(m)·CD(m').
    Closure {
        m: usize,
        mp: usize,
        #[arg(long, allow_hyphen_values = true)]
        by: String,
    },
    /// Relative invariant of a flag from a moduli Euler characteristic.
    Degeneration {
        #[arg(long, allow_hyphen_values = true, conflicts_with = "euler_named")]
        euler: Option<i64>,
        #[arg(long)]
        euler_named: Option<String>,
    },
    /// Allow an entry to be used as a closure parent.
    MarkExceptional { id: usize },
    /// A concrete member of a closure family at twist power --k.
    Member { id: usize },
}

#[derive(Debug, Subcommand)]
pub enum SchubertOp {
    /// Multiply a class by σ_k.
    Pieri {
        expr: String,
        #[arg(long)]
        n: u32,
    },
    /// Degree of an expression such as sigma1^4.
    Integrate {
        expr: String,
        #[arg(long)]
        n: u32,
    },
    /// ∫ c_top(Sym^k S*) on G(2, n).
    Ctop {
        #[arg(long)]
        n: u32,
    },
    /// Lines on a generic quintic threefold.
    LinesQuintic,
    /// Lines on a smooth cubic surface.
    LinesCubic,
    /// Lines on a double cover of P^3 branched along an octic.
    LinesOcticDouble,
    /// Euler characteristic of G(2, n).
    Euler {
        #[arg(long)]
        n: u32,
    },
    /// Lines meeting four general lines, with the degenerate configuration.
    FourLines {
        #[arg(long, default_value_t = 4)]
        n: u32,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(64)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    commands::run(&cli)
}
