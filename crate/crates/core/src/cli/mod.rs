//! Command-line front end.

mod commands;
mod io;
mod sweep;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use sweep::{run_sweep, write_bundle, Bundle, CaseRecord, ParamSpec, RunConfig, Summary, Tolerances};

use crate::error::Result;
use crate::params::{Geometry, Params};

#[derive(Debug, Parser)]
#[command(name = "kagft", version, about = "Numerics for the (k,a)-generalised Fourier transform")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// `(N, k, a)` plus the representation.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long = "N", default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub k: f64,
    #[arg(long)]
    pub a: f64,
    /// Work with radial profiles even when N = 1.
    #[arg(long)]
    pub radial: bool,
}

impl ParamArgs {
    pub fn params(&self) -> Result<Params> {
        let geometry = if self.radial || self.dim > 1 { Geometry::Radial } else { Geometry::Line };
        Params::with_geometry(self.dim, self.k, self.a, geometry)
    }
}

/// Size of the spectral discretisation.
#[derive(Debug, Clone, Args)]
pub struct BasisArgs {
    /// Number of basis functions.
    #[arg(long = "n", default_value_t = 32)]
    pub n_basis: usize,
    /// Quadrature nodes; defaults to a size matched to `--n`.
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Paley,
    Hy,
    Hyp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelModeArg {
    Abel,
    Extrapolated,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate (N, k, a) and print the admissibility report as JSON.
    CheckParams {
        #[arg(long = "N", default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        a: f64,
    },
    /// Quadrature calibration and superlevel-set functionals of a symbol.
    Measure {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 512)]
        nodes: usize,
        /// Symbol spec, e.g. `power:gamma=2` or `indicator:R=1`.
        #[arg(long)]
        psi: Option<String>,
        /// Level at which to report `mu{|psi| >= t}`.
        #[arg(long)]
        t: Option<f64>,
        /// Also report `sup_t t mu{|psi| >= t}`.
        #[arg(long)]
        paley: bool,
    },
    /// Spectrum of the deformed oscillator in the Laguerre basis.
    Oscillator {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        basis: BasisArgs,
        /// Write the operator matrix as CSV (row,col,value).
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Apply the transform to sampled data (CSV node,re,im).
    Transform {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        input: PathBuf,
        /// Defaults to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        inverse: bool,
    },
    /// Evaluate the kernel `B(xi, x)`.
    Kernel {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_enum, default_value_t = KernelModeArg::Extrapolated)]
        mode: KernelModeArg,
        /// Damping for `--mode abel`.
        #[arg(long, default_value_t = crate::transform::DEFAULT_EPS)]
        eps: f64,
    },
    /// Paley, Hausdorff-Young or HYP ratios over a test suite (CSV).
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        p: f64,
        /// HYP exponent in [p, p'].
        #[arg(long)]
        b: Option<f64>,
        /// Weight symbol for Paley and HYP.
        #[arg(long)]
        psi: Option<String>,
        #[arg(long, default_value = "default")]
        suite: String,
        #[arg(long, default_value_t = crate::suite::DEFAULT_SEED)]
        seed: u64,
        /// Kernel bound for HY; estimated on a 128-function basis when absent.
        #[arg(long)]
        kernel_bound: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// The multiplier bound `H` of a symbol.
    Bound {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        h: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 512)]
        nodes: usize,
    },
    /// Empirical `L^p -> L^q` norm of a multiplier.
    Opnorm {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        h: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value = "default")]
        suite: String,
        #[arg(long, default_value_t = crate::suite::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = crate::suite::FAMILY_SIZE)]
        samples: usize,
    },
    /// Picard solve of `u_t = |Bu|^p`.
    Heat {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        basis: BasisArgs,
        #[command(flatten)]
        pde: PdeArgs,
    },
    /// Picard solve of `u_tt = b(t) |Bu|^p`.
    Wave {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        basis: BasisArgs,
        #[command(flatten)]
        pde: PdeArgs,
        #[arg(long, default_value = "const:1")]
        b: String,
        #[arg(long, default_value = "zero")]
        u1: String,
    },
    /// Run every case of a JSON config and write CSV reports plus a summary.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PdeArgs {
    #[arg(long, default_value = "one")]
    pub h: String,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    pub c: f64,
    /// Horizon, or `auto` for 0.9 T*.
    #[arg(long = "T", default_value = "auto")]
    pub horizon: String,
    #[arg(long, default_value = "groundstate:scale=0.1")]
    pub u0: String,
    #[arg(long, default_value_t = 128)]
    pub n_time: usize,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Run past T* (no existence guarantee).
    #[arg(long)]
    pub force: bool,
    /// CSV of (t, ||u(t)||); defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON diagnostics; defaults to stderr.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
}

/// Runs one command.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::CheckParams { dim, k, a } => commands::check_params(dim, k, a),
        Command::Measure { params, nodes, psi, t, paley } => commands::measure(&params, nodes, psi.as_deref(), t, paley),
        Command::Oscillator { params, basis, dump_matrix } => commands::oscillator(&params, &basis, dump_matrix.as_deref()),
        Command::Transform {
            params,
            basis,
            input,
            output,
            inverse,
        } => commands::transform(&params, &basis, &input, output.as_deref(), inverse),
        Command::Kernel {
            params,
            basis,
            xi,
            x,
            mode,
            eps,
        } => commands::kernel(&params, &basis, xi, x, mode, eps),
        Command::Verify {
            params,
            basis,
            which,
            p,
            b,
            psi,
            suite,
            seed,
            kernel_bound,
            output,
        } => commands::verify(&commands::VerifyArgs {
            params,
            basis,
            which,
            p,
            b,
            psi,
            suite,
            seed,
            kernel_bound,
            output,
        }),
        Command::Bound { params, h, p, q, nodes } => commands::bound(&params, &h, p, q, nodes),
        Command::Opnorm {
            params,
            basis,
            h,
            p,
            q,
            suite,
            seed,
            samples,
        } => commands::opnorm(&params, &basis, &h, p, q, &suite, seed, samples),
        Command::Heat { params, basis, pde } => commands::heat(&params, &basis, &pde),
        Command::Wave { params, basis, pde, b, u1 } => commands::wave(&params, &basis, &pde, &b, &u1),
        Command::Sweep { config, out } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(dir) = out {
                cfg.output_dir = dir;
            }
            let bundle = run_sweep(&cfg)?;
            write_bundle(&bundle, &cfg.output_dir)?;
            io::emit(None, &bundle.summary_json()?)
        }
    }
}
