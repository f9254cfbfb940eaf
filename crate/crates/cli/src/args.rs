use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "tubestab",
    version,
    about = "Determinantal representations and stability checks on tube domains"
)]
pub struct Cli {
    /// Worker threads for parallel sampling (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Record wall time in the run manifest.
    #[arg(long, global = true)]
    pub timing: bool,
    /// Seed; falls back to TUBESTAB_SEED, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a determinantal representation from a contraction.
    Gen(GenArgs),
    /// Check a claimed representation p·q = prefactor·det(pencil).
    Verify(VerifyArgs),
    /// Sampled stability of a polynomial on a domain.
    Stab(StabArgs),
    /// Apply a structure map or Cayley-type transform.
    Transform(TransformArgs),
    /// Run a batch of identity checks.
    Suite(SuiteArgs),
    /// Expand a representation into polynomial coefficients.
    Extract(ExtractArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Structure {
    Halfplane,
    Lorentz2,
    Lorentzn,
    Skew,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub structure: Structure,
    /// Number of variables for `halfplane`.
    #[arg(long)]
    pub dims: Option<usize>,
    /// Multiplicities for `halfplane`, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    pub multiplicities: Option<Vec<usize>>,
    /// Dimension `n` for `lorentzn` and `skew`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Block multiplicity for `lorentz2`, `lorentzn` and `skew`.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Operator norm of the random contraction.
    #[arg(long, default_value_t = 0.9)]
    pub norm: f64,
    /// Read the contraction from a matrix file instead of sampling it.
    #[arg(long)]
    pub contraction: Option<PathBuf>,
    /// Also write the bare representation to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub p: PathBuf,
    /// Cofactor polynomial; defaults to 1.
    #[arg(long)]
    pub q: Option<PathBuf>,
    #[arg(long)]
    pub rep: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    /// Relative identity tolerance before condition scaling.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Skip the coefficient comparison.
    #[arg(long)]
    pub no_coefficients: bool,
}

#[derive(Args, Debug)]
pub struct StabArgs {
    #[arg(long)]
    pub p: PathBuf,
    /// Domain as inline JSON or a file path.
    #[arg(long)]
    pub domain: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Random lines for the fibered line checks (tube domains only).
    #[arg(long, default_value_t = 0)]
    pub lines: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapName {
    Phi,
    PhiInv,
    PhiN,
    PhiNInv,
    MatrixCayley,
    MatrixCayleyInv,
    Psi,
    PsiInv,
    Eta,
    EtaInv,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub map: MapName,
    /// Point `{"re":[..],"im":[..]}` or matrix `{"rows","cols","re","im"}`.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    /// clifford, t27, lieball, roundtrips, proofchains or all.
    pub name: String,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[arg(long)]
    pub rep: PathBuf,
    /// Also write the bare polynomial to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
