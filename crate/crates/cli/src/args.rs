use clap::{Parser, Subcommand};

/// Slice regular functions from the command line. Every command reads its
/// payload as JSON (a file, `-` for standard input, or inline text) and
/// writes JSON to standard output.
#[derive(Debug, Parser)]
#[command(name = "slicereg", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON payload: a path, `-` for standard input, or inline JSON.
    #[arg(long, global = true)]
    pub input: Option<String>,

    /// A quaternion `[w, x, y, z]` as JSON.
    #[arg(long, global = true)]
    pub point: Option<String>,

    /// Order used for truncated (non-exact) series.
    #[arg(long, global = true, default_value_t = 64)]
    pub truncation: usize,

    /// Pass threshold for the `roots` and `isssa-demo` checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,

    /// Genus of the convergence factors used by `construct`.
    #[arg(long, global = true, default_value_t = 0)]
    pub genus: usize,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Property suite name, or `all`.
    #[arg(long, global = true, default_value = "all")]
    pub suite: String,

    /// Lowest Laurent index.
    #[arg(long, global = true, default_value_t = -5, allow_negative_numbers = true)]
    pub n_min: i64,

    /// Highest Laurent index.
    #[arg(long, global = true, default_value_t = 15, allow_negative_numbers = true)]
    pub n_max: i64,

    /// Base `d` of the Iss'sa product.
    #[arg(long, global = true, default_value_t = 2)]
    pub d: u32,

    /// Root index `ℓ` of the Iss'sa product.
    #[arg(long, global = true, default_value_t = 2)]
    pub ell: u32,

    /// Number of factors kept in the Iss'sa product.
    #[arg(long, global = true, default_value_t = 3)]
    pub n_factors: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate a series, rational function or product evaluator at `--point`.
    Eval,
    /// The ⋆-product of `{"f": series, "g": series}`.
    Star,
    /// The principal spherical divisor of a function.
    Divisor,
    /// Build a Weierstrass product realizing a positive divisor.
    Construct,
    /// Factor a slice preserving polynomial into sphere and point factors.
    Factor,
    /// Laurent coefficients of a rational function at `--point`.
    Laurent,
    /// Check that `exp(p/ℓ)` is an `ℓ`-th root of `exp(p)`.
    Roots,
    /// Residuals of the Iss'sa product identity and its vanishing orders.
    IsssaDemo,
    /// Run the seeded property suites.
    Verify,
}
