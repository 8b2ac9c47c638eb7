use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "addlab", version, about = "Additivity laboratory for convex trace functions of quantum channel outputs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Product,
    Entangled,
    Schmidt,
    Maxeig,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report to this file instead of standard output.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Points per edge of the Schmidt-simplex grid.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form output spectrum of the Werner-Holevo pair for a Schmidt vector.
    Spectrum {
        /// Three comma-separated Schmidt coefficients.
        #[arg(long)]
        schmidt: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Maximize a trace objective (or the largest output eigenvalue).
    Optimize {
        #[arg(long, default_value = "wh:3,wh:3")]
        pair: String,
        #[arg(long = "fn")]
        function: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Entangled)]
        mode: Mode,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Additivity gap between entangled and product maxima.
    Gap {
        #[arg(long, default_value = "wh:3,wh:3")]
        pair: String,
        #[arg(long = "fn")]
        function: String,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare f(1/3) + 8 f(1/12) with 5 f(0) + 4 f(1/4).
    Certify {
        #[arg(long = "fn")]
        function: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Additivity of kink functions max(0, x - x0) over a grid of x0.
    KinkScan {
        #[arg(long, default_value = "wh:3,wh:3")]
        pair: String,
        /// Comma-separated kink locations; defaults to 29 points on [0.05, 0.75].
        #[arg(long)]
        x0: Option<String>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Operator-convex family f_λ on the Werner-Holevo pair.
    Suite {
        /// Comma-separated λ values in (-1, 0]; defaults to 16 points.
        #[arg(long, allow_hyphen_values = true)]
        lambdas: Option<String>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check Tr f̃(σ) = Tr f(σ ⊗ diag μ) on random states.
    TensorCheck {
        #[arg(long = "fn")]
        function: String,
        /// Comma-separated probability vector.
        #[arg(long, default_value = "0.5,0.5")]
        mu: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sampled operator-convexity test.
    Convexity {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Optimize { .. } => "optimize",
            Command::Gap { .. } => "gap",
            Command::Certify { .. } => "certify",
            Command::KinkScan { .. } => "kink-scan",
            Command::Suite { .. } => "suite",
            Command::TensorCheck { .. } => "tensor-check",
            Command::Convexity { .. } => "convexity",
        }
    }
}
