//! `ptheta`: reproducible reports on the partial theta function.
//!
//! Every subcommand writes one JSON or CSV document that embeds the run
//! configuration. Exit codes: 0 success, 1 output failure, 2 bad arguments,
//! 3 verification mismatch, 4 numeric non-convergence.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use partial_theta::numeric::{Precision, ZeroFindParams};
use partial_theta::RkMethod;

use config::{parse_grid, parse_orders, parse_precision, Format, RunConfig};
use error::{CliError, EXIT_MISMATCH};
use output::Outcome;

#[derive(Parser, Debug)]
#[command(
    name = "ptheta",
    version,
    about = "Zeros of the partial theta function and related q-series"
)]
struct Cli {
    /// Directory for reports when `--out` is not given; otherwise standard output.
    #[arg(long, global = true, env = "PTHETA_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Recurrence,
    EulerCube,
    #[value(alias = "triple-product-inverse")]
    TripleProduct,
    All,
}

impl MethodArg {
    fn method(self) -> Option<RkMethod> {
        match self {
            MethodArg::Recurrence => Some(RkMethod::Recurrence),
            MethodArg::EulerCube => Some(RkMethod::EulerCube),
            MethodArg::TripleProduct => Some(RkMethod::TripleProductInverse),
            MethodArg::All => None,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficients r_0..r_n of 1/(q)_inf^3.
    Rk {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Laurent expansion of the j-th zero, coefficients g_0..g_order.
    Zero {
        #[arg(long)]
        j: u32,
        #[arg(long, default_value_t = 10)]
        order: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Delta_j and Phi_j through q^order.
    Delta {
        #[arg(long)]
        j: u32,
        #[arg(long, default_value_t = 9)]
        order: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare g_(j,k) with r_k for 2 <= j <= j_max.
    Stabilize {
        #[arg(long, default_value_t = 12)]
        j_max: u32,
        /// Compare k up to min(depth, j).
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Newton refinement of the j-th zero at a given q.
    Numeric {
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        q_im: f64,
        #[arg(long)]
        j: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 12)]
        seed_order: usize,
        /// `auto`, `double` or a mantissa width in bits.
        #[arg(long, default_value = "auto", value_parser = parse_precision)]
        precision: Precision,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// theta(q, x), or d theta/dx with `--derivative`, with a truncation bound.
    Theta {
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        q_im: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x_im: f64,
        #[arg(long, default_value_t = 1e-15)]
        eps: f64,
        #[arg(long, default_value = "auto", value_parser = parse_precision)]
        precision: Precision,
        #[arg(long)]
        derivative: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Error of truncated expansions against the Newton zero.
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        q_im: f64,
        #[arg(long)]
        j: u32,
        /// `a..b` or a comma-separated list.
        #[arg(long, default_value = "0..12")]
        orders: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Termwise convexity inequalities for (q)_inf^3 on a grid in (0, 1).
    Convexity {
        /// `start:step:end` or a comma-separated list.
        #[arg(long, default_value = "0.01:0.01:0.99")]
        grid: String,
        #[arg(long, default_value_t = 200)]
        s_max: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// (q)_inf^3 and (q)_inf with second derivatives on a grid in (-1, 1).
    Profile {
        #[arg(long, default_value = "-0.99:0.01:0.99", allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run every reference check; exit 3 on any failure.
    VerifyAll {
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let (mut config, output, outcome): (RunConfig, OutputArgs, Outcome) = match cli.command {
        Command::Rk { n, method, output } => {
            let mut c = RunConfig::new("rk");
            c.n = Some(n);
            c.method = method.to_possible_value().map(|v| v.get_name().to_owned());
            (c, output, commands::rk(n, method.method())?)
        }
        Command::Zero { j, order, output } => {
            let mut c = RunConfig::new("zero");
            (c.j, c.order) = (Some(j), Some(order));
            (c, output, commands::zero(j, order)?)
        }
        Command::Delta { j, order, output } => {
            let mut c = RunConfig::new("delta");
            (c.j, c.order) = (Some(j), Some(order));
            (c, output, commands::delta(j, order)?)
        }
        Command::Stabilize {
            j_max,
            depth,
            output,
        } => {
            let mut c = RunConfig::new("stabilize");
            (c.j_max, c.depth) = (Some(j_max), Some(depth));
            (c, output, commands::stabilize(j_max, depth)?)
        }
        Command::Numeric {
            q,
            q_im,
            j,
            tol,
            seed_order,
            precision,
            output,
        } => {
            let mut c = RunConfig::new("numeric");
            c.q = Some([q, q_im]);
            (c.j, c.tol, c.seed_order, c.precision) =
                (Some(j), Some(tol), Some(seed_order), Some(precision));
            let mut params = ZeroFindParams::new(Complex64::new(q, q_im), j, seed_order, tol);
            params.precision = precision;
            (c, output, commands::numeric(&params)?)
        }
        Command::Theta {
            q,
            q_im,
            x,
            x_im,
            eps,
            precision,
            derivative,
            output,
        } => {
            let mut c = RunConfig::new(if derivative { "theta-dx" } else { "theta" });
            c.q = Some([q, q_im]);
            c.x = Some([x, x_im]);
            (c.eps, c.precision) = (Some(eps), Some(precision));
            let outcome = commands::theta(
                Complex64::new(q, q_im),
                Complex64::new(x, x_im),
                eps,
                precision,
                derivative,
            )?;
            (c, output, outcome)
        }
        Command::Sweep {
            q,
            q_im,
            j,
            orders,
            tol,
            output,
        } => {
            let mut c = RunConfig::new("sweep");
            c.q = Some([q, q_im]);
            (c.j, c.tol) = (Some(j), Some(tol));
            let orders = parse_orders(&orders).map_err(CliError::Usage)?;
            c.orders = Some(orders.clone());
            (
                c,
                output,
                commands::sweep(Complex64::new(q, q_im), j, &orders, tol)?,
            )
        }
        Command::Convexity {
            grid,
            s_max,
            output,
        } => {
            let grid = parse_grid(&grid).map_err(CliError::Usage)?;
            let mut c = RunConfig::new("convexity");
            c.s_max = Some(s_max);
            c.grid = Some(grid.clone());
            (c, output, commands::convexity(&grid, s_max)?)
        }
        Command::Profile { grid, output } => {
            let grid = parse_grid(&grid).map_err(CliError::Usage)?;
            let mut c = RunConfig::new("profile");
            c.grid = Some(grid.clone());
            (c, output, commands::profile(&grid)?)
        }
        Command::VerifyAll { output } => (
            RunConfig::new("verify-all"),
            output,
            commands::verify_all()?,
        ),
    };
    config.format = Some(output.format);
    config.out = output.out.clone();
    let path = output::destination(
        output.out.as_deref(),
        cli.out_dir.as_deref(),
        config.subcommand,
        output.format,
    );
    let bytes = output::render(&config, &outcome, output.format)?;
    output::emit(&bytes, path.as_deref())?;
    Ok(if outcome.verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_MISMATCH)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ptheta: {e}");
            e.exit_code()
        }
    }
}
