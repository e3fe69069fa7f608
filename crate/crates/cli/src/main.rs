//! `credit-ytm`: price defaultable bonds, solve yields, build yield curves,
//! compute CDS spreads and bootstrap default intensities from the command
//! line. All rates are decimals (0.03 is 3%).

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use input::{decimal_list, flag_decimal, maturity_list};
use output::Format;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit status 2.
    Validation(String),
    /// Solver or numerical failure: exit status 3.
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<credit_ytm::Error> for CliError {
    fn from(e: credit_ytm::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(name = "credit-ytm", version, about = "Defaultable bond yields, CDS spreads and hazard bootstrapping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model price of a defaultable bond.
    Price(BondArgs),
    /// Yield-to-maturity of a quoted or model-priced bond.
    Ytm(YtmArgs),
    /// Par yield (coupon rate pricing the bond at face).
    ParYield(BondArgs),
    /// Yield grid over maturities × coupon rates.
    Curve(CurveArgs),
    /// Fair CDS spread at one or several maturities.
    Cds(CdsArgs),
    /// Bootstrap yearly default intensities from bond quotes.
    Bootstrap(BootstrapArgs),
    /// Run the built-in regression cases.
    Verify(OutputArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Annual periods, per-period default probability, annual coupons.
    Discrete,
    /// Default intensity, continuous coupons, continuously compounded yields.
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HazardInterp {
    /// Each row's intensity applies up to that row's time.
    Step,
    /// Rows are knots of a piecewise-linear intensity (CDS only).
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Paper,
    Consistent,
}

#[derive(Args)]
pub struct OutputArgs {
    /// Write the result to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args)]
pub struct CreditArgs {
    #[arg(long, value_enum, default_value = "discrete")]
    pub model: Model,
    /// Constant default probability per period (discrete) or intensity (continuous).
    #[arg(long, value_parser = flag_decimal, conflicts_with = "hazard_file")]
    pub lambda: Option<f64>,
    /// CSV with columns `period_or_time,lambda`.
    #[arg(long)]
    pub hazard_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "step")]
    pub hazard_interp: HazardInterp,
    /// Recovery amount per 100 face.
    #[arg(long, value_parser = flag_decimal)]
    pub recovery: Option<f64>,
    /// Flat risk-free rate.
    #[arg(long, value_parser = flag_decimal)]
    pub rate: Option<f64>,
}

#[derive(Args)]
pub struct BondArgs {
    #[command(flatten)]
    pub credit: CreditArgs,
    /// Coupon amount per year on 100 face.
    #[arg(long, value_parser = flag_decimal, conflicts_with = "coupon_rate")]
    pub coupon: Option<f64>,
    /// Coupon as a fraction of face.
    #[arg(long, value_parser = flag_decimal)]
    pub coupon_rate: Option<f64>,
    /// Maturity in years (whole years for the discrete model).
    #[arg(long, value_parser = flag_decimal)]
    pub maturity: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct YtmArgs {
    #[command(flatten)]
    pub bond: BondArgs,
    /// Observed price per 100 face; without it the model price is used.
    #[arg(long, value_parser = flag_decimal)]
    pub price: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct List(pub Vec<f64>);

fn maturities_arg(raw: &str) -> Result<List, String> {
    maturity_list(raw).map(List)
}

fn rates_arg(raw: &str) -> Result<List, String> {
    decimal_list(raw).map(List)
}

#[derive(Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub credit: CreditArgs,
    /// `1..30` or a comma-separated list.
    #[arg(long, value_parser = maturities_arg)]
    pub maturities: List,
    /// Comma-separated coupon rates as fractions.
    #[arg(long, value_parser = rates_arg)]
    pub coupon_rates: List,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct CdsArgs {
    #[command(flatten)]
    pub credit: CreditArgs,
    /// Recovery as a fraction of notional; `--recovery` (per 100) is also accepted.
    #[arg(long, value_parser = flag_decimal, conflicts_with = "recovery")]
    pub recovery_fraction: Option<f64>,
    #[arg(long, value_parser = flag_decimal, conflicts_with = "maturities")]
    pub maturity: Option<f64>,
    /// `1..30` or a comma-separated list.
    #[arg(long, value_parser = maturities_arg)]
    pub maturities: Option<List>,
    #[arg(long, value_enum, default_value = "paper")]
    pub kernel: KernelArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct BootstrapArgs {
    /// CSV with columns `maturity_years,coupon_rate,clean_price`.
    #[arg(long)]
    pub quotes_file: PathBuf,
    /// Recovery amount per 100 face.
    #[arg(long, value_parser = flag_decimal)]
    pub recovery: f64,
    /// Flat risk-free rate.
    #[arg(long, value_parser = flag_decimal, conflicts_with = "zero_curve_file", required_unless_present = "zero_curve_file")]
    pub rate: Option<f64>,
    /// CSV with columns `maturity_years,zero_rate` (continuously compounded).
    #[arg(long)]
    pub zero_curve_file: Option<PathBuf>,
    /// Upper end of the intensity search range.
    #[arg(long, value_parser = flag_decimal, default_value = "20")]
    pub lambda_max: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (table, out) = match cli.command {
        Command::Price(a) => (commands::price(&a)?, a.output),
        Command::Ytm(a) => (commands::ytm(&a)?, a.bond.output),
        Command::ParYield(a) => (commands::par_yield(&a)?, a.output),
        Command::Curve(a) => (commands::curve(&a)?, a.output),
        Command::Cds(a) => (commands::cds(&a)?, a.output),
        Command::Bootstrap(a) => (commands::bootstrap(&a)?, a.output),
        Command::Verify(o) => {
            let (table, all_passed) = commands::verify()?;
            output::emit(&table.render(o.format)?, o.out.as_deref())?;
            return if all_passed {
                Ok(())
            } else {
                Err(CliError::Numerical("some regression cases failed".into()))
            };
        }
    };
    output::emit(&table.render(out.format)?, out.out.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("credit-ytm: {e}");
            ExitCode::from(e.code())
        }
    }
}
