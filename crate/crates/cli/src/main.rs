//! `aoi`: analytic and simulated average age of information for TDMA and
//! CR-NOMA uplinks.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aoi_core::harness::{
    axis_range, emit_to_path, run_point, run_sweep, ComparisonRow, OutputFormat, PointConfig,
    RowMode, SimSettings, SweepAxis, SweepSpec,
};
use aoi_core::{Error, SchemeKind};

#[derive(Parser, Debug)]
#[command(
    name = "aoi",
    version,
    about = "Average AoI of TDMA and CR-NOMA uplinks, analytic and simulated"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form average AoI at one point.
    Analytic(PointArgs),
    /// Monte Carlo average AoI at one point.
    Simulate(SimPointArgs),
    /// Analytic and simulated values side by side at one point.
    Compare(SimPointArgs),
    /// One parameter swept over a range of values.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct PointArgs {
    /// tdma-nrt, tdma-rt, noma-nrt, noma-rt or all.
    #[arg(long, default_value = "all")]
    scheme: SchemeArg,
    /// Number of users M (even).
    #[arg(long, default_value_t = 8)]
    users: u32,
    /// Slot duration T.
    #[arg(long, default_value_t = 3.0)]
    slot: f64,
    /// Packet size N in bits per channel use.
    #[arg(long, default_value_t = 1.0)]
    bits: f64,
    /// Primary transmit SNR in dB.
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    snr_db: f64,
    /// Secondary transmit SNR in dB [default: --snr-db].
    #[arg(long, allow_negative_numbers = true)]
    snr_s_db: Option<f64>,
    /// Arrival rate of the tagged user.
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    /// Arrival rate of its NOMA partner [default: --lambda].
    #[arg(long)]
    lambda_partner: Option<f64>,
    #[arg(long, default_value = "csv")]
    format: FormatArg,
    /// Output file [default: standard output].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimArgs {
    /// Measured frames per replication.
    #[arg(long, default_value_t = 100_000)]
    frames: u64,
    /// Single replication seed.
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Comma-separated replication seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Frames discarded before measuring [default: frames/100, at least 100].
    #[arg(long)]
    warmup_frames: Option<u64>,
}

impl SimArgs {
    fn settings(&self) -> SimSettings {
        let seeds = match (&self.seeds, self.seed) {
            (Some(s), _) => s.clone(),
            (None, Some(s)) => vec![s],
            (None, None) => vec![1],
        };
        SimSettings {
            frames: self.frames,
            seeds,
            warmup_frames: self.warmup_frames,
        }
    }
}

#[derive(Args, Debug)]
struct SimPointArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    sim: SimArgs,
    /// snr-db, lambda or slot-duration.
    #[arg(long)]
    axis: AxisArg,
    #[arg(long, requires_all = ["to", "step"], conflicts_with = "values", allow_negative_numbers = true)]
    from: Option<f64>,
    #[arg(long, requires = "from", allow_negative_numbers = true)]
    to: Option<f64>,
    #[arg(long, requires = "from")]
    step: Option<f64>,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
    /// Which engines fill the rows.
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    mode: Mode,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Analytic,
    Simulation,
    Both,
}

impl From<Mode> for RowMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Analytic => RowMode::Analytic,
            Mode::Simulation => RowMode::Simulation,
            Mode::Both => RowMode::Both,
        }
    }
}

#[derive(Debug, Clone)]
struct SchemeArg(Vec<SchemeKind>);

impl std::str::FromStr for SchemeArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.eq_ignore_ascii_case("all") {
            Ok(SchemeArg(SchemeKind::ALL.to_vec()))
        } else {
            s.parse().map(|k| SchemeArg(vec![k]))
        }
    }
}

#[derive(Debug, Clone)]
struct FormatArg(OutputFormat);

impl std::str::FromStr for FormatArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.parse().map(FormatArg)
    }
}

#[derive(Debug, Clone)]
struct AxisArg(SweepAxis);

impl std::str::FromStr for AxisArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.parse().map(AxisArg)
    }
}

impl PointArgs {
    fn point(&self) -> PointConfig {
        PointConfig {
            users: self.users,
            slot: self.slot,
            bits: self.bits,
            snr_db: self.snr_db,
            snr_s_db: self.snr_s_db,
            lambda: self.lambda,
            lambda_partner: self.lambda_partner,
        }
    }

    fn write(&self, rows: &[ComparisonRow]) -> Result<(), Error> {
        emit_to_path(rows, self.format.0, self.out.as_deref())
    }
}

fn point_rows(
    args: &PointArgs,
    mode: RowMode,
    sim: Option<&SimSettings>,
) -> Result<Vec<ComparisonRow>, Error> {
    let point = args.point();
    args.scheme
        .0
        .iter()
        .map(|&s| run_point(&point, s, mode, sim))
        .collect()
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Analytic(args) => args.write(&point_rows(&args, RowMode::Analytic, None)?),
        Command::Simulate(args) => {
            let sim = args.sim.settings();
            args.point
                .write(&point_rows(&args.point, RowMode::Simulation, Some(&sim))?)
        }
        Command::Compare(args) => {
            let sim = args.sim.settings();
            args.point
                .write(&point_rows(&args.point, RowMode::Both, Some(&sim))?)
        }
        Command::Sweep(args) => {
            let values = match (&args.values, args.from, args.to, args.step) {
                (Some(v), ..) => v.clone(),
                (None, Some(from), Some(to), Some(step)) => axis_range(from, to, step)?,
                _ => {
                    return Err(Error::InvalidSweep(
                        "give --values or --from/--to/--step".into(),
                    ))
                }
            };
            let mode = RowMode::from(args.mode);
            // a parameter that breaks every point is a usage error, not a row
            let base = args.point.point();
            if let Some(Err(e)) = values
                .first()
                .map(|&v| base.with_axis(args.axis.0, v).system())
            {
                if values
                    .iter()
                    .all(|&v| base.with_axis(args.axis.0, v).system().is_err())
                {
                    return Err(e);
                }
            }
            let spec = SweepSpec {
                axis: args.axis.0,
                values,
                base,
                schemes: args.point.scheme.0.clone(),
                mode,
                sim: (mode != RowMode::Analytic).then(|| args.sim.settings()),
            };
            args.point.write(&run_sweep(&spec)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
