//! `uwcap`: tables and solver output for the underwater network toolkit.

mod config;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use uwcap::netsim::{self, DeployMode, SimConfig};
use uwcap::numeric::log_space;
use uwcap::{
    absorption_db_per_km, absorption_linear, bound_curve, log_spaced_counts,
    optimal_center_frequency, ChannelParams, CurveFamily, DistanceKm, FrequencyKHz, Link,
};

use config::ConfigFile;
use table::Table;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] uwcap::Error),
    #[error("{0} of {1} runs broke the bound")]
    Violation(usize, usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use uwcap::Error as E;
        match self {
            CliError::Input(_) | CliError::Core(E::Domain(_)) => 2,
            CliError::Core(E::Numerical(_) | E::NonConvex { .. }) => 3,
            CliError::Core(E::DerivationViolation { .. }) | CliError::Violation(..) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "uwcap",
    version,
    about = "Underwater acoustic channel, waterfilling and capacity bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
struct Common {
    /// Spreading exponent
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// SINR threshold (linear)
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Rate per active hop, bit/s
    #[arg(long, global = true)]
    w_rate: Option<f64>,
    /// Absorption a(f) per km; repeat for several curves
    #[arg(long = "a-f", global = true)]
    a_f: Vec<f64>,
    #[arg(long, global = true)]
    n_min: Option<u64>,
    #[arg(long, global = true)]
    n_max: Option<u64>,
    #[arg(long, global = true)]
    n_points: Option<usize>,
    /// Shipping activity in [0, 1]
    #[arg(long, global = true)]
    shipping: Option<f64>,
    /// Wind speed, m/s
    #[arg(long, global = true)]
    wind: Option<f64>,
    /// Lower edge of the frequency domain, kHz
    #[arg(long, global = true)]
    f_lo: Option<f64>,
    /// Upper edge of the frequency domain, kHz
    #[arg(long, global = true)]
    f_hi: Option<f64>,
    /// Reference distance, km
    #[arg(long, global = true)]
    l_ref: Option<f64>,
    /// Bandwidth target for waterfill, kHz
    #[arg(long, global = true)]
    delta_f: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Flat key = value file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Thorp absorption over a log frequency grid
    Absorption(GridArgs),
    /// Ambient noise components over a log frequency grid
    Noise(GridArgs),
    /// Optimal center frequency against distance
    FcCurve(FcArgs),
    /// Waterfilling for one link; give one of --capacity, --power, --delta-f
    Waterfill(WaterfillArgs),
    /// Per-pair and transport capacity bounds against node count
    Bound,
    /// Monte Carlo check of the bound on the SINR model, JSON lines
    Simulate(SimArgs),
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Number of log-spaced frequencies
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Args)]
struct FcArgs {
    /// Explicit distances in km; repeatable, overrides the grid
    #[arg(long = "l")]
    l: Vec<f64>,
    #[arg(long)]
    l_min: Option<f64>,
    #[arg(long)]
    l_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Args)]
struct WaterfillArgs {
    /// Link length, km
    #[arg(long)]
    distance: Option<f64>,
    /// Target capacity, bit/s
    #[arg(long, conflicts_with = "power")]
    capacity: Option<f64>,
    /// Power budget, psd units x Hz
    #[arg(long)]
    power: Option<f64>,
}

#[derive(Debug, Args)]
struct SimArgs {
    /// Fixed node count; by default runs cycle through 4..=64
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    slots: Option<usize>,
    /// uniform-random | grid | adversarial-line
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    random_sets: Option<usize>,
    /// Noise psd in the band
    #[arg(long)]
    noise: Option<f64>,
}

struct Ctx {
    common: Common,
    file: ConfigFile,
}

impl Ctx {
    fn channel(&self) -> Result<ChannelParams, CliError> {
        let d = ChannelParams::default();
        let c = &self.common;
        let f = &self.file;
        Ok(ChannelParams::new(
            f.pick(c.alpha, "alpha", d.alpha)?,
            f.pick(c.shipping, "shipping", d.shipping)?,
            f.pick(c.wind, "wind", d.wind)?,
            f.pick(c.l_ref, "l-ref", d.l_ref)?,
            f.pick(c.f_lo, "f-lo", d.f_lo)?,
            f.pick(c.f_hi, "f-hi", d.f_hi)?,
        )?)
    }

    fn format(&self, default: Format) -> Result<Format, CliError> {
        self.file.pick(self.common.format, "format", default)
    }

    fn freq_grid(&self, points: Option<usize>) -> Result<Vec<f64>, CliError> {
        let p = self.channel()?;
        let count = self.file.pick(points, "points", 512)?;
        if count < 2 {
            return Err(CliError::Input(format!(
                "need at least 2 grid points, got {count}"
            )));
        }
        Ok(log_space(p.f_lo, p.f_hi, count))
    }
}

fn table_out(t: &Table, fmt: Format) -> String {
    match fmt {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(),
    }
}

fn cmd_absorption(ctx: &Ctx, a: &GridArgs) -> Result<String, CliError> {
    let mut t = Table::new(&["f_khz", "a_db_per_km", "a_linear"]);
    for f in ctx.freq_grid(a.points)? {
        let fk = FrequencyKHz::new(f)?;
        t.push(vec![f, absorption_db_per_km(fk), absorption_linear(fk)]);
    }
    Ok(table_out(&t, ctx.format(Format::Csv)?))
}

fn cmd_noise(ctx: &Ctx, a: &GridArgs) -> Result<String, CliError> {
    let p = ctx.channel()?;
    let mut t = Table::new(&[
        "f_khz",
        "turbulence_db",
        "shipping_db",
        "wind_db",
        "thermal_db",
        "total_db",
        "total_linear",
    ]);
    for f in ctx.freq_grid(a.points)? {
        let n = uwcap::channel::noise_components(FrequencyKHz::new(f)?, &p);
        t.push(vec![
            f,
            n.turbulence,
            n.shipping,
            n.wind,
            n.thermal,
            n.total_db(),
            n.total_linear(),
        ]);
    }
    Ok(table_out(&t, ctx.format(Format::Csv)?))
}

fn cmd_fc_curve(ctx: &Ctx, a: &FcArgs) -> Result<String, CliError> {
    let p = ctx.channel()?;
    let f = &ctx.file;
    let ls = {
        let explicit = f.pick_list(a.l.clone(), "l", Vec::new())?;
        if explicit.is_empty() {
            let lo = f.pick(a.l_min, "l-min", 0.1)?;
            let hi = f.pick(a.l_max, "l-max", 100.0)?;
            let count = f.pick(a.points, "points", 64)?;
            if !(lo > 0.0 && hi > lo && count >= 2) {
                return Err(CliError::Input(format!(
                    "bad distance grid [{lo}, {hi}] x {count}"
                )));
            }
            log_space(lo, hi, count)
        } else {
            explicit
        }
    };
    let mut t = Table::new(&["l_km", "f_c_khz", "an_min"]);
    for l in ls {
        let c = optimal_center_frequency(DistanceKm::new(l)?, &p);
        t.push(vec![l, c.khz(), c.an_min()]);
    }
    Ok(table_out(&t, ctx.format(Format::Csv)?))
}

fn cmd_waterfill(ctx: &Ctx, a: &WaterfillArgs) -> Result<String, CliError> {
    let f = &ctx.file;
    if ctx.format(Format::Json)? != Format::Json {
        return Err(CliError::Input("waterfill writes JSON only".into()));
    }
    let l = f
        .pick_opt(a.distance, "distance")?
        .ok_or_else(|| CliError::Input("waterfill needs --distance".into()))?;
    let link = Link::new(DistanceKm::new(l)?, &ctx.channel()?)?;
    let capacity = f.pick_opt(a.capacity, "capacity")?;
    let power = f.pick_opt(a.power, "power")?;
    let delta_f = f.pick_opt(ctx.common.delta_f, "delta-f")?;
    let sol = match (capacity, power, delta_f) {
        (Some(c), None, None) => link.solve_for_capacity(c)?,
        (None, Some(p), None) => link.solve_for_power(p)?,
        (None, None, Some(w)) => link.solve_for_bandwidth(w)?,
        _ => {
            return Err(CliError::Input(
                "give exactly one of --capacity, --power, --delta-f".into(),
            ))
        }
    };
    let mut s = serde_json::to_string_pretty(&sol).expect("solution serializes");
    s.push('\n');
    Ok(s)
}

fn cmd_bound(ctx: &Ctx) -> Result<String, CliError> {
    let c = &ctx.common;
    let f = &ctx.file;
    let family = CurveFamily {
        alpha: f.pick(c.alpha, "alpha", 1.0)?,
        beta: f.pick(c.beta, "beta", 2.0)?,
        w_rate: f.pick(c.w_rate, "w-rate", 1.0)?,
        a_fs: f.pick_list(
            c.a_f.clone(),
            "a-f",
            vec![1.0, 10.0, 100.0, 1000.0, 10000.0],
        )?,
    };
    let ns = log_spaced_counts(
        f.pick(c.n_min, "n-min", 1)?,
        f.pick(c.n_max, "n-max", 1_000_000)?,
        f.pick(c.n_points, "n-points", 61)?,
    )?;
    let mut t = Table::new(&["a_f", "n", "per_pair_bound", "transport_bound", "reference"]);
    for r in bound_curve(&family, &ns)? {
        t.push(vec![
            r.a_f,
            r.n as f64,
            r.per_pair_bound,
            r.transport_bound,
            r.reference,
        ]);
    }
    Ok(table_out(&t, ctx.format(Format::Csv)?))
}

fn cmd_simulate(ctx: &Ctx, a: &SimArgs) -> Result<(String, usize), CliError> {
    let c = &ctx.common;
    let f = &ctx.file;
    let d = SimConfig::default();
    let mode: DeployMode = match f.pick_opt(a.mode.clone(), "mode")? {
        Some(m) => m.parse()?,
        None => d.mode,
    };
    let base = SimConfig {
        alpha: f.pick(c.alpha, "alpha", d.alpha)?,
        beta: f.pick(c.beta, "beta", d.beta)?,
        w_rate: f.pick(c.w_rate, "w-rate", d.w_rate)?,
        slots: f.pick(a.slots, "slots", d.slots)?,
        random_sets: f.pick(a.random_sets, "random-sets", d.random_sets)?,
        noise: f.pick(a.noise, "noise", d.noise)?,
        mode,
        ..d
    };
    let fixed_n = f.pick_opt(a.n, "n")?;
    let seed0 = f.pick(c.seed, "seed", 0)?;
    let runs = f.pick(c.runs, "runs", 100)?;
    let a_fs = f.pick_list(c.a_f.clone(), "a-f", vec![d.a_f])?;

    let base = &base;
    let configs: Vec<SimConfig> = a_fs
        .iter()
        .flat_map(|&a_f| {
            (0..runs).map(move |i| SimConfig {
                a_f,
                n: fixed_n.unwrap_or(4 + i % 61),
                seed: seed0.wrapping_add(i as u64),
                ..base.clone()
            })
        })
        .collect();
    let records = configs
        .par_iter()
        .map(netsim::run)
        .collect::<Result<Vec<_>, _>>()?;

    let violations = records.iter().filter(|r| r.violates_bound()).count();
    let out = match ctx.format(Format::Json)? {
        Format::Json => records
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
            .collect(),
        Format::Csv => {
            let mut t = Table::new(&[
                "seed",
                "n",
                "alpha",
                "beta",
                "a_f",
                "margin_min",
                "transport_achieved",
                "transport_bound",
            ]);
            for r in &records {
                t.push(vec![
                    r.seed as f64,
                    r.n as f64,
                    r.alpha,
                    r.beta,
                    r.a_f,
                    r.margin_min,
                    r.transport_achieved,
                    r.transport_bound,
                ]);
            }
            t.to_csv()
        }
    };
    Ok((out, violations))
}

fn write_out(ctx: &Ctx, text: &str) -> Result<(), CliError> {
    let path: Option<PathBuf> = ctx.file.pick_opt(ctx.common.out.clone(), "out")?;
    match path {
        Some(p) => std::fs::write(&p, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .and_then(|_| so.flush())
                .map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let ctx = Ctx {
        common: cli.common,
        file,
    };
    let text = match &cli.command {
        Command::Absorption(a) => cmd_absorption(&ctx, a)?,
        Command::Noise(a) => cmd_noise(&ctx, a)?,
        Command::FcCurve(a) => cmd_fc_curve(&ctx, a)?,
        Command::Waterfill(a) => cmd_waterfill(&ctx, a)?,
        Command::Bound => cmd_bound(&ctx)?,
        Command::Simulate(a) => {
            let (text, bad) = cmd_simulate(&ctx, a)?;
            write_out(&ctx, &text)?;
            let total = text.lines().count();
            if bad > 0 {
                return Err(CliError::Violation(bad, total));
            }
            return Ok(());
        }
    };
    write_out(&ctx, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("uwcap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
        assert_eq!(
            CliError::Core(uwcap::Error::Domain("x".into())).exit_code(),
            2
        );
        assert_eq!(
            CliError::Core(uwcap::Error::Numerical("x".into())).exit_code(),
            3
        );
        assert_eq!(
            CliError::Core(uwcap::Error::NonConvex {
                f_khz: 1.0,
                upsilon: -1.0
            })
            .exit_code(),
            3
        );
        assert_eq!(
            CliError::Core(uwcap::Error::DerivationViolation { margin: -1.0 }).exit_code(),
            4
        );
        assert_eq!(CliError::Violation(1, 2).exit_code(), 4);
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "uwcap", "bound", "--a-f", "1", "--a-f", "10", "--alpha", "2",
        ])
        .unwrap();
        assert_eq!(cli.common.a_f, vec![1.0, 10.0]);
        assert_eq!(cli.common.alpha, Some(2.0));
        assert!(
            Cli::try_parse_from(["uwcap", "waterfill", "--capacity", "1", "--power", "2"]).is_err()
        );
    }
}
