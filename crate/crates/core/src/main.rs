use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::warn;

use giantspin::config::{ConfigValues, RunConfig};
use giantspin::run::{run, Command, RunError};

#[derive(Parser)]
#[command(name = "giantspin", version, about = "Giant-spin Hamiltonian spectra, crossings and state composition")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sorted energies at every field point.
    Spectrum(Common),
    /// Real and avoided crossings between adjacent levels.
    Crossings {
        #[command(flatten)]
        common: Common,
        /// Level ordinals I,J (ground state = 1).
        #[arg(long, value_parser = parse_pair)]
        pair: Option<(usize, usize)>,
    },
    /// Projection probabilities of one energy level across the sweep.
    State(Common),
    /// Arrhenius relaxation time.
    Relaxation {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tau0: f64,
        /// Barrier in K; defaults to |D| S².
        #[arg(long)]
        u: Option<f64>,
        /// Temperature in K.
        #[arg(long)]
        t: f64,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    spin: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    d_kelvin: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    e_kelvin: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    mu_b: Option<String>,
    #[arg(long)]
    b_min: Option<String>,
    #[arg(long)]
    b_max: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    theta_deg: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi_deg: Option<String>,
    #[arg(long)]
    state_index: Option<String>,
    #[arg(long)]
    decimals: Option<String>,
    /// Output table path; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// SVG plot path (spectrum and state).
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected I,J")?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("malformed ordinal `{x}`"));
    Ok((p(a)?, p(b)?))
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, RunError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                ConfigValues::parse(&text)?
            }
            None => ConfigValues::default(),
        };
        let mut flags = ConfigValues::default();
        let pairs = [
            ("spin", &self.spin),
            ("d_kelvin", &self.d_kelvin),
            ("e_kelvin", &self.e_kelvin),
            ("g", &self.g),
            ("mu_b_kelvin_per_tesla", &self.mu_b),
            ("b_min_tesla", &self.b_min),
            ("b_max_tesla", &self.b_max),
            ("steps", &self.steps),
            ("theta_deg", &self.theta_deg),
            ("phi_deg", &self.phi_deg),
            ("state_index", &self.state_index),
            ("decimals", &self.decimals),
            ("output", &self.out),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v, None)?;
            }
        }
        Ok(file.overlay(flags).resolve()?)
    }
}

fn execute(cli: Cli) -> Result<(), RunError> {
    let (common, command) = match cli.command {
        Cmd::Spectrum(c) => (c, Command::Spectrum),
        Cmd::Crossings { common, pair } => (common, Command::Crossings { pair }),
        Cmd::State(c) => (c, Command::State),
        Cmd::Relaxation { common, tau0, u, t } => (common, Command::Relaxation { tau0, u, t }),
    };
    let config = common.resolve()?;
    for w in &config.warnings {
        warn!("{w}");
    }
    run(&config, &command, common.plot.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
