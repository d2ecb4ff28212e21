//! Subcommand execution: sweeps and analyses rendered to CSV and SVG.

use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use crate::analysis::{barrier_height, projection_probabilities, relaxation_time, RelaxationParams};
use crate::config::{ConfigError, RunConfig};
use crate::error::Error;
use crate::output::{fixed, projection_color, svg_line_plot, CsvTable, PlotSpec, Series};
use crate::sweep::{find_crossings, sweep_spectrum};

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Spectrum,
    /// `pair` holds 1-based level ordinals counted from the ground state.
    Crossings {
        pair: Option<(usize, usize)>,
    },
    State,
    Relaxation {
        tau0: f64,
        u: Option<f64>,
        t: f64,
    },
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Compute(Error),
    Io(io::Error),
}

impl RunError {
    /// 1 for configuration and I/O problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Compute(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Compute(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Compute(e)
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rendered {
    pub table: String,
    pub plot: Option<String>,
}

pub fn render(config: &RunConfig, command: &Command) -> Result<Rendered, RunError> {
    match command {
        Command::Spectrum => spectrum(config),
        Command::Crossings { pair } => crossings(config, *pair),
        Command::State => state(config),
        Command::Relaxation { tau0, u, t } => relaxation(config, *tau0, *u, *t),
    }
}

/// Renders and writes the table to `config.output` (or stdout) and the plot to `plot_path`.
pub fn run(config: &RunConfig, command: &Command, plot_path: Option<&Path>) -> Result<(), RunError> {
    let rendered = render(config, command)?;
    match &config.output {
        Some(path) => std::fs::write(path, rendered.table.as_bytes())?,
        None => io::stdout().lock().write_all(rendered.table.as_bytes())?,
    }
    if let (Some(path), Some(svg)) = (plot_path, rendered.plot.as_ref()) {
        std::fs::write(path, svg.as_bytes())?;
    }
    Ok(())
}

fn spectrum(config: &RunConfig) -> Result<Rendered, RunError> {
    let result = sweep_spectrum(&config.system, &config.grid)?;
    let n = result.n_tracks();
    let d = config.decimals;
    let mut header = vec!["b_tesla".to_string()];
    header.extend((0..n).map(|i| format!("e_{i}")));
    let mut table = CsvTable::new(header);
    table.preamble = config.echo();
    for p in &result.points {
        let mut row = vec![fixed(p.b, d)];
        row.extend(p.solution.eigenvalues().iter().map(|&e| fixed(e, d)));
        table.push(row);
    }

    let max_twice = config.system.spin.twice();
    let series = (0..n)
        .map(|t| Series {
            name: format!("M = {}", result.track_labels[t]),
            color: projection_color(result.track_labels[t], max_twice),
            points: result.track(t).map(|tp| (tp.b, tp.energy)).collect(),
        })
        .collect::<Vec<_>>();
    let title =
        format!("Spectrum, S = {}, theta = {} deg, phi = {} deg", config.system.spin, config.theta_deg, config.phi_deg);
    let plot = svg_line_plot(&PlotSpec { title: &title, x_label: "B0 (T)", y_label: "E (K)" }, &series);
    Ok(Rendered { table: table.render(), plot: Some(plot) })
}

fn crossings(config: &RunConfig, pair: Option<(usize, usize)>) -> Result<Rendered, RunError> {
    let n = config.system.spin.dim();
    let filter = match pair {
        Some((i, j)) => {
            for k in [i, j] {
                if k == 0 || k > n {
                    return Err(ConfigError {
                        line: None,
                        key: "pair".into(),
                        message: format!("level ordinals must lie in [1, {n}], got {k}"),
                    }
                    .into());
                }
            }
            Some((i - 1, j - 1))
        }
        None => None,
    };
    let result = sweep_spectrum(&config.system, &config.grid)?;
    let events = find_crossings(&result, filter);
    let d = config.decimals;
    let mut table = CsvTable::new(
        ["track_i", "track_j", "b_star_tesla", "gap_kelvin", "kind", "label_i", "label_j"].map(String::from).to_vec(),
    );
    table.preamble = config.echo();
    for e in events {
        table.push(vec![
            (e.track_i + 1).to_string(),
            (e.track_j + 1).to_string(),
            fixed(e.b_star, d),
            fixed(e.gap, d),
            e.kind.as_str().to_string(),
            e.diabatic_labels.0.to_string(),
            e.diabatic_labels.1.to_string(),
        ]);
    }
    Ok(Rendered { table: table.render(), plot: None })
}

fn state(config: &RunConfig) -> Result<Rendered, RunError> {
    let Some(slot) = config.state_index else {
        return Err(ConfigError {
            line: None,
            key: "state_index".into(),
            message: "required for the state command".into(),
        }
        .into());
    };
    let result = sweep_spectrum(&config.system, &config.grid)?;
    let spin = config.system.spin;
    let d = config.decimals;
    let mut header = vec!["b_tesla".to_string()];
    header.extend(spin.projections().map(|m| format!("p_m_{m}")));
    header.push("sz_expectation".into());
    let mut table = CsvTable::new(header);
    table.preamble = config.echo();
    let mut series: Vec<Series> = spin
        .projections()
        .map(|m| Series {
            name: format!("M = {m}"),
            color: projection_color(m, spin.twice()),
            points: Vec::with_capacity(result.points.len()),
        })
        .collect();
    for p in &result.points {
        let c = projection_probabilities(p.solution.vector(slot))?;
        let mut row = vec![fixed(p.b, d)];
        row.extend(c.probabilities.iter().map(|&x| fixed(x, d)));
        row.push(fixed(c.sz_expectation, d));
        table.push(row);
        for (s, &x) in series.iter_mut().zip(&c.probabilities) {
            s.points.push((p.b, x));
        }
    }
    let title = format!("Composition of level {slot}, theta = {} deg", config.theta_deg);
    let plot = svg_line_plot(&PlotSpec { title: &title, x_label: "B0 (T)", y_label: "|c_M|^2" }, &series);
    Ok(Rendered { table: table.render(), plot: Some(plot) })
}

fn relaxation(config: &RunConfig, tau0: f64, u: Option<f64>, t: f64) -> Result<Rendered, RunError> {
    let u = match u {
        Some(u) => u,
        None => barrier_height(&config.system)?,
    };
    let tau = relaxation_time(&RelaxationParams { tau0, u, t })?;
    let d = config.decimals;
    let mut table = CsvTable::new(["tau0_seconds", "u_kelvin", "t_kelvin", "tau_seconds"].map(String::from).to_vec());
    table.push(vec![format!("{tau0:.d$e}"), fixed(u, d), fixed(t, d), format!("{tau:.d$e}")]);
    Ok(Rendered { table: table.render(), plot: None })
}
