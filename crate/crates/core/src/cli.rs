//! Command-line front end: scenario files, solver dispatch, CSV output.
//!
//! Numbers are printed with at most 9 significant digits (`%.9g` style) and a
//! missing opt-out is printed as `none`, so outputs are stable byte for byte.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::decision::{shares_exact, shares_monte_carlo, Offer};
use crate::duopoly::{
    best_response_dynamics, payoff_matrix, pure_nash, CostGrid, DuopolyParams, Outcome,
    ProviderParams,
};
use crate::error::{Error, Result};
use crate::population::ValuationDistribution;
use crate::single_provider::{choose_tool, optimal_cost, MarketParams, Tool};
use crate::sweep::{
    duopoly_sweep, single_sweep, value_range, Axis, SolverSettings, SweepBase, SweepSpec,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub distribution: ValuationDistribution,
    pub benefit: f64,
    pub revenue_rate: f64,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duopoly: Option<DuopolyBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DuopolyBlock {
    pub benefit2: f64,
    pub revenue_rate2: f64,
    pub gamma2: f64,
}

impl Scenario {
    pub fn market_params(&self) -> Result<MarketParams> {
        MarketParams::new(
            self.revenue_rate,
            self.gamma,
            self.distribution.clone(),
            self.benefit,
        )
    }

    /// Without a duopoly block, provider 2 mirrors provider 1.
    pub fn duopoly_params(&self) -> Result<DuopolyParams> {
        let provider1 = ProviderParams::new(self.revenue_rate, self.gamma, self.benefit)?;
        let provider2 = match &self.duopoly {
            Some(d) => ProviderParams::new(d.revenue_rate2, d.gamma2, d.benefit2)
                .map_err(|e| rename_field(e, "2"))?,
            None => provider1,
        };
        Ok(DuopolyParams {
            provider1,
            provider2,
            dist: self.distribution.clone(),
        })
    }

    fn validate(&self) -> Result<()> {
        self.market_params()?;
        self.duopoly_params()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

fn rename_field(e: Error, suffix: &str) -> Error {
    match e {
        Error::InvalidParameter { field, message } => Error::InvalidParameter {
            field: format!("{field}{suffix}"),
            message,
        },
        other => other,
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario =
        serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
    scenario.validate()?;
    Ok(scenario)
}

/// `%.9g`-style rendering.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-5..9).contains(&exponent) {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exponent.abs())
    } else {
        let decimals = (8 - exponent) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_cost(c: Option<f64>) -> String {
    c.map_or_else(|| "none".to_string(), fmt_num)
}

/// `lo:hi:step` (inclusive) or a comma-separated list.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::invalid("values", format!("not a number: {s:?}")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [lo, hi, step] => value_range(num(lo)?, num(hi)?, num(step)?),
        [_] => text.split(',').map(num).collect(),
        _ => Err(Error::invalid(
            "values",
            format!("expected lo:hi:step, got {text:?}"),
        )),
    }
}

fn parse_pair(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::invalid("start", format!("expected i,j, got {text:?}"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_grid(text: &str, no_optout: bool) -> Result<CostGrid> {
    CostGrid::new(parse_values(text)?, no_optout)
}

#[derive(Debug, Parser)]
#[command(
    name = "optout",
    about = "Revenue-optimal pricing of privacy opt-out options"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Echo the parsed scenario as JSON before the results.
    #[arg(long)]
    dump_scenario: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Revenue-maximizing opt-out cost for a single provider.
    SolveSingle {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        c_max: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Compare two tools, given as `low,high` costs.
        #[arg(long)]
        tools: Option<String>,
    },
    /// Payoff matrix and pure equilibria of the two-provider cost game.
    SolveDuopoly {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Cost grid `lo:hi:step` or a comma-separated list.
        #[arg(long)]
        grid: String,
        /// Add "no opt-out" as a final strategy.
        #[arg(long)]
        with_no_optout: bool,
        #[arg(long)]
        dynamics: bool,
        #[arg(long, default_value = "0,0")]
        start: String,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Comparative statics over one parameter.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        param: String,
        #[arg(long)]
        values: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        c_max: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Sweep the duopoly game over this cost grid instead of the single provider.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        with_no_optout: bool,
    },
    /// Monte Carlo shares next to the exact ones.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Opt-out cost of provider 1; defaults to the single-provider optimum.
        #[arg(long)]
        cost: Option<f64>,
        /// Opt-out cost of provider 2 (duopoly scenarios); defaults to `--cost`.
        #[arg(long)]
        cost2: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the command line and returns the process exit code:
/// 0 on success, 1 for invalid input, 2 for numeric failures.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numeric() {
                2
            } else {
                1
            }
        }
    }
}

fn load(args: &ScenarioArgs, stdout: &mut dyn Write) -> Result<Scenario> {
    let text = fs::read_to_string(&args.scenario)?;
    let scenario = parse_scenario(&text)?;
    if args.dump_scenario {
        writeln!(stdout, "{}", scenario.to_json())?;
    }
    Ok(scenario)
}

fn emit(out: Option<&Path>, content: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => stdout.write_all(content.as_bytes())?,
    }
    Ok(())
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::SolveSingle {
            scenario,
            c_max,
            step,
            tools,
        } => {
            let params = load(&scenario, stdout)?.market_params()?;
            let c_max = c_max.unwrap_or_else(|| params.default_c_max());
            let sol = optimal_cost(&params, c_max, step)?;
            writeln!(
                stdout,
                "c_star={} revenue_star={} revenue_no_optout={} optout_share={}",
                fmt_cost(sol.c_star),
                fmt_num(sol.revenue_star),
                fmt_num(sol.baseline_no_optout),
                fmt_num(sol.optout_share()),
            )?;
            if let Some(tools) = tools {
                let values = parse_values(&tools)?;
                let [low, high] = values[..] else {
                    return Err(Error::invalid("tools", "expected two costs `low,high`"));
                };
                let t = choose_tool(&params, low, high)?;
                writeln!(
                    stdout,
                    "tool={} revenue_low={} revenue_high={}",
                    match t.chosen {
                        Tool::Low => "low",
                        Tool::High => "high",
                    },
                    fmt_num(t.revenue_low),
                    fmt_num(t.revenue_high),
                )?;
            }
        }
        Command::SolveDuopoly {
            scenario,
            grid,
            with_no_optout,
            dynamics,
            start,
            max_iter,
            out,
        } => {
            let params = load(&scenario, stdout)?.duopoly_params()?;
            let grid = parse_grid(&grid, with_no_optout)?;
            let start = parse_pair(&start)?;
            let matrix = payoff_matrix(&params, &grid)?;
            let nash = pure_nash(&matrix);

            let mut csv = String::from("c1,c2,u1,u2,is_nash\n");
            for (i, j) in matrix.cells() {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_cost(grid.strategy(i)),
                    fmt_cost(grid.strategy(j)),
                    fmt_num(matrix.u1(i, j)),
                    fmt_num(matrix.u2(i, j)),
                    nash.cells.contains(&(i, j)),
                ));
            }
            emit(out.as_deref(), &csv, stdout)?;

            let summary: &mut dyn Write = if out.is_some() { stdout } else { stderr };
            writeln!(summary, "pure_nash_cells={}", nash.cells.len())?;
            for (&(i, j), r) in nash.cells.iter().zip(&nash.regrets) {
                writeln!(
                    summary,
                    "nash c1={} c2={} u1={} u2={} regret={}",
                    fmt_cost(grid.strategy(i)),
                    fmt_cost(grid.strategy(j)),
                    fmt_num(matrix.u1(i, j)),
                    fmt_num(matrix.u2(i, j)),
                    fmt_num(*r),
                )?;
            }
            if dynamics {
                let d = best_response_dynamics(&matrix, start, max_iter)?;
                let outcome = match &d.outcome {
                    Outcome::Converged((i, j)) => format!(
                        "converged c1={} c2={}",
                        fmt_cost(grid.strategy(*i)),
                        fmt_cost(grid.strategy(*j))
                    ),
                    Outcome::Cycle(cells) => format!("cycle length={}", cells.len()),
                    Outcome::MaxIter => "max_iter".to_string(),
                };
                writeln!(
                    summary,
                    "dynamics outcome={outcome} path_len={}",
                    d.path.len()
                )?;
            }
        }
        Command::Sweep {
            scenario,
            param,
            values,
            out,
            c_max,
            step,
            grid,
            with_no_optout,
        } => {
            let scenario = load(&scenario, stdout)?;
            let axis: Axis = param.parse()?;
            let values = parse_values(&values)?;
            let csv = match grid {
                None => {
                    let spec = SweepSpec {
                        axis,
                        values,
                        base: SweepBase::Single(scenario.market_params()?),
                        settings: SolverSettings {
                            c_max,
                            step,
                            grid: None,
                        },
                    };
                    let mut csv =
                        format!("{axis},c_star,revenue_star,revenue_no_optout,optout_share\n");
                    for row in single_sweep(&spec)? {
                        csv.push_str(&format!(
                            "{},{},{},{},{}\n",
                            fmt_num(row.axis_value),
                            fmt_cost(row.c_star),
                            fmt_num(row.revenue_star),
                            fmt_num(row.revenue_no_optout),
                            fmt_num(row.optout_share),
                        ));
                    }
                    csv
                }
                Some(grid) => {
                    let spec = SweepSpec {
                        axis,
                        values,
                        base: SweepBase::Duopoly(scenario.duopoly_params()?),
                        settings: SolverSettings {
                            c_max,
                            step,
                            grid: Some(parse_grid(&grid, with_no_optout)?),
                        },
                    };
                    let mut csv = format!("{axis},c1,c2,u1,u2\n");
                    for row in duopoly_sweep(&spec)? {
                        let x = fmt_num(row.axis_value);
                        if row.equilibria.is_empty() {
                            csv.push_str(&format!("{x},,,,\n"));
                        }
                        for e in &row.equilibria {
                            csv.push_str(&format!(
                                "{x},{},{},{},{}\n",
                                fmt_cost(e.c1),
                                fmt_cost(e.c2),
                                fmt_num(e.u1),
                                fmt_num(e.u2),
                            ));
                        }
                    }
                    csv
                }
            };
            emit(out.as_deref(), &csv, stdout)?;
        }
        Command::Simulate {
            scenario,
            n,
            seed,
            cost,
            cost2,
            out,
        } => {
            let scenario = load(&scenario, stdout)?;
            let params = scenario.market_params()?;
            let cost = match cost {
                Some(c) => Some(c),
                None => optimal_cost(&params, params.default_c_max(), 0.01)?.c_star,
            };
            let mut offers = vec![Offer::new(scenario.benefit, cost)?];
            if let Some(d) = &scenario.duopoly {
                offers.push(Offer::new(d.benefit2, cost2.or(cost))?);
            }
            let exact = shares_exact(&scenario.distribution, &offers);
            let mc = shares_monte_carlo(&scenario.distribution, &offers, n, seed)?;
            let mut csv = String::from("component,analytic,monte_carlo,abs_diff\n");
            for ((name, a), (_, m)) in exact.components().into_iter().zip(mc.components()) {
                csv.push_str(&format!(
                    "{name},{},{},{}\n",
                    fmt_num(a),
                    fmt_num(m),
                    fmt_num((a - m).abs())
                ));
            }
            emit(out.as_deref(), &csv, stdout)?;
        }
    }
    Ok(())
}
