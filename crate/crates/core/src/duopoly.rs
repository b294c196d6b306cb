//! Two providers choosing opt-out costs on a shared grid.

use std::collections::HashMap;

use crate::decision::{shares_duopoly, Offer};
use crate::error::{Error, Result};
use crate::population::ValuationDistribution;
use crate::single_provider::{check_benefit, check_gamma, check_revenue_rate};

/// Payoffs closer than this count as equal in best-response and Nash scans.
pub const PAYOFF_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProviderParams {
    pub revenue_rate: f64,
    pub gamma: f64,
    pub benefit: f64,
}

impl ProviderParams {
    pub fn new(revenue_rate: f64, gamma: f64, benefit: f64) -> Result<Self> {
        check_revenue_rate("revenue_rate", revenue_rate)?;
        check_gamma("gamma", gamma)?;
        check_benefit("benefit", benefit)?;
        Ok(ProviderParams {
            revenue_rate,
            gamma,
            benefit,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuopolyParams {
    pub provider1: ProviderParams,
    pub provider2: ProviderParams,
    pub dist: ValuationDistribution,
}

impl DuopolyParams {
    pub fn symmetric(provider: ProviderParams, dist: ValuationDistribution) -> Self {
        DuopolyParams {
            provider1: provider,
            provider2: provider,
            dist,
        }
    }
}

/// Strategy set shared by both providers: ascending costs, optionally followed by
/// "no opt-out".
#[derive(Debug, Clone, PartialEq)]
pub struct CostGrid {
    values: Vec<f64>,
    no_optout: bool,
}

impl CostGrid {
    pub fn new(values: Vec<f64>, no_optout: bool) -> Result<Self> {
        if values.is_empty() && !no_optout {
            return Err(Error::EmptyGrid);
        }
        if values.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::invalid("grid", "costs must be finite and >= 0"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("grid", "costs must be strictly increasing"));
        }
        Ok(CostGrid { values, no_optout })
    }

    /// `lo, lo + step, ...` up to `hi`, inclusive when `step` divides the span
    /// within 1e-9.
    pub fn range(lo: f64, hi: f64, step: f64, no_optout: bool) -> Result<Self> {
        CostGrid::new(crate::sweep::value_range(lo, hi, step)?, no_optout)
    }

    pub fn len(&self) -> usize {
        self.values.len() + usize::from(self.no_optout)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn has_no_optout(&self) -> bool {
        self.no_optout
    }

    /// Cost at strategy `i`; `None` is the trailing "no opt-out" entry.
    pub fn strategy(&self, i: usize) -> Option<f64> {
        self.values.get(i).copied()
    }

    pub fn strategies(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        (0..self.len()).map(|i| self.strategy(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

/// Payoffs of both players; cell `(i, j)` has provider 1 at strategy `i` and
/// provider 2 at strategy `j`. Row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    grid: Option<CostGrid>,
    n: usize,
    u1: Vec<f64>,
    u2: Vec<f64>,
}

impl PayoffMatrix {
    /// Square matrix from explicit payoff rows, without an attached cost grid.
    pub fn from_rows(u1: Vec<Vec<f64>>, u2: Vec<Vec<f64>>) -> Result<Self> {
        let n = u1.len();
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        let square = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|row| row.len() == n);
        if !square(&u1) || !square(&u2) {
            return Err(Error::invalid("payoffs", "both matrices must be n x n"));
        }
        Ok(PayoffMatrix {
            grid: None,
            n,
            u1: u1.into_iter().flatten().collect(),
            u2: u2.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> Option<&CostGrid> {
        self.grid.as_ref()
    }

    pub fn u1(&self, i: usize, j: usize) -> f64 {
        self.u1[i * self.n + j]
    }

    pub fn u2(&self, i: usize, j: usize) -> f64 {
        self.u2[i * self.n + j]
    }

    pub fn payoff(&self, player: Player, (i, j): (usize, usize)) -> f64 {
        match player {
            Player::One => self.u1(i, j),
            Player::Two => self.u2(i, j),
        }
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)))
    }

    fn check_index(&self, what: &'static str, index: usize) -> Result<()> {
        if index >= self.n {
            return Err(Error::IndexOutOfRange {
                what,
                index,
                len: self.n,
            });
        }
        Ok(())
    }

    /// Payoffs of `player`'s strategies against a fixed opponent move.
    fn response_payoffs(&self, player: Player, opponent_move: usize) -> Vec<f64> {
        (0..self.n)
            .map(|k| match player {
                Player::One => self.u1(k, opponent_move),
                Player::Two => self.u2(opponent_move, k),
            })
            .collect()
    }
}

/// `U_i(c1, c2) = r_i * (targeted_i + gamma_i * optout_i)` over every grid cell.
pub fn payoff_matrix(params: &DuopolyParams, grid: &CostGrid) -> Result<PayoffMatrix> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let n = grid.len();
    let strategies: Vec<Option<f64>> = grid.strategies().collect();
    let (p1, p2) = (&params.provider1, &params.provider2);
    let mut u1 = Vec::with_capacity(n * n);
    let mut u2 = Vec::with_capacity(n * n);
    for &c1 in &strategies {
        let first = Offer {
            benefit: p1.benefit,
            opt_out_cost: c1,
        };
        for &c2 in &strategies {
            let second = Offer {
                benefit: p2.benefit,
                opt_out_cost: c2,
            };
            let s = shares_duopoly(&params.dist, &first, &second);
            let (a, b) = (s.providers[0], s.providers[1]);
            u1.push(p1.revenue_rate * (a.targeted + p1.gamma * a.optout));
            u2.push(p2.revenue_rate * (b.targeted + p2.gamma * b.optout));
        }
    }
    Ok(PayoffMatrix {
        grid: Some(grid.clone()),
        n,
        u1,
        u2,
    })
}

/// Argmax set of `player`'s payoff against `opponent_move`, ascending.
pub fn best_responses(
    matrix: &PayoffMatrix,
    player: Player,
    opponent_move: usize,
) -> Result<Vec<usize>> {
    matrix.check_index("opponent move", opponent_move)?;
    let payoffs = matrix.response_payoffs(player, opponent_move);
    let top = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((0..payoffs.len())
        .filter(|&k| payoffs[k] >= top - PAYOFF_TOLERANCE)
        .collect())
}

/// Largest gain either player can get by deviating unilaterally from `cell`.
pub fn regret(matrix: &PayoffMatrix, (i, j): (usize, usize)) -> Result<f64> {
    matrix.check_index("row", i)?;
    matrix.check_index("column", j)?;
    let gain = |player: Player, own: usize, other: usize| {
        let payoffs = matrix.response_payoffs(player, other);
        let top = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        top - payoffs[own]
    };
    Ok(gain(Player::One, i, j)
        .max(gain(Player::Two, j, i))
        .max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NashResult {
    /// Pure equilibria in row-major order.
    pub cells: Vec<(usize, usize)>,
    /// `regret` of each listed cell, same order.
    pub regrets: Vec<f64>,
}

/// Exhaustive scan for mutual best responses.
pub fn pure_nash(matrix: &PayoffMatrix) -> NashResult {
    let n = matrix.size();
    let col_max: Vec<f64> = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| matrix.u1(k, j))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let row_max: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| matrix.u2(i, k))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let cells: Vec<(usize, usize)> = matrix
        .cells()
        .filter(|&(i, j)| {
            matrix.u1(i, j) >= col_max[j] - PAYOFF_TOLERANCE
                && matrix.u2(i, j) >= row_max[i] - PAYOFF_TOLERANCE
        })
        .collect();
    let regrets = cells
        .iter()
        .map(|&cell| regret(matrix, cell).expect("cell from the matrix's own range"))
        .collect();
    NashResult { cells, regrets }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Converged((usize, usize)),
    /// States from the first repeated one through the last before the repeat.
    Cycle(Vec<(usize, usize)>),
    MaxIter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dynamics {
    pub path: Vec<(usize, usize)>,
    pub outcome: Outcome,
}

/// Alternating best responses, provider 1 first. A player already at a best
/// response stays; otherwise it moves to the smallest best-responding index.
/// `path` holds the start and every cell reached by a move, at most `max_iter`.
pub fn best_response_dynamics(
    matrix: &PayoffMatrix,
    start: (usize, usize),
    max_iter: usize,
) -> Result<Dynamics> {
    matrix.check_index("row", start.0)?;
    matrix.check_index("column", start.1)?;
    if max_iter == 0 {
        return Err(Error::invalid("max_iter", "must be >= 1"));
    }

    let mut cell = start;
    let mut path = vec![start];
    let mut seen: HashMap<((usize, usize), Player), usize> = HashMap::new();
    let mut mover = Player::One;
    let mut idle = 0;
    loop {
        if let Some(&at) = seen.get(&(cell, mover)) {
            let cycle = path[at..path.len() - 1].to_vec();
            return Ok(Dynamics {
                path,
                outcome: Outcome::Cycle(cycle),
            });
        }
        seen.insert((cell, mover), path.len() - 1);

        let (own, other) = match mover {
            Player::One => (cell.0, cell.1),
            Player::Two => (cell.1, cell.0),
        };
        let responses = best_responses(matrix, mover, other)?;
        if responses.contains(&own) {
            idle += 1;
            if idle == 2 {
                return Ok(Dynamics {
                    path,
                    outcome: Outcome::Converged(cell),
                });
            }
        } else {
            idle = 0;
            if path.len() >= max_iter {
                return Ok(Dynamics {
                    path,
                    outcome: Outcome::MaxIter,
                });
            }
            let next = responses[0];
            cell = match mover {
                Player::One => (next, cell.1),
                Player::Two => (cell.0, next),
            };
            path.push(cell);
        }
        mover = mover.other();
    }
}
