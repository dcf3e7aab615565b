//! Davidson's tie extension of the Bradley-Terry model with a multiplicative
//! home advantage.
//!
//! For home team `i` and visitor `j`, with `D = γπ_i + π_j + ν√(π_iπ_j)`:
//!
//! ```text
//! P(home win) = γπ_i / D
//! P(draw)     = ν√(π_iπ_j) / D
//! P(away win) = 1 - P(home win) - P(draw)
//! ```
//!
//! Fitting works on log-worths relative to the first team (alphabetical by
//! normalized name), plus `ln γ` and `ln ν`, so the search space is
//! unconstrained apart from the clamp at `±PARAM_BOUND`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::data::{MatchRecord, Outcome, Prediction, TeamId};
use crate::error::{Error, Result};
use crate::optim::{minimize, OptimizerSettings};

/// Clamp applied to every log-scale parameter during fitting.
pub const PARAM_BOUND: f64 = 30.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BTParams {
    worth: BTreeMap<TeamId, f64>,
    gamma: f64,
    nu: f64,
}

impl BTParams {
    /// Worths may be given on any positive scale; they are normalized to sum
    /// to one.
    pub fn new(worth: BTreeMap<TeamId, f64>, gamma: f64, nu: f64) -> Result<Self> {
        if worth.is_empty() {
            return Err(Error::InvalidParameter("no teams".into()));
        }
        if worth.values().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter("worths must be positive".into()));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
        }
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(Error::InvalidParameter(format!("nu must be non-negative, got {nu}")));
        }
        let total: f64 = worth.values().sum();
        let worth = worth.into_iter().map(|(t, w)| (t, w / total)).collect();
        Ok(Self { worth, gamma, nu })
    }

    /// Equal worths, `γ = 1`, `ν = 1`.
    pub fn symmetric(teams: impl IntoIterator<Item = TeamId>) -> Result<Self> {
        Self::new(teams.into_iter().map(|t| (t, 1.0)).collect(), 1.0, 1.0)
    }

    pub fn worth(&self) -> &BTreeMap<TeamId, f64> {
        &self.worth
    }

    pub fn worth_of(&self, team: &TeamId) -> Result<f64> {
        self.worth
            .get(team)
            .copied()
            .ok_or_else(|| Error::UnknownTeam(team.to_string()))
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// Outcome probabilities for raw (unnormalized) worths.
pub fn davidson_probs(pi_home: f64, pi_away: f64, gamma: f64, nu: f64) -> [f64; 3] {
    let home = gamma * pi_home;
    let tie = nu * (pi_home * pi_away).sqrt();
    let denom = home + pi_away + tie;
    let p_win = home / denom;
    let p_draw = tie / denom;
    [p_win, p_draw, (1.0 - p_win - p_draw).max(0.0)]
}

pub fn bt_outcome_probs(params: &BTParams, home: &TeamId, away: &TeamId) -> Result<Prediction> {
    let p = davidson_probs(
        params.worth_of(home)?,
        params.worth_of(away)?,
        params.gamma,
        params.nu,
    );
    Prediction::from_weights(p)
}

/// Sum of log-probabilities of the realized outcomes. Returns negative
/// infinity when a realized outcome has probability zero (for example a
/// draw under `ν = 0`).
pub fn bt_log_likelihood(params: &BTParams, matches: &[(MatchRecord, Outcome)]) -> Result<f64> {
    let mut total = 0.0;
    for (m, outcome) in matches {
        let p = davidson_probs(
            params.worth_of(m.home())?,
            params.worth_of(m.away())?,
            params.gamma,
            params.nu,
        );
        total += p[outcome.index()].ln();
    }
    Ok(total)
}

/// Why an estimate sits on, or is heading to, the edge of the parameter
/// space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "team")]
pub enum BoundaryFlag {
    /// No draws in the data: the likelihood keeps increasing as `ν → 0`.
    NuZero,
    /// `ln ν` stopped at the clamp.
    NuAtBound,
    /// `ln γ` stopped at the clamp.
    GammaAtBound,
    /// The team won every match it played, so its worth diverges.
    WorthInfinite(TeamId),
    /// The team lost every match it played.
    WorthZero(TeamId),
    /// The team's log-worth stopped at the clamp.
    WorthAtBound(TeamId),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub params: BTParams,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    pub boundary: Vec<BoundaryFlag>,
}

/// Matches indexed against a sorted team list, ready for likelihood
/// evaluation in the unconstrained parameterization.
#[derive(Clone, Debug)]
pub struct DavidsonProblem {
    teams: Vec<TeamId>,
    matches: Vec<(usize, usize, usize)>,
}

impl DavidsonProblem {
    pub fn new(matches: &[(MatchRecord, Outcome)]) -> Result<Self> {
        let teams: Vec<TeamId> = matches
            .iter()
            .flat_map(|(m, _)| [m.home().clone(), m.away().clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if teams.len() < 2 {
            return Err(Error::InsufficientData(
                "need matches between at least two teams".into(),
            ));
        }
        let index = |t: &TeamId| teams.binary_search(t).expect("team collected above");
        let matches = matches
            .iter()
            .map(|(m, o)| (index(m.home()), index(m.away()), o.index()))
            .collect();
        Ok(Self { teams, matches })
    }

    pub fn teams(&self) -> &[TeamId] {
        &self.teams
    }

    /// `T - 1` relative log-worths, then `ln γ`, then `ln ν`.
    pub fn dimension(&self) -> usize {
        self.teams.len() + 1
    }

    fn log_worth(&self, theta: &[f64], team: usize) -> f64 {
        if team == 0 {
            0.0
        } else {
            theta[team - 1]
        }
    }

    /// Log-likelihood and its gradient at `theta`.
    pub fn log_likelihood(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let t = self.teams.len();
        let (lg, ln) = (theta[t - 1], theta[t]);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut total = 0.0;
        for &(i, j, k) in &self.matches {
            let (bi, bj) = (self.log_worth(theta, i), self.log_worth(theta, j));
            let z = [lg + bi, bj, ln + 0.5 * (bi + bj)];
            let m = z[0].max(z[1]).max(z[2]);
            let e = z.map(|v| (v - m).exp());
            let s: f64 = e.iter().sum();
            let lse = m + s.ln();
            let logp = [z[0] - lse, z[2] - lse, z[1] - lse];
            total += logp[k];

            // d ell / d z = indicator - softmax, z ordered (win, loss, draw)
            let q = e.map(|v| v / s);
            let hit = match k {
                0 => [1.0, 0.0, 0.0],
                1 => [0.0, 0.0, 1.0],
                _ => [0.0, 1.0, 0.0],
            };
            let dz = [hit[0] - q[0], hit[1] - q[1], hit[2] - q[2]];
            grad[t - 1] += dz[0];
            grad[t] += dz[2];
            if i > 0 {
                grad[i - 1] += dz[0] + 0.5 * dz[2];
            }
            if j > 0 {
                grad[j - 1] += dz[1] + 0.5 * dz[2];
            }
        }
        total
    }

    pub fn params_from(&self, theta: &[f64]) -> BTParams {
        let t = self.teams.len();
        let worth = self
            .teams
            .iter()
            .enumerate()
            .map(|(i, team)| (team.clone(), self.log_worth(theta, i).exp()))
            .collect();
        BTParams::new(worth, theta[t - 1].exp(), theta[t].exp()).expect("finite positive parameters")
    }
}

fn data_boundary_flags(problem: &DavidsonProblem) -> Vec<BoundaryFlag> {
    let t = problem.teams.len();
    let mut won = vec![0usize; t];
    let mut lost = vec![0usize; t];
    let mut played = vec![0usize; t];
    let mut draws = 0;
    for &(i, j, k) in &problem.matches {
        played[i] += 1;
        played[j] += 1;
        match k {
            0 => {
                won[i] += 1;
                lost[j] += 1;
            }
            1 => draws += 1,
            _ => {
                won[j] += 1;
                lost[i] += 1;
            }
        }
    }
    let mut flags = Vec::new();
    if draws == 0 {
        flags.push(BoundaryFlag::NuZero);
    }
    for i in 0..t {
        if won[i] == played[i] {
            flags.push(BoundaryFlag::WorthInfinite(problem.teams[i].clone()));
        } else if lost[i] == played[i] {
            flags.push(BoundaryFlag::WorthZero(problem.teams[i].clone()));
        }
    }
    flags
}

/// Maximum-likelihood fit from equal worths, `γ = 1`, `ν = 1`.
pub fn bt_fit(matches: &[(MatchRecord, Outcome)], settings: &OptimizerSettings) -> Result<FitReport> {
    let problem = DavidsonProblem::new(matches)?;
    let dim = problem.dimension();
    let lower = vec![-PARAM_BOUND; dim];
    let upper = vec![PARAM_BOUND; dim];
    let min = minimize(
        |theta, grad| {
            let ll = problem.log_likelihood(theta, grad);
            grad.iter_mut().for_each(|g| *g = -*g);
            -ll
        },
        &vec![0.0; dim],
        &lower,
        &upper,
        settings,
    );

    let mut boundary = data_boundary_flags(&problem);
    let at_bound = |v: f64| v.abs() >= PARAM_BOUND - 1e-9;
    let t = problem.teams.len();
    for (i, team) in problem.teams.iter().enumerate().skip(1) {
        if at_bound(min.x[i - 1]) {
            boundary.push(BoundaryFlag::WorthAtBound(team.clone()));
        }
    }
    if at_bound(min.x[t - 1]) {
        boundary.push(BoundaryFlag::GammaAtBound);
    }
    if at_bound(min.x[t]) {
        boundary.push(BoundaryFlag::NuAtBound);
    }

    Ok(FitReport {
        params: problem.params_from(&min.x),
        log_likelihood: -min.value,
        iterations: min.iterations,
        converged: min.converged,
        gradient_norm: min.gradient_norm,
        boundary,
    })
}

/// `team,worth` rows followed by a `gamma,nu` header and its values.
pub fn write_bt_params(params: &BTParams) -> String {
    let mut out = String::from("team,worth\n");
    for (team, w) in &params.worth {
        let _ = writeln!(out, "{},{}", team.name(), w);
    }
    let _ = writeln!(out, "gamma,nu\n{},{}", params.gamma, params.nu);
    out
}
