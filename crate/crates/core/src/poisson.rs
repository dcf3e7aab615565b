//! Goals models: Holgate's bivariate Poisson with log-linear attack/defence
//! links, maximum-likelihood fitting and three-way outcome probabilities
//! from a truncated score grid.
//!
//! With `λ3 = 0` the two scores are independent Poisson counts (the
//! current-season "Lee" benchmark). With `λ3 > 0` they share a common
//! component and are positively correlated ("Arruda-style" benchmark).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::Serialize;
use statrs::function::factorial::ln_factorial;
use statrs::function::gamma::gamma_lr;

use crate::data::{MatchRecord, Prediction, TeamId};
use crate::error::{Error, Result};
use crate::optim::{minimize, OptimizerSettings};

/// Default bound on the probability mass left outside the score grid.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;
/// Largest truncation deficit accepted when turning a grid into outcome
/// probabilities.
pub const MAX_GRID_DEFICIT: f64 = 1e-6;
const PARAM_BOUND: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BivPoissonParams {
    lambda1: f64,
    lambda2: f64,
    lambda3: f64,
}

impl BivPoissonParams {
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self> {
        let ok = lambda1.is_finite()
            && lambda2.is_finite()
            && lambda3.is_finite()
            && lambda1 > 0.0
            && lambda2 > 0.0
            && lambda3 >= 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "bivariate Poisson needs λ1, λ2 > 0 and λ3 ≥ 0, got ({lambda1}, {lambda2}, {lambda3})"
            )));
        }
        Ok(Self {
            lambda1,
            lambda2,
            lambda3,
        })
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn lambda3(&self) -> f64 {
        self.lambda3
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Log-weights of the `k` terms of the pmf sum (without the common
/// `-(λ1+λ2+λ3)` factor).
fn pmf_terms(p: &BivPoissonParams, y1: u32, y2: u32) -> Vec<f64> {
    let (l1, l2) = (p.lambda1.ln(), p.lambda2.ln());
    let kmax = if p.lambda3 > 0.0 { y1.min(y2) } else { 0 };
    let l3 = if p.lambda3 > 0.0 { p.lambda3.ln() } else { 0.0 };
    (0..=kmax)
        .map(|k| {
            (y1 - k) as f64 * l1 + (y2 - k) as f64 * l2 + k as f64 * l3
                - ln_factorial((y1 - k) as u64)
                - ln_factorial((y2 - k) as u64)
                - ln_factorial(k as u64)
        })
        .collect()
}

pub fn ln_bivpois_pmf(p: &BivPoissonParams, y1: u32, y2: u32) -> f64 {
    -(p.lambda1 + p.lambda2 + p.lambda3) + log_sum_exp(&pmf_terms(p, y1, y2))
}

/// `P(Y1 = y1, Y2 = y2)`, evaluated by log-sum-exp over the shared
/// component.
pub fn bivpois_pmf(p: &BivPoissonParams, y1: u32, y2: u32) -> f64 {
    ln_bivpois_pmf(p, y1, y2).exp()
}

/// `P(X > n)` for `X ~ Poisson(lambda)`.
pub fn poisson_upper_tail(lambda: f64, n: u32) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    gamma_lr(n as f64 + 1.0, lambda)
}

/// Attack/defence strengths with home advantage on the log scale.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeamStrengths {
    pub mu: f64,
    pub att: BTreeMap<TeamId, f64>,
    pub def: BTreeMap<TeamId, f64>,
    pub gamma_home: f64,
    pub lambda3: f64,
}

/// `log λ1 = μ + att[home] − def[away] + γ`, `log λ2 = μ + att[away] − def[home]`.
pub fn link_rates(s: &TeamStrengths, home: &TeamId, away: &TeamId) -> Result<BivPoissonParams> {
    let get = |m: &BTreeMap<TeamId, f64>, t: &TeamId| {
        m.get(t)
            .copied()
            .ok_or_else(|| Error::UnknownTeam(t.to_string()))
    };
    let l1 = (s.mu + get(&s.att, home)? - get(&s.def, away)? + s.gamma_home).exp();
    let l2 = (s.mu + get(&s.att, away)? - get(&s.def, home)?).exp();
    BivPoissonParams::new(l1, l2, s.lambda3)
}

/// Joint score probabilities for `0 ≤ i, j ≤ max_goals`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreGrid {
    max_goals: u32,
    mass: Vec<f64>,
    truncation_deficit: f64,
}

impl ScoreGrid {
    pub fn max_goals(&self) -> u32 {
        self.max_goals
    }

    pub fn get(&self, home_goals: u32, away_goals: u32) -> f64 {
        let n = self.max_goals as usize + 1;
        self.mass[home_goals as usize * n + away_goals as usize]
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn truncation_deficit(&self) -> f64 {
        self.truncation_deficit
    }

    /// Row sums: the home-goals marginal on the grid.
    pub fn home_marginal(&self) -> Vec<f64> {
        let n = self.max_goals as usize + 1;
        self.mass.chunks(n).map(|row| row.iter().sum()).collect()
    }
}

/// Smallest square grid whose excluded mass is at most `tail_tol`, bounded
/// through the Poisson marginals `Poisson(λ1+λ3)` and `Poisson(λ2+λ3)`.
pub fn score_grid(p: &BivPoissonParams, tail_tol: f64) -> Result<ScoreGrid> {
    if !(tail_tol > 0.0 && tail_tol <= 1e-3) {
        return Err(Error::InvalidParameter(format!(
            "tail_tol must lie in (0, 1e-3], got {tail_tol}"
        )));
    }
    let (m1, m2) = (p.lambda1 + p.lambda3, p.lambda2 + p.lambda3);
    let mut max_goals = 0u32;
    while poisson_upper_tail(m1, max_goals) + poisson_upper_tail(m2, max_goals) > tail_tol {
        max_goals += 1;
    }
    let n = max_goals as usize + 1;
    let mut mass = Vec::with_capacity(n * n);
    for i in 0..=max_goals {
        for j in 0..=max_goals {
            mass.push(bivpois_pmf(p, i, j));
        }
    }
    let total: f64 = mass.iter().sum();
    Ok(ScoreGrid {
        max_goals,
        mass,
        truncation_deficit: (1.0 - total).max(0.0),
    })
}

/// Sums the grid below, on and above the diagonal, renormalized by the grid
/// total.
pub fn outcome_probs_from_grid(g: &ScoreGrid) -> Result<Prediction> {
    if g.truncation_deficit > MAX_GRID_DEFICIT {
        return Err(Error::InvalidParameter(format!(
            "score grid leaves out {} of the mass",
            g.truncation_deficit
        )));
    }
    let mut sums = [0.0; 3];
    for i in 0..=g.max_goals {
        for j in 0..=g.max_goals {
            let slot = match i.cmp(&j) {
                std::cmp::Ordering::Greater => 0,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Less => 2,
            };
            sums[slot] += g.get(i, j);
        }
    }
    Prediction::from_weights(sums)
}

/// Which past matches feed a rolling fit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum TrainingWindow {
    /// Earlier matchdays of the current season only.
    #[default]
    Season,
    /// The last `n` rounds played, across season boundaries.
    LastNRounds(u32),
    /// Everything before the target matchday.
    All,
}

impl FromStr for TrainingWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "season" => Ok(Self::Season),
            "all" => Ok(Self::All),
            _ => match s.strip_prefix("last_n_rounds:") {
                Some(n) => n
                    .trim()
                    .parse::<u32>()
                    .ok()
                    .filter(|n| *n > 0)
                    .map(Self::LastNRounds)
                    .ok_or_else(|| Error::InvalidParameter(format!("bad round count in `{s}`"))),
                None => Err(Error::InvalidParameter(format!(
                    "unknown training window `{s}` (expected season, last_n_rounds:<n> or all)"
                ))),
            },
        }
    }
}

impl fmt::Display for TrainingWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Season => f.write_str("season"),
            Self::LastNRounds(n) => write!(f, "last_n_rounds:{n}"),
            Self::All => f.write_str("all"),
        }
    }
}

/// Selects the training matches from a chronologically ordered history
/// (every match in it precedes the target matchday of `season`).
pub fn select_training(history: &[MatchRecord], season: i32, window: TrainingWindow) -> Vec<&MatchRecord> {
    match window {
        TrainingWindow::Season => history.iter().filter(|m| m.season() == season).collect(),
        TrainingWindow::All => history.iter().collect(),
        TrainingWindow::LastNRounds(n) => {
            let rounds: BTreeSet<(i32, u32)> =
                history.iter().map(|m| (m.season(), m.matchday())).collect();
            let keep: BTreeSet<(i32, u32)> = rounds.into_iter().rev().take(n as usize).collect();
            history
                .iter()
                .filter(|m| keep.contains(&(m.season(), m.matchday())))
                .collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "team")]
pub enum PoissonBoundary {
    /// The team never scored, so its attack strength diverges.
    NoGoalsScored(TeamId),
    /// The team never conceded.
    NoGoalsConceded(TeamId),
    /// `ln λ3` stopped at its lower clamp.
    Lambda3Zero,
    /// Some other parameter stopped at the clamp.
    ParameterAtBound(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoissonFit {
    pub strengths: TeamStrengths,
    pub correlated: bool,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    pub boundary: Vec<PoissonBoundary>,
    pub n_matches: usize,
}

/// Played matches indexed for likelihood evaluation.
///
/// Parameter layout: `μ, γ, att_0..att_{T-2}, def_0..def_{T-2}` and, when
/// correlated, `ln λ3`. The last team's attack and defence are minus the sum
/// of the others, so both sums are exactly zero.
#[derive(Clone, Debug)]
pub struct PoissonProblem {
    teams: Vec<TeamId>,
    matches: Vec<(usize, usize, u32, u32)>,
    correlated: bool,
}

impl PoissonProblem {
    pub fn new<'a, I>(matches: I, correlated: bool) -> Result<Self>
    where
        I: IntoIterator<Item = &'a MatchRecord>,
    {
        let played: Vec<&MatchRecord> = matches.into_iter().collect();
        if let Some(m) = played.iter().find(|m| !m.is_played()) {
            return Err(Error::NoResult(m.fixture().clone()));
        }
        let teams: Vec<TeamId> = played
            .iter()
            .flat_map(|m| [m.home().clone(), m.away().clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if teams.len() < 2 {
            return Err(Error::InsufficientData(
                "need matches between at least two teams".into(),
            ));
        }
        let index = |t: &TeamId| teams.binary_search(t).expect("collected above");
        let matches = played
            .iter()
            .map(|m| {
                let (h, a) = m.score().expect("checked played");
                (index(m.home()), index(m.away()), h, a)
            })
            .collect();
        Ok(Self {
            teams,
            matches,
            correlated,
        })
    }

    pub fn teams(&self) -> &[TeamId] {
        &self.teams
    }

    pub fn dimension(&self) -> usize {
        2 + 2 * (self.teams.len() - 1) + self.correlated as usize
    }

    fn unpack(&self, theta: &[f64]) -> (f64, f64, Vec<f64>, Vec<f64>, f64) {
        let t = self.teams.len();
        let free_att = &theta[2..2 + t - 1];
        let free_def = &theta[2 + t - 1..2 + 2 * (t - 1)];
        let mut att = free_att.to_vec();
        att.push(-free_att.iter().sum::<f64>());
        let mut def = free_def.to_vec();
        def.push(-free_def.iter().sum::<f64>());
        let lambda3 = if self.correlated {
            theta[2 + 2 * (t - 1)].exp()
        } else {
            0.0
        };
        (theta[0], theta[1], att, def, lambda3)
    }

    /// Log-likelihood and gradient at `theta`.
    pub fn log_likelihood(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let t = self.teams.len();
        let (mu, gamma, att, def, lambda3) = self.unpack(theta);
        let mut g_att = vec![0.0; t];
        let mut g_def = vec![0.0; t];
        let (mut g_mu, mut g_gamma, mut g_l3) = (0.0, 0.0, 0.0);
        let mut total = 0.0;

        for &(h, a, y1, y2) in &self.matches {
            let eta1 = mu + att[h] - def[a] + gamma;
            let eta2 = mu + att[a] - def[h];
            let (l1, l2) = (eta1.exp(), eta2.exp());
            let (d1, d2) = if lambda3 > 0.0 {
                let p = BivPoissonParams {
                    lambda1: l1,
                    lambda2: l2,
                    lambda3,
                };
                let terms = pmf_terms(&p, y1, y2);
                let lse = log_sum_exp(&terms);
                total += -(l1 + l2 + lambda3) + lse;
                let (mut e1, mut e2, mut ek) = (0.0, 0.0, 0.0);
                for (k, tk) in terms.iter().enumerate() {
                    let w = (tk - lse).exp();
                    e1 += w * (y1 as f64 - k as f64);
                    e2 += w * (y2 as f64 - k as f64);
                    ek += w * k as f64;
                }
                g_l3 += ek - lambda3;
                (e1 - l1, e2 - l2)
            } else {
                total += y1 as f64 * eta1 - l1 - ln_factorial(y1 as u64) + y2 as f64 * eta2
                    - l2
                    - ln_factorial(y2 as u64);
                (y1 as f64 - l1, y2 as f64 - l2)
            };
            g_mu += d1 + d2;
            g_gamma += d1;
            g_att[h] += d1;
            g_def[a] -= d1;
            g_att[a] += d2;
            g_def[h] -= d2;
        }

        grad[0] = g_mu;
        grad[1] = g_gamma;
        for i in 0..t - 1 {
            grad[2 + i] = g_att[i] - g_att[t - 1];
            grad[2 + t - 1 + i] = g_def[i] - g_def[t - 1];
        }
        if self.correlated {
            grad[2 + 2 * (t - 1)] = g_l3;
        }
        total
    }

    pub fn strengths_from(&self, theta: &[f64]) -> TeamStrengths {
        let (mu, gamma_home, att, def, lambda3) = self.unpack(theta);
        TeamStrengths {
            mu,
            att: self.teams.iter().cloned().zip(att).collect(),
            def: self.teams.iter().cloned().zip(def).collect(),
            gamma_home,
            lambda3,
        }
    }

    fn initial(&self) -> Vec<f64> {
        let goals: f64 = self.matches.iter().map(|m| (m.2 + m.3) as f64).sum();
        let mean = goals / (2.0 * self.matches.len() as f64);
        let mut theta = vec![0.0; self.dimension()];
        if self.correlated {
            theta[0] = (mean - 0.1).max(0.1).ln();
            theta[self.dimension() - 1] = 0.1f64.ln();
        } else {
            theta[0] = mean.max(0.1).ln();
        }
        theta
    }
}

/// Maximum-likelihood fit of the log-linear model. `correlated = false`
/// fixes `λ3 = 0`.
pub fn poisson_fit<'a, I>(matches: I, correlated: bool, settings: &OptimizerSettings) -> Result<PoissonFit>
where
    I: IntoIterator<Item = &'a MatchRecord>,
{
    let problem = PoissonProblem::new(matches, correlated)?;
    let dim = problem.dimension();
    let min = minimize(
        |theta, grad| {
            let ll = problem.log_likelihood(theta, grad);
            grad.iter_mut().for_each(|g| *g = -*g);
            -ll
        },
        &problem.initial(),
        &vec![-PARAM_BOUND; dim],
        &vec![PARAM_BOUND; dim],
        settings,
    );

    let t = problem.teams.len();
    let mut scored = vec![0u32; t];
    let mut conceded = vec![0u32; t];
    for &(h, a, y1, y2) in &problem.matches {
        scored[h] += y1;
        conceded[a] += y1;
        scored[a] += y2;
        conceded[h] += y2;
    }
    let mut boundary = Vec::new();
    for i in 0..t {
        if scored[i] == 0 {
            boundary.push(PoissonBoundary::NoGoalsScored(problem.teams[i].clone()));
        }
        if conceded[i] == 0 {
            boundary.push(PoissonBoundary::NoGoalsConceded(problem.teams[i].clone()));
        }
    }
    for (i, v) in min.x.iter().enumerate() {
        if v.abs() >= PARAM_BOUND - 1e-9 {
            if correlated && i == dim - 1 && *v < 0.0 {
                boundary.push(PoissonBoundary::Lambda3Zero);
            } else {
                boundary.push(PoissonBoundary::ParameterAtBound(format!("theta[{i}]")));
            }
        }
    }

    Ok(PoissonFit {
        strengths: problem.strengths_from(&min.x),
        correlated,
        log_likelihood: -min.value,
        iterations: min.iterations,
        converged: min.converged,
        gradient_norm: min.gradient_norm,
        boundary,
        n_matches: problem.matches.len(),
    })
}

/// Outcome probabilities for one fixture under fitted strengths.
pub fn predict_fixture(
    s: &TeamStrengths,
    home: &TeamId,
    away: &TeamId,
    tail_tol: f64,
) -> Result<Prediction> {
    let rates = link_rates(s, home, away)?;
    outcome_probs_from_grid(&score_grid(&rates, tail_tol)?)
}

/// `team,att,def` rows followed by a `mu,gamma,lambda3` header and values.
pub fn write_strengths(s: &TeamStrengths) -> String {
    let mut out = String::from("team,att,def\n");
    for (team, att) in &s.att {
        let def = s.def.get(team).copied().unwrap_or(f64::NAN);
        let _ = writeln!(out, "{},{},{}", team.name(), att, def);
    }
    let _ = writeln!(out, "mu,gamma,lambda3\n{},{},{}", s.mu, s.gamma_home, s.lambda3);
    out
}
