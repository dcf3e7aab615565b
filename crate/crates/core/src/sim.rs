//! Synthetic leagues for oracle tests and the self-test.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::data::{MatchRecord, Outcome, Prediction, Season, SeasonCheck, TeamId};
use crate::davidson::{bt_outcome_probs, BTParams};
use crate::error::Result;
use crate::poisson::{link_rates, BivPoissonParams, TeamStrengths};

/// `T01`, `T02`, ...
pub fn team_names(n: usize) -> Vec<TeamId> {
    (1..=n)
        .map(|i| TeamId::new(&format!("T{i:02}")).expect("non-empty"))
        .collect()
}

/// Circle-method double round robin: `(matchday, home, away)`. The second
/// half repeats the first with venues swapped. An odd number of teams gets
/// a bye each round.
pub fn double_round_robin(teams: &[TeamId]) -> Vec<(u32, TeamId, TeamId)> {
    let mut slots: Vec<Option<&TeamId>> = teams.iter().map(Some).collect();
    if slots.len() % 2 == 1 {
        slots.push(None);
    }
    let n = slots.len();
    if n < 2 {
        return Vec::new();
    }
    let rounds = (n - 1) as u32;
    let mut first_half = Vec::new();
    for round in 0..rounds {
        for i in 0..n / 2 {
            let (x, y) = (slots[i], slots[n - 1 - i]);
            if let (Some(x), Some(y)) = (x, y) {
                // the fixed team alternates venues; other pairs alternate by board
                let x_home = if i == 0 { round % 2 == 0 } else { i % 2 == 0 };
                let (home, away) = if x_home { (x, y) } else { (y, x) };
                first_half.push((round + 1, home.clone(), away.clone()));
            }
        }
        // keep slot 0 fixed and rotate the rest
        let last = slots.pop().expect("n >= 2");
        slots.insert(1, last);
    }
    let second_half: Vec<_> = first_half
        .iter()
        .map(|(md, h, a)| (md + rounds, a.clone(), h.clone()))
        .collect();
    first_half.into_iter().chain(second_half).collect()
}

pub fn sample_outcome<R: Rng + ?Sized>(p: &Prediction, rng: &mut R) -> Outcome {
    let u: f64 = rng.random();
    if u < p.home_win() {
        Outcome::HomeWin
    } else if u < p.home_win() + p.draw() {
        Outcome::Draw
    } else {
        Outcome::AwayWin
    }
}

fn poisson_draw<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u32 {
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).expect("positive rate").sample(rng) as u32
}

/// `(X1 + X3, X2 + X3)` with independent Poisson components.
pub fn sample_bivpois<R: Rng + ?Sized>(p: &BivPoissonParams, rng: &mut R) -> (u32, u32) {
    let shared = poisson_draw(p.lambda3(), rng);
    (
        poisson_draw(p.lambda1(), rng) + shared,
        poisson_draw(p.lambda2(), rng) + shared,
    )
}

/// A representative score for an outcome-only simulation.
fn token_score(o: Outcome) -> (u32, u32) {
    match o {
        Outcome::HomeWin => (1, 0),
        Outcome::Draw => (1, 1),
        Outcome::AwayWin => (0, 1),
    }
}

/// Plays `schedule` under the Davidson model. Scores are placeholders
/// (1-0, 1-1, 0-1) consistent with the drawn outcome.
pub fn simulate_davidson<R: Rng + ?Sized>(
    params: &BTParams,
    season: i32,
    schedule: &[(u32, TeamId, TeamId)],
    rng: &mut R,
) -> Result<Vec<MatchRecord>> {
    schedule
        .iter()
        .map(|(md, h, a)| {
            let p = bt_outcome_probs(params, h, a)?;
            let o = sample_outcome(&p, rng);
            MatchRecord::new(season, *md, h.clone(), a.clone(), Some(token_score(o)))
        })
        .collect()
}

/// Plays `schedule` under the bivariate Poisson goals model.
pub fn simulate_poisson<R: Rng + ?Sized>(
    strengths: &TeamStrengths,
    season: i32,
    schedule: &[(u32, TeamId, TeamId)],
    rng: &mut R,
) -> Result<Vec<MatchRecord>> {
    schedule
        .iter()
        .map(|(md, h, a)| {
            let rates = link_rates(strengths, h, a)?;
            let score = sample_bivpois(&rates, rng);
            MatchRecord::new(season, *md, h.clone(), a.clone(), Some(score))
        })
        .collect()
}

/// Outcomes drawn from fixed per-fixture predictions.
pub fn simulate_from_predictions<R: Rng + ?Sized>(
    season: i32,
    fixtures: &[(u32, TeamId, TeamId, Prediction)],
    rng: &mut R,
) -> Result<Season> {
    let matches = fixtures
        .iter()
        .map(|(md, h, a, p)| {
            let o = sample_outcome(p, rng);
            MatchRecord::new(season, *md, h.clone(), a.clone(), Some(token_score(o)))
        })
        .collect::<Result<Vec<_>>>()?;
    Season::new(season, matches, SeasonCheck::Lenient)
}
