//! Scoring rules and forecast diagnostics for three-way match predictions.
//!
//! All rules are negatively oriented: lower is better.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::function::gamma::gamma_ur;

use crate::data::{Outcome, Prediction, TeamId};
use crate::error::{Error, Result};

/// Squared distance between `p` and the vertex of the realized outcome.
/// Ranges over `[0, 2]`.
pub fn brier(outcome: Outcome, p: &Prediction) -> f64 {
    Outcome::ALL
        .iter()
        .map(|&o| {
            let indicator = if o == outcome { 1.0 } else { 0.0 };
            (indicator - p.prob(o)).powi(2)
        })
        .sum()
}

/// `-ln p_x`; `+inf` when the realized outcome had probability zero.
pub fn log_score(outcome: Outcome, p: &Prediction) -> f64 {
    let px = p.prob(outcome);
    if px <= 0.0 {
        f64::INFINITY
    } else {
        -px.ln()
    }
}

/// `-p_x / ||p||`; ranges over `[-1, 0]`.
pub fn spherical(outcome: Outcome, p: &Prediction) -> f64 {
    let norm = p.probs().iter().map(|v| v * v).sum::<f64>().sqrt();
    -p.prob(outcome) / norm
}

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn entropy(p: &Prediction) -> f64 {
    -p.probs()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|v| v * v.ln())
        .sum::<f64>()
}

/// Probability of a home win given that the match is not drawn.
pub fn cond_home_win_given_no_draw(p: &Prediction) -> Option<f64> {
    let decisive = p.home_win() + p.away_win();
    (decisive > 0.0).then(|| p.home_win() / decisive)
}

/// How a prediction's highest-probability outcome relates to the result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TopChoice {
    pub error: bool,
    /// Several outcomes share the maximum probability.
    pub tied: bool,
}

/// A tied maximum counts as correct only when the realized outcome is among
/// the tied ones.
pub fn top_choice(outcome: Outcome, p: &Prediction) -> TopChoice {
    let probs = p.probs();
    let max = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let at_max = probs.iter().filter(|&&v| v == max).count();
    TopChoice {
        error: p.prob(outcome) != max,
        tied: at_max > 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorProportion {
    pub value: f64,
    pub n: usize,
    /// Predictions whose maximum was shared by several outcomes.
    pub tied: usize,
}

/// Fraction of matches whose realized outcome is not the modal prediction.
pub fn proportion_of_errors(scored: &[(Outcome, Prediction)]) -> Result<ErrorProportion> {
    if scored.is_empty() {
        return Err(Error::InsufficientData("no predictions to score".into()));
    }
    let (mut errors, mut tied) = (0usize, 0usize);
    for (o, p) in scored {
        let t = top_choice(*o, p);
        errors += t.error as usize;
        tied += t.tied as usize;
    }
    Ok(ErrorProportion {
        value: errors as f64 / scored.len() as f64,
        n: scored.len(),
        tied,
    })
}

/// Mean, total and standard errors of a list of per-match scores.
/// Non-finite entries are left out and counted in `non_finite`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScoreSummary {
    pub n: usize,
    pub mean: f64,
    pub total: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub se: f64,
    /// Standard error of the total, `n * se`.
    pub total_se: f64,
    pub non_finite: usize,
}

impl ScoreSummary {
    pub fn from_scores(scores: impl IntoIterator<Item = f64>) -> Self {
        let mut finite = Vec::new();
        let mut non_finite = 0;
        for s in scores {
            if s.is_finite() {
                finite.push(s);
            } else {
                non_finite += 1;
            }
        }
        let n = finite.len();
        if n == 0 {
            return Self {
                n,
                mean: f64::NAN,
                total: 0.0,
                se: f64::NAN,
                total_se: f64::NAN,
                non_finite,
            };
        }
        let total: f64 = finite.iter().sum();
        let mean = total / n as f64;
        let se = if n > 1 {
            let var = finite.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            var.sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            n,
            mean,
            total,
            se,
            total_se: se * n as f64,
            non_finite,
        }
    }
}

/// Five-number summary for box plots.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quantiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quantiles {
    /// Linear interpolation between order statistics. `None` when empty.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let q = |f: f64| {
            let pos = f * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(Self {
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
        })
    }
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

/// Minimum number of (probability, indicator) pairs for a calibration curve.
pub const MIN_CALIBRATION_PAIRS: usize = 30;
const Z95: f64 = 1.959963984540054;

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationSettings {
    pub bins: usize,
    /// Points at which the smoothed curve is evaluated.
    pub grid: Vec<f64>,
    /// Kernel bandwidths tried by leave-one-out selection.
    pub bandwidths: Vec<f64>,
    /// Grid points with a smaller effective sample size are not reported.
    pub min_effective_n: f64,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            bins: 10,
            grid: (1..40).map(|k| k as f64 * 0.025).collect(),
            bandwidths: vec![0.02, 0.03, 0.05, 0.075, 0.1, 0.15, 0.2],
            min_effective_n: 10.0,
        }
    }
}

/// One equal-width probability bin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CalibrationBin {
    pub lower: f64,
    pub upper: f64,
    pub n: usize,
    /// Mean assigned probability in the bin.
    pub assigned: f64,
    /// Observed event frequency in the bin.
    pub observed: f64,
    /// Standard error of `observed` if the forecasts were calibrated.
    pub se: f64,
    pub within_band: bool,
}

/// Kernel-smoothed event frequency at one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub p: f64,
    /// Kernel-weighted mean of the assigned probabilities near `p`.
    pub assigned: f64,
    pub observed: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
    pub effective_n: f64,
    /// `assigned` lies inside `observed ± 1.96 se`.
    pub within_band: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationTable {
    pub n_pairs: usize,
    pub bins: Vec<CalibrationBin>,
    pub bandwidth: f64,
    pub smoothed: Vec<CalibrationPoint>,
}

impl CalibrationTable {
    /// Fraction of smoothed grid points whose band covers the identity.
    pub fn smoothed_coverage(&self) -> f64 {
        if self.smoothed.is_empty() {
            return f64::NAN;
        }
        self.smoothed.iter().filter(|p| p.within_band).count() as f64 / self.smoothed.len() as f64
    }
}

/// Unrolls each prediction into three (assigned probability, event happened)
/// pairs.
pub fn calibration_pairs(scored: &[(Outcome, Prediction)]) -> Vec<(f64, bool)> {
    scored
        .iter()
        .flat_map(|(o, p)| Outcome::ALL.map(|x| (p.prob(x), x == *o)))
        .collect()
}

fn gaussian(u: f64) -> f64 {
    (-0.5 * u * u).exp()
}

/// Nadaraya-Watson weights of sorted `pairs` around `x`, truncated at 6
/// bandwidths. Returns (sum w, sum w*y, sum w*p, sum w^2*p(1-p), sum w^2).
fn kernel_sums(pairs: &[(f64, bool)], x: f64, h: f64, skip: Option<usize>) -> [f64; 5] {
    let lo = pairs.partition_point(|(p, _)| *p < x - 6.0 * h);
    let hi = pairs.partition_point(|(p, _)| *p <= x + 6.0 * h);
    let mut s = [0.0; 5];
    for (i, &(p, y)) in pairs.iter().enumerate().take(hi).skip(lo) {
        if Some(i) == skip {
            continue;
        }
        let w = gaussian((p - x) / h);
        s[0] += w;
        s[1] += w * y as u8 as f64;
        s[2] += w * p;
        s[3] += w * w * p * (1.0 - p);
        s[4] += w * w;
    }
    s
}

fn loo_error(pairs: &[(f64, bool)], h: f64) -> f64 {
    let mut err = 0.0;
    for (i, &(p, y)) in pairs.iter().enumerate() {
        let s = kernel_sums(pairs, p, h, Some(i));
        let fit = if s[0] > 0.0 { s[1] / s[0] } else { 0.5 };
        err += (y as u8 as f64 - fit).powi(2);
    }
    err / pairs.len() as f64
}

/// Reliability of a set of predictions: equal-width bins plus a Gaussian
/// kernel smoother whose bandwidth minimizes the leave-one-out squared
/// error. Bands use the variance the indicators would have if the assigned
/// probabilities were correct.
pub fn calibration_curve(
    scored: &[(Outcome, Prediction)],
    settings: &CalibrationSettings,
) -> Result<CalibrationTable> {
    let mut pairs = calibration_pairs(scored);
    calibration_from_pairs(&mut pairs, settings)
}

pub fn calibration_from_pairs(
    pairs: &mut [(f64, bool)],
    settings: &CalibrationSettings,
) -> Result<CalibrationTable> {
    if pairs.len() < MIN_CALIBRATION_PAIRS {
        return Err(Error::InsufficientData(format!(
            "calibration needs at least {MIN_CALIBRATION_PAIRS} pairs, got {}",
            pairs.len()
        )));
    }
    if settings.bins == 0 || settings.bandwidths.is_empty() {
        return Err(Error::InvalidParameter("calibration settings are empty".into()));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let nb = settings.bins;
    let mut acc = vec![(0usize, 0.0f64, 0.0f64, 0.0f64); nb];
    for &(p, y) in pairs.iter() {
        let b = ((p * nb as f64) as usize).min(nb - 1);
        acc[b].0 += 1;
        acc[b].1 += p;
        acc[b].2 += y as u8 as f64;
        acc[b].3 += p * (1.0 - p);
    }
    let bins = acc
        .iter()
        .enumerate()
        .filter(|(_, a)| a.0 > 0)
        .map(|(b, &(n, sp, sy, var))| {
            let nf = n as f64;
            let assigned = sp / nf;
            let observed = sy / nf;
            let se = var.sqrt() / nf;
            CalibrationBin {
                lower: b as f64 / nb as f64,
                upper: (b + 1) as f64 / nb as f64,
                n,
                assigned,
                observed,
                se,
                within_band: (observed - assigned).abs() <= Z95 * se + 1e-12,
            }
        })
        .collect();

    let bandwidth = settings
        .bandwidths
        .iter()
        .map(|&h| (h, loo_error(pairs, h)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)))
        .map(|(h, _)| h)
        .expect("bandwidths non-empty");

    let smoothed = settings
        .grid
        .iter()
        .filter_map(|&x| {
            let s = kernel_sums(pairs, x, bandwidth, None);
            if s[0] <= 0.0 || s[4] <= 0.0 {
                return None;
            }
            let effective_n = s[0] * s[0] / s[4];
            if effective_n < settings.min_effective_n {
                return None;
            }
            let observed = s[1] / s[0];
            let assigned = s[2] / s[0];
            let se = s[3].sqrt() / s[0];
            let lower = observed - Z95 * se;
            let upper = observed + Z95 * se;
            Some(CalibrationPoint {
                p: x,
                assigned,
                observed,
                se,
                lower,
                upper,
                effective_n,
                within_band: lower - 1e-12 <= assigned && assigned <= upper + 1e-12,
            })
        })
        .collect();

    Ok(CalibrationTable {
        n_pairs: pairs.len(),
        bins,
        bandwidth,
        smoothed,
    })
}

// ---------------------------------------------------------------------------
// Goodness of fit
// ---------------------------------------------------------------------------

/// Win probabilities a model assigned to one match, with its result.
#[derive(Clone, Debug)]
pub struct GofMatch {
    pub home: TeamId,
    pub away: TeamId,
    pub p_home_win: f64,
    pub p_away_win: f64,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeamGof {
    pub team: TeamId,
    pub expected_home: f64,
    pub observed_home: u32,
    pub expected_away: f64,
    pub observed_away: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GofResult {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
    pub teams: Vec<TeamGof>,
    /// Terms left out because their expected count was zero.
    pub excluded: Vec<String>,
}

/// Upper tail of the chi-square distribution.
pub fn chi_square_sf(statistic: f64, df: u32) -> f64 {
    if df == 0 {
        return f64::NAN;
    }
    if statistic <= 0.0 {
        return 1.0;
    }
    gamma_ur(df as f64 / 2.0, statistic / 2.0)
}

/// Pearson statistic comparing, for every team and venue, the expected
/// number of wins (sum of win probabilities) with the observed number.
/// Each included term contributes one degree of freedom, so a full table
/// has twice as many degrees of freedom as teams.
pub fn chi_square_gof(matches: &[GofMatch]) -> Result<GofResult> {
    if matches.is_empty() {
        return Err(Error::InsufficientData("no matches for goodness of fit".into()));
    }
    let mut table: BTreeMap<TeamId, TeamGof> = BTreeMap::new();
    let entry = |table: &mut BTreeMap<TeamId, TeamGof>, t: &TeamId| {
        table.entry(t.clone()).or_insert_with(|| TeamGof {
            team: t.clone(),
            expected_home: 0.0,
            observed_home: 0,
            expected_away: 0.0,
            observed_away: 0,
        });
    };
    for m in matches {
        entry(&mut table, &m.home);
        entry(&mut table, &m.away);
        let h = table.get_mut(&m.home).expect("inserted");
        h.expected_home += m.p_home_win;
        h.observed_home += (m.outcome == Outcome::HomeWin) as u32;
        let a = table.get_mut(&m.away).expect("inserted");
        a.expected_away += m.p_away_win;
        a.observed_away += (m.outcome == Outcome::AwayWin) as u32;
    }

    let mut statistic = 0.0;
    let mut df = 0u32;
    let mut excluded = Vec::new();
    for t in table.values() {
        for (venue, e, o) in [
            ("home", t.expected_home, t.observed_home),
            ("away", t.expected_away, t.observed_away),
        ] {
            if e > 0.0 {
                statistic += (e - o as f64).powi(2) / e;
                df += 1;
            } else {
                excluded.push(format!("{} ({venue}): zero expected wins", t.team));
            }
        }
    }
    if df == 0 {
        return Err(Error::InsufficientData("every expected count is zero".into()));
    }
    Ok(GofResult {
        statistic,
        df,
        p_value: chi_square_sf(statistic, df),
        teams: table.into_values().collect(),
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64, c: f64) -> Prediction {
        Prediction::new(a, b, c).unwrap()
    }

    #[test]
    fn brier_examples() {
        let pr = p(0.25, 0.35, 0.40);
        assert!((brier(Outcome::AwayWin, &pr) - 0.545).abs() < 1e-12);
        assert_eq!(brier(Outcome::AwayWin, &p(0.0, 0.0, 1.0)), 0.0);
        for o in Outcome::ALL {
            assert!((brier(o, &Prediction::UNIFORM) - 2.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(brier(Outcome::HomeWin, &p(0.0, 0.0, 1.0)), 2.0);
    }

    #[test]
    fn log_examples() {
        let pr = p(0.25, 0.35, 0.40);
        assert!((log_score(Outcome::AwayWin, &pr) + 0.4f64.ln()).abs() < 1e-15);
        assert!((log_score(Outcome::Draw, &Prediction::UNIFORM) - 3f64.ln()).abs() < 1e-15);
        assert_eq!(log_score(Outcome::HomeWin, &p(1.0, 0.0, 0.0)), 0.0);
        assert_eq!(log_score(Outcome::Draw, &p(1.0, 0.0, 0.0)), f64::INFINITY);
    }

    #[test]
    fn spherical_examples() {
        let s = spherical(Outcome::AwayWin, &p(0.25, 0.35, 0.40));
        assert!((s - (-0.4 / 0.345f64.sqrt())).abs() < 1e-15);
        assert!((s + 0.68).abs() < 0.005);
        assert_eq!(spherical(Outcome::AwayWin, &p(0.0, 0.0, 1.0)), -1.0);
        assert!((spherical(Outcome::HomeWin, &Prediction::UNIFORM) + 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy(&Prediction::UNIFORM) - 3f64.ln()).abs() < 1e-15);
        assert_eq!(entropy(&p(1.0, 0.0, 0.0)), 0.0);
        assert!((entropy(&p(0.5, 0.25, 0.25)) - 1.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn conditional_home_win() {
        assert!((cond_home_win_given_no_draw(&p(0.5, 0.3, 0.2)).unwrap() - 5.0 / 7.0).abs() < 1e-15);
        assert_eq!(cond_home_win_given_no_draw(&p(0.3, 0.4, 0.3)), Some(0.5));
        assert_eq!(cond_home_win_given_no_draw(&p(0.0, 1.0, 0.0)), None);
    }

    #[test]
    fn error_proportions() {
        let right = vec![
            (Outcome::HomeWin, p(0.6, 0.2, 0.2)),
            (Outcome::Draw, p(0.2, 0.6, 0.2)),
        ];
        assert_eq!(proportion_of_errors(&right).unwrap().value, 0.0);
        let wrong = vec![
            (Outcome::AwayWin, p(0.6, 0.2, 0.2)),
            (Outcome::HomeWin, p(0.2, 0.6, 0.2)),
        ];
        assert_eq!(proportion_of_errors(&wrong).unwrap().value, 1.0);
        let mixed = vec![
            (Outcome::HomeWin, p(0.6, 0.2, 0.2)),
            (Outcome::HomeWin, p(0.5, 0.3, 0.2)),
            (Outcome::AwayWin, p(0.2, 0.2, 0.6)),
            (Outcome::Draw, p(0.2, 0.2, 0.6)),
        ];
        assert_eq!(proportion_of_errors(&mixed).unwrap().value, 0.25);
        assert!(proportion_of_errors(&[]).is_err());
    }

    #[test]
    fn argmax_ties_are_flagged() {
        let tied = p(0.4, 0.4, 0.2);
        assert_eq!(top_choice(Outcome::Draw, &tied), TopChoice { error: false, tied: true });
        assert_eq!(top_choice(Outcome::AwayWin, &tied), TopChoice { error: true, tied: true });
        let r = proportion_of_errors(&[(Outcome::HomeWin, tied)]).unwrap();
        assert_eq!((r.value, r.tied), (0.0, 1));
    }

    #[test]
    fn summary_statistics() {
        let s = ScoreSummary::from_scores([1.0, 2.0, 3.0, f64::INFINITY]);
        assert_eq!((s.n, s.non_finite), (3, 1));
        assert_eq!(s.total, 6.0);
        assert_eq!(s.mean, 2.0);
        assert!((s.se - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((s.total_se - 3.0 * s.se).abs() < 1e-15);
    }

    #[test]
    fn quantiles_interpolate() {
        let q = Quantiles::of([4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((q.min, q.q1, q.median, q.q3, q.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        assert!(Quantiles::of([]).is_none());
    }

    #[test]
    fn chi_square_tail_values() {
        // Known values of the chi-square survival function.
        assert!((chi_square_sf(3.841458820694124, 1) - 0.05).abs() < 1e-10);
        assert!((chi_square_sf(55.75847927888702, 40) - 0.05).abs() < 1e-10);
        assert!((chi_square_sf(40.0, 40) - 0.4702572668).abs() < 1e-9);
        assert_eq!(chi_square_sf(0.0, 40), 1.0);
        // df = 2: survival is exp(-x/2)
        for x in [0.1, 1.0, 7.5, 30.0] {
            let exact = (-x / 2.0f64).exp();
            assert!(((chi_square_sf(x, 2) - exact) / exact).abs() < 1e-10);
        }
    }

    fn team(s: &str) -> TeamId {
        TeamId::new(s).unwrap()
    }

    #[test]
    fn gof_perfect_agreement() {
        // Each team: one home win expected and observed, one away win
        // expected and observed.
        let ms = vec![
            GofMatch { home: team("A"), away: team("B"), p_home_win: 1.0, p_away_win: 0.0, outcome: Outcome::HomeWin },
            GofMatch { home: team("B"), away: team("A"), p_home_win: 0.0, p_away_win: 1.0, outcome: Outcome::AwayWin },
            GofMatch { home: team("B"), away: team("A"), p_home_win: 1.0, p_away_win: 0.0, outcome: Outcome::HomeWin },
            GofMatch { home: team("A"), away: team("B"), p_home_win: 0.0, p_away_win: 1.0, outcome: Outcome::AwayWin },
        ];
        let r = chi_square_gof(&ms).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.df, 4);
        assert_eq!(r.p_value, 1.0);
        assert!(r.excluded.is_empty());
    }

    #[test]
    fn gof_excludes_zero_expectations() {
        let ms = vec![GofMatch {
            home: team("A"),
            away: team("B"),
            p_home_win: 0.5,
            p_away_win: 0.0,
            outcome: Outcome::HomeWin,
        }];
        let r = chi_square_gof(&ms).unwrap();
        // A home: (0.5-1)^2/0.5 = 0.5; B away excluded; A away and B home
        // have no matches and zero expectation.
        assert_eq!(r.df, 1);
        assert!((r.statistic - 0.5).abs() < 1e-15);
        assert_eq!(r.excluded.len(), 3);
    }

    #[test]
    fn calibration_needs_enough_pairs() {
        let few = vec![(Outcome::HomeWin, Prediction::UNIFORM); 9];
        assert!(calibration_curve(&few, &CalibrationSettings::default()).is_err());
    }

    #[test]
    fn overconfident_forecasts_fall_below_identity() {
        // Reported 0.9 for events that happen half the time.
        let scored: Vec<_> = (0..400)
            .map(|i| {
                let o = if i % 2 == 0 { Outcome::HomeWin } else { Outcome::AwayWin };
                (o, p(0.9, 0.05, 0.05))
            })
            .collect();
        let table = calibration_curve(&scored, &CalibrationSettings::default()).unwrap();
        let top = table.bins.last().unwrap();
        assert!((top.assigned - 0.9).abs() < 1e-12);
        assert!((top.observed - 0.5).abs() < 1e-12);
        assert!(!top.within_band);
        let near = table
            .smoothed
            .iter()
            .min_by(|a, b| (a.p - 0.9).abs().total_cmp(&(b.p - 0.9).abs()))
            .unwrap();
        assert!(near.observed < near.assigned && !near.within_band);
    }
}
