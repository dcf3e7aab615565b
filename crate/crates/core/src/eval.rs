//! Rolling second-half evaluation.
//!
//! For every season, each second-half matchday is predicted from a
//! [`MatchdayContext`] that only exposes results of earlier matchdays, then
//! scored against the realized outcomes.
//!
//! The fixtures of the target matchday are handed out as [`Fixture`]s, which
//! carry no result:
//!
//! ```compile_fail
//! use matchcast_core::eval::MatchdayContext;
//!
//! fn peek(ctx: &MatchdayContext<'_>) -> Option<u32> {
//!     ctx.fixtures()[0].home_goals()
//! }
//! ```
//!
//! and the history slice ends before the target matchday:
//!
//! ```
//! use matchcast_core::data::{MatchRecord, Season, SeasonCheck};
//! use matchcast_core::eval::Timeline;
//!
//! let matches = vec![
//!     MatchRecord::played(2014, 1, "A", "B", (1, 0)).unwrap(),
//!     MatchRecord::played(2014, 2, "B", "A", (2, 2)).unwrap(),
//! ];
//! let season = Season::new(2014, matches, SeasonCheck::Lenient).unwrap();
//! let seasons = [season];
//! let timeline = Timeline::new(&seasons);
//! let ctx = timeline.context(&seasons[0], 2).unwrap();
//! assert!(ctx.history().iter().all(|m| m.matchday() < 2));
//! assert_eq!(ctx.fixtures().len(), 1);
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::data::{Fixture, MatchRecord, Outcome, Prediction, Season, TeamId};
use crate::error::{Error, Result};
use crate::scoring::{
    brier, calibration_curve, chi_square_gof, chi_square_sf, cond_home_win_given_no_draw, entropy,
    log_score, proportion_of_errors, spherical, top_choice, CalibrationSettings, CalibrationTable,
    ErrorProportion, GofMatch, GofResult, Quantiles, ScoreSummary,
};

/// Every played match of the supplied seasons, in (season, matchday) order.
#[derive(Clone, Debug)]
pub struct Timeline {
    played: Vec<MatchRecord>,
}

impl Timeline {
    pub fn new(seasons: &[Season]) -> Self {
        let mut played: Vec<MatchRecord> = seasons
            .iter()
            .flat_map(|s| s.played().cloned())
            .collect();
        played.sort_by_key(|m| (m.season(), m.matchday()));
        Self { played }
    }

    /// The information available just before `matchday` of `season`.
    /// Fails if an earlier matchday of that season has no result.
    pub fn context<'a>(&'a self, season: &'a Season, matchday: u32) -> Result<MatchdayContext<'a>> {
        if let Some(m) = season
            .matches()
            .iter()
            .find(|m| m.matchday() < matchday && !m.is_played())
        {
            return Err(Error::NoResult(m.fixture().clone()));
        }
        let fixtures: Vec<Fixture> = season
            .matches_on(matchday)
            .map(|m| m.fixture().clone())
            .collect();
        if fixtures.is_empty() {
            return Err(Error::InsufficientData(format!(
                "season {} has no fixtures on matchday {matchday}",
                season.year()
            )));
        }
        let year = season.year();
        let end = self
            .played
            .partition_point(|m| (m.season(), m.matchday()) < (year, matchday));
        let history = &self.played[..end];
        let start = history.partition_point(|m| m.season() < year);
        Ok(MatchdayContext {
            season: year,
            matchday,
            first_half_end: season.first_half_end(),
            teams: season.teams(),
            history,
            current_start: start,
            fixtures,
        })
    }
}

/// What a predictor may look at when forecasting one matchday.
#[derive(Clone, Debug)]
pub struct MatchdayContext<'a> {
    season: i32,
    matchday: u32,
    first_half_end: u32,
    teams: &'a BTreeSet<TeamId>,
    history: &'a [MatchRecord],
    current_start: usize,
    fixtures: Vec<Fixture>,
}

impl<'a> MatchdayContext<'a> {
    pub fn season(&self) -> i32 {
        self.season
    }

    pub fn matchday(&self) -> u32 {
        self.matchday
    }

    /// Last matchday of the current season's first half.
    pub fn first_half_end(&self) -> u32 {
        self.first_half_end
    }

    pub fn teams(&self) -> &'a BTreeSet<TeamId> {
        self.teams
    }

    /// Played matches of all supplied seasons before the target matchday,
    /// oldest first.
    pub fn history(&self) -> &'a [MatchRecord] {
        self.history
    }

    /// Played matches of the current season before the target matchday.
    pub fn current_season(&self) -> &'a [MatchRecord] {
        &self.history[self.current_start..]
    }

    /// Current-season results paired with their outcomes.
    pub fn current_season_outcomes(&self) -> Vec<(MatchRecord, Outcome)> {
        self.current_season()
            .iter()
            .filter_map(|m| m.outcome().map(|o| (m.clone(), o)))
            .collect()
    }

    /// Fixtures to predict.
    pub fn fixtures(&self) -> &[Fixture] {
        &self.fixtures
    }
}

/// Predictions for one matchday plus model details worth reporting.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Forecast {
    pub predictions: BTreeMap<Fixture, Prediction>,
    /// Fitted parameters and diagnostics, e.g. the selected pooling weight.
    pub details: BTreeMap<String, f64>,
    /// Anything unusual about this forecast (non-convergence, boundary fits).
    pub notes: Vec<String>,
    /// Fitted parameters as CSV, for models that have an export format.
    pub fitted_csv: Option<String>,
}

pub trait Predictor: Send + Sync {
    fn name(&self) -> &str;

    /// Forecasts the context's fixtures. Fixtures the model cannot cover are
    /// left out and reported as absent.
    fn predict(&self, ctx: &MatchdayContext<'_>) -> Result<Forecast>;
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoredMatch {
    #[serde(flatten)]
    pub fixture: Fixture,
    pub outcome: Outcome,
    pub prediction: Prediction,
    pub brier: f64,
    /// `+inf` (serialized as `null`) when the realized outcome had probability 0.
    pub log: f64,
    pub spherical: f64,
    pub entropy: f64,
    pub top_choice_error: bool,
    pub argmax_tied: bool,
}

impl ScoredMatch {
    pub fn new(fixture: Fixture, outcome: Outcome, prediction: Prediction) -> Self {
        let top = top_choice(outcome, &prediction);
        Self {
            fixture,
            outcome,
            brier: brier(outcome, &prediction),
            log: log_score(outcome, &prediction),
            spherical: spherical(outcome, &prediction),
            entropy: entropy(&prediction),
            top_choice_error: top.error,
            argmax_tied: top.tied,
            prediction,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregates {
    pub brier: ScoreSummary,
    pub log: ScoreSummary,
    pub spherical: ScoreSummary,
    pub errors: Option<ErrorProportion>,
    pub entropy: Option<Quantiles>,
    pub cond_home_win: Option<Quantiles>,
}

impl Aggregates {
    pub fn of(scored: &[&ScoredMatch]) -> Self {
        let pairs: Vec<(Outcome, Prediction)> =
            scored.iter().map(|s| (s.outcome, s.prediction)).collect();
        Self {
            brier: ScoreSummary::from_scores(scored.iter().map(|s| s.brier)),
            log: ScoreSummary::from_scores(scored.iter().map(|s| s.log)),
            spherical: ScoreSummary::from_scores(scored.iter().map(|s| s.spherical)),
            errors: proportion_of_errors(&pairs).ok(),
            entropy: Quantiles::of(scored.iter().map(|s| s.entropy)),
            cond_home_win: Quantiles::of(
                scored
                    .iter()
                    .filter_map(|s| cond_home_win_given_no_draw(&s.prediction)),
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YearRow {
    pub season: i32,
    pub n: usize,
    pub brier: f64,
    pub log: f64,
    pub spherical: f64,
    pub errors: Option<f64>,
    pub gof_statistic: Option<f64>,
    pub gof_df: Option<u32>,
    pub gof_p_value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeasonGof {
    pub season: i32,
    #[serde(flatten)]
    pub result: GofResult,
}

/// Independent seasons' statistics added up, with their degrees of freedom.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CombinedGof {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchdayDetails {
    pub season: i32,
    pub matchday: u32,
    pub details: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkippedMatchday {
    pub season: i32,
    pub matchday: u32,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Flags {
    pub skipped_matchdays: Vec<SkippedMatchday>,
    pub absent_predictions: Vec<Fixture>,
    pub infinite_log_scores: usize,
    pub argmax_ties: usize,
    pub notes: Vec<String>,
}

impl Flags {
    /// Problems that left matches unscored or scores non-finite.
    pub fn count(&self) -> usize {
        self.skipped_matchdays.len() + self.absent_predictions.len() + self.infinite_log_scores
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelReport {
    pub model: String,
    pub per_match: Vec<ScoredMatch>,
    pub aggregates: Aggregates,
    pub calibration: Option<CalibrationTable>,
    pub gof: Vec<SeasonGof>,
    pub gof_combined: Option<CombinedGof>,
    pub per_year: Vec<YearRow>,
    pub params: Vec<MatchdayDetails>,
    pub flags: Flags,
}

/// Per-match score differences between two models over the fixtures both
/// predicted (first minus second).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pairwise {
    pub first: String,
    pub second: String,
    pub n: usize,
    pub brier_diff: ScoreSummary,
    pub log_diff: ScoreSummary,
    pub spherical_diff: ScoreSummary,
    /// Matches where the first model's Brier score is strictly lower.
    pub first_better: usize,
    pub second_better: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub seasons: Vec<i32>,
    pub models: Vec<ModelReport>,
    pub pairwise: Vec<Pairwise>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvalSettings {
    pub calibration: CalibrationSettings,
}

/// Runs every predictor over the second half of every season.
pub fn evaluate(
    predictors: &[Box<dyn Predictor>],
    seasons: &[Season],
    settings: &EvalSettings,
) -> Result<Evaluation> {
    if predictors.is_empty() {
        return Err(Error::InvalidParameter("no models to evaluate".into()));
    }
    if seasons.is_empty() {
        return Err(Error::InsufficientData("no seasons to evaluate".into()));
    }
    for season in seasons {
        let first_half_end = season.first_half_end();
        if let Some(m) = season
            .matches()
            .iter()
            .find(|m| m.matchday() > first_half_end && !m.is_played())
        {
            return Err(Error::NoResult(m.fixture().clone()));
        }
    }

    let timeline = Timeline::new(seasons);
    let models: Vec<ModelReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = predictors
            .iter()
            .map(|p| {
                let timeline = &timeline;
                scope.spawn(move || run_model(p.as_ref(), timeline, seasons, settings))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("model evaluation panicked"))
            .collect()
    });

    let mut pairwise = Vec::new();
    for i in 0..models.len() {
        for j in i + 1..models.len() {
            pairwise.push(compare(&models[i], &models[j]));
        }
    }
    Ok(Evaluation {
        seasons: seasons.iter().map(Season::year).collect(),
        models,
        pairwise,
    })
}

fn run_model(
    predictor: &dyn Predictor,
    timeline: &Timeline,
    seasons: &[Season],
    settings: &EvalSettings,
) -> ModelReport {
    let mut per_match = Vec::new();
    let mut params = Vec::new();
    let mut flags = Flags::default();

    for season in seasons {
        for matchday in season.second_half_matchdays() {
            let skip = |reason: String| SkippedMatchday {
                season: season.year(),
                matchday,
                reason,
            };
            let ctx = match timeline.context(season, matchday) {
                Ok(ctx) => ctx,
                Err(Error::InsufficientData(_)) => continue,
                Err(e) => {
                    flags.skipped_matchdays.push(skip(e.to_string()));
                    continue;
                }
            };
            let forecast = match predictor.predict(&ctx) {
                Ok(f) => f,
                Err(e) => {
                    flags.skipped_matchdays.push(skip(e.to_string()));
                    continue;
                }
            };
            for note in forecast.notes {
                flags
                    .notes
                    .push(format!("{} matchday {matchday}: {note}", season.year()));
            }
            if !forecast.details.is_empty() {
                params.push(MatchdayDetails {
                    season: season.year(),
                    matchday,
                    details: forecast.details,
                });
            }
            for m in season.matches_on(matchday) {
                let outcome = m.outcome().expect("second half checked as played");
                match forecast.predictions.get(m.fixture()) {
                    Some(p) => per_match.push(ScoredMatch::new(m.fixture().clone(), outcome, *p)),
                    None => flags.absent_predictions.push(m.fixture().clone()),
                }
            }
        }
    }

    flags.infinite_log_scores = per_match.iter().filter(|s| !s.log.is_finite()).count();
    flags.argmax_ties = per_match.iter().filter(|s| s.argmax_tied).count();

    let all: Vec<&ScoredMatch> = per_match.iter().collect();
    let aggregates = Aggregates::of(&all);

    let pairs: Vec<(Outcome, Prediction)> =
        per_match.iter().map(|s| (s.outcome, s.prediction)).collect();
    let calibration = match calibration_curve(&pairs, &settings.calibration) {
        Ok(table) => Some(table),
        Err(e) => {
            flags.notes.push(format!("calibration: {e}"));
            None
        }
    };

    let mut gof = Vec::new();
    let mut per_year = Vec::new();
    for season in seasons {
        let year = season.year();
        let scored: Vec<&ScoredMatch> = per_match
            .iter()
            .filter(|s| s.fixture.season == year)
            .collect();
        let gof_input: Vec<GofMatch> = scored
            .iter()
            .map(|s| GofMatch {
                home: s.fixture.home.clone(),
                away: s.fixture.away.clone(),
                p_home_win: s.prediction.home_win(),
                p_away_win: s.prediction.away_win(),
                outcome: s.outcome,
            })
            .collect();
        let season_gof = match chi_square_gof(&gof_input) {
            Ok(r) => {
                for e in &r.excluded {
                    flags.notes.push(format!("goodness of fit {year}: {e}"));
                }
                Some(r)
            }
            Err(e) => {
                flags.notes.push(format!("goodness of fit {year}: {e}"));
                None
            }
        };
        let agg = Aggregates::of(&scored);
        per_year.push(YearRow {
            season: year,
            n: scored.len(),
            brier: agg.brier.mean,
            log: agg.log.mean,
            spherical: agg.spherical.mean,
            errors: agg.errors.map(|e| e.value),
            gof_statistic: season_gof.as_ref().map(|g| g.statistic),
            gof_df: season_gof.as_ref().map(|g| g.df),
            gof_p_value: season_gof.as_ref().map(|g| g.p_value),
        });
        if let Some(result) = season_gof {
            gof.push(SeasonGof { season: year, result });
        }
    }
    let gof_combined = (!gof.is_empty()).then(|| {
        let statistic = gof.iter().map(|g| g.result.statistic).sum();
        let df = gof.iter().map(|g| g.result.df).sum();
        CombinedGof {
            statistic,
            df,
            p_value: chi_square_sf(statistic, df),
        }
    });

    ModelReport {
        model: predictor.name().to_string(),
        per_match,
        aggregates,
        calibration,
        gof,
        gof_combined,
        per_year,
        params,
        flags,
    }
}

fn compare(a: &ModelReport, b: &ModelReport) -> Pairwise {
    let theirs: BTreeMap<&Fixture, &ScoredMatch> =
        b.per_match.iter().map(|s| (&s.fixture, s)).collect();
    let common: Vec<(&ScoredMatch, &ScoredMatch)> = a
        .per_match
        .iter()
        .filter_map(|s| theirs.get(&s.fixture).map(|t| (s, *t)))
        .collect();
    Pairwise {
        first: a.model.clone(),
        second: b.model.clone(),
        n: common.len(),
        brier_diff: ScoreSummary::from_scores(common.iter().map(|(x, y)| x.brier - y.brier)),
        log_diff: ScoreSummary::from_scores(common.iter().map(|(x, y)| x.log - y.log)),
        spherical_diff: ScoreSummary::from_scores(
            common.iter().map(|(x, y)| x.spherical - y.spherical),
        ),
        first_better: common.iter().filter(|(x, y)| x.brier < y.brier).count(),
        second_better: common.iter().filter(|(x, y)| x.brier > y.brier).count(),
    }
}

/// One model's forecast for a single matchday, as produced by `predict`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchdayForecast {
    pub model: String,
    pub result: std::result::Result<Forecast, String>,
}

/// Forecasts `matchday` of `season` with every predictor. A failing model
/// does not stop the others.
pub fn predict_matchday(
    predictors: &[Box<dyn Predictor>],
    seasons: &[Season],
    season: i32,
    matchday: u32,
) -> Result<(Vec<Fixture>, Vec<MatchdayForecast>)> {
    let target = seasons
        .iter()
        .find(|s| s.year() == season)
        .ok_or_else(|| Error::InsufficientData(format!("no season {season} in the data")))?;
    let timeline = Timeline::new(seasons);
    let ctx = timeline.context(target, matchday)?;
    let forecasts = predictors
        .iter()
        .map(|p| MatchdayForecast {
            model: p.name().to_string(),
            result: p.predict(&ctx).map_err(|e| e.to_string()),
        })
        .collect();
    Ok((ctx.fixtures().to_vec(), forecasts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SeasonCheck;

    struct Constant(&'static str, Prediction);

    impl Predictor for Constant {
        fn name(&self) -> &str {
            self.0
        }

        fn predict(&self, ctx: &MatchdayContext<'_>) -> Result<Forecast> {
            Ok(Forecast {
                predictions: ctx.fixtures().iter().map(|f| (f.clone(), self.1)).collect(),
                ..Forecast::default()
            })
        }
    }

    /// Puts all mass on the realized result, learned from outside the
    /// harness.
    struct Oracle(BTreeMap<Fixture, Outcome>);

    impl Predictor for Oracle {
        fn name(&self) -> &str {
            "oracle"
        }

        fn predict(&self, ctx: &MatchdayContext<'_>) -> Result<Forecast> {
            Ok(Forecast {
                predictions: ctx
                    .fixtures()
                    .iter()
                    .map(|f| (f.clone(), Prediction::certain(self.0[f])))
                    .collect(),
                ..Forecast::default()
            })
        }
    }

    struct Failing;

    impl Predictor for Failing {
        fn name(&self) -> &str {
            "failing"
        }

        fn predict(&self, ctx: &MatchdayContext<'_>) -> Result<Forecast> {
            if ctx.matchday().is_multiple_of(2) {
                Err(Error::InsufficientData("even matchday".into()))
            } else {
                Ok(Forecast::default())
            }
        }
    }

    fn four_team_season(year: i32) -> Season {
        let pairs = [
            ("A", "B"), ("C", "D"),
            ("A", "C"), ("B", "D"),
            ("A", "D"), ("B", "C"),
            ("B", "A"), ("D", "C"),
            ("C", "A"), ("D", "B"),
            ("D", "A"), ("C", "B"),
        ];
        let scores = [(1, 0), (0, 0), (2, 1), (0, 3), (1, 1), (2, 0), (0, 1), (1, 2), (3, 3), (1, 0), (0, 2), (2, 2)];
        let matches = pairs
            .iter()
            .zip(scores)
            .enumerate()
            .map(|(i, ((h, a), s))| MatchRecord::played(year, 1 + i as u32 / 2, h, a, s).unwrap())
            .collect();
        Season::new(year, matches, SeasonCheck::Lenient).unwrap()
    }

    #[test]
    fn context_hides_target_and_later_matchdays() {
        let seasons = [four_team_season(2013), four_team_season(2014)];
        let timeline = Timeline::new(&seasons);
        let ctx = timeline.context(&seasons[1], 4).unwrap();
        assert_eq!(ctx.history().len(), 12 + 6);
        assert!(ctx
            .history()
            .iter()
            .all(|m| (m.season(), m.matchday()) < (2014, 4)));
        assert_eq!(ctx.current_season().len(), 6);
        assert_eq!(ctx.fixtures().len(), 2);
        assert_eq!(ctx.first_half_end(), 3);
    }

    #[test]
    fn context_requires_earlier_results() {
        let mut matches = four_team_season(2014).matches().to_vec();
        matches[0] = MatchRecord::scheduled(2014, 1, "A", "B").unwrap();
        let season = Season::new(2014, matches, SeasonCheck::Lenient).unwrap();
        let seasons = [season];
        let timeline = Timeline::new(&seasons);
        assert!(matches!(timeline.context(&seasons[0], 4), Err(Error::NoResult(_))));
        assert!(timeline.context(&seasons[0], 1).is_ok());
    }

    #[test]
    fn trivial_scores_are_exact() {
        let seasons = [four_team_season(2014)];
        let preds: Vec<Box<dyn Predictor>> = vec![Box::new(Constant("trivial", Prediction::UNIFORM))];
        let ev = evaluate(&preds, &seasons, &EvalSettings::default()).unwrap();
        let agg = &ev.models[0].aggregates;
        assert_eq!(agg.brier.n, 6);
        assert!((agg.brier.mean - 2.0 / 3.0).abs() < 1e-12);
        assert!((agg.log.mean - 3f64.ln()).abs() < 1e-12);
        assert!((agg.spherical.mean + 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(ev.models[0].flags.argmax_ties, 6);
    }

    #[test]
    fn oracle_reaches_rule_minima() {
        let seasons = [four_team_season(2014)];
        let results = seasons[0]
            .matches()
            .iter()
            .map(|m| (m.fixture().clone(), m.outcome().unwrap()))
            .collect();
        let preds: Vec<Box<dyn Predictor>> = vec![Box::new(Oracle(results))];
        let ev = evaluate(&preds, &seasons, &EvalSettings::default()).unwrap();
        let agg = &ev.models[0].aggregates;
        assert_eq!((agg.brier.mean, agg.log.mean, agg.spherical.mean), (0.0, 0.0, -1.0));
        assert_eq!(agg.errors.unwrap().value, 0.0);
        let r = &ev.models[0];
        assert!((r.aggregates.brier.total - r.per_match.iter().map(|s| s.brier).sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn dominating_model_has_lower_totals() {
        let seasons = [four_team_season(2014)];
        let results: BTreeMap<Fixture, Outcome> = seasons[0]
            .matches()
            .iter()
            .map(|m| (m.fixture().clone(), m.outcome().unwrap()))
            .collect();
        let preds: Vec<Box<dyn Predictor>> = vec![
            Box::new(Constant("trivial", Prediction::UNIFORM)),
            Box::new(Oracle(results)),
        ];
        let ev = evaluate(&preds, &seasons, &EvalSettings::default()).unwrap();
        assert!(ev.models[1].aggregates.brier.total < ev.models[0].aggregates.brier.total);
        let pw = &ev.pairwise[0];
        assert_eq!((pw.n, pw.first_better, pw.second_better), (6, 0, 6));
    }

    #[test]
    fn failures_are_flagged_not_fatal() {
        let seasons = [four_team_season(2014)];
        let preds: Vec<Box<dyn Predictor>> = vec![Box::new(Failing)];
        let ev = evaluate(&preds, &seasons, &EvalSettings::default()).unwrap();
        let flags = &ev.models[0].flags;
        assert_eq!(flags.skipped_matchdays.len(), 2);
        assert_eq!(flags.absent_predictions.len(), 2);
        assert_eq!(flags.count(), 4);
        assert!(ev.models[0].per_match.is_empty());
    }

    #[test]
    fn unplayed_second_half_is_rejected() {
        let mut matches = four_team_season(2014).matches().to_vec();
        matches[11] = MatchRecord::scheduled(2014, 6, "C", "B").unwrap();
        let seasons = [Season::new(2014, matches, SeasonCheck::Lenient).unwrap()];
        let preds: Vec<Box<dyn Predictor>> = vec![Box::new(Constant("trivial", Prediction::UNIFORM))];
        assert!(matches!(
            evaluate(&preds, &seasons, &EvalSettings::default()),
            Err(Error::NoResult(_))
        ));
    }

    #[test]
    fn per_year_rows_follow_seasons() {
        let seasons = [four_team_season(2013), four_team_season(2014)];
        let preds: Vec<Box<dyn Predictor>> = vec![Box::new(Constant("trivial", Prediction::UNIFORM))];
        let ev = evaluate(&preds, &seasons, &EvalSettings::default()).unwrap();
        let years: Vec<i32> = ev.models[0].per_year.iter().map(|r| r.season).collect();
        assert_eq!(years, vec![2013, 2014]);
        assert_eq!(ev.models[0].gof.len(), 2);
        // in the second half A never plays at home and D never away
        assert_eq!(ev.models[0].gof[0].result.df, 6);
        assert_eq!(ev.models[0].gof_combined.unwrap().df, 12);
    }
}
