//! Report files: JSON, flat CSV and a plain-text summary.
//!
//! Output depends only on the evaluation and the echoed configuration, so
//! identical runs produce identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::Serialize;

use crate::data::Fixture;
use crate::eval::{
    Aggregates, CombinedGof, Evaluation, Flags, MatchdayDetails, MatchdayForecast, ModelReport,
    Pairwise, ScoredMatch, SeasonGof, YearRow,
};
use crate::error::Result;
use crate::scoring::CalibrationTable;

pub const REPORT_CSV_HEADER: [&str; 12] = [
    "model", "season", "matchday", "home", "away", "p1", "p2", "p3", "outcome", "brier", "log",
    "spherical",
];

pub const PREDICTION_CSV_HEADER: [&str; 9] = [
    "model", "season", "matchday", "home", "away", "p1", "p2", "p3", "note",
];

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

#[derive(Serialize)]
struct ModelJson<'a> {
    per_match: &'a [ScoredMatch],
    aggregates: &'a Aggregates,
    calibration: &'a Option<CalibrationTable>,
    gof: &'a [SeasonGof],
    gof_combined: &'a Option<CombinedGof>,
    per_year: &'a [YearRow],
    /// Parameters of the last fit of each season, rounded to 6 decimals.
    season_params: BTreeMap<i32, BTreeMap<String, f64>>,
    params: &'a [MatchdayDetails],
    flags: &'a Flags,
    flagged_count: usize,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    config: &'a BTreeMap<String, String>,
    seasons: &'a [i32],
    models: IndexMap<&'a str, ModelJson<'a>>,
    pairwise: &'a [Pairwise],
}

fn season_params(report: &ModelReport) -> BTreeMap<i32, BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for d in &report.params {
        out.insert(
            d.season,
            d.details.iter().map(|(k, v)| (k.clone(), round6(*v))).collect(),
        );
    }
    out
}

/// `model → {per_match, aggregates, calibration, gof, ...}` plus the echoed
/// configuration and pairwise comparisons.
pub fn report_json(ev: &Evaluation, config: &BTreeMap<String, String>) -> Result<String> {
    let models = ev
        .models
        .iter()
        .map(|m| {
            (
                m.model.as_str(),
                ModelJson {
                    per_match: &m.per_match,
                    aggregates: &m.aggregates,
                    calibration: &m.calibration,
                    gof: &m.gof,
                    gof_combined: &m.gof_combined,
                    per_year: &m.per_year,
                    season_params: season_params(m),
                    params: &m.params,
                    flags: &m.flags,
                    flagged_count: m.flags.count(),
                },
            )
        })
        .collect();
    let doc = ReportJson {
        config,
        seasons: &ev.seasons,
        models,
        pairwise: &ev.pairwise,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

fn into_string(writer: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = writer
        .into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// One row per scored match and model.
pub fn report_csv(ev: &Evaluation) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_CSV_HEADER)?;
    for m in &ev.models {
        for s in &m.per_match {
            let [p1, p2, p3] = s.prediction.probs();
            w.write_record([
                m.model.clone(),
                s.fixture.season.to_string(),
                s.fixture.matchday.to_string(),
                s.fixture.home.name().to_string(),
                s.fixture.away.name().to_string(),
                p1.to_string(),
                p2.to_string(),
                p3.to_string(),
                s.outcome.code().to_string(),
                s.brier.to_string(),
                s.log.to_string(),
                s.spherical.to_string(),
            ])?;
        }
    }
    into_string(w)
}

fn opt(x: Option<f64>, digits: usize) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.digits$}"),
        _ => "-".into(),
    }
}

/// Plain-text tables: mean scores with standard errors, totals, error
/// proportion and goodness of fit per model, then one block per season.
pub fn summary_table(ev: &Evaluation) -> String {
    let width = ev
        .models
        .iter()
        .map(|m| m.model.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut out = String::new();
    let _ = writeln!(out, "Mean scores (standard error)");
    let _ = writeln!(
        out,
        "{:width$}  {:>5}  {:>17}  {:>17}  {:>17}  {:>6}  {:>9}  {:>4}  {:>7}  {:>5}",
        "model", "n", "brier", "log", "spherical", "errors", "chi2", "df", "p-value", "flags"
    );
    for m in &ev.models {
        let a = &m.aggregates;
        let cell = |s: &crate::scoring::ScoreSummary| {
            if s.n == 0 {
                "-".to_string()
            } else {
                format!("{:.4} ({:.4})", s.mean, s.se)
            }
        };
        let _ = writeln!(
            out,
            "{:width$}  {:>5}  {:>17}  {:>17}  {:>17}  {:>6}  {:>9}  {:>4}  {:>7}  {:>5}",
            m.model,
            a.brier.n,
            cell(&a.brier),
            cell(&a.log),
            cell(&a.spherical),
            opt(a.errors.map(|e| e.value), 3),
            opt(m.gof_combined.map(|g| g.statistic), 2),
            m.gof_combined.map_or("-".into(), |g| g.df.to_string()),
            opt(m.gof_combined.map(|g| g.p_value), 4),
            m.flags.count(),
        );
    }

    let _ = writeln!(out, "\nTotal scores (standard error)");
    let _ = writeln!(
        out,
        "{:width$}  {:>19}  {:>19}  {:>19}",
        "model", "brier", "log", "spherical"
    );
    for m in &ev.models {
        let a = &m.aggregates;
        let cell = |s: &crate::scoring::ScoreSummary| format!("{:.2} ({:.2})", s.total, s.total_se);
        let _ = writeln!(
            out,
            "{:width$}  {:>19}  {:>19}  {:>19}",
            m.model,
            cell(&a.brier),
            cell(&a.log),
            cell(&a.spherical)
        );
    }

    let _ = writeln!(out, "\nPer season");
    let _ = writeln!(
        out,
        "{:>6}  {:width$}  {:>5}  {:>7}  {:>7}  {:>9}  {:>6}  {:>9}  {:>4}  {:>7}",
        "season", "model", "n", "brier", "log", "spherical", "errors", "chi2", "df", "p-value"
    );
    for &year in &ev.seasons {
        for m in &ev.models {
            if let Some(r) = m.per_year.iter().find(|r| r.season == year) {
                let _ = writeln!(
                    out,
                    "{:>6}  {:width$}  {:>5}  {:>7}  {:>7}  {:>9}  {:>6}  {:>9}  {:>4}  {:>7}",
                    year,
                    m.model,
                    r.n,
                    opt(Some(r.brier), 4),
                    opt(Some(r.log), 4),
                    opt(Some(r.spherical), 4),
                    opt(r.errors, 3),
                    opt(r.gof_statistic, 2),
                    r.gof_df.map_or("-".into(), |d| d.to_string()),
                    opt(r.gof_p_value, 4),
                );
            }
        }
    }
    out
}

/// One row per fixture and model; models that failed or skipped a fixture
/// get empty probabilities and a note.
pub fn predictions_csv(fixtures: &[Fixture], forecasts: &[MatchdayForecast]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PREDICTION_CSV_HEADER)?;
    for fc in forecasts {
        for f in fixtures {
            let base = [
                fc.model.clone(),
                f.season.to_string(),
                f.matchday.to_string(),
                f.home.name().to_string(),
                f.away.name().to_string(),
            ];
            let tail = match &fc.result {
                Ok(forecast) => match forecast.predictions.get(f) {
                    Some(p) => {
                        let [p1, p2, p3] = p.probs();
                        [p1.to_string(), p2.to_string(), p3.to_string(), String::new()]
                    }
                    None => [String::new(), String::new(), String::new(), "absent".into()],
                },
                Err(e) => [String::new(), String::new(), String::new(), format!("error: {e}")],
            };
            w.write_record(base.iter().chain(tail.iter()))?;
        }
    }
    into_string(w)
}
