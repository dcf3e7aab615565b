//! The forecasting models behind the evaluation harness.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::data::{venue_counts_in, Fixture, Prediction, Role, TeamId, SIMPLEX_TOL};
use crate::davidson::{bt_fit, bt_outcome_probs, write_bt_params};
use crate::dirichlet::{cv_select, mn_dir1_predict, mn_dir2_predict, DirichletParams, GridSpec};
use crate::error::{Error, Result};
use crate::eval::{Forecast, MatchdayContext, Predictor};
use crate::optim::OptimizerSettings;
use crate::poisson::{
    poisson_fit, predict_fixture, select_training, write_strengths, TrainingWindow, DEFAULT_TAIL_TOL,
};

/// Largest deviation of `p1 + p2 + p3` from 1 that external files may have;
/// such rows are renormalized.
pub const EXTERNAL_SUM_TOL: f64 = 0.05;

/// The uniform forecast.
#[derive(Clone, Copy, Debug, Default)]
pub struct Trivial;

impl Predictor for Trivial {
    fn name(&self) -> &str {
        "trivial"
    }

    fn predict(&self, ctx: &MatchdayContext<'_>) -> Result<Forecast> {
        Ok(Forecast {
            predictions: ctx
                .fixtures()
                .iter()
                .map(|f| (f.clone(), Prediction::UNIFORM))
                .collect(),
            ..Forecast::default()
        })
    }
}

fn current_counts<'a>(ctx: &MatchdayContext<'a>, team: &TeamId, role: Role) -> crate::data::CountVector {
    venue_counts_in(ctx.current_season(), team, role)
}

/// Equal-weight pool of the home team's home record and the away team's
/// away record under a uniform prior.
#[derive(Clone, Copy, Debug)]
pub struct MnDir1 {
    pub prior: DirichletParams,
}

impl Default for MnDir1 {
    fn default() -> Self {
        Self {
            prior: DirichletParams::uniform(),
        }
    }
}

impl Predictor for MnDir1 {
    fn name(&self) -> &str {
        "mn-dir1"
    }

    fn predict(&self, ctx: &MatchdayContext<'_>) -> Result<Forecast> {
        let predictions = ctx
            .fixtures()
            .iter()
            .map(|f| {
                let h = current_counts(ctx, &f.home, Role::Home);
                let a = current_counts(ctx, &f.away, Role::Away);
                (f.clone(), mn_dir1_predict(h, a, &self.prior))
            })
            .collect();
        Ok(Forecast {
            predictions,
            ..Forecast::default()
        })
    }
}

/// Symmetric prior and pooling weight chosen by first-half Brier score.
#[derive(Clone, Debug, Default)]
pub struct MnDir2 {
    pub grid: GridSpec,
}

impl Predictor for MnDir2 {
    fn name(&self) -> &str {
        "mn-dir2"
    }

    fn predict(&self, ctx: &MatchdayContext<'_>) -> Result<Forecast> {
        let first_half: Vec<_> = ctx
            .current_season_outcomes()
            .into_iter()
            .filter(|(m, _)| m.matchday() <= ctx.first_half_end())
            .collect();
        let selection = cv_select(&first_half, &self.grid)?;
        let cfg = selection.config;
        let predictions = ctx
            .fixtures()
            .iter()
            .map(|f| {
                let h = current_counts(ctx, &f.home, Role::Home);
                let a = current_counts(ctx, &f.away, Role::Away);
                (f.clone(), mn_dir2_predict(h, a, &cfg))
            })
            .collect();
        let details = BTreeMap::from([
            ("alpha".to_string(), cfg.alpha()),
            ("w".to_string(), cfg.weights().home()),
            ("cv_brier_total".to_string(), selection.brier_total),
        ]);
        Ok(Forecast {
            predictions,
            details,
            ..Forecast::default()
        })
    }
}

/// Davidson model refitted on every earlier match of the current season.
#[derive(Clone, Copy, Debug, Default)]
pub struct Davidson {
    pub settings: OptimizerSettings,
}

impl Predictor for Davidson {
    fn name(&self) -> &str {
        "bt"
    }

    fn predict(&self, ctx: &MatchdayContext<'_>) -> Result<Forecast> {
        let fit = bt_fit(&ctx.current_season_outcomes(), &self.settings)?;
        let mut notes = Vec::new();
        if !fit.converged {
            notes.push(format!(
                "fit stopped after {} iterations with gradient norm {:e}",
                fit.iterations, fit.gradient_norm
            ));
        }
        for flag in &fit.boundary {
            notes.push(format!("boundary: {flag:?}"));
        }
        let mut predictions = BTreeMap::new();
        for f in ctx.fixtures() {
            match bt_outcome_probs(&fit.params, &f.home, &f.away) {
                Ok(p) => {
                    predictions.insert(f.clone(), p);
                }
                Err(e) => notes.push(format!("{f}: {e}")),
            }
        }
        let details = BTreeMap::from([
            ("gamma".to_string(), fit.params.gamma()),
            ("nu".to_string(), fit.params.nu()),
            ("log_likelihood".to_string(), fit.log_likelihood),
            ("iterations".to_string(), fit.iterations as f64),
            ("converged".to_string(), f64::from(u8::from(fit.converged))),
        ]);
        Ok(Forecast {
            predictions,
            details,
            notes,
            fitted_csv: Some(write_bt_params(&fit.params)),
        })
    }
}

/// Attack/defence goals model refitted every matchday.
#[derive(Clone, Debug)]
pub struct PoissonModel {
    pub name: String,
    pub correlated: bool,
    pub window: TrainingWindow,
    pub tail_tol: f64,
    pub settings: OptimizerSettings,
}

impl PoissonModel {
    /// Independent scores fitted to the current season only.
    pub fn lee() -> Self {
        Self {
            name: "poisson-lee".into(),
            correlated: false,
            window: TrainingWindow::Season,
            tail_tol: DEFAULT_TAIL_TOL,
            settings: OptimizerSettings::default(),
        }
    }

    /// Correlated scores fitted to the last 38 rounds, possibly reaching into
    /// the previous season.
    pub fn bivariate() -> Self {
        Self {
            name: "poisson-biv".into(),
            correlated: true,
            window: TrainingWindow::LastNRounds(38),
            tail_tol: DEFAULT_TAIL_TOL,
            settings: OptimizerSettings::default(),
        }
    }
}

impl Predictor for PoissonModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn predict(&self, ctx: &MatchdayContext<'_>) -> Result<Forecast> {
        let training = select_training(ctx.history(), ctx.season(), self.window);
        let fit = poisson_fit(training.iter().copied(), self.correlated, &self.settings)?;
        let mut notes = Vec::new();
        if !fit.converged {
            notes.push(format!(
                "fit stopped after {} iterations with gradient norm {:e}",
                fit.iterations, fit.gradient_norm
            ));
        }
        for flag in &fit.boundary {
            notes.push(format!("boundary: {flag:?}"));
        }
        let mut predictions = BTreeMap::new();
        for f in ctx.fixtures() {
            match predict_fixture(&fit.strengths, &f.home, &f.away, self.tail_tol) {
                Ok(p) => {
                    predictions.insert(f.clone(), p);
                }
                Err(e) => notes.push(format!("{f}: {e}")),
            }
        }
        let s = &fit.strengths;
        let details = BTreeMap::from([
            ("mu".to_string(), s.mu),
            ("gamma".to_string(), s.gamma_home),
            ("lambda3".to_string(), s.lambda3),
            ("log_likelihood".to_string(), fit.log_likelihood),
            ("training_matches".to_string(), fit.n_matches as f64),
            ("converged".to_string(), f64::from(u8::from(fit.converged))),
        ]);
        Ok(Forecast {
            predictions,
            details,
            notes,
            fitted_csv: Some(write_strengths(&fit.strengths)),
        })
    }
}

#[derive(Debug, Deserialize)]
struct ExternalRow {
    season: i32,
    matchday: u32,
    home: String,
    away: String,
    p1: f64,
    p2: f64,
    p3: f64,
}

/// Published forecasts read from a `season,matchday,home,away,p1,p2,p3` file.
#[derive(Clone, Debug)]
pub struct External {
    name: String,
    table: BTreeMap<Fixture, Prediction>,
    renormalized: usize,
}

impl External {
    pub fn from_csv(name: impl Into<String>, csv_text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(csv_text.as_bytes());
        let expected = ["season", "matchday", "home", "away", "p1", "p2", "p3"];
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if header != expected {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{}`", expected.join(",")),
            });
        }
        let mut table = BTreeMap::new();
        let mut renormalized = 0;
        for row in reader.deserialize::<ExternalRow>() {
            let row = row.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let fixture = Fixture {
                season: row.season,
                matchday: row.matchday,
                home: TeamId::new(&row.home)?,
                away: TeamId::new(&row.away)?,
            };
            let sum = row.p1 + row.p2 + row.p3;
            let probs = [row.p1, row.p2, row.p3];
            if probs.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > EXTERNAL_SUM_TOL {
                return Err(Error::InvalidParameter(format!(
                    "{fixture}: probabilities ({}, {}, {}) are not a distribution",
                    row.p1,
                    row.p2,
                    row.p3
                )));
            }
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                renormalized += 1;
            }
            let p = Prediction::from_weights(probs)?;
            if table.insert(fixture.clone(), p).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "{fixture} appears twice in the prediction file"
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            table,
            renormalized,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv(format!("external:{}", path.display()), &text)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Rows whose probabilities had to be rescaled to sum to one.
    pub fn renormalized(&self) -> usize {
        self.renormalized
    }
}

impl Predictor for External {
    fn name(&self) -> &str {
        &self.name
    }

    fn predict(&self, ctx: &MatchdayContext<'_>) -> Result<Forecast> {
        let mut forecast = Forecast::default();
        for f in ctx.fixtures() {
            match self.table.get(f) {
                Some(p) => {
                    forecast.predictions.insert(f.clone(), *p);
                }
                None => forecast.notes.push(format!("{f}: no published prediction")),
            }
        }
        Ok(forecast)
    }
}

/// A model named on the command line or in a config file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    Trivial,
    MnDir1,
    MnDir2,
    Bt,
    PoissonLee,
    PoissonBiv,
    External(PathBuf),
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "trivial" => Self::Trivial,
            "mn-dir1" => Self::MnDir1,
            "mn-dir2" => Self::MnDir2,
            "bt" => Self::Bt,
            "poisson-lee" => Self::PoissonLee,
            "poisson-biv" => Self::PoissonBiv,
            _ => match s.strip_prefix("external:") {
                Some(path) if !path.is_empty() => Self::External(PathBuf::from(path)),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown model `{s}` (expected trivial, mn-dir1, mn-dir2, bt, poisson-lee, poisson-biv or external:<path>)"
                    )))
                }
            },
        })
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Trivial => f.write_str("trivial"),
            Self::MnDir1 => f.write_str("mn-dir1"),
            Self::MnDir2 => f.write_str("mn-dir2"),
            Self::Bt => f.write_str("bt"),
            Self::PoissonLee => f.write_str("poisson-lee"),
            Self::PoissonBiv => f.write_str("poisson-biv"),
            Self::External(p) => write!(f, "external:{}", p.display()),
        }
    }
}

/// Per-model settings a run can override.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSettings {
    pub bt: OptimizerSettings,
    pub poisson: OptimizerSettings,
    pub tail_tol: f64,
    /// Whether `poisson-biv` keeps its shared component.
    pub biv_correlated: bool,
    pub biv_window: TrainingWindow,
    pub grid: GridSpec,
}

impl Default for ModelSettings {
    fn default() -> Self {
        Self {
            bt: OptimizerSettings::default(),
            poisson: OptimizerSettings::default(),
            tail_tol: DEFAULT_TAIL_TOL,
            biv_correlated: true,
            biv_window: TrainingWindow::LastNRounds(38),
            grid: GridSpec::default(),
        }
    }
}

impl ModelSpec {
    pub fn build(&self, settings: &ModelSettings) -> Result<Box<dyn Predictor>> {
        Ok(match self {
            Self::Trivial => Box::new(Trivial),
            Self::MnDir1 => Box::new(MnDir1::default()),
            Self::MnDir2 => Box::new(MnDir2 {
                grid: settings.grid.clone(),
            }),
            Self::Bt => Box::new(Davidson {
                settings: settings.bt,
            }),
            Self::PoissonLee => Box::new(PoissonModel {
                tail_tol: settings.tail_tol,
                settings: settings.poisson,
                ..PoissonModel::lee()
            }),
            Self::PoissonBiv => Box::new(PoissonModel {
                correlated: settings.biv_correlated,
                window: settings.biv_window,
                tail_tol: settings.tail_tol,
                settings: settings.poisson,
                ..PoissonModel::bivariate()
            }),
            Self::External(path) => Box::new(External::from_path(path)?),
        })
    }
}
