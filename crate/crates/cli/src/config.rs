//! `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use matchcast_core::dirichlet::GridSpec;
use matchcast_core::poisson::TrainingWindow;
use matchcast_core::predictors::{ModelSettings, ModelSpec};
use matchcast_core::scoring::CalibrationSettings;
use matchcast_core::selftest::DEFAULT_SEED;

pub const DEFAULT_MODELS: &str = "trivial,mn-dir1,mn-dir2,bt,poisson-lee,poisson-biv";

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub matches: Option<PathBuf>,
    pub models: Vec<ModelSpec>,
    pub out: PathBuf,
    pub seed: u64,
    pub strict: bool,
    pub settings: ModelSettings,
    pub calibration: CalibrationSettings,
    grid: GridKnobs,
}

#[derive(Clone, Copy, Debug)]
struct GridKnobs {
    w_points: usize,
    alpha_points: usize,
    alpha_min: f64,
    alpha_max: f64,
}

impl Default for GridKnobs {
    fn default() -> Self {
        Self {
            w_points: 20,
            alpha_points: 20,
            alpha_min: 0.001,
            alpha_max: 20.0,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            matches: None,
            models: parse_models(DEFAULT_MODELS, None).expect("default models parse"),
            out: PathBuf::from("out"),
            seed: DEFAULT_SEED,
            strict: false,
            settings: ModelSettings::default(),
            calibration: CalibrationSettings::default(),
            grid: GridKnobs::default(),
        }
    }
}

fn parse_models(list: &str, base: Option<&Path>) -> Result<Vec<ModelSpec>> {
    let mut models = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let spec: ModelSpec = item.parse()?;
        let spec = match (spec, base) {
            (ModelSpec::External(p), Some(dir)) if p.is_relative() => ModelSpec::External(dir.join(p)),
            (spec, _) => spec,
        };
        if models.contains(&spec) {
            bail!("model `{spec}` listed twice");
        }
        models.push(spec);
    }
    if models.is_empty() {
        bail!("no models given");
    }
    Ok(models)
}

fn parse_bool(value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bail!("expected true or false, found `{value}`"),
    }
}

fn parse_num<T: std::str::FromStr>(value: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    value
        .parse()
        .with_context(|| format!("bad number `{value}`"))
}

impl RunConfig {
    /// Reads a config file. Relative paths inside it resolve against the
    /// file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut cfg = Self::default();
        cfg.apply_text(&text, base)
            .with_context(|| format!("in config {}", path.display()))?;
        Ok(cfg)
    }

    fn apply_text(&mut self, text: &str, base: &Path) -> Result<()> {
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", i + 1))?;
            let key = key.trim();
            if let Some(prev) = seen.insert(key.to_string(), i + 1) {
                bail!("line {}: `{key}` already set on line {prev}", i + 1);
            }
            self.set(key, value.trim(), Some(base))
                .with_context(|| format!("line {}: {key}", i + 1))?;
        }
        self.rebuild_grid()
    }

    /// Applies one setting. `base` resolves relative paths.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<()> {
        let path = |v: &str| match base {
            Some(dir) if Path::new(v).is_relative() => dir.join(v),
            _ => PathBuf::from(v),
        };
        match key {
            "matches" => self.matches = Some(path(value)),
            "models" => self.models = parse_models(value, base)?,
            "out" => self.out = path(value),
            "seed" => self.seed = parse_num(value)?,
            "strict" => self.strict = parse_bool(value)?,
            "bt.tol" => self.settings.bt.tol = positive(parse_num(value)?)?,
            "bt.max_iter" => self.settings.bt.max_iter = parse_num(value)?,
            "poisson.tol" => self.settings.poisson.tol = positive(parse_num(value)?)?,
            "poisson.max_iter" => self.settings.poisson.max_iter = parse_num(value)?,
            "poisson.tail_tol" => self.settings.tail_tol = positive(parse_num(value)?)?,
            "poisson.correlated" => self.settings.biv_correlated = parse_bool(value)?,
            "poisson.window" => self.settings.biv_window = value.parse::<TrainingWindow>()?,
            "mndir2.w_points" => self.grid.w_points = parse_num(value)?,
            "mndir2.alpha_points" => self.grid.alpha_points = parse_num(value)?,
            "mndir2.alpha_min" => self.grid.alpha_min = parse_num(value)?,
            "mndir2.alpha_max" => self.grid.alpha_max = parse_num(value)?,
            "calibration.bins" => {
                let bins: usize = parse_num(value)?;
                if bins == 0 {
                    bail!("need at least one bin");
                }
                self.calibration.bins = bins;
            }
            _ => bail!("unknown key"),
        }
        Ok(())
    }

    fn rebuild_grid(&mut self) -> Result<()> {
        let g = self.grid;
        if g.alpha_min > g.alpha_max {
            bail!("mndir2.alpha_min exceeds mndir2.alpha_max");
        }
        self.settings.grid = GridSpec::new(
            GridSpec::linspace(0.0, 1.0, g.w_points),
            GridSpec::linspace(g.alpha_min, g.alpha_max, g.alpha_points),
        )?;
        Ok(())
    }

    /// Every effective setting, as echoed into the report.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let s = &self.settings;
        let models: Vec<String> = self.models.iter().map(ToString::to_string).collect();
        [
            ("matches", self.matches.as_ref().map_or(String::new(), |p| p.display().to_string())),
            ("models", models.join(",")),
            ("seed", self.seed.to_string()),
            ("strict", self.strict.to_string()),
            ("bt.tol", s.bt.tol.to_string()),
            ("bt.max_iter", s.bt.max_iter.to_string()),
            ("poisson.tol", s.poisson.tol.to_string()),
            ("poisson.max_iter", s.poisson.max_iter.to_string()),
            ("poisson.tail_tol", s.tail_tol.to_string()),
            ("poisson.correlated", s.biv_correlated.to_string()),
            ("poisson.window", s.biv_window.to_string()),
            ("mndir2.w_points", self.grid.w_points.to_string()),
            ("mndir2.alpha_points", self.grid.alpha_points.to_string()),
            ("mndir2.alpha_min", self.grid.alpha_min.to_string()),
            ("mndir2.alpha_max", self.grid.alpha_max.to_string()),
            ("calibration.bins", self.calibration.bins.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

fn positive(x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        bail!("must be positive, found {x}")
    }
}
