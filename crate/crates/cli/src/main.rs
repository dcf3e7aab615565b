mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use matchcast_core::data::{find_duplicates, group_seasons, read_match_rows, Season, SeasonCheck};
use matchcast_core::eval::{evaluate, predict_matchday, EvalSettings, Predictor};
use matchcast_core::report::{predictions_csv, report_csv, report_json, summary_table};
use matchcast_core::selftest;

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "matchcast", version, about = "Forecast and score three-way football results")]
struct Cli {
    /// key = value settings file
    #[arg(long, global = true, env = "MATCHCAST_CONFIG")]
    config: Option<PathBuf>,
    /// Match CSV: season,matchday,home,away,home_goals,away_goals
    #[arg(long, global = true)]
    matches: Option<PathBuf>,
    /// Comma-separated models, e.g. `trivial,bt,external:preds.csv`
    #[arg(long, global = true)]
    models: Option<String>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a match file and describe its seasons
    Validate,
    /// Forecast one matchday
    Predict {
        #[arg(long)]
        matchday: u32,
        /// Defaults to the latest season in the file
        #[arg(long)]
        season: Option<i32>,
    },
    /// Score every model over the second half of each season
    Evaluate,
    /// Run the built-in checks
    Selftest,
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &cli.matches {
        cfg.matches = Some(p.clone());
    }
    if let Some(m) = &cli.models {
        cfg.set("models", m, None).context("--models")?;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn matches_path(cfg: &RunConfig) -> Result<&Path> {
    match &cfg.matches {
        Some(p) => Ok(p),
        None => bail!("no match file: pass --matches or set `matches` in the config"),
    }
}

fn load_seasons(cfg: &RunConfig) -> Result<Vec<Season>> {
    let path = matches_path(cfg)?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rows = read_match_rows(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some((f, a, b)) = find_duplicates(&rows).into_iter().next() {
        bail!("duplicate fixture {f} on lines {a} and {b}");
    }
    let check = if cfg.strict { SeasonCheck::Strict } else { SeasonCheck::Lenient };
    let seasons = group_seasons(rows.into_iter().map(|r| r.record).collect(), check)?;
    for s in &seasons {
        for w in s.warnings() {
            eprintln!("warning: {w}");
        }
    }
    Ok(seasons)
}

fn build_models(cfg: &RunConfig) -> Result<Vec<Box<dyn Predictor>>> {
    cfg.models
        .iter()
        .map(|m| m.build(&cfg.settings).with_context(|| format!("model {m}")))
        .collect()
}

/// Returns the number of problems found.
fn validate(cfg: &RunConfig) -> Result<usize> {
    let path = matches_path(cfg)?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rows = match read_match_rows(&text) {
        Ok(rows) => rows,
        Err(e) => {
            println!("error: {e}");
            return Ok(1);
        }
    };
    println!("{} rows", rows.len());
    let mut errors = 0;
    for (f, a, b) in find_duplicates(&rows) {
        println!("error: duplicate fixture {f} on lines {a} and {b}");
        errors += 1;
    }
    if errors > 0 {
        return Ok(errors);
    }

    let check = if cfg.strict { SeasonCheck::Strict } else { SeasonCheck::Lenient };
    let seasons = match group_seasons(rows.into_iter().map(|r| r.record).collect(), check) {
        Ok(s) => s,
        Err(e) => {
            println!("error: {e}");
            return Ok(1);
        }
    };
    for s in &seasons {
        let played = s.played().count();
        let scheduled = s.matches().len() - played;
        let shape = if s.is_complete_double_round_robin() {
            "double round robin"
        } else {
            "partial season"
        };
        let status = if scheduled == 0 && s.is_complete_double_round_robin() {
            "complete season".to_string()
        } else {
            shape.to_string()
        };
        println!(
            "season {}: {} teams, {} matches ({played} played, {scheduled} scheduled), {status}",
            s.year(),
            s.teams().len(),
            s.matches().len(),
        );
        for w in s.warnings() {
            println!("  warning: {w}");
        }
        for m in s.matches().iter().filter(|m| !m.is_played()) {
            println!("  scheduled: matchday {} {} v {}", m.matchday(), m.home(), m.away());
        }
        let late = s.second_half_matchdays();
        let open = s
            .matches()
            .iter()
            .filter(|m| !m.is_played() && late.contains(&m.matchday()))
            .count();
        if open > 0 {
            println!("  note: {open} second-half matches have no result; evaluate needs them all");
        }
    }
    Ok(errors)
}

/// A failing model is reported and the others still emitted; only a run
/// where every model fails counts as an error.
fn predict(cfg: &RunConfig, matchday: u32, season: Option<i32>, write: bool) -> Result<usize> {
    let seasons = load_seasons(cfg)?;
    let season = match season {
        Some(y) => y,
        None => seasons.last().map(Season::year).context("match file is empty")?,
    };
    let models = build_models(cfg)?;
    let (fixtures, forecasts) = predict_matchday(&models, &seasons, season, matchday)?;
    let text = predictions_csv(&fixtures, &forecasts)?;
    print!("{text}");

    if write {
        std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
        let mut files = vec![(format!("predictions_{season}_{matchday}.csv"), text)];
        for fc in &forecasts {
            if let Ok(f) = &fc.result {
                if let Some(csv) = &f.fitted_csv {
                    files.push((format!("params_{}_{season}_{matchday}.csv", fc.model), csv.clone()));
                }
            }
        }
        for (name, body) in files {
            let path = cfg.out.join(name);
            std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        }
    }

    let mut failed = 0;
    for fc in &forecasts {
        match &fc.result {
            Ok(f) => {
                for note in &f.notes {
                    eprintln!("{}: {note}", fc.model);
                }
            }
            Err(e) => {
                eprintln!("{}: failed: {e}", fc.model);
                failed += 1;
            }
        }
    }
    Ok(usize::from(failed == forecasts.len()))
}

fn run_evaluate(cfg: &RunConfig) -> Result<usize> {
    let seasons = load_seasons(cfg)?;
    let models = build_models(cfg)?;
    let settings = EvalSettings {
        calibration: cfg.calibration.clone(),
    };
    let ev = evaluate(&models, &seasons, &settings)?;

    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let summary = summary_table(&ev);
    for (name, body) in [
        ("report.json", report_json(&ev, &cfg.echo())?),
        ("report.csv", report_csv(&ev)?),
        ("summary.txt", summary.clone()),
    ] {
        let path = cfg.out.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{summary}");
    for m in &ev.models {
        for s in &m.flags.skipped_matchdays {
            eprintln!("{}: skipped {} matchday {}: {}", m.model, s.season, s.matchday, s.reason);
        }
    }
    Ok(0)
}

fn selftest(cfg: &RunConfig) -> usize {
    let results = selftest::run_all(cfg.seed);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    failed
}

fn run(cli: &Cli) -> Result<usize> {
    let cfg = resolve(cli)?;
    match &cli.command {
        Command::Validate => validate(&cfg),
        Command::Predict { matchday, season } => predict(&cfg, *matchday, *season, cli.out.is_some()),
        Command::Evaluate => run_evaluate(&cfg),
        Command::Selftest => Ok(selftest(&cfg)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
