use std::path::Path;
use std::process::{Command, Output};

use matchcast_core::data::{write_matches, MatchRecord};
use matchcast_core::sim::{double_round_robin, team_names};

fn matchcast(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matchcast"))
        .current_dir(dir)
        .env_remove("MATCHCAST_CONFIG")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Four-team double round robin with results derived from the fixture, so
/// every season is complete.
fn league(years: &[i32]) -> Vec<MatchRecord> {
    let teams = team_names(4);
    years
        .iter()
        .flat_map(|&y| {
            double_round_robin(&teams).into_iter().map(move |(md, h, a)| {
                let goals = ((md as i32 + y) % 3) as u32;
                MatchRecord::new(y, md, h, a, Some((goals, 1))).unwrap()
            })
        })
        .collect()
}

/// Home team H at home: 6 wins, 2 draws, 1 loss. Away team A away: 2 wins,
/// 3 draws, 4 losses. They meet on matchday 10.
fn worked_example_csv() -> String {
    let home = ["2-0", "1-0", "3-1", "2-1", "1-0", "4-2", "1-1", "0-0", "0-1"];
    let away = ["0-1", "1-2", "1-1", "2-2", "0-0", "2-0", "1-0", "3-1", "2-1"];
    let mut text = String::from("season,matchday,home,away,home_goals,away_goals\n");
    for md in 1..=9 {
        let (hg, ag) = home[md - 1].split_once('-').unwrap();
        text += &format!("2012,{md},Gremio,Home{md},{hg},{ag}\n");
        let (hg, ag) = away[md - 1].split_once('-').unwrap();
        text += &format!("2012,{md},Away{md},Atletico-PR,{hg},{ag}\n");
    }
    text += "2012,10,Gremio,Atletico-PR,,\n";
    text
}

#[test]
fn validate_reports_duplicates_with_both_lines() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("m.csv"),
        "season,matchday,home,away,home_goals,away_goals\n2014,1,A,B,1,0\n2014,1,C,D,0,0\n2014,1,a,b,2,2\n",
    )
    .unwrap();
    let out = matchcast(dir.path(), &["validate", "--matches", "m.csv"]);
    assert!(!out.status.success());
    let text = stdout(&out);
    assert!(text.contains("duplicate fixture 2014 matchday 1: A v B on lines 2 and 4"), "{text}");
}

#[test]
fn validate_lists_scheduled_matches() {
    let dir = tempfile::tempdir().unwrap();
    let mut matches = league(&[2014]);
    let last = matches.len() - 1;
    let m = matches[last].clone();
    matches[last] = MatchRecord::new(2014, m.matchday(), m.home().clone(), m.away().clone(), None).unwrap();
    let shown = format!("scheduled: matchday {} {} v {}", m.matchday(), m.home(), m.away());
    std::fs::write(dir.path().join("m.csv"), write_matches(&matches).unwrap()).unwrap();

    let out = matchcast(dir.path(), &["validate", "--matches", "m.csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains(&shown), "{text}");
    assert!(text.contains("11 played, 1 scheduled"), "{text}");
    assert!(text.contains("second-half matches have no result"), "{text}");
}

#[test]
fn validate_accepts_complete_season() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), write_matches(&league(&[2014])).unwrap()).unwrap();
    let out = matchcast(dir.path(), &["validate", "--matches", "m.csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("season 2014: 4 teams, 12 matches (12 played, 0 scheduled), complete season"), "{text}");
}

#[test]
fn validate_reports_malformed_rows() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("m.csv"),
        "season,matchday,home,away,home_goals,away_goals\n2014,1,A,B,-1,0\n",
    )
    .unwrap();
    let out = matchcast(dir.path(), &["validate", "--matches", "m.csv"]);
    assert!(!out.status.success());
    assert!(stdout(&out).contains("line 2"), "{}", stdout(&out));
}

#[test]
fn predict_reproduces_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), worked_example_csv()).unwrap();
    let out = matchcast(
        dir.path(),
        &["predict", "--matches", "m.csv", "--matchday", "10", "--models", "mn-dir1,trivial"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("model,season,matchday,home,away,p1,p2,p3,note"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..5], &["mn-dir1", "2012", "10", "Gremio", "Atletico-PR"]);
    let p: Vec<f64> = row[5..8].iter().map(|s| s.parse().unwrap()).collect();
    for (x, y) in p.iter().zip([0.5, 0.291667, 0.208333]) {
        assert!((x - y).abs() < 1e-6, "{p:?}");
    }
    let trivial = lines.next().unwrap();
    assert!(trivial.starts_with("trivial,2012,10,Gremio,Atletico-PR,0.333"), "{trivial}");
    assert_eq!(lines.next(), None);
}

#[test]
fn predict_flags_fixture_missing_from_external_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), write_matches(&league(&[2014])).unwrap()).unwrap();
    let fixtures: Vec<MatchRecord> = league(&[2014]).into_iter().filter(|m| m.matchday() == 4).collect();
    let first = &fixtures[0];
    std::fs::write(
        dir.path().join("ext.csv"),
        format!(
            "season,matchday,home,away,p1,p2,p3\n2014,4,{},{},0.5,0.3,0.2\n",
            first.home(),
            first.away()
        ),
    )
    .unwrap();
    let out = matchcast(
        dir.path(),
        &["predict", "--matches", "m.csv", "--matchday", "4", "--season", "2014", "--models", "external:ext.csv"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let second = &fixtures[1];
    assert!(text.contains(&format!("{},{},0.5,0.3,0.2,\n", first.home(), first.away())), "{text}");
    assert!(text.contains(&format!("{},{},,,,absent\n", second.home(), second.away())), "{text}");
}

#[test]
fn evaluate_trivial_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let matches = league(&[2013, 2014]);
    std::fs::write(dir.path().join("m.csv"), write_matches(&matches).unwrap()).unwrap();
    let mut oracle = String::from("season,matchday,home,away,p1,p2,p3\n");
    for m in &matches {
        let mut p = [0.0; 3];
        p[m.outcome().unwrap().index()] = 1.0;
        oracle += &format!("{},{},{},{},{},{},{}\n", m.season(), m.matchday(), m.home(), m.away(), p[0], p[1], p[2]);
    }
    std::fs::write(dir.path().join("oracle.csv"), oracle).unwrap();

    let out = matchcast(
        dir.path(),
        &["evaluate", "--matches", "m.csv", "--models", "trivial,external:oracle.csv", "--out", "run"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let summary = stdout(&out);
    assert_eq!(summary, std::fs::read_to_string(dir.path().join("run/summary.txt")).unwrap());

    let row = |model: &str| {
        summary
            .lines()
            .find(|l| l.starts_with(model))
            .unwrap_or_else(|| panic!("no row for {model} in\n{summary}"))
            .to_string()
    };
    assert!(row("trivial ").contains("0.6667 (0.0000)"), "{summary}");
    let oracle_row = row("external:oracle.csv");
    assert!(oracle_row.contains("0.0000 (0.0000)"), "{oracle_row}");
    assert!(oracle_row.contains("-1.0000 (0.0000)"), "{oracle_row}");
    // two seasons give two per-year rows per model
    assert_eq!(summary.lines().filter(|l| l.trim_start().starts_with("2013")).count(), 2);
    assert_eq!(summary.lines().filter(|l| l.trim_start().starts_with("2014")).count(), 2);

    let csv = std::fs::read_to_string(dir.path().join("run/report.csv")).unwrap();
    // 6 second-half matches per season, two seasons, two models
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 6);
    let json = std::fs::read_to_string(dir.path().join("run/report.json")).unwrap();
    assert!(json.contains("\"models\": \"trivial,external:oracle.csv\""), "{json}");
}

#[test]
fn evaluate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), write_matches(&league(&[2013, 2014])).unwrap()).unwrap();
    std::fs::write(
        dir.path().join("run.conf"),
        "matches = m.csv\nmodels = trivial, mn-dir1, mn-dir2, bt, poisson-lee\nmndir2.w_points = 5\n",
    )
    .unwrap();
    let run = |out: &str| {
        let o = matchcast(dir.path(), &["evaluate", "--config", "run.conf", "--out", out]);
        assert!(o.status.success(), "{}", stderr(&o));
    };
    run("a");
    run("b");
    for name in ["report.json", "report.csv", "summary.txt"] {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
}

#[test]
fn config_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), write_matches(&league(&[2014])).unwrap()).unwrap();
    std::fs::write(dir.path().join("env.conf"), "matches = m.csv\nmodels = trivial\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_matchcast"))
        .current_dir(dir.path())
        .env("MATCHCAST_CONFIG", dir.path().join("env.conf"))
        .args(["predict", "--matchday", "4"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn unknown_config_key_fails() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.conf"), "colour = red\n").unwrap();
    let out = matchcast(dir.path(), &["validate", "--config", "bad.conf"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line 1: colour"), "{}", stderr(&out));
}

#[test]
fn evaluate_refuses_unplayed_second_half() {
    let dir = tempfile::tempdir().unwrap();
    let mut matches = league(&[2014]);
    let m = matches.pop().unwrap();
    matches.push(MatchRecord::new(2014, m.matchday(), m.home().clone(), m.away().clone(), None).unwrap());
    std::fs::write(dir.path().join("m.csv"), write_matches(&matches).unwrap()).unwrap();
    let out = matchcast(dir.path(), &["evaluate", "--matches", "m.csv", "--models", "trivial", "--out", "r"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("no result"), "{}", stderr(&out));
}

#[test]
fn predict_keeps_going_when_one_model_fails() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), write_matches(&league(&[2014])).unwrap()).unwrap();
    // nothing has been played before matchday 1, so mn-dir2 has no data
    let out = matchcast(
        dir.path(),
        &["predict", "--matches", "m.csv", "--matchday", "1", "--models", "mn-dir2,trivial"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("mn-dir2,") && l.contains(",error: ")), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("trivial,")).count(), 2);
    assert!(stderr(&out).contains("mn-dir2: failed"));

    let only = matchcast(dir.path(), &["predict", "--matches", "m.csv", "--matchday", "1", "--models", "mn-dir2"]);
    assert!(!only.status.success());
}

#[test]
fn predict_exports_fitted_parameters() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), write_matches(&league(&[2014])).unwrap()).unwrap();
    let out = matchcast(
        dir.path(),
        &["predict", "--matches", "m.csv", "--matchday", "4", "--models", "bt,poisson-lee,trivial", "--out", "p"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let bt = std::fs::read_to_string(dir.path().join("p/params_bt_2014_4.csv")).unwrap();
    assert!(bt.starts_with("team,worth\n"), "{bt}");
    let goals = std::fs::read_to_string(dir.path().join("p/params_poisson-lee_2014_4.csv")).unwrap();
    assert!(goals.starts_with("team,att,def\n"), "{goals}");
    assert!(!dir.path().join("p/params_trivial_2014_4.csv").exists());
    assert_eq!(
        std::fs::read_to_string(dir.path().join("p/predictions_2014_4.csv")).unwrap(),
        stdout(&out)
    );
}
