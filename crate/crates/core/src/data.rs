//! Match-result data model and CSV ingestion.
//!
//! A match file has the header `season,matchday,home,away,home_goals,away_goals`
//! and one row per fixture. Goal columns are left blank for fixtures that have
//! not been played yet.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Column names of the match CSV, in order.
pub const MATCH_CSV_HEADER: [&str; 6] = [
    "season",
    "matchday",
    "home",
    "away",
    "home_goals",
    "away_goals",
];

/// Tolerance on `p1 + p2 + p3 = 1` accepted by [`Prediction::new`].
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Team identifier. Two ids are equal when their normalized keys match: the
/// name is trimmed, internal whitespace collapsed and case folded. The
/// display form keeps the original casing.
#[derive(Clone, Debug)]
pub struct TeamId {
    key: String,
    display: String,
}

impl TeamId {
    pub fn new(name: &str) -> Result<Self> {
        let display = name.split_whitespace().collect::<Vec<_>>().join(" ");
        if display.is_empty() {
            return Err(Error::InvalidMatch("empty team name".into()));
        }
        let key = display.to_lowercase();
        Ok(Self { key, display })
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn name(&self) -> &str {
        &self.display
    }
}

impl PartialEq for TeamId {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for TeamId {}

impl Hash for TeamId {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl PartialOrd for TeamId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TeamId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display)
    }
}

impl Serialize for TeamId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.display)
    }
}

/// Result of a match from the home team's point of view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    HomeWin = 1,
    Draw = 2,
    AwayWin = 3,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::HomeWin, Outcome::Draw, Outcome::AwayWin];

    pub fn from_goals(home_goals: u32, away_goals: u32) -> Self {
        match home_goals.cmp(&away_goals) {
            Ordering::Greater => Outcome::HomeWin,
            Ordering::Equal => Outcome::Draw,
            Ordering::Less => Outcome::AwayWin,
        }
    }

    /// Zero-based index into a [`Prediction`].
    pub fn index(self) -> usize {
        self as usize - 1
    }

    /// The 1/2/3 code used in reports.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    /// The same result seen from the away team.
    pub fn swapped(self) -> Self {
        match self {
            Outcome::HomeWin => Outcome::AwayWin,
            Outcome::Draw => Outcome::Draw,
            Outcome::AwayWin => Outcome::HomeWin,
        }
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.code())
    }
}

/// A point on the 2-simplex: (home win, draw, away win).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Prediction([f64; 3]);

impl Prediction {
    pub const UNIFORM: Prediction = Prediction([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);

    pub fn new(home_win: f64, draw: f64, away_win: f64) -> Result<Self> {
        let p = [home_win, draw, away_win];
        if p.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "probabilities must lie in [0, 1], got {p:?}"
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidParameter(format!(
                "probabilities must sum to 1, got {sum}"
            )));
        }
        Ok(Self(p))
    }

    /// Divides non-negative weights by their sum.
    pub fn from_weights(weights: [f64; 3]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || !(sum > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cannot normalize weights {weights:?}"
            )));
        }
        Ok(Self(weights.map(|w| w / sum)))
    }

    /// Point mass on one outcome.
    pub fn certain(outcome: Outcome) -> Self {
        let mut p = [0.0; 3];
        p[outcome.index()] = 1.0;
        Self(p)
    }

    pub fn probs(&self) -> [f64; 3] {
        self.0
    }

    pub fn home_win(&self) -> f64 {
        self.0[0]
    }

    pub fn draw(&self) -> f64 {
        self.0[1]
    }

    pub fn away_win(&self) -> f64 {
        self.0[2]
    }

    pub fn prob(&self, outcome: Outcome) -> f64 {
        self.0[outcome.index()]
    }

    /// Re-expresses the prediction from the other team's perspective.
    pub fn swapped(&self) -> Self {
        Self([self.0[2], self.0[1], self.0[0]])
    }
}

/// Identity of a fixture, with no result attached.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Fixture {
    pub season: i32,
    pub matchday: u32,
    pub home: TeamId,
    pub away: TeamId,
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} matchday {}: {} v {}",
            self.season, self.matchday, self.home, self.away
        )
    }
}

/// One played or scheduled fixture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchRecord {
    fixture: Fixture,
    score: Option<(u32, u32)>,
}

impl MatchRecord {
    pub fn new(
        season: i32,
        matchday: u32,
        home: TeamId,
        away: TeamId,
        score: Option<(u32, u32)>,
    ) -> Result<Self> {
        if home == away {
            return Err(Error::InvalidMatch(format!(
                "home and away team are both `{home}`"
            )));
        }
        if matchday == 0 {
            return Err(Error::InvalidMatch("matchday must be at least 1".into()));
        }
        Ok(Self {
            fixture: Fixture {
                season,
                matchday,
                home,
                away,
            },
            score,
        })
    }

    pub fn played(season: i32, matchday: u32, home: &str, away: &str, goals: (u32, u32)) -> Result<Self> {
        Self::new(season, matchday, TeamId::new(home)?, TeamId::new(away)?, Some(goals))
    }

    pub fn scheduled(season: i32, matchday: u32, home: &str, away: &str) -> Result<Self> {
        Self::new(season, matchday, TeamId::new(home)?, TeamId::new(away)?, None)
    }

    pub fn fixture(&self) -> &Fixture {
        &self.fixture
    }

    pub fn season(&self) -> i32 {
        self.fixture.season
    }

    pub fn matchday(&self) -> u32 {
        self.fixture.matchday
    }

    pub fn home(&self) -> &TeamId {
        &self.fixture.home
    }

    pub fn away(&self) -> &TeamId {
        &self.fixture.away
    }

    pub fn home_goals(&self) -> Option<u32> {
        self.score.map(|s| s.0)
    }

    pub fn away_goals(&self) -> Option<u32> {
        self.score.map(|s| s.1)
    }

    pub fn score(&self) -> Option<(u32, u32)> {
        self.score
    }

    pub fn is_played(&self) -> bool {
        self.score.is_some()
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.score.map(|(h, a)| Outcome::from_goals(h, a))
    }
}

/// Outcome of a played match; errors for a scheduled one.
pub fn outcome_of(m: &MatchRecord) -> Result<Outcome> {
    m.outcome().ok_or_else(|| Error::NoResult(m.fixture.clone()))
}

/// A parsed CSV row with its 1-based line number.
#[derive(Clone, Debug)]
pub struct MatchRow {
    pub line: u64,
    pub record: MatchRecord,
}

fn parse_goals(field: &str, line: u64, column: &str) -> Result<Option<u32>> {
    let field = field.trim();
    if field.is_empty() {
        return Ok(None);
    }
    match field.parse::<i64>() {
        Ok(v) if v < 0 => Err(Error::Parse {
            line,
            message: format!("negative {column} `{field}`"),
        }),
        Ok(v) => u32::try_from(v).map(Some).map_err(|_| Error::Parse {
            line,
            message: format!("{column} out of range `{field}`"),
        }),
        Err(_) => Err(Error::Parse {
            line,
            message: format!("{column} is not an integer: `{field}`"),
        }),
    }
}

/// Parses match CSV text, keeping line numbers for diagnostics.
pub fn read_match_rows(csv_text: &str) -> Result<Vec<MatchRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(csv_text.as_bytes());

    let header = reader.headers()?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != MATCH_CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                MATCH_CSV_HEADER.join(","),
                names.join(",")
            ),
        });
    }

    let mut rows = Vec::new();
    for result in reader.records() {
        let row = result?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != MATCH_CSV_HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected 6 fields, found {}", row.len()),
            });
        }
        let season = row[0].trim().parse::<i32>().map_err(|_| Error::Parse {
            line,
            message: format!("season is not an integer: `{}`", &row[0]),
        })?;
        let matchday = row[1].trim().parse::<u32>().map_err(|_| Error::Parse {
            line,
            message: format!("matchday is not a positive integer: `{}`", &row[1]),
        })?;
        let home_goals = parse_goals(&row[4], line, "home_goals")?;
        let away_goals = parse_goals(&row[5], line, "away_goals")?;
        let score = match (home_goals, away_goals) {
            (Some(h), Some(a)) => Some((h, a)),
            (None, None) => None,
            _ => {
                return Err(Error::Parse {
                    line,
                    message: "only one of home_goals/away_goals is present".into(),
                })
            }
        };
        let at_line = |e: Error| Error::Parse {
            line,
            message: match e {
                Error::InvalidMatch(m) => m,
                other => other.to_string(),
            },
        };
        let home = TeamId::new(&row[2]).map_err(at_line)?;
        let away = TeamId::new(&row[3]).map_err(at_line)?;
        let record = MatchRecord::new(season, matchday, home, away, score).map_err(at_line)?;
        rows.push(MatchRow { line, record });
    }
    Ok(rows)
}

/// Parses match CSV text into records, preserving input order.
pub fn parse_matches(csv_text: &str) -> Result<Vec<MatchRecord>> {
    Ok(read_match_rows(csv_text)?
        .into_iter()
        .map(|r| r.record)
        .collect())
}

/// Serializes records into canonical match CSV.
pub fn write_matches(records: &[MatchRecord]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(MATCH_CSV_HEADER)?;
    for m in records {
        let goals = |g: Option<u32>| g.map(|v| v.to_string()).unwrap_or_default();
        writer.write_record([
            m.season().to_string(),
            m.matchday().to_string(),
            m.home().name().to_string(),
            m.away().name().to_string(),
            goals(m.home_goals()),
            goals(m.away_goals()),
        ])?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

/// Rows sharing a (season, matchday, home, away) key.
pub fn find_duplicates(rows: &[MatchRow]) -> Vec<(Fixture, u64, u64)> {
    let mut seen: HashMap<&Fixture, u64> = HashMap::new();
    let mut dups = Vec::new();
    for row in rows {
        let key = row.record.fixture();
        // report the first spelling seen
        match seen.get_key_value(key) {
            Some((&first_key, &first)) => dups.push((first_key.clone(), first, row.line)),
            None => {
                seen.insert(key, row.line);
            }
        }
    }
    dups
}

/// Wins, draws and losses of one team.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct CountVector {
    pub wins: u32,
    pub draws: u32,
    pub losses: u32,
}

impl CountVector {
    pub const ZERO: CountVector = CountVector {
        wins: 0,
        draws: 0,
        losses: 0,
    };

    pub fn new(wins: u32, draws: u32, losses: u32) -> Self {
        Self { wins, draws, losses }
    }

    pub fn total(&self) -> u32 {
        self.wins + self.draws + self.losses
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.wins, self.draws, self.losses]
    }

    /// Tallies an outcome given from this team's point of view
    /// (`HomeWin` meaning this team won).
    pub fn record(&mut self, own_result: Outcome) {
        match own_result {
            Outcome::HomeWin => self.wins += 1,
            Outcome::Draw => self.draws += 1,
            Outcome::AwayWin => self.losses += 1,
        }
    }
}

impl std::ops::Add for CountVector {
    type Output = CountVector;

    fn add(self, rhs: Self) -> Self {
        Self {
            wins: self.wins + rhs.wins,
            draws: self.draws + rhs.draws,
            losses: self.losses + rhs.losses,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Home,
    Away,
}

/// Counts results of `team` in `role` over played matches from an arbitrary
/// collection.
pub fn venue_counts_in<'a, I>(matches: I, team: &TeamId, role: Role) -> CountVector
where
    I: IntoIterator<Item = &'a MatchRecord>,
{
    let mut counts = CountVector::ZERO;
    for m in matches {
        let Some(outcome) = m.outcome() else { continue };
        match role {
            Role::Home if m.home() == team => counts.record(outcome),
            Role::Away if m.away() == team => counts.record(outcome.swapped()),
            _ => {}
        }
    }
    counts
}

/// Builds home/away count tables for every team in one pass.
pub fn venue_table<'a, I>(matches: I) -> HashMap<(TeamId, Role), CountVector>
where
    I: IntoIterator<Item = &'a MatchRecord>,
{
    let mut table: HashMap<(TeamId, Role), CountVector> = HashMap::new();
    for m in matches {
        let Some(outcome) = m.outcome() else { continue };
        table
            .entry((m.home().clone(), Role::Home))
            .or_default()
            .record(outcome);
        table
            .entry((m.away().clone(), Role::Away))
            .or_default()
            .record(outcome.swapped());
    }
    table
}

/// How strictly [`Season::new`] checks the schedule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SeasonCheck {
    /// Accept partial or irregular seasons, recording warnings.
    #[default]
    Lenient,
    /// Require a complete 20-team double round robin (380 matches).
    Strict,
}

/// All fixtures of one championship, ordered by matchday.
#[derive(Clone, Debug)]
pub struct Season {
    year: i32,
    teams: BTreeSet<TeamId>,
    matches: Vec<MatchRecord>,
    warnings: Vec<String>,
}

impl Season {
    pub fn new(year: i32, mut matches: Vec<MatchRecord>, check: SeasonCheck) -> Result<Self> {
        if let Some(m) = matches.iter().find(|m| m.season() != year) {
            return Err(Error::InvalidMatch(format!(
                "{} does not belong to season {year}",
                m.fixture()
            )));
        }
        let mut seen = BTreeSet::new();
        for m in &matches {
            if !seen.insert(m.fixture().clone()) {
                return Err(Error::InvalidMatch(format!("duplicate fixture {}", m.fixture())));
            }
        }
        matches.sort_by_key(|m| m.matchday());
        let teams: BTreeSet<TeamId> = matches
            .iter()
            .flat_map(|m| [m.home().clone(), m.away().clone()])
            .collect();

        let mut season = Self {
            year,
            teams,
            matches,
            warnings: Vec::new(),
        };
        let complete = season.is_complete_double_round_robin();
        if !complete {
            season.warnings.push(format!(
                "season {year}: {} teams, {} matches, not a complete double round robin",
                season.teams.len(),
                season.matches.len()
            ));
        }
        if check == SeasonCheck::Strict && !(complete && season.matches.len() == 380) {
            return Err(Error::InvalidMatch(format!(
                "season {year} has {} matches; a complete 380-match season is required",
                season.matches.len()
            )));
        }
        Ok(season)
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn teams(&self) -> &BTreeSet<TeamId> {
        &self.teams
    }

    pub fn matches(&self) -> &[MatchRecord] {
        &self.matches
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn is_partial(&self) -> bool {
        !self.warnings.is_empty()
    }

    /// Number of scheduled rounds (the largest matchday).
    pub fn rounds(&self) -> u32 {
        self.matches.iter().map(MatchRecord::matchday).max().unwrap_or(0)
    }

    /// Last matchday of the first half: `ceil(rounds / 2)`.
    pub fn first_half_end(&self) -> u32 {
        self.rounds().div_ceil(2)
    }

    pub fn second_half_matchdays(&self) -> Vec<u32> {
        (self.first_half_end() + 1..=self.rounds()).collect()
    }

    pub fn matches_on(&self, matchday: u32) -> impl Iterator<Item = &MatchRecord> {
        self.matches.iter().filter(move |m| m.matchday() == matchday)
    }

    pub fn played(&self) -> impl Iterator<Item = &MatchRecord> {
        self.matches.iter().filter(|m| m.is_played())
    }

    /// Every ordered pair of distinct teams meets exactly once, over
    /// `2 (T - 1)` rounds.
    pub fn is_complete_double_round_robin(&self) -> bool {
        let t = self.teams.len();
        if t < 2 || self.matches.len() != t * (t - 1) {
            return false;
        }
        let pairs: BTreeSet<(&TeamId, &TeamId)> =
            self.matches.iter().map(|m| (m.home(), m.away())).collect();
        pairs.len() == t * (t - 1) && self.rounds() as usize == 2 * (t - 1)
    }
}

/// Splits records by season, ordered by year.
pub fn group_seasons(records: Vec<MatchRecord>, check: SeasonCheck) -> Result<Vec<Season>> {
    let mut by_year: std::collections::BTreeMap<i32, Vec<MatchRecord>> = Default::default();
    for m in records {
        by_year.entry(m.season()).or_default().push(m);
    }
    by_year
        .into_iter()
        .map(|(year, matches)| Season::new(year, matches, check))
        .collect()
}

/// Counts `team`'s results in `role` over played matches with matchday at
/// most `through_matchday`.
pub fn venue_counts(
    season: &Season,
    team: &TeamId,
    role: Role,
    through_matchday: u32,
) -> Result<CountVector> {
    if !season.teams().contains(team) {
        return Err(Error::UnknownTeam(team.to_string()));
    }
    Ok(venue_counts_in(
        season.matches().iter().filter(|m| m.matchday() <= through_matchday),
        team,
        role,
    ))
}

/// Second-half matchdays of a season: every round after `ceil(rounds / 2)`.
pub fn second_half_matchdays(season: &Season) -> Vec<u32> {
    season.second_half_matchdays()
}
