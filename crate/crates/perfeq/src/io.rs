//! File formats: players and games CSV ingestion, report emission.
//!
//! Both input files are plain UTF-8 CSV with LF line endings and a
//! mandatory header. Fields must not contain commas or quotes; this keeps
//! the format trivially diffable and the parser's error positions exact.
//!
//! - players: `id,name,rating` — rating may be empty.
//! - games: `a,b,score_a` — `score_a` in `[0, 1]` from player a's
//!   perspective (`0`, `0.5`, `1` canonical; other decimals accepted).

use std::fmt;

use perfeq_core::model::{GameRecord, Player, Tournament, Violation};

pub const PLAYERS_HEADER: &str = "id,name,rating";
pub const GAMES_HEADER: &str = "a,b,score_a";

/// One row of a players file.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerRow {
    pub id: String,
    pub name: String,
    pub rating: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlayersFile {
    pub rows: Vec<PlayerRow>,
}

/// One row of a games file: a's score; b receives `1 - score_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameRow {
    pub a: String,
    pub b: String,
    pub score_a: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GamesFile {
    pub rows: Vec<GameRow>,
}

/// A parse failure pinned to a 1-based line and column (field) position.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// Lines with their 1-based numbers, tolerating a trailing CR and skipping
/// blank lines.
fn rows(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.strip_suffix('\r').unwrap_or(line)))
        .filter(|(_, line)| !line.trim().is_empty())
}

fn split_fields<'a>(
    line_no: usize,
    line: &'a str,
    expect: usize,
    errors: &mut Vec<ParseError>,
) -> Option<Vec<&'a str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expect {
        errors.push(err(
            line_no,
            fields.len().min(expect + 1),
            format!(
                "expected {expect} comma-separated fields, found {}",
                fields.len()
            ),
        ));
        return None;
    }
    Some(fields)
}

/// Parses a players file, reporting every malformed row.
pub fn parse_players(text: &str) -> Result<PlayersFile, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut out = PlayersFile::default();
    let mut seen: Vec<String> = Vec::new();
    let mut lines = rows(text);

    match lines.next() {
        Some((_, header)) if header == PLAYERS_HEADER => {}
        Some((n, header)) => {
            return Err(vec![err(
                n,
                1,
                format!("expected header `{PLAYERS_HEADER}`, found `{header}`"),
            )])
        }
        None => return Err(vec![err(1, 1, "empty file: missing header")]),
    }

    for (n, line) in lines {
        let Some(fields) = split_fields(n, line, 3, &mut errors) else {
            continue;
        };
        let id = fields[0].trim();
        if id.is_empty() {
            errors.push(err(n, 1, "empty id"));
            continue;
        }
        if seen.iter().any(|s| s == id) {
            errors.push(err(n, 1, format!("duplicate id `{id}`")));
            continue;
        }
        let rating_field = fields[2].trim();
        let rating = if rating_field.is_empty() {
            None
        } else {
            match rating_field.parse::<f64>() {
                Ok(r) if r.is_finite() && r >= 0.0 => Some(r),
                Ok(r) => {
                    errors.push(err(n, 3, format!("rating {r} must be a non-negative real")));
                    continue;
                }
                Err(_) => {
                    errors.push(err(n, 3, format!("cannot parse rating `{rating_field}`")));
                    continue;
                }
            }
        };
        seen.push(id.to_string());
        out.rows.push(PlayerRow {
            id: id.to_string(),
            name: fields[1].trim().to_string(),
            rating,
        });
    }

    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

/// Parses a games file, reporting every malformed row.
pub fn parse_games(text: &str) -> Result<GamesFile, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut out = GamesFile::default();
    let mut lines = rows(text);

    match lines.next() {
        Some((_, header)) if header == GAMES_HEADER => {}
        Some((n, header)) => {
            return Err(vec![err(
                n,
                1,
                format!("expected header `{GAMES_HEADER}`, found `{header}`"),
            )])
        }
        None => return Err(vec![err(1, 1, "empty file: missing header")]),
    }

    for (n, line) in lines {
        let Some(fields) = split_fields(n, line, 3, &mut errors) else {
            continue;
        };
        let a = fields[0].trim();
        let b = fields[1].trim();
        if a.is_empty() {
            errors.push(err(n, 1, "empty id"));
            continue;
        }
        if b.is_empty() {
            errors.push(err(n, 2, "empty id"));
            continue;
        }
        if a == b {
            errors.push(err(n, 2, format!("self-play: `{a}` against themselves")));
            continue;
        }
        let score = fields[2].trim();
        match score.parse::<f64>() {
            Ok(s) if s.is_finite() && (0.0..=1.0).contains(&s) => out.rows.push(GameRow {
                a: a.to_string(),
                b: b.to_string(),
                score_a: s,
            }),
            Ok(s) => errors.push(err(n, 3, format!("score {s} outside [0, 1]"))),
            Err(_) => errors.push(err(n, 3, format!("cannot parse score `{score}`"))),
        }
    }

    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

/// Canonical score text: `0`, `0.5`, `1`, or the shortest round-trip
/// decimal for other values.
fn score_text(s: f64) -> String {
    if s == 0.0 {
        "0".to_string()
    } else if s == 0.5 {
        "0.5".to_string()
    } else if s == 1.0 {
        "1".to_string()
    } else {
        format!("{s}")
    }
}

/// Serializes a players file (LF endings, canonical header).
pub fn emit_players(file: &PlayersFile) -> String {
    let mut out = String::from(PLAYERS_HEADER);
    out.push('\n');
    for row in &file.rows {
        let rating = row.rating.map(|r| format!("{r}")).unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", row.id, row.name, rating));
    }
    out
}

/// Serializes a games file (LF endings, canonical header and scores).
pub fn emit_games(file: &GamesFile) -> String {
    let mut out = String::from(GAMES_HEADER);
    out.push('\n');
    for row in &file.rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.a,
            row.b,
            score_text(row.score_a)
        ));
    }
    out
}

pub const RATINGS_HEADER: &str = "id,rating";

/// A bare rating-vector file: `id,rating` rows, one per player.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RatingsFile {
    pub rows: Vec<(String, f64)>,
}

/// Parses a ratings file, reporting every malformed row.
pub fn parse_ratings(text: &str) -> Result<RatingsFile, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut out = RatingsFile::default();
    let mut lines = rows(text);

    match lines.next() {
        Some((_, header)) if header == RATINGS_HEADER => {}
        Some((n, header)) => {
            return Err(vec![err(
                n,
                1,
                format!("expected header `{RATINGS_HEADER}`, found `{header}`"),
            )])
        }
        None => return Err(vec![err(1, 1, "empty file: missing header")]),
    }

    for (n, line) in lines {
        let Some(fields) = split_fields(n, line, 2, &mut errors) else {
            continue;
        };
        let id = fields[0].trim();
        if id.is_empty() {
            errors.push(err(n, 1, "empty id"));
            continue;
        }
        if out.rows.iter().any(|(existing, _)| existing == id) {
            errors.push(err(n, 1, format!("duplicate id `{id}`")));
            continue;
        }
        match fields[1].trim().parse::<f64>() {
            Ok(r) if r.is_finite() && r >= 0.0 => out.rows.push((id.to_string(), r)),
            Ok(r) => errors.push(err(n, 2, format!("rating {r} must be a non-negative real"))),
            Err(_) => errors.push(err(n, 2, format!("cannot parse rating `{}`", fields[1]))),
        }
    }

    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

/// Serializes a rating vector (LF endings, deterministic id order).
pub fn emit_ratings(ratings: &perfeq_core::model::RatingVector) -> String {
    let mut out = String::from(RATINGS_HEADER);
    out.push('\n');
    for (id, r) in ratings.iter() {
        out.push_str(&format!("{id},{r}\n"));
    }
    out
}

/// Assembles and validates a tournament from parsed files. A non-empty
/// violation list is returned as the error.
pub fn load_tournament(
    players: &PlayersFile,
    games: &GamesFile,
    default_rating: Option<f64>,
) -> Result<Tournament, Vec<Violation>> {
    let t = Tournament::new(
        players
            .rows
            .iter()
            .map(|r| Player::new(r.id.as_str(), r.name.as_str(), r.rating))
            .collect(),
        games
            .rows
            .iter()
            .map(|r| GameRecord::new(r.a.as_str(), r.b.as_str(), r.score_a))
            .collect(),
        default_rating,
    );
    let violations = t.validate();
    if violations.is_empty() {
        Ok(t)
    } else {
        Err(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_players_file() {
        let f = parse_players("id,name,rating\n1,Aronian,2801\n2,Unrated,\n").unwrap();
        assert_eq!(f.rows.len(), 2);
        assert_eq!(f.rows[0].name, "Aronian");
        assert_eq!(f.rows[0].rating, Some(2801.0));
        assert_eq!(f.rows[1].rating, None);
    }

    #[test]
    fn rejects_wrong_header() {
        let errs = parse_players("id,rating\n").unwrap_err();
        assert_eq!(errs[0].line, 1);
        assert!(errs[0].message.contains("header"));
    }

    #[test]
    fn rejects_duplicate_ids_with_line_numbers() {
        let errs = parse_players("id,name,rating\n1,A,\n1,B,\n").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, 3);
        assert!(errs[0].message.contains("duplicate"));
    }

    #[test]
    fn collects_every_bad_row() {
        let errs = parse_players("id,name,rating\n1,A,xyz\n2,B,-5\n3,C\n").unwrap_err();
        assert_eq!(errs.len(), 3);
        assert_eq!(errs[0].line, 2);
        assert_eq!(errs[0].column, 3);
        assert_eq!(errs[1].line, 3);
        assert_eq!(errs[2].line, 4);
    }

    #[test]
    fn parses_games_and_rejects_self_play_and_range() {
        let f = parse_games("a,b,score_a\n1,2,0.5\n2,3,1\n").unwrap();
        assert_eq!(f.rows.len(), 2);

        let errs = parse_games("a,b,score_a\n1,1,0.5\n").unwrap_err();
        assert!(errs[0].message.contains("self-play"));

        let errs = parse_games("a,b,score_a\n1,2,1.5\n").unwrap_err();
        assert_eq!(errs[0].line, 2);
        assert_eq!(errs[0].column, 3);
        assert!(errs[0].message.contains("outside"));
    }

    #[test]
    fn players_round_trip() {
        let text = "id,name,rating\n1,Aronian,2801\n2,Unrated,\n3,Half,2700.5\n";
        let parsed = parse_players(text).unwrap();
        assert_eq!(emit_players(&parsed), text);
    }

    #[test]
    fn games_round_trip_canonical_scores() {
        let text = "a,b,score_a\n1,2,0.5\n2,3,1\n3,1,0\n1,3,0.75\n";
        let parsed = parse_games(text).unwrap();
        assert_eq!(emit_games(&parsed), text);
    }

    #[test]
    fn load_tournament_surfaces_violations() {
        let players = parse_players("id,name,rating\n1,A,\n2,B,\n3,Idle,\n").unwrap();
        let games = parse_games("a,b,score_a\n1,2,0.5\n").unwrap();
        let violations = load_tournament(&players, &games, Some(2000.0)).unwrap_err();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::NoGames { id } if id.as_str() == "3")));
    }

    #[test]
    fn load_tournament_ok() {
        let players = parse_players("id,name,rating\n1,A,2000\n2,B,2100\n").unwrap();
        let games = parse_games("a,b,score_a\n1,2,0.5\n").unwrap();
        let t = load_tournament(&players, &games, None).unwrap();
        assert_eq!(t.player_count(), 2);
        assert_eq!(t.games().len(), 1);
    }

    #[test]
    fn ratings_parse_and_round_trip() {
        let f = parse_ratings("id,rating\na,2100\nb,2200.5\n").unwrap();
        assert_eq!(f.rows.len(), 2);
        let mut v = perfeq_core::model::RatingVector::new();
        for (id, r) in &f.rows {
            v.insert(id.as_str(), *r);
        }
        assert_eq!(emit_ratings(&v), "id,rating\na,2100\nb,2200.5\n");

        let errs = parse_ratings("id,rating\na,-3\n").unwrap_err();
        assert_eq!(errs[0].line, 2);
        assert_eq!(errs[0].column, 2);
    }

    #[test]
    fn empty_games_file_yields_no_games_violations() {
        let players = parse_players("id,name,rating\n1,A,2000\n2,B,2100\n").unwrap();
        let games = parse_games("a,b,score_a\n").unwrap();
        let violations = load_tournament(&players, &games, None).unwrap_err();
        assert_eq!(
            violations
                .iter()
                .filter(|v| matches!(v, Violation::NoGames { .. }))
                .count(),
            2
        );
    }
}
