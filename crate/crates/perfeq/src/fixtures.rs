//! Bundled golden fixtures: real tournaments with published per-player
//! performance and equilibrium ratings, embedded at compile time.
//!
//! Each fixture ships three files under `fixtures/<name>/`:
//!
//! - `players.csv`, `games.csv` — the tournament in the io module's formats;
//! - `manifest.json` — player/game counts, the average rating, the expected
//!   per-player columns the test suite asserts against, and a provenance
//!   note describing exactly how the files were produced.
//!
//! The CSV files are written by the `fixture_gen` binary from the manifest
//! (see each manifest's `provenance` field); tests regenerate what is cheap
//! to regenerate and verify the rest structurally.

use serde::{Deserialize, Serialize};

use perfeq_core::model::Tournament;

use crate::io::{self, GamesFile, PlayersFile};
use crate::realize::realize_scores;

/// Expected report row for one player, as published.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedRow {
    pub id: String,
    pub name: String,
    pub rating: Option<f64>,
    pub points: f64,
    /// Published performance rating against initial ratings, when the
    /// source lists one.
    pub tpr: Option<i64>,
    /// Published equilibrium rating.
    pub ppr: i64,
}

/// Fixture metadata and golden expectations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub event: String,
    pub player_count: usize,
    pub game_count: usize,
    pub default_rating: Option<f64>,
    pub average_rating: f64,
    /// Initialization mode the expected columns assume.
    pub init: String,
    pub provenance: String,
    /// Pairs that never met (ids), for otherwise-complete round-robins.
    pub unplayed_pairs: Vec<[String; 2]>,
    /// Ids excluded from golden assertions, with the reason recorded in
    /// `provenance`.
    pub excluded: Vec<String>,
    pub expected: Vec<ExpectedRow>,
}

/// One bundled fixture.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub players_csv: &'static str,
    pub games_csv: &'static str,
    pub manifest_json: &'static str,
}

pub const INTERZONAL_1970: Fixture = Fixture {
    name: "interzonal-1970",
    players_csv: include_str!("../fixtures/interzonal-1970/players.csv"),
    games_csv: include_str!("../fixtures/interzonal-1970/games.csv"),
    manifest_json: include_str!("../fixtures/interzonal-1970/manifest.json"),
};

pub const PALMA_2017: Fixture = Fixture {
    name: "palma-2017",
    players_csv: include_str!("../fixtures/palma-2017/players.csv"),
    games_csv: include_str!("../fixtures/palma-2017/games.csv"),
    manifest_json: include_str!("../fixtures/palma-2017/manifest.json"),
};

pub const SHARJAH_2017: Fixture = Fixture {
    name: "sharjah-2017",
    players_csv: include_str!("../fixtures/sharjah-2017/players.csv"),
    games_csv: include_str!("../fixtures/sharjah-2017/games.csv"),
    manifest_json: include_str!("../fixtures/sharjah-2017/manifest.json"),
};

pub fn all() -> [&'static Fixture; 3] {
    [&INTERZONAL_1970, &PALMA_2017, &SHARJAH_2017]
}

impl Fixture {
    /// Parses the embedded manifest. Panics only if the bundled file is
    /// corrupt, which the test suite rules out.
    pub fn manifest(&self) -> Manifest {
        serde_json::from_str(self.manifest_json)
            .unwrap_or_else(|e| panic!("fixture {}: bad manifest: {e}", self.name))
    }

    /// Loads and validates the embedded tournament.
    pub fn tournament(&self) -> Tournament {
        let manifest = self.manifest();
        let players = io::parse_players(self.players_csv)
            .unwrap_or_else(|e| panic!("fixture {}: bad players.csv: {:?}", self.name, e));
        let games = io::parse_games(self.games_csv)
            .unwrap_or_else(|e| panic!("fixture {}: bad games.csv: {:?}", self.name, e));
        io::load_tournament(&players, &games, manifest.default_rating)
            .unwrap_or_else(|v| panic!("fixture {}: invalid tournament: {:?}", self.name, v))
    }
}

/// Builds the players and games files for a (near-)complete round-robin
/// fixture straight from its manifest: every pair not listed in
/// `unplayed_pairs` meets once, and per-game results realizing the expected
/// score totals come from the deterministic flow construction. Returns
/// `None` when the totals are unrealizable.
pub fn synthesize_round_robin(manifest: &Manifest) -> Option<(PlayersFile, GamesFile)> {
    let n = manifest.expected.len();
    let ids: Vec<&str> = manifest.expected.iter().map(|r| r.id.as_str()).collect();
    let unplayed: Vec<(usize, usize)> = manifest
        .unplayed_pairs
        .iter()
        .map(|[a, b]| {
            let ia = ids.iter().position(|id| id == a)?;
            let ib = ids.iter().position(|id| id == b)?;
            Some((ia.min(ib), ia.max(ib)))
        })
        .collect::<Option<_>>()?;

    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if !unplayed.contains(&(i, j)) {
                pairs.push((i, j));
            }
        }
    }

    let points: Vec<f64> = manifest.expected.iter().map(|r| r.points).collect();
    let scores = realize_scores(n, &pairs, &points)?;

    let players = PlayersFile {
        rows: manifest
            .expected
            .iter()
            .map(|r| io::PlayerRow {
                id: r.id.clone(),
                name: r.name.clone(),
                rating: r.rating,
            })
            .collect(),
    };
    let games = GamesFile {
        rows: pairs
            .iter()
            .zip(scores.iter())
            .map(|(&(i, j), &s)| io::GameRow {
                a: ids[i].to_string(),
                b: ids[j].to_string(),
                score_a: s,
            })
            .collect(),
    };
    Some((players, games))
}
