//! Tournament domain types: players, game records, rating vectors,
//! validation, and derived per-player quantities.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::borrow::Borrow;
use core::fmt;

/// Opaque player identifier, unique within a tournament.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlayerId(String);

impl PlayerId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PlayerId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl From<String> for PlayerId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

impl Borrow<str> for PlayerId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Tournament entrant: identifier, display name, optional initial rating.
#[derive(Debug, Clone, PartialEq)]
pub struct Player {
    pub id: PlayerId,
    pub name: String,
    /// Initial Elo rating; players without one fall back to the
    /// tournament's `default_rating`.
    pub rating: Option<f64>,
}

impl Player {
    pub fn new(id: impl Into<PlayerId>, name: impl Into<String>, rating: Option<f64>) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            rating,
        }
    }
}

/// One game between two players. `score_a` is a's result in `[0, 1]`;
/// b implicitly receives `1 - score_a`. Chess results are `0`, `0.5`, `1`,
/// but any value in `[0, 1]` is accepted (fractional outcomes are valid).
#[derive(Debug, Clone, PartialEq)]
pub struct GameRecord {
    pub a: PlayerId,
    pub b: PlayerId,
    pub score_a: f64,
}

impl GameRecord {
    pub fn new(a: impl Into<PlayerId>, b: impl Into<PlayerId>, score_a: f64) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            score_a,
        }
    }
}

/// A tournament: entrants plus the full list of pairwise results.
///
/// Values are immutable after construction and safe to share across threads
/// read-only. Construction does not validate; call [`Tournament::validate`]
/// and treat a non-empty violation list as invalid input.
#[derive(Debug, Clone, PartialEq)]
pub struct Tournament {
    players: Vec<Player>,
    games: Vec<GameRecord>,
    default_rating: Option<f64>,
}

/// A single validation failure. Violations are data, not faults: a
/// validator returns all of them rather than stopping at the first.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Two entrants share an id.
    DuplicatePlayer { id: PlayerId },
    /// A game references an id that is not in the player list.
    UnknownPlayer { id: PlayerId, game: usize },
    /// A game pairs a player against themselves.
    SelfPlay { id: PlayerId, game: usize },
    /// A game score lies outside `[0, 1]` or is not finite.
    ScoreOutOfRange { value: f64, game: usize },
    /// A player has no games; such entrants have no defined performance
    /// rating and are rejected.
    NoGames { id: PlayerId },
    /// An initial rating is negative or not finite.
    InvalidRating { id: PlayerId, value: f64 },
    /// The default rating is negative or not finite.
    InvalidDefaultRating { value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicatePlayer { id } => write!(f, "duplicate player id `{id}`"),
            Violation::UnknownPlayer { id, game } => {
                write!(f, "game {game}: no such player `{id}`")
            }
            Violation::SelfPlay { id, game } => {
                write!(f, "game {game}: player `{id}` paired against themselves")
            }
            Violation::ScoreOutOfRange { value, game } => {
                write!(f, "game {game}: score {value} outside [0, 1]")
            }
            Violation::NoGames { id } => write!(f, "player `{id}` has no games"),
            Violation::InvalidRating { id, value } => {
                write!(f, "player `{id}` has invalid rating {value}")
            }
            Violation::InvalidDefaultRating { value } => {
                write!(f, "invalid default rating {value}")
            }
        }
    }
}

/// Errors from model operations whose preconditions do not hold.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// Lookup of an id that is not a tournament player.
    NoSuchPlayer(PlayerId),
    /// The tournament fails validation; all violations attached.
    Invalid(Vec<Violation>),
    /// Players listed have neither an own rating nor a default to fall
    /// back on.
    UnresolvedRatings(Vec<PlayerId>),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::NoSuchPlayer(id) => write!(f, "no such player `{id}`"),
            ModelError::Invalid(violations) => {
                write!(f, "invalid tournament ({} violations):", violations.len())?;
                for v in violations {
                    write!(f, " {v};")?;
                }
                Ok(())
            }
            ModelError::UnresolvedRatings(ids) => {
                write!(f, "no initial rating and no default rating for:")?;
                for id in ids {
                    write!(f, " `{id}`")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ModelError {}

/// Per-player derived score line: games played and points scored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreLine {
    /// Number of games the player appeared in (`k`).
    pub games: u32,
    /// Total points scored (`m`), `0 <= m <= k`.
    pub points: f64,
    /// Every game was won outright (`m = k` holds exactly).
    pub perfect: bool,
    /// Every game was lost outright (`m = 0` holds exactly).
    pub zero: bool,
}

impl Tournament {
    pub fn new(players: Vec<Player>, games: Vec<GameRecord>, default_rating: Option<f64>) -> Self {
        Self {
            players,
            games,
            default_rating,
        }
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn games(&self) -> &[GameRecord] {
        &self.games
    }

    pub fn default_rating(&self) -> Option<f64> {
        self.default_rating
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    /// Index of a player id in the player list, if present.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.players.iter().position(|p| p.id.as_str() == id)
    }

    /// Checks every structural invariant and returns all violations found.
    /// An empty list means the tournament is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();

        let mut seen: BTreeMap<&str, ()> = BTreeMap::new();
        for p in &self.players {
            if seen.insert(p.id.as_str(), ()).is_some() {
                violations.push(Violation::DuplicatePlayer { id: p.id.clone() });
            }
            if let Some(r) = p.rating {
                if !r.is_finite() || r < 0.0 {
                    violations.push(Violation::InvalidRating {
                        id: p.id.clone(),
                        value: r,
                    });
                }
            }
        }
        if let Some(d) = self.default_rating {
            if !d.is_finite() || d < 0.0 {
                violations.push(Violation::InvalidDefaultRating { value: d });
            }
        }

        let mut played = alloc::vec![false; self.players.len()];
        for (g, game) in self.games.iter().enumerate() {
            if game.a == game.b {
                violations.push(Violation::SelfPlay {
                    id: game.a.clone(),
                    game: g,
                });
            }
            for id in [&game.a, &game.b] {
                match self.index_of(id.as_str()) {
                    Some(i) => played[i] = true,
                    None => violations.push(Violation::UnknownPlayer {
                        id: id.clone(),
                        game: g,
                    }),
                }
            }
            if !(game.score_a.is_finite() && (0.0..=1.0).contains(&game.score_a)) {
                violations.push(Violation::ScoreOutOfRange {
                    value: game.score_a,
                    game: g,
                });
            }
        }

        for (i, p) in self.players.iter().enumerate() {
            if !played[i] {
                violations.push(Violation::NoGames { id: p.id.clone() });
            }
        }

        violations
    }

    /// The multiset of `id`'s opponents, one entry per game in game order;
    /// repeated opponents appear with multiplicity.
    pub fn opponents_of(&self, id: &str) -> Result<Vec<PlayerId>, ModelError> {
        if self.index_of(id).is_none() {
            return Err(ModelError::NoSuchPlayer(PlayerId::new(id)));
        }
        let mut opponents = Vec::new();
        for game in &self.games {
            if game.a.as_str() == id {
                opponents.push(game.b.clone());
            } else if game.b.as_str() == id {
                opponents.push(game.a.clone());
            }
        }
        Ok(opponents)
    }

    /// Exact per-player `(k, m)` score lines.
    ///
    /// Zero and perfect scores are detected structurally — `m = k` iff every
    /// game was won outright, `m = 0` iff every game was lost outright — so
    /// the boundary classification is exact for any score values, not only
    /// half-point ones (sums of half-points are themselves exact in `f64`).
    pub fn scores(&self) -> Result<BTreeMap<PlayerId, ScoreLine>, ModelError> {
        let sheet = Sheet::build(self)?;
        Ok(sheet
            .ids
            .iter()
            .zip(sheet.lines.iter())
            .map(|(id, line)| (id.clone(), *line))
            .collect())
    }

    /// Initial rating for each player, falling back to the default.
    /// Errors list every player left unresolved.
    pub fn resolved_ratings(&self) -> Result<Vec<f64>, ModelError> {
        let mut missing = Vec::new();
        let mut resolved = Vec::with_capacity(self.players.len());
        for p in &self.players {
            match p.rating.or(self.default_rating) {
                Some(r) => resolved.push(r),
                None => missing.push(p.id.clone()),
            }
        }
        if missing.is_empty() {
            Ok(resolved)
        } else {
            Err(ModelError::UnresolvedRatings(missing))
        }
    }
}

/// A rating for every player of a tournament (non-negative Elo points).
/// Backed by an ordered map, so iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RatingVector {
    values: BTreeMap<PlayerId, f64>,
}

impl RatingVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<PlayerId>, rating: f64) {
        self.values.insert(id.into(), rating);
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.values.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PlayerId, f64)> {
        self.values.iter().map(|(id, &r)| (id, r))
    }

    /// True when the vector covers exactly the tournament's player set.
    pub fn covers(&self, t: &Tournament) -> bool {
        self.values.len() == t.player_count()
            && t.players()
                .iter()
                .all(|p| self.values.contains_key(p.id.as_str()))
    }

    /// Sup-norm distance to another vector over the union of keys; missing
    /// entries count as infinitely far.
    pub fn sup_distance(&self, other: &RatingVector) -> f64 {
        if self.values.len() != other.values.len() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for (id, r) in self.iter() {
            match other.get(id.as_str()) {
                Some(o) => {
                    let d = crate::math::abs(r - o);
                    if d > worst {
                        worst = d;
                    }
                }
                None => return f64::INFINITY,
            }
        }
        worst
    }
}

impl FromIterator<(PlayerId, f64)> for RatingVector {
    fn from_iter<I: IntoIterator<Item = (PlayerId, f64)>>(iter: I) -> Self {
        Self {
            values: iter.into_iter().collect(),
        }
    }
}

/// Validated, index-based view of a tournament used by the solvers:
/// player order mirrors `Tournament::players`, opponents are index lists
/// with multiplicity in game order.
#[derive(Debug, Clone)]
pub(crate) struct Sheet {
    pub ids: Vec<PlayerId>,
    pub lines: Vec<ScoreLine>,
    pub opponents: Vec<Vec<u32>>,
}

impl Sheet {
    pub fn build(t: &Tournament) -> Result<Self, ModelError> {
        let violations = t.validate();
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }

        let n = t.players.len();
        let index: BTreeMap<&str, u32> = t
            .players
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.as_str(), i as u32))
            .collect();

        let mut games = alloc::vec![0u32; n];
        let mut points = alloc::vec![0.0f64; n];
        let mut wins = alloc::vec![0u32; n];
        let mut losses = alloc::vec![0u32; n];
        let mut opponents: Vec<Vec<u32>> = alloc::vec![Vec::new(); n];

        for game in &t.games {
            let a = index[game.a.as_str()] as usize;
            let b = index[game.b.as_str()] as usize;
            games[a] += 1;
            games[b] += 1;
            points[a] += game.score_a;
            points[b] += 1.0 - game.score_a;
            if game.score_a == 1.0 {
                wins[a] += 1;
                losses[b] += 1;
            } else if game.score_a == 0.0 {
                wins[b] += 1;
                losses[a] += 1;
            }
            opponents[a].push(b as u32);
            opponents[b].push(a as u32);
        }

        let lines = (0..n)
            .map(|i| ScoreLine {
                games: games[i],
                // Pin the boundary sums exactly; accumulated points may
                // carry rounding for non-half scores.
                points: if wins[i] == games[i] {
                    f64::from(games[i])
                } else if losses[i] == games[i] {
                    0.0
                } else {
                    points[i]
                },
                perfect: wins[i] == games[i],
                zero: losses[i] == games[i],
            })
            .collect();

        Ok(Self {
            ids: t.players.iter().map(|p| p.id.clone()).collect(),
            lines,
            opponents,
        })
    }

    /// Rating vector -> index-aligned array, requiring exact coverage.
    pub fn pack(&self, x: &RatingVector) -> Result<Vec<f64>, ModelError> {
        if x.len() != self.ids.len() {
            return Err(ModelError::Invalid(Vec::new()));
        }
        let mut out = Vec::with_capacity(self.ids.len());
        let mut missing = Vec::new();
        for id in &self.ids {
            match x.get(id.as_str()) {
                Some(r) => out.push(r),
                None => missing.push(id.clone()),
            }
        }
        if missing.is_empty() {
            Ok(out)
        } else {
            Err(ModelError::UnresolvedRatings(missing))
        }
    }

    pub fn unpack(&self, values: &[f64]) -> RatingVector {
        self.ids
            .iter()
            .cloned()
            .zip(values.iter().copied())
            .collect()
    }
}
