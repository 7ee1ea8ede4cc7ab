//! Synthetic tournament generators, deterministic under a fixed seed.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{GameRecord, Player, Tournament};
use crate::rng::SplitMix64;

/// Initial rating assigned to generated players (as the tournament default).
pub const GENERATED_DEFAULT_RATING: f64 = 2000.0;

/// How a game's result is drawn from the seeded generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultRule {
    /// Every game is a draw.
    AllDraws,
    /// Win or loss, never a draw.
    Decisive,
    /// Uniform over win, draw, loss.
    Mixed,
}

impl ResultRule {
    fn draw(self, rng: &mut SplitMix64) -> f64 {
        match self {
            ResultRule::AllDraws => 0.5,
            ResultRule::Decisive => {
                if rng.next_u64() & 1 == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            ResultRule::Mixed => match rng.next_below(3) {
                0 => 0.0,
                1 => 0.5,
                _ => 1.0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerateError {
    /// Fewer than two players.
    TooFewPlayers { n: usize },
    /// Zero rounds requested.
    NoRounds,
    /// An odd field with a single round leaves the bye player without any
    /// games, which validation rejects.
    OddFieldSingleRound { n: usize },
}

impl fmt::Display for GenerateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenerateError::TooFewPlayers { n } => {
                write!(f, "need at least 2 players, got {n}")
            }
            GenerateError::NoRounds => write!(f, "need at least 1 round"),
            GenerateError::OddFieldSingleRound { n } => {
                write!(f, "{n} players is odd: a single round leaves the bye player unplayed; use rounds >= 2")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GenerateError {}

fn make_players(n: usize) -> Vec<Player> {
    (1..=n)
        .map(|i| Player::new(format!("p{i}"), format!("Player {i}"), None))
        .collect()
}

/// A single round-robin on `n` players: every unordered pair plays exactly
/// once, results drawn from `rule` using `seed`.
pub fn round_robin(n: usize, seed: u64, rule: ResultRule) -> Result<Tournament, GenerateError> {
    if n < 2 {
        return Err(GenerateError::TooFewPlayers { n });
    }
    let players = make_players(n);
    let mut rng = SplitMix64::new(seed);
    let mut games = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            games.push(GameRecord::new(
                players[i].id.clone(),
                players[j].id.clone(),
                rule.draw(&mut rng),
            ));
        }
    }
    Ok(Tournament::new(
        players,
        games,
        Some(GENERATED_DEFAULT_RATING),
    ))
}

/// `rounds` rounds of random perfect matchings on `n` players (one rotating
/// bye per round when `n` is odd), results drawn from `rule`. Approximates
/// a sparse pairing graph: no player exceeds `rounds` games, and repeated
/// pairings across rounds are possible.
pub fn random_pairing(
    n: usize,
    rounds: usize,
    seed: u64,
    rule: ResultRule,
) -> Result<Tournament, GenerateError> {
    if n < 2 {
        return Err(GenerateError::TooFewPlayers { n });
    }
    if rounds == 0 {
        return Err(GenerateError::NoRounds);
    }
    if n % 2 == 1 && rounds == 1 {
        return Err(GenerateError::OddFieldSingleRound { n });
    }

    let players = make_players(n);
    let mut rng = SplitMix64::new(seed);
    let mut games = Vec::new();
    for round in 0..rounds {
        let mut order: Vec<usize> = (0..n).collect();
        if n % 2 == 1 {
            // Rotate the bye so nobody sits out twice before everyone has.
            order.remove(round % n);
        }
        // Fisher-Yates, then pair adjacent entries.
        for i in (1..order.len()).rev() {
            let j = rng.next_below(i as u64 + 1) as usize;
            order.swap(i, j);
        }
        for pair in order.chunks_exact(2) {
            games.push(GameRecord::new(
                players[pair[0]].id.clone(),
                players[pair[1]].id.clone(),
                rule.draw(&mut rng),
            ));
        }
    }
    Ok(Tournament::new(
        players,
        games,
        Some(GENERATED_DEFAULT_RATING),
    ))
}

/// Stable id for the `i`-th generated player (1-based), matching the ids
/// used by the generators.
pub fn player_id(i: usize) -> String {
    format!("p{i}")
}
