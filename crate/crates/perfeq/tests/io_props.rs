//! Property tests for the file formats: parse and emit are mutually
//! inverse on well-formed data.

use proptest::prelude::*;

use perfeq::io::{
    emit_games, emit_players, parse_games, parse_players, GameRow, GamesFile, PlayerRow,
    PlayersFile,
};

fn id() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9-]{0,11}"
}

fn name() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z (%!?*$&'\\.)-]{0,19}[A-Za-z]"
}

fn players_file() -> impl Strategy<Value = PlayersFile> {
    prop::collection::btree_map(id(), (name(), prop::option::of(0u32..4_000_000)), 0..20).prop_map(
        |rows| PlayersFile {
            rows: rows
                .into_iter()
                .map(|(id, (name, rating))| PlayerRow {
                    id,
                    name,
                    // Quarter-point ratings exercise fractional emission.
                    rating: rating.map(|r| f64::from(r) / 1000.0),
                })
                .collect(),
        },
    )
}

fn games_file() -> impl Strategy<Value = GamesFile> {
    prop::collection::vec((id(), id(), 0u32..=4), 0..40).prop_map(|rows| GamesFile {
        rows: rows
            .into_iter()
            .filter(|(a, b, _)| a != b)
            .map(|(a, b, quarter)| GameRow {
                a,
                b,
                score_a: f64::from(quarter) / 4.0,
            })
            .collect(),
    })
}

proptest! {
    #[test]
    fn players_parse_emit_round_trip(file in players_file()) {
        let text = emit_players(&file);
        let back = parse_players(&text).expect("emitted file parses");
        prop_assert_eq!(back, file);
    }

    #[test]
    fn games_parse_emit_round_trip(file in games_file()) {
        let text = emit_games(&file);
        let back = parse_games(&text).expect("emitted file parses");
        prop_assert_eq!(back, file);
    }

    /// Emission is injective enough to be diffable: distinct parsed files
    /// never collide on text.
    #[test]
    fn emitted_text_is_stable(file in players_file()) {
        prop_assert_eq!(emit_players(&file), emit_players(&file.clone()));
    }
}
