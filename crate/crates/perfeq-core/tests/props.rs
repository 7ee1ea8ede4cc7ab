//! Property-based invariants for the model and the rating solvers.

use proptest::prelude::*;

use perfeq_core::generate::{random_pairing, round_robin, ResultRule};
use perfeq_core::rating::{expected_score, g, g_prime, solve_tpr, EloParams};

fn params() -> EloParams {
    EloParams::default()
}

fn opponents() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..4000.0f64, 1..16)
}

fn rule() -> impl Strategy<Value = ResultRule> {
    prop_oneof![
        Just(ResultRule::AllDraws),
        Just(ResultRule::Decisive),
        Just(ResultRule::Mixed),
    ]
}

proptest! {
    /// The two sides of a game expect exactly one point between them.
    #[test]
    fn expected_score_complement(a in 0.0..4000.0f64, b in 0.0..4000.0f64) {
        let p = params();
        let ab = expected_score(a, b, &p).unwrap();
        let ba = expected_score(b, a, &p).unwrap();
        prop_assert!((ab + ba - 1.0).abs() <= 1e-15);
        prop_assert!(ab > 0.0 && ab < 1.0);
    }

    /// g is strictly increasing in the candidate rating.
    #[test]
    fn g_strictly_increasing(opps in opponents(), y in -1000.0..5000.0f64, gap in 1e-6..2000.0f64) {
        let p = params();
        let lo = g(y, &opps, &p).unwrap();
        let hi = g(y + gap, &opps, &p).unwrap();
        prop_assert!(lo < hi, "g({y}) = {lo} !< g({}) = {hi}", y + gap);
    }

    /// The solver hits the requested score residual.
    #[test]
    fn solve_tpr_residual(opps in opponents(), frac in 0.01..0.99f64) {
        let p = params();
        let m = frac * opps.len() as f64;
        let y = solve_tpr(&opps, m, &p).unwrap();
        let back = g(y, &opps, &p).unwrap();
        prop_assert!((back - m).abs() <= p.root_tol);
    }

    /// A higher score always requires a higher rating.
    #[test]
    fn solve_tpr_monotone_in_score(
        opps in opponents(),
        f1 in 0.02..0.97f64,
        bump in 0.001..0.02f64,
    ) {
        let p = params();
        let k = opps.len() as f64;
        let m1 = f1 * k;
        let m2 = (f1 + bump) * k;
        let y1 = solve_tpr(&opps, m1, &p).unwrap();
        let y2 = solve_tpr(&opps, m2, &p).unwrap();
        prop_assert!(y1 < y2);
    }

    /// Shifting every opponent shifts the solution by the same amount.
    #[test]
    fn solve_tpr_translation_equivariant(
        opps in opponents(),
        frac in 0.05..0.95f64,
        shift in -500.0..500.0f64,
    ) {
        let p = params();
        let m = frac * opps.len() as f64;
        let base = solve_tpr(&opps, m, &p).unwrap();
        let shifted_opps: Vec<f64> = opps.iter().map(|o| o + shift).collect();
        let shifted = solve_tpr(&shifted_opps, m, &p).unwrap();
        prop_assert!((shifted - (base + shift)).abs() <= 1e-6,
            "shift {shift}: {shifted} vs {}", base + shift);
    }

    /// Analytic derivative matches central finite differences. The probe
    /// point stays within a couple of scales of the opponents' range:
    /// further out g' underflows toward zero and the finite difference
    /// drowns in cancellation noise, so neither side is meaningful there.
    #[test]
    fn g_prime_matches_finite_differences(opps in opponents(), offset in -800.0..800.0f64) {
        let p = params();
        let h = 1e-3;
        let mid = opps.iter().sum::<f64>() / opps.len() as f64;
        let y = mid + offset;
        let analytic = g_prime(y, &opps, &p).unwrap();
        let numeric = (g(y + h, &opps, &p).unwrap() - g(y - h, &opps, &p).unwrap()) / (2.0 * h);
        prop_assert!((analytic - numeric).abs() <= 1e-6 * numeric.abs(),
            "analytic {analytic} vs numeric {numeric}");
    }

    /// Generated round-robins are valid, conserve points exactly, and have
    /// the right opponent counts.
    #[test]
    fn round_robin_invariants(n in 2usize..12, seed in any::<u64>(), rule in rule()) {
        let t = round_robin(n, seed, rule).unwrap();
        prop_assert!(t.validate().is_empty());
        let scores = t.scores().unwrap();
        let total: f64 = scores.values().map(|l| l.points).sum();
        // Half-point scores sum exactly in binary floating point.
        prop_assert_eq!(total, t.games().len() as f64);
        let mut opponent_entries = 0;
        for p in t.players() {
            let opps = t.opponents_of(p.id.as_str()).unwrap();
            prop_assert_eq!(opps.len(), n - 1);
            opponent_entries += opps.len();
        }
        prop_assert_eq!(opponent_entries, 2 * t.games().len());
    }

    /// Same for random pairings, including odd fields with byes.
    #[test]
    fn random_pairing_invariants(
        n in 2usize..15,
        rounds in 2usize..8,
        seed in any::<u64>(),
        rule in rule(),
    ) {
        let t = random_pairing(n, rounds, seed, rule).unwrap();
        prop_assert!(t.validate().is_empty());
        let scores = t.scores().unwrap();
        let total: f64 = scores.values().map(|l| l.points).sum();
        prop_assert_eq!(total, t.games().len() as f64);
        for line in scores.values() {
            prop_assert!(line.games as usize <= rounds);
        }
        let opponent_entries: usize = t
            .players()
            .iter()
            .map(|p| t.opponents_of(p.id.as_str()).unwrap().len())
            .sum();
        prop_assert_eq!(opponent_entries, 2 * t.games().len());
    }

    /// Generators are pure functions of their seeds.
    #[test]
    fn generators_deterministic(n in 2usize..10, seed in any::<u64>(), rule in rule()) {
        prop_assert_eq!(
            round_robin(n, seed, rule).unwrap(),
            round_robin(n, seed, rule).unwrap()
        );
    }
}
