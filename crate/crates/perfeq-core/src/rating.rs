//! Elo expected-score arithmetic and performance-rating solvers.
//!
//! The central object is the score function
//! `g(y) = sum_j 1 / (1 + base^((opp_j - y) / scale))`: a player rated `y`
//! expects `g(y)` points against opponents rated `opp_j`. `g` is strictly
//! increasing in `y` with limits `0` and `k`, so for any achieved score
//! `0 < m < k` the equation `g(y) = m` has exactly one root — the
//! performance rating. [`solve_tpr`] finds it by bracketed bisection, which
//! monotonicity makes unconditionally convergent.

use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::model::{ModelError, RatingVector, Sheet, Tournament};

/// Elo curve constants and root-finding controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EloParams {
    /// Rating-difference scale of the expected-score curve (400).
    pub scale: f64,
    /// Base of the exponential (10).
    pub base: f64,
    /// Root tolerance **in score units**: a solve returns `y` with
    /// `|g(y) - m| <= root_tol`. Score units are used because the defining
    /// equation constrains the score; rating sensitivity varies with `g'`.
    pub root_tol: f64,
    /// Half-width padding of the initial bisection bracket, in rating
    /// points, around the opponents' rating range.
    pub bracket_pad: f64,
}

impl Default for EloParams {
    fn default() -> Self {
        Self {
            scale: 400.0,
            base: 10.0,
            root_tol: 1e-9,
            bracket_pad: 4000.0,
        }
    }
}

impl EloParams {
    fn check(&self) -> Result<(), RatingError> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(RatingError::BadParams("scale must be positive"));
        }
        if !(self.base.is_finite() && self.base > 1.0) {
            return Err(RatingError::BadParams("base must exceed 1"));
        }
        if !(self.root_tol.is_finite() && self.root_tol > 0.0) {
            return Err(RatingError::BadParams("root_tol must be positive"));
        }
        if !(self.bracket_pad.is_finite() && self.bracket_pad > 0.0) {
            return Err(RatingError::BadParams("bracket_pad must be positive"));
        }
        Ok(())
    }
}

/// Output range of the rating map: results are clamped into `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampBounds {
    pub lo: f64,
    pub hi: f64,
}

impl ClampBounds {
    pub fn new(lo: f64, hi: f64) -> Result<Self, RatingError> {
        let b = Self { lo, hi };
        b.check()?;
        Ok(b)
    }

    /// Default bounds for a tournament: `[0, c]` where `c` is
    /// [`compute_c`], the largest sum of any player's opponents' initial
    /// ratings — even a perfect score should not rate above the sum of the
    /// opponents beaten.
    pub fn for_tournament(t: &Tournament) -> Result<Self, RatingError> {
        let c = compute_c(t)?;
        if c <= 0.0 {
            return Err(RatingError::BadParams(
                "tournament opponent-rating sums are all zero; set explicit clamp bounds",
            ));
        }
        Ok(Self { lo: 0.0, hi: c })
    }

    fn check(&self) -> Result<(), RatingError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo >= 0.0 && self.lo < self.hi) {
            return Err(RatingError::BadParams(
                "clamp bounds need 0 <= lo < hi, both finite",
            ));
        }
        Ok(())
    }

    #[inline]
    fn apply(&self, y: f64) -> f64 {
        y.clamp(self.lo, self.hi)
    }
}

/// Continuous extension for zero and perfect scores, for which `g(y) = m`
/// has no root: the score is pulled `delta` points inside `(0, k)` and the
/// interior solve is used. The result is continuous in the opponents'
/// ratings, which the equilibrium map requires.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryParams {
    /// Score margin in `(0, 0.5]` applied at the boundaries.
    pub delta: f64,
}

impl Default for BoundaryParams {
    fn default() -> Self {
        Self { delta: 0.25 }
    }
}

impl BoundaryParams {
    fn check(&self) -> Result<(), RatingError> {
        if !(self.delta.is_finite() && self.delta > 0.0 && self.delta <= 0.5) {
            return Err(RatingError::BadParams("delta must be in (0, 0.5]"));
        }
        Ok(())
    }
}

/// Errors from the rating solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum RatingError {
    /// An input rating or score is NaN or infinite.
    NonFinite,
    /// A parameter violates its documented range.
    BadParams(&'static str),
    /// The opponent list is empty.
    EmptyOpponents,
    /// `solve_tpr` called with `m <= 0` or `m >= k`; use [`solve_boundary`].
    BoundaryScore { m: f64, k: usize },
    /// `solve_boundary` called with an interior score; use [`solve_tpr`].
    InteriorScore { m: f64, k: usize },
    /// Score outside `[0, k]` entirely.
    ScoreOutOfRange { m: f64, k: usize },
    /// Bisection exhausted its iteration budget without reaching
    /// `root_tol` (requires a pathological tolerance/instance).
    NoConvergence { residual: f64 },
    /// The tournament failed validation or rating resolution.
    Model(ModelError),
}

impl fmt::Display for RatingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatingError::NonFinite => write!(f, "non-finite input"),
            RatingError::BadParams(msg) => write!(f, "bad parameters: {msg}"),
            RatingError::EmptyOpponents => write!(f, "empty opponent list"),
            RatingError::BoundaryScore { m, k } => write!(
                f,
                "boundary score m={m} of k={k}: use the boundary extension"
            ),
            RatingError::InteriorScore { m, k } => {
                write!(f, "interior score m={m} of k={k}: use solve_tpr")
            }
            RatingError::ScoreOutOfRange { m, k } => {
                write!(f, "score m={m} outside [0, {k}]")
            }
            RatingError::NoConvergence { residual } => {
                write!(f, "bisection stalled at score residual {residual:e}")
            }
            RatingError::Model(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RatingError {}

impl From<ModelError> for RatingError {
    fn from(e: ModelError) -> Self {
        RatingError::Model(e)
    }
}

#[inline]
fn expected_unchecked(own: f64, opp: f64, params: &EloParams) -> f64 {
    1.0 / (1.0 + math::powf(params.base, (opp - own) / params.scale))
}

/// Expected score of a player rated `own` against one rated `opp`:
/// `1 / (1 + base^((opp - own) / scale))`. Strictly increasing in `own`,
/// strictly decreasing in `opp`; the two players' expectations sum to 1.
pub fn expected_score(own: f64, opp: f64, params: &EloParams) -> Result<f64, RatingError> {
    params.check()?;
    if !(own.is_finite() && opp.is_finite()) {
        return Err(RatingError::NonFinite);
    }
    Ok(expected_unchecked(own, opp, params))
}

fn check_opponents(opponents: &[f64]) -> Result<(), RatingError> {
    if opponents.is_empty() {
        return Err(RatingError::EmptyOpponents);
    }
    if opponents.iter().any(|r| !r.is_finite()) {
        return Err(RatingError::NonFinite);
    }
    Ok(())
}

#[inline]
fn g_unchecked(y: f64, opponents: &[f64], params: &EloParams) -> f64 {
    opponents
        .iter()
        .map(|&opp| expected_unchecked(y, opp, params))
        .sum()
}

/// Total expected score of a player rated `y` against the opponent list:
/// strictly increasing in `y`, approaching `0` and `k` at the extremes.
pub fn g(y: f64, opponents: &[f64], params: &EloParams) -> Result<f64, RatingError> {
    params.check()?;
    check_opponents(opponents)?;
    if !y.is_finite() {
        return Err(RatingError::NonFinite);
    }
    Ok(g_unchecked(y, opponents, params))
}

/// Derivative of [`g`] with respect to `y`:
/// `sum_j (ln base / scale) * u_j / (1 + u_j)^2` with
/// `u_j = base^((opp_j - y) / scale)`. Strictly positive, which is what
/// makes the bisection in [`solve_tpr`] sound.
pub fn g_prime(y: f64, opponents: &[f64], params: &EloParams) -> Result<f64, RatingError> {
    params.check()?;
    check_opponents(opponents)?;
    if !y.is_finite() {
        return Err(RatingError::NonFinite);
    }
    let ln_base = math::ln(params.base);
    Ok(opponents
        .iter()
        .map(|&opp| {
            let u = math::powf(params.base, (opp - y) / params.scale);
            // u / (1+u)^2, written to stay finite when u overflows.
            let e = 1.0 / (1.0 + u);
            ln_base / params.scale * u * e * e
        })
        .sum())
}

const MAX_BRACKET_GROWTH: u32 = 128;
const MAX_BISECTIONS: u32 = 400;

fn solve_interior(opponents: &[f64], m: f64, params: &EloParams) -> Result<f64, RatingError> {
    let mut lo = opponents.iter().copied().fold(f64::INFINITY, f64::min) - params.bracket_pad;
    let mut hi = opponents.iter().copied().fold(f64::NEG_INFINITY, f64::max) + params.bracket_pad;

    // Grow the bracket geometrically until it encloses the root. The limits
    // of g are 0 and k, so for interior m this terminates.
    let mut step = hi - lo;
    let mut growth = 0;
    while g_unchecked(lo, opponents, params) >= m {
        lo -= step;
        step *= 2.0;
        growth += 1;
        if growth > MAX_BRACKET_GROWTH {
            return Err(RatingError::NoConvergence { residual: f64::NAN });
        }
    }
    step = hi - lo;
    while g_unchecked(hi, opponents, params) <= m {
        hi += step;
        step *= 2.0;
        growth += 1;
        if growth > MAX_BRACKET_GROWTH {
            return Err(RatingError::NoConvergence { residual: f64::NAN });
        }
    }

    let mut mid = 0.5 * (lo + hi);
    let mut residual = g_unchecked(mid, opponents, params) - m;
    for _ in 0..MAX_BISECTIONS {
        if math::abs(residual) <= params.root_tol {
            return Ok(mid);
        }
        if residual < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        let next = 0.5 * (lo + hi);
        if next == mid || next <= lo || next >= hi {
            // Interval is at floating-point resolution.
            break;
        }
        mid = next;
        residual = g_unchecked(mid, opponents, params) - m;
    }
    if math::abs(residual) <= params.root_tol {
        Ok(mid)
    } else {
        Err(RatingError::NoConvergence {
            residual: math::abs(residual),
        })
    }
}

/// Performance rating for an interior score: the unique `y` with
/// `g(y) = m`, found by bracketed bisection to `root_tol` in score units.
/// The result is unclamped.
///
/// ```
/// use perfeq_core::rating::{solve_tpr, EloParams};
///
/// // Scoring 10/11 of one game against a 2500 opponent performs 400
/// // points above them.
/// let y = solve_tpr(&[2500.0], 10.0 / 11.0, &EloParams::default()).unwrap();
/// assert!((y - 2900.0).abs() < 1e-3);
/// ```
pub fn solve_tpr(opponents: &[f64], m: f64, params: &EloParams) -> Result<f64, RatingError> {
    params.check()?;
    check_opponents(opponents)?;
    if !m.is_finite() {
        return Err(RatingError::NonFinite);
    }
    let k = opponents.len();
    if m <= 0.0 || m >= k as f64 {
        return Err(RatingError::BoundaryScore { m, k });
    }
    solve_interior(opponents, m, params)
}

/// Performance rating for a zero or perfect score, which the defining
/// equation cannot produce: substitutes `m' = delta` (for `m = 0`) or
/// `m' = k - delta` (for `m = k`) and solves the interior problem. The
/// result is unclamped and continuous in the opponents' ratings.
pub fn solve_boundary(
    opponents: &[f64],
    m: f64,
    params: &EloParams,
    boundary: &BoundaryParams,
) -> Result<f64, RatingError> {
    params.check()?;
    boundary.check()?;
    check_opponents(opponents)?;
    if !m.is_finite() {
        return Err(RatingError::NonFinite);
    }
    let k = opponents.len();
    let shifted = if m == 0.0 {
        boundary.delta
    } else if m == k as f64 {
        k as f64 - boundary.delta
    } else if m > 0.0 && m < k as f64 {
        return Err(RatingError::InteriorScore { m, k });
    } else {
        return Err(RatingError::ScoreOutOfRange { m, k });
    };
    solve_interior(opponents, shifted, params)
}

/// Largest sum, over players, of a player's opponents' initial ratings
/// (counted with multiplicity). The default upper clamp bound.
pub fn compute_c(t: &Tournament) -> Result<f64, RatingError> {
    let sheet = Sheet::build(t)?;
    let ratings = t.resolved_ratings()?;
    Ok(sheet
        .opponents
        .iter()
        .map(|opps| opps.iter().map(|&j| ratings[j as usize]).sum())
        .fold(0.0f64, f64::max))
}

/// Which clamp bound, if any, a mapped rating landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ClampHit {
    None,
    Lo,
    Hi,
}

/// One application of the rating map on the packed representation.
/// `x` holds current ratings in sheet player order; writes the mapped
/// ratings into `out` and records clamp activity in `hits`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn map_packed(
    sheet: &Sheet,
    x: &[f64],
    params: &EloParams,
    clamp: &ClampBounds,
    boundary: &BoundaryParams,
    out: &mut [f64],
    hits: &mut [ClampHit],
    scratch: &mut Vec<f64>,
) -> Result<(), RatingError> {
    for i in 0..sheet.ids.len() {
        scratch.clear();
        scratch.extend(sheet.opponents[i].iter().map(|&j| x[j as usize]));
        let line = &sheet.lines[i];
        let y = if line.perfect || line.zero {
            solve_boundary(scratch, line.points, params, boundary)?
        } else {
            solve_tpr(scratch, line.points, params)?
        };
        hits[i] = if y < clamp.lo {
            ClampHit::Lo
        } else if y > clamp.hi {
            ClampHit::Hi
        } else {
            ClampHit::None
        };
        out[i] = clamp.apply(y);
    }
    Ok(())
}

/// The tournament-wide rating map: for each player, the performance rating
/// against the opponents' **current** ratings in `x` (boundary scores via
/// the continuous extension), clamped to `[clamp.lo, clamp.hi]`.
///
/// Validates the tournament on every call; iterative callers should prefer
/// [`crate::equilibrium::solve_equilibrium`], which validates once.
pub fn tpr_map(
    t: &Tournament,
    x: &RatingVector,
    params: &EloParams,
    clamp: &ClampBounds,
    boundary: &BoundaryParams,
) -> Result<RatingVector, RatingError> {
    params.check()?;
    clamp.check()?;
    boundary.check()?;
    let sheet = Sheet::build(t)?;
    let packed = sheet.pack(x)?;
    let mut out = alloc::vec![0.0; packed.len()];
    let mut hits = alloc::vec![ClampHit::None; packed.len()];
    let mut scratch = Vec::new();
    map_packed(
        &sheet,
        &packed,
        params,
        clamp,
        boundary,
        &mut out,
        &mut hits,
        &mut scratch,
    )?;
    Ok(sheet.unpack(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GameRecord, Player};
    use alloc::vec;

    const P: EloParams = EloParams {
        scale: 400.0,
        base: 10.0,
        root_tol: 1e-9,
        bracket_pad: 4000.0,
    };

    #[test]
    fn expected_score_symmetric_point() {
        assert_eq!(expected_score(2400.0, 2400.0, &P).unwrap(), 0.5);
    }

    #[test]
    fn expected_score_at_one_scale_advantage() {
        // Direct evaluation: 1 / (1 + 10^(-1)) = 10/11.
        let e = expected_score(2800.0, 2400.0, &P).unwrap();
        assert!((e - 10.0 / 11.0).abs() < 1e-15);
        let e = expected_score(2000.0, 2400.0, &P).unwrap();
        assert!((e - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn expected_score_rejects_non_finite() {
        assert!(matches!(
            expected_score(f64::NAN, 2400.0, &P),
            Err(RatingError::NonFinite)
        ));
        assert!(matches!(
            expected_score(2400.0, f64::INFINITY, &P),
            Err(RatingError::NonFinite)
        ));
    }

    #[test]
    fn g_symmetric_three_opponents() {
        let v = g(2500.0, &[2500.0, 2500.0, 2500.0], &P).unwrap();
        assert!((v - 1.5).abs() < 1e-15);
    }

    #[test]
    fn g_direct_evaluation() {
        // Two opponents at 2600, y = 3000: 2 / (1 + 10^(-1)) = 20/11.
        let v = g(3000.0, &[2600.0, 2600.0], &P).unwrap();
        assert!((v - 20.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn g_rejects_empty_opponents() {
        assert!(matches!(
            g(2500.0, &[], &P),
            Err(RatingError::EmptyOpponents)
        ));
    }

    #[test]
    fn g_prime_at_symmetric_point() {
        // ln(10)/400 * 1/4.
        let d = g_prime(2500.0, &[2500.0], &P).unwrap();
        let expect = core::f64::consts::LN_10 / 400.0 / 4.0;
        assert!((d - expect).abs() < 1e-15, "{d} vs {expect}");
        assert!((d - 0.001_439_115_683_121_3).abs() < 1e-15);
    }

    #[test]
    fn g_prime_positive_and_finite_at_extremes() {
        let opps = [2000.0, 2400.0, 2800.0];
        for y in [-5000.0, 0.0, 2400.0, 9000.0] {
            let d = g_prime(y, &opps, &P).unwrap();
            assert!(d.is_finite() && d >= 0.0, "g' at {y} = {d}");
        }
        assert!(g_prime(2400.0, &opps, &P).unwrap() > 0.0);
    }

    #[test]
    fn solve_tpr_symmetric_draw_point() {
        let y = solve_tpr(&[2600.0, 2600.0], 1.0, &P).unwrap();
        assert!((y - 2600.0).abs() < 1e-4, "{y}");
    }

    #[test]
    fn solve_tpr_analytic_inverse() {
        // One opponent at 2500, m = 10/11: own = opp + 400*log10(m/(1-m)) = 2900.
        let y = solve_tpr(&[2500.0], 10.0 / 11.0, &P).unwrap();
        assert!((y - 2900.0).abs() < 1e-3, "{y}");
    }

    #[test]
    fn solve_tpr_residual_within_tolerance() {
        let opps = [2100.0, 2350.0, 2480.0, 2600.0, 2775.0];
        for m in [0.25, 1.0, 2.5, 4.0, 4.9] {
            let y = solve_tpr(&opps, m, &P).unwrap();
            let back = g(y, &opps, &P).unwrap();
            assert!(
                (back - m).abs() <= P.root_tol,
                "m={m}: residual {}",
                back - m
            );
        }
    }

    #[test]
    fn solve_tpr_rejects_boundary_scores() {
        assert!(matches!(
            solve_tpr(&[2500.0], 0.0, &P),
            Err(RatingError::BoundaryScore { .. })
        ));
        assert!(matches!(
            solve_tpr(&[2500.0, 2600.0], 2.0, &P),
            Err(RatingError::BoundaryScore { .. })
        ));
        assert!(matches!(
            solve_tpr(&[2500.0], -0.5, &P),
            Err(RatingError::BoundaryScore { .. })
        ));
    }

    #[test]
    fn solve_boundary_equal_opponents_closed_form() {
        // 9 opponents at 2557, perfect score, delta 0.25:
        // y = 2557 + 400*log10(8.75/0.25).
        let opps = [2557.0; 9];
        let y = solve_boundary(&opps, 9.0, &P, &BoundaryParams::default()).unwrap();
        assert!((y - 3174.6272).abs() < 1e-3, "{y}");
        let y = solve_boundary(&opps, 0.0, &P, &BoundaryParams::default()).unwrap();
        assert!((y - 1939.3728).abs() < 1e-3, "{y}");
    }

    #[test]
    fn solve_boundary_rejects_interior_scores() {
        assert!(matches!(
            solve_boundary(&[2500.0, 2600.0], 1.0, &P, &BoundaryParams::default()),
            Err(RatingError::InteriorScore { .. })
        ));
        assert!(matches!(
            solve_boundary(&[2500.0], -1.0, &P, &BoundaryParams::default()),
            Err(RatingError::ScoreOutOfRange { .. })
        ));
    }

    fn draw_pair(ra: f64, rb: f64) -> Tournament {
        Tournament::new(
            vec![
                Player::new("a", "A", Some(ra)),
                Player::new("b", "B", Some(rb)),
            ],
            vec![GameRecord::new("a", "b", 0.5)],
            None,
        )
    }

    #[test]
    fn compute_c_single_game() {
        let t = draw_pair(2000.0, 2200.0);
        assert_eq!(compute_c(&t).unwrap(), 2200.0);
    }

    #[test]
    fn compute_c_counts_multiplicity() {
        let mut t = draw_pair(2000.0, 2200.0);
        // Second game between the same pair doubles both contributions.
        let t2 = Tournament::new(
            t.players().to_vec(),
            {
                let mut gs = t.games().to_vec();
                gs.push(GameRecord::new("a", "b", 0.5));
                gs
            },
            None,
        );
        t = t2;
        assert_eq!(compute_c(&t).unwrap(), 4400.0);
    }

    #[test]
    fn tpr_map_draw_reflects_opponent_rating() {
        let t = draw_pair(2000.0, 3000.0);
        let clamp = ClampBounds::for_tournament(&t).unwrap();
        assert_eq!(clamp.hi, 3000.0);
        let mut x = RatingVector::new();
        x.insert("a", 2000.0);
        x.insert("b", 3000.0);
        let mapped = tpr_map(&t, &x, &P, &clamp, &BoundaryParams::default()).unwrap();
        assert!((mapped.get("a").unwrap() - 3000.0).abs() < 1e-4);
        assert!((mapped.get("b").unwrap() - 2000.0).abs() < 1e-4);
    }

    #[test]
    fn tpr_map_respects_clamp_bounds() {
        let t = Tournament::new(
            vec![
                Player::new("a", "A", Some(2000.0)),
                Player::new("b", "B", Some(2200.0)),
            ],
            vec![GameRecord::new("a", "b", 1.0)],
            None,
        );
        let clamp = ClampBounds::for_tournament(&t).unwrap();
        let mut x = RatingVector::new();
        x.insert("a", 2000.0);
        x.insert("b", 2200.0);
        let mapped = tpr_map(&t, &x, &P, &clamp, &BoundaryParams::default()).unwrap();
        for (_, r) in mapped.iter() {
            assert!(r >= clamp.lo && r <= clamp.hi);
        }
        // Winner's raw boundary solve exceeds c = 2200 and is clamped there.
        assert_eq!(mapped.get("a").unwrap(), 2200.0);
    }

    #[test]
    fn tpr_map_propagates_validation_errors() {
        let t = Tournament::new(
            vec![Player::new("a", "A", Some(2000.0))],
            vec![GameRecord::new("a", "ghost", 1.0)],
            None,
        );
        let mut x = RatingVector::new();
        x.insert("a", 2000.0);
        let err = tpr_map(
            &t,
            &x,
            &P,
            &ClampBounds::new(0.0, 5000.0).unwrap(),
            &BoundaryParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, RatingError::Model(ModelError::Invalid(_))));
    }
}
