//! Fixed points of the tournament rating map.
//!
//! A rating vector is in equilibrium when applying the rating map returns
//! it unchanged: every player's rating then exactly predicts their realized
//! score against their opponents *at those ratings*. This module finds such
//! vectors by damped fixed-point iteration, verifies candidates by
//! recomputing the residual, and explores multiplicity from several starts.
//!
//! Equilibria need not be unique — away from the clamp bounds the map is
//! translation-equivariant, so fixed points typically come in uniformly
//! shifted families — and the iteration carries no global convergence
//! guarantee. Non-convergence is therefore reported as data
//! (`converged = false` plus diagnostics), never as an error.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::model::{ModelError, PlayerId, RatingVector, Sheet, Tournament};
use crate::rating::{self, BoundaryParams, ClampBounds, ClampHit, EloParams, RatingError};
use crate::rng::SplitMix64;

/// Where the iteration starts.
#[derive(Debug, Clone, PartialEq)]
pub enum InitMode {
    /// Uniform vector at the mean of the players' resolved initial ratings.
    /// Makes the result independent of individual pre-tournament ratings,
    /// given the tournament average.
    Average,
    /// The players' resolved initial ratings.
    InitialRatings,
    /// A caller-supplied vector covering every player.
    Custom(RatingVector),
}

/// Component update order within one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateScheme {
    /// All players recomputed from the previous vector (Jacobi style).
    /// Order-independent, hence the deterministic default.
    Simultaneous,
    /// Players updated in player order, each seeing the freshest values
    /// (Gauss-Seidel style). Often converges in fewer iterations.
    Sequential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumConfig {
    pub init: InitMode,
    /// Step fraction in `(0, 1]`; `1` is the undamped map.
    pub damping: f64,
    /// Sup-norm tolerance, in rating points, for both the stopping rule
    /// and the final residual check.
    pub sup_tol: f64,
    pub max_iters: u32,
    pub scheme: UpdateScheme,
    /// Record the per-iteration sup-norm step sizes in the result.
    pub record_trajectory: bool,
}

impl Default for EquilibriumConfig {
    fn default() -> Self {
        Self {
            init: InitMode::Average,
            damping: 1.0,
            sup_tol: 1e-7,
            max_iters: 10_000,
            scheme: UpdateScheme::Simultaneous,
            record_trajectory: false,
        }
    }
}

impl EquilibriumConfig {
    fn check(&self) -> Result<(), EquilibriumError> {
        if !(self.damping.is_finite() && self.damping > 0.0 && self.damping <= 1.0) {
            return Err(EquilibriumError::BadConfig("damping must be in (0, 1]"));
        }
        if !(self.sup_tol.is_finite() && self.sup_tol > 0.0) {
            return Err(EquilibriumError::BadConfig("sup_tol must be positive"));
        }
        if self.max_iters == 0 {
            return Err(EquilibriumError::BadConfig("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Outcome of an equilibrium solve.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    /// The candidate equilibrium vector.
    pub ratings: RatingVector,
    /// `‖map(ratings) - ratings‖∞`, recomputed at the returned vector
    /// rather than inferred from the last step.
    pub residual: f64,
    /// Number of map evaluations performed by the iteration.
    pub iterations: u32,
    /// True iff the recomputed residual is within `sup_tol`.
    pub converged: bool,
    /// Per-iteration sup-norm step sizes, when recording was requested.
    pub trajectory: Option<Vec<f64>>,
    /// Players whose final mapped rating landed on a clamp bound.
    pub clamped: Vec<PlayerId>,
}

/// Per-player check of how well a rating vector predicts realized scores.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub id: PlayerId,
    pub games: u32,
    /// Realized score `m`.
    pub points: f64,
    /// Expected score at the given ratings.
    pub expected: f64,
    /// `|expected - points|`, in score units.
    pub error: f64,
    /// Zero or perfect score: handled by the boundary extension, so the
    /// prediction error does not vanish even in equilibrium.
    pub boundary: bool,
}

/// Residual report for a candidate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub rows: Vec<PredictionRow>,
    /// Sup-norm rating residual `‖map(x) - x‖∞`.
    pub residual: f64,
    /// Largest prediction error among interior-score players.
    pub max_interior_error: f64,
    /// Players whose mapped rating landed on a clamp bound.
    pub clamped: Vec<PlayerId>,
}

/// Multi-start exploration outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ExploreReport {
    /// One solve per start, in start order.
    pub runs: Vec<EquilibriumResult>,
    /// Pairwise sup-distances between the runs' rating vectors.
    pub distances: Vec<Vec<f64>>,
    /// Run indices grouped by sup-distance threshold; each cluster is one
    /// distinct equilibrium (first member is the representative).
    pub clusters: Vec<Vec<usize>>,
}

/// Distance below which two equilibria count as the same: half a display
/// unit, so vectors that round identically are never split.
pub const DEFAULT_CLUSTER_TOL: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub enum EquilibriumError {
    BadConfig(&'static str),
    Rating(RatingError),
}

impl fmt::Display for EquilibriumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquilibriumError::BadConfig(msg) => write!(f, "bad configuration: {msg}"),
            EquilibriumError::Rating(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EquilibriumError {}

impl From<RatingError> for EquilibriumError {
    fn from(e: RatingError) -> Self {
        EquilibriumError::Rating(e)
    }
}

impl From<ModelError> for EquilibriumError {
    fn from(e: ModelError) -> Self {
        EquilibriumError::Rating(RatingError::Model(e))
    }
}

fn packed_initial(
    t: &Tournament,
    sheet: &Sheet,
    init: &InitMode,
) -> Result<Vec<f64>, EquilibriumError> {
    match init {
        InitMode::Average => {
            let resolved = t.resolved_ratings()?;
            let mean = resolved.iter().sum::<f64>() / resolved.len() as f64;
            Ok(vec![mean; resolved.len()])
        }
        InitMode::InitialRatings => Ok(t.resolved_ratings()?),
        InitMode::Custom(v) => Ok(sheet.pack(v)?),
    }
}

/// The iteration's starting vector for a tournament under `cfg.init`.
pub fn initial_vector(
    t: &Tournament,
    cfg: &EquilibriumConfig,
) -> Result<RatingVector, EquilibriumError> {
    cfg.check()?;
    let sheet = Sheet::build(t)?;
    let packed = packed_initial(t, &sheet, &cfg.init)?;
    Ok(sheet.unpack(&packed))
}

fn collect_clamped(sheet: &Sheet, hits: &[ClampHit]) -> Vec<PlayerId> {
    sheet
        .ids
        .iter()
        .zip(hits.iter())
        .filter(|(_, &h)| h != ClampHit::None)
        .map(|(id, _)| id.clone())
        .collect()
}

/// Iterates `x <- (1 - damping) * x + damping * map(x)` from the configured
/// start until the sup-norm of the proposed step falls within `sup_tol` or
/// `max_iters` is reached, then recomputes the residual at the final vector.
/// `converged` reflects only that recomputed residual; a run that stalls or
/// cycles comes back with `converged = false` and its diagnostics intact.
pub fn solve_equilibrium(
    t: &Tournament,
    params: &EloParams,
    clamp: &ClampBounds,
    boundary: &BoundaryParams,
    cfg: &EquilibriumConfig,
) -> Result<EquilibriumResult, EquilibriumError> {
    cfg.check()?;
    let sheet = Sheet::build(t)?;
    let n = sheet.ids.len();
    let mut x = packed_initial(t, &sheet, &cfg.init)?;

    let mut mapped = vec![0.0f64; n];
    let mut hits = vec![ClampHit::None; n];
    let mut scratch: Vec<f64> = Vec::new();
    let mut trajectory = cfg.record_trajectory.then(Vec::new);
    let mut iterations = 0u32;

    match cfg.scheme {
        UpdateScheme::Simultaneous => {
            for iter in 1..=cfg.max_iters {
                rating::map_packed(
                    &sheet,
                    &x,
                    params,
                    clamp,
                    boundary,
                    &mut mapped,
                    &mut hits,
                    &mut scratch,
                )?;
                let step = x
                    .iter()
                    .zip(mapped.iter())
                    .map(|(&a, &b)| math::abs(b - a))
                    .fold(0.0f64, f64::max);
                if let Some(tr) = trajectory.as_mut() {
                    tr.push(step);
                }
                iterations = iter;
                if step <= cfg.sup_tol {
                    break;
                }
                for i in 0..n {
                    x[i] += cfg.damping * (mapped[i] - x[i]);
                }
            }
        }
        UpdateScheme::Sequential => {
            for iter in 1..=cfg.max_iters {
                let mut step = 0.0f64;
                for i in 0..n {
                    scratch.clear();
                    scratch.extend(sheet.opponents[i].iter().map(|&j| x[j as usize]));
                    let line = &sheet.lines[i];
                    let y = if line.perfect || line.zero {
                        rating::solve_boundary(&scratch, line.points, params, boundary)?
                    } else {
                        rating::solve_tpr(&scratch, line.points, params)?
                    };
                    let y = y.clamp(clamp.lo, clamp.hi);
                    let change = math::abs(y - x[i]);
                    if change > step {
                        step = change;
                    }
                    x[i] += cfg.damping * (y - x[i]);
                }
                if let Some(tr) = trajectory.as_mut() {
                    tr.push(step);
                }
                iterations = iter;
                if step <= cfg.sup_tol {
                    break;
                }
            }
        }
    }

    // Final residual, recomputed at the returned vector.
    rating::map_packed(
        &sheet,
        &x,
        params,
        clamp,
        boundary,
        &mut mapped,
        &mut hits,
        &mut scratch,
    )?;
    let residual = x
        .iter()
        .zip(mapped.iter())
        .map(|(&a, &b)| math::abs(b - a))
        .fold(0.0f64, f64::max);

    Ok(EquilibriumResult {
        ratings: sheet.unpack(&x),
        residual,
        iterations,
        converged: residual <= cfg.sup_tol,
        trajectory,
        clamped: collect_clamped(&sheet, &hits),
    })
}

/// Checks how well `x` predicts the realized scores: per-player expected
/// score and error (score units) plus the rating residual (rating units).
/// At an equilibrium every interior-score error vanishes up to tolerance.
pub fn verify_equilibrium(
    t: &Tournament,
    x: &RatingVector,
    params: &EloParams,
    clamp: &ClampBounds,
    boundary: &BoundaryParams,
) -> Result<VerifyReport, EquilibriumError> {
    let sheet = Sheet::build(t)?;
    let packed = sheet.pack(x)?;
    let n = sheet.ids.len();

    let mut rows = Vec::with_capacity(n);
    let mut max_interior_error = 0.0f64;
    for i in 0..n {
        let opps: Vec<f64> = sheet.opponents[i]
            .iter()
            .map(|&j| packed[j as usize])
            .collect();
        let expected = rating::g(packed[i], &opps, params)?;
        let line = &sheet.lines[i];
        let error = math::abs(expected - line.points);
        let boundary_score = line.perfect || line.zero;
        if !boundary_score && error > max_interior_error {
            max_interior_error = error;
        }
        rows.push(PredictionRow {
            id: sheet.ids[i].clone(),
            games: line.games,
            points: line.points,
            expected,
            error,
            boundary: boundary_score,
        });
    }

    let mut mapped = vec![0.0f64; n];
    let mut hits = vec![ClampHit::None; n];
    let mut scratch = Vec::new();
    rating::map_packed(
        &sheet,
        &packed,
        params,
        clamp,
        boundary,
        &mut mapped,
        &mut hits,
        &mut scratch,
    )?;
    let residual = packed
        .iter()
        .zip(mapped.iter())
        .map(|(&a, &b)| math::abs(b - a))
        .fold(0.0f64, f64::max);

    Ok(VerifyReport {
        rows,
        residual,
        max_interior_error,
        clamped: collect_clamped(&sheet, &hits),
    })
}

/// Runs [`solve_equilibrium`] from each start and groups the outcomes by
/// sup-distance: results within `cluster_tol` of a cluster's representative
/// join it. Distinct clusters witness distinct equilibria.
pub fn explore_equilibria(
    t: &Tournament,
    params: &EloParams,
    clamp: &ClampBounds,
    boundary: &BoundaryParams,
    cfg: &EquilibriumConfig,
    starts: &[RatingVector],
    cluster_tol: f64,
) -> Result<ExploreReport, EquilibriumError> {
    if !(cluster_tol.is_finite() && cluster_tol >= 0.0) {
        return Err(EquilibriumError::BadConfig(
            "cluster tolerance must be non-negative",
        ));
    }
    let mut runs = Vec::with_capacity(starts.len());
    for start in starts {
        let mut run_cfg = cfg.clone();
        run_cfg.init = InitMode::Custom(start.clone());
        runs.push(solve_equilibrium(t, params, clamp, boundary, &run_cfg)?);
    }

    let (distances, clusters) = cluster_runs(&runs, cluster_tol);
    Ok(ExploreReport {
        runs,
        distances,
        clusters,
    })
}

/// Pairwise sup-distances between solved runs plus greedy clustering: a run
/// joins the first cluster whose representative (first member) is within
/// `cluster_tol`, else founds a new one.
pub fn cluster_runs(
    runs: &[EquilibriumResult],
    cluster_tol: f64,
) -> (Vec<Vec<f64>>, Vec<Vec<usize>>) {
    let distances: Vec<Vec<f64>> = runs
        .iter()
        .map(|a| {
            runs.iter()
                .map(|b| a.ratings.sup_distance(&b.ratings))
                .collect()
        })
        .collect();

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, row) in distances.iter().enumerate() {
        match clusters.iter_mut().find(|c| row[c[0]] <= cluster_tol) {
            Some(cluster) => cluster.push(i),
            None => clusters.push(vec![i]),
        }
    }
    (distances, clusters)
}

/// Deterministic random starting vectors: entries uniform within
/// `spread` rating points of the resolved average (floored at zero).
pub fn seeded_starts(
    t: &Tournament,
    count: usize,
    seed: u64,
    spread: f64,
) -> Result<Vec<RatingVector>, EquilibriumError> {
    if !(spread.is_finite() && spread >= 0.0) {
        return Err(EquilibriumError::BadConfig("spread must be non-negative"));
    }
    let resolved = t.resolved_ratings()?;
    if resolved.is_empty() {
        return Err(EquilibriumError::BadConfig("tournament has no players"));
    }
    let mean = resolved.iter().sum::<f64>() / resolved.len() as f64;
    let mut rng = SplitMix64::new(seed);
    let mut starts = Vec::with_capacity(count);
    for _ in 0..count {
        let mut v = RatingVector::new();
        for p in t.players() {
            let r = mean + spread * (2.0 * rng.next_f64() - 1.0);
            v.insert(p.id.clone(), r.max(0.0));
        }
        starts.push(v);
    }
    Ok(starts)
}
