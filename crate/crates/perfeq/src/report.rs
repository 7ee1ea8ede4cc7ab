//! Tournament result reports: one row per player with score, performance
//! rating against initial ratings (TPR), equilibrium rating (PPR), and the
//! equilibrium prediction error, plus run metadata.
//!
//! Rendering is byte-deterministic for identical inputs: rows carry a fixed
//! sort order, JSON uses fixed field order with full-precision numbers, and
//! CSV/Markdown round ratings to display integers (half away from zero).

use serde::{Deserialize, Serialize};

use perfeq_core::equilibrium::{
    verify_equilibrium, EquilibriumConfig, EquilibriumResult, InitMode, UpdateScheme,
};
use perfeq_core::model::{RatingVector, Tournament};
use perfeq_core::rating::{BoundaryParams, ClampBounds, EloParams, RatingError};

/// Output encodings for a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub rank: usize,
    pub id: String,
    pub name: String,
    /// Initial rating as given; absent players show blank in CSV/Markdown.
    pub rating: Option<f64>,
    pub games: u32,
    pub points: f64,
    /// Performance rating against the opponents' initial ratings.
    pub tpr: f64,
    /// Equilibrium rating.
    pub ppr: f64,
    /// Score-unit prediction error of the equilibrium rating.
    pub prediction_error: f64,
    /// Zero or perfect score, rated through the boundary extension.
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub players: usize,
    pub games: usize,
    pub init_mode: String,
    /// Mean of the players' resolved initial ratings.
    pub average_rating: f64,
    pub default_rating: Option<f64>,
    /// Upper clamp bound actually used.
    pub c: f64,
    pub clamp_lo: f64,
    pub residual: f64,
    pub iterations: u32,
    pub converged: bool,
    pub damping: f64,
    pub sup_tol: f64,
    pub max_iters: u32,
    pub scheme: String,
    pub delta: f64,
    pub scale: f64,
    pub base: f64,
}

/// A complete run report: metadata plus per-player rows sorted by points
/// descending, then PPR descending, then id ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultReport {
    pub meta: ReportMeta,
    pub rows: Vec<ReportRow>,
}

pub fn init_mode_name(init: &InitMode) -> &'static str {
    match init {
        InitMode::Average => "average",
        InitMode::InitialRatings => "initial_ratings",
        InitMode::Custom(_) => "custom",
    }
}

pub fn scheme_name(scheme: UpdateScheme) -> &'static str {
    match scheme {
        UpdateScheme::Simultaneous => "simultaneous",
        UpdateScheme::Sequential => "sequential",
    }
}

/// Display rounding: nearest integer, half away from zero.
pub fn display_round(r: f64) -> i64 {
    r.round() as i64
}

impl ResultReport {
    /// Assembles the report for a solved tournament. `baseline` carries the
    /// per-player TPR against initial ratings (one rating-map application at
    /// the resolved initial vector).
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        t: &Tournament,
        result: &EquilibriumResult,
        baseline: &RatingVector,
        params: &EloParams,
        clamp: &ClampBounds,
        boundary: &BoundaryParams,
        cfg: &EquilibriumConfig,
    ) -> Result<Self, RatingError> {
        let verify = verify_equilibrium(t, &result.ratings, params, clamp, boundary).map_err(
            |e| match e {
                perfeq_core::equilibrium::EquilibriumError::Rating(r) => r,
                perfeq_core::equilibrium::EquilibriumError::BadConfig(msg) => {
                    RatingError::BadParams(msg)
                }
            },
        )?;

        let resolved = t.resolved_ratings().map_err(RatingError::Model)?;
        let average_rating = resolved.iter().sum::<f64>() / resolved.len() as f64;

        let mut rows: Vec<ReportRow> = t
            .players()
            .iter()
            .zip(verify.rows.iter())
            .map(|(p, check)| ReportRow {
                rank: 0,
                id: p.id.as_str().to_string(),
                name: p.name.clone(),
                rating: p.rating,
                games: check.games,
                points: check.points,
                tpr: baseline.get(p.id.as_str()).unwrap_or(f64::NAN),
                ppr: result.ratings.get(p.id.as_str()).unwrap_or(f64::NAN),
                prediction_error: check.error,
                boundary: check.boundary,
            })
            .collect();

        rows.sort_by(|a, b| {
            b.points
                .partial_cmp(&a.points)
                .unwrap()
                .then(b.ppr.partial_cmp(&a.ppr).unwrap())
                .then(a.id.cmp(&b.id))
        });
        for (i, row) in rows.iter_mut().enumerate() {
            row.rank = i + 1;
        }

        Ok(Self {
            meta: ReportMeta {
                tool: "perfeq".to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                players: t.player_count(),
                games: t.games().len(),
                init_mode: init_mode_name(&cfg.init).to_string(),
                average_rating,
                default_rating: t.default_rating(),
                c: clamp.hi,
                clamp_lo: clamp.lo,
                residual: result.residual,
                iterations: result.iterations,
                converged: result.converged,
                damping: cfg.damping,
                sup_tol: cfg.sup_tol,
                max_iters: cfg.max_iters,
                scheme: scheme_name(cfg.scheme).to_string(),
                delta: boundary.delta,
                scale: params.scale,
                base: params.base,
            },
            rows,
        })
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            ReportFormat::Csv => self.render_csv(),
            ReportFormat::Markdown => self.render_markdown(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::from("rank,id,name,rating,games,points,tpr,ppr,prediction_error\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.3e}\n",
                r.rank,
                r.id,
                r.name,
                r.rating.map(|v| format!("{v}")).unwrap_or_default(),
                r.games,
                r.points,
                display_round(r.tpr),
                display_round(r.ppr),
                r.prediction_error,
            ));
        }
        out
    }

    fn render_markdown(&self) -> String {
        let m = &self.meta;
        let mut out = String::new();
        out.push_str(&format!("## {} players, {} games\n\n", m.players, m.games));
        out.push_str(&format!(
            "- init: {} (average rating {:.2})\n- converged: {} after {} iterations, residual {:.3e}\n- clamp: [{}, {}], boundary delta {}\n\n",
            m.init_mode, m.average_rating, m.converged, m.iterations, m.residual, m.clamp_lo, m.c, m.delta,
        ));
        out.push_str("| Rank | Name | Rating | Games | Points | TPR | PPR | Pred. error |\n");
        out.push_str("|-----:|------|-------:|------:|-------:|----:|----:|------------:|\n");
        for r in &self.rows {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} | {:.1e} |\n",
                r.rank,
                escape_md(&r.name),
                r.rating.map(|v| format!("{v}")).unwrap_or_default(),
                r.games,
                r.points,
                display_round(r.tpr),
                display_round(r.ppr),
                r.prediction_error,
            ));
        }
        out
    }
}

fn escape_md(s: &str) -> String {
    s.replace('|', "\\|")
}

/// Rendered form of a rating-vector residual check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyDoc {
    pub residual: f64,
    pub max_interior_error: f64,
    pub sup_tol: f64,
    /// `residual <= sup_tol`.
    pub verified: bool,
    pub clamped: Vec<String>,
    pub rows: Vec<VerifyRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub id: String,
    pub games: u32,
    pub points: f64,
    pub expected: f64,
    pub error: f64,
    pub boundary: bool,
}

impl VerifyDoc {
    pub fn build(report: &perfeq_core::equilibrium::VerifyReport, sup_tol: f64) -> Self {
        Self {
            residual: report.residual,
            max_interior_error: report.max_interior_error,
            sup_tol,
            verified: report.residual <= sup_tol,
            clamped: report
                .clamped
                .iter()
                .map(|id| id.as_str().to_string())
                .collect(),
            rows: report
                .rows
                .iter()
                .map(|r| VerifyRow {
                    id: r.id.as_str().to_string(),
                    games: r.games,
                    points: r.points,
                    expected: r.expected,
                    error: r.error,
                    boundary: r.boundary,
                })
                .collect(),
        }
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("doc serializes");
                s.push('\n');
                s
            }
            ReportFormat::Csv => {
                let mut out = String::from("id,games,points,expected,error,boundary\n");
                for r in &self.rows {
                    out.push_str(&format!(
                        "{},{},{},{:.6},{:.3e},{}\n",
                        r.id, r.games, r.points, r.expected, r.error, r.boundary
                    ));
                }
                out
            }
            ReportFormat::Markdown => {
                let mut out = format!(
                    "- rating residual: {:.3e} (tolerance {:.1e}) => {}\n- max interior prediction error: {:.3e}\n\n",
                    self.residual,
                    self.sup_tol,
                    if self.verified { "verified" } else { "NOT verified" },
                    self.max_interior_error,
                );
                if !self.clamped.is_empty() {
                    out.push_str(&format!("- clamped: {}\n\n", self.clamped.join(", ")));
                }
                out.push_str("| Id | Games | Points | Expected | Error | Boundary |\n");
                out.push_str("|----|------:|-------:|---------:|------:|----------|\n");
                for r in &self.rows {
                    out.push_str(&format!(
                        "| {} | {} | {} | {:.4} | {:.1e} | {} |\n",
                        r.id, r.games, r.points, r.expected, r.error, r.boundary
                    ));
                }
                out
            }
        }
    }
}

/// Rendered form of a multi-start exploration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExploreDoc {
    pub cluster_tol: f64,
    pub distinct_equilibria: usize,
    pub runs: Vec<ExploreRun>,
    /// Pairwise sup-distances between run rating vectors.
    pub distances: Vec<Vec<f64>>,
    pub clusters: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExploreRun {
    pub run: usize,
    pub start: String,
    pub converged: bool,
    pub residual: f64,
    pub iterations: u32,
    pub cluster: usize,
    pub ratings: std::collections::BTreeMap<String, f64>,
}

impl ExploreDoc {
    pub fn build(
        report: &perfeq_core::equilibrium::ExploreReport,
        start_labels: &[String],
        cluster_tol: f64,
    ) -> Self {
        let cluster_of = |run: usize| {
            report
                .clusters
                .iter()
                .position(|c| c.contains(&run))
                .unwrap_or(usize::MAX)
        };
        Self {
            cluster_tol,
            distinct_equilibria: report.clusters.len(),
            runs: report
                .runs
                .iter()
                .enumerate()
                .map(|(i, r)| ExploreRun {
                    run: i,
                    start: start_labels.get(i).cloned().unwrap_or_default(),
                    converged: r.converged,
                    residual: r.residual,
                    iterations: r.iterations,
                    cluster: cluster_of(i),
                    ratings: r
                        .ratings
                        .iter()
                        .map(|(id, v)| (id.as_str().to_string(), v))
                        .collect(),
                })
                .collect(),
            distances: report.distances.clone(),
            clusters: report.clusters.clone(),
        }
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("doc serializes");
                s.push('\n');
                s
            }
            ReportFormat::Csv => {
                let mut out = String::from("run,start,cluster,converged,residual,iterations\n");
                for r in &self.runs {
                    out.push_str(&format!(
                        "{},{},{},{},{:.3e},{}\n",
                        r.run, r.start, r.cluster, r.converged, r.residual, r.iterations
                    ));
                }
                out
            }
            ReportFormat::Markdown => {
                let mut out = format!(
                    "## {} distinct equilibria from {} starts (cluster tolerance {})\n\n",
                    self.distinct_equilibria,
                    self.runs.len(),
                    self.cluster_tol,
                );
                out.push_str("| Run | Start | Cluster | Converged | Residual | Iterations |\n");
                out.push_str("|----:|-------|--------:|-----------|---------:|-----------:|\n");
                for r in &self.runs {
                    out.push_str(&format!(
                        "| {} | {} | {} | {} | {:.3e} | {} |\n",
                        r.run,
                        escape_md(&r.start),
                        r.cluster,
                        r.converged,
                        r.residual,
                        r.iterations
                    ));
                }
                out.push_str("\nPairwise sup-distances:\n\n");
                for (i, row) in self.distances.iter().enumerate() {
                    let cells: Vec<String> = row.iter().map(|d| format!("{d:.3}")).collect();
                    out.push_str(&format!("- run {i}: [{}]\n", cells.join(", ")));
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use perfeq_core::equilibrium::solve_equilibrium;
    use perfeq_core::model::{GameRecord, Player};
    use perfeq_core::rating::tpr_map;

    fn draw_pair_report() -> ResultReport {
        let t = Tournament::new(
            vec![
                Player::new("a", "Ann", Some(2000.0)),
                Player::new("b", "Ben", Some(2200.0)),
            ],
            vec![GameRecord::new("a", "b", 0.5)],
            None,
        );
        let params = EloParams::default();
        let clamp = ClampBounds::for_tournament(&t).unwrap();
        let boundary = BoundaryParams::default();
        let cfg = EquilibriumConfig::default();
        let result = solve_equilibrium(&t, &params, &clamp, &boundary, &cfg).unwrap();
        let initial: RatingVector = t
            .players()
            .iter()
            .map(|p| (p.id.clone(), p.rating.unwrap()))
            .collect();
        let baseline = tpr_map(&t, &initial, &params, &clamp, &boundary).unwrap();
        ResultReport::build(&t, &result, &baseline, &params, &clamp, &boundary, &cfg).unwrap()
    }

    #[test]
    fn draw_pair_rows_share_ppr_and_have_zero_error() {
        let report = draw_pair_report();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[0].ppr, report.rows[1].ppr);
        assert!(report.rows.iter().all(|r| r.prediction_error <= 1e-9));
        // Equal points and PPR: tie broken by id.
        assert_eq!(report.rows[0].id, "a");
        assert_eq!(report.rows[0].rank, 1);
        assert_eq!(report.rows[1].rank, 2);
    }

    #[test]
    fn renders_are_deterministic() {
        let a = draw_pair_report();
        let b = draw_pair_report();
        for format in [
            ReportFormat::Json,
            ReportFormat::Csv,
            ReportFormat::Markdown,
        ] {
            assert_eq!(a.render(format), b.render(format));
        }
    }

    #[test]
    fn json_round_trips_and_has_required_meta() {
        let report = draw_pair_report();
        let text = report.render(ReportFormat::Json);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["residual", "iterations", "converged", "c", "init_mode"] {
            assert!(value["meta"].get(key).is_some(), "meta.{key} missing");
        }
        let back: ResultReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn display_rounding_is_half_away_from_zero() {
        assert_eq!(display_round(2804.5), 2805);
        assert_eq!(display_round(2804.49), 2804);
        assert_eq!(display_round(-0.5), -1);
    }
}
