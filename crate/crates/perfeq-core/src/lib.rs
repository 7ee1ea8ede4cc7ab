//! Tournament performance ratings and rating equilibria.
//!
//! Given a tournament — players, pairwise game results, and optional initial
//! Elo ratings — this crate computes:
//!
//! - **Performance ratings** (TPR): for each player, the hypothetical rating
//!   whose expected total score against the player's actual opponents equals
//!   the score the player achieved. The defining equation is solved by
//!   bracketed bisection on a strictly increasing score function.
//! - **Equilibrium ratings** (PPR): a rating vector that is a fixed point of
//!   the tournament-wide performance-rating map, so every player's rating
//!   exactly predicts their realized score against opponents *at their
//!   equilibrium ratings*. Computed by damped fixed-point iteration with
//!   configurable initialization and a recomputed residual check.
//!
//! Zero and perfect scores, for which the performance rating is undefined,
//! are handled by a continuous boundary extension that pulls the score a
//! configurable `delta` inside the feasible interval; all map outputs are
//! clamped to configurable bounds.
//!
//! The crate is `no_std`-compatible (requires `alloc`; enable the `libm`
//! feature in place of `std` for float math).
//!
//! # Example
//!
//! ```
//! use perfeq_core::{
//!     equilibrium::{solve_equilibrium, EquilibriumConfig},
//!     model::{GameRecord, Player, Tournament},
//!     rating::{BoundaryParams, ClampBounds, EloParams},
//! };
//!
//! // Two players, one draw.
//! let t = Tournament::new(
//!     vec![
//!         Player::new("a", "Ann", Some(2000.0)),
//!         Player::new("b", "Ben", Some(2200.0)),
//!     ],
//!     vec![GameRecord::new("a", "b", 0.5)],
//!     None,
//! );
//! assert!(t.validate().is_empty());
//!
//! let params = EloParams::default();
//! let clamp = ClampBounds::for_tournament(&t).unwrap();
//! let result = solve_equilibrium(
//!     &t,
//!     &params,
//!     &clamp,
//!     &BoundaryParams::default(),
//!     &EquilibriumConfig::default(),
//! )
//! .unwrap();
//!
//! // A draw between equals is already in equilibrium at the average rating.
//! assert!(result.converged);
//! assert_eq!(result.ratings.get("a"), Some(2100.0));
//! assert_eq!(result.ratings.get("b"), Some(2100.0));
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("perfeq-core requires either the `std` or the `libm` feature");

pub mod equilibrium;
pub mod generate;
mod math;
pub mod model;
pub mod rating;
pub mod rng;

pub use equilibrium::{
    solve_equilibrium, verify_equilibrium, EquilibriumConfig, EquilibriumResult,
};
pub use model::{GameRecord, Player, PlayerId, RatingVector, Tournament, Violation};
pub use rating::{solve_tpr, tpr_map, BoundaryParams, ClampBounds, EloParams};
