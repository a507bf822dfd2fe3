//! Concentric annular isometric fillings of the cycle graph `C_n`.
//!
//! A filling is an abstract triangulated disk whose boundary is the labeled
//! cycle `0, 1, ..., n-1` and whose 1-skeleton introduces no shortcut between
//! boundary vertices. This crate builds the annular filling `K_n` (a collar
//! of equal-length annuli, a main region shrinking along `sqrt(1 - 4t)`, and
//! a cone cap), validates it as a disk, verifies boundary distances exactly
//! by BFS, audits the circular drift of every slanted edge in exact rational
//! arithmetic, and measures `|V(K_n)| / n^2` against `1/6`.

pub mod analysis;
pub mod annulus;
pub mod cli;
pub mod error;
pub mod exact;
pub mod filling;
pub mod io;
pub mod oracle;
pub mod phase;
pub mod simplicial;
pub mod verify;

pub use annulus::{AnnulusKind, ComplexBuilder, LayerLedger};
pub use error::{Error, Result, ScheduleError};
pub use filling::{build_filling, compute_schedule, predict_density, BuildResult, Params, Schedule};
pub use phase::{circ_dist, Phase};
pub use simplicial::{boundary_cycle, validate_disk, SkeletonGraph, Triangle, Triangulation, VertexId};
pub use verify::{drift_audit, verify_filling, DriftLowerBound, VerificationReport};
