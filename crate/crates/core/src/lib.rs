//! Irrationality measure functions and the geometry behind their oscillation.
//!
//! For a real `m × n` matrix `Θ` the function
//! `ψ_Θ(t) = min_{1 ≤ max|x_i| ≤ t} max_j ‖θ_j · x‖` measures how well the
//! linear forms `θ_j · x` approach integers. This crate evaluates `ψ_Θ`
//! exactly for rational matrices, checks the counting and measure estimates
//! that show `ψ_Θ − ψ_Θ′` changes sign infinitely often for almost every pair,
//! and runs Monte-Carlo experiments that reproduce the effect.
//!
//! * [`exactnum`]: rationals, interval unions, certified brackets, `ζ(s)`.
//! * [`psi`]: `ψ_Θ(t)` in the regimes `1×1`, `1×2` and `m×1`.
//! * [`regions2d`]: strips `|x₁α + x₂β − q| ≤ ε/k²` and the sets `M̄ₖ`.
//! * [`regions_md`]: cube clusters, the strip region `D`, pair classification.
//! * [`lab`]: sampling, sign experiments, Borel–Cantelli hits, reports.

pub mod error;
pub mod exactnum;
pub mod geometry;
pub mod lab;
pub mod mc;
pub mod psi;
pub mod regions2d;
pub mod regions_md;

pub use error::{Error, Result};
pub use exactnum::{nearest_int_distance, Rat};
