//! Deformable-model image segmentation.
//!
//! The crate builds external image forces from an edge map (an electrostatic
//! potential, a heat-diffusion potential, and a scheduled fusion of the two)
//! and evolves either a parametric snake or a narrow-band level-set geometric
//! active contour under them. The [`bench`] module contains the synthetic
//! experiments (circle bias, T-shape convergence, potential profiles and the
//! snake/level-set equivalence checks).
//!
//! Coordinates follow the raster: `x` is the column, `y` the row, origin at
//! the top-left cell, one unit per pixel.

pub mod bench;
pub mod error;
pub mod forces;
pub mod grid;
pub mod levelset;
pub mod snakes;

pub use error::{Error, Result};
pub use grid::{GrayImage, ScalarField, VectorField};
pub use snakes::{Contour, Point};
