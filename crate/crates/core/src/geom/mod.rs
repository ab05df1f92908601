//! Planar geometry: primitives, the exact Delaunay complex and the
//! deterministic lattice-box lemmas.

mod complex;
mod config;
mod grid;
pub mod lemmas;
mod point;
mod polygon;
pub(crate) mod triangulation;

pub use complex::{build_delaunay, DelaunayComplex, Edge, Face, FundamentalRegion, VoronoiCell, FACE_TOLERANCE};
pub use config::PointConfiguration;
pub use grid::GridIndex;
pub use lemmas::{cube_in_ball_witness, orthant_criterion};
pub use point::{AxisBox, Ball, Point, Rect, ThickenedSet, Vec2};
pub use polygon::{seg_point_dist, seg_rect_dist, seg_seg_dist, Polygon, Side};
