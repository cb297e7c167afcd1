//! Cap rectangles over the parabola, their Minkowski sums and overlap counts,
//! and the intersection and sum-set area laws.

pub mod decoupling;
pub mod overlap;
pub mod pairs;
pub mod polygon;
pub mod rect;

pub use decoupling::{first_decoupling, FirstDecoupling};
pub use overlap::{arrangement_depth, max_cover, overlap_count, overlap_heatmap, sum_polygons};
pub use pairs::{
    harmonic_sum, indicator_convolution, indicator_convolution_norm, pair_geometry, second_decoupling,
    write_geometry_report, ConvolutionNorm, PairGeometry,
};
pub use polygon::{clip, intersection_area, minkowski_sum, ConvexPolygon, Point};
pub use rect::{cap_rectangle, TiltedRect};
