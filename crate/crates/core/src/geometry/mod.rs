//! Delaunay piecewise-linear interpolation at a query point.
//!
//! Nothing here builds the full triangulation. A query is answered by
//! growing one Delaunay simplex next to the nearest sample and walking
//! across facets toward the query, completing each new Delaunay simplex
//! on demand from the facet it was entered through.

mod flat;
mod point_set;
mod walk;

pub use point_set::PointSet;
pub use walk::{
    barycentric_coordinates, build_seed_simplex, circumball, complete_facet, interpolate,
    nearest_vertex, verify_empty_circumball, walk_to_containing_simplex,
};

use crate::error::GeometryError;

/// Relative slack below the circumradius inside which a point counts as
/// strictly interior to a circumball.
pub const EMPTY_BALL_SLACK: f64 = 1e-10;

/// Relative window within which two candidate completions are considered
/// tied; ties go to the smaller point index.
pub const TIE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryTolerances {
    /// Barycentric weights down to `-weight_tol` are treated as zero.
    pub weight_tol: f64,
    /// Minimum simplex volume relative to (longest edge)^d.
    pub vol_tol: f64,
    /// Minimum point separation relative to the point-cloud diameter.
    pub dup_tol: f64,
    /// Walks are abandoned after `max_flips_factor * n` facet flips.
    pub max_flips_factor: f64,
}

impl Default for GeometryTolerances {
    fn default() -> Self {
        GeometryTolerances {
            weight_tol: 1e-8,
            vol_tol: 1e-12,
            dup_tol: 1e-12,
            max_flips_factor: 10.0,
        }
    }
}

impl GeometryTolerances {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let all_positive = [
            self.weight_tol,
            self.vol_tol,
            self.dup_tol,
            self.max_flips_factor,
        ]
        .iter()
        .all(|t| t.is_finite() && *t > 0.0);
        if all_positive {
            Ok(())
        } else {
            Err(GeometryError::DegenerateInput(format!(
                "tolerances must be positive: {self:?}"
            )))
        }
    }
}

/// A d-simplex given by `d + 1` indices into a [`PointSet`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    pub fn new(vertices: Vec<usize>) -> Self {
        Simplex { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Vertex indices in increasing order, for comparing simplices.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.vertices.clone();
        v.sort_unstable();
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circumball {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocationStatus {
    Interior,
    /// The query lies outside the convex hull of the samples.
    Extrapolation,
    /// The walk hit its flip cap.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkResult {
    pub simplex: Simplex,
    /// Barycentric weights of the query, aligned with `simplex.vertices()`.
    /// Clamped and renormalized when the status is `Interior`.
    pub weights: Vec<f64>,
    pub status: LocationStatus,
    pub flips: usize,
}

impl WalkResult {
    pub fn is_interior(&self) -> bool {
        self.status == LocationStatus::Interior
    }
}

/// Outcome of completing a simplex across a facet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetCompletion {
    Vertex(usize),
    /// No sample lies beyond the facet: it belongs to the convex hull.
    Hull,
}
