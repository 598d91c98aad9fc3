//! Gradient of the Delaunay interpolant.
//!
//! Over one simplex the interpolant's graph is a flat piece of a hypersurface
//! in R^(d+1). Its normal, scaled so the last coordinate is -1, is
//! `(∇f̂, -1)`. The normal is the right singular vector belonging to the
//! smallest singular value of the centred matrix whose rows are the lifted
//! vertices `(s_ℓ, f(s_ℓ))`.

use nalgebra::DMatrix;

use crate::error::GeometryError;
use crate::geometry::{walk_to_containing_simplex, LocationStatus, PointSet};

/// Below this magnitude the normal's last coordinate marks a vertical
/// (non-graph) surface.
const VERTICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GradientResult {
    pub gradient: Vec<f64>,
    pub status: LocationStatus,
}

/// Gradient of the affine function through `(vertices[ℓ], values[ℓ])`.
pub fn simplex_gradient(vertices: &[&[f64]], values: &[f64]) -> Result<Vec<f64>, GeometryError> {
    let m = vertices.len();
    let d = m.saturating_sub(1);
    let indices = || (0..m).collect::<Vec<_>>();
    if d == 0 || values.len() != m || vertices.iter().any(|v| v.len() != d) {
        return Err(GeometryError::DegenerateSimplex(indices()));
    }

    let mut a = DMatrix::<f64>::zeros(m, m);
    for (r, (v, f)) in vertices.iter().zip(values).enumerate() {
        for c in 0..d {
            a[(r, c)] = v[c];
        }
        a[(r, d)] = *f;
    }
    for c in 0..m {
        let mean = a.column(c).mean();
        a.column_mut(c).add_scalar_mut(-mean);
    }

    let svd = a.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| GeometryError::DegenerateSimplex(indices()))?;
    let smallest = svd
        .singular_values
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc },
        )
        .0;
    let normal = v_t.row(smallest);
    let last = normal[d];
    if last.abs() < VERTICAL_TOL {
        return Err(GeometryError::DegenerateSimplex(indices()));
    }
    Ok((0..d).map(|c| -normal[c] / last).collect())
}

/// Gradient of the interpolant at `q`, taken on whichever simplex the walk
/// returns (queries on a shared facet are measure-zero).
pub fn interpolant_gradient(ps: &PointSet, q: &[f64]) -> Result<GradientResult, GeometryError> {
    let walk = walk_to_containing_simplex(ps, q)?;
    match walk.status {
        LocationStatus::Interior => {
            let verts: Vec<&[f64]> = walk
                .simplex
                .vertices()
                .iter()
                .map(|&v| ps.point(v))
                .collect();
            let vals: Vec<f64> = walk
                .simplex
                .vertices()
                .iter()
                .map(|&v| ps.value(v))
                .collect();
            Ok(GradientResult {
                gradient: simplex_gradient(&verts, &vals)?,
                status: LocationStatus::Interior,
            })
        }
        LocationStatus::Extrapolation => Ok(GradientResult {
            gradient: vec![f64::NAN; ps.dim()],
            status: LocationStatus::Extrapolation,
        }),
        LocationStatus::Degenerate => Err(GeometryError::WalkDidNotTerminate(walk.flips)),
    }
}
