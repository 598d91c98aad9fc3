use kdtree::distance::squared_euclidean;
use kdtree::KdTree;

use super::GeometryTolerances;
use crate::error::GeometryError;

/// Immutable scattered sample: `n` points in R^d with one scalar value each.
///
/// A k-d tree over the points is built once at construction; it only
/// accelerates candidate enumeration and never changes a returned result.
#[derive(Debug, Clone)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    values: Vec<f64>,
    diameter: f64,
    tolerances: GeometryTolerances,
    tree: KdTree<f64, usize, Vec<f64>>,
}

impl PointSet {
    /// Builds a point set from row-major coordinates (`n * dim` entries).
    pub fn new(dim: usize, coords: Vec<f64>, values: Vec<f64>) -> Result<Self, GeometryError> {
        Self::with_tolerances(dim, coords, values, GeometryTolerances::default())
    }

    pub fn from_points(points: &[Vec<f64>], values: Vec<f64>) -> Result<Self, GeometryError> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or(GeometryError::EmptyPointSet)?;
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords, values)
    }

    pub fn with_tolerances(
        dim: usize,
        coords: Vec<f64>,
        values: Vec<f64>,
        tolerances: GeometryTolerances,
    ) -> Result<Self, GeometryError> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(GeometryError::DimensionMismatch {
                expected: dim,
                got: coords.len(),
            });
        }
        let n = coords.len() / dim;
        if values.len() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: values.len(),
            });
        }
        if n == 0 {
            return Err(GeometryError::EmptyPointSet);
        }

        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for (i, p) in coords.chunks_exact(dim).enumerate() {
            if p.iter().any(|x| !x.is_finite()) || !values[i].is_finite() {
                return Err(GeometryError::NonFinite(i));
            }
            for j in 0..dim {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
        }
        let diameter = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt();

        let mut tree = KdTree::with_capacity(dim, 16);
        for (i, p) in coords.chunks_exact(dim).enumerate() {
            tree.add(p.to_vec(), i).expect("coordinates checked finite");
        }

        let ps = PointSet {
            dim,
            coords,
            values,
            diameter,
            tolerances,
            tree,
        };
        ps.check_duplicates()?;
        Ok(ps)
    }

    fn check_duplicates(&self) -> Result<(), GeometryError> {
        if self.len() < 2 {
            return Ok(());
        }
        let limit = self.tolerances.dup_tol * self.diameter;
        let limit_sq = limit * limit;
        for i in 0..self.len() {
            let near = self
                .tree
                .nearest(self.point(i), 2, &squared_euclidean)
                .expect("finite query");
            for &(d2, &j) in &near {
                if j != i && d2 <= limit_sq {
                    return Err(GeometryError::DuplicatePoint {
                        first: i.min(j),
                        second: i.max(j),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Diagonal of the axis-aligned bounding box of the points.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn tolerances(&self) -> &GeometryTolerances {
        &self.tolerances
    }

    pub(crate) fn check_dim(&self, q: &[f64]) -> Result<(), GeometryError> {
        if q.len() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                got: q.len(),
            });
        }
        if q.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite(usize::MAX));
        }
        Ok(())
    }

    /// Point indices in order of increasing squared distance from `center`.
    pub(crate) fn by_distance<'a>(
        &'a self,
        center: &'a [f64],
    ) -> impl Iterator<Item = (f64, usize)> + 'a {
        self.tree
            .iter_nearest(center, &squared_euclidean)
            .expect("finite query")
            .map(|(d2, &i)| (d2, i))
    }
}
