//! Incrementally built affine flats with their smallest circumscribed sphere.
//!
//! A flat is spanned by an origin vertex and the edges to the vertices added
//! after it. The basis is kept orthonormal (modified Gram-Schmidt with one
//! re-orthogonalization pass), which lets every circumsphere update be done
//! with dot products only: if `c` and `R` describe the smallest sphere through
//! the current vertices and `p` has orthogonal offset `h·u` from the flat,
//! the smallest sphere through the enlarged set has centre `c + t·u` with
//! `t = (|p - c|² - R²) / (2h)` and radius² `R² + t²`.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Circumsphere update obtained by adjoining one point to a flat.
#[derive(Debug, Clone)]
pub(crate) struct Extension {
    /// Unit direction of the point's offset orthogonal to the flat.
    pub direction: Vec<f64>,
    /// Length of that orthogonal offset.
    pub height: f64,
    /// Signed shift of the circumcentre along `direction`.
    pub shift: f64,
    pub radius_sq: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Flat {
    origin: Vec<f64>,
    basis: Vec<Vec<f64>>,
    center: Vec<f64>,
    radius_sq: f64,
    /// Product of successive orthogonal heights, i.e. k! times the k-volume.
    height_product: f64,
    /// Longest edge from the origin vertex.
    edge_scale: f64,
}

impl Flat {
    pub fn new(origin: &[f64]) -> Self {
        Flat {
            origin: origin.to_vec(),
            basis: Vec::new(),
            center: origin.to_vec(),
            radius_sq: 0.0,
            height_product: 1.0,
            edge_scale: 0.0,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius_sq(&self) -> f64 {
        self.radius_sq
    }

    pub fn edge_scale(&self) -> f64 {
        self.edge_scale
    }

    /// Component of `p - origin` orthogonal to the flat.
    pub fn orthogonal_part(&self, p: &[f64]) -> Vec<f64> {
        let mut v: Vec<f64> = p.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        for _ in 0..2 {
            for b in &self.basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        v
    }

    /// Volume test for the simplex formed by the flat's vertices plus `p`:
    /// `vol > vol_tol · ℓ^(k+1)` with ℓ the longest edge from the origin.
    pub fn is_independent(&self, p: &[f64], height: f64, vol_tol: f64) -> bool {
        let k = self.rank() + 1;
        let scale = self.edge_scale.max(dist_sq(p, &self.origin).sqrt());
        if !(height > 0.0) || scale == 0.0 {
            return false;
        }
        let volume = self.height_product * height / factorial(k);
        volume > vol_tol * scale.powi(k as i32)
    }

    /// Smallest circumsphere after adjoining `p`, or `None` if `p` is
    /// affinely dependent on the flat under `vol_tol`.
    pub fn extension(&self, p: &[f64], vol_tol: f64) -> Option<Extension> {
        let mut direction = self.orthogonal_part(p);
        let height = dot(&direction, &direction).sqrt();
        if !self.is_independent(p, height, vol_tol) {
            return None;
        }
        direction.iter_mut().for_each(|x| *x /= height);
        let shift = (dist_sq(p, &self.center) - self.radius_sq) / (2.0 * height);
        Some(Extension {
            direction,
            height,
            shift,
            radius_sq: self.radius_sq + shift * shift,
        })
    }

    /// Adjoin `p`; returns false (leaving the flat unchanged) when `p` is
    /// affinely dependent.
    pub fn push(&mut self, p: &[f64], vol_tol: f64) -> bool {
        match self.extension(p, vol_tol) {
            Some(ext) => {
                self.apply(p, ext);
                true
            }
            None => false,
        }
    }

    pub fn apply(&mut self, p: &[f64], ext: Extension) {
        self.center
            .iter_mut()
            .zip(&ext.direction)
            .for_each(|(c, u)| *c += ext.shift * u);
        self.radius_sq = ext.radius_sq;
        self.height_product *= ext.height;
        self.edge_scale = self.edge_scale.max(dist_sq(p, &self.origin).sqrt());
        self.basis.push(ext.direction);
    }

    /// k-dimensional volume of the simplex spanned by the flat's vertices.
    #[cfg(test)]
    pub fn volume(&self) -> f64 {
        self.height_product / factorial(self.rank())
    }
}
