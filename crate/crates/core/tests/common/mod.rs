//! Brute-force references shared by the integration and acceptance tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_cube_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Circumcentre from the linear system `2(p_i - p_0)·c = |p_i|² - |p_0|²`.
pub fn circumcenter(pts: &[&[f64]]) -> Option<Vec<f64>> {
    let d = pts[0].len();
    let mut a = DMatrix::<f64>::zeros(d, d);
    let mut rhs = DVector::<f64>::zeros(d);
    let n0: f64 = pts[0].iter().map(|x| x * x).sum();
    for i in 0..d {
        let p = pts[i + 1];
        for j in 0..d {
            a[(i, j)] = 2.0 * (p[j] - pts[0][j]);
        }
        rhs[i] = p.iter().map(|x| x * x).sum::<f64>() - n0;
    }
    let c = a.lu().solve(&rhs)?;
    Some(c.iter().copied().collect())
}

/// Weights from the homogeneous `(d+1)×(d+1)` system.
pub fn barycentric(pts: &[&[f64]], q: &[f64]) -> Option<Vec<f64>> {
    let d = q.len();
    let mut a = DMatrix::<f64>::zeros(d + 1, d + 1);
    for (j, p) in pts.iter().enumerate() {
        for i in 0..d {
            a[(i, j)] = p[i];
        }
        a[(d, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(d + 1);
    for i in 0..d {
        rhs[i] = q[i];
    }
    rhs[d] = 1.0;
    a.lu().solve(&rhs).map(|w| w.iter().copied().collect())
}

/// Gradient of the affine function through `(p_i, v_i)` by a direct solve
/// of `(p_i - p_0)·g = v_i - v_0`.
pub fn affine_gradient(pts: &[&[f64]], vals: &[f64]) -> Option<Vec<f64>> {
    let d = pts[0].len();
    let mut a = DMatrix::<f64>::zeros(d, d);
    let mut rhs = DVector::<f64>::zeros(d);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = pts[i + 1][j] - pts[0][j];
        }
        rhs[i] = vals[i + 1] - vals[0];
    }
    a.lu().solve(&rhs).map(|g| g.iter().copied().collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub struct OracleSimplex {
    pub vertices: Vec<usize>,
    pub center: Vec<f64>,
    pub radius: f64,
    /// Some other sample lies within a relative `1e-7` of the sphere.
    pub near_cospherical: bool,
}

/// Delaunay triangulation by enumerating every (d+1)-subset and keeping
/// those with an empty circumball.
pub struct BruteDelaunay {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub simplices: Vec<OracleSimplex>,
}

impl BruteDelaunay {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>) -> Self {
        let d = points[0].len();
        let mut simplices = Vec::new();
        for verts in combinations(points.len(), d + 1) {
            let pts: Vec<&[f64]> = verts.iter().map(|&i| points[i].as_slice()).collect();
            let mut m = DMatrix::<f64>::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] = pts[i + 1][j] - pts[0][j];
                }
            }
            // Near-flat subsets have no usable circumball.
            if m.determinant().abs() < 1e-12 {
                continue;
            }
            let Some(center) = circumcenter(&pts) else {
                continue;
            };
            let radius = dist(&center, pts[0]);
            let mut empty = true;
            let mut near = false;
            for (i, p) in points.iter().enumerate() {
                if verts.contains(&i) {
                    continue;
                }
                let rel = (dist(p, &center) - radius) / radius;
                if rel < -1e-7 {
                    empty = false;
                    break;
                }
                if rel < 1e-7 {
                    near = true;
                }
            }
            if empty {
                simplices.push(OracleSimplex {
                    vertices: verts,
                    center,
                    radius,
                    near_cospherical: near,
                });
            }
        }
        BruteDelaunay {
            points,
            values,
            simplices,
        }
    }

    /// Simplices whose closure contains `q`.
    pub fn containing(&self, q: &[f64]) -> Vec<(&OracleSimplex, Vec<f64>)> {
        self.simplices
            .iter()
            .filter_map(|s| {
                let pts: Vec<&[f64]> = s
                    .vertices
                    .iter()
                    .map(|&i| self.points[i].as_slice())
                    .collect();
                let w = barycentric(&pts, q)?;
                (w.iter().all(|x| *x >= -1e-12)).then_some((s, w))
            })
            .collect()
    }

    /// Interpolated value at `q` and whether the location is unambiguous
    /// (no near-cospherical simplex involved). `None` outside the hull.
    pub fn interpolate(&self, q: &[f64]) -> Option<(f64, bool)> {
        let hits = self.containing(q);
        let (s, w) = hits.first()?;
        let value = s
            .vertices
            .iter()
            .zip(w)
            .map(|(&i, w)| w * self.values[i])
            .sum();
        let clear = hits.iter().all(|(s, _)| !s.near_cospherical);
        Some((value, clear))
    }

    pub fn contains_simplex(&self, verts: &[usize]) -> bool {
        let mut v = verts.to_vec();
        v.sort_unstable();
        self.simplices.iter().any(|s| s.vertices == v)
    }
}

pub fn brute_nearest(points: &[Vec<f64>], q: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..points.len() {
        if dist(&points[i], q) < dist(&points[best], q) {
            best = i;
        }
    }
    best
}
