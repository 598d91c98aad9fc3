use nalgebra::{DMatrix, DVector};

use super::flat::{dist_sq, dot, Flat};
use super::{
    Circumball, FacetCompletion, LocationStatus, PointSet, Simplex, WalkResult, EMPTY_BALL_SLACK,
    TIE_SLACK,
};
use crate::error::GeometryError;

/// Index of the sample closest to `q`; ties go to the smallest index.
pub fn nearest_vertex(ps: &PointSet, q: &[f64]) -> Result<usize, GeometryError> {
    ps.check_dim(q)?;
    let mut iter = ps.by_distance(q);
    let (best_d2, mut best) = iter.next().ok_or(GeometryError::EmptyPointSet)?;
    for (d2, i) in iter {
        if d2 > best_d2 {
            break;
        }
        best = best.min(i);
    }
    Ok(best)
}

fn require_full_rank_count(ps: &PointSet) -> Result<(), GeometryError> {
    let needed = ps.dim() + 1;
    if ps.len() < needed {
        return Err(GeometryError::TooFewPoints {
            needed,
            have: ps.len(),
            dim: ps.dim(),
        });
    }
    Ok(())
}

/// Grows a Delaunay simplex incident to the sample nearest `q`.
///
/// Starting from that vertex, each step adjoins the sample that minimizes
/// the radius of the smallest sphere through the enlarged face. A candidate
/// at distance ρ from the start vertex cannot beat radius ρ/2, so the scan
/// stops as soon as the nearest-first enumeration passes twice the best
/// radius found.
pub fn build_seed_simplex(ps: &PointSet, q: &[f64]) -> Result<Simplex, GeometryError> {
    require_full_rank_count(ps)?;
    let v0 = nearest_vertex(ps, q)?;
    let vol_tol = ps.tolerances().vol_tol;
    let start = ps.point(v0);
    let mut flat = Flat::new(start);
    let mut vertices = vec![v0];

    for _ in 0..ps.dim() {
        let mut best: Option<(f64, usize, _)> = None;
        for (d2, i) in ps.by_distance(start) {
            if let Some((r, _, _)) = &best {
                if 0.5 * d2.sqrt() > r * (1.0 + TIE_SLACK) {
                    break;
                }
            }
            if vertices.contains(&i) {
                continue;
            }
            let Some(ext) = flat.extension(ps.point(i), vol_tol) else {
                continue;
            };
            let r = ext.radius_sq.sqrt();
            let better = match &best {
                None => true,
                Some((br, bi, _)) => {
                    r < br * (1.0 - TIE_SLACK) || ((r - br).abs() <= br * TIE_SLACK && i < *bi)
                }
            };
            if better {
                best = Some((r, i, ext));
            }
        }
        let (_, i, ext) = best.ok_or_else(|| {
            GeometryError::DegenerateInput("samples lie in a common hyperplane".into())
        })?;
        flat.apply(ps.point(i), ext);
        vertices.push(i);
    }

    let simplex = Simplex::new(vertices);
    if !verify_empty_circumball(ps, &simplex) {
        return Err(GeometryError::DegenerateInput(format!(
            "seed simplex {:?} fails the empty-circumball check",
            simplex.vertices()
        )));
    }
    Ok(simplex)
}

fn simplex_flat(ps: &PointSet, vertices: &[usize]) -> Option<Flat> {
    let vol_tol = ps.tolerances().vol_tol;
    let mut flat = Flat::new(ps.point(vertices[0]));
    for &v in &vertices[1..] {
        if !flat.push(ps.point(v), vol_tol) {
            return None;
        }
    }
    Some(flat)
}

/// Circumscribed ball of a d-simplex.
pub fn circumball(ps: &PointSet, s: &Simplex) -> Result<Circumball, GeometryError> {
    if s.vertices().len() != ps.dim() + 1 {
        return Err(GeometryError::DegenerateSimplex(s.vertices().to_vec()));
    }
    let flat = simplex_flat(ps, s.vertices())
        .ok_or_else(|| GeometryError::DegenerateSimplex(s.vertices().to_vec()))?;
    Ok(Circumball {
        center: flat.center().to_vec(),
        radius: flat.radius_sq().sqrt(),
    })
}

/// True iff no sample lies strictly inside the open circumball of `s`.
/// A degenerate simplex has no circumball and yields false.
pub fn verify_empty_circumball(ps: &PointSet, s: &Simplex) -> bool {
    let Ok(ball) = circumball(ps, s) else {
        return false;
    };
    let limit = ball.radius * (1.0 - EMPTY_BALL_SLACK);
    let nearest = ps.by_distance(&ball.center).next();
    nearest.is_none_or(|(d2, _)| d2.sqrt() >= limit)
}

/// Solves `Σ w_i s_i = q`, `Σ w_i = 1` for the weights of `q` in `s`.
///
/// The affine system is assembled relative to the first vertex and solved
/// with an LU factorization with partial pivoting.
pub fn barycentric_coordinates(
    ps: &PointSet,
    s: &Simplex,
    q: &[f64],
) -> Result<Vec<f64>, GeometryError> {
    ps.check_dim(q)?;
    let d = ps.dim();
    let verts = s.vertices();
    if verts.len() != d + 1 {
        return Err(GeometryError::DegenerateSimplex(verts.to_vec()));
    }
    let base = ps.point(verts[0]);
    let mut scale = 0.0f64;
    let mut a = DMatrix::<f64>::zeros(d + 1, d + 1);
    for (j, &v) in verts.iter().enumerate() {
        let p = ps.point(v);
        for i in 0..d {
            a[(i, j)] = p[i] - base[i];
        }
        a[(d, j)] = 1.0;
        scale = scale.max(dist_sq(p, base).sqrt());
    }
    let mut rhs = DVector::<f64>::zeros(d + 1);
    for i in 0..d {
        rhs[i] = q[i] - base[i];
    }
    rhs[d] = 1.0;

    let lu = a.lu();
    let volume = lu.determinant().abs() / (1..=d).map(|k| k as f64).product::<f64>();
    if !(volume > ps.tolerances().vol_tol * scale.powi(d as i32)) {
        return Err(GeometryError::DegenerateSimplex(verts.to_vec()));
    }
    let w = lu
        .solve(&rhs)
        .ok_or_else(|| GeometryError::DegenerateSimplex(verts.to_vec()))?;
    Ok(w.iter().copied().collect())
}

/// Completes a Delaunay simplex on the far side of `facet` from `away_from`.
///
/// With `c`, `R` the circumsphere of the facet within its hyperplane and `n`
/// the unit normal pointing away from `away_from`, a far-side sample `p` at
/// height `h = (p - c)·n > 0` determines the sphere centred at `c + t·n`,
/// `t = (|p - c|² - R²) / (2h)`. The Delaunay completion minimizes `t`. For
/// samples with `|p - c| = ρ ≥ R`, `t ≥ (ρ² - R²) / (2ρ)`, which increases
/// with ρ and bounds the nearest-first scan.
pub fn complete_facet(
    ps: &PointSet,
    facet: &[usize],
    away_from: usize,
) -> Result<FacetCompletion, GeometryError> {
    let d = ps.dim();
    if facet.len() != d || facet.contains(&away_from) {
        return Err(GeometryError::DegenerateFacet(facet.to_vec()));
    }
    let flat =
        simplex_flat(ps, facet).ok_or_else(|| GeometryError::DegenerateFacet(facet.to_vec()))?;
    let mut normal = flat.orthogonal_part(ps.point(away_from));
    let h_away = dot(&normal, &normal).sqrt();
    if !flat.is_independent(ps.point(away_from), h_away, ps.tolerances().vol_tol) {
        return Err(GeometryError::DegenerateFacet(facet.to_vec()));
    }
    normal.iter_mut().for_each(|x| *x /= -h_away);

    let vol_tol = ps.tolerances().vol_tol;
    let center = flat.center();
    let r_sq = flat.radius_sq();
    let radius = r_sq.sqrt();
    let tie = TIE_SLACK * flat.edge_scale().max(radius);
    let origin = flat.origin();
    let mut offset = vec![0.0; d];
    let mut best: Option<(f64, usize)> = None;

    for (d2, i) in ps.by_distance(center) {
        let rho = d2.sqrt();
        if let Some((bt, _)) = best {
            if rho > 0.0 && rho >= radius && (d2 - r_sq) / (2.0 * rho) > bt + tie {
                break;
            }
        }
        let p = ps.point(i);
        offset
            .iter_mut()
            .zip(p.iter().zip(origin))
            .for_each(|(o, (a, b))| *o = a - b);
        let h = dot(&offset, &normal);
        if !(h > 0.0) || !flat.is_independent(p, h, vol_tol) {
            continue;
        }
        let t = (d2 - r_sq) / (2.0 * h);
        let better = match best {
            None => true,
            Some((bt, bi)) => t < bt - tie || ((t - bt).abs() <= tie && i < bi),
        };
        if better {
            best = Some((t, i));
        }
    }

    Ok(match best {
        Some((_, i)) => FacetCompletion::Vertex(i),
        None => FacetCompletion::Hull,
    })
}

/// Locates the Delaunay simplex containing `q` by a visibility walk from the
/// seed simplex, always crossing the facet opposite the most negative weight.
pub fn walk_to_containing_simplex(ps: &PointSet, q: &[f64]) -> Result<WalkResult, GeometryError> {
    let seed = build_seed_simplex(ps, q)?;
    let tol = *ps.tolerances();
    let max_flips = (tol.max_flips_factor * ps.len() as f64).ceil() as usize;
    let mut vertices = seed.vertices().to_vec();
    let mut flips = 0;

    loop {
        let simplex = Simplex::new(vertices.clone());
        let mut weights = barycentric_coordinates(ps, &simplex, q)?;
        let (worst, min_w) =
            weights
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (j, w)| if w < acc.1 { (j, w) } else { acc },
                );

        if min_w >= -tol.weight_tol {
            weights.iter_mut().for_each(|w| *w = w.max(0.0));
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            return Ok(WalkResult {
                simplex,
                weights,
                status: LocationStatus::Interior,
                flips,
            });
        }
        if flips >= max_flips {
            return Ok(WalkResult {
                simplex,
                weights,
                status: LocationStatus::Degenerate,
                flips,
            });
        }

        let away = vertices[worst];
        let facet: Vec<usize> = vertices
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != worst)
            .map(|(_, &v)| v)
            .collect();
        match complete_facet(ps, &facet, away)? {
            FacetCompletion::Vertex(v) => {
                vertices[worst] = v;
                flips += 1;
            }
            FacetCompletion::Hull => {
                return Ok(WalkResult {
                    simplex,
                    weights,
                    status: LocationStatus::Extrapolation,
                    flips,
                });
            }
        }
    }
}

/// Value of the Delaunay interpolant at `q`; `None` when `q` lies outside
/// the convex hull of the samples.
pub fn interpolate(ps: &PointSet, q: &[f64]) -> Result<Option<f64>, GeometryError> {
    let walk = walk_to_containing_simplex(ps, q)?;
    match walk.status {
        LocationStatus::Interior => Ok(Some(weighted_value(ps, &walk))),
        LocationStatus::Extrapolation => Ok(None),
        LocationStatus::Degenerate => Err(GeometryError::WalkDidNotTerminate(walk.flips)),
    }
}

pub(crate) fn weighted_value(ps: &PointSet, walk: &WalkResult) -> f64 {
    walk.simplex
        .vertices()
        .iter()
        .zip(&walk.weights)
        .map(|(&v, w)| w * ps.value(v))
        .sum()
}
