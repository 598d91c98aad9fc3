//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::time::Instant;

use common::{affine_gradient, dist, rng, unit_cube_points, BruteDelaunay};
use delaunay_density::diagnostic::{
    aggregate, next_sample_total, Diagnostic, RateEstimator, RateRecord, Schedule, Trial,
    TrialAggregate,
};
use delaunay_density::geometry::{
    barycentric_coordinates, interpolate, verify_empty_circumball, walk_to_containing_simplex,
    PointSet,
};
use delaunay_density::gradient::{interpolant_gradient, simplex_gradient};
use delaunay_density::report::{write_aggregate_csv, write_trials_csv};
use delaunay_density::sampling::{
    box_from_qpdf, build_lattice, dedup_cluster, percentile_lattice, sample_uniform, seeded_rng,
    BoundingBox, QuerySet,
};
use delaunay_density::testbed::{ackley2, griewank, uniform_noise};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// The 20×20 lattice on `[-h, h]²` and the sampling box 25% wider.
fn square_setup(h: f64) -> (BoundingBox, QuerySet) {
    let queries = build_lattice(&[0.0, 0.0], 2.0 * h, 20).unwrap();
    (box_from_qpdf(2.0 * h, 0.8, &[0.0, 0.0]).unwrap(), queries)
}

fn dynamic_trials<F>(
    f: F,
    h: f64,
    b: f64,
    cap: usize,
    seeds: std::ops::Range<u64>,
) -> TrialAggregate
where
    F: Fn(u64, &[f64]) -> f64,
{
    let (bbox, queries) = square_setup(h);
    let diag = Diagnostic::new(Schedule::new(b, 9, Some(cap), None).unwrap()).unwrap();
    let trials: Vec<Vec<RateRecord>> = seeds
        .map(|s| {
            diag.run_dynamic(|x: &[f64]| f(s, x), &bbox, &queries, s)
                .unwrap()
        })
        .collect();
    aggregate(&trials).unwrap()
}

fn means_at_smallest(agg: &TrialAggregate, count: usize) -> Vec<(f64, f64, f64)> {
    agg.rows
        .iter()
        .rev()
        .take(count)
        .map(|r| {
            let m = |s: &Option<delaunay_density::diagnostic::RateStats>| {
                s.as_ref().map_or(f64::NAN, |s| s.mean)
            };
            (r.samp, m(&r.msd), m(&r.grad))
        })
        .collect()
}

fn fmt_means(v: &[(f64, f64, f64)]) -> String {
    v.iter()
        .map(|(s, m, g)| format!("samp {s:.3}: msd {m:.3}, grad {g:.3}"))
        .collect::<Vec<_>>()
        .join("; ")
}

fn geometry_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1001);
    let (mut compared, mut skipped, mut worst) = (0usize, 0usize, 0.0f64);
    for set in 0..20 {
        let d = 2 + set % 2;
        let n = r.random_range(30..=60);
        let pts = unit_cube_points(&mut r, n, d);
        let vals: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let oracle = BruteDelaunay::new(pts.clone(), vals.clone());
        let ps = PointSet::from_points(&pts, vals).unwrap();
        let mut interior = 0;
        while interior < 100 {
            let q: Vec<f64> = (0..d).map(|_| r.random::<f64>()).collect();
            let Some((expected, clear)) = oracle.interpolate(&q) else {
                continue;
            };
            interior += 1;
            if !clear {
                skipped += 1;
                continue;
            }
            let got = interpolate(&ps, &q).map_err(|e| format!("set {set}: {e}"))?;
            let got =
                got.ok_or_else(|| format!("set {set}: interior query {q:?} flagged outside"))?;
            worst = worst.max((got - expected).abs());
            compared += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-9 && secs < 60.0,
        format!("{compared} queries compared, {skipped} tie-region skipped, max error {worst:.2e}, {secs:.1}s"),
    )
}

fn affine_exactness() -> Outcome {
    let mut r = rng(1002);
    let (mut worst_v, mut worst_g, mut queries) = (0.0f64, 0.0f64, 0usize);
    for i in 0..10 {
        let d = 2 + i % 4;
        let a: Vec<f64> = (0..d).map(|_| r.random_range(-5.0..5.0)).collect();
        let c = r.random_range(-5.0..5.0);
        let f = |x: &[f64]| c + a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>();
        let pts = unit_cube_points(&mut r, 2000, d);
        let ps = PointSet::from_points(&pts, pts.iter().map(|p| f(p)).collect()).unwrap();
        for q in unit_cube_points(&mut r, 100, d) {
            let g = interpolant_gradient(&ps, &q).map_err(|e| e.to_string())?;
            let Some(v) = interpolate(&ps, &q).map_err(|e| e.to_string())? else {
                continue;
            };
            queries += 1;
            worst_v = worst_v.max((v - f(&q)).abs() / (1.0 + f(&q).abs()));
            worst_g = worst_g.max(
                g.gradient
                    .iter()
                    .zip(&a)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max),
            );
        }
    }
    check(
        worst_v <= 1e-9 && worst_g <= 1e-9,
        format!("{queries} interior queries, max relative value error {worst_v:.2e}, max gradient error {worst_g:.2e}"),
    )
}

fn noise_rates() -> Outcome {
    let agg = dynamic_trials(uniform_noise, 10.0, 1.4641, 200_000, 0..10);
    let m = means_at_smallest(&agg, 3);
    let ok = m
        .iter()
        .all(|(_, msd, grad)| msd.abs() <= 0.2 && (-1.2..=-0.8).contains(grad));
    check(ok, fmt_means(&m))
}

fn smooth_rates() -> Outcome {
    let agg = dynamic_trials(|_, x| griewank(x), 1000.0, 1.4641, 200_000, 0..10);
    let m = means_at_smallest(&agg, 3);
    let ok = m
        .iter()
        .all(|(_, msd, grad)| (1.7..=2.3).contains(msd) && (0.7..=1.3).contains(grad));
    check(ok, fmt_means(&m))
}

fn scale_transition() -> Outcome {
    let agg = dynamic_trials(|_, x| ackley2(x[0], x[1]), 10.0, 1.4641, 100_000, 0..10);
    let mean = |row: &delaunay_density::diagnostic::AggregateRow| {
        row.msd.as_ref().map_or(f64::NAN, |s| s.mean)
    };
    let fine = agg
        .rows
        .iter()
        .filter(|r| r.samp < 0.1)
        .max_by(|a, b| a.samp.total_cmp(&b.samp))
        .ok_or("no spacing below 0.1")?;
    let coarse = agg
        .rows
        .iter()
        .min_by(|a, b| (a.samp - 0.8).abs().total_cmp(&(b.samp - 0.8).abs()))
        .ok_or("no rows")?;
    let (mf, mc) = (mean(fine), mean(coarse));
    check(
        mf >= 1.5 && mc.abs() <= 0.5,
        format!(
            "samp {:.3}: msd {mf:.3}; samp {:.3}: msd {mc:.3}",
            fine.samp, coarse.samp
        ),
    )
}

fn upsampling_schedule() -> Outcome {
    let mut worst: Vec<String> = Vec::new();
    let mut ok = true;
    for b in [1.1, 1.21, 1.4641] {
        for d in 2..5 {
            let totals = Schedule::new(b, 9, Some(10_000_000), None)
                .unwrap()
                .totals(d);
            let target = f64::powi(b, d as i32);
            let gap = totals
                .windows(2)
                .filter(|w| w[0] >= 10_000)
                .map(|w| ((w[1] as f64 / w[0] as f64) - target).abs() / target)
                .fold(0.0, f64::max);
            ok &= gap <= 0.02;
            worst.push(format!("b={b} d={d}: {:.2}%", 100.0 * gap));
        }
    }
    let n = next_sample_total(17830, 1.4641, 2);
    let rel = (n as f64 - 38039.0).abs() / 38039.0;
    ok &= rel <= 1e-3;
    check(
        ok,
        format!(
            "max ratio gap over n_k in [1e4, 1e7]: {}; next(17830) = {n}",
            worst.join(", ")
        ),
    )
}

fn b_fluctuation() -> Outcome {
    let bs = [1.1, 1.21, 1.4641];
    let aggs: Vec<TrialAggregate> = bs
        .iter()
        .map(|&b| dynamic_trials(|_, x| ackley2(x[0], x[1]), 10.0, b, 100_000, 0..20))
        .collect();
    let iqr = |agg: &TrialAggregate, n: usize| {
        let row = agg.rows.iter().min_by_key(|r| r.n_k.abs_diff(n)).unwrap();
        row.msd.as_ref().map_or(f64::NAN, |s| s.q75 - s.q25)
    };
    let (mut good, mut bins) = (0, 0);
    let mut widths = Vec::new();
    for row in aggs[2].rows.iter().filter(|r| r.n_k >= 1000) {
        let w: Vec<f64> = aggs.iter().map(|a| iqr(a, row.n_k)).collect();
        bins += 1;
        if w[0] >= w[1] && w[1] >= w[2] {
            good += 1;
        }
        widths.push(format!(
            "n~{}: {:.2}/{:.2}/{:.2}",
            row.n_k, w[0], w[1], w[2]
        ));
    }
    check(
        bins > 0 && good * 5 >= bins * 4,
        format!(
            "{good}/{bins} bins non-increasing in b ({})",
            widths.join(", ")
        ),
    )
}

fn static_mode() -> Outcome {
    let bbox = BoundingBox::cube(&[0.0, 0.0], 20.0).unwrap();
    let pts = sample_uniform(&bbox, 5000, &mut seeded_rng(2024));
    let ds = dedup_cluster(pts.iter().map(|p| (p.clone(), griewank(p))).collect(), 0.0).unwrap();
    let queries = percentile_lattice(&ds, 20, 10.0, 90.0).unwrap();
    let schedule = Schedule::new(1.4641, 9, Some(usize::MAX), None).unwrap();
    let diag = Diagnostic::new(schedule).unwrap();
    let trials: Vec<Vec<RateRecord>> = (0..10)
        .map(|s| diag.run_static(&ds, &queries, s).unwrap())
        .collect();
    let last = trials[0].last().ok_or("no records")?.n_k;
    let breaks = last <= ds.len()
        && next_sample_total(last, 1.4641, 2) > ds.len()
        && trials.iter().all(|t| t.last().map(|r| r.n_k) == Some(last));
    let agg = aggregate(&trials).unwrap();
    let densest = agg.rows.last().unwrap();
    let m = densest.msd.as_ref().map_or(f64::NAN, |s| s.mean);
    check(
        breaks && (1.5..=2.5).contains(&m),
        format!(
            "last n_k {last} of {} (next {}), densest samp {:.3}: mean msd {m:.3}",
            ds.len(),
            next_sample_total(last, 1.4641, 2),
            densest.samp
        ),
    )
}

fn property_suite() -> Outcome {
    let mut r = rng(1003);
    let mut failures = Vec::new();

    // Barycentric reconstruction and empty circumballs of walked simplices.
    for _ in 0..50 {
        let pts = unit_cube_points(&mut r, 50, 3);
        let ps = PointSet::from_points(&pts, vec![0.0; 50]).unwrap();
        let q: Vec<f64> = (0..3).map(|_| r.random_range(0.2..0.8)).collect();
        let w = walk_to_containing_simplex(&ps, &q).unwrap();
        if !verify_empty_circumball(&ps, &w.simplex) {
            failures.push("walked simplex has a nonempty circumball");
        }
        let bw = barycentric_coordinates(&ps, &w.simplex, &q).unwrap();
        let back: Vec<f64> = (0..3)
            .map(|j| {
                w.simplex
                    .vertices()
                    .iter()
                    .zip(&bw)
                    .map(|(&v, x)| ps.point(v)[j] * x)
                    .sum()
            })
            .collect();
        if dist(&back, &q) > 1e-12 || (bw.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            failures.push("barycentric reconstruction");
        }
    }

    // SVD gradient against a direct solve.
    for _ in 0..200 {
        let d = r.random_range(1..5);
        let pts = unit_cube_points(&mut r, d + 1, d);
        let vals: Vec<f64> = (0..=d).map(|_| r.random_range(-1.0..1.0)).collect();
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let direct = affine_gradient(&refs, &vals).unwrap();
        if direct.iter().any(|g| g.abs() > 1e4) {
            continue;
        }
        let g = simplex_gradient(&refs, &vals).unwrap();
        if g.iter()
            .zip(&direct)
            .any(|(a, b)| (a - b).abs() > 1e-8 * (1.0 + b.abs()))
        {
            failures.push("SVD gradient disagrees with linear solve");
        }
    }

    // Rate identities and value-scale equivariance.
    for rho in [-1.0, 0.0, 1.0, 2.0] {
        for b in [1.1, 1.21, 1.4641] {
            let cur: Vec<Option<f64>> = (0..40).map(|_| Some(r.random_range(-1.0..1.0))).collect();
            let prev: Vec<Option<f64>> = cur
                .iter()
                .map(|c| c.map(|v| v * f64::powf(b, rho)))
                .collect();
            let est = RateEstimator::new(b);
            let rate = est.msd(&prev, &cur, 1.0).unwrap();
            if (rate - rho).abs() > 1e-9 {
                failures.push("rate identity");
            }
            let c = 1234.5;
            let scale = |v: &[Option<f64>]| v.iter().map(|x| x.map(|x| x * c)).collect::<Vec<_>>();
            let scaled = est.msd(&scale(&prev), &scale(&cur), c).unwrap();
            if (scaled - rate).abs() > 1e-9 {
                failures.push("value-scale equivariance");
            }
        }
    }

    // Deduplication is idempotent.
    for _ in 0..20 {
        let rows: Vec<(Vec<f64>, f64)> = (0..80)
            .map(|_| {
                (
                    vec![r.random::<f64>(), r.random::<f64>()],
                    r.random::<f64>(),
                )
            })
            .collect();
        let once = dedup_cluster(rows, 0.05).unwrap();
        let again = once
            .inputs()
            .iter()
            .cloned()
            .zip(once.values().iter().copied())
            .collect();
        let twice = dedup_cluster(again, 0.05).unwrap();
        if once != twice {
            failures.push("dedup not idempotent");
        }
    }

    // End-to-end determinism of the CSV output.
    let render = || {
        let (bbox, queries) = square_setup(10.0);
        let diag = Diagnostic::new(Schedule::new(1.4641, 9, Some(5000), None).unwrap()).unwrap();
        let trials: Vec<Trial> = (0..3)
            .map(|seed| Trial {
                seed,
                records: diag.run_dynamic(griewank, &bbox, &queries, seed).unwrap(),
            })
            .collect();
        let agg = aggregate(&trials.iter().map(|t| t.records.clone()).collect::<Vec<_>>()).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_trials_csv(&mut a, &trials).unwrap();
        write_aggregate_csv(&mut b, &agg).unwrap();
        (a, b)
    };
    if render() != render() {
        failures.push("output not deterministic");
    }

    failures.dedup();
    check(
        failures.is_empty(),
        if failures.is_empty() {
            "all invariants hold".into()
        } else {
            failures.join(", ")
        },
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("geometry oracle equivalence", geometry_oracle),
        ("affine exactness", affine_exactness),
        ("noise rates", noise_rates),
        ("smooth rates", smooth_rates),
        ("scale transition", scale_transition),
        ("upsampling schedule", upsampling_schedule),
        ("b-fluctuation trend", b_fluctuation),
        ("static mode", static_mode),
        ("property suite", property_suite),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} [{secs:.1}s]: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
