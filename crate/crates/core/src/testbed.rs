//! Analytic test functions with closed-form gradients.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

pub trait TestFunction: Send + Sync {
    fn name(&self) -> &str;

    /// Fixed input dimension, or `None` when any dimension is accepted.
    fn dim(&self) -> Option<usize>;

    fn eval(&self, x: &[f64]) -> f64;

    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// `g_d(x) = Σ x_i²/4000 − Π cos(x_i/√i) + 1`, indices starting at 1.
pub fn griewank(x: &[f64]) -> f64 {
    let sum: f64 = x.iter().map(|v| v * v / 4000.0).sum();
    let prod: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    sum - prod + 1.0
}

pub fn griewank_gradient(x: &[f64]) -> Vec<f64> {
    let roots: Vec<f64> = (1..=x.len()).map(|i| (i as f64).sqrt()).collect();
    (0..x.len())
        .map(|i| {
            let others: f64 = (0..x.len())
                .filter(|&j| j != i)
                .map(|j| (x[j] / roots[j]).cos())
                .product();
            x[i] / 2000.0 + (x[i] / roots[i]).sin() / roots[i] * others
        })
        .collect()
}

pub fn ackley2(x: f64, y: f64) -> f64 {
    -20.0 * (-0.2 * ((x * x + y * y) / 2.0).sqrt()).exp()
        - (((2.0 * PI * x).cos() + (2.0 * PI * y).cos()) / 2.0).exp()
        + 20.0
        + E
}

/// Undefined at the origin, where the radial term has a cusp.
pub fn ackley2_gradient(x: f64, y: f64) -> Option<[f64; 2]> {
    let r = ((x * x + y * y) / 2.0).sqrt();
    if r == 0.0 {
        return None;
    }
    let radial = 2.0 * (-0.2 * r).exp() / r;
    let cosine = (((2.0 * PI * x).cos() + (2.0 * PI * y).cos()) / 2.0).exp() * PI;
    Some([
        radial * x + cosine * (2.0 * PI * x).sin(),
        radial * y + cosine * (2.0 * PI * y).sin(),
    ])
}

pub fn quadratic_bowl(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v / 4000.0).sum()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform value in `[-1, 1)` keyed on `(seed, x)`.
///
/// The seed and the IEEE-754 bit pattern of each coordinate are folded
/// through SplitMix64; the top 53 bits of the result give `u ∈ [0, 1)` and
/// the value is `2u − 1`. Re-evaluating a point returns the same value.
pub fn uniform_noise(seed: u64, x: &[f64]) -> f64 {
    let mut h = splitmix64(seed);
    for v in x {
        h = splitmix64(h ^ v.to_bits());
    }
    let u = (h >> 11) as f64 / (1u64 << 53) as f64;
    2.0 * u - 1.0
}

#[derive(Debug, Clone)]
pub struct Griewank;

impl TestFunction for Griewank {
    fn name(&self) -> &str {
        "griewank"
    }
    fn dim(&self) -> Option<usize> {
        None
    }
    fn eval(&self, x: &[f64]) -> f64 {
        griewank(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(griewank_gradient(x))
    }
}

#[derive(Debug, Clone)]
pub struct Ackley2;

impl TestFunction for Ackley2 {
    fn name(&self) -> &str {
        "ackley"
    }
    fn dim(&self) -> Option<usize> {
        Some(2)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        ackley2(x[0], x[1])
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        ackley2_gradient(x[0], x[1]).map(|g| g.to_vec())
    }
}

#[derive(Debug, Clone)]
pub struct QuadraticBowl;

impl TestFunction for QuadraticBowl {
    fn name(&self) -> &str {
        "quadratic"
    }
    fn dim(&self) -> Option<usize> {
        None
    }
    fn eval(&self, x: &[f64]) -> f64 {
        quadratic_bowl(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.iter().map(|v| v / 2000.0).collect())
    }
}

#[derive(Debug, Clone)]
pub struct UniformNoise {
    pub seed: u64,
}

impl TestFunction for UniformNoise {
    fn name(&self) -> &str {
        "noise"
    }
    fn dim(&self) -> Option<usize> {
        None
    }
    fn eval(&self, x: &[f64]) -> f64 {
        uniform_noise(self.seed, x)
    }
}

/// `a·x + c`.
#[derive(Debug, Clone)]
pub struct Affine {
    pub coefficients: Vec<f64>,
    pub offset: f64,
}

impl TestFunction for Affine {
    fn name(&self) -> &str {
        "affine"
    }
    fn dim(&self) -> Option<usize> {
        Some(self.coefficients.len())
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.offset
            + self
                .coefficients
                .iter()
                .zip(x)
                .map(|(a, v)| a * v)
                .sum::<f64>()
    }
    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        Some(self.coefficients.clone())
    }
}

/// Names accepted by [`by_name`].
pub const FUNCTION_NAMES: &[&str] = &["griewank", "ackley", "noise", "quadratic", "affine"];

/// Looks a test function up by name. `seed` keys the noise function; the
/// affine entry is `1 + Σ (i+1)·x_i`.
pub fn by_name(name: &str, dim: usize, seed: u64) -> Result<Box<dyn TestFunction>> {
    let f: Box<dyn TestFunction> = match name {
        "griewank" => Box::new(Griewank),
        "ackley" => Box::new(Ackley2),
        "noise" => Box::new(UniformNoise { seed }),
        "quadratic" => Box::new(QuadraticBowl),
        "affine" => Box::new(Affine {
            coefficients: (1..=dim).map(|i| i as f64).collect(),
            offset: 1.0,
        }),
        other => return Err(Error::UnknownFunction(other.to_string())),
    };
    if let Some(fixed) = f.dim() {
        if fixed != dim {
            return Err(Error::InvalidArgument(format!(
                "function `{name}` is defined for d={fixed}, not d={dim}"
            )));
        }
    }
    Ok(f)
}
