use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes and positive weights on an interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: [f64; 2],
    /// Highest polynomial degree integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<T, F>(&self, mut f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::default(), |acc, (&x, &w)| acc + f(x) * w)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule with `n` nodes on `[a, b]`, exact through degree `2n − 1`.
pub fn gauss_legendre(n: usize, interval: [f64; 2]) -> Result<QuadratureRule> {
    let [a, b] = interval;
    if n == 0 || !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval { a, b });
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = mid - half * x;
        nodes[n - 1 - i] = mid + half * x;
        weights[i] = w * half;
        weights[n - 1 - i] = w * half;
    }
    if n % 2 == 1 {
        let c = n / 2;
        nodes[c] = mid;
        let (_, d) = legendre_with_derivative(n, 0.0);
        weights[c] = 2.0 / (d * d) * half;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        interval,
        degree: 2 * n - 1,
    })
}

/// Smallest Gauss–Legendre size exact through `degree`.
pub fn nodes_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

/// Equispaced rule on `[0, 2π)`, exact for trigonometric polynomials of degree `< n`.
pub fn periodic_trapezoid(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidInterval {
            a: 0.0,
            b: 2.0 * PI,
        });
    }
    let h = 2.0 * PI / n as f64;
    Ok(QuadratureRule {
        nodes: (0..n).map(|k| k as f64 * h).collect(),
        weights: vec![h; n],
        interval: [0.0, 2.0 * PI],
        degree: n - 1,
    })
}

/// Concatenated Gauss–Legendre rules over consecutive break points.
pub fn composite_gauss_legendre(n_per_piece: usize, breaks: &[f64]) -> Result<QuadratureRule> {
    if breaks.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two break points".into(),
        ));
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let r = gauss_legendre(n_per_piece, [w[0], w[1]])?;
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    if nodes.is_empty() {
        return Err(Error::InvalidInterval {
            a: breaks[0],
            b: *breaks.last().unwrap(),
        });
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        interval: [breaks[0], *breaks.last().unwrap()],
        degree: 2 * n_per_piece - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_and_two_points() {
        let r = gauss_legendre(1, [-1.0, 1.0]).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert!((r.weights[0] - 2.0).abs() < 1e-15);
        let r = gauss_legendre(2, [-1.0, 1.0]).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + s).abs() < 1e-15 && (r.nodes[1] - s).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15 && (r.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn twenty_points_r30() {
        let r = gauss_legendre(20, [0.0, 1.0]).unwrap();
        let v: f64 = r.integrate(|x| x.powi(30));
        assert!((v - 1.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(gauss_legendre(0, [0.0, 1.0]).is_err());
        assert!(gauss_legendre(3, [1.0, 1.0]).is_err());
        assert!(gauss_legendre(3, [2.0, 1.0]).is_err());
    }

    #[test]
    fn large_rule_stays_accurate() {
        let r = gauss_legendre(200, [0.0, 1.0]).unwrap();
        assert!(r.weights.iter().all(|&w| w > 0.0));
        let v: f64 = r.integrate(|x| x.powi(151));
        assert!((v - 1.0 / 152.0).abs() < 1e-13 / 152.0 * 10.0);
        let total: f64 = r.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn trapezoid_exact_on_trig() {
        let r = periodic_trapezoid(9).unwrap();
        let v: f64 = r.integrate(|t| (8.0 * t).cos().powi(1) + (3.0 * t).sin().powi(2));
        assert!((v - PI).abs() < 1e-13);
    }
}
