//! Point sets on the unit sphere.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereSampling {
    pub points: Vec<Vec<f64>>,
    /// Surface quadrature weights summing to the sphere's area.
    pub weights: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SamplingKind {
    /// Golden-angle spiral on `S²`, any size.
    Fibonacci { n: usize },
    /// Icosahedron vertices with `refinements` midpoint subdivisions: 12, 42, 162, …
    Icosahedral { refinements: u32 },
    /// Equispaced angles on `S¹`.
    Circle { n: usize },
}

impl SphereSampling {
    pub fn new(kind: SamplingKind) -> Result<Self> {
        match kind {
            SamplingKind::Fibonacci { n } => Self::fibonacci(n),
            SamplingKind::Icosahedral { refinements } => Ok(Self::icosahedral(refinements)),
            SamplingKind::Circle { n } => Self::circle(n),
        }
    }

    pub fn fibonacci(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(
                "sphere sampling needs at least 2 points".into(),
            ));
        }
        let golden = PI * (3.0 - 5f64.sqrt());
        let points = (0..n)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                let rho = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                normalize(vec![rho * phi.cos(), rho * phi.sin(), z])
            })
            .collect();
        Ok(Self {
            points,
            weights: vec![4.0 * PI / n as f64; n],
        })
    }

    pub fn circle(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(
                "circle sampling needs at least 2 points".into(),
            ));
        }
        let points = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        Ok(Self {
            points,
            weights: vec![2.0 * PI / n as f64; n],
        })
    }

    pub fn icosahedral(refinements: u32) -> Self {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<Vec<f64>> = [
            [-1.0, t, 0.0],
            [1.0, t, 0.0],
            [-1.0, -t, 0.0],
            [1.0, -t, 0.0],
            [0.0, -1.0, t],
            [0.0, 1.0, t],
            [0.0, -1.0, -t],
            [0.0, 1.0, -t],
            [t, 0.0, -1.0],
            [t, 0.0, 1.0],
            [-t, 0.0, -1.0],
            [-t, 0.0, 1.0],
        ]
        .iter()
        .map(|v| normalize(v.to_vec()))
        .collect();
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..refinements {
            let mut mids = std::collections::HashMap::new();
            let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec<f64>>| -> usize {
                let key = (a.min(b), a.max(b));
                *mids.entry(key).or_insert_with(|| {
                    let m = (0..3).map(|i| verts[a][i] + verts[b][i]).collect();
                    verts.push(normalize(m));
                    verts.len() - 1
                })
            };
            let mut next = Vec::with_capacity(faces.len() * 4);
            for [a, b, c] in faces {
                let ab = mid(a, b, &mut verts);
                let bc = mid(b, c, &mut verts);
                let ca = mid(c, a, &mut verts);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            faces = next;
        }
        let n = verts.len();
        Self {
            points: verts,
            weights: vec![4.0 * PI / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn normalize(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Rotation matrix from a unit quaternion `(w, x, y, z)`.
pub fn rotation_from_quaternion(q: [f64; 4]) -> [[f64; 3]; 3] {
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

pub fn rotate(r: &[[f64; 3]; 3], v: &[f64]) -> Vec<f64> {
    (0..3)
        .map(|i| (0..3).map(|j| r[i][j] * v[j]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vectors() {
        for s in [
            SphereSampling::fibonacci(24).unwrap(),
            SphereSampling::icosahedral(2),
            SphereSampling::circle(7).unwrap(),
        ] {
            for p in &s.points {
                let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-14);
            }
        }
        assert_eq!(SphereSampling::icosahedral(0).len(), 12);
        assert_eq!(SphereSampling::icosahedral(1).len(), 42);
        assert_eq!(SphereSampling::icosahedral(2).len(), 162);
    }

    #[test]
    fn fibonacci_weights_integrate_z_squared() {
        let s = SphereSampling::fibonacci(2000).unwrap();
        let v: f64 = s
            .points
            .iter()
            .zip(&s.weights)
            .map(|(p, w)| w * p[2] * p[2])
            .sum();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-5);
    }
}
