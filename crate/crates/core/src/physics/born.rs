//! Born kernels `K(ω, ς) = ∫ F(x) e^{i x·(ω − ς)} dx` on unit vectors.

use std::f64::consts::PI;

use crate::assembly::{assemble_with, AssemblyOptions};
use crate::bases::{BasisFamily, BasisSpec};
use crate::error::{Error, Result};
use crate::func::{Func, XPoly};
use crate::numeric::{CMatrix, SpectrumReport, C64};
use crate::physics::sphere::SphereSampling;
use crate::weights::WeightSpec;

fn check_unit(v: &[f64]) -> Result<()> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnit { norm });
    }
    Ok(())
}

pub fn born_kernel(f: &WeightSpec, omega: &[f64], sigma: &[f64]) -> Result<C64> {
    check_unit(omega)?;
    check_unit(sigma)?;
    if omega.len() != sigma.len() {
        return Err(Error::DimensionMismatch {
            expected: omega.len(),
            found: sigma.len(),
        });
    }
    let k: Vec<f64> = omega.iter().zip(sigma).map(|(a, b)| a - b).collect();
    let d = k.len();
    f.pair(&Func::Wave {
        k,
        poly: XPoly::constant(d, C64::new(1.0, 0.0)),
    })
}

/// `4π (sin qa − qa cos qa) / q³`, the transform of the indicator of the ball of radius `a` in `R³`.
pub fn ball_indicator_transform(a: f64, q: f64) -> f64 {
    let x = q * a;
    if x < 1e-3 {
        // series keeps full precision near q = 0
        return 4.0 * PI * a * a * a * (1.0 / 3.0 - x * x / 30.0 + x.powi(4) / 840.0);
    }
    4.0 * PI * (x.sin() - x * x.cos()) / (q * q * q)
}

/// `K(ω_i, ω_j)` over one sampling, with its spectrum.
pub fn born_matrix(
    f: &WeightSpec,
    sampling: &SphereSampling,
    rel_tol: f64,
) -> Result<(CMatrix, SpectrumReport)> {
    if sampling.len() < 2 {
        return Err(Error::InvalidArgument(
            "sphere sampling needs at least 2 points".into(),
        ));
    }
    for p in &sampling.points {
        check_unit(p)?;
    }
    let basis = BasisFamily::new(
        BasisSpec::PlaneWave {
            directions: sampling.points.clone(),
        },
        sampling.len(),
    )?;
    let m = assemble_with(f, &basis, &basis, AssemblyOptions::float())?.to_float();
    let report = SpectrumReport::new(&m, rel_tol, false)?;
    Ok((m, report))
}
