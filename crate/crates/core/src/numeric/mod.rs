//! Scalars, multi-indices, quadrature and rank decisions.

pub mod exact;
pub mod linalg;
pub mod multi_index;
pub mod quadrature;

pub use exact::{exact_rank, parse_rational, ExactComplex, ExactMatrix};
pub use linalg::{
    condition_number, eigenvalues, hermitian_eigenvalues, is_hermitian, least_squares,
    max_abs_diff, numerical_rank, pseudo_inverse, rank_from_singular_values, singular_values,
    thin_svd, SpectrumReport, DEFAULT_RANK_TOL,
};
pub use multi_index::MultiIndex;
pub use quadrature::{
    composite_gauss_legendre, gauss_legendre, nodes_for_degree, periodic_trapezoid, QuadratureRule,
};

pub type C64 = num_complex::Complex<f64>;
pub type CMatrix = nalgebra::DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `n! / (n − k)!`, zero when `k > n`.
pub fn falling_factorial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).map(|i| f64::from(n - i)).product()
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `z^k` with `0^0 = 1`.
pub fn cpow(z: C64, k: u32) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    let mut base = z;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        e >>= 1;
        if e > 0 {
            base *= base;
        }
    }
    acc
}

pub fn rpow(x: f64, k: u32) -> f64 {
    x.powi(k as i32)
}
