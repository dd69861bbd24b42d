//! Landau levels, Helmholtz matrices and Born kernels.

pub mod born;
pub mod helmholtz;
pub mod landau;
pub mod sphere;
