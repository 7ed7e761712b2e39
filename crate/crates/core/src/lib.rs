//! Discrete Fourier analysis over F_q^d for averaging operators on
//! nondegenerate quadratic surfaces.
//!
//! * [`ffield`]: F_q arithmetic, the additive and quadratic characters, Gauss sums.
//! * [`quadric`]: diagonal surfaces, point counts, isotropic subspaces, exponent regions.
//! * [`spectral`]: grid functions, fast and naive transforms, `(d sigma)^v`, the kernel.
//! * [`bounds`]: norms, level sets, kernel-bound certification, extremizers.

pub mod bounds;
pub mod ffield;
pub mod quadric;
pub mod spectral;
pub mod tolerance;
