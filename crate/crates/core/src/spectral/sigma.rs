//! The normalized surface measure `d sigma`, its inverse transform, the
//! Bochner-Riesz kernel `K = (d sigma)^v - delta_0`, and averaging.

use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{GridFunction, Side};
use super::transform::{forward_transform, inverse_transform, naive, synthesize};
use super::GridError;
use crate::ffield::FieldElement;
use crate::quadric::{form_values_on_grid, QuadraticSurface};

/// `(d sigma)^v(m) = |S|^{-1} sum_{x in S} chi(m.x)`, summed literally.
pub fn sigma_inverse_ft_direct(s: &QuadraticSurface) -> GridFunction {
    let field = s.field();
    let shape = s.shape();
    let d = shape.d;
    let points = s.points();
    let coords = shape.all_coords();
    let prime = field.n() == 1;
    let p = field.p() as u64;
    let inv_count = 1.0 / points.len() as f64;
    let values = (0..shape.len())
        .map(|m| {
            let mc = &coords[m * d..(m + 1) * d];
            let sum: Complex64 = points
                .iter()
                .map(|&x| {
                    let xc = &coords[x * d..(x + 1) * d];
                    if prime {
                        let dot: u64 = xc.iter().zip(mc).map(|(&a, &b)| a as u64 * b as u64).sum();
                        field.root_of_unity((dot % p) as u32)
                    } else {
                        let dot = xc.iter().zip(mc).fold(FieldElement::ZERO, |acc, (&a, &b)| {
                            field.add(
                                acc,
                                field.mul(FieldElement::from_index(a), FieldElement::from_index(b)),
                            )
                        });
                        field.character(dot)
                    }
                })
                .sum();
            sum * inv_count
        })
        .collect();
    GridFunction::new(Arc::clone(field), d, Side::FreqDm, values).expect("q^d values")
}

/// Same object through the FFT: `(d sigma)^v(m) = (q^d / |S|) (1_S)^(-m)`.
pub fn sigma_inverse_ft_fast(s: &QuadraticSurface) -> GridFunction {
    let e = s.enumerate();
    let hat = forward_transform(&e.indicator).expect("indicator lives on dx");
    let scale = hat.len() as f64 / e.count as f64;
    hat.reflect().scale(scale)
}

/// The three-case closed form in terms of `G_1`, selected by the dual form
/// `sum m_j^2 / a_j`. Even d only.
pub fn sigma_inverse_ft_closed(s: &QuadraticSurface) -> Result<GridFunction, GridError> {
    let d = s.d();
    if d % 2 == 1 {
        return Err(GridError::OddDimension(d));
    }
    let q = s.q() as f64;
    let count = s.enumerate().count as f64;
    let term = s.gauss_term() / count;
    let on_dual = term;
    let off_dual = -s.field().gauss_sum(FieldElement::ONE).powu(d as u32)
        * s.discriminant_character() as f64
        / (q * count);
    let origin = q.powi(d as i32 - 1) / count + term;
    let dual = s.dual();
    let values = form_values_on_grid(s.field(), dual.coeffs())
        .iter()
        .enumerate()
        .map(|(m, v)| match (m, v.is_zero()) {
            (0, _) => origin,
            (_, true) => on_dual,
            (_, false) => off_dual,
        })
        .collect();
    GridFunction::new(Arc::clone(s.field()), d, Side::FreqDm, values)
}

/// `K = (d sigma)^v - delta_0` on `dm`, and `K^ = inverse_transform(K)` on `dx`.
pub fn bochner_riesz_kernel(s: &QuadraticSurface) -> (GridFunction, GridFunction) {
    let sigma = if s.d() % 2 == 0 {
        sigma_inverse_ft_closed(s).expect("even d")
    } else {
        sigma_inverse_ft_fast(s)
    };
    kernel_from_sigma(&sigma)
}

fn kernel_from_sigma(sigma: &GridFunction) -> (GridFunction, GridFunction) {
    let mut kernel = sigma.clone();
    kernel.values_mut()[0] = Complex64::new(0.0, 0.0);
    let kernel_hat = inverse_transform(&kernel).expect("kernel lives on dm");
    (kernel, kernel_hat)
}

/// Everything derived from the surface measure, built once per surface.
#[derive(Debug, Clone)]
pub struct SurfaceData {
    pub surface: QuadraticSurface,
    pub count: u64,
    pub points: Vec<usize>,
    /// `1_S` on the `dx` side.
    pub indicator: GridFunction,
    /// `(d sigma)^v` on the `dm` side.
    pub sigma_check: GridFunction,
    pub kernel: GridFunction,
    pub kernel_hat: GridFunction,
    /// `m != 0` with `sum m_j^2 / a_j = 0`.
    pub dual_zero: Vec<bool>,
}

impl SurfaceData {
    /// Uses the closed form for even d and the FFT of the indicator otherwise.
    /// Fails if the enumerated surface is not symmetric under `x -> -x`,
    /// which the Fourier averaging path relies on.
    pub fn build(surface: &QuadraticSurface) -> Result<Self, GridError> {
        let e = surface.enumerate();
        if e.indicator.reflect().max_abs_diff(&e.indicator) != 0.0 {
            return Err(GridError::NotSymmetric);
        }
        let sigma_check = if surface.d() % 2 == 0 {
            sigma_inverse_ft_closed(surface)?
        } else {
            sigma_inverse_ft_fast(surface)
        };
        let (kernel, kernel_hat) = kernel_from_sigma(&sigma_check);
        let dual_zero = form_values_on_grid(surface.field(), surface.dual().coeffs())
            .iter()
            .enumerate()
            .map(|(m, v)| m != 0 && v.is_zero())
            .collect();
        Ok(SurfaceData {
            surface: surface.clone(),
            count: e.count,
            points: surface.points(),
            indicator: e.indicator,
            sigma_check,
            kernel,
            kernel_hat,
            dual_zero,
        })
    }

    pub fn q(&self) -> u32 {
        self.surface.q()
    }

    pub fn d(&self) -> usize {
        self.surface.d()
    }

    /// `d sigma` as a density against `dx`: `q^d / |S|` on S.
    pub fn sigma_density(&self) -> GridFunction {
        self.indicator
            .scale(self.indicator.len() as f64 / self.count as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AveragePath {
    /// `|S|^{-1} sum_{y in S} f(x - y)` literally.
    Naive,
    /// `synthesize(f^ . (d sigma)^v)`, using `S = -S`.
    Fourier,
}

/// `A f = f * d sigma`.
pub fn average(
    f: &GridFunction,
    data: &SurfaceData,
    path: AveragePath,
) -> Result<GridFunction, GridError> {
    f.expect_side(Side::SpaceDx)?;
    match path {
        AveragePath::Naive => {
            let shape = f.shape();
            let field = f.field();
            let d = shape.d;
            let coords = shape.all_coords();
            let neg_points: Vec<Vec<FieldElement>> = data
                .points
                .iter()
                .map(|&y| {
                    coords[y * d..(y + 1) * d]
                        .iter()
                        .map(|&c| field.neg(FieldElement::from_index(c)))
                        .collect()
                })
                .collect();
            let inv = 1.0 / data.count as f64;
            let mut shifted = vec![FieldElement::ZERO; d];
            let values = (0..shape.len())
                .map(|x| {
                    let xc = &coords[x * d..(x + 1) * d];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for ny in &neg_points {
                        for i in 0..d {
                            shifted[i] = field.add(FieldElement::from_index(xc[i]), ny[i]);
                        }
                        acc += f.values()[shape.index_of(&shifted)];
                    }
                    acc * inv
                })
                .collect();
            GridFunction::new(Arc::clone(field), d, Side::SpaceDx, values)
        }
        AveragePath::Fourier => {
            let hat = forward_transform(f)?;
            synthesize(&hat.mul(&data.sigma_check)?)
        }
    }
}

/// `f * K^` on the `dx` side.
pub fn convolve_khat(f: &GridFunction, data: &SurfaceData) -> Result<GridFunction, GridError> {
    f.expect_side(Side::SpaceDx)?;
    let hat = forward_transform(f)?;
    // (K^)^(m) = K(-m) = K(m) for symmetric S
    synthesize(&hat.mul(&data.kernel)?)
}

/// Literal `q^{-d} sum_y f(x-y) K^(y)`, for cross-checks.
pub fn convolve_khat_naive(
    f: &GridFunction,
    data: &SurfaceData,
) -> Result<GridFunction, GridError> {
    naive::convolve(f, &data.kernel_hat)
}
