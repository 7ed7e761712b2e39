//! Diagonal nondegenerate quadratic surfaces `a_1 x_1^2 + ... + a_d x_d^2 = 0`.

mod region;
mod subspace;

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::ffield::{FieldElement, FieldError, FieldSpec};
use crate::spectral::{grid_len, GridError, GridFunction, GridShape, Side, DEFAULT_GRID_BUDGET};

pub use region::{
    critical_exponents, region_contains, region_for, ExponentRegion, HalfPlane, Location, Point,
    Rational,
};
pub use subspace::{
    count_subspaces, for_each_subspace, isotropic_subspace, IsotropicSubspace, SubspaceMode,
    SEARCH_BUDGET,
};

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("degenerate form: coefficient {0} is zero")]
    Degenerate(usize),
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("unsupported for odd dimension d = {0}")]
    OddDimension(usize),
    #[error("closed-form point count is not an integer: {0}")]
    NonIntegral(Complex64),
    #[error("no constructive pattern; use search")]
    NoConstructivePattern,
    #[error("subspace search over {q}^{d} exceeds the search budget")]
    SearchTooLarge { q: u32, d: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `S = {x in F_q^d : sum a_j x_j^2 = 0}` with every `a_j != 0`.
#[derive(Debug, Clone)]
pub struct QuadraticSurface {
    field: Arc<FieldSpec>,
    coeffs: Vec<FieldElement>,
}

pub fn make_surface(
    field: Arc<FieldSpec>,
    coeffs: Vec<FieldElement>,
) -> Result<QuadraticSurface, SurfaceError> {
    make_surface_with_budget(field, coeffs, DEFAULT_GRID_BUDGET)
}

pub fn make_surface_with_budget(
    field: Arc<FieldSpec>,
    coeffs: Vec<FieldElement>,
    budget: u64,
) -> Result<QuadraticSurface, SurfaceError> {
    let d = coeffs.len();
    if d < 2 {
        return Err(SurfaceError::DimensionTooSmall(d));
    }
    for (j, &a) in coeffs.iter().enumerate() {
        field.element(a.index())?;
        if a.is_zero() {
            return Err(SurfaceError::Degenerate(j));
        }
    }
    grid_len(field.q(), d, budget)?;
    Ok(QuadraticSurface { field, coeffs })
}

/// Surface from signed integers reduced mod p (so -1 means p - 1).
pub fn surface_from_signed(
    field: Arc<FieldSpec>,
    coeffs: &[i64],
) -> Result<QuadraticSurface, SurfaceError> {
    let coeffs = coeffs.iter().map(|&c| field.from_signed(c)).collect();
    make_surface(field, coeffs)
}

/// `sum_j coeffs_j x_j^2` at every grid point, in grid index order.
pub fn form_values_on_grid(field: &FieldSpec, coeffs: &[FieldElement]) -> Vec<FieldElement> {
    let squares: Vec<FieldElement> = field.elements().map(|x| field.square(x)).collect();
    let mut values = vec![FieldElement::ZERO];
    for &a in coeffs {
        let terms: Vec<FieldElement> = squares.iter().map(|&s| field.mul(a, s)).collect();
        let mut next = Vec::with_capacity(values.len() * terms.len());
        for &t in &terms {
            next.extend(values.iter().map(|&v| field.add(v, t)));
        }
        values = next;
    }
    values
}

/// Result of [`QuadraticSurface::enumerate`].
#[derive(Debug, Clone)]
pub struct SurfaceEnumeration {
    pub indicator: GridFunction,
    pub count: u64,
}

impl QuadraticSurface {
    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn d(&self) -> usize {
        self.coeffs.len()
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn shape(&self) -> GridShape {
        GridShape {
            q: self.q(),
            d: self.d(),
        }
    }

    pub fn form(&self, x: &[FieldElement]) -> FieldElement {
        self.coeffs
            .iter()
            .zip(x)
            .fold(FieldElement::ZERO, |acc, (&a, &xi)| {
                self.field.add(acc, self.field.mul(a, self.field.square(xi)))
            })
    }

    /// Polarization `B(x, y) = sum a_j x_j y_j`, so `Q(x + y) = Q(x) + 2B(x, y) + Q(y)`.
    pub fn bilinear(&self, x: &[FieldElement], y: &[FieldElement]) -> FieldElement {
        self.coeffs
            .iter()
            .zip(x.iter().zip(y))
            .fold(FieldElement::ZERO, |acc, (&a, (&xi, &yi))| {
                self.field.add(acc, self.field.mul(a, self.field.mul(xi, yi)))
            })
    }

    pub fn contains(&self, x: &[FieldElement]) -> bool {
        self.form(x).is_zero()
    }

    pub fn form_values(&self) -> Vec<FieldElement> {
        form_values_on_grid(&self.field, &self.coeffs)
    }

    pub fn enumerate(&self) -> SurfaceEnumeration {
        let values = self.form_values();
        let count = values.iter().filter(|v| v.is_zero()).count() as u64;
        let indicator = GridFunction::from_real(
            Arc::clone(&self.field),
            self.d(),
            Side::SpaceDx,
            values.iter().map(|v| if v.is_zero() { 1.0 } else { 0.0 }),
        )
        .expect("form grid has q^d entries");
        SurfaceEnumeration { indicator, count }
    }

    /// Grid indices of the points of S, ascending.
    pub fn points(&self) -> Vec<usize> {
        self.form_values()
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.is_zero().then_some(i))
            .collect()
    }

    /// `eta(a_1 ... a_d)`.
    pub fn discriminant_character(&self) -> i8 {
        let prod = self
            .coeffs
            .iter()
            .fold(FieldElement::ONE, |acc, &a| self.field.mul(acc, a));
        self.field.eta(prod)
    }

    /// `G_1^d (1 - 1/q) eta(a_1...a_d)`, the correction term shared by the
    /// point count and the transform of the surface measure.
    pub fn gauss_term(&self) -> Complex64 {
        let g1 = self.field.gauss_sum(FieldElement::ONE);
        let q = self.q() as f64;
        g1.powu(self.d() as u32) * (1.0 - 1.0 / q) * self.discriminant_character() as f64
    }

    /// `|S| = q^{d-1} + G_1^d (1 - q^{-1}) eta(a_1...a_d)` for even d.
    pub fn count_points_closed_form(&self) -> Result<u64, SurfaceError> {
        let d = self.d();
        if d % 2 == 1 {
            return Err(SurfaceError::OddDimension(d));
        }
        let q = self.q() as f64;
        let value = self.gauss_term() + q.powi(d as i32 - 1);
        let rounded = value.re.round();
        let scale = value.norm().max(1.0);
        if value.im.abs() / scale > 1e-8 || (value.re - rounded).abs() / scale > 1e-8 {
            return Err(SurfaceError::NonIntegral(value));
        }
        Ok(rounded as u64)
    }

    /// `S_a = {m : sum m_j^2 / a_j = 0}`.
    pub fn dual(&self) -> QuadraticSurface {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| self.field.inv(a).expect("coefficients are nonzero"))
            .collect();
        QuadraticSurface {
            field: Arc::clone(&self.field),
            coeffs,
        }
    }

    /// `eta((-1)^{d/2} a_1 ... a_d) = +1`: S contains a d/2-dimensional subspace.
    pub fn is_hyperbolic(&self) -> Result<bool, SurfaceError> {
        let d = self.d();
        if d % 2 == 1 {
            return Err(SurfaceError::OddDimension(d));
        }
        let sign = self.field.pow(self.field.from_signed(-1), (d / 2) as u64);
        let prod = self
            .coeffs
            .iter()
            .fold(sign, |acc, &a| self.field.mul(acc, a));
        Ok(self.field.eta(prod) == 1)
    }

    /// Signed-integer rendering of the coefficients, for reports.
    pub fn coeff_label(&self) -> String {
        let p = self.field.p();
        self.coeffs
            .iter()
            .map(|a| {
                if self.field.n() == 1 && a.index() > p / 2 {
                    format!("{}", a.index() as i64 - p as i64)
                } else {
                    a.index().to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

pub fn enumerate_surface(s: &QuadraticSurface) -> SurfaceEnumeration {
    s.enumerate()
}

pub fn count_points_closed_form(s: &QuadraticSurface) -> Result<u64, SurfaceError> {
    s.count_points_closed_form()
}

pub fn dual_surface(s: &QuadraticSurface) -> QuadraticSurface {
    s.dual()
}

pub fn hyperbolicity_test(s: &QuadraticSurface) -> Result<bool, SurfaceError> {
    s.is_hyperbolic()
}
