//! Dense complex grids on F_q^d.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;

use super::GridError;
use crate::ffield::{FieldElement, FieldSpec};

/// Default cap on q^d for any dense grid.
pub const DEFAULT_GRID_BUDGET: u64 = 1 << 22;

/// Which side of the Fourier pairing a grid lives on.
///
/// `SpaceDx` carries the normalized counting measure `dx`, `FreqDm` the
/// counting measure `dm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    SpaceDx,
    FreqDm,
}

impl Side {
    pub fn dual(self) -> Side {
        match self {
            Side::SpaceDx => Side::FreqDm,
            Side::FreqDm => Side::SpaceDx,
        }
    }
}

/// Returns q^d, or an error if it exceeds `budget`.
pub fn grid_len(q: u32, d: usize, budget: u64) -> Result<usize, GridError> {
    let len = (q as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if len > budget as u128 {
        return Err(GridError::BudgetExceeded {
            q,
            d,
            budget,
        });
    }
    Ok(len as usize)
}

/// Little-endian coordinate codec: `x -> sum idx(x_i) q^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridShape {
    pub q: u32,
    pub d: usize,
}

impl GridShape {
    pub fn len(&self) -> usize {
        (self.q as usize).pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.d == 0
    }

    pub fn coords(&self, mut index: usize) -> Vec<FieldElement> {
        let q = self.q as usize;
        (0..self.d)
            .map(|_| {
                let c = index % q;
                index /= q;
                FieldElement::from_index(c as u32)
            })
            .collect()
    }

    pub fn index_of(&self, coords: &[FieldElement]) -> usize {
        coords
            .iter()
            .rev()
            .fold(0usize, |acc, c| acc * self.q as usize + c.index() as usize)
    }

    /// All coordinate vectors in index order, flattened with stride `d`.
    pub fn all_coords(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len() * self.d);
        let mut cur = vec![0u32; self.d];
        for _ in 0..self.len() {
            out.extend_from_slice(&cur);
            for c in cur.iter_mut() {
                *c += 1;
                if *c < self.q {
                    break;
                }
                *c = 0;
            }
        }
        out
    }
}

/// A complex-valued function on F_q^d tagged with its measure side.
#[derive(Debug, Clone)]
pub struct GridFunction {
    field: Arc<FieldSpec>,
    d: usize,
    side: Side,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(
        field: Arc<FieldSpec>,
        d: usize,
        side: Side,
        values: Vec<Complex64>,
    ) -> Result<Self, GridError> {
        let expected = GridShape { q: field.q(), d }.len();
        if values.len() != expected {
            return Err(GridError::LengthMismatch {
                expected,
                actual: values.len(),
            });
        }
        Ok(GridFunction {
            field,
            d,
            side,
            values,
        })
    }

    pub fn zeros(field: Arc<FieldSpec>, d: usize, side: Side) -> Self {
        let len = GridShape { q: field.q(), d }.len();
        GridFunction {
            field,
            d,
            side,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn constant(field: Arc<FieldSpec>, d: usize, side: Side, value: f64) -> Self {
        let mut g = Self::zeros(field, d, side);
        g.values.fill(Complex64::new(value, 0.0));
        g
    }

    /// Indicator of the origin.
    pub fn delta(field: Arc<FieldSpec>, d: usize, side: Side) -> Self {
        let mut g = Self::zeros(field, d, side);
        g.values[0] = Complex64::new(1.0, 0.0);
        g
    }

    pub fn from_real(
        field: Arc<FieldSpec>,
        d: usize,
        side: Side,
        values: impl IntoIterator<Item = f64>,
    ) -> Result<Self, GridError> {
        let values = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        Self::new(field, d, side, values)
    }

    /// Indicator grid of a set of indices.
    pub fn indicator(
        field: Arc<FieldSpec>,
        d: usize,
        side: Side,
        indices: impl IntoIterator<Item = usize>,
    ) -> Self {
        let mut g = Self::zeros(field, d, side);
        for i in indices {
            g.values[i] = Complex64::new(1.0, 0.0);
        }
        g
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn shape(&self) -> GridShape {
        GridShape {
            q: self.field.q(),
            d: self.d,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub(crate) fn with_values(&self, side: Side, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        GridFunction {
            field: Arc::clone(&self.field),
            d: self.d,
            side,
            values,
        }
    }

    pub fn expect_side(&self, side: Side) -> Result<(), GridError> {
        if self.side != side {
            return Err(GridError::WrongSide {
                expected: side,
                actual: self.side,
            });
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<(), GridError> {
        if self.side != other.side {
            return Err(GridError::WrongSide {
                expected: self.side,
                actual: other.side,
            });
        }
        if *self.field != *other.field || self.d != other.d {
            return Err(GridError::ShapeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, GridError> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(self.with_values(self.side, values))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GridError> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(self.with_values(self.side, values))
    }

    /// Pointwise product; both grids must be on the same side.
    pub fn mul(&self, other: &Self) -> Result<Self, GridError> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(self.with_values(self.side, values))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn add_constant(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        self.with_values(self.side, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn abs(&self) -> Self {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    /// `x -> f(-x)`.
    pub fn reflect(&self) -> Self {
        let shape = self.shape();
        let neg: Vec<usize> = (0..self.field.q())
            .map(|i| self.field.neg(FieldElement::from_index(i)).index() as usize)
            .collect();
        let mut values = vec![Complex64::new(0.0, 0.0); self.len()];
        let q = shape.q as usize;
        for (i, v) in self.values.iter().enumerate() {
            let (mut rest, mut target, mut place) = (i, 0usize, 1usize);
            for _ in 0..shape.d {
                target += neg[rest % q] * place;
                rest /= q;
                place *= q;
            }
            values[target] = *v;
        }
        self.with_values(self.side, values)
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    /// `q^{-d} sum_x f(x)`, the integral against `dx`.
    pub fn mean(&self) -> Complex64 {
        self.sum() / self.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Number of points with `|f(x)| > 0.5`; meaningful for indicator grids.
    pub fn support_size(&self) -> usize {
        self.values.iter().filter(|v| v.norm() > 0.5).count()
    }

    /// Writes `index,x_coords,re,im` rows; floats carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), GridError> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["index", "x_coords", "re", "im"])?;
        let shape = self.shape();
        for (i, v) in self.values.iter().enumerate() {
            let coords = shape
                .coords(i)
                .iter()
                .map(|c| c.index().to_string())
                .collect::<Vec<_>>()
                .join(";");
            out.write_record([
                i.to_string(),
                coords,
                format_float(v.re),
                format_float(v.im),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(
        reader: R,
        field: Arc<FieldSpec>,
        d: usize,
        side: Side,
    ) -> Result<Self, GridError> {
        let shape = GridShape { q: field.q(), d };
        let mut values = vec![Complex64::new(0.0, 0.0); shape.len()];
        let mut seen = vec![false; shape.len()];
        let mut rdr = csv::Reader::from_reader(reader);
        for record in rdr.records() {
            let record = record?;
            let parse_err = || GridError::Parse(format!("{record:?}"));
            let index: usize = record.get(0).ok_or_else(parse_err)?.parse().map_err(|_| parse_err())?;
            let coords: Vec<FieldElement> = record
                .get(1)
                .ok_or_else(parse_err)?
                .split(';')
                .map(|c| c.parse().map(FieldElement::from_index))
                .collect::<Result<_, _>>()
                .map_err(|_| parse_err())?;
            if index >= shape.len() || coords.len() != d || shape.index_of(&coords) != index {
                return Err(parse_err());
            }
            let re: f64 = record.get(2).ok_or_else(parse_err)?.parse().map_err(|_| parse_err())?;
            let im: f64 = record.get(3).ok_or_else(parse_err)?.parse().map_err(|_| parse_err())?;
            values[index] = Complex64::new(re, im);
            seen[index] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(GridError::Parse("missing grid rows".into()));
        }
        GridFunction::new(field, d, side, values)
    }
}

/// 17 significant digits in scientific notation; round-trips any f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::field_of_order;

    fn f(q: u64) -> Arc<FieldSpec> {
        Arc::new(field_of_order(q).unwrap())
    }

    #[test]
    fn shape_roundtrip() {
        let shape = GridShape { q: 5, d: 3 };
        let flat = shape.all_coords();
        for i in 0..shape.len() {
            let c = shape.coords(i);
            assert_eq!(shape.index_of(&c), i);
            let row: Vec<u32> = c.iter().map(|e| e.index()).collect();
            assert_eq!(&flat[i * 3..i * 3 + 3], &row[..]);
        }
        assert_eq!(shape.coords(1)[0].index(), 1);
        assert_eq!(shape.coords(5)[1].index(), 1);
    }

    #[test]
    fn budget_is_enforced() {
        assert_eq!(grid_len(3, 4, DEFAULT_GRID_BUDGET).unwrap(), 81);
        assert!(matches!(
            grid_len(11, 8, DEFAULT_GRID_BUDGET),
            Err(GridError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn mixing_sides_is_rejected() {
        let a = GridFunction::zeros(f(3), 2, Side::SpaceDx);
        let b = GridFunction::zeros(f(3), 2, Side::FreqDm);
        assert!(matches!(a.add(&b), Err(GridError::WrongSide { .. })));
        let c = GridFunction::zeros(f(5), 2, Side::SpaceDx);
        assert!(matches!(a.add(&c), Err(GridError::ShapeMismatch)));
        assert!(GridFunction::new(f(3), 2, Side::SpaceDx, vec![]).is_err());
    }

    #[test]
    fn reflect_negates_coordinates() {
        let field = f(9);
        let shape = GridShape { q: 9, d: 2 };
        let values = (0..81).map(|i| Complex64::new(i as f64, 0.0)).collect();
        let g = GridFunction::new(Arc::clone(&field), 2, Side::SpaceDx, values).unwrap();
        let r = g.reflect();
        for i in 0..81 {
            let neg: Vec<_> = shape.coords(i).iter().map(|&c| field.neg(c)).collect();
            assert_eq!(r.values()[shape.index_of(&neg)].re, i as f64);
        }
        assert_eq!(r.reflect().values(), g.values());
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let field = f(3);
        let values = (0..9)
            .map(|i| Complex64::new(1.0 / (i as f64 + 3.0), -0.1 * i as f64))
            .collect();
        let g = GridFunction::new(Arc::clone(&field), 2, Side::FreqDm, values).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,x_coords,re,im\n0,0;0,"));
        let back = GridFunction::read_csv(&buf[..], field, 2, Side::FreqDm).unwrap();
        assert_eq!(back.values(), g.values());
    }
}
