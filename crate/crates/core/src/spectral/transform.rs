//! Character transforms on F_q^d.
//!
//! Conventions, with `x` on the `dx` side and `m` on the `dm` side:
//!
//! * forward: `f^(m) = q^{-d} sum_x f(x) chi(-x.m)`
//! * inverse: `g^(x) = sum_m g(m) chi(-m.x)` (the `dm`-side transform)
//! * synthesize: `g_v(x) = sum_m g(m) chi(m.x)`, the exact inverse of forward
//!
//! So `inverse(forward(f))` is `f` reflected through the origin, and
//! `synthesize(forward(f)) = f`.
//!
//! The fast path treats F_q^d as a (d n)-fold product of Z/p: with
//! `T_ab = Tr(t^{a+b})` we have `Tr(x m) = sum_a x_a (T m)_a`, so each axis is
//! a length-p FFT along every coordinate digit followed by the frequency
//! relabeling `m -> T m`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::grid::{GridFunction, GridShape, Side};
use super::GridError;
use crate::ffield::{FieldElement, FieldSpec};

/// Sign of the character exponent in `sum_x v(x) chi(sign * x.m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Frequency relabeling for one axis: `perm[m]` is the index of the digit
/// vector `T c(m) mod p`. Identity for prime fields.
fn trace_pairing_perm(field: &FieldSpec) -> Vec<usize> {
    let (p, n) = (field.p() as usize, field.n() as usize);
    if n == 1 {
        return (0..p).collect();
    }
    let t = field.from_coeffs(&{
        let mut c = vec![0; n];
        c[1] = 1;
        c
    })
    .expect("t is a valid element");
    let gram: Vec<u32> = (0..2 * n - 1)
        .map(|k| field.trace(field.pow(t, k as u64)))
        .collect();
    (0..field.q())
        .map(|m| {
            let cm = FieldElement::from_index(m).coeffs(field);
            let mut index = 0usize;
            for a in (0..n).rev() {
                let u: u64 = (0..n).map(|b| gram[a + b] as u64 * cm[b] as u64).sum();
                index = index * p + (u % p as u64) as usize;
            }
            index
        })
        .collect()
}

/// `out(m) = scale * sum_x v(x) chi(sign x.m)` via digit-wise FFTs.
pub(crate) fn tensor_transform(
    field: &FieldSpec,
    d: usize,
    values: &[Complex64],
    sign: Sign,
    scale: f64,
) -> Vec<Complex64> {
    let p = field.p() as usize;
    let digits = d * field.n() as usize;
    let len = values.len();
    debug_assert_eq!(len, p.pow(digits as u32));

    let direction = match sign {
        Sign::Minus => FftDirection::Forward,
        Sign::Plus => FftDirection::Inverse,
    };
    let fft = FftPlanner::<f64>::new().plan_fft(p, direction);

    let mut data = values.to_vec();
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let mut stride = 1usize;
    for _ in 0..digits {
        // gather fibers along this digit into contiguous runs of length p
        let block = stride * p;
        let mut k = 0;
        for base in (0..len).step_by(block) {
            for offset in 0..stride {
                for j in 0..p {
                    buf[k] = data[base + offset + j * stride];
                    k += 1;
                }
            }
        }
        fft.process(&mut buf);
        let mut k = 0;
        for base in (0..len).step_by(block) {
            for offset in 0..stride {
                for j in 0..p {
                    data[base + offset + j * stride] = buf[k];
                    k += 1;
                }
            }
        }
        stride *= p;
    }

    let perm = trace_pairing_perm(field);
    let q = field.q() as usize;
    let identity = perm.iter().enumerate().all(|(i, &j)| i == j);
    if identity {
        if scale != 1.0 {
            data.iter_mut().for_each(|v| *v *= scale);
        }
        return data;
    }
    (0..len)
        .map(|m| {
            let (mut rest, mut src, mut place) = (m, 0usize, 1usize);
            for _ in 0..d {
                src += perm[rest % q] * place;
                rest /= q;
                place *= q;
            }
            data[src] * scale
        })
        .collect()
}

pub fn forward_transform(f: &GridFunction) -> Result<GridFunction, GridError> {
    f.expect_side(Side::SpaceDx)?;
    let scale = 1.0 / f.len() as f64;
    let out = tensor_transform(f.field(), f.d(), f.values(), Sign::Minus, scale);
    Ok(f.with_values(Side::FreqDm, out))
}

pub fn inverse_transform(g: &GridFunction) -> Result<GridFunction, GridError> {
    g.expect_side(Side::FreqDm)?;
    let out = tensor_transform(g.field(), g.d(), g.values(), Sign::Minus, 1.0);
    Ok(g.with_values(Side::SpaceDx, out))
}

pub fn synthesize(g: &GridFunction) -> Result<GridFunction, GridError> {
    g.expect_side(Side::FreqDm)?;
    let out = tensor_transform(g.field(), g.d(), g.values(), Sign::Plus, 1.0);
    Ok(g.with_values(Side::SpaceDx, out))
}

/// Reference double sums, `O(q^{2d})`. These evaluate the character on the
/// field dot product directly and share nothing with the FFT path.
pub mod naive {
    use super::*;

    fn dot(field: &FieldSpec, x: &[u32], m: &[u32]) -> FieldElement {
        if field.n() == 1 {
            let p = field.p() as u64;
            let s: u64 = x.iter().zip(m).map(|(&a, &b)| a as u64 * b as u64).sum();
            return FieldElement::from_index((s % p) as u32);
        }
        x.iter().zip(m).fold(FieldElement::ZERO, |acc, (&a, &b)| {
            field.add(
                acc,
                field.mul(FieldElement::from_index(a), FieldElement::from_index(b)),
            )
        })
    }

    pub fn character_sum(
        field: &FieldSpec,
        d: usize,
        values: &[Complex64],
        sign: Sign,
        scale: f64,
    ) -> Vec<Complex64> {
        let shape = GridShape { q: field.q(), d };
        let coords = shape.all_coords();
        let nz: Vec<usize> = (0..values.len()).filter(|&i| values[i].norm() != 0.0).collect();
        (0..values.len())
            .map(|m| {
                let mc = &coords[m * d..(m + 1) * d];
                let mut acc = Complex64::new(0.0, 0.0);
                for &x in &nz {
                    let xc = &coords[x * d..(x + 1) * d];
                    let e = dot(field, xc, mc);
                    let e = match sign {
                        Sign::Plus => e,
                        Sign::Minus => field.neg(e),
                    };
                    acc += values[x] * field.character(e);
                }
                acc * scale
            })
            .collect()
    }

    pub fn forward_transform(f: &GridFunction) -> Result<GridFunction, GridError> {
        f.expect_side(Side::SpaceDx)?;
        let scale = 1.0 / f.len() as f64;
        let out = character_sum(f.field(), f.d(), f.values(), Sign::Minus, scale);
        Ok(f.with_values(Side::FreqDm, out))
    }

    pub fn inverse_transform(g: &GridFunction) -> Result<GridFunction, GridError> {
        g.expect_side(Side::FreqDm)?;
        let out = character_sum(g.field(), g.d(), g.values(), Sign::Minus, 1.0);
        Ok(g.with_values(Side::SpaceDx, out))
    }

    pub fn synthesize(g: &GridFunction) -> Result<GridFunction, GridError> {
        g.expect_side(Side::FreqDm)?;
        let out = character_sum(g.field(), g.d(), g.values(), Sign::Plus, 1.0);
        Ok(g.with_values(Side::SpaceDx, out))
    }

    /// `(f * g)(x) = q^{-d} sum_y f(x - y) g(y)` on the `dx` side.
    pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction, GridError> {
        f.expect_side(Side::SpaceDx)?;
        g.expect_side(Side::SpaceDx)?;
        let field = f.field();
        let shape = f.shape();
        let d = shape.d;
        let coords = shape.all_coords();
        let support: Vec<usize> = (0..g.len()).filter(|&y| g.values()[y].norm() != 0.0).collect();
        let scale = 1.0 / f.len() as f64;
        let mut diff = vec![FieldElement::ZERO; d];
        let out = (0..f.len())
            .map(|x| {
                let xc = &coords[x * d..(x + 1) * d];
                let mut acc = Complex64::new(0.0, 0.0);
                for &y in &support {
                    let yc = &coords[y * d..(y + 1) * d];
                    for i in 0..d {
                        diff[i] = field.sub(
                            FieldElement::from_index(xc[i]),
                            FieldElement::from_index(yc[i]),
                        );
                    }
                    acc += f.values()[shape.index_of(&diff)] * g.values()[y];
                }
                acc * scale
            })
            .collect();
        Ok(f.with_values(Side::SpaceDx, out))
    }
}

/// `(f * g)(x) = q^{-d} sum_y f(x - y) g(y)`, computed through the transform.
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction, GridError> {
    f.expect_side(Side::SpaceDx)?;
    g.expect_side(Side::SpaceDx)?;
    let product = forward_transform(f)?.mul(&forward_transform(g)?)?;
    synthesize(&product)
}

/// Convenience for tests and sweeps: the transform of a real vector on a
/// fresh grid.
pub fn forward_of(
    field: &Arc<FieldSpec>,
    d: usize,
    values: Vec<Complex64>,
) -> Result<GridFunction, GridError> {
    forward_transform(&GridFunction::new(Arc::clone(field), d, Side::SpaceDx, values)?)
}
