//! Totally isotropic subspaces of a diagonal form.

use std::ops::ControlFlow;

use super::{QuadraticSurface, SurfaceError};
use crate::ffield::{FieldElement, FieldSpec};
use crate::spectral::{GridFunction, GridShape, Side};

/// Largest q^d for which exhaustive subspace search is attempted.
pub const SEARCH_BUDGET: u64 = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceMode {
    /// Pair coordinates `(i, j)` with `-a_i / a_j` a square.
    Construct,
    /// Exhaustive walk over reduced row echelon bases.
    Search,
}

/// A linear subspace given by a basis; every vector lies on the surface it
/// was built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropicSubspace {
    basis: Vec<Vec<FieldElement>>,
}

impl IsotropicSubspace {
    pub fn basis(&self) -> &[Vec<FieldElement>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Every F_q-combination of the basis, in odometer order of the coefficients.
    pub fn points(&self, field: &FieldSpec) -> Vec<Vec<FieldElement>> {
        let d = self.basis.first().map_or(0, Vec::len);
        let k = self.dim();
        let total = (field.q() as usize).pow(k as u32);
        let mut out = Vec::with_capacity(total);
        let mut coeffs = vec![FieldElement::ZERO; k];
        for _ in 0..total {
            let mut v = vec![FieldElement::ZERO; d];
            for (c, row) in coeffs.iter().zip(&self.basis) {
                for (vi, &ri) in v.iter_mut().zip(row) {
                    *vi = field.add(*vi, field.mul(*c, ri));
                }
            }
            out.push(v);
            for c in coeffs.iter_mut() {
                *c = FieldElement::from_index(c.index() + 1);
                if c.index() < field.q() {
                    break;
                }
                *c = FieldElement::ZERO;
            }
        }
        out
    }

    pub fn indicator(&self, field: &std::sync::Arc<FieldSpec>, d: usize) -> GridFunction {
        let shape = GridShape { q: field.q(), d };
        let indices: Vec<usize> = self.points(field).iter().map(|v| shape.index_of(v)).collect();
        GridFunction::indicator(std::sync::Arc::clone(field), d, Side::SpaceDx, indices)
    }

    /// Linear independence plus pointwise containment of all q^k combinations.
    pub fn verify(&self, surface: &QuadraticSurface) -> bool {
        let field = surface.field();
        rank(field, &self.basis) == self.dim()
            && self.basis.iter().all(|v| v.len() == surface.d())
            && self.points(field).iter().all(|v| surface.contains(v))
    }
}

fn rank(field: &FieldSpec, rows: &[Vec<FieldElement>]) -> usize {
    let mut m: Vec<Vec<FieldElement>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        let inv = field.inv(m[r][c]).expect("pivot is nonzero");
        let pivot_row: Vec<FieldElement> = m[r].iter().map(|&v| field.mul(v, inv)).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c];
                for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                    *x = field.sub(*x, field.mul(factor, pv));
                }
            }
        }
        m[r] = pivot_row;
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Visits every k-dimensional subspace of F_q^d exactly once, through its
/// reduced row echelon basis. Pivot sets are taken in lexicographic order and
/// free entries in odometer order.
pub fn for_each_subspace<B>(
    field: &FieldSpec,
    d: usize,
    k: usize,
    mut visit: impl FnMut(&[Vec<FieldElement>]) -> ControlFlow<B>,
) -> Option<B> {
    let q = field.q();
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // free slots: (row, col) with col > pivot[row] and col not a pivot
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &pc)| {
                let pivots = &pivots;
                (pc + 1..d)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let mut basis = vec![vec![FieldElement::ZERO; d]; k];
        for (r, &pc) in pivots.iter().enumerate() {
            basis[r][pc] = FieldElement::ONE;
        }
        let mut counter = vec![0u32; free.len()];
        loop {
            for (&(r, c), &v) in free.iter().zip(&counter) {
                basis[r][c] = FieldElement::from_index(v);
            }
            if let ControlFlow::Break(b) = visit(&basis) {
                return Some(b);
            }
            let mut carried = true;
            for v in counter.iter_mut() {
                *v += 1;
                if *v < q {
                    carried = false;
                    break;
                }
                *v = 0;
            }
            if carried {
                break;
            }
        }
        // next k-combination of 0..d
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if pivots[i] < d - k + i {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn count_subspaces(field: &FieldSpec, d: usize, k: usize) -> u64 {
    let mut count = 0u64;
    for_each_subspace::<()>(field, d, k, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    count
}

fn totally_isotropic(surface: &QuadraticSurface, basis: &[Vec<FieldElement>]) -> bool {
    basis.iter().enumerate().all(|(i, v)| {
        surface.form(v).is_zero() && basis[i + 1..].iter().all(|w| surface.bilinear(v, w).is_zero())
    })
}

fn construct(surface: &QuadraticSurface) -> Result<IsotropicSubspace, SurfaceError> {
    let field = surface.field();
    let a = surface.coeffs();
    let d = a.len();
    let mut used = vec![false; d];
    let mut basis = Vec::with_capacity(d / 2);
    for i in 0..d {
        if used[i] {
            continue;
        }
        used[i] = true;
        // a_i x^2 + a_j y^2 = 0 with y = s x needs s^2 = -a_i / a_j
        let partner = (i + 1..d).filter(|&j| !used[j]).find_map(|j| {
            let ratio = field.mul(field.neg(a[i]), field.inv(a[j]).ok()?);
            field.sqrt(ratio).map(|s| (j, s))
        });
        let (j, s) = partner.ok_or(SurfaceError::NoConstructivePattern)?;
        used[j] = true;
        let mut v = vec![FieldElement::ZERO; d];
        v[i] = FieldElement::ONE;
        v[j] = s;
        basis.push(v);
    }
    Ok(IsotropicSubspace { basis })
}

/// Finds a d/2-dimensional subspace of S. `Ok(None)` means search proved
/// none exists.
pub fn isotropic_subspace(
    surface: &QuadraticSurface,
    mode: SubspaceMode,
) -> Result<Option<IsotropicSubspace>, SurfaceError> {
    let d = surface.d();
    if d % 2 == 1 {
        return Err(SurfaceError::OddDimension(d));
    }
    match mode {
        SubspaceMode::Construct => construct(surface).map(Some),
        SubspaceMode::Search => {
            let q = surface.q();
            if (q as u128).pow(d as u32) > SEARCH_BUDGET as u128 {
                return Err(SurfaceError::SearchTooLarge { q, d });
            }
            let found = for_each_subspace(surface.field(), d, d / 2, |basis| {
                if totally_isotropic(surface, basis) {
                    ControlFlow::Break(basis.to_vec())
                } else {
                    ControlFlow::Continue(())
                }
            });
            Ok(found.map(|basis| IsotropicSubspace { basis }))
        }
    }
}
