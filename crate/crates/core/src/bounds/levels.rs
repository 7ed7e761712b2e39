use std::sync::Arc;

use super::BoundsError;
use crate::spectral::{GridFunction, Side};

pub const DEFAULT_MAX_LEVEL: u32 = 60;

/// `E_k = {x : 2^{-k} <= f(x) < 2^{-k+1}}` after scaling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSet {
    pub k: u32,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LevelDecomposition {
    pub p: f64,
    /// Nonempty level sets in increasing `k`.
    pub sets: Vec<LevelSet>,
    /// Factor `f` was divided by: `(sum |f|^p)^{1/p}` when normalizing, else 1.
    pub normalization: f64,
    /// `sum f^p` over points below `2^{-k_max}`, in scaled units.
    pub dropped_mass: f64,
    field: Arc<crate::ffield::FieldSpec>,
    d: usize,
}

impl LevelDecomposition {
    pub fn indicator(&self, set: &LevelSet) -> GridFunction {
        GridFunction::indicator(Arc::clone(&self.field), self.d, Side::SpaceDx, set.indices.iter().copied())
    }

    /// `sum_k 2^{-k} 1_{E_k}`, a pointwise lower bound for the scaled input.
    pub fn step_function(&self) -> GridFunction {
        let mut g = GridFunction::zeros(Arc::clone(&self.field), self.d, Side::SpaceDx);
        let values = g.values_mut();
        for set in &self.sets {
            let level = 0.5f64.powi(set.k as i32);
            for &i in &set.indices {
                values[i].re = level;
            }
        }
        g
    }

    /// `sum_k 2^{-pk} |E_k|`.
    pub fn mass(&self) -> f64 {
        self.sets
            .iter()
            .map(|s| 0.5f64.powf(self.p * s.k as f64) * s.indices.len() as f64)
            .sum()
    }
}

/// Splits a nonnegative function into dyadic level sets. With `normalize`
/// the input is first divided by its counting-measure `l^p` norm, so every
/// value lies in `[0, 1]` and only `k >= 0` occur.
pub fn level_decompose(
    f: &GridFunction,
    p: f64,
    normalize: bool,
    k_max: u32,
) -> Result<LevelDecomposition, BoundsError> {
    if p < 1.0 {
        return Err(BoundsError::ExponentBelowOne(p));
    }
    f.expect_side(Side::SpaceDx)?;
    if let Some(v) = f.values().iter().find(|v| v.re < 0.0) {
        return Err(BoundsError::NegativeValue(v.re));
    }
    let total: f64 = f.values().iter().map(|v| v.re.powf(p)).sum();
    if total == 0.0 {
        return Err(BoundsError::ZeroInput);
    }
    let normalization = if normalize { total.powf(1.0 / p) } else { 1.0 };
    let floor = 0.5f64.powi(k_max as i32);
    let mut buckets: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
    let mut dropped_mass = 0.0;
    for (i, v) in f.values().iter().enumerate() {
        let x = v.re / normalization;
        if x == 0.0 {
            continue;
        }
        if x < floor {
            dropped_mass += x.powf(p);
            continue;
        }
        // smallest k with 2^{-k} <= x
        let mut k = (-x.log2()).ceil() as i64;
        while 0.5f64.powi(k as i32) > x {
            k += 1;
        }
        while 0.5f64.powi(k as i32 - 1) <= x {
            k -= 1;
        }
        buckets.entry(k).or_default().push(i);
    }
    if let Some((&k, _)) = buckets.iter().next() {
        if k < 0 {
            return Err(BoundsError::NegativeLevel(k));
        }
    }
    let sets = buckets
        .into_iter()
        .map(|(k, indices)| LevelSet { k: k as u32, indices })
        .collect();
    Ok(LevelDecomposition {
        p,
        sets,
        normalization,
        dropped_mass,
        field: Arc::clone(f.field()),
        d: f.d(),
    })
}
