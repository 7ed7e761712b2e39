//! Norms, averaging ratios, level-set decompositions and kernel-bound
//! certification.
//!
//! Nothing here asserts a bound. Every checker reports the empirical constant
//! `C = lhs / rhs`; ceilings are applied by callers via
//! [`BoundReport::judge`].

mod extremizers;
mod kernel;
mod levels;
mod report;
mod sharpness;

use std::fmt;

use thiserror::Error;

use crate::quadric::{Rational, SurfaceError};
use crate::spectral::{average, AveragePath, GridError, GridFunction, Side, SurfaceData};

pub use extremizers::{extremizer_family, Family};
pub use kernel::{kernel_l2_split, kernel_norm_bound_check, L2Split, NormKind};
pub use levels::{level_decompose, LevelDecomposition, LevelSet, DEFAULT_MAX_LEVEL};
pub use report::{BoundReport, REPORT_HEADER};
pub use sharpness::{
    averaging_battery, averaging_report, battery_families, fit_log_slope, sharpness_probe,
    SharpnessReport,
};

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("exponent {0} is below 1")]
    ExponentBelowOne(f64),
    #[error("input function is identically zero")]
    ZeroInput,
    #[error("empty set")]
    EmptySet,
    #[error("negative value {0} in level decomposition input")]
    NegativeValue(f64),
    #[error("value above 1 produced level {0}; normalize first")]
    NegativeLevel(i64),
    #[error("set size {size} outside [1, {max}]")]
    SizeOutOfRange { size: u64, max: u64 },
    #[error("{0} requires even dimension, got d = {1}")]
    NeedsEvenDimension(&'static str, usize),
    #[error("critical-norm bound needs d = 4 or d >= 6, got d = {0}")]
    CriticalDimension(usize),
    #[error("theorem hypothesis fails: no d/2-dimensional subspace")]
    NotHyperbolic,
    #[error("probe meaningless: {0} lies in the closed region")]
    ProbeMeaningless(String),
    #[error("random set size {size} exceeds grid size {len}")]
    SetTooLarge { size: usize, len: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// A Lebesgue exponent in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self, BoundsError> {
        if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Infinity)
        } else if p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(BoundsError::ExponentBelowOne(p))
        }
    }

    /// The exponent whose reciprocal is `recip`; `0` gives infinity.
    pub fn from_reciprocal(recip: Rational) -> Result<Self, BoundsError> {
        if *recip.numer() == 0 {
            return Ok(Exponent::Infinity);
        }
        Exponent::new(*recip.denom() as f64 / *recip.numer() as f64)
    }

    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// `L^p` norm under the grid's measure: `(q^{-d} sum |f|^p)^{1/p}` on `dx`,
/// `(sum |g|^p)^{1/p}` on `dm`, `max |f|` at infinity.
pub fn lp_norm(f: &GridFunction, p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => f.max_abs(),
        Exponent::Finite(p) => {
            let sum: f64 = f.values().iter().map(|v| v.norm().powf(p)).sum();
            let sum = match f.side() {
                Side::SpaceDx => sum / f.len() as f64,
                Side::FreqDm => sum,
            };
            sum.powf(1.0 / p)
        }
    }
}

/// `||f * d sigma||_{L^r(dx)} / ||f||_{L^p(dx)}`.
pub fn averaging_ratio(
    f: &GridFunction,
    data: &SurfaceData,
    p: Exponent,
    r: Exponent,
) -> Result<f64, BoundsError> {
    let denom = lp_norm(f, p);
    if denom == 0.0 {
        return Err(BoundsError::ZeroInput);
    }
    let af = average(f, data, AveragePath::Fourier)?;
    Ok(lp_norm(&af, r) / denom)
}

/// Size regimes split at `q^{(d-2)/2}` and `q^{d/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    J1,
    J2,
    J3,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::J1, Regime::J2, Regime::J3];

    pub fn label(self) -> &'static str {
        match self {
            Regime::J1 => "J1",
            Regime::J2 => "J2",
            Regime::J3 => "J3",
        }
    }

    /// Inclusive size range of this regime for the given `(d, q)`.
    pub fn size_range(self, d: usize, q: u32) -> (u64, u64) {
        let total = (q as u64).pow(d as u32);
        let lo_edge = (1..=total).take_while(|&s| classify(d, q, s) < self).last();
        let hi = (1..=total).rev().find(|&s| classify(d, q, s) <= self).unwrap_or(0);
        let lo = lo_edge.map_or(1, |s| s + 1);
        (lo, hi)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn classify(d: usize, q: u32, size: u64) -> Regime {
    // size <= q^{(d-2)/2}  <=>  size^2 <= q^{d-2}
    let s2 = size as u128 * size as u128;
    let q = q as u128;
    if s2 <= q.pow(d as u32 - 2) {
        Regime::J1
    } else if s2 <= q.pow(d as u32) {
        Regime::J2
    } else {
        Regime::J3
    }
}

pub fn regime_classify(d: usize, q: u32, size: u64) -> Result<Regime, BoundsError> {
    let max = (q as u64).pow(d as u32);
    if size == 0 || size > max {
        return Err(BoundsError::SizeOutOfRange { size, max });
    }
    Ok(classify(d, q, size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::field_of_order;
    use crate::quadric::surface_from_signed;
    use std::sync::Arc;

    #[test]
    fn norm_examples() {
        let field = Arc::new(field_of_order(3).unwrap());
        let one = GridFunction::constant(Arc::clone(&field), 4, Side::SpaceDx, 1.0);
        for p in [1.0, 1.2, 3.0, 6.0] {
            assert!((lp_norm(&one, Exponent::new(p).unwrap()) - 1.0).abs() < 1e-14);
        }
        assert_eq!(lp_norm(&one, Exponent::Infinity), 1.0);
        let delta = GridFunction::delta(Arc::clone(&field), 4, Side::SpaceDx);
        let p = 1.2;
        let expected = 81f64.powf(-1.0 / p);
        assert!((lp_norm(&delta, Exponent::Finite(p)) - expected).abs() < 1e-14);
        let e = GridFunction::indicator(Arc::clone(&field), 4, Side::SpaceDx, [0, 5, 17, 40]);
        let expected = (4.0f64 / 81.0).powf(1.0 / 3.0);
        assert!((lp_norm(&e, Exponent::Finite(3.0)) - expected).abs() < 1e-14);
        let g = GridFunction::indicator(field, 4, Side::FreqDm, [0, 5]);
        assert!((lp_norm(&g, Exponent::Finite(2.0)) - 2f64.sqrt()).abs() < 1e-14);
        assert!(matches!(Exponent::new(0.5), Err(BoundsError::ExponentBelowOne(_))));
    }

    #[test]
    fn norm_homogeneous() {
        let field = Arc::new(field_of_order(5).unwrap());
        let f = GridFunction::from_real(Arc::clone(&field), 2, Side::SpaceDx, (0..25).map(|i| i as f64 - 7.0)).unwrap();
        for p in [Exponent::Finite(1.0), Exponent::Finite(2.5), Exponent::Infinity] {
            let a = lp_norm(&f.scale(-3.0), p);
            assert!((a - 3.0 * lp_norm(&f, p)).abs() < 1e-10);
        }
    }

    #[test]
    fn exponent_from_reciprocal() {
        assert_eq!(Exponent::from_reciprocal(Rational::new(5, 6)).unwrap(), Exponent::Finite(1.2));
        assert_eq!(Exponent::from_reciprocal(Rational::new(0, 1)).unwrap(), Exponent::Infinity);
        assert_eq!(Exponent::from_reciprocal(Rational::new(1, 1)).unwrap(), Exponent::Finite(1.0));
    }

    #[test]
    fn averaging_ratio_examples() {
        let field = Arc::new(field_of_order(3).unwrap());
        let s = surface_from_signed(Arc::clone(&field), &[1, -1, 1, -1]).unwrap();
        let data = SurfaceData::build(&s).unwrap();
        let p = Exponent::Finite(1.2);
        let r = Exponent::Finite(3.0);
        let one = GridFunction::constant(Arc::clone(&field), 4, Side::SpaceDx, 1.0);
        assert!((averaging_ratio(&one, &data, p, r).unwrap() - 1.0).abs() < 1e-12);
        let delta = GridFunction::delta(Arc::clone(&field), 4, Side::SpaceDx);
        // Af = 1_S / |S| gives q^{d/p - d/r} |S|^{1/r - 1}
        let expected = 9.0 * 33f64.powf(-2.0 / 3.0);
        assert!((averaging_ratio(&delta, &data, p, r).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.874_782_09).abs() < 1e-8);
        let scaled = averaging_ratio(&delta.scale(7.5), &data, p, r).unwrap();
        assert!((scaled - expected).abs() < 1e-12);
        let zero = GridFunction::zeros(field, 4, Side::SpaceDx);
        assert!(matches!(averaging_ratio(&zero, &data, p, r), Err(BoundsError::ZeroInput)));
    }

    #[test]
    fn regime_examples() {
        assert_eq!(regime_classify(6, 3, 5).unwrap(), Regime::J1);
        assert_eq!(regime_classify(4, 3, 4).unwrap(), Regime::J2);
        assert_eq!(regime_classify(4, 3, 81).unwrap(), Regime::J3);
        assert_eq!(regime_classify(4, 3, 3).unwrap(), Regime::J1);
        assert_eq!(regime_classify(4, 3, 9).unwrap(), Regime::J2);
        assert_eq!(regime_classify(4, 3, 10).unwrap(), Regime::J3);
        assert!(regime_classify(4, 3, 0).is_err());
        assert!(matches!(regime_classify(4, 3, 82), Err(BoundsError::SizeOutOfRange { .. })));
        assert!(matches!(regime_classify(4, 3, 100), Err(BoundsError::SizeOutOfRange { .. })));
    }

    #[test]
    fn regime_ranges_tile_the_sizes() {
        for (d, q) in [(4usize, 3u32), (4, 5), (6, 3)] {
            let ranges: Vec<_> = Regime::ALL.iter().map(|r| r.size_range(d, q)).collect();
            assert_eq!(ranges[0].0, 1);
            assert_eq!(ranges[0].1 + 1, ranges[1].0);
            assert_eq!(ranges[1].1 + 1, ranges[2].0);
            assert_eq!(ranges[2].1, (q as u64).pow(d as u32));
        }
        assert_eq!(Regime::J2.size_range(4, 3), (4, 9));
    }
}
