use super::{lp_norm, regime_classify, BoundReport, BoundsError, Exponent, Regime};
use crate::spectral::{convolve_khat, forward_transform, GridFunction, Side, SurfaceData};

/// Which norm of `E * K^` to certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormKind {
    Linf,
    L2,
    /// `L^6` when d = 4, `L^{(d-1)/2}` when d >= 6.
    Lcrit,
}

impl NormKind {
    pub fn label(self) -> &'static str {
        match self {
            NormKind::Linf => "linf",
            NormKind::L2 => "l2",
            NormKind::Lcrit => "lcrit",
        }
    }

    pub fn exponent(self, d: usize) -> Result<Exponent, BoundsError> {
        match self {
            NormKind::Linf => Ok(Exponent::Infinity),
            NormKind::L2 => Ok(Exponent::Finite(2.0)),
            NormKind::Lcrit => match d {
                4 => Ok(Exponent::Finite(6.0)),
                d if d >= 6 => Ok(Exponent::Finite((d as f64 - 1.0) / 2.0)),
                d => Err(BoundsError::CriticalDimension(d)),
            },
        }
    }
}

/// `(a, b)` with bound `q^a |E|^b`.
fn bound_exponents(kind: NormKind, regime: Regime, d: usize) -> Result<(f64, f64), BoundsError> {
    let df = d as f64;
    Ok(match kind {
        NormKind::Linf => (1.0 - df, 1.0),
        NormKind::L2 => match regime {
            Regime::J1 => ((1.0 - 2.0 * df) / 2.0, 0.5),
            Regime::J2 => ((4.0 - 5.0 * df) / 4.0, 1.0),
            Regime::J3 => (1.0 - df, 0.5),
        },
        NormKind::Lcrit if d == 4 => match regime {
            Regime::J1 => (-19.0 / 6.0, 5.0 / 6.0),
            Regime::J2 => (-10.0 / 3.0, 1.0),
            Regime::J3 => (-3.0, 5.0 / 6.0),
        },
        NormKind::Lcrit if d >= 6 => {
            let m = df - 1.0;
            match regime {
                Regime::J1 => ((-df * df + 2.0 * df - 3.0) / m, (df - 3.0) / m),
                Regime::J2 => ((-df * df + df - 1.0) / m, 1.0),
                Regime::J3 => (1.0 - df, (df - 3.0) / m),
            }
        }
        NormKind::Lcrit => return Err(BoundsError::CriticalDimension(d)),
    })
}

/// Measures `||E * K^||` against the regime's bound for an indicator `E`.
/// The report's family is left empty for the caller to fill in.
pub fn kernel_norm_bound_check(
    set: &GridFunction,
    data: &SurfaceData,
    kind: NormKind,
) -> Result<BoundReport, BoundsError> {
    set.expect_side(Side::SpaceDx)?;
    let size = set.support_size() as u64;
    if size == 0 {
        return Err(BoundsError::EmptySet);
    }
    let (d, q) = (data.d(), data.q());
    let exponent = kind.exponent(d)?;
    let regime = regime_classify(d, q, size)?;
    let (a, b) = bound_exponents(kind, regime, d)?;
    let rhs = (q as f64).powf(a) * (size as f64).powf(b);
    let lhs = lp_norm(&convolve_khat(set, data)?, exponent);
    let mut report = BoundReport::new(
        q,
        d,
        data.surface.coeff_label(),
        format!("kernel-{}", kind.label()),
        lhs,
        rhs,
    );
    report.size = size;
    report.regime = Some(regime);
    Ok(report)
}

/// The two halves of `||E * K^||_2^2` split by the dual form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Split {
    /// `q^{-(d-2)} sum_{m != 0, dual form 0} |E^(m)|^2`.
    pub i: f64,
    /// `q^{-d} sum_{m != 0, dual form != 0} |E^(m)|^2`.
    pub ii: f64,
    /// `sum_{m != 0} |E^(m)|^2 |K(m)|^2`, which equals `||E * K^||_2^2`.
    pub exact: f64,
    pub bound_i: f64,
    pub bound_ii: f64,
}

impl L2Split {
    pub fn constant_i(&self) -> f64 {
        self.i / self.bound_i
    }

    pub fn constant_ii(&self) -> f64 {
        self.ii / self.bound_ii
    }
}

pub fn kernel_l2_split(set: &GridFunction, data: &SurfaceData) -> Result<L2Split, BoundsError> {
    set.expect_side(Side::SpaceDx)?;
    let size = set.support_size();
    if size == 0 {
        return Err(BoundsError::EmptySet);
    }
    let hat = forward_transform(set)?;
    let q = data.q() as f64;
    let d = data.d() as i32;
    let (mut zero_part, mut rest, mut exact) = (0.0, 0.0, 0.0);
    for (m, (e, k)) in hat.values().iter().zip(data.kernel.values()).enumerate().skip(1) {
        let e2 = e.norm_sqr();
        exact += e2 * k.norm_sqr();
        if data.dual_zero[m] {
            zero_part += e2;
        } else {
            rest += e2;
        }
    }
    let size = size as f64;
    Ok(L2Split {
        i: q.powi(2 - d) * zero_part,
        ii: q.powi(-d) * rest,
        exact,
        bound_i: q.powi(2 - 2 * d) * size,
        bound_ii: q.powi(-2 * d) * size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::field_of_order;
    use crate::quadric::surface_from_signed;
    use rand::seq::index::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn data(q: u64, coeffs: &[i64]) -> SurfaceData {
        let s = surface_from_signed(Arc::new(field_of_order(q).unwrap()), coeffs).unwrap();
        SurfaceData::build(&s).unwrap()
    }

    fn random_set(data: &SurfaceData, size: usize, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = data.indicator.len();
        GridFunction::indicator(
            Arc::clone(data.surface.field()),
            data.d(),
            Side::SpaceDx,
            sample(&mut rng, len, size).into_iter(),
        )
    }

    #[test]
    fn single_point_linf() {
        let data = data(3, &[1, -1, 1, -1]);
        let e = GridFunction::delta(Arc::clone(data.surface.field()), 4, Side::SpaceDx);
        let r = kernel_norm_bound_check(&e, &data, NormKind::Linf).unwrap();
        // E * K^ = q^{-d} K^, and max |K^| = q^d/|S| - 1
        let expected = (81.0 / 33.0 - 1.0) / 81.0;
        assert!((r.lhs - expected).abs() < 1e-12);
        assert!((r.rhs - 1.0 / 27.0).abs() < 1e-15);
        assert_eq!(r.regime, Some(Regime::J1));
        assert_eq!(r.size, 1);
        assert_eq!(r.experiment, "kernel-linf");
    }

    #[test]
    fn full_space_is_annihilated() {
        let data = data(5, &[1, 1, 1, 1]);
        let full = GridFunction::constant(Arc::clone(data.surface.field()), 4, Side::SpaceDx, 1.0);
        for kind in [NormKind::Linf, NormKind::L2, NormKind::Lcrit] {
            let r = kernel_norm_bound_check(&full, &data, kind).unwrap();
            assert!(r.lhs < 1e-12, "{kind:?}");
            assert!(r.constant < 1e-12);
            assert_eq!(r.regime, Some(Regime::J3));
        }
        let split = kernel_l2_split(&full, &data).unwrap();
        assert!(split.i < 1e-20 && split.ii < 1e-20);
    }

    #[test]
    fn split_of_a_point_mass() {
        for (q, coeffs) in [(3u64, vec![1i64, -1, 1, -1]), (3, vec![1, 1, 1, 2]), (5, vec![2, 1, 1, 1])] {
            let data = data(q, &coeffs);
            let e = GridFunction::delta(Arc::clone(data.surface.field()), 4, Side::SpaceDx);
            let split = kernel_l2_split(&e, &data).unwrap();
            let dual_count = data.surface.dual().enumerate().count as f64;
            let qf = q as f64;
            let expected_i = qf.powi(-2) * qf.powi(-8) * (dual_count - 1.0);
            let expected_ii = qf.powi(-4) * qf.powi(-8) * (qf.powi(4) - dual_count);
            assert!((split.i - expected_i).abs() < 1e-12 * expected_i);
            assert!((split.ii - expected_ii).abs() < 1e-12 * expected_ii);
        }
    }

    #[test]
    fn empty_set_and_bad_dimension() {
        let data4 = data(3, &[1, -1, 1, -1]);
        let empty = GridFunction::zeros(Arc::clone(data4.surface.field()), 4, Side::SpaceDx);
        assert!(matches!(kernel_norm_bound_check(&empty, &data4, NormKind::L2), Err(BoundsError::EmptySet)));
        assert!(matches!(kernel_l2_split(&empty, &data4), Err(BoundsError::EmptySet)));
        let data2 = data(3, &[1, -1]);
        let e = GridFunction::delta(Arc::clone(data2.surface.field()), 2, Side::SpaceDx);
        assert!(matches!(
            kernel_norm_bound_check(&e, &data2, NormKind::Lcrit),
            Err(BoundsError::CriticalDimension(2))
        ));
    }

    #[test]
    fn split_matches_plancherel() {
        for (q, coeffs) in [(3u64, vec![1, -1, 1, -1]), (5, vec![1, 1, 1, 1]), (3, vec![1, 1, 1, 2])] {
            let data = data(q, &coeffs);
            for (size, seed) in [(1usize, 1u64), (7, 2), (40, 3)] {
                let e = random_set(&data, size, seed);
                let split = kernel_l2_split(&e, &data).unwrap();
                let l2 = lp_norm(&convolve_khat(&e, &data).unwrap(), Exponent::Finite(2.0));
                assert!((split.exact - l2 * l2).abs() < 1e-12 * (1.0 + l2 * l2));
                assert!(split.constant_i() <= 1.0 + 1e-9);
                assert!(split.constant_ii() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn interpolated_table_is_consistent() {
        // ||.||_6 <= ||.||_2^{1/3} ||.||_inf^{2/3} reproduces the d = 4 rows
        for regime in Regime::ALL {
            let (a2, b2) = bound_exponents(NormKind::L2, regime, 4).unwrap();
            let (ai, bi) = bound_exponents(NormKind::Linf, regime, 4).unwrap();
            let (a6, b6) = bound_exponents(NormKind::Lcrit, regime, 4).unwrap();
            assert!((a2 / 3.0 + 2.0 * ai / 3.0 - a6).abs() < 1e-12, "{regime}");
            assert!((b2 / 3.0 + 2.0 * bi / 3.0 - b6).abs() < 1e-12, "{regime}");
        }
        // regimes meet continuously at the thresholds for d = 6
        let d = 6.0f64;
        let at = |regime, log_e: f64| {
            let (a, b) = bound_exponents(NormKind::Lcrit, regime, 6).unwrap();
            a + b * log_e
        };
        assert!((at(Regime::J1, (d - 2.0) / 2.0) - at(Regime::J2, (d - 2.0) / 2.0)).abs() < 1e-12);
        assert!((at(Regime::J2, d / 2.0) - at(Regime::J3, d / 2.0)).abs() < 1e-12);
    }
}
