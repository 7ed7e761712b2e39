use std::sync::Arc;

use super::{extremizer_family, lp_norm, regime_classify, BoundReport, BoundsError, Exponent, Family};
use crate::ffield::field_of_order;
use crate::quadric::{region_for, surface_from_signed, Point, SurfaceError};
use crate::spectral::{average, AveragePath, GridFunction, SurfaceData};

/// Measures `||A f||_r / ||f||_p` for one test function.
pub fn averaging_report(
    f: &GridFunction,
    family: Family,
    data: &SurfaceData,
    p: Exponent,
    r: Exponent,
    seed: Option<u64>,
) -> Result<BoundReport, BoundsError> {
    let rhs = lp_norm(f, p);
    if rhs == 0.0 {
        return Err(BoundsError::ZeroInput);
    }
    let af = average(f, data, AveragePath::Fourier)?;
    let lhs = lp_norm(&af, r);
    let mut report = BoundReport::new(data.q(), data.d(), data.surface.coeff_label(), "averaging", lhs, rhs)
        .with_family(family.label())
        .with_seed(seed);
    report.size = f.support_size() as u64;
    report.regime = Some(regime_classify(data.d(), data.q(), report.size)?);
    Ok(report)
}

/// The standard test families: delta, subspace (hyperbolic S only), the
/// surface itself, random sets at the edges and middle of each size regime,
/// and dyadic random functions. Random families use `seeds` seeds each.
pub fn battery_families(data: &SurfaceData) -> Result<Vec<Family>, BoundsError> {
    let mut families = vec![Family::Delta, Family::Sublevel];
    if data.d() % 2 == 0 && data.surface.is_hyperbolic()? {
        families.insert(1, Family::Subspace);
    }
    let mut sizes = Vec::new();
    for regime in super::Regime::ALL {
        let (lo, hi) = regime.size_range(data.d(), data.q());
        let mid = ((lo as f64) * (hi as f64)).sqrt().round() as u64;
        sizes.extend([lo, mid, hi]);
    }
    sizes.sort();
    sizes.dedup();
    families.extend(sizes.into_iter().map(|s| Family::RandomSet { size: s as usize }));
    families.extend([Family::DyadicRandom { levels: 3 }, Family::DyadicRandom { levels: 6 }]);
    Ok(families)
}

pub fn averaging_battery(
    data: &SurfaceData,
    p: Exponent,
    r: Exponent,
    seed: u64,
    seeds: u64,
) -> Result<Vec<BoundReport>, BoundsError> {
    let mut out = Vec::new();
    for family in battery_families(data)? {
        let runs = if family.is_random() { seeds } else { 1 };
        for i in 0..runs {
            let s = seed.wrapping_add(i);
            let f = extremizer_family(family, data, s)?;
            out.push(averaging_report(&f, family, data, p, r, family.is_random().then_some(s))?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SharpnessReport {
    pub point: Point,
    pub rows: Vec<BoundReport>,
    /// Least-squares slope of `log ratio` against `log q`, per family.
    pub slopes: Vec<(Family, f64)>,
}

impl SharpnessReport {
    pub fn slope(&self, family: Family) -> Option<f64> {
        self.slopes.iter().find(|(f, _)| *f == family).map(|&(_, s)| s)
    }
}

pub fn fit_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Growth of the delta and subspace ratios in q at an exponent pair outside
/// the region. The surface must be hyperbolic at every q.
pub fn sharpness_probe(
    d: usize,
    coeffs: &[i64],
    point: Point,
    q_list: &[u64],
) -> Result<SharpnessReport, BoundsError> {
    if coeffs.len() != d {
        return Err(SurfaceError::DimensionTooSmall(coeffs.len()).into());
    }
    let p = Exponent::from_reciprocal(point.x)?;
    let r = Exponent::from_reciprocal(point.y)?;
    let families = [Family::Delta, Family::Subspace];
    let mut rows = Vec::new();
    for &q in q_list {
        let field = Arc::new(field_of_order(q).map_err(SurfaceError::from)?);
        let surface = surface_from_signed(field, coeffs)?;
        let hyperbolic = surface.is_hyperbolic()?;
        if region_for(d, hyperbolic).contains(point) {
            return Err(BoundsError::ProbeMeaningless(point.to_string()));
        }
        let data = SurfaceData::build(&surface)?;
        for family in families {
            let f = extremizer_family(family, &data, 0)?;
            let mut row = averaging_report(&f, family, &data, p, r, None)?;
            row.experiment = "sharpness".into();
            rows.push(row);
        }
    }
    let slopes = families
        .iter()
        .map(|&family| {
            let label = family.label();
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|row| row.family == label)
                .map(|row| (row.q as f64, row.constant))
                .unzip();
            (family, fit_log_slope(&xs, &ys))
        })
        .collect();
    Ok(SharpnessReport { point, rows, slopes })
}
