use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qavg_core::bounds::{
    averaging_report, battery_families, extremizer_family, kernel_l2_split, kernel_norm_bound_check,
    sharpness_probe, BoundReport, BoundsError, Exponent, Family, NormKind, Regime,
};
use qavg_core::quadric::{critical_exponents, region_for, Point};
use qavg_core::spectral::{
    format_float, forward_transform, inverse_transform, naive, sigma_inverse_ft_closed,
    sigma_inverse_ft_direct, sigma_inverse_ft_fast, synthesize, GridFunction, Side, SurfaceData,
};

use crate::config::ExperimentConfig;
use crate::output::Outputs;
use crate::CliError;

/// Grids above this size skip the quadratic-time naive comparison.
const NAIVE_LIMIT: usize = 4096;
/// Largest `q^d |S|` for the literal `(d sigma)^v` sum.
const DIRECT_LIMIT: u64 = 50_000_000;

pub struct Outcome {
    pub pass: bool,
    pub outputs: Outputs,
    pub lines: Vec<String>,
}

fn internal<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn bounds_error(e: BoundsError) -> CliError {
    CliError::Usage(e.to_string())
}

fn family_kind(family: Family) -> &'static str {
    match family {
        Family::Delta => "delta",
        Family::Subspace => "subspace",
        Family::RandomSet { .. } => "random",
        Family::DyadicRandom { .. } => "dyadic",
        Family::Sublevel => "sublevel",
    }
}

fn require_even(config: &ExperimentConfig, command: &str, min: usize) -> Result<(), CliError> {
    if config.d % 2 == 1 || config.d < min {
        return Err(CliError::Usage(format!(
            "d: {command} requires even d >= {min}, got d = {}",
            config.d
        )));
    }
    Ok(())
}

fn random_complex(field: &Arc<qavg_core::ffield::FieldSpec>, d: usize, seed: u64) -> Result<GridFunction, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = (field.q() as usize).pow(d as u32);
    let values = (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    GridFunction::new(Arc::clone(field), d, Side::SpaceDx, values).map_err(internal)
}

pub fn verify_fourier(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let tol = config.tolerances.identity;
    let d = config.d;
    let mut rows = Vec::new();
    let mut pass = true;
    let mut lines = Vec::new();
    let mut record = |q: u64, check: &str, seed: Option<u64>, err: f64| {
        let ok = err < tol;
        pass &= ok;
        rows.push(vec![
            q.to_string(),
            d.to_string(),
            check.to_string(),
            seed.map(|s| s.to_string()).unwrap_or_default(),
            format_float(err),
            format_float(tol),
            ok.to_string(),
        ]);
    };
    for &q in &config.q_list {
        let field = config.field(q)?;
        let orth = field
            .elements()
            .map(|a| {
                let s: Complex64 = field.elements().map(|x| field.character(field.mul(a, x))).sum();
                let expected = if a.is_zero() { q as f64 } else { 0.0 };
                (s - expected).norm()
            })
            .fold(0.0, f64::max);
        record(q, "orthogonality", None, orth);
        let ones = GridFunction::constant(Arc::clone(&field), d, Side::SpaceDx, 1.0);
        let delta_m = GridFunction::delta(Arc::clone(&field), d, Side::FreqDm);
        record(q, "transform-of-one", None, forward_transform(&ones).map_err(internal)?.max_abs_diff(&delta_m));
        let delta_hat = inverse_transform(&delta_m).map_err(internal)?;
        record(q, "delta-hat-is-one", None, delta_hat.max_abs_diff(&ones));
        let len = ones.len();
        for &seed in &config.seeds {
            let f = random_complex(&field, d, seed)?;
            let hat = forward_transform(&f).map_err(internal)?;
            let ex: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / len as f64;
            let em: f64 = hat.values().iter().map(|v| v.norm_sqr()).sum();
            record(q, "plancherel", Some(seed), (ex - em).abs() / ex.max(1.0));
            record(q, "round-trip", Some(seed), synthesize(&hat).map_err(internal)?.max_abs_diff(&f));
            record(
                q,
                "round-trip-reflection",
                Some(seed),
                inverse_transform(&hat).map_err(internal)?.max_abs_diff(&f.reflect()),
            );
            if len <= NAIVE_LIMIT {
                let slow = naive::forward_transform(&f).map_err(internal)?;
                record(q, "fast-vs-naive", Some(seed), hat.max_abs_diff(&slow));
            }
        }
        if len > NAIVE_LIMIT {
            lines.push(format!("q={q}: grid of {len} points, naive comparison skipped"));
        }
    }
    let mut outputs = Outputs::default();
    outputs.add_rows(
        "fourier.csv",
        &["q", "d", "check", "seed", "error", "tolerance", "pass"],
        &rows,
    )?;
    lines.push(format!("{} checks, tolerance {tol:e}", rows.len()));
    Ok(Outcome { pass, outputs, lines })
}

pub fn verify_sigma(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    require_even(config, "verify-sigma", 2)?;
    let d = config.d;
    let tol = config.tolerances.identity;
    let (lo, hi) = config.tolerances.decay;
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut pass = true;
    let mut lines = Vec::new();
    for &q in &config.q_list {
        let s = config.surface(q)?;
        let label = s.coeff_label();
        let row = |check: &str, expected: String, observed: String, result: &str| {
            vec![q.to_string(), d.to_string(), label.clone(), check.to_string(), expected, observed, result.to_string()]
        };
        let enumerated = s.enumerate();
        let closed_count = s.count_points_closed_form().map_err(internal)?;
        let matches = closed_count == enumerated.count;
        pass &= matches;
        rows.push(row(
            "point-count",
            closed_count.to_string(),
            enumerated.count.to_string(),
            if matches { "exact-match" } else { "mismatch" },
        ));

        let closed = sigma_inverse_ft_closed(&s).map_err(internal)?;
        let literal = enumerated.indicator.len() as u64 * enumerated.count <= DIRECT_LIMIT;
        let (check, other) = if literal {
            ("sigma-closed-vs-direct", sigma_inverse_ft_direct(&s))
        } else {
            ("sigma-closed-vs-fft", sigma_inverse_ft_fast(&s))
        };
        let diff = closed.max_abs_diff(&other);
        let ok = diff < tol;
        pass &= ok;
        rows.push(row(check, format_float(tol), format_float(diff), if ok { "within-tolerance" } else { "exceeds-tolerance" }));
        rows.push(row("sigma-max-imag", String::new(), format_float(other.max_imag()), "reported"));
        lines.push(format!("q={q}: |S| = {} (closed {closed_count}), {check} {diff:.3e}", enumerated.count));

        if d >= 4 {
            let dual_zero: Vec<bool> = s.dual().form_values().iter().map(|v| v.is_zero()).collect();
            let qf = q as f64;
            for (name, zero, power) in [("decay-dual-zero", true, (d as f64 - 2.0) / 2.0), ("decay-off-dual", false, d as f64 / 2.0)] {
                let normalized: Vec<f64> = other
                    .values()
                    .iter()
                    .enumerate()
                    .skip(1)
                    .filter(|(m, _)| dual_zero[*m] == zero)
                    .map(|(_, v)| v.norm() * qf.powf(power))
                    .collect();
                if normalized.is_empty() {
                    continue;
                }
                let min = normalized.iter().copied().fold(f64::INFINITY, f64::min);
                let max = normalized.iter().copied().fold(0.0, f64::max);
                let ok_min = min >= lo;
                let ok_max = max <= hi;
                pass &= ok_min && ok_max;
                rows.push(row(&format!("{name}-min"), format_float(lo), format_float(min), if ok_min { "within-band" } else { "outside-band" }));
                rows.push(row(&format!("{name}-max"), format_float(hi), format_float(max), if ok_max { "within-band" } else { "outside-band" }));
            }
        }
    }
    let mut outputs = Outputs::default();
    outputs.add_rows(
        "sigma.csv",
        &["q", "d", "coeffs", "check", "expected", "observed", "result"],
        &rows,
    )?;
    Ok(Outcome { pass, outputs, lines })
}

pub fn verify_kernel_bounds(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    require_even(config, "verify-kernel-bounds", 4)?;
    if config.families.is_empty() {
        return Err(CliError::Usage("families: no families selected".into()));
    }
    let tol = &config.tolerances;
    let kinds = [NormKind::Linf, NormKind::L2, NormKind::Lcrit];
    let mut reports = Vec::new();
    let mut pass = true;
    let mut lines = Vec::new();
    let mut max_c: BTreeMap<(NormKind, u64), f64> = BTreeMap::new();
    let mut table: BTreeMap<(NormKind, Regime, u64), f64> = BTreeMap::new();
    for &q in &config.q_list {
        let s = config.surface(q)?;
        let data = SurfaceData::build(&s).map_err(internal)?;
        let len = data.indicator.len();
        let mut sets: Vec<(String, Option<u64>, GridFunction)> = Vec::new();
        for family in [Family::Delta, Family::Subspace, Family::Sublevel] {
            if !config.has_family(family_kind(family)) {
                continue;
            }
            match extremizer_family(family, &data, 0) {
                Ok(f) => sets.push((family.label(), None, f)),
                Err(BoundsError::NotHyperbolic) => lines.push(format!("q={q}: no subspace family (surface is not hyperbolic)")),
                Err(e) => return Err(bounds_error(e)),
            }
        }
        if config.has_family("random") {
            for &seed in &config.seeds {
                for regime in Regime::ALL {
                    let (lo, hi) = regime.size_range(config.d, q as u32);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (q << 32) ^ (regime as u64) << 48);
                    for _ in 0..config.sets_per_regime {
                        let size = rng.gen_range(lo..=hi) as usize;
                        let e = GridFunction::indicator(
                            Arc::clone(s.field()),
                            config.d,
                            Side::SpaceDx,
                            sample(&mut rng, len, size),
                        );
                        sets.push(("random".into(), Some(seed), e));
                    }
                }
            }
        }
        for (family, seed, e) in &sets {
            for kind in kinds {
                let mut r = kernel_norm_bound_check(e, &data, kind).map_err(bounds_error)?;
                r.family = family.clone();
                r.seed = *seed;
                if kind == NormKind::Linf {
                    r = r.judge(tol.linf);
                    pass &= r.pass == Some(true);
                }
                let m = max_c.entry((kind, q)).or_insert(0.0);
                *m = m.max(r.constant);
                let t = table.entry((kind, r.regime.expect("set has a regime"), q)).or_insert(0.0);
                *t = t.max(r.constant);
                reports.push(r);
            }
            let split = kernel_l2_split(e, &data).map_err(bounds_error)?;
            for (name, lhs, rhs) in [("split-I", split.i, split.bound_i), ("split-II", split.ii, split.bound_ii)] {
                let mut r = BoundReport::new(data.q(), data.d(), s.coeff_label(), name, lhs, rhs)
                    .with_family(family.clone())
                    .with_seed(*seed)
                    .judge(1.0 + tol.proof_slack);
                r.size = e.support_size() as u64;
                r.regime = reports.last().and_then(|x| x.regime);
                pass &= r.pass == Some(true);
                reports.push(r);
            }
        }
    }
    for ((kind, regime, q), c) in &table {
        lines.push(format!("{:<5} {regime} q={q}: max C = {c:.4}", kind.label()));
    }
    let (first, last) = (config.q_list[0], *config.q_list.last().expect("nonempty"));
    if first != last {
        for kind in [NormKind::L2, NormKind::Lcrit] {
            let growth = max_c[&(kind, last)] / max_c[&(kind, first)];
            let ok = growth <= tol.growth;
            pass &= ok;
            lines.push(format!(
                "{} growth q={first} -> q={last}: {growth:.4} (ceiling {}){}",
                kind.label(),
                tol.growth,
                if ok { "" } else { " FAILED" }
            ));
        }
    }
    let mut outputs = Outputs::default();
    outputs.add_reports("kernel_bounds.csv", &reports)?;
    Ok(Outcome { pass, outputs, lines })
}

pub fn verify_averaging(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    require_even(config, "verify-averaging", 4)?;
    if config.families.is_empty() {
        return Err(CliError::Usage("families: no families selected".into()));
    }
    let crit = critical_exponents(config.d);
    let p = Exponent::from_reciprocal(crit.x).map_err(bounds_error)?;
    let r = Exponent::from_reciprocal(crit.y).map_err(bounds_error)?;
    let mut surfaces = Vec::new();
    for &q in &config.q_list {
        let s = config.surface(q)?;
        if !s.is_hyperbolic().map_err(internal)? {
            return Err(CliError::Usage(format!(
                "theorem hypothesis fails: no d/2-dimensional subspace (q = {q}, coeffs {})",
                config.coeff_label()
            )));
        }
        surfaces.push((q, s));
    }
    let tol = &config.tolerances;
    let mut reports = Vec::new();
    let mut maxima = Vec::new();
    let mut lines = vec![format!("critical exponents (1/p, 1/r) = {crit}")];
    let mut pass = true;
    for (q, s) in &surfaces {
        let data = SurfaceData::build(s).map_err(internal)?;
        let mut best: (f64, String) = (0.0, String::new());
        for family in battery_families(&data).map_err(bounds_error)? {
            if !config.has_family(family_kind(family)) {
                continue;
            }
            let seeds: Vec<Option<u64>> = if family.is_random() {
                config.seeds.iter().map(|&s| Some(s)).collect()
            } else {
                vec![None]
            };
            for seed in seeds {
                let f = extremizer_family(family, &data, seed.unwrap_or(0)).map_err(bounds_error)?;
                let row = averaging_report(&f, family, &data, p, r, seed)
                    .map_err(bounds_error)?
                    .judge(tol.averaging);
                pass &= row.pass == Some(true);
                if row.constant > best.0 {
                    best = (row.constant, row.family.clone());
                }
                reports.push(row);
            }
        }
        lines.push(format!("q={q}: battery max {:.6} ({})", best.0, best.1));
        maxima.push(best.0);
    }
    for (w, qs) in maxima.windows(2).zip(config.q_list.windows(2)) {
        let ratio = w[1] / w[0];
        let ok = ratio >= tol.consecutive.0 && ratio <= tol.consecutive.1;
        pass &= ok;
        lines.push(format!("ratio q={} / q={}: {ratio:.4}{}", qs[1], qs[0], if ok { "" } else { " FAILED" }));
    }
    let mut outputs = Outputs::default();
    outputs.add_reports("averaging.csv", &reports)?;
    Ok(Outcome { pass, outputs, lines })
}

pub fn sharpness(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let point = config
        .point
        .ok_or_else(|| CliError::Usage("point: sharpness needs --point x,y".into()))?;
    if config.q_list.len() < 2 {
        return Err(CliError::Usage("q_list: a slope fit needs at least two values of q".into()));
    }
    let report = sharpness_probe(config.d, &config.coeffs, point, &config.q_list).map_err(bounds_error)?;
    let (lo, hi) = config.tolerances.sharpness_slope;
    let mut pass = true;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for &(family, slope) in &report.slopes {
        let judged = family == Family::Subspace;
        let ok = slope >= lo && slope <= hi;
        if judged {
            pass &= ok;
        }
        rows.push(vec![
            family.label(),
            format_float(slope),
            if judged { format_float(lo) } else { String::new() },
            if judged { format_float(hi) } else { String::new() },
            if judged { ok.to_string() } else { String::new() },
        ]);
        lines.push(format!("{}: fitted slope {slope:.4}", family.label()));
    }
    let mut outputs = Outputs::default();
    outputs.add_reports("sharpness.csv", &report.rows)?;
    outputs.add_rows("sharpness_slopes.csv", &["family", "slope", "lower", "upper", "pass"], &rows)?;
    Ok(Outcome { pass, outputs, lines })
}

pub fn region(d: usize, hyperbolic: bool, point: Option<Point>, json: bool) -> Result<String, CliError> {
    if d < 2 {
        return Err(CliError::Usage(format!("dim: must be at least 2, got {d}")));
    }
    let region = region_for(d, hyperbolic);
    let location = point.map(|p| region.locate(p));
    if json {
        let vertices: Vec<[String; 2]> = region
            .vertices()
            .iter()
            .map(|v| [v.x.to_string(), v.y.to_string()])
            .collect();
        let mut value = serde_json::json!({
            "d": d,
            "hyperbolic": hyperbolic,
            "vertices": vertices,
        });
        if let (Some(p), Some(loc)) = (point, location) {
            value["point"] = serde_json::json!({
                "x": p.x.to_string(),
                "y": p.y.to_string(),
                "location": loc.label(),
            });
        }
        return Ok(format!("{value}\n"));
    }
    let mut out = format!(
        "region d={d} {}\n",
        if hyperbolic { "hyperbolic" } else { "general" }
    );
    for v in region.vertices() {
        out.push_str(&format!("vertex {} {}\n", v.x, v.y));
    }
    if let (Some(p), Some(loc)) = (point, location) {
        out.push_str(&format!("point {} {}: {}\n", p.x, p.y, loc.label()));
    }
    Ok(out)
}

/// A gnuplot script plotting the empirical constant against q, one series
/// per family, for any report CSV.
pub fn plot_script(csv: &str, title: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key outside\n\
         set logscale xy\n\
         set xlabel 'q'\n\
         set ylabel 'C = lhs / rhs'\n\
         set title '{title}'\n\
         families = system(\"tail -n +2 '{csv}' | cut -d, -f5 | sort -u | tr '\\n' ' '\")\n\
         plot for [fam in families] '{csv}' using 1:(strcol(5) eq fam ? $10 : 1/0) with points title fam\n"
    )
}

pub fn dump_grid(config: &ExperimentConfig, what: &str) -> Result<Outcome, CliError> {
    let q = config.q_list[0];
    let s = config.surface(q)?;
    let data = SurfaceData::build(&s).map_err(internal)?;
    let grid = match what {
        "indicator" => data.indicator,
        "sigma" => data.sigma_check,
        "kernel" => data.kernel,
        "kernel-hat" => data.kernel_hat,
        other => {
            return Err(CliError::Usage(format!(
                "what: unknown grid {other:?}, expected indicator, sigma, kernel or kernel-hat"
            )))
        }
    };
    let mut buf = Vec::new();
    grid.write_csv(&mut buf).map_err(internal)?;
    let mut outputs = Outputs::default();
    outputs.add(format!("{what}.csv"), buf);
    Ok(Outcome { pass: true, outputs, lines: vec![format!("q={q}: {} values", grid.len())] })
}
