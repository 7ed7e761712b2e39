use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use qavg_core::bounds::{
    averaging_battery, kernel_l2_split, kernel_norm_bound_check, sharpness_probe, Exponent,
    Family, NormKind, Regime,
};
use qavg_core::ffield::{field_of_order, FieldSpec};
use qavg_core::quadric::{
    count_subspaces, critical_exponents, isotropic_subspace, surface_from_signed, Point,
    QuadraticSurface, SubspaceMode,
};
use qavg_core::spectral::{
    average, convolve_khat, convolve_khat_naive, forward_transform, inverse_transform, naive,
    sigma_inverse_ft_closed, sigma_inverse_ft_direct, sigma_inverse_ft_fast, synthesize,
    AveragePath, GridFunction, Side, SurfaceData,
};
use qavg_core::tolerance::{
    AVERAGING_CEILING, CONSECUTIVE_BAND, CONVOLUTION_IDENTITY, DECAY_BAND, GROWTH_CEILING,
    IDENTITY, KERNEL_SUP_CEILING, PROOF_SLACK, SHARPNESS_SLOPE_BAND,
};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that fail at the stated thresholds. They are still run and
/// reported; the run errors if one of them starts passing.
///
/// 6: on hyperbolic surfaces the L^6 constant for a single point is
/// `q^{-5/6} ||K^||_6`, which rises from 0.513 at q = 3 to 0.844 at q = 11
/// (and tends to 1), a ratio of 1.64 against the 1.5 ceiling.
const EXPECTED_FAILURES: &[usize] = &[6];

struct Outcome {
    pass: bool,
    detail: String,
}

fn field(q: u64) -> Arc<FieldSpec> {
    Arc::new(field_of_order(q).unwrap())
}

fn surface(q: u64, coeffs: &[i64]) -> QuadraticSurface {
    surface_from_signed(field(q), coeffs).unwrap()
}

fn sign_patterns(d: usize) -> Vec<Vec<i64>> {
    (0..1u32 << d)
        .map(|bits| (0..d).map(|j| if bits >> j & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

/// A hyperbolic and an elliptic pattern `(1, -1, 1, ..., c)` for the given q.
fn both_types(q: u64, d: usize) -> Vec<(Vec<i64>, bool)> {
    let f = field(q);
    let mut out: Vec<(Vec<i64>, bool)> = Vec::new();
    for c in 1..f.p() as i64 {
        let mut coeffs: Vec<i64> = (0..d - 1).map(|j| if j % 2 == 0 { 1 } else { -1 }).collect();
        coeffs.push(c);
        let hyperbolic = surface_from_signed(Arc::clone(&f), &coeffs).unwrap().is_hyperbolic().unwrap();
        if out.iter().all(|(_, h)| *h != hyperbolic) {
            out.push((coeffs, hyperbolic));
        }
    }
    assert_eq!(out.len(), 2, "q={q} d={d}");
    out
}

fn random_grid(f: &Arc<FieldSpec>, d: usize, side: Side, rng: &mut ChaCha8Rng) -> GridFunction {
    let len = (f.q() as usize).pow(d as u32);
    let values = (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    GridFunction::new(Arc::clone(f), d, side, values).unwrap()
}

fn point_counts() -> Outcome {
    let mut cases: Vec<(u64, Vec<i64>)> = Vec::new();
    for q in [3, 5] {
        cases.extend(sign_patterns(4).into_iter().map(|c| (q, c)));
    }
    cases.push((3, vec![1, 1, 1, 2]));
    cases.push((3, vec![1, -1]));
    cases.push((5, vec![1, -1]));
    let mut mismatches = Vec::new();
    for (q, coeffs) in &cases {
        let s = surface(*q, coeffs);
        let enumerated = s.enumerate().count;
        let closed = s.count_points_closed_form().unwrap();
        if enumerated != closed {
            mismatches.push(format!("q={q} {coeffs:?}: {enumerated} vs {closed}"));
        }
    }
    let spot = [
        surface(3, &[1, -1, 1, -1]).enumerate().count,
        surface(3, &[1, 1, 1, 2]).enumerate().count,
        surface(3, &[1, -1]).enumerate().count,
    ];
    Outcome {
        pass: mismatches.is_empty() && spot == [33, 21, 5],
        detail: format!("{} surfaces, counts {:?}, mismatches {:?}", cases.len(), spot, mismatches),
    }
}

fn sigma_closed_vs_direct() -> Outcome {
    let mut worst = 0.0f64;
    let mut cells = 0;
    for d in [2usize, 4, 6] {
        for q in [3u64, 5] {
            for (coeffs, _) in both_types(q, d) {
                let s = surface(q, &coeffs);
                let closed = sigma_inverse_ft_closed(&s).unwrap();
                let direct = sigma_inverse_ft_direct(&s);
                worst = worst.max(closed.max_abs_diff(&direct));
                cells += 1;
            }
        }
    }
    Outcome {
        pass: worst < IDENTITY,
        detail: format!("{cells} surfaces, max |closed - direct| = {worst:.3e}"),
    }
}

fn fourier_infrastructure() -> Outcome {
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut note = |name: &'static str, err: f64| {
        let e = worst.entry(name).or_insert(0.0);
        *e = e.max(err);
    };
    for q in [3u64, 5, 7] {
        let f = field(q);
        // sum_{x in F_q} chi(a x) = q [a = 0]
        for a in f.elements() {
            let s: Complex64 = f.elements().map(|x| f.character(f.mul(a, x))).sum();
            let expected = if a.is_zero() { q as f64 } else { 0.0 };
            note("orthogonality", (s - expected).norm());
        }
        for d in [2usize, 4] {
            let len = (q as usize).pow(d as u32);
            let ones = vec![Complex64::new(1.0, 0.0); len];
            let sums = naive::character_sum(&f, d, &ones, qavg_core::spectral::Sign::Plus, 1.0);
            for (m, s) in sums.iter().enumerate() {
                let expected = if m == 0 { len as f64 } else { 0.0 };
                note("orthogonality", (s - expected).norm() / len as f64);
            }
            let delta = GridFunction::delta(Arc::clone(&f), d, Side::FreqDm);
            let one = inverse_transform(&delta).unwrap();
            note("delta-hat", one.values().iter().map(|v| (v - 1.0).norm()).fold(0.0, f64::max));

            let mut rng = ChaCha8Rng::seed_from_u64(1000 * q + d as u64);
            for _ in 0..100 {
                let g = random_grid(&f, d, Side::SpaceDx, &mut rng);
                let hat = forward_transform(&g).unwrap();
                note("fast-vs-naive", hat.max_abs_diff(&naive::forward_transform(&g).unwrap()));
                let energy_x: f64 = g.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / len as f64;
                let energy_m: f64 = hat.values().iter().map(|v| v.norm_sqr()).sum();
                note("plancherel", (energy_x - energy_m).abs() / energy_x.max(1.0));
                note("round-trip", synthesize(&hat).unwrap().max_abs_diff(&g));
                note("round-trip", inverse_transform(&hat).unwrap().max_abs_diff(&g.reflect()));
                let h = random_grid(&f, d, Side::FreqDm, &mut rng);
                note(
                    "fast-vs-naive",
                    inverse_transform(&h).unwrap().max_abs_diff(&naive::inverse_transform(&h).unwrap())
                        / len as f64,
                );
            }
        }
    }
    let pass = worst.values().all(|&e| e < IDENTITY);
    let detail = worst.iter().map(|(k, v)| format!("{k} {v:.2e}")).collect::<Vec<_>>().join(", ");
    Outcome { pass, detail }
}

fn kernel_identities() -> Outcome {
    let mut k0_exact = true;
    let mut conv_err = 0.0f64;
    let mut sup_ratio = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for d in [4usize, 6] {
        for q in [3u64, 5, 7] {
            for (coeffs, _) in both_types(q, d) {
                let s = surface(q, &coeffs);
                let data = SurfaceData::build(&s).unwrap();
                k0_exact &= data.kernel.values()[0] == Complex64::new(0.0, 0.0);
                sup_ratio = sup_ratio.max(data.kernel_hat.max_abs() / q as f64);
                let f = random_grid(s.field(), d, Side::SpaceDx, &mut rng);
                let len = f.len() as u64;
                let small = len * data.count <= 20_000_000;
                let path = if small { AveragePath::Naive } else { AveragePath::Fourier };
                let lhs = average(&f, &data, path).unwrap();
                let khat = if small {
                    convolve_khat_naive(&f, &data).unwrap()
                } else {
                    convolve_khat(&f, &data).unwrap()
                };
                let mean = f.mean();
                let rhs = khat.map(|v| v + mean);
                conv_err = conv_err.max(lhs.max_abs_diff(&rhs));
            }
        }
    }
    Outcome {
        pass: k0_exact && conv_err < CONVOLUTION_IDENTITY && sup_ratio <= KERNEL_SUP_CEILING,
        detail: format!(
            "K(0)=0 exact: {k0_exact}, max convolution error {conv_err:.2e}, max ||K^||/q = {sup_ratio:.4}"
        ),
    }
}

fn decay_band() -> Outcome {
    let (lo, hi) = DECAY_BAND;
    let mut range = (f64::INFINITY, 0.0f64);
    for d in [4usize, 6] {
        for q in [3u64, 5, 7] {
            for (coeffs, _) in both_types(q, d) {
                let s = surface(q, &coeffs);
                let sigma = sigma_inverse_ft_fast(&s);
                let data_dual: Vec<bool> = {
                    let dual = s.dual();
                    dual.form_values().iter().map(|v| v.is_zero()).collect()
                };
                let qf = q as f64;
                for (m, v) in sigma.values().iter().enumerate().skip(1) {
                    let scale = if data_dual[m] { qf.powf((d as f64 - 2.0) / 2.0) } else { qf.powf(d as f64 / 2.0) };
                    let x = v.norm() * scale;
                    range = (range.0.min(x), range.1.max(x));
                }
            }
        }
    }
    Outcome {
        pass: range.0 >= lo && range.1 <= hi,
        detail: format!("normalized values in [{:.4}, {:.4}]", range.0, range.1),
    }
}

fn kernel_certification() -> Outcome {
    let qs = [3u64, 5, 7, 11];
    let mut split_worst = 0.0f64;
    let mut pass = true;
    let mut summary = Vec::new();
    let mut linf_worst = 0.0f64;
    for hyperbolic in [true, false] {
        let kind_label = if hyperbolic { "hyperbolic" } else { "elliptic" };
        let mut max_c: BTreeMap<(NormKind, u64), f64> = BTreeMap::new();
        let mut per_regime: BTreeMap<(NormKind, Regime, u64), f64> = BTreeMap::new();
        for &q in &qs {
            let (coeffs, _) = both_types(q, 4).into_iter().find(|(_, h)| *h == hyperbolic).unwrap();
            let s = surface(q, &coeffs);
            let data = SurfaceData::build(&s).unwrap();
            let len = data.indicator.len();
            let mut rng = ChaCha8Rng::seed_from_u64(600 + q + 100 * u64::from(hyperbolic));
            for regime in Regime::ALL {
                let (lo, hi) = regime.size_range(4, q as u32);
                for _ in 0..200 {
                    let size = rng.gen_range(lo..=hi) as usize;
                    let e = GridFunction::indicator(
                        Arc::clone(s.field()),
                        4,
                        Side::SpaceDx,
                        sample(&mut rng, len, size).into_iter(),
                    );
                    let split = kernel_l2_split(&e, &data).unwrap();
                    split_worst = split_worst.max(split.constant_i()).max(split.constant_ii());
                    for kind in [NormKind::L2, NormKind::Lcrit, NormKind::Linf] {
                        let c = kernel_norm_bound_check(&e, &data, kind).unwrap().constant;
                        let m = max_c.entry((kind, q)).or_insert(0.0);
                        *m = m.max(c);
                        let r = per_regime.entry((kind, regime, q)).or_insert(0.0);
                        *r = r.max(c);
                    }
                }
            }
        }
        for kind in [NormKind::L2, NormKind::Lcrit] {
            for regime in Regime::ALL {
                let row: Vec<String> = qs
                    .iter()
                    .map(|&q| format!("{:.4}", per_regime[&(kind, regime, q)]))
                    .collect();
                println!("      {kind_label:<10} {:<5} {regime} max C over q = {}: {}", kind.label(), "3,5,7,11", row.join(" "));
            }
        }
        let growth = |kind| max_c[&(kind, 11)] / max_c[&(kind, 3)];
        let (g2, g6) = (growth(NormKind::L2), growth(NormKind::Lcrit));
        pass &= g2 <= GROWTH_CEILING && g6 <= GROWTH_CEILING;
        linf_worst = qs.iter().map(|&q| max_c[&(NormKind::Linf, q)]).fold(linf_worst, f64::max);
        summary.push(format!("{kind_label}: l2 growth {g2:.4}, l6 growth {g6:.4}"));
    }
    pass &= split_worst <= 1.0 + PROOF_SLACK;
    Outcome {
        pass,
        detail: format!(
            "split constants <= {split_worst:.6}; {}; linf max C {linf_worst:.4}",
            summary.join("; ")
        ),
    }
}

fn critical_battery() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for (d, qs) in [(4usize, vec![3u64, 5, 7, 11]), (6, vec![3, 5])] {
        let crit = critical_exponents(d);
        let p = Exponent::from_reciprocal(crit.x).unwrap();
        let r = Exponent::from_reciprocal(crit.y).unwrap();
        let coeffs: Vec<i64> = (0..d).map(|j| if j % 2 == 0 { 1 } else { -1 }).collect();
        let mut maxima = Vec::new();
        for &q in &qs {
            let data = SurfaceData::build(&surface(q, &coeffs)).unwrap();
            let rows = averaging_battery(&data, p, r, 7, 5).unwrap();
            let (best, family) = rows
                .iter()
                .map(|row| (row.constant, row.family.clone()))
                .fold((0.0, String::new()), |a, b| if b.0 > a.0 { b } else { a });
            if d == 4 && q == 3 {
                let delta = rows.iter().find(|row| row.family == Family::Delta.label()).unwrap();
                let expected = 9.0 * 33f64.powf(-2.0 / 3.0);
                let ok = (delta.constant - expected).abs() < 1e-6;
                pass &= ok;
                lines.push(format!("delta ratio {:.7} vs 9*33^(-2/3) = {expected:.7}", delta.constant));
            }
            pass &= best <= AVERAGING_CEILING;
            maxima.push(best);
            lines.push(format!("d={d} q={q}: max {best:.4} ({family})"));
        }
        for w in maxima.windows(2) {
            let ratio = w[1] / w[0];
            pass &= ratio >= CONSECUTIVE_BAND.0 && ratio <= CONSECUTIVE_BAND.1;
        }
    }
    Outcome { pass, detail: lines.join("; ") }
}

fn sharpness() -> Outcome {
    let report = sharpness_probe(4, &[1, -1, 1, -1], Point::from_ints(4, 5, 1, 5), &[3, 5, 7, 11]).unwrap();
    let slope = report.slope(Family::Subspace).unwrap();
    let delta = report.slope(Family::Delta).unwrap();
    Outcome {
        pass: slope >= SHARPNESS_SLOPE_BAND.0 && slope <= SHARPNESS_SLOPE_BAND.1,
        detail: format!("subspace slope {slope:.4}, delta slope {delta:.4}"),
    }
}

fn hyperbolicity_vs_search() -> Outcome {
    let f = field(3);
    let subspaces = count_subspaces(&f, 4, 2);
    let mut disagreements = Vec::new();
    let mut hyperbolic = 0;
    for bits in 0..16u32 {
        let coeffs: Vec<i64> = (0..4).map(|j| if bits >> j & 1 == 1 { 2 } else { 1 }).collect();
        let s = surface_from_signed(Arc::clone(&f), &coeffs).unwrap();
        let claimed = s.is_hyperbolic().unwrap();
        let found = isotropic_subspace(&s, SubspaceMode::Search).unwrap();
        if let Some(h) = &found {
            assert!(h.verify(&s));
        }
        if claimed != found.is_some() {
            disagreements.push(coeffs);
        }
        hyperbolic += claimed as usize;
    }
    Outcome {
        pass: disagreements.is_empty() && subspaces == 130,
        detail: format!("{subspaces} subspaces searched per pattern, {hyperbolic}/16 hyperbolic, disagreements {disagreements:?}"),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("exact point counts", point_counts),
        ("closed-form vs direct (d sigma)^v", sigma_closed_vs_direct),
        ("fourier infrastructure", fourier_infrastructure),
        ("kernel identities", kernel_identities),
        ("decay two-sidedness", decay_band),
        ("kernel-norm certification", kernel_certification),
        ("critical-exponent battery", critical_battery),
        ("sharpness outside the hull", sharpness),
        ("hyperbolicity vs exhaustive search", hyperbolicity_vs_search),
    ];
    let mut failures = 0;
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        failures += usize::from(!outcome.pass);
        if outcome.pass == EXPECTED_FAILURES.contains(&(i + 1)) {
            unexpected += 1;
            println!("      unexpected outcome for criterion {}", i + 1);
        }
        println!(
            "[{status}] {}. {name} ({:.1}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    println!(
        "{} of {} criteria passed; known failures: {:?}",
        criteria.len() - failures,
        criteria.len(),
        EXPECTED_FAILURES
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
