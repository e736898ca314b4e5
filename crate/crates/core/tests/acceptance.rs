//! Acceptance run: one pass/fail line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use rayleigh_lienard::appendix;
use rayleigh_lienard::bautin::{nakayama_certify, predict_order};
use rayleigh_lienard::elliptic::{level_grid, log_grid, pf_residual, wronskian};
use rayleigh_lienard::exactalg::{q, Monomial, MultiPoly, Rational};
use rayleigh_lienard::forms::AnnulusCase;
use rayleigh_lienard::francoise::{center_product_expected, center_product, melnikov, random_arc, KSpec, DEFAULT_MAX_ORDER};
use rayleigh_lienard::simulate::{find_limit_cycles, standard_configurations, SimConfig};
use rayleigh_lienard::theorems;
use rayleigh_lienard::zeros::{
    count_zeros_with, random_batch, random_velement, winding_number_f, ContourSampler, ContourSpec, Integrand,
    PeriodTable, SCAN_TOL,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn appendix_fidelity() -> Outcome {
    let checks = appendix::check_all();
    let bad: Vec<_> = checks.iter().filter(|c| !c.passed()).map(|c| c.label.clone()).collect();
    ensure(checks.len() == 23, || format!("{} entries, expected 23", checks.len()))?;
    ensure(bad.is_empty(), || format!("failed: {bad:?}"))?;
    Ok(format!("{}/{} identities hold and reduce to the tabulated (u, v)", checks.len(), checks.len()))
}

fn first_order_tables() -> Outcome {
    let checks = theorems::check_first_order().map_err(|e| e.to_string())?;
    let bad: Vec<_> = checks.iter().filter(|c| !c.passed()).map(|c| c.label.clone()).collect();
    ensure(checks.len() == 18, || format!("{} rows, expected 18", checks.len()))?;
    ensure(bad.is_empty(), || format!("failed: {bad:?}"))?;
    Ok("6 basis arcs x 3 sign cases: order 1, (p, q) exact".into())
}

fn cubic_order() -> Outcome {
    let checks = theorems::check_cubic().map_err(|e| e.to_string())?;
    let bad: Vec<_> = checks.iter().filter(|c| !c.passed()).map(|c| c.label.clone()).collect();
    ensure(checks.len() == 9, || format!("{} arcs, expected 9", checks.len()))?;
    ensure(bad.is_empty(), || format!("failed: {bad:?}"))?;
    Ok("center direction, c in {1, 2, -3}: order 3 with (8/1001) c^3 pattern".into())
}

fn center_products() -> Outcome {
    let coeffs = [q(1, 1), q(-2, 1), q(3, 5)];
    let mut pure = 0;
    let mut full = 0;
    for case in AnnulusCase::HAMILTONIANS {
        for j in &coeffs {
            for k in &coeffs {
                let d = center_product(j, &KSpec::PureXy(k.clone()), case).map_err(|e| e.to_string())?;
                ensure(d.u.is_zero() && d.v.is_zero(), || format!("{case}: pure product ({j}, {k}) has (u, v) = ({}, {})", d.u, d.v))?;
                pure += 1;
                let spec = KSpec::Full {
                    big_lambda: k.clone(),
                    xy: j.clone(),
                };
                let d = center_product(j, &spec, case).map_err(|e| e.to_string())?;
                let expect = center_product_expected(j, &spec, case).map_err(|e| e.to_string())?;
                ensure((d.u.clone(), d.v.clone()) == expect, || format!("{case}: full product ({j}, {k}) mismatch"))?;
                full += 1;
            }
        }
    }
    Ok(format!("{pure} pure-xy products relatively exact, {full} full products as predicted"))
}

fn picard_fuchs() -> Outcome {
    let mut worst = 0.0f64;
    for case in [AnnulusCase::EightInterior, AnnulusCase::EightExterior] {
        let levels = level_grid(case, 50);
        ensure(levels.len() == 50, || "grid size".into())?;
        for h in levels {
            let (r1, r2) = pf_residual(case, h, 1e-12).map_err(|e| e.to_string())?;
            ensure(r1 <= 1e-9 && r2 <= 1e-9, || format!("{case} h = {h}: residuals {r1:.2e}, {r2:.2e}"))?;
            worst = worst.max(r1).max(r2);
        }
    }
    Ok(format!("max relative residual {worst:.2e} over 2 x 50 levels"))
}

fn chebyshev_bound() -> Outcome {
    let mut lines = Vec::new();
    for (i, case) in AnnulusCase::ALL.into_iter().enumerate() {
        let seed = 6000 + 1000 * i as u64;
        let s = random_batch(case, 1000, seed, 400, SCAN_TOL).map_err(|e| e.to_string())?;
        ensure(s.violations == 0 && s.max_count <= case.zero_bound(), || {
            format!("{case}: {} violations, max {} (bound {})", s.violations, s.max_count, case.zero_bound())
        })?;
        lines.push(format!("{case} max {} hist {:?} uncertified {}", s.max_count, s.histogram, s.uncertified));
    }
    Ok(lines.join("; "))
}

fn argument_principle() -> Outcome {
    let case = AnnulusCase::EightExterior;
    let mut sampler = ContourSampler::new(ContourSpec::default()).map_err(|e| e.to_string())?;
    let spec = sampler.spec;
    // real zeros of J inside the truncated domain
    let levels = log_grid(spec.slit_half_width * 1.0001, spec.radius * 0.9999, 400);
    let table = PeriodTable::new(case, levels, SCAN_TOL).map_err(|e| e.to_string())?;
    let mut max_winding = 0;
    let mut max_dev = 0.0f64;
    let mut hist = [0usize; 7];
    for i in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + i);
        let e = random_velement(case, Integrand::Derivative, &mut rng, SCAN_TOL).map_err(|e| e.to_string())?;
        let w = winding_number_f(&e, &mut sampler).map_err(|err| format!("sample {i}: {err}"))?;
        let real = count_zeros_with(&e, Integrand::Derivative, &table).map_err(|e| e.to_string())?;
        let dev = (w.winding - w.zero_bound_estimate as f64).abs();
        ensure(dev < 0.05, || format!("sample {i}: winding {}", w.winding))?;
        ensure(w.zero_bound_estimate <= 5, || format!("sample {i}: winding estimate {}", w.zero_bound_estimate))?;
        ensure(real.count as i64 <= w.zero_bound_estimate, || {
            format!("sample {i}: {} real zeros above winding {}", real.count, w.zero_bound_estimate)
        })?;
        max_winding = max_winding.max(w.zero_bound_estimate);
        max_dev = max_dev.max(dev);
        hist[w.zero_bound_estimate.clamp(0, 6) as usize] += 1;
    }
    Ok(format!(
        "100 samples: max winding {max_winding}, max |w - round(w)| {max_dev:.1e}, winding histogram {hist:?}, {} contour nodes",
        sampler.len()
    ))
}

fn wronskian_structure() -> Outcome {
    let probe = |levels: [f64; 3]| -> Result<Vec<Complex64>, String> {
        levels
            .iter()
            .map(|&h| {
                let w = wronskian(h, 1e-12).map_err(|e| e.to_string())?;
                let z = w.value();
                ensure(z.re.abs() <= 1e-6 * z.norm(), || format!("W({h}) = {z} is not imaginary"))?;
                Ok(z)
            })
            .collect()
    };
    let spread = |v: &[Complex64]| {
        let mean = v.iter().sum::<Complex64>() / v.len() as f64;
        (v.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max) / mean.norm(), mean)
    };
    let w1 = probe([-0.2, -0.125, -0.05])?;
    let w2 = probe([-4.0, -1.0, -0.5])?;
    let (s1, m1) = spread(&w1);
    let (s2, m2) = spread(&w2);
    ensure(s1 <= 1e-6, || format!("W1 varies by {s1:.2e}"))?;
    ensure(s2 <= 1e-6, || format!("W2 varies by {s2:.2e}"))?;
    let ratio = m1 / m2;
    ensure(ratio.re > 0.0 && ratio.im.abs() <= 1e-6 * ratio.norm(), || format!("W1/W2 = {ratio}"))?;
    Ok(format!(
        "W1 = {:.9}i (spread {s1:.1e}), W2 = {:.9}i (spread {s2:.1e}), W1/W2 = {:.9}",
        m1.im, m2.im, ratio.re
    ))
}

fn mono(c: i64, e: [u32; 2]) -> MultiPoly {
    MultiPoly::term(Rational::integer(c), Monomial::new(e.to_vec()))
}

fn nakayama_example() -> Outcome {
    let b1 = mono(1, [2, 0]).add(&mono(1, [2, 2])).add(&mono(1, [1, 3])).add(&mono(1, [0, 4]));
    let b2 = mono(1, [0, 3]).add(&mono(1, [4, 0])).add(&mono(1, [3, 1]));
    let b = vec![b1, b2];
    let b0 = vec![mono(1, [2, 0]), mono(1, [0, 3])];
    let cap = 12;
    let cert = nakayama_certify(&b, &b0, cap).map_err(|e| e.to_string())?;
    ensure(cert.truncation_degree == cap, || format!("truncated at {}", cert.truncation_degree))?;
    // b0_i = sum_j (delta_ij + a~_ij) b_j through the cap
    for (i, row) in cert.matrix_entries.iter().enumerate() {
        let mut sum = MultiPoly::zero(2);
        for (c, bj) in row.iter().zip(&b) {
            sum = sum.add(&c.mul_truncated(bj, cap));
        }
        let residual = sum.sub(&b0[i]).truncate(cap);
        ensure(residual.is_zero(), || format!("row {i}: residual {residual}"))?;
    }
    Ok(format!("(b1, b2) ~ (l1^2, l2^3) certified, zero residual through degree {cap}"))
}

fn bautin_agreement() -> Outcome {
    let mut lines = Vec::new();
    for (ci, case) in AnnulusCase::ALL.into_iter().enumerate() {
        let rows = (0..200u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(10_000 * (ci as u64 + 1) + i);
                let arc = random_arc(case, &mut rng);
                let predicted = predict_order(&arc, case);
                let actual = melnikov(&arc, case, DEFAULT_MAX_ORDER).map_err(|e| e.to_string())?.order();
                Ok((i, predicted, actual))
            })
            .collect::<Result<Vec<_>, String>>()?;
        let mut nondegenerate = 0;
        let mut orders = [0usize; 10];
        for (i, predicted, actual) in rows {
            let (p, a) = (predicted.unwrap_or(u32::MAX), actual.unwrap_or(u32::MAX));
            ensure(p <= a, || format!("{case} arc {i}: predicted {predicted:?} above {actual:?}"))?;
            if p <= DEFAULT_MAX_ORDER {
                ensure(p == a, || format!("{case} arc {i}: predicted {p}, melnikov {actual:?}"))?;
                nondegenerate += 1;
                orders[p as usize] += 1;
            }
        }
        lines.push(format!("{case}: {nondegenerate}/200 equal, orders {:?}", &orders[1..]));
    }
    Ok(lines.join("; "))
}

fn simulation_cross_validation() -> Outcome {
    let family = [1e-2, 5e-3, 2.5e-3];
    let configs = standard_configurations().map_err(|e| e.to_string())?;
    ensure(configs.len() == 5, || "five configurations".into())?;
    let mut sizes: Vec<usize> = configs.iter().map(|c| c.predicted.len()).collect();
    sizes.sort();
    ensure(sizes == [1, 2, 3, 4, 4], || format!("zero sets {sizes:?}"))?;
    let mut worst_order = f64::INFINITY;
    let mut lines = Vec::new();
    for c in &configs {
        let mut errors: Vec<Vec<f64>> = Vec::new();
        for &eps in &family {
            let cfg = SimConfig::new(c.case, c.lambda, eps);
            let cycles = find_limit_cycles(&cfg, c.window, 200).map_err(|e| e.to_string())?;
            ensure(cycles.len() <= c.case.zero_bound(), || format!("{}: {} cycles", c.case, cycles.len()))?;
            ensure(cycles.len() == c.predicted.len(), || {
                format!("{} eps {eps}: {} cycles, predicted {}", c.case, cycles.len(), c.predicted.len())
            })?;
            errors.push(cycles.iter().zip(&c.predicted).map(|(s, p)| (s.h - p).abs()).collect());
        }
        for k in 0..c.predicted.len() {
            let (big, small) = (errors[0][k], errors[family.len() - 1][k]);
            // below 1e-9 the position is at the bisection and integration floor
            if small > 1e-9 {
                let order = (big / small).ln() / (family[0] / family[family.len() - 1]).ln();
                ensure(order >= 0.8, || format!("{} zero {k}: errors {:?} shrink with order {order:.2}", c.case, errors))?;
                worst_order = worst_order.min(order);
            }
            let constant = big / family[0];
            ensure(small <= 1.5 * constant * family[family.len() - 1], || format!("{} zero {k}: C not stable", c.case))?;
        }
        let max_err = errors.iter().flatten().fold(0.0f64, |m, e| m.max(*e));
        lines.push(format!("{} {} cycles (max |dh| {max_err:.1e})", c.case, c.predicted.len()));
    }
    Ok(format!("{}; smallest empirical order {worst_order:.2}", lines.join(", ")))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "appendix fidelity", limit: Duration::from_secs(10), run: appendix_fidelity },
        Criterion { id: 2, name: "first-order tables", limit: Duration::from_secs(5), run: first_order_tables },
        Criterion { id: 3, name: "cubic-order formula", limit: Duration::from_secs(30), run: cubic_order },
        Criterion { id: 4, name: "center-direction products", limit: Duration::from_secs(5), run: center_products },
        Criterion { id: 5, name: "Picard-Fuchs residuals", limit: Duration::from_secs(30), run: picard_fuchs },
        Criterion { id: 6, name: "Chebyshev bound", limit: Duration::from_secs(600), run: chebyshev_bound },
        Criterion { id: 7, name: "argument principle", limit: Duration::from_secs(1200), run: argument_principle },
        Criterion { id: 8, name: "Wronskian structure", limit: Duration::from_secs(300), run: wronskian_structure },
        Criterion { id: 9, name: "Nakayama example", limit: Duration::from_secs(5), run: nakayama_example },
        Criterion { id: 10, name: "Bautin/Melnikov order agreement", limit: Duration::from_secs(600), run: bautin_agreement },
        Criterion { id: 11, name: "simulation cross-validation", limit: Duration::from_secs(1800), run: simulation_cross_validation },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; took {elapsed:.1?}, limit {:?}", c.limit)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {}: {detail} [{elapsed:.2?}]", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {}: {why} [{elapsed:.2?}]", c.id, c.name);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
