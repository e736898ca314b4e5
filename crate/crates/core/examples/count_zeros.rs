//! Real zeros of p(h) I_2 + q(h) I_0 and a seeded batch of random elements.

use rayleigh_lienard::exactalg::q;
use rayleigh_lienard::forms::AnnulusCase;
use rayleigh_lienard::zeros::{count_zeros_real, Integrand, interpolating_element, random_batch, VElement, SCAN_TOL};

fn main() -> anyhow::Result<()> {
    let e = VElement::from_coeffs(AnnulusCase::GlobalCenter, [q(-1, 1), q(0, 1), q(0, 1)], [q(0, 1), q(2, 1), q(0, 1)]);
    let r = count_zeros_real(&e, 400, SCAN_TOL)?;
    println!("({}) I_2 + ({}) I_0: {} zero(s), certified {}", e.p, e.q, r.count, r.certified);

    let case = AnnulusCase::EightExterior;
    let levels = [0.2, 0.5, 0.9, 1.4, 1.8];
    let e = interpolating_element(case, Integrand::Abelian, &levels, SCAN_TOL)?;
    let r = count_zeros_real(&e, 400, SCAN_TOL)?;
    let found: Vec<String> = r.locations.iter().map(|z| format!("{:.6}", z.h)).collect();
    println!("{case}: element through {levels:?} has zeros [{}] (bound {})", found.join(", "), r.bound);

    for case in AnnulusCase::ALL {
        let s = random_batch(case, 200, 42, 400, SCAN_TOL)?;
        println!("{case}: histogram {:?}, max {}, violations {}", s.histogram, s.max_count, s.violations);
    }
    Ok(())
}
