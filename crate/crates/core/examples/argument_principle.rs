//! Complex zeros of J_2/J_0-type ratios on the exterior eight loop via the winding number.

use rayleigh_lienard::exactalg::q;
use rayleigh_lienard::forms::AnnulusCase;
use rayleigh_lienard::zeros::{winding_number_f, ContourSampler, ContourSpec};
use rayleigh_lienard::zeros::VElement;

fn main() -> anyhow::Result<()> {
    let mut sampler = ContourSampler::new(ContourSpec::default())?;
    let elements = [
        ([q(1, 1), q(0, 1), q(0, 1)], [q(0, 1), q(0, 1), q(0, 1)]),
        ([q(0, 1), q(0, 1), q(0, 1)], [q(-1, 2), q(1, 1), q(0, 1)]),
        ([q(1, 1), q(-2, 1), q(1, 1)], [q(3, 1), q(0, 1), q(-1, 1)]),
    ];
    for (p, qq) in elements {
        let e = VElement::from_coeffs(AnnulusCase::EightExterior, p, qq);
        let w = winding_number_f(&e, &mut sampler)?;
        println!("p = {}, q = {}: winding {:.6} ({} zeros) over {} nodes", e.p, e.q, w.winding, w.zero_bound_estimate, w.samples);
    }
    Ok(())
}
