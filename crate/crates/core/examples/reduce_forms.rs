//! Canonical decomposition of polynomial one-forms on the four level annuli.

use rayleigh_lienard::forms::{reduce, verify_decomposition, AnnulusCase, OneForm};

fn main() -> anyhow::Result<()> {
    let forms = ["y^3 dx", "x^4*y dx", "x^2*y^3 dx", "y^5 dx + x y dy"];
    for case in AnnulusCase::HAMILTONIANS {
        println!("{case}: H = {}", case.hamiltonian().poly());
        for src in forms {
            let omega: OneForm = src.parse()?;
            let d = reduce(&omega, case, None)?;
            assert!(verify_decomposition(&omega, &d, case));
            println!("  {omega}  ->  u(H) = {}, v(H) = {}", d.u, d.v);
        }
    }
    Ok(())
}
