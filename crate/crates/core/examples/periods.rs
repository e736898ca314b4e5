//! Abelian integrals over the real ovals, analytic continuation and Picard-Fuchs residuals.

use num_complex::Complex64;
use rayleigh_lienard::elliptic::{level_grid, periods_complex, periods_real, pf_residual, wronskian};
use rayleigh_lienard::forms::AnnulusCase;

fn main() -> anyhow::Result<()> {
    let tol = 1e-13;
    for case in AnnulusCase::ALL {
        let worst = level_grid(case, 20)
            .into_iter()
            .map(|h| pf_residual(case, h, tol).map(|(a, b)| a.max(b)))
            .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))?;
        let h = level_grid(case, 3)[1];
        let p = periods_real(case, h, tol)?;
        println!(
            "{case}: h = {h:.4}, I0 = {:.12}, I2 = {:.12}, max PF residual {worst:.1e}",
            p.i0.re, p.i2.re
        );
    }

    let z = Complex64::new(-0.1, 0.3);
    let p = periods_complex(AnnulusCase::EightExterior, z, tol)?;
    println!("continued to h = {z}: J0 = {:.10}, J2 = {:.10}", p.j0, p.j2);
    for h in [-0.125, -1.0] {
        let w = wronskian(h, tol)?;
        println!("Wronskian at h = {h}: {:?} = {:.8}", w.tag, w.value());
    }
    Ok(())
}
