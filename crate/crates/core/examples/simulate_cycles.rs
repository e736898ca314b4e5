//! Limit cycles of the perturbed system located by the Poincare return map.

use rayleigh_lienard::simulate::{find_limit_cycles, standard_configurations, SimConfig};

fn main() -> anyhow::Result<()> {
    let eps = 1e-3;
    for c in standard_configurations()? {
        let cfg = SimConfig::new(c.case, c.lambda, eps);
        let cycles = find_limit_cycles(&cfg, c.window, 200)?;
        println!("{}: predicted {:?}", c.case, c.predicted);
        for lc in &cycles {
            println!("  h = {:.6} (x0 = {:.6}), {:?}", lc.h, lc.x0, lc.stability);
        }
    }
    Ok(())
}
