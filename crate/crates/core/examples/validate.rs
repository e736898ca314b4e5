//! Tabulated decompositions and Melnikov coefficients re-derived from scratch.

use rayleigh_lienard::{appendix, theorems};

fn main() -> anyhow::Result<()> {
    let checks = appendix::check_all();
    let ok = checks.iter().filter(|c| c.passed()).count();
    println!("decompositions: {ok}/{} verified", checks.len());
    for c in theorems::check_first_order()?.iter().chain(&theorems::check_cubic()?) {
        println!("{:<50} order {:?} {}", c.label, c.order, if c.passed() { "ok" } else { "MISMATCH" });
    }
    Ok(())
}
