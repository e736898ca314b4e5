//! Bautin ideal generators and a Nakayama certificate for a perturbed generating set.

use rayleigh_lienard::bautin::{bautin_generators, nakayama_certify};
use rayleigh_lienard::cli::parse_lambda_poly;
use rayleigh_lienard::exactalg::q;

fn main() -> anyhow::Result<()> {
    for (a, b) in [(q(1, 1), q(1, 1)), (q(1, 1), q(-1, 1)), (q(-1, 1), q(1, 1))] {
        let gens = bautin_generators(&a, &b)?;
        let list: Vec<String> = gens.generators.iter().map(ToString::to_string).collect();
        println!("a = {a}, b = {b}: ({})", list.join(", "));
    }

    let parse = |v: &[&str]| v.iter().map(|s| parse_lambda_poly(s, 2)).collect::<anyhow::Result<Vec<_>>>();
    let b = parse(&["l1^2 + l1*l2^3", "l2^3 + l1^2*l2"])?;
    let b0 = parse(&["l1^2", "l2^3"])?;
    let cert = nakayama_certify(&b, &b0, 12)?;
    println!("Nakayama certificate through degree {}", cert.truncation_degree);
    for (i, row) in cert.a.iter().enumerate() {
        let row: Vec<String> = row.iter().map(ToString::to_string).collect();
        println!("  A[{i}] = [{}]", row.join(", "));
    }
    Ok(())
}
