//! Higher-order Melnikov functions along parameter arcs.

use rayleigh_lienard::exactalg::{q, Rational};
use rayleigh_lienard::forms::AnnulusCase;
use rayleigh_lienard::francoise::{melnikov, ParamArc, DEFAULT_MAX_ORDER};

fn main() -> anyhow::Result<()> {
    let case = AnnulusCase::GlobalCenter;
    let arcs = [
        ("lambda_1 = eps", ParamArc::basis(1, Rational::one())),
        ("lambda_5 = eps", ParamArc::basis(5, Rational::one())),
        ("center direction, slope 2", ParamArc::center_direction(case, Rational::integer(2))),
        (
            "lambda = (eps, -eps, eps^2, 0, 0, 0)",
            ParamArc::from_coefficients(&[
                vec![q(1, 1)],
                vec![q(-1, 1)],
                vec![q(0, 1), q(1, 1)],
                vec![],
                vec![],
                vec![],
            ])?,
        ),
    ];
    for (label, arc) in &arcs {
        let out = melnikov(arc, case, DEFAULT_MAX_ORDER)?;
        match out.result() {
            Some(r) => println!("{label}: order {}, M = ({}) I_2 + ({}) I_0", r.order, r.p, r.q),
            None => println!("{label}: all Melnikov functions vanish through order {DEFAULT_MAX_ORDER}"),
        }
    }
    Ok(())
}
