//! Tabulated first-order Melnikov coefficients of the six basis arcs and the cubic
//! center-direction formula, checked against the reduction.

use serde::Serialize;

use crate::exactalg::{q, PolyU, Rational, Var};
use crate::forms::{AnnulusCase, ReduceError};
use crate::francoise::{cubic_coefficients, melnikov, ParamArc, DEFAULT_MAX_ORDER};

/// Tabulated `(p, q)` of `M_1` for the arc `lambda_j = eps`, lowest degree first.
#[derive(Clone, Debug)]
pub struct FirstOrderEntry {
    pub case: AnnulusCase,
    /// `j` in `1..=6`.
    pub lambda: usize,
    pub p: Vec<Rational>,
    pub q: Vec<Rational>,
}

fn entry(case: AnnulusCase, lambda: usize, p: &[(i64, i64)], qq: &[(i64, i64)]) -> FirstOrderEntry {
    let conv = |v: &[(i64, i64)]| v.iter().map(|&(n, d)| q(n, d)).collect();
    FirstOrderEntry {
        case,
        lambda,
        p: conv(p),
        q: conv(qq),
    }
}

/// The 18 rows: six basis arcs for each sign pattern of `(a, b)`.
pub fn first_order_table() -> Vec<FirstOrderEntry> {
    use AnnulusCase::*;
    let mut out = Vec::new();
    for case in [GlobalCenter, TruncatedPendulum, EightExterior] {
        out.push(entry(case, 1, &[], &[(1, 1)]));
        out.push(entry(case, 2, &[(1, 1)], &[]));
    }
    out.extend([
        entry(GlobalCenter, 3, &[(-3, 7)], &[(0, 1), (12, 7)]),
        entry(GlobalCenter, 4, &[(-8, 7)], &[(0, 1), (4, 7)]),
        entry(GlobalCenter, 5, &[(-40, 231), (-320, 231)], &[(0, 1), (20, 231), (240, 77)]),
        entry(GlobalCenter, 6, &[(32, 21), (4, 3)], &[(0, 1), (-16, 21)]),
        entry(TruncatedPendulum, 3, &[(-3, 7)], &[(0, 1), (12, 7)]),
        entry(TruncatedPendulum, 4, &[(8, 7)], &[(0, 1), (-4, 7)]),
        entry(TruncatedPendulum, 5, &[(40, 231), (-320, 231)], &[(0, 1), (-20, 231), (240, 77)]),
        entry(TruncatedPendulum, 6, &[(32, 21), (-4, 3)], &[(0, 1), (-16, 21)]),
        entry(EightExterior, 3, &[(3, 7)], &[(0, 1), (12, 7)]),
        entry(EightExterior, 4, &[(8, 7)], &[(0, 1), (4, 7)]),
        entry(EightExterior, 5, &[(40, 231), (320, 231)], &[(0, 1), (20, 231), (240, 77)]),
        entry(EightExterior, 6, &[(32, 21), (4, 3)], &[(0, 1), (16, 21)]),
    ]);
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremCheck {
    pub label: String,
    pub case: AnnulusCase,
    pub expected_order: u32,
    pub order: Option<u32>,
    pub coefficients_match: bool,
}

impl TheoremCheck {
    pub fn passed(&self) -> bool {
        self.order == Some(self.expected_order) && self.coefficients_match
    }
}

fn level_poly(c: &[Rational]) -> PolyU {
    PolyU::from_coeffs(Var::Level, c.iter().cloned())
}

fn check_arc(
    label: String,
    case: AnnulusCase,
    arc: &ParamArc,
    expected_order: u32,
    expected: (PolyU, PolyU),
) -> Result<TheoremCheck, ReduceError> {
    let out = melnikov(arc, case, DEFAULT_MAX_ORDER)?;
    let coefficients_match = out.result().is_some_and(|r| (r.p.clone(), r.q.clone()) == expected);
    Ok(TheoremCheck {
        label,
        case,
        expected_order,
        order: out.order(),
        coefficients_match,
    })
}

pub fn check_first_order() -> Result<Vec<TheoremCheck>, ReduceError> {
    first_order_table()
        .into_iter()
        .map(|e| {
            check_arc(
                format!("{}: lambda_{} = eps", e.case, e.lambda),
                e.case,
                &ParamArc::basis(e.lambda, Rational::one()),
                1,
                (level_poly(&e.p), level_poly(&e.q)),
            )
        })
        .collect()
}

/// Slopes used for the cubic check.
pub const CUBIC_SLOPES: [i64; 3] = [1, 2, -3];

/// Center-direction arcs with slope `c`: order 3 and `(p, q) = c^3 (p_3, q_3)`.
pub fn check_cubic() -> Result<Vec<TheoremCheck>, ReduceError> {
    let mut out = Vec::new();
    for case in AnnulusCase::HAMILTONIANS {
        let (p3, q3) = cubic_coefficients(case);
        for c in CUBIC_SLOPES {
            let c = Rational::integer(c);
            let c3 = c.pow(3);
            out.push(check_arc(
                format!("{case}: center direction, slope {c}"),
                case,
                &ParamArc::center_direction(case, c.clone()),
                3,
                (p3.scale(&c3), q3.scale(&c3)),
            )?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_rows_reproduce() {
        let checks = check_first_order().unwrap();
        assert_eq!(checks.len(), 18);
        for c in &checks {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn wrong_row_is_rejected() {
        let mut e = first_order_table().remove(8);
        e.q[2] = q(240, 71);
        let c = check_arc(
            "perturbed".into(),
            e.case,
            &ParamArc::basis(e.lambda, Rational::one()),
            1,
            (level_poly(&e.p), level_poly(&e.q)),
        )
        .unwrap();
        assert!(!c.passed());
    }

    #[test]
    fn cubic_arcs() {
        let checks = check_cubic().unwrap();
        assert_eq!(checks.len(), 9);
        for c in &checks {
            assert!(c.passed(), "{c:?}");
        }
    }
}
