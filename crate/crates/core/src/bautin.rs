//! Bautin ideal generators, arc-order prediction, truncated Nakayama certificates and the
//! `(a, b)` rescaling of the parameters.

use thiserror::Error;

use crate::exactalg::{q, Monomial, MultiPoly, Rational};
use crate::forms::AnnulusCase;
use crate::francoise::ParamArc;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BautinError {
    #[error("degenerate Hamiltonian: a*b = 0")]
    Degenerate,
    #[error("saddle-only system, no limit cycles (a < 0 and b < 0)")]
    SaddleOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealGenerators {
    pub generators: Vec<MultiPoly>,
}

impl IdealGenerators {
    /// Values of the generators at a numeric parameter point.
    pub fn eval(&self, lambda: &[Rational; 6]) -> Vec<Rational> {
        self.generators.iter().map(|g| g.eval(lambda)).collect()
    }

    pub fn vanish_at(&self, lambda: &[Rational; 6]) -> bool {
        self.eval(lambda).iter().all(Rational::is_zero)
    }
}

/// `(l1, l2 + 3a l3, l3^3, l4 + 3b l3, l5, l6)`.
pub fn bautin_generators(a: &Rational, b: &Rational) -> Result<IdealGenerators, BautinError> {
    if a.is_zero() || b.is_zero() {
        return Err(BautinError::Degenerate);
    }
    if a.is_negative() && b.is_negative() {
        return Err(BautinError::SaddleOnly);
    }
    let three = q(3, 1);
    let z = Rational::zero;
    let one = Rational::one;
    let l3_cubed = MultiPoly::term(one(), Monomial::new(vec![0, 0, 3, 0, 0, 0]));
    Ok(IdealGenerators {
        generators: vec![
            MultiPoly::linear(&[one(), z(), z(), z(), z(), z()]),
            MultiPoly::linear(&[z(), one(), &three * a, z(), z(), z()]),
            l3_cubed,
            MultiPoly::linear(&[z(), z(), &three * b, one(), z(), z()]),
            MultiPoly::linear(&[z(), z(), z(), z(), one(), z()]),
            MultiPoly::linear(&[z(), z(), z(), z(), z(), one()]),
        ],
    })
}

pub fn case_generators(case: AnnulusCase) -> IdealGenerators {
    bautin_generators(&case.a(), &case.b()).expect("annulus cases are nondegenerate")
}

/// Valuation data of the generators along an arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderPrediction {
    /// `min_i ord_eps b_i(lambda(eps))`, `None` if every generator vanishes identically.
    pub order: Option<u32>,
    /// Coefficient of `eps^order` in each `b_i(lambda(eps))`.
    pub leading: Vec<Rational>,
}

pub fn predict(arc: &ParamArc, case: AnnulusCase) -> OrderPrediction {
    let gens = case_generators(case);
    let cap = 3 * arc.truncation_order().max(1);
    let composed: Vec<_> = gens
        .generators
        .iter()
        .map(|g| g.compose_series(arc.series(), cap).expect("series share eps"))
        .collect();
    let order = composed.iter().filter_map(|s| s.valuation()).min();
    let leading = composed
        .iter()
        .map(|s| order.map_or_else(Rational::zero, |n| s.coeff(n)))
        .collect();
    OrderPrediction { order, leading }
}

pub fn predict_order(arc: &ParamArc, case: AnnulusCase) -> Option<u32> {
    predict(arc, case).order
}

/// `b^0 = C b` with `C = (I + A)^{-1}` truncated at total degree `truncation_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NakayamaCertificate {
    /// `A` with `b = (I + A) b^0`; every entry lies in the maximal ideal.
    pub a: Vec<Vec<MultiPoly>>,
    /// Entries `delta_ij + a~_ij` of the truncated inverse.
    pub matrix_entries: Vec<Vec<MultiPoly>>,
    pub truncation_degree: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NakayamaFailure {
    #[error("b and b0 have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("b_{index} - b0_{index} is not in the ideal of b0: remainder term {monomial}")]
    NotInIdeal { index: usize, monomial: String },
    #[error("coefficient a_{row},{col} has a nonzero constant term, so it is not in the maximal ideal")]
    NotInMaximalIdeal { row: usize, col: usize },
    #[error("certificate residual nonzero at degree {0}")]
    Residual(u32),
}

fn monomial_string(m: &Monomial) -> String {
    MultiPoly::term(Rational::one(), m.clone()).to_string()
}

pub fn nakayama_certify(
    b: &[MultiPoly],
    b0: &[MultiPoly],
    degree_cap: u32,
) -> Result<NakayamaCertificate, NakayamaFailure> {
    if b.len() != b0.len() {
        return Err(NakayamaFailure::LengthMismatch(b.len(), b0.len()));
    }
    let n = b.len();
    let nvars = b0.first().map_or(0, MultiPoly::nvars);
    let mut a = Vec::with_capacity(n);
    for (i, (bi, b0i)) in b.iter().zip(b0).enumerate() {
        let (quots, rem) = bi.sub(b0i).divide(b0);
        if let Some((m, _)) = rem.leading() {
            return Err(NakayamaFailure::NotInIdeal {
                index: i + 1,
                monomial: monomial_string(m),
            });
        }
        if let Some(j) = quots
            .iter()
            .position(|qj| !qj.coeff(&Monomial::one(nvars)).is_zero())
        {
            return Err(NakayamaFailure::NotInMaximalIdeal { row: i + 1, col: j + 1 });
        }
        a.push(quots);
    }

    // (I + A)^{-1} = sum_k (-A)^k; A has order >= 1 so the series stops at the cap
    let identity: Vec<Vec<MultiPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        MultiPoly::constant(nvars, Rational::one())
                    } else {
                        MultiPoly::zero(nvars)
                    }
                })
                .collect()
        })
        .collect();
    let neg_a: Vec<Vec<MultiPoly>> = a
        .iter()
        .map(|row| row.iter().map(|e| e.scale(&-Rational::one())).collect())
        .collect();
    let mut inverse = identity.clone();
    let mut power = identity;
    for _ in 0..degree_cap {
        power = mat_mul(&power, &neg_a, degree_cap);
        if power.iter().flatten().all(MultiPoly::is_zero) {
            break;
        }
        inverse = mat_add(&inverse, &power);
    }

    for (i, b0i) in b0.iter().enumerate() {
        let mut rebuilt = MultiPoly::zero(nvars);
        for (cij, bj) in inverse[i].iter().zip(b) {
            rebuilt = rebuilt.add(&cij.mul_truncated(bj, degree_cap));
        }
        let diff = rebuilt.sub(&b0i.truncate(degree_cap));
        if let Some(d) = diff.order() {
            return Err(NakayamaFailure::Residual(d));
        }
    }
    Ok(NakayamaCertificate {
        a,
        matrix_entries: inverse,
        truncation_degree: degree_cap,
    })
}

fn mat_mul(x: &[Vec<MultiPoly>], y: &[Vec<MultiPoly>], cap: u32) -> Vec<Vec<MultiPoly>> {
    let n = x.len();
    let nvars = x[0][0].nvars();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(MultiPoly::zero(nvars), |acc, k| {
                        acc.add(&x[i][k].mul_truncated(&y[k][j], cap))
                    })
                })
                .collect()
        })
        .collect()
}

fn mat_add(x: &[Vec<MultiPoly>], y: &[Vec<MultiPoly>]) -> Vec<Vec<MultiPoly>> {
    x.iter()
        .zip(y)
        .map(|(rx, ry)| rx.iter().zip(ry).map(|(p, q)| p.add(q)).collect())
        .collect()
}

/// Rescaled parameters with the common positive factor carried by its square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rescaled {
    pub lambda: [Rational; 6],
    /// `1 / (|a| b^6)`; the factor itself is its positive square root.
    pub factor_sq: Rational,
}

/// `(|b^3| l1, |a| b^2 l2, a^2 b^2 l3, a^2 |b| l4, a^4 |b| l5, |a|^3 l6)`.
pub fn rescale_lambdas(
    a: &Rational,
    b: &Rational,
    lambda: &[Rational; 6],
) -> Result<Rescaled, BautinError> {
    if a.is_zero() || b.is_zero() {
        return Err(BautinError::Degenerate);
    }
    let aa = a.abs();
    let ab = b.abs();
    let weights = [
        b.pow(3).abs(),
        &aa * &b.pow(2),
        a.pow(2) * b.pow(2),
        a.pow(2) * &ab,
        a.pow(4) * &ab,
        aa.pow(3),
    ];
    let factor_sq = (&aa * &b.pow(6)).recip().expect("nonzero");
    Ok(Rescaled {
        lambda: std::array::from_fn(|j| &weights[j] * &lambda[j]),
        factor_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{PolyU, Var};

    fn mono(c: i64, e: &[u32]) -> MultiPoly {
        MultiPoly::term(q(c, 1), Monomial::new(e.to_vec()))
    }

    fn worked_example() -> (Vec<MultiPoly>, Vec<MultiPoly>) {
        let b1 = mono(1, &[2, 0]).add(&mono(1, &[2, 2])).add(&mono(1, &[1, 3])).add(&mono(1, &[0, 4]));
        let b2 = mono(1, &[0, 3]).add(&mono(1, &[4, 0])).add(&mono(1, &[3, 1]));
        (vec![b1, b2], vec![mono(1, &[2, 0]), mono(1, &[0, 3])])
    }

    #[test]
    fn generators_per_sign() {
        let g = bautin_generators(&q(-1, 1), &q(1, 1)).unwrap();
        assert_eq!(g.generators[1], MultiPoly::linear(&[q(0, 1), q(1, 1), q(-3, 1), q(0, 1), q(0, 1), q(0, 1)]));
        assert_eq!(g.generators[2].to_string(), "l3^3");
        assert_eq!(bautin_generators(&q(-1, 1), &q(-1, 1)), Err(BautinError::SaddleOnly));
    }

    #[test]
    fn prediction_examples() {
        assert_eq!(predict_order(&ParamArc::basis(6, q(1, 1)), AnnulusCase::GlobalCenter), Some(1));
        let arc = ParamArc::center_direction(AnnulusCase::GlobalCenter, q(1, 1));
        assert_eq!(predict_order(&arc, AnnulusCase::GlobalCenter), Some(3));
        let mut s: [PolyU; 6] = std::array::from_fn(|_| PolyU::zero(Var::Epsilon));
        s[0] = PolyU::monomial(Var::Epsilon, q(1, 1), 2);
        assert_eq!(predict_order(&ParamArc::new(s).unwrap(), AnnulusCase::GlobalCenter), Some(2));
        assert_eq!(predict_order(&ParamArc::zero(), AnnulusCase::GlobalCenter), None);
    }

    #[test]
    fn worked_example_certifies() {
        let (b, b0) = worked_example();
        let cert = nakayama_certify(&b, &b0, 12).unwrap();
        assert_eq!(cert.truncation_degree, 12);
        assert!(cert.a.iter().flatten().all(|e| e.order().is_none_or(|d| d >= 1)));
    }

    #[test]
    fn identity_certificate() {
        let (_, b0) = worked_example();
        let cert = nakayama_certify(&b0, &b0, 6).unwrap();
        assert!(cert.a.iter().flatten().all(MultiPoly::is_zero));
    }

    #[test]
    fn constructed_violation() {
        let (_, b0) = worked_example();
        let b = vec![mono(1, &[2, 0]).add(&mono(1, &[0, 1])), mono(1, &[0, 3])];
        let err = nakayama_certify(&b, &b0, 6).unwrap_err();
        assert_eq!(err, NakayamaFailure::NotInIdeal { index: 1, monomial: "l2".into() });
    }

    #[test]
    fn rescaling() {
        let one: [Rational; 6] = std::array::from_fn(|_| q(1, 1));
        let r = rescale_lambdas(&q(1, 1), &q(1, 1), &one).unwrap();
        assert_eq!(r.lambda, one);
        let mut e6: [Rational; 6] = std::array::from_fn(|_| q(0, 1));
        e6[5] = q(1, 1);
        let r = rescale_lambdas(&q(4, 1), &q(1, 1), &e6).unwrap();
        assert_eq!(r.lambda[5], q(64, 1));
        assert_eq!(r.factor_sq, q(1, 4));
        let mut e2: [Rational; 6] = std::array::from_fn(|_| q(0, 1));
        e2[1] = q(1, 1);
        assert_eq!(rescale_lambdas(&q(1, 1), &q(-1, 1), &e2).unwrap().lambda[1], q(1, 1));
    }

    #[test]
    fn zero_locus_is_origin() {
        for case in AnnulusCase::HAMILTONIANS {
            let g = case_generators(case);
            let zero: [Rational; 6] = std::array::from_fn(|_| q(0, 1));
            assert!(g.vanish_at(&zero));
            // the center line kills every linear generator but not l3^3
            let mut l = zero.clone();
            l[2] = q(1, 1);
            l[1] = -(q(3, 1) * case.a());
            l[3] = -(q(3, 1) * case.b());
            let vals = g.eval(&l);
            assert!(vals.iter().enumerate().all(|(i, v)| (i == 2) != v.is_zero()));
        }
    }
}
