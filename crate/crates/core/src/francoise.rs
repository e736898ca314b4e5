//! Higher-order Melnikov functions along a parameter arc by the Françoise recursion.
//!
//! With `omega_k` the order-`k` part of the perturbation, `Omega_1 = omega_1` and
//! `Omega_{k+1} = omega_{k+1} + sum_{i+j=k+1} r_j omega_i`, where `r_j` comes from the
//! relatively exact decomposition of `Omega_j`. The first `Omega_n` whose `(u, v)` part is
//! nonzero gives `M_n = u(h) I_2 + v(h) I_0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{q, MultiPoly, PolyU, PolyXY, Rational, Var};
use crate::forms::{
    perturbation_form, AnnulusCase, CanonicalDecomposition, OneForm, PivotOrder, ReduceError,
    Reducer,
};

pub const DEFAULT_MAX_ORDER: u32 = 9;

#[derive(Debug, Error)]
pub enum ArcError {
    #[error("expected 6 parameter series, got {0}")]
    WrongArity(usize),
    #[error("lambda_{0} does not vanish at eps = 0")]
    NonzeroAtOrigin(usize),
    #[error("series must be in eps, got {0:?}")]
    WrongVariable(Var),
}

/// Six truncated series `lambda_j(eps) = sum_k lambda_jk eps^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamArc {
    series: [PolyU; 6],
}

impl ParamArc {
    pub fn new(series: [PolyU; 6]) -> Result<Self, ArcError> {
        for (j, s) in series.iter().enumerate() {
            if s.var() != Var::Epsilon {
                return Err(ArcError::WrongVariable(s.var()));
            }
            if !s.coeff(0).is_zero() {
                return Err(ArcError::NonzeroAtOrigin(j + 1));
            }
        }
        Ok(ParamArc { series })
    }

    pub fn zero() -> Self {
        ParamArc {
            series: std::array::from_fn(|_| PolyU::zero(Var::Epsilon)),
        }
    }

    /// `coeffs[j][k-1] = lambda_{j+1, k}`; the constant terms are implicitly zero.
    pub fn from_coefficients(coeffs: &[Vec<Rational>]) -> Result<Self, ArcError> {
        if coeffs.len() != 6 {
            return Err(ArcError::WrongArity(coeffs.len()));
        }
        let series = std::array::from_fn(|j| {
            PolyU::from_coeffs(
                Var::Epsilon,
                std::iter::once(Rational::zero()).chain(coeffs[j].iter().cloned()),
            )
        });
        Ok(ParamArc { series })
    }

    /// `lambda_j = c * eps` for `j` in `1..=6`, all others zero.
    pub fn basis(j: usize, c: Rational) -> Self {
        let mut arc = Self::zero();
        arc.series[j - 1] = PolyU::monomial(Var::Epsilon, c, 1);
        arc
    }

    /// Linear arc through the center direction of `case` with slope `c`:
    /// `lambda_3 = c eps`, `lambda_2 = -3a c eps`, `lambda_4 = -3b c eps`.
    pub fn center_direction(case: AnnulusCase, c: Rational) -> Self {
        let mut arc = Self::zero();
        let three = Rational::integer(3);
        arc.series[1] = PolyU::monomial(Var::Epsilon, -(&three * &case.a() * &c), 1);
        arc.series[2] = PolyU::monomial(Var::Epsilon, c.clone(), 1);
        arc.series[3] = PolyU::monomial(Var::Epsilon, -(&three * &case.b() * &c), 1);
        arc
    }

    pub fn series(&self) -> &[PolyU; 6] {
        &self.series
    }

    /// `lambda_{j,k}` with `j` in `1..=6`.
    pub fn coeff(&self, j: usize, k: u32) -> Rational {
        self.series[j - 1].coeff(k)
    }

    /// Highest `k` with a nonzero `lambda_{j,k}`, or 0 for the zero arc.
    pub fn truncation_order(&self) -> u32 {
        self.series.iter().filter_map(PolyU::degree).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.series.iter().all(PolyU::is_zero)
    }

    /// Coefficient vector `(lambda_{1k}, ..., lambda_{6k})`.
    pub fn order_coeffs(&self, k: u32) -> [Rational; 6] {
        std::array::from_fn(|j| self.series[j].coeff(k))
    }

    /// The order-`k` form `omega_k`.
    pub fn omega(&self, k: u32) -> OneForm {
        perturbation_form(&self.order_coeffs(k))
    }

    pub fn to_json(&self) -> ArcJson {
        let k = self.truncation_order().max(1);
        ArcJson {
            lambda: self
                .series
                .iter()
                .map(|s| (1..=k).map(|d| s.coeff(d)).collect())
                .collect(),
        }
    }
}

/// Serialized arc: `{"lambda": [[l11, l12, ...], ..., [l61, ...]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArcJson {
    pub lambda: Vec<Vec<Rational>>,
}

impl TryFrom<ArcJson> for ParamArc {
    type Error = ArcError;

    fn try_from(value: ArcJson) -> Result<Self, Self::Error> {
        ParamArc::from_coefficients(&value.lambda)
    }
}

/// One vanishing order of the recursion: `(u_k, v_k) = (0, 0)` and the certificate `r_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrailStep {
    pub order: u32,
    pub r: PolyXY,
    pub big_r: PolyXY,
}

/// First nonvanishing Melnikov function `M_n = p(h) I_2 + q(h) I_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MelnikovResult {
    pub order: u32,
    pub p: PolyU,
    pub q: PolyU,
    pub trail: Vec<TrailStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MelnikovOutcome {
    Nonzero(MelnikovResult),
    /// `M_1, ..., M_N` all vanish identically.
    AllVanish {
        max_order: u32,
        arc_is_zero: bool,
        trail: Vec<TrailStep>,
    },
}

impl MelnikovOutcome {
    pub fn order(&self) -> Option<u32> {
        match self {
            MelnikovOutcome::Nonzero(r) => Some(r.order),
            MelnikovOutcome::AllVanish { .. } => None,
        }
    }

    pub fn result(&self) -> Option<&MelnikovResult> {
        match self {
            MelnikovOutcome::Nonzero(r) => Some(r),
            MelnikovOutcome::AllVanish { .. } => None,
        }
    }

    pub fn into_result(self) -> Option<MelnikovResult> {
        match self {
            MelnikovOutcome::Nonzero(r) => Some(r),
            MelnikovOutcome::AllVanish { .. } => None,
        }
    }
}

pub fn melnikov(
    arc: &ParamArc,
    case: AnnulusCase,
    max_order: u32,
) -> Result<MelnikovOutcome, ReduceError> {
    melnikov_with(&mut Reducer::new(case), arc, max_order)
}

pub fn melnikov_with_order(
    arc: &ParamArc,
    case: AnnulusCase,
    max_order: u32,
    order: PivotOrder,
) -> Result<MelnikovOutcome, ReduceError> {
    melnikov_with(&mut Reducer::new(case).with_pivot_order(order), arc, max_order)
}

pub fn melnikov_with(
    reducer: &mut Reducer,
    arc: &ParamArc,
    max_order: u32,
) -> Result<MelnikovOutcome, ReduceError> {
    assert!(max_order >= 1, "max_order must be at least 1");
    let omegas: Vec<OneForm> = (0..=max_order).map(|k| arc.omega(k)).collect();
    let mut rs: Vec<PolyXY> = vec![PolyXY::zero()];
    let mut trail = Vec::new();

    for k in 1..=max_order {
        let mut big_omega = omegas[k as usize].clone();
        for j in 1..k {
            let i = (k - j) as usize;
            if rs[j as usize].is_zero() || omegas[i].is_zero() {
                continue;
            }
            big_omega = big_omega.add(&omegas[i].mul_fn(&rs[j as usize]));
        }
        let d = reducer.reduce(&big_omega, None)?;
        if !d.is_relatively_exact() {
            return Ok(MelnikovOutcome::Nonzero(MelnikovResult {
                order: k,
                p: d.u.relabel(Var::Level),
                q: d.v.relabel(Var::Level),
                trail,
            }));
        }
        trail.push(TrailStep {
            order: k,
            r: d.r.clone(),
            big_r: d.big_r,
        });
        rs.push(d.r);
    }
    Ok(MelnikovOutcome::AllVanish {
        max_order,
        arc_is_zero: arc.is_zero(),
        trail,
    })
}

/// `M_1` for symbolic `lambda`: `(p_j, q_j)` for each basis form `omega = e_j`.
pub fn first_order_basis(case: AnnulusCase) -> Result<[(PolyU, PolyU); 6], ReduceError> {
    let mut reducer = Reducer::new(case);
    let mut out: [(PolyU, PolyU); 6] =
        std::array::from_fn(|_| (PolyU::zero(Var::Level), PolyU::zero(Var::Level)));
    for (j, slot) in out.iter_mut().enumerate() {
        let mut e: [Rational; 6] = std::array::from_fn(|_| Rational::zero());
        e[j] = Rational::one();
        let d = reducer.reduce(&perturbation_form(&e), None)?;
        *slot = (d.u.relabel(Var::Level), d.v.relabel(Var::Level));
    }
    Ok(out)
}

/// Linear forms in `lambda_{.1}` whose joint vanishing is equivalent to `M_1 = 0`.
///
/// Derived from the symbolic `M_1`: each `h^d` coefficient of `p` and `q` is a linear
/// form, and the span is returned in reduced echelon form with `lambda_3` eliminated last.
pub fn center_conditions_order1(case: AnnulusCase) -> Result<Vec<MultiPoly>, ReduceError> {
    let basis = first_order_basis(case)?;
    let max_deg = basis
        .iter()
        .flat_map(|(p, q)| [p.degree(), q.degree()])
        .flatten()
        .max()
        .unwrap_or(0);
    let mut forms: Vec<[Rational; 6]> = Vec::new();
    for d in 0..=max_deg {
        forms.push(std::array::from_fn(|j| basis[j].0.coeff(d)));
        forms.push(std::array::from_fn(|j| basis[j].1.coeff(d)));
    }
    // lambda_3 is the free direction of the center set, so it goes last
    const COLS: [usize; 6] = [0, 1, 3, 4, 5, 2];
    Ok(row_reduce(forms, &COLS)
        .into_iter()
        .map(|row| MultiPoly::linear(&row))
        .collect())
}

fn row_reduce(mut rows: Vec<[Rational; 6]>, cols: &[usize; 6]) -> Vec<[Rational; 6]> {
    let mut rank = 0;
    for &c in cols {
        let Some(p) = (rank..rows.len()).find(|r| !rows[*r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][c].recip().expect("nonzero pivot");
        for v in rows[rank].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    *v -= &(pv * &f);
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

/// The factor `r_k` of a product `r_k omega_j` in the center-direction calculus.
#[derive(Clone, Debug)]
pub enum KSpec {
    /// `r_k = -3 x y lambda_{3k}`.
    PureXy(Rational),
    /// `r_k = Lambda_k Q - 3 x y lambda_{3k}` with `Q` the case quadratic.
    Full { big_lambda: Rational, xy: Rational },
}

/// `8x^2y^2 - 4Hx^2 + s1 x^2 + s2 y^2`, the dH-coefficient of the product of two
/// center-direction forms (up to an exact form).
pub fn center_quadratic(case: AnnulusCase) -> PolyXY {
    let (s1, s2) = quadratic_signs(case);
    let h = case.hamiltonian();
    PolyXY::from_terms([(q(8, 1), 2, 2), (s1, 2, 0), (s2, 0, 2)])
        - h.poly().shift(2, 0).scale(&q(4, 1))
}

fn quadratic_signs(case: AnnulusCase) -> (Rational, Rational) {
    match case {
        AnnulusCase::GlobalCenter => (q(-1, 1), q(-1, 1)),
        AnnulusCase::TruncatedPendulum => (q(1, 1), q(1, 1)),
        AnnulusCase::EightInterior | AnnulusCase::EightExterior => (q(-1, 1), q(1, 1)),
    }
}

/// `-32/5 x^2y^5 + 8H x^2y^3 + s x^2y^3 + t y^5`, the dx-part surviving in a full product.
pub fn center_product_dx_part(case: AnnulusCase) -> OneForm {
    let (s, t) = match case {
        AnnulusCase::GlobalCenter => (q(2, 1), q(-2, 5)),
        AnnulusCase::TruncatedPendulum => (q(-2, 1), q(2, 5)),
        AnnulusCase::EightInterior | AnnulusCase::EightExterior => (q(2, 1), q(2, 5)),
    };
    let h = case.hamiltonian();
    let p = PolyXY::from_terms([(q(-32, 5), 2, 5), (s, 2, 3), (t, 0, 5)])
        + h.poly().shift(2, 3).scale(&q(8, 1));
    OneForm::new(p, PolyXY::zero())
}

/// `omega_j = lambda_{3j} [-3xy dH + d(xy^3)]` for `case`.
pub fn center_form(case: AnnulusCase, lambda3: &Rational) -> OneForm {
    let three = q(3, 1);
    perturbation_form(&[
        Rational::zero(),
        -(&three * &case.a() * lambda3),
        lambda3.clone(),
        -(&three * &case.b() * lambda3),
        Rational::zero(),
        Rational::zero(),
    ])
}

pub fn product_factor(case: AnnulusCase, k: &KSpec) -> PolyXY {
    let xy = PolyXY::monomial(Rational::one(), 1, 1);
    match k {
        KSpec::PureXy(l3k) => xy.scale(&(q(-3, 1) * l3k)),
        KSpec::Full { big_lambda, xy: l3k } => {
            center_quadratic(case).scale(big_lambda) + xy.scale(&(q(-3, 1) * l3k))
        }
    }
}

/// Reduces the product `r_k omega_j` along the center direction.
pub fn center_product(
    j_coeff: &Rational,
    k: &KSpec,
    case: AnnulusCase,
) -> Result<CanonicalDecomposition, ReduceError> {
    let product = center_form(case, j_coeff).mul_fn(&product_factor(case, k));
    Reducer::new(case).reduce(&product, None)
}

/// Predicted `(u, v)` for `r_k omega_j`: zero for the pure case, the reduction of
/// `lambda_{3j} Lambda_k` times the dx-part otherwise.
pub fn center_product_expected(
    j_coeff: &Rational,
    k: &KSpec,
    case: AnnulusCase,
) -> Result<(PolyU, PolyU), ReduceError> {
    match k {
        KSpec::PureXy(_) => Ok((PolyU::zero(Var::Hamiltonian), PolyU::zero(Var::Hamiltonian))),
        KSpec::Full { big_lambda, .. } => {
            let form = center_product_dx_part(case).scale(&(j_coeff * big_lambda));
            let d = Reducer::new(case).reduce(&form, None)?;
            Ok((d.u, d.v))
        }
    }
}

/// The cubic pair `(p, q)` of `M_3` for unit slope along the center direction.
pub fn cubic_coefficients(case: AnnulusCase) -> (PolyU, PolyU) {
    let c = |n: i64| q(n, 1001);
    let (p, qq) = match case {
        AnnulusCase::GlobalCenter => ([-24 * 8, -181 * 8, -308 * 8], [0, 12 * 8, 80 * 8]),
        AnnulusCase::TruncatedPendulum => ([-24 * 8, 181 * 8, -308 * 8], [0, 12 * 8, -80 * 8]),
        AnnulusCase::EightInterior | AnnulusCase::EightExterior => {
            ([-24 * 8, -181 * 8, -308 * 8], [0, -12 * 8, -80 * 8])
        }
    };
    (
        PolyU::from_coeffs(Var::Level, p.map(c)),
        PolyU::from_coeffs(Var::Level, qq.map(c)),
    )
}

/// Small random rational `n/d` with `|n| <= 5`, `1 <= d <= 4`.
pub fn small_rational<R: rand::Rng>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

/// Random arc mixing generic orders with center-direction orders and leading zero orders.
///
/// Generic arcs almost always stop at order 1; the center-direction blocks steer the
/// recursion into the higher orders, up to `3 * (shift + 1)`.
pub fn random_arc<R: rand::Rng>(case: AnnulusCase, rng: &mut R) -> ParamArc {
    let shift = [0u32, 0, 0, 1, 1, 2][rng.gen_range(0..6)];
    let depth = shift + 3;
    let mut coeffs: Vec<Vec<Rational>> = vec![vec![Rational::zero(); depth as usize]; 6];
    for k in shift + 1..=depth {
        let slot = (k - 1) as usize;
        match rng.gen_range(0..10) {
            0..=4 => {
                let mut c = small_rational(rng);
                while c.is_zero() {
                    c = small_rational(rng);
                }
                let three = Rational::integer(3);
                coeffs[1][slot] = -(&three * &case.a() * &c);
                coeffs[3][slot] = -(&three * &case.b() * &c);
                coeffs[2][slot] = c;
            }
            5..=8 => {
                for row in coeffs.iter_mut() {
                    if rng.gen_bool(0.6) {
                        row[slot] = small_rational(rng);
                    }
                }
            }
            _ => {}
        }
    }
    ParamArc::from_coefficients(&coeffs).expect("six rows")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(coeffs: &[Rational]) -> PolyU {
        PolyU::from_coeffs(Var::Level, coeffs.iter().cloned())
    }

    #[test]
    fn lambda6_global_center() {
        let out = melnikov(&ParamArc::basis(6, q(1, 1)), AnnulusCase::GlobalCenter, 9).unwrap();
        let r = out.result().unwrap();
        assert_eq!(r.order, 1);
        assert_eq!(r.p, h(&[q(32, 21), q(4, 3)]));
        assert_eq!(r.q, h(&[q(0, 1), q(-16, 21)]));
    }

    #[test]
    fn lambda5_eight_loop() {
        let out = melnikov(&ParamArc::basis(5, q(1, 1)), AnnulusCase::EightExterior, 9).unwrap();
        let r = out.result().unwrap();
        assert_eq!(r.p, h(&[q(40, 231), q(320, 231)]));
        assert_eq!(r.q, h(&[q(0, 1), q(20, 231), q(240, 77)]));
    }

    #[test]
    fn zero_arc_vanishes() {
        let out = melnikov(&ParamArc::zero(), AnnulusCase::GlobalCenter, 4).unwrap();
        assert!(matches!(out, MelnikovOutcome::AllVanish { arc_is_zero: true, .. }));
    }

    #[test]
    fn cubic_global_center() {
        let arc = ParamArc::center_direction(AnnulusCase::GlobalCenter, q(1, 1));
        let r = melnikov(&arc, AnnulusCase::GlobalCenter, 9).unwrap().into_result().unwrap();
        assert_eq!(r.order, 3);
        assert_eq!((r.p, r.q), cubic_coefficients(AnnulusCase::GlobalCenter));
        assert_eq!(r.trail.len(), 2);
    }

    fn lin(c: [i64; 6]) -> MultiPoly {
        MultiPoly::linear(&c.map(|n| q(n, 1)))
    }

    #[test]
    fn center_conditions_per_case() {
        let gc = [lin([1, 0, 0, 0, 0, 0]), lin([0, 1, 3, 0, 0, 0]), lin([0, 0, 3, 1, 0, 0]),
                  lin([0, 0, 0, 0, 1, 0]), lin([0, 0, 0, 0, 0, 1])];
        assert_eq!(center_conditions_order1(AnnulusCase::GlobalCenter).unwrap(), gc);
        let tp = center_conditions_order1(AnnulusCase::TruncatedPendulum).unwrap();
        assert_eq!(tp[1], lin([0, 1, 3, 0, 0, 0]));
        assert_eq!(tp[2], lin([0, 0, -3, 1, 0, 0]));
        let el = center_conditions_order1(AnnulusCase::EightExterior).unwrap();
        assert_eq!(el[1], lin([0, 1, -3, 0, 0, 0]));
        assert_eq!(el[2], lin([0, 0, 3, 1, 0, 0]));
        assert_eq!(el.len(), 5);
    }

    #[test]
    fn center_form_shape() {
        // -3xy dH + d(xy^3) in every case
        for case in AnnulusCase::HAMILTONIANS {
            let ham = case.hamiltonian();
            let xy = PolyXY::monomial(q(1, 1), 1, 1);
            let xy3 = PolyXY::monomial(q(1, 1), 1, 3);
            let expect = ham
                .differential()
                .mul_fn(&xy.scale(&q(-3, 1)))
                .add(&crate::forms::exterior_derivative(&xy3));
            assert_eq!(center_form(case, &q(1, 1)), expect);
        }
    }

    #[test]
    fn random_arcs_respect_shape_and_pivot_independence() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for case in AnnulusCase::HAMILTONIANS {
            for _ in 0..20 {
                let arc = random_arc(case, &mut rng);
                let a = melnikov(&arc, case, 9).unwrap();
                let b = melnikov_with_order(&arc, case, 9, PivotOrder::ReverseGradedLex).unwrap();
                assert_eq!(a.order(), b.order());
                if let (Some(x), Some(y)) = (a.result(), b.result()) {
                    assert_eq!((&x.p, &x.q), (&y.p, &y.q));
                    let bound = if x.order % 3 == 0 { 2 } else { 1 };
                    assert!(x.p.degree().is_none_or(|d| d <= bound));
                    assert!(x.q.degree().is_none_or(|d| d <= 2));
                }
            }
        }
    }

    #[test]
    fn arc_rejects_constant_term() {
        let mut s: [PolyU; 6] = std::array::from_fn(|_| PolyU::zero(Var::Epsilon));
        s[0] = PolyU::constant(Var::Epsilon, q(1, 1));
        assert!(matches!(ParamArc::new(s), Err(ArcError::NonzeroAtOrigin(1))));
    }
}
