//! Polynomial one-forms and their canonical relative decomposition
//!
//! ```text
//! omega = (u(H) x^2 + v(H)) y dx + r dH + dR
//! ```
//!
//! with respect to the quartic Hamiltonian `H = y^2/2 + a x^2/2 + b x^4/4`. The pair
//! `(u, v)` is unique; integrating over an oval `H = h` gives `u(h) I2(h) + v(h) I0(h)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{PolyU, PolyXY, Rational, Solution, SparseSystem, Var};

/// One of the four period annuli of the unperturbed oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnnulusCase {
    GlobalCenter,
    TruncatedPendulum,
    EightInterior,
    EightExterior,
}

/// Open interval of energy levels; `None` as upper end means `+inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelInterval {
    pub lo: f64,
    pub hi: Option<f64>,
}

impl LevelInterval {
    pub fn contains(&self, h: f64) -> bool {
        h > self.lo && self.hi.is_none_or(|hi| h < hi)
    }
}

impl AnnulusCase {
    pub const ALL: [AnnulusCase; 4] = [
        AnnulusCase::GlobalCenter,
        AnnulusCase::TruncatedPendulum,
        AnnulusCase::EightInterior,
        AnnulusCase::EightExterior,
    ];

    /// One representative per Hamiltonian sign pattern.
    pub const HAMILTONIANS: [AnnulusCase; 3] = [
        AnnulusCase::GlobalCenter,
        AnnulusCase::TruncatedPendulum,
        AnnulusCase::EightExterior,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnnulusCase::GlobalCenter => "global-center",
            AnnulusCase::TruncatedPendulum => "truncated-pendulum",
            AnnulusCase::EightInterior => "eight-interior",
            AnnulusCase::EightExterior => "eight-exterior",
        }
    }

    pub fn a(self) -> Rational {
        match self {
            AnnulusCase::EightInterior | AnnulusCase::EightExterior => Rational::integer(-1),
            _ => Rational::one(),
        }
    }

    pub fn b(self) -> Rational {
        match self {
            AnnulusCase::TruncatedPendulum => Rational::integer(-1),
            _ => Rational::one(),
        }
    }

    pub fn a_f64(self) -> f64 {
        self.a().to_f64()
    }

    pub fn b_f64(self) -> f64 {
        self.b().to_f64()
    }

    pub fn hamiltonian(self) -> Hamiltonian {
        Hamiltonian::new(self.a(), self.b())
    }

    pub fn interval(self) -> LevelInterval {
        match self {
            AnnulusCase::GlobalCenter | AnnulusCase::EightExterior => LevelInterval { lo: 0.0, hi: None },
            AnnulusCase::TruncatedPendulum => LevelInterval {
                lo: 0.0,
                hi: Some(0.25),
            },
            AnnulusCase::EightInterior => LevelInterval {
                lo: -0.25,
                hi: Some(0.0),
            },
        }
    }

    /// Maximal number of zeros of a nonzero element of the span of `h^i I0, h^j I2`.
    pub fn zero_bound(self) -> usize {
        match self {
            AnnulusCase::EightExterior => 6,
            _ => 5,
        }
    }

    pub fn is_eight_loop(self) -> bool {
        matches!(self, AnnulusCase::EightInterior | AnnulusCase::EightExterior)
    }
}

impl fmt::Display for AnnulusCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown annulus case {0:?} (expected global-center, truncated-pendulum, eight-interior, eight-exterior)")]
pub struct UnknownCase(pub String);

impl FromStr for AnnulusCase {
    type Err = UnknownCase;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "global-center" => Ok(AnnulusCase::GlobalCenter),
            "truncated-pendulum" => Ok(AnnulusCase::TruncatedPendulum),
            "eight-interior" => Ok(AnnulusCase::EightInterior),
            // the algebra only depends on the Hamiltonian, so the bare name is accepted
            "eight-exterior" | "eight-loop" => Ok(AnnulusCase::EightExterior),
            other => Err(UnknownCase(other.to_string())),
        }
    }
}

/// `H = y^2/2 + a x^2/2 + b x^4/4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hamiltonian {
    a: Rational,
    b: Rational,
    poly: PolyXY,
}

impl Hamiltonian {
    pub fn new(a: Rational, b: Rational) -> Self {
        let poly = PolyXY::from_terms([
            (Rational::new(1, 2), 0, 2),
            (&a * Rational::new(1, 2), 2, 0),
            (&b * Rational::new(1, 4), 4, 0),
        ]);
        Hamiltonian { a, b, poly }
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn poly(&self) -> &PolyXY {
        &self.poly
    }

    pub fn differential(&self) -> OneForm {
        exterior_derivative(&self.poly)
    }

    /// Substitutes `H(x, y)` into a polynomial in `H`.
    pub fn compose(&self, u: &PolyU) -> PolyXY {
        u.compose(&self.poly)
            .expect("compose requires a polynomial in H")
    }
}

/// `P dx + Q dy` with exact polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct OneForm {
    pub p: PolyXY,
    pub q: PolyXY,
}

impl OneForm {
    pub fn new(p: PolyXY, q: PolyXY) -> Self {
        OneForm { p, q }
    }

    pub fn zero() -> Self {
        OneForm::default()
    }

    /// `c x^i y^j dx`.
    pub fn monomial_dx(c: Rational, i: u32, j: u32) -> Self {
        OneForm::new(PolyXY::monomial(c, i, j), PolyXY::zero())
    }

    /// `c x^i y^j dy`.
    pub fn monomial_dy(c: Rational, i: u32, j: u32) -> Self {
        OneForm::new(PolyXY::zero(), PolyXY::monomial(c, i, j))
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// Largest total degree among the two coefficients.
    pub fn degree(&self) -> Option<u32> {
        match (self.p.total_degree(), self.q.total_degree()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        OneForm::new(&self.p + &other.p, &self.q + &other.q)
    }

    pub fn sub(&self, other: &OneForm) -> OneForm {
        OneForm::new(&self.p - &other.p, &self.q - &other.q)
    }

    pub fn scale(&self, c: &Rational) -> OneForm {
        OneForm::new(self.p.scale(c), self.q.scale(c))
    }

    /// Multiplication by a function, `f * omega`.
    pub fn mul_fn(&self, f: &PolyXY) -> OneForm {
        OneForm::new(f * &self.p, f * &self.q)
    }

    /// `d omega = 0`; on the plane this is the same as exactness.
    pub fn is_closed(&self) -> bool {
        self.q.partial_x() == self.p.partial_y()
    }
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p.is_zero(), self.q.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "({}) dx", self.p),
            (true, false) => write!(f, "({}) dy", self.q),
            (false, false) => write!(f, "({}) dx + ({}) dy", self.p, self.q),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse one-form term {term:?}: {reason}")]
pub struct FormParseError {
    pub term: String,
    pub reason: &'static str,
}

impl FromStr for OneForm {
    type Err = FormParseError;

    /// Parses sums of monomial terms such as `"y^3 dx"`, `"-3/7 x^2*y dx + x y dy"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = OneForm::zero();
        let normalized = s.replace('-', " -").replace('+', " +");
        let mut term = String::new();
        let mut terms = Vec::new();
        for tok in normalized.split_whitespace() {
            term.push(' ');
            term.push_str(tok);
            if tok.ends_with("dx") || tok.ends_with("dy") {
                terms.push(std::mem::take(&mut term));
            }
        }
        if !term.trim().is_empty() {
            return Err(FormParseError {
                term: term.trim().to_string(),
                reason: "term must end in dx or dy",
            });
        }
        for t in terms {
            out = out.add(&parse_form_term(t.trim())?);
        }
        Ok(out)
    }
}

fn parse_form_term(t: &str) -> Result<OneForm, FormParseError> {
    let err = |reason| FormParseError {
        term: t.to_string(),
        reason,
    };
    let (body, is_dx) = if let Some(b) = t.strip_suffix("dx") {
        (b, true)
    } else if let Some(b) = t.strip_suffix("dy") {
        (b, false)
    } else {
        return Err(err("term must end in dx or dy"));
    };
    let mut coeff = Rational::one();
    let mut ex = 0u32;
    let mut ey = 0u32;
    let body = body.replace('*', " ");
    for tok in body.split_whitespace() {
        let tok = tok.trim_start_matches('+');
        let (neg, tok) = match tok.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, tok),
        };
        if neg {
            coeff = -coeff;
        }
        if tok.is_empty() {
            continue;
        }
        if let Some(rest) = tok.strip_prefix('x') {
            ex += parse_exponent(rest).ok_or_else(|| err("bad exponent on x"))?;
        } else if let Some(rest) = tok.strip_prefix('y') {
            ey += parse_exponent(rest).ok_or_else(|| err("bad exponent on y"))?;
        } else {
            let c: Rational = tok.parse().map_err(|_| err("bad coefficient"))?;
            coeff = coeff * c;
        }
    }
    Ok(if is_dx {
        OneForm::monomial_dx(coeff, ex, ey)
    } else {
        OneForm::monomial_dy(coeff, ex, ey)
    })
}

fn parse_exponent(rest: &str) -> Option<u32> {
    if rest.is_empty() {
        Some(1)
    } else {
        rest.strip_prefix('^')?.parse().ok()
    }
}

/// `df = f_x dx + f_y dy`.
pub fn exterior_derivative(f: &PolyXY) -> OneForm {
    OneForm::new(f.partial_x(), f.partial_y())
}

/// `(u(H) x^2 + v(H)) y dx + r dH + dR`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalDecomposition {
    pub u: PolyU,
    pub v: PolyU,
    pub r: PolyXY,
    pub big_r: PolyXY,
}

impl CanonicalDecomposition {
    pub fn zero() -> Self {
        CanonicalDecomposition {
            u: PolyU::zero(Var::Hamiltonian),
            v: PolyU::zero(Var::Hamiltonian),
            r: PolyXY::zero(),
            big_r: PolyXY::zero(),
        }
    }

    /// True when the form is relatively exact (its integral over every oval vanishes).
    pub fn is_relatively_exact(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// Rebuilds the one-form the decomposition describes.
    pub fn assemble(&self, ham: &Hamiltonian) -> OneForm {
        let envelope = &(&ham.compose(&self.u) * &PolyXY::monomial(Rational::one(), 2, 0))
            + &ham.compose(&self.v);
        let periodic = OneForm::new(envelope.shift(0, 1), PolyXY::zero());
        periodic
            .add(&ham.differential().mul_fn(&self.r))
            .add(&exterior_derivative(&self.big_r))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("degree bound exhausted: no decomposition with u, v of degree <= {uv_degree} and r, R of degree <= {rr_degree}")]
    DegreeBoundExhausted { uv_degree: u32, rr_degree: u32 },
}

/// Column order used for the unknown coefficients of `r` and `R`.
///
/// Only the representative `(r, R)` depends on it; `(u, v)` never does.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PivotOrder {
    #[default]
    GradedLex,
    ReverseGradedLex,
}

/// Reusable reduction engine for one Hamiltonian.
#[derive(Clone, Debug)]
pub struct Reducer {
    ham: Hamiltonian,
    order: PivotOrder,
    h_powers: Vec<PolyXY>,
}

fn grlex_monomials(max_deg: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for d in 0..=max_deg {
        // x^d is the largest monomial of degree d
        for i in 0..=d {
            out.push((i, d - i));
        }
    }
    out
}

impl Reducer {
    pub fn new(case: AnnulusCase) -> Self {
        Self::for_hamiltonian(case.hamiltonian())
    }

    pub fn for_hamiltonian(ham: Hamiltonian) -> Self {
        Reducer {
            ham,
            order: PivotOrder::GradedLex,
            h_powers: vec![PolyXY::constant(Rational::one())],
        }
    }

    pub fn with_pivot_order(mut self, order: PivotOrder) -> Self {
        self.order = order;
        self
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.ham
    }

    fn h_power(&mut self, k: usize) -> &PolyXY {
        while self.h_powers.len() <= k {
            let next = self.h_powers.last().unwrap() * self.ham.poly();
            self.h_powers.push(next);
        }
        &self.h_powers[k]
    }

    /// Reduces `omega` to canonical form, raising the degree bounds once if needed.
    pub fn reduce(
        &mut self,
        omega: &OneForm,
        degree_hint: Option<u32>,
    ) -> Result<CanonicalDecomposition, ReduceError> {
        let Some(deg) = degree_hint.or(omega.degree()) else {
            return Ok(CanonicalDecomposition::zero());
        };
        let uv = deg.div_ceil(4) + 1;
        let rr = deg + 2;
        if let Some(d) = self.try_reduce(omega, uv, rr) {
            return Ok(d);
        }
        self.try_reduce(omega, uv + 2, rr + 4)
            .ok_or(ReduceError::DegreeBoundExhausted {
                uv_degree: uv + 2,
                rr_degree: rr + 4,
            })
    }

    fn try_reduce(&mut self, omega: &OneForm, uv_deg: u32, rr_deg: u32) -> Option<CanonicalDecomposition> {
        let nuv = uv_deg as usize + 1;
        let mut rr_monos = grlex_monomials(rr_deg);
        let mut big_r_monos: Vec<(u32, u32)> = grlex_monomials(rr_deg)
            .into_iter()
            .filter(|m| *m != (0, 0))
            .collect();
        if self.order == PivotOrder::ReverseGradedLex {
            rr_monos.reverse();
            big_r_monos.reverse();
        }
        let r_base = 2 * nuv;
        let big_r_base = r_base + rr_monos.len();
        let ncols = big_r_base + big_r_monos.len();

        // equation keys: (component, i, j) with component 0 = dx, 1 = dy
        let mut rows: BTreeMap<(u8, u32, u32), BTreeMap<usize, Rational>> = BTreeMap::new();
        let mut put = |key: (u8, u32, u32), col: usize, c: Rational| {
            if c.is_zero() {
                return;
            }
            let row = rows.entry(key).or_default();
            let e = row.entry(col).or_insert_with(Rational::zero);
            *e += &c;
        };

        for k in 0..nuv {
            let hk = self.h_power(k).clone();
            for ((i, j), c) in hk.terms() {
                put((0, i + 2, j + 1), k, c.clone());
                put((0, i, j + 1), nuv + k, c.clone());
            }
        }
        let dh = self.ham.differential();
        for (n, &(i, j)) in rr_monos.iter().enumerate() {
            let col = r_base + n;
            for ((a, b), c) in dh.p.terms() {
                put((0, a + i, b + j), col, c.clone());
            }
            for ((a, b), c) in dh.q.terms() {
                put((1, a + i, b + j), col, c.clone());
            }
        }
        for (n, &(i, j)) in big_r_monos.iter().enumerate() {
            let col = big_r_base + n;
            if i > 0 {
                put((0, i - 1, j), col, Rational::integer(i as i64));
            }
            if j > 0 {
                put((1, i, j - 1), col, Rational::integer(j as i64));
            }
        }

        let mut rhs: BTreeMap<(u8, u32, u32), Rational> = BTreeMap::new();
        for ((i, j), c) in omega.p.terms() {
            rhs.insert((0, i, j), c.clone());
        }
        for ((i, j), c) in omega.q.terms() {
            rhs.insert((1, i, j), c.clone());
        }
        // a form term with no matching unknown makes the system inconsistent outright
        if rhs.keys().any(|k| !rows.contains_key(k)) {
            return None;
        }

        let mut sys = SparseSystem::new(ncols);
        for (key, row) in rows {
            let b = rhs.get(&key).cloned().unwrap_or_else(Rational::zero);
            sys.push_row(row, b);
        }
        let x = match sys.solve() {
            Solution::Inconsistent => return None,
            sol => sol.into_values()?,
        };

        let u = PolyU::from_coeffs(Var::Hamiltonian, x[..nuv].iter().cloned());
        let v = PolyU::from_coeffs(Var::Hamiltonian, x[nuv..2 * nuv].iter().cloned());
        let r = PolyXY::from_terms(
            rr_monos
                .iter()
                .zip(&x[r_base..big_r_base])
                .map(|(&(i, j), c)| (c.clone(), i, j)),
        );
        let big_r = PolyXY::from_terms(
            big_r_monos
                .iter()
                .zip(&x[big_r_base..])
                .map(|(&(i, j), c)| (c.clone(), i, j)),
        );
        let d = CanonicalDecomposition { u, v, r, big_r };
        debug_assert!(verify_with(&self.ham, omega, &d));
        Some(d)
    }
}

/// Canonical decomposition of `omega` for the Hamiltonian of `case`.
pub fn reduce(
    omega: &OneForm,
    case: AnnulusCase,
    degree_hint: Option<u32>,
) -> Result<CanonicalDecomposition, ReduceError> {
    Reducer::new(case).reduce(omega, degree_hint)
}

/// Exact check that `omega - (u(H)x^2 + v(H)) y dx - r dH - dR` vanishes.
pub fn verify_decomposition(omega: &OneForm, d: &CanonicalDecomposition, case: AnnulusCase) -> bool {
    verify_with(&case.hamiltonian(), omega, d)
}

fn verify_with(ham: &Hamiltonian, omega: &OneForm, d: &CanonicalDecomposition) -> bool {
    if d.u.var() != Var::Hamiltonian || d.v.var() != Var::Hamiltonian {
        return false;
    }
    omega.sub(&d.assemble(ham)).is_zero()
}

/// `(l1 + l2 x^2 + l3 y^2 + l4 x^4 + l5 y^4 + l6 x^6) y dx`.
pub fn perturbation_form(lambda: &[Rational; 6]) -> OneForm {
    const EXPONENTS: [(u32, u32); 6] = [(0, 1), (2, 1), (0, 3), (4, 1), (0, 5), (6, 1)];
    let p = PolyXY::from_terms(
        lambda
            .iter()
            .zip(EXPONENTS)
            .map(|(c, (i, j))| (c.clone(), i, j)),
    );
    OneForm::new(p, PolyXY::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::q;

    fn h_poly(coeffs: &[Rational]) -> PolyU {
        PolyU::from_coeffs(Var::Hamiltonian, coeffs.iter().cloned())
    }

    #[test]
    fn exterior_derivative_examples() {
        let f = PolyXY::monomial(q(1, 1), 1, 3);
        let df = exterior_derivative(&f);
        assert_eq!(df.p, PolyXY::monomial(q(1, 1), 0, 3));
        assert_eq!(df.q, PolyXY::monomial(q(3, 1), 1, 2));

        let dh = AnnulusCase::EightExterior.hamiltonian().differential();
        assert_eq!(dh.p, PolyXY::from_terms([(q(-1, 1), 1, 0), (q(1, 1), 3, 0)]));
        assert_eq!(dh.q, PolyXY::y());

        assert!(exterior_derivative(&PolyXY::constant(q(5, 3))).is_zero());
    }

    #[test]
    fn reduce_y3_global_center() {
        let omega = OneForm::monomial_dx(q(1, 1), 0, 3);
        let d = reduce(&omega, AnnulusCase::GlobalCenter, None).unwrap();
        assert_eq!(d.u, h_poly(&[q(-3, 7)]));
        assert_eq!(d.v, h_poly(&[q(0, 1), q(12, 7)]));
        assert!(verify_decomposition(&omega, &d, AnnulusCase::GlobalCenter));
    }

    #[test]
    fn reduce_x4y_global_center() {
        let omega = OneForm::monomial_dx(q(1, 1), 4, 1);
        let d = reduce(&omega, AnnulusCase::GlobalCenter, None).unwrap();
        assert_eq!(d.u, h_poly(&[q(-8, 7)]));
        assert_eq!(d.v, h_poly(&[q(0, 1), q(4, 7)]));
    }

    #[test]
    fn reduce_x2y5_eight_loop() {
        let omega = OneForm::monomial_dx(q(1, 1), 2, 5);
        let d = reduce(&omega, AnnulusCase::EightExterior, None).unwrap();
        assert_eq!(d.u, h_poly(&[q(160, 1001), q(3620, 3003), q(80, 39)]));
        assert_eq!(d.v, h_poly(&[q(0, 1), q(80, 1001), q(1600, 3003)]));
    }

    #[test]
    fn x2y2_is_relatively_exact() {
        let omega = OneForm::monomial_dx(q(1, 1), 2, 2);
        let d = reduce(&omega, AnnulusCase::GlobalCenter, None).unwrap();
        assert!(d.is_relatively_exact());
        assert!(verify_decomposition(&omega, &d, AnnulusCase::GlobalCenter));
    }

    #[test]
    fn zero_form_reduces_to_zero() {
        let d = reduce(&OneForm::zero(), AnnulusCase::TruncatedPendulum, None).unwrap();
        assert_eq!(d, CanonicalDecomposition::zero());
    }

    #[test]
    fn broken_identity_fails_verification() {
        let omega = OneForm::monomial_dx(q(1, 1), 0, 3);
        let mut d = reduce(&omega, AnnulusCase::GlobalCenter, None).unwrap();
        d.u = d.u.add(&h_poly(&[q(1, 1)])).unwrap();
        assert!(!verify_decomposition(&omega, &d, AnnulusCase::GlobalCenter));
    }

    #[test]
    fn perturbation_form_basis() {
        let mut e3: [Rational; 6] = std::array::from_fn(|_| q(0, 1));
        e3[2] = q(1, 1);
        assert_eq!(perturbation_form(&e3), OneForm::monomial_dx(q(1, 1), 0, 3));
        let mut e6: [Rational; 6] = std::array::from_fn(|_| q(0, 1));
        e6[5] = q(1, 1);
        assert_eq!(perturbation_form(&e6), OneForm::monomial_dx(q(1, 1), 6, 1));
        let ones: [Rational; 6] = std::array::from_fn(|_| q(1, 1));
        assert_eq!(perturbation_form(&ones).p.len(), 6);
    }

    #[test]
    fn parse_monomial_specs() {
        let f: OneForm = "y^3 dx".parse().unwrap();
        assert_eq!(f, OneForm::monomial_dx(q(1, 1), 0, 3));
        let g: OneForm = "-3/7 x^2*y dx + x y^2 dy".parse().unwrap();
        assert_eq!(
            g,
            OneForm::monomial_dx(q(-3, 7), 2, 1).add(&OneForm::monomial_dy(q(1, 1), 1, 2))
        );
        assert!("y^3".parse::<OneForm>().is_err());
    }

    #[test]
    fn case_metadata() {
        assert_eq!(AnnulusCase::EightExterior.zero_bound(), 6);
        assert_eq!(AnnulusCase::TruncatedPendulum.zero_bound(), 5);
        assert!(AnnulusCase::EightInterior.interval().contains(-0.1));
        assert!(!AnnulusCase::TruncatedPendulum.interval().contains(0.3));
        for c in AnnulusCase::ALL {
            assert_eq!(c.name().parse::<AnnulusCase>().unwrap(), c);
        }
    }
}
