use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{AlgebraError, Rational};

/// Variable carried by a univariate polynomial.
///
/// `Hamiltonian` is the function `H(x, y)` (substitutable by [`PolyU::compose`]),
/// `Level` is the energy value `h` on which periods depend, `Epsilon` the arc parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Var {
    Hamiltonian,
    Level,
    Epsilon,
}

impl Var {
    pub fn symbol(self) -> &'static str {
        match self {
            Var::Hamiltonian => "H",
            Var::Level => "h",
            Var::Epsilon => "eps",
        }
    }
}

/// Sparse univariate polynomial with exact coefficients. No zero coefficient is ever stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyU {
    var: Var,
    coeffs: BTreeMap<u32, Rational>,
}

impl PolyU {
    pub fn zero(var: Var) -> Self {
        PolyU {
            var,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(var: Var, c: Rational) -> Self {
        Self::monomial(var, c, 0)
    }

    pub fn monomial(var: Var, c: Rational, deg: u32) -> Self {
        let mut p = Self::zero(var);
        if !c.is_zero() {
            p.coeffs.insert(deg, c);
        }
        p
    }

    /// Coefficients listed from degree 0 upward.
    pub fn from_coeffs<I: IntoIterator<Item = Rational>>(var: Var, coeffs: I) -> Self {
        let mut p = Self::zero(var);
        for (k, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero() {
                p.coeffs.insert(k as u32, c);
            }
        }
        p
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// Same coefficients, different variable tag.
    pub fn relabel(&self, var: Var) -> Self {
        PolyU {
            var,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` encodes the degree of the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Lowest degree carrying a nonzero coefficient (`None` for zero).
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn coeff(&self, deg: u32) -> Rational {
        self.coeffs.get(&deg).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    /// Dense coefficient vector of length `max(len, degree + 1)`.
    pub fn dense(&self, len: usize) -> Vec<Rational> {
        let n = self.degree().map_or(0, |d| d as usize + 1).max(len);
        (0..n).map(|k| self.coeff(k as u32)).collect()
    }

    fn check(&self, other: &PolyU) -> Result<(), AlgebraError> {
        if self.var != other.var {
            return Err(AlgebraError::VariableMismatch {
                left: self.var,
                right: other.var,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyU) -> Result<PolyU, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_term(*k, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PolyU) -> Result<PolyU, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PolyU) -> Result<PolyU, AlgebraError> {
        self.check(other)?;
        let mut out = PolyU::zero(self.var);
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                out.add_term(i + j, &(a * b));
            }
        }
        Ok(out)
    }

    /// Product discarding every term of degree above `max_deg`.
    pub fn mul_truncated(&self, other: &PolyU, max_deg: u32) -> Result<PolyU, AlgebraError> {
        self.check(other)?;
        let mut out = PolyU::zero(self.var);
        for (i, a) in &self.coeffs {
            for (j, b) in other.coeffs.range(..=max_deg.saturating_sub(*i)) {
                if i + j <= max_deg {
                    out.add_term(i + j, &(a * b));
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> PolyU {
        if c.is_zero() {
            return PolyU::zero(self.var);
        }
        PolyU {
            var: self.var,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn neg(&self) -> PolyU {
        PolyU {
            var: self.var,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    pub fn truncate(&self, max_deg: u32) -> PolyU {
        PolyU {
            var: self.var,
            coeffs: self
                .coeffs
                .range(..=max_deg)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    pub fn derivative(&self) -> PolyU {
        let mut out = PolyU::zero(self.var);
        for (k, c) in &self.coeffs {
            if *k > 0 {
                out.add_term(k - 1, &(c * Rational::integer(*k as i64)));
            }
        }
        out
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let Some(deg) = self.degree() else {
            return Rational::zero();
        };
        let mut acc = Rational::zero();
        for k in (0..=deg).rev() {
            acc *= t;
            if let Some(c) = self.coeffs.get(&k) {
                acc += c;
            }
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let Some(deg) = self.degree() else {
            return 0.0;
        };
        let mut acc = 0.0;
        for k in (0..=deg).rev() {
            acc *= t;
            if let Some(c) = self.coeffs.get(&k) {
                acc += c.to_f64();
            }
        }
        acc
    }

    pub fn to_f64_coeffs(&self, len: usize) -> Vec<f64> {
        self.dense(len).iter().map(Rational::to_f64).collect()
    }

    /// Substitutes a bivariate polynomial for the Hamiltonian variable (Horner scheme).
    pub fn compose(&self, inner: &PolyXY) -> Result<PolyXY, AlgebraError> {
        if self.var != Var::Hamiltonian {
            return Err(AlgebraError::NotComposable(self.var));
        }
        let Some(deg) = self.degree() else {
            return Ok(PolyXY::zero());
        };
        let mut acc = PolyXY::zero();
        for k in (0..=deg).rev() {
            acc = &acc * inner;
            if let Some(c) = self.coeffs.get(&k) {
                acc.add_term(0, 0, c);
            }
        }
        Ok(acc)
    }

    pub(crate) fn add_term(&mut self, deg: u32, c: &Rational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&deg) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.coeffs.remove(&deg);
                }
            }
            None => {
                self.coeffs.insert(deg, c.clone());
            }
        }
    }
}

impl fmt::Debug for PolyU {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PolyU {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let v = self.var.symbol();
        let mut first = true;
        for (k, c) in self.coeffs.iter().rev() {
            write_signed_coeff(f, c, *k == 0, first)?;
            first = false;
            match k {
                0 => {}
                1 => write!(f, "{v}")?,
                _ => write!(f, "{v}^{k}")?,
            }
        }
        Ok(())
    }
}

fn write_signed_coeff(
    f: &mut fmt::Formatter<'_>,
    c: &Rational,
    is_constant: bool,
    first: bool,
) -> fmt::Result {
    let mag = c.abs();
    let sign = if c.is_negative() { "-" } else { "+" };
    if first {
        if c.is_negative() {
            write!(f, "-")?;
        }
    } else {
        write!(f, " {sign} ")?;
    }
    if is_constant || !mag.is_one() {
        write!(f, "{mag:?}")?;
        if !is_constant {
            write!(f, "*")?;
        }
    }
    Ok(())
}

/// Sparse polynomial in `x, y`, keyed by `(deg_x, deg_y)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyXY {
    coeffs: BTreeMap<(u32, u32), Rational>,
}

impl PolyXY {
    pub fn zero() -> Self {
        PolyXY::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Rational, i: u32, j: u32) -> Self {
        let mut p = PolyXY::zero();
        p.add_term(i, j, &c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (Rational, u32, u32)>>(terms: I) -> Self {
        let mut p = PolyXY::zero();
        for (c, i, j) in terms {
            p.add_term(i, j, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|(i, j)| i + j).max()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &Rational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn scale(&self, c: &Rational) -> PolyXY {
        if c.is_zero() {
            return PolyXY::zero();
        }
        PolyXY {
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Multiplies by `x^i y^j`.
    pub fn shift(&self, i: u32, j: u32) -> PolyXY {
        PolyXY {
            coeffs: self
                .coeffs
                .iter()
                .map(|((a, b), v)| ((a + i, b + j), v.clone()))
                .collect(),
        }
    }

    pub fn partial_x(&self) -> PolyXY {
        let mut out = PolyXY::zero();
        for ((i, j), c) in &self.coeffs {
            if *i > 0 {
                out.add_term(i - 1, *j, &(c * Rational::integer(*i as i64)));
            }
        }
        out
    }

    pub fn partial_y(&self) -> PolyXY {
        let mut out = PolyXY::zero();
        for ((i, j), c) in &self.coeffs {
            if *j > 0 {
                out.add_term(*i, j - 1, &(c * Rational::integer(*j as i64)));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> PolyXY {
        let mut acc = PolyXY::constant(Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        self.coeffs
            .iter()
            .map(|((i, j), c)| c * x.pow(*i) * y.pow(*j))
            .sum()
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|((i, j), c)| c.to_f64() * x.powi(*i as i32) * y.powi(*j as i32))
            .sum()
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: &Rational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&(i, j)) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.coeffs.remove(&(i, j));
                }
            }
            None => {
                self.coeffs.insert((i, j), c.clone());
            }
        }
    }

    /// `self += c * x^i y^j * other`, avoiding a temporary.
    pub fn add_scaled_shifted(&mut self, other: &PolyXY, c: &Rational, i: u32, j: u32) {
        if c.is_zero() {
            return;
        }
        for ((a, b), v) in &other.coeffs {
            self.add_term(a + i, b + j, &(v * c));
        }
    }
}

impl fmt::Debug for PolyXY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PolyXY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((i, j), c) in &self.coeffs {
            let constant = *i == 0 && *j == 0;
            write_signed_coeff(f, c, constant, first)?;
            first = false;
            let mut parts = Vec::new();
            match i {
                0 => {}
                1 => parts.push("x".to_string()),
                _ => parts.push(format!("x^{i}")),
            }
            match j {
                0 => {}
                1 => parts.push("y".to_string()),
                _ => parts.push(format!("y^{j}")),
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl Add<&PolyXY> for &PolyXY {
    type Output = PolyXY;
    fn add(self, rhs: &PolyXY) -> PolyXY {
        let mut out = self.clone();
        for ((i, j), c) in &rhs.coeffs {
            out.add_term(*i, *j, c);
        }
        out
    }
}

impl Add<PolyXY> for PolyXY {
    type Output = PolyXY;
    fn add(self, rhs: PolyXY) -> PolyXY {
        &self + &rhs
    }
}

impl Sub<&PolyXY> for &PolyXY {
    type Output = PolyXY;
    fn sub(self, rhs: &PolyXY) -> PolyXY {
        let mut out = self.clone();
        for ((i, j), c) in &rhs.coeffs {
            out.add_term(*i, *j, &-c);
        }
        out
    }
}

impl Sub<PolyXY> for PolyXY {
    type Output = PolyXY;
    fn sub(self, rhs: PolyXY) -> PolyXY {
        &self - &rhs
    }
}

impl Mul<&PolyXY> for &PolyXY {
    type Output = PolyXY;
    fn mul(self, rhs: &PolyXY) -> PolyXY {
        let mut out = PolyXY::zero();
        for ((i, j), a) in &self.coeffs {
            for ((k, l), b) in &rhs.coeffs {
                out.add_term(i + k, j + l, &(a * b));
            }
        }
        out
    }
}

impl Mul<PolyXY> for PolyXY {
    type Output = PolyXY;
    fn mul(self, rhs: PolyXY) -> PolyXY {
        &self * &rhs
    }
}

impl Neg for &PolyXY {
    type Output = PolyXY;
    fn neg(self) -> PolyXY {
        self.scale(&-Rational::one())
    }
}

impl Neg for PolyXY {
    type Output = PolyXY;
    fn neg(self) -> PolyXY {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::q;

    fn eight_loop_h() -> PolyXY {
        PolyXY::from_terms([(q(1, 2), 0, 2), (q(-1, 2), 2, 0), (q(1, 4), 4, 0)])
    }

    #[test]
    fn compose_square_of_hamiltonian() {
        let u = PolyU::monomial(Var::Hamiltonian, q(1, 1), 2);
        let composed = u.compose(&eight_loop_h()).unwrap();
        let h = eight_loop_h();
        assert_eq!(composed, &h * &h);
        // (1/2 y^2 - 1/2 x^2 + 1/4 x^4)^2 has the cross term -1/2 x^2 y^2
        assert_eq!(composed.coeff(2, 2), q(-1, 2));
        assert_eq!(composed.coeff(8, 0), q(1, 16));
        assert_eq!(composed.coeff(6, 0), q(-1, 4));
    }

    #[test]
    fn additive_inverse_cancels_to_zero() {
        let a = PolyXY::monomial(q(3, 7), 2, 1);
        let b = PolyXY::monomial(q(-3, 7), 2, 1);
        let s = &a + &b;
        assert!(s.is_zero());
        assert_eq!(s.total_degree(), None);
    }

    #[test]
    fn univariate_monomial_product() {
        let a = PolyU::monomial(Var::Hamiltonian, q(12, 7), 1);
        let b = PolyU::monomial(Var::Hamiltonian, q(1, 1), 1);
        let p = a.mul(&b).unwrap();
        assert_eq!(p, PolyU::monomial(Var::Hamiltonian, q(12, 7), 2));
    }

    #[test]
    fn variable_mismatch_is_an_error() {
        let a = PolyU::monomial(Var::Hamiltonian, q(1, 1), 1);
        let b = PolyU::monomial(Var::Level, q(1, 1), 1);
        assert!(matches!(
            a.add(&b),
            Err(AlgebraError::VariableMismatch { .. })
        ));
        assert!(PolyU::monomial(Var::Level, q(1, 1), 1)
            .compose(&PolyXY::x())
            .is_err());
    }

    #[test]
    fn zero_polynomial_degree_is_sentinel() {
        assert_eq!(PolyU::zero(Var::Level).degree(), None);
        assert_eq!(PolyU::constant(Var::Level, q(0, 1)).degree(), None);
        assert!(PolyU::from_coeffs(Var::Level, [q(0, 1), q(0, 1)]).is_zero());
    }

    #[test]
    fn truncated_multiplication_drops_high_terms() {
        let a = PolyU::from_coeffs(Var::Epsilon, [q(0, 1), q(1, 1), q(1, 1)]);
        let sq = a.mul_truncated(&a, 3).unwrap();
        assert_eq!(sq, PolyU::from_coeffs(Var::Epsilon, [q(0, 1), q(0, 1), q(1, 1), q(2, 1)]));
    }

    #[test]
    fn display_is_readable() {
        let p = PolyU::from_coeffs(Var::Level, [q(32, 21), q(4, 3)]);
        assert_eq!(p.to_string(), "4/3*h + 32/21");
        let r = PolyXY::from_terms([(q(-3, 1), 1, 1)]);
        assert_eq!(r.to_string(), "-3*x*y");
    }
}
