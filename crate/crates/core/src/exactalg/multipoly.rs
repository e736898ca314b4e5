use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::{AlgebraError, PolyU, Rational, Var};

/// Exponent vector ordered graded-lexicographically (total degree first, then lex).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over the rationals in variables `l1 .. ln`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::term(c, Monomial::one(nvars))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = Self::zero(m.0.len());
        p.add_term(m, &c);
        p
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        Self::term(Rational::one(), Monomial::var(nvars, k))
    }

    /// Linear form `sum coeffs[k] * l_{k+1}`.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, k), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Lowest total degree present (the order of vanishing at the origin).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.0.len(), self.nvars);
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.mul_truncated(other, u32::MAX)
    }

    /// Product keeping only terms of total degree `<= cap`.
    pub fn mul_truncated(&self, other: &MultiPoly, cap: u32) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if m1.degree() + m2.degree() <= cap {
                    out.add_term(m1.mul(m2), &(c1 * c2));
                }
            }
        }
        out
    }

    pub fn truncate(&self, cap: u32) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= cap)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(c.clone(), |acc, (e, v)| acc * v.pow(*e))
            })
            .sum()
    }

    /// Multivariate division with remainder by `divisors` under graded-lex order.
    ///
    /// Returns quotients `q_j` and remainder `r` with `self = sum q_j * divisors[j] + r`,
    /// where no term of `r` is divisible by a leading monomial of the divisors.
    pub fn divide(&self, divisors: &[MultiPoly]) -> (Vec<MultiPoly>, MultiPoly) {
        let mut quotients = vec![MultiPoly::zero(self.nvars); divisors.len()];
        let mut remainder = MultiPoly::zero(self.nvars);
        let mut p = self.clone();
        let leads: Vec<Option<(Monomial, Rational)>> = divisors
            .iter()
            .map(|d| d.leading().map(|(m, c)| (m.clone(), c.clone())))
            .collect();
        while let Some((lm, lc)) = p.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let hit = leads.iter().enumerate().find_map(|(j, l)| {
                l.as_ref()
                    .and_then(|(m, c)| lm.div(m).map(|quot| (j, quot, &lc / c)))
            });
            match hit {
                Some((j, quot, coef)) => {
                    let t = MultiPoly::term(coef, quot);
                    p = p.sub(&t.mul(&divisors[j]));
                    quotients[j] = quotients[j].add(&t);
                }
                None => {
                    p.terms.remove(&lm);
                    remainder.add_term(lm, &lc);
                }
            }
        }
        (quotients, remainder)
    }

    /// Substitutes one univariate series per variable and truncates at `eps^max_order`.
    pub fn compose_series(&self, series: &[PolyU], max_order: u32) -> Result<PolyU, AlgebraError> {
        assert_eq!(series.len(), self.nvars, "one series per variable");
        let var = series.first().map_or(Var::Epsilon, PolyU::var);
        let mut out = PolyU::zero(var);
        for (m, c) in &self.terms {
            let mut acc = PolyU::constant(var, c.clone());
            for (s, e) in series.iter().zip(&m.0) {
                for _ in 0..*e {
                    acc = acc.mul_truncated(s, max_order)?;
                }
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(i, e)| {
                    if *e == 1 {
                        format!("l{}", i + 1)
                    } else {
                        format!("l{}^{}", i + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag:?}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{:?}*{}", mag, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::q;

    fn mono(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn grlex_order() {
        assert!(mono(&[0, 3]) > mono(&[2, 0]));
        assert!(mono(&[1, 1]) < mono(&[2, 0]));
    }

    #[test]
    fn division_by_monomial_ideal() {
        // l1^2 + l1^2 l2^2 + l1 l2^3 + l2^4 = (1 + l2^2) l1^2 + (l1 + l2) l2^3
        let b1 = MultiPoly::zero(2)
            .add(&MultiPoly::term(q(1, 1), mono(&[2, 0])))
            .add(&MultiPoly::term(q(1, 1), mono(&[2, 2])))
            .add(&MultiPoly::term(q(1, 1), mono(&[1, 3])))
            .add(&MultiPoly::term(q(1, 1), mono(&[0, 4])));
        let gens = [
            MultiPoly::term(q(1, 1), mono(&[2, 0])),
            MultiPoly::term(q(1, 1), mono(&[0, 3])),
        ];
        let (quots, rem) = b1.divide(&gens);
        assert!(rem.is_zero());
        let rebuilt = quots[0].mul(&gens[0]).add(&quots[1].mul(&gens[1]));
        assert_eq!(rebuilt, b1);
    }

    #[test]
    fn remainder_keeps_non_member_terms() {
        let p = MultiPoly::term(q(1, 1), mono(&[2, 0])).add(&MultiPoly::var(2, 1));
        let gens = [
            MultiPoly::term(q(1, 1), mono(&[2, 0])),
            MultiPoly::term(q(1, 1), mono(&[0, 3])),
        ];
        let (_, rem) = p.divide(&gens);
        assert_eq!(rem, MultiPoly::var(2, 1));
    }

    #[test]
    fn compose_with_series() {
        // l1^3 with l1 = eps + eps^2 -> eps^3 + 3 eps^4 + ...
        let p = MultiPoly::term(q(1, 1), mono(&[3]));
        let s = PolyU::from_coeffs(Var::Epsilon, [q(0, 1), q(1, 1), q(1, 1)]);
        let c = p.compose_series(&[s], 4).unwrap();
        assert_eq!(c, PolyU::from_coeffs(Var::Epsilon, [q(0, 1), q(0, 1), q(0, 1), q(1, 1), q(3, 1)]));
    }
}
