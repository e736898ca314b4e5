//! Tabulated relative decompositions of the monomial forms that build the perturbation.
//!
//! Each entry records a full quadruple `(u, v, r, R)`. The coefficients `r` and `R` are
//! written with explicit powers of `H`, which are expanded against the case Hamiltonian.

use crate::exactalg::{q, PolyU, PolyXY, Rational, Var};
use crate::forms::{verify_decomposition, AnnulusCase, CanonicalDecomposition, OneForm, Reducer};

/// `c * H^k * x^i * y^j`.
#[derive(Clone, Debug)]
pub struct HTerm {
    pub c: Rational,
    pub h_pow: u32,
    pub i: u32,
    pub j: u32,
}

fn t(c: Rational, h_pow: u32, i: u32, j: u32) -> HTerm {
    HTerm { c, h_pow, i, j }
}

/// Expands a sum of `H`-weighted monomials into a polynomial in `x, y`.
pub fn expand_h_terms(terms: &[HTerm], case: AnnulusCase) -> PolyXY {
    let ham = case.hamiltonian();
    let mut out = PolyXY::zero();
    for term in terms {
        let hk = ham.compose(&PolyU::monomial(Var::Hamiltonian, Rational::one(), term.h_pow));
        out.add_scaled_shifted(&hk, &term.c, term.i, term.j);
    }
    out
}

#[derive(Clone, Debug)]
pub struct AppendixEntry {
    pub label: String,
    pub case: AnnulusCase,
    /// Left-hand side `x^i y^j dx`.
    pub lhs: (u32, u32),
    pub u: Vec<Rational>,
    pub v: Vec<Rational>,
    pub r: Vec<HTerm>,
    pub big_r: Vec<HTerm>,
}

impl AppendixEntry {
    pub fn omega(&self) -> OneForm {
        OneForm::monomial_dx(Rational::one(), self.lhs.0, self.lhs.1)
    }

    pub fn decomposition(&self) -> CanonicalDecomposition {
        CanonicalDecomposition {
            u: PolyU::from_coeffs(Var::Hamiltonian, self.u.iter().cloned()),
            v: PolyU::from_coeffs(Var::Hamiltonian, self.v.iter().cloned()),
            r: expand_h_terms(&self.r, self.case),
            big_r: expand_h_terms(&self.big_r, self.case),
        }
    }
}

/// Result of checking one tabulated identity in both directions.
#[derive(Clone, Debug)]
pub struct AppendixCheck {
    pub label: String,
    /// The tabulated quadruple satisfies the identity exactly.
    pub identity_holds: bool,
    /// Independent reduction reproduces the tabulated `(u, v)`.
    pub reduction_matches: bool,
}

impl AppendixCheck {
    pub fn passed(&self) -> bool {
        self.identity_holds && self.reduction_matches
    }
}

pub fn check_entry(entry: &AppendixEntry, reducer: &mut Reducer) -> AppendixCheck {
    let omega = entry.omega();
    let table = entry.decomposition();
    let identity_holds = verify_decomposition(&omega, &table, entry.case);
    let reduction_matches = reducer
        .reduce(&omega, None)
        .map(|d| d.u == table.u && d.v == table.v)
        .unwrap_or(false);
    AppendixCheck {
        label: entry.label.clone(),
        identity_holds,
        reduction_matches,
    }
}

pub fn check_all() -> Vec<AppendixCheck> {
    let entries = entries();
    AnnulusCase::HAMILTONIANS
        .iter()
        .flat_map(|case| {
            let mut reducer = Reducer::new(*case);
            entries
                .iter()
                .filter(|e| e.case == *case)
                .map(|e| check_entry(e, &mut reducer))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// `x^k y^2 dx` for the global center (the family entry `(i8)`).
pub fn xk_y2(k: u32) -> AppendixEntry {
    let k1 = k as i64 + 1;
    AppendixEntry {
        label: format!("i8[k={k}]"),
        case: AnnulusCase::GlobalCenter,
        lhs: (k, 2),
        u: vec![],
        v: vec![],
        r: vec![t(q(-2, k1), 0, k + 1, 0)],
        big_r: vec![
            t(q(2, k1), 1, k + 1, 0),
            t(q(-1, k1 + 2), 0, k + 3, 0),
            t(q(-1, 2 * (k1 + 4)), 0, k + 5, 0),
        ],
    }
}

/// `x^k y^4 dx` for the global center (the family entry `(i9)`).
pub fn xk_y4(k: u32) -> AppendixEntry {
    let k = k as i64;
    let ku = k as u32;
    AppendixEntry {
        label: format!("i9[k={k}]"),
        case: AnnulusCase::GlobalCenter,
        lhs: (ku, 4),
        u: vec![],
        v: vec![],
        r: vec![
            t(q(-8, k + 1), 1, ku + 1, 0),
            t(q(4, k + 3), 0, ku + 3, 0),
            t(q(2, k + 5), 0, ku + 5, 0),
        ],
        big_r: vec![
            t(q(4, k + 1), 2, ku + 1, 0),
            t(q(-4, k + 3), 1, ku + 3, 0),
            t(q(1, k + 5), 0, ku + 5, 0),
            t(q(-2, k + 5), 1, ku + 5, 0),
            t(q(1, k + 7), 0, ku + 7, 0),
            t(q(1, 4 * (k + 9)), 0, ku + 9, 0),
        ],
    }
}

/// Coefficient of `H x^3 y^3` in `R` for the three `x^2 y^5 dx` entries.
///
/// The commonly printed value is `20/91`; with the tabulated `r` the exact part is fixed up to a
/// constant, and it forces `20/117`.
static X2Y5_HX3Y3: std::sync::LazyLock<Rational> = std::sync::LazyLock::new(|| q(20, 117));

fn entry(
    label: &str,
    case: AnnulusCase,
    lhs: (u32, u32),
    u: Vec<Rational>,
    v: Vec<Rational>,
    r: Vec<HTerm>,
    big_r: Vec<HTerm>,
) -> AppendixEntry {
    AppendixEntry {
        label: label.to_string(),
        case,
        lhs,
        u,
        v,
        r,
        big_r,
    }
}

/// All 23 tabulated identities (the two families are instantiated at `k = 2`).
pub fn entries() -> Vec<AppendixEntry> {
    use AnnulusCase::{EightExterior as El, GlobalCenter as Gc, TruncatedPendulum as Tp};
    let z = || q(0, 1);
    vec![
        entry("i1", Gc, (0, 3), vec![q(-3, 7)], vec![z(), q(12, 7)],
            vec![t(q(-3, 7), 0, 1, 1)], vec![t(q(1, 7), 0, 1, 3)]),
        entry("i2", Gc, (4, 1), vec![q(-8, 7)], vec![z(), q(4, 7)],
            vec![t(q(6, 7), 0, 1, 1)], vec![t(q(-2, 7), 0, 1, 3)]),
        entry("i3", Gc, (0, 5), vec![q(-40, 231), q(-320, 231)], vec![z(), q(20, 231), q(240, 77)],
            vec![t(q(10, 77), 0, 1, 1), t(q(5, 33), 0, 3, 1), t(q(-60, 77), 1, 1, 1), t(q(-5, 7), 0, 1, 3)],
            vec![t(q(20, 77), 1, 1, 3), t(q(1, 11), 0, 1, 5), t(q(-10, 231), 0, 1, 3), t(q(-5, 99), 0, 3, 3)]),
        entry("i4", Gc, (6, 1), vec![q(32, 21), q(4, 3)], vec![z(), q(-16, 21)],
            vec![t(q(2, 3), 0, 3, 1), t(q(-8, 7), 0, 1, 1)],
            vec![t(q(-2, 9), 0, 3, 3), t(q(8, 21), 0, 1, 3)]),
        entry("i5", Gc, (2, 3), vec![q(8, 21), q(4, 3)], vec![z(), q(-4, 21)],
            vec![t(q(-2, 7), 0, 1, 1), t(q(-1, 3), 0, 3, 1)],
            vec![t(q(1, 9), 0, 3, 3), t(q(2, 21), 0, 1, 3)]),
        entry("i6", Gc, (2, 5), vec![q(160, 1001), q(3620, 3003), q(80, 39)], vec![z(), q(-80, 1001), q(-1600, 3003)],
            vec![t(q(-380, 1001), 1, 1, 1), t(q(-20, 39), 1, 3, 1), t(q(-130, 273), 0, 1, 3),
                 t(q(-5, 9), 0, 3, 3), t(q(-20, 143), 0, 3, 1), t(q(-120, 1001), 0, 1, 1)],
            vec![t(q(1, 13), 0, 3, 5), t(q(10, 143), 0, 1, 5), t(X2Y5_HX3Y3.clone(), 1, 3, 3),
                 t(q(20, 429), 0, 3, 3), t(q(40, 1001), 0, 1, 3), t(q(380, 3003), 1, 1, 3)]),
        entry("i7", Gc, (1, 4), vec![], vec![],
            vec![t(q(-8, 3), 1, 2, 0), t(q(-2, 3), 0, 2, 0), t(q(-2, 3), 0, 0, 2), t(q(-2, 3), 0, 2, 2)],
            vec![t(q(2, 1), 2, 2, 0), t(q(2, 3), 2, 0, 0), t(q(-1, 1), 1, 4, 0), t(q(1, 6), 0, 6, 0),
                 t(q(-1, 3), 1, 6, 0), t(q(1, 8), 0, 8, 0), t(q(1, 40), 0, 10, 0)]),
        xk_y2(2),
        xk_y4(2),
        entry("ii1", Tp, (0, 3), vec![q(-3, 7)], vec![z(), q(12, 7)],
            vec![t(q(-3, 7), 0, 1, 1)], vec![t(q(1, 7), 0, 1, 3)]),
        entry("ii2", Tp, (4, 1), vec![q(8, 7)], vec![z(), q(-4, 7)],
            vec![t(q(-6, 7), 0, 1, 1)], vec![t(q(2, 7), 0, 1, 3)]),
        entry("ii3", Tp, (0, 5), vec![q(40, 231), q(-320, 231)], vec![z(), q(-20, 231), q(240, 77)],
            vec![t(q(-10, 77), 0, 1, 1), t(q(5, 33), 0, 3, 1), t(q(-60, 77), 1, 1, 1), t(q(-5, 7), 0, 1, 3)],
            vec![t(q(20, 77), 1, 1, 3), t(q(1, 11), 0, 1, 5), t(q(10, 231), 0, 1, 3), t(q(-5, 99), 0, 3, 3)]),
        entry("ii4", Tp, (6, 1), vec![q(32, 21), q(-4, 3)], vec![z(), q(-16, 21)],
            vec![t(q(-2, 3), 0, 3, 1), t(q(-8, 7), 0, 1, 1)],
            vec![t(q(2, 9), 0, 3, 3), t(q(8, 21), 0, 1, 3)]),
        entry("ii5", Tp, (2, 3), vec![q(-8, 21), q(4, 3)], vec![z(), q(4, 21)],
            vec![t(q(2, 7), 0, 1, 1), t(q(-1, 3), 0, 3, 1)],
            vec![t(q(1, 9), 0, 3, 3), t(q(-2, 21), 0, 1, 3)]),
        entry("ii6", Tp, (2, 5), vec![q(160, 1001), q(-3620, 3003), q(80, 39)], vec![z(), q(-80, 1001), q(1600, 3003)],
            vec![t(q(380, 1001), 1, 1, 1), t(q(-20, 39), 1, 3, 1), t(q(130, 273), 0, 1, 3),
                 t(q(-5, 9), 0, 3, 3), t(q(20, 143), 0, 3, 1), t(q(-120, 1001), 0, 1, 1)],
            vec![t(q(1, 13), 0, 3, 5), t(q(-10, 143), 0, 1, 5), t(X2Y5_HX3Y3.clone(), 1, 3, 3),
                 t(q(-20, 429), 0, 3, 3), t(q(40, 1001), 0, 1, 3), t(q(-380, 3003), 1, 1, 3)]),
        entry("ii7", Tp, (1, 4), vec![], vec![],
            vec![t(q(-8, 3), 1, 2, 0), t(q(2, 3), 0, 2, 0), t(q(2, 3), 0, 0, 2), t(q(-2, 3), 0, 2, 2)],
            vec![t(q(2, 1), 2, 2, 0), t(q(-2, 3), 2, 0, 0), t(q(-1, 1), 1, 4, 0), t(q(1, 6), 0, 6, 0),
                 t(q(1, 3), 1, 6, 0), t(q(-1, 8), 0, 8, 0), t(q(1, 40), 0, 10, 0)]),
        entry("iii1", El, (0, 3), vec![q(3, 7)], vec![z(), q(12, 7)],
            vec![t(q(-3, 7), 0, 1, 1)], vec![t(q(1, 7), 0, 1, 3)]),
        entry("iii2", El, (4, 1), vec![q(8, 7)], vec![z(), q(4, 7)],
            vec![t(q(6, 7), 0, 1, 1)], vec![t(q(-2, 7), 0, 1, 3)]),
        entry("iii3", El, (0, 5), vec![q(40, 231), q(320, 231)], vec![z(), q(20, 231), q(240, 77)],
            vec![t(q(10, 77), 0, 1, 1), t(q(-5, 33), 0, 3, 1), t(q(-60, 77), 1, 1, 1), t(q(-5, 7), 0, 1, 3)],
            vec![t(q(20, 77), 1, 1, 3), t(q(1, 11), 0, 1, 5), t(q(-10, 231), 0, 1, 3), t(q(5, 99), 0, 3, 3)]),
        entry("iii4", El, (6, 1), vec![q(32, 21), q(4, 3)], vec![z(), q(16, 21)],
            vec![t(q(2, 3), 0, 3, 1), t(q(8, 7), 0, 1, 1)],
            vec![t(q(-2, 9), 0, 3, 3), t(q(-8, 21), 0, 1, 3)]),
        entry("iii5", El, (2, 3), vec![q(8, 21), q(4, 3)], vec![z(), q(4, 21)],
            vec![t(q(2, 7), 0, 1, 1), t(q(-1, 3), 0, 3, 1)],
            vec![t(q(1, 9), 0, 3, 3), t(q(-2, 21), 0, 1, 3)]),
        entry("iii6", El, (2, 5), vec![q(160, 1001), q(3620, 3003), q(80, 39)], vec![z(), q(80, 1001), q(1600, 3003)],
            vec![t(q(380, 1001), 1, 1, 1), t(q(-20, 39), 1, 3, 1), t(q(130, 273), 0, 1, 3),
                 t(q(-5, 9), 0, 3, 3), t(q(-20, 143), 0, 3, 1), t(q(120, 1001), 0, 1, 1)],
            vec![t(q(1, 13), 0, 3, 5), t(q(-10, 143), 0, 1, 5), t(X2Y5_HX3Y3.clone(), 1, 3, 3),
                 t(q(20, 429), 0, 3, 3), t(q(-40, 1001), 0, 1, 3), t(q(-380, 3003), 1, 1, 3)]),
        entry("iii7", El, (1, 4), vec![], vec![],
            vec![t(q(-8, 3), 1, 2, 0), t(q(-2, 3), 0, 2, 0), t(q(2, 3), 0, 0, 2), t(q(-2, 3), 0, 2, 2)],
            vec![t(q(2, 1), 2, 2, 0), t(q(-2, 3), 2, 0, 0), t(q(1, 1), 1, 4, 0), t(q(1, 6), 0, 6, 0),
                 t(q(-1, 3), 1, 6, 0), t(q(-1, 8), 0, 8, 0), t(q(1, 40), 0, 10, 0)]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_three_entries() {
        assert_eq!(entries().len(), 23);
    }

    #[test]
    fn every_entry_verifies_and_reduces() {
        let failures: Vec<_> = check_all().into_iter().filter(|c| !c.passed()).collect();
        assert!(failures.is_empty(), "{failures:?}");
    }

    #[test]
    fn families_hold_for_several_k() {
        let mut reducer = Reducer::new(AnnulusCase::GlobalCenter);
        for k in 0..7 {
            for e in [xk_y2(k), xk_y4(k)] {
                let c = check_entry(&e, &mut reducer);
                assert!(c.passed(), "{c:?}");
            }
        }
    }

    #[test]
    fn printed_x2y5_coefficient_is_inconsistent() {
        for mut e in entries().into_iter().filter(|e| e.lhs == (2, 5)) {
            for term in e.big_r.iter_mut().filter(|t| (t.h_pow, t.i, t.j) == (1, 3, 3)) {
                term.c = q(20, 91);
            }
            assert!(!verify_decomposition(&e.omega(), &e.decomposition(), e.case));
        }
    }
}
