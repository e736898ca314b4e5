//! Zeros of `I = p I_2 + q I_0` on the real level intervals and of `F = J / J_0` on the
//! slit plane.
//!
//! The real scan samples the periods on a graded grid, refines intervals where the slope
//! changes sign, and bisects every sign change. A local extremum whose value sits below
//! the quadrature noise is reported as an unresolved double zero.

mod winding;

pub use winding::{winding_number_f, ContourSampler, ContourSpec, WindingReport};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::elliptic::{graded_grid, ContinuationError, log_grid, periods_real_f64, PeriodError};
use crate::exactalg::{PolyU, Rational, Var};
use crate::forms::AnnulusCase;
use crate::francoise::small_rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZeroError {
    #[error("the element is identically zero")]
    IdenticallyZero,
    #[error("coefficient polynomial {which} has degree {degree} > 2")]
    DegreeTooHigh { which: &'static str, degree: u32 },
    #[error("{0} has no stated Picard-Fuchs system; derivative elements need the eight loop")]
    NotEightLoop(AnnulusCase),
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error("contour hits a zero of F near h = {h}")]
    ContourHitsZero { h: Complex64 },
    #[error("argument refinement budget exceeded ({samples} samples)")]
    RefinementBudget { samples: usize },
    #[error("interpolation conditions are degenerate")]
    Degenerate,
}

impl From<ContinuationError> for ZeroError {
    fn from(e: ContinuationError) -> Self {
        ZeroError::Period(e.into())
    }
}

/// `p(h) I_2 + q(h) I_0` with `deg p, deg q <= 2`. The same pair also stands for
/// `p J_2 + q J_0` when the derivative periods are meant (see [`Integrand`]).
#[derive(Clone, Debug, PartialEq)]
pub struct VElement {
    pub p: PolyU,
    pub q: PolyU,
    pub case: AnnulusCase,
}

impl VElement {
    pub fn new(case: AnnulusCase, p: PolyU, q: PolyU) -> Result<Self, ZeroError> {
        for (which, poly) in [("p", &p), ("q", &q)] {
            if let Some(degree) = poly.degree().filter(|d| *d > 2) {
                return Err(ZeroError::DegreeTooHigh { which, degree });
            }
        }
        Ok(VElement {
            p: p.relabel(Var::Level),
            q: q.relabel(Var::Level),
            case,
        })
    }

    /// Coefficients listed from degree 0 upward.
    pub fn from_coeffs(case: AnnulusCase, p: [Rational; 3], q: [Rational; 3]) -> Self {
        VElement {
            p: PolyU::from_coeffs(Var::Level, p),
            q: PolyU::from_coeffs(Var::Level, q),
            case,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn coeffs_f64(&self) -> ([f64; 3], [f64; 3]) {
        let f = |p: &PolyU| {
            let v = p.to_f64_coeffs(3);
            [v[0], v[1], v[2]]
        };
        (f(&self.p), f(&self.q))
    }
}

pub fn eval_v(e: &VElement, h: f64, tol: f64) -> Result<f64, ZeroError> {
    let per = periods_real_f64(e.case, h, tol)?;
    let (p, q) = e.coeffs_f64();
    Ok(poly2(&p, h).0 * per[1] + poly2(&q, h).0 * per[0])
}

/// `(p~, q~)` with `I' = p~ J_2 + q~ J_0`, from the eight-loop Picard-Fuchs system
/// `I_0 = (4h J_0 + J_2)/3`, `I_2 = (4h J_0 + (12h + 4) J_2)/15`.
pub fn derivative_element(e: &VElement) -> Result<VElement, ZeroError> {
    if !matches!(e.case, AnnulusCase::EightInterior | AnnulusCase::EightExterior) {
        return Err(ZeroError::NotEightLoop(e.case));
    }
    let h = PolyU::monomial(Var::Level, Rational::one(), 1);
    let lin = |c0: i64, c1: i64, den: i64| {
        PolyU::from_coeffs(Var::Level, [Rational::new(c0, den), Rational::new(c1, den)])
    };
    let (dp, dq) = (e.p.derivative(), e.q.derivative());
    let mul = |a: &PolyU, b: &PolyU| a.mul(b).expect("same variable");
    let add = |a: &PolyU, b: &PolyU| a.add(b).expect("same variable");
    // I' = p' I_2 + p J_2 + q' I_0 + q J_0
    let p_tilde = add(&add(&e.p, &mul(&dp, &lin(4, 12, 15))), &dq.scale(&Rational::new(1, 3)));
    let q_tilde = add(
        &add(&e.q, &mul(&dp, &h.scale(&Rational::new(4, 15)))),
        &mul(&dq, &h.scale(&Rational::new(4, 3))),
    );
    VElement::new(e.case, p_tilde, q_tilde)
}

/// Which periods the pair `(p, q)` multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrand {
    /// `p I_2 + q I_0`.
    Abelian,
    /// `p J_2 + q J_0`; the slope uses the eight-loop Picard-Fuchs system.
    Derivative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    RealScan,
    ArgumentPrinciple,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroLocation {
    pub h: f64,
    /// 1 for a sign change, 2 for a tangency candidate.
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroReport {
    pub count: usize,
    pub locations: Vec<ZeroLocation>,
    pub method: CountMethod,
    pub bound: usize,
    pub certified: bool,
    /// Interval actually scanned; zeros outside it are not counted.
    pub window: [f64; 2],
    pub diagnostics: Vec<String>,
}

fn poly2(c: &[f64; 3], h: f64) -> (f64, f64) {
    (c[0] + h * (c[1] + h * c[2]), c[1] + 2.0 * h * c[2])
}

/// `sum |c_k h^k|`, the size of `p(h)` before cancellation.
fn abs2(c: &[f64; 3], h: f64) -> f64 {
    c[0].abs() + (c[1] * h).abs() + (c[2] * h * h).abs()
}

/// Values below `NOISE_FACTOR * tol` times the term sizes are indistinguishable from 0.
const NOISE_FACTOR: f64 = 1.0;
const BISECTION_WIDTH: f64 = 1e-10;
/// Zeros `(h, multiplicity)` and the diagnostics that came with them.
type ScanOutcome = (Vec<(f64, u32)>, Vec<String>);

/// Period tolerance for zero counting. At `1e-12` the quadrature error alone produces
/// spurious sign changes for elements with clustered zeros near the interval ends.
pub const SCAN_TOL: f64 = 1e-14;
const REFINEMENT_PASSES: usize = 2;

/// Periods `[I_0, I_2, J_0, J_2]` on a fixed set of levels, shared by many elements.
#[derive(Clone, Debug)]
pub struct PeriodTable {
    pub case: AnnulusCase,
    pub levels: Vec<f64>,
    pub periods: Vec<[f64; 4]>,
    pub tol: f64,
}

impl PeriodTable {
    pub fn new(case: AnnulusCase, levels: Vec<f64>, tol: f64) -> Result<Self, ZeroError> {
        let periods = levels
            .par_iter()
            .map(|&h| periods_real_f64(case, h, tol))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PeriodTable {
            case,
            levels,
            periods,
            tol,
        })
    }

    /// `grid` levels graded towards the interval ends.
    pub fn for_scan(case: AnnulusCase, grid: usize, tol: f64) -> Result<Self, ZeroError> {
        Self::new(case, scan_grid(case, grid), tol)
    }
}

/// Log-spaced on `[1e-6, 1e6]` for unbounded intervals, logistic grading with gap `1e-8`
/// otherwise.
pub fn scan_grid(case: AnnulusCase, n: usize) -> Vec<f64> {
    let iv = case.interval();
    match iv.hi {
        None => log_grid(1e-6, 1e6, n),
        Some(hi) => graded_grid(iv.lo, hi, n, 1e-8),
    }
}

#[derive(Clone, Copy, Debug)]
struct Sample {
    h: f64,
    value: f64,
    slope: f64,
    noise: f64,
}

struct Scanner<'a> {
    case: AnnulusCase,
    integrand: Integrand,
    p: [f64; 3],
    q: [f64; 3],
    tol: f64,
    table: &'a PeriodTable,
}

impl Scanner<'_> {
    fn sample_from(&self, h: f64, per: &[f64; 4]) -> Sample {
        let [i0, i2, j0, j2] = *per;
        let (p, dp) = poly2(&self.p, h);
        let (q, dq) = poly2(&self.q, h);
        match self.integrand {
            Integrand::Abelian => Sample {
                h,
                value: p * i2 + q * i0,
                slope: dp * i2 + p * j2 + dq * i0 + q * j0,
                noise: NOISE_FACTOR * self.tol * (abs2(&self.p, h) * i2.abs() + abs2(&self.q, h) * i0.abs()),
            },
            Integrand::Derivative => {
                let dj2 = (j2 - j0) / (4.0 * h + 1.0);
                let dj0 = -(j0 + dj2) / (4.0 * h);
                Sample {
                    h,
                    value: p * j2 + q * j0,
                    slope: dp * j2 + p * dj2 + dq * j0 + q * dj0,
                    noise: NOISE_FACTOR * self.tol * (abs2(&self.p, h) * j2.abs() + abs2(&self.q, h) * j0.abs()),
                }
            }
        }
    }

    fn sample(&self, h: f64) -> Result<Sample, ZeroError> {
        Ok(self.sample_from(h, &periods_real_f64(self.case, h, self.tol)?))
    }

    /// Shrinks `[a, b]` around a sign change of `key`.
    fn bisect(&self, mut a: Sample, mut b: Sample, key: fn(&Sample) -> f64) -> Result<Sample, ZeroError> {
        while b.h - a.h > BISECTION_WIDTH {
            let mid = 0.5 * (a.h + b.h);
            if mid <= a.h || mid >= b.h {
                break;
            }
            let m = self.sample(mid)?;
            if key(&m) == 0.0 {
                return Ok(m);
            }
            if (key(&m) > 0.0) == (key(&a) > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        self.sample(0.5 * (a.h + b.h))
    }

    fn run(&self) -> Result<ScanOutcome, ZeroError> {
        let mut pts: Vec<Sample> = self
            .table
            .levels
            .iter()
            .zip(&self.table.periods)
            .map(|(&h, per)| self.sample_from(h, per))
            .collect();
        for _ in 0..REFINEMENT_PASSES {
            let mut next = Vec::with_capacity(pts.len() * 2);
            for w in pts.windows(2) {
                next.push(w[0]);
                let same_sign = (w[0].value > 0.0) == (w[1].value > 0.0);
                if same_sign && (w[0].slope > 0.0) != (w[1].slope > 0.0) {
                    next.push(self.sample(0.5 * (w[0].h + w[1].h))?);
                }
            }
            next.push(*pts.last().expect("non-empty grid"));
            pts = next;
        }

        self.count_on(&pts)
    }

    /// Sign changes between resolved samples. A run of samples with `|value| <= noise` is
    /// one band: only its net sign change (or a tangency candidate) is counted, and internal
    /// sign flips, which rounding alone can produce, leave the count uncertified.
    fn count_on(&self, pts: &[Sample]) -> Result<ScanOutcome, ZeroError> {
        let resolved = |s: &Sample| s.value.abs() > s.noise;
        let flips = |run: &[Sample]| run.windows(2).filter(|w| (w[0].value > 0.0) != (w[1].value > 0.0)).count();
        let mut found = Vec::new();
        let mut notes = Vec::new();
        let mut prev: Option<usize> = None;
        let mut k = 0;
        while k < pts.len() {
            if !resolved(&pts[k]) {
                let start = k;
                while k < pts.len() && !resolved(&pts[k]) {
                    k += 1;
                }
                let (lo, hi) = (pts[start].h, pts[k - 1].h);
                let band_note = || format!("unresolved band [{lo:e}, {hi:e}]: values within noise");
                let Some(a) = prev.filter(|_| k < pts.len()) else {
                    if flips(&pts[start..k]) > 0 {
                        notes.push(format!("{} at the end of the window, not counted", band_note()));
                    }
                    continue;
                };
                let (sa, sb) = (pts[a], pts[k]);
                let net = (sa.value > 0.0) != (sb.value > 0.0);
                let inner = flips(&pts[a..=k]);
                if net {
                    found.push((self.bisect(sa, sb, |s| s.value)?.h, 1));
                    if inner > 1 {
                        notes.push(format!("{}; {inner} sign flips counted as one zero", band_note()));
                    }
                } else if (sa.slope > 0.0) != (sb.slope > 0.0) {
                    let e = self.bisect(sa, sb, |s| s.slope)?;
                    found.push((e.h, 2));
                    notes.push(format!("{}; tangency candidate at h = {:e}", band_note(), e.h));
                } else if inner > 0 {
                    notes.push(format!("{}; {inner} sign flips not counted", band_note()));
                }
                continue;
            }
            if let Some(a) = prev.filter(|&a| a + 1 == k) {
                self.count_gap(pts[a], pts[k], &mut found, &mut notes)?;
            }
            prev = Some(k);
            k += 1;
        }
        Ok((found, notes))
    }

    fn count_gap(&self, a: Sample, b: Sample, found: &mut Vec<(f64, u32)>, notes: &mut Vec<String>) -> Result<(), ZeroError> {
        if (a.value > 0.0) != (b.value > 0.0) {
            found.push((self.bisect(a, b, |s| s.value)?.h, 1));
        } else if (a.slope > 0.0) != (b.slope > 0.0) {
            let e = self.bisect(a, b, |s| s.slope)?;
            if e.value.abs() <= e.noise {
                found.push((e.h, 2));
                notes.push(format!(
                    "unresolved tangency at h = {:e}: |I| = {:e} within noise {:e}",
                    e.h,
                    e.value.abs(),
                    e.noise
                ));
            } else if (e.value > 0.0) != (a.value > 0.0) {
                found.push((self.bisect(a, e, |s| s.value)?.h, 1));
                found.push((self.bisect(e, b, |s| s.value)?.h, 1));
            }
        }
        Ok(())
    }
}

/// Real zeros of `e` (as `I` or as `J`, per `integrand`) over the levels of `table`.
pub fn count_zeros_with(
    e: &VElement,
    integrand: Integrand,
    table: &PeriodTable,
) -> Result<ZeroReport, ZeroError> {
    if e.is_zero() {
        return Err(ZeroError::IdenticallyZero);
    }
    if integrand == Integrand::Derivative
        && !matches!(e.case, AnnulusCase::EightInterior | AnnulusCase::EightExterior)
    {
        return Err(ZeroError::NotEightLoop(e.case));
    }
    let (p, q) = e.coeffs_f64();
    let scanner = Scanner {
        case: e.case,
        integrand,
        p,
        q,
        tol: table.tol,
        table,
    };
    let (found, diagnostics) = scanner.run()?;
    let locations: Vec<ZeroLocation> = found.into_iter().map(|(h, multiplicity)| ZeroLocation { h, multiplicity }).collect();
    let count = locations.iter().map(|l| l.multiplicity as usize).sum();
    let bound = e.case.zero_bound();
    let window = [table.levels[0], *table.levels.last().expect("non-empty grid")];
    Ok(ZeroReport {
        count,
        certified: count <= bound && diagnostics.is_empty(),
        locations,
        method: CountMethod::RealScan,
        bound,
        window,
        diagnostics,
    })
}

/// Real-scan count of the zeros of `I = p I_2 + q I_0` on a `grid`-point graded grid.
pub fn count_zeros_real(e: &VElement, grid: usize, tol: f64) -> Result<ZeroReport, ZeroError> {
    if e.is_zero() {
        return Err(ZeroError::IdenticallyZero);
    }
    let table = PeriodTable::for_scan(e.case, grid.max(200), tol)?;
    count_zeros_with(e, Integrand::Abelian, &table)
}

/// The element of the given integrand vanishing at `levels` (at most 5 of them), spanned by
/// the first `levels.len() + 1` of `I_0, I_2, h I_0, h I_2, h^2 I_0, h^2 I_2`, normalised so
/// the last used coefficient is 1.
pub fn interpolating_element(
    case: AnnulusCase,
    integrand: Integrand,
    levels: &[f64],
    tol: f64,
) -> Result<VElement, ZeroError> {
    let k = levels.len();
    if k > 5 {
        return Err(ZeroError::Degenerate);
    }
    let column = |j: usize, h: f64, per: &[f64; 4]| {
        let (b0, b2) = match integrand {
            Integrand::Abelian => (per[0], per[1]),
            Integrand::Derivative => (per[2], per[3]),
        };
        h.powi((j / 2) as i32) * if j.is_multiple_of(2) { b0 } else { b2 }
    };
    let mut rows = Vec::with_capacity(k);
    for &h in levels {
        let per = periods_real_f64(case, h, tol)?;
        let row: Vec<f64> = (0..=k).map(|j| column(j, h, &per)).collect();
        let scale = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        rows.push(row.into_iter().map(|v| v / scale).collect::<Vec<_>>());
    }
    // solve A c = -a_k with c_k = 1, by partial pivoting
    let mut m: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r[..k].iter().copied().chain(std::iter::once(-r[k])).collect())
        .collect();
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("non-empty");
        if m[piv][col].abs() < 1e-14 {
            return Err(ZeroError::Degenerate);
        }
        m.swap(col, piv);
        let (top, rest) = m.split_at_mut(col + 1);
        let pivot = &top[col];
        for row in rest.iter_mut() {
            let f = row[col] / pivot[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
        }
    }
    let mut c = vec![0.0; k + 1];
    c[k] = 1.0;
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|j| m[r][j] * c[j]).sum();
        c[r] = (m[r][k] - s) / m[r][r];
    }
    let rat = |v: f64| Rational::from_f64(v).ok_or(ZeroError::Degenerate);
    let mut p = [Rational::zero(), Rational::zero(), Rational::zero()];
    let mut q = p.clone();
    for (j, v) in c.iter().enumerate() {
        let slot = if j % 2 == 0 { &mut q } else { &mut p };
        slot[j / 2] = rat(*v)?;
    }
    Ok(VElement::from_coeffs(case, p, q))
}

/// Random element: small rational coefficients with probability 1/2, otherwise the
/// element through 5 random levels of the interval (which must then have 5 zeros there).
pub fn random_velement<R: Rng>(
    case: AnnulusCase,
    integrand: Integrand,
    rng: &mut R,
    tol: f64,
) -> Result<VElement, ZeroError> {
    loop {
        if rng.gen_bool(0.5) {
            let e = VElement::from_coeffs(
                case,
                std::array::from_fn(|_| small_rational(rng)),
                std::array::from_fn(|_| small_rational(rng)),
            );
            if !e.is_zero() {
                return Ok(e);
            }
            continue;
        }
        let mut s: Vec<f64> = (0..5).map(|_| rng.gen_range(-GRADING_RANGE..GRADING_RANGE)).collect();
        s.sort_by(f64::total_cmp);
        if s.windows(2).any(|w| w[1] - w[0] < MIN_GRADING_GAP) {
            continue;
        }
        let levels: Vec<f64> = s.into_iter().map(|s| level_at_grading(case, s)).collect();
        match interpolating_element(case, integrand, &levels, tol) {
            Ok(e) => return Ok(e),
            Err(ZeroError::Degenerate) => continue,
            Err(err) => return Err(err),
        }
    }
}

/// Interpolation levels are drawn in `(-GRADING_RANGE, GRADING_RANGE)` of the grading
/// coordinate, at least `MIN_GRADING_GAP` apart; closer levels give zeros that double
/// precision cannot separate.
const GRADING_RANGE: f64 = 5.0;
const MIN_GRADING_GAP: f64 = 0.1;

/// Level at grading coordinate `s`: `10^(2 s / 5)` on unbounded intervals, a logistic map
/// onto bounded ones.
pub fn level_at_grading(case: AnnulusCase, s: f64) -> f64 {
    let iv = case.interval();
    match iv.hi {
        None => 10f64.powf(0.4 * s),
        Some(hi) => iv.lo + (hi - iv.lo) / (1.0 + (-s).exp()),
    }
}

/// A level drawn uniformly in the grading coordinate.
pub fn random_level<R: Rng>(case: AnnulusCase, rng: &mut R) -> f64 {
    level_at_grading(case, rng.gen_range(-GRADING_RANGE..GRADING_RANGE))
}

/// Counts of `n` seeded random elements, and the histogram of those counts.
#[derive(Clone, Debug, Serialize)]
pub struct BatchSummary {
    pub case: AnnulusCase,
    pub samples: usize,
    pub histogram: Vec<usize>,
    pub max_count: usize,
    pub violations: usize,
    pub uncertified: usize,
}

pub fn random_batch(
    case: AnnulusCase,
    n: usize,
    seed: u64,
    grid: usize,
    tol: f64,
) -> Result<BatchSummary, ZeroError> {
    use rand::SeedableRng;
    let table = PeriodTable::for_scan(case, grid.max(200), tol)?;
    let reports = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let e = random_velement(case, Integrand::Abelian, &mut rng, tol)?;
            count_zeros_with(&e, Integrand::Abelian, &table)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let bound = case.zero_bound();
    let max_count = reports.iter().map(|r| r.count).max().unwrap_or(0);
    let mut histogram = vec![0; max_count.max(bound) + 1];
    for r in &reports {
        histogram[r.count] += 1;
    }
    Ok(BatchSummary {
        case,
        samples: n,
        histogram,
        max_count,
        violations: reports.iter().filter(|r| r.count > bound).count(),
        uncertified: reports.iter().filter(|r| !r.certified).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::q;
    use rand::SeedableRng;

    fn el(case: AnnulusCase, p: [i64; 3], qq: [i64; 3]) -> VElement {
        VElement::from_coeffs(case, p.map(Rational::integer), qq.map(Rational::integer))
    }

    #[test]
    fn positive_periods_have_no_zeros() {
        for case in AnnulusCase::ALL {
            let r = count_zeros_real(&el(case, [0, 0, 0], [1, 0, 0]), 200, 1e-12).unwrap();
            assert_eq!(r.count, 0);
            assert!(r.certified);
        }
        let r = count_zeros_real(&el(AnnulusCase::GlobalCenter, [1, 0, 0], [0, 0, 0]), 200, 1e-12).unwrap();
        assert_eq!(r.count, 0);
    }

    #[test]
    fn zero_element_is_rejected() {
        let e = el(AnnulusCase::GlobalCenter, [0, 0, 0], [0, 0, 0]);
        assert_eq!(count_zeros_real(&e, 200, 1e-12), Err(ZeroError::IdenticallyZero));
    }

    #[test]
    fn zeros_of_q_times_i0() {
        // q = (h - 1/2)(3 - h): I = q I_0 vanishes exactly at the roots of q
        let mut e = el(AnnulusCase::GlobalCenter, [0, 0, 0], [0, 0, 0]);
        e.q = PolyU::from_coeffs(Var::Level, [q(-3, 2), q(7, 2), q(-1, 1)]);
        let r = count_zeros_real(&e, 200, SCAN_TOL).unwrap();
        assert_eq!(r.count, 2);
        assert!((r.locations[0].h - 0.5).abs() < 1e-9);
        assert!((r.locations[1].h - 3.0).abs() < 1e-9);
    }

    #[test]
    fn derivative_element_examples() {
        let case = AnnulusCase::EightExterior;
        let d = derivative_element(&el(case, [0, 0, 0], [1, 0, 0])).unwrap();
        assert_eq!(d, el(case, [0, 0, 0], [1, 0, 0]));
        let d = derivative_element(&el(case, [1, 0, 0], [0, 0, 0])).unwrap();
        assert_eq!(d, el(case, [1, 0, 0], [0, 0, 0]));
        // p = h: I' = I_2 + h J_2 = (4h/15) J_0 + ((12h + 4)/15 + h) J_2
        let d = derivative_element(&el(case, [0, 1, 0], [0, 0, 0])).unwrap();
        assert_eq!(d.p, PolyU::from_coeffs(Var::Level, [q(4, 15), q(27, 15)]));
        assert_eq!(d.q, PolyU::from_coeffs(Var::Level, [q(0, 1), q(4, 15)]));
        assert!(derivative_element(&el(AnnulusCase::GlobalCenter, [1, 0, 0], [0, 0, 0])).is_err());
    }

    #[test]
    fn derivative_element_matches_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for case in [AnnulusCase::EightExterior, AnnulusCase::EightInterior] {
            for _ in 0..5 {
                let e = VElement::from_coeffs(
                    case,
                    std::array::from_fn(|_| small_rational(&mut rng)),
                    std::array::from_fn(|_| small_rational(&mut rng)),
                );
                let d = derivative_element(&e).unwrap();
                let (pt, qt) = d.coeffs_f64();
                for h in [case.interval().lo + 0.07, -0.1, 0.5, 4.0] {
                    if !case.interval().contains(h) {
                        continue;
                    }
                    let step = 1e-5;
                    let fd = (eval_v(&e, h + step, 1e-13).unwrap() - eval_v(&e, h - step, 1e-13).unwrap())
                        / (2.0 * step);
                    let per = periods_real_f64(case, h, 1e-13).unwrap();
                    let j = poly2(&pt, h).0 * per[3] + poly2(&qt, h).0 * per[2];
                    assert!((fd - j).abs() < 1e-6 * j.abs().max(1.0), "{case} {h}: {fd} vs {j}");
                }
            }
        }
    }

    #[test]
    fn derivative_slope_matches_finite_differences() {
        let case = AnnulusCase::EightExterior;
        let table = PeriodTable::new(case, vec![0.3, 2.0], 1e-13).unwrap();
        let s = Scanner {
            case,
            integrand: Integrand::Derivative,
            p: [0.5, -1.0, 0.25],
            q: [2.0, 0.5, -1.0],
            tol: 1e-13,
            table: &table,
        };
        for h in [0.3, 2.0] {
            let d = 1e-5 * h;
            let fd = (s.sample(h + d).unwrap().value - s.sample(h - d).unwrap().value) / (2.0 * d);
            let sl = s.sample(h).unwrap().slope;
            assert!((fd - sl).abs() < 1e-6 * sl.abs().max(1.0), "{fd} {sl}");
        }
    }

    #[test]
    fn interpolated_elements_have_five_zeros() {
        for case in AnnulusCase::ALL {
            let table = PeriodTable::for_scan(case, 200, SCAN_TOL).unwrap();
            let levels: Vec<f64> = [-4.0, -2.0, 0.0, 1.5, 3.5].map(|s| level_at_grading(case, s)).into();
            let e = interpolating_element(case, Integrand::Abelian, &levels, SCAN_TOL).unwrap();
            let r = count_zeros_with(&e, Integrand::Abelian, &table).unwrap();
            assert_eq!(r.count, 5, "{case} {levels:?} {r:?}");
            for (z, t) in r.locations.iter().zip(&levels) {
                assert!((z.h - t).abs() < 1e-6 * t.abs().max(1e-3), "{case} {} {t}", z.h);
            }
        }
    }

    #[test]
    fn small_batch_respects_bound() {
        for case in AnnulusCase::ALL {
            let s = random_batch(case, 40, 5, 200, SCAN_TOL).unwrap();
            assert_eq!(s.violations, 0, "{s:?}");
            assert_eq!(s.uncertified, 0, "{s:?}");
        }
    }
}
