//! Period integrals `I_0 = ∮ y dx`, `I_2 = ∮ x^2 y dx` and their derivatives
//! `J_0 = ∮ dx/y`, `J_2 = ∮ x^2 dx/y` on the ovals `H = h`.
//!
//! Every oval is a lift of a segment `[e1, e2]` between two roots of
//! `y^2 = 2h - a x^2 - (b/2) x^4 = (b/2)(x - e1)(e2 - x)(x - e3)(x - e4)`. With
//! `x = c + w sin(theta)` the square roots at the endpoints disappear and
//!
//! ```text
//! I_0 = 2 w^2 ∫ cos^2 s,  I_2 = 2 w^2 ∫ x^2 cos^2 s,  J_0 = 2 ∫ 1/s,  J_2 = 2 ∫ x^2/s
//! ```
//!
//! over `theta in [-pi/2, pi/2]`, where `s^2 = (b/2)(x - e3)(x - e4)`.

mod continuation;
pub mod quadrature;

pub use continuation::{
    extrapolate_delta, periods_complex, picard_lefschetz_check, reference_level, track_branch,
    vanishing_cycle_period, wronskian, wronskian_at, BranchTracker, JumpCheck, ContinuationError, WronskianTag, WronskianValue, DELTAS, H_REF,
};

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::forms::AnnulusCase;
use quadrature::{tanh_sinh_split, QuadratureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodError {
    #[error("h = {h} is outside the {case} interval")]
    OutsideInterval { case: AnnulusCase, h: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Continuation(#[from] ContinuationError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchTag {
    RealOval,
    PlusSide,
    MinusSide,
    VanishingCycle,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PeriodValue {
    #[serde(serialize_with = "ser_c")]
    pub h: Complex64,
    pub case: AnnulusCase,
    pub branch_tag: BranchTag,
    #[serde(serialize_with = "ser_c")]
    pub i0: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub i2: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub j0: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub j2: Complex64,
    pub est_error: f64,
}

fn ser_c<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Real roots bounding the oval and the segment it projects to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OvalGeometry {
    pub case: AnnulusCase,
    pub h: f64,
    /// Real roots of `2h - a x^2 - (b/2) x^4`, sorted.
    pub x_roots: Vec<f64>,
    pub segment: [f64; 2],
}

/// `X = x^2` roots of `X^2 + (2a/b) X - 4h/b`, the small one computed without cancellation.
pub(crate) fn x2_roots(a: f64, b: f64, h: Complex64) -> (Complex64, Complex64) {
    let m = -a / b;
    let r = (Complex64::new(m * m, 0.0) + h * (4.0 / b)).sqrt();
    let (p, n) = (m + r, m - r);
    let big = if p.norm() >= n.norm() { p } else { n };
    let small = if big.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        (h * (-4.0 / b)) / big
    };
    (big, small)
}

pub fn oval_geometry(case: AnnulusCase, h: f64) -> Result<OvalGeometry, PeriodError> {
    if !case.interval().contains(h) {
        return Err(PeriodError::OutsideInterval { case, h });
    }
    let roots = real_roots(case, h);
    Ok(OvalGeometry {
        case,
        h,
        x_roots: roots.all_real,
        segment: [roots.e[0].re, roots.e[1].re],
    })
}

struct RealRoots {
    /// `e1, e2` bound the oval; `e3, e4` are the remaining roots.
    e: [Complex64; 4],
    all_real: Vec<f64>,
}

fn real_roots(case: AnnulusCase, h: f64) -> RealRoots {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let s = |v: f64| v.sqrt();
    match case {
        AnnulusCase::GlobalCenter => {
            let root = (1.0 + 4.0 * h).sqrt();
            let xp = s(4.0 * h / (1.0 + root));
            let im = s(1.0 + root);
            RealRoots {
                e: [c(-xp, 0.0), c(xp, 0.0), c(0.0, im), c(0.0, -im)],
                all_real: vec![-xp, xp],
            }
        }
        AnnulusCase::TruncatedPendulum => {
            let root = (1.0 - 4.0 * h).sqrt();
            let xm = s(4.0 * h / (1.0 + root));
            let xo = s(1.0 + root);
            RealRoots {
                e: [c(-xm, 0.0), c(xm, 0.0), c(xo, 0.0), c(-xo, 0.0)],
                all_real: vec![-xo, -xm, xm, xo],
            }
        }
        AnnulusCase::EightInterior => {
            let root = (1.0 + 4.0 * h).sqrt();
            let x1 = s(-4.0 * h / (1.0 + root));
            let x2 = s(1.0 + root);
            RealRoots {
                e: [c(x1, 0.0), c(x2, 0.0), c(-x1, 0.0), c(-x2, 0.0)],
                all_real: vec![-x2, -x1, x1, x2],
            }
        }
        AnnulusCase::EightExterior => {
            let root = (1.0 + 4.0 * h).sqrt();
            let xp = s(1.0 + root);
            let im = s(4.0 * h / (root + 1.0));
            RealRoots {
                e: [c(-xp, 0.0), c(xp, 0.0), c(0.0, im), c(0.0, -im)],
                all_real: vec![-xp, xp],
            }
        }
    }
}

/// Roots plus the branch constant of `s`, enough to evaluate the four periods of a segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentBranch {
    pub e: [Complex64; 4],
    /// `s(x) = k sqrt(-(x - e3)/d3) sqrt(-(x - e4)/d4)` with `d` the outward cut directions.
    pub k: Complex64,
    pub half_b: f64,
}

impl SegmentBranch {
    pub fn centre(&self) -> Complex64 {
        (self.e[0] + self.e[1]) * 0.5
    }

    pub fn half_width(&self) -> Complex64 {
        (self.e[1] - self.e[0]) * 0.5
    }

    /// Position of `e_k` in coordinates where the segment is `[-1, 1]`.
    pub fn local(&self, k: usize) -> Complex64 {
        (self.e[k] - self.centre()) / self.half_width()
    }

    /// Unit direction from the nearest segment point towards `e_k`.
    pub fn cut_direction(&self, k: usize) -> Complex64 {
        let w = self.half_width();
        let t = self.local(k).re.clamp(-1.0, 1.0);
        let nearest = self.centre() + w * t;
        let d = self.e[k] - nearest;
        let n = d.norm();
        if n == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            d / n
        }
    }

    /// `k^2 = (b/2) d3 d4`, up to the sign fixed by continuation.
    pub fn k_squared(&self) -> Complex64 {
        self.cut_direction(2) * self.cut_direction(3) * self.half_b
    }

    pub fn s(&self, x: Complex64) -> Complex64 {
        let d3 = self.cut_direction(2);
        let d4 = self.cut_direction(3);
        self.k * (-(x - self.e[2]) / d3).sqrt() * (-(x - self.e[3]) / d4).sqrt()
    }

    /// Branch for real data: `k` chosen with `s(c)` on the positive real or imaginary axis.
    pub fn with_positive_k(e: [Complex64; 4], half_b: f64) -> Self {
        let mut br = SegmentBranch {
            e,
            k: Complex64::new(1.0, 0.0),
            half_b,
        };
        br.k = br.k_squared().sqrt();
        let sc = br.s(br.centre());
        let on_imaginary_axis = sc.re.abs() <= 1e-12 * sc.norm();
        if (!on_imaginary_axis && sc.re < 0.0) || (on_imaginary_axis && sc.im < 0.0) {
            br.k = -br.k;
        }
        br
    }

    /// `(I_0, I_2, J_0, J_2)` for this segment.
    pub fn periods(&self, tol: f64) -> Result<([Complex64; 4], f64), QuadratureError> {
        let c = self.centre();
        let w = self.half_width();
        let w2 = w * w;
        let d3 = self.cut_direction(2);
        let d4 = self.cut_direction(3);
        let (e3, e4, k) = (self.e[2], self.e[3], self.k);
        let f = |theta: f64| {
            let (sn, cs) = theta.sin_cos();
            let x = c + w * sn;
            let s = k * (-(x - e3) / d3).sqrt() * (-(x - e4) / d4).sqrt();
            let x2 = x * x;
            let area = w2 * s * (2.0 * cs * cs);
            let inv = s.inv() * 2.0;
            [area, area * x2, inv, inv * x2]
        };
        let breaks: Vec<f64> = [2, 3]
            .iter()
            .map(|&i| self.local(i).re)
            .filter(|t| t.abs() < 1.0)
            .map(f64::asin)
            .collect();
        let est = tanh_sinh_split(f, -FRAC_PI_2, FRAC_PI_2, &breaks, tol, 1e-300)?;
        Ok((est.value, est.error))
    }
}

pub(crate) fn real_branch(case: AnnulusCase, h: f64) -> SegmentBranch {
    SegmentBranch::with_positive_k(real_roots(case, h).e, case.b_f64() / 2.0)
}

pub fn periods_real(case: AnnulusCase, h: f64, tol: f64) -> Result<PeriodValue, PeriodError> {
    if !case.interval().contains(h) {
        return Err(PeriodError::OutsideInterval { case, h });
    }
    let br = real_branch(case, h);
    let (v, err) = br.periods(tol)?;
    Ok(PeriodValue {
        h: Complex64::new(h, 0.0),
        case,
        branch_tag: BranchTag::RealOval,
        i0: v[0],
        i2: v[1],
        j0: v[2],
        j2: v[3],
        est_error: err,
    })
}

/// Real parts `(I_0, I_2, J_0, J_2)` at a real level.
pub fn periods_real_f64(case: AnnulusCase, h: f64, tol: f64) -> Result<[f64; 4], PeriodError> {
    let p = periods_real(case, h, tol)?;
    Ok([p.i0.re, p.i2.re, p.j0.re, p.j2.re])
}

/// Relative residuals of `4h J_0 - a J_2 = 3 I_0` and
/// `-(4a/b) h J_0 + (12h + 4a^2/b) J_2 = 15 I_2`; on the eight loop these read
/// `4h J_0 + J_2 = 3 I_0` and `4h J_0 + (12h + 4) J_2 = 15 I_2`.
pub fn pf_residual(case: AnnulusCase, h: f64, tol: f64) -> Result<(f64, f64), PeriodError> {
    let p = periods_real(case, h, tol)?;
    Ok(pf_residual_of(&p, [3.0, 15.0]))
}

/// Residuals with the right-hand coefficients `(3, 15)` replaced by `rhs`.
pub fn pf_residual_of(p: &PeriodValue, rhs: [f64; 2]) -> (f64, f64) {
    let h = p.h;
    let (a, b) = (p.case.a_f64(), p.case.b_f64());
    let scale = p.i0.norm().max(p.i2.norm()).max(1.0);
    let r1 = (h * 4.0 * p.j0 - p.j2 * a - p.i0 * rhs[0]).norm() / scale;
    let r2 = (h * (-4.0 * a / b) * p.j0 + (h * 12.0 + 4.0 * a * a / b) * p.j2 - p.i2 * rhs[1]).norm() / scale;
    (r1, r2)
}

/// Levels graded towards the interval ends: a logistic map for bounded intervals, a
/// logarithmic one on `(0, inf)` spanning `[1e-4, 1e4]`.
pub fn level_grid(case: AnnulusCase, n: usize) -> Vec<f64> {
    let iv = case.interval();
    match iv.hi {
        None => log_grid(1e-4, 1e4, n),
        Some(hi) => graded_grid(iv.lo, hi, n, 1e-6),
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp())
        .collect()
}

/// `n` points in `(lo, hi)` clustering at both ends down to `gap * (hi - lo)`.
pub fn graded_grid(lo: f64, hi: f64, n: usize, gap: f64) -> Vec<f64> {
    let l = ((1.0 - gap) / gap).ln();
    (0..n)
        .map(|i| {
            let s = -l + 2.0 * l * i as f64 / (n - 1).max(1) as f64;
            lo + (hi - lo) / (1.0 + (-s).exp())
        })
        .collect()
}

/// CSV rows `h,I0,I2,J0,J2` over a level grid.
pub fn periods_csv(case: AnnulusCase, levels: &[f64], tol: f64) -> Result<String, PeriodError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["h", "I0", "I2", "J0", "J2"]).expect("in-memory write");
    for &h in levels {
        let v = periods_real_f64(case, h, tol)?;
        w.write_record(
            std::iter::once(h)
                .chain(v)
                .map(|x| format!("{x:.17e}")),
        )
        .expect("in-memory write");
    }
    Ok(String::from_utf8(w.into_inner().expect("flush")).expect("ascii"))
}
