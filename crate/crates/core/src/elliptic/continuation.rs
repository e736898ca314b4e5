//! Analytic continuation of the periods to complex levels.
//!
//! The four roots are followed along a path in `h`, matched step by step to their
//! predecessors, and the sign of the branch constant of `s` is carried by continuity. The
//! integration cycle stays the straight segment `[e1, e2]`; if another root crosses it the
//! straight representative is no longer homotopic to the continued cycle and we stop.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use super::{real_branch, x2_roots, BranchTag, PeriodError, PeriodValue, SegmentBranch};
use crate::forms::AnnulusCase;

/// Reference level for continuation on the exterior eight-loop annulus.
pub const H_REF: f64 = 1.0;

/// Off-axis offsets used for boundary values on the cut.
pub const DELTAS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContinuationError {
    #[error("contour deformation required at h = {h}: root e{root} crosses the integration segment")]
    DeformationRequired { h: Complex64, root: usize },
    #[error("roots collide near h = {h} (step size underflow)")]
    Collision { h: Complex64 },
    #[error("h = {h} lies on the cut (-inf, 0]")]
    OnCut { h: Complex64 },
    #[error("Richardson extrapolation did not settle (relative change {change:e})")]
    Extrapolation { change: f64 },
}

/// A real level inside the interval of `case`, the start of every continuation path.
pub fn reference_level(case: AnnulusCase) -> f64 {
    match case {
        AnnulusCase::GlobalCenter | AnnulusCase::EightExterior => H_REF,
        AnnulusCase::TruncatedPendulum => 0.125,
        AnnulusCase::EightInterior => -0.125,
    }
}

fn quartic_roots(case: AnnulusCase, h: Complex64) -> [Complex64; 4] {
    let (big, small) = x2_roots(case.a_f64(), case.b_f64(), h);
    let (rb, rs) = (big.sqrt(), small.sqrt());
    [rb, -rb, rs, -rs]
}

const PERMS: [[usize; 4]; 24] = {
    let mut out = [[0; 4]; 24];
    let mut n = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                if a != b && a != c && b != c {
                    let d = 6 - a - b - c;
                    out[n] = [a, b, c, d];
                    n += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

fn min_separation(e: &[Complex64; 4]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..4 {
        for j in i + 1..4 {
            m = m.min((e[i] - e[j]).norm());
        }
    }
    m
}

/// Follows the roots and the branch of `s` from one level to the next.
#[derive(Clone, Copy, Debug)]
pub struct BranchTracker {
    pub case: AnnulusCase,
    pub h: Complex64,
    pub branch: SegmentBranch,
}

impl BranchTracker {
    /// Starts on the real oval at the reference level of `case`.
    pub fn at_reference(case: AnnulusCase) -> Self {
        let h = reference_level(case);
        BranchTracker {
            case,
            h: Complex64::new(h, 0.0),
            branch: real_branch(case, h),
        }
    }

    /// One attempted step; `None` if the roots move too far for a safe match.
    fn try_step(&self, h_new: Complex64) -> Result<Option<SegmentBranch>, ContinuationError> {
        let old = &self.branch;
        let fresh = quartic_roots(self.case, h_new);
        let sep = min_separation(&old.e);
        let (perm, disp) = PERMS
            .iter()
            .map(|p| {
                let d = (0..4)
                    .map(|k| (fresh[p[k]] - old.e[k]).norm())
                    .fold(0.0, f64::max);
                (p, d)
            })
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("24 permutations");
        if disp > 0.1 * sep {
            return Ok(None);
        }
        let mut next = SegmentBranch {
            e: std::array::from_fn(|k| fresh[perm[k]]),
            k: Complex64::new(1.0, 0.0),
            half_b: old.half_b,
        };
        for root in [2, 3] {
            let (z0, z1) = (old.local(root), next.local(root));
            if z0.im.signum() != z1.im.signum() || z1.im == 0.0 {
                let t = if z0.im == z1.im { 1.0 } else { z0.im / (z0.im - z1.im) };
                let re = z0.re + t * (z1.re - z0.re);
                if re.abs() < 1.0 {
                    return Err(ContinuationError::DeformationRequired { h: h_new, root: root + 1 });
                }
            }
        }
        let s_old = old.s(old.centre());
        next.k = next.k_squared().sqrt();
        let s_new = next.s(next.centre());
        if (s_new + s_old).norm() < (s_new - s_old).norm() {
            next.k = -next.k;
        }
        let s_new = next.s(next.centre());
        if (s_new - s_old).norm() > 0.25 * s_old.norm() {
            return Ok(None);
        }
        Ok(Some(next))
    }

    /// Continues along the straight path to `target`.
    pub fn advance_to(&mut self, target: Complex64) -> Result<(), ContinuationError> {
        let start = self.h;
        let mut t = 0.0f64;
        let mut dt = 1.0f64;
        while t < 1.0 {
            let step = dt.min(1.0 - t);
            let h_new = start + (target - start) * (t + step);
            match self.try_step(h_new)? {
                Some(next) => {
                    self.branch = next;
                    self.h = h_new;
                    t += step;
                    dt = step * 2.0;
                }
                None => {
                    dt = step * 0.5;
                    if dt < 1e-13 {
                        return Err(ContinuationError::Collision { h: h_new });
                    }
                }
            }
        }
        self.h = target;
        Ok(())
    }

    pub fn periods(&self, tol: f64) -> Result<PeriodValue, PeriodError> {
        let (v, err) = self.branch.periods(tol)?;
        let branch_tag = if self.h.im > 0.0 {
            BranchTag::PlusSide
        } else if self.h.im < 0.0 {
            BranchTag::MinusSide
        } else {
            BranchTag::RealOval
        };
        Ok(PeriodValue {
            h: self.h,
            case: self.case,
            branch_tag,
            i0: v[0],
            i2: v[1],
            j0: v[2],
            j2: v[3],
            est_error: err,
        })
    }
}

/// Tracker at `h`, reached by the straight path from the reference level.
pub fn track_branch(case: AnnulusCase, h: Complex64) -> Result<BranchTracker, ContinuationError> {
    if case == AnnulusCase::EightExterior && h.im == 0.0 && h.re <= 0.0 {
        return Err(ContinuationError::OnCut { h });
    }
    let mut tr = BranchTracker::at_reference(case);
    tr.advance_to(h)?;
    Ok(tr)
}

pub fn periods_complex(case: AnnulusCase, h: Complex64, tol: f64) -> Result<PeriodValue, PeriodError> {
    track_branch(case, h)?.periods(tol)
}

/// Periods over the cycle vanishing at `h = 0`, for `-1/4 < h < 0` on the eight loop.
///
/// The cycle is the lift of `[-x1, x1]`, where `y` is imaginary. It is oriented so that the
/// jump of the continued exterior cycle across the cut is `+2` times this cycle, which makes
/// `Im J_0 < 0`.
pub fn vanishing_cycle_period(h: f64, tol: f64) -> Result<PeriodValue, PeriodError> {
    let case = AnnulusCase::EightInterior;
    if !case.interval().contains(h) {
        return Err(PeriodError::OutsideInterval { case, h });
    }
    let root = (1.0 + 4.0 * h).sqrt();
    let x1 = (-4.0 * h / (1.0 + root)).sqrt();
    let x2 = (1.0 + root).sqrt();
    let c = |v: f64| Complex64::new(v, 0.0);
    let mut br = SegmentBranch::with_positive_k([c(-x1), c(x1), c(-x2), c(x2)], 0.5);
    // s is imaginary here; J_0 = 2∫1/s gets the sign of -Im s
    if br.s(Complex64::new(0.0, 0.0)).im < 0.0 {
        br.k = -br.k;
    }
    let (v, err) = br.periods(tol)?;
    Ok(PeriodValue {
        h: c(h),
        case: AnnulusCase::EightExterior,
        branch_tag: BranchTag::VanishingCycle,
        i0: v[0],
        i2: v[1],
        j0: v[2],
        j2: v[3],
        est_error: err,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WronskianTag {
    W1,
    W2,
}

#[derive(Clone, Debug, Serialize)]
pub struct WronskianValue {
    pub h: f64,
    pub re: f64,
    pub im: f64,
    pub tag: WronskianTag,
    /// Relative change between the last two extrapolation levels.
    pub extrapolation_change: f64,
}

impl WronskianValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `J_0(h + i d) J_2(h - i d) - J_0(h - i d) J_2(h + i d)` on the eight loop.
pub fn wronskian_at(h: f64, delta: f64, tol: f64) -> Result<Complex64, PeriodError> {
    let case = AnnulusCase::EightExterior;
    let plus = periods_complex(case, Complex64::new(h, delta), tol)?;
    let minus = periods_complex(case, Complex64::new(h, -delta), tol)?;
    Ok(plus.j0 * minus.j2 - minus.j0 * plus.j2)
}

/// Limit `delta -> 0` of `f(delta)` sampled at [`DELTAS`], with the relative change
/// between the two first-order extrapolants.
pub fn extrapolate_delta<const N: usize, F>(f: F) -> Result<([Complex64; N], f64), PeriodError>
where
    F: Fn(f64) -> Result<[Complex64; N], PeriodError>,
{
    let [w0, w1, w2] = [f(DELTAS[0])?, f(DELTAS[1])?, f(DELTAS[2])?];
    let mut best = [Complex64::new(0.0, 0.0); N];
    let mut change = 0.0f64;
    for i in 0..N {
        // delta halves at each level: remove the O(delta) and then the O(delta^2) term
        let a1 = w1[i] * 2.0 - w0[i];
        let a2 = w2[i] * 2.0 - w1[i];
        best[i] = (a2 * 4.0 - a1) / 3.0;
        change = change.max((a2 - a1).norm() / best[i].norm().max(1e-300));
    }
    if !change.is_finite() || change > 1e-3 {
        return Err(ContinuationError::Extrapolation { change }.into());
    }
    Ok((best, change))
}

/// Wronskian boundary value at `h < 0`, extrapolated to `delta -> 0` from [`DELTAS`].
pub fn wronskian(h: f64, tol: f64) -> Result<WronskianValue, PeriodError> {
    let ([best], change) = extrapolate_delta(|d| Ok([wronskian_at(h, d, tol)?]))?;
    Ok(WronskianValue {
        h,
        re: best.re,
        im: best.im,
        tag: if h > -0.25 { WronskianTag::W1 } else { WronskianTag::W2 },
        extrapolation_change: change,
    })
}

/// Jump of `(J_0, J_2)` across the cut at `-1/4 < h < 0` next to twice the vanishing-cycle
/// periods, which it should equal.
#[derive(Clone, Debug, Serialize)]
pub struct JumpCheck {
    pub h: f64,
    pub jump: [[f64; 2]; 2],
    pub twice_vanishing: [[f64; 2]; 2],
    pub relative_error: f64,
}

pub fn picard_lefschetz_check(h: f64, tol: f64) -> Result<JumpCheck, PeriodError> {
    let case = AnnulusCase::EightExterior;
    let (jump, _) = extrapolate_delta(|d| {
        let p = periods_complex(case, Complex64::new(h, d), tol)?;
        let m = periods_complex(case, Complex64::new(h, -d), tol)?;
        Ok([p.j0 - m.j0, p.j2 - m.j2])
    })?;
    let v = vanishing_cycle_period(h, tol)?;
    let twice = [v.j0 * 2.0, v.j2 * 2.0];
    let relative_error = (0..2)
        .map(|i| (jump[i] - twice[i]).norm() / twice[i].norm())
        .fold(0.0, f64::max);
    let pair = |z: Complex64| [z.re, z.im];
    Ok(JumpCheck {
        h,
        jump: jump.map(pair),
        twice_vanishing: twice.map(pair),
        relative_error,
    })
}
