//! Argument principle for `F = p~ J_2/J_0 + q~` on the truncated slit plane.
//!
//! The contour bounds `{|h| <= R}` minus the `delta`-neighbourhood of `(-inf, 0]` and is
//! walked counterclockwise in five pieces: the upper arc of `|h| = R`, the upper slit edge
//! towards 0, the small half circle around 0, the lower slit edge and the lower arc. The
//! periods are continued from node to node, so every node carries its branch.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{VElement, ZeroError};
use crate::elliptic::{track_branch, BranchTracker, ContinuationError};
use crate::forms::AnnulusCase;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContourSpec {
    pub radius: f64,
    pub slit_half_width: f64,
    /// Nodes per piece before refinement.
    pub initial_per_piece: usize,
    pub max_samples: usize,
    pub tol: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec {
            radius: 1e3,
            slit_half_width: 1e-3,
            initial_per_piece: 64,
            max_samples: 200_000,
            tol: 1e-12,
        }
    }
}

const PIECES: f64 = 5.0;
/// Largest argument step of `F` between neighbouring nodes.
const MAX_ARG_STEP: f64 = FRAC_PI_4;
/// Largest relative change of `J_0` or `J_2` between neighbouring nodes.
const MAX_PERIOD_STEP: f64 = 0.05;
/// Smallest parameter gap before refinement gives up.
const MIN_GAP: f64 = 1e-13;

impl ContourSpec {
    /// Point of the contour at parameter `t in [0, 5]`; `t = 0` and `t = 5` both give `R`.
    pub fn point(&self, t: f64) -> Complex64 {
        let (r, d) = (self.radius, self.slit_half_width);
        let phi = PI - (d / r).asin();
        let edge = (r * r - d * d).sqrt();
        let piece = (t.floor() as i64).clamp(0, 4);
        let u = t - piece as f64;
        // |Re h| graded logarithmically on the scale delta
        let edge_x = |s: f64| -d * ((edge / d + 1.0).powf(s) - 1.0);
        match piece {
            0 => Complex64::from_polar(r, phi * u),
            1 => Complex64::new(edge_x(1.0 - u), d),
            2 => Complex64::from_polar(d, PI * (0.5 - u)),
            3 => Complex64::new(edge_x(u), -d),
            _ => Complex64::from_polar(r, -phi * (1.0 - u)),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    t: f64,
    h: Complex64,
    j0: Complex64,
    j2: Complex64,
    tracker: BranchTracker,
}

/// Contour nodes with their continued periods, reusable across elements.
#[derive(Clone, Debug)]
pub struct ContourSampler {
    pub spec: ContourSpec,
    pub case: AnnulusCase,
    nodes: Vec<Node>,
}

impl ContourSampler {
    pub fn new(spec: ContourSpec) -> Result<Self, ZeroError> {
        let case = AnnulusCase::EightExterior;
        let mut tracker = track_branch(case, spec.point(0.0))?;
        let n = spec.initial_per_piece.max(4) * PIECES as usize;
        let mut nodes = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = PIECES * i as f64 / n as f64;
            let h = spec.point(t);
            tracker.advance_to(h)?;
            let p = tracker.periods(spec.tol)?;
            nodes.push(Node {
                t,
                h,
                j0: p.j0,
                j2: p.j2,
                tracker,
            });
        }
        let mut s = ContourSampler { spec, case, nodes };
        s.refine_where(|a, b| {
            let rel = |x: Complex64, y: Complex64| (x - y).norm() / x.norm().min(y.norm());
            rel(a.j0, b.j0) > MAX_PERIOD_STEP || rel(a.j2, b.j2) > MAX_PERIOD_STEP
        })?;
        let (first, last) = (s.nodes[0], s.nodes[s.nodes.len() - 1]);
        let mismatch = (first.j0 - last.j0).norm() / first.j0.norm();
        if mismatch > 1e-8 {
            return Err(ContinuationError::Extrapolation { change: mismatch }.into());
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Bisects every gap flagged by `split` until none is left.
    fn refine_where<F: Fn(&Node, &Node) -> bool>(&mut self, split: F) -> Result<(), ZeroError> {
        loop {
            let gaps: Vec<usize> = (0..self.nodes.len() - 1)
                .filter(|&i| split(&self.nodes[i], &self.nodes[i + 1]))
                .collect();
            if gaps.is_empty() {
                return Ok(());
            }
            self.bisect_gaps(&gaps)?;
        }
    }

    fn bisect_gaps(&mut self, gaps: &[usize]) -> Result<(), ZeroError> {
        if self.nodes.len() + gaps.len() > self.spec.max_samples {
            return Err(ZeroError::RefinementBudget {
                samples: self.nodes.len() + gaps.len(),
            });
        }
        let spec = self.spec;
        let fresh = gaps
            .par_iter()
            .map(|&i| {
                let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
                if b.t - a.t < MIN_GAP {
                    return Err(ZeroError::RefinementBudget {
                        samples: self.nodes.len(),
                    });
                }
                let t = 0.5 * (a.t + b.t);
                let h = spec.point(t);
                let mut tracker = a.tracker;
                tracker.advance_to(h)?;
                let p = tracker.periods(spec.tol)?;
                Ok(Node {
                    t,
                    h,
                    j0: p.j0,
                    j2: p.j2,
                    tracker,
                })
            })
            .collect::<Result<Vec<_>, ZeroError>>()?;
        let mut merged = Vec::with_capacity(self.nodes.len() + fresh.len());
        let mut next = fresh.into_iter().peekable();
        for (i, node) in self.nodes.iter().enumerate() {
            merged.push(*node);
            if next.peek().is_some() && gaps.binary_search(&i).is_ok() {
                merged.push(next.next().expect("peeked"));
            }
        }
        self.nodes = merged;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WindingReport {
    pub winding: f64,
    pub zero_bound_estimate: i64,
    pub samples: usize,
    pub spec: ContourSpec,
    /// The count covers `|h| <= R` outside the `delta`-neighbourhood of the slit only.
    pub domain: String,
}

fn eval_poly(c: &[f64; 3], h: Complex64) -> Complex64 {
    (h * c[2] + c[1]) * h + c[0]
}

/// Winding number of `F = p~ J_2/J_0 + q~` along the contour of `sampler`, refining the
/// shared nodes until every argument step is below `pi/4`.
pub fn winding_number_f(e: &VElement, sampler: &mut ContourSampler) -> Result<WindingReport, ZeroError> {
    if e.case != AnnulusCase::EightExterior {
        return Err(ZeroError::NotEightLoop(e.case));
    }
    if e.is_zero() {
        return Err(ZeroError::IdenticallyZero);
    }
    let (p, q) = e.coeffs_f64();
    let tol = sampler.spec.tol;
    let f = move |n: &Node| -> Result<Complex64, ZeroError> {
        let a = eval_poly(&p, n.h) * n.j2 / n.j0;
        let b = eval_poly(&q, n.h);
        let v = a + b;
        if v.norm() <= 1e3 * tol * (a.norm() + b.norm()) {
            return Err(ZeroError::ContourHitsZero { h: n.h });
        }
        Ok(v)
    };
    loop {
        let vals = sampler.nodes.iter().map(&f).collect::<Result<Vec<_>, _>>()?;
        let gaps: Vec<usize> = (0..vals.len() - 1)
            .filter(|&i| (vals[i + 1] / vals[i]).arg().abs() > MAX_ARG_STEP)
            .collect();
        if gaps.is_empty() {
            let total: f64 = vals.windows(2).map(|w| (w[1] / w[0]).arg()).sum();
            let winding = total / (2.0 * PI);
            return Ok(WindingReport {
                winding,
                zero_bound_estimate: winding.round() as i64,
                samples: vals.len(),
                spec: sampler.spec,
                domain: format!(
                    "|h| <= {} minus the {}-neighbourhood of (-inf, 0]",
                    sampler.spec.radius, sampler.spec.slit_half_width
                ),
            });
        }
        sampler.bisect_gaps(&gaps)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Rational;

    #[test]
    fn contour_is_closed_and_continuous() {
        let s = ContourSpec::default();
        assert!((s.point(0.0) - s.point(5.0)).norm() < 1e-9);
        for k in 1..5 {
            let t = k as f64;
            assert!((s.point(t - 1e-12) - s.point(t)).norm() < 1e-6, "{k}");
        }
        assert!((s.point(2.5) - Complex64::new(1e-3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn constant_has_winding_zero() {
        let mut sampler = ContourSampler::new(ContourSpec::default()).unwrap();
        let z = Rational::zero();
        let e = VElement::from_coeffs(
            AnnulusCase::EightExterior,
            [z.clone(), z.clone(), z.clone()],
            [Rational::one(), z.clone(), z],
        );
        let w = winding_number_f(&e, &mut sampler).unwrap();
        assert!(w.winding.abs() < 1e-9);
        assert_eq!(w.zero_bound_estimate, 0);
    }

    #[test]
    fn linear_q_has_one_zero() {
        // F = h - 2 vanishes once inside the truncated domain
        let mut sampler = ContourSampler::new(ContourSpec::default()).unwrap();
        let z = Rational::zero();
        let e = VElement::from_coeffs(
            AnnulusCase::EightExterior,
            [z.clone(), z.clone(), z.clone()],
            [Rational::integer(-2), Rational::one(), z],
        );
        let w = winding_number_f(&e, &mut sampler).unwrap();
        assert!((w.winding - 1.0).abs() < 1e-6, "{w:?}");
    }

    #[test]
    fn random_windings_bound_the_real_zeros() {
        use crate::elliptic::log_grid;
        use crate::zeros::{count_zeros_with, random_velement, Integrand, PeriodTable, SCAN_TOL};
        use rand::SeedableRng;
        let mut sampler = ContourSampler::new(ContourSpec::default()).unwrap();
        let spec = sampler.spec;
        let levels = log_grid(spec.slit_half_width * 1.0001, spec.radius * 0.9999, 400);
        let table = PeriodTable::new(AnnulusCase::EightExterior, levels, SCAN_TOL).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let e = random_velement(AnnulusCase::EightExterior, Integrand::Derivative, &mut rng, SCAN_TOL).unwrap();
            let w = winding_number_f(&e, &mut sampler).unwrap();
            let real = count_zeros_with(&e, Integrand::Derivative, &table).unwrap();
            assert!((w.winding - w.zero_bound_estimate as f64).abs() < 0.05);
            assert!(w.zero_bound_estimate <= 5 && real.count as i64 <= w.zero_bound_estimate, "{w:?} {real:?}");
        }
    }
}
