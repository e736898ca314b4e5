//! Direct integration of the perturbed system
//!
//! ```text
//! x' = y,   y' = -a x - b x^3 + eps (l1 + l2 x^2 + l3 y^2 + l4 x^4 + l5 y^4 + l6 x^6) y
//! ```
//!
//! with a Poincare section on `y = 0`, limit-cycle detection from the sign of the
//! displacement `d = H(return) - H(start)`, and comparison with Melnikov predictions.

mod dopri;

pub use dopri::{Dopri5, IntegratorError, Step};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::elliptic::{oval_geometry, periods_real_f64, PeriodError};
use crate::exactalg::{solve_linear_exact, Rational};
use crate::forms::{AnnulusCase, ReduceError};
use crate::francoise::{first_order_basis, melnikov, MelnikovOutcome, ParamArc};
use crate::zeros::{count_zeros_with, interpolating_element, Integrand, PeriodTable, VElement, ZeroError, SCAN_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("start point ({x0}, 0) is not on an oval of the annulus crossing the section")]
    OutsideAnnulus { x0: f64 },
    #[error("escaped annulus: no return to the section from x0 = {x0} within {steps} steps")]
    Escaped { x0: f64, steps: usize },
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error(transparent)]
    Zeros(#[from] ZeroError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("the arc has no nonvanishing Melnikov function up to order {0}")]
    NoMelnikovOrder(u32),
    #[error("the element is not a first-order Melnikov function")]
    NotInSpan,
}

/// The half line `y = 0`, `x` in `x_range`, crossed in the direction of the flow at the start.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Section {
    pub x_range: [f64; 2],
}

impl Section {
    pub fn contains(&self, x: f64) -> bool {
        x > self.x_range[0] && x < self.x_range[1]
    }

    /// `x > 0` except for the truncated pendulum, which stays inside the saddles.
    pub fn for_case(case: AnnulusCase) -> Self {
        match case {
            AnnulusCase::TruncatedPendulum => Section { x_range: [0.0, 1.0] },
            _ => Section {
                x_range: [0.0, f64::INFINITY],
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimConfig {
    pub case: AnnulusCase,
    pub lambda: [f64; 6],
    pub eps: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Event-time tolerance of the section crossing.
    pub event_tol: f64,
    pub section: Section,
    pub max_steps: usize,
}

impl SimConfig {
    pub fn new(case: AnnulusCase, lambda: [f64; 6], eps: f64) -> Self {
        SimConfig {
            case,
            lambda,
            eps,
            rtol: 1e-12,
            atol: 1e-14,
            event_tol: 1e-12,
            section: Section::for_case(case),
            max_steps: 200_000,
        }
    }

    pub fn hamiltonian(&self, x: f64, y: f64) -> f64 {
        let (a, b) = (self.case.a_f64(), self.case.b_f64());
        0.5 * y * y + 0.5 * a * x * x + 0.25 * b * x.powi(4)
    }

    pub fn field(&self, s: &[f64; 2]) -> [f64; 2] {
        let [x, y, _] = self.extended_field(&[s[0], s[1], 0.0]);
        [x, y]
    }

    /// The field together with `dH/dt / eps = pert(x, y) y^2`.
    fn extended_field(&self, s: &[f64; 3]) -> [f64; 3] {
        let [x, y, _] = *s;
        let (a, b) = (self.case.a_f64(), self.case.b_f64());
        let l = &self.lambda;
        let (x2, y2) = (x * x, y * y);
        let pert = l[0] + l[1] * x2 + l[2] * y2 + l[3] * x2 * x2 + l[4] * y2 * y2 + l[5] * x2 * x2 * x2;
        [y, -a * x - b * x * x2 + self.eps * pert * y, pert * y2]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DisplacementSample {
    pub x0: f64,
    pub h: f64,
    /// `H(return) - H(start)`, accumulated as `eps * int pert(x, y) y^2 dt` along the orbit.
    pub d: f64,
    /// The same difference taken directly from the end points; limited by cancellation.
    pub d_energy: f64,
    pub return_time: f64,
}

/// Trajectories leaving this box are treated as escaped.
const ESCAPE_RADIUS: f64 = 1e3;

/// First return of `(x0, 0)` to the section in the same direction.
pub fn poincare_return(cfg: &SimConfig, x0: f64) -> Result<DisplacementSample, SimError> {
    let h0 = cfg.hamiltonian(x0, 0.0);
    let dir = cfg.field(&[x0, 0.0])[1];
    if !cfg.section.contains(x0) || !cfg.case.interval().contains(h0) || dir == 0.0 {
        return Err(SimError::OutsideAnnulus { x0 });
    }
    let down = dir < 0.0;
    let solver = Dopri5::new(cfg.rtol, cfg.atol);
    let mut hit: Option<Step<3>> = None;
    let mut escaped = false;
    let rhs = |_t: f64, s: &[f64; 3]| cfg.extended_field(s);
    solver.run(rhs, 0.0, [x0, 0.0, 0.0], cfg.max_steps, |s| {
        let (ya, yb) = (s.y0[1], s.y1[1]);
        let crossed = if down { ya > 0.0 && yb <= 0.0 } else { ya < 0.0 && yb >= 0.0 };
        if crossed && cfg.section.contains(s.y1[0]) {
            hit = Some(*s);
            return false;
        }
        if s.y1[0].abs() > ESCAPE_RADIUS || s.y1[1].abs() > ESCAPE_RADIUS {
            escaped = true;
            return false;
        }
        true
    })?;
    let step = match hit {
        Some(s) if !escaped => s,
        _ => {
            return Err(SimError::Escaped {
                x0,
                steps: cfg.max_steps,
            })
        }
    };
    // the crossing time by bisection on the interpolant's y component
    let (mut lo, mut hi) = (step.t0, step.t0 + step.h);
    let ylo = step.y0[1];
    while hi - lo > cfg.event_tol {
        let mid = 0.5 * (lo + hi);
        let ym = step.eval(mid)[1];
        if (ym > 0.0) == (ylo > 0.0) && ym != 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let [x, y, work] = step.eval(t);
    Ok(DisplacementSample {
        x0,
        h: h0,
        d: cfg.eps * work,
        d_energy: cfg.hamiltonian(x, y) - h0,
        return_time: t,
    })
}

/// Section point of the oval `H = h` where the flow crosses `y = 0` downwards for `x > 0`.
pub fn section_point(case: AnnulusCase, h: f64) -> Result<f64, SimError> {
    Ok(oval_geometry(case, h)?.segment[1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitCycle {
    pub h: f64,
    pub x0: f64,
    pub stability: Stability,
}

/// Displacement on `grid` section points spread evenly in `h` over `window`.
pub fn displacement_scan(cfg: &SimConfig, window: [f64; 2], grid: usize) -> Result<Vec<DisplacementSample>, SimError> {
    let n = grid.max(2);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let h = window[0] + (window[1] - window[0]) * i as f64 / (n - 1) as f64;
            poincare_return(cfg, section_point(cfg.case, h)?)
        })
        .collect()
}

const CYCLE_BISECTION_STEPS: usize = 60;

/// Sign changes of the displacement over `window`, refined by bisection in `x0`.
pub fn find_limit_cycles(cfg: &SimConfig, window: [f64; 2], grid: usize) -> Result<Vec<LimitCycle>, SimError> {
    if cfg.eps == 0.0 {
        return Ok(Vec::new());
    }
    let samples = displacement_scan(cfg, window, grid.max(100))?;
    let brackets: Vec<(DisplacementSample, DisplacementSample)> = samples
        .windows(2)
        .filter(|w| (w[0].d > 0.0) != (w[1].d > 0.0))
        .map(|w| (w[0], w[1]))
        .collect();
    brackets
        .into_par_iter()
        .map(|(mut a, mut b)| {
            let stability = if a.d > 0.0 { Stability::Stable } else { Stability::Unstable };
            for _ in 0..CYCLE_BISECTION_STEPS {
                let mid = 0.5 * (a.x0 + b.x0);
                if mid == a.x0 || mid == b.x0 {
                    break;
                }
                let m = poincare_return(cfg, mid)?;
                if (m.d > 0.0) == (a.d > 0.0) {
                    a = m;
                } else {
                    b = m;
                }
            }
            let x0 = 0.5 * (a.x0 + b.x0);
            Ok(LimitCycle {
                h: cfg.hamiltonian(x0, 0.0),
                x0,
                stability,
            })
        })
        .collect()
}

/// `lambda_j(eps)` in floating point.
pub fn lambda_at(arc: &ParamArc, eps: f64) -> [f64; 6] {
    std::array::from_fn(|j| arc.series()[j].eval_f64(eps))
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsDeviation {
    pub eps: f64,
    /// `max_h |d/eps^n - M_n| / max_h |M_n|`.
    pub max_rel_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub case: AnnulusCase,
    pub order: u32,
    pub levels: Vec<f64>,
    pub melnikov: Vec<f64>,
    pub deviations: Vec<EpsDeviation>,
    /// `log2` of successive deviation ratios under eps-halving.
    pub convergence_orders: Vec<f64>,
}

/// Fits `d(h, eps)/eps^n` against `M_n = p I_2 + q I_0`.
pub fn melnikov_validation(
    case: AnnulusCase,
    arc: &ParamArc,
    eps_family: &[f64],
    levels: &[f64],
    max_order: u32,
) -> Result<ValidationReport, SimError> {
    let res = match melnikov(arc, case, max_order)? {
        MelnikovOutcome::Nonzero(r) => r,
        MelnikovOutcome::AllVanish { .. } => return Err(SimError::NoMelnikovOrder(max_order)),
    };
    let m: Vec<f64> = levels
        .iter()
        .map(|&h| {
            let per = periods_real_f64(case, h, 1e-13)?;
            Ok(res.p.eval_f64(h) * per[1] + res.q.eval_f64(h) * per[0])
        })
        .collect::<Result<_, SimError>>()?;
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let mut deviations = Vec::new();
    for &eps in eps_family {
        let cfg = SimConfig::new(case, lambda_at(arc, eps), 1.0);
        let d: Vec<f64> = levels
            .par_iter()
            .map(|&h| Ok(poincare_return(&cfg, section_point(case, h)?)?.d))
            .collect::<Result<_, SimError>>()?;
        let en = eps.powi(res.order as i32);
        let dev = d
            .iter()
            .zip(&m)
            .map(|(d, m)| (d / en - m).abs())
            .fold(0.0f64, f64::max);
        deviations.push(EpsDeviation {
            eps,
            max_rel_deviation: dev / scale,
        });
    }
    let convergence_orders = deviations
        .windows(2)
        .map(|w| (w[0].max_rel_deviation / w[1].max_rel_deviation).ln() / (w[0].eps / w[1].eps).ln())
        .collect();
    Ok(ValidationReport {
        case,
        order: res.order,
        levels: levels.to_vec(),
        melnikov: m,
        deviations,
        convergence_orders,
    })
}

/// A parameter vector whose first Melnikov function has prescribed zeros.
#[derive(Clone, Debug)]
pub struct ConstructedConfig {
    pub case: AnnulusCase,
    pub lambda: [f64; 6],
    pub m1: VElement,
    /// Level window in which cycles are counted.
    pub window: [f64; 2],
    /// Zeros of `M_1` in the window, from the real scan.
    pub predicted: Vec<f64>,
}

/// Solves `sum_j lambda_j (p_j, q_j) = (p, q)` over the first-order basis, exactly.
pub fn lambda_for_m1(e: &VElement) -> Result<[Rational; 6], SimError> {
    let basis = first_order_basis(e.case)?;
    let coeffs = |p: &crate::exactalg::PolyU, q: &crate::exactalg::PolyU| -> Vec<Rational> {
        (0..3).map(|k| p.coeff(k)).chain((0..3).map(|k| q.coeff(k))).collect()
    };
    let cols: Vec<Vec<Rational>> = basis.iter().map(|(p, q)| coeffs(p, q)).collect();
    let a: Vec<Vec<Rational>> = (0..6).map(|r| (0..6).map(|j| cols[j][r].clone()).collect()).collect();
    // the span misses h^2 I_2, so the solution is unique only up to the center direction
    match solve_linear_exact(&a, &coeffs(&e.p, &e.q)).into_values() {
        Some(v) => Ok(std::array::from_fn(|j| v[j].clone())),
        None => Err(SimError::NotInSpan),
    }
}

/// Builds `lambda` with `M_1` vanishing at `zeros`, scaled so the perturbation stays of
/// order one on the ovals of `window`.
pub fn constructed_configuration(case: AnnulusCase, zeros: &[f64], window: [f64; 2]) -> Result<ConstructedConfig, SimError> {
    let m1 = interpolating_element(case, Integrand::Abelian, zeros, SCAN_TOL)?;
    let exact = lambda_for_m1(&m1)?;
    let raw: [f64; 6] = std::array::from_fn(|j| exact[j].to_f64());
    // monomial sizes on the outermost oval of the window
    let xm = section_point(case, window[1])?;
    let vmin = if case.a_f64() < 0.0 { -0.25 } else { 0.0 };
    let ym2 = 2.0 * (window[1] - vmin);
    let sizes = [1.0, xm * xm, ym2, xm.powi(4), ym2 * ym2, xm.powi(6)];
    let scale = raw.iter().zip(sizes).map(|(l, s)| l.abs() * s).fold(0.0f64, f64::max);
    let lambda = raw.map(|l| l / scale);
    let levels: Vec<f64> = (0..400)
        .map(|i| window[0] + (window[1] - window[0]) * i as f64 / 399.0)
        .collect();
    let table = PeriodTable::new(case, levels, SCAN_TOL)?;
    let report = count_zeros_with(&m1, Integrand::Abelian, &table)?;
    Ok(ConstructedConfig {
        case,
        lambda,
        m1,
        window,
        predicted: report.locations.iter().map(|l| l.h).collect(),
    })
}

/// The five configurations used for cross-validation: 1 to 4 prescribed zeros over the four
/// annuli.
pub fn standard_configurations() -> Result<Vec<ConstructedConfig>, SimError> {
    use AnnulusCase::*;
    let specs: [(AnnulusCase, Vec<f64>, [f64; 2]); 5] = [
        (GlobalCenter, vec![0.5], [0.1, 1.5]),
        (TruncatedPendulum, vec![0.06, 0.15], [0.02, 0.2]),
        (EightInterior, vec![-0.2, -0.13, -0.06], [-0.23, -0.03]),
        (EightExterior, vec![0.2, 0.5, 0.9, 1.4], [0.1, 1.7]),
        (GlobalCenter, vec![0.2, 0.45, 0.8, 1.2], [0.1, 1.5]),
    ];
    specs
        .into_iter()
        .map(|(case, zeros, window)| constructed_configuration(case, &zeros, window))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{q, PolyU, Rational};

    #[test]
    fn energy_is_conserved_without_perturbation() {
        for case in AnnulusCase::ALL {
            let cfg = SimConfig::new(case, [1.0; 6], 0.0);
            let h = match case {
                AnnulusCase::TruncatedPendulum => 0.15,
                AnnulusCase::EightInterior => -0.1,
                _ => 0.7,
            };
            let s = poincare_return(&cfg, section_point(case, h).unwrap()).unwrap();
            assert!(s.d_energy.abs() < 1e-10, "{case} {s:?}");
            assert_eq!(s.d, 0.0);
            assert!(s.return_time > 0.0);
        }
    }

    #[test]
    fn constant_damping_pumps_energy() {
        let cfg = SimConfig::new(AnnulusCase::GlobalCenter, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1e-3);
        for h in [0.01, 0.1, 0.5] {
            let s = poincare_return(&cfg, section_point(AnnulusCase::GlobalCenter, h).unwrap()).unwrap();
            let per = periods_real_f64(AnnulusCase::GlobalCenter, h, 1e-13).unwrap();
            assert!(s.d > 0.0);
            assert!((s.d / 1e-3 - per[0]).abs() < 1e-2 * per[0], "{h}: {} vs {}", s.d / 1e-3, per[0]);
        }
    }

    #[test]
    fn central_symmetry_on_the_interior() {
        let mut cfg = SimConfig::new(AnnulusCase::EightInterior, [0.3, -1.0, 0.5, 0.2, 0.1, -0.05], 1e-2);
        let x0 = section_point(AnnulusCase::EightInterior, -0.1).unwrap();
        let right = poincare_return(&cfg, x0).unwrap();
        cfg.section = Section {
            x_range: [f64::NEG_INFINITY, 0.0],
        };
        let left = poincare_return(&cfg, -x0).unwrap();
        assert!((right.d - left.d).abs() < 1e-10 * right.d.abs().max(1e-6), "{right:?} {left:?}");
    }

    #[test]
    fn unperturbed_has_no_cycles() {
        let cfg = SimConfig::new(AnnulusCase::GlobalCenter, [1.0; 6], 0.0);
        assert!(find_limit_cycles(&cfg, [0.1, 1.0], 100).unwrap().is_empty());
    }

    #[test]
    fn single_cycle_matches_melnikov_zero() {
        // M_1 = 2 I_2 - I_0
        let case = AnnulusCase::GlobalCenter;
        let lambda = [-1.0, 2.0, 0.0, 0.0, 0.0, 0.0];
        let exact = [q(-1, 1), q(2, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1)];
        let arc = ParamArc::from_coefficients(&exact.iter().map(|c| vec![c.clone()]).collect::<Vec<_>>()).unwrap();
        let r = melnikov(&arc, case, 1).unwrap().into_result().unwrap();
        let e = VElement::new(case, r.p, r.q).unwrap();
        let table = PeriodTable::new(case, (1..400).map(|i| i as f64 * 0.01).collect(), SCAN_TOL).unwrap();
        let zeros = count_zeros_with(&e, Integrand::Abelian, &table).unwrap();
        assert_eq!(zeros.count, 1);
        let hz = zeros.locations[0].h;
        let cfg = SimConfig::new(case, lambda, 1e-3);
        let cycles = find_limit_cycles(&cfg, [0.05, 3.9], 100).unwrap();
        assert_eq!(cycles.len(), 1, "{cycles:?} vs {hz}");
        assert!((cycles[0].h - hz).abs() < 1e-2 * hz, "{cycles:?} vs {hz}");
        // M_1 < 0 inside the cycle and > 0 outside
        assert_eq!(cycles[0].stability, Stability::Unstable);
        let flipped = SimConfig::new(case, lambda.map(|l| -l), 1e-3);
        let cycles = find_limit_cycles(&flipped, [0.05, 3.9], 100).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].stability, Stability::Stable);
    }

    #[test]
    fn lambda_for_m1_reproduces_the_element() {
        for case in AnnulusCase::ALL {
            let basis = first_order_basis(case).unwrap();
            let (p, qq) = (&basis[4].0, &basis[4].1);
            let target = VElement::new(case, p.add(&basis[1].0).unwrap(), qq.add(&basis[1].1).unwrap()).unwrap();
            let l = lambda_for_m1(&target).unwrap();
            let mut sp = PolyU::zero(p.var());
            let mut sq = PolyU::zero(qq.var());
            for (j, (bp, bq)) in basis.iter().enumerate() {
                sp = sp.add(&bp.scale(&l[j])).unwrap();
                sq = sq.add(&bq.scale(&l[j])).unwrap();
            }
            assert_eq!((sp, sq), (target.p.clone(), target.q.clone()), "{case}");
        }
    }

    #[test]
    fn h_squared_i2_is_not_first_order() {
        let z = Rational::zero;
        let e = VElement::from_coeffs(AnnulusCase::GlobalCenter, [z(), z(), Rational::one()], [z(), z(), z()]);
        assert_eq!(lambda_for_m1(&e), Err(SimError::NotInSpan));
    }

    #[test]
    fn lambda_six_alone_has_no_cycle() {
        // (4/3 h + 32/21) I_2 - 16/21 h I_0 stays positive on the whole annulus
        let case = AnnulusCase::GlobalCenter;
        let r = melnikov(&ParamArc::basis(6, q(1, 1)), case, 1).unwrap().into_result().unwrap();
        let e = VElement::new(case, r.p, r.q).unwrap();
        let table = PeriodTable::for_scan(case, 400, SCAN_TOL).unwrap();
        assert_eq!(count_zeros_with(&e, Integrand::Abelian, &table).unwrap().count, 0);
        let cfg = SimConfig::new(case, [0.0, 0.0, 0.0, 0.0, 0.0, 1.0], 1e-3);
        assert!(find_limit_cycles(&cfg, [0.05, 3.0], 100).unwrap().is_empty());
        let s = poincare_return(&cfg, section_point(case, 1.0).unwrap()).unwrap();
        assert!(s.d > 0.0);
    }

    #[test]
    fn validation_orders() {
        let case = AnnulusCase::GlobalCenter;
        let levels: Vec<f64> = (1..=10).map(|i| 0.2 * i as f64).collect();
        let eps = [1e-2, 5e-3, 2.5e-3];
        let r1 = melnikov_validation(case, &ParamArc::basis(1, q(1, 1)), &eps, &levels, 3).unwrap();
        assert_eq!(r1.order, 1);
        assert!(r1.convergence_orders.iter().all(|o| (o - 1.0).abs() < 0.1), "{r1:?}");
        let cubic = ParamArc::from_coefficients(&[vec![], vec![q(-3, 1)], vec![q(1, 1)], vec![q(-3, 1)], vec![], vec![]]).unwrap();
        let r3 = melnikov_validation(case, &cubic, &eps, &levels, 5).unwrap();
        assert_eq!(r3.order, 3);
        assert!(r3.deviations[2].max_rel_deviation < 1e-3, "{r3:?}");
        assert!(r3.convergence_orders.iter().all(|o| *o >= 1.0), "{r3:?}");
    }

    #[test]
    fn zero_arc_has_no_melnikov_order() {
        let levels = [0.5];
        let err = melnikov_validation(AnnulusCase::GlobalCenter, &ParamArc::zero(), &[1e-2], &levels, 3).unwrap_err();
        assert_eq!(err, SimError::NoMelnikovOrder(3));
    }

    #[test]
    fn accumulated_and_direct_displacement_agree() {
        let cfg = SimConfig::new(AnnulusCase::EightExterior, [0.3, -1.0, 0.5, 0.2, 0.1, -0.05], 1e-2);
        for h in [0.05, 0.5, 2.0] {
            let s = poincare_return(&cfg, section_point(cfg.case, h).unwrap()).unwrap();
            assert!((s.d - s.d_energy).abs() < 1e-10 * h.max(1.0), "{s:?}");
        }
    }
}
