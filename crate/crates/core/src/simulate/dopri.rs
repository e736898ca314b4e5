//! Dormand-Prince 5(4) with the standard fifth-order dense output.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegratorError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Accepted step `[t0, t0 + h]` with its interpolant.
#[derive(Clone, Copy, Debug)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    cont: [[f64; N]; 5],
}

impl<const N: usize> Step<N> {
    /// Dense output at `t in [t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.cont;
        std::array::from_fn(|i| r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i]))))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Dopri5 {
            rtol,
            atol,
            h_max: f64::INFINITY,
        }
    }

    /// Integrates from `(t0, y0)` and hands every accepted step to `visit`, stopping when
    /// it returns `false` or after `max_steps` accepted steps. Returns the number of steps.
    pub fn run<const N: usize, F, V>(
        &self,
        f: F,
        t0: f64,
        y0: [f64; N],
        max_steps: usize,
        mut visit: V,
    ) -> Result<usize, IntegratorError>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        V: FnMut(&Step<N>) -> bool,
    {
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = self.initial_step(&f, t, &y, &k1);
        let mut accepted = 0;
        while accepted < max_steps {
            let mut k = [[0.0; N]; 7];
            k[0] = k1;
            for s in 1..7 {
                let ys: [f64; N] = std::array::from_fn(|i| {
                    y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>()
                });
                k[s] = f(t + C[s] * h, &ys);
            }
            // the last stage is evaluated at the fifth-order solution
            let y1: [f64; N] = std::array::from_fn(|i| {
                y[i] + h * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>()
            });
            let err = (0..N)
                .map(|i| {
                    let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
                    let sc = self.atol + self.rtol * y[i].abs().max(y1[i].abs());
                    (e / sc).powi(2)
                })
                .sum::<f64>()
                / N as f64;
            let err = err.sqrt();
            if !err.is_finite() {
                return Err(IntegratorError::NonFinite { t });
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 10.0);
            if err <= 1.0 {
                let diff: [f64; N] = std::array::from_fn(|i| y1[i] - y[i]);
                let bspl: [f64; N] = std::array::from_fn(|i| h * k[0][i] - diff[i]);
                let step = Step {
                    t0: t,
                    h,
                    y0: y,
                    y1,
                    cont: [
                        y,
                        diff,
                        bspl,
                        std::array::from_fn(|i| diff[i] - h * k[6][i] - bspl[i]),
                        std::array::from_fn(|i| h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>()),
                    ],
                };
                accepted += 1;
                t += h;
                y = y1;
                k1 = k[6];
                if !visit(&step) {
                    return Ok(accepted);
                }
                h = (h * fac).min(self.h_max);
            } else {
                h *= fac.min(1.0);
                if h.abs() < 1e-14 * t.abs().max(1.0) {
                    return Err(IntegratorError::StepUnderflow { t });
                }
            }
        }
        Ok(accepted)
    }

    fn initial_step<const N: usize, F>(&self, f: &F, t: f64, y: &[f64; N], k1: &[f64; N]) -> f64
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let sc = |i: usize| self.atol + self.rtol * y[i].abs();
        let norm = |v: &[f64; N]| ((0..N).map(|i| (v[i] / sc(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
        let (d0, d1) = (norm(y), norm(k1));
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1: [f64; N] = std::array::from_fn(|i| y[i] + h0 * k1[i]);
        let k2 = f(t + h0, &y1);
        let d2 = norm(&std::array::from_fn(|i| k2[i] - k1[i])) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.h_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_and_dense_output() {
        let solver = Dopri5::new(1e-12, 1e-14);
        let mut last = None;
        solver
            .run(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 10_000, |s| {
                // dense output inside each step
                let tm = s.t0 + 0.37 * s.h;
                assert!((s.eval(tm)[0] - tm.exp()).abs() < 1e-9 * tm.exp());
                last = Some(*s);
                s.t0 + s.h < 2.0
            })
            .unwrap();
        let s = last.unwrap();
        let t1 = s.t0 + s.h;
        assert!((s.y1[0] - t1.exp()).abs() < 1e-10 * t1.exp());
    }

    #[test]
    fn harmonic_oscillator_period() {
        let solver = Dopri5::new(1e-12, 1e-14);
        let mut state = [0.0; 2];
        let mut time = 0.0;
        solver
            .run(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 100_000, |s| {
                state = s.y1;
                time = s.t0 + s.h;
                time < 2.0 * std::f64::consts::PI
            })
            .unwrap();
        let exact = [time.cos(), -time.sin()];
        assert!((state[0] - exact[0]).abs() < 1e-10 && (state[1] - exact[1]).abs() < 1e-10);
    }
}
