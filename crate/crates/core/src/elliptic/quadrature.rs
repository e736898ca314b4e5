//! Double-exponential (tanh-sinh) quadrature on a finite interval.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("tanh-sinh did not converge on [{a}, {b}] after {levels} levels (last change {last_change:e})")]
pub struct QuadratureError {
    pub a: f64,
    pub b: f64,
    pub levels: u32,
    pub last_change: f64,
}

/// Integral estimate together with the last level-to-level change.
#[derive(Clone, Copy, Debug)]
pub struct Estimate<const N: usize> {
    pub value: [Complex64; N],
    pub error: f64,
    pub evaluations: usize,
}

const MAX_LEVEL: u32 = 12;
const MIN_LEVEL: u32 = 3;
/// Far enough out that integrable endpoint singularities lose less than 1e-18.
const U_MAX: f64 = 4.0;

fn norm<const N: usize>(v: &[Complex64; N]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrates `N` functions sampled together over `[a, b]`.
///
/// Stops when the change between successive halvings of the step falls below
/// `tol * max(|I|, floor)`, componentwise in the max norm. `floor` guards against relative
/// tests on integrals that are exactly zero.
pub fn tanh_sinh<const N: usize, F>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    floor: f64,
) -> Result<Estimate<N>, QuadratureError>
where
    F: Fn(f64) -> [Complex64; N],
{
    let half = 0.5 * (b - a);
    let mut evaluations = 0usize;
    // node at parameter u: offset from the nearer endpoint computed without cancellation
    let mut sample = |u: f64, acc: &mut [Complex64; N]| {
        let s = std::f64::consts::FRAC_PI_2 * u.sinh();
        let cs = s.cosh();
        let w = std::f64::consts::FRAC_PI_2 * u.cosh() / (cs * cs);
        // 1 - tanh(s) = 2 / (1 + e^{2s}) for s > 0
        let gap = 2.0 / (1.0 + (2.0 * s.abs()).exp());
        let x = if s >= 0.0 { b - half * gap } else { a + half * gap };
        if x <= a || x >= b {
            return;
        }
        evaluations += 1;
        let v = f(x);
        for (acc, v) in acc.iter_mut().zip(v) {
            *acc += v * (w * half);
        }
    };

    let mut sum = [Complex64::new(0.0, 0.0); N];
    sample(0.0, &mut sum);
    let mut step = 1.0;
    let mut k = 1;
    while k as f64 * step <= U_MAX {
        sample(k as f64 * step, &mut sum);
        sample(-(k as f64) * step, &mut sum);
        k += 1;
    }
    let mut prev = sum.map(|z| z * step);
    let mut last_change = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        step *= 0.5;
        let mut k = 1;
        while k as f64 * step <= U_MAX {
            sample(k as f64 * step, &mut sum);
            sample(-(k as f64) * step, &mut sum);
            k += 2;
        }
        let cur = sum.map(|z| z * step);
        let diff: [Complex64; N] = std::array::from_fn(|i| cur[i] - prev[i]);
        last_change = norm(&diff);
        let scale = norm(&cur).max(floor);
        if level >= MIN_LEVEL && last_change <= tol * scale {
            return Ok(Estimate {
                value: cur,
                error: last_change,
                evaluations,
            });
        }
        prev = cur;
    }
    Err(QuadratureError {
        a,
        b,
        levels: MAX_LEVEL,
        last_change,
    })
}

/// Scalar real convenience wrapper.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64), QuadratureError> {
    let est = tanh_sinh(|x| [Complex64::new(f(x), 0.0)], a, b, tol, 1e-300)?;
    Ok((est.value[0].re, est.error))
}

/// Integrates over `[a, b]` split at the interior `breaks`.
pub fn tanh_sinh_split<const N: usize, F>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
    floor: f64,
) -> Result<Estimate<N>, QuadratureError>
where
    F: Fn(f64) -> [Complex64; N],
{
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|t| *t > a && *t < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() < 1e-12 * (b - a));
    let mut total = Estimate {
        value: [Complex64::new(0.0, 0.0); N],
        error: 0.0,
        evaluations: 0,
    };
    for w in pts.windows(2) {
        let est = tanh_sinh(&f, w[0], w[1], tol, floor)?;
        for (t, v) in total.value.iter_mut().zip(est.value) {
            *t += v;
        }
        total.error += est.error;
        total.evaluations += est.evaluations;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_inverse_sqrt() {
        let (v, _) = integrate_real(|x| x * x, 0.0, 1.0, 1e-14).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
        // int_0^1 1/sqrt(x) = 2
        let (v, _) = integrate_real(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-13).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn log_endpoint() {
        // int_0^1 ln x = -1
        let (v, _) = integrate_real(f64::ln, 0.0, 1.0, 1e-13).unwrap();
        assert!((v + 1.0).abs() < 1e-12);
    }

    #[test]
    fn split_matches_unsplit() {
        let f = |x: f64| [Complex64::new(x.cos(), x.sin())];
        let a = tanh_sinh(f, -1.0, 2.0, 1e-13, 1.0).unwrap();
        let b = tanh_sinh_split(f, -1.0, 2.0, &[0.3, 1.1], 1e-13, 1.0).unwrap();
        assert!((a.value[0] - b.value[0]).norm() < 1e-13);
    }
}
