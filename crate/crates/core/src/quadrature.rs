//! Integrals of the form ∫ sinc²(F)·R(F) dF over the whole real line.
//!
//! R is a bounded, non-negative weight that decays at least like 1/F² away
//! from a finite set of features. The caller supplies an integer core
//! interval `[lo, hi]` that contains every feature with some margin; the
//! core is integrated directly and each tail is split into
//!
//! ```text
//! ∫_A^∞ sinc²·R = ∫_A^∞ R/(2π²F²) dF − ∫_A^∞ cos(2πF)·R/(2π²F²) dF
//! ```
//!
//! The first part is mapped to (0, 1] with F = A/t. The second is replaced
//! by its leading asymptotic term −h'(A)/(4π²), exact enough because A is an
//! integer far from any feature of R.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

pub fn sinc_squared(x: f64) -> f64 {
    let s = sinc(x);
    s * s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Adaptive Simpson on unit sub-intervals with a global relative tolerance.
    Adaptive { rel_tol: f64 },
    /// Composite Gauss–Legendre with a fixed number of panels per unit of F.
    Grid { panels_per_unit: usize, order: usize },
}

impl Method {
    pub const ADAPTIVE: Method = Method::Adaptive { rel_tol: 1e-8 };
    pub const GRID: Method = Method::Grid { panels_per_unit: 2, order: 16 };

    /// Same family with the step halved or the tolerance tightened.
    pub fn refined(self) -> Method {
        match self {
            Method::Adaptive { rel_tol } => Method::Adaptive { rel_tol: rel_tol / 16.0 },
            Method::Grid { panels_per_unit, order } => Method::Grid {
                panels_per_unit: panels_per_unit * 2,
                order,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub evaluations: usize,
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            x[0] = 0.0;
            w[0] = 2.0;
            break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, x: &[f64], w: &[f64]) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        s += wi * f(mid + half * xi);
    }
    s * half
}

/// Composite Gauss–Legendre over [a, b] with `panels` equal panels.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre_rule(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| gl_panel(&f, a + p as f64 * h, a + (p + 1) as f64 * h, &x, &w))
        .sum()
}

struct Simpson<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    evals: usize,
    min_depth: u32,
    max_depth: u32,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn recurse(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        self.evals += 2;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth >= self.min_depth && delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= self.max_depth {
            return Err(Error::Quadrature {
                lo: a,
                hi: b,
                estimate: left + right,
                error: delta.abs() / 15.0,
                evaluations: self.evals,
            });
        }
        let l = self.recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
        let r = self.recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
        Ok(l + r)
    }
}

/// Forced bisections before the error test may accept. The integrands
/// vanish at both ends of every unit piece, so a coarse split can agree with
/// the whole-interval estimate by accident.
const MIN_DEPTH: u32 = 3;

/// Adaptive Simpson with Richardson correction and an absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<Integral> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut s = Simpson { f, evals: 3, min_depth: MIN_DEPTH, max_depth: 48 };
    let value = s.recurse(a, b, fa, fm, fb, whole, abs_tol, 0)?;
    Ok(Integral { value, evaluations: s.evals })
}

const DERIV_STEP: f64 = 0.05;

/// ∫ sinc²(F)·r(F) dF over ℝ with all features of r inside `[lo, hi]`.
pub fn sinc2_integral<R: Fn(f64) -> f64>(r: R, lo: i64, hi: i64, method: Method) -> Result<Integral> {
    if !(lo < 0 && hi > 0) {
        return Err(Error::Domain(format!("core interval [{lo}, {hi}] must straddle zero")));
    }
    let core = |x: f64| sinc_squared(x) * r(x);
    let a_right = hi as f64;
    let a_left = -lo as f64;
    let two_pi2 = 2.0 * PI * PI;
    let tail_r = |t: f64| if t <= 0.0 { 0.0 } else { r(a_right / t) / (two_pi2 * a_right) };
    let tail_l = |t: f64| if t <= 0.0 { 0.0 } else { r(-a_left / t) / (two_pi2 * a_left) };
    let h_r = |u: f64| r(u) / (two_pi2 * u * u);
    let h_l = |u: f64| r(-u) / (two_pi2 * u * u);
    let deriv = |h: &dyn Fn(f64) -> f64, u: f64| (h(u + DERIV_STEP) - h(u - DERIV_STEP)) / (2.0 * DERIV_STEP);
    let osc = (deriv(&h_r, a_right) + deriv(&h_l, a_left)) / (4.0 * PI * PI);
    let units = (hi - lo) as usize;

    match method {
        Method::Grid { panels_per_unit, order } => {
            let (x, w) = gauss_legendre_rule(order);
            let mut sum = 0.0;
            let step = 1.0 / panels_per_unit as f64;
            for u in 0..units {
                let base = lo as f64 + u as f64;
                for p in 0..panels_per_unit {
                    let a = base + p as f64 * step;
                    sum += gl_panel(&core, a, a + step, &x, &w);
                }
            }
            let tail_panels = 4 * panels_per_unit;
            sum += gauss_legendre(tail_r, 0.0, 1.0, tail_panels, order);
            sum += gauss_legendre(tail_l, 0.0, 1.0, tail_panels, order);
            let evaluations = (units * panels_per_unit + 2 * tail_panels) * order + 8;
            Ok(Integral { value: sum + osc, evaluations })
        }
        Method::Adaptive { rel_tol } => {
            // Coarse Simpson pass to scale the absolute tolerance.
            let mut estimate = 0.0;
            let mut evals = 0;
            for u in 0..units {
                let a = lo as f64 + u as f64;
                estimate += (core(a) + 4.0 * core(a + 0.5) + core(a + 1.0)) / 6.0;
                evals += 3;
            }
            let pieces = units + 2;
            let abs_tol = (rel_tol * estimate.abs() / pieces as f64).max(f64::MIN_POSITIVE);
            let mut sum = 0.0;
            for u in 0..units {
                let a = lo as f64 + u as f64;
                let part = adaptive_simpson(&core, a, a + 1.0, abs_tol)?;
                sum += part.value;
                evals += part.evaluations;
            }
            for tail in [&tail_r as &dyn Fn(f64) -> f64, &tail_l] {
                let part = adaptive_simpson(&tail, 0.0, 1.0, abs_tol)?;
                sum += part.value;
                evals += part.evaluations;
            }
            Ok(Integral { value: sum + osc, evaluations: evals + 8 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for n in [1, 2, 5, 16, 32] {
            let (x, w) = gauss_legendre_rule(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            // Exact up to degree 2n-1.
            let deg = 2 * n - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert_relative_eq!(q, 2.0 / (deg as f64 + 1.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn simpson_on_smooth_function() {
        let r = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13).unwrap();
        assert_relative_eq!(r.value, 1f64.exp() - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn simpson_reports_non_convergence() {
        let err = adaptive_simpson(&|x: f64| if x < 0.3 { 0.0 } else { 1.0 }, 0.0, 1.0, 1e-300).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    // ∫ sinc² = 1 and, for a centred Lorentzian of half-width ξ,
    // ∫ sinc²(F)/(1+(F/ξ)²) dF = 1 − (1 − e^{−2πξ})/(2πξ).
    #[test]
    fn closed_forms() {
        for m in [Method::ADAPTIVE, Method::GRID] {
            for xi in [0.3, 1.5, 4.0] {
                let got = sinc2_integral(|f: f64| 1.0 / (1.0 + (f / xi).powi(2)), -40, 40, m).unwrap().value;
                let want = 1.0 - (1.0 - (-2.0 * PI * xi).exp()) / (2.0 * PI * xi);
                assert_relative_eq!(got, want, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn rejects_bad_core() {
        assert!(sinc2_integral(|f: f64| 1.0 / (1.0 + f * f), 0, 10, Method::GRID).is_err());
    }
}
