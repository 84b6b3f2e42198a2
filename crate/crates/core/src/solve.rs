//! Derivative-free bracketed root finding.
//!
//! Brent's method (bisection with secant / inverse-quadratic acceleration),
//! run to machine precision. The secular equation has poles at the photon
//! wavenumbers, so callers are responsible for handing in brackets that stay
//! on one side of each pole; the solver itself never evaluates outside the
//! bracket.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error("root not bracketed on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}")]
    NotBracketed { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("no convergence after {max_iter} iterations, bracket [{lo}, {hi}]")]
    NoConvergence { max_iter: usize, lo: f64, hi: f64 },
}

/// Find the root of `f` inside `[lo, hi]`, given `f(lo)` and `f(hi)` of
/// opposite sign. Converges to a relative width of a few ulps or `rel_tol`,
/// whichever is looser.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Result<f64, SolveError> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(SolveError::NotBracketed { lo, hi, flo: fa, fhi: fb });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs().max(1e-300);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // secant or inverse quadratic step
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0));
                q = (q0 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
    }
    Err(SolveError::NoConvergence { max_iter, lo, hi })
}
