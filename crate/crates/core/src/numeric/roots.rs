//! Scalar root finding.

use crate::error::{Error, Result};

/// Bisection on a bracketing interval; `f(a)` and `f(b)` must differ in sign.
pub fn bisect(mut f: impl FnMut(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Domain(format!("no sign change on [{a}, {b}]")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol * (1.0 + m.abs()) || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Sign changes of `f` on an `n`-point grid over [a, b], refined by bisection. Points where
/// `f` fails to evaluate are skipped.
pub fn sign_changes(mut f: impl FnMut(f64) -> Result<f64>, a: f64, b: f64, n: usize, tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=n {
        let x = a + (b - a) * k as f64 / n as f64;
        let Ok(y) = f(x) else {
            prev = None;
            continue;
        };
        if !y.is_finite() {
            prev = None;
            continue;
        }
        if y == 0.0 {
            out.push(x);
        } else if let Some((px, py)) = prev {
            if py != 0.0 && py.signum() != y.signum() {
                if let Ok(r) = bisect(&mut f, px, x, tol) {
                    out.push(r);
                }
            }
        }
        prev = Some((x, y));
    }
    out
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect()
}

/// Real roots with multiplicities of the polynomial Σ c[k] x^k. Roots of each derivative split
/// the line into monotone pieces; a critical point where the value also vanishes is a multiple
/// root.
pub fn poly_real_roots(c: &[f64]) -> Vec<(f64, u32)> {
    let mut c = c.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let scale = c.iter().fold(0f64, |m, a| m.max(a.abs()));
    let tol = 1e-9 * scale;
    let bound = 1.0 + c[..c.len() - 1].iter().fold(0f64, |m, a| m.max((a / c[c.len() - 1]).abs()));
    let crit = poly_real_roots(&derivative(&c));
    let mut knots = vec![-bound];
    knots.extend(crit.iter().map(|(r, _)| *r));
    knots.push(bound);
    let mut out: Vec<(f64, u32)> = Vec::new();
    for (r, _) in &crit {
        if horner(&c, *r).abs() <= tol {
            let mut m = 1;
            let mut d = derivative(&c);
            while d.len() > 1 && horner(&d, *r).abs() <= tol * (1 + m) as f64 {
                m += 1;
                d = derivative(&d);
            }
            out.push((*r, m));
        }
    }
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (horner(&c, a), horner(&c, b));
        if fa.abs() > tol && fb.abs() > tol && fa.signum() != fb.signum() {
            if let Ok(r) = bisect(|x| Ok(horner(&c, x)), a, b, 1e-15) {
                out.push((r, 1));
            }
        }
    }
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    out.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-9);
    out
}
