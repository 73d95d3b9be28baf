//! Adaptive Gauss–Kronrod (10/21) quadrature on finite and infinite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208649519756,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings { abs_tol: 1e-10, rel_tol: 1e-13, max_intervals: 2000 }
    }
}

impl QuadSettings {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadSettings { abs_tol, ..Default::default() }
    }
}

fn qk21<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    for j in 0..10 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    let (k, g) = (resk * h, resg * h);
    if !k.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok((k, (k - g).abs()))
}

struct Piece {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.partial_cmp(&o.err).unwrap_or(Ordering::Equal)
    }
}

/// ∫_a^b f on a finite interval; `a > b` flips the sign.
pub fn integrate_finite<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, s: &QuadSettings) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_finite(f, b, a, s).map(|v| -v);
    }
    let (v, e) = qk21(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, val: v, err: e });
    let (mut total, mut err) = (v, e);
    let mut count = 1;
    while err > s.abs_tol.max(s.rel_tol * total.abs()) {
        if count >= s.max_intervals {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] (error estimate {err:.3e}); integrand may be singular"
            )));
        }
        let p = heap.pop().unwrap();
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            return Err(Error::Quadrature(format!("interval collapsed near {m}; non-integrable singularity")));
        }
        let (v1, e1) = qk21(&mut f, p.a, m)?;
        let (v2, e2) = qk21(&mut f, m, p.b)?;
        total += v1 + v2 - p.val;
        err += e1 + e2 - p.err;
        heap.push(Piece { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Piece { a: m, b: p.b, val: v2, err: e2 });
        count += 1;
        if count % 64 == 0 {
            // resum to limit drift
            total = heap.iter().map(|p| p.val).sum();
            err = heap.iter().map(|p| p.err).sum();
        }
    }
    Ok(total)
}

/// ∫_a^b f where either bound may be infinite.
pub fn integrate<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, s: &QuadSettings) -> Result<f64> {
    integrate_dyn(&mut f, a, b, s)
}

fn integrate_dyn(f: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64, s: &QuadSettings) -> Result<f64> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::Quadrature("NaN bound".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_dyn(f, b, a, s).map(|v| -v);
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate_finite(f, a, b, s),
        (true, false) => integrate_finite(
            |t| {
                let x = a + t / (1.0 - t);
                Ok(f(x)? / ((1.0 - t) * (1.0 - t)))
            },
            0.0,
            1.0,
            s,
        ),
        (false, true) => integrate_finite(
            |t| {
                let x = b - (1.0 - t) / t;
                Ok(f(x)? / (t * t))
            },
            0.0,
            1.0,
            s,
        ),
        (false, false) => {
            let left = integrate_dyn(f, f64::NEG_INFINITY, 0.0, s)?;
            let right = integrate_dyn(f, 0.0, f64::INFINITY, s)?;
            Ok(left + right)
        }
    }
}

/// Cauchy principal value of ∫_a^b f across the simple poles `poles` (which must lie strictly
/// between a and b). Each pole is excised symmetrically: ∫_0^r f(p+s) + f(p−s) ds.
pub fn integrate_pv<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, poles: &[f64], s: &QuadSettings) -> Result<f64> {
    if a > b {
        return integrate_pv(f, b, a, poles, s).map(|v| -v);
    }
    let mut ps: Vec<f64> = poles.iter().copied().filter(|p| *p > a && *p < b).collect();
    ps.sort_by(|x, y| x.partial_cmp(y).unwrap());
    if ps.is_empty() {
        return integrate(f, a, b, s);
    }
    let mut total = 0.0;
    let mut left = a;
    for (k, &p) in ps.iter().enumerate() {
        let next = ps.get(k + 1).copied().unwrap_or(b);
        let r = [p - left, next - p, 2.0].into_iter().fold(f64::INFINITY, f64::min) / 2.0;
        total += integrate(&mut f, left, p - r, s)?;
        total += integrate_finite(|x| Ok(f(p + x)? + f(p - x)?), 0.0, r, s)?;
        left = p + r;
    }
    total += integrate(&mut f, left, b, s)?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| Ok(x * x), 0.0, 3.0, &QuadSettings::default()).unwrap();
        assert!((v - 9.0).abs() < 1e-13);
    }

    #[test]
    fn exponential_against_closed_form() {
        for w in [-2.0, -1.0, 0.5, 1.0, 3.0] {
            let v = integrate(|x: f64| Ok(x.exp()), 0.0, w, &QuadSettings::with_tol(1e-12)).unwrap();
            assert!((v - (w.exp() - 1.0)).abs() < 1e-10, "w={w}");
        }
    }

    #[test]
    fn infinite_ranges() {
        let s = QuadSettings::with_tol(1e-12);
        let v = integrate(|x: f64| Ok((-x).exp()), 0.0, f64::INFINITY, &s).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
        let v = integrate(|x: f64| Ok((-x * x).exp()), f64::NEG_INFINITY, f64::INFINITY, &s).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let v = integrate(|x| Ok(x), 2.0, 0.0, &QuadSettings::default()).unwrap();
        assert!((v + 2.0).abs() < 1e-13);
    }

    #[test]
    fn principal_value_across_a_simple_pole() {
        // PV ∫_{-1}^{2} dx/x = ln 2
        let s = QuadSettings::with_tol(1e-12);
        let v = integrate_pv(|x: f64| Ok(1.0 / x), -1.0, 2.0, &[0.0], &s).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-12, "{v}");
        // ∫_w^∞ dx/(x(x+3)^2) through x = 0 for w in (-3, 0)
        let exact = |w: f64| -((w.abs()).ln() - (w + 3.0).ln() + 3.0 / (w + 3.0)) / 9.0;
        let v = integrate_pv(|x: f64| Ok(1.0 / (x * (x + 3.0) * (x + 3.0))), -1.0, f64::INFINITY, &[0.0], &s).unwrap();
        assert!((v - exact(-1.0)).abs() < 1e-12, "{v} {}", exact(-1.0));
    }

    #[test]
    fn non_integrable_is_an_error() {
        let r = integrate(|x: f64| Ok(1.0 / x), 0.0, 1.0, &QuadSettings::default());
        assert!(r.is_err());
    }
}
