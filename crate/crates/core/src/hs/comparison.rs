//! The classical parametrization: ξ = ∫g, α = ∫g w, β = ½∫g w², all from w = 0.

use crate::error::{Error, Result};
use crate::numeric::quad::{integrate, QuadSettings};
use crate::numeric::roots::sign_changes;
use crate::sym::{Env, Expr};

#[derive(Clone)]
pub struct Comparison {
    pub g: Expr,
    env: Env,
    quad: QuadSettings,
}

/// ξ(w), α(w), β(w) for g; g ≡ 0 makes ξ ≡ 0 and has no inverse.
pub fn hs_comparison(g: &Expr, env: &Env) -> Result<Comparison> {
    if g.is_zero() {
        return Err(Error::Genericity("g ≡ 0: ξ ≡ 0 is not invertible".into()));
    }
    Ok(Comparison { g: g.clone(), env: env.clone(), quad: QuadSettings::with_tol(1e-13) })
}

impl Comparison {
    fn moment(&self, k: i32, w: f64) -> Result<f64> {
        let mut env = self.env.clone();
        let g = &self.g;
        integrate(
            |v| {
                env.set_named("w", v);
                Ok(g.eval(&env)? * v.powi(k))
            },
            0.0,
            w,
            &self.quad,
        )
    }

    pub fn xi(&self, w: f64) -> Result<f64> {
        self.moment(0, w)
    }

    pub fn alpha(&self, w: f64) -> Result<f64> {
        self.moment(1, w)
    }

    pub fn beta(&self, w: f64) -> Result<f64> {
        Ok(self.moment(2, w)? / 2.0)
    }

    /// d(f)/dξ at w from central differences in w with step h, Richardson-extrapolated.
    fn d_dxi(&self, f: &dyn Fn(f64) -> Result<f64>, w: f64, h: f64) -> Result<f64> {
        let d = |f: &dyn Fn(f64) -> Result<f64>, h: f64| -> Result<f64> { Ok((f(w + h)? - f(w - h)?) / (2.0 * h)) };
        let rich = |f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> { Ok((4.0 * d(f, h / 2.0)? - d(f, h)?) / 3.0) };
        let dxi = rich(&|v| self.xi(v))?;
        if dxi == 0.0 {
            return Err(Error::Genericity(format!("dξ/dw = 0 at w = {w}")));
        }
        Ok(rich(f)? / dxi)
    }

    /// α'(ξ) at the point ξ(w); equals w.
    pub fn alpha_prime(&self, w: f64, h: f64) -> Result<f64> {
        self.d_dxi(&|v| self.alpha(v), w, h)
    }

    pub fn beta_prime(&self, w: f64, h: f64) -> Result<f64> {
        self.d_dxi(&|v| self.beta(v), w, h)
    }

    /// max |β'(ξ) − ½α'(ξ)²| and max |α'(ξ) − w| over the sample points.
    pub fn check(&self, ws: &[f64], h: f64) -> Result<(f64, f64)> {
        let (mut rel, mut slope) = (0f64, 0f64);
        for &w in ws {
            let a = self.alpha_prime(w, h)?;
            rel = rel.max((self.beta_prime(w, h)? - a * a / 2.0).abs());
            slope = slope.max((a - w).abs());
        }
        Ok((rel, slope))
    }

    /// Sub-intervals of (lo, hi) on which ξ is monotone (split at sign changes of g).
    pub fn branches(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let mut env = self.env.clone();
        let g = &self.g;
        let mut cuts = vec![lo];
        cuts.extend(sign_changes(
            |v| {
                env.set_named("w", v);
                g.eval(&env)
            },
            lo,
            hi,
            2000,
            1e-14,
        ));
        cuts.push(hi);
        cuts.windows(2).map(|p| (p[0], p[1])).collect()
    }
}
