//! The four symmetries outside the subalgebra used for the quotient act on g.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{prolong_jets, VectorField};
use crate::sym::{Env, Expr, JetVar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HsGenerator {
    /// ∂_t
    Translation,
    /// t∂_t − x∂_x − 2u∂_u
    TimeScaling,
    /// x∂_x + u∂_u
    SpaceScaling,
    /// t²∂_t + 2tx∂_x + 2x∂_u
    Projective,
}

impl HsGenerator {
    pub const ALL: [HsGenerator; 4] =
        [HsGenerator::Translation, HsGenerator::TimeScaling, HsGenerator::SpaceScaling, HsGenerator::Projective];

    pub fn name(self) -> &'static str {
        match self {
            HsGenerator::Translation => "translation",
            HsGenerator::TimeScaling => "time-scaling",
            HsGenerator::SpaceScaling => "space-scaling",
            HsGenerator::Projective => "projective",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        HsGenerator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown generator `{s}` (expected translation, time-scaling, space-scaling or projective)")))
    }

    pub fn field(self) -> VectorField {
        let (a, b, c) = match self {
            HsGenerator::Translation => ("1", "0", "0"),
            HsGenerator::TimeScaling => ("t", "-x", "-2*u"),
            HsGenerator::SpaceScaling => ("0", "x", "u"),
            HsGenerator::Projective => ("t^2", "2*t*x", "2*x"),
        };
        VectorField::parse(a, b, c).expect("static field")
    }
}

impl std::fmt::Display for HsGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// g̃ for the flow parameter s. For the translation, w = 2/s is outside the domain of g̃.
pub fn transform_g(gen: HsGenerator, s: &Expr, g: &Expr) -> Expr {
    let w = Expr::named("w");
    match gen {
        HsGenerator::Translation => {
            let d = Expr::int(2) - s.clone() * w.clone();
            Expr::int(16) * g.subst_named("w", &(Expr::int(2) * w / d.clone())) / d.powi(4)
        }
        HsGenerator::TimeScaling => g.subst_named("w", &(Expr::exp(&-s.clone()) * w)),
        HsGenerator::SpaceScaling => Expr::exp(&-s.clone()) * g.clone(),
        HsGenerator::Projective => g.subst_named("w", &(w + Expr::int(2) * s.clone())),
    }
}

/// A point of J² restricted to the x-jets the constraint involves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Jet2 {
    pub t: f64,
    pub x: f64,
    pub u: f64,
    pub u_x: f64,
    pub u_xx: f64,
}

/// Moves `p` along the prolonged flow of `gen` for parameter s (RK4, `steps` steps). For these
/// generators the coefficients of ∂_{u_x} and ∂_{u_xx} involve no t-derivatives of u.
pub fn flow_jet(gen: HsGenerator, s: f64, p: Jet2, steps: usize) -> Result<Jet2> {
    let field = gen.field();
    let pf = prolong_jets(&field, &[JetVar::new(0, 2)]);
    let coeffs = [
        field.a.clone(),
        field.b.clone(),
        field.c.clone(),
        pf.coeff(JetVar::new(0, 1)).expect("prolonged").clone(),
        pf.coeff(JetVar::new(0, 2)).expect("prolonged").clone(),
    ];
    for c in &coeffs {
        if c.jets().iter().any(|j| j.t > 0) {
            return Err(Error::Unsupported(format!("{gen}: prolonged coefficient {c} involves t-derivatives")));
        }
    }
    let mut env = Env::new();
    let mut rhs = |y: [f64; 5]| -> Result<[f64; 5]> {
        env.set_named("t", y[0]).set_named("x", y[1]);
        env.set(crate::sym::Var::jet(0, 0), y[2]).set(crate::sym::Var::jet(0, 1), y[3]).set(crate::sym::Var::jet(0, 2), y[4]);
        let mut out = [0.0; 5];
        for (o, c) in out.iter_mut().zip(&coeffs) {
            *o = c.eval(&env)?;
        }
        Ok(out)
    };
    let steps = steps.max(1);
    let h = s / steps as f64;
    let mut y = [p.t, p.x, p.u, p.u_x, p.u_xx];
    let add = |y: [f64; 5], k: [f64; 5], c: f64| std::array::from_fn::<f64, 5, _>(|i| y[i] + c * k[i]);
    for _ in 0..steps {
        let k1 = rhs(y)?;
        let k2 = rhs(add(y, k1, h / 2.0))?;
        let k3 = rhs(add(y, k2, h / 2.0))?;
        let k4 = rhs(add(y, k3, h))?;
        y = std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    Ok(Jet2 { t: y[0], x: y[1], u: y[2], u_x: y[3], u_xx: y[4] })
}
