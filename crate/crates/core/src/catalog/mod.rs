//! Worked equations with their symmetry algebras, invariants, syzygies and solutions.

mod characteristics;
mod entries;

use std::collections::HashMap;

use serde::Serialize;

pub use characteristics::{characteristics_solve, solve_quasilinear, CharSample, CharSettings, Characteristics, Crossing, Flag, InitialCurve, Quasilinear};
pub use entries::ENTRIES;

use crate::error::{Error, Result};
use crate::invariants::{Realizer, Syzygy, TresseFrame};
use crate::jet::VectorField;
use crate::pde::{residual_on, Check, PdeManifold};
use crate::sym::{Expr, Kernel, Lambda, Subst, Var, Verdict};

/// A closed-form solution of the quotient.
#[derive(Clone, Copy, Debug)]
pub enum SolutionSpec {
    /// Token base ↦ h(I, J).
    Explicit(&'static [(&'static str, &'static str)]),
    /// Φ(I, J, H) = 0.
    Implicit(&'static str),
}

/// A closed-form u(t, x), with formal functions bound as needed.
#[derive(Clone, Copy, Debug)]
pub struct ReconSpec {
    pub label: &'static str,
    pub u: &'static str,
    /// (function, parameters, body).
    pub bindings: &'static [(&'static str, &'static [&'static str], &'static str)],
    /// Whether u solves the quotient constraint for the entry's formal functions.
    pub general: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub excluded: Option<i64>,
}

/// Static description of a catalog entry.
#[derive(Debug)]
pub struct EntrySpec {
    pub name: &'static str,
    pub title: &'static str,
    pub f: &'static str,
    pub principal: &'static str,
    pub gens: &'static [[&'static str; 3]],
    /// Further point symmetries checked but not used for invariants.
    pub extra_symmetries: &'static [[&'static str; 3]],
    /// I and J first, then the remaining generators.
    pub invariants: &'static [(&'static str, &'static str)],
    pub syzygies: &'static [&'static str],
    pub solution: Option<SolutionSpec>,
    pub reconstructions: &'static [ReconSpec],
    /// u_x = w turns the quotient constraint into `expect`.
    pub substitution: Option<(&'static str, &'static str)>,
    pub params: &'static [ParamSpec],
    /// Arbitrary functions of the quotient solution.
    pub functions: &'static [&'static str],
    pub notes: &'static str,
}

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

pub fn spec(name: &str) -> Result<&'static EntrySpec> {
    ENTRIES.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub label: &'static str,
    pub u: Expr,
    pub bindings: Subst,
    pub general: bool,
}

#[derive(Clone, Debug)]
pub enum QuotientSolution {
    Explicit(Vec<(String, Expr)>),
    Implicit(Expr),
}

/// A parsed entry.
#[derive(Debug)]
pub struct CatalogEntry {
    pub spec: &'static EntrySpec,
    pub manifold: PdeManifold,
    pub gens: Vec<VectorField>,
    pub extra_symmetries: Vec<VectorField>,
    pub invariants: Vec<(String, Expr)>,
    pub syzygies: Vec<Syzygy>,
    pub solution: Option<QuotientSolution>,
    pub reconstructions: Vec<Reconstruction>,
}

fn fields(v: &[[&str; 3]]) -> Result<Vec<VectorField>> {
    v.iter().map(|[a, b, c]| VectorField::parse(a, b, c)).collect()
}

fn bindings(b: &[(&str, &[&str], &str)]) -> Result<Subst> {
    let mut s = Subst::new();
    for (name, params, body) in b {
        let body = crate::parse(body)?;
        if params.is_empty() {
            s.bind_named(name, body);
        } else {
            s.bind_func(name, Lambda::new(params.iter().map(|p| Var::named(p)).collect(), body));
        }
    }
    Ok(s)
}

pub fn entry(name: &str) -> Result<CatalogEntry> {
    CatalogEntry::build(spec(name)?)
}

/// One verified item of a staged report.
#[derive(Clone, Debug, Serialize)]
pub struct StageItem {
    pub stage: Stage,
    pub item: String,
    pub verdict: Verdict,
    pub residual: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Symmetry,
    Invariance,
    Duality,
    Commutation,
    Syzygy,
    QuotientSolution,
    Reconstruction,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Symmetry => "symmetry",
            Stage::Invariance => "invariance",
            Stage::Duality => "duality",
            Stage::Commutation => "commutation",
            Stage::Syzygy => "syzygy",
            Stage::QuotientSolution => "quotient-solution",
            Stage::Reconstruction => "reconstruction",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub entry: String,
    pub items: Vec<StageItem>,
    pub passed: bool,
}

/// The jet constraint G = 0 and the reconstructed solution for chosen functions and parameters.
#[derive(Clone, Debug)]
pub struct Instance {
    pub constraint: Expr,
    pub solution: Option<Expr>,
    /// F on the solution.
    pub residual: Option<Check>,
    /// G on the solution.
    pub constraint_residual: Option<Check>,
}

impl CatalogEntry {
    pub fn build(spec: &'static EntrySpec) -> Result<Self> {
        let manifold = PdeManifold::parse(spec.f, spec.principal)?;
        let invariants = spec
            .invariants
            .iter()
            .map(|(n, e)| Ok((n.to_string(), crate::parse(e)?)))
            .collect::<Result<Vec<_>>>()?;
        let syzygies = spec.syzygies.iter().map(|s| Syzygy::parse(s)).collect::<Result<_>>()?;
        let solution = match spec.solution {
            None => None,
            Some(SolutionSpec::Explicit(m)) => Some(QuotientSolution::Explicit(
                m.iter().map(|(n, e)| Ok((n.to_string(), crate::parse(e)?))).collect::<Result<_>>()?,
            )),
            Some(SolutionSpec::Implicit(s)) => Some(QuotientSolution::Implicit(crate::parse(s)?)),
        };
        let reconstructions = spec
            .reconstructions
            .iter()
            .map(|r| Ok(Reconstruction { label: r.label, u: crate::parse(r.u)?, bindings: bindings(r.bindings)?, general: r.general }))
            .collect::<Result<_>>()?;
        Ok(CatalogEntry {
            spec,
            manifold,
            gens: fields(spec.gens)?,
            extra_symmetries: fields(spec.extra_symmetries)?,
            invariants,
            syzygies,
            solution,
            reconstructions,
        })
    }

    pub fn name(&self) -> &'static str {
        self.spec.name
    }

    pub fn invariant(&self, name: &str) -> Option<&Expr> {
        self.invariants.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn frame(&self) -> Result<TresseFrame> {
        TresseFrame::new(&self.invariants[0].1, &self.invariants[1].1, &self.manifold)
    }

    /// Runs `f` with a realizer for this entry's tokens.
    pub fn with_realizer<R>(&self, frame: &TresseFrame, f: impl FnOnce(&mut Realizer) -> Result<R>) -> Result<R> {
        let extra: Vec<(&str, Expr)> = self.invariants[2..].iter().map(|(n, e)| (n.as_str(), e.clone())).collect();
        let mut r = Realizer::new(&self.manifold, frame, &extra)?;
        f(&mut r)
    }

    /// Values of the tokens covered by the quotient solution, as functions of I, J (and H
    /// for an implicit solution that cannot be solved for H).
    pub fn solution_tokens(&self) -> Result<Option<HashMap<String, Expr>>> {
        let Some(sol) = &self.solution else { return Ok(None) };
        let (iv, jv) = (Var::named("I"), Var::named("J"));
        let mut out = HashMap::new();
        let explicit = match sol {
            QuotientSolution::Explicit(m) => m.clone(),
            QuotientSolution::Implicit(phi) => {
                let hk = Kernel::var(Var::named("H"));
                match phi.affine_in(&hk) {
                    Some((a, b)) if !a.is_zero() && !a.contains_var(&Var::named("H")) => vec![("H".to_string(), -(b / a))],
                    _ => {
                        let hv = Var::named("H");
                        let ph = phi.diff(&hv);
                        out.insert("H_I".to_string(), -(phi.diff(&iv) / &ph));
                        out.insert("H_J".to_string(), -(phi.diff(&jv) / &ph));
                        return Ok(Some(out));
                    }
                }
            }
        };
        for (base, h) in explicit {
            out.insert(base.clone(), h.clone());
            for word in ["I", "J", "II", "IJ", "JI", "JJ"] {
                let mut e = h.clone();
                for c in word.chars() {
                    e = e.diff(if c == 'I' { &iv } else { &jv });
                }
                out.insert(format!("{base}_{word}"), e);
            }
        }
        Ok(Some(out))
    }

    /// Syzygies whose tokens are all covered by the quotient solution, with their residuals.
    pub fn check_solution(&self) -> Result<Vec<(usize, Check)>> {
        let Some(tokens) = self.solution_tokens()? else { return Ok(Vec::new()) };
        let mut out = Vec::new();
        for (i, s) in self.syzygies.iter().enumerate() {
            let mut sub = Subst::new();
            let mut covered = true;
            for v in s.lhs.free_vars() {
                let Var::Named(n) = &v else { continue };
                if let Some(e) = tokens.get(&**n) {
                    sub.bind(v.clone(), e.clone());
                } else if self.is_token(n) && !matches!(&**n, "I" | "J" | "H") {
                    covered = false;
                }
            }
            if covered {
                out.push((i, Check::of(sub.apply(&s.lhs))?));
            }
        }
        Ok(out)
    }

    fn is_token(&self, name: &str) -> bool {
        let base = name.split('_').next().unwrap_or(name);
        self.invariants.iter().any(|(n, _)| n == base)
    }

    /// Replaces the invariant names I, J, H, K by their jet expressions.
    pub fn to_jets(&self, e: &Expr) -> Expr {
        let mut s = Subst::new();
        for (n, inv) in &self.invariants {
            s.bind_named(n, inv.clone());
        }
        s.apply(e)
    }

    /// The first-order (or second-order) constraint G = 0 from the quotient solution.
    pub fn constraint(&self) -> Option<Expr> {
        match self.solution.as_ref()? {
            QuotientSolution::Explicit(m) => {
                let (base, h) = &m[0];
                Some(self.to_jets(&(Expr::named(base) - h)))
            }
            QuotientSolution::Implicit(phi) => Some(self.to_jets(phi)),
        }
    }

    fn reconstruction_checks(&self, r: &Reconstruction) -> Result<(Check, Option<Check>)> {
        let f = r.bindings.apply(&self.manifold.f);
        let u = r.bindings.apply(&r.u);
        let res = Check::of(residual_on(&f, &u))?;
        let g = match (r.general, self.constraint()) {
            (true, Some(g)) => Some(Check::of(residual_on(&r.bindings.apply(&g), &u))?),
            _ => None,
        };
        Ok((res, g))
    }

    /// Staged verification; stops at the first failing item.
    pub fn verify(&self) -> Result<Report> {
        let mut items = Vec::new();
        let mut push = |stage: Stage, item: String, c: Check| -> bool {
            let ok = c.passed();
            items.push(StageItem { stage, item, verdict: c.verdict, residual: c.residual.to_string() });
            ok
        };
        let report = |items: Vec<StageItem>, passed| Report { entry: self.name().to_string(), items, passed };
        let m = &self.manifold;

        for x in self.gens.iter().chain(&self.extra_symmetries) {
            if !push(Stage::Symmetry, x.to_string(), m.check_symmetry(x)?) {
                return Ok(report(items, false));
            }
        }
        for (n, e) in &self.invariants {
            for x in &self.gens {
                let c = crate::invariants::check_invariant(e, std::slice::from_ref(x), m)?.remove(0);
                if !push(Stage::Invariance, format!("{n} under {x}"), c) {
                    return Ok(report(items, false));
                }
            }
        }
        let frame = self.frame()?;
        for (label, c) in ["dI(∂_I) = 1", "dJ(∂_I) = 0", "dI(∂_J) = 0", "dJ(∂_J) = 1"].iter().zip(frame.duality(m)?) {
            if !push(Stage::Duality, label.to_string(), c) {
                return Ok(report(items, false));
            }
        }
        if let Some((n, probe)) = self.invariants.get(2) {
            if !push(Stage::Commutation, format!("probe {n}"), frame.check_commutation(probe, m)?) {
                return Ok(report(items, false));
            }
        }
        let syz = self.with_realizer(&frame, |r| self.syzygies.iter().map(|s| r.check(s)).collect::<Result<Vec<_>>>())?;
        for (s, c) in self.syzygies.iter().zip(syz) {
            if !push(Stage::Syzygy, s.to_string(), c) {
                return Ok(report(items, false));
            }
        }
        for (i, c) in self.check_solution()? {
            if !push(Stage::QuotientSolution, self.syzygies[i].to_string(), c) {
                return Ok(report(items, false));
            }
        }
        for r in &self.reconstructions {
            let (res, g) = self.reconstruction_checks(r)?;
            if !push(Stage::Reconstruction, format!("F on {}", r.label), res) {
                return Ok(report(items, false));
            }
            if let Some(g) = g {
                if !push(Stage::Reconstruction, format!("constraint on {}", r.label), g) {
                    return Ok(report(items, false));
                }
            }
        }
        if let (Some((w, expect)), Some(g)) = (self.spec.substitution, self.constraint()) {
            let w = crate::parse(w)?;
            let got = on_first_derivative(&g, &w);
            let c = Check::of(got - crate::parse(expect)?)?;
            if !push(Stage::Reconstruction, format!("u_x = {w}"), c) {
                return Ok(report(items, false));
            }
        }
        Ok(report(items, true))
    }

    /// Binds the entry's arbitrary functions and parameters; reconstructs u when the entry has a
    /// general closed form.
    pub fn instantiate(&self, funcs: &[(&str, Lambda)], params: &[(&str, Expr)]) -> Result<Instance> {
        let mut s = Subst::new();
        for (name, value) in params {
            let Some(p) = self.spec.params.iter().find(|p| p.name == *name) else {
                return Err(Error::InvalidParameter(format!("{} has no parameter {name}", self.name())));
            };
            if let (Some(x), Some(q)) = (p.excluded, value.as_rational()) {
                if q == crate::sym::Q::from_integer(x.into()) {
                    return Err(Error::InvalidParameter(format!("{name} = {x} is excluded for {}", self.name())));
                }
            }
            s.bind_named(name, value.clone());
        }
        for (name, l) in funcs {
            if !self.spec.functions.contains(name) {
                return Err(Error::InvalidParameter(format!("{} has no arbitrary function {name}", self.name())));
            }
            s.bind_func(name, l.clone());
        }
        let constraint = self
            .constraint()
            .ok_or_else(|| Error::Unsupported(format!("{} has no closed-form quotient solution", self.name())))?;
        let constraint = s.apply(&constraint);
        let Some(r) = self.reconstructions.iter().find(|r| r.general) else {
            return Ok(Instance { constraint, solution: None, residual: None, constraint_residual: None });
        };
        let u = s.apply(&r.bindings.apply(&r.u));
        let f = s.apply(&r.bindings.apply(&self.manifold.f));
        let residual = Some(Check::of(residual_on(&f, &u))?);
        let constraint_residual = Some(Check::of(residual_on(&r.bindings.apply(&constraint), &u))?);
        Ok(Instance { constraint, solution: Some(u), residual, constraint_residual })
    }
}

/// Substitutes u_x ↦ w(t, x) (and its derivatives for higher jets u_{t^i x^{j+1}}) into a jet
/// expression free of u and pure t-derivatives.
pub fn on_first_derivative(g: &Expr, w: &Expr) -> Expr {
    let mut s = Subst::new();
    for j in g.jets() {
        if j.x > 0 {
            let mut e = w.clone();
            for _ in 0..j.t {
                e = e.diff_named("t");
            }
            for _ in 1..j.x {
                e = e.diff_named("x");
            }
            s.bind(Var::Jet(j), e);
        }
    }
    s.apply(g)
}

/// Verifies every entry; reports are in catalog order.
pub fn verify_all() -> Result<Vec<Report>> {
    ENTRIES.iter().map(|s| CatalogEntry::build(s)?.verify()).collect()
}
