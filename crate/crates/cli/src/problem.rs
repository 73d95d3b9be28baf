//! JSON problem files. Named-entry problems are translated to an argument vector and run
//! through the ordinary command parser; inline equations are checked directly.

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use tresse::jet::VectorField;
use tresse::pde::PdeManifold;

use crate::out::{usage, Fail, Outcome};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub entry: Option<EntryRef>,
    pub action: Action,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum EntryRef {
    Name(String),
    Inline(InlineEntry),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineEntry {
    #[serde(rename = "F")]
    pub f: String,
    pub principal: String,
    /// Each generator as the coefficients (of ∂_t, ∂_x, ∂_u).
    #[serde(default)]
    pub generators: Vec<[String; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Verify,
    Solve,
    Cauchy,
    Singular,
    Characteristics,
    Transform,
}

/// A number or an expression string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(x) => write!(f, "{x}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub g: Option<Value>,
    #[serde(rename = "C")]
    pub c: Option<Value>,
    pub t0: Option<Value>,
    pub u0: Option<Value>,
    #[serde(rename = "A")]
    pub a: Option<Value>,
    pub epsilon: Option<Value>,
    pub s: Option<Value>,
    pub generator: Option<String>,
    pub anchor: Option<Value>,
    pub window: Option<String>,
    pub rule: Option<String>,
    /// Initial H(sigma) for characteristics.
    pub h: Option<Value>,
    pub exact: Option<String>,
    pub relation: Option<String>,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub t: Option<String>,
    pub w: Option<String>,
    pub count: Option<usize>,
    pub sigma: Option<String>,
    pub i0: Option<f64>,
    pub j0: Option<f64>,
    pub step: Option<f64>,
    pub span: Option<f64>,
    pub h: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub residual: Option<f64>,
    pub round_trip: Option<f64>,
    pub factor: Option<f64>,
    pub relation: Option<f64>,
}

pub enum Plan {
    Argv(Vec<String>),
    Inline(InlineEntry),
}

pub fn load(path: &Path) -> Result<ProblemFile, Fail> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

struct Argv(Vec<String>);

impl Argv {
    fn push(&mut self, s: impl Into<String>) -> &mut Self {
        self.0.push(s.into());
        self
    }

    fn opt(&mut self, flag: &str, v: Option<impl ToString>) -> &mut Self {
        if let Some(v) = v {
            // one token, so values starting with '-' are not read as flags
            self.0.push(format!("--{flag}={}", v.to_string()));
        }
        self
    }
}

const HS: &str = "hunter-saxton";

pub fn plan(p: ProblemFile) -> Result<Plan, Fail> {
    let name = match p.entry {
        Some(EntryRef::Inline(e)) if p.action == Action::Verify => return Ok(Plan::Inline(e)),
        Some(EntryRef::Inline(_)) => return Err(usage("inline entries support only the verify action")),
        Some(EntryRef::Name(n)) => Some(n),
        None => None,
    };
    let q = &p.parameters;
    let mut a = Argv(vec!["tresse".into()]);
    a.opt("seed", p.seed);
    let needs = |v: &Option<Value>, what: &str| v.clone().ok_or_else(|| usage(format!("parameters.{what} is required")));
    match p.action {
        Action::Verify => {
            a.push("verify").push(name.ok_or_else(|| usage("verify needs an entry"))?);
        }
        Action::Solve if name.as_deref().unwrap_or(HS) == HS => {
            a.push("hs").push("solve").opt("g", Some(needs(&q.g, "g")?)).opt("C", q.c.clone());
            a.opt("t", q.grid.t.clone()).opt("w", q.grid.w.clone()).opt("count", q.grid.count);
            a.opt("anchor", q.anchor.clone()).opt("window", q.window.clone()).opt("h", q.grid.h);
            a.opt("tol", q.tolerances.residual);
        }
        Action::Solve => {
            a.push("catalog").push("solve").push(name.unwrap_or_default());
            a.opt("g", q.g.clone()).opt("C", q.c.clone());
            a.opt("param", q.a.as_ref().map(|v| format!("A={v}")));
            a.opt("param", q.epsilon.as_ref().map(|v| format!("epsilon={v}")));
        }
        Action::Cauchy => {
            a.push("hs").push("cauchy").opt("u0", Some(needs(&q.u0, "u0")?)).opt("t0", q.t0.clone());
            a.opt("window", q.window.clone()).opt("rule", q.rule.clone()).opt("C", q.c.clone());
            a.opt("anchor", q.anchor.clone()).opt("ts", q.grid.t.clone()).opt("h", q.grid.h);
            a.opt("tol", q.tolerances.round_trip).opt("residual-tol", q.tolerances.residual);
        }
        Action::Singular => {
            a.push("hs").push("singular");
            a.opt("from-cauchy", q.u0.clone()).opt("t0", q.t0.clone()).opt("window", q.window.clone());
            if q.u0.is_none() {
                a.opt("g", q.g.clone()).opt("C", q.c.clone());
            }
            a.opt("anchor", q.anchor.clone()).opt("t", q.grid.t.clone());
            a.opt("relation", q.relation.clone()).opt("tol", q.tolerances.relation);
        }
        Action::Characteristics => {
            a.push("catalog").push("characteristics").push(name.ok_or_else(|| usage("characteristics needs an entry"))?);
            a.opt("g", q.g.clone()).opt("C", q.c.clone()).opt("h", q.h.clone()).opt("exact", q.exact.clone());
            a.opt("param", q.a.as_ref().map(|v| format!("A={v}")));
            a.opt("param", q.epsilon.as_ref().map(|v| format!("epsilon={v}")));
            a.opt("step", q.grid.step).opt("span", q.grid.span).opt("sigma", q.grid.sigma.clone());
            a.opt("i0", q.grid.i0).opt("j0", q.grid.j0).opt("count", q.grid.count);
            a.opt("min-factor", q.tolerances.factor);
        }
        Action::Transform => {
            a.push("hs").push("transform").push("--check");
            a.opt("generator", Some(q.generator.clone().ok_or_else(|| usage("parameters.generator is required"))?));
            a.opt("s", Some(needs(&q.s, "s")?)).opt("g", Some(needs(&q.g, "g")?));
        }
    }
    Ok(Plan::Argv(a.0))
}

/// Symmetry checks of each generator on an inline equation.
pub fn run_inline(e: &InlineEntry) -> Outcome {
    let m = PdeManifold::parse(&e.f, &e.principal)?;
    println!("F = {}", m.f);
    let mut ok = true;
    for [a, b, c] in &e.generators {
        let x = VectorField::parse(a, b, c)?;
        let chk = m.check_symmetry(&x)?;
        println!("  [symmetry] {x}: {:?}", chk.verdict);
        if !chk.passed() {
            println!("    residual: {}", chk.residual);
        }
        ok &= chk.passed();
    }
    Ok(ok)
}
