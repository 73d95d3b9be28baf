use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use super::expr::Expr;

/// A jet coordinate u_{t^i x^j}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    pub t: u32,
    pub x: u32,
}

impl JetVar {
    pub const U: JetVar = JetVar { t: 0, x: 0 };

    pub const fn new(t: u32, x: u32) -> Self {
        JetVar { t, x }
    }

    pub fn order(self) -> u32 {
        self.t + self.x
    }

    pub fn dt(self) -> Self {
        JetVar::new(self.t + 1, self.x)
    }

    pub fn dx(self) -> Self {
        JetVar::new(self.t, self.x + 1)
    }

    pub fn d(self, dir: Dir) -> Self {
        match dir {
            Dir::T => self.dt(),
            Dir::X => self.dx(),
        }
    }

    /// Is `self` a derivative of `other` (componentwise ≥)?
    pub fn divisible_by(self, other: JetVar) -> bool {
        self.t >= other.t && self.x >= other.x
    }

    pub fn name(self) -> String {
        if self.order() == 0 {
            return "u".to_string();
        }
        let mut s = String::from("u_");
        s.extend(std::iter::repeat('t').take(self.t as usize));
        s.extend(std::iter::repeat('x').take(self.x as usize));
        s
    }

    /// Parses `u`, `u_t`, `u_xt`, ... in any letter order.
    pub fn parse(name: &str) -> Option<Self> {
        if name == "u" {
            return Some(JetVar::U);
        }
        let rest = name.strip_prefix("u_")?;
        if rest.is_empty() {
            return None;
        }
        let mut j = JetVar::U;
        for c in rest.chars() {
            match c {
                't' => j.t += 1,
                'x' => j.x += 1,
                _ => return None,
            }
        }
        Some(j)
    }

    /// All jets of total order ≤ k, ordered by order then by x-order descending.
    pub fn all_up_to(k: u32) -> Vec<JetVar> {
        let mut v = Vec::new();
        for n in 0..=k {
            for t in 0..=n {
                v.push(JetVar::new(t, n - t));
            }
        }
        v
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Direction of a total derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    T,
    X,
}

/// An atom: named variable, jet coordinate, or the bound variable of a formal integral.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Named(Arc<str>),
    Jet(JetVar),
    Bound(u32),
}

impl Var {
    pub fn named(s: &str) -> Var {
        Var::Named(Arc::from(s))
    }

    pub fn jet(t: u32, x: u32) -> Var {
        Var::Jet(JetVar::new(t, x))
    }

    pub fn as_jet(&self) -> Option<JetVar> {
        match self {
            Var::Jet(j) => Some(*j),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Var::Named(s) => s.to_string(),
            Var::Jet(j) => j.name(),
            Var::Bound(d) => format!("_v{d}"),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Debug)]
pub enum KernelKind {
    Var(Var),
    Exp(Expr),
    Ln(Expr),
    Atanh(Expr),
    /// base^(1/q), q ≥ 2
    Root { base: Expr, q: u32 },
    /// Formal function with partial-derivative orders per argument.
    Func { name: Arc<str>, orders: Vec<u32>, args: Vec<Expr> },
    /// ∫₀^upper body d(Bound(bound)).
    Integral { body: Expr, bound: u32, upper: Expr },
}

pub(crate) struct KernelData {
    pub kind: KernelKind,
    pub key: String,
    hash: u64,
    /// Largest index bound by an integral nested inside (0 if none).
    pub depth: u32,
    /// Free atoms, sorted by name and deduplicated.
    pub vars: Vec<Var>,
    /// Names of formal functions occurring inside.
    pub funcs: Vec<Arc<str>>,
}

/// An interned kernel. Equality is pointer equality.
#[derive(Clone)]
pub struct Kernel(pub(crate) Arc<KernelData>);

static INTERNER: Lazy<Mutex<HashMap<String, Kernel>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn var_sort_key(v: &Var) -> (u8, String) {
    match v {
        Var::Named(s) => (0, s.to_string()),
        Var::Jet(j) => (1, format!("{:04}{:04}", j.order(), j.t)),
        Var::Bound(d) => (2, format!("{d:08}")),
    }
}

impl Kernel {
    pub fn new(kind: KernelKind) -> Kernel {
        let key = kernel_key(&kind);
        let mut table = INTERNER.lock().unwrap();
        if let Some(k) = table.get(&key) {
            return k.clone();
        }
        let mut h = DefaultHasher::new();
        key.hash(&mut h);
        let hash = h.finish();
        let (depth, vars, funcs) = kernel_meta(&kind);
        let k = Kernel(Arc::new(KernelData { kind, key: key.clone(), hash, depth, vars, funcs }));
        table.insert(key, k.clone());
        k
    }

    pub fn var(v: Var) -> Kernel {
        Kernel::new(KernelKind::Var(v))
    }

    pub fn kind(&self) -> &KernelKind {
        &self.0.kind
    }

    pub fn key(&self) -> &str {
        &self.0.key
    }

    pub fn as_var(&self) -> Option<&Var> {
        match &self.0.kind {
            KernelKind::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn vars(&self) -> &[Var] {
        &self.0.vars
    }

    pub fn funcs(&self) -> &[Arc<str>] {
        &self.0.funcs
    }

    pub fn depth(&self) -> u32 {
        self.0.depth
    }

    pub fn is_atom(&self) -> bool {
        matches!(self.0.kind, KernelKind::Var(_))
    }
}

fn kernel_meta(kind: &KernelKind) -> (u32, Vec<Var>, Vec<Arc<str>>) {
    let mut vars: Vec<Var> = Vec::new();
    let mut funcs: Vec<Arc<str>> = Vec::new();
    let mut mb = 0;
    let absorb = |e: &Expr, vars: &mut Vec<Var>, funcs: &mut Vec<Arc<str>>, mb: &mut u32| {
        for k in e.kernels() {
            *mb = (*mb).max(k.depth());
            vars.extend_from_slice(k.vars());
            funcs.extend_from_slice(k.funcs());
        }
    };
    match kind {
        KernelKind::Var(v) => vars.push(v.clone()),
        KernelKind::Exp(a) | KernelKind::Ln(a) | KernelKind::Atanh(a) => absorb(a, &mut vars, &mut funcs, &mut mb),
        KernelKind::Root { base, .. } => absorb(base, &mut vars, &mut funcs, &mut mb),
        KernelKind::Func { name, args, .. } => {
            funcs.push(name.clone());
            for a in args {
                absorb(a, &mut vars, &mut funcs, &mut mb);
            }
        }
        KernelKind::Integral { body, bound, upper } => {
            let mut bv = Vec::new();
            absorb(body, &mut bv, &mut funcs, &mut mb);
            bv.retain(|v| *v != Var::Bound(*bound));
            vars.extend(bv);
            absorb(upper, &mut vars, &mut funcs, &mut mb);
            mb = mb.max(*bound);
        }
    }
    vars.sort_by_cached_key(var_sort_key);
    vars.dedup();
    funcs.sort();
    funcs.dedup();
    (mb, vars, funcs)
}

fn kernel_key(kind: &KernelKind) -> String {
    match kind {
        KernelKind::Var(v) => v.name(),
        KernelKind::Exp(a) => format!("exp({a})"),
        KernelKind::Ln(a) => format!("ln({a})"),
        KernelKind::Atanh(a) => format!("atanh({a})"),
        KernelKind::Root { base, q } => format!("({base})^(1/{q})"),
        KernelKind::Func { name, orders, args } => {
            let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
            let args = args.join(", ");
            if orders.iter().all(|&o| o == 0) {
                format!("{name}({args})")
            } else if orders.len() == 1 && orders[0] <= 3 {
                format!("{name}{}({args})", "'".repeat(orders[0] as usize))
            } else {
                let o: Vec<String> = orders.iter().map(|o| o.to_string()).collect();
                format!("D({name}, {})({args})", o.join(", "))
            }
        }
        KernelKind::Integral { body, bound, upper } => {
            format!("int({body}, _v{bound}, 0, {upper})")
        }
    }
}

impl PartialEq for Kernel {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Kernel {}

impl Hash for Kernel {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Kernel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Kernel {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        kind_rank(&self.0.kind)
            .cmp(&kind_rank(&other.0.kind))
            .then_with(|| match (&self.0.kind, &other.0.kind) {
                (KernelKind::Var(Var::Jet(a)), KernelKind::Var(Var::Jet(b))) => {
                    (a.order(), a.t).cmp(&(b.order(), b.t))
                }
                _ => self.0.key.cmp(&other.0.key),
            })
    }
}

fn kind_rank(k: &KernelKind) -> u8 {
    match k {
        KernelKind::Var(Var::Named(_)) => 0,
        KernelKind::Var(Var::Bound(_)) => 1,
        KernelKind::Var(Var::Jet(_)) => 2,
        KernelKind::Func { .. } => 3,
        KernelKind::Exp(_) => 4,
        KernelKind::Ln(_) => 5,
        KernelKind::Root { .. } => 6,
        KernelKind::Atanh(_) => 7,
        KernelKind::Integral { .. } => 8,
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.key)
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.key)
    }
}
