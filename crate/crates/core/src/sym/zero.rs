//! Zero testing: exact normal form first, random numeric evaluation as fallback.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eval::Env;
use super::expr::Expr;
use super::kernel::{Kernel, KernelKind, Var};
use super::subst::Lambda;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// The normal form is literally 0.
    Exact,
    /// Nonzero normal form that vanished at every random sample.
    Probabilistic,
    /// Nonzero at some sample.
    NonZero,
}

impl Verdict {
    pub fn passed(self) -> bool {
        !matches!(self, Verdict::NonZero)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ZeroTest {
    pub samples: usize,
    pub max_failures: usize,
    pub seed: u64,
    pub rel_tol: f64,
}

static DEFAULT_SEED: AtomicU64 = AtomicU64::new(0x5eed);

/// Seed used by `ZeroTest::default()` (and so by `is_zero`) from now on, process-wide.
pub fn set_default_seed(seed: u64) {
    DEFAULT_SEED.store(seed, Ordering::Relaxed);
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest { samples: 8, max_failures: 32, seed: DEFAULT_SEED.load(Ordering::Relaxed), rel_tol: 1e-8 }
    }
}

/// Zero test with default settings.
pub fn is_zero(e: &Expr) -> Result<Verdict> {
    ZeroTest::default().run(e)
}

fn collect_funcs(e: &Expr, out: &mut HashMap<Arc<str>, usize>) {
    for k in e.kernels() {
        collect_funcs_kernel(&k, out);
    }
}

fn collect_funcs_kernel(k: &Kernel, out: &mut HashMap<Arc<str>, usize>) {
    match k.kind() {
        KernelKind::Var(_) => {}
        KernelKind::Exp(a) | KernelKind::Ln(a) | KernelKind::Atanh(a) => collect_funcs(a, out),
        KernelKind::Root { base, .. } => collect_funcs(base, out),
        KernelKind::Func { name, args, .. } => {
            out.entry(name.clone()).or_insert(args.len());
            for a in args {
                collect_funcs(a, out);
            }
        }
        KernelKind::Integral { body, upper, .. } => {
            collect_funcs(body, out);
            collect_funcs(upper, out);
        }
    }
}

/// A random cubic polynomial in `n` parameters named `_p0.._p{n-1}`.
fn random_poly_lambda(n: usize, rng: &mut ChaCha8Rng) -> Lambda {
    let params: Vec<Var> = (0..n).map(|i| Var::named(&format!("_p{i}"))).collect();
    let mut body = Expr::zero();
    let mut monos: Vec<Vec<u32>> = vec![vec![0; n]];
    for _ in 0..3 {
        let mut next = Vec::new();
        for m in &monos {
            for i in 0..n {
                let mut m2 = m.clone();
                m2[i] += 1;
                next.push(m2);
            }
        }
        next.sort();
        next.dedup();
        monos.extend(next);
        monos.sort();
        monos.dedup();
    }
    for m in monos {
        let c = Expr::frac(rng.gen_range(-9..=9), rng.gen_range(2..=7));
        let mut t = c;
        for (i, &p) in m.iter().enumerate() {
            t = t.mul(&Expr::var(params[i].clone()).powi(p as i64));
        }
        body = body.add(&t);
    }
    Lambda::new(params, body)
}

impl ZeroTest {
    pub fn run(&self, e: &Expr) -> Result<Verdict> {
        if e.is_zero() {
            return Ok(Verdict::Exact);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let vars: Vec<Var> = e.free_vars();
        let mut funcs = HashMap::new();
        collect_funcs(e, &mut funcs);
        let mut names: Vec<_> = funcs.into_iter().collect();
        names.sort();
        let mut good = 0;
        let mut failures = 0;
        while good < self.samples {
            let mut env = Env::new();
            for v in &vars {
                let x: f64 = rng.gen_range(0.3..1.7) * if rng.gen_bool(0.25) { -1.0 } else { 1.0 };
                env.set(v.clone(), x);
            }
            for (name, arity) in &names {
                env.bind_lambda(name, random_poly_lambda(*arity, &mut rng));
            }
            match e.eval_num_with_scale(&env) {
                Ok((v, scale)) => {
                    if v.abs() > self.rel_tol * scale.max(1e-300) {
                        return Ok(Verdict::NonZero);
                    }
                    good += 1;
                }
                Err(Error::Pole(_)) | Err(Error::Domain(_)) | Err(Error::Quadrature(_)) => {
                    failures += 1;
                    if failures >= self.max_failures {
                        return Err(Error::Indeterminate(failures));
                    }
                }
                Err(other) => return Err(other),
            }
        }
        Ok(Verdict::Probabilistic)
    }
}
