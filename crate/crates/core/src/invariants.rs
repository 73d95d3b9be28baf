//! Differential invariants, Tresse frames and differential syzygies.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jet::{apply_prolonged, VectorField};
use crate::pde::{Check, PdeManifold};
use crate::sym::{Dir, Expr, Subst, Var, Q};

/// restrict(X^{(∞)}(e)) for each generator.
pub fn check_invariant(e: &Expr, gens: &[VectorField], m: &PdeManifold) -> Result<Vec<Check>> {
    let e = m.restrict(e)?;
    gens.iter().map(|x| Check::of(m.restrict(&apply_prolonged(x, &e))?)).collect()
}

/// The Tresse derivatives ∂̂_I = α_I D_t + β_I D_x and ∂̂_J = α_J D_t + β_J D_x dual to dI, dJ.
#[derive(Clone, Debug)]
pub struct TresseFrame {
    pub i: Expr,
    pub j: Expr,
    pub di: (Expr, Expr),
    pub dj: (Expr, Expr),
    /// D_t(I)D_x(J) − D_x(I)D_t(J), restricted; assumed nonzero.
    pub det: Expr,
    pub alpha_i: Expr,
    pub beta_i: Expr,
    pub alpha_j: Expr,
    pub beta_j: Expr,
}

impl TresseFrame {
    pub fn new(i: &Expr, j: &Expr, m: &PdeManifold) -> Result<Self> {
        let i = m.restrict(i)?;
        let j = m.restrict(j)?;
        let di = (m.total(&i, Dir::T)?, m.total(&i, Dir::X)?);
        let dj = (m.total(&j, Dir::T)?, m.total(&j, Dir::X)?);
        let det = &di.0 * &dj.1 - &di.1 * &dj.0;
        if det.is_zero() {
            return Err(Error::DegeneratePair(format!("I = {i}, J = {j}")));
        }
        let inv = det.inv();
        Ok(TresseFrame {
            alpha_i: &dj.1 * &inv,
            beta_i: -(&dj.0 * &inv),
            alpha_j: -(&di.1 * &inv),
            beta_j: &di.0 * &inv,
            i,
            j,
            di,
            dj,
            det,
        })
    }

    pub fn apply_i(&self, e: &Expr, m: &PdeManifold) -> Result<Expr> {
        Ok(&self.alpha_i * m.total(e, Dir::T)? + &self.beta_i * m.total(e, Dir::X)?)
    }

    pub fn apply_j(&self, e: &Expr, m: &PdeManifold) -> Result<Expr> {
        Ok(&self.alpha_j * m.total(e, Dir::T)? + &self.beta_j * m.total(e, Dir::X)?)
    }

    /// ∂̂_I or ∂̂_J by letter.
    pub fn apply(&self, which: char, e: &Expr, m: &PdeManifold) -> Result<Expr> {
        match which {
            'I' => self.apply_i(e, m),
            'J' => self.apply_j(e, m),
            c => Err(Error::InvalidParameter(format!("no Tresse derivative `{c}`"))),
        }
    }

    /// Residuals of ∂̂_I I − 1, ∂̂_I J, ∂̂_J I, ∂̂_J J − 1.
    pub fn duality(&self, m: &PdeManifold) -> Result<[Check; 4]> {
        Ok([
            Check::of(self.apply_i(&self.i, m)? - Expr::one())?,
            Check::of(self.apply_i(&self.j, m)?)?,
            Check::of(self.apply_j(&self.i, m)?)?,
            Check::of(self.apply_j(&self.j, m)? - Expr::one())?,
        ])
    }

    /// restrict(∂̂_I∂̂_J(probe) − ∂̂_J∂̂_I(probe)).
    pub fn check_commutation(&self, probe: &Expr, m: &PdeManifold) -> Result<Check> {
        let probe = m.restrict(probe)?;
        let ij = self.apply_i(&self.apply_j(&probe, m)?, m)?;
        let ji = self.apply_j(&self.apply_i(&probe, m)?, m)?;
        Check::of(ij - ji)
    }
}

/// Realizes syzygy tokens as restricted jet expressions. Tokens are `I`, `J`, the named
/// invariants, and `name_w` for a word w over {I, J}: `H_IJ` is ∂̂_J∂̂_I(H).
pub struct Realizer<'a> {
    pub m: &'a PdeManifold,
    pub frame: &'a TresseFrame,
    base: HashMap<String, Expr>,
    memo: HashMap<String, Expr>,
}

impl<'a> Realizer<'a> {
    pub fn new(m: &'a PdeManifold, frame: &'a TresseFrame, invariants: &[(&str, Expr)]) -> Result<Self> {
        let mut base = HashMap::new();
        base.insert("I".to_string(), frame.i.clone());
        base.insert("J".to_string(), frame.j.clone());
        for (n, e) in invariants {
            base.insert(n.to_string(), m.restrict(e)?);
        }
        Ok(Realizer { m, frame, base, memo: HashMap::new() })
    }

    fn split(name: &str) -> (&str, &str) {
        match name.rfind('_') {
            Some(p) if p + 1 < name.len() && name[p + 1..].chars().all(|c| c == 'I' || c == 'J') => (&name[..p], &name[p + 1..]),
            _ => (name, ""),
        }
    }

    pub fn is_token(&self, name: &str) -> bool {
        self.base.contains_key(Self::split(name).0)
    }

    pub fn token(&mut self, name: &str) -> Result<Expr> {
        if let Some(e) = self.memo.get(name) {
            return Ok(e.clone());
        }
        let (b, word) = Self::split(name);
        let e = match word.chars().last() {
            None => self.base.get(b).cloned().ok_or_else(|| Error::Unbound(name.to_string()))?,
            Some(c) => {
                let prev = if word.len() == 1 { b.to_string() } else { format!("{b}_{}", &word[..word.len() - 1]) };
                let inner = self.token(&prev)?;
                self.frame.apply(c, &inner, self.m)?
            }
        };
        self.memo.insert(name.to_string(), e.clone());
        Ok(e)
    }

    /// Substitutes every token in `lhs` by its realization.
    pub fn realize(&mut self, lhs: &Expr) -> Result<Expr> {
        let mut s = Subst::new();
        for v in lhs.free_vars() {
            if let Var::Named(n) = &v {
                if self.is_token(n) {
                    s.bind(v.clone(), self.token(n)?);
                }
            }
        }
        Ok(s.apply(lhs))
    }

    pub fn check(&mut self, s: &Syzygy) -> Result<Check> {
        Check::of(self.realize(&s.lhs)?)
    }
}

/// A relation among tokens.
#[derive(Clone, Debug, PartialEq)]
pub struct Syzygy {
    pub lhs: Expr,
}

impl Syzygy {
    pub fn new(lhs: Expr) -> Self {
        Syzygy { lhs }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Syzygy { lhs: crate::parse(s)? })
    }
}

impl std::fmt::Display for Syzygy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} = 0", self.lhs)
    }
}

pub fn check_syzygy(s: &Syzygy, r: &mut Realizer) -> Result<Check> {
    r.check(s)
}

const P: u64 = (1 << 61) - 1;

fn mulm(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powm(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a);
        }
        a = mulm(a, a);
        e >>= 1;
    }
    r
}

fn invm(a: u64) -> u64 {
    powm(a, P - 2)
}

fn subm(a: u64, b: u64) -> u64 {
    (a + P - b) % P
}

fn q_mod(q: &Q) -> Option<u64> {
    let p = BigInt::from(P);
    let n = q.numer().mod_floor(&p).to_u64()?;
    let d = q.denom().mod_floor(&p).to_u64()?;
    (d != 0).then(|| mulm(n, invm(d)))
}

/// a/b with |a|, |b| < √(p/2) and a ≡ b·x (mod p).
fn rational_reconstruct(x: u64) -> Option<Q> {
    let bound = ((P / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (P as i128, x as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 >= bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if s1 == 0 || s1.abs() >= bound {
        return None;
    }
    Some(Q::new(BigInt::from(r1), BigInt::from(s1)))
}

/// Row-reduces in place; returns pivot columns.
fn rref(rows: &mut Vec<Vec<u64>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else { continue };
        rows.swap(r, k);
        let inv = invm(rows[r][c]);
        for v in rows[r].iter_mut() {
            *v = mulm(*v, inv);
        }
        for k in 0..rows.len() {
            if k != r && rows[k][c] != 0 {
                let f = rows[k][c];
                for cc in 0..ncols {
                    let sub = mulm(f, rows[r][cc]);
                    rows[k][cc] = subm(rows[k][cc], sub);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

fn nullspace(mut rows: Vec<Vec<u64>>, ncols: usize) -> Vec<Vec<u64>> {
    let pivots = rref(&mut rows, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0; ncols];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = subm(0, rows[r][free]);
        }
        basis.push(v);
    }
    basis
}

/// Exponent vectors of total degree ≤ d, ordered by degree then lexicographically.
fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for deg in 0..=d {
        let mut all = Vec::new();
        rec(n, deg, &mut Vec::new(), &mut all);
        out.extend(all.into_iter().filter(|m| m.iter().sum::<u32>() == deg));
    }
    out
}

/// Settings for [`discover_syzygy`].
#[derive(Clone, Debug)]
pub struct DiscoverSettings {
    pub max_degree: u32,
    pub seed: u64,
    /// Extra sample points beyond the number of monomials.
    pub oversample: usize,
}

impl Default for DiscoverSettings {
    fn default() -> Self {
        DiscoverSettings { max_degree: 4, seed: 0x5eed, oversample: 12 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Discovery {
    pub syzygies: Vec<Syzygy>,
    /// Candidates from the sampled nullspace that failed symbolic verification.
    pub spurious: Vec<Syzygy>,
}

fn random_q(rng: &mut ChaCha8Rng) -> Q {
    let n: i64 = loop {
        let n = rng.gen_range(-12i64..=12);
        if n != 0 {
            break n;
        }
    };
    Q::new(n.into(), rng.gen_range(1i64..=7).into())
}

/// Tokens of the discovery ansatz: I, J, then each generator with its first Tresse derivatives.
pub fn ansatz_tokens(gens: &[&str]) -> Vec<String> {
    let mut out = vec!["I".to_string(), "J".to_string()];
    for g in gens {
        out.extend([g.to_string(), format!("{g}_I"), format!("{g}_J")]);
    }
    out
}

/// Polynomial relations of degree ≤ `degree` among [`ansatz_tokens`], found as the nullspace
/// of their values at random points of E (mod a 61-bit prime), lifted by rational
/// reconstruction and re-verified symbolically. Only minimal generators are returned:
/// multiples of lower-degree relations are dropped.
pub fn discover_syzygy(gens: &[&str], degree: u32, r: &mut Realizer, settings: &DiscoverSettings) -> Result<Discovery> {
    let owned = ansatz_tokens(gens);
    let tokens: Vec<&str> = owned.iter().map(String::as_str).collect();
    let tokens = &tokens[..];
    if degree > settings.max_degree {
        return Err(Error::InvalidParameter(format!("ansatz degree {degree} exceeds the maximum {}", settings.max_degree)));
    }
    let values: Vec<Expr> = tokens.iter().map(|t| r.token(t)).collect::<Result<_>>()?;
    let mut atoms: Vec<Var> = values.iter().flat_map(|v| v.free_vars()).collect();
    atoms.sort_by_key(|v| v.name());
    atoms.dedup();

    let mons = monomials(tokens.len(), degree);
    let npts = mons.len() + settings.oversample;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut samples: Vec<Vec<u64>> = Vec::with_capacity(npts);
    let mut failures = 0;
    while samples.len() < npts {
        let env: HashMap<Var, Q> = atoms.iter().map(|a| (a.clone(), random_q(&mut rng))).collect();
        let mut row = Vec::with_capacity(values.len());
        for v in &values {
            match v.eval_exact(&env)?.as_ref().and_then(q_mod) {
                Some(x) => row.push(x),
                None => break,
            }
        }
        if row.len() < values.len() {
            failures += 1;
            if failures > 32 + npts {
                return Err(Error::Indeterminate(failures));
            }
            continue;
        }
        samples.push(row);
    }

    let eval_mono = |m: &[u32], row: &[u64]| m.iter().zip(row).fold(1, |acc, (&e, &x)| mulm(acc, powm(x, e as u64)));
    let index: HashMap<Vec<u32>, usize> = mons.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let mut found: Vec<(Vec<(Vec<u32>, u64)>, u32)> = Vec::new();
    let mut out = Discovery::default();

    for d in 1..=degree {
        let cols: Vec<&Vec<u32>> = mons.iter().filter(|m| m.iter().sum::<u32>() <= d).collect();
        let n = cols.len();
        // columns ordered highest degree first so pivots land on leading monomials
        let order: Vec<usize> = (0..n).rev().collect();
        let rows: Vec<Vec<u64>> = samples.iter().map(|row| order.iter().map(|&c| eval_mono(cols[c], row)).collect()).collect();
        let null = nullspace(rows, n);
        if null.is_empty() {
            continue;
        }
        // span of multiples of known generators
        let mut known: Vec<Vec<u64>> = Vec::new();
        for (g, gdeg) in &found {
            for m in mons.iter().filter(|m| m.iter().sum::<u32>() + gdeg <= d) {
                let mut v = vec![0; n];
                for (gm, c) in g {
                    let prod: Vec<u32> = gm.iter().zip(m).map(|(a, b)| a + b).collect();
                    let pos = n - 1 - index[&prod];
                    v[pos] = (v[pos] + c) % P;
                }
                known.push(v);
            }
        }
        let base_rank = rref(&mut known.clone(), n).len();
        let mut span = known;
        let mut fresh = Vec::new();
        for v in null {
            let mut trial = span.clone();
            trial.push(v.clone());
            if rref(&mut trial.clone(), n).len() > base_rank + fresh.len() {
                span.push(v.clone());
                fresh.push(v);
            }
        }
        if fresh.is_empty() {
            continue;
        }
        rref(&mut fresh, n);
        for v in fresh {
            let lead = v.iter().copied().find(|&c| c != 0).unwrap();
            let inv = invm(lead);
            let mut coeffs = Vec::new();
            let mut ok = true;
            for (pos, &c) in v.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                match rational_reconstruct(mulm(c, inv)) {
                    Some(q) => coeffs.push((cols[order[pos]].clone(), q)),
                    None => ok = false,
                }
            }
            if !ok {
                continue;
            }
            let lhs = build_relation(tokens, &coeffs);
            let syz = Syzygy::new(lhs);
            if r.check(&syz)?.passed() {
                let modded = coeffs.iter().map(|(m, q)| (m.clone(), q_mod(q).unwrap())).collect();
                found.push((modded, d));
                out.syzygies.push(syz);
            } else {
                out.spurious.push(syz);
            }
        }
    }
    Ok(out)
}

fn build_relation(tokens: &[&str], coeffs: &[(Vec<u32>, Q)]) -> Expr {
    // clear denominators, make the content 1, leading coefficient positive
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for (_, q) in coeffs {
        den = den.lcm(q.denom());
        num = num.gcd(q.numer());
    }
    let mut scale = Q::new(den, num.max(BigInt::one()));
    if coeffs.first().map(|(_, q)| q.is_negative()).unwrap_or(false) {
        scale = -scale;
    }
    let mut e = Expr::zero();
    for (m, q) in coeffs {
        let mut term = Expr::rational(q * &scale);
        for (t, &k) in tokens.iter().zip(m) {
            if k > 0 {
                term = term * Expr::named(t).powi(k as i64);
            }
        }
        e = e + term;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstruction_recovers_small_fractions() {
        for (n, d) in [(3i64, 7i64), (-5, 2), (1, 1), (-12345, 678)] {
            let q = Q::new(n.into(), d.into());
            assert_eq!(rational_reconstruct(q_mod(&q).unwrap()), Some(q));
        }
    }

    #[test]
    fn nullspace_of_dependent_columns() {
        // columns: a, b, a + 2b
        let rows = vec![vec![1, 0, 1], vec![0, 1, 2], vec![3, 4, 11]];
        let ns = nullspace(rows, 3);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![P - 1, P - 2, 1]);
    }

    #[test]
    fn monomial_order() {
        let m = monomials(2, 2);
        assert_eq!(m, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
    }
}
