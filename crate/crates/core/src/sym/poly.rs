//! Sparse Laurent polynomials over Q in kernel monomials.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::kernel::Kernel;
use super::Q;

/// Monomial: kernels with nonzero exponents, sorted ascending by kernel order.
pub type Mono = SmallVec<[(Kernel, i32); 4]>;

pub fn mono_degree(m: &Mono) -> i64 {
    m.iter().map(|(_, e)| *e as i64).sum()
}

/// Graded order, ties broken lexicographically from the largest kernel down.
pub fn mono_cmp(a: &Mono, b: &Mono) -> Ordering {
    let (da, db) = (mono_degree(a), mono_degree(b));
    if da != db {
        return da.cmp(&db);
    }
    let (mut i, mut j) = (a.len(), b.len());
    while i > 0 || j > 0 {
        match (i > 0, j > 0) {
            (true, true) => {
                let (ka, ea) = &a[i - 1];
                let (kb, eb) = &b[j - 1];
                match ka.cmp(kb) {
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i -= 1;
                        j -= 1;
                    }
                    Ordering::Greater => return ea.cmp(&0),
                    Ordering::Less => return 0.cmp(eb),
                }
            }
            (true, false) => return a[i - 1].1.cmp(&0),
            (false, true) => return 0.cmp(&b[j - 1].1),
            _ => unreachable!(),
        }
    }
    Ordering::Equal
}

pub fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = Mono::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0.clone(), e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a[i..].iter().cloned());
    out.extend(b[j..].iter().cloned());
    out
}

pub fn mono_pow(a: &Mono, n: i32) -> Mono {
    if n == 0 {
        return Mono::new();
    }
    a.iter().map(|(k, e)| (k.clone(), e * n)).collect()
}

pub fn mono_inv(a: &Mono) -> Mono {
    mono_pow(a, -1)
}

/// Does `a` divide `b` as ordinary (nonnegative) monomials?
fn mono_divides(a: &Mono, b: &Mono) -> bool {
    a.iter().all(|(k, e)| exp_in(b, k) >= *e)
}

pub fn exp_in(m: &Mono, k: &Kernel) -> i32 {
    m.iter().find(|(kk, _)| kk == k).map(|(_, e)| *e).unwrap_or(0)
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    /// Sorted by descending monomial order, nonzero coefficients.
    pub terms: Vec<(Mono, Q)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Mono::new(), c)] }
        }
    }

    pub fn kernel(k: Kernel) -> Poly {
        Poly::term(smallvec::smallvec![(k, 1)], Q::one())
    }

    pub fn term(m: Mono, c: Q) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 if self.terms[0].0.is_empty() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_empty() && self.terms[0].1.is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    fn from_map(map: HashMap<Mono, Q>) -> Poly {
        let mut terms: Vec<(Mono, Q)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| mono_cmp(&b.0, &a.0));
        Poly { terms }
    }

    /// Builds a polynomial from unsorted, possibly repeated terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, Q)>) -> Poly {
        let mut map: HashMap<Mono, Q> = HashMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert_with(Q::zero) += c;
        }
        Poly::from_map(map)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match mono_cmp(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Poly { terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    /// Multiplication by a single term keeps the order.
    pub fn mul_term(&self, m: &Mono, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(mm, d)| (mono_mul(mm, m), d * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        if small.len() == 1 {
            return big.mul_term(&small.terms[0].0, &small.terms[0].1);
        }
        let mut map: HashMap<Mono, Q> = HashMap::with_capacity(small.len() * big.len());
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                let m = mono_mul(ma, mb);
                let c = ca * cb;
                match map.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        map.insert(m, c);
                    }
                }
            }
        }
        Poly::from_map(map)
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn leading_coeff(&self) -> Option<&Q> {
        self.terms.first().map(|(_, c)| c)
    }

    /// Kernels occurring, sorted and deduplicated.
    pub fn kernels(&self) -> Vec<Kernel> {
        let mut v: Vec<Kernel> = self.terms.iter().flat_map(|(m, _)| m.iter().map(|(k, _)| k.clone())).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn contains(&self, k: &Kernel) -> bool {
        self.terms.iter().any(|(m, _)| m.iter().any(|(kk, _)| kk == k))
    }

    pub fn max_exp(&self, k: &Kernel) -> i32 {
        self.terms.iter().map(|(m, _)| exp_in(m, k)).max().unwrap_or(0)
    }

    /// Componentwise minimum exponent over all terms (the monomial content).
    pub fn monomial_content(&self) -> Mono {
        let ks = self.kernels();
        let mut out = Mono::new();
        for k in ks {
            let e = self.terms.iter().map(|(m, _)| exp_in(m, &k)).min().unwrap_or(0);
            if e != 0 {
                out.push((k, e));
            }
        }
        out
    }

    /// Formal partial derivative with respect to a kernel.
    pub fn diff_kernel(&self, k: &Kernel) -> Poly {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = exp_in(m, k);
            if e == 0 {
                return None;
            }
            let mut m2 = m.clone();
            let pos = m2.iter().position(|(kk, _)| kk == k).unwrap();
            if e == 1 {
                m2.remove(pos);
            } else {
                m2[pos].1 = e - 1;
            }
            Some((m2, c * Q::from_integer(e.into())))
        });
        Poly::from_terms(terms)
    }

    /// Gathers derivatives for all kernels in one pass.
    pub fn gradient(&self) -> Vec<(Kernel, Poly)> {
        let mut buckets: HashMap<Kernel, Vec<(Mono, Q)>> = HashMap::new();
        for (m, c) in &self.terms {
            for (pos, (k, e)) in m.iter().enumerate() {
                let mut m2 = m.clone();
                if *e == 1 {
                    m2.remove(pos);
                } else {
                    m2[pos].1 = e - 1;
                }
                buckets.entry(k.clone()).or_default().push((m2, c * Q::from_integer((*e).into())));
            }
        }
        let mut v: Vec<(Kernel, Poly)> = buckets.into_iter().map(|(k, ts)| (k, Poly::from_terms(ts))).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Exact division by `f`, where `f` has nonnegative exponents, no monomial content and
    /// at least two terms. Works in the Laurent ring: `self` is shifted first.
    pub fn exact_div(&self, f: &Poly) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if f.len() == 1 {
            let (m, c) = &f.terms[0];
            return Some(self.mul_term(&mono_inv(m), &(Q::one() / c)));
        }
        let content = self.monomial_content();
        let shift = mono_inv(&content);
        let mut r = self.mul_term(&shift, &Q::one());
        // cheap necessary conditions: leading and trailing monomials
        let (lf, lc) = &f.terms[0];
        if !mono_divides(lf, &r.terms[0].0) {
            return None;
        }
        let tf = &f.terms[f.len() - 1].0;
        if !mono_divides(tf, &r.terms[r.len() - 1].0) {
            return None;
        }
        for (k, e) in lf.iter().chain(tf.iter()) {
            if r.max_exp(k) < *e {
                return None;
            }
        }
        let inv_lc = Q::one() / lc;
        let mut q_terms: Vec<(Mono, Q)> = Vec::new();
        let mut steps = 0usize;
        while !r.is_zero() {
            let (rm, rc) = &r.terms[0];
            if !mono_divides(lf, rm) {
                return None;
            }
            let qm: Mono = mono_mul(rm, &mono_inv(lf));
            if qm.iter().any(|(_, e)| *e < 0) {
                return None;
            }
            let qc = rc * &inv_lc;
            r = r.sub(&f.mul_term(&qm, &qc));
            q_terms.push((qm, qc));
            steps += 1;
            if steps > 1_000_000 {
                return None;
            }
        }
        let q = Poly::from_terms(q_terms);
        Some(q.mul_term(&content, &Q::one()))
    }

    /// Multivariate division with remainder by `d` (nonnegative, no content); both inputs
    /// must have nonnegative exponents.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let mut r = self.clone();
        let mut q_terms = Vec::new();
        let mut rem_terms = Vec::new();
        let (lf, lc) = &d.terms[0];
        let inv_lc = Q::one() / lc;
        while !r.is_zero() {
            let (rm, rc) = r.terms[0].clone();
            if mono_divides(lf, &rm) && rm.iter().all(|(_, e)| *e >= 0) {
                let qm = mono_mul(&rm, &mono_inv(lf));
                let qc = &rc * &inv_lc;
                r = r.sub(&d.mul_term(&qm, &qc));
                q_terms.push((qm, qc));
            } else {
                rem_terms.push((rm, rc));
                r.terms.remove(0);
            }
        }
        (Poly::from_terms(q_terms), Poly::from_terms(rem_terms))
    }

    /// Writes `self = c · m · p` with `p` monomial-content-free, nonnegative, and
    /// leading coefficient 1, additionally with integer-primitive numerators when possible.
    pub fn split_content(&self) -> (Q, Mono, Poly) {
        let m = self.monomial_content();
        let shifted = self.mul_term(&mono_inv(&m), &Q::one());
        let c = shifted.leading_coeff().cloned().unwrap_or_else(Q::one);
        let p = shifted.scale(&(Q::one() / &c));
        (c, m, p)
    }

    /// LCM of denominators and GCD of numerators of the coefficients.
    pub fn rational_content(&self) -> Q {
        let mut num = num_bigint::BigInt::zero();
        let mut den = num_bigint::BigInt::one();
        for (_, c) in &self.terms {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Q::one();
        }
        let sign = if self.leading_coeff().map(|c| c.is_negative()).unwrap_or(false) { -1 } else { 1 };
        Q::new(num * sign, den)
    }
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", super::display::poly_to_string(self))
    }
}
