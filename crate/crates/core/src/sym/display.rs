use num_traits::{One, Signed};

use super::expr::Expr;
use super::kernel::KernelKind;
use super::poly::{Mono, Poly};

fn mono_to_string(m: &Mono) -> String {
    let mut parts = Vec::with_capacity(m.len());
    for (k, e) in m {
        let s = match k.kind() {
            KernelKind::Root { base, q } => format!("({base})^({e}/{q})"),
            _ if *e == 1 => k.key().to_string(),
            _ if *e < 0 => format!("{}^({e})", k.key()),
            _ => format!("{}^{e}", k.key()),
        };
        parts.push(s);
    }
    parts.join("*")
}

pub fn poly_to_string(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if m.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&mono_to_string(m));
        } else {
            out.push_str(&format!("{a}*{}", mono_to_string(m)));
        }
    }
    out
}

pub fn expr_to_string(e: &Expr) -> String {
    let num = poly_to_string(e.num());
    if e.den().is_empty() {
        return num;
    }
    let dens: Vec<String> = e
        .den()
        .iter()
        .map(|(f, k)| if *k == 1 { format!("({})", f.key()) } else { format!("({})^{k}", f.key()) })
        .collect();
    let num = if e.num().len() > 1 { format!("({num})") } else { num };
    format!("{num}/({})", dens.join("*"))
}
