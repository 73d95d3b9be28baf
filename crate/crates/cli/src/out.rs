//! Output location, atomic writes, number formatting and exit classification.

use std::io::Write;
use std::path::{Path, PathBuf};

pub const OUT_DIR_ENV: &str = "TRESSE_OUT_DIR";

/// Failure classes: usage errors exit 2, everything else 1.
#[derive(Debug)]
pub enum Fail {
    Usage(String),
    Run(String),
}

impl From<tresse::Error> for Fail {
    fn from(e: tresse::Error) -> Self {
        use tresse::Error::*;
        match e {
            UnknownEntry(_) | Parse { .. } | InvalidParameter(_) => Fail::Usage(e.to_string()),
            _ => Fail::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail::Run(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail::Run(format!("json: {e}"))
    }
}

pub fn usage(msg: impl Into<String>) -> Fail {
    Fail::Usage(msg.into())
}

/// Command outcome: Ok(true) passes, Ok(false) is a verification failure.
pub type Outcome = Result<bool, Fail>;

pub struct Output {
    pub dir: PathBuf,
}

impl Output {
    pub fn new(flag: Option<PathBuf>) -> Self {
        let dir = flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
        Output { dir }
    }

    /// Writes via a temporary file in the target directory and renames it into place.
    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, Fail> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(contents.as_bytes())?;
        tmp.persist(&path).map_err(|e| Fail::Run(format!("i/o: {}", e.error)))?;
        println!("wrote {}", display(&path));
        Ok(path)
    }

    pub fn write_json<T: serde::Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, Fail> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, &s)
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `a`, `a:b` (count points) or `a:b:step`.
pub fn range(s: &str, count: usize) -> Result<Vec<f64>, Fail> {
    let parts: Vec<&str> = s.split(':').collect();
    let f = |p: &str| p.trim().parse::<f64>().map_err(|_| usage(format!("bad number `{p}` in range `{s}`")));
    match parts.as_slice() {
        [a] => Ok(vec![f(a)?]),
        [a, b] => Ok(tresse::hs::linspace(f(a)?, f(b)?, count)),
        [a, b, st] => {
            let (a, b, st) = (f(a)?, f(b)?, f(st)?);
            if !(st > 0.0) || b < a {
                return Err(usage(format!("range `{s}` needs a ≤ b and a positive step")));
            }
            let n = ((b - a) / st + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| a + k as f64 * st).collect())
        }
        _ => Err(usage(format!("bad range `{s}` (expected a, a:b or a:b:step)"))),
    }
}

/// `a:b` as a pair.
pub fn interval(s: &str) -> Result<(f64, f64), Fail> {
    match range(s, 2)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(usage(format!("`{s}` is not an interval a:b"))),
    }
}

pub fn expr(s: &str) -> Result<tresse::Expr, Fail> {
    Ok(tresse::parse(s)?)
}

/// `NAME=VALUE` pairs.
pub fn pair(s: &str) -> Result<(String, String), Fail> {
    let (k, v) = s.split_once('=').ok_or_else(|| usage(format!("expected NAME=VALUE, got `{s}`")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}
