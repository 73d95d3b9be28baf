use tresse::jet::total_derivative;
use tresse::sym::{is_zero, partial, Dir};

use crate::out::{expr, usage, Outcome};
use crate::ExprCmd;

pub fn run(cmd: ExprCmd) -> Outcome {
    match cmd {
        ExprCmd::Parse { expr: s } => {
            println!("{}", expr(&s)?);
            Ok(true)
        }
        ExprCmd::Diff { expr: s, var, total } => {
            let e = expr(&s)?;
            let d = match (var, total) {
                (Some(v), None) => {
                    let v = expr(&v)?.as_var().ok_or_else(|| usage(format!("`{v}` is not a variable")))?;
                    partial(&e, &v)
                }
                (None, Some(dir)) => {
                    let dir = match dir.as_str() {
                        "t" => Dir::T,
                        "x" => Dir::X,
                        _ => return Err(usage(format!("--total takes t or x, got `{dir}`"))),
                    };
                    total_derivative(&e, dir, 8)?
                }
                _ => return Err(usage("give exactly one of --var and --total")),
            };
            println!("{d}");
            Ok(true)
        }
        ExprCmd::Zero { expr: s } => {
            let v = is_zero(&expr(&s)?)?;
            println!("{}", format!("{v:?}").to_lowercase());
            Ok(v.passed())
        }
    }
}
