//! Line-oriented problem files.
//!
//! ```text
//! # comment
//! component v
//! equation Dt^a v = v_xx
//! ic v = sin(x)
//! alpha 0.5
//! ```

use std::path::Path;

use thiserror::Error;

use super::parse::parse_equation;
use super::problem::{ProblemSpec, SpecError};
use crate::spatial_expr::SpatialExpr;

#[derive(Debug, Error)]
pub enum ProblemFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Line {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Spec {
        path: String,
        #[source]
        source: SpecError,
    },
    #[error("{path}: no alpha given (add an 'alpha' line or override it)")]
    NoAlpha { path: String },
}

/// Reads and validates a problem file. `alpha` overrides the file's value.
pub fn load_problem(path: &Path, alpha: Option<f64>) -> Result<ProblemSpec, ProblemFileError> {
    let label = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ProblemFileError::Io {
        path: label.clone(),
        source,
    })?;
    parse_problem(&text, &label, alpha)
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

/// Parses problem text; `label` names the source in error messages.
pub fn parse_problem(
    text: &str,
    label: &str,
    alpha: Option<f64>,
) -> Result<ProblemSpec, ProblemFileError> {
    let err = |line: usize, message: String| ProblemFileError::Line {
        path: label.to_string(),
        line,
        message,
    };
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();

    let mut names: Vec<String> = Vec::new();
    for &(n, line) in &lines {
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        if key == "component" {
            let name = rest.trim();
            if !is_ident(name) {
                return Err(err(n, format!("invalid component name '{name}'")));
            }
            if names.iter().any(|c| c == name) {
                return Err(err(n, format!("component '{name}' declared twice")));
            }
            names.push(name.to_string());
        }
    }

    let mut file_alpha: Option<f64> = None;
    let mut equations = Vec::new();
    let mut targets: Vec<usize> = Vec::new();
    let mut ics = Vec::new();
    let mut dim = 1;
    for &(n, line) in &lines {
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "component" => {}
            "alpha" => {
                let v: f64 = rest
                    .parse()
                    .map_err(|_| err(n, format!("invalid alpha '{rest}'")))?;
                file_alpha = Some(v);
            }
            "equation" => {
                let eq = parse_equation(rest, &names).map_err(|e| err(n, e.to_string()))?;
                if targets.contains(&eq.target) {
                    return Err(err(
                        n,
                        format!("second equation for '{}'", names[eq.target]),
                    ));
                }
                targets.push(eq.target);
                equations.push(eq);
            }
            "ic" => {
                let Some((name, expr)) = rest.split_once('=') else {
                    return Err(err(n, "expected 'ic <component> = <expression>'".into()));
                };
                let name = name.trim();
                let Some(c) = names.iter().position(|x| x == name) else {
                    return Err(err(n, format!("unknown component '{name}'")));
                };
                if ics.iter().any(|(i, _)| *i == c) {
                    return Err(err(n, format!("second initial condition for '{name}'")));
                }
                let e = SpatialExpr::parse(expr.trim())
                    .map_err(|e| err(n, format!("initial condition: {e}")))?;
                dim = dim.max(e.dim());
                ics.push((c, e));
            }
            other => return Err(err(n, format!("unknown directive '{other}'"))),
        }
    }
    let alpha = alpha
        .or(file_alpha)
        .ok_or_else(|| ProblemFileError::NoAlpha {
            path: label.to_string(),
        })?;
    ProblemSpec::new(alpha, names, equations, ics).map_err(|source| ProblemFileError::Spec {
        path: label.to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BURGERS: &str = "\
# coupled system
component v
component w
equation Dt^a v = v_xx + 2*v*v_x - (v*w)_x
equation Dt^a w = w_xx + 2*w*w_x - (v*w)_x   # symmetric
ic v = sin(x)
ic w = sin(x)
alpha 0.5
";

    #[test]
    fn parses_coupled_system() {
        let p = parse_problem(BURGERS, "burgers.frac", None).unwrap();
        assert_eq!(p.components(), ["v", "w"]);
        assert_eq!(p.alpha().value(), 0.5);
        assert_eq!(p.dim(), 1);
        assert_eq!(p.equation(1).nonlinear.len(), 3);
        assert_eq!(
            p.render_equation(0),
            "Dt^a v = v_xx + 2*v*v_x - v_x*w - v*w_x"
        );
    }

    #[test]
    fn alpha_override_wins() {
        let p = parse_problem(BURGERS, "b", Some(0.75)).unwrap();
        assert_eq!(p.alpha().value(), 0.75);
        let missing = BURGERS.replace("alpha 0.5", "");
        assert!(matches!(
            parse_problem(&missing, "b", None),
            Err(ProblemFileError::NoAlpha { .. })
        ));
    }

    #[test]
    fn errors_name_file_and_line() {
        let bad = BURGERS.replace("ic w = sin(x)", "ic q = sin(x)");
        let e = parse_problem(&bad, "burgers.frac", None).unwrap_err();
        assert_eq!(e.to_string(), "burgers.frac:7: unknown component 'q'");
        let bad = BURGERS.replace("v_xx +", "v_xx ++");
        let e = parse_problem(&bad, "f", None).unwrap_err().to_string();
        assert!(e.starts_with("f:4: syntax error"), "{e}");
        let bad = BURGERS.replace("alpha 0.5", "alpha 1.5");
        assert!(matches!(
            parse_problem(&bad, "f", None),
            Err(ProblemFileError::Spec {
                source: SpecError::Alpha(_),
                ..
            })
        ));
        let bad = BURGERS.replace("ic w = sin(x)\n", "");
        assert!(parse_problem(&bad, "f", None).is_err());
        let bad = format!("{BURGERS}\nfrobnicate 3\n");
        assert!(parse_problem(&bad, "f", None).is_err());
    }

    #[test]
    fn dimension_inferred() {
        let text =
            "component v\nequation Dt^a v = -v_xx - v_yy - v_zz\nic v = exp(x+y+z)\nalpha 1\n";
        let p = parse_problem(text, "d", None).unwrap();
        assert_eq!(p.dim(), 3);
    }

    #[test]
    fn missing_file_is_io_error() {
        let e = load_problem(Path::new("/nonexistent/missing.frac"), None).unwrap_err();
        assert!(matches!(e, ProblemFileError::Io { .. }));
        assert!(e.to_string().contains("missing.frac"));
    }
}
