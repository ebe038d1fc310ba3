use std::io::Write;

use fracseries::natural_transform::{default_su_grid, nt_forward_numeric, TableEntry};

use crate::args::TransformCheckArgs;
use crate::error::CliError;
use crate::output::{csv_line, within, write_file};

pub fn transform_check(args: &TransformCheckArgs) -> Result<(), CliError> {
    let grid = default_su_grid();
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    println!("{:<28} {:>12} {:>7}", "entry", "max abs err", "status");
    for entry in TableEntry::defaults() {
        let signal = entry.signal();
        let mut worst = 0.0_f64;
        for &(s, u) in &grid {
            let numeric = match nt_forward_numeric(&signal, s, u) {
                Ok(q) => q.value,
                Err(e) => {
                    eprintln!("{}: ({s}, {u}): {e}", entry.label());
                    f64::NAN
                }
            };
            let exact = entry.closed_form(s, u);
            let err = (numeric - exact).abs();
            if !worst.is_nan() && !within(err, worst) {
                worst = err;
            }
            rows.push([
                entry.label(),
                s.to_string(),
                u.to_string(),
                numeric.to_string(),
                exact.to_string(),
                err.to_string(),
            ]);
        }
        let ok = worst <= args.tol;
        println!(
            "{:<28} {:>12.3e} {:>7}",
            entry.label(),
            worst,
            if ok { "ok" } else { "FAIL" }
        );
        if !ok {
            failed.push(entry.label());
        }
    }
    if let Some(out) = &args.out {
        write_file(out, |w: &mut dyn Write| {
            csv_line(
                w,
                &["entry", "s", "u", "numeric", "closed_form", "abs_err"].map(String::from),
            )?;
            rows.iter().try_for_each(|r| csv_line(w, r))
        })?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Breach(format!(
            "{} above {:e}",
            failed.join(", "),
            args.tol
        )))
    }
}
