use std::io::{self, Write};

use fracseries::special_functions::{mittag_leffler_with, FracOrder, ML_DEFAULT_Z_MAX};

use super::linspace;
use crate::args::MlEvalArgs;
use crate::error::CliError;
use crate::output::{csv_line, write_file};

pub fn ml_eval(args: &MlEvalArgs) -> Result<(), CliError> {
    let zs = linspace("z", args.z_min, args.z_max, args.count)?;
    if args.z_min.abs().max(args.z_max.abs()) > ML_DEFAULT_Z_MAX {
        return Err(CliError::Config(format!(
            "z range must lie within [-{ML_DEFAULT_Z_MAX}, {ML_DEFAULT_Z_MAX}]"
        )));
    }
    let mut rows = Vec::new();
    let mut capped = 0;
    for &a in &args.alpha {
        let alpha = FracOrder::positive(a)?;
        for &z in &zs {
            let m = mittag_leffler_with(alpha, z, ML_DEFAULT_Z_MAX)?;
            capped += usize::from(m.capped);
            rows.push([
                a.to_string(),
                z.to_string(),
                m.value.to_string(),
                m.capped.to_string(),
            ]);
        }
    }
    let body = |w: &mut dyn Write| -> io::Result<()> {
        csv_line(w, &["alpha", "z", "value", "capped"].map(String::from))?;
        rows.iter().try_for_each(|r| csv_line(w, r))
    };
    match &args.out {
        Some(path) => {
            write_file(path, body)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => body(&mut io::stdout().lock()).map_err(CliError::io("<stdout>"))?,
    }
    if capped > 0 {
        eprintln!("warning: {capped} values hit the series term cap");
    }
    Ok(())
}
