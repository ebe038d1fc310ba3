use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::special_functions::FracOrder;

/// Solution values on a uniform space-time grid; row n holds level t_n.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleGrid {
    alpha: FracOrder,
    xs: Vec<f64>,
    ts: Vec<f64>,
    values: Vec<Vec<f64>>,
}

#[derive(Debug, Error)]
pub enum GridCsvError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

impl OracleGrid {
    pub fn new(alpha: FracOrder, xs: Vec<f64>, ts: Vec<f64>, values: Vec<Vec<f64>>) -> Self {
        assert_eq!(values.len(), ts.len(), "one row per time level");
        assert!(
            values.iter().all(|r| r.len() == xs.len()),
            "one column per node"
        );
        OracleGrid {
            alpha,
            xs,
            ts,
            values,
        }
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Columns `t,x,value`, time-major.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "t,x,value")?;
        for (t, row) in self.ts.iter().zip(&self.values) {
            for (x, v) in self.xs.iter().zip(row) {
                writeln!(w, "{t},{x},{v}")?;
            }
        }
        Ok(())
    }

    /// Reads the format written by [`OracleGrid::write_csv`].
    pub fn read_csv(alpha: FracOrder, r: impl BufRead) -> Result<Self, GridCsvError> {
        let mut lines = r.lines().enumerate();
        match lines.next() {
            Some((_, Ok(h))) if h.trim() == "t,x,value" => {}
            Some((_, Err(e))) => return Err(e.into()),
            _ => {
                return Err(GridCsvError::Format {
                    line: 1,
                    message: "expected header 't,x,value'".into(),
                })
            }
        }
        let mut xs: Vec<f64> = Vec::new();
        let mut ts: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<f64>> = Vec::new();
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: &str| GridCsvError::Format {
                line: i + 1,
                message: message.to_string(),
            };
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad("expected three numbers"))?;
            let [t, x, v] = fields[..] else {
                return Err(bad("expected three numbers"));
            };
            if ts.last() != Some(&t) {
                if ts.last().is_some_and(|&last| t < last) {
                    return Err(bad("time levels must increase"));
                }
                ts.push(t);
                values.push(Vec::new());
            }
            let row = values.last_mut().expect("row pushed");
            if ts.len() == 1 {
                xs.push(x);
            } else if xs.get(row.len()) != Some(&x) {
                return Err(bad("x nodes differ between time levels"));
            }
            row.push(v);
        }
        if values.iter().any(|r| r.len() != xs.len()) {
            return Err(GridCsvError::Format {
                line: 0,
                message: "ragged grid".into(),
            });
        }
        Ok(OracleGrid {
            alpha,
            xs,
            ts,
            values,
        })
    }
}
