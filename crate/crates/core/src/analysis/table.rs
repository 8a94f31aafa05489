//! Per-level errors, observed orders and CSV output.

use std::fmt;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Q,
    P,
    Y,
    Z,
    U,
}

impl Column {
    pub const ALL: [Column; 5] = [Column::Q, Column::P, Column::Y, Column::Z, Column::U];

    pub fn name(self) -> &'static str {
        match self {
            Column::Q => "q",
            Column::P => "p",
            Column::Y => "y",
            Column::Z => "z",
            Column::U => "u",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Errors of one study level; `None` marks a column the study does not compute.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelErrors {
    pub n: usize,
    /// Largest element diameter.
    pub h: f64,
    pub errors: [Option<f64>; 5],
    pub cost: Option<f64>,
}

impl LevelErrors {
    pub fn error(&self, c: Column) -> Option<f64> {
        self.errors[c.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateTable {
    pub rows: Vec<LevelErrors>,
}

pub const CSV_HEADER: &str = "level,n,h,err_q,rate_q,err_p,rate_p,err_y,rate_y,err_z,rate_z,err_u,rate_u,J";

fn observed_order(e0: f64, e1: f64, h0: f64, h1: f64) -> Option<f64> {
    (e0 > 0.0 && e1 > 0.0 && h0 != h1).then(|| (e0 / e1).ln() / (h0 / h1).ln())
}

impl RateTable {
    pub fn errors(&self, c: Column) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.error(c)).collect()
    }

    /// Observed orders `log(e_{j-1} / e_j) / log(h_{j-1} / h_j)`; the first
    /// level and levels with a zero or missing error have none.
    pub fn rates(&self, c: Column) -> Vec<Option<f64>> {
        let mut out = vec![None; self.rows.len()];
        for j in 1..self.rows.len() {
            let (a, b) = (&self.rows[j - 1], &self.rows[j]);
            if let (Some(e0), Some(e1)) = (a.error(c), b.error(c)) {
                out[j] = observed_order(e0, e1, a.h, b.h);
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let num = |v: Option<f64>| v.map(|x| format!("{x:.5e}")).unwrap_or_default();
        writeln!(w, "{CSV_HEADER}")?;
        let rates: Vec<Vec<Option<f64>>> = Column::ALL.iter().map(|&c| self.rates(c)).collect();
        for (j, r) in self.rows.iter().enumerate() {
            write!(w, "{j},{},{:.5e}", r.n, r.h)?;
            for (ci, c) in Column::ALL.iter().enumerate() {
                write!(w, ",{},{}", num(r.error(*c)), num(rates[ci][j]))?;
            }
            writeln!(w, ",{}", num(r.cost))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

impl fmt::Display for RateTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>6} {:>10}", "n", "h")?;
        for c in Column::ALL {
            write!(f, " {:>10} {:>5}", format!("err_{}", c.name()), "order")?;
        }
        writeln!(f, " {:>12}", "J")?;
        let rates: Vec<Vec<Option<f64>>> = Column::ALL.iter().map(|&c| self.rates(c)).collect();
        for (j, r) in self.rows.iter().enumerate() {
            write!(f, "{:>6} {:>10.3e}", r.n, r.h)?;
            for (ci, c) in Column::ALL.iter().enumerate() {
                let e = r.error(*c).map(|v| format!("{v:.2e}")).unwrap_or_else(|| "-".into());
                let o = rates[ci][j].map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
                write!(f, " {e:>10} {o:>5}")?;
            }
            writeln!(f, " {:>12}", r.cost.map(|v| format!("{v:.5e}")).unwrap_or_else(|| "-".into()))?;
        }
        Ok(())
    }
}
