use std::fmt::Write as _;

/// One line of `report.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub scenario: String,
    pub check: String,
    pub predicted: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(scenario: &str, check: &str, predicted: f64, measured: f64, tolerance: f64, pass: bool) -> Self {
        CheckRow {
            scenario: scenario.to_string(),
            check: check.to_string(),
            predicted,
            measured,
            tolerance,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub rows: Vec<CheckRow>,
}

impl Report {
    pub const HEADER: &'static str = "scenario,check,predicted,measured,tolerance,pass";

    pub fn push(&mut self, row: CheckRow) {
        self.rows.push(row);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Versioned CSV with full round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema=1\n{}\n", Self::HEADER);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:?},{:?},{:?},{}",
                r.scenario, r.check, r.predicted, r.measured, r.tolerance, r.pass
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape() {
        let mut rep = Report::default();
        rep.push(CheckRow::new("manufactured", "max_error", 0.0, 1.5e-13, 1e-4, true));
        let csv = rep.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# schema=1");
        assert_eq!(lines[2], "manufactured,max_error,0.0,1.5e-13,0.0001,true");
        assert!(rep.all_pass());
    }
}
