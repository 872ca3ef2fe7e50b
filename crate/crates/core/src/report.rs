//! Convergence tables and their CSV form.

use std::fmt::Write as _;

/// Deviations at or below this are treated as exact zeros when fitting.
pub const EXACT_ZERO_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    rows: Vec<(u64, f64)>,
    fitted_slope: Option<f64>,
    probe_count: usize,
}

impl ConvergenceReport {
    /// Builds a report and fits the log-log slope. Rows must have strictly
    /// increasing `N` and finite, non-negative deviations.
    pub fn new(rows: Vec<(u64, f64)>, probe_count: usize) -> Self {
        assert!(rows.windows(2).all(|w| w[0].0 < w[1].0), "report rows must have increasing N");
        assert!(rows.iter().all(|r| r.1.is_finite() && r.1 >= 0.0), "deviations must be finite");
        let fitted_slope = fit_log_log_slope(&rows);
        Self { rows, fitted_slope, probe_count }
    }

    pub fn rows(&self) -> &[(u64, f64)] {
        &self.rows
    }

    /// `None` when fewer than two rows lie above the exact-zero floor.
    pub fn fitted_slope(&self) -> Option<f64> {
        self.fitted_slope
    }

    pub fn probe_count(&self) -> usize {
        self.probe_count
    }

    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    /// `N,deviation` rows in 17-significant-digit scientific notation, then
    /// `# slope=<value>` (`NaN` when undefined).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,deviation\n");
        for (n, d) in &self.rows {
            writeln!(out, "{n},{d:.16e}").unwrap();
        }
        match self.fitted_slope {
            Some(s) => writeln!(out, "# slope={s:.16e}").unwrap(),
            None => writeln!(out, "# slope=NaN").unwrap(),
        }
        out
    }
}

/// Least-squares slope of `ln deviation` against `ln N`.
pub fn fit_log_log_slope(rows: &[(u64, f64)]) -> Option<f64> {
    let points: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.1 > EXACT_ZERO_FLOOR).map(|&(n, d)| ((n as f64).ln(), d.ln())).collect();
    if points.len() < 2 {
        return None;
    }
    let count = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / count;
    let my = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let rows: Vec<(u64, f64)> = (1..20).map(|i| (i * 10, 3.0 / (i * 10) as f64)).collect();
        let s = fit_log_log_slope(&rows).unwrap();
        assert!((s + 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_zeros_leave_slope_undefined() {
        let report = ConvergenceReport::new(vec![(4, 0.0), (8, 1e-15), (12, 0.0)], 3);
        assert_eq!(report.fitted_slope(), None);
        assert!(report.to_csv().ends_with("# slope=NaN\n"));
    }

    #[test]
    fn csv_layout() {
        let report = ConvergenceReport::new(vec![(1, 0.5), (2, 0.25)], 1);
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "N,deviation");
        assert_eq!(lines[1], "1,5.0000000000000000e-1");
        assert!(lines[3].starts_with("# slope=-1.0000000000000000e0"));
    }
}
