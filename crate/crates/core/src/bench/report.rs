use std::fmt::Write as _;

use super::StudyReport;
use crate::pencil::EigenSolution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl ReportFormat {
    /// Picks the format from a file extension (`csv`, `md`).
    pub fn from_path(path: &std::path::Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(ReportFormat::Csv),
            "md" | "markdown" => Some(ReportFormat::Markdown),
            _ => None,
        }
    }
}

pub fn render_report(report: &StudyReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => csv(report),
        ReportFormat::Markdown => markdown(report),
    }
}

fn csv(r: &StudyReport) -> String {
    let mut s = String::from("mode,n,lambda,ref,error,rate\n");
    for i in 0..r.num_modes() {
        for (k, &n) in r.ns.iter().enumerate() {
            let lambda = r.computed[k][i];
            let reference = r.reference[k].get(i);
            let error = r.errors[k].get(i);
            let rate = r.rates.get(k).and_then(|row| row.get(i)).copied().flatten();
            let _ = writeln!(
                s,
                "{},{n},{lambda},{},{},{}",
                i + 1,
                reference.map_or(String::new(), |v| v.to_string()),
                error.map_or(String::new(), |v| v.to_string()),
                rate.map_or(String::new(), |v| v.to_string()),
            );
        }
    }
    s
}

fn cell(value: f64, rate: Option<f64>) -> String {
    match rate {
        Some(r) => format!("{value:.5} ({r:.2})"),
        None => format!("{value:.5}"),
    }
}

fn markdown(r: &StudyReport) -> String {
    let meshes = r.ns.len();
    let pad = |s: &mut String, first: &str, second: &str| {
        let _ = write!(s, "| {first} | {second} |");
        for _ in 1..meshes {
            s.push_str("  |");
        }
        s.push('\n');
    };
    let rule = |s: &mut String| {
        s.push_str("|---:|");
        for _ in 0..meshes.max(1) {
            s.push_str("---:|");
        }
        s.push('\n');
    };
    let row = |s: &mut String, first: String, cells: Vec<String>| {
        let _ = writeln!(s, "| {first} | {} |", cells.join(" | "));
    };
    let modes = r.num_modes();
    let mut s = String::new();
    if let Some(reference) = &r.reference_label {
        pad(&mut s, "Rank", &format!("Computed with {reference}"));
        rule(&mut s);
        for i in 0..modes {
            row(&mut s, (i + 1).to_string(), (0..meshes).map(|k| cell(r.reference[k][i], None)).collect());
        }
        if modes > 0 {
            pad(&mut s, "**Rank**", &format!("**Computed with {}**", r.label));
            for i in 0..modes {
                row(&mut s, (i + 1).to_string(), (0..meshes).map(|k| cell(r.computed[k][i], None)).collect());
            }
            pad(&mut s, "**Rank**", "**Difference (rate)**");
            for i in 0..modes {
                row(&mut s, (i + 1).to_string(), (0..meshes).map(|k| cell(r.errors[k][i], r.rates[k][i])).collect());
            }
        }
    } else if r.reference.iter().all(|v| !v.is_empty()) {
        pad(&mut s, "Exact", "Computed (rate)");
        rule(&mut s);
        for i in 0..modes {
            let exact = r.reference[0][i];
            row(&mut s, format!("{exact:.5}"), (0..meshes).map(|k| cell(r.computed[k][i], r.rates[k][i])).collect());
        }
    } else {
        pad(&mut s, "Rank", "Computed");
        rule(&mut s);
        for i in 0..modes {
            row(&mut s, (i + 1).to_string(), (0..meshes).map(|k| cell(r.computed[k][i], None)).collect());
        }
    }
    if meshes > 0 {
        row(&mut s, "Mesh".into(), r.ns.iter().map(|n| format!("1/{n}")).collect());
    }
    s
}

/// CSV `index,lambda,residual` of the kept eigenpairs, followed by the
/// discarded candidates as comment lines.
pub fn render_spectrum(sol: &EigenSolution) -> String {
    let mut s = String::from("index,lambda,residual\n");
    for (i, (l, r)) in sol.eigenvalues.iter().zip(&sol.residuals).enumerate() {
        let _ = writeln!(s, "{},{l},{r}", i + 1);
    }
    for d in &sol.discarded {
        let _ = writeln!(s, "# discarded {:?}: lambda={} residual={}", d.reason, d.lambda, d.residual);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1_report() -> StudyReport {
        let computed = [[1.01090, 1.00273, 1.00068], [2.04365, 2.01091, 2.00273]];
        let mut r = StudyReport::empty();
        r.label = "ls2d (edge/nodal-1)".into();
        r.ns = vec![16, 32, 64];
        for k in 0..3 {
            r.computed.push(vec![computed[0][k], computed[1][k]]);
            r.reference.push(vec![1.0, 2.0]);
            r.errors.push(vec![computed[0][k] - 1.0, computed[1][k] - 2.0]);
            r.wall_times.push(k as f64);
        }
        r.rates = vec![vec![None; 2]; 3];
        for i in 0..2 {
            let rates = super::super::compute_rates(&r.mode_errors(i), &r.ns).unwrap();
            for (k, v) in rates.into_iter().enumerate() {
                r.rates[k][i] = v;
            }
        }
        r
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = StudyReport::empty();
        assert_eq!(render_report(&r, ReportFormat::Csv), "mode,n,lambda,ref,error,rate\n");
        let md = render_report(&r, ReportFormat::Markdown);
        assert_eq!(md.lines().count(), 2);
        assert!(md.starts_with("| Rank | Computed |") || md.starts_with("| Exact |"));
    }

    #[test]
    fn markdown_has_table_headers() {
        let md = render_report(&table1_report(), ReportFormat::Markdown);
        assert!(md.contains("| Exact | Computed (rate) |"));
        assert!(md.contains("| 1.00000 | 1.01090 | 1.00273 (2.00) | 1.00068 (2.01) |"));
        assert!(md.ends_with("| Mesh | 1/16 | 1/32 | 1/64 |\n"));

        let mut r = table1_report();
        r.reference_label = Some("galerkin_laplace (nodal-1/nodal-1)".into());
        let md = render_report(&r, ReportFormat::Markdown);
        assert!(md.contains("Computed with galerkin_laplace"));
        assert!(md.contains("**Difference (rate)**"));
    }

    #[test]
    fn csv_round_trips() {
        let r = table1_report();
        let text = render_report(&r, ReportFormat::Csv);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("mode,n,lambda,ref,error,rate"));
        let mut count = 0;
        for line in lines {
            let f: Vec<&str> = line.split(',').collect();
            let mode: usize = f[0].parse().unwrap();
            let n: usize = f[1].parse().unwrap();
            let k = r.ns.iter().position(|&m| m == n).unwrap();
            assert_eq!(f[2].parse::<f64>().unwrap(), r.computed[k][mode - 1]);
            assert_eq!(f[3].parse::<f64>().unwrap(), r.reference[k][mode - 1]);
            assert_eq!(f[4].parse::<f64>().unwrap(), r.errors[k][mode - 1]);
            assert_eq!(f[5].parse::<f64>().ok(), r.rates[k][mode - 1]);
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
