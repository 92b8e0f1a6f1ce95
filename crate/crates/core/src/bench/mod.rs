//! Convergence studies over mesh sequences, compared either with reference
//! spectra or with a second formulation on the same meshes.

mod config;
mod reference;
mod report;

use std::time::Instant;

pub use config::{Perturbation, Reference, StudyConfig, INCLUSION_TAG};
pub use reference::{compute_rates, reference_spectrum, Catalog};
pub use report::{render_report, render_spectrum, ReportFormat};

use crate::formulations::{build, FormulationSpec};
use crate::pencil::{solve_smallest, EigenOptions, EigenSolution};
use crate::{Error, Result};

/// Eigenvalues below this fraction of the largest computed one are treated
/// as zero and dropped (Neumann constants, discrete gradients).
pub const ZERO_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct StudyReport {
    /// Formulation names of the computed and reference columns.
    pub label: String,
    pub reference_label: Option<String>,
    pub ns: Vec<usize>,
    /// `computed[k]` holds the eigenvalues on mesh `ns[k]`, ascending.
    pub computed: Vec<Vec<f64>>,
    /// Reference values per mesh; empty without a reference.
    pub reference: Vec<Vec<f64>>,
    /// `errors[k][i] = |computed[k][i] − reference[k][i]|`.
    pub errors: Vec<Vec<f64>>,
    /// `rates[k][i]`, `None` on the first mesh and for zero errors.
    pub rates: Vec<Vec<Option<f64>>>,
    /// Seconds per mesh. Not part of the rendered output.
    pub wall_times: Vec<f64>,
}

impl StudyReport {
    pub fn empty() -> Self {
        StudyReport {
            label: String::new(),
            reference_label: None,
            ns: Vec::new(),
            computed: Vec::new(),
            reference: Vec::new(),
            errors: Vec::new(),
            rates: Vec::new(),
            wall_times: Vec::new(),
        }
    }

    pub fn is_pairwise(&self) -> bool {
        self.reference_label.is_some()
    }

    /// Errors of mode `i` across the meshes.
    pub fn mode_errors(&self, i: usize) -> Vec<f64> {
        self.errors.iter().map(|e| e[i]).collect()
    }

    /// Rates of mode `i` from the second mesh onward.
    pub fn mode_rates(&self, i: usize) -> Vec<Option<f64>> {
        self.rates.iter().skip(1).map(|r| r[i]).collect()
    }

    pub fn num_modes(&self) -> usize {
        self.computed.first().map_or(0, Vec::len)
    }
}

fn label(spec: &FormulationSpec) -> String {
    format!("{} ({}/{})", spec.kind.name(), spec.v.name(), spec.q.name())
}

/// The `nev` smallest nonzero eigenvalues of `spec` on `mesh`.
fn nonzero_eigenvalues(mesh: &crate::mesh::Mesh, spec: &FormulationSpec, nev: usize) -> Result<Vec<f64>> {
    let pencil = build(mesh, spec)?;
    let sol = solve_smallest(&pencil, &EigenOptions { nev: nev + 2, ..Default::default() })?;
    let top = sol.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut vals: Vec<f64> = sol.eigenvalues.into_iter().filter(|v| v.abs() > ZERO_THRESHOLD * top).collect();
    if vals.len() < nev {
        return Err(Error::NotConverged {
            message: format!("only {} nonzero eigenvalues found, {nev} requested", vals.len()),
            residuals: Vec::new(),
        });
    }
    vals.truncate(nev);
    Ok(vals)
}

/// Solves the configured formulation on mesh parameter `n`.
pub fn solve_mesh(config: &StudyConfig, n: usize, nev: usize) -> Result<EigenSolution> {
    let run = || -> Result<EigenSolution> {
        let mesh = config.mesh(n)?;
        let pencil = build(&mesh, &config.formulation)?;
        solve_smallest(&pencil, &EigenOptions { nev, ..Default::default() })
    };
    run().map_err(|e| Error::AtMesh { n, source: Box::new(e) })
}

/// Runs the study mesh by mesh, in the order of `n_list`.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let nev = config.nev;
    let mut report = StudyReport::empty();
    report.label = label(&config.formulation);
    if let Reference::Pairwise(r) = &config.reference {
        report.reference_label = Some(label(r));
    }
    for &n in &config.n_list {
        let start = Instant::now();
        let run = || -> Result<(Vec<f64>, Vec<f64>)> {
            let mesh = config.mesh(n)?;
            let computed = nonzero_eigenvalues(&mesh, &config.formulation, nev)?;
            let reference = match &config.reference {
                Reference::None => Vec::new(),
                Reference::Catalog(c) => reference_spectrum(*c, nev)?,
                Reference::Pairwise(spec) => nonzero_eigenvalues(&mesh, spec, nev)?,
            };
            Ok((computed, reference))
        };
        let (computed, reference) = run().map_err(|e| Error::AtMesh { n, source: Box::new(e) })?;
        report.errors.push(computed.iter().zip(&reference).map(|(a, b)| (a - b).abs()).collect());
        report.ns.push(n);
        report.computed.push(computed);
        report.reference.push(reference);
        report.wall_times.push(start.elapsed().as_secs_f64());
    }
    let modes = if report.reference.iter().all(|r| !r.is_empty()) { nev } else { 0 };
    report.rates = vec![vec![None; modes]; report.ns.len()];
    for i in 0..modes {
        let rates = compute_rates(&report.mode_errors(i), &report.ns)?;
        for (k, r) in rates.into_iter().enumerate() {
            report.rates[k][i] = r;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::{ElementChoice, FormulationKind};
    use crate::mesh::Domain;

    #[test]
    fn square_study_rates() {
        let spec = FormulationSpec::new(FormulationKind::Ls2d);
        let mut c = StudyConfig::new(Domain::Square, vec![8, 16], spec);
        c.reference = Reference::Catalog(Catalog::Square);
        c.nev = 6;
        let r = run_study(&c).unwrap();
        assert_eq!(r.ns, vec![8, 16]);
        assert_eq!(r.rates[0], vec![None; 6]);
        for i in 0..6 {
            let rate = r.rates[1][i].unwrap();
            assert!((1.8..2.2).contains(&rate), "mode {i}: {rate}");
        }
        let again = run_study(&c).unwrap();
        assert_eq!(render_report(&r, ReportFormat::Csv), render_report(&again, ReportFormat::Csv));
    }

    #[test]
    fn neumann_zero_dropped_in_pairwise_mode() {
        let spec = FormulationSpec::new(FormulationKind::Ls2d).with_elements(ElementChoice::Nodal(1), ElementChoice::Nodal(1));
        let mut c = StudyConfig::new(Domain::Square, vec![4, 8], spec);
        c.reference = Reference::Pairwise(FormulationSpec::new(FormulationKind::GalerkinLaplace));
        c.nev = 4;
        let r = run_study(&c).unwrap();
        assert!(r.is_pairwise());
        for k in 0..2 {
            assert!(r.reference[k][0] > 0.5);
            assert!(r.errors[k].iter().all(|e| *e >= 0.0));
        }
        assert!(r.mode_errors(0)[1] < r.mode_errors(0)[0]);
    }

    #[test]
    fn errors_carry_the_mesh_parameter() {
        let spec = FormulationSpec::new(FormulationKind::Ls2d);
        let mut c = StudyConfig::new(Domain::Square, vec![1], spec);
        c.nev = 50;
        let err = run_study(&c).unwrap_err();
        assert!(matches!(err, Error::AtMesh { n: 1, .. }), "{err}");
        assert!(err.to_string().contains("n = 1"));
    }
}
