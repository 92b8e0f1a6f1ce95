use std::fmt::Write as _;

use super::reference::Catalog;
use crate::assembly::{CoefficientField, Material};
use crate::formulations::{BcMode, ElementChoice, FormulationKind, FormulationSpec, GaugeMode};
use crate::mesh::{Diagonal, Domain, Mesh};
use crate::{Error, Result};

/// Cell tag of the inclusion when material keys are given.
pub const INCLUSION_TAG: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    pub amplitude: f64,
    pub seed: u64,
}

/// What the computed eigenvalues are compared with.
#[derive(Clone, Debug, PartialEq)]
pub enum Reference {
    Catalog(Catalog),
    /// A second formulation solved on the same meshes.
    Pairwise(FormulationSpec),
    None,
}

/// One convergence study.
///
/// The text form is one `key = value` per line, `#` starting a comment.
/// Keys: `domain`, `n_list` (or `n`), `diagonal`, `perturb`, `seed`,
/// `formulation`, `elements_v`, `elements_q`, `gauge`, `bc`, `eps_inside`,
/// `eps_outside`, `mu_inside`, `mu_outside`, `nev`, `reference` (a catalog
/// name, `pairwise` or `none`) and, for pairwise studies, the same
/// formulation keys prefixed with `ref.`.
///
/// The inclusion is the box made of the lower half of the bounding box in
/// every coordinate, `(0, π/2)²` for the square. Both formulations of a
/// pairwise study see the same materials.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub domain: Domain,
    pub n_list: Vec<usize>,
    pub diagonal: Diagonal,
    pub perturb: Option<Perturbation>,
    pub formulation: FormulationSpec,
    pub outside: Material,
    pub inside: Option<Material>,
    pub nev: usize,
    pub reference: Reference,
}

impl StudyConfig {
    /// Study with default settings for `formulation` on `domain`.
    pub fn new(domain: Domain, n_list: Vec<usize>, formulation: FormulationSpec) -> Self {
        StudyConfig {
            domain,
            n_list,
            diagonal: Diagonal::Right,
            perturb: None,
            formulation,
            outside: Material::VACUUM,
            inside: None,
            nev: 10,
            reference: Reference::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::invalid("n_list is empty"));
        }
        if self.n_list.windows(2).any(|w| w[1] <= w[0]) || self.n_list[0] == 0 {
            return Err(Error::invalid("n_list must be positive and strictly increasing"));
        }
        if self.nev == 0 {
            return Err(Error::invalid("nev must be at least 1"));
        }
        let specs = match &self.reference {
            Reference::Pairwise(r) => vec![&self.formulation, r],
            _ => vec![&self.formulation],
        };
        for s in specs {
            s.validate()?;
            let three = matches!(s.kind, FormulationKind::Ls3dThreeField | FormulationKind::Ls3dTwoFieldNodal);
            if three != (self.domain.dim() == 3) {
                return Err(Error::invalid(format!("{} cannot run on the {} domain", s.kind.name(), self.domain.name())));
            }
            if s.bc == BcMode::MixedSlit && self.domain != Domain::Slit {
                return Err(Error::invalid("mixed_slit boundary conditions need the slit domain"));
            }
        }
        if let Some(p) = self.perturb {
            if !(p.amplitude >= 0.0 && p.amplitude < 0.5) {
                return Err(Error::invalid("perturb must lie in [0, 0.5)"));
            }
        }
        Ok(())
    }

    pub fn coefficients(&self) -> Result<CoefficientField> {
        let o = self.outside;
        let field = CoefficientField::uniform(o.eps, o.mu)?;
        match self.inside {
            Some(i) => field.with_tag(INCLUSION_TAG, i.eps, i.mu),
            None => Ok(field),
        }
    }

    /// The mesh for parameter `n`, perturbed and tagged as configured.
    pub fn mesh(&self, n: usize) -> Result<Mesh> {
        let mut mesh = self.domain.build(n, self.diagonal)?;
        if let Some(p) = self.perturb {
            mesh = mesh.perturb_interior(p.amplitude, p.seed)?;
        }
        if self.inside.is_some() {
            let mut lo = [f64::INFINITY; 3];
            let mut hi = [f64::NEG_INFINITY; 3];
            for x in mesh.coords() {
                for k in 0..3 {
                    lo[k] = lo[k].min(x[k]);
                    hi[k] = hi[k].max(x[k]);
                }
            }
            let dim = mesh.dim();
            mesh = mesh.with_subdomain(INCLUSION_TAG, |x| (0..dim).all(|k| x[k] < 0.5 * (lo[k] + hi[k])));
        }
        Ok(mesh)
    }

    /// Turns `self` into a pairwise comparison with the formulation of
    /// `other`. Both configs must describe the same meshes and materials.
    pub fn compared_with(mut self, other: &StudyConfig) -> Result<StudyConfig> {
        if self.domain != other.domain
            || self.n_list != other.n_list
            || self.diagonal != other.diagonal
            || self.perturb != other.perturb
            || self.outside != other.outside
            || self.inside != other.inside
        {
            return Err(Error::invalid("compared configs must share domain, meshes and materials"));
        }
        self.reference = Reference::Pairwise(other.formulation.clone());
        self.nev = self.nev.min(other.nev);
        self.validate()?;
        Ok(self)
    }

    pub fn parse(text: &str) -> Result<StudyConfig> {
        let mut pairs: Vec<(usize, &str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, message: "expected `key = value`".into() })?;
            let k = k.trim();
            if pairs.iter().any(|(_, q, _)| *q == k) {
                return Err(Error::Parse { line: i + 1, message: format!("duplicate key `{k}`") });
            }
            pairs.push((i + 1, k, v.trim()));
        }
        let mut used = vec![false; pairs.len()];
        let mut get = |key: &str| -> Option<(usize, &str)> {
            let idx = pairs.iter().position(|(_, k, _)| *k == key)?;
            used[idx] = true;
            Some((pairs[idx].0, pairs[idx].2))
        };
        let bad = |line: usize, msg: String| Error::Parse { line, message: msg };

        let (line, d) = get("domain").ok_or_else(|| bad(0, "missing key `domain`".into()))?;
        let domain = Domain::parse(d).ok_or_else(|| bad(line, format!("unknown domain `{d}`")))?;

        let n_list = match (get("n_list"), get("n")) {
            (Some(_), Some((line, _))) => return Err(bad(line, "give either `n` or `n_list`".into())),
            (Some((line, v)), None) | (None, Some((line, v))) => v
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad(line, format!("bad mesh parameter `{t}`"))))
                .collect::<Result<Vec<_>>>()?,
            (None, None) => return Err(bad(0, "missing key `n_list`".into())),
        };

        let diagonal = match get("diagonal") {
            Some((line, v)) => Diagonal::parse(v).ok_or_else(|| bad(line, format!("unknown diagonal `{v}`")))?,
            None => Diagonal::Right,
        };
        let number = |entry: Option<(usize, &str)>| -> Result<Option<f64>> {
            entry
                .map(|(line, v)| v.parse::<f64>().map_err(|_| bad(line, format!("bad number `{v}`"))))
                .transpose()
        };
        let amplitude = number(get("perturb"))?;
        let seed = get("seed")
            .map(|(line, v)| v.parse::<u64>().map_err(|_| bad(line, format!("bad seed `{v}`"))))
            .transpose()?;
        let perturb = match (amplitude, seed) {
            (Some(a), s) if a > 0.0 => Some(Perturbation { amplitude: a, seed: s.unwrap_or(0) }),
            _ => None,
        };

        let eps_in = number(get("eps_inside"))?;
        let mu_in = number(get("mu_inside"))?;
        let eps_out = number(get("eps_outside"))?.unwrap_or(1.0);
        let mu_out = number(get("mu_outside"))?.unwrap_or(1.0);
        let outside = Material::new(eps_out, mu_out)?;
        let inside = match (eps_in, mu_in) {
            (None, None) => None,
            (e, m) => Some(Material::new(e.unwrap_or(eps_out), m.unwrap_or(mu_out))?),
        };

        let nev = match get("nev") {
            Some((line, v)) => v.parse::<usize>().map_err(|_| bad(line, format!("bad nev `{v}`")))?,
            None => 10,
        };

        let formulation = parse_spec(&mut get, "", domain)?;
        let reference = match get("reference") {
            None | Some((_, "none")) => Reference::None,
            Some((_, "pairwise")) => Reference::Pairwise(parse_spec(&mut get, "ref.", domain)?),
            Some((line, v)) => {
                Reference::Catalog(Catalog::parse(v).ok_or_else(|| bad(line, format!("unknown reference `{v}`")))?)
            }
        };

        if let Some(i) = used.iter().position(|u| !u) {
            return Err(bad(pairs[i].0, format!("unknown key `{}`", pairs[i].1)));
        }

        let mut cfg = StudyConfig { domain, n_list, diagonal, perturb, formulation, outside, inside, nev, reference };
        let coeff = cfg.coefficients()?;
        cfg.formulation.coeff = coeff.clone();
        if let Reference::Pairwise(r) = &mut cfg.reference {
            r.coeff = coeff;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Text form accepted by [`StudyConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "domain = {}", self.domain.name());
        let ns: Vec<String> = self.n_list.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(s, "n_list = {}", ns.join(", "));
        let _ = writeln!(s, "diagonal = {}", self.diagonal.name());
        if let Some(p) = self.perturb {
            let _ = writeln!(s, "perturb = {:?}\nseed = {}", p.amplitude, p.seed);
        }
        write_spec(&mut s, "", &self.formulation);
        let _ = writeln!(s, "eps_outside = {:?}\nmu_outside = {:?}", self.outside.eps, self.outside.mu);
        if let Some(i) = self.inside {
            let _ = writeln!(s, "eps_inside = {:?}\nmu_inside = {:?}", i.eps, i.mu);
        }
        let _ = writeln!(s, "nev = {}", self.nev);
        match &self.reference {
            Reference::None => s.push_str("reference = none\n"),
            Reference::Catalog(c) => {
                let _ = writeln!(s, "reference = {}", c.name());
            }
            Reference::Pairwise(r) => {
                s.push_str("reference = pairwise\n");
                write_spec(&mut s, "ref.", r);
            }
        }
        s
    }
}

fn default_kind(domain: Domain) -> FormulationKind {
    if domain.dim() == 3 {
        FormulationKind::Ls3dThreeField
    } else {
        FormulationKind::Ls2d
    }
}

fn parse_spec<'a>(
    get: &mut impl FnMut(&str) -> Option<(usize, &'a str)>,
    prefix: &str,
    domain: Domain,
) -> Result<FormulationSpec> {
    let bad = |line: usize, msg: String| Error::Parse { line, message: msg };
    let kind = match get(&format!("{prefix}formulation")) {
        Some((line, v)) => FormulationKind::parse(v).ok_or_else(|| bad(line, format!("unknown formulation `{v}`")))?,
        None => default_kind(domain),
    };
    let mut spec = FormulationSpec::new(kind);
    let element = |entry: Option<(usize, &str)>, default: ElementChoice| -> Result<ElementChoice> {
        match entry {
            Some((line, v)) => ElementChoice::parse(v).ok_or_else(|| bad(line, format!("unknown element `{v}`"))),
            None => Ok(default),
        }
    };
    spec.v = element(get(&format!("{prefix}elements_v")), spec.v)?;
    spec.q = element(get(&format!("{prefix}elements_q")), spec.q)?;
    if let Some((line, v)) = get(&format!("{prefix}bc")) {
        spec.bc = BcMode::parse(v).ok_or_else(|| bad(line, format!("unknown boundary condition `{v}`")))?;
        if spec.bc == BcMode::MixedSlit && kind == FormulationKind::Ls2d {
            // Dirichlet p leaves no constant mode to gauge.
            spec.gauge = GaugeMode::None;
        }
    }
    if let Some((line, v)) = get(&format!("{prefix}gauge")) {
        spec.gauge = GaugeMode::parse(v).ok_or_else(|| bad(line, format!("unknown gauge `{v}`")))?;
    }
    Ok(spec)
}

fn write_spec(s: &mut String, prefix: &str, spec: &FormulationSpec) {
    let _ = writeln!(s, "{prefix}formulation = {}", spec.kind.name());
    let _ = writeln!(s, "{prefix}elements_v = {}", spec.v.name());
    let _ = writeln!(s, "{prefix}elements_q = {}", spec.q.name());
    let _ = writeln!(s, "{prefix}gauge = {}", spec.gauge.name());
    let _ = writeln!(s, "{prefix}bc = {}", spec.bc.name());
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_minimal_and_full() {
        let c = StudyConfig::parse("domain = square\nn_list = 16, 32\n").unwrap();
        assert_eq!(c.n_list, vec![16, 32]);
        assert_eq!(c.formulation.kind, FormulationKind::Ls2d);
        assert_eq!(c.reference, Reference::None);
        assert_eq!(c.nev, 10);

        let text = "# jumping eps\ndomain = square\nn = 8\nformulation = ls2d\nelements_v = nodal\n\
                    eps_inside = 100 # inclusion\nreference = pairwise\nref.formulation = curlcurl_edge\n";
        let c = StudyConfig::parse(text).unwrap();
        assert_eq!(c.inside, Some(Material { eps: 100.0, mu: 1.0 }));
        let Reference::Pairwise(r) = &c.reference else { panic!() };
        assert_eq!(r.kind, FormulationKind::CurlCurlEdge);
        assert_eq!(r.coeff.material(INCLUSION_TAG).eps, 100.0);
        let mesh = c.mesh(8).unwrap();
        let tagged = (0..mesh.num_cells()).filter(|&k| mesh.cell_tag(k) == INCLUSION_TAG).count();
        assert_eq!(tagged * 4, mesh.num_cells());

        let c = StudyConfig::parse("domain = slit\nn_list = 4\nelements_v = nodal\nbc = mixed_slit\n").unwrap();
        assert_eq!(c.formulation.gauge, GaugeMode::None);
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            "n_list = 4",
            "domain = disk\nn_list = 4",
            "domain = square\nn_list = 8, 4",
            "domain = square\nn_list = 4\nnev = 0",
            "domain = square\nn_list = 4\ncolour = red",
            "domain = square\nn_list = 4\nn_list = 8",
            "domain = square\nn_list = 4\nformulation = ls3d_threefield",
            "domain = cube\nn_list = 2\nformulation = ls2d",
            "domain = square\nn_list = 4\nbc = mixed_slit",
            "domain = square\nn_list = 4\neps_inside = -1",
            "domain = square\nn_list = 4\nreference = disk",
            "domain = square\nn_list = x",
            "domain square",
        ];
        for text in cases {
            assert!(StudyConfig::parse(text).is_err(), "{text}");
        }
        match StudyConfig::parse("domain = square\nn_list = 4\n\nfoo = 1") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn compare_requires_same_meshes() {
        let a = StudyConfig::parse("domain = square\nn_list = 4, 8\nelements_v = nodal").unwrap();
        let b = StudyConfig::parse("domain = square\nn_list = 4, 8\nformulation = curlcurl_edge").unwrap();
        let c = a.clone().compared_with(&b).unwrap();
        assert!(matches!(c.reference, Reference::Pairwise(_)));
        let b2 = StudyConfig::parse("domain = square\nn_list = 4\nformulation = curlcurl_edge").unwrap();
        assert!(a.compared_with(&b2).is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(
            domain in 0usize..4,
            start in 1usize..6,
            steps in 1usize..4,
            nev in 1usize..20,
            amp in prop::option::of(0.01f64..0.4),
            seed in 0u64..1000,
            eps in prop::option::of(0.01f64..100.0),
            catalog in 0usize..3,
        ) {
            let domain = [Domain::Square, Domain::LShape, Domain::Slit, Domain::Cube][domain];
            let n_list = (0..steps).map(|k| start << k).collect();
            let mut c = StudyConfig::new(domain, n_list, FormulationSpec::new(default_kind(domain)));
            c.nev = nev;
            c.perturb = amp.map(|amplitude| Perturbation { amplitude, seed });
            c.inside = eps.map(|e| Material { eps: e, mu: 1.0 });
            c.formulation.coeff = c.coefficients().unwrap();
            c.reference = match catalog {
                0 => Reference::None,
                1 => Reference::Catalog(Catalog::Square),
                _ if domain.dim() == 2 => {
                    let mut r = FormulationSpec::new(FormulationKind::CurlCurlEdge);
                    r.coeff = c.coefficients().unwrap();
                    Reference::Pairwise(r)
                }
                _ => Reference::Catalog(Catalog::Cube),
            };
            prop_assert_eq!(StudyConfig::parse(&c.to_text()).unwrap(), c);
        }
    }
}
