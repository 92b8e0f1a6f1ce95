//! Builders turning a mesh, an element choice and coefficients into the
//! eigenvalue pencils of the least-squares formulations and of the
//! Galerkin reference problems.

use crate::assembly::{
    assemble, discrete_gradient, eliminate_constraints, CoefficientField, Constraint, DofMap, FESpace, Form,
    SpaceKind, SparseMatrix,
};
use crate::mesh::{BoundaryTag, Mesh};
use crate::pencil::{BlockPencil, Gauge};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulationKind {
    Ls2d,
    Ls3dThreeField,
    Ls3dTwoFieldNodal,
    GalerkinLaplace,
    CurlCurlEdge,
}

impl FormulationKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ls2d" => FormulationKind::Ls2d,
            "ls3d_threefield" => FormulationKind::Ls3dThreeField,
            "ls3d_twofield_nodal" => FormulationKind::Ls3dTwoFieldNodal,
            "galerkin_laplace" => FormulationKind::GalerkinLaplace,
            "curlcurl_edge" => FormulationKind::CurlCurlEdge,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            FormulationKind::Ls2d => "ls2d",
            FormulationKind::Ls3dThreeField => "ls3d_threefield",
            FormulationKind::Ls3dTwoFieldNodal => "ls3d_twofield_nodal",
            FormulationKind::GalerkinLaplace => "galerkin_laplace",
            FormulationKind::CurlCurlEdge => "curlcurl_edge",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementChoice {
    /// Lowest-order Nédélec elements.
    Edge,
    /// Continuous Lagrange elements of the given degree.
    Nodal(u8),
}

impl ElementChoice {
    /// Accepts `edge`, `nodal` (degree 1) and `nodal-k`/`pk`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "edge" => Some(ElementChoice::Edge),
            "nodal" => Some(ElementChoice::Nodal(1)),
            _ => {
                let k = s.strip_prefix("nodal-").or_else(|| s.strip_prefix('p'))?;
                k.parse().ok().filter(|&k| k == 1 || k == 2).map(ElementChoice::Nodal)
            }
        }
    }

    pub fn name(self) -> String {
        match self {
            ElementChoice::Edge => "edge".into(),
            ElementChoice::Nodal(k) => format!("nodal-{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeMode {
    Multiplier,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcMode {
    /// Zero tangential trace of `u` on the whole boundary.
    Standard,
    /// Slit domain: zero tangential `u` on the exterior boundary and
    /// `p = 0` on both sides of the slit.
    MixedSlit,
}

impl GaugeMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "multiplier" | "mean" => Some(GaugeMode::Multiplier),
            "none" => Some(GaugeMode::None),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GaugeMode::Multiplier => "multiplier",
            GaugeMode::None => "none",
        }
    }
}

impl BcMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "standard" => Some(BcMode::Standard),
            "mixed_slit" => Some(BcMode::MixedSlit),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BcMode::Standard => "standard",
            BcMode::MixedSlit => "mixed_slit",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormulationSpec {
    pub kind: FormulationKind,
    pub v: ElementChoice,
    pub q: ElementChoice,
    pub gauge: GaugeMode,
    pub bc: BcMode,
    pub coeff: CoefficientField,
}

impl FormulationSpec {
    /// The usual element pairing for each formulation: edge `V` with P1 `Q`
    /// in 2D, edge/edge for the three-field system and P1/P1 elsewhere.
    pub fn new(kind: FormulationKind) -> Self {
        let (v, q) = match kind {
            FormulationKind::Ls2d => (ElementChoice::Edge, ElementChoice::Nodal(1)),
            FormulationKind::Ls3dThreeField | FormulationKind::CurlCurlEdge => (ElementChoice::Edge, ElementChoice::Edge),
            FormulationKind::Ls3dTwoFieldNodal => (ElementChoice::Nodal(1), ElementChoice::Nodal(1)),
            FormulationKind::GalerkinLaplace => (ElementChoice::Nodal(1), ElementChoice::Nodal(1)),
        };
        let gauge = match kind {
            FormulationKind::Ls3dTwoFieldNodal => GaugeMode::None,
            _ => GaugeMode::Multiplier,
        };
        FormulationSpec { kind, v, q, gauge, bc: BcMode::Standard, coeff: CoefficientField::default() }
    }

    pub fn with_elements(mut self, v: ElementChoice, q: ElementChoice) -> Self {
        self.v = v;
        self.q = q;
        self
    }

    pub fn with_gauge(mut self, gauge: GaugeMode) -> Self {
        self.gauge = gauge;
        self
    }

    pub fn with_bc(mut self, bc: BcMode) -> Self {
        self.bc = bc;
        self
    }

    pub fn with_coefficients(mut self, coeff: CoefficientField) -> Self {
        self.coeff = coeff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            FormulationKind::Ls3dThreeField if self.gauge != GaugeMode::Multiplier => {
                Err(Error::invalid("the three-field formulation needs the multiplier gauge"))
            }
            FormulationKind::Ls2d if self.bc == BcMode::MixedSlit && self.gauge == GaugeMode::Multiplier => Err(
                Error::invalid("with p = 0 on the slit there is no constant mode to gauge; use gauge = none"),
            ),
            FormulationKind::Ls3dThreeField | FormulationKind::Ls3dTwoFieldNodal | FormulationKind::CurlCurlEdge
                if self.bc == BcMode::MixedSlit =>
            {
                Err(Error::invalid(format!("{} has no mixed boundary condition mode", self.kind.name())))
            }
            _ => Ok(()),
        }
    }
}

/// Builds the pencil described by `spec`.
pub fn build(mesh: &Mesh, spec: &FormulationSpec) -> Result<BlockPencil> {
    match spec.kind {
        FormulationKind::Ls2d => ls_maxwell_2d(mesh, spec),
        FormulationKind::Ls3dThreeField => ls_maxwell_3d_threefield(mesh, spec),
        FormulationKind::Ls3dTwoFieldNodal => ls_maxwell_3d_twofield_nodal(mesh, spec),
        FormulationKind::GalerkinLaplace => galerkin_laplace(mesh, spec.bc),
        FormulationKind::CurlCurlEdge => curlcurl_edge(mesh, &spec.coeff),
    }
}

fn vector_kind(e: ElementChoice) -> SpaceKind {
    match e {
        ElementChoice::Edge => SpaceKind::Edge,
        ElementChoice::Nodal(k) => SpaceKind::Vector(k),
    }
}

fn present_tags(mesh: &Mesh) -> Vec<BoundaryTag> {
    BoundaryTag::ALL.into_iter().filter(|&t| mesh.has_tag(t)).collect()
}

fn require_dim(mesh: &Mesh, dim: usize, what: &str) -> Result<()> {
    if mesh.dim() != dim {
        return Err(Error::invalid(format!("{what} needs a {dim}D mesh, got {}D", mesh.dim())));
    }
    Ok(())
}

fn reduced(form: Form, test: &FESpace, trial: &FESpace, coeff: &CoefficientField) -> Result<SparseMatrix> {
    let r = eliminate_constraints(&assemble(form, test, trial, coeff)?, test, trial);
    if r.degenerate {
        return Err(Error::invalid("every degree of freedom is constrained; refine the mesh"));
    }
    Ok(r.matrix)
}

/// The `A`, `B`, `C`, `D` blocks shared by all least-squares variants.
fn ls_blocks(
    v: &FESpace,
    q: &FESpace,
    coeff: &CoefficientField,
) -> Result<(SparseMatrix, SparseMatrix, SparseMatrix, SparseMatrix)> {
    let a = reduced(Form::EpsMass, v, v, coeff)?.add(&reduced(Form::MuInvRotRot, v, v, coeff)?, 1.0)?;
    let b = reduced(Form::CurlToVector, q, v, coeff)?;
    let c = reduced(Form::EpsInvCurlCurl, q, q, coeff)?;
    let d = reduced(Form::RotPairing, v, q, coeff)?;
    Ok((a, b, c, d))
}

/// Two-dimensional least-squares pencil with `V_h` edge or nodal vector
/// elements and `Q_h` scalar nodal elements. The multiplier gauge adds the
/// row `(μ p, 1)`.
pub fn ls_maxwell_2d(mesh: &Mesh, spec: &FormulationSpec) -> Result<BlockPencil> {
    require_dim(mesh, 2, "ls2d")?;
    spec.validate()?;
    let ElementChoice::Nodal(kq) = spec.q else {
        return Err(Error::invalid("in 2D the potential space must be nodal"));
    };
    let (cv, cq) = match spec.bc {
        BcMode::Standard => (Constraint::TangentialZero(present_tags(mesh)), Constraint::None),
        BcMode::MixedSlit => {
            if !mesh.has_tag(BoundaryTag::SlitTop) || !mesh.has_tag(BoundaryTag::SlitBottom) {
                return Err(Error::invalid("mixed slit conditions need a slit mesh"));
            }
            (
                Constraint::TangentialZero(vec![BoundaryTag::Exterior]),
                Constraint::ScalarZero(vec![BoundaryTag::SlitTop, BoundaryTag::SlitBottom]),
            )
        }
    };
    let v = FESpace::new(mesh, vector_kind(spec.v), cv)?;
    let q = FESpace::new(mesh, SpaceKind::Scalar(kq), cq)?;
    let (a, b, c, d) = ls_blocks(&v, &q, &spec.coeff)?;
    let gauge = match spec.gauge {
        GaugeMode::Multiplier => Gauge::MeanRow(reduced_row(Form::MuMeanRow, &q, &spec.coeff)?),
        GaugeMode::None => Gauge::None,
    };
    let mut pencil =
        BlockPencil::least_squares(&a, &b, &c, &d, &gauge, DofMap::from_space(&v), DofMap::from_space(&q))?;
    // Dirichlet conditions on the slit already remove the constants.
    pencil.singular = spec.gauge == GaugeMode::None && spec.bc == BcMode::Standard;
    Ok(pencil)
}

fn reduced_row(form: Form, space: &FESpace, coeff: &CoefficientField) -> Result<SparseMatrix> {
    let row = assemble(form, space, space, coeff)?;
    Ok(row.select(&[0], DofMap::from_space(space).free()))
}

/// Three-field system in 3D: edge elements for `u` and `p`, and a P1
/// potential `φ` enforcing `(μ p, ∇ψ) = 0` whose mean is fixed by one
/// more multiplier.
pub fn ls_maxwell_3d_threefield(mesh: &Mesh, spec: &FormulationSpec) -> Result<BlockPencil> {
    require_dim(mesh, 3, "ls3d_threefield")?;
    spec.validate()?;
    if spec.v != ElementChoice::Edge || spec.q != ElementChoice::Edge {
        return Err(Error::invalid("the three-field formulation uses edge elements for both fields"));
    }
    let v = FESpace::new(mesh, SpaceKind::Edge, Constraint::TangentialZero(present_tags(mesh)))?;
    let q = FESpace::new(mesh, SpaceKind::Edge, Constraint::None)?;
    let w = FESpace::new(mesh, SpaceKind::Scalar(1), Constraint::None)?;
    let (a, b, c, d) = ls_blocks(&v, &q, &spec.coeff)?;
    let grad = reduced(Form::GradPairing, &q, &w, &spec.coeff)?;
    let mean = reduced_row(Form::MeanRow, &w, &spec.coeff)?;
    BlockPencil::least_squares(
        &a,
        &b,
        &c,
        &d,
        &Gauge::Potential { grad, mean },
        DofMap::from_space(&v),
        DofMap::from_space(&q),
    )
}

/// Two-field system in 3D with nodal P1 vector elements for both fields
/// and no gauge. The pencil is singular and is flagged as outside the
/// available theory.
pub fn ls_maxwell_3d_twofield_nodal(mesh: &Mesh, spec: &FormulationSpec) -> Result<BlockPencil> {
    require_dim(mesh, 3, "ls3d_twofield_nodal")?;
    spec.validate()?;
    let (ElementChoice::Nodal(kv), ElementChoice::Nodal(kq)) = (spec.v, spec.q) else {
        return Err(Error::invalid("the two-field formulation uses nodal elements for both fields"));
    };
    let v = FESpace::new(mesh, SpaceKind::Vector(kv), Constraint::TangentialZero(present_tags(mesh)))?;
    let q = FESpace::new(mesh, SpaceKind::Vector(kq), Constraint::None)?;
    let (a, b, c, d) = ls_blocks(&v, &q, &spec.coeff)?;
    let mut pencil =
        BlockPencil::least_squares(&a, &b, &c, &d, &Gauge::None, DofMap::from_space(&v), DofMap::from_space(&q))?;
    pencil.untheorized = true;
    Ok(pencil)
}

/// P1 Galerkin pencil for the Laplacian: Neumann conditions in the
/// standard mode, Dirichlet on the slit and Neumann elsewhere in the mixed
/// mode. The Neumann problem keeps its zero eigenvalue.
pub fn galerkin_laplace(mesh: &Mesh, bc: BcMode) -> Result<BlockPencil> {
    let constraint = match bc {
        BcMode::Standard => Constraint::None,
        BcMode::MixedSlit => Constraint::ScalarZero(vec![BoundaryTag::SlitTop, BoundaryTag::SlitBottom]),
    };
    let s = FESpace::new(mesh, SpaceKind::Scalar(1), constraint)?;
    let coeff = CoefficientField::default();
    let k = reduced(Form::StiffnessLaplace, &s, &s, &coeff)?;
    let m = reduced(Form::MassScalar, &s, &s, &coeff)?;
    BlockPencil::symmetric(k, m, DofMap::from_space(&s), None)
}

/// Edge element curl-curl pencil `((μ⁻¹ rot u, rot v), (ε u, v))` with zero
/// tangential trace. Its kernel, the gradients of P1 functions vanishing on
/// the boundary, is attached to the pencil.
pub fn curlcurl_edge(mesh: &Mesh, coeff: &CoefficientField) -> Result<BlockPencil> {
    require_dim(mesh, 2, "curlcurl_edge")?;
    let tags = present_tags(mesh);
    let v = FESpace::new(mesh, SpaceKind::Edge, Constraint::TangentialZero(tags.clone()))?;
    let s = FESpace::new(mesh, SpaceKind::Scalar(1), Constraint::ScalarZero(tags))?;
    let k = reduced(Form::MuInvRotRot, &v, &v, coeff)?;
    let m = reduced(Form::EpsMass, &v, &v, coeff)?;
    let g = discrete_gradient(&v, &s)?;
    let (rows, cols) = (DofMap::from_space(&v), DofMap::from_space(&s));
    let kernel = (cols.free_len() > 0).then(|| g.select(rows.free(), cols.free()));
    BlockPencil::symmetric(k, m, rows, kernel)
}
