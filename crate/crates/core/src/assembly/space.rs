use crate::elements::{ElementFamily, Entity, ReferenceBasis};
use crate::mesh::{local_edges, BoundaryTag, Mesh};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Scalar continuous Lagrange elements of the given degree.
    Scalar(u8),
    /// Vector-valued continuous Lagrange elements, one scalar copy per
    /// coordinate direction.
    Vector(u8),
    /// Lowest-order Nédélec edge elements.
    Edge,
}

/// Essential boundary condition on a set of boundary tags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    None,
    /// Zero tangential trace. Nodal vector spaces need axis-aligned facets.
    TangentialZero(Vec<BoundaryTag>),
    /// Zero trace of a scalar field.
    ScalarZero(Vec<BoundaryTag>),
}

/// Global degrees of freedom of a finite element space on a mesh.
///
/// Vector Lagrange spaces number components block-wise: all dofs of the
/// first component come before those of the second, both globally and
/// within each cell.
#[derive(Clone, Debug)]
pub struct FESpace<'m> {
    mesh: &'m Mesh,
    kind: SpaceKind,
    basis: ReferenceBasis,
    components: usize,
    scalar_ndofs: usize,
    local: usize,
    cell_dofs: Vec<usize>,
    cell_signs: Vec<f64>,
    constrained: Vec<bool>,
}

impl<'m> FESpace<'m> {
    pub fn new(mesh: &'m Mesh, kind: SpaceKind, constraint: Constraint) -> Result<Self> {
        let dim = mesh.dim();
        let (family, components) = match kind {
            SpaceKind::Scalar(k) => (ElementFamily::Lagrange(k), 1),
            SpaceKind::Vector(k) => (ElementFamily::Lagrange(k), dim),
            SpaceKind::Edge => (ElementFamily::Nedelec, 1),
        };
        let basis = ReferenceBasis::new(family, dim)?;
        let edges = mesh.edges();
        let nv = mesh.num_vertices();
        let scalar_ndofs = match family {
            ElementFamily::Lagrange(1) => nv,
            ElementFamily::Lagrange(_) => nv + edges.len(),
            ElementFamily::Nedelec => edges.len(),
        };
        let nloc = basis.dof_count();
        let local = nloc * components;
        let mut cell_dofs = Vec::with_capacity(mesh.num_cells() * local);
        let mut cell_signs = Vec::with_capacity(mesh.num_cells() * local);
        let ledges = local_edges(dim);
        for c in 0..mesh.num_cells() {
            let cell = mesh.cell(c);
            let ce = edges.cell_edges(c);
            for comp in 0..components {
                for i in 0..nloc {
                    let (g, s) = match basis.entity(i) {
                        Entity::Vertex(v) => (cell[v], 1.0),
                        Entity::Edge(e) if family == ElementFamily::Nedelec => {
                            let [a, b] = ledges[e];
                            (ce[e], if cell[a] < cell[b] { 1.0 } else { -1.0 })
                        }
                        Entity::Edge(e) => (nv + ce[e], 1.0),
                    };
                    cell_dofs.push(comp * scalar_ndofs + g);
                    cell_signs.push(s);
                }
            }
        }

        let ndofs = scalar_ndofs * components;
        let mut constrained = vec![false; ndofs];
        let tags = match &constraint {
            Constraint::None => Vec::new(),
            Constraint::TangentialZero(t) | Constraint::ScalarZero(t) => t.clone(),
        };
        for &t in &tags {
            if !mesh.has_tag(t) {
                return Err(Error::invalid(format!("boundary tag `{}` does not occur in the mesh", t.name())));
            }
        }
        match (&constraint, kind) {
            (Constraint::None, _) => {}
            (Constraint::ScalarZero(_), SpaceKind::Scalar(_)) | (Constraint::TangentialZero(_), SpaceKind::Edge) => {
                for f in (0..mesh.num_facets()).filter(|&f| tags.contains(&mesh.facet_tag(f))) {
                    for g in facet_entities(mesh, &edges, f, family) {
                        constrained[g] = true;
                    }
                }
            }
            (Constraint::TangentialZero(_), SpaceKind::Vector(_)) => {
                for f in (0..mesh.num_facets()).filter(|&f| tags.contains(&mesh.facet_tag(f))) {
                    let normal = facet_normal_axis(mesh, f)?;
                    for g in facet_entities(mesh, &edges, f, family) {
                        for comp in (0..dim).filter(|&c| c != normal) {
                            constrained[comp * scalar_ndofs + g] = true;
                        }
                    }
                }
            }
            (Constraint::ScalarZero(_), _) => {
                return Err(Error::invalid("a scalar boundary condition needs a scalar space"));
            }
            (Constraint::TangentialZero(_), SpaceKind::Scalar(_)) => {
                return Err(Error::invalid("a tangential boundary condition needs a vector-valued space"));
            }
        }
        Ok(FESpace { mesh, kind, basis, components, scalar_ndofs, local, cell_dofs, cell_signs, constrained })
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn basis(&self) -> &ReferenceBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    /// Number of scalar copies (the dimension for vector Lagrange spaces).
    pub fn components(&self) -> usize {
        self.components
    }

    pub fn ndofs(&self) -> usize {
        self.scalar_ndofs * self.components
    }

    pub fn scalar_ndofs(&self) -> usize {
        self.scalar_ndofs
    }

    pub fn local_dofs(&self) -> usize {
        self.local
    }

    pub fn cell_dofs(&self, c: usize) -> &[usize] {
        &self.cell_dofs[c * self.local..(c + 1) * self.local]
    }

    /// Orientation signs of the local basis functions (±1 for edge
    /// elements, 1 otherwise).
    pub fn cell_signs(&self, c: usize) -> &[f64] {
        &self.cell_signs[c * self.local..(c + 1) * self.local]
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    pub fn constrained(&self) -> &[bool] {
        &self.constrained
    }

    pub fn num_free(&self) -> usize {
        self.constrained.iter().filter(|&&c| !c).count()
    }
}

/// Scalar dof indices of the vertices (and edges, for quadratic or edge
/// elements) of boundary facet `f`.
fn facet_entities(mesh: &Mesh, edges: &crate::mesh::EdgeTable, f: usize, family: ElementFamily) -> Vec<usize> {
    let facet = mesh.facet(f);
    let facet_edges = || -> Vec<usize> {
        let mut out = Vec::new();
        for i in 0..facet.len() {
            for j in i + 1..facet.len() {
                out.push(edges.find(facet[i], facet[j]).expect("facet edge exists"));
            }
        }
        out
    };
    match family {
        ElementFamily::Nedelec => facet_edges(),
        ElementFamily::Lagrange(1) => facet.to_vec(),
        ElementFamily::Lagrange(_) => {
            let nv = mesh.num_vertices();
            facet.iter().copied().chain(facet_edges().into_iter().map(|e| nv + e)).collect()
        }
    }
}

/// Index of the coordinate axis normal to an axis-aligned facet.
fn facet_normal_axis(mesh: &Mesh, f: usize) -> Result<usize> {
    let facet = mesh.facet(f);
    let p0 = mesh.vertex(facet[0]);
    let mut extent = [0.0f64; 3];
    for &v in facet {
        let p = mesh.vertex(v);
        for k in 0..3 {
            extent[k] = extent[k].max((p[k] - p0[k]).abs());
        }
    }
    let scale = extent.iter().fold(0.0f64, |a, &b| a.max(b));
    let flat: Vec<usize> = (0..mesh.dim()).filter(|&k| extent[k] <= 1e-12 * scale).collect();
    match flat.as_slice() {
        [k] => Ok(*k),
        _ => Err(Error::Unsupported(format!(
            "tangential condition for nodal vector elements needs axis-aligned facets; facet {f} is not"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{cube, slit, square, Diagonal};

    #[test]
    fn counts_on_unit_square() {
        let m = square(2, 1.0, Diagonal::Right).unwrap();
        let ext = vec![BoundaryTag::Exterior];
        let p1 = FESpace::new(&m, SpaceKind::Scalar(1), Constraint::ScalarZero(ext.clone())).unwrap();
        assert_eq!(p1.ndofs(), 9);
        assert_eq!(p1.num_free(), 1);
        let p2 = FESpace::new(&m, SpaceKind::Scalar(2), Constraint::None).unwrap();
        assert_eq!(p2.ndofs(), 25);
        let ned = FESpace::new(&m, SpaceKind::Edge, Constraint::TangentialZero(ext.clone())).unwrap();
        assert_eq!(ned.ndofs(), 16);
        assert_eq!(ned.num_free(), 8);
        // Corners lose both components, edge midpoints one, the center none.
        let vec1 = FESpace::new(&m, SpaceKind::Vector(1), Constraint::TangentialZero(ext)).unwrap();
        assert_eq!(vec1.ndofs(), 18);
        assert_eq!(vec1.num_free(), 2 + 4);
    }

    #[test]
    fn slit_tip_and_cut() {
        let m = slit(2, Diagonal::Right).unwrap();
        let cut = vec![BoundaryTag::SlitTop, BoundaryTag::SlitBottom];
        let q = FESpace::new(&m, SpaceKind::Scalar(1), Constraint::ScalarZero(cut)).unwrap();
        let tip = (0..m.num_vertices()).find(|&v| m.vertex(v) == [0.0, 0.0, 0.0]).unwrap();
        assert!(q.is_constrained(tip));
        assert_eq!(q.ndofs() - q.num_free(), 2 * 2 + 1);
    }

    #[test]
    fn edge_signs_follow_global_orientation() {
        let m = square(1, 1.0, Diagonal::Right).unwrap();
        let ned = FESpace::new(&m, SpaceKind::Edge, Constraint::None).unwrap();
        for c in 0..m.num_cells() {
            let cell = m.cell(c);
            for (e, s) in ned.cell_signs(c).iter().enumerate() {
                let [a, b] = local_edges(2)[e];
                assert_eq!(*s > 0.0, cell[a] < cell[b]);
            }
        }
    }

    #[test]
    fn cube_tangential() {
        let m = cube(2, 1.0).unwrap();
        let ext = vec![BoundaryTag::Exterior];
        let v = FESpace::new(&m, SpaceKind::Vector(1), Constraint::TangentialZero(ext.clone())).unwrap();
        // interior node: 3, face centres: 1 each
        assert_eq!(v.num_free(), 3 + 6);
        let e = FESpace::new(&m, SpaceKind::Edge, Constraint::TangentialZero(ext)).unwrap();
        assert_eq!(e.num_free(), e.ndofs() - 6 * 16 + 12 * 2);
    }

    #[test]
    fn mismatched_constraints() {
        let m = square(1, 1.0, Diagonal::Right).unwrap();
        let ext = vec![BoundaryTag::Exterior];
        assert!(FESpace::new(&m, SpaceKind::Scalar(1), Constraint::TangentialZero(ext.clone())).is_err());
        assert!(FESpace::new(&m, SpaceKind::Edge, Constraint::ScalarZero(ext)).is_err());
        assert!(FESpace::new(&m, SpaceKind::Scalar(1), Constraint::ScalarZero(vec![BoundaryTag::SlitTop])).is_err());
    }

    #[test]
    fn non_axis_aligned_facets_rejected() {
        let coords = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let m = Mesh::from_cells(2, coords, vec![0, 1, 2], vec![], |_, _| BoundaryTag::Exterior).unwrap();
        let r = FESpace::new(&m, SpaceKind::Vector(1), Constraint::TangentialZero(vec![BoundaryTag::Exterior]));
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}
