//! Simplicial meshes of the benchmark domains.
//!
//! Coordinates are always stored with three components; the third one is zero
//! for two-dimensional meshes. Cells are positively oriented after
//! construction, and every boundary facet carries exactly one tag.

mod build;
mod io;
mod perturb;

use std::collections::HashMap;

pub use build::{cube, lshape, slit, square, Diagonal, Domain};

use crate::{Error, Result};

/// Label attached to a boundary facet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    Exterior,
    SlitTop,
    SlitBottom,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 3] = [BoundaryTag::Exterior, BoundaryTag::SlitTop, BoundaryTag::SlitBottom];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::Exterior => "exterior",
            BoundaryTag::SlitTop => "slit_top",
            BoundaryTag::SlitBottom => "slit_bottom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }
}

/// Local vertex pairs of the edges of a triangle.
pub const TRI_EDGES: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];
/// Local vertex pairs of the edges of a tetrahedron.
pub const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

pub fn local_edges(dim: usize) -> &'static [[usize; 2]] {
    if dim == 2 {
        &TRI_EDGES
    } else {
        &TET_EDGES
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    dim: usize,
    coords: Vec<[f64; 3]>,
    cells: Vec<usize>,
    cell_tags: Vec<u32>,
    facets: Vec<usize>,
    facet_tags: Vec<BoundaryTag>,
    crack_pairs: Vec<(usize, usize)>,
}

impl Mesh {
    /// Builds a mesh from raw cells. Cells are reoriented if needed, boundary
    /// facets are detected and labelled by `classify`, which receives the
    /// facet vertex coordinates and the barycenter of the owning cell.
    pub fn from_cells<F>(
        dim: usize,
        coords: Vec<[f64; 3]>,
        mut cells: Vec<usize>,
        crack_pairs: Vec<(usize, usize)>,
        classify: F,
    ) -> Result<Mesh>
    where
        F: Fn(&[[f64; 3]], [f64; 3]) -> BoundaryTag,
    {
        if dim != 2 && dim != 3 {
            return Err(Error::invalid(format!("mesh dimension must be 2 or 3, got {dim}")));
        }
        let nv = dim + 1;
        if cells.len() % nv != 0 {
            return Err(Error::invalid("cell array length is not a multiple of the cell size"));
        }
        if let Some(&v) = cells.iter().find(|&&v| v >= coords.len()) {
            return Err(Error::invalid(format!("cell references missing vertex {v}")));
        }
        for cell in cells.chunks_mut(nv) {
            if signed_volume(dim, &coords, cell) < 0.0 {
                cell.swap(nv - 2, nv - 1);
            }
        }
        let ncells = cells.len() / nv;
        let mut mesh = Mesh {
            dim,
            coords,
            cells,
            cell_tags: vec![0; ncells],
            facets: Vec::new(),
            facet_tags: Vec::new(),
            crack_pairs,
        };
        let boundary = mesh.boundary_facets_from_cells()?;
        for (facet, cell) in boundary {
            let pts: Vec<[f64; 3]> = facet.iter().map(|&v| mesh.coords[v]).collect();
            let tag = classify(&pts, mesh.barycenter(cell));
            mesh.facets.extend_from_slice(&facet);
            mesh.facet_tags.push(tag);
        }
        mesh.validate()?;
        Ok(mesh)
    }

    /// Assembles a mesh from explicit parts and validates it.
    pub fn from_parts(
        dim: usize,
        coords: Vec<[f64; 3]>,
        cells: Vec<usize>,
        cell_tags: Vec<u32>,
        facets: Vec<usize>,
        facet_tags: Vec<BoundaryTag>,
        crack_pairs: Vec<(usize, usize)>,
    ) -> Result<Mesh> {
        if dim != 2 && dim != 3 {
            return Err(Error::invalid(format!("mesh dimension must be 2 or 3, got {dim}")));
        }
        if cells.len() != cell_tags.len() * (dim + 1) || facets.len() != facet_tags.len() * dim {
            return Err(Error::invalid("inconsistent cell or facet array lengths"));
        }
        let mesh = Mesh { dim, coords, cells, cell_tags, facets, facet_tags, crack_pairs };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cell_tags.len()
    }

    pub fn num_facets(&self) -> usize {
        self.facet_tags.len()
    }

    pub fn vertex(&self, i: usize) -> [f64; 3] {
        self.coords[i]
    }

    pub fn coords(&self) -> &[[f64; 3]] {
        &self.coords
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let n = self.dim + 1;
        &self.cells[c * n..(c + 1) * n]
    }

    pub fn cell_tag(&self, c: usize) -> u32 {
        self.cell_tags[c]
    }

    pub fn facet(&self, f: usize) -> &[usize] {
        &self.facets[f * self.dim..(f + 1) * self.dim]
    }

    pub fn facet_tag(&self, f: usize) -> BoundaryTag {
        self.facet_tags[f]
    }

    /// Pairs `(top, bottom)` of geometrically coincident vertices on the two
    /// sides of a slit.
    pub fn crack_pairs(&self) -> &[(usize, usize)] {
        &self.crack_pairs
    }

    pub fn has_tag(&self, tag: BoundaryTag) -> bool {
        self.facet_tags.contains(&tag)
    }

    pub fn cell_points(&self, c: usize) -> Vec<[f64; 3]> {
        self.cell(c).iter().map(|&v| self.coords[v]).collect()
    }

    pub fn barycenter(&self, c: usize) -> [f64; 3] {
        let cell = self.cell(c);
        let mut b = [0.0; 3];
        for &v in cell {
            for k in 0..3 {
                b[k] += self.coords[v][k];
            }
        }
        b.map(|x| x / cell.len() as f64)
    }

    /// Signed area (2D) or volume (3D) of a cell.
    pub fn cell_volume(&self, c: usize) -> f64 {
        signed_volume(self.dim, &self.coords, self.cell(c))
    }

    /// Largest edge length over all cells.
    pub fn h(&self) -> f64 {
        let mut h: f64 = 0.0;
        for c in 0..self.num_cells() {
            let cell = self.cell(c);
            for e in local_edges(self.dim) {
                h = h.max(dist(self.coords[cell[e[0]]], self.coords[cell[e[1]]]));
            }
        }
        h
    }

    /// Returns a copy with cells whose barycenter satisfies `inside` given
    /// material tag `tag`.
    pub fn with_subdomain<F: Fn([f64; 3]) -> bool>(mut self, tag: u32, inside: F) -> Mesh {
        for c in 0..self.num_cells() {
            if inside(self.barycenter(c)) {
                self.cell_tags[c] = tag;
            }
        }
        self
    }

    /// Vertices lying on at least one boundary facet.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.num_vertices()];
        for &v in &self.facets {
            on[v] = true;
        }
        on
    }

    pub fn edges(&self) -> EdgeTable {
        EdgeTable::new(self)
    }

    /// Checks orientation, conformity, boundary labelling and slit pairs.
    pub fn validate(&self) -> Result<()> {
        let nv = self.num_vertices();
        if self.cells.iter().chain(&self.facets).any(|&v| v >= nv) {
            return Err(Error::invalid("mesh references a vertex out of range"));
        }
        for c in 0..self.num_cells() {
            let vol = self.cell_volume(c);
            if !(vol > 0.0) {
                return Err(Error::invalid(format!("cell {c} has non-positive volume {vol}")));
            }
        }
        let mut boundary: Vec<Vec<usize>> =
            self.boundary_facets_from_cells()?.into_iter().map(|(f, _)| f).collect();
        let mut tagged: Vec<Vec<usize>> = (0..self.num_facets())
            .map(|f| {
                let mut v = self.facet(f).to_vec();
                v.sort_unstable();
                v
            })
            .collect();
        boundary.sort();
        tagged.sort();
        if tagged.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("boundary facet carries more than one tag"));
        }
        if boundary != tagged {
            return Err(Error::invalid("tagged facets do not match the boundary of the cell complex"));
        }
        for &(a, b) in &self.crack_pairs {
            if a >= nv || b >= nv || a == b {
                return Err(Error::invalid("invalid slit vertex pair"));
            }
            if dist(self.coords[a], self.coords[b]) > 0.0 {
                return Err(Error::invalid(format!("slit vertices {a} and {b} do not coincide")));
            }
            if (0..self.num_cells()).any(|c| {
                let cell = self.cell(c);
                cell.contains(&a) && cell.contains(&b)
            }) {
                return Err(Error::invalid(format!("slit vertices {a} and {b} share a cell")));
            }
        }
        Ok(())
    }

    /// Facets adjacent to exactly one cell, in order of first appearance,
    /// with sorted vertex indices and the owning cell.
    fn boundary_facets_from_cells(&self) -> Result<Vec<(Vec<usize>, usize)>> {
        let n = self.dim + 1;
        let mut seen: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        let mut order = Vec::new();
        for c in 0..self.num_cells() {
            let cell = self.cell(c);
            for skip in 0..n {
                let mut f: Vec<usize> = (0..n).filter(|&i| i != skip).map(|i| cell[i]).collect();
                f.sort_unstable();
                let entry = seen.entry(f.clone()).or_insert_with(|| {
                    order.push(f);
                    (0, c)
                });
                entry.0 += 1;
                if entry.0 > 2 {
                    return Err(Error::invalid("facet shared by more than two cells"));
                }
            }
        }
        Ok(order
            .into_iter()
            .filter_map(|f| {
                let (count, cell) = seen[&f];
                (count == 1).then_some((f, cell))
            })
            .collect())
    }
}

/// Global edge numbering, with edges stored as ascending vertex pairs.
#[derive(Clone, Debug)]
pub struct EdgeTable {
    edges: Vec<[usize; 2]>,
    cell_edges: Vec<usize>,
    per_cell: usize,
    lookup: HashMap<[usize; 2], usize>,
}

impl EdgeTable {
    fn new(mesh: &Mesh) -> Self {
        let local = local_edges(mesh.dim);
        let mut lookup = HashMap::new();
        let mut edges = Vec::new();
        let mut cell_edges = Vec::with_capacity(mesh.num_cells() * local.len());
        for c in 0..mesh.num_cells() {
            let cell = mesh.cell(c);
            for e in local {
                let (a, b) = (cell[e[0]], cell[e[1]]);
                let key = [a.min(b), a.max(b)];
                let id = *lookup.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edges.len() - 1
                });
                cell_edges.push(id);
            }
        }
        EdgeTable { edges, cell_edges, per_cell: local.len(), lookup }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    /// Global edge indices of a cell, in local edge order.
    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c * self.per_cell..(c + 1) * self.per_cell]
    }

    pub fn find(&self, a: usize, b: usize) -> Option<usize> {
        self.lookup.get(&[a.min(b), a.max(b)]).copied()
    }
}

pub(crate) fn signed_volume(dim: usize, coords: &[[f64; 3]], cell: &[usize]) -> f64 {
    let p0 = coords[cell[0]];
    let d = |i: usize| -> [f64; 3] {
        let p = coords[cell[i]];
        [p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]]
    };
    if dim == 2 {
        let (a, b) = (d(1), d(2));
        0.5 * (a[0] * b[1] - a[1] * b[0])
    } else {
        let (a, b, c) = (d(1), d(2), d(3));
        (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))
            / 6.0
    }
}

pub(crate) fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
