use super::{CoefficientField, FESpace, SpaceKind, SparseMatrix};
use crate::elements::{quadrature, AffineMap, BasisValues, QuadratureRule};
use crate::mesh::Mesh;
use crate::{Error, Result};

pub const DEFAULT_QUADRATURE_DEGREE: usize = 4;

/// Bilinear forms of the least-squares system and of the reference
/// problems. Rows belong to the test space, columns to the trial space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    /// `(ε u, v)`
    EpsMass,
    /// `(μ⁻¹ rot u, rot v)`
    MuInvRotRot,
    /// `−(u, curl q)`: test `q`, trial `u`.
    CurlToVector,
    /// `(ε⁻¹ curl p, curl q)`
    EpsInvCurlCurl,
    /// `(p, rot v)`: test `v`, trial `p`.
    RotPairing,
    /// `(μ q, ∇φ)`: test `q`, trial `φ`.
    GradPairing,
    /// `(μ φ, 1)` as a single row.
    MuMeanRow,
    /// `(φ, 1)` as a single row.
    MeanRow,
    /// `(∇u, ∇v)`
    StiffnessLaplace,
    /// `(u, v)` for scalar spaces.
    MassScalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Value,
    Curl,
    Grad,
}

/// Whether an operator applied to a space yields a scalar or a vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Scalar,
    Vector,
}

impl Form {
    fn ops(self) -> (Op, Op) {
        match self {
            Form::EpsMass | Form::MassScalar => (Op::Value, Op::Value),
            Form::MuInvRotRot | Form::EpsInvCurlCurl => (Op::Curl, Op::Curl),
            Form::CurlToVector => (Op::Curl, Op::Value),
            Form::RotPairing => (Op::Curl, Op::Value),
            Form::GradPairing => (Op::Value, Op::Grad),
            Form::StiffnessLaplace => (Op::Grad, Op::Grad),
            Form::MuMeanRow | Form::MeanRow => (Op::Value, Op::Value),
        }
    }

    fn coefficient(self, eps: f64, mu: f64) -> f64 {
        match self {
            Form::EpsMass => eps,
            Form::MuInvRotRot => 1.0 / mu,
            Form::CurlToVector => -1.0,
            Form::EpsInvCurlCurl => 1.0 / eps,
            Form::GradPairing | Form::MuMeanRow => mu,
            Form::RotPairing | Form::MeanRow | Form::StiffnessLaplace | Form::MassScalar => 1.0,
        }
    }
}

fn shape(space: &FESpace, op: Op) -> Result<Shape> {
    let dim = space.dim();
    match (space.kind(), op) {
        (SpaceKind::Scalar(_), Op::Value) => Ok(Shape::Scalar),
        (SpaceKind::Scalar(_), Op::Grad) => Ok(Shape::Vector),
        (SpaceKind::Scalar(_), Op::Curl) if dim == 2 => Ok(Shape::Vector),
        (SpaceKind::Vector(_) | SpaceKind::Edge, Op::Value) => Ok(Shape::Vector),
        (SpaceKind::Vector(_) | SpaceKind::Edge, Op::Curl) => Ok(if dim == 2 { Shape::Scalar } else { Shape::Vector }),
        (kind, op) => Err(Error::invalid(format!("operator {op:?} is not defined on a {kind:?} space in {dim}D"))),
    }
}

pub fn assemble(form: Form, test: &FESpace, trial: &FESpace, coeff: &CoefficientField) -> Result<SparseMatrix> {
    assemble_with_degree(form, test, trial, coeff, DEFAULT_QUADRATURE_DEGREE)
}

/// Assembles `form` over all cells. For the mean-value rows the test space
/// is ignored and a `1 × n` matrix is returned.
pub fn assemble_with_degree(
    form: Form,
    test: &FESpace,
    trial: &FESpace,
    coeff: &CoefficientField,
    degree: usize,
) -> Result<SparseMatrix> {
    if !std::ptr::eq(test.mesh(), trial.mesh()) && test.mesh() != trial.mesh() {
        return Err(Error::invalid("test and trial spaces live on different meshes"));
    }
    let mesh = trial.mesh();
    let (op_test, op_trial) = form.ops();
    let mean_row = matches!(form, Form::MuMeanRow | Form::MeanRow);
    let shape_trial = shape(trial, op_trial)?;
    if mean_row {
        if shape_trial != Shape::Scalar {
            return Err(Error::invalid("mean-value row needs a scalar space"));
        }
    } else {
        let shape_test = shape(test, op_test)?;
        if shape_test != shape_trial {
            return Err(Error::invalid(format!(
                "{form:?} pairs a {shape_test:?} with a {shape_trial:?} quantity"
            )));
        }
        if matches!(form, Form::StiffnessLaplace | Form::MassScalar)
            && !matches!((test.kind(), trial.kind()), (SpaceKind::Scalar(_), SpaceKind::Scalar(_)))
        {
            return Err(Error::invalid(format!("{form:?} needs scalar spaces")));
        }
    }

    let rule = quadrature(mesh.dim(), degree)?;
    let ev_test = Evaluator::new(test, &rule)?;
    let ev_trial = Evaluator::new(trial, &rule)?;
    let nt = if mean_row { 1 } else { test.local_dofs() };
    let ns = trial.local_dofs();
    let mut local = vec![0.0; nt * ns];
    let mut vt = vec![[0.0; 3]; test.local_dofs()];
    let mut vs = vec![[0.0; 3]; ns];
    let mut triplets = Vec::with_capacity(mesh.num_cells() * nt * ns);
    for c in 0..mesh.num_cells() {
        let map = AffineMap::new(mesh.dim(), &mesh.cell_points(c))?;
        let m = coeff.material(mesh.cell_tag(c));
        let k = form.coefficient(m.eps, m.mu);
        local.fill(0.0);
        for q in 0..rule.len() {
            let w = rule.weights[q] * map.abs_det() * k;
            ev_trial.eval(&map, q, op_trial, &mut vs);
            if mean_row {
                for j in 0..ns {
                    local[j] += w * vs[j][0];
                }
                continue;
            }
            ev_test.eval(&map, q, op_test, &mut vt);
            for i in 0..nt {
                let a = vt[i];
                for j in 0..ns {
                    let b = vs[j];
                    local[i * ns + j] += w * (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
                }
            }
        }
        let (st, ss) = (test.cell_signs(c), trial.cell_signs(c));
        let (dt, ds) = (test.cell_dofs(c), trial.cell_dofs(c));
        for i in 0..nt {
            let (row, si) = if mean_row { (0, 1.0) } else { (dt[i], st[i]) };
            for j in 0..ns {
                triplets.push((row, ds[j], si * ss[j] * local[i * ns + j]));
            }
        }
    }
    let nrows = if mean_row { 1 } else { test.ndofs() };
    SparseMatrix::from_triplets(nrows, trial.ndofs(), triplets)
}

/// Reference basis values at the quadrature points of one rule.
struct Evaluator<'a> {
    space: &'a FESpace<'a>,
    reference: Vec<BasisValues>,
}

impl<'a> Evaluator<'a> {
    fn new(space: &'a FESpace<'a>, rule: &QuadratureRule) -> Result<Self> {
        let reference = (0..rule.len()).map(|q| space.basis().eval(&rule.reference_point(q))).collect::<Result<_>>()?;
        Ok(Evaluator { space, reference })
    }

    /// Physical values of `op` for every local basis function, without the
    /// orientation signs.
    fn eval(&self, map: &AffineMap, q: usize, op: Op, out: &mut [[f64; 3]]) {
        let r = &self.reference[q];
        let dim = map.dim;
        match self.space.kind() {
            SpaceKind::Scalar(_) => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = match op {
                        Op::Value => r.values[i],
                        Op::Grad => map.covariant(r.derivs[i]),
                        Op::Curl => {
                            let g = map.covariant(r.derivs[i]);
                            [g[1], -g[0], 0.0]
                        }
                    };
                }
            }
            SpaceKind::Edge => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = match op {
                        Op::Value => map.covariant(r.values[i]),
                        Op::Curl if dim == 2 => [r.derivs[i][0] / map.det, 0.0, 0.0],
                        Op::Curl => map.contravariant(r.derivs[i]),
                        Op::Grad => unreachable!("checked by shape()"),
                    };
                }
            }
            SpaceKind::Vector(_) => {
                let n = r.values.len();
                for comp in 0..dim {
                    for a in 0..n {
                        let o = &mut out[comp * n + a];
                        *o = match op {
                            Op::Value => {
                                let mut v = [0.0; 3];
                                v[comp] = r.values[a][0];
                                v
                            }
                            Op::Curl => {
                                let g = map.covariant(r.derivs[a]);
                                if dim == 2 {
                                    // rot(φ e_0) = −∂yφ, rot(φ e_1) = ∂xφ
                                    [if comp == 0 { -g[1] } else { g[0] }, 0.0, 0.0]
                                } else {
                                    let mut e = [0.0; 3];
                                    e[comp] = 1.0;
                                    crate::elements::cross_product(g, e)
                                }
                            }
                            Op::Grad => unreachable!("checked by shape()"),
                        };
                    }
                }
            }
        }
    }
}

/// Discrete gradient from a scalar P1 space into a lowest-order edge space
/// on the same mesh: column `k` holds the edge coefficients of `∇φ_k`.
pub fn discrete_gradient(edge: &FESpace, nodal: &FESpace) -> Result<SparseMatrix> {
    if edge.kind() != SpaceKind::Edge || nodal.kind() != SpaceKind::Scalar(1) {
        return Err(Error::invalid("discrete gradient maps P1 scalars to lowest-order edge elements"));
    }
    let mesh: &Mesh = edge.mesh();
    let edges = mesh.edges();
    let mut t = Vec::with_capacity(2 * edges.len());
    for e in 0..edges.len() {
        let [a, b] = edges.edge(e);
        t.push((e, a, -1.0));
        t.push((e, b, 1.0));
    }
    SparseMatrix::from_triplets(edge.ndofs(), nodal.ndofs(), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::Constraint;
    use crate::mesh::{cube, square, Diagonal};

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    /// Edge dofs of a field: line integral along each edge (3-point Gauss).
    fn edge_interp(mesh: &Mesh, f: impl Fn([f64; 3]) -> [f64; 3]) -> Vec<f64> {
        let (x, w) = crate::elements::gauss_legendre(3);
        let edges = mesh.edges();
        (0..edges.len())
            .map(|e| {
                let [a, b] = edges.edge(e);
                let (pa, pb) = (mesh.vertex(a), mesh.vertex(b));
                let t: [f64; 3] = std::array::from_fn(|k| pb[k] - pa[k]);
                x.iter()
                    .zip(&w)
                    .map(|(s, ws)| {
                        let v = f(std::array::from_fn(|k| pa[k] + s * t[k]));
                        ws * (v[0] * t[0] + v[1] * t[1] + v[2] * t[2])
                    })
                    .sum()
            })
            .collect()
    }

    fn nodal_interp(space: &FESpace, f: impl Fn([f64; 3]) -> [f64; 3]) -> Vec<f64> {
        let mesh = space.mesh();
        let n = space.scalar_ndofs();
        let mut out = vec![0.0; space.ndofs()];
        for v in 0..mesh.num_vertices() {
            let val = f(mesh.vertex(v));
            for c in 0..space.components() {
                out[c * n + v] = val[c];
            }
        }
        out
    }

    #[test]
    fn scalar_mass_and_stiffness() {
        let m = square(4, 2.0, Diagonal::Crisscross).unwrap();
        let v = FESpace::new(&m, SpaceKind::Scalar(2), Constraint::None).unwrap();
        let c = CoefficientField::default();
        let mass = assemble(Form::MassScalar, &v, &v, &c).unwrap();
        let ones = vec![1.0; v.ndofs()];
        assert!((dot(&ones, &mass.mul_vec(&ones)) - 4.0).abs() < 1e-12);
        let k = assemble(Form::StiffnessLaplace, &v, &v, &c).unwrap();
        assert!(k.mul_vec(&ones).iter().all(|x| x.abs() < 1e-12));
        assert!(k.asymmetry() < 1e-14);
    }

    #[test]
    fn five_point_stencil() {
        let m = square(4, 1.0, Diagonal::Right).unwrap();
        let v = FESpace::new(&m, SpaceKind::Scalar(1), Constraint::None).unwrap();
        let k = assemble(Form::StiffnessLaplace, &v, &v, &CoefficientField::default()).unwrap();
        let centre = 2 + 5 * 2;
        assert!((k.get(centre, centre) - 4.0).abs() < 1e-14);
        for nb in [centre - 1, centre + 1, centre - 5, centre + 5] {
            assert!((k.get(centre, nb) + 1.0).abs() < 1e-14);
        }
        assert_eq!(k.get(centre, centre + 6), 0.0);
    }

    #[test]
    fn curl_of_scalar_matches_gradient() {
        let m = square(3, 1.0, Diagonal::Left).unwrap();
        let c = CoefficientField::default();
        let v = FESpace::new(&m, SpaceKind::Scalar(1), Constraint::None).unwrap();
        let a = assemble(Form::EpsInvCurlCurl, &v, &v, &c).unwrap();
        let b = assemble(Form::StiffnessLaplace, &v, &v, &c).unwrap();
        assert!(a.add(&b, -1.0).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn rotation_field_2d() {
        let m = square(3, 1.5, Diagonal::Crisscross).unwrap();
        let area = 1.5 * 1.5;
        let c = CoefficientField::uniform(2.0, 0.5).unwrap();
        let rotation = |p: [f64; 3]| [-p[1], p[0], 0.0];
        let ned = FESpace::new(&m, SpaceKind::Edge, Constraint::None).unwrap();
        let nod = FESpace::new(&m, SpaceKind::Vector(1), Constraint::None).unwrap();
        let q = FESpace::new(&m, SpaceKind::Scalar(1), Constraint::None).unwrap();
        let ones = vec![1.0; q.ndofs()];
        for (space, u) in [(&ned, edge_interp(&m, rotation)), (&nod, nodal_interp(&nod, rotation))] {
            let k = assemble(Form::MuInvRotRot, space, space, &c).unwrap();
            assert!((dot(&u, &k.mul_vec(&u)) - 2.0 * 4.0 * area).abs() < 1e-12);
            let d = assemble(Form::RotPairing, space, &q, &c).unwrap();
            assert!((dot(&u, &d.mul_vec(&ones)) - 2.0 * area).abs() < 1e-12);
            // (ε u, u) = 2 ∫ x² + y² over the square
            let mass = assemble(Form::EpsMass, space, space, &c).unwrap();
            let exact = 2.0 * 2.0 * 1.5f64.powi(4) / 3.0;
            let err = (dot(&u, &mass.mul_vec(&u)) - exact).abs();
            if space.kind() == SpaceKind::Vector(1) {
                assert!(err < 1e-12);
            } else {
                // edge interpolant of a linear field is exact here too
                assert!(err < 1e-12, "{err}");
            }
        }
    }

    #[test]
    fn rotation_field_3d() {
        let m = cube(2, 1.0).unwrap();
        let c = CoefficientField::default();
        let rotation = |p: [f64; 3]| [-p[1], p[0], 0.0];
        let ned = FESpace::new(&m, SpaceKind::Edge, Constraint::None).unwrap();
        let nod = FESpace::new(&m, SpaceKind::Vector(1), Constraint::None).unwrap();
        for (space, u) in [(&ned, edge_interp(&m, rotation)), (&nod, nodal_interp(&nod, rotation))] {
            let k = assemble(Form::MuInvRotRot, space, space, &c).unwrap();
            assert!((dot(&u, &k.mul_vec(&u)) - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gradients_lie_in_kernel_of_curl() {
        for m in [square(3, 1.0, Diagonal::Right).unwrap(), cube(2, 1.0).unwrap()] {
            let c = CoefficientField::default();
            let ned = FESpace::new(&m, SpaceKind::Edge, Constraint::None).unwrap();
            let p1 = FESpace::new(&m, SpaceKind::Scalar(1), Constraint::None).unwrap();
            let g = discrete_gradient(&ned, &p1).unwrap();
            let k = assemble(Form::MuInvRotRot, &ned, &ned, &c).unwrap();
            for col in 0..p1.ndofs() {
                let mut e = vec![0.0; p1.ndofs()];
                e[col] = 1.0;
                let ke = k.mul_vec(&g.mul_vec(&e));
                assert!(ke.iter().all(|x| x.abs() < 1e-12));
            }
            // (q, ∇φ) with q = edge gradient of φ equals (∇φ, ∇φ)
            let grad = assemble(Form::GradPairing, &ned, &p1, &c).unwrap();
            let lap = assemble(Form::StiffnessLaplace, &p1, &p1, &c).unwrap();
            let x: Vec<f64> = (0..p1.ndofs()).map(|i| (i as f64 * 0.37).sin()).collect();
            let lhs = dot(&g.mul_vec(&x), &grad.mul_vec(&x));
            assert!((lhs - dot(&x, &lap.mul_vec(&x))).abs() < 1e-11);
        }
    }

    #[test]
    fn mean_row() {
        let m = square(2, 1.0, Diagonal::Right).unwrap();
        let q = FESpace::new(&m, SpaceKind::Scalar(1), Constraint::None).unwrap();
        let c = CoefficientField::uniform(1.0, 3.0).unwrap();
        let r = assemble(Form::MuMeanRow, &q, &q, &c).unwrap();
        assert_eq!(r.nrows(), 1);
        let s: f64 = r.triplets().map(|t| t.2).sum();
        assert!((s - 3.0).abs() < 1e-14);
    }

    #[test]
    fn incompatible_spaces_rejected() {
        let m = square(1, 1.0, Diagonal::Right).unwrap();
        let c = CoefficientField::default();
        let q = FESpace::new(&m, SpaceKind::Scalar(1), Constraint::None).unwrap();
        let v = FESpace::new(&m, SpaceKind::Edge, Constraint::None).unwrap();
        assert!(assemble(Form::EpsMass, &v, &q, &c).is_err());
        assert!(assemble(Form::StiffnessLaplace, &v, &v, &c).is_err());
        assert!(assemble(Form::GradPairing, &v, &v, &c).is_err());
    }
}
