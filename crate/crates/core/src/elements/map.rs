use super::nedelec::cross;
use crate::{Error, Result};

/// Affine map `x = x0 + J ξ` from the reference simplex onto a cell.
#[derive(Clone, Copy, Debug)]
pub struct AffineMap {
    pub dim: usize,
    pub origin: [f64; 3],
    /// Columns are the edge vectors `x_k − x_0`.
    pub jac: [[f64; 3]; 3],
    /// Inverse transpose of `jac`.
    pub inv_t: [[f64; 3]; 3],
    pub det: f64,
}

impl AffineMap {
    pub fn new(dim: usize, points: &[[f64; 3]]) -> Result<Self> {
        if points.len() != dim + 1 {
            return Err(Error::invalid("wrong number of cell vertices"));
        }
        let mut jac = [[0.0; 3]; 3];
        for k in 0..dim {
            for r in 0..dim {
                jac[r][k] = points[k + 1][r] - points[0][r];
            }
        }
        if dim == 2 {
            jac[2][2] = 1.0;
        }
        let c0 = [jac[0][0], jac[1][0], jac[2][0]];
        let c1 = [jac[0][1], jac[1][1], jac[2][1]];
        let c2 = [jac[0][2], jac[1][2], jac[2][2]];
        // Rows of J^{-1} are (c1×c2, c2×c0, c0×c1)/det, so the columns of
        // J^{-T} are those cross products.
        let x0 = cross(c1, c2);
        let det = c0[0] * x0[0] + c0[1] * x0[1] + c0[2] * x0[2];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::invalid("degenerate cell"));
        }
        let x1 = cross(c2, c0);
        let x2 = cross(c0, c1);
        let mut inv_t = [[0.0; 3]; 3];
        for r in 0..3 {
            inv_t[r] = [x0[r] / det, x1[r] / det, x2[r] / det];
        }
        Ok(AffineMap { dim, origin: points[0], jac, inv_t, det })
    }

    pub fn map_point(&self, xi: [f64; 3]) -> [f64; 3] {
        std::array::from_fn(|r| self.origin[r] + (0..self.dim).map(|k| self.jac[r][k] * xi[k]).sum::<f64>())
    }

    /// `J^{-T} v`: gradients and edge element values.
    pub fn covariant(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for r in 0..self.dim {
            out[r] = (0..self.dim).map(|k| self.inv_t[r][k] * v[k]).sum();
        }
        out
    }

    /// `J c / det J`: curls of edge elements in 3D.
    pub fn contravariant(&self, c: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for r in 0..self.dim {
            out[r] = (0..self.dim).map(|k| self.jac[r][k] * c[k]).sum::<f64>() / self.det;
        }
        out
    }

    /// Cell measure scaling `|det J|`.
    pub fn abs_det(&self) -> f64 {
        self.det.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::eval_nedelec2d;

    #[test]
    fn inverse_transpose() {
        let m = AffineMap::new(3, &[[0.1, 0.0, 0.2], [1.0, 0.3, 0.0], [0.2, 1.1, 0.1], [0.0, 0.4, 0.9]]).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let s: f64 = (0..3).map(|k| m.jac[k][r] * m.inv_t[k][c]).sum();
                assert!((s - if r == c { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn shared_edge_tangential_continuity() {
        // Two triangles sharing the edge (1,0)-(0,1), each with its own
        // local numbering. Global orientation goes from vertex A to vertex B.
        let a = [1.0, 0.0, 0.0];
        let b = [0.0, 1.0, 0.0];
        let t1 = [[0.0, 0.0, 0.0], a, b];
        let t2 = [b, a, [1.2, 0.9, 0.0]];
        let m1 = AffineMap::new(2, &t1).unwrap();
        let m2 = AffineMap::new(2, &t2).unwrap();
        // Local edge (1,2) in t1 runs a -> b (sign +1); local edge (0,1) in
        // t2 runs b -> a (sign -1).
        let tangent = [b[0] - a[0], b[1] - a[1], 0.0];
        for s in [0.1, 0.5, 0.8] {
            let x = [a[0] + s * tangent[0], a[1] + s * tangent[1], 0.0];
            let ref1 = [1.0 - s, s];
            let ref2 = [1.0 - s, 0.0];
            let v1 = m1.covariant(eval_nedelec2d(&ref1).unwrap().0[2]);
            let v2 = m2.covariant(eval_nedelec2d(&ref2).unwrap().0[0]).map(|c| -c);
            assert!((m1.map_point([ref1[0], ref1[1], 0.0])[0] - x[0]).abs() < 1e-14);
            assert!((m2.map_point([ref2[0], ref2[1], 0.0])[1] - x[1]).abs() < 1e-14);
            let d1 = v1[0] * tangent[0] + v1[1] * tangent[1];
            let d2 = v2[0] * tangent[0] + v2[1] * tangent[1];
            assert!((d1 - d2).abs() < 1e-14 && (d1 - 1.0).abs() < 1e-14);
        }
    }
}
