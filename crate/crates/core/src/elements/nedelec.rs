use super::barycentric;
use crate::mesh::{TET_EDGES, TRI_EDGES};
use crate::Result;

/// Whitney edge functions `λa∇λb − λb∇λa` on the reference triangle, in
/// local edge order, with their scalar rot `2 ∇λa × ∇λb`.
pub fn eval_nedelec2d(point: &[f64]) -> Result<(Vec<[f64; 3]>, Vec<f64>)> {
    let (lam, g) = barycentric(2, point)?;
    let mut values = Vec::with_capacity(3);
    let mut rots = Vec::with_capacity(3);
    for [a, b] in TRI_EDGES {
        values.push(whitney(&lam, &g, a, b));
        rots.push(2.0 * (g[a][0] * g[b][1] - g[a][1] * g[b][0]));
    }
    Ok((values, rots))
}

/// Whitney edge functions on the reference tetrahedron with their curls
/// `2 ∇λa × ∇λb`.
pub fn eval_nedelec3d(point: &[f64]) -> Result<(Vec<[f64; 3]>, Vec<[f64; 3]>)> {
    let (lam, g) = barycentric(3, point)?;
    let mut values = Vec::with_capacity(6);
    let mut curls = Vec::with_capacity(6);
    for [a, b] in TET_EDGES {
        values.push(whitney(&lam, &g, a, b));
        curls.push(cross(g[a], g[b]).map(|x| 2.0 * x));
    }
    Ok((values, curls))
}

fn whitney(lam: &[f64], g: &[[f64; 3]], a: usize, b: usize) -> [f64; 3] {
    std::array::from_fn(|c| lam[a] * g[b][c] - lam[b] * g[a][c])
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::gauss_legendre;
    use crate::mesh::local_edges;

    fn vertices(dim: usize) -> Vec<[f64; 3]> {
        let mut v = vec![[0.0; 3]];
        for d in 0..dim {
            let mut p = [0.0; 3];
            p[d] = 1.0;
            v.push(p);
        }
        v
    }

    fn eval(dim: usize, p: &[f64]) -> Vec<[f64; 3]> {
        if dim == 2 {
            eval_nedelec2d(p).unwrap().0
        } else {
            eval_nedelec3d(p).unwrap().0
        }
    }

    #[test]
    fn tangential_moments_are_dual() {
        let (x, w) = gauss_legendre(3);
        for dim in [2, 3] {
            let v = vertices(dim);
            for (i, e) in local_edges(dim).iter().enumerate() {
                let (p0, p1) = (v[e[0]], v[e[1]]);
                let t: [f64; 3] = std::array::from_fn(|c| p1[c] - p0[c]);
                let mut moment = vec![0.0; local_edges(dim).len()];
                for (s, ws) in x.iter().zip(&w) {
                    let p: [f64; 3] = std::array::from_fn(|c| p0[c] + s * t[c]);
                    for (j, f) in eval(dim, &p).iter().enumerate() {
                        moment[j] += ws * (f[0] * t[0] + f[1] * t[1] + f[2] * t[2]);
                    }
                }
                for (j, m) in moment.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((m - expect).abs() < 1e-14, "dim {dim} edge {i} fn {j}: {m}");
                }
            }
        }
    }

    #[test]
    fn constants_are_reproduced() {
        let c = [0.7, -1.3, 0.4];
        for dim in [2, 3] {
            let v = vertices(dim);
            let coef: Vec<f64> = local_edges(dim)
                .iter()
                .map(|e| (0..dim).map(|k| c[k] * (v[e[1]][k] - v[e[0]][k])).sum())
                .collect();
            for p in [[0.1, 0.2, 0.3], [0.25, 0.25, 0.25], [0.6, 0.1, 0.05]] {
                let vals = eval(dim, &p);
                for k in 0..dim {
                    let s: f64 = vals.iter().zip(&coef).map(|(f, a)| a * f[k]).sum();
                    assert!((s - c[k]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn curl_matches_finite_differences() {
        let p = [0.2, 0.15, 0.3];
        let h = 1e-6;
        let d = |k: usize, s: f64| {
            let mut q = p;
            q[k] += s;
            eval_nedelec3d(&q).unwrap().0
        };
        let curls = eval_nedelec3d(&p).unwrap().1;
        for i in 0..6 {
            let dd = |k: usize, c: usize| (d(k, h)[i][c] - d(k, -h)[i][c]) / (2.0 * h);
            let fd = [dd(1, 2) - dd(2, 1), dd(2, 0) - dd(0, 2), dd(0, 1) - dd(1, 0)];
            for c in 0..3 {
                assert!((fd[c] - curls[i][c]).abs() < 1e-8);
            }
        }
        let rots = eval_nedelec2d(&p[..2]).unwrap().1;
        let d2 = |k: usize, s: f64| {
            let mut q = [p[0], p[1]];
            q[k] += s;
            eval_nedelec2d(&q).unwrap().0
        };
        for i in 0..3 {
            let fd = (d2(0, h)[i][1] - d2(0, -h)[i][1]) / (2.0 * h) - (d2(1, h)[i][0] - d2(1, -h)[i][0]) / (2.0 * h);
            assert!((fd - rots[i]).abs() < 1e-8);
        }
    }
}
