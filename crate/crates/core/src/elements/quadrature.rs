use crate::{Error, Result};

/// Quadrature rule on the reference simplex. Points are barycentric
/// coordinates `(λ0, …, λd)`; weights sum to the reference volume.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub dim: usize,
    pub points: Vec<[f64; 4]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Reference Cartesian coordinates of point `q`, i.e. `(λ1, …, λd)`.
    pub fn reference_point(&self, q: usize) -> [f64; 3] {
        let b = self.points[q];
        [b[1], b[2], if self.dim == 3 { b[3] } else { 0.0 }]
    }
}

/// Gauss-Legendre rule with `n` points on [0, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Rule exact for polynomials of total degree `degree` on the reference
/// triangle (`dim = 2`) or tetrahedron (`dim = 3`).
pub fn quadrature(dim: usize, degree: usize) -> Result<QuadratureRule> {
    match (dim, degree) {
        (2 | 3, 0 | 1) => {
            let c = 1.0 / (dim + 1) as f64;
            let vol = if dim == 2 { 0.5 } else { 1.0 / 6.0 };
            let mut p = [0.0; 4];
            p[..=dim].fill(c);
            Ok(QuadratureRule { dim, points: vec![p], weights: vec![vol] })
        }
        (2, 2) => {
            let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
            let points = vec![[a, b, b, 0.0], [b, a, b, 0.0], [b, b, a, 0.0]];
            Ok(QuadratureRule { dim, points, weights: vec![1.0 / 6.0; 3] })
        }
        (3, 2) => {
            let a = (5.0 + 3.0 * 5f64.sqrt()) / 20.0;
            let b = (5.0 - 5f64.sqrt()) / 20.0;
            let points = vec![[a, b, b, b], [b, a, b, b], [b, b, a, b], [b, b, b, a]];
            Ok(QuadratureRule { dim, points, weights: vec![1.0 / 24.0; 4] })
        }
        (2 | 3, d) if d <= 12 => Ok(collapsed(dim, d)),
        (2 | 3, d) => Err(Error::Unsupported(format!("quadrature of degree {d}"))),
        _ => Err(Error::invalid(format!("quadrature dimension must be 2 or 3, got {dim}"))),
    }
}

/// Tensor Gauss rule mapped to the simplex by the collapsed (Duffy)
/// transformation.
fn collapsed(dim: usize, degree: usize) -> QuadratureRule {
    let n = (degree + dim) / 2 + 1;
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    if dim == 2 {
        for i in 0..n {
            for j in 0..n {
                let (s, t) = (x[i], x[j]);
                let (px, py) = (s, t * (1.0 - s));
                points.push([1.0 - px - py, px, py, 0.0]);
                weights.push(w[i] * w[j] * (1.0 - s));
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (s, t, u) = (x[i], x[j], x[k]);
                    let px = s;
                    let py = t * (1.0 - s);
                    let pz = u * (1.0 - s) * (1.0 - t);
                    points.push([1.0 - px - py - pz, px, py, pz]);
                    weights.push(w[i] * w[j] * w[k] * (1.0 - s).powi(2) * (1.0 - t));
                }
            }
        }
    }
    QuadratureRule { dim, points, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for n in 1..8 {
            let (x, w) = gauss_legendre(n);
            for p in 0..(2 * n) as i32 {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
                assert!((q - 1.0 / (p + 1) as f64).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn triangle_exactness() {
        for degree in 1..=8 {
            let rule = quadrature(2, degree).unwrap();
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let q: f64 = (0..rule.len())
                        .map(|i| {
                            let p = rule.reference_point(i);
                            rule.weights[i] * p[0].powi(a as i32) * p[1].powi(b as i32)
                        })
                        .sum();
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    assert!((q - exact).abs() < 1e-14, "degree {degree}: x^{a} y^{b}");
                }
            }
        }
    }

    #[test]
    fn tetrahedron_exactness() {
        for degree in 1..=6 {
            let rule = quadrature(3, degree).unwrap();
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    for c in 0..=(degree as u32 - a - b) {
                        let q: f64 = (0..rule.len())
                            .map(|i| {
                                let p = rule.reference_point(i);
                                rule.weights[i] * p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32)
                            })
                            .sum();
                        let exact = factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
                        assert!((q - exact).abs() < 1e-14, "degree {degree}: x^{a} y^{b} z^{c}");
                    }
                }
            }
        }
    }

    #[test]
    fn small_rules() {
        let r = quadrature(2, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.weights[0], 0.5);
        let r = quadrature(2, 2).unwrap();
        let xy: f64 = (0..3).map(|i| r.weights[i] * r.reference_point(i)[0] * r.reference_point(i)[1]).sum();
        assert!((xy - 1.0 / 24.0).abs() < 1e-16);
        assert!(quadrature(2, 50).is_err());
        assert!(quadrature(4, 1).is_err());
    }
}
