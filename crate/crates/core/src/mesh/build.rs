use std::f64::consts::PI;

use super::{BoundaryTag, Mesh};
use crate::{Error, Result};

/// How each grid square is split into triangles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Diagonal {
    /// Diagonal from lower-left to upper-right.
    #[default]
    Right,
    /// Diagonal from lower-right to upper-left.
    Left,
    /// Both diagonals, four triangles per square.
    Crisscross,
}

impl Diagonal {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "right" => Some(Diagonal::Right),
            "left" => Some(Diagonal::Left),
            "crisscross" => Some(Diagonal::Crisscross),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Diagonal::Right => "right",
            Diagonal::Left => "left",
            Diagonal::Crisscross => "crisscross",
        }
    }
}

/// Benchmark domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// (0, π)²
    Square,
    /// (-1, 1)² minus the upper-right quadrant.
    LShape,
    /// (-1, 1)² cut along {0 ≤ x ≤ 1, y = 0}.
    Slit,
    /// (0, π)³
    Cube,
}

impl Domain {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "square" => Some(Domain::Square),
            "lshape" => Some(Domain::LShape),
            "slit" => Some(Domain::Slit),
            "cube" => Some(Domain::Cube),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Square => "square",
            Domain::LShape => "lshape",
            Domain::Slit => "slit",
            Domain::Cube => "cube",
        }
    }

    pub fn dim(self) -> usize {
        if self == Domain::Cube {
            3
        } else {
            2
        }
    }

    /// Mesh with `n` subdivisions per unit length (per side for the square
    /// and the cube).
    pub fn build(self, n: usize, diagonal: Diagonal) -> Result<Mesh> {
        match self {
            Domain::Square => square(n, PI, diagonal),
            Domain::LShape => lshape(n, diagonal),
            Domain::Slit => slit(n, diagonal),
            Domain::Cube => cube(n, PI),
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("number of subdivisions must be at least 1"))
    } else {
        Ok(())
    }
}

/// Square (0, side)² with n×n squares, each split into triangles.
pub fn square(n: usize, side: f64, diagonal: Diagonal) -> Result<Mesh> {
    check_n(n)?;
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::invalid("side length must be positive"));
    }
    let grid = Grid { nx: n, ny: n, origin: [0.0, 0.0], step: side / n as f64, slit_row: None };
    grid.mesh(diagonal, |_, _| true, |_, _| BoundaryTag::Exterior)
}

/// L-shaped domain (-1, 1)² \ [0, 1)², with n squares per unit length.
pub fn lshape(n: usize, diagonal: Diagonal) -> Result<Mesh> {
    check_n(n)?;
    let grid = Grid { nx: 2 * n, ny: 2 * n, origin: [-1.0, -1.0], step: 1.0 / n as f64, slit_row: None };
    grid.mesh(diagonal, |i, j| i < n || j < n, |_, _| BoundaryTag::Exterior)
}

/// Slit domain (-1, 1)² with a cut along the segment from (0, 0) to (1, 0).
/// Vertices on the open cut are duplicated, one copy per side; the tip at
/// the origin is shared.
pub fn slit(n: usize, diagonal: Diagonal) -> Result<Mesh> {
    check_n(n)?;
    let grid = Grid { nx: 2 * n, ny: 2 * n, origin: [-1.0, -1.0], step: 1.0 / n as f64, slit_row: Some((n, n)) };
    let eps = 1e-12;
    grid.mesh(
        diagonal,
        |_, _| true,
        |pts, bary| {
            let on_cut = pts.iter().all(|p| p[1].abs() < eps && p[0] > -eps);
            if !on_cut {
                BoundaryTag::Exterior
            } else if bary[1] > 0.0 {
                BoundaryTag::SlitTop
            } else {
                BoundaryTag::SlitBottom
            }
        },
    )
}

/// Cube (0, side)³ with n³ subcubes, each split into six tetrahedra around
/// its main diagonal.
pub fn cube(n: usize, side: f64) -> Result<Mesh> {
    check_n(n)?;
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::invalid("side length must be positive"));
    }
    let h = side / n as f64;
    let m = n + 1;
    let id = |i: usize, j: usize, k: usize| i + m * (j + m * k);
    let mut coords = Vec::with_capacity(m * m * m);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                coords.push([i as f64 * h, j as f64 * h, k as f64 * h]);
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut cells = Vec::with_capacity(24 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for perm in PERMS {
                    let mut p = [i, j, k];
                    cells.push(id(p[0], p[1], p[2]));
                    for axis in perm {
                        p[axis] += 1;
                        cells.push(id(p[0], p[1], p[2]));
                    }
                }
            }
        }
    }
    Mesh::from_cells(3, coords, cells, Vec::new(), |_, _| BoundaryTag::Exterior)
}

struct Grid {
    nx: usize,
    ny: usize,
    origin: [f64; 2],
    step: f64,
    /// Row index and column index of the slit tip; vertices on that row to
    /// the right of the tip are duplicated.
    slit_row: Option<(usize, usize)>,
}

impl Grid {
    fn mesh<K, C>(&self, diagonal: Diagonal, keep: K, classify: C) -> Result<Mesh>
    where
        K: Fn(usize, usize) -> bool,
        C: Fn(&[[f64; 3]], [f64; 3]) -> BoundaryTag,
    {
        let (nx, ny) = (self.nx, self.ny);
        let quads: Vec<(usize, usize)> =
            (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).filter(|&(i, j)| keep(i, j)).collect();

        let mut used = vec![false; (nx + 1) * (ny + 1)];
        for &(i, j) in &quads {
            for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                used[(i + di) + (nx + 1) * (j + dj)] = true;
            }
        }
        let split = |i: usize, j: usize| matches!(self.slit_row, Some((js, is)) if j == js && i > is);

        // Two ids per grid point: below/above the slit (equal unless split).
        let mut ids = vec![[usize::MAX; 2]; (nx + 1) * (ny + 1)];
        let mut coords = Vec::new();
        let mut crack_pairs = Vec::new();
        for j in 0..=ny {
            for i in 0..=nx {
                let g = i + (nx + 1) * j;
                if !used[g] {
                    continue;
                }
                let p = [self.origin[0] + i as f64 * self.step, self.origin[1] + j as f64 * self.step, 0.0];
                coords.push(p);
                let lower = coords.len() - 1;
                if split(i, j) {
                    coords.push(p);
                    ids[g] = [lower, lower + 1];
                    crack_pairs.push((lower + 1, lower));
                } else {
                    ids[g] = [lower, lower];
                }
            }
        }

        let mut cells = Vec::new();
        for &(i, j) in &quads {
            let side = match self.slit_row {
                Some((js, _)) if j >= js => 1,
                _ => 0,
            };
            let v = |di: usize, dj: usize| ids[(i + di) + (nx + 1) * (j + dj)][side];
            let (v00, v10, v01, v11) = (v(0, 0), v(1, 0), v(0, 1), v(1, 1));
            match diagonal {
                Diagonal::Right => cells.extend_from_slice(&[v00, v10, v11, v00, v11, v01]),
                Diagonal::Left => cells.extend_from_slice(&[v00, v10, v01, v10, v11, v01]),
                Diagonal::Crisscross => {
                    let x = self.origin[0] + (i as f64 + 0.5) * self.step;
                    let y = self.origin[1] + (j as f64 + 0.5) * self.step;
                    coords.push([x, y, 0.0]);
                    let c = coords.len() - 1;
                    cells.extend_from_slice(&[v00, v10, c, v10, v11, c, v11, v01, c, v01, v00, c]);
                }
            }
        }
        Mesh::from_cells(2, coords, cells, crack_pairs, classify)
    }
}
