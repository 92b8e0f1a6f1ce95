use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dist, local_edges, signed_volume, Mesh};
use crate::{Error, Result};

const MAX_DRAWS: usize = 100;

impl Mesh {
    /// Moves every vertex not on the boundary by a random offset of length
    /// at most `amplitude` times the shortest incident edge. Draws that would
    /// invert an incident cell are repeated.
    pub fn perturb_interior(&self, amplitude: f64, seed: u64) -> Result<Mesh> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::invalid(format!("perturbation amplitude must be non-negative, got {amplitude}")));
        }
        let mut out = self.clone();
        if amplitude == 0.0 {
            return Ok(out);
        }
        let nv = self.num_vertices();
        let fixed = self.boundary_vertices();
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
        let mut local_h = vec![f64::INFINITY; nv];
        for c in 0..self.num_cells() {
            let cell = self.cell(c);
            for &v in cell {
                incident[v].push(c);
            }
            for e in local_edges(self.dim) {
                let (a, b) = (cell[e[0]], cell[e[1]]);
                let len = dist(self.coords[a], self.coords[b]);
                local_h[a] = local_h[a].min(len);
                local_h[b] = local_h[b].min(len);
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in 0..nv {
            if fixed[v] || incident[v].is_empty() {
                continue;
            }
            let origin = out.coords[v];
            let radius = amplitude * local_h[v];
            let mut accepted = false;
            for _ in 0..MAX_DRAWS {
                let d = unit_ball(&mut rng, self.dim);
                out.coords[v] = [origin[0] + radius * d[0], origin[1] + radius * d[1], origin[2] + radius * d[2]];
                if incident[v].iter().all(|&c| signed_volume(self.dim, &out.coords, out.cell(c)) > 0.0) {
                    accepted = true;
                    break;
                }
            }
            if !accepted {
                return Err(Error::invalid(format!(
                    "could not move vertex {v} without inverting a cell; amplitude {amplitude} is too large"
                )));
            }
        }
        out.validate()?;
        Ok(out)
    }
}

fn unit_ball(rng: &mut ChaCha8Rng, dim: usize) -> [f64; 3] {
    loop {
        let mut d = [0.0; 3];
        for x in d.iter_mut().take(dim) {
            *x = rng.gen_range(-1.0..=1.0);
        }
        if d.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return d;
        }
    }
}
