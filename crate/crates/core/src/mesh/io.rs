//! Plain-text mesh format.
//!
//! ```text
//! dim nv nc nf
//! x y [z]                 (nv lines)
//! v0 v1 v2 [v3] tag       (nc lines, tag is the material tag)
//! a b [c] boundary_tag    (nf lines)
//! cracks k                (optional)
//! top bottom              (k lines)
//! ```

use std::fmt::Write as _;

use super::{BoundaryTag, Mesh};
use crate::{Error, Result};

impl Mesh {
    pub fn to_text(&self) -> String {
        let d = self.dim;
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {} {}", d, self.num_vertices(), self.num_cells(), self.num_facets());
        for p in &self.coords {
            let line: Vec<String> = p[..d].iter().map(|x| format!("{x:?}")).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        for c in 0..self.num_cells() {
            let line: Vec<String> = self.cell(c).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{} {}", line.join(" "), self.cell_tag(c));
        }
        for f in 0..self.num_facets() {
            let line: Vec<String> = self.facet(f).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{} {}", line.join(" "), self.facet_tag(f).name());
        }
        if !self.crack_pairs.is_empty() {
            let _ = writeln!(s, "cracks {}", self.crack_pairs.len());
            for (a, b) in &self.crack_pairs {
                let _ = writeln!(s, "{a} {b}");
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Mesh> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut next = |what: &str| -> Result<(usize, Vec<&str>)> {
            lines
                .next()
                .map(|(i, l)| (i + 1, l.split_whitespace().collect()))
                .ok_or_else(|| Error::Parse { line: 0, message: format!("unexpected end of input, expected {what}") })
        };
        let (ln, head) = next("header")?;
        let head: Vec<usize> = parse_all(ln, &head)?;
        if head.len() != 4 {
            return Err(Error::Parse { line: ln, message: "header must be `dim nv nc nf`".into() });
        }
        let (dim, nv, nc, nf) = (head[0], head[1], head[2], head[3]);
        if dim != 2 && dim != 3 {
            return Err(Error::Parse { line: ln, message: format!("unsupported dimension {dim}") });
        }
        let mut coords = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, tok) = next("vertex")?;
            let x: Vec<f64> = parse_all(ln, &tok)?;
            if x.len() != dim {
                return Err(Error::Parse { line: ln, message: format!("expected {dim} coordinates") });
            }
            coords.push([x[0], x[1], if dim == 3 { x[2] } else { 0.0 }]);
        }
        let mut cells = Vec::with_capacity(nc * (dim + 1));
        let mut cell_tags = Vec::with_capacity(nc);
        for _ in 0..nc {
            let (ln, tok) = next("cell")?;
            let v: Vec<usize> = parse_all(ln, &tok)?;
            if v.len() != dim + 2 {
                return Err(Error::Parse { line: ln, message: format!("expected {} vertices and a tag", dim + 1) });
            }
            cells.extend_from_slice(&v[..=dim]);
            cell_tags.push(v[dim + 1] as u32);
        }
        let mut facets = Vec::with_capacity(nf * dim);
        let mut facet_tags = Vec::with_capacity(nf);
        for _ in 0..nf {
            let (ln, tok) = next("facet")?;
            if tok.len() != dim + 1 {
                return Err(Error::Parse { line: ln, message: format!("expected {dim} vertices and a tag") });
            }
            facets.extend(parse_all::<usize>(ln, &tok[..dim])?);
            let tag = BoundaryTag::parse(tok[dim])
                .ok_or_else(|| Error::Parse { line: ln, message: format!("unknown boundary tag `{}`", tok[dim]) })?;
            facet_tags.push(tag);
        }
        let mut crack_pairs = Vec::new();
        if let Ok((ln, tok)) = next("") {
            if tok.len() != 2 || tok[0] != "cracks" {
                return Err(Error::Parse { line: ln, message: "trailing content".into() });
            }
            let k: usize = parse_all(ln, &tok[1..])?[0];
            for _ in 0..k {
                let (ln, tok) = next("slit pair")?;
                let p: Vec<usize> = parse_all(ln, &tok)?;
                if p.len() != 2 {
                    return Err(Error::Parse { line: ln, message: "expected two vertex indices".into() });
                }
                crack_pairs.push((p[0], p[1]));
            }
        }
        Mesh::from_parts(dim, coords, cells, cell_tags, facets, facet_tags, crack_pairs)
    }
}

fn parse_all<T: std::str::FromStr>(line: usize, tok: &[&str]) -> Result<Vec<T>> {
    tok.iter()
        .map(|t| t.parse().map_err(|_| Error::Parse { line, message: format!("cannot parse `{t}`") }))
        .collect()
}
