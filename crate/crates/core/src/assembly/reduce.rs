use super::{FESpace, SparseMatrix};

/// Translation between the full dof numbering of a space and the
/// numbering of its free (unconstrained) dofs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofMap {
    free: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl DofMap {
    pub fn from_space(space: &FESpace) -> Self {
        Self::from_mask(space.constrained())
    }

    /// `constrained[i]` marks dof `i` as eliminated.
    pub fn from_mask(constrained: &[bool]) -> Self {
        let mut free = Vec::new();
        let mut position = vec![None; constrained.len()];
        for (i, &c) in constrained.iter().enumerate() {
            if !c {
                position[i] = Some(free.len());
                free.push(i);
            }
        }
        DofMap { free, position }
    }

    pub fn all(n: usize) -> Self {
        Self::from_mask(&vec![false; n])
    }

    pub fn full_len(&self) -> usize {
        self.position.len()
    }

    pub fn free_len(&self) -> usize {
        self.free.len()
    }

    /// Full indices of the free dofs, ascending.
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn reduced_index(&self, full: usize) -> Option<usize> {
        self.position[full]
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&i| full[i]).collect()
    }

    /// Extends a reduced vector by zeros on the constrained dofs.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.full_len()];
        for (k, &i) in self.free.iter().enumerate() {
            out[i] = reduced[k];
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Reduced {
    pub matrix: SparseMatrix,
    pub rows: DofMap,
    pub cols: DofMap,
    /// Set when every dof of the test or trial space is constrained.
    pub degenerate: bool,
}

/// Removes the rows of constrained test dofs and the columns of constrained
/// trial dofs. Since all essential conditions are homogeneous this is
/// equivalent to restricting the form to the constrained subspaces.
pub fn eliminate_constraints(matrix: &SparseMatrix, test: &FESpace, trial: &FESpace) -> Reduced {
    let rows = DofMap::from_space(test);
    let cols = DofMap::from_space(trial);
    let matrix = matrix.select(rows.free(), cols.free());
    let degenerate = rows.free_len() == 0 || cols.free_len() == 0;
    Reduced { matrix, rows, cols, degenerate }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, CoefficientField, Constraint, Form, SpaceKind};
    use crate::mesh::{square, BoundaryTag, Diagonal};

    #[test]
    fn expand_restrict_round_trip() {
        let map = DofMap::from_mask(&[true, false, false, true, false]);
        assert_eq!(map.free(), &[1, 2, 4]);
        let full = map.expand(&[1.0, 2.0, 3.0]);
        assert_eq!(full, vec![0.0, 1.0, 2.0, 0.0, 3.0]);
        assert_eq!(map.restrict(&full), vec![1.0, 2.0, 3.0]);
        assert_eq!(map.reduced_index(3), None);
    }

    #[test]
    fn single_cell_fully_constrained() {
        let m = square(1, 1.0, Diagonal::Right).unwrap();
        let v = FESpace::new(&m, SpaceKind::Scalar(1), Constraint::ScalarZero(vec![BoundaryTag::Exterior])).unwrap();
        let a = assemble(Form::StiffnessLaplace, &v, &v, &CoefficientField::default()).unwrap();
        let r = eliminate_constraints(&a, &v, &v);
        assert!(r.degenerate);
        assert_eq!(r.matrix.nrows(), 0);
    }
}
