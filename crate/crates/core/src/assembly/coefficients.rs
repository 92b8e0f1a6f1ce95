use crate::{Error, Result};

/// Permittivity and permeability of one material.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    pub eps: f64,
    pub mu: f64,
}

impl Material {
    pub const VACUUM: Material = Material { eps: 1.0, mu: 1.0 };

    pub fn new(eps: f64, mu: f64) -> Result<Self> {
        for (name, v) in [("eps", eps), ("mu", mu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Material { eps, mu })
    }
}

/// Piecewise constant material coefficients keyed by cell tag.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    default: Material,
    tagged: Vec<(u32, Material)>,
}

impl Default for CoefficientField {
    fn default() -> Self {
        CoefficientField { default: Material::VACUUM, tagged: Vec::new() }
    }
}

impl CoefficientField {
    pub fn uniform(eps: f64, mu: f64) -> Result<Self> {
        Ok(CoefficientField { default: Material::new(eps, mu)?, tagged: Vec::new() })
    }

    /// Overrides the material on cells carrying `tag`.
    pub fn with_tag(mut self, tag: u32, eps: f64, mu: f64) -> Result<Self> {
        let m = Material::new(eps, mu)?;
        self.tagged.retain(|(t, _)| *t != tag);
        self.tagged.push((tag, m));
        Ok(self)
    }

    pub fn material(&self, tag: u32) -> Material {
        self.tagged.iter().find(|(t, _)| *t == tag).map_or(self.default, |(_, m)| *m)
    }

    pub fn is_uniform(&self) -> bool {
        self.tagged.iter().all(|(_, m)| *m == self.default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_and_validation() {
        let c = CoefficientField::uniform(1.0, 1.0).unwrap().with_tag(1, 2.0, 0.5).unwrap();
        assert_eq!(c.material(0), Material::VACUUM);
        assert_eq!(c.material(1), Material { eps: 2.0, mu: 0.5 });
        assert!(!c.is_uniform());
        assert!(CoefficientField::uniform(0.0, 1.0).is_err());
        assert!(CoefficientField::uniform(1.0, f64::NAN).is_err());
    }
}
