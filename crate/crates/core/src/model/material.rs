use serde::{Deserialize, Serialize};

use super::ModelError;

/// Optical, microwave and electro-optic constants of the crystal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub name: String,
    /// Extraordinary refractive index at the pump wavelength.
    pub n_opt: f64,
    /// Relative microwave permittivities along the crystal axes.
    pub eps_x: f64,
    pub eps_y: f64,
    pub eps_z: f64,
    /// Pockels coefficient r33, m/V.
    pub r33: f64,
}

impl Material {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.n_opt > 1.0) {
            return Err(ModelError::Invalid(format!(
                "material {}: n_opt must exceed 1, got {}",
                self.name, self.n_opt
            )));
        }
        for (axis, eps) in [("x", self.eps_x), ("y", self.eps_y), ("z", self.eps_z)] {
            if !(eps >= 1.0) {
                return Err(ModelError::Invalid(format!(
                    "material {}: eps_{axis} must be >= 1, got {eps}",
                    self.name
                )));
            }
        }
        if !(self.r33 >= 0.0) {
            return Err(ModelError::Invalid(format!(
                "material {}: r33 must be >= 0, got {}",
                self.name, self.r33
            )));
        }
        Ok(())
    }
}

/// Congruent lithium niobate at 1550 nm.
///
/// `n_opt` is the extraordinary Sellmeier index at 1550 nm, frozen; the
/// microwave tensor is uniaxial with the optic axis along z.
pub fn default_ln_material() -> Material {
    Material {
        name: "LiNbO3".to_string(),
        n_opt: 2.138,
        eps_x: 45.0,
        eps_y: 45.0,
        eps_z: 25.0,
        r33: 31e-12,
    }
}

/// Crystal dimensions in meters. Light propagates along x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabGeometry {
    pub len_x: f64,
    pub len_y: f64,
    pub len_z: f64,
}

impl SlabGeometry {
    pub fn new(len_x: f64, len_y: f64, len_z: f64) -> Result<Self, ModelError> {
        let g = SlabGeometry { len_x, len_y, len_z };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.len_x > 0.0 && self.len_y > 0.0 && self.len_z > 0.0 {
            Ok(())
        } else {
            Err(ModelError::Invalid(format!(
                "slab lengths must be positive, got {:?}",
                self
            )))
        }
    }

    pub fn volume(&self) -> f64 {
        self.len_x * self.len_y * self.len_z
    }

    pub fn scaled(&self, s: f64) -> Self {
        SlabGeometry {
            len_x: self.len_x * s,
            len_y: self.len_y * s,
            len_z: self.len_z * s,
        }
    }
}
