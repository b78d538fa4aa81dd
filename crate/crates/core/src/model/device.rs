use serde::{Deserialize, Serialize};

use super::constants::{hz_to_angular, ROOM_TEMPERATURE};
use super::material::{default_ln_material, Material, SlabGeometry};
use crate::optical::{Layer, LayerStack, Port};

/// Power transmissions of the two cavity mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorSet {
    /// HR coating on the crystal's back face.
    pub back_transmission: f64,
    /// External curved mirror closing the cavity.
    pub front_transmission: f64,
}

/// Crystal, coatings and loss budget of a slab cavity. The air gap is not
/// part of the device: it is a tuning variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Device {
    pub material: Material,
    pub slab: SlabGeometry,
    pub mirrors: MirrorSet,
    /// Round-trip fractional power loss apart from mirror transmission.
    pub excess_loss: f64,
    /// Coating on the crystal face that looks into the air gap.
    pub ar_coating: Option<Layer>,
    pub input_port: Port,
}

impl Device {
    /// Layer stack from the HR mirror to the curved mirror for a given air gap.
    pub fn stack(&self, air_gap: f64) -> LayerStack {
        let mut layers = vec![Layer::new(self.material.n_opt, self.slab.len_x)];
        if let Some(ar) = self.ar_coating {
            layers.push(ar);
        }
        layers.push(Layer::new(1.0, air_gap));
        LayerStack {
            layers,
            back_mirror_t: self.mirrors.back_transmission,
            front_mirror_t: self.mirrors.front_transmission,
            excess_loss: self.excess_loss,
        }
    }

    /// Optical path length of the crystal plus coating, m.
    pub fn crystal_optical_length(&self) -> f64 {
        self.material.n_opt * self.slab.len_x + self.ar_coating.map_or(0.0, |l| l.index * l.thickness)
    }
}

/// The upgraded 4×12×8 mm device: HR coating with 0.16 % transmission,
/// 0.02 % curved mirror, 0.1 % excess round-trip loss and a 300 nm
/// fused-silica AR layer on the air-facing crystal face.
pub fn paper_device() -> Device {
    Device {
        material: default_ln_material(),
        slab: SlabGeometry {
            len_x: 4e-3,
            len_y: 12e-3,
            len_z: 8e-3,
        },
        mirrors: MirrorSet {
            back_transmission: 0.0016,
            front_transmission: 0.0002,
        },
        excess_loss: 0.001,
        ar_coating: Some(Layer::new(1.444, 300e-9)),
        input_port: Port::Back,
    }
}

/// Pump laser settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Laser {
    pub wavelength: f64,
    /// Incident power, W.
    pub power: f64,
    /// Fraction of the incident power mode matched to the cavity.
    pub mode_match: f64,
}

pub fn paper_laser() -> Laser {
    Laser {
        wavelength: 1550e-9,
        power: 0.050,
        mode_match: 0.9,
    }
}

/// Measured operating point of the upgraded device. All rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub n_p: f64,
    pub g0: f64,
    pub kappa_o: f64,
    pub kappa_o_ext: f64,
    pub kappa_m: f64,
    pub omega_m: f64,
    pub q_int: f64,
    pub temperature: f64,
}

impl OperatingPoint {
    pub fn kappa_m_int(&self) -> f64 {
        self.omega_m / self.q_int
    }

    pub fn kappa_m_ext(&self) -> f64 {
        self.kappa_m - self.kappa_m_int()
    }
}

pub fn paper_operating_point() -> OperatingPoint {
    OperatingPoint {
        n_p: 6.5e10,
        g0: hz_to_angular(1.5),
        kappa_o: hz_to_angular(4.1e6),
        kappa_o_ext: hz_to_angular(2.8e6),
        kappa_m: hz_to_angular(8.54e6),
        omega_m: hz_to_angular(9.302e9),
        q_int: 1.3e3,
        temperature: ROOM_TEMPERATURE,
    }
}
