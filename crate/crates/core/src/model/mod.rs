//! Shared physical types, constants and the reference device fixture.

pub mod constants;
mod device;
mod material;

pub use constants::{angular_to_hz, hz_to_angular, wavelength_to_hz, PhysicalConstants, CONSTANTS};
pub use device::{
    paper_device, paper_laser, paper_operating_point, Device, Laser, MirrorSet, OperatingPoint,
};
pub use material::{default_ln_material, Material, SlabGeometry};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model input: {0}")]
    Invalid(String),
}
