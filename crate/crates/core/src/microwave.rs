//! Semi-analytic model of the rectangular anisotropic dielectric resonator.
//!
//! Modes are labelled `(l, m, p)` by their antinode counts along x, y and z
//! and use a separable standing-wave ansatz with wave numbers
//! `k_i = index_i π / len_i` (magnetic-wall boundaries). The field
//! circulates in the y–z plane: the dominant component is
//!
//! `E_z = sin(k_x x) sin(k_y y) sin(k_z z)`
//!
//! and Gauss's law `∇·(εE) = 0` fixes the partner
//!
//! `E_y = (ε_z k_z / ε_y k_y) sin(k_x x) cos(k_y y) cos(k_z z)`.
//!
//! In the dispersion relation each wave-vector component is weighted by the
//! permittivity of the field component its derivative generates: `k_y`
//! drives `E_z`, `k_z` drives `E_y` and `k_x` drives `E_x`, giving
//!
//! `(ω/c)² = k_x²/ε_x + k_y²/ε_z + k_z²/ε_y`.
//!
//! A scalar `eps_eff` replaces the tensor when supplied.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::model::constants::C;
use crate::model::{Material, SlabGeometry};

#[derive(Debug, thiserror::Error)]
pub enum MicrowaveError {
    #[error("mode indices must all be >= 1, got {0}")]
    InvalidIndices(ModeIndices),
    #[error("beam offset ({y0}, {z0}) m lies outside the {len_y} x {len_z} m cross-section")]
    BeamOutsideSlab {
        y0: f64,
        z0: f64,
        len_y: f64,
        len_z: f64,
    },
    #[error("invalid linewidth input: {0}")]
    InvalidLinewidth(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndices {
    pub l: u32,
    pub m: u32,
    pub p: u32,
}

impl ModeIndices {
    pub const fn new(l: u32, m: u32, p: u32) -> Self {
        ModeIndices { l, m, p }
    }

    fn check(&self) -> Result<(), MicrowaveError> {
        if self.l >= 1 && self.m >= 1 && self.p >= 1 {
            Ok(())
        } else {
            Err(MicrowaveError::InvalidIndices(*self))
        }
    }

    fn wave_numbers(&self, g: &SlabGeometry) -> [f64; 3] {
        [
            self.l as f64 * PI / g.len_x,
            self.m as f64 * PI / g.len_y,
            self.p as f64 * PI / g.len_z,
        ]
    }
}

impl std::fmt::Display for ModeIndices {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TM_{}{}{}", self.l, self.m, self.p)
    }
}

/// Resonance angular frequency (rad/s).
pub fn mode_frequency(
    geometry: &SlabGeometry,
    material: &Material,
    indices: ModeIndices,
    eps_eff: Option<f64>,
) -> Result<f64, MicrowaveError> {
    indices.check()?;
    let [kx, ky, kz] = indices.wave_numbers(geometry);
    let k0_sq = match eps_eff {
        Some(e) => (kx * kx + ky * ky + kz * kz) / e,
        None => kx * kx / material.eps_x + ky * ky / material.eps_z + kz * kz / material.eps_y,
    };
    Ok(C * k0_sq.sqrt())
}

/// Amplitude of the Gauss's-law partner `E_y` relative to `E_z`.
fn partner_amplitude(geometry: &SlabGeometry, material: &Material, indices: ModeIndices) -> f64 {
    let [_, ky, kz] = indices.wave_numbers(geometry);
    material.eps_z * kz / (material.eps_y * ky)
}

/// Electric field `(E_y, E_z)` of the ansatz at a point inside the slab.
pub fn field_at(
    geometry: &SlabGeometry,
    material: &Material,
    indices: ModeIndices,
    x: f64,
    y: f64,
    z: f64,
) -> (f64, f64) {
    let [kx, ky, kz] = indices.wave_numbers(geometry);
    let a = partner_amplitude(geometry, material, indices);
    let sx = (kx * x).sin();
    let ez = sx * (ky * y).sin() * (kz * z).sin();
    let ey = a * sx * (ky * y).cos() * (kz * z).cos();
    (ey, ez)
}

/// `∫ ε|E|² dV / max(ε|E|²)` over the slab for the ansatz.
///
/// Every squared sine or cosine averages to ½ over a whole number of
/// half-periods, so the integral is `V/8 · (ε_z + ε_y a²)`. The energy
/// density peaks either on an `E_z` antinode (`ε_z`) or on an `E_y`
/// antinode (`ε_y a²`).
pub fn mode_volume(
    geometry: &SlabGeometry,
    material: &Material,
    indices: ModeIndices,
) -> Result<f64, MicrowaveError> {
    indices.check()?;
    let a = partner_amplitude(geometry, material, indices);
    let ez_energy = material.eps_z;
    let ey_energy = material.eps_y * a * a;
    Ok(geometry.volume() / 8.0 * (ez_energy + ey_energy) / ez_energy.max(ey_energy))
}

/// `Σ u dV / max u` for an energy density sampled on equal-volume cells.
pub fn volume_from_energy_density(density: &[f64], cell_volume: f64) -> f64 {
    let peak = density.iter().fold(0.0_f64, |m, &u| m.max(u));
    if peak == 0.0 {
        return 0.0;
    }
    density.iter().sum::<f64>() * cell_volume / peak
}

/// Normalized `E_z` profile sampled along the optical axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxialProfile {
    /// `amplitude · sin(antinodes · π x / length)` on `[0, length]`.
    Standing {
        length: f64,
        amplitude: f64,
        antinodes: u32,
    },
    /// Piecewise-linear interpolation of samples on a strictly increasing grid.
    Sampled { xs: Vec<f64>, values: Vec<f64> },
}

impl AxialProfile {
    pub fn length(&self) -> f64 {
        match self {
            AxialProfile::Standing { length, .. } => *length,
            AxialProfile::Sampled { xs, .. } => *xs.last().unwrap_or(&0.0),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            AxialProfile::Standing {
                length,
                amplitude,
                antinodes,
            } => amplitude * (*antinodes as f64 * PI * x / length).sin(),
            AxialProfile::Sampled { xs, values } => {
                if xs.is_empty() {
                    return 0.0;
                }
                let j = xs.partition_point(|&v| v < x);
                if j == 0 {
                    values[0]
                } else if j >= xs.len() {
                    *values.last().unwrap()
                } else {
                    let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
                    values[j - 1] + t * (values[j] - values[j - 1])
                }
            }
        }
    }

    /// Knots where a piecewise profile changes slope; quadrature splits there.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            AxialProfile::Standing { length, .. } => vec![0.0, *length],
            AxialProfile::Sampled { xs, .. } => xs.clone(),
        }
    }

    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        let len = self.length();
        let denom = n.saturating_sub(1).max(1) as f64;
        (0..n)
            .map(|i| {
                let x = len * i as f64 / denom;
                (x, self.eval(x))
            })
            .collect()
    }

    /// Same shape rescaled so the largest |value| is one.
    pub fn renormalized(&self) -> AxialProfile {
        match self {
            AxialProfile::Standing {
                length, antinodes, ..
            } => AxialProfile::Standing {
                length: *length,
                amplitude: 1.0,
                antinodes: *antinodes,
            },
            AxialProfile::Sampled { xs, values } => {
                let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                let scale = if peak > 0.0 { 1.0 / peak } else { 0.0 };
                AxialProfile::Sampled {
                    xs: xs.clone(),
                    values: values.iter().map(|v| v * scale).collect(),
                }
            }
        }
    }
}

/// `E_z` along the beam at transverse position `(y0, z0)`, in units of the
/// peak `|E_z|` of the whole mode. The global sign is chosen so the profile
/// peaks positive.
pub fn axial_profile(
    geometry: &SlabGeometry,
    indices: ModeIndices,
    beam_offset: (f64, f64),
) -> Result<AxialProfile, MicrowaveError> {
    indices.check()?;
    let (y0, z0) = beam_offset;
    if !(0.0..=geometry.len_y).contains(&y0) || !(0.0..=geometry.len_z).contains(&z0) {
        return Err(MicrowaveError::BeamOutsideSlab {
            y0,
            z0,
            len_y: geometry.len_y,
            len_z: geometry.len_z,
        });
    }
    let [_, ky, kz] = indices.wave_numbers(geometry);
    let transverse = (ky * y0).sin() * (kz * z0).sin();
    // snap round-off at exact nodes to zero
    let transverse = if transverse.abs() < 1e-12 { 0.0 } else { transverse };
    Ok(AxialProfile::Standing {
        length: geometry.len_x,
        amplitude: transverse.abs(),
        antinodes: indices.l,
    })
}

/// `(κ_m, κ_m,int)` from the intrinsic quality factor and external coupling.
/// `q_int = ∞` gives a lossless resonator.
pub fn linewidths(omega: f64, q_int: f64, kappa_ext: f64) -> Result<(f64, f64), MicrowaveError> {
    if !(q_int > 0.0) || !(kappa_ext >= 0.0) {
        return Err(MicrowaveError::InvalidLinewidth(format!(
            "q_int = {q_int}, kappa_ext = {kappa_ext}"
        )));
    }
    let kappa_int = omega / q_int;
    Ok((kappa_int + kappa_ext, kappa_int))
}

/// A fully characterized microwave mode. Rates in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MicrowaveMode {
    pub indices: ModeIndices,
    pub omega: f64,
    pub volume: f64,
    pub profile: AxialProfile,
    pub q_int: f64,
    pub kappa_m: f64,
    pub kappa_m_ext: f64,
}

impl MicrowaveMode {
    pub fn kappa_m_int(&self) -> f64 {
        self.kappa_m - self.kappa_m_ext
    }
}

/// Microwave-side settings shared by every mode of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorSettings {
    pub q_int: f64,
    pub kappa_ext: f64,
    pub beam_offset: Option<(f64, f64)>,
    pub eps_eff: Option<f64>,
}

pub fn build_mode(
    geometry: &SlabGeometry,
    material: &Material,
    indices: ModeIndices,
    settings: &ResonatorSettings,
) -> Result<MicrowaveMode, MicrowaveError> {
    let omega = mode_frequency(geometry, material, indices, settings.eps_eff)?;
    let volume = mode_volume(geometry, material, indices)?;
    let offset = settings
        .beam_offset
        .unwrap_or((0.5 * geometry.len_y, 0.5 * geometry.len_z));
    let profile = axial_profile(geometry, indices, offset)?;
    let (kappa_m, _) = linewidths(omega, settings.q_int, settings.kappa_ext)?;
    Ok(MicrowaveMode {
        indices,
        omega,
        volume,
        profile,
        q_int: settings.q_int,
        kappa_m,
        kappa_m_ext: settings.kappa_ext,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{angular_to_hz, default_ln_material, hz_to_angular};
    use proptest::prelude::*;

    fn slab() -> SlabGeometry {
        SlabGeometry::new(4e-3, 12e-3, 8e-3).unwrap()
    }

    /// Midpoint-rule quadrature of the ansatz energy density.
    fn volume_by_quadrature(g: &SlabGeometry, mat: &Material, idx: ModeIndices, n: usize) -> f64 {
        let (hx, hy, hz) = (g.len_x / n as f64, g.len_y / n as f64, g.len_z / n as f64);
        let mut density = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (x, y, z) = (
                        (i as f64 + 0.5) * hx,
                        (j as f64 + 0.5) * hy,
                        (k as f64 + 0.5) * hz,
                    );
                    let (ey, ez) = field_at(g, mat, idx, x, y, z);
                    density.push(mat.eps_y * ey * ey + mat.eps_z * ez * ez);
                }
            }
        }
        volume_from_energy_density(&density, hx * hy * hz)
    }

    #[test]
    fn tm131_near_measured_frequency() {
        let f = angular_to_hz(
            mode_frequency(&slab(), &default_ln_material(), ModeIndices::new(1, 3, 1), None).unwrap(),
        );
        assert!((f - 9.44e9).abs() < 0.2 * 9.44e9, "{f}");
    }

    #[test]
    fn tm111_below_tm131() {
        let mat = default_ln_material();
        let f111 = mode_frequency(&slab(), &mat, ModeIndices::new(1, 1, 1), None).unwrap();
        let f131 = mode_frequency(&slab(), &mat, ModeIndices::new(1, 3, 1), None).unwrap();
        assert!((angular_to_hz(f111) - 6e9).abs() < 0.25 * 6e9);
        assert!(f111 < f131);
    }

    #[test]
    fn eps_eff_override() {
        let mat = default_ln_material();
        let f = mode_frequency(&slab(), &mat, ModeIndices::new(1, 3, 1), Some(35.0)).unwrap();
        let [kx, ky, kz] = ModeIndices::new(1, 3, 1).wave_numbers(&slab());
        let expected = C * ((kx * kx + ky * ky + kz * kz) / 35.0).sqrt();
        assert!((f - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn zero_index_rejected() {
        assert!(mode_frequency(&slab(), &default_ln_material(), ModeIndices::new(0, 1, 1), None).is_err());
    }

    #[test]
    fn isotropic_cube_is_permutation_symmetric() {
        let cube = SlabGeometry::new(5e-3, 5e-3, 5e-3).unwrap();
        let mut mat = default_ln_material();
        mat.eps_x = 30.0;
        mat.eps_y = 30.0;
        mat.eps_z = 30.0;
        let f = |l, m, p| mode_frequency(&cube, &mat, ModeIndices::new(l, m, p), None).unwrap();
        let base = f(1, 2, 3);
        for v in [f(1, 3, 2), f(2, 1, 3), f(2, 3, 1), f(3, 1, 2), f(3, 2, 1)] {
            assert!((v - base).abs() < 1e-9 * base);
        }
    }

    #[test]
    fn volume_matches_quadrature_and_band() {
        let mat = default_ln_material();
        let idx = ModeIndices::new(1, 3, 1);
        let v = mode_volume(&slab(), &mat, idx).unwrap();
        // odd multiple of three so midpoints land on the field maxima
        let vq = volume_by_quadrature(&slab(), &mat, idx, 63);
        assert!((v - vq).abs() < 2e-3 * v, "{v} vs {vq}");
        let mm3 = v * 1e9;
        assert!((50.0..=200.0).contains(&mm3), "{mm3}");
    }

    #[test]
    fn volume_decreases_with_m() {
        let mat = default_ln_material();
        let vols: Vec<f64> = (1..=5)
            .map(|m| volume_by_quadrature(&slab(), &mat, ModeIndices::new(1, m, 1), 48))
            .collect();
        for w in vols.windows(2) {
            assert!(w[1] < w[0], "{vols:?}");
        }
        for m in 1..=5 {
            let idx = ModeIndices::new(1, m, 1);
            assert!(mode_volume(&slab(), &mat, idx).unwrap() < slab().volume());
        }
    }

    #[test]
    fn uniform_field_fills_slab() {
        let g = slab();
        let n = 20usize;
        let vol = volume_from_energy_density(&vec![3.5; n * n * n], g.volume() / (n * n * n) as f64);
        assert!((vol * 1e9 - 384.0).abs() < 1e-9);
    }

    #[test]
    fn central_antinode_profile() {
        let g = slab();
        let p = axial_profile(&g, ModeIndices::new(1, 3, 1), (6e-3, 4e-3)).unwrap();
        for (x, v) in p.samples(101) {
            assert!((v - (PI * x / g.len_x).sin()).abs() < 1e-12);
        }
        // ∫ψ² dx = L/2
        let r = crate::quadrature::integrate(|x| p.eval(x).powi(2), 0.0, g.len_x, 1e-13);
        assert!((r.value - g.len_x / 2.0).abs() < 1e-9);
    }

    #[test]
    fn transverse_node_profile_vanishes() {
        let g = slab();
        let p = axial_profile(&g, ModeIndices::new(1, 3, 1), (4e-3, 4e-3)).unwrap();
        assert!(p.samples(50).iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn profile_peak_is_at_most_one() {
        let g = slab();
        let mut best = 0.0_f64;
        for j in 0..=24 {
            for k in 0..=16 {
                let off = (g.len_y * (j as f64 / 24.0), g.len_z * (k as f64 / 16.0));
                let p = axial_profile(&g, ModeIndices::new(1, 3, 1), off).unwrap();
                for (_, v) in p.samples(41) {
                    assert!(v.abs() <= 1.0 + 1e-12);
                    best = best.max(v.abs());
                }
            }
        }
        assert!((best - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beam_outside_rejected() {
        assert!(axial_profile(&slab(), ModeIndices::new(1, 3, 1), (13e-3, 1e-3)).is_err());
    }

    #[test]
    fn measured_linewidths() {
        let w = hz_to_angular(9.302e9);
        let (k, kint) = linewidths(w, 1300.0, 0.0).unwrap();
        assert_eq!(k, kint);
        assert!((angular_to_hz(kint) - 7.16e6).abs() < 0.01e6);
        let ext = hz_to_angular(8.54e6) - kint;
        assert!((angular_to_hz(ext) - 1.38e6).abs() < 0.01e6);
        let (k, _) = linewidths(w, f64::INFINITY, 3.0).unwrap();
        assert_eq!(k, 3.0);
    }

    proptest! {
        #[test]
        fn frequency_increases_in_each_index(l in 1u32..5, m in 1u32..5, p in 1u32..5) {
            let mat = default_ln_material();
            let f = |i: ModeIndices| mode_frequency(&slab(), &mat, i, None).unwrap();
            let base = f(ModeIndices::new(l, m, p));
            prop_assert!(f(ModeIndices::new(l + 1, m, p)) > base);
            prop_assert!(f(ModeIndices::new(l, m + 1, p)) > base);
            prop_assert!(f(ModeIndices::new(l, m, p + 1)) > base);
        }

        #[test]
        fn frequency_scales_inversely_with_size(s in 0.2f64..5.0, l in 1u32..4, m in 1u32..4, p in 1u32..4) {
            let mat = default_ln_material();
            let idx = ModeIndices::new(l, m, p);
            let f1 = mode_frequency(&slab(), &mat, idx, None).unwrap();
            let fs = mode_frequency(&slab().scaled(s), &mat, idx, None).unwrap();
            prop_assert!((fs * s - f1).abs() <= 1e-12 * f1);
        }

        #[test]
        fn volume_bounded_by_slab(l in 1u32..4, m in 1u32..6, p in 1u32..6) {
            let v = mode_volume(&slab(), &default_ln_material(), ModeIndices::new(l, m, p)).unwrap();
            prop_assert!(v < slab().volume());
        }
    }
}
