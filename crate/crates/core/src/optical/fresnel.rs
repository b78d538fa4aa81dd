use num_complex::Complex64;

use std::f64::consts::TAU;

/// Normal-incidence power reflectivity of a bare interface.
pub fn fresnel_reflectivity(n1: f64, n2: f64) -> f64 {
    let r = (n1 - n2) / (n1 + n2);
    r * r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackReflection {
    /// Complex amplitude reflection coefficient seen from the incident medium.
    pub r: Complex64,
    /// Power reflectivity |r|².
    pub reflectivity: f64,
}

/// Normal-incidence reflection of a thin-film stack.
///
/// `indices[0]` is the incident medium and `indices.last()` the exit medium;
/// `films` are the intermediate layers in order. Uses the characteristic
/// matrix of each film,
/// `[[cos δ, i sin δ / n], [i n sin δ, cos δ]]` with `δ = 2π n d / λ`.
pub fn stack_reflectivity(
    incident: f64,
    films: &[super::Layer],
    exit: f64,
    wavelength: f64,
) -> StackReflection {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut m = [[one, zero], [zero, one]];
    for f in films {
        let delta = TAU * f.index * f.thickness / wavelength;
        let (s, c) = delta.sin_cos();
        let layer = [
            [Complex64::new(c, 0.0), Complex64::new(0.0, s / f.index)],
            [Complex64::new(0.0, s * f.index), Complex64::new(c, 0.0)],
        ];
        m = [
            [
                m[0][0] * layer[0][0] + m[0][1] * layer[1][0],
                m[0][0] * layer[0][1] + m[0][1] * layer[1][1],
            ],
            [
                m[1][0] * layer[0][0] + m[1][1] * layer[1][0],
                m[1][0] * layer[0][1] + m[1][1] * layer[1][1],
            ],
        ];
    }
    let n0 = incident;
    let ns = exit;
    let num = m[0][0] * n0 + m[0][1] * (n0 * ns) - m[1][0] - m[1][1] * ns;
    let den = m[0][0] * n0 + m[0][1] * (n0 * ns) + m[1][0] + m[1][1] * ns;
    let r = num / den;
    StackReflection {
        r,
        reflectivity: r.norm_sqr(),
    }
}
