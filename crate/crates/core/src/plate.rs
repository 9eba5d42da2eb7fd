//! Dielectric plates as thin scatterers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tmm::Polarizability;

/// Lossless dielectric plate. `thickness` is in wavelength units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plate {
    pub index: f64,
    pub thickness: f64,
}

impl Plate {
    pub fn new(index: f64, thickness: f64) -> Result<Self> {
        if !(index > 1.0) || !index.is_finite() {
            return Err(Error::InvalidParameter(format!("refractive index {index} must exceed 1")));
        }
        if !(thickness > 0.0) || !thickness.is_finite() {
            return Err(Error::InvalidParameter(format!("thickness {thickness} must be positive")));
        }
        Ok(Self { index, thickness })
    }

    /// Phase `n k l` accumulated across the plate.
    pub fn phase(&self, k: f64) -> f64 {
        self.index * k * self.thickness
    }
}

/// `ζ = (1 - n²)/(2n) sin(n k l)`.
pub fn plate_polarizability(plate: &Plate, k: f64) -> Polarizability {
    let n = plate.index;
    Polarizability::real((1.0 - n * n) / (2.0 * n) * plate.phase(k).sin())
}

/// Exact amplitude reflection and transmission of the plate, summing the
/// internal reflections. Phases are referred to the plate faces.
pub fn plate_exact_rt(plate: &Plate, k: f64) -> (Complex64, Complex64) {
    let n = plate.index;
    let rf = (1.0 - n) / (1.0 + n);
    let t1 = 2.0 / (1.0 + n);
    let t2 = 2.0 * n / (1.0 + n);
    let e1 = Complex64::from_polar(1.0, -plate.phase(k));
    let e2 = e1 * e1;
    let den = 1.0 - rf * rf * e2;
    (rf * (1.0 - e2) / den, t1 * t2 * e1 / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flatness {
    /// Relative change of ζ over one cavity linewidth, `(nkl / tan nkl) / Q_c`.
    pub relative_change: f64,
    /// `|sin(nkl)| < 0.05`: close to an etalon resonance of the plate.
    pub near_resonance: bool,
}

/// Frequency flatness of the plate polarizability for a cavity of quality
/// factor `q_c`.
pub fn flatness(plate: &Plate, k: f64, q_c: f64) -> Result<Flatness> {
    let phi = plate.phase(k);
    let s = phi.sin();
    // sin of a multiple of π is only zero to rounding
    if s.abs() <= 4.0 * f64::EPSILON * phi.abs().max(1.0) {
        return Err(Error::EtalonResonance);
    }
    Ok(Flatness { relative_change: phi * phi.cos() / s / q_c, near_resonance: s.abs() < 0.05 })
}

/// Refractive index giving polarizability `zeta < 0` at phase `n k l = phase`
/// with `sin(phase) > 0`.
pub fn index_for_polarizability(zeta: f64, phase: f64) -> Result<f64> {
    let s = phase.sin();
    if !(zeta < 0.0) || !(s > 0.0) {
        return Err(Error::InvalidParameter("need ζ < 0 and sin(nkl) > 0".into()));
    }
    // (n² - 1) = -2 n ζ / s
    let b = -zeta / s;
    Ok(b + (b * b + 1.0).sqrt())
}
