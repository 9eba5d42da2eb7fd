//! 2×2 transfer-matrix calculus for thin scatterers and free propagation.
//!
//! A transfer matrix maps the (right-moving, left-moving) field amplitudes on
//! the right of an element onto those on its left. Matrices compose left to
//! right in optical order, so a stack `A | B | C` is `A · B · C`.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex dimensionless polarizability of a thin element.
///
/// The real part is the dispersive response, the imaginary part (never
/// negative) the absorption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarizability(Complex64);

impl Polarizability {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() || im < 0.0 {
            return Err(Error::ActiveElement { re, im });
        }
        Ok(Self(Complex64::new(re, im)))
    }

    /// Lossless element.
    pub fn real(re: f64) -> Self {
        assert!(re.is_finite(), "polarizability must be finite");
        Self(Complex64::new(re, 0.0))
    }

    /// Lossless element with the given intensity reflectivity, using the
    /// negative-polarizability convention `ζ = -|r| / sqrt(1 - |r|²)`.
    pub fn from_reflectivity(reflectivity: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&reflectivity) {
            return Err(Error::InvalidParameter(format!("intensity reflectivity {reflectivity} outside [0, 1)")));
        }
        Ok(Self::real(-(reflectivity / (1.0 - reflectivity)).sqrt()))
    }

    /// Lossless element with amplitude reflectivity `|r|`.
    pub fn from_amplitude_reflectivity(r_abs: f64) -> Result<Self> {
        Self::from_reflectivity(r_abs * r_abs)
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn is_lossless(self) -> bool {
        self.0.im == 0.0
    }

    /// Same element with the absorption removed.
    pub fn lossless_part(self) -> Self {
        Self::real(self.0.re)
    }

    /// Intensity reflectivity of the isolated element, `|ζ|² / |1 - iζ|²`.
    pub fn reflectivity(self) -> f64 {
        let z = self.0;
        z.norm_sqr() / (Complex64::new(1.0, 0.0) - Complex64::i() * z).norm_sqr()
    }

    /// Absorbed power fraction of the isolated element.
    pub fn absorption(self) -> f64 {
        single_element_absorption(self.0.re, self.0.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix {
        m11: Complex64::new(1.0, 0.0),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::new(1.0, 0.0),
    };

    pub fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn determinant(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.m11.norm_sqr() + self.m12.norm_sqr() + self.m21.norm_sqr() + self.m22.norm_sqr()).sqrt()
    }

    /// `‖self - other‖ / max(‖self‖, ‖other‖)`.
    pub fn relative_distance(&self, other: &TransferMatrix) -> f64 {
        let diff =
            TransferMatrix::new(self.m11 - other.m11, self.m12 - other.m12, self.m21 - other.m21, self.m22 - other.m22);
        let scale = self.norm().max(other.norm());
        if scale == 0.0 {
            0.0
        } else {
            diff.norm() / scale
        }
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }
}

/// `[[1 + iζ, iζ], [-iζ, 1 - iζ]]`.
pub fn scatterer_matrix(zeta: Polarizability) -> TransferMatrix {
    let iz = Complex64::i() * zeta.value();
    let one = Complex64::new(1.0, 0.0);
    TransferMatrix::new(one + iz, iz, -iz, one - iz)
}

/// `diag(e^{i·phase}, e^{-i·phase})` for free propagation over `phase = k·d`.
pub fn propagation_matrix(phase: f64) -> TransferMatrix {
    let e = Complex64::from_polar(1.0, phase);
    TransferMatrix::new(e, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), e.conj())
}

/// Ordered product of the matrices in optical order.
pub fn compose(matrices: &[TransferMatrix]) -> Result<TransferMatrix> {
    let (first, rest) = matrices.split_first().ok_or(Error::EmptyProduct)?;
    Ok(rest.iter().fold(*first, |acc, m| acc * *m))
}

/// Amplitude reflection and transmission for light incident from the left:
/// `t = 1 / m22`, `r = -m21 / m22`.
pub fn amplitudes(m: &TransferMatrix) -> Result<(Complex64, Complex64)> {
    if m.m22.norm() == 0.0 || !m.m22.is_finite() {
        return Err(Error::DegenerateMatrix);
    }
    let t = m.m22.inv();
    Ok((-m.m21 * t, t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCoefficients {
    pub reflectivity: f64,
    pub transmissivity: f64,
    pub absorption: f64,
}

pub fn power_coefficients(m: &TransferMatrix) -> Result<PowerCoefficients> {
    let (r, t) = amplitudes(m)?;
    let reflectivity = r.norm_sqr();
    let transmissivity = t.norm_sqr();
    Ok(PowerCoefficients { reflectivity, transmissivity, absorption: 1.0 - reflectivity - transmissivity })
}

/// `2ζi / ((1 + ζi)² + ζr²)`.
pub fn single_element_absorption(zeta_re: f64, zeta_im: f64) -> f64 {
    2.0 * zeta_im / ((1.0 + zeta_im).powi(2) + zeta_re * zeta_re)
}

/// Largest absorbed fraction a single element with real part `zeta_re` can
/// reach, `1 / (1 + sqrt(1 + ζr²))`.
pub fn max_single_element_absorption(zeta_re: f64) -> f64 {
    1.0 / (1.0 + (1.0 + zeta_re * zeta_re).sqrt())
}

/// Polarizability whose single-element absorbed fraction equals `target`,
/// taking the smaller of the two imaginary parts that solve the quadratic.
pub fn calibrate_absorption(target: f64, zeta_re: f64) -> Result<Polarizability> {
    let max = max_single_element_absorption(zeta_re);
    if !(0.0..1.0).contains(&target) || target >= max {
        return Err(Error::UnreachableAbsorption { target, max });
    }
    if target == 0.0 {
        return Ok(Polarizability::real(zeta_re));
    }
    // target·ζi² + 2(target - 1)·ζi + target·(1 + ζr²) = 0, smaller root written
    // as product-over-larger-root to avoid cancellation.
    let c = 1.0 + zeta_re * zeta_re;
    let b = 1.0 - target;
    let disc = (b * b - target * target * c).max(0.0);
    let zeta_im = target * c / (b + disc.sqrt());
    Polarizability::new(zeta_re, zeta_im)
}
