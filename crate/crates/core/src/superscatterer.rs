//! Collective response of `N` equally spaced identical scatterers.
//!
//! For real ζ the stack `M_m · M_p(kd) · M_m ⋯ M_m` collapses to a single
//! effective element `M_p(μ/2) · M_m(χ) · M_p(μ/2)` with `χ = ζ U_{N-1}(a)`,
//! `a = cos(kd) - ζ sin(kd)`, where `U_n` is the Chebyshev polynomial of the
//! second kind.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tmm::{
    power_coefficients, propagation_matrix, scatterer_matrix, Polarizability, PowerCoefficients, TransferMatrix,
};

/// `U_n(x)` by the three-term recurrence. `U_{-1} = 0`, `U_0 = 1`.
///
/// The recurrence is used for every argument, inside and outside `[-1, 1]`.
pub fn chebyshev_u(n: i64, x: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleResponse {
    /// Effective polarizability.
    pub chi: f64,
    /// Phase μ in (-π, π].
    pub mu: f64,
    /// Chebyshev argument `cos(kd) - ζ sin(kd)`.
    pub a: f64,
}

impl EnsembleResponse {
    /// Transfer matrix of the bare stack (first to last element, no padding).
    pub fn matrix(&self) -> TransferMatrix {
        let half = propagation_matrix(0.5 * self.mu);
        half * scatterer_matrix(Polarizability::real(self.chi)) * half
    }

    pub fn power(&self) -> PowerCoefficients {
        power_coefficients(&self.matrix()).expect("lossless stack has m22 != 0")
    }
}

pub fn ensemble_response(zeta: f64, n: usize, kd: f64) -> EnsembleResponse {
    response_from(zeta, n, kd, kd.cos() - zeta * kd.sin())
}

fn response_from(zeta: f64, n: usize, kd: f64, a: f64) -> EnsembleResponse {
    assert!(n >= 1, "an ensemble needs at least one element");
    let u1 = chebyshev_u(n as i64 - 1, a);
    let u2 = chebyshev_u(n as i64 - 2, a);
    let chi = zeta * u1;
    let i = Complex64::i();
    let num = Complex64::new(1.0, 0.0) - i * chi;
    let den = (Complex64::new(1.0, 0.0) - i * zeta) * u1 - Complex64::from_polar(1.0, kd) * u2;
    let mu = (num / den).arg();
    EnsembleResponse { chi, mu, a }
}

/// Characteristic spacings, as `kd` reduced to `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialSpacings {
    /// Maximum collective reflectivity.
    pub kd0: f64,
    /// Transmissive points (χ = 0).
    pub kd_plus: f64,
    pub kd_minus: f64,
    /// `acos(cos(π/N) / sqrt(1 + ζ²))`: `kd± = kd0 ± offset` before reduction.
    pub offset: f64,
}

impl SpecialSpacings {
    /// Spacings in units of the wavelength.
    pub fn d0(&self) -> f64 {
        self.kd0 / (2.0 * PI)
    }

    pub fn d_plus(&self) -> f64 {
        self.kd_plus / (2.0 * PI)
    }

    pub fn d_minus(&self) -> f64 {
        self.kd_minus / (2.0 * PI)
    }
}

pub fn reduce_mod_pi(angle: f64) -> f64 {
    let r = angle.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// `kd0 = -atan ζ`, `kd± = -atan ζ ± acos(cos(π/N) / sqrt(1 + ζ²))`.
pub fn special_spacings(zeta: f64, n: usize) -> SpecialSpacings {
    assert!(n >= 2, "transmissive points need at least two elements");
    let base = -zeta.atan();
    let offset = ((PI / n as f64).cos() / (1.0 + zeta * zeta).sqrt()).acos();
    SpecialSpacings {
        kd0: reduce_mod_pi(base),
        kd_plus: reduce_mod_pi(base + offset),
        kd_minus: reduce_mod_pi(base - offset),
        offset,
    }
}

/// Element spacing as a function of the element count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpacingRule {
    /// Fixed spacing, wavelength units.
    Explicit(f64),
    /// Reflective point plus a whole number of half wavelengths (or any offset).
    D0 {
        extra: f64,
    },
    DPlus {
        extra: f64,
    },
    DMinus {
        extra: f64,
    },
}

impl SpacingRule {
    /// Spacing for `n` elements of polarizability `zeta`. The special points
    /// are undefined for a single element; `n < 2` then yields half a
    /// wavelength plus `extra`, which leaves a lone element unaffected.
    pub fn resolve(&self, zeta: f64, n: usize) -> f64 {
        let (base, extra) = match *self {
            SpacingRule::Explicit(d) => return d,
            _ if n < 2 => (0.5, self.extra()),
            SpacingRule::D0 { extra } => (special_spacings(zeta, n).d0(), extra),
            SpacingRule::DPlus { extra } => (special_spacings(zeta, n).d_plus(), extra),
            SpacingRule::DMinus { extra } => (special_spacings(zeta, n).d_minus(), extra),
        };
        base + extra
    }

    fn extra(&self) -> f64 {
        match *self {
            SpacingRule::Explicit(_) => 0.0,
            SpacingRule::D0 { extra } | SpacingRule::DPlus { extra } | SpacingRule::DMinus { extra } => extra,
        }
    }
}

/// Exact product for arbitrary elements at the given positions (units of the
/// wavelength), from the first element to the last. `k` is the wavenumber in
/// radians per wavelength unit.
pub fn bruteforce_array(elements: &[(Polarizability, f64)], k: f64) -> Result<TransferMatrix> {
    let (first, rest) = elements.split_first().ok_or(Error::EmptyProduct)?;
    let mut m = scatterer_matrix(first.0);
    let mut prev = first.1;
    for (idx, &(zeta, pos)) in rest.iter().enumerate() {
        if pos <= prev || !pos.is_finite() {
            return Err(Error::NonMonotonePositions { index: idx + 1 });
        }
        m = m * propagation_matrix(k * (pos - prev)) * scatterer_matrix(zeta);
        prev = pos;
    }
    Ok(m)
}

/// Product of `n` identical elements separated by phase `kd`.
pub fn uniform_stack(zeta: Polarizability, n: usize, kd: f64) -> TransferMatrix {
    let el = scatterer_matrix(zeta);
    let step = propagation_matrix(kd) * el;
    (1..n).fold(el, |acc, _| acc * step)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub kd: f64,
    pub reflectivity: f64,
    pub transmissivity: f64,
    pub absorption: f64,
}

/// Free-space power coefficients of a uniform stack across a grid of `kd`.
///
/// Lossless stacks use the closed form; lossy stacks the explicit product.
pub fn free_space_reflectivity_scan(zeta: Polarizability, n: usize, kd_grid: &[f64]) -> Result<Vec<ScanRow>> {
    if n == 0 {
        return Err(Error::InvalidParameter("scan needs at least one element".into()));
    }
    kd_grid
        .iter()
        .map(|&kd| {
            let p = if zeta.is_lossless() {
                ensemble_response(zeta.re(), n, kd).power()
            } else {
                power_coefficients(&uniform_stack(zeta, n, kd))?
            };
            Ok(ScanRow { kd, reflectivity: p.reflectivity, transmissivity: p.transmissivity, absorption: p.absorption })
        })
        .collect()
}

/// Evenly spaced grid over `[start, end]` inclusive.
pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points).map(|i| start + (end - start) * i as f64 / (points - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn chebyshev_low_orders() {
        for &x in &[-1.3, -1.0, -0.2, 0.0, 0.7, 1.0, 1.118, 3.0] {
            assert_eq!(chebyshev_u(-1, x), 0.0);
            assert_eq!(chebyshev_u(0, x), 1.0);
            assert_relative_eq!(chebyshev_u(1, x), 2.0 * x);
            assert_relative_eq!(chebyshev_u(4, x), 16.0 * x.powi(4) - 12.0 * x * x + 1.0, epsilon = 1e-12);
        }
        // U_n(1) = n + 1
        assert_eq!(chebyshev_u(7, 1.0), 8.0);
    }

    #[test]
    fn chebyshev_matches_trig_and_hyperbolic_forms() {
        for n in 1..30_i64 {
            for i in 0..50 {
                let x = -0.999999 + 1.999998 * i as f64 / 49.0;
                let theta = x.acos();
                let trig = ((n + 1) as f64 * theta).sin() / theta.sin();
                assert!((chebyshev_u(n, x) - trig).abs() <= 1e-9 * trig.abs().max(1.0), "{n} {x}");
            }
            for &x in &[1.0001, 1.5, 4.0] {
                let eta = f64::acosh(x);
                let hyp = ((n + 1) as f64 * eta).sinh() / eta.sinh();
                assert_relative_eq!(chebyshev_u(n, x), hyp, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn single_element_is_itself() {
        let r = ensemble_response(-0.7, 1, 1.1);
        assert_eq!(r.chi, -0.7);
        assert!(r.mu.abs() < 1e-15);
    }

    #[test]
    fn five_elements_at_max_reflectivity() {
        let s = special_spacings(-0.5, 5);
        let r = ensemble_response(-0.5, 5, s.kd0);
        assert_relative_eq!(r.a, 1.25_f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(r.chi, -5.5, epsilon = 1e-12);
        assert_relative_eq!(r.power().reflectivity, 30.25 / 31.25, epsilon = 1e-12);
        let brute = uniform_stack(Polarizability::real(-0.5), 5, s.kd0);
        assert!(r.matrix().relative_distance(&brute) < 1e-12);
    }

    #[test]
    fn transmissive_points_vanish() {
        let s = special_spacings(-0.5, 5);
        assert!(ensemble_response(-0.5, 5, s.kd_minus).chi.abs() < 1e-10);
        assert!(ensemble_response(-0.5, 5, s.kd_plus).chi.abs() < 1e-10);
    }

    #[test]
    fn special_spacing_values() {
        let s = special_spacings(-0.5, 2);
        assert!((s.kd_plus - 2.0344).abs() < 1e-4);
        assert!((s.kd_minus - 2.0344).abs() < 1e-4);
        assert_relative_eq!(s.kd_minus, reduce_mod_pi((1.0_f64 / -0.5).atan()), epsilon = 1e-12);
        assert!((s.kd0 - 0.46365).abs() < 1e-5);

        let s = special_spacings(-12.9, 5);
        assert!((s.kd_minus - 3.1268).abs() < 1e-4);
        assert!((s.d_minus() - 0.4976).abs() < 1e-4);
    }

    #[test]
    fn kd0_maximizes_reflectivity() {
        for &(z, n) in &[(-0.5, 5usize), (-2.0, 3), (-12.9, 4)] {
            let s = special_spacings(z, n);
            let peak = ensemble_response(z, n, s.kd0).chi.abs();
            for kd in linspace(0.0, PI, 721) {
                assert!(ensemble_response(z, n, kd).chi.abs() <= peak * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn bruteforce_single_and_uniform() {
        let z = Polarizability::real(-0.5);
        assert_eq!(bruteforce_array(&[(z, 3.0)], 2.0 * PI).unwrap(), scatterer_matrix(z));

        let kd = special_spacings(-0.5, 5).kd_minus;
        let d = kd / (2.0 * PI);
        let els: Vec<_> = (0..5).map(|j| (z, j as f64 * d)).collect();
        let m = bruteforce_array(&els, 2.0 * PI).unwrap();
        assert!(m.relative_distance(&ensemble_response(-0.5, 5, kd).matrix()) < 1e-10);
    }

    #[test]
    fn bruteforce_rejects_unordered_positions() {
        let z = Polarizability::real(-0.5);
        assert_eq!(
            bruteforce_array(&[(z, 0.0), (z, 1.0), (z, 1.0)], 1.0),
            Err(Error::NonMonotonePositions { index: 2 })
        );
    }

    #[test]
    fn displaced_element_is_linear_in_displacement() {
        // entries of the product shift linearly in k·δx for small δx
        let z = Polarizability::real(-0.5);
        let k = 2.0 * PI;
        let d = special_spacings(-0.5, 5).d_minus();
        let build = |dx: f64| {
            let els: Vec<_> = (0..5).map(|j| (z, j as f64 * d + if j == 2 { dx } else { 0.0 })).collect();
            bruteforce_array(&els, k).unwrap()
        };
        let m0 = build(0.0);
        let slope = |h: f64| {
            let (p, m) = (build(h), build(-h));
            [(p.m11 - m.m11) / (2.0 * h), (p.m12 - m.m12) / (2.0 * h)]
        };
        let (s1, s2) = (slope(1e-5 / k), slope(0.5e-5 / k));
        for i in 0..2 {
            assert!((s1[i] - s2[i]).norm() < 1e-6 * s1[i].norm().max(1.0));
        }
        let h = 1e-4 / k;
        let predicted = m0.m11 + s1[0] * h;
        assert!((build(h).m11 - predicted).norm() < 1e-6);
    }

    #[test]
    fn single_element_scan_is_flat() {
        let rows = free_space_reflectivity_scan(Polarizability::real(-0.5), 1, &linspace(0.0, PI, 50)).unwrap();
        for r in rows {
            assert_relative_eq!(r.reflectivity, 0.2, epsilon = 1e-14);
        }
    }

    #[test]
    fn lossy_scan_absorbs_most_near_d_plus() {
        let zeta = crate::tmm::calibrate_absorption(0.05, -1.0).unwrap();
        let s = special_spacings(-1.0, 5);
        let rows = free_space_reflectivity_scan(zeta, 5, &[s.kd_plus, s.kd_minus]).unwrap();
        assert!(rows[0].absorption > rows[1].absorption);
    }
}
