//! Linear and quadratic optomechanical coupling: numeric finite differences of
//! the tracked cavity resonance, closed forms for the collective modes, and
//! the cooperativity.
//!
//! Numeric couplings are always evaluated on the perfect-mirror, lossless
//! counterpart of a setup. Absorption and mirror transmission only enter the
//! linewidth.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::cavity::{nearest_resonance, track_resonance, CavitySetup, Mirror, ResonancePoint, ScanOptions};
use crate::constants::{BOLTZMANN, HBAR, K_REF, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::superscatterer::{ensemble_response, special_spacings, SpacingRule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalParams {
    /// Zero-point spread, metres.
    pub x0: f64,
    /// Mechanical angular frequency, rad/s.
    pub omega_m: f64,
    pub q: f64,
    /// Bath temperature, kelvin.
    pub temperature: f64,
}

impl MechanicalParams {
    pub fn new(x0: f64, omega_m: f64, q: f64, temperature: f64) -> Result<Self> {
        for (name, v) in [("x0", x0), ("omega_m", omega_m), ("Q", q), ("temperature", temperature)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        Ok(Self { x0, omega_m, q, temperature })
    }
}

/// `g = 2 ω x0 / L`, with `x0` and `length` in metres.
pub fn single_photon_g(omega: f64, x0: f64, length: f64) -> f64 {
    2.0 * omega * x0 / length
}

/// Single-element coupling of a setup: the reference frequency and the free
/// cavity length in metres.
pub fn bare_g(setup: &CavitySetup, x0: f64) -> f64 {
    single_photon_g(setup.omega(K_REF), x0, setup.length * setup.lambda0)
}

/// Two-element coupling `sqrt(2) g |r| / (1 - |r|)`.
pub fn two_membrane_g(g: f64, r_abs: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r_abs) {
        return Err(Error::InvalidParameter(format!("|r| = {r_abs} must lie in [0, 1)")));
    }
    Ok(2f64.sqrt() * g * r_abs / (1.0 - r_abs))
}

/// Finite-difference settings. Steps are in wavelength units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffOptions {
    pub step: f64,
    /// Allowed relative disagreement between steps `h` and `h/2`.
    pub tolerance: f64,
    pub scan: ScanOptions,
}

impl DiffOptions {
    pub fn linear() -> Self {
        Self { step: 1e-7, tolerance: 1e-4, scan: ScanOptions::default() }
    }

    pub fn quadratic() -> Self {
        Self { step: 1e-4, tolerance: 1e-2, scan: ScanOptions::default() }
    }
}

impl Default for DiffOptions {
    fn default() -> Self {
        Self::linear()
    }
}

/// Derivative of the resonance wavenumber with respect to a displacement
/// amplitude, radians per wavelength per wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    /// Richardson-extrapolated value.
    pub value: f64,
    pub coarse: f64,
    pub fine: f64,
}

/// Perfect-mirror lossless counterpart used for coupling evaluation.
pub fn coupling_setup(setup: &CavitySetup) -> CavitySetup {
    CavitySetup { mirror: Mirror::Perfect, array: setup.array.lossless(), ..setup.clone() }
}

/// Working resonance: the perfect-mirror root closest to the reference
/// wavenumber.
pub fn working_resonance(setup: &CavitySetup, scan: &ScanOptions) -> Result<ResonancePoint> {
    nearest_resonance(&coupling_setup(setup), 0.0, scan)
}

fn dominant_element(direction: &[f64]) -> usize {
    direction.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).map_or(0, |(j, _)| j)
}

/// Resonance `dk` after displacing the array by `alpha · direction` on top of
/// its current displacements, followed continuously from `seed`.
pub fn displaced_resonance(
    setup: &CavitySetup,
    seed: f64,
    direction: &[f64],
    alpha: f64,
    scan: &ScanOptions,
) -> Result<f64> {
    let base = coupling_setup(setup);
    let element = dominant_element(direction);
    let disp: Vec<f64> = base.array.displacements().iter().zip(direction).map(|(d, v)| d + alpha * v).collect();
    let moved = base.with_array(base.array.with_displacements(&disp)?)?;
    let r = track_resonance(&moved, seed, scan).ok_or(Error::TrackingLost { element })?;
    if (r.dk - seed).abs() > 0.25 * base.fsr_k() {
        return Err(Error::TrackingLost { element });
    }
    Ok(r.dk)
}

fn central_difference(
    setup: &CavitySetup,
    res: &ResonancePoint,
    direction: &[f64],
    h: f64,
    scan: &ScanOptions,
) -> Result<f64> {
    let up = displaced_resonance(setup, res.dk, direction, h, scan)?;
    let down = displaced_resonance(setup, res.dk, direction, -h, scan)?;
    Ok((up - down) / (2.0 * h))
}

/// First derivative of the resonance wavenumber along `direction`, with a
/// step-halving check: `|D(h) - D(h/2)|` must not exceed `tolerance` times
/// the larger of `|D|` and the bare single-mirror slope `2k/L`.
pub fn directional_derivative(
    setup: &CavitySetup,
    res: &ResonancePoint,
    direction: &[f64],
    opts: &DiffOptions,
) -> Result<Derivative> {
    if direction.len() != setup.array.len() {
        return Err(Error::InvalidParameter("direction length must match the element count".into()));
    }
    let coarse = central_difference(setup, res, direction, opts.step, &opts.scan)?;
    let fine = central_difference(setup, res, direction, 0.5 * opts.step, &opts.scan)?;
    let scale = 2.0 * K_REF / setup.total_length();
    if (coarse - fine).abs() > opts.tolerance * coarse.abs().max(fine.abs()).max(scale) {
        return Err(Error::NotConverged { coarse, fine });
    }
    Ok(Derivative { value: (4.0 * fine - coarse) / 3.0, coarse, fine })
}

/// Converts `dk/dx` (both in wavelength units) to a coupling rate in rad/s.
pub fn rate_from_slope(setup: &CavitySetup, slope: f64, x0: f64) -> f64 {
    SPEED_OF_LIGHT / (setup.lambda0 * setup.lambda0) * slope * x0
}

fn unit(n: usize, j: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[j] = 1.0;
    v
}

/// Linear coupling `g_j = (dω/dx_j) x0` of element `j`, rad/s.
pub fn coupling_numeric(setup: &CavitySetup, j: usize, x0: f64, opts: &DiffOptions) -> Result<f64> {
    if j >= setup.array.len() {
        return Err(Error::InvalidParameter(format!("element {j} out of range")));
    }
    let res = working_resonance(setup, &opts.scan)?;
    let d = directional_derivative(setup, &res, &unit(setup.array.len(), j), opts)?;
    Ok(rate_from_slope(setup, d.value, x0))
}

/// Coupling of a collective displacement pattern `mode` (not normalized),
/// rad/s per unit amplitude `x0`.
pub fn mode_coupling(setup: &CavitySetup, mode: &[f64], x0: f64, opts: &DiffOptions) -> Result<f64> {
    let res = working_resonance(setup, &opts.scan)?;
    let d = directional_derivative(setup, &res, mode, opts)?;
    Ok(rate_from_slope(setup, d.value, x0))
}

/// Slope `dk/dα` of the transmission peak of the setup itself (partial
/// mirrors and losses included) under `α · direction`, from peaks at `±alpha`.
pub fn bright_line_slope(setup: &CavitySetup, direction: &[f64], alpha: f64, scan: &ScanOptions) -> Result<f64> {
    if direction.len() != setup.array.len() {
        return Err(Error::InvalidParameter("direction length must match the element count".into()));
    }
    let res = nearest_resonance(setup, 0.0, scan)?;
    let element = dominant_element(direction);
    let peak = |a: f64| -> Result<f64> {
        let disp: Vec<f64> = setup.array.displacements().iter().zip(direction).map(|(d, v)| d + a * v).collect();
        let moved = setup.with_array(setup.array.with_displacements(&disp)?)?;
        // follow the perfect-mirror root first, then refine to the peak next to it
        let root = track_resonance(&coupling_setup(&moved), res.dk, scan).ok_or(Error::TrackingLost { element })?;
        track_resonance(&moved, root.dk, scan).map(|r| r.dk).ok_or(Error::TrackingLost { element })
    };
    Ok((peak(alpha)? - peak(-alpha)?) / (2.0 * alpha))
}

/// Sinusoidal mode `sin(2π(j - ½)/N)` for `j = 1..=N`.
pub fn sinusoidal_mode(n: usize) -> Vec<f64> {
    (1..=n).map(|j| (2.0 * PI * (j as f64 - 0.5) / n as f64).sin()).collect()
}

/// `sqrt(Σ sin²(2π(j - ½)/N))`: `sqrt(2)` for `N = 2`, `sqrt(N/2)` above.
pub fn sinusoidal_norm(n: usize) -> f64 {
    match n {
        0 | 1 => 1.0,
        2 => 2f64.sqrt(),
        _ => (n as f64 / 2.0).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile {
    /// Per-element linear couplings, rad/s, sign fixed by `g[0] > 0`.
    pub g: Vec<f64>,
    /// `sqrt(Σ g_j²)`.
    pub collective: f64,
    /// `g / collective`.
    pub mode: Vec<f64>,
    /// Outer products `g_l g_j`, rad²/s².
    pub coupling_matrix: Vec<Vec<f64>>,
    /// Closed-form sinusoidal profile scaled to the exact collective coupling,
    /// for uniform arrays at a transmissive spacing.
    pub analytic: Option<Vec<f64>>,
    pub resonance: ResonancePoint,
}

/// Numeric couplings of every element at the working resonance. Elements are
/// evaluated in parallel and assembled in element order.
pub fn coupling_profile(setup: &CavitySetup, mech: &MechanicalParams, opts: &DiffOptions) -> Result<CouplingProfile> {
    let res = working_resonance(setup, &opts.scan)?;
    profile_at(setup, &res, mech.x0, opts)
}

/// As [`coupling_profile`], at a given resonance and without parallel fan-out
/// (for callers that already parallelize).
pub fn profile_at(setup: &CavitySetup, res: &ResonancePoint, x0: f64, opts: &DiffOptions) -> Result<CouplingProfile> {
    let n = setup.array.len();
    let raw = (0..n)
        .into_par_iter()
        .map(|j| directional_derivative(setup, res, &unit(n, j), opts).map(|d| rate_from_slope(setup, d.value, x0)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(assemble_profile(setup, raw, *res, x0))
}

/// Sequential variant of [`profile_at`].
pub fn profile_at_serial(
    setup: &CavitySetup,
    res: &ResonancePoint,
    x0: f64,
    opts: &DiffOptions,
) -> Result<CouplingProfile> {
    let n = setup.array.len();
    let raw = (0..n)
        .map(|j| directional_derivative(setup, res, &unit(n, j), opts).map(|d| rate_from_slope(setup, d.value, x0)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(assemble_profile(setup, raw, *res, x0))
}

fn assemble_profile(setup: &CavitySetup, mut g: Vec<f64>, resonance: ResonancePoint, x0: f64) -> CouplingProfile {
    if g.first().is_some_and(|g1| *g1 < 0.0) {
        g.iter_mut().for_each(|v| *v = -*v);
    }
    let collective = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mode = if collective > 0.0 { g.iter().map(|v| v / collective).collect() } else { vec![0.0; g.len()] };
    let coupling_matrix = g.iter().map(|a| g.iter().map(|b| a * b).collect()).collect();
    CouplingProfile { analytic: analytic_profile(setup, x0), g, collective, mode, coupling_matrix, resonance }
}

fn analytic_profile(setup: &CavitySetup, x0: f64) -> Option<Vec<f64>> {
    let a = &setup.array;
    let n = a.len();
    let zeta = a.uniform_zeta()?.re();
    let d = a.uniform_spacing()?;
    if n < 2 || zeta == 0.0 {
        return None;
    }
    if ensemble_response(zeta, n, K_REF * d).chi.abs() > 1e-6 {
        return None;
    }
    let gs = coupling_sin_analytic(zeta, n, d, setup.length, bare_g(setup, x0)).exact;
    let norm = sinusoidal_norm(n);
    Some(sinusoidal_mode(n).into_iter().map(|s| gs * s / norm).collect())
}

/// `g sqrt(R/N)` with `R` the maximal collective reflectivity.
pub fn coupling_com_analytic(zeta: f64, n: usize, g: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let kd0 = if n >= 2 { special_spacings(zeta, n).kd0 } else { 0.0 };
    let chi = ensemble_response(zeta, n, kd0).chi;
    let r = chi * chi / (1.0 + chi * chi);
    g * (r / n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinCoupling {
    /// Finite-`N` expression.
    pub exact: f64,
    /// `sqrt(2)/π g ζ² N^{3/2} / (1 + (2/π²)(d/L) ζ² N³)`.
    pub large_n: f64,
}

/// Collective coupling of the sinusoidal mode at a transmissive spacing `d`
/// (wavelength units) in a cavity of free length `length` (same units).
pub fn coupling_sin_analytic(zeta: f64, n: usize, d: f64, length: f64, g: f64) -> SinCoupling {
    let nf = n as f64;
    let large_n = 2f64.sqrt() / PI * g * zeta * zeta * nf.powf(1.5)
        / (1.0 + 2.0 / (PI * PI) * d / length * zeta * zeta * nf.powi(3));
    if n < 2 {
        return SinCoupling { exact: 0.0, large_n };
    }
    let s = (PI / nf).sin();
    let root = (s * s + zeta * zeta).sqrt();
    let exact =
        -sinusoidal_norm(n) * g * zeta / s * (root - zeta) / (1.0 - 2.0 * nf * d / length * zeta / (s * s) * root);
    SinCoupling { exact, large_n }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalCoupling {
    /// `½ g sqrt(L/d) |ζ|`.
    pub g_opt: f64,
    /// `(π² L / (2 d ζ²))^{1/3}`.
    pub n_opt: f64,
    /// Element count maximizing the finite-`N` expression.
    pub n_best: usize,
    pub g_best: f64,
    /// Closed-form optimum below two elements.
    pub below_two: bool,
}

/// Closed-form optimum and integer search over `2..=n_max` of the exact
/// sinusoidal coupling, with spacing `rule` re-evaluated for each `N`.
pub fn coupling_sin_optimal(zeta: f64, length: f64, rule: SpacingRule, g: f64) -> Result<OptimalCoupling> {
    if zeta == 0.0 || !(length > 0.0) {
        return Err(Error::InvalidParameter("optimum needs ζ ≠ 0 and L > 0".into()));
    }
    let mut n_opt = 2.0;
    let mut d = rule.resolve(zeta, 2);
    for _ in 0..4 {
        n_opt = (PI * PI * length / (2.0 * d * zeta * zeta)).cbrt();
        d = rule.resolve(zeta, (n_opt.round() as usize).max(2));
    }
    if !(d > 0.0) {
        return Err(Error::InvalidParameter(format!("spacing {d} must be positive")));
    }
    let g_opt = 0.5 * g * (length / d).sqrt() * zeta.abs();
    let n_max = ((4.0 * n_opt).ceil() as usize).clamp(16, 1_000_000);
    let (n_best, g_best) = (2..=n_max)
        .map(|n| (n, coupling_sin_analytic(zeta, n, rule.resolve(zeta, n), length, g).exact))
        .fold((2, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(OptimalCoupling { g_opt, n_opt, n_best, g_best, below_two: n_opt < 2.0 })
}

/// Quadratic coupling `G_j = ½ (d²ω/dx_j²) x0²`, rad/s, from second central
/// differences at steps `h` and `h/2`.
pub fn quadratic_coupling(setup: &CavitySetup, j: usize, x0: f64, opts: &DiffOptions) -> Result<f64> {
    let n = setup.array.len();
    if j >= n {
        return Err(Error::InvalidParameter(format!("element {j} out of range")));
    }
    let res = working_resonance(setup, &opts.scan)?;
    let dir = unit(n, j);
    let second = |h: f64| -> Result<f64> {
        let up = displaced_resonance(setup, res.dk, &dir, h, &opts.scan)?;
        let down = displaced_resonance(setup, res.dk, &dir, -h, &opts.scan)?;
        Ok((up - 2.0 * res.dk + down) / (h * h))
    };
    let coarse = second(opts.step)?;
    let fine = second(0.5 * opts.step)?;
    if (coarse - fine).abs() > opts.tolerance * coarse.abs().max(fine.abs()) {
        return Err(Error::NotConverged { coarse, fine });
    }
    let curvature = (4.0 * fine - coarse) / 3.0;
    let scale = SPEED_OF_LIGHT / setup.lambda0.powi(3);
    Ok(0.5 * curvature * scale * x0 * x0)
}

/// Observed convergence order of the central difference from steps `h`,
/// `h/2` and `h/4`.
pub fn richardson_order(setup: &CavitySetup, direction: &[f64], h: f64, scan: &ScanOptions) -> Result<f64> {
    let res = working_resonance(setup, scan)?;
    let d1 = central_difference(setup, &res, direction, h, scan)?;
    let d2 = central_difference(setup, &res, direction, 0.5 * h, scan)?;
    let d4 = central_difference(setup, &res, direction, 0.25 * h, scan)?;
    Ok(((d1 - d2) / (d2 - d4)).abs().log2())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CooperativityResult {
    pub n_bar: f64,
    /// Thermal decoherence rate, rad/s.
    pub gamma_dec: f64,
    pub cooperativity: f64,
}

/// `n̄ = k_B T / (ħ ω_m)`, `Γ = n̄ ω_m / Q`, `C = g² / (κ Γ)`.
pub fn cooperativity(g: f64, kappa: f64, mech: &MechanicalParams) -> CooperativityResult {
    let n_bar = BOLTZMANN * mech.temperature / (HBAR * mech.omega_m);
    let gamma_dec = n_bar * mech.omega_m / mech.q;
    CooperativityResult { n_bar, gamma_dec, cooperativity: g * g / (kappa * gamma_dec) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::{Branch, ScattererArray};
    use crate::tmm::Polarizability;
    use approx::assert_relative_eq;

    fn setup(zeta: f64, n: usize, extra: f64, length: f64) -> CavitySetup {
        let d = SpacingRule::DMinus { extra }.resolve(zeta, n);
        let arr = ScattererArray::uniform(Polarizability::real(zeta), n, d).unwrap();
        CavitySetup::tuned(arr, length, 0.0, Mirror::Perfect, 1064e-9, Branch::sinusoidal(n)).unwrap()
    }

    #[test]
    fn single_photon_g_values() {
        let lambda = 1064e-9;
        let omega = 2.0 * PI * SPEED_OF_LIGHT / lambda;
        let g = single_photon_g(omega, 1.8e-15, 0.067);
        assert!((g / (2.0 * PI) - 15.0).abs() < 0.5);
        let g = single_photon_g(omega, 2.7e-15, 0.0025);
        assert!((g / (2.0 * PI) / 610.0 - 1.0).abs() < 0.01);
        assert_eq!(single_photon_g(omega, 0.0, 1.0), 0.0);
    }

    #[test]
    fn two_membrane_formula() {
        assert_eq!(two_membrane_g(1.0, 0.0).unwrap(), 0.0);
        let r = Polarizability::real(-0.5).reflectivity().sqrt();
        assert!((two_membrane_g(1.0, r).unwrap() - 1.144).abs() < 1e-3);
        assert!(two_membrane_g(1.0, 1.0).is_err());
    }

    #[test]
    fn sinusoidal_norm_identity() {
        for n in 2..40 {
            let direct = sinusoidal_mode(n).iter().map(|s| s * s).sum::<f64>().sqrt();
            assert_relative_eq!(direct, sinusoidal_norm(n), max_relative = 1e-12);
        }
    }

    #[test]
    fn com_formula_values() {
        assert_relative_eq!(coupling_com_analytic(-0.5, 1, 1.0), 0.2f64.sqrt(), max_relative = 1e-12);
        assert!((coupling_com_analytic(-0.5, 5, 1.0) - 0.44).abs() < 0.005);
        assert_relative_eq!(coupling_com_analytic(-12.9, 64, 1.0), 1.0 / 8.0, max_relative = 1e-6);
    }

    #[test]
    fn two_element_sin_coupling_is_eq1() {
        let zeta: f64 = -2.0;
        let r = (zeta * zeta / (1.0 + zeta * zeta)).sqrt();
        let s = coupling_sin_analytic(zeta, 2, 0.3, 1e12, 1.0).exact;
        assert_relative_eq!(s, two_membrane_g(1.0, r).unwrap(), max_relative = 1e-9);
    }

    #[test]
    fn large_n_form_in_its_regime() {
        let s = coupling_sin_analytic(-0.5, 40, 0.4, 1e9, 1.0);
        assert!((s.large_n / s.exact - 1.0).abs() < 0.05);
    }

    #[test]
    fn optimum_search_brackets_closed_form() {
        let opt = coupling_sin_optimal(-0.5, 6.3e4, SpacingRule::Explicit(20.3), 1.0).unwrap();
        assert!((opt.n_best as f64 / opt.n_opt - 1.0).abs() < 0.2, "{opt:?}");
        let better = coupling_sin_optimal(-0.5, 6.3e4, SpacingRule::Explicit(5.0), 1.0).unwrap();
        assert_relative_eq!(better.g_opt / opt.g_opt, (20.3f64 / 5.0).sqrt(), max_relative = 1e-12);
        let flagged = coupling_sin_optimal(-12.9, 10.0, SpacingRule::Explicit(0.5), 1.0).unwrap();
        assert!(flagged.below_two);
    }

    #[test]
    fn headline_profile() {
        let s = setup(-12.9, 5, 0.0, 0.0025 / 1064e-9);
        let mech = MechanicalParams::new(2.7e-15, 2.0 * PI * 211e3, 1e6, 1.0).unwrap();
        let p = coupling_profile(&s, &mech, &DiffOptions::linear()).unwrap();
        let analytic = p.analytic.clone().unwrap();
        for (a, b) in p.g.iter().zip(&analytic) {
            assert!((a - b).abs() <= 5e-3 * analytic[1].abs(), "{a} {b}");
        }
        assert!(p.g[2].abs() < 1e-6 * p.g[1].abs());
        assert_relative_eq!(p.g[0], -p.g[4], max_relative = 1e-6);
        let total: f64 = p.mode.iter().map(|m| m * m).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((p.collective / (2.0 * PI) / 270e3 - 1.0).abs() < 0.01);
        assert_relative_eq!(p.coupling_matrix[0][1], p.g[0] * p.g[1]);
    }

    #[test]
    fn transparent_elements_do_not_couple() {
        let arr = ScattererArray::uniform(Polarizability::real(0.0), 3, 0.37).unwrap();
        let s = CavitySetup::new(500.0, Mirror::Perfect, arr, 0.0, 1e-6).unwrap();
        let p = profile_at_serial(
            &s,
            &working_resonance(&s, &ScanOptions::default()).unwrap(),
            1e-15,
            &DiffOptions::linear(),
        )
        .unwrap();
        assert!(p.g.iter().all(|g| g.abs() < 1e-6 * bare_g(&s, 1e-15)));
    }

    #[test]
    fn cooperativity_headline() {
        let mech = MechanicalParams::new(2.7e-15, 2.0 * PI * 211e3, 1e6, 1.0).unwrap();
        let c = cooperativity(2.0 * PI * 270e3, 2.0 * PI * 250e3, &mech);
        assert!((c.n_bar / 1e5 - 1.0).abs() < 0.1);
        assert!((c.cooperativity - 14.0).abs() < 1.5);
        assert_eq!(cooperativity(0.0, 1.0, &mech).cooperativity, 0.0);
        assert!(MechanicalParams::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn central_difference_is_second_order() {
        let s = setup(-0.5, 5, 0.0, 2000.0);
        let order = richardson_order(&s, &unit(5, 0), 2e-3, &ScanOptions::default()).unwrap();
        assert!((1.8..=2.2).contains(&order), "{order}");
    }
}
