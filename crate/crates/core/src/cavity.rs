//! Scatterer arrays inside a Fabry-Perot cavity: transmission, resonances of
//! the perfect-mirror cavity, linewidths and the effective cavity length.
//!
//! Geometry: the two mirrors sit `length + span` apart, where `span` is the
//! nominal extent of the array (first to last element). `length` is therefore
//! the total free propagation outside the array, split into `length/2 + offset`
//! on the left and `length/2 - offset` on the right of the array.
//!
//! Wavenumbers are handled as `k = 2π + dk`. Every segment phase is evaluated
//! as `(2π·ℓ mod 2π) + dk·ℓ + k·δ`, with `ℓ` the nominal segment length and `δ`
//! the change due to element displacements, so that resonance shifts caused by
//! displacements of 1e-7 wavelengths are resolved far above rounding noise.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::{K_REF, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::roots::{nearest_root, sampled_minimize, scan_roots};
use crate::tmm::{
    power_coefficients, propagation_matrix, scatterer_matrix, Polarizability, PowerCoefficients, TransferMatrix,
};

/// End mirrors; both mirrors are identical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mirror {
    Perfect,
    /// Real mirror polarizability `Z`.
    Partial(f64),
}

impl Mirror {
    pub fn from_finesse(finesse: f64) -> Result<Self> {
        Ok(Mirror::Partial(mirror_polarizability_from_finesse(finesse)?))
    }
}

/// Mirror polarizability (negative) giving the requested bare-cavity finesse
/// `F = π sqrt(R) / (1 - R)` with `R = Z² / (1 + Z²)`.
pub fn mirror_polarizability_from_finesse(finesse: f64) -> Result<f64> {
    if !(finesse > 1.0) || !finesse.is_finite() {
        return Err(Error::InvalidParameter(format!("finesse {finesse} must exceed 1")));
    }
    // F s² + π s - F = 0 with s = sqrt(R); Z² = R / (1 - R) = s F / π.
    let s = 2.0 * finesse / (PI + (PI * PI + 4.0 * finesse * finesse).sqrt());
    Ok(-(s * finesse / PI).sqrt())
}

/// Bare-cavity finesse for mirror polarizability `z`.
pub fn finesse_from_mirror(z: f64) -> f64 {
    let r = z * z / (1.0 + z * z);
    PI * r.sqrt() * (1.0 + z * z)
}

/// Sign choice in the perfect-mirror resonance condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    /// Branch hosting the resonance that couples to the sinusoidal mode of a
    /// centred array at a transmissive spacing: `+` for odd `n`, `-` for even.
    pub fn sinusoidal(n: usize) -> Self {
        if n.is_multiple_of(2) && n > 0 {
            Branch::Minus
        } else {
            Branch::Plus
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

/// Right-hand side of `e^{ikL} = e^{-iμ}/(1+iχ) [iχ cos 2kx ± sqrt(1 + χ² sin² 2kx)]`.
pub fn resonance_rhs(k: f64, chi: f64, mu: f64, x: f64, branch: Branch) -> Complex64 {
    let i = Complex64::i();
    let (s, c) = (2.0 * k * x).sin_cos();
    let root = (1.0 + chi * chi * s * s).sqrt();
    Complex64::from_polar(1.0, -mu) / (1.0 + i * chi) * (i * chi * c + branch.sign() * root)
}

/// `e^{ikL}` minus the right-hand side of the resonance condition.
pub fn resonance_residual(k: f64, chi: f64, mu: f64, length: f64, x: f64, branch: Branch) -> Complex64 {
    Complex64::from_polar(1.0, k * length) - resonance_rhs(k, chi, mu, x, branch)
}

/// A lossless matrix written as `M_p(μ/2 + ψ/2) · M_m(χ) · M_p(μ/2 - ψ/2)`.
///
/// `ψ` is a shift of the element's optical centre; it vanishes for symmetric
/// stacks. The sign of `χ` is chosen so that `|ψ| ≤ π/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveElement {
    pub chi: f64,
    pub mu: f64,
    pub psi: f64,
}

pub fn effective_element(m: &TransferMatrix) -> EffectiveElement {
    let b = m.m12 / Complex64::i();
    let chi = if b.re >= 0.0 { b.norm() } else { -b.norm() };
    let psi = if chi == 0.0 { 0.0 } else { (b / chi).arg() };
    let mu = (m.m11 / Complex64::new(1.0, chi)).arg();
    EffectiveElement { chi, mu, psi }
}

/// Ordered scatterers. Nominal positions are stored relative to the array
/// centre; displacements are kept separately.
#[derive(Debug, Clone, PartialEq)]
pub struct ScattererArray {
    zetas: Vec<Polarizability>,
    positions: Vec<f64>,
    displacements: Vec<f64>,
}

impl ScattererArray {
    pub fn empty() -> Self {
        Self { zetas: Vec::new(), positions: Vec::new(), displacements: Vec::new() }
    }

    pub fn new(zetas: Vec<Polarizability>, positions: Vec<f64>) -> Result<Self> {
        if zetas.len() != positions.len() {
            return Err(Error::InvalidParameter(format!(
                "{} polarizabilities for {} positions",
                zetas.len(),
                positions.len()
            )));
        }
        check_increasing(&positions)?;
        let centre = match (positions.first(), positions.last()) {
            (Some(a), Some(b)) => 0.5 * (a + b),
            _ => 0.0,
        };
        let n = positions.len();
        Ok(Self { zetas, positions: positions.into_iter().map(|p| p - centre).collect(), displacements: vec![0.0; n] })
    }

    /// `n` identical elements with spacing `spacing` (wavelength units).
    pub fn uniform(zeta: Polarizability, n: usize, spacing: f64) -> Result<Self> {
        if n > 1 && !(spacing > 0.0) {
            return Err(Error::InvalidParameter(format!("spacing {spacing} must be positive")));
        }
        Self::new(vec![zeta; n], (0..n).map(|j| j as f64 * spacing).collect())
    }

    pub fn len(&self) -> usize {
        self.zetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zetas.is_empty()
    }

    pub fn zetas(&self) -> &[Polarizability] {
        &self.zetas
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn displacements(&self) -> &[f64] {
        &self.displacements
    }

    /// Nominal extent, first to last element.
    pub fn span(&self) -> f64 {
        match (self.positions.first(), self.positions.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Common spacing, if the nominal positions are equidistant.
    pub fn uniform_spacing(&self) -> Option<f64> {
        if self.len() < 2 {
            return None;
        }
        let d = self.positions[1] - self.positions[0];
        let ok = self.positions.windows(2).all(|w| ((w[1] - w[0]) - d).abs() <= 1e-12 * d.abs().max(1.0));
        ok.then_some(d)
    }

    /// Common polarizability, if all elements are identical.
    pub fn uniform_zeta(&self) -> Option<Polarizability> {
        let first = *self.zetas.first()?;
        self.zetas.iter().all(|z| *z == first).then_some(first)
    }

    pub fn is_lossless(&self) -> bool {
        self.zetas.iter().all(|z| z.is_lossless())
    }

    pub fn is_displaced(&self) -> bool {
        self.displacements.iter().any(|d| *d != 0.0)
    }

    /// Same geometry with absorption removed.
    pub fn lossless(&self) -> Self {
        Self { zetas: self.zetas.iter().map(|z| z.lossless_part()).collect(), ..self.clone() }
    }

    pub fn with_zetas(&self, zetas: Vec<Polarizability>) -> Result<Self> {
        if zetas.len() != self.len() {
            return Err(Error::InvalidParameter("polarizability count mismatch".into()));
        }
        Ok(Self { zetas, ..self.clone() })
    }

    /// Replace all displacements.
    pub fn with_displacements(&self, displacements: &[f64]) -> Result<Self> {
        if displacements.len() != self.len() {
            return Err(Error::InvalidParameter("displacement count mismatch".into()));
        }
        let actual: Vec<f64> = self.positions.iter().zip(displacements).map(|(p, d)| p + d).collect();
        check_increasing(&actual)?;
        Ok(Self { displacements: displacements.to_vec(), ..self.clone() })
    }

    /// Add `dx` to the displacement of element `j`.
    pub fn with_displacement(&self, j: usize, dx: f64) -> Result<Self> {
        if j >= self.len() {
            return Err(Error::InvalidParameter(format!("element {j} out of range")));
        }
        let mut d = self.displacements.clone();
        d[j] += dx;
        self.with_displacements(&d)
    }

    /// Actual positions relative to the nominal array centre.
    pub fn element_positions(&self) -> Vec<f64> {
        self.positions.iter().zip(&self.displacements).map(|(p, d)| p + d).collect()
    }

    /// Matrix of the array between its nominal outer edges, at wavenumber `k`.
    pub fn matrix(&self, k: f64) -> TransferMatrix {
        if self.is_empty() {
            return TransferMatrix::IDENTITY;
        }
        let n = self.len();
        let mut m = propagation_matrix(k * self.displacements[0]);
        for j in 0..n {
            if j > 0 {
                let gap =
                    (self.positions[j] - self.positions[j - 1]) + (self.displacements[j] - self.displacements[j - 1]);
                m = m * propagation_matrix(k * gap);
            }
            m = m * scatterer_matrix(self.zetas[j]);
        }
        m * propagation_matrix(-k * self.displacements[n - 1])
    }
}

fn check_increasing(p: &[f64]) -> Result<()> {
    for (i, w) in p.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonMonotonePositions { index: i + 1 });
        }
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite position".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CavitySetup {
    /// Free propagation length outside the array, wavelength units.
    pub length: f64,
    pub mirror: Mirror,
    pub array: ScattererArray,
    /// Offset of the array centre from the cavity centre, wavelength units.
    pub offset: f64,
    /// Reference wavelength in metres.
    pub lambda0: f64,
}

/// Nominal length and displacement change of one free-space segment.
#[derive(Debug, Clone, Copy)]
struct Segment {
    base_phase: f64,
    length: f64,
    delta: f64,
}

impl CavitySetup {
    pub fn new(length: f64, mirror: Mirror, array: ScattererArray, offset: f64, lambda0: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidParameter(format!("cavity length {length} must be positive")));
        }
        if !(lambda0 > 0.0) {
            return Err(Error::InvalidParameter(format!("wavelength {lambda0} must be positive")));
        }
        if offset.abs() >= 0.5 * length {
            return Err(Error::InvalidParameter(format!("array offset {offset} leaves the cavity")));
        }
        if array.span() >= length {
            return Err(Error::InvalidParameter(format!(
                "array span {} does not fit a cavity of length {length}",
                array.span()
            )));
        }
        if let Mirror::Partial(z) = mirror {
            if !z.is_finite() {
                return Err(Error::InvalidParameter("mirror polarizability must be finite".into()));
            }
        }
        Ok(Self { length, mirror, array, offset, lambda0 })
    }

    /// Choose the free length closest to `nominal_length` for which the
    /// reference wavenumber solves the perfect-mirror resonance condition on
    /// `branch`. Absorption is ignored for the tuning.
    pub fn tuned(
        array: ScattererArray,
        nominal_length: f64,
        offset: f64,
        mirror: Mirror,
        lambda0: f64,
        branch: Branch,
    ) -> Result<Self> {
        let eff = effective_element(&array.lossless().matrix(K_REF));
        let x_eff = offset + eff.psi / (2.0 * K_REF);
        let phase = resonance_rhs(K_REF, eff.chi, eff.mu, x_eff, branch).arg();
        let m = ((K_REF * nominal_length - phase) / TAU).round();
        let length = (phase + TAU * m) / K_REF;
        Self::new(length, mirror, array, offset, lambda0)
    }

    pub fn with_array(&self, array: ScattererArray) -> Result<Self> {
        Self::new(self.length, self.mirror, array, self.offset, self.lambda0)
    }

    pub fn with_mirror(&self, mirror: Mirror) -> Self {
        Self { mirror, ..self.clone() }
    }

    /// Mirror-to-mirror distance.
    pub fn total_length(&self) -> f64 {
        self.length + self.array.span()
    }

    /// Bare free spectral range in wavenumber.
    pub fn fsr_k(&self) -> f64 {
        PI / self.total_length()
    }

    /// Angular frequency (rad/s) of wavenumber `k`.
    pub fn omega(&self, k: f64) -> f64 {
        SPEED_OF_LIGHT * k / self.lambda0
    }

    /// Converts a wavenumber interval to angular frequency.
    pub fn k_to_omega(&self, dk: f64) -> f64 {
        SPEED_OF_LIGHT * dk / self.lambda0
    }

    fn segments(&self) -> Vec<Segment> {
        let seg = |length: f64, delta: f64| Segment { base_phase: (K_REF * length).rem_euclid(TAU), length, delta };
        let a = &self.array;
        if a.is_empty() {
            return vec![seg(self.length, 0.0)];
        }
        let n = a.len();
        let half = 0.5 * self.length;
        let mut out = Vec::with_capacity(n + 1);
        out.push(seg(half + self.offset, a.displacements[0]));
        for j in 1..n {
            out.push(seg(a.positions[j] - a.positions[j - 1], a.displacements[j] - a.displacements[j - 1]));
        }
        out.push(seg(half - self.offset, -a.displacements[n - 1]));
        out
    }

    fn inner_from(&self, segments: &[Segment], dk: f64) -> TransferMatrix {
        let k = K_REF + dk;
        let prop = |s: &Segment| propagation_matrix(s.base_phase + dk * s.length + k * s.delta);
        let mut m = prop(&segments[0]);
        for (zeta, s) in self.array.zetas.iter().zip(&segments[1..]) {
            m = m * scatterer_matrix(*zeta) * prop(s);
        }
        m
    }

    /// Matrix between the mirrors at `k = 2π + dk`.
    pub fn inner_matrix(&self, dk: f64) -> TransferMatrix {
        self.inner_from(&self.segments(), dk)
    }

    /// Full matrix including the end mirrors.
    pub fn cavity_matrix(&self, dk: f64) -> Result<TransferMatrix> {
        match self.mirror {
            Mirror::Perfect => Err(Error::PerfectMirrors),
            Mirror::Partial(z) => {
                let mm = scatterer_matrix(Polarizability::real(z));
                Ok(mm * self.inner_matrix(dk) * mm)
            }
        }
    }

    /// Real phase mismatch of the perfect-mirror cavity, `Im(p11 - p12)`; it
    /// vanishes exactly at the resonances of both branches.
    fn mismatch_fn(&self) -> impl Fn(f64) -> f64 + '_ {
        let segs = self.segments();
        move |dk| {
            let p = self.inner_from(&segs, dk);
            (p.m11 - p.m12).im
        }
    }

    /// `|m22|²` of the full cavity, the inverse of the transmitted power.
    fn inverse_transmission_fn(&self) -> Result<impl Fn(f64) -> f64 + '_> {
        let z = match self.mirror {
            Mirror::Partial(z) => z,
            Mirror::Perfect => return Err(Error::PerfectMirrors),
        };
        let mm = scatterer_matrix(Polarizability::real(z));
        let segs = self.segments();
        Ok(move |dk| (mm * self.inner_from(&segs, dk) * mm).m22.norm_sqr())
    }

    /// Perfect-mirror resonance condition evaluated through the array's
    /// effective element; returns `(residual, branch)` for the better branch.
    pub fn branch_residual(&self, dk: f64) -> (f64, Branch) {
        let k = K_REF + dk;
        let eff = effective_element(&self.array.lossless().matrix(k));
        let x_eff = self.offset + eff.psi / (2.0 * k);
        // e^{ikL} from the same split phases as the matrices use
        let phase = (K_REF * self.length).rem_euclid(TAU) + dk * self.length;
        let lhs = Complex64::from_polar(1.0, phase);
        let res = |b| (lhs - resonance_rhs(k, eff.chi, eff.mu, x_eff, b)).norm();
        let (p, m) = (res(Branch::Plus), res(Branch::Minus));
        if p <= m {
            (p, Branch::Plus)
        } else {
            (m, Branch::Minus)
        }
    }
}

/// Power coefficients of the full cavity at absolute wavenumber `k`.
pub fn cavity_transmission(setup: &CavitySetup, k: f64) -> Result<PowerCoefficients> {
    transmission_at(setup, k - K_REF)
}

/// Power coefficients at `k = 2π + dk`.
pub fn transmission_at(setup: &CavitySetup, dk: f64) -> Result<PowerCoefficients> {
    power_coefficients(&setup.cavity_matrix(dk)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePoint {
    /// Absolute wavenumber, radians per wavelength unit.
    pub k: f64,
    /// `k - 2π`, kept separately at full precision.
    pub dk: f64,
    /// Branch of the perfect-mirror condition the resonance belongs to.
    pub branch: Branch,
    /// Perfect mirrors: `|e^{ikL} - rhs|` at the root. Partial mirrors: width
    /// of the final peak bracket times the cavity length.
    pub residual: f64,
    /// Angular frequency, rad/s.
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Sampling density of the bracketing scan per bare free spectral range.
    pub samples_per_fsr: usize,
    /// Root tolerance on `|Δk|·L`.
    pub tolerance: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { samples_per_fsr: 4096, tolerance: 1e-13 }
    }
}

fn perfect_point(setup: &CavitySetup, dk: f64) -> ResonancePoint {
    let (residual, branch) = setup.branch_residual(dk);
    ResonancePoint { k: K_REF + dk, dk, branch, residual, omega: setup.omega(K_REF + dk) }
}

/// Perfect-mirror roots (of the lossless counterpart) in `[lo, hi]` of `dk`.
fn perfect_roots(setup: &CavitySetup, lo: f64, hi: f64, opts: &ScanOptions) -> Vec<f64> {
    let lossless = CavitySetup { array: setup.array.lossless(), ..setup.clone() };
    let f = lossless.mismatch_fn();
    let samples = (((hi - lo) / setup.fsr_k()) * opts.samples_per_fsr as f64).ceil().max(1.0) as usize;
    let xtol = opts.tolerance / setup.total_length();
    scan_roots(f, lo, hi, samples, xtol)
}

/// Half-width of the window searched for a transmission peak around the
/// corresponding perfect-mirror root.
fn peak_window(setup: &CavitySetup, z: f64) -> f64 {
    (3.0 / (z.abs() * setup.total_length())).min(0.25 * setup.fsr_k())
}

/// Transmission maximum near the perfect-mirror root `seed`.
fn refine_peak(setup: &CavitySetup, seed: f64) -> Result<ResonancePoint> {
    let z = match setup.mirror {
        Mirror::Partial(z) => z,
        Mirror::Perfect => return Err(Error::PerfectMirrors),
    };
    let w = peak_window(setup, z);
    let inv_t = setup.inverse_transmission_fn()?;
    let dk = sampled_minimize(&inv_t, seed - w, seed + w, 64);
    let branch = setup.branch_residual(seed).1;
    let residual = f64::EPSILON * dk.abs().max(w) * setup.total_length();
    Ok(ResonancePoint { k: K_REF + dk, dk, branch, residual, omega: setup.omega(K_REF + dk) })
}

/// All resonances with wavenumber in `window` (absolute), sorted by `k`.
///
/// Perfect mirrors solve the resonance condition directly; partial mirrors
/// locate the transmission peak next to each perfect-mirror root. An empty
/// list means no resonance was bracketed.
pub fn find_resonances(setup: &CavitySetup, window: (f64, f64)) -> Result<Vec<ResonancePoint>> {
    find_resonances_with(setup, window, &ScanOptions::default())
}

pub fn find_resonances_with(
    setup: &CavitySetup,
    window: (f64, f64),
    opts: &ScanOptions,
) -> Result<Vec<ResonancePoint>> {
    let (lo, hi) = (window.0 - K_REF, window.1 - K_REF);
    if !(hi > lo) {
        return Err(Error::InvalidParameter("empty wavenumber window".into()));
    }
    if setup.mirror == Mirror::Perfect && !setup.array.is_lossless() {
        return Err(Error::LossyPerfectCavity);
    }
    let mut roots = perfect_roots(setup, lo, hi, opts);
    roots.dedup_by(|a, b| (*a - *b).abs() * setup.total_length() < 1e-9);
    let mut points = roots
        .into_iter()
        .map(|dk| match setup.mirror {
            Mirror::Perfect => Ok(perfect_point(setup, dk)),
            Mirror::Partial(_) => refine_peak(setup, dk),
        })
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|a, b| a.dk.total_cmp(&b.dk));
    Ok(points)
}

/// Resonance closest to `2π + dk_target`, searched within half a bare free
/// spectral range.
pub fn nearest_resonance(setup: &CavitySetup, dk_target: f64, opts: &ScanOptions) -> Result<ResonancePoint> {
    if setup.mirror == Mirror::Perfect && !setup.array.is_lossless() {
        return Err(Error::LossyPerfectCavity);
    }
    let half = 0.5 * setup.fsr_k();
    let roots = perfect_roots(setup, dk_target - half, dk_target + half, opts);
    let best = roots
        .into_iter()
        .min_by(|a, b| (a - dk_target).abs().total_cmp(&(b - dk_target).abs()))
        .ok_or(Error::NoResonance(K_REF + dk_target))?;
    match setup.mirror {
        Mirror::Perfect => Ok(perfect_point(setup, best)),
        Mirror::Partial(_) => refine_peak(setup, best),
    }
}

/// Follow a resonance continuously after a small change of the setup: the
/// perfect-mirror root closest to `seed_dk` (grown bracket), refined to the
/// transmission peak for partial mirrors.
pub fn track_resonance(setup: &CavitySetup, seed_dk: f64, opts: &ScanOptions) -> Option<ResonancePoint> {
    if setup.mirror == Mirror::Perfect && !setup.array.is_lossless() {
        return None;
    }
    let lossless = CavitySetup { array: setup.array.lossless(), ..setup.clone() };
    let fsr = setup.fsr_k();
    let xtol = opts.tolerance / setup.total_length();
    let mut seed = seed_dk;
    if let Mirror::Partial(z) = setup.mirror {
        // a transmission peak sits within the peak window of its perfect root
        let w = peak_window(setup, z);
        let f = lossless.mismatch_fn();
        seed = nearest_root(&f, seed_dk, 1e-3 * w, 1.5 * w, xtol)?;
        return refine_peak(setup, seed).ok();
    }
    let f = lossless.mismatch_fn();
    let root = nearest_root(f, seed, 1e-9 * fsr, 0.5 * fsr, xtol)?;
    Some(perfect_point(setup, root))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinewidthResult {
    /// Half width at half maximum, rad/s.
    pub kappa: f64,
    /// Full width at half maximum in wavenumber.
    pub fwhm_k: f64,
    /// Bare free spectral range divided by the full width.
    pub finesse: f64,
    /// HWHM from a least-squares Lorentzian fit, rad/s.
    pub kappa_fit: f64,
    /// RMS deviation of the fitted Lorentzian, relative to the peak.
    pub fit_quality: f64,
    pub peak_transmission: f64,
    /// False when another resonance lies within 20 linewidths.
    pub isolated: bool,
}

/// Linewidth of a transmission peak of a cavity with partial mirrors.
///
/// The half-maximum crossings on either side are bracketed and bisected; the
/// Lorentzian fit is reported alongside as a cross-check. κ is the half width
/// at half maximum.
pub fn linewidth(setup: &CavitySetup, res: &ResonancePoint) -> Result<LinewidthResult> {
    let inv_t = setup.inverse_transmission_fn()?;
    let t = |dk: f64| 1.0 / inv_t(dk);
    let q0 = res.dk;
    let peak = t(q0);
    let half = 0.5 * peak;
    let fsr = setup.fsr_k();

    let crossing = |dir: f64| -> Result<f64> {
        let mut step = 1e-3 * fsr / finesse_from_mirror(mirror_z(setup)?).max(1.0);
        let mut inner = q0;
        loop {
            let outer = q0 + dir * step;
            if t(outer) < half {
                let g = |x: f64| t(x) - half;
                return crate::roots::bisect(g, inner.min(outer), inner.max(outer), 0.0)
                    .ok_or(Error::NoResonance(res.k));
            }
            if step > 0.5 * fsr {
                return Err(Error::NoResonance(res.k));
            }
            inner = outer;
            step *= 2.0;
        }
    };
    let right = crossing(1.0)?;
    let left = crossing(-1.0)?;
    let fwhm = right - left;
    let hwhm = 0.5 * fwhm;

    let (fit_hwhm, fit_quality) = lorentzian_fit(&t, 0.5 * (left + right), hwhm);

    // look for another local maximum between 3 and 20 full widths away
    let mut isolated = true;
    for dir in [-1.0, 1.0] {
        let samples: Vec<f64> = (0..=400).map(|i| t(q0 + dir * fwhm * (3.0 + 17.0 * i as f64 / 400.0))).collect();
        if samples.windows(3).any(|w| w[1] > w[0] && w[1] > w[2] && w[1] > 1e-2 * peak) {
            isolated = false;
        }
    }

    Ok(LinewidthResult {
        kappa: setup.k_to_omega(hwhm),
        fwhm_k: fwhm,
        finesse: fsr / fwhm,
        kappa_fit: setup.k_to_omega(fit_hwhm),
        fit_quality,
        peak_transmission: peak,
        isolated,
    })
}

fn mirror_z(setup: &CavitySetup) -> Result<f64> {
    match setup.mirror {
        Mirror::Partial(z) => Ok(z),
        Mirror::Perfect => Err(Error::PerfectMirrors),
    }
}

/// Weighted least squares of `1/T = c0 + c1 u + c2 u²` over ±2 half widths,
/// weights `T²` so the residuals approximate those of `T` itself. Returns the
/// fitted half width and the relative RMS misfit.
fn lorentzian_fit(t: &impl Fn(f64) -> f64, centre: f64, hwhm: f64) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = (0..=40)
        .map(|i| {
            let u = -2.0 + 4.0 * i as f64 / 40.0;
            (u, t(centre + u * hwhm))
        })
        .collect();
    let mut a = [[0.0_f64; 3]; 3];
    let mut rhs = [0.0_f64; 3];
    for &(u, ti) in &pts {
        let w = ti * ti;
        let basis = [1.0, u, u * u];
        for r in 0..3 {
            rhs[r] += w * basis[r] / ti;
            for c in 0..3 {
                a[r][c] += w * basis[r] * basis[c];
            }
        }
    }
    let c = solve3(a, rhs);
    let inv_peak = c[0] - c[1] * c[1] / (4.0 * c[2]);
    let width_u = (inv_peak / c[2]).sqrt();
    let peak = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    let rms = (pts.iter().map(|&(u, ti)| (1.0 / (c[0] + c[1] * u + c[2] * u * u) - ti).powi(2)).sum::<f64>()
        / pts.len() as f64)
        .sqrt();
    (width_u * hwhm, rms / peak)
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    let mut x = [0.0; 3];
    for (col, xi) in x.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        *xi = det(m) / d;
    }
    x
}

/// Cavity transmission on a grid of wavenumber offsets `dk` (inner index) for
/// each displacement amplitude along `direction` (outer index). Amplitudes are
/// evaluated in parallel and returned in input order.
pub fn transmission_map(
    setup: &CavitySetup,
    dk_grid: &[f64],
    direction: &[f64],
    amplitudes: &[f64],
) -> Result<Vec<Vec<f64>>> {
    if direction.len() != setup.array.len() {
        return Err(Error::InvalidParameter("direction length must match the element count".into()));
    }
    amplitudes
        .par_iter()
        .map(|&a| {
            let disp: Vec<f64> = setup.array.displacements().iter().zip(direction).map(|(d, v)| d + a * v).collect();
            let moved = setup.with_array(setup.array.with_displacements(&disp)?)?;
            dk_grid.iter().map(|&dk| Ok(transmission_at(&moved, dk)?.transmissivity)).collect()
        })
        .collect()
}

/// Large-`N` effective length `L + (2/π²) d ζ² N³`.
pub fn effective_length(zeta: f64, n: usize, spacing: f64, length: f64) -> f64 {
    length + 2.0 / (PI * PI) * spacing * zeta * zeta * (n as f64).powi(3)
}

/// Finite-`N` effective length at a transmissive spacing,
/// `L - 2 N d ζ csc²(π/N) sqrt(sin²(π/N) + ζ²)`; equal to `L` for `N < 2`.
pub fn effective_length_exact(zeta: f64, n: usize, spacing: f64, length: f64) -> f64 {
    if n < 2 {
        return length;
    }
    let s = (PI / n as f64).sin();
    length - 2.0 * n as f64 * spacing * zeta / (s * s) * (s * s + zeta * zeta).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superscatterer::special_spacings;
    use approx::assert_relative_eq;

    fn uniform_setup(zeta: f64, n: usize, extra: f64, nominal: f64, mirror: Mirror) -> CavitySetup {
        let d = special_spacings(zeta, n).d_minus() + extra;
        let arr = ScattererArray::uniform(Polarizability::real(zeta), n, d).unwrap();
        CavitySetup::tuned(arr, nominal, 0.0, mirror, 1064e-9, Branch::sinusoidal(n)).unwrap()
    }

    #[test]
    fn finesse_round_trip() {
        for &f in &[2.0, 100.0, 3e4, 1.2e5] {
            let z = mirror_polarizability_from_finesse(f).unwrap();
            assert!(z < 0.0);
            assert_relative_eq!(finesse_from_mirror(z), f, max_relative = 1e-12);
        }
        let z = mirror_polarizability_from_finesse(1.2e5).unwrap();
        let r = z * z / (1.0 + z * z);
        assert_relative_eq!(1.0 - r, PI / 1.2e5, max_relative = 1e-4);
        assert!(mirror_polarizability_from_finesse(1.0).is_err());
        assert!(mirror_polarizability_from_finesse(1e12).unwrap().abs() > 5e5);
    }

    #[test]
    fn residual_zero_for_bare_cavity_resonances() {
        for m in 1..5 {
            let k = m as f64 * PI / 10.0;
            let plus = resonance_residual(k, 0.0, 0.0, 10.0, 0.3, Branch::Plus).norm();
            let minus = resonance_residual(k, 0.0, 0.0, 10.0, 0.3, Branch::Minus).norm();
            assert!(plus.min(minus) < 1e-14);
        }
        assert!(resonance_residual(0.05, 0.0, 0.0, 10.0, 0.0, Branch::Plus).norm() > 0.1);
    }

    #[test]
    fn solve_for_length_round_trips() {
        let zeta = -0.5;
        let d = special_spacings(zeta, 5).d0();
        let arr = ScattererArray::uniform(Polarizability::real(zeta), 5, d).unwrap();
        for branch in [Branch::Plus, Branch::Minus] {
            let s = CavitySetup::tuned(arr.clone(), 1000.3, 0.11, Mirror::Perfect, 1e-6, branch).unwrap();
            assert!((s.length - 1000.3).abs() <= 0.5);
            let r = nearest_resonance(&s, 0.0, &ScanOptions::default()).unwrap();
            assert!(r.dk.abs() * s.length < 1e-10, "{}", r.dk);
            assert_eq!(r.branch, branch);
            assert!(r.residual < 1e-10);
        }
    }

    #[test]
    fn bare_perfect_cavity_resonances() {
        let s = CavitySetup::new(100.0, Mirror::Perfect, ScattererArray::empty(), 0.0, 1e-6).unwrap();
        let res = find_resonances(&s, (2.0 * PI - 0.05, 2.0 * PI + 0.05)).unwrap();
        assert!(!res.is_empty());
        for r in &res {
            let m = r.k * 100.0 / PI;
            assert!((m - m.round()).abs() * PI < 1e-12);
            assert!(r.residual < 1e-10);
        }
        // consecutive roots alternate between the two branches
        for w in res.windows(2) {
            assert_ne!(w[0].branch, w[1].branch);
        }
    }

    #[test]
    fn no_root_in_tiny_window() {
        let s = CavitySetup::new(100.0, Mirror::Perfect, ScattererArray::empty(), 0.0, 1e-6).unwrap();
        let k = 2.0 * PI + 0.5 * PI / 100.0;
        assert!(find_resonances(&s, (k - 1e-4, k + 1e-4)).unwrap().is_empty());
    }

    #[test]
    fn bare_cavity_is_an_airy_function() {
        let z = mirror_polarizability_from_finesse(50.0).unwrap();
        let s = CavitySetup::new(40.0, Mirror::Partial(z), ScattererArray::empty(), 0.0, 1e-6).unwrap();
        let r_m = z * z / (1.0 + z * z);
        let coeff = 4.0 * r_m / (1.0 - r_m).powi(2);
        for i in 0..200 {
            let dk = -0.1 + 0.2 * i as f64 / 199.0;
            let t = transmission_at(&s, dk).unwrap().transmissivity;
            // round-trip phase includes the mirror reflection phases
            let (_, t_single) = crate::tmm::amplitudes(&scatterer_matrix(Polarizability::real(z))).unwrap();
            let r_phase = (Complex64::i() * z * t_single).arg();
            let delta = 2.0 * (2.0 * PI + dk) * 40.0 + 2.0 * r_phase;
            let airy = 1.0 / (1.0 + coeff * (0.5 * delta).sin().powi(2));
            assert!((t - airy).abs() < 1e-9, "{t} {airy}");
        }
    }

    #[test]
    fn lossless_symmetric_cavity_transmits_fully() {
        let s = uniform_setup(-0.5, 5, 0.0, 300.0, Mirror::from_finesse(200.0).unwrap());
        let r = nearest_resonance(&s, 0.0, &ScanOptions::default()).unwrap();
        let p = transmission_at(&s, r.dk).unwrap();
        assert!((p.transmissivity - 1.0).abs() < 1e-6);
        assert!(p.absorption.abs() < 1e-12);
    }

    #[test]
    fn resonance_sits_at_transmission_maximum() {
        let s = uniform_setup(-0.5, 4, 0.0, 300.0, Mirror::from_finesse(500.0).unwrap());
        let r = nearest_resonance(&s, 0.0, &ScanOptions::default()).unwrap();
        let t0 = transmission_at(&s, r.dk).unwrap().transmissivity;
        let eps = 1e-3 * s.fsr_k() / 500.0;
        assert!(t0 >= transmission_at(&s, r.dk + eps).unwrap().transmissivity);
        assert!(t0 >= transmission_at(&s, r.dk - eps).unwrap().transmissivity);
    }

    #[test]
    fn bare_linewidth_matches_finesse() {
        let z = mirror_polarizability_from_finesse(3e4).unwrap();
        let s = CavitySetup::new(63_000.0, Mirror::Partial(z), ScattererArray::empty(), 0.0, 1064e-9).unwrap();
        let r = nearest_resonance(&s, 0.0, &ScanOptions::default()).unwrap();
        let lw = linewidth(&s, &r).unwrap();
        assert!((lw.finesse / 3e4 - 1.0).abs() < 0.01);
        assert!((lw.kappa_fit / lw.kappa - 1.0).abs() < 0.01);
        assert!(lw.isolated);
        let fsr_omega = s.k_to_omega(s.fsr_k());
        assert_relative_eq!(2.0 * lw.kappa, fsr_omega / 3e4, max_relative = 0.01);
    }

    #[test]
    fn hwhm_convention_reproduces_250_khz() {
        let lambda = 1064e-9;
        let z = mirror_polarizability_from_finesse(1.2e5).unwrap();
        let s = CavitySetup::new(0.0025 / lambda, Mirror::Partial(z), ScattererArray::empty(), 0.0, lambda).unwrap();
        let r = nearest_resonance(&s, 0.0, &ScanOptions::default()).unwrap();
        let lw = linewidth(&s, &r).unwrap();
        assert!((lw.kappa / (2.0 * PI * 250e3) - 1.0).abs() < 0.01, "{}", lw.kappa / (2.0 * PI));
    }

    #[test]
    fn low_finesse_neighbours_are_flagged() {
        let z = mirror_polarizability_from_finesse(3.0).unwrap();
        let s = CavitySetup::new(50.0, Mirror::Partial(z), ScattererArray::empty(), 0.0, 1e-6).unwrap();
        let r = nearest_resonance(&s, 0.0, &ScanOptions::default()).unwrap();
        assert!(!linewidth(&s, &r).unwrap().isolated);
    }

    #[test]
    fn linewidth_needs_partial_mirrors() {
        let s = CavitySetup::new(50.0, Mirror::Perfect, ScattererArray::empty(), 0.0, 1e-6).unwrap();
        let r = nearest_resonance(&s, 0.0, &ScanOptions::default()).unwrap();
        assert_eq!(linewidth(&s, &r), Err(Error::PerfectMirrors));
    }

    #[test]
    fn lossy_array_needs_partial_mirrors() {
        let z = crate::tmm::calibrate_absorption(1e-3, -0.5).unwrap();
        let arr = ScattererArray::uniform(z, 3, 0.3).unwrap();
        let s = CavitySetup::new(100.0, Mirror::Perfect, arr, 0.0, 1e-6).unwrap();
        assert_eq!(find_resonances(&s, (6.0, 6.5)), Err(Error::LossyPerfectCavity));
    }

    #[test]
    fn effective_length_values() {
        let lambda = 1064e-9;
        let l = 0.0025 / lambda;
        let d = special_spacings(-12.9, 5).d_minus();
        let leff = effective_length(-12.9, 5, d, l);
        assert!((leff / l - 1.89).abs() < 0.01, "{}", leff / l);
        let corr = |n| effective_length(-12.9, n, d, l) - l;
        assert_relative_eq!(corr(10), 8.0 * corr(5), max_relative = 1e-12);
        assert!((effective_length(-0.01, 2, 0.3, 1e6) / 1e6 - 1.0).abs() < 1e-9);
        // the finite-N form approaches the large-N form
        let (a, b) = (effective_length(-0.5, 400, 0.3, 1e3), effective_length_exact(-0.5, 400, 0.3, 1e3));
        assert!(((a - 1e3) / (b - 1e3) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn array_geometry() {
        let z = Polarizability::real(-0.5);
        let a = ScattererArray::uniform(z, 4, 0.3).unwrap();
        assert_relative_eq!(a.span(), 0.9, epsilon = 1e-15);
        assert_relative_eq!(a.positions()[0], -0.45, epsilon = 1e-15);
        assert!(a.uniform_spacing().is_some());
        assert!(a.with_displacement(1, 0.31).is_err());
        assert!(ScattererArray::new(vec![z, z], vec![1.0, 0.5]).is_err());
        let s = CavitySetup::new(0.5, Mirror::Perfect, a.clone(), 0.0, 1e-6);
        assert!(s.is_err());
    }

    #[test]
    fn effective_element_of_symmetric_stack() {
        let kd = special_spacings(-0.5, 5).kd0;
        let m = crate::superscatterer::ensemble_response(-0.5, 5, kd);
        let e = effective_element(&m.matrix());
        assert_relative_eq!(e.chi, m.chi, max_relative = 1e-12);
        assert_relative_eq!(e.mu, m.mu, epsilon = 1e-12);
        assert!(e.psi.abs() < 1e-12);
    }
}
