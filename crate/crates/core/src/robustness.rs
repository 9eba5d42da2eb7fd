//! Imperfection studies: Monte Carlo over positioning errors and polarizability
//! spread, absorption scans, and the element-count scaling tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::cavity::{
    effective_length, effective_length_exact, linewidth, nearest_resonance, Branch, CavitySetup, Mirror, ScanOptions,
    ScattererArray,
};
use crate::coupling::{
    bare_g, cooperativity, coupling_com_analytic, coupling_profile, coupling_setup, coupling_sin_analytic,
    profile_at_serial, DiffOptions, MechanicalParams,
};
use crate::error::{Error, Result};
use crate::superscatterer::{free_space_reflectivity_scan, ScanRow, SpacingRule};
use crate::tmm::{calibrate_absorption, Polarizability};

/// Relative spread of the element polarizabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZetaSpread {
    None,
    /// Uniform on `[-bound, bound]`.
    Uniform(f64),
    /// Gaussian with this standard deviation.
    Gaussian(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    /// Standard deviation of the Gaussian position jitter, wavelength units.
    pub position_sigma: f64,
    pub zeta_spread: ZetaSpread,
    /// Absorbed power fraction per element. Couplings are evaluated on the
    /// lossless counterpart, so this only matters to callers that also
    /// compute linewidths.
    pub absorption_per_element: f64,
    pub trials: usize,
    pub master_seed: u64,
}

impl PerturbationSpec {
    pub fn positions(sigma: f64, trials: usize, master_seed: u64) -> Self {
        Self { position_sigma: sigma, zeta_spread: ZetaSpread::None, absorption_per_element: 0.0, trials, master_seed }
    }

    fn validate(&self) -> Result<()> {
        let spread = match self.zeta_spread {
            ZetaSpread::None => 0.0,
            ZetaSpread::Uniform(b) | ZetaSpread::Gaussian(b) => b,
        };
        if !(self.position_sigma >= 0.0) || !(spread >= 0.0) || !(self.absorption_per_element >= 0.0) {
            return Err(Error::InvalidParameter("perturbation widths must be non-negative".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("at least one trial is required".into()));
        }
        Ok(())
    }
}

/// Generator for one trial: the master seed selects the key, the trial index
/// the stream, so every trial is independent of scheduling.
pub fn trial_rng(master_seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quantiles {
    pub p05: f64,
    pub p10: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p90: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    /// Numeric collective coupling of the unperturbed array, rad/s.
    pub reference: f64,
    pub trials: usize,
    pub failures: usize,
    /// More than 1% of the trials failed.
    pub flagged: bool,
    /// Mean and sample standard deviation of `g/g_ref - 1` over successful trials.
    pub mean_rel_dev: f64,
    pub std_rel_dev: f64,
    pub quantiles: Quantiles,
    /// 90th percentile of `|g/g_ref - 1|`.
    pub abs_p90: f64,
    /// Per-trial deviation, `None` for failed trials, in trial order.
    pub deviations: Vec<Option<f64>>,
}

/// Perturbed copy of `base` for one trial.
pub fn perturb(base: &CavitySetup, spec: &PerturbationSpec, rng: &mut ChaCha8Rng) -> Result<CavitySetup> {
    let arr = &base.array;
    let n = arr.len();
    let jitter: Vec<f64> = if spec.position_sigma > 0.0 {
        let normal = Normal::new(0.0, spec.position_sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        (0..n).map(|_| normal.sample(rng)).collect()
    } else {
        vec![0.0; n]
    };
    let factors: Vec<f64> = match spec.zeta_spread {
        ZetaSpread::None => vec![1.0; n],
        ZetaSpread::Uniform(b) if b > 0.0 => (0..n).map(|_| 1.0 + rng.random_range(-b..=b)).collect(),
        ZetaSpread::Gaussian(s) if s > 0.0 => {
            let normal = Normal::new(0.0, s).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            (0..n).map(|_| 1.0 + normal.sample(rng)).collect()
        }
        _ => vec![1.0; n],
    };
    let zetas = arr
        .zetas()
        .iter()
        .zip(&factors)
        .map(|(z, f)| {
            let re = z.re() * f;
            if spec.absorption_per_element > 0.0 {
                calibrate_absorption(spec.absorption_per_element, re)
            } else {
                Polarizability::new(re, z.im())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let disp: Vec<f64> = arr.displacements().iter().zip(&jitter).map(|(d, j)| d + j).collect();
    let array = arr.with_zetas(zetas)?.with_displacements(&disp)?;
    base.with_array(array)
}

fn trial_coupling(
    base: &CavitySetup,
    spec: &PerturbationSpec,
    trial: usize,
    x0: f64,
    opts: &DiffOptions,
) -> Result<f64> {
    let mut rng = trial_rng(spec.master_seed, trial);
    let s = coupling_setup(&perturb(base, spec, &mut rng)?);
    let res = nearest_resonance(&s, 0.0, &opts.scan)?;
    Ok(profile_at_serial(&s, &res, x0, opts)?.collective)
}

/// Relative deviation of the numeric collective coupling under random
/// imperfections, against the unperturbed array. Trials run in parallel;
/// statistics are accumulated in trial order, so results do not depend on the
/// number of threads.
pub fn monte_carlo_coupling(base: &CavitySetup, spec: &PerturbationSpec, opts: &DiffOptions) -> Result<EnsembleStats> {
    spec.validate()?;
    let x0 = 1e-15;
    let s0 = coupling_setup(base);
    let res0 = nearest_resonance(&s0, 0.0, &opts.scan)?;
    let reference = profile_at_serial(&s0, &res0, x0, opts)?.collective;
    if !(reference > 0.0) {
        return Err(Error::InvalidParameter("unperturbed array does not couple".into()));
    }
    let deviations: Vec<Option<f64>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| trial_coupling(base, spec, t, x0, opts).ok().map(|g| g / reference - 1.0))
        .collect();
    let ok: Vec<f64> = deviations.iter().flatten().copied().collect();
    let failures = spec.trials - ok.len();
    if ok.is_empty() {
        return Err(Error::InvalidParameter("every trial failed".into()));
    }
    let mean = ok.iter().sum::<f64>() / ok.len() as f64;
    let std = if ok.len() > 1 {
        (ok.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (ok.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = ok.clone();
    sorted.sort_by(f64::total_cmp);
    let q = |p| quantile(&sorted, p);
    let mut abs: Vec<f64> = ok.iter().map(|v| v.abs()).collect();
    abs.sort_by(f64::total_cmp);
    Ok(EnsembleStats {
        reference,
        trials: spec.trials,
        failures,
        flagged: failures as f64 > 0.01 * spec.trials as f64,
        mean_rel_dev: mean,
        std_rel_dev: std,
        quantiles: Quantiles {
            p05: q(0.05),
            p10: q(0.1),
            p25: q(0.25),
            p50: q(0.5),
            p75: q(0.75),
            p90: q(0.9),
            p95: q(0.95),
        },
        abs_p90: quantile(&abs, 0.9),
        deviations,
    })
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Free-space power coefficients of a uniform, possibly absorbing, stack.
pub fn absorption_scan(zeta: Polarizability, n: usize, kd_grid: &[f64]) -> Result<Vec<ScanRow>> {
    free_space_reflectivity_scan(zeta, n, kd_grid)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub zeta: f64,
    pub n_values: Vec<usize>,
    pub spacing: SpacingRule,
    /// Nominal free cavity length, wavelength units; tuned per `N`.
    pub length: f64,
    pub lambda0: f64,
    pub finesse: f64,
    /// Absorbed fraction per element for the lossy columns.
    pub absorption: f64,
    pub mech: MechanicalParams,
    /// Evaluate numeric couplings (slower) in addition to the closed forms.
    pub numeric_coupling: bool,
    /// Measure linewidths numerically; otherwise the lossless linewidth is
    /// `κ_c L / L_eff` and the lossy columns are left empty.
    pub numeric_linewidth: bool,
    pub diff: DiffOptions,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    /// Spacing, wavelength units.
    pub d: f64,
    /// Free length after tuning, wavelength units.
    pub length: f64,
    pub g_sin_numeric: Option<f64>,
    pub g_sin_analytic: f64,
    pub g_sin_large_n: f64,
    pub g_com: f64,
    /// Lossless and lossy HWHM linewidths, rad/s.
    pub kappa_eff: f64,
    pub kappa_eff_lossy: Option<f64>,
    pub l_eff: f64,
    pub l_eff_exact: f64,
    pub cooperativity: f64,
    pub cooperativity_lossy: Option<f64>,
    /// Cooperativity divided by that of one element of the same reflectivity
    /// at its best position in the bare cavity, `(g|r|)² / (κ_c Γ)`.
    pub cooperativity_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTable {
    /// Bare-cavity HWHM linewidth, rad/s.
    pub kappa_c: f64,
    pub rows: Vec<ScalingRow>,
}

/// Scaling of couplings, linewidths and cooperativity with the element count.
pub fn scaling_tables(cfg: &ScalingConfig) -> Result<ScalingTable> {
    let z_mirror = Mirror::from_finesse(cfg.finesse)?;
    let bare = CavitySetup::new(cfg.length, z_mirror, ScattererArray::empty(), 0.0, cfg.lambda0)?;
    let kappa_c = if cfg.numeric_linewidth {
        let r = nearest_resonance(&bare, 0.0, &ScanOptions::default())?;
        linewidth(&bare, &r)?.kappa
    } else {
        bare.k_to_omega(bare.fsr_k()) / (2.0 * cfg.finesse)
    };
    let rows = cfg.n_values.par_iter().map(|&n| scaling_row(cfg, n, z_mirror, kappa_c)).collect::<Result<Vec<_>>>()?;
    Ok(ScalingTable { kappa_c, rows })
}

fn scaling_row(cfg: &ScalingConfig, n: usize, mirror: Mirror, kappa_c: f64) -> Result<ScalingRow> {
    if n == 0 {
        return Err(Error::InvalidParameter("element count must be positive".into()));
    }
    let zeta = cfg.zeta;
    let d = cfg.spacing.resolve(zeta, n);
    let arr = ScattererArray::uniform(Polarizability::real(zeta), n, d)?;
    let setup = CavitySetup::tuned(arr.clone(), cfg.length, 0.0, mirror, cfg.lambda0, Branch::sinusoidal(n))?;
    let g = bare_g(&setup, cfg.mech.x0);
    let sin = coupling_sin_analytic(zeta, n, d, setup.length, g);
    let g_sin_numeric =
        if cfg.numeric_coupling { Some(coupling_profile(&setup, &cfg.mech, &cfg.diff)?.collective) } else { None };
    let l_eff = effective_length(zeta, n, d, setup.length);
    let l_eff_exact = effective_length_exact(zeta, n, d, setup.length);
    let (kappa_eff, kappa_eff_lossy) = if cfg.numeric_linewidth {
        let r = nearest_resonance(&setup, 0.0, &cfg.diff.scan)?;
        let lossless = linewidth(&setup, &r)?.kappa;
        let lossy_z = calibrate_absorption(cfg.absorption, zeta)?;
        let lossy = setup.with_array(arr.with_zetas(vec![lossy_z; n])?)?;
        let r = nearest_resonance(&lossy, 0.0, &cfg.diff.scan)?;
        (lossless, Some(linewidth(&lossy, &r)?.kappa))
    } else {
        (kappa_c * setup.length / l_eff_exact, None)
    };
    let g_use = g_sin_numeric.unwrap_or(sin.exact);
    let c = cooperativity(g_use, kappa_eff, &cfg.mech);
    let c_lossy = kappa_eff_lossy.map(|k| cooperativity(g_use, k, &cfg.mech).cooperativity);
    let r_abs = Polarizability::real(zeta).reflectivity().sqrt();
    let c_single = cooperativity(g * r_abs, kappa_c, &cfg.mech).cooperativity;
    Ok(ScalingRow {
        n,
        d,
        length: setup.length,
        g_sin_numeric,
        g_sin_analytic: sin.exact,
        g_sin_large_n: sin.large_n,
        g_com: coupling_com_analytic(zeta, n, g),
        kappa_eff,
        kappa_eff_lossy,
        l_eff,
        l_eff_exact,
        cooperativity: c.cooperativity,
        cooperativity_lossy: c_lossy,
        cooperativity_norm: c.cooperativity / c_single,
    })
}
