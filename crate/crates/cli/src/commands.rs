//! One function per subcommand. Each reads its keys from the config, runs the
//! computation and returns a report; defaults reproduce the reference setups.

use std::f64::consts::{PI, TAU};

use optomech::cavity::{
    effective_length, effective_length_exact, linewidth, nearest_resonance, transmission_map, Branch, CavitySetup,
    Mirror, ScanOptions, ScattererArray,
};
use optomech::constants::SPEED_OF_LIGHT;
use optomech::coupling::{
    bare_g, bright_line_slope, cooperativity, coupling_com_analytic, coupling_profile, coupling_sin_analytic,
    coupling_sin_optimal, mode_coupling, quadratic_coupling, rate_from_slope, sinusoidal_mode, DiffOptions,
    MechanicalParams,
};
use optomech::plate::{flatness, plate_exact_rt, plate_polarizability, Plate};
use optomech::robustness::{
    loglog_slope, monte_carlo_coupling, scaling_tables, PerturbationSpec, ScalingConfig, ZetaSpread,
};
use optomech::superscatterer::{free_space_reflectivity_scan, linspace, special_spacings};
use optomech::tmm::{calibrate_absorption, Polarizability};

use crate::config::Config;
use crate::error::CliError;
use crate::output::{col, float, Cell, Provenance::*, Report};

type Out = Result<Report, CliError>;

fn lambda(cfg: &Config) -> Result<f64, CliError> {
    let l = cfg.metres_or("lambda", "1064 nm")?;
    if !(l > 0.0) {
        return Err(cfg.error("lambda", "must be positive"));
    }
    Ok(l)
}

/// Element polarizability from `zeta` or from the intensity `reflectivity`.
fn zeta(cfg: &Config, default: f64) -> Result<f64, CliError> {
    if cfg.has("reflectivity") {
        if cfg.has("zeta") {
            return Err(cfg.error("reflectivity", "give either zeta or reflectivity, not both"));
        }
        let r = cfg.f64_or("reflectivity", 0.0)?;
        return Polarizability::from_reflectivity(r)
            .map(|z| z.re())
            .map_err(|e| cfg.error("reflectivity", e.to_string()));
    }
    cfg.f64_or("zeta", default)
}

fn count(cfg: &Config, key: &str, default: usize, min: usize) -> Result<usize, CliError> {
    let n = cfg.usize_or(key, default)?;
    if n < min {
        return Err(cfg.error(key, format!("must be at least {min}")));
    }
    Ok(n)
}

fn mirror(cfg: &Config, default_finesse: f64) -> Result<Mirror, CliError> {
    let f = cfg.f64_or("finesse", default_finesse)?;
    Mirror::from_finesse(f).map_err(|e| cfg.error("finesse", e.to_string()))
}

fn mech(cfg: &Config) -> Result<MechanicalParams, CliError> {
    let x0 = cfg.metres_or("x0", "2.7 fm")?;
    let f_m = cfg.frequency_or("mechanical_frequency", "211 kHz")?;
    let q = cfg.f64_or("Q", 1e6)?;
    let t = cfg.temperature_or("T", "1 K")?;
    Ok(MechanicalParams::new(x0, TAU * f_m, q, t)?)
}

/// Uniform array in a cavity, tuned to resonate at the reference wavelength
/// unless `tune_length = false`.
struct System {
    setup: CavitySetup,
    zeta: f64,
    n: usize,
    d: f64,
}

fn system(
    cfg: &Config,
    lambda0: f64,
    zeta_default: f64,
    n_default: usize,
    length_default: &str,
    mirror: Mirror,
) -> Result<System, CliError> {
    let zeta = zeta(cfg, zeta_default)?;
    let n = count(cfg, "n", n_default, 1)?;
    let d = cfg.spacing_or("d", "dminus", lambda0)?.resolve(zeta, n);
    let length = cfg.length_or("L", length_default)?.in_wavelengths(lambda0);
    let offset = cfg.length_or("x", "0 lambda")?.in_wavelengths(lambda0);
    let tune = cfg.bool_or("tune_length", true)?;
    let arr = ScattererArray::uniform(Polarizability::real(zeta), n, d)?;
    let setup = if tune {
        CavitySetup::tuned(arr, length, offset, mirror, lambda0, Branch::sinusoidal(n))?
    } else {
        CavitySetup::new(length, mirror, arr, offset, lambda0)?
    };
    Ok(System { setup, zeta, n, d })
}

const SYSTEM_KEYS: &[&str] = &["lambda", "zeta", "reflectivity", "n", "d", "L", "x", "tune_length"];
const MECH_KEYS: &[&str] = &["x0", "mechanical_frequency", "Q", "T"];

fn keys(groups: &[&[&'static str]]) -> Vec<&'static str> {
    groups.iter().flat_map(|g| g.iter().copied()).collect()
}

fn note_system(r: &mut Report, s: &System) {
    r.note_f64("spacing_lambda", s.d);
    r.note_f64("cavity_length_lambda", s.setup.length);
    r.note_f64("total_length_m", s.setup.total_length() * s.setup.lambda0);
}

/// Reflection spectrum of the bare array versus `k d`.
pub fn superscatterer(cfg: &Config) -> Out {
    cfg.check_known(&["lambda", "zeta", "reflectivity", "n", "absorption", "kd_min", "kd_max", "kd_points"])?;
    let lambda0 = lambda(cfg)?;
    let zeta = zeta(cfg, -0.5)?;
    let n = count(cfg, "n", 5, 1)?;
    let absorption = cfg.f64_or("absorption", 0.0)?;
    let lo = cfg.f64_or("kd_min", 0.0)?;
    let hi = cfg.f64_or("kd_max", PI)?;
    let points = count(cfg, "kd_points", 1001, 2)?;
    let element = if absorption > 0.0 {
        calibrate_absorption(absorption, zeta).map_err(|e| cfg.error("absorption", e.to_string()))?
    } else {
        Polarizability::real(zeta)
    };
    let prov = if element.is_lossless() { Analytic } else { Numeric };
    let rows = free_space_reflectivity_scan(element, n, &linspace(lo, hi, points))?;

    let mut r = Report::new(vec![
        col("kd", "rad", Input),
        col("d", "m", Input),
        col("R", "1", prov),
        col("T", "1", prov),
        col("A", "1", prov),
    ]);
    for row in rows {
        let d = row.kd / TAU * lambda0;
        r.push(vec![
            row.kd.into(),
            d.into(),
            row.reflectivity.into(),
            row.transmissivity.into(),
            row.absorption.into(),
        ]);
    }
    r.note_f64("zeta", zeta);
    r.note_f64("zeta_imag", element.im());
    r.note_f64("single_element_R", element.reflectivity());
    if n >= 2 {
        let sp = special_spacings(zeta, n);
        r.note_f64("kd0", sp.kd0);
        r.note_f64("kd_plus", sp.kd_plus);
        r.note_f64("kd_minus", sp.kd_minus);
        r.note_f64("d_minus_m", sp.d_minus() * lambda0);
    }
    Ok(r)
}

/// Transmission around the working resonance while the array moves along its
/// sinusoidal mode (normalized), with the bright-line slope checked against
/// the numeric collective coupling.
pub fn spectrum(cfg: &Config) -> Out {
    cfg.check_known(&keys(&[SYSTEM_KEYS, &["finesse", "span_fsr", "points", "amplitude_max", "amplitudes"]]))?;
    let lambda0 = lambda(cfg)?;
    let mirror = mirror(cfg, 3e4)?;
    let sys = system(cfg, lambda0, -0.5, 5, "6.7 cm", mirror)?;
    let span = cfg.f64_or("span_fsr", 0.3)?;
    let points = count(cfg, "points", 601, 2)?;
    let a_max = cfg.length_or("amplitude_max", "0.05 lambda")?.in_wavelengths(lambda0);
    let n_amp = count(cfg, "amplitudes", 21, 1)?;
    let setup = &sys.setup;

    let mut mode = if sys.n >= 2 { sinusoidal_mode(sys.n) } else { vec![1.0] };
    let norm = mode.iter().map(|v| v * v).sum::<f64>().sqrt();
    mode.iter_mut().for_each(|v| *v /= norm);

    let scan = ScanOptions::default();
    let res = nearest_resonance(setup, 0.0, &scan)?;
    let half = 0.5 * span * setup.fsr_k();
    let offsets = linspace(-half, half, points);
    let grid: Vec<f64> = offsets.iter().map(|o| res.dk + o).collect();
    let amps = if n_amp == 1 { vec![0.0] } else { linspace(-a_max, a_max, n_amp) };
    let map = transmission_map(setup, &grid, &mode, &amps)?;

    let hz = SPEED_OF_LIGHT / (TAU * lambda0);
    let mut r = Report::new(vec![col("amplitude", "m", Input), col("detuning", "Hz", Input), col("T", "1", Numeric)]);
    for (a, row) in amps.iter().zip(&map) {
        for (o, t) in offsets.iter().zip(row) {
            r.push(vec![(a * lambda0).into(), (o * hz).into(), (*t).into()]);
        }
    }

    note_system(&mut r, &sys);
    r.note_f64("resonance_frequency_hz", res.omega / TAU);
    let lw = linewidth(setup, &res)?;
    r.note_f64("kappa_hz", lw.kappa / TAU);
    if !lw.isolated {
        r.warn("another resonance lies within 20 linewidths of the working peak");
    }
    // slopes in Hz per metre of normalized-mode amplitude
    let numeric = mode_coupling(setup, &mode, 1.0, &DiffOptions::linear())?;
    // probe amplitude moving the line by a thousandth of a free spectral range
    let k_slope = numeric / rate_from_slope(setup, 1.0, 1.0);
    let probe = if k_slope == 0.0 { 1e-6 } else { 1e-3 * setup.fsr_k() / k_slope.abs() };
    let peak = bright_line_slope(setup, &mode, probe, &scan)?;
    r.note_f64("bright_line_slope_hz_per_m", rate_from_slope(setup, peak, 1.0) / TAU);
    r.note_f64("g_sin_over_x0_hz_per_m", numeric / TAU);
    if sys.n >= 2 {
        let g = bare_g(setup, 1.0);
        let a = coupling_sin_analytic(sys.zeta, sys.n, sys.d, setup.length, g);
        r.note_f64("g_sin_over_x0_analytic_hz_per_m", a.exact / TAU);
    }
    Ok(r)
}

/// Per-element couplings of the working resonance, the collective modes and
/// the cooperativity.
pub fn coupling(cfg: &Config) -> Out {
    cfg.check_known(&keys(&[SYSTEM_KEYS, MECH_KEYS, &["finesse", "quadratic"]]))?;
    let lambda0 = lambda(cfg)?;
    let mirror = mirror(cfg, 1.2e5)?;
    let sys = system(cfg, lambda0, -12.9, 5, "2.5 mm", mirror)?;
    let mech = mech(cfg)?;
    let quadratic = cfg.bool_or("quadratic", true)?;
    let setup = &sys.setup;

    let opts = DiffOptions::linear();
    let p = coupling_profile(setup, &mech, &opts)?;
    let big_g: Vec<Option<f64>> = if quadratic {
        (0..sys.n)
            .map(|j| quadratic_coupling(setup, j, mech.x0, &DiffOptions::quadratic()).map(Some))
            .collect::<Result<_, _>>()?
    } else {
        vec![None; sys.n]
    };

    let mut r = Report::new(vec![
        col("element", "1", Input),
        col("position", "m", Input),
        col("g", "Hz", Numeric),
        col("g_analytic", "Hz", Analytic),
        col("mode", "1", Numeric),
        col("G", "Hz", Numeric),
    ]);
    let pos = setup.array.element_positions();
    for j in 0..sys.n {
        let analytic = p.analytic.as_ref().map(|a| a[j] / TAU);
        r.push(vec![
            (j + 1).into(),
            (pos[j] * lambda0).into(),
            (p.g[j] / TAU).into(),
            analytic.into(),
            p.mode[j].into(),
            big_g[j].map(|v| v / TAU).into(),
        ]);
    }

    note_system(&mut r, &sys);
    let g = bare_g(setup, mech.x0);
    r.note_f64("g_bare_hz", g / TAU);
    r.note_f64("g_collective_hz", p.collective / TAU);
    r.note("branch", p.resonance.branch.to_string());
    r.note_f64("resonance_frequency_hz", p.resonance.omega / TAU);
    if sys.n >= 2 {
        let a = coupling_sin_analytic(sys.zeta, sys.n, sys.d, setup.length, g);
        r.note_f64("g_sin_analytic_hz", a.exact / TAU);
        r.note_f64("g_sin_large_n_hz", a.large_n / TAU);
        r.note_f64("g_com_analytic_hz", coupling_com_analytic(sys.zeta, sys.n, g) / TAU);
        r.note_f64("l_eff_lambda", effective_length_exact(sys.zeta, sys.n, sys.d, setup.length));
        r.note_f64("l_eff_large_n_lambda", effective_length(sys.zeta, sys.n, sys.d, setup.length));
    }

    // the empty cavity of the same free length sets the reference linewidth
    let bare = CavitySetup::new(setup.length, setup.mirror, ScattererArray::empty(), 0.0, lambda0)?;
    let kappa_c = linewidth(&bare, &nearest_resonance(&bare, 0.0, &opts.scan)?)?.kappa;
    let res = nearest_resonance(setup, p.resonance.dk, &opts.scan)?;
    let lw = linewidth(setup, &res)?;
    let c = cooperativity(p.collective, kappa_c, &mech);
    let c_eff = cooperativity(p.collective, lw.kappa, &mech);
    r.note_f64("kappa_c_hz", kappa_c / TAU);
    r.note_f64("kappa_eff_hz", lw.kappa / TAU);
    r.note_f64("kappa_eff_fit_hz", lw.kappa_fit / TAU);
    r.note_f64("n_bar", c.n_bar);
    r.note_f64("gamma_dec_hz", c.gamma_dec / TAU);
    r.note_f64("cooperativity", c.cooperativity);
    r.note_f64("cooperativity_eff", c_eff.cooperativity);
    if !lw.isolated {
        r.warn("another resonance lies within 20 linewidths of the working peak");
    }
    Ok(r)
}

/// Coupling, linewidth and cooperativity versus element count.
pub fn scaling(cfg: &Config) -> Out {
    cfg.check_known(&keys(&[
        &["lambda", "zeta", "reflectivity", "d", "L", "finesse", "absorption", "n_min", "n_max"],
        MECH_KEYS,
        &["numeric_coupling", "numeric_linewidth"],
    ]))?;
    let lambda0 = lambda(cfg)?;
    let zeta = zeta(cfg, -0.5)?;
    let spacing = cfg.spacing_or("d", "dminus + 20 lambda", lambda0)?;
    let length = cfg.length_or("L", "6.7 cm")?.in_wavelengths(lambda0);
    let finesse = cfg.f64_or("finesse", 3e4)?;
    let absorption = cfg.f64_or("absorption", 1e-5)?;
    let n_min = count(cfg, "n_min", 1, 1)?;
    let n_max = count(cfg, "n_max", 32, n_min)?;
    let mech = mech(cfg)?;
    let numeric_coupling = cfg.bool_or("numeric_coupling", true)?;
    let numeric_linewidth = cfg.bool_or("numeric_linewidth", false)?;

    let table = scaling_tables(&ScalingConfig {
        zeta,
        n_values: (n_min..=n_max).collect(),
        spacing,
        length,
        lambda0,
        finesse,
        absorption,
        mech,
        numeric_coupling,
        numeric_linewidth,
        diff: DiffOptions::linear(),
    })?;

    let mut r = Report::new(vec![
        col("n", "1", Input),
        col("d", "m", Input),
        col("L", "m", Input),
        col("g_sin", "Hz", Numeric),
        col("g_sin_analytic", "Hz", Analytic),
        col("g_sin_large_n", "Hz", Analytic),
        col("g_com", "Hz", Analytic),
        col("kappa", "Hz", if numeric_linewidth { Numeric } else { Analytic }),
        col("kappa_lossy", "Hz", Numeric),
        col("l_eff", "m", Analytic),
        col("l_eff_large_n", "m", Analytic),
        col("cooperativity", "1", if numeric_linewidth { Numeric } else { Analytic }),
        col("cooperativity_lossy", "1", Numeric),
        col("cooperativity_norm", "1", if numeric_linewidth { Numeric } else { Analytic }),
    ]);
    let hz = |v: f64| v / TAU;
    for row in &table.rows {
        r.push(vec![
            row.n.into(),
            (row.d * lambda0).into(),
            (row.length * lambda0).into(),
            row.g_sin_numeric.map(hz).into(),
            hz(row.g_sin_analytic).into(),
            hz(row.g_sin_large_n).into(),
            hz(row.g_com).into(),
            hz(row.kappa_eff).into(),
            row.kappa_eff_lossy.map(hz).into(),
            (row.l_eff_exact * lambda0).into(),
            (row.l_eff * lambda0).into(),
            row.cooperativity.into(),
            row.cooperativity_lossy.into(),
            row.cooperativity_norm.into(),
        ]);
    }
    r.note_f64("kappa_c_hz", hz(table.kappa_c));
    let fit: Vec<_> = table.rows.iter().filter(|row| row.n >= 2).collect();
    if fit.len() >= 2 {
        let n: Vec<f64> = fit.iter().map(|row| row.n as f64).collect();
        let col_of = |f: &dyn Fn(&&optomech::robustness::ScalingRow) -> f64| fit.iter().map(f).collect::<Vec<f64>>();
        r.note_f64("slope_g_sin_analytic", loglog_slope(&n, &col_of(&|row| row.g_sin_analytic.abs())));
        r.note_f64("slope_g_com", loglog_slope(&n, &col_of(&|row| row.g_com.abs())));
        if numeric_coupling {
            r.note_f64("slope_g_sin", loglog_slope(&n, &col_of(&|row| row.g_sin_numeric.unwrap_or(f64::NAN).abs())));
        }
    }
    Ok(r)
}

/// Spread of the collective coupling under random placement and polarizability
/// errors, one row per position jitter.
pub fn montecarlo(cfg: &Config, seed_override: Option<u64>) -> Out {
    cfg.check_known(&keys(&[
        SYSTEM_KEYS,
        &["sigmas", "zeta_spread", "zeta_spread_kind", "absorption", "trials", "seed"],
    ]))?;
    let lambda0 = lambda(cfg)?;
    let sys = system(cfg, lambda0, -0.5, 5, "6.7 cm", Mirror::Perfect)?;
    let sigmas: Vec<f64> = cfg
        .lengths_or(
            "sigmas",
            &["1e-3 lambda", "3.1622776601683794e-3 lambda", "1e-2 lambda", "3.1622776601683794e-2 lambda"],
        )?
        .into_iter()
        .map(|l| l.in_wavelengths(lambda0))
        .collect();
    let spread = cfg.f64_or("zeta_spread", 0.0)?;
    let kind = cfg.str_or("zeta_spread_kind", "uniform")?;
    let zeta_spread = match (spread, kind.as_str()) {
        (0.0, _) => ZetaSpread::None,
        (s, "uniform") => ZetaSpread::Uniform(s),
        (s, "gaussian") => ZetaSpread::Gaussian(s),
        _ => return Err(cfg.error("zeta_spread_kind", "expected \"uniform\" or \"gaussian\"")),
    };
    let absorption = cfg.f64_or("absorption", 0.0)?;
    let trials = count(cfg, "trials", 4000, 1)?;
    let seed = match seed_override {
        Some(s) => s,
        None => cfg.u64_or("seed", 2024)?,
    };

    let mut r = Report::new(vec![
        col("sigma", "m", Input),
        col("trials", "1", Input),
        col("failures", "1", Numeric),
        col("mean_rel_dev", "1", Numeric),
        col("std_rel_dev", "1", Numeric),
        col("p05", "1", Numeric),
        col("p50", "1", Numeric),
        col("p95", "1", Numeric),
        col("abs_p90", "1", Numeric),
    ]);
    let opts = DiffOptions::linear();
    let mut reference = f64::NAN;
    for sigma in sigmas {
        let spec = PerturbationSpec {
            position_sigma: sigma,
            zeta_spread,
            absorption_per_element: absorption,
            trials,
            master_seed: seed,
        };
        let st = monte_carlo_coupling(&sys.setup, &spec, &opts)?;
        if st.flagged {
            r.warn(format!("{} of {} trials failed at sigma = {}", st.failures, st.trials, float(sigma * lambda0)));
        }
        reference = st.reference;
        r.push(vec![
            (sigma * lambda0).into(),
            st.trials.into(),
            st.failures.into(),
            st.mean_rel_dev.into(),
            st.std_rel_dev.into(),
            st.quantiles.p05.into(),
            st.quantiles.p50.into(),
            st.quantiles.p95.into(),
            st.abs_p90.into(),
        ]);
    }
    note_system(&mut r, &sys);
    r.note_f64("g_reference_hz_per_fm", reference / TAU);
    r.note("seed", seed.to_string());
    Ok(r)
}

/// Reflection, transmission and absorption of an array of lossy elements.
pub fn absorption(cfg: &Config) -> Out {
    cfg.check_known(&["lambda", "zeta", "reflectivity", "n", "absorption", "kd_min", "kd_max", "kd_points"])?;
    let lambda0 = lambda(cfg)?;
    let zeta = zeta(cfg, -0.5)?;
    let n = count(cfg, "n", 5, 1)?;
    let a = cfg.f64_or("absorption", 1e-3)?;
    let lo = cfg.f64_or("kd_min", 0.0)?;
    let hi = cfg.f64_or("kd_max", PI)?;
    let points = count(cfg, "kd_points", 1001, 2)?;
    let element = calibrate_absorption(a, zeta).map_err(|e| cfg.error("absorption", e.to_string()))?;
    let grid = linspace(lo, hi, points);
    let rows = optomech::robustness::absorption_scan(element, n, &grid)?;

    let mut r = Report::new(vec![
        col("kd", "rad", Input),
        col("d", "m", Input),
        col("R", "1", Numeric),
        col("T", "1", Numeric),
        col("A", "1", Numeric),
    ]);
    for row in &rows {
        r.push(vec![
            row.kd.into(),
            (row.kd / TAU * lambda0).into(),
            row.reflectivity.into(),
            row.transmissivity.into(),
            row.absorption.into(),
        ]);
    }
    r.note_f64("zeta_imag", element.im());
    if n >= 2 {
        let sp = special_spacings(zeta, n);
        for (name, kd) in [("kd_plus", sp.kd_plus), ("kd_minus", sp.kd_minus), ("kd0", sp.kd0)] {
            let at = optomech::robustness::absorption_scan(element, n, &[kd])?;
            r.note_f64(&format!("absorption_at_{name}"), at[0].absorption);
        }
    }
    let max = rows.iter().map(|row| row.absorption).fold(0.0, f64::max);
    r.note_f64("absorption_max", max);
    Ok(r)
}

/// Optimal element count and collective coupling versus element reflectivity.
pub fn nopt(cfg: &Config) -> Out {
    cfg.check_known(&["lambda", "d", "L", "x0", "r_min", "r_max", "points"])?;
    let lambda0 = lambda(cfg)?;
    let rule = cfg.spacing_or("d", "dminus", lambda0)?;
    let length = cfg.length_or("L", "6.7 cm")?.in_wavelengths(lambda0);
    let x0 = cfg.metres_or("x0", "2.7 fm")?;
    let r_min = cfg.f64_or("r_min", 0.01)?;
    let r_max = cfg.f64_or("r_max", 0.99)?;
    let points = count(cfg, "points", 99, 1)?;
    let bare = CavitySetup::new(length, Mirror::Perfect, ScattererArray::empty(), 0.0, lambda0)?;
    let g = bare_g(&bare, x0);

    let mut r = Report::new(vec![
        col("R", "1", Input),
        col("zeta", "1", Input),
        col("n_opt", "1", Analytic),
        col("g_opt", "Hz", Analytic),
        col("n_best", "1", Analytic),
        col("g_best", "Hz", Analytic),
    ]);
    let grid = if points == 1 { vec![r_min] } else { linspace(r_min, r_max, points) };
    let mut below = 0;
    for refl in grid {
        let zeta = Polarizability::from_reflectivity(refl).map_err(|e| cfg.error("r_max", e.to_string()))?.re();
        let o = coupling_sin_optimal(zeta, length, rule, g)?;
        below += usize::from(o.below_two);
        r.push(vec![
            refl.into(),
            zeta.into(),
            o.n_opt.into(),
            (o.g_opt / TAU).into(),
            o.n_best.into(),
            (o.g_best / TAU).into(),
        ]);
    }
    r.note_f64("g_bare_hz", g / TAU);
    if below > 0 {
        r.warn(format!("optimal element count below two for {below} reflectivities"));
    }
    Ok(r)
}

/// Thin dielectric plate as an element: polarizability from the exact
/// reflection and transmission, and its frequency flatness.
pub fn plate(cfg: &Config) -> Out {
    cfg.check_known(&["lambda", "index", "thickness_min", "thickness_max", "points", "q_c"])?;
    let lambda0 = lambda(cfg)?;
    let index = cfg.f64_or("index", 2.0)?;
    let t_min = cfg.metres_or("thickness_min", "10 nm")?;
    let t_max = cfg.metres_or("thickness_max", "500 nm")?;
    let points = count(cfg, "points", 200, 1)?;
    let q_c = cfg.f64_or("q_c", 1e7)?;
    if !(t_min > 0.0 && t_max >= t_min) {
        return Err(cfg.error("thickness_max", "need 0 < thickness_min <= thickness_max"));
    }

    let mut r = Report::new(vec![
        col("thickness", "m", Input),
        col("phase", "rad", Analytic),
        col("zeta", "1", Analytic),
        col("zeta_from_rt", "1", Numeric),
        col("R", "1", Analytic),
        col("flatness", "1", Analytic),
        col("near_resonance", "1", Analytic),
    ]);
    let grid = if points == 1 { vec![t_min] } else { linspace(t_min, t_max, points) };
    for t in grid {
        let p = Plate::new(index, t / lambda0)?;
        let z = plate_polarizability(&p, TAU);
        let (refl, trans) = plate_exact_rt(&p, TAU);
        // -i r/t
        let from_rt = (refl / trans).im;
        let (flat, near) = match flatness(&p, TAU, q_c) {
            Ok(f) => (Some(f.relative_change), f.near_resonance),
            Err(_) => (None, true),
        };
        r.push(vec![
            t.into(),
            p.phase(TAU).into(),
            z.re().into(),
            from_rt.into(),
            z.reflectivity().into(),
            flat.into(),
            Cell::Bool(near),
        ]);
    }
    Ok(r)
}
