use optomech::cavity::{nearest_resonance, transmission_map, Branch, CavitySetup, Mirror, ScanOptions, ScattererArray};
use optomech::coupling::{bright_line_slope, mode_coupling, rate_from_slope, sinusoidal_mode, DiffOptions};
use optomech::superscatterer::SpacingRule;
use optomech::tmm::Polarizability;

fn setup(zeta: f64, n: usize, length: f64, finesse: f64) -> CavitySetup {
    let d = SpacingRule::DMinus { extra: 0.0 }.resolve(zeta, n);
    let arr = ScattererArray::uniform(Polarizability::real(zeta), n, d).unwrap();
    let mirror = Mirror::from_finesse(finesse).unwrap();
    CavitySetup::tuned(arr, length, 0.0, mirror, 1064e-9, Branch::sinusoidal(n)).unwrap()
}

fn normalized_mode(n: usize) -> Vec<f64> {
    let m = sinusoidal_mode(n);
    let norm = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    m.iter().map(|v| v / norm).collect()
}

#[test]
fn bright_line_slope_is_the_collective_coupling() {
    for (zeta, n) in [(-0.5, 5), (-2.0, 4), (-12.9, 5)] {
        let s = setup(zeta, n, 6.3e4, 3e4);
        let mode = normalized_mode(n);
        let scan = ScanOptions::default();
        let slope = rate_from_slope(&s, bright_line_slope(&s, &mode, 1e-6, &scan).unwrap(), 1.0);
        let g = mode_coupling(&s, &mode, 1.0, &DiffOptions::linear()).unwrap();
        assert!((slope / g - 1.0).abs() < 0.02, "zeta {zeta} N {n}: {slope} vs {g}");
    }
}

#[test]
fn map_peaks_on_the_resonance() {
    let s = setup(-0.5, 5, 3000.0, 3000.0);
    let res = nearest_resonance(&s, 0.0, &ScanOptions::default()).unwrap();
    let half = 0.05 * s.fsr_k();
    let grid: Vec<f64> = (0..=200).map(|i| res.dk - half + i as f64 * half / 100.0).collect();
    let map = transmission_map(&s, &grid, &normalized_mode(5), &[-0.02, 0.0, 0.02]).unwrap();
    let argmax = |row: &[f64]| row.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    assert_eq!(argmax(&map[1]), 100);
    assert!(map[1][100] > 0.999);
    // the line moves in opposite directions for opposite amplitudes
    let (lo, hi) = (argmax(&map[0]) as i64 - 100, argmax(&map[2]) as i64 - 100);
    assert!(lo * hi < 0, "{lo} {hi}");
}
