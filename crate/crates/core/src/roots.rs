//! Bracketing root finders and a golden-section minimizer.

/// Bisection on a sign change of `f` in `[lo, hi]`.
///
/// Runs until the bracket is no wider than `xtol` or stops shrinking in
/// floating point. Returns `None` without a sign change.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.is_nan() || fhi.is_nan() || (flo > 0.0) == (fhi > 0.0) {
        return None;
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Every sign change of `f` on a uniform grid of `samples` intervals over
/// `[lo, hi]`, each refined by bisection.
pub fn scan_roots<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, samples: usize, xtol: f64) -> Vec<f64> {
    let samples = samples.max(1);
    let step = (hi - lo) / samples as f64;
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=samples {
        let x1 = if i == samples { hi } else { lo + step * i as f64 };
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f1 != 0.0 && (f0 > 0.0) != (f1 > 0.0) && !f0.is_nan() && !f1.is_nan() {
            if let Some(r) = bisect(&mut f, x0, x1, xtol) {
                roots.push(r);
            }
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        roots.push(x0);
    }
    roots
}

/// Root nearest `start`, found by growing a bracket geometrically on both
/// sides from `initial_step` up to `max_distance`.
pub fn nearest_root<F: FnMut(f64) -> f64>(
    mut f: F,
    start: f64,
    initial_step: f64,
    max_distance: f64,
    xtol: f64,
) -> Option<f64> {
    let f0 = f(start);
    if f0 == 0.0 {
        return Some(start);
    }
    let mut inner = 0.0;
    let mut step = initial_step;
    let (mut f_left, mut f_right) = (f0, f0);
    while inner < max_distance {
        let outer = (inner + step).min(max_distance);
        let fl = f(start - outer);
        let fr = f(start + outer);
        let left = (fl > 0.0) != (f_left > 0.0) || fl == 0.0;
        let right = (fr > 0.0) != (f_right > 0.0) || fr == 0.0;
        let candidate = |found: bool, a: f64, b: f64, f: &mut F| if found { bisect(f, a, b, xtol) } else { None };
        let l = candidate(left, start - outer, start - inner, &mut f);
        let r = candidate(right, start + inner, start + outer, &mut f);
        match (l, r) {
            (Some(a), Some(b)) => return Some(if start - a <= b - start { a } else { b }),
            (Some(a), None) => return Some(a),
            (None, Some(b)) => return Some(b),
            (None, None) => {}
        }
        f_left = fl;
        f_right = fr;
        inner = outer;
        step *= 2.0;
    }
    None
}

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`.
pub fn golden_minimize<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        if !(c > lo && d < hi && c < d) {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Minimize `f` on `[lo, hi]` by sampling `samples` points and refining the
/// best one by golden section between its neighbours.
pub fn sampled_minimize<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, samples: usize) -> f64 {
    let samples = samples.max(2);
    let step = (hi - lo) / samples as f64;
    let (mut best, mut best_val) = (lo, f64::INFINITY);
    for i in 0..=samples {
        let x = lo + step * i as f64;
        let v = f(x);
        if v < best_val {
            best = x;
            best_val = v;
        }
    }
    golden_minimize(f, (best - step).max(lo), (best + step).min(hi))
}
