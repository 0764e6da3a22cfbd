//! Small derivative-free optimisers: Nelder-Mead and bracketed bisection.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex.
    pub step: f64,
    /// Stop when the simplex diameter falls below this.
    pub xtol: f64,
    /// Stop when the spread of function values falls below this.
    pub ftol: f64,
    pub max_evals: usize,
    /// Stop as soon as a value at or below this is seen.
    pub target: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { step: 0.1, xtol: 1e-12, ftol: 1e-15, max_evals: 2000, target: f64::NEG_INFINITY }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimise `f` starting from `x0` with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let mut converged = false;

    while evals < opts.max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let diam = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if vals[0] <= opts.target {
            break;
        }
        if diam <= opts.xtol || (vals[n] - vals[0]).abs() <= opts.ftol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&pts[n]).map(|(c, w)| c + t * (c - w)).collect()
        };

        let xr = along(1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = along(0.5);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = f(&xc);
            (xc, fc)
        };
        evals += 1;
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let p: Vec<f64> = pts[i].iter().zip(&pts[0]).map(|(a, b)| b + 0.5 * (a - b)).collect();
            vals[i] = f(&p);
            pts[i] = p;
        }
        evals += n;
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("nonempty simplex");
    Minimum { x: pts[best].clone(), f: vals[best], evals, converged }
}

/// Find the sign change of `f` in `[lo, hi]` to width `tol`. `f(lo)` and
/// `f(hi)` must differ in sign (as reported by `positive`). Returns the
/// final bracket.
pub fn bisect<F: FnMut(f64) -> bool>(mut positive: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let lo_pos = positive(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if positive(mid) == lo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions { max_evals: 10_000, ..Default::default() };
        let m = nelder_mead(f, &[-1.2, 1.0], &opts);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m);
    }

    #[test]
    fn quadratic_bowl_3d() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.1).powi(2) + (x[2] - 2.0).powi(2);
        let m = nelder_mead(f, &[0.0, 0.0, 0.0], &NelderMeadOptions::default());
        assert!(m.f < 1e-14);
    }

    #[test]
    fn target_stops_early() {
        let f = |x: &[f64]| x[0] * x[0] + x[1] * x[1];
        let opts = NelderMeadOptions { target: 0.5, ..Default::default() };
        let m = nelder_mead(f, &[3.0, 3.0], &opts);
        assert!(m.f <= 0.5 && m.f > 1e-3 && !m.converged);
    }

    #[test]
    fn bisection_brackets_root() {
        let (lo, hi) = bisect(|x| x * x - 2.0 > 0.0, 0.0, 2.0, 1e-12);
        assert!(hi - lo <= 1e-12);
        assert!((lo - 2f64.sqrt()).abs() < 1e-11);
    }
}
