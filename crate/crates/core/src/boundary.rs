//! PPT and separability boundaries in two planes of the simplex.
//!
//! Two-Bell plane: `(1 - alpha - beta) omega + alpha P_{1,0} + beta P_{2,0}`.
//! Symmetric plane: `(1 - alpha - beta) omega + alpha P_{0,0} + (beta/2)(P_{1,0} + P_{2,0})`.
//!
//! The separability border is found numerically with witnesses
//! `K = 1 + a P_{0,0} + b P_{1,0} + c P_{2,0}` normalised by `Tr(rho K) = 0`:
//! `rho` is entangled iff some such `K` has `min_phi lambda_min(M_phi) > 0`.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::{bisect, nelder_mead, NelderMeadOptions};
use crate::phase_space::PhasePoint;
use crate::ppt::{b_spectrum, in_two_bell_triangle, two_bell_coeffs};
use crate::simplex::SimplexState;
use crate::witness::{
    check_line_witness, min_eigen_line, region_vertex_state, LineWitness, PhiSearchOptions, RegionId,
    WitnessClass, WitnessRegion,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    TwoBell,
    Symmetric,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::TwoBell => "two-bell",
            Family::Symmetric => "symmetric",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        match s {
            "two-bell" => Ok(Family::TwoBell),
            "symmetric" => Ok(Family::Symmetric),
            _ => Err(Error::Parse(format!("unknown family {s:?} (expected two-bell or symmetric)"))),
        }
    }
}

/// Coefficients of the family member, unvalidated.
pub fn family_coeffs(family: Family, alpha: f64, beta: f64) -> [f64; 9] {
    match family {
        Family::TwoBell => two_bell_coeffs(alpha, beta),
        Family::Symmetric => {
            let off = (1.0 - alpha - beta) / 9.0;
            let mut c = [off; 9];
            c[PhasePoint::new(0, 0).index()] += alpha;
            c[PhasePoint::new(1, 0).index()] += beta / 2.0;
            c[PhasePoint::new(2, 0).index()] += beta / 2.0;
            c
        }
    }
}

pub fn in_family_simplex(family: Family, alpha: f64, beta: f64) -> bool {
    family_coeffs(family, alpha, beta).iter().all(|&v| v >= -1e-12)
}

pub fn family_state(family: Family, alpha: f64, beta: f64) -> Result<SimplexState> {
    if !in_family_simplex(family, alpha, beta) {
        return Err(Error::Domain(format!("({alpha}, {beta}) is outside the {family} family")));
    }
    SimplexState::with_tolerance(family_coeffs(family, alpha, beta).map(|v| v.max(0.0)), 1e-9)
}

/// Largest `beta` with `two_bell_ppt_value(alpha, beta) = 0`:
/// the upper root of `8 beta^2 + (2 - 11 alpha) beta - (1 - 2 alpha - 8 alpha^2) = 0`.
pub fn ppt_boundary_two_bell(alpha: f64) -> Result<f64> {
    let p = 2.0 - 11.0 * alpha;
    let q = 1.0 - 2.0 * alpha - 8.0 * alpha * alpha;
    let disc = p * p + 32.0 * q;
    if !alpha.is_finite() || disc < 0.0 {
        return Err(Error::Domain(format!("no PPT border at alpha = {alpha}")));
    }
    // Cancellation-free form of (-p + sqrt(disc)) / 16.
    let r = disc.sqrt();
    let beta = if p < 0.0 { (r - p) / 16.0 } else { 2.0 * q / (p + r) };
    if !in_two_bell_triangle(alpha, beta) {
        return Err(Error::Domain(format!("PPT border at alpha = {alpha} lies outside the triangle (beta = {beta})")));
    }
    Ok(beta)
}

/// Options for the numerical separability border.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SepOptions {
    /// Starting points for `(b, c)` (or whichever pair is free).
    pub lattice: Vec<[f64; 2]>,
    pub outer: NelderMeadOptions,
    /// Fast search over `phi` inside the outer loop.
    pub inner: PhiSearchOptions,
    /// Careful search used to confirm a positive minimum.
    pub confirm: PhiSearchOptions,
    /// Half-width of the bisection bracket around the PPT border.
    pub bracket: f64,
    /// Root tolerance in `beta` (or ray parameter).
    pub tol: f64,
    /// A confirmed minimum above this counts as a witness.
    pub positive_tol: f64,
}

impl Default for SepOptions {
    fn default() -> Self {
        let mut lattice = Vec::new();
        for b in [-4.0, 0.0, 4.0] {
            for c in [-4.0, 0.0, 4.0] {
                if b != 0.0 || c != 0.0 {
                    lattice.push([b, c]);
                }
            }
        }
        SepOptions {
            lattice,
            outer: NelderMeadOptions { step: 0.5, xtol: 1e-10, ftol: 0.0, max_evals: 500, target: -1e-6 },
            inner: PhiSearchOptions {
                grid: 20,
                polish_starts: 2,
                polish: NelderMeadOptions { step: 0.05, xtol: 1e-11, ftol: 0.0, max_evals: 300, target: f64::NEG_INFINITY },
                general_starts: 0,
            },
            confirm: PhiSearchOptions::default(),
            bracket: 0.05,
            tol: 1e-8,
            positive_tol: 1e-12,
        }
    }
}

/// Witness with `lambda = 3`, `gamma = (a, b, c)`, i.e. `1 + a P00 + b P10 + c P20`,
/// with `gamma[pivot]` fixed by `1 + sum_k gamma_k col_k = 0`.
pub fn trace_solved_witness(col: [f64; 3], pivot: usize, free: [f64; 2]) -> LineWitness {
    let mut g = [0.0; 3];
    let mut it = free.iter();
    for (k, gk) in g.iter_mut().enumerate() {
        if k != pivot {
            *gk = *it.next().expect("two free slots");
        }
    }
    let rest: f64 = (0..3).filter(|&k| k != pivot).map(|k| g[k] * col[k]).sum();
    g[pivot] = -(1.0 + rest) / col[pivot];
    LineWitness { lambda: 3.0, gamma: g }
}

fn column0(c: &[f64; 9]) -> [f64; 3] {
    std::array::from_fn(|k| c[PhasePoint::new(k as i64, 0).index()])
}

/// Result of maximising `h(b, c) = min_phi lambda_min(M_phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessCertificate {
    /// `(a, b, c)`.
    pub witness: [f64; 3],
    pub free: [f64; 2],
    pub pivot: usize,
    /// `min_phi lambda_min(M_phi)` from the careful search.
    pub min_eigenvalue: f64,
    /// A minimising `phi` (real, nonnegative).
    pub phi: [f64; 3],
    /// True when the careful search confirmed a positive minimum.
    pub confirmed: bool,
}

impl WitnessCertificate {
    pub fn line_witness(&self) -> LineWitness {
        LineWitness { lambda: 3.0, gamma: self.witness }
    }
}

/// Evaluate `F` for the state with the given coefficients: the largest
/// `min_phi lambda_min(M_phi)` found, confirmed when positive.
pub fn max_min_eigen(
    coeffs: &[f64; 9],
    pivot: usize,
    warm: Option<[f64; 2]>,
    opts: &SepOptions,
) -> (WitnessCertificate, usize) {
    let col = column0(coeffs);
    let h = |free: &[f64]| -> f64 {
        let k = trace_solved_witness(col, pivot, [free[0], free[1]]);
        min_eigen_line(&k, &opts.inner).value
    };
    let mut evals = 0;
    let mut best: Option<([f64; 2], f64)> = None;
    let mut starts: Vec<[f64; 2]> = warm.into_iter().collect();
    starts.extend(opts.lattice.iter().copied());
    for x0 in starts {
        let m = nelder_mead(|x| -h(x), &x0, &opts.outer);
        evals += m.evals;
        let cand = ([m.x[0], m.x[1]], -m.f);
        if best.map_or(true, |b| cand.1 > b.1) {
            best = Some(cand);
        }
        if cand.1 > opts.positive_tol {
            let k = trace_solved_witness(col, pivot, cand.0);
            let fine = min_eigen_line(&k, &opts.confirm);
            if fine.value > opts.positive_tol {
                let cert = WitnessCertificate {
                    witness: k.gamma,
                    free: cand.0,
                    pivot,
                    min_eigenvalue: fine.value,
                    phi: [fine.phi[0].re, fine.phi[1].re, fine.phi[2].re],
                    confirmed: true,
                };
                return (cert, evals);
            }
        }
    }
    let (free, _) = best.expect("at least one start");
    let k = trace_solved_witness(col, pivot, free);
    let fine = min_eigen_line(&k, &opts.confirm);
    let cert = WitnessCertificate {
        witness: k.gamma,
        free,
        pivot,
        min_eigenvalue: fine.value,
        phi: [fine.phi[0].re, fine.phi[1].re, fine.phi[2].re],
        confirmed: false,
    };
    (cert, evals)
}

/// The detecting witness pushed down to tangency: `K = 1 + a P00 + b P10 + c P20`
/// with `min_phi lambda_min(M_phi) = 0` attained at `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentCertificate {
    pub witness: [f64; 3],
    pub phi: [f64; 3],
    /// `lambda_min(M_phi)` at `phi`.
    pub min_eigenvalue: f64,
    /// `Tr(rho K)` at the reported border (slightly negative).
    pub expectation: f64,
}

/// Shift `lambda` by the detection margin `h` and renormalise to `lambda = 3`.
pub fn tangent_certificate(cert: &WitnessCertificate, coeffs: &[f64; 9], opts: &SepOptions) -> TangentCertificate {
    let h = cert.min_eigenvalue;
    let scale = 3.0 / (3.0 - h);
    let k = LineWitness { lambda: 3.0, gamma: cert.witness.map(|g| g * scale) };
    let m = min_eigen_line(&k, &opts.confirm);
    let expectation = k.to_general().kappa.iter().zip(coeffs).map(|(a, b)| a * b).sum();
    TangentCertificate {
        witness: k.gamma,
        phi: [m.phi[0].re, m.phi[1].re, m.phi[2].re],
        min_eigenvalue: m.value,
        expectation,
    }
}

/// Located separability border along a one-parameter path of states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SepBoundary {
    /// Smallest entangled parameter found (upper end of the final bracket).
    pub t: f64,
    pub bracket: (f64, f64),
    /// Witness detecting the state at `t`.
    pub certificate: WitnessCertificate,
    /// The same witness made tangent.
    pub tangent: TangentCertificate,
    pub evaluations: usize,
}

/// Bisection on "a witness detects the state" for `t` in
/// `[centre - bracket, centre + bracket]`, clipped to `[t_min, t_max]`.
pub fn sep_threshold<P: Fn(f64) -> [f64; 9]>(
    path: P,
    centre: f64,
    t_min: f64,
    t_max: f64,
    pivot: usize,
    opts: &SepOptions,
) -> Result<SepBoundary> {
    let mut lo = (centre - opts.bracket).max(t_min);
    let mut hi = (centre + opts.bracket).min(t_max);
    let mut evaluations = 0;
    let mut warm = None;
    let mut eval = |t: f64, warm: &mut Option<[f64; 2]>| {
        let (cert, n) = max_min_eigen(&path(t), pivot, *warm, opts);
        evaluations += n;
        *warm = Some(cert.free);
        cert
    };
    let top = eval(hi, &mut warm);
    if !top.confirmed {
        return Err(Error::Optimizer(format!(
            "no witness found at the upper bracket end t = {hi}: best (a, b, c) = {:?}, min eigenvalue {:.3e}, phi = {:?}",
            top.witness, top.min_eigenvalue, top.phi
        )));
    }
    let bottom = eval(lo, &mut warm);
    if bottom.confirmed {
        return Err(Error::Optimizer(format!(
            "witness found at the lower bracket end t = {lo}: (a, b, c) = {:?}, min eigenvalue {:.3e}",
            bottom.witness, bottom.min_eigenvalue
        )));
    }
    let mut certificate = top;
    warm = Some(top.free);
    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        let cert = eval(mid, &mut warm);
        if cert.confirmed {
            hi = mid;
            certificate = cert;
        } else {
            lo = mid;
            // Keep the warm start at the last detected state.
            warm = Some(certificate.free);
        }
    }
    let tangent = tangent_certificate(&certificate, &path(hi), opts);
    Ok(SepBoundary { t: hi, bracket: (lo, hi), certificate, tangent, evaluations })
}

/// Upper limit of `beta` inside the two-Bell triangle at fixed `alpha`.
fn two_bell_beta_range(alpha: f64) -> (f64, f64) {
    // off + beta >= 0, off + alpha >= 0, off >= 0.
    let lo = -(1.0 - alpha) / 8.0;
    let hi = (1.0 + 8.0 * alpha).min(1.0 - alpha);
    (lo, hi)
}

/// Numerical separability border of the two-Bell family at fixed `alpha`;
/// the trace condition is solved for `a`.
pub fn sep_boundary_two_bell(alpha: f64, opts: &SepOptions) -> Result<SepBoundary> {
    let centre = ppt_boundary_two_bell(alpha)?;
    let (lo, hi) = two_bell_beta_range(alpha);
    // Stay away from the face off = 0, where a is undetermined.
    let hi = hi.min(1.0 - alpha - 1e-6);
    sep_threshold(|b| two_bell_coeffs(alpha, b), centre, lo, hi, 0, opts)
}

/// Certificates that a PPT state is entangled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub alpha: f64,
    pub beta: f64,
    /// Smallest eigenvalue of the partial transpose.
    pub ppt_min_eigenvalue: f64,
    /// `K' = K - (h/6) 1`, strictly positive on product states.
    pub witness: LineWitness,
    /// `Tr(rho K')`.
    pub expectation: f64,
    /// `min_phi lambda_min(M_phi)` for `K'`.
    pub witness_min_eigenvalue: f64,
    pub witness_class: WitnessClass,
}

impl BoundCertificate {
    pub fn holds(&self) -> bool {
        self.ppt_min_eigenvalue >= -1e-12
            && self.expectation < -1e-9
            && self.witness_min_eigenvalue > 0.0
            && self.witness_class == WitnessClass::Structural
    }
}

/// Try to certify bound entanglement of the family state at `(alpha, beta)`.
pub fn certify_bound(family: Family, alpha: f64, beta: f64, pivot: usize, opts: &SepOptions) -> Result<Option<BoundCertificate>> {
    let s = family_state(family, alpha, beta)?;
    let ppt_min = b_spectrum(&s)[0];
    let (cert, _) = max_min_eigen(s.coeffs(), pivot, None, opts);
    if !cert.confirmed {
        return Ok(None);
    }
    let h = cert.min_eigenvalue;
    let shifted = LineWitness { lambda: 3.0 - h / 2.0, gamma: cert.witness };
    let expectation = shifted.to_general().expectation(&s);
    let min = min_eigen_line(&shifted, &opts.confirm).value;
    Ok(Some(BoundCertificate {
        alpha,
        beta,
        ppt_min_eigenvalue: ppt_min,
        witness: shifted,
        expectation,
        witness_min_eigenvalue: min,
        witness_class: check_line_witness(&shifted),
    }))
}

/// Polygon of separable states in the symmetric plane, as `(alpha, beta)`
/// of `sigma_d, sigma_a, sigma_b, sigma_c` in order.
pub const SYMMETRIC_POLYGON: [(RegionId, f64, f64); 4] = [
    (RegionId::D, -1.0 / 6.0, -1.0 / 3.0),
    (RegionId::A, 2.0 / 9.0, -2.0 / 9.0),
    (RegionId::B, 1.0 / 3.0, 2.0 / 3.0),
    (RegionId::C, -1.0 / 12.0, 1.0 / 3.0),
];

/// Analytic border point on the ray `omega + t (cos theta, sin theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricBoundary {
    pub theta: f64,
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Vertices spanning the edge that is hit.
    pub edge: (RegionId, RegionId),
    /// Tangential witness vanishing on that whole edge.
    pub witness: LineWitness,
}

fn edge_witness(from: RegionId, to: RegionId) -> LineWitness {
    let r = match (from, to) {
        (RegionId::D, RegionId::A) => WitnessRegion::D(1.0),
        (RegionId::A, RegionId::B) => WitnessRegion::A(0.0),
        (RegionId::B, RegionId::C) => WitnessRegion::C(1.0 / 3.0),
        _ => WitnessRegion::D(0.0),
    };
    crate::witness::region_witness(&r).expect("parameters in range")
}

/// Separability border in the symmetric plane from the analytic region
/// catalogue: the ray from `omega` leaves the quadrilateral
/// `sigma_d sigma_a sigma_b sigma_c`.
pub fn sep_boundary_symmetric(theta: f64) -> SymmetricBoundary {
    let (s, c) = theta.sin_cos();
    let mut best: Option<SymmetricBoundary> = None;
    for i in 0..4 {
        let (ra, a0, b0) = SYMMETRIC_POLYGON[i];
        let (rb, a1, b1) = SYMMETRIC_POLYGON[(i + 1) % 4];
        // Solve t (c, s) = P0 + u (P1 - P0).
        let (ea, eb) = (a1 - a0, b1 - b0);
        let det = c * (-eb) - s * (-ea);
        if det.abs() < 1e-300 {
            continue;
        }
        let t = (a0 * (-eb) - b0 * (-ea)) / det;
        let u = (c * b0 - s * a0) / det;
        if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) && best.map_or(true, |b| t < b.t) {
            best = Some(SymmetricBoundary {
                theta,
                t,
                alpha: t * c,
                beta: t * s,
                edge: (ra, rb),
                witness: edge_witness(ra, rb),
            });
        }
    }
    best.expect("omega is interior to the polygon")
}

/// Coefficients on the symmetric ray.
pub fn symmetric_ray_coeffs(theta: f64, t: f64) -> [f64; 9] {
    family_coeffs(Family::Symmetric, t * theta.cos(), t * theta.sin())
}

/// Where a ray `omega + t d` (coefficients affine in `t`) leaves the simplex.
fn ray_exit<P: Fn(f64) -> [f64; 9]>(path: &P) -> f64 {
    let c0 = path(0.0);
    let c1 = path(1.0);
    let mut t = f64::INFINITY;
    for i in 0..9 {
        let d = c1[i] - c0[i];
        if d < 0.0 {
            t = t.min(c0[i] / -d);
        }
    }
    t
}

/// PPT border along a path of states: bisection on the sign of the smallest
/// eigenvalue of `B` after a coarse scan locates the last PPT-to-NPT switch
/// in `[t_min, t_max]`. Returns `t_max` when the whole path is PPT.
pub fn ppt_threshold<P: Fn(f64) -> [f64; 9]>(path: P, t_min: f64, t_max: f64, tol: f64) -> Result<f64> {
    let ppt = |t: f64| -> bool {
        let s = SimplexState::with_tolerance(path(t).map(|v| v.max(0.0)), 1e-9).expect("path inside the simplex");
        b_spectrum(&s)[0] >= 0.0
    };
    let n = 400;
    let ts: Vec<f64> = (0..=n).map(|i| t_min + (t_max - t_min) * i as f64 / n as f64).collect();
    let flags: Vec<bool> = ts.iter().map(|&t| ppt(t)).collect();
    let Some(last) = flags.iter().rposition(|&f| f) else {
        return Err(Error::Domain("no PPT state on the path".into()));
    };
    if last == n {
        return Ok(t_max);
    }
    let (lo, hi) = bisect(|t| !ppt(t), ts[last], ts[last + 1], tol);
    Ok(0.5 * (lo + hi))
}

/// Numerical PPT border on the symmetric ray.
pub fn ppt_boundary_symmetric_ray(theta: f64) -> Result<f64> {
    let path = |t| symmetric_ray_coeffs(theta, t);
    let exit = ray_exit(&path);
    ppt_threshold(path, 0.0, exit, 1e-13)
}

fn largest_column0(c: &[f64; 9]) -> usize {
    let col = column0(c);
    (0..3).max_by(|&a, &b| col[a].total_cmp(&col[b])).expect("three entries")
}

/// Numerical separability border on a symmetric ray; the trace condition is
/// solved for the witness coefficient of the largest column entry.
pub fn sep_boundary_symmetric_numeric(theta: f64, opts: &SepOptions) -> Result<SepBoundary> {
    let path = |t| symmetric_ray_coeffs(theta, t);
    let exit = ray_exit(&path);
    let centre = ppt_boundary_symmetric_ray(theta)?;
    let pivot = largest_column0(&path(centre));
    sep_threshold(path, centre, 0.0, exit, pivot, opts)
}

/// Options for [`scan`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanOptions {
    pub sep: SepOptions,
    /// Worker threads; 0 means the rayon default.
    pub threads: usize,
    /// Minimal `beta_ppt - beta_sep` before bound entanglement is tested.
    pub bound_min_gap: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { sep: SepOptions::default(), threads: 0, bound_min_gap: 1e-6 }
    }
}

impl ScanOptions {
    /// Thread count from `MS_THREADS` when set.
    pub fn from_env() -> ScanOptions {
        let threads = std::env::var("MS_THREADS").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0);
        ScanOptions { threads, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySample {
    pub alpha: f64,
    pub beta_ppt: f64,
    pub beta_sep: f64,
    /// `beta_sep - beta_ppt`.
    pub gap: f64,
    pub bound_flag: bool,
    pub certificate: Option<SepBoundary>,
    pub bound: Option<BoundCertificate>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve {
    pub family: Family,
    pub alphas: Vec<f64>,
    pub samples: Vec<BoundarySample>,
    pub options: ScanOptions,
}

/// `n` equally spaced values in `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

fn symmetric_column_range(alpha: f64) -> (f64, f64) {
    // off + alpha >= 0, off + beta/2 >= 0, off >= 0.
    let lo = -(1.0 - alpha) / 3.5;
    let hi = (1.0 + 8.0 * alpha).min(1.0 - alpha);
    (lo, hi)
}

fn scan_point(family: Family, alpha: f64, opts: &ScanOptions) -> BoundarySample {
    let failed = |e: Error| BoundarySample {
        alpha,
        beta_ppt: f64::NAN,
        beta_sep: f64::NAN,
        gap: f64::NAN,
        bound_flag: false,
        certificate: None,
        bound: None,
        error: Some(e.to_string()),
    };
    let located = match family {
        Family::TwoBell => ppt_boundary_two_bell(alpha).and_then(|bp| Ok((bp, sep_boundary_two_bell(alpha, &opts.sep)?, 0))),
        Family::Symmetric => (|| {
            let (lo, hi) = symmetric_column_range(alpha);
            let hi = hi.min(1.0 - alpha - 1e-6);
            if !(lo < hi) {
                return Err(Error::Domain(format!("alpha = {alpha} leaves no room in the symmetric family")));
            }
            let path = |b| family_coeffs(Family::Symmetric, alpha, b);
            let bp = ppt_threshold(path, lo, hi, 1e-13)?;
            let pivot = largest_column0(&path(bp));
            Ok((bp, sep_threshold(path, bp, lo, hi, pivot, &opts.sep)?, pivot))
        })(),
    };
    let (beta_ppt, sep, pivot) = match located {
        Ok(v) => v,
        Err(e) => return failed(e),
    };
    let gap = sep.t - beta_ppt;
    let mut bound = None;
    if -gap > opts.bound_min_gap {
        match certify_bound(family, alpha, 0.5 * (sep.t + beta_ppt), pivot, &opts.sep) {
            Ok(b) => bound = b,
            Err(e) => return failed(e),
        }
    }
    BoundarySample {
        alpha,
        beta_ppt,
        beta_sep: sep.t,
        gap,
        bound_flag: bound.map_or(false, |b| b.holds()),
        certificate: Some(sep),
        bound,
        error: None,
    }
}

/// Both borders and their gap on an increasing grid of `alpha`. Points are
/// evaluated in parallel; failures are recorded per sample.
pub fn scan(family: Family, alphas: &[f64], opts: &ScanOptions) -> Result<BoundaryCurve> {
    if alphas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("alpha grid must be strictly increasing".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let samples = pool.install(|| alphas.par_iter().map(|&a| scan_point(family, a, opts)).collect());
    Ok(BoundaryCurve { family, alphas: alphas.to_vec(), samples, options: opts.clone() })
}

/// CSV with 17 significant digits: alpha, beta_ppt, beta_sep, gap,
/// bound_flag, witness_a, witness_b, witness_c.
pub fn write_curve_csv<W: Write>(curve: &BoundaryCurve, mut w: W) -> std::io::Result<()> {
    writeln!(w, "alpha,beta_ppt,beta_sep,gap,bound_flag,witness_a,witness_b,witness_c")?;
    for s in &curve.samples {
        let wit = s.certificate.map_or([f64::NAN; 3], |c| c.tangent.witness);
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e}",
            s.alpha, s.beta_ppt, s.beta_sep, s.gap, s.bound_flag, wit[0], wit[1], wit[2]
        )?;
    }
    Ok(())
}

pub fn curve_json(curve: &BoundaryCurve) -> Result<String> {
    serde_json::to_string_pretty(curve).map_err(|e| Error::Internal(e.to_string()))
}

/// Expectation of each edge witness on the polygon vertices, for checks.
pub fn polygon_witness_values() -> Vec<((RegionId, RegionId), [f64; 4])> {
    (0..4)
        .map(|i| {
            let e = (SYMMETRIC_POLYGON[i].0, SYMMETRIC_POLYGON[(i + 1) % 4].0);
            let k = edge_witness(e.0, e.1).to_general();
            let v = SYMMETRIC_POLYGON.map(|(r, _, _)| k.expectation(&region_vertex_state(r)));
            (e, v)
        })
        .collect()
}
