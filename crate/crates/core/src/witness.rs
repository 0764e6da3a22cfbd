//! Entanglement witnesses diagonal in the Bell basis.
//!
//! For `K = sum kappa_{k,l} P_{k,l}` and a product vector `psi ⊗ eta`,
//! `<psi,eta|K|psi,eta> = (1/3) <psi|M_phi|psi>` with `phi = conj(eta)` and
//! `M_phi = sum kappa_{k,l} W_{k,l} |phi><phi| W_{k,l}^†`. So `K` is
//! nonnegative on separable states iff every `M_phi` is positive
//! semidefinite.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::eig3::min_eigval_hermitian3;
use crate::error::{Error, Result};
use crate::linalg::{c, outer3, Mat3, Vec3, C64, W_POW};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::phase_space::{enumerate_lines, PhasePoint};
use crate::simplex::{rho_line, HermitianCombination, SimplexState};
use crate::weyl_bell::weyl_at;

/// Tolerance for tangency in the closed-form test.
pub const TANGENCY_TOL: f64 = 1e-10;
/// Tolerance on the numerical minimum over `phi`.
pub const STRUCTURAL_TOL: f64 = 1e-9;

/// `K = sum kappa_{k,l} P_{k,l}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralWitness {
    pub kappa: [f64; 9],
}

impl GeneralWitness {
    pub fn new(kappa: [f64; 9]) -> Result<GeneralWitness> {
        if kappa.iter().all(|&v| v == 0.0) {
            return Err(Error::NotWitnessCandidate("all coefficients vanish".into()));
        }
        if kappa.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotWitnessCandidate("non-finite coefficient".into()));
        }
        Ok(GeneralWitness { kappa })
    }

    pub fn as_combination(&self) -> HermitianCombination {
        HermitianCombination::new(self.kappa)
    }

    /// `Tr(K rho)`.
    pub fn expectation(&self, s: &SimplexState) -> f64 {
        self.kappa.iter().zip(s.coeffs()).map(|(a, b)| a * b).sum()
    }

    /// Recognise `lambda/3 + gamma_k delta_{l,0}`.
    pub fn as_line_witness(&self) -> Option<LineWitness> {
        let off = self.kappa[PhasePoint::new(0, 1).index()];
        let uniform_off = PhasePoint::all()
            .filter(|x| x.l.idx() != 0)
            .all(|x| (self.kappa[x.index()] - off).abs() <= 1e-15 * (1.0 + off.abs()));
        if !uniform_off || off < 0.0 {
            return None;
        }
        let lambda = 3.0 * off;
        let g = |k: i64| self.kappa[PhasePoint::new(k, 0).index()] - off;
        LineWitness::new(lambda, g(0), g(1), g(2)).ok()
    }
}

/// `K = (lambda/3) 1 + sum_k gamma_k P_{k,0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineWitness {
    pub lambda: f64,
    pub gamma: [f64; 3],
}

impl LineWitness {
    pub fn new(lambda: f64, g0: f64, g1: f64, g2: f64) -> Result<LineWitness> {
        if !(lambda >= 0.0) {
            return Err(Error::NotWitnessCandidate(format!("lambda = {lambda} is negative")));
        }
        if ![g0, g1, g2].iter().all(|v| v.is_finite()) {
            return Err(Error::NotWitnessCandidate("non-finite gamma".into()));
        }
        if lambda == 0.0 && g0 == 0.0 && g1 == 0.0 && g2 == 0.0 {
            return Err(Error::NotWitnessCandidate("all coefficients vanish".into()));
        }
        Ok(LineWitness { lambda, gamma: [g0, g1, g2] })
    }

    /// Symmetric part `(gamma_1 + gamma_2)/2`.
    pub fn gamma_sym(&self) -> f64 {
        0.5 * (self.gamma[1] + self.gamma[2])
    }

    /// Antisymmetric part `(gamma_1 - gamma_2)/2`.
    pub fn delta(&self) -> f64 {
        0.5 * (self.gamma[1] - self.gamma[2])
    }

    pub fn to_general(&self) -> GeneralWitness {
        let mut kappa = [self.lambda / 3.0; 9];
        for k in 0..3 {
            kappa[PhasePoint::new(k as i64, 0).index()] += self.gamma[k];
        }
        GeneralWitness { kappa }
    }

    pub fn sym_products(&self) -> (f64, f64) {
        let [g0, g1, g2] = self.gamma;
        (g0 * g1 + g1 * g2 + g2 * g0, g0 * g1 * g2)
    }

    /// `M_phi = lambda 1 + sum_k gamma_k D_k |phi><phi| D_k^†` with the clock
    /// matrices `D_k = W_{k,0}`, assembled entrywise.
    pub fn m_phi(&self, phi: &Vec3) -> Mat3 {
        // (D_k phi)_s = w^{ks} phi_s, so entry (s,t) is phi_s conj(phi_t) g(s-t)
        // with g(m) = sum_k gamma_k w^{km}.
        let g: [C64; 3] = std::array::from_fn(|m| {
            (0..3).map(|k| W_POW[(k * m) % 3] * self.gamma[k]).sum()
        });
        Mat3::from_fn(|s, t| {
            let v = phi[s] * phi[t].conj() * g[(s + 3 - t) % 3];
            if s == t {
                v + c(self.lambda)
            } else {
                v
            }
        })
    }
}

/// `M_phi = sum kappa_{k,l} W_{k,l} |phi><phi| W_{k,l}^†`.
pub fn m_phi(k: &GeneralWitness, phi: &Vec3) -> Mat3 {
    let pp = outer3(phi);
    PhasePoint::all().fold(Mat3::zeros(), |acc, x| {
        let w = weyl_at(x);
        acc + w * pp * w.adjoint() * c(k.kappa[x.index()])
    })
}

/// `f_A = 3(p0 p1 + p1 p2 + p2 p0)` and `f_B = 27 p0 p1 p2`, `p_s = |phi_s|^2`.
pub fn f_products(phi: &Vec3) -> (f64, f64) {
    let p: [f64; 3] = std::array::from_fn(|s| phi[s].norm_sqr());
    (3.0 * (p[0] * p[1] + p[1] * p[2] + p[2] * p[0]), 27.0 * p[0] * p[1] * p[2])
}

/// The same in the reduced coordinates `z = phi_0^2`, `x = (phi_1^2 - phi_2^2)/2`.
pub fn f_products_zx(z: f64, x: f64) -> (f64, f64) {
    let fa = 0.75 * (1.0 + 2.0 * z - 3.0 * z * z) - 3.0 * x * x;
    let fb = 27.0 * z * ((1.0 - z) * (1.0 - z) / 4.0 - x * x);
    (fa, fb)
}

/// `det M_phi = lambda^3 + S lambda^2 + f_A A lambda + f_B B`, with
/// `S = sum gamma`, `A`, `B` the elementary symmetric products.
pub fn det_m_phi_closed(k: &LineWitness, phi: &Vec3) -> f64 {
    let l = k.lambda;
    let s: f64 = k.gamma.iter().sum();
    let (a, b) = k.sym_products();
    let (fa, fb) = f_products(phi);
    l * l * l + s * l * l + fa * a * l + fb * b
}

/// Minima over unit `phi` of `A f_A` and of `A f_A + B f_B`:
/// `min{0, A}` and `min{0, 3A/4, A + B}`.
pub fn min_products(sym_a: f64, sym_b: f64) -> (f64, f64) {
    (sym_a.min(0.0), 0.0f64.min(0.75 * sym_a).min(sym_a + sym_b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WitnessClass {
    NotWitness,
    Structural,
    Tangential,
}

/// Closed-form classification of a line witness from the three
/// characteristic-polynomial coefficients of `M_phi`, minimised over `phi`.
pub fn check_line_witness(k: &LineWitness) -> WitnessClass {
    if k.lambda == 0.0 {
        return if k.gamma.iter().all(|&g| g >= 0.0) {
            WitnessClass::Tangential
        } else {
            WitnessClass::NotWitness
        };
    }
    let g = k.gamma.map(|v| v / k.lambda);
    let s: f64 = g.iter().sum();
    let a = g[0] * g[1] + g[1] * g[2] + g[2] * g[0];
    let b = g[0] * g[1] * g[2];
    let (min_a, min_ab) = min_products(a, b);
    let trace = 3.0 + s;
    let second = 3.0 + 2.0 * s + min_a;
    let det = 1.0 + s + min_ab;
    if trace < -TANGENCY_TOL || second < -TANGENCY_TOL || det < -TANGENCY_TOL {
        WitnessClass::NotWitness
    } else if det.abs() <= TANGENCY_TOL {
        WitnessClass::Tangential
    } else {
        WitnessClass::Structural
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiSearchOptions {
    /// Points per side of the `(z, x)` triangle grid.
    pub grid: usize,
    /// How many of the best grid points are polished.
    pub polish_starts: usize,
    pub polish: NelderMeadOptions,
    /// Multistart count for general (non-line) witnesses.
    pub general_starts: usize,
}

impl Default for PhiSearchOptions {
    fn default() -> Self {
        PhiSearchOptions {
            grid: 64,
            polish_starts: 3,
            polish: NelderMeadOptions { step: 0.05, xtol: 1e-12, ftol: 0.0, max_evals: 400, target: f64::NEG_INFINITY },
            general_starts: 24,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiMinimum {
    pub value: f64,
    pub phi: Vec3,
}

/// Real nonnegative unit vector from `(z, x)`.
pub fn phi_from_zx(z: f64, x: f64) -> Vec3 {
    let z = z.clamp(0.0, 1.0);
    let h = (1.0 - z) / 2.0;
    let x = x.clamp(-h, h);
    Vec3::new(c(z.sqrt()), c((h + x).max(0.0).sqrt()), c((h - x).max(0.0).sqrt()))
}

fn phi_from_angles(t: &[f64]) -> Vec3 {
    let (s1, c1) = t[0].sin_cos();
    let (s2, c2) = t[1].sin_cos();
    Vec3::new(c(c1.abs()), c((s1 * c2).abs()), c((s1 * s2).abs()))
}

fn angles_from_phi(phi: &Vec3) -> [f64; 2] {
    let t1 = phi[0].re.clamp(-1.0, 1.0).acos();
    let t2 = phi[2].re.atan2(phi[1].re);
    [t1, t2]
}

/// Candidate minimisers where the extrema of f_A and f_B sit.
pub fn special_vectors() -> [Vec3; 3] {
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let r3 = 1.0 / 3f64.sqrt();
    [
        Vec3::new(c(1.0), c(0.0), c(0.0)),
        Vec3::new(c(r2), c(r2), c(0.0)),
        Vec3::new(c(r3), c(r3), c(r3)),
    ]
}

/// Minimum over real nonnegative unit `phi` of `lambda_min(M_phi)` for a
/// line witness (complex phases can be removed by a diagonal unitary, so
/// this is the minimum over all `phi`).
pub fn min_eigen_line(k: &LineWitness, opts: &PhiSearchOptions) -> PhiMinimum {
    let eval = |phi: &Vec3| min_eigval_hermitian3(&k.m_phi(phi));
    let n = opts.grid.max(2);
    let mut cands: Vec<(f64, Vec3)> = Vec::with_capacity(n * n + 9);
    for i in 0..n {
        let z = i as f64 / (n - 1) as f64;
        let h = (1.0 - z) / 2.0;
        for j in 0..n {
            let x = (-1.0 + 2.0 * j as f64 / (n - 1) as f64) * h;
            let phi = phi_from_zx(z, x);
            cands.push((eval(&phi), phi));
        }
    }
    for v in special_vectors() {
        for r in 0..3 {
            let phi = Vec3::from_fn(|s, _| v[(s + r) % 3]);
            cands.push((eval(&phi), phi));
        }
    }
    // Ties broken lexicographically by (phi_0, phi_1) for determinism.
    cands.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1[0].re.total_cmp(&b.1[0].re))
            .then(a.1[1].re.total_cmp(&b.1[1].re))
    });
    let mut best = PhiMinimum { value: cands[0].0, phi: cands[0].1 };
    for (_, phi) in cands.iter().take(opts.polish_starts) {
        let m = nelder_mead(|t| eval(&phi_from_angles(t)), &angles_from_phi(phi), &opts.polish);
        if m.f < best.value {
            best = PhiMinimum { value: m.f, phi: phi_from_angles(&m.x) };
        }
    }
    best
}

fn phi_general(t: &[f64]) -> Vec3 {
    let base = phi_from_angles(&t[..2]);
    Vec3::new(
        base[0],
        base[1] * C64::from_polar(1.0, t[2]),
        base[2] * C64::from_polar(1.0, t[3]),
    )
}

/// Minimum over unit `phi` of `lambda_min(M_phi)`. Line witnesses take the
/// reduced real search; other witnesses get a deterministic multistart over
/// the full complex sphere.
pub fn min_eigen_over_phi(k: &GeneralWitness, opts: &PhiSearchOptions) -> PhiMinimum {
    if let Some(lw) = k.as_line_witness() {
        return min_eigen_line(&lw, opts);
    }
    let eval = |t: &[f64]| min_eigval_hermitian3(&m_phi(k, &phi_general(t)));
    let mut best: Option<PhiMinimum> = None;
    let m = opts.general_starts.max(1);
    for i in 0..m {
        // Low-discrepancy starts (golden-ratio sequence) in the angle box.
        let u = |j: f64| ((i as f64 + 0.5) * j).fract();
        let x0 = [
            u(0.618_033_988_75) * FRAC_PI_2,
            u(0.754_877_666_25) * FRAC_PI_2,
            u(0.569_840_290_99) * std::f64::consts::TAU,
            u(0.855_670_609_35) * std::f64::consts::TAU,
        ];
        let r = nelder_mead(eval, &x0, &NelderMeadOptions { step: 0.3, max_evals: 2000, ..opts.polish });
        if best.map_or(true, |b| r.f < b.value) {
            best = Some(PhiMinimum { value: r.f, phi: phi_general(&r.x) });
        }
    }
    best.expect("at least one start")
}

/// The four analytically described families of tangential witnesses for
/// states symmetric under `P_{1,0} <-> P_{2,0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WitnessRegion {
    /// `lambda = 1, gamma_0 = -1`, `gamma >= 0`.
    A(f64),
    /// `lambda = 1, gamma_0 = -1 - 2 gamma`, `-2/3 <= gamma <= 0`.
    B(f64),
    /// `lambda = 1, gamma = -2/3`, `gamma_0 >= 1/3`.
    C(f64),
    /// `lambda = 0, gamma_0 = 1 - gamma`, `0 <= gamma <= 1`.
    D(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionId {
    A,
    B,
    C,
    D,
}

impl WitnessRegion {
    pub fn id(&self) -> RegionId {
        match self {
            WitnessRegion::A(_) => RegionId::A,
            WitnessRegion::B(_) => RegionId::B,
            WitnessRegion::C(_) => RegionId::C,
            WitnessRegion::D(_) => RegionId::D,
        }
    }

    pub fn parameter_range(id: RegionId) -> (f64, f64) {
        match id {
            RegionId::A => (0.0, f64::INFINITY),
            RegionId::B => (-2.0 / 3.0, 0.0),
            RegionId::C => (1.0 / 3.0, f64::INFINITY),
            RegionId::D => (0.0, 1.0),
        }
    }
}

pub fn region_witness(r: &WitnessRegion) -> Result<LineWitness> {
    let (lo, hi) = WitnessRegion::parameter_range(r.id());
    let p = match *r {
        WitnessRegion::A(p) | WitnessRegion::B(p) | WitnessRegion::C(p) | WitnessRegion::D(p) => p,
    };
    if !(p >= lo - 1e-15 && p <= hi + 1e-15) {
        return Err(Error::Domain(format!("parameter {p} outside [{lo}, {hi}] for region {:?}", r.id())));
    }
    match *r {
        WitnessRegion::A(g) => LineWitness::new(1.0, -1.0, g, g),
        WitnessRegion::B(g) => LineWitness::new(1.0, -1.0 - 2.0 * g, g, g),
        WitnessRegion::C(g0) => LineWitness::new(1.0, g0, -2.0 / 3.0, -2.0 / 3.0),
        WitnessRegion::D(g) => LineWitness::new(0.0, 1.0 - g, g, g),
    }
}

/// Coefficients with `line` on the column `l = 0` (indexed by `k`) and the
/// same value `off` on the other six points.
fn column_state(line: [f64; 3], off: f64) -> SimplexState {
    let mut c = [off; 9];
    for k in 0..3 {
        c[PhasePoint::new(k as i64, 0).index()] = line[k];
    }
    SimplexState::with_tolerance(c, 1e-12).expect("valid by construction")
}

/// Separable vertex annihilated by every witness of the region.
pub fn region_vertex_state(id: RegionId) -> SimplexState {
    match id {
        // omega + (2/9) P00 - (1/9)(P10 + P20)
        RegionId::A => column_state([1.0 / 3.0, 0.0, 0.0], 1.0 / 9.0),
        RegionId::B => rho_line(&enumerate_lines()[0]),
        // (3/4)(omega - (1/9) P00 + (2/9)(P10 + P20))
        RegionId::C => column_state([0.0, 0.25, 0.25], 1.0 / 12.0),
        // (rho_line(l=1) + rho_line(l=2)) / 2
        RegionId::D => column_state([0.0, 0.0, 0.0], 1.0 / 6.0),
    }
}

/// `(3 omega + P_{1,0} + P_{2,0}) / 5`.
pub fn sigma_mid() -> SimplexState {
    column_state([1.0 / 15.0, 4.0 / 15.0, 4.0 / 15.0], 1.0 / 15.0)
}
