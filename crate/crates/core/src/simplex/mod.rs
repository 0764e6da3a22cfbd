//! States of the Bell-diagonal simplex, stored as nine coefficients
//! `c_{k,l}` of the projectors `P_{k,l}`, and the polytopes inside it.

pub mod lp;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, kron3, Mat3, Mat9};
use crate::phase_space::{
    enumerate_lines, lines_contained, subset_orbits, AffineSymmetry, Generator, PhaseLine,
    PhasePoint, SubsetClass,
};
use crate::phase_space::classify_subset;
use crate::weyl_bell::{bell_projectors, local_lift, rotation_unitary, vertical_shear_unitary, weyl_at};
use lp::Field;

/// Tolerance on positivity and normalisation of coefficient vectors.
pub const STATE_TOL: f64 = 1e-12;

/// A real combination `sum a_{k,l} P_{k,l}` with no sign constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HermitianCombination {
    pub a: [f64; 9],
}

impl HermitianCombination {
    pub fn new(a: [f64; 9]) -> HermitianCombination {
        HermitianCombination { a }
    }

    pub fn at(&self, x: PhasePoint) -> f64 {
        self.a[x.index()]
    }

    pub fn matrix(&self) -> Mat9 {
        let ps = bell_projectors();
        (0..9).fold(Mat9::zeros(), |acc, i| acc + ps[i] * c(self.a[i]))
    }
}

/// `Tr(AB)` for combinations of the orthogonal projectors: a dot product.
pub fn hs_inner(a: &HermitianCombination, b: &HermitianCombination) -> f64 {
    a.a.iter().zip(&b.a).map(|(x, y)| x * y).sum()
}

pub fn hs_distance(a: &HermitianCombination, b: &HermitianCombination) -> f64 {
    a.a.iter().zip(&b.a).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// A density matrix in the simplex: nonnegative coefficients summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplexState {
    c: [f64; 9],
}

impl SimplexState {
    pub fn new(c: [f64; 9]) -> Result<SimplexState> {
        SimplexState::with_tolerance(c, STATE_TOL)
    }

    pub fn with_tolerance(c: [f64; 9], tol: f64) -> Result<SimplexState> {
        if let Some(i) = c.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidState(format!("coefficient {i} is not finite")));
        }
        if let Some(i) = c.iter().position(|&v| v < -tol) {
            let x = PhasePoint::from_index(i);
            return Err(Error::InvalidState(format!("c{x} = {} is negative", c[i])));
        }
        let sum: f64 = c.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("coefficients sum to {sum}, not 1")));
        }
        Ok(SimplexState { c })
    }

    /// Uniformly distributed on the simplex (flat Dirichlet).
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> SimplexState {
        let e: [f64; 9] = std::array::from_fn(|_| rng.sample::<f64, _>(rand_distr::Exp1));
        let sum: f64 = e.iter().sum();
        SimplexState { c: e.map(|v| v / sum) }
    }

    /// The maximally mixed state `omega = 1/9`.
    pub fn omega() -> SimplexState {
        SimplexState { c: [1.0 / 9.0; 9] }
    }

    pub fn vertex(x: PhasePoint) -> SimplexState {
        let mut c = [0.0; 9];
        c[x.index()] = 1.0;
        SimplexState { c }
    }

    /// Uniform mixture over a set of points.
    pub fn uniform_on(points: &[PhasePoint]) -> Result<SimplexState> {
        if points.is_empty() {
            return Err(Error::InvalidState("empty support".into()));
        }
        let mut c = [0.0; 9];
        for x in points {
            c[x.index()] += 1.0 / points.len() as f64;
        }
        SimplexState::new(c)
    }

    /// `sum_i w_i s_i`; weights may be negative as long as the result is a
    /// state.
    pub fn combination(terms: &[(f64, SimplexState)]) -> Result<SimplexState> {
        let mut c = [0.0; 9];
        for (w, s) in terms {
            for (ci, si) in c.iter_mut().zip(s.c.iter()) {
                *ci += w * si;
            }
        }
        SimplexState::new(c)
    }

    pub fn coeffs(&self) -> &[f64; 9] {
        &self.c
    }

    pub fn at(&self, x: PhasePoint) -> f64 {
        self.c[x.index()]
    }

    pub fn as_combination(&self) -> HermitianCombination {
        HermitianCombination { a: self.c }
    }
}

/// `sum c_{k,l} P_{k,l}` as a dense matrix.
pub fn state_matrix(s: &SimplexState) -> Mat9 {
    s.as_combination().matrix()
}

/// Uniform mixture over a line, one of the twelve extremal separable states.
pub fn rho_line(l: &PhaseLine) -> SimplexState {
    SimplexState::uniform_on(&l.points).expect("three distinct points")
}

/// Coefficients permuted by the phase-space map: `c'_{g(x)} = c_x`.
pub fn act_symmetry(g: &AffineSymmetry, s: &SimplexState) -> SimplexState {
    let mut c = [0.0; 9];
    for x in PhasePoint::all() {
        c[g.apply(x).index()] = s.at(x);
    }
    SimplexState { c }
}

/// Two-qutrit unitary implementing a generator on operators.
pub fn generator_unitary(gen: Generator) -> Mat9 {
    match gen {
        Generator::Rotation => local_lift(&rotation_unitary()),
        Generator::VerticalShear => local_lift(&vertical_shear_unitary()),
    }
}

/// The unitary `V` with `V P_x V^† = P_{g(x)}`, for `det g = 1`.
pub fn unitary_lift(g: &AffineSymmetry) -> Result<Mat9> {
    let d = g.decompose();
    if d.reflect {
        return Err(Error::Domain(format!("{g} has det -1 and lifts antiunitarily")));
    }
    Ok(lift_from_decomposition(&d))
}

fn lift_from_decomposition(d: &crate::phase_space::Decomposition) -> Mat9 {
    let mut v = kron3(&weyl_at(d.translation), &Mat3::identity());
    for gen in &d.word {
        v *= generator_unitary(*gen);
    }
    v
}

/// Apply the lift of `g` to an arbitrary operator. Antiunitary maps first
/// take the complex conjugate in the product basis, which sends `P_{k,l}` to
/// `P_{-k,l}`.
pub fn act_symmetry_on_matrix(g: &AffineSymmetry, m: &Mat9) -> Mat9 {
    let d = g.decompose();
    let m = if d.reflect { m.conjugate() } else { *m };
    let v = lift_from_decomposition(&d);
    v * m * v.adjoint()
}

/// Points where the state touches the enclosure faces: `A` (`c = 0`) and
/// `B` (`c = 1/3`).
pub fn hyperplanes_containing(s: &SimplexState, tol: f64) -> (Vec<PhasePoint>, Vec<PhasePoint>) {
    let a = PhasePoint::all().filter(|x| s.at(*x).abs() <= tol).collect();
    let b = PhasePoint::all().filter(|x| (s.at(*x) - 1.0 / 3.0).abs() <= tol).collect();
    (a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolytopeVerdict {
    pub in_enclosure: bool,
    pub in_kernel: bool,
    /// Convex weights over [`enumerate_lines`] reproducing the state.
    pub kernel_certificate: Option<[f64; 12]>,
}

fn line_columns<F: Field>() -> Vec<Vec<F>> {
    enumerate_lines()
        .iter()
        .map(|l| {
            let mut col: Vec<F> = (0..9)
                .map(|i| if l.contains(PhasePoint::from_index(i)) { F::from_ratio(1, 3) } else { F::zero() })
                .collect();
            col.push(F::one());
            col
        })
        .collect()
}

/// Minimum-norm solution of the (full row rank) system `A x = b`.
fn min_norm_weights<F: Field>(cols: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    // Only the nine coefficient rows: the normalisation row is implied.
    let m = 9;
    let gram: Vec<Vec<F>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| cols.iter().fold(F::zero(), |acc, col| acc + col[i].clone() * col[j].clone()))
                .collect()
        })
        .collect();
    let y = lp::solve_square(gram, b[..m].to_vec())?;
    Some(
        cols.iter()
            .map(|col| (0..m).fold(F::zero(), |acc, i| acc + col[i].clone() * y[i].clone()))
            .collect(),
    )
}

fn kernel_weights<F: Field>(b: &[F]) -> Option<Vec<F>> {
    let cols = line_columns::<F>();
    if let Some(x) = min_norm_weights(&cols, b) {
        if x.iter().all(|v| !v.is_neg()) {
            return Some(x);
        }
    }
    lp::find_nonnegative_combination(&cols, b)
}

fn to_certificate<F: Field>(x: &[F]) -> [f64; 12] {
    std::array::from_fn(|i| x[i].to_f64().max(0.0))
}

/// Enclosure and kernel polytope membership, floating point.
pub fn polytope_membership(s: &SimplexState) -> PolytopeVerdict {
    let in_enclosure = s.coeffs().iter().all(|&v| v <= 1.0 / 3.0 + STATE_TOL);
    let mut b: Vec<f64> = s.coeffs().to_vec();
    b.push(1.0);
    let cert = kernel_weights::<f64>(&b).map(|x| to_certificate(&x)).filter(|w| {
        // Re-verify independently of the solver tolerance.
        let lines = enumerate_lines();
        let mut rec = [0.0; 9];
        for (wi, l) in w.iter().zip(&lines) {
            for x in l.points {
                rec[x.index()] += wi / 3.0;
            }
        }
        rec.iter().zip(s.coeffs()).all(|(a, b)| (a - b).abs() <= 1e-9)
    });
    PolytopeVerdict { in_enclosure, in_kernel: cert.is_some(), kernel_certificate: cert }
}

/// Exact variant for rational coefficients (must sum to one).
pub fn polytope_membership_exact(c: &[BigRational; 9]) -> Result<(bool, bool, Option<[BigRational; 12]>)> {
    let zero = <BigRational as Field>::zero();
    let one = <BigRational as Field>::one();
    let third = BigRational::from_ratio(1, 3);
    if c.iter().any(|v| v < &zero) {
        return Err(Error::InvalidState("negative coefficient".into()));
    }
    if c.iter().fold(zero.clone(), |acc, v| acc + v) != one {
        return Err(Error::InvalidState("coefficients do not sum to 1".into()));
    }
    let in_enclosure = c.iter().all(|v| v <= &third);
    let mut b: Vec<BigRational> = c.to_vec();
    b.push(one);
    let w = kernel_weights::<BigRational>(&b);
    let cert = w.map(|x| std::array::from_fn(|i| x[i].clone()));
    Ok((in_enclosure, cert.is_some(), cert))
}

/// Affine dimension of the convex hull of the eight line states avoiding
/// `p` (exact rank computation).
pub fn kernel_face_dimension(p: PhasePoint) -> usize {
    let pts: Vec<[BigRational; 9]> = enumerate_lines()
        .iter()
        .filter(|l| !l.contains(p))
        .map(|l| {
            std::array::from_fn(|i| {
                if l.contains(PhasePoint::from_index(i)) {
                    BigRational::from_ratio(1, 3)
                } else {
                    <BigRational as Field>::zero()
                }
            })
        })
        .collect();
    let rows: Vec<Vec<BigRational>> = pts[1..]
        .iter()
        .map(|q| (0..9).map(|i| q[i].clone() - pts[0][i].clone()).collect())
        .collect();
    lp::rank(rows)
}

/// Centre `(1 - P_{0,0})/8` of the simplex face `c_{0,0} = 0`.
pub fn face_centre() -> [BigRational; 9] {
    std::array::from_fn(|i| {
        if i == 0 {
            <BigRational as Field>::zero()
        } else {
            BigRational::from_ratio(1, 8)
        }
    })
}

/// The face vector `v_{p,q}`: from [`face_centre`] to the vertex `P_{p,q}`.
pub fn face_vector(p: PhasePoint) -> [BigRational; 9] {
    let centre = face_centre();
    std::array::from_fn(|i| {
        let vertex = if i == p.index() { <BigRational as Field>::one() } else { <BigRational as Field>::zero() };
        vertex - centre[i].clone()
    })
}

/// The combination of line states for `2 v_{2,2}`: each bracket
/// `(P + P + P)` is `3 rho_line`, with bracket weights -1, -1/3, +1/3.
pub fn two_v22_terms() -> Vec<(BigRational, PhaseLine)> {
    let line = |pts: [(i64, i64); 3]| {
        let mut points = pts.map(|(k, l)| PhasePoint::new(k, l));
        points.sort();
        PhaseLine { points }
    };
    let q = BigRational::from_ratio;
    vec![
        (q(-3, 1), line([(1, 0), (2, 1), (0, 2)])),
        (q(-3, 1), line([(0, 1), (1, 2), (2, 0)])),
        (q(-1, 1), line([(1, 0), (1, 1), (1, 2)])),
        (q(-1, 1), line([(2, 0), (1, 1), (0, 2)])),
        (q(-1, 1), line([(0, 1), (1, 1), (2, 1)])),
        (q(1, 1), line([(2, 0), (2, 1), (2, 2)])),
        (q(1, 1), line([(1, 0), (0, 1), (2, 2)])),
        (q(1, 1), line([(0, 2), (1, 2), (2, 2)])),
    ]
}

/// Exact residual of the `2 v_{2,2}` decomposition, with each line state
/// measured from the face centre (the vectors live in the face, so their
/// origin is the centre). Returns the largest coefficient of
/// `sum_i x_i (rho_i - centre) - 2 v_{2,2}`.
pub fn two_v22_residual() -> BigRational {
    let centre = face_centre();
    let target = face_vector(PhasePoint::new(2, 2));
    let mut acc: [BigRational; 9] = std::array::from_fn(|i| -(target[i].clone() + target[i].clone()));
    for (x, l) in two_v22_terms() {
        for i in 0..9 {
            let rho = if l.contains(PhasePoint::from_index(i)) {
                BigRational::from_ratio(1, 3)
            } else {
                <BigRational as Field>::zero()
            };
            acc[i] = acc[i].clone() + x.clone() * (rho - centre[i].clone());
        }
    }
    acc.into_iter()
        .map(|v| if v < <BigRational as Field>::zero() { -v } else { v })
        .max()
        .expect("nine entries")
}

/// One row of the face census: an orbit of `n`-point sets, its size, and how
/// many kernel vertices (lines) the corresponding face contains.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceType {
    pub points: usize,
    pub class: SubsetClass,
    pub orbit_size: usize,
    pub kernel_vertices: usize,
}

/// Enumerate face types of the simplex for sets of `n` points (1..=8).
pub fn face_census(n: usize) -> Result<Vec<FaceType>> {
    if n == 0 || n > 8 {
        return Err(Error::DegenerateSubset(n));
    }
    subset_orbits(n)
        .into_iter()
        .map(|orbit| {
            let rep = &orbit[0];
            Ok(FaceType {
                points: n,
                class: classify_subset(rep)?,
                orbit_size: orbit.len(),
                kernel_vertices: lines_contained(rep),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigvals_hermitian9, max_abs9, ptrace_alice, ptrace_bob};
    use crate::phase_space::k_subsets;

    fn vertical_line() -> PhaseLine {
        enumerate_lines()[0]
    }

    #[test]
    fn omega_and_vertices() {
        let m = state_matrix(&SimplexState::omega());
        assert!(max_abs9(&(m - Mat9::identity() / c(9.0))) < 1e-15);
        let v = state_matrix(&SimplexState::vertex(PhasePoint::new(0, 0)));
        assert!(max_abs9(&(v - bell_projectors()[0])) < 1e-15);
    }

    #[test]
    fn state_matrix_properties() {
        let s = SimplexState::new([0.05, 0.2, 0.1, 0.15, 0.0, 0.1, 0.1, 0.25, 0.05]).unwrap();
        let m = state_matrix(&s);
        let mut ev = eigvals_hermitian9(&m);
        let mut want = *s.coeffs();
        want.sort_by(f64::total_cmp);
        ev.sort_by(f64::total_cmp);
        for i in 0..9 {
            assert!((ev[i] - want[i]).abs() < 1e-14);
        }
        let third = Mat3::identity() / c(3.0);
        assert!(crate::linalg::max_abs3(&(ptrace_bob(&m) - third)) < 1e-15);
        assert!(crate::linalg::max_abs3(&(ptrace_alice(&m) - third)) < 1e-15);
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(SimplexState::new([0.2; 9]).is_err());
        let mut c = [1.0 / 9.0; 9];
        c[0] = -0.1;
        c[1] += 0.1 + 1.0 / 9.0;
        c[1] -= 1.0 / 9.0;
        assert!(SimplexState::new(c).is_err());
    }

    #[test]
    fn rho_line_vertical() {
        let m = state_matrix(&rho_line(&vertical_line()));
        let mut want = Mat9::zeros();
        for s in 0..3 {
            want[(4 * s, 4 * s)] = c(1.0 / 3.0);
        }
        assert!(max_abs9(&(m - want)) < 1e-15);
    }

    #[test]
    fn line_states_equidistant_from_omega() {
        let omega = SimplexState::omega().as_combination();
        for l in enumerate_lines() {
            let r = rho_line(&l);
            let d = hs_distance(&r.as_combination(), &omega);
            assert!((d - 2f64.sqrt() / 3.0).abs() < 1e-15);
            let (_, b) = hyperplanes_containing(&r, 1e-15);
            assert_eq!(b.len(), 3);
        }
    }

    #[test]
    fn inner_products() {
        let ps = bell_projectors();
        let e = |i| HermitianCombination::new(std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }));
        assert_eq!(hs_inner(&e(0), &e(5)), 0.0);
        let w = SimplexState::omega().as_combination();
        assert!((hs_inner(&w, &w) - 1.0 / 9.0).abs() < 1e-16);
        let a = HermitianCombination::new([0.3, -1.0, 0.2, 0.0, 2.0, 0.1, -0.4, 0.5, 1.0]);
        let b = HermitianCombination::new([1.0, 0.5, -0.2, 0.3, 0.7, -0.1, 0.4, 0.0, 0.2]);
        let tr = (a.matrix() * b.matrix()).trace();
        assert!((tr.re - hs_inner(&a, &b)).abs() < 1e-12);
        let _ = ps;
    }

    #[test]
    fn symmetry_examples() {
        let t = AffineSymmetry::translation(1, 2);
        let s = act_symmetry(&t, &SimplexState::vertex(PhasePoint::new(0, 0)));
        assert_eq!(s, SimplexState::vertex(PhasePoint::new(1, 2)));
        let sym = SimplexState::new([0.1, 0.2, 0.05, 0.15, 0.1, 0.05, 0.15, 0.1, 0.1]).unwrap();
        let sym = SimplexState::combination(&[
            (0.5, sym),
            (0.5, act_symmetry(&AffineSymmetry::reflection(), &sym)),
        ])
        .unwrap();
        let back = act_symmetry(&AffineSymmetry::reflection(), &sym);
        for i in 0..9 {
            assert!((back.coeffs()[i] - sym.coeffs()[i]).abs() < 1e-16);
        }
    }

    #[test]
    fn matrix_lift_matches_coefficient_action() {
        let s = SimplexState::new([0.3, 0.05, 0.1, 0.02, 0.08, 0.15, 0.1, 0.12, 0.08]).unwrap();
        let m = state_matrix(&s);
        for g in AffineSymmetry::all() {
            let lhs = act_symmetry_on_matrix(&g, &m);
            let rhs = state_matrix(&act_symmetry(&g, &s));
            assert!(max_abs9(&(lhs - rhs)) < 1e-12, "{g}");
            if let Ok(v) = unitary_lift(&g) {
                assert!(max_abs9(&(v * v.adjoint() - Mat9::identity())) < 1e-12);
            }
        }
    }

    #[test]
    fn polytope_examples() {
        let v = polytope_membership(&SimplexState::omega());
        assert!(v.in_enclosure && v.in_kernel);
        for w in v.kernel_certificate.unwrap() {
            assert!((w - 1.0 / 12.0).abs() < 1e-14);
        }
        let r = polytope_membership(&rho_line(&vertical_line()));
        assert!(r.in_enclosure && r.in_kernel);
        let five = SimplexState::uniform_on(&[
            PhasePoint::new(0, 0),
            PhasePoint::new(1, 0),
            PhasePoint::new(2, 0),
            PhasePoint::new(0, 1),
            PhasePoint::new(0, 2),
        ])
        .unwrap();
        let f = polytope_membership(&five);
        assert!(f.in_enclosure && !f.in_kernel && f.kernel_certificate.is_none());
        let p = polytope_membership(&SimplexState::vertex(PhasePoint::new(1, 1)));
        assert!(!p.in_enclosure && !p.in_kernel);
    }

    #[test]
    fn exact_membership() {
        let q = BigRational::from_ratio;
        let omega: [BigRational; 9] = std::array::from_fn(|_| q(1, 9));
        let (enc, ker, cert) = polytope_membership_exact(&omega).unwrap();
        assert!(enc && ker);
        assert!(cert.unwrap().iter().all(|w| *w == q(1, 12)));
        let five: [BigRational; 9] =
            std::array::from_fn(|i| if [0, 1, 2, 3, 6].contains(&i) { q(1, 5) } else { q(0, 1) });
        let (enc, ker, _) = polytope_membership_exact(&five).unwrap();
        assert!(enc && !ker);
    }

    #[test]
    fn only_line_triples_are_kernel_points() {
        let mut inside = 0;
        for t in k_subsets(3) {
            let s = SimplexState::uniform_on(&t).unwrap();
            let v = polytope_membership(&s);
            assert!(v.in_enclosure);
            if v.in_kernel {
                inside += 1;
                assert_eq!(lines_contained(&t), 1);
            }
        }
        assert_eq!(inside, 12);
    }

    #[test]
    fn isotropic_crosses_b_at_quarter() {
        let alpha = 0.25;
        let s = SimplexState::combination(&[
            (1.0 - alpha, SimplexState::omega()),
            (alpha, SimplexState::vertex(PhasePoint::new(0, 0))),
        ])
        .unwrap();
        assert!((s.at(PhasePoint::new(0, 0)) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn seven_dimensional_faces() {
        for p in PhasePoint::all() {
            assert_eq!(kernel_face_dimension(p), 7);
        }
        assert_eq!(two_v22_residual(), BigRational::from_ratio(0, 1));
    }

    #[test]
    fn census_matches_line_counts() {
        let c3 = face_census(3).unwrap();
        let mut sizes: Vec<(usize, usize)> = c3.iter().map(|f| (f.kernel_vertices, f.orbit_size)).collect();
        sizes.sort();
        assert_eq!(sizes, vec![(0, 72), (1, 12)]);
        let c7 = face_census(7).unwrap();
        assert_eq!(c7.len(), 1);
        assert_eq!(c7[0].kernel_vertices, 5);
        let mut v6: Vec<usize> = face_census(6).unwrap().iter().map(|f| f.kernel_vertices).collect();
        v6.sort();
        assert_eq!(v6, vec![2, 3]);
        assert!(face_census(0).is_err());
    }
}
