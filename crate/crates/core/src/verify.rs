//! Self-checks over every module, run by `magic-simplex verify`.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg::{
    eigvals_hermitian9, kron3, max_abs9, outer9, random_unitary3, Mat3, Vec9, C64, W_POW,
};
use crate::phase_space::{
    classify_subset, k_subsets, subset_orbits, AffineSymmetry, PhasePoint, SubsetClass, SubsetKind, Z3,
};
use crate::ppt::{b_spectrum, full_partial_transpose, is_ppt, lowface_check};
use crate::simplex::{
    act_symmetry, act_symmetry_on_matrix, kernel_face_dimension, polytope_membership, state_matrix,
    two_v22_residual, SimplexState,
};
use crate::weyl_bell::{
    bell_projectors, embed_bell_pair, fixture_misfit_vector, omega00, tilde, tilde_weyl, weyl_at,
    weyl_relation_check, WeylFrame,
};
use crate::witness::{
    check_line_witness, det_m_phi_closed, f_products_zx, min_eigen_line, min_products, region_vertex_state,
    region_witness, LineWitness, PhiSearchOptions, WitnessClass, WitnessRegion,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: &'static str, name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { suite, name, passed, detail }
}

/// A random orthogonal pair of Bell vectors. Any traceless unitary is
/// `e^{i theta} Q diag(1, w, w^2) Q^†`, which covers all such pairs.
pub fn random_bell_pair<R: Rng + ?Sized>(rng: &mut R) -> (Vec9, Vec9) {
    let (u, v, q) = (random_unitary3(rng), random_unitary3(rng), random_unitary3(rng));
    let d = q * Mat3::from_diagonal(&nalgebra::Vector3::new(W_POW[0], W_POW[1], W_POW[2])) * q.adjoint()
        * C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    let psi1 = kron3(&u, &v) * omega00();
    let psi2 = kron3(&(u * d), &v) * omega00();
    (psi1, psi2)
}

/// Points of the face with column `l = 2` empty: a random mixture of the
/// six remaining vertices, with the uniform edge hit half of the time.
pub fn random_lowface_state<R: Rng + ?Sized>(rng: &mut R) -> SimplexState {
    let mut c = [0.0; 9];
    if rng.gen_bool(0.5) {
        let t: f64 = rng.gen();
        for k in 0..3 {
            c[PhasePoint::new(k, 0).index()] = t / 3.0;
            c[PhasePoint::new(k, 1).index()] = (1.0 - t) / 3.0;
        }
    } else {
        let mut sum = 0.0;
        for k in 0..3 {
            for l in 0..2 {
                let v: f64 = rng.sample(rand_distr::Exp1);
                c[PhasePoint::new(k, l).index()] = v;
                sum += v;
            }
        }
        c.iter_mut().for_each(|v| *v /= sum);
    }
    SimplexState::with_tolerance(c, 1e-12).expect("normalised")
}

fn weyl_suite(out: &mut Vec<CheckResult>) {
    let mut ok = true;
    for j in Z3::all() {
        for l in Z3::all() {
            for k in Z3::all() {
                for m in Z3::all() {
                    ok &= weyl_relation_check(j, l, k, m).is_ok();
                }
            }
        }
    }
    out.push(check("weyl", "product relation on all 81 pairs", ok, String::new()));

    let worst = PhasePoint::all()
        .map(|x| {
            let (e, y) = tilde_weyl(x.k, x.l);
            crate::linalg::max_abs3(&(tilde(&weyl_at(x)) - weyl_at(y) * W_POW[e.idx()]))
        })
        .fold(0.0, f64::max);
    out.push(check("weyl", "transpose phase", worst < 1e-15, format!("max defect {worst:.2e}")));

    let d = WeylFrame::standard().relation_defect();
    out.push(check("weyl", "standard frame relations", d < 1e-14, format!("defect {d:.2e}")));

    let ps = bell_projectors();
    let sum: crate::linalg::Mat9 = ps.iter().sum();
    let d = max_abs9(&(sum - crate::linalg::Mat9::identity()));
    out.push(check("weyl", "Bell projectors resolve the identity", d < 1e-14, format!("defect {d:.2e}")));
}

fn symmetry_suite(out: &mut Vec<CheckResult>, rng: &mut ChaCha8Rng) {
    let all = AffineSymmetry::all();
    out.push(check("symmetry", "affine group order", all.len() == 432, format!("{} elements", all.len())));

    let round_trip = all.iter().all(|g| g.decompose().compose() == *g);
    out.push(check("symmetry", "decomposition into generators", round_trip, String::new()));

    let mut worst: f64 = 0.0;
    for _ in 0..40 {
        let g = all[rng.gen_range(0..all.len())];
        let s = SimplexState::random(rng);
        let lhs = act_symmetry_on_matrix(&g, &state_matrix(&s));
        worst = worst.max(max_abs9(&(lhs - state_matrix(&act_symmetry(&g, &s)))));
    }
    out.push(check("symmetry", "lifts permute Bell projectors", worst < 1e-13, format!("max defect {worst:.2e}")));
}

fn combinatorics_suite(out: &mut Vec<CheckResult>) {
    let triples = k_subsets(3);
    let lines = triples
        .iter()
        .filter(|t| classify_subset(t).ok() == Some(SubsetClass::Direct(SubsetKind::TripleLine)))
        .count();
    out.push(check(
        "combinatorics",
        "triples: 12 lines, 72 generic",
        lines == 12 && triples.len() - lines == 72,
        format!("{lines} lines of {}", triples.len()),
    ));
    let orbits = subset_orbits(4);
    let sizes: Vec<usize> = orbits.iter().map(Vec::len).collect();
    out.push(check(
        "combinatorics",
        "quadruples form two orbits",
        orbits.len() == 2 && sizes.iter().sum::<usize>() == 126,
        format!("orbit sizes {sizes:?}"),
    ));
}

fn ppt_suite(out: &mut Vec<CheckResult>, rng: &mut ChaCha8Rng) {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let s = SimplexState::random(rng);
        let full = eigvals_hermitian9(&full_partial_transpose(&state_matrix(&s)));
        let b = b_spectrum(&s);
        for i in 0..9 {
            worst = worst.max((full[i] - b[i / 3]).abs());
        }
    }
    out.push(check("ppt", "partial transpose spectrum is B's, tripled", worst <= 1e-12, format!("max deviation {worst:.2e}")));

    let v = is_ppt(&SimplexState::omega(), 1e-12).map(|v| v.min_eigenvalue).unwrap_or(f64::NAN);
    out.push(check("ppt", "omega has min eigenvalue 1/9", (v - 1.0 / 9.0).abs() < 1e-15, format!("{v}")));

    let mut bad = 0;
    for _ in 0..200 {
        let s = random_lowface_state(rng);
        let ppt = b_spectrum(&s)[0] >= -1e-12;
        if lowface_check(&s).ok() != Some(ppt) {
            bad += 1;
        }
    }
    out.push(check("ppt", "two-column face: PPT iff uniform columns", bad == 0, format!("{bad} mismatches")));
}

fn witness_suite(out: &mut Vec<CheckResult>, rng: &mut ChaCha8Rng) {
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        let k = LineWitness::new(rng.gen_range(0.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
            .expect("lambda >= 0");
        let phi = crate::linalg::random_unit_vec3(rng);
        worst = worst.max((det_m_phi_closed(&k, &phi) - k.m_phi(&phi).determinant().re).abs());
    }
    out.push(check("witness", "closed-form determinant", worst <= 1e-10, format!("max deviation {worst:.2e}")));

    // Grid oracle over the (z, x) triangle.
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (mut m1, mut m2) = (f64::INFINITY, f64::INFINITY);
        let n = 100;
        for i in 0..=n {
            let z = i as f64 / n as f64;
            let h = (1.0 - z) / 2.0;
            for j in 0..=n {
                let x = h * (2.0 * j as f64 / n as f64 - 1.0);
                let (fa, fb) = f_products_zx(z, x);
                m1 = m1.min(a * fa);
                m2 = m2.min(a * fa + b * fb);
            }
        }
        let (p1, p2) = min_products(a, b);
        worst = worst.max((p1 - m1).abs()).max((p2 - m2).abs());
    }
    out.push(check("witness", "minima of f_A and f_A + f_B", worst < 1e-3, format!("max deviation {worst:.2e}")));

    let opts = PhiSearchOptions { grid: 32, ..Default::default() };
    let mut ok = true;
    for r in [WitnessRegion::A(0.5), WitnessRegion::B(-0.4), WitnessRegion::C(1.0), WitnessRegion::D(0.3)] {
        let k = region_witness(&r).expect("in range");
        let m = min_eigen_line(&k, &opts).value;
        let e = k.to_general().expectation(&region_vertex_state(r.id()));
        ok &= check_line_witness(&k) == WitnessClass::Tangential && m > -1e-9 && m < 1e-9 && e.abs() < 1e-12;
    }
    out.push(check("witness", "region witnesses are tangential", ok, String::new()));
}

fn kernel_suite(out: &mut Vec<CheckResult>) {
    let dims: Vec<usize> = PhasePoint::all().map(kernel_face_dimension).collect();
    out.push(check("kernel", "faces of the kernel are 7-dimensional", dims.iter().all(|&d| d == 7), format!("{dims:?}")));
    let r = two_v22_residual();
    out.push(check("kernel", "face vector as a combination of lines", r.is_zero(), format!("residual {r}")));

    let five = SimplexState::uniform_on(&[
        PhasePoint::new(0, 0),
        PhasePoint::new(1, 0),
        PhasePoint::new(2, 0),
        PhasePoint::new(0, 1),
        PhasePoint::new(0, 2),
    ])
    .expect("five points");
    let ppt = is_ppt(&five, 1e-12).map(|v| v.is_ppt).unwrap_or(false);
    let inside = polytope_membership(&five).in_kernel;
    out.push(check("kernel", "five-point centre is PPT and outside the kernel", ppt && !inside, String::new()));
}

fn embedding_suite(out: &mut Vec<CheckResult>, rng: &mut ChaCha8Rng) {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..20 {
        let (p1, p2) = random_bell_pair(rng);
        match embed_bell_pair(&p1, &p2) {
            Ok(f) => {
                worst = worst
                    .max(max_abs9(&(f.projector(PhasePoint::new(0, 0)) - outer9(&p1))))
                    .max(max_abs9(&(f.projector(PhasePoint::new(1, 0)) - outer9(&p2))))
                    .max(f.relation_defect());
            }
            Err(_) => failures += 1,
        }
    }
    out.push(check(
        "embedding",
        "random orthogonal Bell pairs embed",
        failures == 0 && worst < 1e-10,
        format!("{failures} failures, max defect {worst:.2e}"),
    ));

    let frame = embed_bell_pair(&omega00(), &crate::weyl_bell::bell_vector(Z3::ONE, Z3::ZERO));
    let phi = fixture_misfit_vector();
    let rejected = match frame {
        Ok(f) => {
            let pphi = outer9(&phi);
            PhasePoint::all().all(|x| max_abs9(&(f.projector(x) - pphi)) > 0.1) && f.fix_fourth(&phi).is_err()
        }
        Err(_) => false,
    };
    out.push(check("embedding", "misfit vector is not in the frame", rejected, String::new()));
}

/// Run every suite with the given seed.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    weyl_suite(&mut out);
    symmetry_suite(&mut out, &mut rng);
    combinatorics_suite(&mut out);
    ppt_suite(&mut out, &mut rng);
    witness_suite(&mut out, &mut rng);
    kernel_suite(&mut out);
    embedding_suite(&mut out, &mut rng);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        let res = run_all(7);
        let failed: Vec<_> = res.iter().filter(|r| !r.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(res.len() >= 15);
    }

    #[test]
    fn random_pairs_are_orthogonal_bell_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (a, b) = random_bell_pair(&mut rng);
            assert!(a.dotc(&b).norm() < 1e-13);
            assert!(crate::weyl_bell::bell_vector_defect(&a) < 1e-13);
            assert!(crate::weyl_bell::bell_vector_defect(&b) < 1e-13);
        }
    }
}
