//! Weyl operators on one qutrit, the nine Bell vectors and projectors built
//! from them, and the embedding of an orthogonal pair of Bell vectors into a
//! locally rotated copy of the Bell basis.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::{
    c, kron3, max_abs3, max_abs9, max_modulus, outer9, ptrace_alice, ptrace_bob, unitarity_defect3,
    vec9_to_mat3, w_pow, Mat3, Mat9, Vec3, Vec9, C64, SQRT3, W_POW,
};
use crate::phase_space::{PhasePoint, Z3};

/// Validation tolerance for externally supplied vectors.
pub const INPUT_TOL: f64 = 1e-10;

/// `W_{k,l}|s> = w^{k(s-l)} |s-l>`.
pub fn weyl_matrix(k: Z3, l: Z3) -> Mat3 {
    let mut m = Mat3::zeros();
    for s in Z3::all() {
        let t = s - l;
        m[(t.idx(), s.idx())] = W_POW[(k * t).idx()];
    }
    m
}

pub fn weyl_at(x: PhasePoint) -> Mat3 {
    weyl_matrix(x.k, x.l)
}

/// Check `W_{j,l} W_{k,m} = w^{kl} W_{j+k, l+m}` and return the phase
/// exponent and the product index.
pub fn weyl_relation_check(j: Z3, l: Z3, k: Z3, m: Z3) -> Result<(Z3, PhasePoint)> {
    let lhs = weyl_matrix(j, l) * weyl_matrix(k, m);
    let e = k * l;
    let idx = PhasePoint { k: j + k, l: l + m };
    let rhs = weyl_at(idx) * W_POW[e.idx()];
    let defect = max_abs3(&(lhs - rhs));
    if defect > 1e-14 {
        return Err(Error::Internal(format!(
            "Weyl relation W({j},{l})W({k},{m}) off by {defect:.3e}"
        )));
    }
    Ok((e, idx))
}

/// `Omega_{0,0} = (|00> + |11> + |22>)/sqrt(3)`.
pub fn omega00() -> Vec9 {
    let mut v = Vec9::zeros();
    for s in 0..3 {
        v[4 * s] = c(1.0 / SQRT3);
    }
    v
}

/// `Omega_{k,l} = (W_{k,l} ⊗ 1) Omega_{0,0}`.
pub fn bell_vector(k: Z3, l: Z3) -> Vec9 {
    kron3(&weyl_matrix(k, l), &Mat3::identity()) * omega00()
}

pub fn bell_vector_at(x: PhasePoint) -> Vec9 {
    bell_vector(x.k, x.l)
}

/// Closed form of `|Omega_{k,l}><Omega_{k,l}|`; only entries
/// `<s-l, s| P |t-l, t> = w^{k(s-t)}/3` are nonzero.
pub fn bell_projector(k: Z3, l: Z3) -> Mat9 {
    let mut p = Mat9::zeros();
    for s in Z3::all() {
        for t in Z3::all() {
            let row = 3 * (s - l).idx() + s.idx();
            let col = 3 * (t - l).idx() + t.idx();
            p[(row, col)] = W_POW[(k * (s - t)).idx()] / 3.0;
        }
    }
    p
}

pub fn bell_projector_at(x: PhasePoint) -> Mat9 {
    bell_projector(x.k, x.l)
}

/// All nine projectors indexed by `PhasePoint::index`.
pub fn bell_projectors() -> [Mat9; 9] {
    std::array::from_fn(|i| bell_projector_at(PhasePoint::from_index(i)))
}

/// The operator `Ã` with `(A ⊗ 1) Omega_00 = (1 ⊗ Ã) Omega_00`: the transpose.
pub fn tilde(a: &Mat3) -> Mat3 {
    a.transpose()
}

/// `W_{k,l}^T = w^{-kl} W_{k,-l}`; returns the phase exponent and index.
pub fn tilde_weyl(k: Z3, l: Z3) -> (Z3, PhasePoint) {
    (-(k * l), PhasePoint { k, l: -l })
}

/// Two-qutrit lift of a local unitary on Alice: `U ⊗ (Ũ)^†`, which maps
/// Omega_00 to itself and permutes the Bell projectors.
pub fn local_lift(u: &Mat3) -> Mat9 {
    kron3(u, &tilde(u).adjoint())
}

/// Local unitary implementing the quarter rotation `P_{k,l} -> P_{l,-k}`.
pub fn rotation_unitary() -> Mat3 {
    let (w, ws) = (W_POW[1], W_POW[2]);
    let one = c(1.0);
    Mat3::new(one, one, one, one, ws, w, one, w, ws) / c(SQRT3)
}

/// Local unitary implementing the vertical shear `P_{k,l} -> P_{k+l,l}`.
pub fn vertical_shear_unitary() -> Mat3 {
    Mat3::from_diagonal(&Vec3::new(c(1.0), c(1.0), W_POW[2]))
}

/// Largest deviation of `v` from a unit-norm maximally entangled vector.
pub fn bell_vector_defect(v: &Vec9) -> f64 {
    let p = outer9(v);
    let third = Mat3::identity() / c(3.0);
    (v.norm() - 1.0)
        .abs()
        .max(max_abs3(&(ptrace_bob(&p) - third)))
        .max(max_abs3(&(ptrace_alice(&p) - third)))
}

pub fn check_bell_vector(v: &Vec9, name: &str) -> Result<()> {
    let d = bell_vector_defect(v);
    if d > INPUT_TOL {
        return Err(Error::NotBellVector(format!("{name}: defect {d:.3e}")));
    }
    Ok(())
}

/// A copy of the Bell basis in rotated local bases. Column `s` of `alice`
/// is the image of `|s>` on Alice's side, likewise for `bob`, so that
/// `Omega'_{k,l} = (alice ⊗ bob) Omega_{k,l}`.
#[derive(Debug, Clone)]
pub struct WeylFrame {
    pub alice: Mat3,
    pub bob: Mat3,
    /// Phase with `W'_{1,0} = e^{-i delta} U`, `U` the Alice unitary taking
    /// the first input to the second.
    pub delta: f64,
}

impl WeylFrame {
    pub fn standard() -> WeylFrame {
        WeylFrame { alice: Mat3::identity(), bob: Mat3::identity(), delta: 0.0 }
    }

    pub fn local(&self) -> Mat9 {
        kron3(&self.alice, &self.bob)
    }

    pub fn weyl(&self, x: PhasePoint) -> Mat3 {
        self.alice * weyl_at(x) * self.alice.adjoint()
    }

    pub fn vector(&self, x: PhasePoint) -> Vec9 {
        self.local() * bell_vector_at(x)
    }

    pub fn projector(&self, x: PhasePoint) -> Mat9 {
        outer9(&self.vector(x))
    }

    pub fn projectors(&self) -> [Mat9; 9] {
        std::array::from_fn(|i| self.projector(PhasePoint::from_index(i)))
    }

    /// Largest violation of the relations a Weyl frame must satisfy: local
    /// bases unitary, the nine vectors orthonormal and maximally entangled,
    /// each equal to `(W'_{k,l} ⊗ 1) Omega'_{0,0}`, projectors summing to
    /// the identity, and the frame Weyl operators obeying the Weyl relations.
    pub fn relation_defect(&self) -> f64 {
        let mut worst = unitarity_defect3(&self.alice).max(unitarity_defect3(&self.bob));
        let vecs: Vec<Vec9> = PhasePoint::all().map(|x| self.vector(x)).collect();
        let base = vecs[0];
        let mut sum = Mat9::zeros();
        for (i, x) in PhasePoint::all().enumerate() {
            worst = worst.max(bell_vector_defect(&vecs[i]));
            let orbit = kron3(&self.weyl(x), &Mat3::identity()) * base;
            worst = worst.max(max_modulus((orbit - vecs[i]).iter()));
            for j in 0..9 {
                let ip = vecs[i].dotc(&vecs[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - c(want)).norm());
            }
            sum += outer9(&vecs[i]);
        }
        worst = worst.max(max_abs9(&(sum - Mat9::identity())));
        for x in PhasePoint::all() {
            for y in PhasePoint::all() {
                let lhs = self.weyl(x) * self.weyl(y);
                let rhs = self.weyl(x + y) * w_pow((y.k * x.l).value() as i64);
                worst = worst.max(max_abs3(&(lhs - rhs)));
            }
        }
        worst
    }

    /// Use a fourth Bell vector to fix the remaining diagonal phase freedom,
    /// so that it becomes `Omega'_{0,1}` or `Omega'_{0,2}` (up to a global
    /// phase). Returns the refined frame and the position `psi4` landed on.
    pub fn fix_fourth(&self, psi4: &Vec9) -> Result<(WeylFrame, PhasePoint)> {
        check_bell_vector(psi4, "fourth")?;
        let psi = vec9_to_mat3(psi4);
        let e = |s: usize| self.alice.column(s).into_owned();
        let f = |s: usize| self.bob.column(s).into_owned();
        // psi4 = (1/sqrt3) sum_s chi_s ⊗ f_s
        let chi: Vec<Vec3> = (0..3).map(|s| psi * f(s).conjugate() * c(SQRT3)).collect();
        let mut found = None;
        for jj in 1..3usize {
            let mut etas = [0.0; 3];
            let mut ok = true;
            for s in 0..3 {
                let target = e((s + jj) % 3);
                let ip = target.dotc(&chi[s]);
                if (ip.norm() - 1.0).abs() > 1e-9 {
                    ok = false;
                    break;
                }
                etas[s] = ip.arg();
            }
            if ok {
                found = Some((jj, etas));
                break;
            }
        }
        let Some((jj, etas)) = found else {
            return Err(Error::FourthNotEmbeddable(
                "not of the form sum_s e^{i eta(s)} e_{s+j} ⊗ f_s".into(),
            ));
        };
        // Unwrap the phases around the cycle s -> s+j so the mean is well
        // defined modulo 2pi.
        let eta = etas.iter().sum::<f64>() / 3.0;
        let mut theta = [0.0; 3];
        let mut s = 0usize;
        for _ in 0..2 {
            let next = (s + jj) % 3;
            theta[next] = theta[s] + etas[s] - eta;
            s = next;
        }
        let mut alice = self.alice;
        let mut bob = self.bob;
        for s in 0..3 {
            let ph = C64::from_polar(1.0, theta[s]);
            alice.set_column(s, &(e(s) * ph));
            bob.set_column(s, &(f(s) * ph.conj()));
        }
        let frame = WeylFrame { alice, bob, delta: self.delta };
        let pos = PhasePoint::new(0, -(jj as i64));
        Ok((frame, pos))
    }
}

/// Embed an orthogonal pair of Bell vectors: the returned frame has
/// `Omega'_{0,0} = psi1` and `Omega'_{1,0} = e^{-i delta} psi2`.
pub fn embed_bell_pair(psi1: &Vec9, psi2: &Vec9) -> Result<WeylFrame> {
    check_bell_vector(psi1, "first")?;
    check_bell_vector(psi2, "second")?;
    let overlap = psi1.dotc(psi2).norm();
    let psi1m = vec9_to_mat3(psi1);
    let psi2m = vec9_to_mat3(psi2);

    // Schmidt form of psi1 = (1/sqrt3) sum phi_s ⊗ eta_s with Bob basis
    // eta_s = conj(v_s); psi2 is expanded in the same Bob basis.
    let svd = psi1m.svd(true, true);
    let u = svd.u.expect("requested");
    let v = svd.v_t.expect("requested").adjoint();
    let mut big_u = Mat3::zeros();
    for s in 0..3 {
        let phi_s = u.column(s) * c(SQRT3 * svd.singular_values[s]);
        let psi_s = psi2m * v.column(s) * c(SQRT3);
        big_u += psi_s * phi_s.adjoint();
    }
    if unitarity_defect3(&big_u) > 1e-9 {
        return Err(Error::Internal(format!(
            "transfer operator not unitary ({:.3e})",
            unitarity_defect3(&big_u)
        )));
    }
    let tr = big_u.trace();
    if tr.norm() > 3.0 * INPUT_TOL {
        return Err(Error::PairNotEmbeddable(overlap));
    }

    // Eigenvalues are e^{i delta} w^k. Pick delta with the smallest |delta|.
    let base = big_u.determinant().arg() / 3.0;
    let tau = std::f64::consts::TAU / 3.0;
    let delta = [base, base + tau, base - tau]
        .into_iter()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .expect("three candidates");
    // Hermitian with eigenvalues sin(2 pi k / 3): distinct, same eigenvectors.
    let rot = C64::from_polar(1.0, -(delta + std::f64::consts::FRAC_PI_2));
    let h = (big_u * rot + (big_u * rot).adjoint()) / c(2.0);
    let eig = SymmetricEigen::new(h);
    let unphase = C64::from_polar(1.0, -delta);
    let mut alice = Mat3::zeros();
    let mut filled = [false; 3];
    for col in 0..3 {
        let mut ev: Vec3 = eig.eigenvectors.column(col).into_owned();
        ev /= c(ev.norm());
        let mu = ev.dotc(&(big_u * ev)) * unphase;
        let k = (0..3)
            .min_by(|&a, &b| (mu - W_POW[a]).norm().total_cmp(&(mu - W_POW[b]).norm()))
            .expect("three roots");
        let resid = max_modulus((big_u * ev - ev * (W_POW[k] / unphase)).iter());
        if resid > 1e-9 || filled[k] {
            return Err(Error::Internal(format!(
                "eigenvalue {mu} is not of the form e^(i delta) w^k (residual {resid:.3e})"
            )));
        }
        // Gauge: largest component real and positive.
        let imax = (0..3).max_by(|&a, &b| ev[a].norm().total_cmp(&ev[b].norm())).expect("3");
        let g = ev[imax].conj() / ev[imax].norm();
        alice.set_column(k, &(ev * g));
        filled[k] = true;
    }
    // psi1 = (1/sqrt3) A B^T  =>  B = sqrt3 psi1^T conj(A)
    let bob = psi1m.transpose() * alice.conjugate() * c(SQRT3);
    let frame = WeylFrame { alice, bob, delta };
    let d0 = max_modulus((frame.vector(PhasePoint::new(0, 0)) - psi1).iter());
    let d1 = max_modulus((frame.vector(PhasePoint::new(1, 0)) * C64::from_polar(1.0, delta) - psi2).iter());
    if d0.max(d1) > 1e-9 {
        return Err(Error::Internal(format!("frame misses inputs by {:.3e}", d0.max(d1))));
    }
    Ok(frame)
}

/// Locally maximally mixed state `(1/3)|00><00| + (2/3)|Phi><Phi|`,
/// `Phi = (|11> + |22>)/sqrt2`, whose eigenvectors are not Bell vectors.
pub fn fixture_mixed_non_bell() -> Mat9 {
    let mut psi = Vec9::zeros();
    psi[0] = c(1.0);
    let mut phi = Vec9::zeros();
    phi[4] = c(std::f64::consts::FRAC_1_SQRT_2);
    phi[8] = c(std::f64::consts::FRAC_1_SQRT_2);
    outer9(&psi) / c(3.0) + outer9(&phi) * c(2.0 / 3.0)
}

/// Bell vector orthogonal to `Omega_{0,0}` and `Omega_{1,0}` but not to
/// `Omega_{2,0}`:
/// `(1/sqrt3) sum_s w^{2s} (1/3)(2|s> + 2|s-1> - |s+1>) ⊗ |s>`.
pub fn fixture_misfit_vector() -> Vec9 {
    let mut v = Vec9::zeros();
    for s in Z3::all() {
        let ph = W_POW[(Z3::TWO * s).idx()] / (3.0 * SQRT3);
        for (a, coef) in [(s, 2.0), (s - Z3::ONE, 2.0), (s + Z3::ONE, -1.0)] {
            v[3 * a.idx() + s.idx()] += ph * coef;
        }
    }
    v
}

/// Replacement for the triple `Omega_{k,l}`: `(1/sqrt3) sum_s w^{ks} alpha_s
/// |s-l> ⊗ |s>` with unit-modulus `alpha`.
pub fn fixture_replaced_triple(l: Z3, alpha: [C64; 3]) -> Result<[Vec9; 3]> {
    for a in alpha {
        if (a.norm() - 1.0).abs() > INPUT_TOL {
            return Err(Error::Domain(format!("phase factor {a} is not unimodular")));
        }
    }
    Ok(std::array::from_fn(|k| {
        let k = Z3::new(k as i64);
        let mut v = Vec9::zeros();
        for s in Z3::all() {
            v[3 * (s - l).idx() + s.idx()] = W_POW[(k * s).idx()] * alpha[s.idx()] / SQRT3;
        }
        v
    }))
}
