//! Dense complex matrices of dimension 3 and 9 and the few operations the
//! rest of the crate needs on them.
//!
//! Two-qutrit operators are stored in the product basis `|a> ⊗ |b>` with row
//! index `3a + b` (Alice first). Use [`block_permutation`] to view them in
//! the block ordering `|s-l, s>` grouped by `l`.

use nalgebra::{Matrix3, SMatrix, SVector, SymmetricEigen, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type Mat3 = Matrix3<C64>;
pub type Vec3 = Vector3<C64>;
pub type Mat9 = SMatrix<C64, 9, 9>;
pub type Vec9 = SVector<C64, 9>;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Powers of the primitive cube root of unity `w = exp(2πi/3)`, indexed by
/// the exponent modulo 3. `W_POW[2]` is the exact conjugate of `W_POW[1]`.
pub const W_POW: [C64; 3] = [
    C64::new(1.0, 0.0),
    C64::new(-0.5, 0.866_025_403_784_438_6),
    C64::new(-0.5, -0.866_025_403_784_438_6),
];

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `w^e` for any integer exponent.
#[inline]
pub fn w_pow(e: i64) -> C64 {
    W_POW[e.rem_euclid(3) as usize]
}

#[inline]
pub fn idx9(a: usize, b: usize) -> usize {
    3 * a + b
}

pub fn kron3(x: &Mat3, y: &Mat3) -> Mat9 {
    Mat9::from_fn(|r, col| x[(r / 3, col / 3)] * y[(r % 3, col % 3)])
}

pub fn kron_vec3(x: &Vec3, y: &Vec3) -> Vec9 {
    Vec9::from_fn(|r, _| x[r / 3] * y[r % 3])
}

pub fn outer9(v: &Vec9) -> Mat9 {
    v * v.adjoint()
}

pub fn outer3(v: &Vec3) -> Mat3 {
    v * v.adjoint()
}

/// Reduced operator on Alice's factor (trace over Bob).
pub fn ptrace_bob(m: &Mat9) -> Mat3 {
    Mat3::from_fn(|a, a2| (0..3).map(|b| m[(idx9(a, b), idx9(a2, b))]).sum())
}

/// Reduced operator on Bob's factor (trace over Alice).
pub fn ptrace_alice(m: &Mat9) -> Mat3 {
    Mat3::from_fn(|b, b2| (0..3).map(|a| m[(idx9(a, b), idx9(a, b2))]).sum())
}

/// Reshape a bipartite vector into its 3x3 coefficient matrix `Psi[a, b]`.
pub fn vec9_to_mat3(v: &Vec9) -> Mat3 {
    Mat3::from_fn(|a, b| v[idx9(a, b)])
}

pub fn mat3_to_vec9(m: &Mat3) -> Vec9 {
    Vec9::from_fn(|r, _| m[(r / 3, r % 3)])
}

/// Largest entry modulus of any complex matrix or vector.
pub fn max_modulus<'a>(entries: impl IntoIterator<Item = &'a C64>) -> f64 {
    entries.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs3(m: &Mat3) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs9(m: &Mat9) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect9(m: &Mat9) -> f64 {
    max_abs9(&(m - m.adjoint()))
}

pub fn unitarity_defect3(u: &Mat3) -> f64 {
    max_abs3(&(u * u.adjoint() - Mat3::identity()))
}

/// Ascending eigenvalues of a Hermitian 9x9 matrix (only the lower triangle
/// is trusted).
pub fn eigvals_hermitian9(m: &Mat9) -> [f64; 9] {
    let eig = SymmetricEigen::new(*m);
    let mut out = [0.0; 9];
    out.copy_from_slice(eig.eigenvalues.as_slice());
    out.sort_by(f64::total_cmp);
    out
}

/// Permutation `perm[i]` = product-basis index of the i-th vector in the
/// block ordering `|s-l, s>`, grouped by `l`, ordered by `s` inside a group.
pub fn block_permutation() -> [usize; 9] {
    let mut perm = [0; 9];
    for l in 0..3 {
        for s in 0..3 {
            perm[3 * l + s] = idx9((s + 3 - l) % 3, s);
        }
    }
    perm
}

/// Re-express a product-basis operator in the `|s-l, s>` block ordering.
pub fn to_block_basis(m: &Mat9) -> Mat9 {
    let perm = block_permutation();
    Mat9::from_fn(|r, col| m[(perm[r], perm[col])])
}

/// Haar-random 3x3 unitary (QR of a complex Ginibre matrix with the phase
/// of the diagonal of R divided out).
pub fn random_unitary3<R: Rng + ?Sized>(rng: &mut R) -> Mat3 {
    let g = Mat3::from_fn(|_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = Mat3::from_diagonal(&Vec3::from_fn(|i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0)
        }
    }));
    q * phases
}

/// Unit vector with complex Gaussian entries.
pub fn random_unit_vec3<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let v = Vec3::from_fn(|_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    v / c(v.norm())
}
