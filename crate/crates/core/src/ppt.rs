//! Partial transposition of simplex states.
//!
//! For a Bell-diagonal state the partial transpose splits into three equal
//! 3x3 blocks `B`, so positivity under partial transposition is a 3x3
//! eigenvalue problem.

use serde::Serialize;

use crate::eig3::eigvals_hermitian3;
use crate::error::{Error, Result};
use crate::linalg::{c, Mat3, Mat9, C64, W_POW};
use crate::phase_space::{PhasePoint, Z3};
use crate::simplex::SimplexState;

/// `d_l = sum_k c_{k,l}`, `a_l = sum_k w^k c_{k,l}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedB {
    pub d: [f64; 3],
    #[serde(serialize_with = "ser_complex3")]
    pub a: [C64; 3],
}

fn ser_complex3<S: serde::Serializer>(a: &[C64; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(3))?;
    for z in a {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

pub fn reduce_to_b(s: &SimplexState) -> ReducedB {
    let mut d = [0.0; 3];
    let mut a = [C64::new(0.0, 0.0); 3];
    for x in PhasePoint::all() {
        let v = s.at(x);
        d[x.l.idx()] += v;
        a[x.l.idx()] += W_POW[x.k.idx()] * v;
    }
    ReducedB { d, a }
}

/// `B = (1/3) [[d0, a2, a1*], [a2*, d1, a0], [a1, a0*, d2]]`.
pub fn b_matrix(r: &ReducedB) -> Mat3 {
    let [d0, d1, d2] = r.d.map(c);
    let [a0, a1, a2] = r.a;
    Mat3::new(d0, a2, a1.conj(), a2.conj(), d1, a0, a1, a0.conj(), d2) / c(3.0)
}

/// Transpose on Alice's factor: `<a b| M^{T_A} |a' b'> = <a' b| M |a b'>`.
pub fn full_partial_transpose(m: &Mat9) -> Mat9 {
    Mat9::from_fn(|r, col| {
        let (a, b) = (r / 3, r % 3);
        let (a2, b2) = (col / 3, col % 3);
        m[(3 * a2 + b, 3 * a + b2)]
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PptVerdict {
    pub min_eigenvalue: f64,
    pub is_ppt: bool,
}

/// Spectrum of `B` (ascending); the partial transpose has each of these
/// three times.
pub fn b_spectrum(s: &SimplexState) -> [f64; 3] {
    eigvals_hermitian3(&b_matrix(&reduce_to_b(s)))
}

pub fn is_ppt(s: &SimplexState, tol: f64) -> Result<PptVerdict> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let min_eigenvalue = b_spectrum(s)[0];
    Ok(PptVerdict { min_eigenvalue, is_ppt: min_eigenvalue >= -tol })
}

/// Tolerance for the positivity triangle of the two-Bell family.
pub const FAMILY_TOL: f64 = 1e-12;

/// Coefficients of `(1 - alpha - beta) omega + alpha P_{1,0} + beta P_{2,0}`
/// without validation.
pub fn two_bell_coeffs(alpha: f64, beta: f64) -> [f64; 9] {
    let off = (1.0 - alpha - beta) / 9.0;
    let mut c = [off; 9];
    c[PhasePoint::new(1, 0).index()] += alpha;
    c[PhasePoint::new(2, 0).index()] += beta;
    c
}

pub fn in_two_bell_triangle(alpha: f64, beta: f64) -> bool {
    let off = (1.0 - alpha - beta) / 9.0;
    off >= -FAMILY_TOL && off + alpha >= -FAMILY_TOL && off + beta >= -FAMILY_TOL
}

pub fn two_bell_state(alpha: f64, beta: f64) -> Result<SimplexState> {
    if !in_two_bell_triangle(alpha, beta) {
        return Err(Error::Domain(format!(
            "(alpha, beta) = ({alpha}, {beta}) outside the positivity triangle"
        )));
    }
    let mut c = two_bell_coeffs(alpha, beta);
    for v in c.iter_mut() {
        *v = v.max(0.0);
    }
    SimplexState::with_tolerance(c, 1e-9)
}

/// `d1^2 - |a0|^2` for the two-Bell family, in closed form:
/// `(1/9)(1 - 2s - (5/4)s^2) - (3/4)(beta - alpha)^2` with `s = alpha + beta`.
/// Nonnegative exactly when the state is PPT.
pub fn two_bell_ppt_value(alpha: f64, beta: f64) -> Result<f64> {
    if !in_two_bell_triangle(alpha, beta) {
        return Err(Error::Domain(format!(
            "(alpha, beta) = ({alpha}, {beta}) outside the positivity triangle"
        )));
    }
    let s = alpha + beta;
    let dlt = beta - alpha;
    Ok((1.0 - 2.0 * s - 1.25 * s * s) / 9.0 - 0.75 * dlt * dlt)
}

/// Tolerance for `a_0 = a_1 = 0` on the two-column face.
pub const LOWFACE_TOL: f64 = 1e-10;

/// PPT test on the face where column `l = 2` is empty: there `B` has a zero
/// diagonal entry, so it is positive only if `a_0 = a_1 = 0`, i.e. each
/// occupied column is uniformly weighted.
pub fn lowface_check(s: &SimplexState) -> Result<bool> {
    for k in Z3::all() {
        let v = s.at(PhasePoint { k, l: Z3::TWO });
        if v.abs() > 1e-12 {
            return Err(Error::Domain(format!("c({k},2) = {v} is not zero")));
        }
    }
    let r = reduce_to_b(s);
    Ok(r.a[0].norm() <= LOWFACE_TOL && r.a[1].norm() <= LOWFACE_TOL)
}
