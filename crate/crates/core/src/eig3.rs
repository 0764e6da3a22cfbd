//! Eigenvalues of 3x3 Hermitian matrices.
//!
//! The fast path is the trigonometric solution of the characteristic cubic
//! followed by one Newton step per root. Near-degenerate spectra, where the
//! trigonometric form loses digits, go through cyclic Jacobi instead.

use crate::linalg::{Mat3, C64};

const DEGENERATE_DISCRIMINANT: f64 = 1e-24;
// acos loses half the digits near r = ±1, so a nearly double root also goes
// to Jacobi. This is the discriminant divided by 108 p^6.
const DEGENERATE_RELATIVE: f64 = 1e-6;

/// Ascending eigenvalues of a Hermitian 3x3 matrix. Only the diagonal and the
/// upper triangle are read.
pub fn eigvals_hermitian3(m: &Mat3) -> [f64; 3] {
    let a = m[(0, 0)].re;
    let b = m[(1, 1)].re;
    let cc = m[(2, 2)].re;
    let x = m[(0, 1)];
    let y = m[(0, 2)];
    let z = m[(1, 2)];

    let mean = (a + b + cc) / 3.0;
    let (a0, b0, c0) = (a - mean, b - mean, cc - mean);
    let off = x.norm_sqr() + y.norm_sqr() + z.norm_sqr();
    let p2 = (a0 * a0 + b0 * b0 + c0 * c0 + 2.0 * off) / 6.0;
    if p2 <= 0.0 {
        return [mean; 3];
    }
    let p = p2.sqrt();
    // det of the shifted matrix
    let det = a0 * b0 * c0 + 2.0 * (x * z * y.conj()).re
        - a0 * z.norm_sqr()
        - b0 * y.norm_sqr()
        - c0 * x.norm_sqr();
    let r = (det / (2.0 * p * p2)).clamp(-1.0, 1.0);
    let disc = 108.0 * p2 * p2 * p2 * (1.0 - r * r);
    if disc < DEGENERATE_DISCRIMINANT || 1.0 - r * r < DEGENERATE_RELATIVE {
        return jacobi3(m);
    }
    let phi = r.acos() / 3.0;
    let tau = std::f64::consts::TAU / 3.0;
    let mut roots = [
        2.0 * p * (phi + tau).cos(),
        2.0 * p * (phi + 2.0 * tau).cos(),
        2.0 * p * phi.cos(),
    ];
    // Characteristic polynomial of the shifted matrix: t^3 - 3 p2 t - det.
    for t in roots.iter_mut() {
        let f = *t * *t * *t - 3.0 * p2 * *t - det;
        let df = 3.0 * *t * *t - 3.0 * p2;
        if df.abs() > 1e-300 {
            *t -= f / df;
        }
    }
    roots.sort_by(f64::total_cmp);
    [roots[0] + mean, roots[1] + mean, roots[2] + mean]
}

pub fn min_eigval_hermitian3(m: &Mat3) -> f64 {
    eigvals_hermitian3(m)[0]
}

/// Cyclic complex Jacobi. Converges quadratically; 3x3 needs a handful of
/// sweeps.
pub fn jacobi3(m: &Mat3) -> [f64; 3] {
    let mut a = (m + m.adjoint()) * C64::new(0.5, 0.0);
    for _sweep in 0..50 {
        let off: f64 = a[(0, 1)].norm_sqr() + a[(0, 2)].norm_sqr() + a[(1, 2)].norm_sqr();
        let scale: f64 = (0..3).map(|i| a[(i, i)].re.powi(2)).sum::<f64>() + off;
        if off <= 1e-32 * scale.max(1e-300) {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            let g = apq.norm();
            if g < 1e-300 {
                continue;
            }
            let app = a[(p, p)].re;
            let aqq = a[(q, q)].re;
            let theta = 0.5 * (aqq - app) / g;
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let cs = 1.0 / (t * t + 1.0).sqrt();
            let sn = t * cs;
            let ph = apq / g;
            // Rotation J acting on columns p, q: J = [[cs, sn*ph], [-sn*conj(ph), cs]]
            let mut j = Mat3::identity();
            j[(p, p)] = C64::new(cs, 0.0);
            j[(q, q)] = C64::new(cs, 0.0);
            j[(p, q)] = ph * sn;
            j[(q, p)] = -ph.conj() * sn;
            a = j.adjoint() * a * j;
            a[(p, q)] = C64::new(0.0, 0.0);
            a[(q, p)] = C64::new(0.0, 0.0);
        }
    }
    let mut ev = [a[(0, 0)].re, a[(1, 1)].re, a[(2, 2)].re];
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, random_unitary3};
    use nalgebra::SymmetricEigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reference(m: &Mat3) -> [f64; 3] {
        let e = SymmetricEigen::new(*m).eigenvalues;
        let mut v = [e[0], e[1], e[2]];
        v.sort_by(f64::total_cmp);
        v
    }

    fn with_spectrum(rng: &mut ChaCha8Rng, ev: [f64; 3]) -> Mat3 {
        let u = random_unitary3(rng);
        let d = Mat3::from_diagonal(&nalgebra::Vector3::new(c(ev[0]), c(ev[1]), c(ev[2])));
        let m = u * d * u.adjoint();
        (m + m.adjoint()) * c(0.5)
    }

    #[test]
    fn matches_reference_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let ev = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let m = with_spectrum(&mut rng, ev);
            let got = eigvals_hermitian3(&m);
            let want = reference(&m);
            for i in 0..3 {
                assert!((got[i] - want[i]).abs() < 1e-12, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn degenerate_spectra() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for ev in [[1.0, 1.0, 1.0], [-0.1, 0.3, 0.3], [0.0, 1e-9, 1e-9], [2.0, 2.0, 2.0 + 1e-13]] {
            let m = with_spectrum(&mut rng, ev);
            let got = eigvals_hermitian3(&m);
            for i in 0..3 {
                assert!((got[i] - ev[i]).abs() < 1e-12, "{got:?} vs {ev:?}");
            }
        }
        assert_eq!(eigvals_hermitian3(&Mat3::zeros()), [0.0; 3]);
    }

    #[test]
    fn jacobi_alone_is_accurate() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let ev = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let m = with_spectrum(&mut rng, ev);
            let got = jacobi3(&m);
            let want = reference(&m);
            for i in 0..3 {
                assert!((got[i] - want[i]).abs() < 1e-12);
            }
        }
    }
}
