//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Rotations are exact unitaries, so the accumulated eigenvector basis stays
//! orthonormal to machine precision and reconstruction residuals sit at the
//! rounding level for the small dimensions this crate targets.

use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::scalar::{Scalar, C};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (descending) and orthonormal eigenvectors (columns) of the
/// Hermitian part of `m`. Callers are responsible for checking that `m` is
/// close enough to Hermitian for the answer to mean anything.
pub(crate) fn hermitian_eigen<S: Scalar>(m: &ComplexMatrix<S>) -> (Vec<S>, ComplexMatrix<S>) {
    let d = m.rows();
    debug_assert!(m.is_square());
    let mut a = m.hermitian_part().expect("square matrix");
    let mut v = ComplexMatrix::<S>::identity(d);

    let scale = a.frobenius_norm();
    let threshold = scale * S::epsilon() * S::from_real(d as f64) + S::min_positive_value();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<S> = (0..d).map(|i| a.at(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite eigenvalues"));

    let eigenvalues: Vec<S> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::<S>::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..d {
            vectors.set(i, dst, v.at(i, src));
        }
    }
    (eigenvalues, vectors)
}

fn off_diagonal_norm<S: Scalar>(a: &ComplexMatrix<S>) -> S {
    let d = a.rows();
    let mut sum = S::zero();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                sum = sum + a.at(i, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One two-sided rotation zeroing the (p, q) entry: `A <- U^dag A U`,
/// `V <- V U`, with `U` the plane rotation acting on coordinates p and q.
fn rotate<S: Scalar>(a: &mut ComplexMatrix<S>, v: &mut ComplexMatrix<S>, p: usize, q: usize) {
    let d = a.rows();
    let apq = a.at(p, q);
    let b = apq.norm();
    let app = a.at(p, p).re;
    let aqq = a.at(q, q).re;
    // Relative skip: an off-diagonal entry below rounding noise of its
    // diagonal neighbourhood cannot be reduced further.
    if b <= (app.abs() + aqq.abs() + b) * S::epsilon() {
        return;
    }

    let phase = apq.unscale(b);
    let tau = (aqq - app) / (b + b);
    let t = if tau.is_zero() {
        S::one()
    } else {
        tau.signum() / (tau.abs() + (S::one() + tau * tau).sqrt())
    };
    let c = S::one() / (S::one() + t * t).sqrt();
    let s = t * c;

    let cc: C<S> = Complex::new(c, S::zero());
    let s_phase = phase.scale(s);
    let s_phase_conj = phase.conj().scale(s);

    // Column update: (col_p, col_q) <- (c col_p - s e^{-i th} col_q,
    //                                   s e^{i th} col_p + c col_q).
    for i in 0..d {
        let aip = a.at(i, p);
        let aiq = a.at(i, q);
        a.set(i, p, aip * cc - aiq * s_phase_conj);
        a.set(i, q, aip * s_phase + aiq * cc);
    }
    // Row update with the adjoint rotation.
    for j in 0..d {
        let apj = a.at(p, j);
        let aqj = a.at(q, j);
        a.set(p, j, apj * cc - aqj * s_phase);
        a.set(q, j, apj * s_phase_conj + aqj * cc);
    }
    // Accumulate the eigenvector basis.
    for i in 0..d {
        let vip = v.at(i, p);
        let viq = v.at(i, q);
        v.set(i, p, vip * cc - viq * s_phase_conj);
        v.set(i, q, vip * s_phase + viq * cc);
    }
}

/// Apply `f` to the spectrum of the Hermitian part of `m`:
/// returns `V diag(f(lambda)) V^dag`.
pub(crate) fn hermitian_map<S: Scalar>(
    m: &ComplexMatrix<S>,
    f: impl Fn(S) -> S,
) -> ComplexMatrix<S> {
    let (eigenvalues, vectors) = hermitian_eigen(m);
    let d = m.rows();
    let mut result = ComplexMatrix::<S>::zeros(d, d);
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        let flk = f(lambda);
        if flk.is_zero() {
            continue;
        }
        let col = vectors.column(k);
        for i in 0..d {
            for j in 0..d {
                let cur = result.at(i, j);
                result.set(i, j, cur + (col[i] * col[j].conj()).scale(flk));
            }
        }
    }
    result
}
