//! Seeded random generators for the algebraic test harnesses.
//!
//! Everything here is deterministic given the caller's RNG; the harnesses
//! and the CLI seed a ChaCha stream so runs are reproducible bit for bit.

use num_complex::Complex;
use rand::Rng;

use crate::error::Result;
use crate::operator::{operator_norm, ComplexMatrix, DensityMatrix, Effect, Isometry};
use crate::outcome::{Distribution, FiniteMeasure, FiniteSpace, KleisliMap, MeasurableFn};
use crate::povm::Povm;
use crate::scalar::{Scalar, Tolerances, C};

/// One standard normal draw via Box-Muller.
pub fn standard_normal<S: Scalar, R: Rng>(rng: &mut R) -> S {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    S::from_real((-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos())
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<S: Scalar, R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix<S> {
    let entries = (0..rows * cols)
        .map(|_| Complex::new(standard_normal(rng), standard_normal(rng)))
        .collect();
    ComplexMatrix::new(rows, cols, entries).expect("finite Gaussian entries")
}

/// Random Hermitian matrix `(G + G^dag)/2`.
pub fn random_hermitian<S: Scalar, R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix<S> {
    gaussian_matrix(rng, dim, dim)
        .hermitian_part()
        .expect("square")
}

/// Random effect: `W = G G^dag` normalized by `norm(W) + s` with `s`
/// uniform in `[0, 1]`, covering interior and near-boundary effects.
pub fn random_effect<S: Scalar, R: Rng>(rng: &mut R, dim: usize) -> Effect<S> {
    let g = gaussian_matrix::<S, _>(rng, dim, dim);
    let w = g.matmul(&g.adjoint()).expect("square");
    let norm = operator_norm(&w).expect("square");
    let s = S::from_real(rng.gen::<f64>());
    let a = w.scale_real(S::one() / (norm + s));
    Effect::new(a).expect("normalized Gram matrix is an effect")
}

/// Random density matrix `W / tr(W)` with `W = G G^dag`.
pub fn random_density<S: Scalar, R: Rng>(rng: &mut R, dim: usize) -> DensityMatrix<S> {
    let g = gaussian_matrix::<S, _>(rng, dim, dim);
    let w = g.matmul(&g.adjoint()).expect("square");
    let tr = w.trace().expect("square").re;
    DensityMatrix::new(w.scale_real(S::one() / tr)).expect("normalized Gram matrix")
}

/// Random unitary: the eigenvector basis of a random Hermitian matrix.
pub fn random_unitary<S: Scalar, R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix<S> {
    let h = random_hermitian(rng, dim);
    let (_, vectors) = crate::operator::hermitian_eigen(&h);
    vectors
}

/// Random isometry `C^dim -> C^codim`: leading columns of a random unitary.
pub fn random_isometry<S: Scalar, R: Rng>(rng: &mut R, dim: usize, codim: usize) -> Isometry<S> {
    assert!(dim <= codim, "isometry needs dim <= codim");
    let u = random_unitary::<S, _>(rng, codim);
    let mut m = ComplexMatrix::zeros(codim, dim);
    for i in 0..codim {
        for j in 0..dim {
            m.set(i, j, u.at(i, j));
        }
    }
    Isometry::new(m).expect("columns of a unitary")
}

/// Random POVM: Gram matrices per atom, repaired to sum to the identity.
pub fn random_povm<S: Scalar, R: Rng>(rng: &mut R, space: FiniteSpace, dim: usize) -> Povm<S> {
    let raw = (0..space.len())
        .map(|_| {
            let g = gaussian_matrix::<S, _>(rng, dim, dim);
            g.matmul(&g.adjoint()).expect("square")
        })
        .collect();
    Povm::repair_normalization(space, raw, Tolerances::default())
        .expect("sum of full-rank Gram matrices is invertible")
}

/// Random PVM: assign each vector of a random orthonormal basis to a random
/// atom and sum the rank-1 projectors per atom. Atoms may carry the zero
/// projector when `dim < |X|`.
pub fn random_pvm<S: Scalar, R: Rng>(rng: &mut R, space: FiniteSpace, dim: usize) -> Povm<S> {
    let u = random_unitary::<S, _>(rng, dim);
    let n = space.len();
    let mut parts = vec![ComplexMatrix::<S>::zeros(dim, dim); n];
    for k in 0..dim {
        // Spread the first vectors over distinct atoms so no atom set is
        // entirely empty when dim >= |X|.
        let target = if k < n { k } else { rng.gen_range(0..n) };
        let col = u.column(k);
        parts[target] = parts[target]
            .add(&ComplexMatrix::outer(&col, &col))
            .expect("square");
    }
    let effects = parts
        .into_iter()
        .map(|m| Effect::new(m).expect("sum of orthogonal projectors"))
        .collect();
    Povm::new(space, effects).expect("resolution of the identity")
}

/// Random distribution: normalized exponentials (uniform on the simplex).
pub fn random_distribution<S: Scalar, R: Rng>(rng: &mut R, space: FiniteSpace) -> Distribution<S> {
    let raw: Vec<f64> = (0..space.len())
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    let prob = raw.iter().map(|&x| S::from_real(x / total)).collect();
    Distribution::new(space, prob).expect("normalized positives")
}

/// Random stochastic kernel between two spaces.
pub fn random_kleisli<S: Scalar, R: Rng>(
    rng: &mut R,
    domain: FiniteSpace,
    codomain: FiniteSpace,
) -> KleisliMap<S> {
    let rows = (0..domain.len())
        .map(|_| random_distribution(rng, codomain.clone()))
        .collect();
    KleisliMap::new(domain, codomain, rows).expect("valid rows")
}

/// Random finite measure with masses in `[0.2, 2]`; when not strictly
/// positive, atoms are independently nulled with probability 1/4.
pub fn random_measure<S: Scalar, R: Rng>(
    rng: &mut R,
    space: FiniteSpace,
    strictly_positive: bool,
) -> FiniteMeasure<S> {
    let mass = (0..space.len())
        .map(|_| {
            if !strictly_positive && rng.gen::<f64>() < 0.25 {
                S::zero()
            } else {
                S::from_real(0.2 + 1.8 * rng.gen::<f64>())
            }
        })
        .collect();
    FiniteMeasure::new(space, mass).expect("nonnegative masses")
}

/// Random `[0, 1]`-valued predicate on a space.
pub fn random_predicate<S: Scalar, R: Rng>(rng: &mut R, space: FiniteSpace) -> MeasurableFn<S> {
    let values = (0..space.len())
        .map(|_| C::new(S::from_real(rng.gen::<f64>()), S::zero()))
        .collect();
    MeasurableFn::new(space, values).expect("finite values")
}

/// Random space with `n` atoms labeled by index.
pub fn indexed_space(n: usize) -> Result<FiniteSpace> {
    FiniteSpace::indexed(n)
}
