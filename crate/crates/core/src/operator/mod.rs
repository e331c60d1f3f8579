//! Dense complex linear algebra: spectral decompositions, PSD square roots,
//! operator classification, and the classified operator types used by the
//! measurement layer.

mod eigen;
mod matrix;

pub use matrix::ComplexMatrix;

pub(crate) use eigen::{hermitian_eigen, hermitian_map};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerances, C};

/// Eigenvalues in descending order with orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<S: Scalar> {
    pub eigenvalues: Vec<S>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix<S>,
}

impl<S: Scalar> SpectralDecomposition<S> {
    pub fn eigenvector(&self, k: usize) -> Vec<C<S>> {
        self.eigenvectors.column(k)
    }

    /// `sum_k lambda_k v_k v_k^dag`; equals the input up to rounding.
    pub fn reconstruct(&self) -> ComplexMatrix<S> {
        let d = self.eigenvectors.rows();
        let mut out = ComplexMatrix::<S>::zeros(d, d);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let col = self.eigenvector(k);
            for i in 0..d {
                for j in 0..d {
                    let cur = out.at(i, j);
                    out.set(i, j, cur + (col[i] * col[j].conj()).scale(lambda));
                }
            }
        }
        out
    }
}

/// Spectral decomposition of a Hermitian matrix.
///
/// The Hermitian part `(A + A^dag)/2` is taken before decomposing; inputs
/// further than `tol.herm` from Hermitian are rejected.
pub fn spectral_decompose<S: Scalar>(
    a: &ComplexMatrix<S>,
    tol: &Tolerances<S>,
) -> Result<SpectralDecomposition<S>> {
    a.dim()?;
    let dev = a.hermitian_deviation()?;
    if dev > tol.herm {
        return Err(Error::NotHermitian {
            deviation: dev.to_f64().unwrap_or(f64::NAN),
            tolerance: tol.herm.to_f64().unwrap_or(f64::NAN),
        });
    }
    let (eigenvalues, eigenvectors) = hermitian_eigen(a);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// PSD square root: the unique PSD `B` with `B B = A`.
///
/// Eigenvalues in `[-tol.psd, 0)` are clamped to zero; anything lower is a
/// genuine negativity and rejected.
pub fn psd_sqrt<S: Scalar>(a: &ComplexMatrix<S>, tol: &Tolerances<S>) -> Result<ComplexMatrix<S>> {
    let spec = spectral_decompose(a, tol)?;
    if let Some(&min) = spec
        .eigenvalues
        .iter()
        .min_by(|x, y| x.partial_cmp(y).expect("finite"))
    {
        if min < -tol.psd {
            return Err(Error::NotPsd {
                eigenvalue: min.to_f64().unwrap_or(f64::NAN),
                tolerance: tol.psd.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(hermitian_map(a, |l| if l > S::zero() { l.sqrt() } else { S::zero() }))
}

/// Inverse PSD square root, used to repair near-normalized effect families.
/// Fails with `Singular` when an eigenvalue is at or below `tol.psd`.
pub(crate) fn psd_inv_sqrt<S: Scalar>(
    a: &ComplexMatrix<S>,
    tol: &Tolerances<S>,
) -> Result<ComplexMatrix<S>> {
    let spec = spectral_decompose(a, tol)?;
    for &l in &spec.eigenvalues {
        if l <= tol.psd {
            return Err(Error::Singular(format!(
                "eigenvalue {l:e} at or below tolerance; cannot invert"
            )));
        }
    }
    Ok(hermitian_map(a, |l| S::one() / l.sqrt()))
}

/// Largest singular value. For Hermitian input this is the largest
/// eigenvalue magnitude.
pub fn operator_norm<S: Scalar>(a: &ComplexMatrix<S>) -> Result<S> {
    a.dim()?;
    // sqrt of the top eigenvalue of A^dag A, which is Hermitian by
    // construction even in floating point.
    let gram = a.adjoint().matmul(a)?;
    let (eigenvalues, _) = hermitian_eigen(&gram);
    let top = eigenvalues.first().copied().unwrap_or_else(S::zero);
    Ok(top.max(S::zero()).sqrt())
}

/// Membership flags for the operator hierarchy. `classify` guarantees
/// `projection => effect => psd => hermitian`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OperatorClass {
    pub hermitian: bool,
    pub psd: bool,
    pub effect: bool,
    pub projection: bool,
}

/// Classify a square matrix within the given tolerances.
pub fn classify<S: Scalar>(a: &ComplexMatrix<S>, tol: &Tolerances<S>) -> Result<OperatorClass> {
    a.dim()?;
    let hermitian = a.hermitian_deviation()? <= tol.herm;
    let (mut psd, mut effect, mut projection) = (false, false, false);
    if hermitian {
        let (eigenvalues, _) = hermitian_eigen(a);
        let min = eigenvalues.last().copied().unwrap_or_else(S::zero);
        let max = eigenvalues.first().copied().unwrap_or_else(S::zero);
        psd = min >= -tol.psd;
        effect = psd && max <= S::one() + tol.psd;
        if effect {
            let idempotency = a.matmul(a)?.sub(a)?;
            projection = operator_norm(&idempotency)? <= tol.recon;
        }
    }
    Ok(OperatorClass {
        hermitian,
        psd,
        effect,
        projection,
    })
}

/// An effect: Hermitian with spectrum in `[0, 1]` (within tolerance).
#[derive(Clone, Debug, PartialEq)]
pub struct Effect<S: Scalar> {
    matrix: ComplexMatrix<S>,
}

impl<S: Scalar> Effect<S> {
    pub fn new(matrix: ComplexMatrix<S>) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix<S>, tol: &Tolerances<S>) -> Result<Self> {
        let dev = matrix.hermitian_deviation()?;
        if dev > tol.herm {
            return Err(Error::NotHermitian {
                deviation: dev.to_f64().unwrap_or(f64::NAN),
                tolerance: tol.herm.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (eigenvalues, _) = hermitian_eigen(&matrix);
        let min = eigenvalues.last().copied().unwrap_or_else(S::zero);
        let max = eigenvalues.first().copied().unwrap_or_else(S::zero);
        if min < -tol.psd {
            return Err(Error::NotEffect {
                eigenvalue: min.to_f64().unwrap_or(f64::NAN),
                tolerance: tol.psd.to_f64().unwrap_or(f64::NAN),
            });
        }
        if max > S::one() + tol.psd {
            return Err(Error::NotEffect {
                eigenvalue: max.to_f64().unwrap_or(f64::NAN),
                tolerance: tol.psd.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Effect { matrix })
    }

    pub fn zero(dim: usize) -> Self {
        Effect {
            matrix: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Effect {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix<S> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<S> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `id - A`, always an effect again.
    pub fn orthocomplement(&self) -> Effect<S> {
        let id = ComplexMatrix::identity(self.dim());
        Effect {
            matrix: id.sub(&self.matrix).expect("same shape"),
        }
    }

    /// Operator-norm equality within `eps`.
    pub fn approx_eq(&self, other: &Effect<S>, eps: S) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let diff = self.matrix.sub(&other.matrix).expect("same shape");
        operator_norm(&diff).map_or(false, |n| n <= eps)
    }
}

/// A density matrix: PSD with unit trace (within tolerance).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<S: Scalar> {
    matrix: ComplexMatrix<S>,
}

impl<S: Scalar> DensityMatrix<S> {
    pub fn new(matrix: ComplexMatrix<S>) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix<S>, tol: &Tolerances<S>) -> Result<Self> {
        let dev = matrix.hermitian_deviation()?;
        if dev > tol.herm {
            return Err(Error::NotDensity(format!(
                "asymmetry {dev:e} exceeds tolerance"
            )));
        }
        let (eigenvalues, _) = hermitian_eigen(&matrix);
        let min = eigenvalues.last().copied().unwrap_or_else(S::zero);
        if min < -tol.psd {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:e}")));
        }
        let tr = matrix.trace()?;
        if (tr.re - S::one()).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::NotDensity(format!(
                "trace {} + {}i is not 1",
                tr.re, tr.im
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    /// The maximally mixed state `id/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: ComplexMatrix::identity(dim).scale_real(S::one() / S::from_real(dim as f64)),
        }
    }

    /// Pure state `v v^dag / |v|^2`.
    pub fn pure(v: &[C<S>]) -> Result<Self> {
        let norm_sq: S = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= S::zero() {
            return Err(Error::NotDensity("zero vector".into()));
        }
        let outer = ComplexMatrix::outer(v, v).scale_real(S::one() / norm_sq);
        Ok(DensityMatrix { matrix: outer })
    }

    pub fn matrix(&self) -> &ComplexMatrix<S> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn approx_eq(&self, other: &DensityMatrix<S>, eps: S) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let diff = self.matrix.sub(&other.matrix).expect("same shape");
        operator_norm(&diff).map_or(false, |n| n <= eps)
    }
}

/// Which way an isometry acts by conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjugationDirection {
    /// `g A g^dag`: pushes states and trace-class operators forward.
    Forward,
    /// `g^dag A g`: pulls observables back.
    Adjoint,
}

/// A linear map `g` with `g^dag g = id` on its domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry<S: Scalar> {
    matrix: ComplexMatrix<S>,
}

impl<S: Scalar> Isometry<S> {
    pub fn new(matrix: ComplexMatrix<S>) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix<S>, tol: &Tolerances<S>) -> Result<Self> {
        if matrix.rows() < matrix.cols() {
            return Err(Error::NotIsometry(format!(
                "domain dimension {} exceeds codomain dimension {}",
                matrix.cols(),
                matrix.rows()
            )));
        }
        let gram = matrix.adjoint().matmul(&matrix)?;
        let id = ComplexMatrix::identity(matrix.cols());
        let dev = operator_norm(&gram.sub(&id)?)?;
        if dev > tol.herm {
            return Err(Error::NotIsometry(format!(
                "g^dag g deviates from identity by {dev:e}"
            )));
        }
        Ok(Isometry { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Isometry {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix<S> {
        &self.matrix
    }

    /// Domain dimension (number of columns).
    pub fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    /// Codomain dimension (number of rows).
    pub fn codomain_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Conjugate `a` by this isometry in the chosen direction. Both
    /// directions preserve Hermiticity and positive semidefiniteness.
    pub fn conjugate(
        &self,
        a: &ComplexMatrix<S>,
        direction: ConjugationDirection,
    ) -> Result<ComplexMatrix<S>> {
        let d = a.dim()?;
        match direction {
            ConjugationDirection::Forward => {
                if d != self.domain_dim() {
                    return Err(Error::DimensionMismatch(format!(
                        "operator dimension {d} does not match isometry domain {}",
                        self.domain_dim()
                    )));
                }
                self.matrix.matmul(a)?.matmul(&self.matrix.adjoint())
            }
            ConjugationDirection::Adjoint => {
                if d != self.codomain_dim() {
                    return Err(Error::DimensionMismatch(format!(
                        "operator dimension {d} does not match isometry codomain {}",
                        self.codomain_dim()
                    )));
                }
                self.matrix.adjoint().matmul(a)?.matmul(&self.matrix)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn sigma_x() -> ComplexMatrix<f64> {
        ComplexMatrix::from_rows(&[
            vec![(0.0, 0.0), (1.0, 0.0)],
            vec![(1.0, 0.0), (0.0, 0.0)],
        ])
        .unwrap()
    }

    fn sigma_z() -> ComplexMatrix<f64> {
        ComplexMatrix::diagonal(&[1.0, -1.0])
    }

    #[test]
    fn spectral_sigma_z_is_diagonal_case() {
        let spec = spectral_decompose(&sigma_z(), &tol()).unwrap();
        assert_eq!(spec.eigenvalues, vec![1.0, -1.0]);
        let e1 = spec.eigenvector(0);
        let e2 = spec.eigenvector(1);
        assert!((e1[0].norm() - 1.0).abs() < 1e-14 && e1[1].norm() < 1e-14);
        assert!((e2[1].norm() - 1.0).abs() < 1e-14 && e2[0].norm() < 1e-14);
    }

    #[test]
    fn spectral_identity_eigenvalues() {
        let spec = spectral_decompose(&ComplexMatrix::<f64>::identity(2), &tol()).unwrap();
        assert_eq!(spec.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn spectral_sigma_x_reconstructs() {
        // Oracle: reconstruction must reproduce sigma_x; eigenvectors are
        // (1,1)/sqrt(2), (1,-1)/sqrt(2) up to phase.
        let spec = spectral_decompose(&sigma_x(), &tol()).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] + 1.0).abs() < 1e-14);
        let r = spec.reconstruct();
        assert!(sigma_x().sub(&r).unwrap().frobenius_norm() < 1e-14);
        let plus = spec.eigenvector(0);
        assert!((plus[0].norm() - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((plus[1].norm() - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spectral_rejects_non_hermitian() {
        let a = ComplexMatrix::from_rows(&[
            vec![(0.0, 0.0), (1.0, 0.0)],
            vec![(0.0, 0.0), (0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            spectral_decompose(&a, &tol()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn psd_sqrt_diagonal() {
        let b = psd_sqrt(&ComplexMatrix::<f64>::diagonal(&[4.0, 9.0]), &tol()).unwrap();
        assert!(b.sub(&ComplexMatrix::diagonal(&[2.0, 3.0])).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn psd_sqrt_identity() {
        let b = psd_sqrt(&ComplexMatrix::<f64>::identity(2), &tol()).unwrap();
        assert!(b.sub(&ComplexMatrix::identity(2)).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn psd_sqrt_of_id_plus_sigma_x() {
        // Oracle: square the result and compare with the input.
        let a = ComplexMatrix::<f64>::identity(2).add(&sigma_x()).unwrap();
        let b = psd_sqrt(&a, &tol()).unwrap();
        let bb = b.matmul(&b).unwrap();
        assert!(bb.sub(&a).unwrap().frobenius_norm() < 1e-13);
        // Closed form (id + sigma_x)/sqrt(2).
        let expected = a.scale_real(1.0 / 2f64.sqrt());
        assert!(b.sub(&expected).unwrap().frobenius_norm() < 1e-13);
        // The square root commutes with the input.
        let comm = b.matmul(&a).unwrap().sub(&a.matmul(&b).unwrap()).unwrap();
        assert!(comm.frobenius_norm() < 1e-13);
    }

    #[test]
    fn psd_sqrt_rejects_negative() {
        let err = psd_sqrt(&ComplexMatrix::<f64>::diagonal(&[1.0, -0.5]), &tol());
        assert!(matches!(err, Err(Error::NotPsd { .. })));
    }

    #[test]
    fn psd_sqrt_clamps_tiny_negative() {
        let b = psd_sqrt(&ComplexMatrix::<f64>::diagonal(&[1.0, -1e-12]), &tol()).unwrap();
        assert_eq!(b.at(1, 1).re, 0.0);
    }

    #[test]
    fn classify_examples() {
        let half_id = ComplexMatrix::<f64>::identity(2).scale_real(0.5);
        let c = classify(&half_id, &tol()).unwrap();
        assert!(c.hermitian && c.psd && c.effect && !c.projection);

        let proj = ComplexMatrix::<f64>::diagonal(&[1.0, 0.0]);
        let c = classify(&proj, &tol()).unwrap();
        assert!(c.hermitian && c.psd && c.effect && c.projection);

        let over = ComplexMatrix::<f64>::diagonal(&[1.5, 0.0]);
        let c = classify(&over, &tol()).unwrap();
        assert!(c.hermitian && c.psd && !c.effect && !c.projection);
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&sigma_z()).unwrap() - 1.0).abs() < 1e-14);
        assert!((operator_norm(&ComplexMatrix::<f64>::diagonal(&[2.0, 3.0])).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(operator_norm(&ComplexMatrix::<f64>::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn trace_examples() {
        assert_eq!(
            ComplexMatrix::<f64>::identity(2).trace().unwrap(),
            cplx(2.0, 0.0)
        );
        assert_eq!(sigma_x().trace().unwrap(), cplx(0.0, 0.0));
        assert_eq!(
            ComplexMatrix::<f64>::diagonal(&[0.75, 0.25]).trace().unwrap(),
            cplx(1.0, 0.0)
        );
    }

    #[test]
    fn conjugation_examples() {
        let id = Isometry::<f64>::identity(2);
        let a = ComplexMatrix::diagonal(&[0.3, 0.7]);
        let out = id.conjugate(&a, ConjugationDirection::Forward).unwrap();
        assert!(out.sub(&a).unwrap().frobenius_norm() < 1e-15);

        // Embedding C -> C^2.
        let g = Isometry::new(
            ComplexMatrix::new(2, 1, vec![cplx(1.0, 0.0), cplx(0.0, 0.0)]).unwrap(),
        )
        .unwrap();
        let one = ComplexMatrix::new(1, 1, vec![cplx(1.0, 0.0)]).unwrap();
        let emb = g.conjugate(&one, ConjugationDirection::Forward).unwrap();
        assert!(emb.sub(&ComplexMatrix::diagonal(&[1.0, 0.0])).unwrap().frobenius_norm() < 1e-15);

        // sigma_x swaps the basis projectors.
        let u = Isometry::new(sigma_x()).unwrap();
        let p0 = ComplexMatrix::diagonal(&[1.0, 0.0]);
        let swapped = u.conjugate(&p0, ConjugationDirection::Forward).unwrap();
        assert!(swapped.sub(&ComplexMatrix::diagonal(&[0.0, 1.0])).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn conjugation_dimension_errors() {
        let g = Isometry::new(
            ComplexMatrix::new(2, 1, vec![cplx(1.0, 0.0), cplx(0.0, 0.0)]).unwrap(),
        )
        .unwrap();
        let a2 = ComplexMatrix::<f64>::identity(2);
        assert!(g.conjugate(&a2, ConjugationDirection::Forward).is_err());
        let a1 = ComplexMatrix::<f64>::identity(1);
        assert!(g.conjugate(&a1, ConjugationDirection::Adjoint).is_err());
    }

    #[test]
    fn effect_validation() {
        assert!(Effect::new(ComplexMatrix::<f64>::diagonal(&[0.5, 1.0])).is_ok());
        assert!(matches!(
            Effect::new(ComplexMatrix::<f64>::diagonal(&[1.5, 0.0])),
            Err(Error::NotEffect { .. })
        ));
        assert!(matches!(
            Effect::new(ComplexMatrix::<f64>::diagonal(&[-0.1, 0.0])),
            Err(Error::NotEffect { .. })
        ));
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::<f64>::diagonal(&[0.75, 0.25])).is_ok());
        assert!(DensityMatrix::new(ComplexMatrix::<f64>::diagonal(&[0.75, 0.75])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::<f64>::diagonal(&[1.5, -0.5])).is_err());
    }

    #[test]
    fn isometry_validation() {
        assert!(Isometry::new(sigma_x()).is_ok());
        // Not an isometry: column norm 2.
        let bad = ComplexMatrix::<f64>::diagonal(&[2.0, 1.0]);
        assert!(Isometry::new(bad).is_err());
        // Wide matrices cannot be isometries.
        let wide = ComplexMatrix::<f64>::zeros(1, 2);
        assert!(Isometry::new(wide).is_err());
    }
}
