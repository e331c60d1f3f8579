//! POVMs on finite outcome spaces.
//!
//! A POVM here is a finite family of effects indexed by the atoms of a
//! [`FiniteSpace`], summing to the identity. Evaluation on a subset is the
//! sum of its atoms' effects, which makes the family a sigma-effect-algebra
//! morphism out of the power set.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::operator::{operator_norm, psd_inv_sqrt, spectral_decompose, ComplexMatrix, Effect};
use crate::outcome::{FiniteMeasure, FiniteSpace, MeasurableFn};
use crate::scalar::{Scalar, Tolerances};

/// A positive operator-valued measure with finitely many outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm<S: Scalar> {
    space: FiniteSpace,
    dim: usize,
    effects: Vec<Effect<S>>,
    tol: Tolerances<S>,
}

impl<S: Scalar> Povm<S> {
    /// Validating constructor with default tolerances. Rejects families whose
    /// sum deviates from the identity; use [`Povm::repair_normalization`] to
    /// fix up nearly-normalized raw families explicitly.
    pub fn new(space: FiniteSpace, effects: Vec<Effect<S>>) -> Result<Self> {
        Self::with_tolerances(space, effects, Tolerances::default())
    }

    pub fn with_tolerances(
        space: FiniteSpace,
        effects: Vec<Effect<S>>,
        tol: Tolerances<S>,
    ) -> Result<Self> {
        if effects.len() != space.len() {
            return Err(Error::NotAPovm(format!(
                "expected {} effects, got {}",
                space.len(),
                effects.len()
            )));
        }
        let dim = match effects.first() {
            Some(e) => e.dim(),
            None => return Err(Error::NotAPovm("no effects".into())),
        };
        if effects.iter().any(|e| e.dim() != dim) {
            return Err(Error::NotAPovm("effects of mixed dimension".into()));
        }
        let povm = Povm {
            space,
            dim,
            effects,
            tol,
        };
        let residual = povm.normalization_residual()?;
        if residual > tol.norm {
            return Err(Error::NotAPovm(format!(
                "effects sum deviates from identity by {residual:e}"
            )));
        }
        Ok(povm)
    }

    /// Conjugate a family of PSD operators by `S^{-1/2}` (with `S` their sum)
    /// so the result sums to the identity exactly up to rounding. Already
    /// normalized input passes through unchanged up to rounding.
    pub fn repair_normalization(
        space: FiniteSpace,
        raw: Vec<ComplexMatrix<S>>,
        tol: Tolerances<S>,
    ) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::NotAPovm("no operators".into()));
        }
        let dim = raw[0].dim()?;
        let mut sum = ComplexMatrix::<S>::zeros(dim, dim);
        for op in &raw {
            let spec = spectral_decompose(op, &tol)?;
            if let Some(&min) = spec.eigenvalues.last() {
                if min < -tol.psd {
                    return Err(Error::NotPsd {
                        eigenvalue: min.to_f64().unwrap_or(f64::NAN),
                        tolerance: tol.psd.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
            sum = sum.add(op)?;
        }
        let corrector = psd_inv_sqrt(&sum, &tol)?;
        let effects = raw
            .into_iter()
            .map(|op| {
                let fixed = corrector.matmul(&op)?.matmul(&corrector)?;
                Effect::with_tolerances(fixed, &tol)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_tolerances(space, effects, tol)
    }

    /// Extract a POVM from a module morphism by evaluating it on all
    /// singleton indicators. Fails with `NotAPovm` when the extracted
    /// family does not validate, which signals that the map was not a
    /// module morphism to begin with.
    pub fn from_module_morphism(
        space: FiniteSpace,
        phi: impl Fn(&MeasurableFn<S>) -> ComplexMatrix<S>,
    ) -> Result<Self> {
        Self::from_module_morphism_with(space, phi, Tolerances::default())
    }

    pub fn from_module_morphism_with(
        space: FiniteSpace,
        phi: impl Fn(&MeasurableFn<S>) -> ComplexMatrix<S>,
        tol: Tolerances<S>,
    ) -> Result<Self> {
        let effects = (0..space.len())
            .map(|i| {
                let indicator = MeasurableFn::singleton_indicator(space.clone(), i)?;
                Effect::with_tolerances(phi(&indicator), &tol)
                    .map_err(|e| Error::NotAPovm(format!("image of indicator {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_tolerances(space, effects, tol)
            .map_err(|e| Error::NotAPovm(format!("extracted family: {e}")))
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effect(&self, i: usize) -> &Effect<S> {
        &self.effects[i]
    }

    pub fn effects(&self) -> &[Effect<S>] {
        &self.effects
    }

    pub fn tolerances(&self) -> &Tolerances<S> {
        &self.tol
    }

    /// Operator-norm distance of the total effect from the identity.
    pub fn normalization_residual(&self) -> Result<S> {
        let total = self.sum_all()?;
        let id = ComplexMatrix::identity(self.dim);
        operator_norm(&total.sub(&id)?)
    }

    fn sum_all(&self) -> Result<ComplexMatrix<S>> {
        let mut sum = ComplexMatrix::<S>::zeros(self.dim, self.dim);
        for e in &self.effects {
            sum = sum.add(e.matrix())?;
        }
        Ok(sum)
    }

    fn sum_indices(&self, subset: &BTreeSet<usize>) -> Result<ComplexMatrix<S>> {
        let mut sum = ComplexMatrix::<S>::zeros(self.dim, self.dim);
        for &i in subset {
            if i >= self.effects.len() {
                return Err(Error::UnknownAtom(format!("atom index {i}")));
            }
            sum = sum.add(self.effects[i].matrix())?;
        }
        Ok(sum)
    }

    /// Evaluate on a subset of atoms given by labels.
    pub fn evaluate<T: AsRef<str>>(&self, subset: &[T]) -> Result<Effect<S>> {
        let indices = self.space.subset_indices(subset)?;
        self.evaluate_indices(&indices)
    }

    /// Evaluate on a subset of atoms given by indices.
    pub fn evaluate_indices(&self, subset: &BTreeSet<usize>) -> Result<Effect<S>> {
        let sum = self.sum_indices(subset)?;
        Effect::with_tolerances(sum, &self.tol)
    }

    /// True iff every effect is a projection. Orthogonality of distinct
    /// effects then holds automatically for a resolution of the identity.
    pub fn is_pvm(&self) -> Result<bool> {
        for e in &self.effects {
            let m = e.matrix();
            let defect = m.matmul(m)?.sub(m)?;
            if operator_norm(&defect)? > self.tol.recon {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Mu-continuity: the effect at every null atom vanishes.
    pub fn check_mu_continuous(&self, mu: &FiniteMeasure<S>) -> Result<bool> {
        if mu.space() != &self.space {
            return Err(Error::SpaceMismatch(
                "measure space differs from POVM outcome space".into(),
            ));
        }
        for i in 0..self.len() {
            if mu.is_null_atom(i) && operator_norm(self.effects[i].matrix())? > self.tol.norm {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Radon-Nikodym derivative with respect to `mu`: pointwise division by
    /// atom mass, zero on null atoms. Exists exactly when the POVM is
    /// mu-continuous.
    pub fn rn_derivative(&self, mu: &FiniteMeasure<S>) -> Result<OperatorDensity<S>> {
        if !self.check_mu_continuous(mu)? {
            return Err(Error::NotContinuous(
                "POVM is not mu-continuous; derivative does not exist".into(),
            ));
        }
        let values = (0..self.len())
            .map(|i| {
                if mu.is_null_atom(i) {
                    ComplexMatrix::zeros(self.dim, self.dim)
                } else {
                    self.effects[i].matrix().scale_real(S::one() / mu.mass(i))
                }
            })
            .collect();
        Ok(OperatorDensity {
            space: self.space.clone(),
            measure: mu.clone(),
            values,
        })
    }

    /// Total variation: supremum over finite partitions of the summed
    /// operator norms of the partition blocks.
    pub fn variation(&self, mode: VariationMode) -> Result<S> {
        match mode {
            VariationMode::ClosedForm => {
                // The supremum is attained at the all-singletons partition:
                // refining a partition cannot decrease the block-norm sum by
                // the triangle inequality. Verified against BruteForce.
                let mut total = S::zero();
                for e in &self.effects {
                    total = total + operator_norm(e.matrix())?;
                }
                Ok(total)
            }
            VariationMode::BruteForce => {
                let n = self.len();
                if n > 10 {
                    return Err(Error::TooLarge(format!(
                        "brute-force variation enumerates all partitions; {n} atoms exceeds the 10-atom bound"
                    )));
                }
                let mut best = S::zero();
                for partition in set_partitions(n) {
                    let mut sum = S::zero();
                    for block in &partition {
                        let total = self.sum_indices(&block.iter().copied().collect())?;
                        sum = sum + operator_norm(&total)?;
                    }
                    best = best.max(sum);
                }
                Ok(best)
            }
        }
    }

    /// Integrate a `[0, 1]`-valued predicate along the POVM:
    /// `sum_x p(x) A_x`, always an effect again.
    pub fn integrate_along(&self, p: &MeasurableFn<S>) -> Result<Effect<S>> {
        if p.space() != &self.space {
            return Err(Error::SpaceMismatch(
                "predicate space differs from POVM outcome space".into(),
            ));
        }
        let mut sum = ComplexMatrix::<S>::zeros(self.dim, self.dim);
        for i in 0..self.len() {
            let v = p.value(i);
            if v.im.abs() > self.tol.herm
                || v.re < -self.tol.psd
                || v.re > S::one() + self.tol.psd
            {
                return Err(Error::RangeError(format!(
                    "predicate value {} + {}i at atom {:?} is outside [0, 1]",
                    v.re,
                    v.im,
                    self.space.label(i)
                )));
            }
            sum = sum.add(&self.effects[i].matrix().scale_real(v.re))?;
        }
        Effect::with_tolerances(sum, &self.tol)
    }
}

/// How to compute the total variation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariationMode {
    /// Sum of per-atom operator norms (the supremum in closed form).
    ClosedForm,
    /// Enumerate every partition of the atom set (at most 10 atoms).
    BruteForce,
}

/// An operator-valued density: one PSD operator per atom, zero on null
/// atoms. This is the value of a Radon-Nikodym derivative `dA/dmu`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorDensity<S: Scalar> {
    space: FiniteSpace,
    measure: FiniteMeasure<S>,
    values: Vec<ComplexMatrix<S>>,
}

impl<S: Scalar> OperatorDensity<S> {
    /// Validating constructor. The PSD check scales its tolerance with the
    /// inverse atom mass, matching the rounding introduced by division.
    pub fn new(
        measure: FiniteMeasure<S>,
        values: Vec<ComplexMatrix<S>>,
        tol: &Tolerances<S>,
    ) -> Result<Self> {
        let space = measure.space().clone();
        if values.len() != space.len() {
            return Err(Error::SpaceMismatch(format!(
                "expected {} density values, got {}",
                space.len(),
                values.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if measure.is_null_atom(i) {
                if v.max_abs_entry() != S::zero() {
                    return Err(Error::NotContinuous(format!(
                        "nonzero density at null atom {:?}",
                        space.label(i)
                    )));
                }
                continue;
            }
            let scale = S::one().max(S::one() / measure.mass(i));
            let spec = spectral_decompose(v, tol)?;
            if let Some(&min) = spec.eigenvalues.last() {
                if min < -tol.psd * scale {
                    return Err(Error::NotPsd {
                        eigenvalue: min.to_f64().unwrap_or(f64::NAN),
                        tolerance: (tol.psd * scale).to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(OperatorDensity {
            space,
            measure,
            values,
        })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn measure(&self) -> &FiniteMeasure<S> {
        &self.measure
    }

    pub fn value(&self, i: usize) -> &ComplexMatrix<S> {
        &self.values[i]
    }

    /// Reconstruct the POVM value on a subset: `sum_{x in M} value(x) mu({x})`.
    pub fn reconstruct_on(&self, subset: &BTreeSet<usize>) -> Result<ComplexMatrix<S>> {
        let dim = self.values[0].rows();
        let mut sum = ComplexMatrix::<S>::zeros(dim, dim);
        for &i in subset {
            if i >= self.values.len() {
                return Err(Error::UnknownAtom(format!("atom index {i}")));
            }
            sum = sum.add(&self.values[i].scale_real(self.measure.mass(i)))?;
        }
        Ok(sum)
    }
}

/// All partitions of `{0, .., n-1}` as lists of blocks, enumerated through
/// restricted growth strings.
pub(crate) fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    fn recurse(
        i: usize,
        n: usize,
        max_used: usize,
        assignment: &mut Vec<usize>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if i == n {
            let blocks = max_used + 1;
            let mut partition = vec![Vec::new(); blocks];
            for (elem, &b) in assignment.iter().enumerate() {
                partition[b].push(elem);
            }
            out.push(partition);
            return;
        }
        for b in 0..=max_used + 1 {
            assignment[i] = b;
            recurse(i + 1, n, max_used.max(b), assignment, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    // First element always opens block 0.
    recurse(1, n, 0, &mut assignment, &mut out);
    out
}
