//! Conversions among the equivalent representations of a POVM.
//!
//! A POVM on a finite space can be presented four ways: as the effect family
//! itself, as a statistical map sending states to outcome distributions, as
//! a positive unital map from bounded functions to operators (the Heisenberg
//! picture), and as a predual map from trace-class operators to integrable
//! functions (the Schrodinger picture). This module implements each
//! direction of each correspondence, the state/effect duality underlying
//! them, and the commuting-square checks that make the correspondences
//! natural in both the Hilbert space and the outcome space.
//!
//! Black-box directions (a functional or statistical map given only as a
//! callable) are reconstructed by tomography over an informationally
//! complete family of pure states and rejected when the probe residuals
//! show the input was not affine.

use std::collections::BTreeSet;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::operator::{
    hermitian_eigen, operator_norm, ComplexMatrix, ConjugationDirection, DensityMatrix, Effect,
    Isometry,
};
use crate::outcome::{
    kleisli_extension, l1_action, Distribution, FiniteMeasure, FiniteSpace, KleisliMap,
    MeasurableFn,
};
use crate::povm::Povm;
use crate::scalar::{Scalar, Tolerances, C};

/// The informationally complete family of pure states used for tomography:
/// the basis projectors, then for each pair `j < k` the projectors onto
/// `(e_j + e_k)/sqrt(2)` and `(e_j + i e_k)/sqrt(2)`.
pub fn tomography_matrices<S: Scalar>(dim: usize) -> Vec<ComplexMatrix<S>> {
    let mut out = Vec::with_capacity(dim * dim);
    let basis = |j: usize| {
        let mut v = vec![C::<S>::zero(); dim];
        v[j] = Complex::new(S::one(), S::zero());
        v
    };
    for j in 0..dim {
        let e = basis(j);
        out.push(ComplexMatrix::outer(&e, &e));
    }
    let half = S::from_real(0.5);
    for j in 0..dim {
        for k in (j + 1)..dim {
            let mut plus = basis(j);
            plus[k] = Complex::new(S::one(), S::zero());
            out.push(ComplexMatrix::outer(&plus, &plus).scale_real(half));
            let mut imag = basis(j);
            imag[k] = Complex::new(S::zero(), S::one());
            out.push(ComplexMatrix::outer(&imag, &imag).scale_real(half));
        }
    }
    out
}

pub fn tomography_states<S: Scalar>(dim: usize) -> Vec<DensityMatrix<S>> {
    tomography_matrices(dim)
        .into_iter()
        .map(|m| DensityMatrix::new(m).expect("rank-1 projectors have unit trace"))
        .collect()
}

pub fn tomography_effects<S: Scalar>(dim: usize) -> Vec<Effect<S>> {
    tomography_matrices(dim)
        .into_iter()
        .map(|m| Effect::new(m).expect("rank-1 projectors are effects"))
        .collect()
}

/// Rebuild the Hermitian operator `A` from the pairings `tr(rho A)` over the
/// tomography family, in the order produced by [`tomography_matrices`].
fn hermitian_from_pairings<S: Scalar>(dim: usize, pairings: &[S]) -> ComplexMatrix<S> {
    let mut a = ComplexMatrix::<S>::zeros(dim, dim);
    for j in 0..dim {
        a.set(j, j, Complex::new(pairings[j], S::zero()));
    }
    let half = S::from_real(0.5);
    let mut idx = dim;
    for j in 0..dim {
        for k in (j + 1)..dim {
            let mean = half * (pairings[j] + pairings[k]);
            let re = pairings[idx] - mean;
            let im = mean - pairings[idx + 1];
            idx += 2;
            a.set(j, k, Complex::new(re, im));
            a.set(k, j, Complex::new(re, -im));
        }
    }
    a
}

fn pair_with<S: Scalar>(rho: &ComplexMatrix<S>, a: &ComplexMatrix<S>) -> Result<S> {
    Ok(rho.matmul(a)?.trace()?.re)
}

/// Statistical map of a POVM: states to outcome distributions,
/// `rho -> (x -> tr(rho A_x))`.
#[derive(Clone, Debug)]
pub struct StatisticalMap<S: Scalar> {
    povm: Povm<S>,
}

impl<S: Scalar> StatisticalMap<S> {
    pub fn new(povm: Povm<S>) -> Self {
        StatisticalMap { povm }
    }

    pub fn povm(&self) -> &Povm<S> {
        &self.povm
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }

    pub fn space(&self) -> &FiniteSpace {
        self.povm.space()
    }

    pub fn apply(&self, rho: &DensityMatrix<S>) -> Result<Distribution<S>> {
        if rho.dim() != self.povm.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state dimension {} vs POVM dimension {}",
                rho.dim(),
                self.povm.dim()
            )));
        }
        let prob = (0..self.povm.len())
            .map(|i| pair_with(rho.matrix(), self.povm.effect(i).matrix()))
            .collect::<Result<Vec<_>>>()?;
        Distribution::with_tolerance(
            self.povm.space().clone(),
            prob,
            self.povm.tolerances().prob,
        )
    }
}

impl<S: Scalar> From<Povm<S>> for StatisticalMap<S> {
    fn from(povm: Povm<S>) -> Self {
        StatisticalMap::new(povm)
    }
}

/// Recover the POVM behind a black-box statistical map by tomography.
///
/// The map is evaluated on the informationally complete family to solve for
/// each effect, then probed on extra mixed states; residuals beyond the
/// reconstruction tolerance reject the input as non-affine.
pub fn povm_from_statistical<S: Scalar>(
    alpha: impl Fn(&DensityMatrix<S>) -> Distribution<S>,
    dim: usize,
    space: &FiniteSpace,
) -> Result<Povm<S>> {
    povm_from_statistical_with(alpha, dim, space, Tolerances::default())
}

pub fn povm_from_statistical_with<S: Scalar>(
    alpha: impl Fn(&DensityMatrix<S>) -> Distribution<S>,
    dim: usize,
    space: &FiniteSpace,
    tol: Tolerances<S>,
) -> Result<Povm<S>> {
    let states = tomography_states::<S>(dim);
    let outputs: Vec<Distribution<S>> = states.iter().map(&alpha).collect();
    for d in &outputs {
        if d.space() != space {
            return Err(Error::SpaceMismatch(
                "statistical map output on a different outcome space".into(),
            ));
        }
    }
    let effects = (0..space.len())
        .map(|x| {
            let pairings: Vec<S> = outputs.iter().map(|d| d.prob(x)).collect();
            Effect::with_tolerances(hermitian_from_pairings(dim, &pairings), &tol).map_err(|e| {
                Error::NotAffine(format!("reconstructed effect at atom {x} invalid: {e}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let povm = Povm::with_tolerances(space.clone(), effects, tol)
        .map_err(|e| Error::NotAffine(format!("reconstruction is not a POVM: {e}")))?;

    // Affinity probes: states outside the solving family must agree with
    // the reconstruction.
    for probe in affinity_probes(dim, &states) {
        let expected = alpha(&probe);
        for x in 0..space.len() {
            let predicted = pair_with(probe.matrix(), povm.effect(x).matrix())?;
            if (expected.prob(x) - predicted).abs() > tol.recon {
                return Err(Error::NotAffine(format!(
                    "probe state disagrees with reconstruction at atom {x}"
                )));
            }
        }
    }
    Ok(povm)
}

/// Deterministic probe states distinct from the tomography family.
fn affinity_probes<S: Scalar>(
    dim: usize,
    family: &[DensityMatrix<S>],
) -> Vec<DensityMatrix<S>> {
    let mut probes = vec![DensityMatrix::maximally_mixed(dim)];
    // Pairwise midpoints walk through the whole family.
    let half = S::from_real(0.5);
    for w in family.windows(2).take(4) {
        let mix = w[0]
            .matrix()
            .scale_real(half)
            .add(&w[1].matrix().scale_real(half))
            .expect("same dimension");
        probes.push(DensityMatrix::new(mix).expect("convex combination"));
    }
    // One state with all entries touched.
    let v: Vec<C<S>> = (0..dim)
        .map(|i| Complex::new(S::one(), S::from_real(i as f64 / dim as f64)))
        .collect();
    probes.push(DensityMatrix::pure(&v).expect("nonzero vector"));
    probes
}

/// The effect functional of a state: `E -> tr(rho E)`, a sigma-effect-module
/// morphism into `[0, 1]`.
#[derive(Clone, Debug)]
pub struct StateFunctional<S: Scalar> {
    rho: DensityMatrix<S>,
}

impl<S: Scalar> StateFunctional<S> {
    pub fn new(rho: DensityMatrix<S>) -> Self {
        StateFunctional { rho }
    }

    pub fn state(&self) -> &DensityMatrix<S> {
        &self.rho
    }

    pub fn eval(&self, e: &Effect<S>) -> Result<S> {
        if e.dim() != self.rho.dim() {
            return Err(Error::DimensionMismatch(format!(
                "effect dimension {} vs state dimension {}",
                e.dim(),
                self.rho.dim()
            )));
        }
        pair_with(self.rho.matrix(), e.matrix())
    }
}

/// `rho -> (E -> tr(rho E))`, the easy direction of the state/effect duality.
pub fn density_to_state<S: Scalar>(rho: DensityMatrix<S>) -> StateFunctional<S> {
    StateFunctional::new(rho)
}

/// Recover the density matrix behind a black-box effect functional.
///
/// Tomography over the projector family rebuilds a Hermitian candidate;
/// probes on effects outside the family plus the PSD/trace validation
/// reject functionals that are not states.
pub fn state_to_density<S: Scalar>(
    s: impl Fn(&Effect<S>) -> S,
    dim: usize,
) -> Result<DensityMatrix<S>> {
    state_to_density_with(s, dim, Tolerances::default())
}

pub fn state_to_density_with<S: Scalar>(
    s: impl Fn(&Effect<S>) -> S,
    dim: usize,
    tol: Tolerances<S>,
) -> Result<DensityMatrix<S>> {
    let effects = tomography_effects::<S>(dim);
    let pairings: Vec<S> = effects.iter().map(&s).collect();
    let candidate = hermitian_from_pairings(dim, &pairings);
    let rho = DensityMatrix::with_tolerances(candidate, &tol)
        .map_err(|e| Error::NotAState(format!("reconstruction failed validation: {e}")))?;

    // Probe on effects outside the solving family.
    let mut probes = vec![
        Effect::identity(dim),
        Effect::zero(dim),
        Effect::new(ComplexMatrix::identity(dim).scale_real(S::from_real(0.5)))
            .expect("id/2 is an effect"),
    ];
    let uniform: Vec<C<S>> = (0..dim)
        .map(|_| Complex::new(S::one(), S::zero()))
        .collect();
    let norm = S::from_real(dim as f64);
    probes.push(
        Effect::new(ComplexMatrix::outer(&uniform, &uniform).scale_real(S::one() / norm))
            .expect("projector"),
    );
    let phased: Vec<C<S>> = (0..dim)
        .map(|i| {
            if i % 2 == 0 {
                Complex::new(S::one(), S::zero())
            } else {
                Complex::new(S::zero(), S::one())
            }
        })
        .collect();
    probes.push(
        Effect::new(ComplexMatrix::outer(&phased, &phased).scale_real(S::one() / norm))
            .expect("projector"),
    );

    for probe in &probes {
        let expected = s(probe);
        let predicted = pair_with(rho.matrix(), probe.matrix())?;
        if (expected - predicted).abs() > tol.recon {
            return Err(Error::NotAState(format!(
                "functional disagrees with affine reconstruction by {:e}",
                (expected - predicted).abs()
            )));
        }
    }
    Ok(rho)
}

/// A finitely supported distribution over density matrices.
#[derive(Clone, Debug)]
pub struct StateEnsemble<S: Scalar> {
    entries: Vec<(S, DensityMatrix<S>)>,
}

impl<S: Scalar> StateEnsemble<S> {
    pub fn new(entries: Vec<(S, DensityMatrix<S>)>) -> Result<Self> {
        Self::with_tolerance(entries, S::from_real(1e-9))
    }

    pub fn with_tolerance(entries: Vec<(S, DensityMatrix<S>)>, eps: S) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDistribution("empty ensemble".into()));
        }
        let dim = entries[0].1.dim();
        if entries.iter().any(|(_, rho)| rho.dim() != dim) {
            return Err(Error::DimensionMismatch(
                "ensemble states of mixed dimension".into(),
            ));
        }
        let mut total = S::zero();
        for (w, _) in &entries {
            if !w.is_finite() || *w < -eps {
                return Err(Error::InvalidDistribution(format!("weight {w}")));
            }
            total = total + *w;
        }
        if (total - S::one()).abs() > eps {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(StateEnsemble { entries })
    }

    pub fn point_mass(rho: DensityMatrix<S>) -> Self {
        StateEnsemble {
            entries: vec![(S::one(), rho)],
        }
    }

    pub fn entries(&self) -> &[(S, DensityMatrix<S>)] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries[0].1.dim()
    }

    /// The average state `sum_i w_i rho_i`; the algebra map of the density-
    /// matrix functor at finite support.
    pub fn barycenter(&self) -> Result<DensityMatrix<S>> {
        let dim = self.dim();
        let mut sum = ComplexMatrix::<S>::zeros(dim, dim);
        for (w, rho) in &self.entries {
            sum = sum.add(&rho.matrix().scale_real(*w))?;
        }
        DensityMatrix::new(sum)
    }

    /// Push every state through an isometry, keeping the weights.
    pub fn map(&self, g: &Isometry<S>) -> Result<StateEnsemble<S>> {
        let entries = self
            .entries
            .iter()
            .map(|(w, rho)| Ok((*w, dm_map(g, rho)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(StateEnsemble { entries })
    }
}

/// Functorial action on states: `rho -> g rho g^dag`.
pub fn dm_map<S: Scalar>(g: &Isometry<S>, rho: &DensityMatrix<S>) -> Result<DensityMatrix<S>> {
    let moved = g.conjugate(rho.matrix(), ConjugationDirection::Forward)?;
    DensityMatrix::new(moved)
}

/// A normal positive unital map from bounded functions on `(X, mu)` to
/// operators: determined by its images on singleton indicators, extended
/// linearly. Images at null atoms are canonically zero.
#[derive(Clone, Debug)]
pub struct ObservableMap<S: Scalar> {
    measure: FiniteMeasure<S>,
    dim: usize,
    images: Vec<ComplexMatrix<S>>,
    tol: Tolerances<S>,
}

impl<S: Scalar> ObservableMap<S> {
    /// Validating constructor. Images at null atoms are replaced by the
    /// canonical zero representative before validation.
    pub fn new(
        measure: FiniteMeasure<S>,
        images: Vec<ComplexMatrix<S>>,
        tol: Tolerances<S>,
    ) -> Result<Self> {
        let n = measure.space().len();
        if images.len() != n {
            return Err(Error::SpaceMismatch(format!(
                "expected {n} images, got {}",
                images.len()
            )));
        }
        let dim = images[0].dim()?;
        if images.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::DimensionMismatch(
                "images of mixed dimension".into(),
            ));
        }
        let images: Vec<ComplexMatrix<S>> = images
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                if measure.is_null_atom(i) {
                    ComplexMatrix::zeros(dim, dim)
                } else {
                    m
                }
            })
            .collect();
        let mut sum = ComplexMatrix::<S>::zeros(dim, dim);
        for (i, m) in images.iter().enumerate() {
            if measure.is_null_atom(i) {
                continue;
            }
            let dev = m.hermitian_deviation()?;
            if dev > tol.herm {
                return Err(Error::NotPositive(format!(
                    "image at atom {i} is not Hermitian (deviation {dev:e})"
                )));
            }
            let (eigenvalues, _) = hermitian_eigen(m);
            if let Some(&min) = eigenvalues.last() {
                if min < -tol.psd {
                    return Err(Error::NotPositive(format!(
                        "image at atom {i} has eigenvalue {min:e}"
                    )));
                }
            }
            sum = sum.add(m)?;
        }
        let id = ComplexMatrix::identity(dim);
        let residual = operator_norm(&sum.sub(&id)?)?;
        if residual > tol.norm {
            return Err(Error::NotAPovm(format!(
                "images sum deviates from identity by {residual:e}; map is not unital"
            )));
        }
        Ok(ObservableMap {
            measure,
            dim,
            images,
            tol,
        })
    }

    /// The map `f -> integral of f along the POVM`. Requires mu-continuity:
    /// without it the map is not well defined on a.e.-equality classes.
    pub fn from_povm(povm: &Povm<S>, mu: &FiniteMeasure<S>) -> Result<Self> {
        if !povm.check_mu_continuous(mu)? {
            return Err(Error::NotContinuous(
                "POVM carries mass on a mu-null atom; the induced map is not well defined".into(),
            ));
        }
        let images = povm
            .effects()
            .iter()
            .map(|e| e.matrix().clone())
            .collect();
        Self::new(mu.clone(), images, *povm.tolerances())
    }

    pub fn measure(&self) -> &FiniteMeasure<S> {
        &self.measure
    }

    pub fn space(&self) -> &FiniteSpace {
        self.measure.space()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn image(&self, i: usize) -> &ComplexMatrix<S> {
        &self.images[i]
    }

    pub fn tolerances(&self) -> &Tolerances<S> {
        &self.tol
    }

    /// Apply to a bounded function: `sum over mu-positive atoms of
    /// f(x) psi(1_x)`. Zero-a.e. functions map to the zero operator by
    /// construction.
    pub fn apply(&self, f: &MeasurableFn<S>) -> Result<ComplexMatrix<S>> {
        if f.space() != self.space() {
            return Err(Error::SpaceMismatch(
                "function space differs from map domain".into(),
            ));
        }
        let mut sum = ComplexMatrix::<S>::zeros(self.dim, self.dim);
        for i in 0..self.images.len() {
            if self.measure.is_null_atom(i) {
                continue;
            }
            let v = f.value(i);
            if v.is_zero() {
                continue;
            }
            sum = sum.add(&self.images[i].scale(v))?;
        }
        Ok(sum)
    }

    /// Recover the POVM: `M -> psi(1_M)`, always mu-continuous.
    pub fn to_povm(&self) -> Result<Povm<S>> {
        let effects = self
            .images
            .iter()
            .map(|m| Effect::with_tolerances(m.clone(), &self.tol))
            .collect::<Result<Vec<_>>>()?;
        Povm::with_tolerances(self.space().clone(), effects, self.tol)
    }

    /// Multiplicativity on indicator pairs; by bilinearity this decides
    /// whether the map is a *-homomorphism, equivalently whether the
    /// underlying POVM is projection valued.
    pub fn is_star_homomorphism(&self) -> Result<bool> {
        for i in 0..self.images.len() {
            for j in i..self.images.len() {
                let product = self.images[i].matmul(&self.images[j])?;
                let expected = if i == j {
                    self.images[i].clone()
                } else {
                    ComplexMatrix::zeros(self.dim, self.dim)
                };
                if operator_norm(&product.sub(&expected)?)? > self.tol.recon {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The predual map: kernels `B_x = psi(1_x)/mu({x})` at positive atoms.
    pub fn to_predual(&self) -> Result<PredualMap<S>> {
        let kernel = (0..self.images.len())
            .map(|i| {
                if self.measure.is_null_atom(i) {
                    ComplexMatrix::zeros(self.dim, self.dim)
                } else {
                    self.images[i].scale_real(S::one() / self.measure.mass(i))
                }
            })
            .collect();
        PredualMap::new(self.measure.clone(), kernel, self.tol)
    }

    pub fn approx_eq(&self, other: &Self, eps: S) -> Result<bool> {
        if self.space() != other.space() || self.dim != other.dim {
            return Ok(false);
        }
        for i in 0..self.images.len() {
            let diff = self.images[i].sub(&other.images[i])?;
            if operator_norm(&diff)? > eps {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A positive trace-compatible map from trace-class operators on `C^d` to
/// integrable functions on `(X, mu)`: `T -> (x -> tr(T B_x))` for a PSD
/// kernel family with `sum_x mu({x}) B_x = id`.
#[derive(Clone, Debug)]
pub struct PredualMap<S: Scalar> {
    measure: FiniteMeasure<S>,
    dim: usize,
    kernel: Vec<ComplexMatrix<S>>,
    tol: Tolerances<S>,
}

impl<S: Scalar> PredualMap<S> {
    pub fn new(
        measure: FiniteMeasure<S>,
        kernel: Vec<ComplexMatrix<S>>,
        tol: Tolerances<S>,
    ) -> Result<Self> {
        let n = measure.space().len();
        if kernel.len() != n {
            return Err(Error::SpaceMismatch(format!(
                "expected {n} kernel operators, got {}",
                kernel.len()
            )));
        }
        let dim = kernel[0].dim()?;
        if kernel.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::DimensionMismatch(
                "kernel operators of mixed dimension".into(),
            ));
        }
        let kernel: Vec<ComplexMatrix<S>> = kernel
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                if measure.is_null_atom(i) {
                    ComplexMatrix::zeros(dim, dim)
                } else {
                    m
                }
            })
            .collect();
        let mut weighted_sum = ComplexMatrix::<S>::zeros(dim, dim);
        for (i, m) in kernel.iter().enumerate() {
            if measure.is_null_atom(i) {
                continue;
            }
            let dev = m.hermitian_deviation()?;
            if dev > tol.herm {
                return Err(Error::NotPositive(format!(
                    "kernel at atom {i} is not Hermitian (deviation {dev:e})"
                )));
            }
            // Division by small masses amplifies rounding; scale the PSD
            // tolerance accordingly.
            let scale = S::one().max(S::one() / measure.mass(i));
            let (eigenvalues, _) = hermitian_eigen(m);
            if let Some(&min) = eigenvalues.last() {
                if min < -tol.psd * scale {
                    return Err(Error::NotPositive(format!(
                        "kernel at atom {i} has eigenvalue {min:e}"
                    )));
                }
            }
            weighted_sum = weighted_sum.add(&m.scale_real(measure.mass(i)))?;
        }
        let id = ComplexMatrix::identity(dim);
        let residual = operator_norm(&weighted_sum.sub(&id)?)?;
        if residual > tol.recon.max(tol.norm) {
            return Err(Error::NotPositive(format!(
                "trace compatibility fails: weighted kernel sum deviates from identity by {residual:e}"
            )));
        }
        Ok(PredualMap {
            measure,
            dim,
            kernel,
            tol,
        })
    }

    pub fn measure(&self) -> &FiniteMeasure<S> {
        &self.measure
    }

    pub fn space(&self) -> &FiniteSpace {
        self.measure.space()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kernel(&self, i: usize) -> &ComplexMatrix<S> {
        &self.kernel[i]
    }

    pub fn tolerances(&self) -> &Tolerances<S> {
        &self.tol
    }

    /// Apply to a trace-class operator (any operator in finite dimension):
    /// the integrable function `x -> tr(T B_x)`.
    pub fn apply(&self, t: &ComplexMatrix<S>) -> Result<MeasurableFn<S>> {
        let d = t.dim()?;
        if d != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "operator dimension {d} vs map dimension {}",
                self.dim
            )));
        }
        let values = self
            .kernel
            .iter()
            .map(|b| Ok(t.matmul(b)?.trace()?))
            .collect::<Result<Vec<_>>>()?;
        MeasurableFn::new(self.space().clone(), values)
    }

    /// Largest deviation of `sum_x Phi(T)(x) mu({x})` from `tr(T)` over the
    /// matrix units; zero for a valid map.
    pub fn trace_compatibility_residual(&self) -> Result<S> {
        let mut worst = S::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let unit = ComplexMatrix::matrix_unit(self.dim, i, j);
                let f = self.apply(&unit)?;
                let integral = crate::outcome::integrate(&f, &self.measure)?;
                let expected = unit.trace()?;
                worst = worst.max((integral - expected).norm());
            }
        }
        Ok(worst)
    }

    /// Recover the observable map: the image of `1_x` is the operator dual
    /// to `T -> Phi(T)(x) mu({x})`, read off entrywise on matrix units.
    pub fn to_observable(&self) -> Result<ObservableMap<S>> {
        let mut images = Vec::with_capacity(self.kernel.len());
        for x in 0..self.kernel.len() {
            let mut img = ComplexMatrix::<S>::zeros(self.dim, self.dim);
            if !self.measure.is_null_atom(x) {
                let mass = self.measure.mass(x);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        let unit = ComplexMatrix::matrix_unit(self.dim, i, j);
                        let value = self.apply(&unit)?.value(x).scale(mass);
                        // tr(E_ij B) = B[j][i], so the dual operator picks up
                        // the (j, i) entry from the unit at (i, j).
                        img.set(j, i, value);
                    }
                }
            }
            images.push(img);
        }
        ObservableMap::new(self.measure.clone(), images, self.tol)
            .map_err(|e| Error::NotPositive(format!("reconstructed images invalid: {e}")))
    }

    pub fn approx_eq(&self, other: &Self, eps: S) -> Result<bool> {
        if self.space() != other.space() || self.dim != other.dim {
            return Ok(false);
        }
        for i in 0..self.kernel.len() {
            let diff = self.kernel[i].sub(&other.kernel[i])?;
            if operator_norm(&diff)? > eps {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Commuting-square check on the state side: for every test state,
/// `beta(g rho g^dag) = K(f)(alpha(rho))` within the probability tolerance.
pub fn check_comma_square_dm<S: Scalar>(
    alpha: &StatisticalMap<S>,
    beta: &StatisticalMap<S>,
    f: &KleisliMap<S>,
    g: &Isometry<S>,
    test_states: &[DensityMatrix<S>],
) -> Result<bool> {
    if alpha.dim() != g.domain_dim() || beta.dim() != g.codomain_dim() {
        return Err(Error::DimensionMismatch(
            "isometry does not connect the two Hilbert spaces".into(),
        ));
    }
    if alpha.space() != f.domain() || beta.space() != f.codomain() {
        return Err(Error::SpaceMismatch(
            "kernel does not connect the two outcome spaces".into(),
        ));
    }
    let eps = alpha.povm().tolerances().prob;
    for rho in test_states {
        let lhs = beta.apply(&dm_map(g, rho)?)?;
        let rhs = kleisli_extension(f, &alpha.apply(rho)?)?;
        if !lhs.approx_eq(&rhs, eps) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Commuting-square check on the effect side: for every singleton indicator
/// (and any extra predicates), integrating the pulled-back predicate along
/// `a` matches pulling the `b`-integral back through the isometry.
pub fn check_comma_square_ef<S: Scalar>(
    a: &Povm<S>,
    b: &Povm<S>,
    f: &KleisliMap<S>,
    g: &Isometry<S>,
    extra_predicates: &[MeasurableFn<S>],
) -> Result<bool> {
    if a.dim() != g.domain_dim() || b.dim() != g.codomain_dim() {
        return Err(Error::DimensionMismatch(
            "isometry does not connect the two Hilbert spaces".into(),
        ));
    }
    if a.space() != f.domain() || b.space() != f.codomain() {
        return Err(Error::SpaceMismatch(
            "kernel does not connect the two outcome spaces".into(),
        ));
    }
    let eps = a.tolerances().recon;
    let mut predicates: Vec<MeasurableFn<S>> = (0..b.space().len())
        .map(|y| MeasurableFn::singleton_indicator(b.space().clone(), y))
        .collect::<Result<Vec<_>>>()?;
    predicates.extend_from_slice(extra_predicates);

    for q in &predicates {
        if q.space() != b.space() {
            return Err(Error::SpaceMismatch(
                "test predicate lives on the wrong space".into(),
            ));
        }
        // Pull back through the kernel: x -> sum_y f(x)(y) q(y).
        let pulled_values: Vec<C<S>> = (0..a.space().len())
            .map(|x| {
                (0..b.space().len())
                    .map(|y| q.value(y).scale(f.prob(x, y)))
                    .fold(C::zero(), |acc, v| acc + v)
            })
            .collect();
        let pulled = MeasurableFn::new(a.space().clone(), pulled_values)?;
        let lhs = a.integrate_along(&pulled)?;
        let rhs = g.conjugate(
            b.integrate_along(q)?.matrix(),
            ConjugationDirection::Adjoint,
        )?;
        if operator_norm(&lhs.matrix().sub(&rhs)?)? > eps {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Naturality of the observable/predual correspondence in the Hilbert-space
/// argument: pulling back through `g` before taking preduals agrees with
/// conjugating trace-class operators forward first. Checked on matrix units.
pub fn check_naturality_isometry<S: Scalar>(
    psi: &ObservableMap<S>,
    g: &Isometry<S>,
) -> Result<bool> {
    if psi.dim() != g.codomain_dim() {
        return Err(Error::DimensionMismatch(format!(
            "map dimension {} vs isometry codomain {}",
            psi.dim(),
            g.codomain_dim()
        )));
    }
    let d = g.domain_dim();
    let pulled_images = (0..psi.space().len())
        .map(|i| g.conjugate(psi.image(i), ConjugationDirection::Adjoint))
        .collect::<Result<Vec<_>>>()?;
    let pulled = ObservableMap::new(psi.measure().clone(), pulled_images, *psi.tolerances())?;
    let lhs = pulled.to_predual()?;
    let phi = psi.to_predual()?;

    let eps = psi.tolerances().recon;
    for i in 0..d {
        for j in 0..d {
            let unit = ComplexMatrix::matrix_unit(d, i, j);
            let via_pullback = lhs.apply(&unit)?;
            let pushed = g.conjugate(&unit, ConjugationDirection::Forward)?;
            let via_pushforward = phi.apply(&pushed)?;
            for x in 0..psi.space().len() {
                if (via_pullback.value(x) - via_pushforward.value(x)).norm() > eps {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Naturality in the outcome-space argument: composing with the `L^inf`
/// action of a measure morphism before taking preduals agrees with applying
/// the `L^1` action afterwards. Checked on matrix units, per atom and on
/// every subset.
pub fn check_naturality_measure<S: Scalar>(
    psi: &ObservableMap<S>,
    f: &crate::outcome::AtomMap,
    nu: &FiniteMeasure<S>,
) -> Result<bool> {
    let mu = psi.measure();
    if f.domain() != psi.space() {
        return Err(Error::SpaceMismatch(
            "morphism domain differs from map domain".into(),
        ));
    }
    if f.codomain() != nu.space() {
        return Err(Error::SpaceMismatch(
            "morphism codomain differs from target measure space".into(),
        ));
    }
    if !crate::outcome::check_measure_morphism(f, mu, nu)? {
        return Err(Error::NotAMorphism(
            "pushforward mass on a nu-null atom".into(),
        ));
    }

    // psi composed with the L^inf action: image at y is the fiber sum.
    let d = psi.dim();
    let mut composed_images = vec![ComplexMatrix::<S>::zeros(d, d); nu.space().len()];
    for x in 0..psi.space().len() {
        let y = f.apply(x);
        composed_images[y] = composed_images[y].add(psi.image(x))?;
    }
    let composed = ObservableMap::new(nu.clone(), composed_images, *psi.tolerances())?;
    let lhs = composed.to_predual()?;
    let phi = psi.to_predual()?;

    let eps = psi.tolerances().recon;
    let ny = nu.space().len();
    for i in 0..d {
        for j in 0..d {
            let unit = ComplexMatrix::matrix_unit(d, i, j);
            let via_compose = lhs.apply(&unit)?;
            let via_l1 = l1_action(f, mu, nu, &phi.apply(&unit)?)?;
            for y in 0..ny {
                if nu.is_null_atom(y) {
                    continue;
                }
                if (via_compose.value(y) - via_l1.value(y)).norm() > eps {
                    return Ok(false);
                }
            }
            // Integral form over every subset, feasible at desk scale.
            if ny <= 12 {
                for mask in 0..(1u32 << ny) {
                    let subset: BTreeSet<usize> =
                        (0..ny).filter(|y| mask & (1 << y) != 0).collect();
                    let weighted = |fun: &MeasurableFn<S>| -> C<S> {
                        subset
                            .iter()
                            .map(|&y| fun.value(y).scale(nu.mass(y)))
                            .fold(C::zero(), |acc, v| acc + v)
                    };
                    if (weighted(&via_compose) - weighted(&via_l1)).norm()
                        > eps * S::from_real(ny as f64)
                    {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}
