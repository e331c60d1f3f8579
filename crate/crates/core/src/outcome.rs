//! Finite measurable spaces, measures, function classes, distributions, and
//! stochastic kernels.
//!
//! Sigma-algebras are full power sets of finite atom sets, so every measure-
//! theoretic construction here is exactly computable. Almost-everywhere
//! equality classes are represented canonically: a function representing an
//! `L^inf` or `L^1` class is zero on every null atom.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, C};

/// A finite set of labeled atoms; the sigma-algebra is implicitly the full
/// power set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    atoms: Vec<String>,
}

impl FiniteSpace {
    pub fn new(atoms: Vec<String>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidSpace("no atoms".into()));
        }
        let mut seen = BTreeSet::new();
        for a in &atoms {
            if a.is_empty() {
                return Err(Error::InvalidSpace("empty atom label".into()));
            }
            if !seen.insert(a.clone()) {
                return Err(Error::InvalidSpace(format!("duplicate atom label {a:?}")));
            }
        }
        Ok(FiniteSpace { atoms })
    }

    /// Space with atoms `"0"`, `"1"`, ... for quick construction.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect())
    }

    pub fn from_labels(labels: &[&str]) -> Result<Self> {
        Self::new(labels.iter().map(|s| s.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn label(&self, i: usize) -> &str {
        &self.atoms[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == label)
    }

    /// Resolve a list of labels to a deduplicated index set.
    pub fn subset_indices<T: AsRef<str>>(&self, labels: &[T]) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for l in labels {
            let l = l.as_ref();
            match self.index_of(l) {
                Some(i) => {
                    out.insert(i);
                }
                None => return Err(Error::UnknownAtom(l.to_string())),
            }
        }
        Ok(out)
    }
}

fn check_same_space(a: &FiniteSpace, b: &FiniteSpace, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::SpaceMismatch(format!(
            "{what}: {:?} vs {:?}",
            a.atoms(),
            b.atoms()
        )));
    }
    Ok(())
}

/// A finite measure: one nonnegative mass per atom.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMeasure<S: Scalar> {
    space: FiniteSpace,
    mass: Vec<S>,
}

impl<S: Scalar> FiniteMeasure<S> {
    pub fn new(space: FiniteSpace, mass: Vec<S>) -> Result<Self> {
        if mass.len() != space.len() {
            return Err(Error::InvalidMeasure(format!(
                "expected {} masses, got {}",
                space.len(),
                mass.len()
            )));
        }
        for (i, &m) in mass.iter().enumerate() {
            if !m.is_finite() || m < S::zero() {
                return Err(Error::InvalidMeasure(format!(
                    "mass {m} at atom {:?}",
                    space.label(i)
                )));
            }
        }
        Ok(FiniteMeasure { space, mass })
    }

    pub fn uniform(space: FiniteSpace, total: S) -> Result<Self> {
        let n = space.len();
        let m = total / S::from_real(n as f64);
        Self::new(space, vec![m; n])
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn mass(&self, i: usize) -> S {
        self.mass[i]
    }

    pub fn masses(&self) -> &[S] {
        &self.mass
    }

    pub fn total(&self) -> S {
        self.mass.iter().copied().sum()
    }

    pub fn is_null_atom(&self, i: usize) -> bool {
        self.mass[i] == S::zero()
    }

    /// True when every atom carries positive mass.
    pub fn is_strictly_positive(&self) -> bool {
        self.mass.iter().all(|&m| m > S::zero())
    }

    /// Measure of a subset given by atom indices.
    pub fn measure_of(&self, subset: &BTreeSet<usize>) -> S {
        subset.iter().map(|&i| self.mass[i]).sum()
    }
}

/// A complex-valued function on the atoms of a finite space.
///
/// This one representation serves three roles: plain measurable functions
/// (predicates), `L^inf` classes, and `L^1` classes. The class roles use the
/// canonical representative that vanishes on null atoms, produced by
/// [`MeasurableFn::canonicalize`].
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurableFn<S: Scalar> {
    space: FiniteSpace,
    values: Vec<C<S>>,
}

impl<S: Scalar> MeasurableFn<S> {
    pub fn new(space: FiniteSpace, values: Vec<C<S>>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::SpaceMismatch(format!(
                "expected {} values, got {}",
                space.len(),
                values.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::RangeError(format!(
                    "non-finite value at atom {:?}",
                    space.label(i)
                )));
            }
        }
        Ok(MeasurableFn { space, values })
    }

    pub fn from_real(space: FiniteSpace, values: Vec<S>) -> Result<Self> {
        let values = values
            .into_iter()
            .map(|v| C::new(v, S::zero()))
            .collect();
        Self::new(space, values)
    }

    pub fn constant(space: FiniteSpace, value: C<S>) -> Self {
        let n = space.len();
        MeasurableFn {
            space,
            values: vec![value; n],
        }
    }

    /// Indicator function of a subset of atoms.
    pub fn indicator(space: FiniteSpace, subset: &BTreeSet<usize>) -> Result<Self> {
        let n = space.len();
        for &i in subset {
            if i >= n {
                return Err(Error::UnknownAtom(format!("atom index {i}")));
            }
        }
        let values = (0..n)
            .map(|i| {
                if subset.contains(&i) {
                    C::new(S::one(), S::zero())
                } else {
                    C::zero()
                }
            })
            .collect();
        Ok(MeasurableFn { space, values })
    }

    /// Indicator of a single atom.
    pub fn singleton_indicator(space: FiniteSpace, i: usize) -> Result<Self> {
        Self::indicator(space, &BTreeSet::from([i]))
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn value(&self, i: usize) -> C<S> {
        self.values[i]
    }

    pub fn values(&self) -> &[C<S>] {
        &self.values
    }

    /// Canonical representative of the a.e.-equality class: zero on every
    /// `mu`-null atom.
    pub fn canonicalize(&self, mu: &FiniteMeasure<S>) -> Result<Self> {
        check_same_space(&self.space, mu.space(), "canonicalize")?;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| if mu.is_null_atom(i) { C::zero() } else { v })
            .collect();
        Ok(MeasurableFn {
            space: self.space.clone(),
            values,
        })
    }

    pub fn is_canonical(&self, mu: &FiniteMeasure<S>) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(i, v)| !mu.is_null_atom(i) || v.is_zero())
    }

    /// Almost-everywhere equality: compare only on `mu`-positive atoms.
    pub fn ae_eq(&self, other: &Self, mu: &FiniteMeasure<S>, eps: S) -> bool {
        self.space == other.space
            && self.space == *mu.space()
            && (0..self.space.len()).all(|i| {
                mu.is_null_atom(i) || (self.values[i] - other.values[i]).norm() <= eps
            })
    }
}

/// Integrate a function against a finite measure: `sum_x f(x) mu({x})`.
pub fn integrate<S: Scalar>(f: &MeasurableFn<S>, mu: &FiniteMeasure<S>) -> Result<C<S>> {
    check_same_space(f.space(), mu.space(), "integrate")?;
    Ok(f.values()
        .iter()
        .enumerate()
        .map(|(i, &v)| v.scale(mu.mass(i)))
        .fold(C::zero(), |a, b| a + b))
}

/// A total map between the atoms of two finite spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomMap {
    domain: FiniteSpace,
    codomain: FiniteSpace,
    image: Vec<usize>,
}

impl AtomMap {
    /// Build from the image label of each domain atom, in domain order.
    pub fn new(domain: FiniteSpace, codomain: FiniteSpace, images: &[&str]) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::SpaceMismatch(format!(
                "expected {} image labels, got {}",
                domain.len(),
                images.len()
            )));
        }
        let image = images
            .iter()
            .map(|l| {
                codomain
                    .index_of(l)
                    .ok_or_else(|| Error::UnknownAtom(l.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AtomMap {
            domain,
            codomain,
            image,
        })
    }

    pub fn from_indices(domain: FiniteSpace, codomain: FiniteSpace, image: Vec<usize>) -> Result<Self> {
        if image.len() != domain.len() {
            return Err(Error::SpaceMismatch("image length mismatch".into()));
        }
        if let Some(&bad) = image.iter().find(|&&i| i >= codomain.len()) {
            return Err(Error::UnknownAtom(format!("atom index {bad}")));
        }
        Ok(AtomMap {
            domain,
            codomain,
            image,
        })
    }

    pub fn identity(space: FiniteSpace) -> Self {
        let image = (0..space.len()).collect();
        AtomMap {
            domain: space.clone(),
            codomain: space,
            image,
        }
    }

    pub fn domain(&self) -> &FiniteSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSpace {
        &self.codomain
    }

    /// Index of `f(x)` for domain atom index `x`.
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    /// Domain indices mapped onto codomain atom `y`.
    pub fn fiber(&self, y: usize) -> Vec<usize> {
        (0..self.domain.len())
            .filter(|&x| self.image[x] == y)
            .collect()
    }
}

/// Pushforward measure `mu . f^{-1}` on the codomain of `f`.
pub fn pushforward_measure<S: Scalar>(
    f: &AtomMap,
    mu: &FiniteMeasure<S>,
) -> Result<FiniteMeasure<S>> {
    check_same_space(f.domain(), mu.space(), "pushforward_measure")?;
    let mut mass = vec![S::zero(); f.codomain().len()];
    for x in 0..f.domain().len() {
        mass[f.apply(x)] += mu.mass(x);
    }
    FiniteMeasure::new(f.codomain().clone(), mass)
}

/// Morphism condition for `f : (X, mu) -> (Y, nu)`: the pushforward of `mu`
/// vanishes on every `nu`-null atom.
pub fn check_measure_morphism<S: Scalar>(
    f: &AtomMap,
    mu: &FiniteMeasure<S>,
    nu: &FiniteMeasure<S>,
) -> Result<bool> {
    check_same_space(f.domain(), mu.space(), "check_measure_morphism domain")?;
    check_same_space(f.codomain(), nu.space(), "check_measure_morphism codomain")?;
    let pushed = pushforward_measure(f, mu)?;
    Ok((0..nu.space().len()).all(|y| !nu.is_null_atom(y) || pushed.mass(y) == S::zero()))
}

/// Contravariant `L^inf` action: precompose with `f` and canonicalize.
pub fn linfty_action<S: Scalar>(
    f: &AtomMap,
    mu: &FiniteMeasure<S>,
    nu: &FiniteMeasure<S>,
    phi: &MeasurableFn<S>,
) -> Result<MeasurableFn<S>> {
    check_same_space(phi.space(), nu.space(), "linfty_action function")?;
    if !check_measure_morphism(f, mu, nu)? {
        return Err(Error::NotAMorphism(
            "pushforward mass on a null atom".into(),
        ));
    }
    let values = (0..f.domain().len())
        .map(|x| phi.value(f.apply(x)))
        .collect();
    MeasurableFn::new(f.domain().clone(), values)?.canonicalize(mu)
}

/// Covariant `L^1` action: the unique function whose integral over every `N`
/// equals the integral of `phi` over `f^{-1}[N]`.
pub fn l1_action<S: Scalar>(
    f: &AtomMap,
    mu: &FiniteMeasure<S>,
    nu: &FiniteMeasure<S>,
    phi: &MeasurableFn<S>,
) -> Result<MeasurableFn<S>> {
    check_same_space(phi.space(), mu.space(), "l1_action function")?;
    if !check_measure_morphism(f, mu, nu)? {
        return Err(Error::NotAMorphism(
            "pushforward mass on a null atom".into(),
        ));
    }
    let phi = phi.canonicalize(mu)?;
    let mut values = vec![C::<S>::zero(); f.codomain().len()];
    for x in 0..f.domain().len() {
        values[f.apply(x)] += phi.value(x).scale(mu.mass(x));
    }
    for (y, v) in values.iter_mut().enumerate() {
        if nu.is_null_atom(y) {
            // The fiber carries no mu-mass (morphism condition), so the
            // accumulated numerator is already zero.
            *v = C::zero();
        } else {
            *v = v.unscale(nu.mass(y));
        }
    }
    MeasurableFn::new(f.codomain().clone(), values)
}

/// A probability distribution on a finite space.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<S: Scalar> {
    space: FiniteSpace,
    prob: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    /// Validates with the default probability tolerance `1e-9`. Inputs off
    /// by more are rejected, not renormalized.
    pub fn new(space: FiniteSpace, prob: Vec<S>) -> Result<Self> {
        Self::with_tolerance(space, prob, S::from_real(1e-9))
    }

    pub fn with_tolerance(space: FiniteSpace, prob: Vec<S>, eps: S) -> Result<Self> {
        if prob.len() != space.len() {
            return Err(Error::InvalidDistribution(format!(
                "expected {} probabilities, got {}",
                space.len(),
                prob.len()
            )));
        }
        for (i, &p) in prob.iter().enumerate() {
            if !p.is_finite() || p < -eps || p > S::one() + eps {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} at atom {:?}",
                    space.label(i)
                )));
            }
        }
        let total: S = prob.iter().copied().sum();
        if (total - S::one()).abs() > eps {
            return Err(Error::InvalidDistribution(format!(
                "total probability {total} is not 1"
            )));
        }
        Ok(Distribution { space, prob })
    }

    pub fn uniform(space: FiniteSpace) -> Self {
        let n = space.len();
        let p = S::one() / S::from_real(n as f64);
        Distribution {
            space,
            prob: vec![p; n],
        }
    }

    pub fn point_mass(space: FiniteSpace, atom: usize) -> Result<Self> {
        if atom >= space.len() {
            return Err(Error::UnknownAtom(format!("atom index {atom}")));
        }
        let mut prob = vec![S::zero(); space.len()];
        prob[atom] = S::one();
        Ok(Distribution { space, prob })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn prob(&self, i: usize) -> S {
        self.prob[i]
    }

    pub fn probs(&self) -> &[S] {
        &self.prob
    }

    pub fn total(&self) -> S {
        self.prob.iter().copied().sum()
    }

    pub fn approx_eq(&self, other: &Self, eps: S) -> bool {
        self.space == other.space
            && self
                .prob
                .iter()
                .zip(&other.prob)
                .all(|(a, b)| (*a - *b).abs() <= eps)
    }
}

/// A stochastic kernel `X -> G(Y)`: one distribution on `Y` per atom of `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct KleisliMap<S: Scalar> {
    domain: FiniteSpace,
    codomain: FiniteSpace,
    rows: Vec<Distribution<S>>,
}

impl<S: Scalar> KleisliMap<S> {
    pub fn new(
        domain: FiniteSpace,
        codomain: FiniteSpace,
        rows: Vec<Distribution<S>>,
    ) -> Result<Self> {
        if rows.len() != domain.len() {
            return Err(Error::SpaceMismatch(format!(
                "expected {} kernel rows, got {}",
                domain.len(),
                rows.len()
            )));
        }
        for row in &rows {
            check_same_space(row.space(), &codomain, "kernel row")?;
        }
        Ok(KleisliMap {
            domain,
            codomain,
            rows,
        })
    }

    /// The identity kernel `x -> delta_x`.
    pub fn identity(space: FiniteSpace) -> Result<Self> {
        let rows = (0..space.len())
            .map(|i| Distribution::point_mass(space.clone(), i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space.clone(), space, rows)
    }

    /// Deterministic kernel induced by an atom map.
    pub fn from_atom_map(f: &AtomMap) -> Result<Self> {
        let rows = (0..f.domain().len())
            .map(|x| Distribution::point_mass(f.codomain().clone(), f.apply(x)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(f.domain().clone(), f.codomain().clone(), rows)
    }

    pub fn domain(&self) -> &FiniteSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSpace {
        &self.codomain
    }

    pub fn row(&self, x: usize) -> &Distribution<S> {
        &self.rows[x]
    }

    /// Kernel entry `f(x)({y})`.
    pub fn prob(&self, x: usize, y: usize) -> S {
        self.rows[x].prob(y)
    }
}

/// Kleisli extension: push a distribution through a kernel,
/// `(y -> sum_x d(x) f(x)(y))`.
pub fn kleisli_extension<S: Scalar>(
    f: &KleisliMap<S>,
    d: &Distribution<S>,
) -> Result<Distribution<S>> {
    check_same_space(f.domain(), d.space(), "kleisli_extension")?;
    let mut prob = vec![S::zero(); f.codomain().len()];
    for x in 0..f.domain().len() {
        let dx = d.prob(x);
        if dx.is_zero() {
            continue;
        }
        for (y, p) in prob.iter_mut().enumerate() {
            *p += dx * f.prob(x, y);
        }
    }
    Distribution::new(f.codomain().clone(), prob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn ab() -> FiniteSpace {
        FiniteSpace::from_labels(&["a", "b"]).unwrap()
    }

    #[test]
    fn space_rejects_duplicates_and_empty() {
        assert!(FiniteSpace::from_labels(&["a", "a"]).is_err());
        assert!(FiniteSpace::from_labels(&[""]).is_err());
        assert!(FiniteSpace::new(vec![]).is_err());
    }

    #[test]
    fn measure_rejects_negative_mass() {
        assert!(FiniteMeasure::new(ab(), vec![0.5, -0.1]).is_err());
    }

    #[test]
    fn integrate_constant_and_indicator() {
        let mu = FiniteMeasure::new(ab(), vec![0.5, 0.5]).unwrap();
        let c = MeasurableFn::constant(ab(), cplx(3.0, 0.0));
        assert_eq!(integrate(&c, &mu).unwrap(), cplx(3.0, 0.0));
        let ind = MeasurableFn::singleton_indicator(ab(), 0).unwrap();
        assert_eq!(integrate(&ind, &mu).unwrap(), cplx(0.5, 0.0));
    }

    #[test]
    fn integrate_weighted_sum() {
        // X = {a, b}, mu = (1/2, 1/2), f = (1, 3) integrates to 2.
        let mu = FiniteMeasure::new(ab(), vec![0.5, 0.5]).unwrap();
        let f = MeasurableFn::from_real(ab(), vec![1.0, 3.0]).unwrap();
        assert_eq!(integrate(&f, &mu).unwrap(), cplx(2.0, 0.0));
    }

    #[test]
    fn integrate_space_mismatch() {
        let mu = FiniteMeasure::new(ab(), vec![0.5, 0.5]).unwrap();
        let other = FiniteSpace::from_labels(&["x"]).unwrap();
        let f = MeasurableFn::constant(other, cplx(1.0, 0.0));
        assert!(matches!(
            integrate(&f, &mu),
            Err(Error::SpaceMismatch(_))
        ));
    }

    #[test]
    fn pushforward_examples() {
        let mu = FiniteMeasure::new(ab(), vec![0.2, 0.3]).unwrap();
        let idmap = AtomMap::identity(ab());
        assert_eq!(pushforward_measure(&idmap, &mu).unwrap(), mu);

        let y = FiniteSpace::from_labels(&["y"]).unwrap();
        let collapse = AtomMap::new(ab(), y.clone(), &["y", "y"]).unwrap();
        let nu = pushforward_measure(&collapse, &mu).unwrap();
        assert_eq!(nu.mass(0), 0.5);
    }

    #[test]
    fn measure_morphism_examples() {
        let mu = FiniteMeasure::new(ab(), vec![0.2, 0.3]).unwrap();
        let idmap = AtomMap::identity(ab());
        assert!(check_measure_morphism(&idmap, &mu, &mu).unwrap());

        // A positive atom mapped onto a null atom is not a morphism.
        let nu = FiniteMeasure::new(ab(), vec![0.0, 1.0]).unwrap();
        assert!(!check_measure_morphism(&idmap, &mu, &nu).unwrap());

        // Collapsing onto one positive atom is a morphism.
        let y = FiniteSpace::from_labels(&["y"]).unwrap();
        let collapse = AtomMap::new(ab(), y.clone(), &["y", "y"]).unwrap();
        let target = FiniteMeasure::new(y, vec![0.5]).unwrap();
        assert!(check_measure_morphism(&collapse, &mu, &target).unwrap());
    }

    #[test]
    fn linfty_action_examples() {
        let mu = FiniteMeasure::new(ab(), vec![0.5, 0.5]).unwrap();
        let idmap = AtomMap::identity(ab());
        let phi = MeasurableFn::from_real(ab(), vec![2.0, 5.0]).unwrap();
        let back = linfty_action(&idmap, &mu, &mu, &phi).unwrap();
        assert_eq!(back, phi);

        let y = FiniteSpace::from_labels(&["y"]).unwrap();
        let collapse = AtomMap::new(ab(), y.clone(), &["y", "y"]).unwrap();
        let nu = FiniteMeasure::new(y.clone(), vec![1.0]).unwrap();
        let psi = MeasurableFn::from_real(y, vec![5.0]).unwrap();
        let pulled = linfty_action(&collapse, &mu, &nu, &psi).unwrap();
        assert_eq!(pulled.value(0), cplx(5.0, 0.0));
        assert_eq!(pulled.value(1), cplx(5.0, 0.0));
    }

    #[test]
    fn linfty_action_rejects_non_morphism() {
        let mu = FiniteMeasure::new(ab(), vec![0.2, 0.3]).unwrap();
        let nu = FiniteMeasure::new(ab(), vec![0.0, 1.0]).unwrap();
        let idmap = AtomMap::identity(ab());
        let phi = MeasurableFn::constant(ab(), cplx(1.0, 0.0));
        assert!(matches!(
            linfty_action(&idmap, &mu, &nu, &phi),
            Err(Error::NotAMorphism(_))
        ));
    }

    #[test]
    fn l1_action_identity_and_collapse() {
        let mu = FiniteMeasure::new(ab(), vec![0.5, 0.5]).unwrap();
        let idmap = AtomMap::identity(ab());
        let phi = MeasurableFn::from_real(ab(), vec![1.0, 3.0]).unwrap();
        let same = l1_action(&idmap, &mu, &mu, &phi).unwrap();
        assert!(same.ae_eq(&phi, &mu, 1e-15));

        // Collapse {a,b} -> {y} with nu({y}) = 1: value is the mu-average.
        let y = FiniteSpace::from_labels(&["y"]).unwrap();
        let collapse = AtomMap::new(ab(), y.clone(), &["y", "y"]).unwrap();
        let nu = FiniteMeasure::new(y, vec![1.0]).unwrap();
        let pushed = l1_action(&collapse, &mu, &nu, &phi).unwrap();
        assert_eq!(pushed.value(0), cplx(2.0, 0.0));
        // Defining equation over the whole space.
        let lhs = integrate(&pushed, &nu).unwrap();
        let rhs = integrate(&phi, &mu).unwrap();
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn l1_action_zero_stays_zero() {
        let mu = FiniteMeasure::new(ab(), vec![0.5, 0.5]).unwrap();
        let idmap = AtomMap::identity(ab());
        let zero = MeasurableFn::constant(ab(), C::zero());
        let out = l1_action(&idmap, &mu, &mu, &zero).unwrap();
        assert!(out.values().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(ab(), vec![0.5, 0.5]).is_ok());
        assert!(Distribution::new(ab(), vec![0.6, 0.6]).is_err());
        assert!(Distribution::new(ab(), vec![1.2, -0.2]).is_err());
    }

    #[test]
    fn kleisli_extension_examples() {
        let identity = KleisliMap::<f64>::identity(ab()).unwrap();
        let d = Distribution::new(ab(), vec![0.3, 0.7]).unwrap();
        assert_eq!(kleisli_extension(&identity, &d).unwrap(), d);

        // Point mass picks out one kernel row.
        let rows = vec![
            Distribution::new(ab(), vec![1.0, 0.0]).unwrap(),
            Distribution::new(ab(), vec![0.0, 1.0]).unwrap(),
        ];
        let f = KleisliMap::new(ab(), ab(), rows).unwrap();
        let delta = Distribution::point_mass(ab(), 1).unwrap();
        let out = kleisli_extension(&f, &delta).unwrap();
        assert_eq!(out.probs(), &[0.0, 1.0]);

        // Uniform input through the swap-free kernel stays uniform.
        let uniform = Distribution::uniform(ab());
        let out = kleisli_extension(&f, &uniform).unwrap();
        assert_eq!(out.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn canonicalization_idempotent() {
        let mu = FiniteMeasure::new(ab(), vec![0.0, 1.0]).unwrap();
        let f = MeasurableFn::from_real(ab(), vec![3.0, 4.0]).unwrap();
        let once = f.canonicalize(&mu).unwrap();
        let twice = once.canonicalize(&mu).unwrap();
        assert_eq!(once, twice);
        assert!(once.is_canonical(&mu));
        assert_eq!(once.value(0), C::zero());
    }
}
