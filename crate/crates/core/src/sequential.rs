//! Sequential composition of measurements.
//!
//! A first measurement `A` on `X` (differentiable with respect to an ambient
//! measure) followed by an outcome-indexed family `B = (B_x)` yields one
//! measurement on the disjoint union of the `Y_x`, with effects
//! `mu({x}) sqrt(dA/dmu(x)) B_x({y}) sqrt(dA/dmu(x))` at the pair atoms.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::{psd_sqrt, ComplexMatrix, Effect};
use crate::outcome::{FiniteMeasure, FiniteSpace};
use crate::povm::Povm;
use crate::scalar::Scalar;

/// Encode a pair atom `(x, y)` as a single label `x/y`. Slashes and
/// backslashes inside the parts are backslash-escaped, so exactly one
/// unescaped separator survives and the encoding is injective.
pub fn pair_label(x: &str, y: &str) -> String {
    let escape = |s: &str| s.replace('\\', "\\\\").replace('/', "\\/");
    format!("{}/{}", escape(x), escape(y))
}

/// Decode a pair label produced by [`pair_label`].
pub fn split_pair_label(label: &str) -> Option<(String, String)> {
    let mut first = String::new();
    let mut rest = String::new();
    let mut target = &mut first;
    let mut seen_separator = false;
    let mut escaped = false;
    for c in label.chars() {
        match (escaped, c) {
            (true, _) => {
                target.push(c);
                escaped = false;
            }
            (false, '\\') => escaped = true,
            (false, '/') => {
                if seen_separator {
                    return None;
                }
                seen_separator = true;
                target = &mut rest;
            }
            (false, _) => target.push(c),
        }
    }
    (seen_separator && !escaped).then_some((first, rest))
}

/// A family of second-stage POVMs, one per atom of the index space. All
/// members act on the same Hilbert dimension; their outcome spaces may
/// differ in size and labels.
#[derive(Clone, Debug)]
pub struct IndexedPovmFamily<S: Scalar> {
    index_space: FiniteSpace,
    members: Vec<Povm<S>>,
}

impl<S: Scalar> IndexedPovmFamily<S> {
    pub fn new(index_space: FiniteSpace, members: Vec<Povm<S>>) -> Result<Self> {
        if members.len() != index_space.len() {
            return Err(Error::SpaceMismatch(format!(
                "expected {} member POVMs, got {}",
                index_space.len(),
                members.len()
            )));
        }
        let dim = members[0].dim();
        if members.iter().any(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch(
                "family members of mixed Hilbert dimension".into(),
            ));
        }
        Ok(IndexedPovmFamily {
            index_space,
            members,
        })
    }

    pub fn index_space(&self) -> &FiniteSpace {
        &self.index_space
    }

    pub fn member(&self, x: usize) -> &Povm<S> {
        &self.members[x]
    }

    pub fn members(&self) -> &[Povm<S>] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }
}

/// The pair-label outcome space of a composition, in index-major order.
pub fn disjoint_union_space<S: Scalar>(family: &IndexedPovmFamily<S>) -> Result<FiniteSpace> {
    let mut labels = Vec::new();
    for x in 0..family.index_space().len() {
        let xl = family.index_space().label(x);
        for y in 0..family.member(x).space().len() {
            labels.push(pair_label(xl, family.member(x).space().label(y)));
        }
    }
    FiniteSpace::new(labels)
}

fn composite_block<S: Scalar>(
    first: &Povm<S>,
    mu: &FiniteMeasure<S>,
    family: &IndexedPovmFamily<S>,
    x: usize,
) -> Result<Vec<Effect<S>>> {
    let dim = first.dim();
    let member = family.member(x);
    let tol = first.tolerances();
    if mu.is_null_atom(x) {
        // Null index atoms keep the union space total with zero effects.
        return Ok(vec![Effect::zero(dim); member.space().len()]);
    }
    let density = first.effect(x).matrix().scale_real(S::one() / mu.mass(x));
    let root = psd_sqrt(&density, tol)?;
    let weight = mu.mass(x);
    (0..member.space().len())
        .map(|y| {
            let conjugated = root.matmul(member.effect(y).matrix())?.matmul(&root)?;
            Effect::with_tolerances(conjugated.scale_real(weight), tol)
        })
        .collect()
}

fn compose_impl<S: Scalar>(
    first: &Povm<S>,
    mu: &FiniteMeasure<S>,
    family: &IndexedPovmFamily<S>,
    parallel: bool,
) -> Result<Povm<S>> {
    if family.index_space() != first.space() {
        return Err(Error::SpaceMismatch(
            "family index space differs from first-stage outcome space".into(),
        ));
    }
    if family.dim() != first.dim() {
        return Err(Error::DimensionMismatch(format!(
            "first stage acts on C^{}, family on C^{}",
            first.dim(),
            family.dim()
        )));
    }
    if !first.check_mu_continuous(mu)? {
        return Err(Error::NotContinuous(
            "first stage is not mu-continuous; no derivative to compose with".into(),
        ));
    }
    let indices: Vec<usize> = (0..first.len()).collect();
    let blocks: Vec<Vec<Effect<S>>> = if parallel {
        indices
            .par_iter()
            .map(|&x| composite_block(first, mu, family, x))
            .collect::<Result<Vec<_>>>()?
    } else {
        indices
            .iter()
            .map(|&x| composite_block(first, mu, family, x))
            .collect::<Result<Vec<_>>>()?
    };
    let effects: Vec<Effect<S>> = blocks.into_iter().flatten().collect();
    Povm::with_tolerances(disjoint_union_space(family)?, effects, *first.tolerances())
}

/// Sequential composition `(A; B)` over the disjoint-union outcome space.
pub fn sequential_compose<S: Scalar>(
    first: &Povm<S>,
    mu: &FiniteMeasure<S>,
    family: &IndexedPovmFamily<S>,
) -> Result<Povm<S>> {
    compose_impl(first, mu, family, false)
}

/// Same composition with the per-atom blocks computed in parallel. The
/// blocks are reassembled in index order, so the result is identical to the
/// serial one bit for bit.
pub fn sequential_compose_parallel<S: Scalar>(
    first: &Povm<S>,
    mu: &FiniteMeasure<S>,
    family: &IndexedPovmFamily<S>,
) -> Result<Povm<S>> {
    compose_impl(first, mu, family, true)
}

/// Evaluate a composite POVM on `union over listed x of {x} times N_x`.
/// Each part pairs a first-stage atom with a subset of its outcomes.
pub fn evaluate_composite<S: Scalar>(
    composite: &Povm<S>,
    parts: &[(&str, Vec<&str>)],
) -> Result<Effect<S>> {
    let mut indices = BTreeSet::new();
    for (x, ys) in parts {
        for y in ys {
            let label = pair_label(x, y);
            match composite.space().index_of(&label) {
                Some(i) => {
                    indices.insert(i);
                }
                None => return Err(Error::UnknownAtom(label)),
            }
        }
    }
    composite.evaluate_indices(&indices)
}

/// Per-index marginal of a composite: `sum_y AB_(x, y)` for each first-stage
/// atom, which recovers the first stage when the family members are POVMs.
pub fn first_marginal<S: Scalar>(
    composite: &Povm<S>,
    index_space: &FiniteSpace,
) -> Result<Vec<ComplexMatrix<S>>> {
    let dim = composite.dim();
    let mut out = vec![ComplexMatrix::<S>::zeros(dim, dim); index_space.len()];
    for i in 0..composite.len() {
        let label = composite.space().label(i);
        let (x, _) = split_pair_label(label)
            .ok_or_else(|| Error::UnknownAtom(format!("not a pair label: {label:?}")))?;
        let xi = index_space
            .index_of(&x)
            .ok_or_else(|| Error::UnknownAtom(x.clone()))?;
        out[xi] = out[xi].add(composite.effect(i).matrix())?;
    }
    Ok(out)
}
