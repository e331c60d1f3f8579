//! Effect algebras and effect modules as checkable structures.
//!
//! Three carriers ship with the crate: the unit interval, the effects on a
//! finite-dimensional Hilbert space, and finite Boolean algebras. The law
//! harnesses sample elements from a seeded stream and report every
//! counterexample they find, so a deliberately broken instance shows up as
//! a non-empty violation list rather than a panic.

use std::collections::BTreeSet;
use std::marker::PhantomData;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{hermitian_eigen, Effect};
use crate::outcome::FiniteSpace;
use crate::sampling::random_effect;
use crate::scalar::{Scalar, Tolerances};

/// An effect algebra: partial sum, orthocomplement, zero. The partial sum
/// returns `Ok(None)` when undefined; errors are reserved for elements that
/// do not belong to the carrier at all.
pub trait EffectAlgebra<S: Scalar> {
    type Elem: Clone;

    /// Short human-readable carrier description for reports.
    fn name(&self) -> String;

    fn zero(&self) -> Self::Elem;

    fn one(&self) -> Self::Elem {
        self.orthocomplement(&self.zero())
            .expect("zero belongs to the carrier")
    }

    /// Partial sum; `Ok(None)` means undefined.
    fn oplus(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Option<Self::Elem>>;

    fn orthocomplement(&self, x: &Self::Elem) -> Result<Self::Elem>;

    /// The induced order: `x <= y` iff `x (+) z = y` for some `z`.
    fn leq(&self, x: &Self::Elem, y: &Self::Elem) -> Result<bool>;

    fn elem_eq(&self, x: &Self::Elem, y: &Self::Elem) -> Result<bool>;

    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Elem;

    fn describe(&self, x: &Self::Elem) -> String;
}

/// An effect module: an effect algebra with a `[0, 1]` scalar action.
pub trait EffectModule<S: Scalar>: EffectAlgebra<S> {
    fn scalar_mul(&self, r: S, x: &Self::Elem) -> Result<Self::Elem>;
}

fn check_scalar_range<S: Scalar>(r: S) -> Result<()> {
    if r < S::zero() || r > S::one() {
        return Err(Error::ScalarOutOfRange(format!("{r}")));
    }
    Ok(())
}

/// The unit interval `[0, 1]` with truncated addition.
#[derive(Clone, Debug)]
pub struct UnitInterval<S: Scalar> {
    tol: Tolerances<S>,
    _marker: PhantomData<S>,
}

impl<S: Scalar> Default for UnitInterval<S> {
    fn default() -> Self {
        UnitInterval {
            tol: Tolerances::default(),
            _marker: PhantomData,
        }
    }
}

impl<S: Scalar> UnitInterval<S> {
    pub fn new(tol: Tolerances<S>) -> Self {
        UnitInterval {
            tol,
            _marker: PhantomData,
        }
    }
}

impl<S: Scalar> EffectAlgebra<S> for UnitInterval<S> {
    type Elem = S;

    fn name(&self) -> String {
        "unit-interval".into()
    }

    fn zero(&self) -> S {
        S::zero()
    }

    fn oplus(&self, x: &S, y: &S) -> Result<Option<S>> {
        let sum = *x + *y;
        Ok((sum <= S::one() + self.tol.psd).then_some(sum))
    }

    fn orthocomplement(&self, x: &S) -> Result<S> {
        Ok(S::one() - *x)
    }

    fn leq(&self, x: &S, y: &S) -> Result<bool> {
        Ok(*x <= *y + self.tol.psd)
    }

    fn elem_eq(&self, x: &S, y: &S) -> Result<bool> {
        Ok((*x - *y).abs() <= self.tol.recon)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> S {
        S::from_real(rng.gen::<f64>())
    }

    fn describe(&self, x: &S) -> String {
        format!("{x}")
    }
}

impl<S: Scalar> EffectModule<S> for UnitInterval<S> {
    fn scalar_mul(&self, r: S, x: &S) -> Result<S> {
        check_scalar_range(r)?;
        Ok(r * *x)
    }
}

/// The effects on `C^dim` with operator addition below the identity.
#[derive(Clone, Debug)]
pub struct EffectCarrier<S: Scalar> {
    dim: usize,
    tol: Tolerances<S>,
}

impl<S: Scalar> EffectCarrier<S> {
    pub fn new(dim: usize) -> Self {
        EffectCarrier {
            dim,
            tol: Tolerances::default(),
        }
    }

    pub fn with_tolerances(dim: usize, tol: Tolerances<S>) -> Self {
        EffectCarrier { dim, tol }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_member(&self, x: &Effect<S>) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::CarrierMismatch(format!(
                "effect of dimension {} in Ef(C^{})",
                x.dim(),
                self.dim
            )));
        }
        Ok(())
    }
}

impl<S: Scalar> EffectAlgebra<S> for EffectCarrier<S> {
    type Elem = Effect<S>;

    fn name(&self) -> String {
        format!("effects-d{}", self.dim)
    }

    fn zero(&self) -> Effect<S> {
        Effect::zero(self.dim)
    }

    fn oplus(&self, x: &Effect<S>, y: &Effect<S>) -> Result<Option<Effect<S>>> {
        self.check_member(x)?;
        self.check_member(y)?;
        let sum = x.matrix().add(y.matrix())?;
        let (eigenvalues, _) = hermitian_eigen(&sum);
        let max = eigenvalues.first().copied().unwrap_or_else(S::zero);
        if max > S::one() + self.tol.psd {
            return Ok(None);
        }
        Ok(Some(Effect::with_tolerances(sum, &self.tol)?))
    }

    fn orthocomplement(&self, x: &Effect<S>) -> Result<Effect<S>> {
        self.check_member(x)?;
        Ok(x.orthocomplement())
    }

    fn leq(&self, x: &Effect<S>, y: &Effect<S>) -> Result<bool> {
        self.check_member(x)?;
        self.check_member(y)?;
        let diff = y.matrix().sub(x.matrix())?;
        let (eigenvalues, _) = hermitian_eigen(&diff);
        let min = eigenvalues.last().copied().unwrap_or_else(S::zero);
        Ok(min >= -self.tol.psd)
    }

    fn elem_eq(&self, x: &Effect<S>, y: &Effect<S>) -> Result<bool> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(x.approx_eq(y, self.tol.recon))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Effect<S> {
        random_effect(rng, self.dim)
    }

    fn describe(&self, x: &Effect<S>) -> String {
        let entries: Vec<String> = x
            .matrix()
            .entries()
            .iter()
            .map(|z| format!("{:.3}{:+.3}i", z.re, z.im))
            .collect();
        format!("[{}]", entries.join(", "))
    }
}

impl<S: Scalar> EffectModule<S> for EffectCarrier<S> {
    fn scalar_mul(&self, r: S, x: &Effect<S>) -> Result<Effect<S>> {
        check_scalar_range(r)?;
        self.check_member(x)?;
        Effect::with_tolerances(x.matrix().scale_real(r), &self.tol)
    }
}

/// A finite Boolean algebra: subsets of an atom set, summable when disjoint.
#[derive(Clone, Debug)]
pub struct BooleanAlgebra {
    space: FiniteSpace,
}

impl BooleanAlgebra {
    pub fn new(space: FiniteSpace) -> Self {
        BooleanAlgebra { space }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    fn check_member(&self, x: &BTreeSet<usize>) -> Result<()> {
        if let Some(&bad) = x.iter().find(|&&i| i >= self.space.len()) {
            return Err(Error::CarrierMismatch(format!(
                "atom index {bad} outside a {}-atom Boolean algebra",
                self.space.len()
            )));
        }
        Ok(())
    }
}

impl<S: Scalar> EffectAlgebra<S> for BooleanAlgebra {
    type Elem = BTreeSet<usize>;

    fn name(&self) -> String {
        format!("boolean-{}", self.space.len())
    }

    fn zero(&self) -> BTreeSet<usize> {
        BTreeSet::new()
    }

    fn oplus(&self, x: &BTreeSet<usize>, y: &BTreeSet<usize>) -> Result<Option<BTreeSet<usize>>> {
        self.check_member(x)?;
        self.check_member(y)?;
        if x.intersection(y).next().is_some() {
            return Ok(None);
        }
        Ok(Some(x.union(y).copied().collect()))
    }

    fn orthocomplement(&self, x: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        self.check_member(x)?;
        Ok((0..self.space.len()).filter(|i| !x.contains(i)).collect())
    }

    fn leq(&self, x: &BTreeSet<usize>, y: &BTreeSet<usize>) -> Result<bool> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(x.is_subset(y))
    }

    fn elem_eq(&self, x: &BTreeSet<usize>, y: &BTreeSet<usize>) -> Result<bool> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(x == y)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> BTreeSet<usize> {
        (0..self.space.len()).filter(|_| rng.gen::<bool>()).collect()
    }

    fn describe(&self, x: &BTreeSet<usize>) -> String {
        let labels: Vec<&str> = x.iter().map(|&i| self.space.label(i)).collect();
        format!("{{{}}}", labels.join(", "))
    }
}

/// One failed law instance.
#[derive(Clone, Debug, Serialize)]
pub struct LawViolation {
    pub law: String,
    pub detail: String,
}

/// Outcome of a sampled law check: every counterexample found.
#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub instance: String,
    pub samples: usize,
    pub violations: Vec<LawViolation>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(&mut self, law: &str, detail: String) {
        self.violations.push(LawViolation {
            law: law.to_string(),
            detail,
        });
    }
}

/// Sample-check the effect-algebra axioms: commutativity, associativity,
/// zero unit, the complement law with uniqueness, and the zero-one law.
pub fn check_effect_algebra_axioms<S: Scalar, A: EffectAlgebra<S>>(
    instance: &A,
    sample_count: usize,
    seed: u64,
) -> LawReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LawReport {
        instance: instance.name(),
        samples: sample_count,
        violations: Vec::new(),
    };
    let zero = instance.zero();
    let one = instance.one();

    for _ in 0..sample_count {
        let x = instance.sample(&mut rng);
        let y = instance.sample(&mut rng);
        let z = instance.sample(&mut rng);

        // Commutativity: defined-ness and value agree both ways.
        let xy = instance.oplus(&x, &y).expect("same carrier");
        let yx = instance.oplus(&y, &x).expect("same carrier");
        match (&xy, &yx) {
            (Some(a), Some(b)) => {
                if !instance.elem_eq(a, b).expect("same carrier") {
                    report.record(
                        "commutativity",
                        format!(
                            "x={} y={}: x+y != y+x",
                            instance.describe(&x),
                            instance.describe(&y)
                        ),
                    );
                }
            }
            (None, None) => {}
            _ => report.record(
                "commutativity",
                format!(
                    "x={} y={}: defined one way only",
                    instance.describe(&x),
                    instance.describe(&y)
                ),
            ),
        }

        // Associativity: if x+y and (x+y)+z are defined, then y+z and
        // x+(y+z) are defined and the two totals agree.
        if let Some(xy) = &xy {
            if let Some(xyz) = instance.oplus(xy, &z).expect("same carrier") {
                match instance.oplus(&y, &z).expect("same carrier") {
                    None => report.record(
                        "associativity",
                        format!(
                            "x={} y={} z={}: (x+y)+z defined but y+z is not",
                            instance.describe(&x),
                            instance.describe(&y),
                            instance.describe(&z)
                        ),
                    ),
                    Some(yz) => match instance.oplus(&x, &yz).expect("same carrier") {
                        None => report.record(
                            "associativity",
                            format!(
                                "x={} y={} z={}: (x+y)+z defined but x+(y+z) is not",
                                instance.describe(&x),
                                instance.describe(&y),
                                instance.describe(&z)
                            ),
                        ),
                        Some(xyz2) => {
                            if !instance.elem_eq(&xyz, &xyz2).expect("same carrier") {
                                report.record(
                                    "associativity",
                                    format!(
                                        "x={} y={} z={}: association changes the sum",
                                        instance.describe(&x),
                                        instance.describe(&y),
                                        instance.describe(&z)
                                    ),
                                );
                            }
                        }
                    },
                }
            }
        }

        // Zero unit.
        match instance.oplus(&zero, &x).expect("same carrier") {
            Some(s) => {
                if !instance.elem_eq(&s, &x).expect("same carrier") {
                    report.record("zero-unit", format!("0+x != x for x={}", instance.describe(&x)));
                }
            }
            None => report.record(
                "zero-unit",
                format!("0+x undefined for x={}", instance.describe(&x)),
            ),
        }

        // Complement law: x + x' is defined and equals 1.
        let xc = instance.orthocomplement(&x).expect("same carrier");
        match instance.oplus(&x, &xc).expect("same carrier") {
            Some(s) => {
                if !instance.elem_eq(&s, &one).expect("same carrier") {
                    report.record(
                        "complement",
                        format!("x + x' != 1 for x={}", instance.describe(&x)),
                    );
                }
            }
            None => report.record(
                "complement",
                format!("x + x' undefined for x={}", instance.describe(&x)),
            ),
        }

        // Complement uniqueness: any sampled pair summing to 1 is a
        // complement pair.
        if let Some(s) = &xy {
            if instance.elem_eq(s, &one).expect("same carrier") {
                let expected = instance.orthocomplement(&x).expect("same carrier");
                if !instance.elem_eq(&y, &expected).expect("same carrier") {
                    report.record(
                        "complement-uniqueness",
                        format!(
                            "x={} y={}: x+y=1 but y != x'",
                            instance.describe(&x),
                            instance.describe(&y)
                        ),
                    );
                }
            }
        }

        // Zero-one law: x + 1 defined forces x = 0.
        if instance.oplus(&x, &one).expect("same carrier").is_some()
            && !instance.elem_eq(&x, &zero).expect("same carrier")
        {
            report.record(
                "zero-one",
                format!("x+1 defined for x={} != 0", instance.describe(&x)),
            );
        }
    }
    report
}

/// Sample-check the four effect-module axioms on top of the algebra.
pub fn check_module_axioms<S: Scalar, M: EffectModule<S>>(
    module: &M,
    sample_count: usize,
    seed: u64,
) -> LawReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LawReport {
        instance: module.name(),
        samples: sample_count,
        violations: Vec::new(),
    };

    for _ in 0..sample_count {
        let x = module.sample(&mut rng);
        let y = module.sample(&mut rng);
        let r = S::from_real(rng.gen::<f64>());
        let s = S::from_real(rng.gen::<f64>());

        // r(s x) = (rs) x.
        let lhs = module
            .scalar_mul(r, &module.scalar_mul(s, &x).expect("scalar in range"))
            .expect("scalar in range");
        let rhs = module.scalar_mul(r * s, &x).expect("scalar in range");
        if !module.elem_eq(&lhs, &rhs).expect("same carrier") {
            report.record(
                "action-associativity",
                format!("r={r} s={s} x={}", module.describe(&x)),
            );
        }

        // (r+s) x = r x + s x whenever r+s <= 1.
        if r + s <= S::one() {
            let lhs = module.scalar_mul(r + s, &x).expect("scalar in range");
            let rx = module.scalar_mul(r, &x).expect("scalar in range");
            let sx = module.scalar_mul(s, &x).expect("scalar in range");
            match module.oplus(&rx, &sx).expect("same carrier") {
                Some(sum) => {
                    if !module.elem_eq(&lhs, &sum).expect("same carrier") {
                        report.record(
                            "scalar-distributivity",
                            format!("r={r} s={s} x={}", module.describe(&x)),
                        );
                    }
                }
                None => report.record(
                    "scalar-distributivity",
                    format!("rx + sx undefined for r={r} s={s} x={}", module.describe(&x)),
                ),
            }
        }

        // r(x + y) = r x + r y whenever x + y is defined.
        if let Some(sum) = module.oplus(&x, &y).expect("same carrier") {
            let lhs = module.scalar_mul(r, &sum).expect("scalar in range");
            let rx = module.scalar_mul(r, &x).expect("scalar in range");
            let ry = module.scalar_mul(r, &y).expect("scalar in range");
            match module.oplus(&rx, &ry).expect("same carrier") {
                Some(rsum) => {
                    if !module.elem_eq(&lhs, &rsum).expect("same carrier") {
                        report.record(
                            "element-distributivity",
                            format!("r={r} x={} y={}", module.describe(&x), module.describe(&y)),
                        );
                    }
                }
                None => report.record(
                    "element-distributivity",
                    format!(
                        "rx + ry undefined for r={r} x={} y={}",
                        module.describe(&x),
                        module.describe(&y)
                    ),
                ),
            }
        }

        // 1 x = x.
        let unit_action = module.scalar_mul(S::one(), &x).expect("scalar in range");
        if !module.elem_eq(&unit_action, &x).expect("same carrier") {
            report.record("unit-action", format!("1*x != x for x={}", module.describe(&x)));
        }
    }
    report
}

/// Sample-check that `f` preserves zero, orthocomplement, and defined sums.
pub fn check_algebra_morphism<S, A, B>(
    f: impl Fn(&A::Elem) -> B::Elem,
    src: &A,
    dst: &B,
    sample_count: usize,
    seed: u64,
) -> LawReport
where
    S: Scalar,
    A: EffectAlgebra<S>,
    B: EffectAlgebra<S>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LawReport {
        instance: format!("{} -> {}", src.name(), dst.name()),
        samples: sample_count,
        violations: Vec::new(),
    };

    let f_zero = f(&src.zero());
    if !dst.elem_eq(&f_zero, &dst.zero()).expect("same carrier") {
        report.record("preserves-zero", "f(0) != 0".into());
    }

    for _ in 0..sample_count {
        let x = src.sample(&mut rng);
        let y = src.sample(&mut rng);

        // f(x') = f(x)'.
        let lhs = f(&src.orthocomplement(&x).expect("same carrier"));
        let rhs = dst
            .orthocomplement(&f(&x))
            .expect("image lies in the carrier");
        if !dst.elem_eq(&lhs, &rhs).expect("same carrier") {
            report.record(
                "preserves-orthocomplement",
                format!("x={}", src.describe(&x)),
            );
        }

        // Defined sums map to defined sums with the same value.
        if let Some(sum) = src.oplus(&x, &y).expect("same carrier") {
            match dst.oplus(&f(&x), &f(&y)).expect("same carrier") {
                Some(fsum) => {
                    if !dst.elem_eq(&f(&sum), &fsum).expect("same carrier") {
                        report.record(
                            "preserves-sum",
                            format!(
                                "x={} y={}: f(x+y) != f(x)+f(y)",
                                src.describe(&x),
                                src.describe(&y)
                            ),
                        );
                    }
                }
                None => report.record(
                    "preserves-sum",
                    format!(
                        "x={} y={}: f(x)+f(y) undefined",
                        src.describe(&x),
                        src.describe(&y)
                    ),
                ),
            }
        }
    }
    report
}

/// Algebra-morphism checks plus preservation of the scalar action.
pub fn check_module_morphism<S, A, B>(
    f: impl Fn(&A::Elem) -> B::Elem,
    src: &A,
    dst: &B,
    sample_count: usize,
    seed: u64,
) -> LawReport
where
    S: Scalar,
    A: EffectModule<S>,
    B: EffectModule<S>,
{
    let mut report = check_algebra_morphism(&f, src, dst, sample_count, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    for _ in 0..sample_count {
        let x = src.sample(&mut rng);
        let r = S::from_real(rng.gen::<f64>());
        let lhs = f(&src.scalar_mul(r, &x).expect("scalar in range"));
        let rhs = dst
            .scalar_mul(r, &f(&x))
            .expect("image lies in the carrier");
        if !dst.elem_eq(&lhs, &rhs).expect("same carrier") {
            report.record(
                "preserves-scalar-action",
                format!("r={r} x={}", src.describe(&x)),
            );
        }
    }
    report
}
