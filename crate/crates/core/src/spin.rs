//! The spin-1/2 demonstration: measure the spin direction on a discretized
//! sphere, then the spin component along the observed direction.
//!
//! The two identities under test hold exactly per grid atom — the minus
//! branch of the composite vanishes and the plus branch reproduces the
//! direction measurement — so the assertions run at floating-point
//! tolerances and grid resolution only affects how well the discrete
//! direction POVM approximates its continuum counterpart.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{ComplexMatrix, Effect};
use crate::outcome::{FiniteMeasure, FiniteSpace};
use crate::povm::Povm;
use crate::scalar::{cplx, Scalar, Tolerances};
use crate::sequential::{
    evaluate_composite, sequential_compose, sequential_compose_parallel, IndexedPovmFamily,
};

/// The Pauli matrices `(sigma_x, sigma_y, sigma_z)`.
pub fn pauli_matrices<S: Scalar>() -> [ComplexMatrix<S>; 3] {
    let sigma_x = ComplexMatrix::new(
        2,
        2,
        vec![cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)],
    )
    .expect("2x2");
    let sigma_y = ComplexMatrix::new(
        2,
        2,
        vec![cplx(0.0, 0.0), cplx(0.0, -1.0), cplx(0.0, 1.0), cplx(0.0, 0.0)],
    )
    .expect("2x2");
    let sigma_z = ComplexMatrix::new(
        2,
        2,
        vec![cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(-1.0, 0.0)],
    )
    .expect("2x2");
    [sigma_x, sigma_y, sigma_z]
}

/// `n . sigma` for a 3-vector `n`.
pub fn pauli_dot<S: Scalar>(n: [S; 3]) -> ComplexMatrix<S> {
    let [sx, sy, sz] = pauli_matrices::<S>();
    sx.scale_real(n[0])
        .add(&sy.scale_real(n[1]))
        .expect("2x2")
        .add(&sz.scale_real(n[2]))
        .expect("2x2")
}

/// Point placement scheme for the sphere grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridScheme {
    /// Golden-angle spiral; near-uniform but not antipodally symmetric.
    Fibonacci,
    /// Antipodal pairs, so the first moment vanishes exactly. Two and six
    /// points are the axis-aligned special cases; larger even counts pair a
    /// half-size spiral with its antipodes.
    OctahedralSymmetrized,
}

impl GridScheme {
    pub fn name(&self) -> &'static str {
        match self {
            GridScheme::Fibonacci => "fibonacci",
            GridScheme::OctahedralSymmetrized => "octahedral_symmetrized",
        }
    }
}

/// A quadrature grid on the unit sphere: unit direction vectors with
/// positive weights summing to the full solid angle.
#[derive(Clone, Debug)]
pub struct SphereGrid<S: Scalar> {
    points: Vec<[S; 3]>,
    weights: Vec<S>,
    scheme: GridScheme,
}

fn fibonacci_points(n: usize) -> Vec<[f64; 3]> {
    // Midpoint offsets in z with the golden angle in azimuth.
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

fn normalize3(p: [f64; 3]) -> [f64; 3] {
    let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / norm, p[1] / norm, p[2] / norm]
}

/// Build a sphere grid with equal weights `4 pi / n`.
pub fn build_grid<S: Scalar>(n_points: usize, scheme: GridScheme) -> Result<SphereGrid<S>> {
    if n_points < 2 {
        return Err(Error::BadParameter(format!(
            "need at least 2 grid points, got {n_points}"
        )));
    }
    let points_f64: Vec<[f64; 3]> = match scheme {
        GridScheme::Fibonacci => fibonacci_points(n_points).into_iter().map(normalize3).collect(),
        GridScheme::OctahedralSymmetrized => {
            if n_points % 2 != 0 {
                return Err(Error::BadParameter(format!(
                    "symmetrized grids need an even point count, got {n_points}"
                )));
            }
            let half = n_points / 2;
            let base: Vec<[f64; 3]> = match half {
                1 => vec![[0.0, 0.0, 1.0]],
                3 => vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
                _ => fibonacci_points(half).into_iter().map(normalize3).collect(),
            };
            // Interleave each point with its exact antipode so partial sums
            // of the first moment cancel pairwise.
            base.into_iter()
                .flat_map(|p| [p, [-p[0], -p[1], -p[2]]])
                .collect()
        }
    };
    let weight = S::from_real(4.0 * std::f64::consts::PI / n_points as f64);
    let points: Vec<[S; 3]> = points_f64
        .iter()
        .map(|p| [S::from_real(p[0]), S::from_real(p[1]), S::from_real(p[2])])
        .collect();
    Ok(SphereGrid {
        weights: vec![weight; points.len()],
        points,
        scheme,
    })
}

impl<S: Scalar> SphereGrid<S> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> [S; 3] {
        self.points[i]
    }

    pub fn weight(&self, i: usize) -> S {
        self.weights[i]
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    /// Outcome space with one atom per direction, labeled `n0`, `n1`, ...
    pub fn space(&self) -> FiniteSpace {
        FiniteSpace::new((0..self.len()).map(|i| format!("n{i}")).collect())
            .expect("indexed labels are distinct")
    }

    /// The quadrature weights as a measure on [`SphereGrid::space`].
    pub fn measure(&self) -> FiniteMeasure<S> {
        FiniteMeasure::new(self.space(), self.weights.clone()).expect("positive weights")
    }

    /// First moment `sum_i w_i n_i`; exactly zero for symmetrized grids.
    pub fn moment(&self) -> [S; 3] {
        let mut m = [S::zero(); 3];
        for (p, &w) in self.points.iter().zip(&self.weights) {
            for k in 0..3 {
                m[k] = m[k] + p[k] * w;
            }
        }
        m
    }

    pub fn moment_norm(&self) -> S {
        let m = self.moment();
        (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt()
    }

    /// Deviation of the total weight from `4 pi`.
    pub fn weight_residual(&self) -> S {
        let total: S = self.weights.iter().copied().sum();
        (total - S::from_real(4.0 * std::f64::consts::PI)).abs()
    }

    /// Atom indices in the open hemisphere `n . axis > 0`.
    pub fn hemisphere(&self, axis: [S; 3]) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                let p = self.points[i];
                p[0] * axis[0] + p[1] * axis[1] + p[2] * axis[2] > S::zero()
            })
            .collect()
    }
}

/// The discretized direction measurement: raw effects
/// `(w_i / 4 pi)(id + n_i . sigma)` passed through normalization repair.
/// On symmetrized grids the raw family already sums to the identity and the
/// repair is a no-op at rounding level.
pub fn direction_povm<S: Scalar>(grid: &SphereGrid<S>) -> Result<Povm<S>> {
    let four_pi = S::from_real(4.0 * std::f64::consts::PI);
    let id = ComplexMatrix::<S>::identity(2);
    let raw: Vec<ComplexMatrix<S>> = (0..grid.len())
        .map(|i| {
            let n_sigma = pauli_dot(grid.point(i));
            id.add(&n_sigma)
                .expect("2x2")
                .scale_real(grid.weight(i) / four_pi)
        })
        .collect();
    Povm::repair_normalization(grid.space(), raw, Tolerances::default())
}

/// The two-outcome spin-component measurement along a unit direction:
/// effects `(id +- n . sigma)/2`, a projection-valued measure.
pub fn spin_component_povm<S: Scalar>(n: [S; 3]) -> Result<Povm<S>> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (norm - S::one()).abs() > S::from_real(1e-9) {
        return Err(Error::NotUnit(format!(
            "direction has norm {norm}, expected 1"
        )));
    }
    let id = ComplexMatrix::<S>::identity(2);
    let n_sigma = pauli_dot(n);
    let half = S::from_real(0.5);
    let plus = Effect::new(id.add(&n_sigma)?.scale_real(half))?;
    let minus = Effect::new(id.sub(&n_sigma)?.scale_real(half))?;
    Povm::new(FiniteSpace::from_labels(&["+", "-"])?, vec![plus, minus])
}

/// Region of the sphere grid to evaluate the composite on.
#[derive(Clone, Debug)]
pub enum Region<S: Scalar> {
    /// Explicit atom indices.
    Indices(Vec<usize>),
    /// Open hemisphere `n . axis > 0`.
    Hemisphere([S; 3]),
}

impl<S: Scalar> Region<S> {
    fn resolve(&self, grid: &SphereGrid<S>) -> Result<Vec<usize>> {
        match self {
            Region::Indices(idx) => {
                if let Some(&bad) = idx.iter().find(|&&i| i >= grid.len()) {
                    return Err(Error::UnknownAtom(format!("grid index {bad}")));
                }
                Ok(idx.clone())
            }
            Region::Hemisphere(axis) => Ok(grid.hemisphere(*axis)),
        }
    }
}

/// Numeric summary of one spin experiment run.
#[derive(Clone, Debug, Serialize)]
pub struct SpinReport<S: Scalar> {
    pub grid_size: usize,
    pub scheme: String,
    pub region_size: usize,
    /// `norm((D;S)(M x {-}))`; the claim is zero.
    pub minus_branch_norm: S,
    /// `norm((D;S)(M x {+}) - D(M))`; the claim is zero.
    pub plus_branch_deviation: S,
    /// `norm(sum_x D_x - id)` after normalization repair.
    pub normalization_residual: S,
    /// `abs(sum_i w_i - 4 pi)`, grid diagnostic.
    pub weight_residual: S,
    /// `norm(sum_i w_i n_i)`, grid diagnostic.
    pub moment_norm: S,
}

fn run_impl<S: Scalar>(
    grid: &SphereGrid<S>,
    region: &Region<S>,
    parallel: bool,
) -> Result<SpinReport<S>> {
    let direction = direction_povm(grid)?;
    let mu = grid.measure();
    let members = (0..grid.len())
        .map(|i| spin_component_povm(grid.point(i)))
        .collect::<Result<Vec<_>>>()?;
    let family = IndexedPovmFamily::new(grid.space().clone(), members)?;
    let composite = if parallel {
        sequential_compose_parallel(&direction, &mu, &family)?
    } else {
        sequential_compose(&direction, &mu, &family)?
    };

    let region_indices = region.resolve(grid)?;
    let space = grid.space();
    let minus_parts: Vec<(&str, Vec<&str>)> = region_indices
        .iter()
        .map(|&i| (space.label(i), vec!["-"]))
        .collect();
    let plus_parts: Vec<(&str, Vec<&str>)> = region_indices
        .iter()
        .map(|&i| (space.label(i), vec!["+"]))
        .collect();
    let region_labels: Vec<&str> = region_indices.iter().map(|&i| space.label(i)).collect();

    let minus = evaluate_composite(&composite, &minus_parts)?;
    let plus = evaluate_composite(&composite, &plus_parts)?;
    let d_region = direction.evaluate(&region_labels)?;

    let minus_branch_norm = crate::operator::operator_norm(minus.matrix())?;
    let plus_branch_deviation =
        crate::operator::operator_norm(&plus.matrix().sub(d_region.matrix())?)?;

    Ok(SpinReport {
        grid_size: grid.len(),
        scheme: grid.scheme().name().to_string(),
        region_size: region_indices.len(),
        minus_branch_norm,
        plus_branch_deviation,
        normalization_residual: direction.normalization_residual()?,
        weight_residual: grid.weight_residual(),
        moment_norm: grid.moment_norm(),
    })
}

/// Build the direction POVM, compose it with the per-direction spin
/// measurements, and report how far the composite is from the two exact
/// identities on the given region.
pub fn run_spin_experiment<S: Scalar>(
    grid: &SphereGrid<S>,
    region: &Region<S>,
) -> Result<SpinReport<S>> {
    run_impl(grid, region, false)
}

/// Same experiment with the composition's per-atom work done in parallel.
pub fn run_spin_experiment_parallel<S: Scalar>(
    grid: &SphereGrid<S>,
    region: &Region<S>,
) -> Result<SpinReport<S>> {
    run_impl(grid, region, true)
}
