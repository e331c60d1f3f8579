//! Subcommand implementations and report documents.

use std::fs;

use clap::ValueEnum;
use serde::Serialize;

use povmlab_core::duality::{ObservableMap, StatisticalMap};
use povmlab_core::effect_algebra::{
    check_effect_algebra_axioms, check_module_axioms, BooleanAlgebra, EffectCarrier, LawReport,
    UnitInterval,
};
use povmlab_core::io::{
    to_json_string, DistributionDoc, FamilyDoc, FunctionDoc, MatrixDoc, MeasureDoc, PovmDoc,
};
use povmlab_core::operator::{classify, operator_norm, spectral_decompose};
use povmlab_core::outcome::FiniteSpace;
use povmlab_core::povm::VariationMode;
use povmlab_core::sequential::{first_marginal, sequential_compose, sequential_compose_parallel};
use povmlab_core::spin::{
    build_grid, run_spin_experiment, run_spin_experiment_parallel, GridScheme, Region,
};
use povmlab_core::{DensityMatrix, Error, Matrix64, Tolerances64};

use crate::{ConvertTarget, SchemeChoice, VariationChoice};

/// A failed run: exit code plus message for standard error.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn parse_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn domain_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

/// Domain errors exit 1; malformed parameters exit 2.
fn from_core(err: Error) -> Failure {
    match err {
        Error::BadParameter(_) => parse_failure(err.to_string()),
        _ => domain_failure(err.to_string()),
    }
}

fn read_file(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| parse_failure(format!("cannot read {path}: {e}")))
}

fn parse_doc<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, Failure> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| parse_failure(format!("cannot parse {path}: {e}")))
}

fn emit<T: Serialize>(report: &T) -> Result<(), Failure> {
    let json = to_json_string(report).map_err(from_core)?;
    println!("{json}");
    Ok(())
}

#[derive(Serialize)]
struct ValidateReport {
    atoms: Vec<String>,
    hilbert_dim: usize,
    normalization_residual: f64,
    /// Eigenvalues per effect, descending; empty when not Hermitian.
    effect_spectra: Vec<Vec<f64>>,
    is_pvm: Option<bool>,
    mu_continuous: Option<bool>,
    valid: bool,
    violations: Vec<String>,
}

pub fn validate(path: &str, tol: Tolerances64) -> Result<(), Failure> {
    let doc: PovmDoc = parse_doc(path)?;
    // Structural problems in the document are parse failures.
    let matrices = doc.raw_matrices().map_err(|e| parse_failure(e.to_string()))?;

    let mut violations = Vec::new();
    let mut spectra = Vec::new();
    for (i, m) in matrices.iter().enumerate() {
        let flags = classify(m, &tol).map_err(from_core)?;
        if flags.hermitian {
            let spec = spectral_decompose(m, &tol).map_err(from_core)?;
            spectra.push(spec.eigenvalues.clone());
        } else {
            spectra.push(Vec::new());
            violations.push(format!("effect {i} is not Hermitian"));
        }
        if flags.hermitian && !flags.effect {
            violations.push(format!("effect {i} has spectrum outside [0, 1]"));
        }
    }
    let mut total = Matrix64::zeros(doc.hilbert_dim, doc.hilbert_dim);
    for m in &matrices {
        total = total.add(m).map_err(from_core)?;
    }
    let identity = Matrix64::identity(doc.hilbert_dim);
    let residual = operator_norm(&total.sub(&identity).map_err(from_core)?).map_err(from_core)?;
    if residual > tol.norm {
        violations.push(format!(
            "effects sum deviates from identity by {residual:e}"
        ));
    }

    let povm = doc.to_povm(tol).ok();
    let is_pvm = match &povm {
        Some(p) => Some(p.is_pvm().map_err(from_core)?),
        None => None,
    };
    let mu_continuous = match (&povm, doc.to_measure().map_err(from_core)?) {
        (Some(p), Some(mu)) => Some(p.check_mu_continuous(&mu).map_err(from_core)?),
        _ => None,
    };

    let valid = violations.is_empty();
    let report = ValidateReport {
        atoms: doc.atoms.clone(),
        hilbert_dim: doc.hilbert_dim,
        normalization_residual: residual,
        effect_spectra: spectra,
        is_pvm,
        mu_continuous,
        valid,
        violations: violations.clone(),
    };
    emit(&report)?;
    if valid {
        eprintln!("valid POVM: residual {residual:e}, pvm {is_pvm:?}");
        Ok(())
    } else {
        Err(domain_failure(format!(
            "{} violation(s): {}",
            violations.len(),
            violations.join("; ")
        )))
    }
}

#[derive(Serialize)]
struct StatisticalReport {
    distributions: Vec<DistributionDoc>,
}

#[derive(Serialize)]
struct VnReport {
    atoms: Vec<String>,
    images: Vec<MatrixDoc>,
}

#[derive(Serialize)]
struct PredualReport {
    atoms: Vec<String>,
    kernels: Vec<MatrixDoc>,
    trace_compatibility_residual: f64,
}

pub fn convert(
    path: &str,
    target: ConvertTarget,
    state_paths: &[String],
    measure_path: Option<&str>,
    tol: Tolerances64,
) -> Result<(), Failure> {
    let doc: PovmDoc = parse_doc(path)?;
    let povm = doc.to_povm(tol).map_err(from_core)?;

    let load_measure = || -> Result<povmlab_core::Measure64, Failure> {
        if let Some(mpath) = measure_path {
            let mdoc: MeasureDoc = parse_doc(mpath)?;
            mdoc.to_measure().map_err(from_core)
        } else if let Some(mu) = doc.to_measure().map_err(from_core)? {
            Ok(mu)
        } else {
            Err(parse_failure(
                "this conversion needs a measure: pass --measure or embed a measure block",
            ))
        }
    };

    match target {
        ConvertTarget::Statistical => {
            if state_paths.is_empty() {
                return Err(parse_failure(
                    "statistical conversion needs at least one --state document",
                ));
            }
            let map = StatisticalMap::new(povm);
            let mut distributions = Vec::new();
            for spath in state_paths {
                let mdoc: MatrixDoc = parse_doc(spath)?;
                let rho = DensityMatrix::with_tolerances(
                    mdoc.to_matrix().map_err(from_core)?,
                    &tol,
                )
                .map_err(from_core)?;
                let dist = map.apply(&rho).map_err(from_core)?;
                distributions.push(DistributionDoc {
                    atoms: dist.space().atoms().to_vec(),
                    prob: dist.probs().to_vec(),
                });
            }
            emit(&StatisticalReport { distributions })?;
            eprintln!("statistical map evaluated on {} state(s)", state_paths.len());
        }
        ConvertTarget::Vn => {
            let mu = load_measure()?;
            let psi = ObservableMap::from_povm(&povm, &mu).map_err(from_core)?;
            let images = (0..psi.space().len())
                .map(|i| MatrixDoc::from_matrix(psi.image(i)))
                .collect();
            emit(&VnReport {
                atoms: psi.space().atoms().to_vec(),
                images,
            })?;
            eprintln!("positive unital map images on singleton indicators");
        }
        ConvertTarget::Predual => {
            let mu = load_measure()?;
            let psi = ObservableMap::from_povm(&povm, &mu).map_err(from_core)?;
            let phi = psi.to_predual().map_err(from_core)?;
            let kernels = (0..phi.space().len())
                .map(|i| MatrixDoc::from_matrix(phi.kernel(i)))
                .collect();
            let residual = phi.trace_compatibility_residual().map_err(from_core)?;
            emit(&PredualReport {
                atoms: phi.space().atoms().to_vec(),
                kernels,
                trace_compatibility_residual: residual,
            })?;
            eprintln!("predual kernels with trace residual {residual:e}");
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ComposeReport {
    out: String,
    pair_atoms: usize,
    normalization_residual: f64,
    marginal_recovery_residual: f64,
}

pub fn compose(
    first_path: &str,
    measure_path: &str,
    family_path: &str,
    out_path: &str,
    parallel: bool,
    tol: Tolerances64,
) -> Result<(), Failure> {
    let first_doc: PovmDoc = parse_doc(first_path)?;
    let measure_doc: MeasureDoc = parse_doc(measure_path)?;
    let family_doc: FamilyDoc = parse_doc(family_path)?;

    let first = first_doc.to_povm(tol).map_err(from_core)?;
    let mu = measure_doc.to_measure().map_err(from_core)?;
    let family = family_doc.to_family(tol).map_err(from_core)?;

    let composite = if parallel {
        sequential_compose_parallel(&first, &mu, &family)
    } else {
        sequential_compose(&first, &mu, &family)
    }
    .map_err(from_core)?;

    let normalization_residual = composite.normalization_residual().map_err(from_core)?;
    let marginals = first_marginal(&composite, first.space()).map_err(from_core)?;
    let mut marginal_recovery_residual = 0f64;
    for (x, marginal) in marginals.iter().enumerate() {
        let diff = marginal.sub(first.effect(x).matrix()).map_err(from_core)?;
        marginal_recovery_residual =
            marginal_recovery_residual.max(operator_norm(&diff).map_err(from_core)?);
    }

    let out_doc = PovmDoc::from_povm(&composite, None);
    let json = to_json_string(&out_doc).map_err(from_core)?;
    fs::write(out_path, json)
        .map_err(|e| parse_failure(format!("cannot write {out_path}: {e}")))?;

    emit(&ComposeReport {
        out: out_path.to_string(),
        pair_atoms: composite.len(),
        normalization_residual,
        marginal_recovery_residual,
    })?;
    eprintln!(
        "composite with {} pair atoms written to {out_path}",
        composite.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct VariationReport {
    closed_form: Option<f64>,
    brute_force: Option<f64>,
    difference: Option<f64>,
}

pub fn variation(path: &str, mode: VariationChoice, tol: Tolerances64) -> Result<(), Failure> {
    let doc: PovmDoc = parse_doc(path)?;
    let povm = doc.to_povm(tol).map_err(from_core)?;
    let closed = match mode {
        VariationChoice::BruteForce => None,
        _ => Some(povm.variation(VariationMode::ClosedForm).map_err(from_core)?),
    };
    let brute = match mode {
        VariationChoice::ClosedForm => None,
        _ => Some(povm.variation(VariationMode::BruteForce).map_err(from_core)?),
    };
    let difference = match (closed, brute) {
        (Some(c), Some(b)) => Some((c - b).abs()),
        _ => None,
    };
    emit(&VariationReport {
        closed_form: closed,
        brute_force: brute,
        difference,
    })?;
    eprintln!("variation: closed {closed:?}, brute {brute:?}");
    Ok(())
}

#[derive(Serialize)]
struct AxiomsReport {
    reports: Vec<LawReport>,
    passed: bool,
}

pub fn axioms(samples: usize, seed: u64, tol: Tolerances64) -> Result<(), Failure> {
    let mut reports = Vec::new();

    let interval = UnitInterval::<f64>::new(tol);
    reports.push(check_effect_algebra_axioms(&interval, samples, seed));
    reports.push(check_module_axioms(&interval, samples, seed.wrapping_add(1)));

    for dim in [2usize, 3, 4] {
        let effects = EffectCarrier::<f64>::with_tolerances(dim, tol);
        reports.push(check_effect_algebra_axioms(
            &effects,
            samples,
            seed.wrapping_add(dim as u64),
        ));
        reports.push(check_module_axioms(
            &effects,
            samples,
            seed.wrapping_add(10 + dim as u64),
        ));
    }

    let boolean = BooleanAlgebra::new(
        FiniteSpace::indexed(8).map_err(from_core)?,
    );
    reports.push(check_effect_algebra_axioms::<f64, _>(
        &boolean,
        samples,
        seed.wrapping_add(20),
    ));

    let passed = reports.iter().all(LawReport::passed);
    emit(&AxiomsReport { reports, passed })?;
    if passed {
        eprintln!("all law suites passed ({samples} samples each)");
        Ok(())
    } else {
        Err(domain_failure("law violations reported"))
    }
}

fn parse_region(text: &str) -> Result<Region<f64>, Failure> {
    match text {
        "north" | "z+" => Ok(Region::Hemisphere([0.0, 0.0, 1.0])),
        "south" | "z-" => Ok(Region::Hemisphere([0.0, 0.0, -1.0])),
        "x+" => Ok(Region::Hemisphere([1.0, 0.0, 0.0])),
        "x-" => Ok(Region::Hemisphere([-1.0, 0.0, 0.0])),
        "y+" => Ok(Region::Hemisphere([0.0, 1.0, 0.0])),
        "y-" => Ok(Region::Hemisphere([0.0, -1.0, 0.0])),
        other => {
            let indices = other
                .strip_prefix("indices:")
                .ok_or_else(|| parse_failure(format!("unknown region {other:?}")))?;
            let parsed = indices
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| parse_failure(format!("bad region indices: {e}")))?;
            Ok(Region::Indices(parsed))
        }
    }
}

pub fn spin_demo(
    points: usize,
    scheme: SchemeChoice,
    region_text: &str,
    parallel: bool,
) -> Result<(), Failure> {
    let scheme = match scheme {
        SchemeChoice::Fibonacci => GridScheme::Fibonacci,
        SchemeChoice::OctahedralSymmetrized => GridScheme::OctahedralSymmetrized,
    };
    let grid = build_grid::<f64>(points, scheme).map_err(from_core)?;
    let region = parse_region(region_text)?;
    let report = if parallel {
        run_spin_experiment_parallel(&grid, &region)
    } else {
        run_spin_experiment(&grid, &region)
    }
    .map_err(from_core)?;

    emit(&report)?;
    let claims_hold =
        report.minus_branch_norm <= 1e-10 && report.plus_branch_deviation <= 1e-10;
    eprintln!(
        "minus branch {:e}, plus deviation {:e}, normalization {:e}",
        report.minus_branch_norm, report.plus_branch_deviation, report.normalization_residual
    );
    if claims_hold {
        Ok(())
    } else {
        Err(domain_failure("spin claims exceed 1e-10"))
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DocKind {
    Matrix,
    Measure,
    Function,
    Povm,
    Family,
}

#[derive(Serialize)]
struct RoundtripReport {
    kind: String,
    matches: bool,
}

fn roundtrip_doc<T>(path: &str) -> Result<bool, Failure>
where
    T: serde::de::DeserializeOwned + Serialize + PartialEq,
{
    let doc: T = parse_doc(path)?;
    let json = to_json_string(&doc).map_err(from_core)?;
    let back: T = serde_json::from_str(&json)
        .map_err(|e| parse_failure(format!("reparse failed: {e}")))?;
    Ok(doc == back)
}

pub fn roundtrip(path: &str, kind: DocKind) -> Result<(), Failure> {
    let matches = match kind {
        DocKind::Matrix => roundtrip_doc::<MatrixDoc>(path)?,
        DocKind::Measure => roundtrip_doc::<MeasureDoc>(path)?,
        DocKind::Function => roundtrip_doc::<FunctionDoc>(path)?,
        DocKind::Povm => roundtrip_doc::<PovmDoc>(path)?,
        DocKind::Family => roundtrip_doc::<FamilyDoc>(path)?,
    };
    emit(&RoundtripReport {
        kind: format!("{kind:?}").to_lowercase(),
        matches,
    })?;
    if matches {
        eprintln!("round trip exact");
        Ok(())
    } else {
        Err(domain_failure("round trip changed values"))
    }
}
