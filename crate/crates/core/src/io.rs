//! File formats shared with the command-line front end.
//!
//! Documents are JSON with floats printed at 17 significant digits, enough
//! for a double to survive a save/load round trip to the last digit.
//! Complex entries are `[re, im]` pairs in row-major order.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcome::{FiniteMeasure, FiniteSpace, MeasurableFn};
use crate::povm::Povm;
use crate::scalar::{cplx, Tolerances};
use crate::sequential::IndexedPovmFamily;
use crate::operator::ComplexMatrix;

/// Square complex matrix document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub dim: usize,
    /// Row-major `[re, im]` pairs, `dim * dim` of them.
    pub entries: Vec<[f64; 2]>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &ComplexMatrix<f64>) -> Self {
        MatrixDoc {
            dim: m.rows(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix<f64>> {
        let entries = self.entries.iter().map(|&[re, im]| cplx(re, im)).collect();
        ComplexMatrix::new(self.dim, self.dim, entries)
    }
}

/// Finite measure document: labels with parallel nonnegative masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureDoc {
    pub atoms: Vec<String>,
    pub mass: Vec<f64>,
}

impl MeasureDoc {
    pub fn from_measure(mu: &FiniteMeasure<f64>) -> Self {
        MeasureDoc {
            atoms: mu.space().atoms().to_vec(),
            mass: mu.masses().to_vec(),
        }
    }

    pub fn to_measure(&self) -> Result<FiniteMeasure<f64>> {
        let space = FiniteSpace::new(self.atoms.clone())?;
        FiniteMeasure::new(space, self.mass.clone())
    }
}

/// Complex function document: labels with parallel `[re, im]` values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionDoc {
    pub atoms: Vec<String>,
    pub values: Vec<[f64; 2]>,
}

impl FunctionDoc {
    pub fn from_fn(f: &MeasurableFn<f64>) -> Self {
        FunctionDoc {
            atoms: f.space().atoms().to_vec(),
            values: f.values().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_fn(&self) -> Result<MeasurableFn<f64>> {
        let space = FiniteSpace::new(self.atoms.clone())?;
        let values = self.values.iter().map(|&[re, im]| cplx(re, im)).collect();
        MeasurableFn::new(space, values)
    }
}

/// POVM document: one effect matrix per atom, with an optional mass list
/// turning the outcome space into a measure space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmDoc {
    pub hilbert_dim: usize,
    pub atoms: Vec<String>,
    pub effects: Vec<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<Vec<f64>>,
}

impl PovmDoc {
    pub fn from_povm(povm: &Povm<f64>, measure: Option<&FiniteMeasure<f64>>) -> Self {
        PovmDoc {
            hilbert_dim: povm.dim(),
            atoms: povm.space().atoms().to_vec(),
            effects: povm
                .effects()
                .iter()
                .map(|e| MatrixDoc::from_matrix(e.matrix()))
                .collect(),
            measure: measure.map(|mu| mu.masses().to_vec()),
        }
    }

    pub fn space(&self) -> Result<FiniteSpace> {
        FiniteSpace::new(self.atoms.clone())
    }

    /// Raw effect matrices without validation, for diagnostic reporting.
    pub fn raw_matrices(&self) -> Result<Vec<ComplexMatrix<f64>>> {
        if self.effects.len() != self.atoms.len() {
            return Err(Error::NotAPovm(format!(
                "{} atoms but {} effects",
                self.atoms.len(),
                self.effects.len()
            )));
        }
        self.effects
            .iter()
            .map(|doc| {
                if doc.dim != self.hilbert_dim {
                    return Err(Error::DimensionMismatch(format!(
                        "effect of dimension {} in a dimension-{} document",
                        doc.dim, self.hilbert_dim
                    )));
                }
                doc.to_matrix()
            })
            .collect()
    }

    pub fn to_povm(&self, tol: Tolerances<f64>) -> Result<Povm<f64>> {
        let space = self.space()?;
        let effects = self
            .raw_matrices()?
            .into_iter()
            .map(|m| crate::operator::Effect::with_tolerances(m, &tol))
            .collect::<Result<Vec<_>>>()?;
        Povm::with_tolerances(space, effects, tol)
    }

    /// The attached measure, when the document carries one.
    pub fn to_measure(&self) -> Result<Option<FiniteMeasure<f64>>> {
        match &self.measure {
            None => Ok(None),
            Some(mass) => {
                let space = self.space()?;
                Ok(Some(FiniteMeasure::new(space, mass.clone())?))
            }
        }
    }
}

/// Family document: one POVM per index atom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub index_atoms: Vec<String>,
    pub povms: Vec<PovmDoc>,
}

impl FamilyDoc {
    pub fn from_family(family: &IndexedPovmFamily<f64>) -> Self {
        FamilyDoc {
            index_atoms: family.index_space().atoms().to_vec(),
            povms: family
                .members()
                .iter()
                .map(|p| PovmDoc::from_povm(p, None))
                .collect(),
        }
    }

    pub fn to_family(&self, tol: Tolerances<f64>) -> Result<IndexedPovmFamily<f64>> {
        let index_space = FiniteSpace::new(self.index_atoms.clone())?;
        let members = self
            .povms
            .iter()
            .map(|doc| doc.to_povm(tol))
            .collect::<Result<Vec<_>>>()?;
        IndexedPovmFamily::new(index_space, members)
    }
}

/// Distribution table emitted by statistical conversions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionDoc {
    pub atoms: Vec<String>,
    pub prob: Vec<f64>,
}

struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        // 17 significant digits: one before the decimal point, 16 after.
        write!(writer, "{:.16e}", value)
    }
}

/// Serialize with floats at 17 significant digits.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigitFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::BadParameter(format!("serialization failed: {e}")))?;
    String::from_utf8(out).map_err(|e| Error::BadParameter(format!("non-utf8 output: {e}")))
}
