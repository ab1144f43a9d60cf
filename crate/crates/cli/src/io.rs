//! JSON file formats: decompositions, operators and vectors.
//!
//! Complex arrays are stored as parallel `re`/`im` lists, matrices row-major.
//! Every file carries `format_version: "1"`.

use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use unidecomp::{
    CMatrix, CVector, FactoredDims, Ket, ProductDecomposition, ProductTerm, StateOperator,
    ToleranceConfig, TriDecomposition, TriTerm, C64,
};

use crate::CliError;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexArray {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexArray {
    pub fn from_values<'a>(values: impl IntoIterator<Item = &'a C64>) -> Self {
        let (re, im) = values.into_iter().map(|z| (z.re, z.im)).unzip();
        Self { re, im }
    }

    pub fn to_values(&self) -> Result<Vec<C64>, CliError> {
        if self.re.len() != self.im.len() {
            return Err(CliError::Parse(format!(
                "re/im lengths differ: {} vs {}",
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| Complex::new(r, i))
            .collect())
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }
}

/// A coefficient written either as a plain number or as `{re, im}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Scalar::Real(x) => Complex::new(x, 0.0),
            Scalar::Complex { re, im } => Complex::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<Scalar>,
    pub kets: Vec<ComplexArray>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionFile {
    pub format_version: String,
    pub dims: Vec<usize>,
    pub terms: Vec<TermRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub format_version: String,
    pub dims: Vec<usize>,
    pub matrix: ComplexArray,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub format_version: String,
    pub dims: Vec<usize>,
    pub vector: ComplexArray,
}

/// A loaded decomposition, bipartite or tripartite.
#[derive(Debug, Clone, PartialEq)]
pub enum Decomposition {
    Bi(ProductDecomposition),
    Tri(TriDecomposition),
}

fn check_version(v: &str) -> Result<(), CliError> {
    if v != FORMAT_VERSION {
        return Err(CliError::Parse(format!("unsupported format_version '{v}'")));
    }
    Ok(())
}

fn ket(arr: &ComplexArray) -> Result<Ket, CliError> {
    Ok(Ket::from_slice(&arr.to_values()?)?)
}

impl DecompositionFile {
    pub fn from_bi(d: &ProductDecomposition) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            dims: d.dims().as_slice().to_vec(),
            terms: d
                .terms()
                .iter()
                .map(|t| TermRecord {
                    w: Some(t.weight),
                    coeff: None,
                    kets: vec![
                        ComplexArray::from_values(t.a.amplitudes().iter()),
                        ComplexArray::from_values(t.b.amplitudes().iter()),
                    ],
                })
                .collect(),
        }
    }

    pub fn from_tri(t: &TriDecomposition) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            dims: t.dims().as_slice().to_vec(),
            terms: t
                .terms()
                .iter()
                .map(|term| TermRecord {
                    w: None,
                    coeff: Some(Scalar::Complex {
                        re: term.coeff.re,
                        im: term.coeff.im,
                    }),
                    kets: term
                        .kets()
                        .iter()
                        .map(|k| ComplexArray::from_values(k.amplitudes().iter()))
                        .collect(),
                })
                .collect(),
        }
    }

    /// Validates and converts. Bipartite files use `w`; tripartite files use
    /// `coeff` with either three kets per term or two, the first being a
    /// joint vector on the first two factors that must factor into a product.
    pub fn to_decomposition(&self, tol: &ToleranceConfig) -> Result<Decomposition, CliError> {
        check_version(&self.format_version)?;
        let dims = FactoredDims::new(self.dims.clone())?;
        match dims.count() {
            2 => {
                let terms = self
                    .terms
                    .iter()
                    .enumerate()
                    .map(|(j, rec)| {
                        let w = match (rec.w, rec.coeff) {
                            (Some(w), None) => w,
                            _ => {
                                return Err(CliError::Parse(format!(
                                    "term {}: bipartite terms need 'w' only",
                                    j + 1
                                )))
                            }
                        };
                        if rec.kets.len() != 2 {
                            return Err(CliError::Parse(format!(
                                "term {}: expected 2 kets",
                                j + 1
                            )));
                        }
                        Ok(ProductTerm {
                            weight: w,
                            a: ket(&rec.kets[0])?,
                            b: ket(&rec.kets[1])?,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Decomposition::Bi(ProductDecomposition::new(
                    dims, terms, tol,
                )?))
            }
            3 => {
                let coeff = |j: usize, rec: &TermRecord| match (rec.w, rec.coeff) {
                    (None, Some(c)) => Ok(c.value()),
                    _ => Err(CliError::Parse(format!(
                        "term {}: tripartite terms need 'coeff' only",
                        j + 1
                    ))),
                };
                let grouped = self.terms.iter().any(|rec| rec.kets.len() == 2);
                if grouped {
                    let terms = self
                        .terms
                        .iter()
                        .enumerate()
                        .map(|(j, rec)| {
                            if rec.kets.len() != 2 {
                                return Err(CliError::Parse(format!(
                                    "term {}: mixed grouped and split kets",
                                    j + 1
                                )));
                            }
                            let joint = CVector::from_vec(rec.kets[0].to_values()?);
                            Ok((coeff(j, rec)?, joint, ket(&rec.kets[1])?))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    return Ok(Decomposition::Tri(TriDecomposition::from_grouped(
                        dims, terms, tol,
                    )?));
                }
                let terms = self
                    .terms
                    .iter()
                    .enumerate()
                    .map(|(j, rec)| {
                        if rec.kets.len() != 3 {
                            return Err(CliError::Parse(format!(
                                "term {}: expected 3 kets",
                                j + 1
                            )));
                        }
                        Ok(TriTerm {
                            coeff: coeff(j, rec)?,
                            a: ket(&rec.kets[0])?,
                            b: ket(&rec.kets[1])?,
                            c: ket(&rec.kets[2])?,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Decomposition::Tri(TriDecomposition::new(dims, terms, tol)?))
            }
            n => Err(CliError::Parse(format!(
                "decompositions need 2 or 3 factors, got {n}"
            ))),
        }
    }
}

impl OperatorFile {
    pub fn from_operator(rho: &StateOperator) -> Self {
        let m = rho.matrix();
        let n = m.nrows();
        let values: Vec<C64> = (0..n * n).map(|i| m[(i / n, i % n)]).collect();
        Self {
            format_version: FORMAT_VERSION.into(),
            dims: rho.dims().as_slice().to_vec(),
            matrix: ComplexArray::from_values(values.iter()),
        }
    }

    /// Checks shape, Hermiticity and positivity.
    pub fn to_operator(&self) -> Result<StateOperator, CliError> {
        check_version(&self.format_version)?;
        let dims = FactoredDims::new(self.dims.clone())?;
        let n = dims.total();
        let values = self.matrix.to_values()?;
        if values.len() != n * n {
            return Err(CliError::Parse(format!(
                "matrix has {} entries, expected {}",
                values.len(),
                n * n
            )));
        }
        Ok(StateOperator::new(
            dims,
            CMatrix::from_row_slice(n, n, &values),
        )?)
    }
}

impl VectorFile {
    pub fn new(dims: &FactoredDims, v: &CVector) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            dims: dims.as_slice().to_vec(),
            vector: ComplexArray::from_values(v.iter()),
        }
    }

    pub fn to_vector(&self) -> Result<(FactoredDims, CVector), CliError> {
        check_version(&self.format_version)?;
        let dims = FactoredDims::new(self.dims.clone())?;
        let v = self.vector.to_values()?;
        if v.len() != dims.total() {
            return Err(CliError::Parse(format!(
                "vector has {} entries, expected {}",
                v.len(),
                dims.total()
            )));
        }
        Ok((dims, CVector::from_vec(v)))
    }
}

/// Any of the three file kinds, told apart by their payload key.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyFile {
    Decomposition(DecompositionFile),
    Operator(OperatorFile),
    Vector(VectorFile),
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(value: Value, path: &Path) -> Result<T, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_any(path: &Path) -> Result<AnyFile, CliError> {
    let value = read_json(path)?;
    let has = |k: &str| value.get(k).is_some();
    if has("terms") {
        Ok(AnyFile::Decomposition(parse(value, path)?))
    } else if has("matrix") {
        Ok(AnyFile::Operator(parse(value, path)?))
    } else if has("vector") {
        Ok(AnyFile::Vector(parse(value, path)?))
    } else {
        Err(CliError::Parse(format!(
            "{}: not a decomposition, operator or vector file",
            path.display()
        )))
    }
}

pub fn read_decomposition(path: &Path) -> Result<DecompositionFile, CliError> {
    parse(read_json(path)?, path)
}

pub fn read_operator(path: &Path) -> Result<OperatorFile, CliError> {
    parse(read_json(path)?, path)
}

pub fn read_vector(path: &Path) -> Result<VectorFile, CliError> {
    parse(read_json(path)?, path)
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_canonical_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    fs::write(path, to_canonical_string(value))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
