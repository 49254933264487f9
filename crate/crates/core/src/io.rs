//! File formats: complex numbers as `[re, im]`, model JSON, sparse triplets, CSV.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::model::GaussianModel;
use crate::sparse::SparseMatrix;

/// Serde adapters for `serde(with = "...")`.
pub mod c64 {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

pub mod cvec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CVector, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(CVector::from_iterator(pairs.len(), pairs.iter().map(|[r, i]| Complex64::new(*r, *i))))
    }
}

/// Matrices as a list of rows.
pub mod cmat {
    use super::*;
    use serde::de::Error as _;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> =
            m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        matrix_from_rows(&rows).map_err(D::Error::custom)
    }
}

pub mod opt_cvecs {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<CVector>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let out: Option<Vec<Vec<[f64; 2]>>> =
            v.as_ref().map(|vs| vs.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect());
        out.serialize(s)
    }
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> std::result::Result<CMatrix, String> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err("ragged matrix rows".into());
    }
    Ok(CMatrix::from_fn(n, m, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

/// JSON shape of a Gaussian model: `{"d", "omega", "kappa", "zeta", "V", "U"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianModelSpec {
    pub d: usize,
    #[serde(with = "cmat")]
    pub omega: CMatrix,
    #[serde(with = "cmat")]
    pub kappa: CMatrix,
    #[serde(with = "cvec")]
    pub zeta: CVector,
    #[serde(rename = "V", with = "cmat")]
    pub v: CMatrix,
    #[serde(rename = "U", with = "cmat")]
    pub u: CMatrix,
}

impl GaussianModelSpec {
    pub fn from_model(model: &GaussianModel) -> Self {
        Self {
            d: model.modes(),
            omega: model.omega().clone(),
            kappa: model.kappa().clone(),
            zeta: model.zeta().clone(),
            v: model.v().clone(),
            u: model.u().clone(),
        }
    }

    pub fn to_model(&self) -> Result<GaussianModel> {
        if self.omega.nrows() != self.d {
            return Err(Error::ShapeMismatch(format!("d = {} but omega has {} rows", self.d, self.omega.nrows())));
        }
        GaussianModel::new(self.omega.clone(), self.kappa.clone(), self.zeta.clone(), self.v.clone(), self.u.clone())
    }
}

/// Text export: a `rows cols nnz` header followed by `i j re im` lines.
pub fn write_triplets(m: &SparseMatrix) -> String {
    let mut out = format!("{} {} {}\n", m.nrows(), m.ncols(), m.nnz());
    for (i, j, z) in m.triplets() {
        writeln!(out, "{i} {j} {:e} {:e}", z.re, z.im).unwrap();
    }
    out
}

pub fn parse_triplets(text: &str) -> Result<SparseMatrix> {
    let bad = |line: usize, msg: &str| Error::InvalidArgument(format!("triplet line {}: {msg}", line + 1));
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad(0, "missing header"))?;
    let head: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad(0, "header must be three integers"))?;
    let [rows, cols, nnz] = head[..] else {
        return Err(bad(0, "header must be three integers"));
    };
    let mut triplets = Vec::with_capacity(nnz);
    for (k, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(bad(k, "expected `i j re im`"));
        }
        let i: usize = f[0].parse().map_err(|_| bad(k, "bad row index"))?;
        let j: usize = f[1].parse().map_err(|_| bad(k, "bad column index"))?;
        let re: f64 = f[2].parse().map_err(|_| bad(k, "bad real part"))?;
        let im: f64 = f[3].parse().map_err(|_| bad(k, "bad imaginary part"))?;
        if i >= rows || j >= cols {
            return Err(bad(k, "index outside the declared shape"));
        }
        triplets.push((i, j, Complex64::new(re, im)));
    }
    if triplets.len() != nnz {
        return Err(Error::InvalidArgument(format!("header declares {nnz} entries, found {}", triplets.len())));
    }
    Ok(SparseMatrix::from_triplets(rows, cols, triplets))
}

/// Minimal CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "CSV row width");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip float formatting, used for every numeric CSV cell.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}
