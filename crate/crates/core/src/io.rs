//! JSON encodings: complex matrices as row-major arrays of `[re, im]`
//! pairs, exact rationals as `"p/q"` strings.

use nalgebra::DMatrix;
use num_traits::Signed;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::CMat;
use crate::scalar::{format_rational, parse_rational, Qi, C64};

pub type RowMajor = Vec<Vec<[f64; 2]>>;

pub fn to_rows(m: &CMat) -> RowMajor {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn from_rows(rows: &RowMajor) -> Result<CMat, String> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    if rows.iter().any(|x| x.len() != c) {
        return Err("ragged matrix rows".into());
    }
    Ok(CMat::from_fn(r, c, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

/// Exact entry: `"p/q"` for real values, `["p/q", "p/q"]` otherwise.
pub fn qi_to_string(z: &Qi) -> String {
    if num_traits::Zero::is_zero(&z.im) {
        format_rational(&z.re)
    } else {
        format!("{}{}{}i", format_rational(&z.re), if z.im.is_negative() { "" } else { "+" }, format_rational(&z.im))
    }
}

pub fn exact_to_rows(m: &DMatrix<Qi>) -> Vec<Vec<[String; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [format_rational(&m[(i, j)].re), format_rational(&m[(i, j)].im)]).collect())
        .collect()
}

pub fn exact_from_rows(rows: &[Vec<[String; 2]>]) -> crate::Result<DMatrix<Qi>> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    let mut out = DMatrix::from_element(r, c, Qi::new(num_traits::Zero::zero(), num_traits::Zero::zero()));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return Err(crate::Error::Parse("ragged matrix rows".into()));
        }
        for (j, [re, im]) in row.iter().enumerate() {
            out[(i, j)] = Qi::new(parse_rational(re)?, parse_rational(im)?);
        }
    }
    Ok(out)
}

/// `#[serde(with = "cmat")]` for a single matrix.
pub mod cmat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        from_rows(&RowMajor::deserialize(d)?).map_err(D::Error::custom)
    }
}

/// `#[serde(with = "cmats")]` for a list of matrices.
pub mod cmats {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[CMat], s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(to_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMat>, D::Error> {
        Vec::<RowMajor>::deserialize(d)?.iter().map(|r| from_rows(r).map_err(D::Error::custom)).collect()
    }
}

/// `{label: matrix}` for a float representation.
pub fn rep_to_json(labels: &[String], mats: &[CMat]) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> =
        labels.iter().zip(mats).map(|(l, m)| (l.clone(), serde_json::to_value(to_rows(m)).expect("matrix json"))).collect();
    serde_json::Value::Object(map)
}

/// `{label: matrix}` for an exact representation (entries as `"p/q"`).
pub fn exact_rep_to_json(labels: &[String], mats: &[DMatrix<Qi>]) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = labels
        .iter()
        .zip(mats)
        .map(|(l, m)| (l.clone(), serde_json::to_value(exact_to_rows(m)).expect("matrix json")))
        .collect();
    serde_json::Value::Object(map)
}

/// Reads `{label: matrix}` back, in the order of `labels`.
pub fn rep_from_json(labels: &[String], v: &serde_json::Value) -> crate::Result<Vec<CMat>> {
    labels
        .iter()
        .map(|l| {
            let rows: RowMajor = serde_json::from_value(
                v.get(l).cloned().ok_or_else(|| crate::Error::Parse(format!("missing generator {l}")))?,
            )?;
            from_rows(&rows).map_err(crate::Error::Parse)
        })
        .collect()
}

/// An exact scalar in a parameter file: `"p/q"`, a decimal string, or a
/// JSON number (read through its shortest decimal form).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExactEntry {
    Text(String),
    Int(i64),
    Float(f64),
}

impl ExactEntry {
    pub fn to_qi(&self) -> crate::Result<Qi> {
        let text = match self {
            ExactEntry::Text(s) => s.clone(),
            ExactEntry::Int(i) => i.to_string(),
            ExactEntry::Float(x) => format!("{x:?}"),
        };
        Ok(Qi::new(parse_rational(&text)?, num_traits::Zero::zero()))
    }
}

/// Parameter file: leg lengths, `gamma[k][j]` and `nu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamFile {
    pub legs: Vec<usize>,
    pub gamma: Vec<Vec<ExactEntry>>,
    pub nu: ExactEntry,
}

impl ParamFile {
    pub fn from_params(p: &crate::params::RationalParams) -> Self {
        let exact = |q: &Qi| ExactEntry::Text(qi_to_string(q));
        Self {
            legs: p.graph.legs().to_vec(),
            gamma: p.gamma.iter().map(|row| row.iter().map(exact).collect()).collect(),
            nu: exact(&p.nu),
        }
    }

    pub fn to_params(&self) -> crate::Result<crate::params::RationalParams> {
        let gamma = self.gamma.iter().map(|row| row.iter().map(ExactEntry::to_qi).collect()).collect::<crate::Result<_>>()?;
        crate::params::RationalParams::new(&self.legs, gamma, self.nu.to_qi()?)
    }

    pub fn read(path: &std::path::Path) -> crate::Result<crate::params::RationalParams> {
        let text = std::fs::read_to_string(path)?;
        let file: ParamFile = serde_json::from_str(&text)?;
        file.to_params()
    }
}
