//! JSON and CSV formats. Complex numbers are `[re, im]` pairs; matrices
//! are arrays of rows.

use nalgebra::{DMatrix, DVector};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{CoefField, Mode, Universe};
use crate::tuples::{Iteration, Tuple};
use crate::C64;

pub type Pair = [f64; 2];

fn pair(z: &C64) -> Pair {
    [z.re, z.im]
}

fn unpair(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn matrix_rows(m: &DMatrix<C64>) -> Vec<Vec<Pair>> {
    m.row_iter().map(|r| r.iter().map(pair).collect()).collect()
}

/// Matrix from rows; `cols` fixes the width when there are no rows.
pub fn matrix_from_rows(rows: &[Vec<Pair>], cols: Option<usize>) -> Result<DMatrix<C64>> {
    let ncols = rows.first().map(Vec::len).or(cols).unwrap_or(0);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Serialization("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| unpair(&rows[i][j])))
}

pub fn vector_pairs(v: &DVector<C64>) -> Vec<Pair> {
    v.iter().map(pair).collect()
}

pub fn vector_from_pairs(p: &[Pair]) -> DVector<C64> {
    DVector::from_iterator(p.len(), p.iter().map(unpair))
}

/// `#[serde(with)]` adapter for `DMatrix<C64>`.
pub mod cmatrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &DMatrix<C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DMatrix<C64>, D::Error> {
        let rows = Vec::<Vec<Pair>>::deserialize(d)?;
        matrix_from_rows(&rows, None).map_err(D::Error::custom)
    }
}

pub mod cmatrix_opt {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Option<DMatrix<C64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        m.as_ref().map(matrix_rows).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<DMatrix<C64>>, D::Error> {
        Option::<Vec<Vec<Pair>>>::deserialize(d)?
            .map(|rows| matrix_from_rows(&rows, None).map_err(D::Error::custom))
            .transpose()
    }
}

pub mod cmatrices {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[DMatrix<C64>], s: S) -> std::result::Result<S::Ok, S::Error> {
        ms.iter().map(matrix_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<DMatrix<C64>>, D::Error> {
        Vec::<Vec<Vec<Pair>>>::deserialize(d)?
            .iter()
            .map(|rows| matrix_from_rows(rows, None).map_err(D::Error::custom))
            .collect()
    }
}

pub mod cvector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &DVector<C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        vector_pairs(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DVector<C64>, D::Error> {
        Ok(vector_from_pairs(&Vec::<Pair>::deserialize(d)?))
    }
}

pub mod cvectors {
    use super::*;

    pub fn serialize<S: Serializer>(vs: &[DVector<C64>], s: S) -> std::result::Result<S::Ok, S::Error> {
        vs.iter().map(vector_pairs).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<DVector<C64>>, D::Error> {
        Ok(Vec::<Vec<Pair>>::deserialize(d)?
            .iter()
            .map(|p| vector_from_pairs(p))
            .collect())
    }
}

pub mod cvectors_opt {
    use super::*;

    pub fn serialize<S: Serializer>(vs: &[Option<DVector<C64>>], s: S) -> std::result::Result<S::Ok, S::Error> {
        vs.iter()
            .map(|v| v.as_ref().map(vector_pairs))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Option<DVector<C64>>>, D::Error> {
        Ok(Vec::<Option<Vec<Pair>>>::deserialize(d)?
            .iter()
            .map(|p| p.as_ref().map(|p| vector_from_pairs(p)))
            .collect())
    }
}

#[derive(Serialize, Deserialize)]
struct TupleRepr {
    dim: usize,
    variant: Mode,
    iteration: Iteration,
    #[serde(rename = "T")]
    t: Vec<Vec<Pair>>,
    #[serde(rename = "L")]
    l: Vec<Vec<Pair>>,
    generators: Vec<Vec<Pair>>,
}

impl Serialize for Tuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TupleRepr {
            dim: self.dim(),
            variant: self.variant(),
            iteration: self.iteration(),
            t: matrix_rows(self.t()),
            l: matrix_rows(self.l()),
            generators: self.generators().iter().map(vector_pairs).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tuple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TupleRepr::deserialize(d)?;
        let t = matrix_from_rows(&r.t, Some(r.dim)).map_err(D::Error::custom)?;
        let l = matrix_from_rows(&r.l, Some(r.dim)).map_err(D::Error::custom)?;
        if t.nrows() != r.dim {
            return Err(D::Error::custom(format!(
                "declared dim {} but T has {} rows",
                r.dim,
                t.nrows()
            )));
        }
        let gens = r.generators.iter().map(|g| vector_from_pairs(g)).collect();
        Tuple::new(t, l, gens, r.variant, r.iteration).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    universe: Universe,
    /// `data[t][j][i]`.
    data: Vec<Vec<Vec<Pair>>>,
}

impl Serialize for CoefField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let u = *self.universe();
        let data = (0..u.n_lambda())
            .map(|t| {
                (0..u.second_len())
                    .map(|j| (0..u.n_gen()).map(|i| pair(&self.get(t, j, i))).collect())
                    .collect()
            })
            .collect();
        FieldRepr { universe: u, data }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoefField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FieldRepr::deserialize(d)?;
        let u = r.universe;
        let flat: Vec<C64> = r
            .data
            .iter()
            .flatten()
            .flatten()
            .map(unpair)
            .collect();
        let shape_ok = r.data.len() == u.n_lambda()
            && r.data.iter().all(|s| {
                s.len() == u.second_len() && s.iter().all(|f| f.len() == u.n_gen())
            });
        if !shape_ok {
            return Err(D::Error::custom("field data shape does not match its universe"));
        }
        CoefField::from_data(u, flat).map_err(D::Error::custom)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn tuple_from_json(text: &str) -> Result<Tuple> {
    Ok(serde_json::from_str(text)?)
}

pub fn field_from_json(text: &str) -> Result<CoefField> {
    Ok(serde_json::from_str(text)?)
}

/// `index,value` lines.
pub fn spectrum_csv(values: &[f64]) -> String {
    let mut out = String::from("index,value\n");
    for (k, v) in values.iter().enumerate() {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

/// `point,dim,in_support` lines.
pub fn dims_csv(dims: &[usize]) -> String {
    let mut out = String::from("point,dim,in_support\n");
    for (p, d) in dims.iter().enumerate() {
        out.push_str(&format!("{p},{d},{}\n", u8::from(*d > 0)));
    }
    out
}

/// Square matrix of reals with a header row of column indices.
pub fn matrix_csv(rows: &[Vec<f64>]) -> String {
    let n = rows.first().map_or(0, Vec::len);
    let mut out = String::from("row");
    for j in 0..n {
        out.push_str(&format!(",{j}"));
    }
    out.push('\n');
    for (i, r) in rows.iter().enumerate() {
        out.push_str(&i.to_string());
        for v in r {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn tuple_round_trip() {
        let t = presets::geometric_diag().unwrap();
        let s = to_json(&t).unwrap();
        assert!(s.contains("\"N_or_K\": 1"));
        assert_eq!(tuple_from_json(&s).unwrap(), t);
    }

    #[test]
    fn rejects_ragged_and_inconsistent() {
        let bad = r#"{"dim":2,"variant":"unilateral","iteration":{"mode":"cyclic","N_or_K":1,"M_or_J":2},
            "T":[[[1,0],[0,0]],[[0,0]]],"L":[[[1,0],[0,0]],[[0,0],[1,0]]],"generators":[[[1,0],[0,0]]]}"#;
        assert!(tuple_from_json(bad).is_err());
        let bad_mode = r#"{"dim":1,"variant":"unilateral","iteration":{"mode":"spiral","N_or_K":1,"M_or_J":2},
            "T":[[[1,0]]],"L":[[[1,0]]],"generators":[[[1,0]]]}"#;
        assert!(tuple_from_json(bad_mode).is_err());
    }

    #[test]
    fn csv_layouts() {
        assert_eq!(spectrum_csv(&[2.0, 0.5]), "index,value\n0,2\n1,0.5\n");
        assert_eq!(dims_csv(&[0, 1]), "point,dim,in_support\n0,0,0\n1,1,1\n");
        assert_eq!(matrix_csv(&[vec![0.0, 1.0], vec![1.0, 0.0]]), "row,0,1\n0,0,1\n1,1,0\n");
    }
}
