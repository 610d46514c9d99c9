//! JSON file formats.
//!
//! Every file carries `"format": 1` and a `"kind"` tag. Complex numbers are
//! `[re, im]` pairs and matrices are arrays of rows. Bracket and operation
//! tables list nonzero entries only.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{pair_count, AntiAlgebra, PairBasis, QuaternaryAlgebra};
use crate::alloy::{Alloy, AlloyFactorization, CrossProjRep};
use crate::asl2::Asl2Params;
use crate::error::{Error, Result};
use crate::numkernel::{CMatrix, CVector, C64};
use crate::rep::AlloyRep;

pub const FORMAT_VERSION: u32 = 1;

type Pair = [f64; 2];

fn c_out(z: &C64) -> Pair {
    [z.re, z.im]
}

fn c_in(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn vec_out(v: &CVector) -> Vec<Pair> {
    v.iter().map(c_out).collect()
}

fn vec_in(v: &[Pair], len: usize, what: &str) -> Result<CVector> {
    if v.len() != len {
        return Err(Error::Format(format!(
            "{what}: expected {len} entries, found {}",
            v.len()
        )));
    }
    Ok(CVector::from_iterator(len, v.iter().map(c_in)))
}

fn mat_out(m: &CMatrix) -> Vec<Vec<Pair>> {
    m.row_iter()
        .map(|r| r.iter().map(c_out).collect())
        .collect()
}

/// Rows must have equal length. `cols` is used when there are no rows.
fn mat_in(rows: &[Vec<Pair>], cols: usize) -> Result<CMatrix> {
    let ncols = rows.first().map_or(cols, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Format("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(rows.len(), ncols, |i, j| {
        c_in(&rows[i][j])
    }))
}

fn square_in(rows: &[Vec<Pair>], d: usize, what: &str) -> Result<CMatrix> {
    let m = mat_in(rows, d)?;
    if m.shape() != (d, d) {
        return Err(Error::Format(format!(
            "{what}: expected {d}x{d}, found {:?}",
            m.shape()
        )));
    }
    Ok(m)
}

fn finite(values: impl IntoIterator<Item = f64>) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::Format("non-finite number".into()))
    }
}

/// A persisted type.
pub trait JsonFormat: Sized {
    const KIND: &'static str;

    fn to_json_value(&self) -> Value;

    fn from_json_value(v: Value) -> Result<Self>;

    /// Pretty-printed with a trailing newline.
    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("values serialize");
        s.push('\n');
        s
    }

    fn from_json(s: &str) -> Result<Self> {
        Self::from_json_value(serde_json::from_str(s)?)
    }
}

/// Wraps `body` with the format header.
fn envelope<T: Serialize>(kind: &str, body: &T) -> Value {
    let mut v = serde_json::to_value(body).expect("values serialize");
    let obj = v.as_object_mut().expect("bodies are objects");
    let mut out = serde_json::Map::new();
    out.insert("format".into(), FORMAT_VERSION.into());
    out.insert("kind".into(), kind.into());
    out.append(obj);
    Value::Object(out)
}

/// Checks and strips the format header. A missing `kind` is accepted.
fn open<T: DeserializeOwned>(kind: &str, mut v: Value) -> Result<T> {
    let obj = v
        .as_object_mut()
        .ok_or_else(|| Error::Format(format!("{kind}: expected a JSON object")))?;
    match obj.remove("format") {
        Some(Value::Number(n)) if n.as_u64() == Some(FORMAT_VERSION as u64) => {}
        Some(other) => return Err(Error::Format(format!("unsupported format {other}"))),
        None => return Err(Error::Format("missing \"format\" field".into())),
    }
    if let Some(k) = obj.remove("kind") {
        if k.as_str() != Some(kind) {
            return Err(Error::Format(format!(
                "expected kind \"{kind}\", found {k}"
            )));
        }
    }
    Ok(serde_json::from_value(v)?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BracketEntry {
    i: usize,
    j: usize,
    out: Vec<Pair>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraBody {
    dim: usize,
    names: Vec<String>,
    brackets: Vec<BracketEntry>,
}

fn nonzero(v: &CVector) -> bool {
    v.iter().any(|z| z.re != 0.0 || z.im != 0.0)
}

impl JsonFormat for AntiAlgebra {
    const KIND: &'static str = "algebra";

    fn to_json_value(&self) -> Value {
        let brackets = self
            .pair_basis()
            .pairs()
            .iter()
            .enumerate()
            .filter_map(|(p, &(i, j))| {
                let out = self.table().column(p).into_owned();
                nonzero(&out).then(|| BracketEntry {
                    i,
                    j,
                    out: vec_out(&out),
                })
            })
            .collect();
        envelope(
            Self::KIND,
            &AlgebraBody {
                dim: self.dim(),
                names: self.names().to_vec(),
                brackets,
            },
        )
    }

    fn from_json_value(v: Value) -> Result<Self> {
        let body: AlgebraBody = open(Self::KIND, v)?;
        algebra_from_body(body)
    }
}

fn algebra_from_body(body: AlgebraBody) -> Result<AntiAlgebra> {
    let n = body.dim;
    if body.names.len() != n {
        return Err(Error::Format(format!(
            "{} names for dimension {n}",
            body.names.len()
        )));
    }
    let table = fill_table(
        n,
        n,
        body.brackets.iter().map(|e| (e.i, e.j, &e.out)),
        "bracket",
    )?;
    AntiAlgebra::new(body.names, table)
}

/// Builds an `out_dim x C(n, 2)` table from antisymmetric entries.
fn fill_table<'a>(
    n: usize,
    out_dim: usize,
    entries: impl Iterator<Item = (usize, usize, &'a Vec<Pair>)>,
    what: &str,
) -> Result<CMatrix> {
    let basis = PairBasis::new(n);
    let mut table = CMatrix::zeros(out_dim, pair_count(n));
    let mut seen = vec![false; pair_count(n)];
    for (i, j, out) in entries {
        let (p, sign) = basis.index(i, j).ok_or_else(|| {
            Error::Format(format!("{what} ({i}, {j}) is out of range or diagonal"))
        })?;
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::Format(format!("{what} ({i}, {j}) listed twice")));
        }
        let v = vec_in(out, out_dim, what)?;
        finite(v.iter().flat_map(|z| [z.re, z.im]))?;
        table.set_column(p, &(v * C64::new(sign, 0.0)));
    }
    Ok(table)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpEntry {
    p: usize,
    q: usize,
    out: Vec<Pair>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuaternaryBody {
    dim: usize,
    ops: Vec<OpEntry>,
}

impl JsonFormat for QuaternaryAlgebra {
    const KIND: &'static str = "quaternary";

    fn to_json_value(&self) -> Value {
        let ops = self
            .pair_of_pairs_basis()
            .pairs()
            .iter()
            .enumerate()
            .filter_map(|(k, &(p, q))| {
                let out = self.matrix().column(k).into_owned();
                nonzero(&out).then(|| OpEntry {
                    p,
                    q,
                    out: vec_out(&out),
                })
            })
            .collect();
        envelope(
            Self::KIND,
            &QuaternaryBody {
                dim: self.dim(),
                ops,
            },
        )
    }

    fn from_json_value(v: Value) -> Result<Self> {
        let body: QuaternaryBody = open(Self::KIND, v)?;
        let n = body.dim;
        let table = fill_table(
            pair_count(n),
            n,
            body.ops.iter().map(|e| (e.p, e.q, &e.out)),
            "operation",
        )?;
        QuaternaryAlgebra::new(n, table)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlloyBracket {
    part: usize,
    i: usize,
    j: usize,
    out: Vec<Pair>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlloyBody {
    dim: usize,
    names: Vec<String>,
    parts: Vec<Vec<usize>>,
    brackets: Vec<AlloyBracket>,
}

impl JsonFormat for Alloy {
    const KIND: &'static str = "alloy";

    fn to_json_value(&self) -> Value {
        let brackets = self
            .w_pairs()
            .into_iter()
            .filter(|(_, _, _, out)| nonzero(out))
            .map(|(part, i, j, out)| AlloyBracket {
                part,
                i,
                j,
                out: vec_out(&out),
            })
            .collect();
        envelope(
            Self::KIND,
            &AlloyBody {
                dim: self.dim(),
                names: self.names().to_vec(),
                parts: self.parts().to_vec(),
                brackets,
            },
        )
    }

    fn from_json_value(v: Value) -> Result<Self> {
        let body: AlloyBody = open(Self::KIND, v)?;
        alloy_from_body(body)
    }
}

fn alloy_from_body(body: AlloyBody) -> Result<Alloy> {
    let dim = body.dim;
    if body.names.len() != dim {
        return Err(Error::Format(format!(
            "{} names for dimension {dim}",
            body.names.len()
        )));
    }
    let mut tables = Vec::with_capacity(body.parts.len());
    for (p, part) in body.parts.iter().enumerate() {
        // local position of each global index in this part
        let local = |g: usize| part.iter().position(|&x| x == g);
        let mut entries = Vec::new();
        for e in body.brackets.iter().filter(|e| e.part == p) {
            match (local(e.i), local(e.j)) {
                (Some(a), Some(b)) => entries.push((a, b, &e.out)),
                _ => {
                    return Err(Error::Format(format!(
                        "bracket ({}, {}) is not inside part {p}",
                        e.i, e.j
                    )))
                }
            }
        }
        tables.push(fill_table(part.len(), dim, entries.into_iter(), "bracket")?);
    }
    if let Some(e) = body.brackets.iter().find(|e| e.part >= body.parts.len()) {
        return Err(Error::Format(format!(
            "bracket refers to missing part {}",
            e.part
        )));
    }
    Alloy::new(body.names, body.parts, tables)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorizationBody {
    lam1: Vec<Vec<Pair>>,
    lam2: Vec<Vec<Pair>>,
}

impl JsonFormat for AlloyFactorization {
    const KIND: &'static str = "factorization";

    fn to_json_value(&self) -> Value {
        envelope(
            Self::KIND,
            &FactorizationBody {
                lam1: mat_out(&self.lam1),
                lam2: mat_out(&self.lam2),
            },
        )
    }

    fn from_json_value(v: Value) -> Result<Self> {
        let body: FactorizationBody = open(Self::KIND, v)?;
        // lam1 is m x C(n,2) and lam2 is n x C(m,2)
        let m = body.lam1.len();
        let n = body.lam2.len();
        let lam1 = mat_in(&body.lam1, pair_count(n))?;
        let lam2 = mat_in(&body.lam2, pair_count(m))?;
        AlloyFactorization::new(n, m, lam1, lam2)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepBody {
    alloy: Value,
    space_dim: usize,
    mats: Vec<Vec<Vec<Pair>>>,
}

fn mats_in(mats: &[Vec<Vec<Pair>>], d: usize) -> Result<Vec<CMatrix>> {
    mats.iter()
        .enumerate()
        .map(|(k, m)| square_in(m, d, &format!("matrix {k}")))
        .collect()
}

impl JsonFormat for AlloyRep {
    const KIND: &'static str = "rep";

    fn to_json_value(&self) -> Value {
        envelope(
            Self::KIND,
            &RepBody {
                alloy: self.alloy().to_json_value(),
                space_dim: self.space_dim(),
                mats: self.mats().iter().map(mat_out).collect(),
            },
        )
    }

    fn from_json_value(v: Value) -> Result<Self> {
        let body: RepBody = open(Self::KIND, v)?;
        let alloy = Alloy::from_json_value(body.alloy)?;
        let mats = mats_in(&body.mats, body.space_dim)?;
        AlloyRep::new(alloy, mats, body.space_dim)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CrossBody {
    g1: Value,
    g2: Value,
    space_dim: usize,
    t1: Vec<Vec<Vec<Pair>>>,
    t2: Vec<Vec<Vec<Pair>>>,
}

impl JsonFormat for CrossProjRep {
    const KIND: &'static str = "cross";

    fn to_json_value(&self) -> Value {
        envelope(
            Self::KIND,
            &CrossBody {
                g1: self.g1.to_json_value(),
                g2: self.g2.to_json_value(),
                space_dim: self.space_dim(),
                t1: self.t1.iter().map(mat_out).collect(),
                t2: self.t2.iter().map(mat_out).collect(),
            },
        )
    }

    fn from_json_value(v: Value) -> Result<Self> {
        let body: CrossBody = open(Self::KIND, v)?;
        let g1 = AntiAlgebra::from_json_value(body.g1)?;
        let g2 = AntiAlgebra::from_json_value(body.g2)?;
        let t1 = mats_in(&body.t1, body.space_dim)?;
        let t2 = mats_in(&body.t2, body.space_dim)?;
        CrossProjRep::new(g1, g2, t1, t2, body.space_dim)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Asl2Body {
    gamma: Pair,
    dims: Vec<usize>,
    #[serde(rename = "A")]
    a: Vec<Vec<Vec<Pair>>>,
    #[serde(rename = "B")]
    b: Vec<Vec<Vec<Pair>>>,
}

impl JsonFormat for Asl2Params {
    const KIND: &'static str = "asl2_params";

    fn to_json_value(&self) -> Value {
        envelope(
            Self::KIND,
            &Asl2Body {
                gamma: c_out(&self.gamma),
                dims: self.dims.clone(),
                a: self.a.iter().map(mat_out).collect(),
                b: self.b.iter().map(mat_out).collect(),
            },
        )
    }

    fn from_json_value(v: Value) -> Result<Self> {
        let body: Asl2Body = open(Self::KIND, v)?;
        finite(body.gamma)?;
        let dims = body.dims;
        let n = dims.len().saturating_sub(1);
        if body.a.len() != n || body.b.len() != n {
            return Err(Error::Format(format!("expected {n} A and B blocks")));
        }
        let a = (0..n)
            .map(|i| mat_in(&body.a[i], dims[i + 1]))
            .collect::<Result<Vec<_>>>()?;
        let b = (0..n)
            .map(|i| mat_in(&body.b[i], dims[i]))
            .collect::<Result<Vec<_>>>()?;
        for m in a.iter().chain(&b) {
            finite(m.iter().flat_map(|z| [z.re, z.im]))?;
        }
        let p = Asl2Params {
            gamma: c_in(&body.gamma),
            dims,
            a,
            b,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Serializes a matrix as rows of `[re, im]` pairs, for embedding in reports.
pub fn matrix_value(m: &CMatrix) -> Value {
    serde_json::to_value(mat_out(m)).expect("values serialize")
}

pub fn matrix_from_value(v: Value) -> Result<CMatrix> {
    let rows: Vec<Vec<Pair>> = serde_json::from_value(v)?;
    mat_in(&rows, 0)
}

pub fn complex_value(z: C64) -> Value {
    serde_json::to_value(c_out(&z)).expect("values serialize")
}
