//! JSON file formats.
//!
//! Every file carries a `format` tag and a `version`; rational entries are
//! JSON integers or strings `"p/q"`. Syntax errors report line and column.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classify::OrbitRecord;
use crate::error::{Error, Result};
use crate::fqs::FiniteQuadraticSpace;
use crate::group::MatrixGroup;
use crate::lattice::{EmbeddedLattice, Lattice};
use crate::linalg::{Int, IntMatrix, Rat, RatMatrix, SqMat};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    fn to_rat(&self) -> std::result::Result<Rat, String> {
        match self {
            Entry::Int(v) => Ok(Rat::from_integer((*v).into())),
            Entry::Text(s) => {
                let s = s.trim();
                let (num, den) = match s.split_once('/') {
                    Some((a, b)) => (a.trim(), b.trim()),
                    None => (s, "1"),
                };
                let num: Int = num.parse().map_err(|_| format!("bad rational entry {s:?}"))?;
                let den: Int = den.parse().map_err(|_| format!("bad rational entry {s:?}"))?;
                if den == Int::from(0) {
                    return Err(format!("zero denominator in {s:?}"));
                }
                Ok(Rat::new(num, den))
            }
        }
    }

    pub fn from_rat(r: &Rat) -> Self {
        if r.is_integer() {
            if let Ok(v) = i64::try_from(r.to_integer()) {
                return Entry::Int(v);
            }
        }
        Entry::Text(r.to_string())
    }
}

/// Where a group or sublattice file finds its ambient lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbientRef {
    /// `"e8"` or `"leech"`
    Builtin(String),
    Gram(Vec<Vec<Entry>>),
    /// lattice file, relative to the referring file
    Path(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub format: String,
    pub version: u32,
    pub rank: usize,
    pub gram: Vec<Vec<Entry>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub format: String,
    pub version: u32,
    pub ambient: AmbientRef,
    pub generators: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SublatticeFile {
    pub format: String,
    pub version: u32,
    pub ambient: AmbientRef,
    pub basis: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FqsFile {
    pub format: String,
    pub version: u32,
    pub orders: Vec<u64>,
    pub qgram: Vec<Vec<Entry>>,
}

/// Machine-readable orbit record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordOut {
    pub number: usize,
    pub subset: Option<Vec<usize>>,
    pub rank: usize,
    /// decimal, since orders can exceed 64 bits
    pub group_order: String,
    pub det: String,
    pub alpha: usize,
    pub extension_class_count: Option<usize>,
    pub coinvariant_root_type: Option<String>,
    pub fingerprint: Vec<usize>,
    pub invariant_gram: Vec<Vec<Entry>>,
    pub coinvariant_gram: Vec<Vec<Entry>>,
    pub invariant_basis: Vec<Vec<i64>>,
    pub generators: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecordsFile {
    pub format: String,
    pub version: u32,
    pub ambient: AmbientRef,
    pub records: Vec<RecordOut>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), msg: e.to_string() }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, format: &str) -> Result<T> {
    let header: serde_json::Value = serde_json::from_str(text).map_err(parse_error)?;
    let tag = header.get("format").and_then(|v| v.as_str());
    if tag != Some(format) {
        return Err(Error::Parse { line: 1, column: 1, msg: format!("expected format {format:?}, found {tag:?}") });
    }
    let version = header.get("version").and_then(|v| v.as_u64());
    if version != Some(SCHEMA_VERSION as u64) {
        return Err(Error::Parse { line: 1, column: 1, msg: format!("unsupported version {version:?}") });
    }
    serde_json::from_str(text).map_err(parse_error)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn rat_matrix(rows: &[Vec<Entry>]) -> Result<RatMatrix> {
    let n = rows.len();
    let mut data = Vec::with_capacity(n * n);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::DimensionMismatch(format!("row {i} has {} entries, expected {n}", r.len())));
        }
        for e in r {
            data.push(e.to_rat().map_err(|msg| Error::Parse { line: 0, column: 0, msg })?);
        }
    }
    Ok(RatMatrix::new(n, n, data))
}

pub fn entries(m: &RatMatrix) -> Vec<Vec<Entry>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(Entry::from_rat).collect()).collect()
}

pub fn parse_lattice(text: &str) -> Result<Lattice> {
    let f: LatticeFile = parse(text, "fixlat-lattice")?;
    if f.rank != f.gram.len() {
        return Err(Error::DimensionMismatch(format!("rank {} but gram has {} rows", f.rank, f.gram.len())));
    }
    Lattice::new(rat_matrix(&f.gram)?)
}

pub fn load_lattice(path: &Path) -> Result<Lattice> {
    parse_lattice(&read(path)?)
}

pub fn lattice_json(l: &Lattice) -> String {
    let f = LatticeFile {
        format: "fixlat-lattice".into(),
        version: SCHEMA_VERSION,
        rank: l.rank(),
        gram: entries(l.gram()),
    };
    serde_json::to_string_pretty(&f).expect("serializable")
}

fn resolve(ambient: &AmbientRef, base: Option<&Path>) -> Result<Arc<Lattice>> {
    match ambient {
        AmbientRef::Builtin(name) => match name.as_str() {
            "e8" => Ok(crate::classify::e8_lattice()),
            "leech" => Ok(crate::leech::leech().lattice().clone()),
            other => Err(Error::Parse { line: 0, column: 0, msg: format!("unknown builtin lattice {other:?}") }),
        },
        AmbientRef::Gram(rows) => Ok(Arc::new(Lattice::new(rat_matrix(rows)?)?)),
        AmbientRef::Path(p) => {
            let mut path = PathBuf::from(p);
            if path.is_relative() {
                if let Some(b) = base {
                    path = b.join(path);
                }
            }
            Ok(Arc::new(load_lattice(&path)?))
        }
    }
}

pub fn parse_group(text: &str, base: Option<&Path>) -> Result<MatrixGroup> {
    let f: GroupFile = parse(text, "fixlat-group")?;
    let ambient = resolve(&f.ambient, base)?;
    let n = ambient.rank();
    let mut gens = Vec::new();
    for (k, g) in f.generators.iter().enumerate() {
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("generator {k} is not {n}×{n}")));
        }
        gens.push(SqMat::new(n, g.concat()));
    }
    // shared ambients reuse cached short vectors
    if matches!(&f.ambient, AmbientRef::Builtin(s) if s == "leech") {
        return MatrixGroup::with_candidates(ambient, gens, Some(&crate::leech::leech().norm4_vectors()));
    }
    MatrixGroup::new(ambient, gens)
}

pub fn load_group(path: &Path) -> Result<MatrixGroup> {
    parse_group(&read(path)?, path.parent())
}

pub fn matrix_rows(g: &SqMat) -> Vec<Vec<i64>> {
    (0..g.dim()).map(|i| g.row(i).to_vec()).collect()
}

pub fn group_json(ambient: AmbientRef, gens: &[SqMat]) -> String {
    let f = GroupFile {
        format: "fixlat-group".into(),
        version: SCHEMA_VERSION,
        ambient,
        generators: gens.iter().map(matrix_rows).collect(),
    };
    serde_json::to_string_pretty(&f).expect("serializable")
}

pub fn parse_sublattice(text: &str, base: Option<&Path>) -> Result<EmbeddedLattice> {
    let f: SublatticeFile = parse(text, "fixlat-sublattice")?;
    let ambient = resolve(&f.ambient, base)?;
    let n = ambient.rank();
    EmbeddedLattice::new(ambient, &IntMatrix::from_rows(&f.basis, n))
}

pub fn sublattice_json(ambient: AmbientRef, s: &EmbeddedLattice) -> Result<String> {
    let basis = (0..s.rank())
        .map(|i| s.basis().row_i64(i))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::PreconditionViolated("basis entries must fit in 64 bits".into()))?;
    let f = SublatticeFile { format: "fixlat-sublattice".into(), version: SCHEMA_VERSION, ambient, basis };
    Ok(serde_json::to_string_pretty(&f).expect("serializable"))
}

pub fn load_sublattice(path: &Path) -> Result<EmbeddedLattice> {
    parse_sublattice(&read(path)?, path.parent())
}

pub fn parse_fqs(text: &str) -> Result<FiniteQuadraticSpace> {
    let f: FqsFile = parse(text, "fixlat-fqs")?;
    FiniteQuadraticSpace::new(f.orders, rat_matrix(&f.qgram)?)
}

pub fn load_fqs(path: &Path) -> Result<FiniteQuadraticSpace> {
    parse_fqs(&read(path)?)
}

fn int_rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|i| m.row_i64(i).expect("entries fit in i64")).collect()
}

pub fn record_out(r: &OrbitRecord) -> RecordOut {
    RecordOut {
        number: r.number,
        subset: r.subset.clone(),
        rank: r.rank,
        group_order: r.group_order.to_string(),
        det: r.det.to_string(),
        alpha: r.alpha,
        extension_class_count: r.extension_class_count,
        coinvariant_root_type: r.coinvariant_root_type.as_ref().map(|t| t.to_string()),
        fingerprint: r.fingerprint.clone(),
        invariant_gram: entries(&r.invariant_gram),
        coinvariant_gram: entries(&r.coinvariant_gram),
        invariant_basis: int_rows(r.invariant.basis()),
        generators: r.stabilizer.gens().iter().map(matrix_rows).collect(),
    }
}

pub fn records_json(ambient: AmbientRef, records: &[OrbitRecord]) -> String {
    let f = RecordsFile {
        format: "fixlat-records".into(),
        version: SCHEMA_VERSION,
        ambient,
        records: records.iter().map(record_out).collect(),
    };
    serde_json::to_string_pretty(&f).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_round_trip() {
        let text = r#"{"format": "fixlat-lattice", "version": 1, "rank": 2, "gram": [[2, -1], [-1, "2"]]}"#;
        let l = parse_lattice(text).unwrap();
        assert_eq!(l.det(), Rat::from_integer(3.into()));
        let again = parse_lattice(&lattice_json(&l)).unwrap();
        assert_eq!(again.gram(), l.gram());
        let half = r#"{"format": "fixlat-lattice", "version": 1, "rank": 1, "gram": [["1/2"]]}"#;
        assert_eq!(parse_lattice(half).unwrap().gram().get(0, 0), &Rat::new(1.into(), 2.into()));
    }

    #[test]
    fn errors_carry_positions() {
        let bad = "{\"format\": \"fixlat-lattice\",\n \"version\": 1,\n \"rank\": 1,\n \"gram\": [[2,]]}";
        match parse_lattice(bad) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 4);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
        let wrong = r#"{"format": "fixlat-group", "version": 1}"#;
        assert!(matches!(parse_lattice(wrong), Err(Error::Parse { .. })));
        let asym = r#"{"format": "fixlat-lattice", "version": 1, "rank": 2, "gram": [[2, 1], [0, 2]]}"#;
        assert_eq!(parse_lattice(asym).unwrap_err(), Error::NotSymmetric);
    }

    #[test]
    fn group_file() {
        let text = r#"{"format": "fixlat-group", "version": 1, "ambient": {"gram": [[2, -1], [-1, 2]]},
            "generators": [[[-1, 0], [0, -1]]]}"#;
        let g = parse_group(text, None).unwrap();
        assert_eq!(g.order(), 2);
        let bad = r#"{"format": "fixlat-group", "version": 1, "ambient": {"gram": [[2, -1], [-1, 2]]},
            "generators": [[[1, 1], [0, 1]]]}"#;
        assert_eq!(parse_group(bad, None).unwrap_err(), Error::NotGramPreserving);
    }
}
