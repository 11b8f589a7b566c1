//! Job documents and the per-operation parameter schemas.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tate_forge::dglie::DgLieAlgebra;
use tate_forge::diagram::Subset;
use tate_forge::loopspace::ColimMode;
use tate_forge::tate::{Direction, Lattice};
use tate_forge::{Exact, FieldKind};

use crate::encode::{parse_matrix, parse_scalar};
use crate::{input_error, JobResult};

/// Upper limits on integer parameters.
pub mod bounds {
    pub const D: usize = 4;
    pub const POWER: u32 = 8;
    pub const WINDOW: u32 = 24;
    pub const WEIGHT: u32 = 8;
    pub const HALF_DIM: usize = 4;
    pub const CUTOFF: usize = 16;
    pub const LIE_DIM: usize = 32;
    pub const CUBE_DIM: usize = 5;
    pub const TOWER_STAGE: usize = 64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operation {
    ResiduePairing,
    KoszulComplex,
    KoszulSelfDuality,
    LocalCohomology,
    Cofinality,
    DualizeTower,
    LatticeIndex,
    LieValidate,
    CeHomology,
    CeCohomology,
    FreeLie,
    Pbw,
    EnvelopeOracle,
    CountGenerators,
    SubsetsColim,
    LoopTangent,
    BubbleFiber,
    FormalSphere,
    BubblePairing,
    Hilbert,
}

impl Operation {
    pub const ALL: [Operation; 20] = [
        Operation::ResiduePairing,
        Operation::KoszulComplex,
        Operation::KoszulSelfDuality,
        Operation::LocalCohomology,
        Operation::Cofinality,
        Operation::DualizeTower,
        Operation::LatticeIndex,
        Operation::LieValidate,
        Operation::CeHomology,
        Operation::CeCohomology,
        Operation::FreeLie,
        Operation::Pbw,
        Operation::EnvelopeOracle,
        Operation::CountGenerators,
        Operation::SubsetsColim,
        Operation::LoopTangent,
        Operation::BubbleFiber,
        Operation::FormalSphere,
        Operation::BubblePairing,
        Operation::Hilbert,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operation::ResiduePairing => "residue-pairing",
            Operation::KoszulComplex => "koszul-complex",
            Operation::KoszulSelfDuality => "koszul-self-duality",
            Operation::LocalCohomology => "local-cohomology",
            Operation::Cofinality => "cofinality",
            Operation::DualizeTower => "dualize-tower",
            Operation::LatticeIndex => "lattice-index",
            Operation::LieValidate => "lie-validate",
            Operation::CeHomology => "ce-homology",
            Operation::CeCohomology => "ce-cohomology",
            Operation::FreeLie => "free-lie",
            Operation::Pbw => "pbw",
            Operation::EnvelopeOracle => "envelope-oracle",
            Operation::CountGenerators => "count-generators",
            Operation::SubsetsColim => "subsets-colim",
            Operation::LoopTangent => "loop-tangent",
            Operation::BubbleFiber => "bubble-fiber",
            Operation::FormalSphere => "formal-sphere",
            Operation::BubblePairing => "bubble-pairing",
            Operation::Hilbert => "hilbert",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Operation::ResiduePairing => "Residue pairing matrix on k[x]/(x_i^n)",
            Operation::KoszulComplex => "Koszul complex slices and their cohomology",
            Operation::KoszulSelfDuality => "Compare Hom(K, A) with K[-k]",
            Operation::LocalCohomology => "Truncated local cohomology tower of a monomial module",
            Operation::Cofinality => "Stabilization of the Koszul colimit against a fixed power",
            Operation::DualizeTower => "Dualize an ind or pro tower",
            Operation::LatticeIndex => "Relative dimensions and determinant lines of lattices",
            Operation::LieValidate => "Check the dg-Lie axioms",
            Operation::CeHomology => "Chevalley-Eilenberg homology up to a weight",
            Operation::CeCohomology => "Chevalley-Eilenberg cohomology up to a weight",
            Operation::FreeLie => "Free graded Lie algebra dimensions",
            Operation::Pbw => "Symmetrization map into the enveloping algebra",
            Operation::EnvelopeOracle => "Enveloping-algebra model of CE homology",
            Operation::CountGenerators => "Generators of a loop-space window",
            Operation::SubsetsColim => "Homotopy colimit over the punctured cube of subsets",
            Operation::LoopTangent => "Tangent complex of the truncated loop space",
            Operation::BubbleFiber => "Cotangent of the bubble fibre product",
            Operation::FormalSphere => "Square-zero formal sphere algebra",
            Operation::BubblePairing => "Residue symplectic pairing on the bubble tangent",
            Operation::Hilbert => "Monomial counts in the loop-space coordinate ring",
        }
    }

    /// Names of the parameters this operation accepts.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            Operation::ResiduePairing => &["d", "n"],
            Operation::KoszulComplex | Operation::KoszulSelfDuality => &["d", "n", "k", "window"],
            Operation::LocalCohomology => &["d", "n_max", "window", "module"],
            Operation::Cofinality => &["d", "p", "n_max", "window"],
            Operation::DualizeTower => &["direction", "dims", "maps"],
            Operation::LatticeIndex => &["lattices"],
            Operation::LieValidate => &["lie"],
            Operation::CeHomology | Operation::Pbw | Operation::EnvelopeOracle => &["lie", "weight"],
            Operation::CeCohomology => &["lie", "weight", "coefficients"],
            Operation::FreeLie => &["degrees", "weight"],
            Operation::CountGenerators => &["d", "e", "n", "p"],
            Operation::SubsetsColim => &["d", "n", "p", "mode", "seed", "max_dim"],
            Operation::LoopTangent | Operation::BubbleFiber | Operation::FormalSphere => &["d", "n", "p"],
            Operation::BubblePairing => &["d", "m", "n", "p"],
            Operation::Hilbert => &["d", "e", "n", "p", "m", "cutoff"],
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Operation::ALL.into_iter().find(|o| o.name() == s).ok_or_else(|| format!("unknown operation {s:?}"))
    }
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

fn rational_field() -> String {
    "rational".into()
}

/// A job document: `{"operation": ..., "params": {...}, "field": ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub operation: Operation,
    #[serde(default = "empty_object")]
    pub params: Value,
    #[serde(default = "rational_field")]
    pub field: String,
    /// Seed for re-ordering bases before every reduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shuffle: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl JobSpec {
    pub fn new(operation: Operation, params: Value) -> Self {
        Self { operation, params, field: rational_field(), shuffle: None, out: None }
    }

    pub fn parse(text: &str) -> JobResult<Self> {
        serde_json::from_str(text).map_err(|e| input_error(format!("job document: {e}")))
    }

    pub fn exact(&self) -> JobResult<Exact> {
        let field: FieldKind = self.field.parse().map_err(|e| input_error(format!("--field: {e}")))?;
        let exact = match field {
            FieldKind::Rational => Exact::rational(),
            FieldKind::Prime(p) => Exact::prime(p).map_err(|e| input_error(format!("--field: {e}")))?,
        };
        Ok(match self.shuffle {
            Some(seed) => exact.with_shuffle(seed),
            None => exact,
        })
    }

    /// Sets (or replaces) one parameter; rejects it if the operation has no
    /// such parameter.
    pub fn set_param(&mut self, key: &str, value: Value) -> JobResult<()> {
        if !self.operation.params().contains(&key) {
            return Err(input_error(format!("{} takes no parameter {key:?}", self.operation)));
        }
        match &mut self.params {
            Value::Object(map) => {
                map.insert(key.to_string(), value);
                Ok(())
            }
            _ => Err(input_error("params must be an object")),
        }
    }

    /// The job as it should be echoed in a report: everything needed to
    /// reproduce it, nothing about where the report went.
    pub fn echo(&self) -> Self {
        Self { out: None, ..self.clone() }
    }
}

/// Parses a parameter object into its typed schema; unknown keys are errors.
pub fn params<T: DeserializeOwned>(job: &JobSpec) -> JobResult<T> {
    serde_json::from_value(job.params.clone()).map_err(|e| input_error(format!("{} params: {e}", job.operation)))
}

pub fn check_range<T: PartialOrd + fmt::Display>(name: &str, value: T, lo: T, hi: T) -> JobResult<T> {
    if value < lo || value > hi {
        return Err(input_error(format!("{name} = {value} is outside {lo}..={hi}")));
    }
    Ok(value)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidueParams {
    pub d: usize,
    pub n: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KoszulParams {
    pub d: usize,
    pub n: u32,
    pub k: usize,
    pub window: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalParams {
    pub d: usize,
    pub n_max: u32,
    pub window: u32,
    /// Exponent vectors of a monomial ideal; the ring itself when absent.
    #[serde(default)]
    pub module: Vec<Vec<u32>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CofinalityParams {
    pub d: usize,
    pub p: u32,
    pub n_max: u32,
    pub window: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerParams {
    pub direction: Direction,
    pub dims: Vec<usize>,
    pub maps: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub start: i64,
    pub end: i64,
    /// Rows spanning the perturbation inside `[start, end)`.
    pub rows: Vec<Vec<String>>,
}

impl LatticeSpec {
    pub fn build(&self) -> JobResult<Lattice> {
        if self.end < self.start || self.end - self.start > 64 {
            return Err(input_error(format!("lattice window [{}, {}) is reversed or wider than 64", self.start, self.end)));
        }
        let framing = parse_matrix(&self.rows, (self.end - self.start) as usize)?;
        Lattice::new(self.start, self.end, framing).map_err(|e| input_error(format!("lattice: {e}")))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeParams {
    pub lattices: Vec<LatticeSpec>,
}

/// A Lie algebra given inline or as a path to a JSON file.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum LieSource {
    Path(PathBuf),
    Inline(LieSpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub left: String,
    pub right: String,
    pub value: BTreeMap<String, String>,
}

/// `{"basis": [...], "degrees": [...], "differential": {x: {y: c}}, "brackets": [...]}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieSpec {
    pub basis: Vec<String>,
    pub degrees: Vec<i32>,
    #[serde(default)]
    pub weights: Option<Vec<u32>>,
    #[serde(default)]
    pub differential: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
}

impl LieSpec {
    pub fn build(&self) -> JobResult<DgLieAlgebra> {
        let n = self.basis.len();
        check_range("Lie algebra dimension", n, 0, bounds::LIE_DIM)?;
        if self.degrees.len() != n {
            return Err(input_error(format!("{} degrees for {n} basis elements", self.degrees.len())));
        }
        if let Some(w) = &self.weights {
            if w.len() != n {
                return Err(input_error(format!("{} weights for {n} basis elements", w.len())));
            }
        }
        let index = |l: &str| {
            self.basis.iter().position(|b| b == l).ok_or_else(|| input_error(format!("unknown basis element {l:?}")))
        };
        let mut diff = Vec::new();
        for (src, terms) in &self.differential {
            let i = index(src)?;
            for (tgt, c) in terms {
                diff.push((i, index(tgt)?, parse_scalar(c)?));
            }
        }
        let mut brackets = Vec::new();
        for b in &self.brackets {
            let (i, j) = (index(&b.left)?, index(&b.right)?);
            for (tgt, c) in &b.value {
                brackets.push((i, j, index(tgt)?, parse_scalar(c)?));
            }
        }
        DgLieAlgebra::over_field(self.basis.clone(), self.degrees.clone(), self.weights.clone(), &diff, &brackets)
            .map_err(|e| input_error(format!("Lie algebra: {e}")))
    }
}

impl LieSource {
    /// Paths are resolved against `base`.
    pub fn load(&self, base: &Path) -> JobResult<DgLieAlgebra> {
        match self {
            LieSource::Inline(spec) => spec.build(),
            LieSource::Path(p) => load_lie(&base.join(p)),
        }
    }
}

pub fn load_lie(path: &Path) -> JobResult<DgLieAlgebra> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let spec: LieSpec = serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    spec.build()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieParams {
    pub lie: LieSource,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieWeightParams {
    pub lie: LieSource,
    pub weight: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coefficients {
    #[default]
    Trivial,
    Adjoint,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CeCohomologyParams {
    pub lie: LieSource,
    pub weight: u32,
    #[serde(default)]
    pub coefficients: Coefficients,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeLieParams {
    pub degrees: Vec<i32>,
    pub weight: u32,
}

/// `E` as 1-based indices into `{1..d}`.
pub fn subset_from(e: &[usize], d: usize) -> JobResult<Subset> {
    let mut mask = 0;
    for &i in e {
        if i == 0 || i > d {
            return Err(input_error(format!("subset element {i} is not in 1..={d}")));
        }
        mask |= 1 << (i - 1);
    }
    Ok(mask)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountParams {
    pub d: usize,
    #[serde(default)]
    pub e: Vec<usize>,
    pub n: u32,
    pub p: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColimParams {
    pub d: usize,
    #[serde(default = "nonempty_mode")]
    pub mode: ColimMode,
    /// Window family parameters.
    pub n: Option<u32>,
    pub p: Option<u32>,
    /// Random family instead of windows.
    pub seed: Option<u64>,
    pub max_dim: Option<usize>,
}

fn nonempty_mode() -> ColimMode {
    ColimMode::NonemptyD
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopParams {
    pub d: usize,
    pub n: u32,
    pub p: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingParams {
    pub d: usize,
    pub m: usize,
    pub n: u32,
    /// Defaults to `n`.
    pub p: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertParams {
    pub d: usize,
    #[serde(default)]
    pub e: Vec<usize>,
    pub n: u32,
    pub p: u32,
    pub m: u32,
    pub cutoff: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn unknown_keys_rejected() {
        assert!(JobSpec::parse(r#"{"operation": "residue-pairing", "params": {}, "colour": 1}"#).is_err());
        let job = JobSpec::parse(r#"{"operation": "residue-pairing", "params": {"d": 1, "n": 2, "x": 0}}"#).unwrap();
        assert!(params::<ResidueParams>(&job).is_err());
        assert!(JobSpec::parse(r#"{"operation": "nope"}"#).is_err());
    }

    #[test]
    fn operation_names_round_trip() {
        for op in Operation::ALL {
            assert_eq!(op.name().parse::<Operation>().unwrap(), op);
            assert_eq!(serde_json::to_value(op).unwrap(), json!(op.name()));
        }
    }

    #[test]
    fn field_choice() {
        let mut job = JobSpec::new(Operation::ResiduePairing, json!({}));
        assert_eq!(job.exact().unwrap().field, FieldKind::Rational);
        job.field = "fp:7".into();
        assert_eq!(job.exact().unwrap().field, FieldKind::Prime(7));
        job.field = "fp:8".into();
        assert!(job.exact().is_err());
    }

    #[test]
    fn inline_lie_algebra() {
        let spec: LieSpec = serde_json::from_value(json!({
            "basis": ["x", "y"],
            "degrees": [1, 0],
            "differential": {"y": {"x": "1"}}
        }))
        .unwrap();
        let l = spec.build().unwrap();
        assert_eq!(l.dim(), 2);
        l.validate().unwrap();
    }

    #[test]
    fn parameter_overrides_checked() {
        let mut job = JobSpec::new(Operation::ResiduePairing, json!({"d": 1, "n": 1}));
        assert!(job.set_param("window", json!(3)).is_err());
        job.set_param("n", json!(2)).unwrap();
        assert_eq!(job.params["n"], json!(2));
    }

    #[test]
    fn subsets_are_one_based() {
        assert_eq!(subset_from(&[1, 3], 3).unwrap(), 0b101);
        assert!(subset_from(&[0], 3).is_err());
        assert!(subset_from(&[4], 3).is_err());
    }
}
