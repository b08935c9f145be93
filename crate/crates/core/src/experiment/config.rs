use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::covering::SearchConfig;
use crate::error::{Error, Result};
use crate::experiment::generators::{generate_body, GeneratorSpec};
use crate::geometry::{BodyJson, ConvexBody, Sign};
use crate::rational::{ratio, serde_rational, Rational};

/// Where a body comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BodySource {
    /// `{"spec": "cube(2)"}`.
    Spec { spec: String },
    Generator(GeneratorSpec),
    File { file: PathBuf },
    Points(BodyJson),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedBody {
    pub name: String,
    #[serde(flatten)]
    pub source: BodySource,
}

fn plus() -> Sign {
    Sign::Plus
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Query {
    LambdaOf {
        body: String,
        n: usize,
        #[serde(default = "plus")]
        sign: Sign,
        #[serde(default, with = "opt_rational")]
        tol: Option<Rational>,
    },
    CoveringNumber {
        body: String,
        #[serde(with = "serde_rational")]
        lambda: Rational,
        #[serde(default = "plus")]
        sign: Sign,
        #[serde(default)]
        max_n: Option<usize>,
    },
    Bounds {
        body: String,
        #[serde(with = "serde_rational")]
        lambda: Rational,
        #[serde(default = "plus")]
        sign: Sign,
    },
    /// Cover `k` with `n` copies at `lambda`, sandwich `l` against `k`
    /// within the slack allowed by `epsilon`, and carry the cover over.
    Transfer {
        k: String,
        l: String,
        n: usize,
        #[serde(with = "serde_rational")]
        lambda: Rational,
        #[serde(with = "serde_rational")]
        epsilon: Rational,
        #[serde(default = "plus")]
        sign: Sign,
    },
    Bm {
        l: String,
        k: String,
    },
}

impl Query {
    pub fn kind(&self) -> &'static str {
        match self {
            Query::LambdaOf { .. } => "lambda_of",
            Query::CoveringNumber { .. } => "covering_number",
            Query::Bounds { .. } => "bounds",
            Query::Transfer { .. } => "transfer",
            Query::Bm { .. } => "bm",
        }
    }

    pub fn bodies(&self) -> Vec<&str> {
        match self {
            Query::LambdaOf { body, .. } | Query::CoveringNumber { body, .. } | Query::Bounds { body, .. } => {
                vec![body]
            }
            Query::Transfer { k, l, .. } | Query::Bm { k, l } => vec![k, l],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    #[serde(with = "serde_rational")]
    pub tol: Rational,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { tol: ratio(1, 100) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    pub search: SearchConfig,
    pub witness_nodes: usize,
    pub max_witnesses: usize,
    pub max_probes: usize,
    pub max_n: usize,
    /// Vertex-correspondence maps tried per sandwich search.
    pub sandwich_candidates: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            search: SearchConfig::default(),
            witness_nodes: 200_000,
            max_witnesses: 12,
            max_probes: 40,
            max_n: 16,
            sandwich_candidates: 2000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Output {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub bodies: Vec<NamedBody>,
    pub queries: Vec<Query>,
    pub tolerances: Tolerances,
    pub budgets: Budgets,
    pub seed: u64,
    pub output: Output,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Body named `name`, or `name` itself read as a generator spec.
    pub fn resolve(&self, name: &str) -> Result<ConvexBody> {
        match self.bodies.iter().find(|b| b.name == name) {
            Some(b) => load_body(&b.source, self.seed),
            None => generate_body(&name.parse()?, self.seed),
        }
    }
}

pub fn load_body(source: &BodySource, seed: u64) -> Result<ConvexBody> {
    match source {
        BodySource::Spec { spec } => generate_body(&spec.parse()?, seed),
        BodySource::Generator(g) => generate_body(g, seed),
        BodySource::File { file } => {
            let text = std::fs::read_to_string(file)?;
            let json: BodyJson = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            ConvexBody::from_json(&json)
        }
        BodySource::Points(json) => ConvexBody::from_json(json),
    }
}

mod opt_rational {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::rational::{Rational, Q};

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        q.clone().map(Q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Ok(Option::<Q>::deserialize(d)?.map(|q| q.0))
    }
}
