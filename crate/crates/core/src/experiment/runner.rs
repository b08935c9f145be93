use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bounds::BoundReport;
use crate::covering::{covering_number_upper, lambda_of, search_cover, CoveringNumberConfig, LambdaConfig, SearchOutcome};
use crate::error::{Error, Result};
use crate::experiment::certificate::Certificate;
use crate::experiment::config::{ExperimentConfig, Query};
use crate::geometry::ConvexBody;
use crate::rational::{format_rational, Rational};
use crate::stability::{bm_upper_bound, delta_for_epsilon, grid_candidates, transfer_cover, vertex_candidates, Sandwich};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

/// Scalar summary of a record; the CSV columns.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scalars {
    pub n: Option<usize>,
    pub lambda: Option<String>,
    pub lo: Option<String>,
    pub hi: Option<String>,
    pub upper: Option<usize>,
    pub factor: Option<String>,
    pub certified: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub index: usize,
    pub kind: String,
    pub bodies: Vec<String>,
    pub status: Status,
    pub scalars: Scalars,
    pub output: serde_json::Value,
    pub certificates: Vec<Certificate>,
    pub error: Option<String>,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub records: Vec<Record>,
    pub bound_table: Vec<BoundReport>,
    pub wall_ms: u64,
}

impl Report {
    pub fn has_errors(&self) -> bool {
        self.records.iter().any(|r| r.status == Status::Error)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per record, scalar fields only.
    pub fn to_csv(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            index: usize,
            kind: &'a str,
            bodies: String,
            status: Status,
            n: Option<usize>,
            lambda: Option<&'a str>,
            lo: Option<&'a str>,
            hi: Option<&'a str>,
            upper: Option<usize>,
            factor: Option<&'a str>,
            certified: Option<bool>,
            error: Option<&'a str>,
            wall_ms: u64,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            let s = &r.scalars;
            w.serialize(Row {
                index: r.index,
                kind: &r.kind,
                bodies: r.bodies.join(";"),
                status: r.status,
                n: s.n,
                lambda: s.lambda.as_deref(),
                lo: s.lo.as_deref(),
                hi: s.hi.as_deref(),
                upper: s.upper,
                factor: s.factor.as_deref(),
                certified: s.certified,
                error: r.error.as_deref(),
                wall_ms: r.wall_ms,
            })
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        if bytes.is_empty() {
            return Ok("index,kind,bodies,status,n,lambda,lo,hi,upper,factor,certified,error,wall_ms\n".into());
        }
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

struct Done {
    scalars: Scalars,
    output: serde_json::Value,
    certificates: Vec<Certificate>,
    bound_row: Option<BoundReport>,
}

fn q(x: &Rational) -> String {
    format_rational(x)
}

fn lambda_config(cfg: &ExperimentConfig, sign: crate::geometry::Sign, tol: Option<&Rational>) -> LambdaConfig {
    LambdaConfig {
        tol: tol.cloned().unwrap_or_else(|| cfg.tolerances.tol.clone()),
        sign,
        max_probes: cfg.budgets.max_probes,
        witness_budget: cfg.budgets.witness_nodes,
        max_witnesses: cfg.budgets.max_witnesses,
        search: cfg.budgets.search.clone(),
    }
}

/// Tightest sandwich over vertex correspondences and a small grid of linear maps.
pub fn best_sandwich(l: &ConvexBody, k: &ConvexBody, limit: usize) -> Result<Sandwich> {
    let mut candidates = vertex_candidates(l, k, limit);
    candidates.extend(grid_candidates(l.dim()));
    let cap = Rational::from_integer(BigInt::from(u64::MAX));
    bm_upper_bound(l, k, &candidates, &cap)
}

fn run_query(cfg: &ExperimentConfig, query: &Query) -> Result<Done> {
    match query {
        Query::LambdaOf { body, n, sign, tol } => {
            let k = cfg.resolve(body)?;
            let b = lambda_of(&k, *n, &lambda_config(cfg, *sign, tol.as_ref()))?;
            let probes: Vec<_> = b.probes.iter().map(|p| json!({"lambda": q(&p.lambda), "outcome": p.outcome})).collect();
            Ok(Done {
                scalars: Scalars {
                    n: Some(*n),
                    lo: Some(q(&b.lo)),
                    hi: Some(q(&b.hi)),
                    certified: Some(b.converged),
                    ..Scalars::default()
                },
                output: json!({
                    "n": n, "sign": sign, "lo": q(&b.lo), "hi": q(&b.hi),
                    "converged": b.converged, "lower_proof": b.lo_proof.is_some(), "probes": probes,
                }),
                certificates: vec![Certificate::from_bracket(&k, &b)],
                bound_row: None,
            })
        }
        Query::CoveringNumber { body, lambda, sign, max_n } => {
            let k = cfg.resolve(body)?;
            let c = CoveringNumberConfig {
                max_n: max_n.unwrap_or(cfg.budgets.max_n),
                search: cfg.budgets.search.clone(),
            };
            let res = covering_number_upper(&k, lambda, *sign, &c)?;
            let bound_row = if k.dim() >= 2 { Some(BoundReport::new(&k, lambda, *sign, Some(res.n))?) } else { None };
            Ok(Done {
                scalars: Scalars {
                    lambda: Some(q(lambda)),
                    upper: Some(res.n),
                    certified: Some(true),
                    ..Scalars::default()
                },
                output: json!({
                    "lambda": q(lambda), "sign": sign, "upper": res.n,
                    "volume_lower_bound": res.volume_lower_bound,
                    "homothety_bound": bound_row.as_ref().map(|r| r.homothety_bound),
                    "order": bound_row.as_ref().map(|r| r.order),
                }),
                certificates: vec![Certificate::from_cover(&k, &res.cover, &res.cells)],
                bound_row,
            })
        }
        Query::Bounds { body, lambda, sign } => {
            let k = cfg.resolve(body)?;
            let row = BoundReport::new(&k, lambda, *sign, None)?;
            Ok(Done {
                scalars: Scalars { lambda: Some(q(lambda)), ..Scalars::default() },
                output: serde_json::to_value(&row)?,
                certificates: vec![],
                bound_row: Some(row),
            })
        }
        Query::Transfer { k, l, n, lambda, epsilon, sign } => {
            let kb = cfg.resolve(k)?;
            let lb = cfg.resolve(l)?;
            let budget = delta_for_epsilon(lambda, epsilon)?;
            let SearchOutcome::Found { cover, cells } = search_cover(&kb, *n, lambda, *sign, &cfg.budgets.search)? else {
                return Err(Error::BudgetExceeded(format!("no certified cover of {k} by {n} copies")));
            };
            let best = best_sandwich(&lb, &kb, cfg.budgets.sandwich_candidates)?;
            if best.factor > budget.max_factor() {
                return Err(Error::DomainError(format!(
                    "best sandwich factor {} exceeds 1 + delta = {}",
                    best.factor,
                    budget.max_factor()
                )));
            }
            let sandwich = best.with_factor(budget.max_factor())?;
            let t = transfer_cover(&cover, &sandwich, cfg.budgets.search.max_depth)?;
            let certified = t.result.is_covered();
            let mut certificates = vec![Certificate::Sandwich(best.to_json())];
            certificates.extend(Certificate::from_transfer(&cover, &cells, &sandwich, &t));
            Ok(Done {
                scalars: Scalars {
                    n: Some(*n),
                    lambda: Some(q(lambda)),
                    upper: Some(t.cover.len()),
                    factor: Some(q(&best.factor)),
                    certified: Some(certified),
                    ..Scalars::default()
                },
                output: json!({
                    "lambda": q(lambda), "epsilon": q(epsilon), "delta": q(&budget.delta),
                    "delta_sup": q(&budget.delta_sup), "factor": q(&best.factor),
                    "transferred_ratio": q(t.cover.ratio()), "certified": certified,
                }),
                certificates,
                bound_row: None,
            })
        }
        Query::Bm { l, k } => {
            let lb = cfg.resolve(l)?;
            let kb = cfg.resolve(k)?;
            let s = best_sandwich(&lb, &kb, cfg.budgets.sandwich_candidates)?;
            Ok(Done {
                scalars: Scalars { factor: Some(q(&s.factor)), ..Scalars::default() },
                output: json!({"factor": q(&s.factor), "a": s.a.iter().map(q).collect::<Vec<_>>()}),
                certificates: vec![Certificate::Sandwich(s.to_json())],
                bound_row: None,
            })
        }
    }
}

/// Runs every query (in parallel) and assembles the report in config order.
/// Query failures become error records.
pub fn run_experiment(config: &ExperimentConfig) -> Report {
    let start = Instant::now();
    let results: Vec<(Record, Option<BoundReport>)> = config
        .queries
        .par_iter()
        .enumerate()
        .map(|(index, query)| {
            let t0 = Instant::now();
            let res = run_query(config, query);
            let wall_ms = t0.elapsed().as_millis() as u64;
            let bodies = query.bodies().into_iter().map(String::from).collect();
            match res {
                Ok(done) => (
                    Record {
                        index,
                        kind: query.kind().into(),
                        bodies,
                        status: Status::Ok,
                        scalars: done.scalars,
                        output: done.output,
                        certificates: done.certificates,
                        error: None,
                        wall_ms,
                    },
                    done.bound_row,
                ),
                Err(e) => (
                    Record {
                        index,
                        kind: query.kind().into(),
                        bodies,
                        status: Status::Error,
                        scalars: Scalars::default(),
                        output: serde_json::Value::Null,
                        certificates: vec![],
                        error: Some(e.to_string()),
                        wall_ms,
                    },
                    None,
                ),
            }
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    let mut bound_table = Vec::new();
    for (r, row) in results {
        records.push(r);
        bound_table.extend(row);
    }
    Report {
        tool: "homcover".into(),
        version: VERSION.into(),
        config: config.clone(),
        records,
        bound_table,
        wall_ms: start.elapsed().as_millis() as u64,
    }
}
