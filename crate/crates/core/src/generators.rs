//! Seeded instance families.
//!
//! Both families draw from one [`SplitMix64`] stream seeded with the spec's
//! seed: first the operator entries in index order, then the `n` entries of
//! `b`, each uniform on `[0, b_scale)`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{EigenBounds, LinearOperator};
use crate::problem::QuadraticProblem;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    DiagonalIllConditioned,
    DenseRankOne,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::DiagonalIllConditioned => "diag",
            Family::DenseRankOne => "dense",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalParams {
    pub first: f64,
    pub last: f64,
    /// Interior entries are integers drawn uniformly from `[lo, hi]`.
    pub lo: i64,
    pub hi: i64,
}

impl Default for DiagonalParams {
    fn default() -> Self {
        Self {
            first: 1.0,
            last: 50_000.0,
            lo: 10,
            hi: 49_900,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenseParams {
    pub sigma: f64,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl Default for DenseParams {
    fn default() -> Self {
        Self {
            sigma: 10.0,
            v_lo: 0.0,
            v_hi: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FamilyParams {
    Diagonal(DiagonalParams),
    Dense(DenseParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub b_scale: f64,
    pub params: FamilyParams,
}

pub const DEFAULT_B_SCALE: f64 = 1000.0;

impl InstanceSpec {
    pub fn diagonal(n: usize, seed: u64) -> Self {
        Self {
            family: Family::DiagonalIllConditioned,
            n,
            seed,
            b_scale: DEFAULT_B_SCALE,
            params: FamilyParams::Diagonal(DiagonalParams::default()),
        }
    }

    pub fn dense_rank_one(n: usize, seed: u64) -> Self {
        Self {
            family: Family::DenseRankOne,
            n,
            seed,
            b_scale: DEFAULT_B_SCALE,
            params: FamilyParams::Dense(DenseParams::default()),
        }
    }

    pub fn with_b_scale(mut self, b_scale: f64) -> Self {
        self.b_scale = b_scale;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("instance dimension must be positive".into()));
        }
        if !(self.b_scale.is_finite() && self.b_scale > 0.0) {
            return Err(Error::InvalidArgument(format!("b_scale = {} must be positive", self.b_scale)));
        }
        Ok(())
    }
}

/// Sidecar metadata, one JSON object per instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetadata {
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub condition_number: f64,
    pub b_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub problem: QuadraticProblem,
    pub bounds: EigenBounds,
    pub metadata: InstanceMetadata,
}

impl Instance {
    fn new(spec: &InstanceSpec, problem: QuadraticProblem) -> Result<Self> {
        let bounds = problem.eigen_bounds()?;
        let metadata = InstanceMetadata {
            family: spec.family.name().to_string(),
            n: spec.n,
            seed: spec.seed,
            condition_number: bounds.condition_number().unwrap_or(f64::NAN),
            b_scale: spec.b_scale,
        };
        Ok(Self {
            problem,
            bounds,
            metadata,
        })
    }
}

pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    match spec.family {
        Family::DiagonalIllConditioned => gen_diagonal(spec),
        Family::DenseRankOne => gen_dense_rank_one(spec),
    }
}

/// Diagonal operator with fixed first and last entries and uniform integer
/// interior entries.
pub fn gen_diagonal(spec: &InstanceSpec) -> Result<Instance> {
    spec.validate()?;
    let params = match (spec.family, spec.params) {
        (Family::DiagonalIllConditioned, FamilyParams::Diagonal(p)) => p,
        _ => return Err(Error::InvalidArgument("spec is not a diagonal instance".into())),
    };
    if spec.n < 2 {
        return Err(Error::InvalidArgument("diagonal instances need n >= 2".into()));
    }
    let mut rng = SplitMix64::new(spec.seed);
    let mut diag = Vec::with_capacity(spec.n);
    diag.push(params.first);
    for _ in 1..spec.n - 1 {
        diag.push(rng.int_inclusive(params.lo, params.hi) as f64);
    }
    diag.push(params.last);
    let b = rng.vector(spec.n, 0.0, spec.b_scale);
    let problem = QuadraticProblem::new(LinearOperator::diagonal(diag)?, b, 0.0)?;
    Instance::new(spec, problem)
}

/// `v v^T + sigma I` with `v` uniform on `[v_lo, v_hi)`.
pub fn gen_dense_rank_one(spec: &InstanceSpec) -> Result<Instance> {
    spec.validate()?;
    let params = match (spec.family, spec.params) {
        (Family::DenseRankOne, FamilyParams::Dense(p)) => p,
        _ => return Err(Error::InvalidArgument("spec is not a dense rank-one instance".into())),
    };
    let mut rng = SplitMix64::new(spec.seed);
    let v = rng.vector(spec.n, params.v_lo, params.v_hi);
    let b = rng.vector(spec.n, 0.0, spec.b_scale);
    let problem = QuadraticProblem::new(LinearOperator::rank_one(v, params.sigma)?, b, 0.0)?;
    Instance::new(spec, problem)
}

/// Rank-one instance with a caller-chosen `v`; `b` is still drawn from the
/// spec's seed.
pub fn dense_rank_one_with_v(spec: &InstanceSpec, v: Vec<f64>) -> Result<Instance> {
    spec.validate()?;
    let sigma = match spec.params {
        FamilyParams::Dense(p) => p.sigma,
        FamilyParams::Diagonal(_) => DenseParams::default().sigma,
    };
    if v.len() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            actual: v.len(),
        });
    }
    let mut rng = SplitMix64::new(spec.seed);
    let b = rng.vector(spec.n, 0.0, spec.b_scale);
    let problem = QuadraticProblem::new(LinearOperator::rank_one(v, sigma)?, b, 0.0)?;
    Instance::new(spec, problem)
}

pub use crate::io::load_problem;

pub fn write_metadata_jsonl<W: Write>(records: &[InstanceMetadata], mut out: W) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}
