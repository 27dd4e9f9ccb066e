use std::path::{Path, PathBuf};

use rkas::problems::{make_rhs, read_matrix_market, ProblemFile};
use rkas::solvers::{Method, SolverConfig};
use rkas::{analyze, GroundTruth, LinearSystem, ProblemKind, ProblemSpec, Result};
use serde::{Deserialize, Serialize};

/// A set of solver configurations to compare over many seeded trials on
/// one problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub problem: ProblemSpec,
    pub methods: Vec<SolverConfig>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Trial `t` of every method runs with this seed on stream `t`.
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub record_flops: bool,
}

pub const DEFAULT_TRIALS: u64 = 50;

fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

impl ExperimentPlan {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|source| rkas::Error::Container {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(rkas::Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(rkas::Error::InvalidParameter("plan has no methods".into()));
        }
        for m in &self.methods {
            m.validate()?;
        }
        Ok(())
    }

    /// The configuration trial `trial` of method `k` runs with.
    pub fn trial_config(&self, k: usize, trial: u64) -> SolverConfig {
        self.methods[k].clone().seed(self.master_seed).stream(trial)
    }
}

/// Short label distinguishing stored and unstored RKAS.
pub fn method_label(cfg: &SolverConfig) -> String {
    match cfg.method {
        Method::Rkas if !cfg.store_gram => "rkas-unstored".into(),
        Method::Rk => format!("rk(λ={})", cfg.lambda),
        m => m.name().into(),
    }
}

/// A loaded problem with its ground truth.
pub struct Instance {
    pub sys: LinearSystem,
    pub gt: GroundTruth,
    pub spec: Option<ProblemSpec>,
    pub source: String,
}

impl Instance {
    pub fn new(sys: LinearSystem, spec: Option<ProblemSpec>, source: impl Into<String>) -> Result<Self> {
        let gt = analyze(sys.a(), sys.b())?;
        Ok(Self {
            sys,
            gt,
            spec,
            source: source.into(),
        })
    }

    pub fn generate(spec: &ProblemSpec) -> Result<Self> {
        let source = match &spec.kind {
            ProblemKind::FromFile { path } => path.display().to_string(),
            _ => "generated".into(),
        };
        Self::new(spec.build()?, Some(spec.clone()), source)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = ProblemFile::load(path)?;
        let spec = file.spec.clone();
        Self::new(file.into_system()?, spec, path.display().to_string())
    }

    /// A Matrix Market matrix with a generated right-hand side.
    pub fn from_mtx(path: PathBuf, seed: u64, consistent: bool, ratio: f64) -> Result<Self> {
        let a = read_matrix_market(&path)?;
        let spec = ProblemSpec::new(ProblemKind::FromFile { path: path.clone() }, seed, consistent).residual_ratio(ratio);
        let a = a.into();
        let rhs = make_rhs(&a, seed, consistent, ratio)?;
        let sys = LinearSystem::new(a, rhs.b)?.with_planted(rhs.planted_x, rhs.planted_r)?;
        Self::new(sys, Some(spec), path.display().to_string())
    }
}
