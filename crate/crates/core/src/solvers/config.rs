use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Randomized Kaczmarz with adaptive stepsizes.
    Rkas,
    /// Relaxed randomized Kaczmarz with a fixed stepsize.
    Rk,
    /// Randomized extended Kaczmarz.
    Rek,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rkas => "rkas",
            Method::Rk => "rk",
            Method::Rek => "rek",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rkas" => Ok(Method::Rkas),
            "rk" => Ok(Method::Rk),
            "rek" => Ok(Method::Rek),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

/// Default stopping threshold on the relative solution error.
pub const DEFAULT_RSE_TOL: f64 = 1e-12;

/// Fields missing from JSON take the values of [`SolverConfig::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub method: Method,
    /// Fixed stepsize, RK only. Must lie in (0, 2).
    pub lambda: f64,
    /// RKAS only: precompute `A Aᵀ` instead of forming columns on the fly.
    pub store_gram: bool,
    pub seed: u64,
    /// Stream id, typically the trial index. Row and column samplers derive
    /// their own sub-streams from it.
    pub stream: u64,
    pub max_iters: u64,
    pub rse_tol: f64,
    /// Evaluate the stopping rule (and emit a record) every this many
    /// iterations.
    pub check_every: u64,
    /// RKAS only: recompute `r = Ax − b` exactly every this many iterations.
    pub residual_refresh_every: Option<u64>,
    /// Also report `‖Ax − A A†b‖²` for RK and REK records (one product per
    /// record). RKAS always reports it since it is available from `r`.
    pub track_residual: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::new(Method::Rkas)
    }
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            lambda: 1.0,
            store_gram: true,
            seed: 0,
            stream: 0,
            max_iters: 1_000_000,
            rse_tol: DEFAULT_RSE_TOL,
            check_every: 1,
            residual_refresh_every: None,
            track_residual: false,
        }
    }

    pub fn rkas() -> Self {
        Self::new(Method::Rkas)
    }

    pub fn rk(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::new(Method::Rk)
        }
    }

    pub fn rek() -> Self {
        Self::new(Method::Rek)
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn store_gram(mut self, on: bool) -> Self {
        self.store_gram = on;
        self
    }

    pub fn max_iters(mut self, n: u64) -> Self {
        self.max_iters = n;
        self
    }

    pub fn rse_tol(mut self, tol: f64) -> Self {
        self.rse_tol = tol;
        self
    }

    pub fn check_every(mut self, n: u64) -> Self {
        self.check_every = n;
        self
    }

    pub fn residual_refresh_every(mut self, n: Option<u64>) -> Self {
        self.residual_refresh_every = n;
        self
    }

    pub fn track_residual(mut self, on: bool) -> Self {
        self.track_residual = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.method == Method::Rk {
            check_lambda(self.lambda)?;
        }
        if !(self.rse_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("rse_tol must be positive, got {}", self.rse_tol)));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        if self.check_every < 1 {
            return Err(Error::InvalidParameter("check_every must be at least 1".into()));
        }
        if self.residual_refresh_every == Some(0) {
            return Err(Error::InvalidParameter("residual_refresh_every must be at least 1".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("stepsize must lie in (0, 2), got {lambda}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SolverConfig::rk(0.0).validate().is_err());
        assert!(SolverConfig::rk(2.0).validate().is_err());
        assert!(SolverConfig::rk(1.5).validate().is_ok());
        assert!(SolverConfig::rkas().rse_tol(0.0).validate().is_err());
        assert!(SolverConfig::rkas().max_iters(0).validate().is_err());
        assert!(SolverConfig::rkas().check_every(0).validate().is_err());
        assert!(SolverConfig::rkas().residual_refresh_every(Some(0)).validate().is_err());
        // lambda is ignored outside RK
        let mut c = SolverConfig::rkas();
        c.lambda = 7.0;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Rkas, Method::Rk, Method::Rek] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("sgd".parse::<Method>().is_err());
    }
}
