use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use super::config::{check_lambda, Method, SolverConfig};
use super::gram::{GramScratch, StoredGram};
use crate::error::{Error, Result};
use crate::flops::{NoCount, OpCounter};
use crate::linalg::{dist_sq, kernels};
use crate::problems::LinearSystem;
use crate::sampling::DiscreteSampler;

/// Iterate and auxiliary vectors of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    /// Current iterate `x^k`.
    pub x: Vec<f64>,
    /// Maintained residual `r^k = A x^k − b` (RKAS only).
    pub r: Option<Vec<f64>>,
    /// Auxiliary vector `z^k` (REK only).
    pub z: Option<Vec<f64>>,
    /// Iterations performed.
    pub k: u64,
}

#[derive(Debug)]
enum GramSource<'a> {
    Stored(Cow<'a, StoredGram>),
    OnTheFly(GramScratch),
    Unused,
}

/// A single run of one method on one system.
///
/// Construction performs the method's setup (norms, samplers and, for RKAS
/// with `store_gram`, the Gram matrix unless the system already carries
/// one) and charges its arithmetic to the counter's initialization phase.
/// The iterate starts at `x⁰ = 0`, with `r⁰ = −b` for RKAS and `z⁰ = b` for
/// REK.
pub struct Solver<'a, C: OpCounter = NoCount> {
    sys: &'a LinearSystem,
    cfg: SolverConfig,
    row_norms: Vec<f64>,
    col_norms: Vec<f64>,
    gram: GramSource<'a>,
    rows: DiscreteSampler,
    cols: Option<DiscreteSampler>,
    state: SolverState,
    ops: C,
}

impl<'a> Solver<'a, NoCount> {
    pub fn new(sys: &'a LinearSystem, cfg: SolverConfig) -> Result<Self> {
        Self::with_counter(sys, cfg, NoCount)
    }
}

impl<'a, C: OpCounter> Solver<'a, C> {
    pub fn with_counter(sys: &'a LinearSystem, cfg: SolverConfig, mut ops: C) -> Result<Self> {
        cfg.validate()?;
        let a = sys.csr();
        let row_norms = a.row_sq_norms_with(&mut ops)?;
        let col_norms = if cfg.method == Method::Rek {
            sys.csc().row_sq_norms_with(&mut ops).map_err(|e| match e {
                Error::ZeroRow(j) => Error::ZeroColumn(j),
                other => other,
            })?
        } else {
            Vec::new()
        };
        let gram = match (cfg.method, cfg.store_gram) {
            (Method::Rkas, true) => match sys.gram() {
                Some(g) => GramSource::Stored(Cow::Borrowed(g)),
                None => GramSource::Stored(Cow::Owned(StoredGram::build(a, &mut ops))),
            },
            (Method::Rkas, false) => GramSource::OnTheFly(GramScratch::new(a.nrows())),
            _ => GramSource::Unused,
        };
        let stream = cfg.stream.wrapping_mul(2);
        let rows = DiscreteSampler::with_stream(&row_norms, cfg.seed, stream)?;
        let cols = if cfg.method == Method::Rek {
            Some(DiscreteSampler::with_stream(&col_norms, cfg.seed, stream.wrapping_add(1))?)
        } else {
            None
        };
        let b = sys.b();
        let state = SolverState {
            x: vec![0.0; a.ncols()],
            r: (cfg.method == Method::Rkas).then(|| b.iter().map(|v| -v).collect()),
            z: (cfg.method == Method::Rek).then(|| b.to_vec()),
            k: 0,
        };
        ops.begin_iterations();
        Ok(Self {
            sys,
            cfg,
            row_norms,
            col_norms,
            gram,
            rows,
            cols,
            state,
            ops,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn system(&self) -> &'a LinearSystem {
        self.sys
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn counter(&self) -> &C {
        &self.ops
    }

    pub fn into_parts(self) -> (SolverState, C) {
        (self.state, self.ops)
    }

    /// Replace the starting point. The maintained residual is recomputed
    /// exactly; `z` and the iteration count are left alone.
    pub fn set_initial(&mut self, x0: Vec<f64>) -> Result<()> {
        if x0.len() != self.sys.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "initial point has length {}, system has {} unknowns",
                x0.len(),
                self.sys.ncols()
            )));
        }
        crate::linalg::check_finite(&x0)?;
        self.state.x = x0;
        if self.state.r.is_some() {
            self.state.r = Some(self.exact_residual());
        }
        Ok(())
    }

    fn exact_residual(&self) -> Vec<f64> {
        let ax = self.sys.csr().matvec(&self.state.x).expect("dimensions checked");
        ax.iter().zip(self.sys.b()).map(|(p, q)| p - q).collect()
    }

    /// Recompute `r = Ax − b` from scratch (RKAS only; a no-op otherwise).
    pub fn refresh_residual(&mut self) {
        if self.state.r.is_none() {
            return;
        }
        let a = self.sys.csr();
        let b = self.sys.b();
        let mut r = Vec::with_capacity(a.nrows());
        for (i, &bi) in b.iter().enumerate() {
            let (idx, vals) = a.row(i);
            let v = kernels::sparse_dense_dot(idx, vals, &self.state.x, &mut self.ops);
            self.ops.flop();
            r.push(v - bi);
        }
        self.state.r = Some(r);
    }

    /// `‖r − (Ax − b)‖₂`, the accumulated drift of the maintained residual.
    pub fn residual_drift(&self) -> Option<f64> {
        let r = self.state.r.as_ref()?;
        Some(dist_sq(r, &self.exact_residual()).sqrt())
    }

    fn check_row(&self, i: usize) -> Result<()> {
        let m = self.sys.nrows();
        if i < m {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, limit: m })
        }
    }

    /// One RKAS iteration on row `i`:
    /// `α = ⟨A A_{i,:}ᵀ, r⟩ / ‖A A_{i,:}ᵀ‖²`, `x ← x − α A_{i,:}ᵀ`,
    /// `r ← r − α A A_{i,:}ᵀ`. Returns `α`.
    pub fn rkas_step(&mut self, i: usize) -> Result<f64> {
        self.check_row(i)?;
        let Some(r) = self.state.r.as_mut() else {
            return Err(Error::InvalidParameter("solver is not configured for RKAS".into()));
        };
        let ops = &mut self.ops;
        let a = self.sys.csr();
        let alpha = match &mut self.gram {
            GramSource::Stored(g) => {
                let (idx, vals) = g.column(i);
                let dot = kernels::sparse_dense_dot(idx, vals, r, ops);
                let alpha = dot / g.column_norm_sq(i);
                ops.flop();
                kernels::sparse_axpy_sub(r, alpha, idx, vals, ops);
                alpha
            }
            GramSource::OnTheFly(s) => {
                s.form(a, self.sys.csc(), i, ops);
                let (first, rest) = s.touched.split_first().expect("row i overlaps itself");
                let g0 = s.value(*first);
                let mut norm = g0 * g0;
                ops.flop();
                for &l in rest {
                    let g = s.value(l);
                    norm += g * g;
                    ops.flops(2);
                }
                let mut dot = g0 * r[*first];
                ops.flop();
                for &l in rest {
                    dot += s.value(l) * r[l];
                    ops.flops(2);
                }
                let alpha = dot / norm;
                ops.flop();
                for &l in &s.touched {
                    r[l] -= alpha * s.value(l);
                }
                ops.flops(2 * s.touched.len() as u64);
                alpha
            }
            GramSource::Unused => unreachable!("r is only present for RKAS"),
        };
        let (idx, vals) = a.row(i);
        kernels::sparse_axpy_sub(&mut self.state.x, alpha, idx, vals, ops);
        self.state.k += 1;
        ops.end_step();
        Ok(alpha)
    }

    /// One relaxed Kaczmarz iteration on row `i`:
    /// `x ← x − λ (A_{i,:} x − b_i) / ‖A_{i,:}‖² · A_{i,:}ᵀ`.
    pub fn rk_step(&mut self, i: usize, lambda: f64) -> Result<()> {
        self.check_row(i)?;
        check_lambda(lambda)?;
        if self.cfg.method != Method::Rk {
            return Err(Error::InvalidParameter("solver is not configured for RK".into()));
        }
        let ops = &mut self.ops;
        let (idx, vals) = self.sys.csr().row(i);
        let dot = kernels::sparse_dense_dot(idx, vals, &self.state.x, ops);
        let coef = lambda * (dot - self.sys.b()[i]) / self.row_norms[i];
        ops.flops(3);
        kernels::sparse_axpy_sub(&mut self.state.x, coef, idx, vals, ops);
        self.state.k += 1;
        ops.end_step();
        Ok(())
    }

    /// One REK iteration with row `i` and column `j`: first the column
    /// projection of `z`, then the row step on `x` against `b − z`.
    pub fn rek_step(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_row(i)?;
        let n = self.sys.ncols();
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, limit: n });
        }
        let Some(z) = self.state.z.as_mut() else {
            return Err(Error::InvalidParameter("state not initialized for REK (no z)".into()));
        };
        let ops = &mut self.ops;
        let (ci, cv) = self.sys.csc().row(j);
        let cz = kernels::sparse_dense_dot(ci, cv, z, ops);
        let c = cz / self.col_norms[j];
        ops.flop();
        kernels::sparse_axpy_sub(z, c, ci, cv, ops);

        let (idx, vals) = self.sys.csr().row(i);
        let dot = kernels::sparse_dense_dot(idx, vals, &self.state.x, ops);
        let t = (dot - self.sys.b()[i] + z[i]) / self.row_norms[i];
        ops.flops(3);
        kernels::sparse_axpy_sub(&mut self.state.x, t, idx, vals, ops);
        self.state.k += 1;
        ops.end_step();
        Ok(())
    }

    /// Draw the next row (and column, for REK).
    pub fn draw(&mut self) -> (usize, Option<usize>) {
        let j = self.cols.as_mut().map(DiscreteSampler::draw);
        (self.rows.draw(), j)
    }

    /// Draw indices and apply the configured method. Returns the indices.
    pub fn step(&mut self) -> (usize, Option<usize>) {
        let (i, j) = self.draw();
        let res = match self.cfg.method {
            Method::Rkas => self.rkas_step(i).map(|_| ()),
            Method::Rk => self.rk_step(i, self.cfg.lambda),
            Method::Rek => self.rek_step(i, j.expect("REK draws a column")),
        };
        res.expect("sampled indices are in range and the state matches the method");
        (i, j)
    }
}
