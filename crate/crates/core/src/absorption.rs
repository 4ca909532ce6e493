//! Absorption-probability solvers.
//!
//! For a validated model with transient-to-transient matrix `Q` and direct
//! absorption columns `b_C`, `b_F`, the per-node probabilities solve
//! `(I - Q) x = b_C` and `(I - Q) y = b_F`. Both columns are solved
//! independently, so `p_correct + p_fault = 1` is a genuine cross-check of
//! the arithmetic rather than a bookkeeping identity.
//!
//! Two routes are provided: a dense Gaussian-elimination direct solve for
//! models up to [`DENSE_NODE_CAP`] transient nodes, and a fixed-point
//! iteration over the sparse edge list for anything larger.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fsm::{AbsorptionResult, NodeAbsorption, NodeId, ReliabilityFsm, Target, Violation};

/// Transient-node cap for the dense direct solver. Larger models must use
/// [`solve_absorption_iterative`].
pub const DENSE_NODE_CAP: usize = 2000;

/// Pivot magnitude below which elimination reports the system singular.
/// Unreachable for validated models, whose `I - Q` is nonsingular.
const PIVOT_EPSILON: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SolveError {
    #[error("model failed validation with {} violation(s): {}", .0.len(), summarize(.0))]
    InvalidModel(Vec<Violation>),
    #[error("model has {nodes} transient nodes, above the dense-solver cap of {cap}; use the iterative solver")]
    TooLarge { nodes: usize, cap: usize },
    #[error("absorption system is singular")]
    Singular,
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("no convergence within {max_iter} iterations (tolerance {tolerance}, last delta {delta})")]
    NotConverged {
        max_iter: u64,
        tolerance: f64,
        delta: f64,
    },
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Model compiled to index space: nodes in sorted label order, `Q` as sparse
/// rows, and the two direct-absorption columns.
struct CompiledChain {
    order: Vec<NodeId>,
    rows: Vec<Vec<(usize, f64)>>,
    to_correct: Vec<f64>,
    to_fault: Vec<f64>,
    start: usize,
}

impl CompiledChain {
    fn build(model: &ReliabilityFsm) -> Self {
        let order: Vec<NodeId> = model.nodes().cloned().collect();
        let index: BTreeMap<&NodeId, usize> =
            order.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let n = order.len();
        let mut rows = vec![Vec::new(); n];
        let mut to_correct = vec![0.0; n];
        let mut to_fault = vec![0.0; n];
        for edge in model.edges() {
            let i = index[&edge.from];
            match &edge.to {
                Target::Node(to) => rows[i].push((index[to], edge.probability)),
                Target::Correct => to_correct[i] += edge.probability,
                Target::Fault => to_fault[i] += edge.probability,
            }
        }
        let start = index[model.start()];
        drop(index);
        CompiledChain {
            order,
            rows,
            to_correct,
            to_fault,
            start,
        }
    }

    /// One fixed-point update `x <- Q x + b` for both columns.
    fn step(&self, x_c: &[f64], x_f: &[f64], out_c: &mut [f64], out_f: &mut [f64]) {
        for i in 0..self.order.len() {
            let mut c = self.to_correct[i];
            let mut f = self.to_fault[i];
            for &(j, p) in &self.rows[i] {
                c += p * x_c[j];
                f += p * x_f[j];
            }
            out_c[i] = c;
            out_f[i] = f;
        }
    }

    fn into_result(self, x_c: &[f64], x_f: &[f64]) -> AbsorptionResult {
        let start = self.order[self.start].clone();
        let per_node = self
            .order
            .into_iter()
            .enumerate()
            .map(|(i, node)| {
                (
                    node,
                    NodeAbsorption {
                        p_correct: x_c[i].clamp(0.0, 1.0),
                        p_fault: x_f[i].clamp(0.0, 1.0),
                    },
                )
            })
            .collect();
        AbsorptionResult::new(start, per_node)
    }
}

fn ensure_valid(model: &ReliabilityFsm) -> Result<(), SolveError> {
    let violations = model.validate();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(SolveError::InvalidModel(violations))
    }
}

/// Solves the absorption system exactly by dense Gaussian elimination with
/// partial pivoting. Node order is the sorted label order, which fixes the
/// pivot sequence and makes the floating-point output reproducible.
pub fn solve_absorption(model: &ReliabilityFsm) -> Result<AbsorptionResult, SolveError> {
    ensure_valid(model)?;
    let chain = CompiledChain::build(model);
    let n = chain.order.len();
    if n > DENSE_NODE_CAP {
        return Err(SolveError::TooLarge {
            nodes: n,
            cap: DENSE_NODE_CAP,
        });
    }

    // Augmented system [I - Q | b_C b_F], row-major.
    let width = n + 2;
    let mut a = vec![0.0; n * width];
    for i in 0..n {
        a[i * width + i] = 1.0;
        for &(j, p) in &chain.rows[i] {
            a[i * width + j] -= p;
        }
        a[i * width + n] = chain.to_correct[i];
        a[i * width + n + 1] = chain.to_fault[i];
    }

    // Forward elimination with partial pivoting.
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                a[r * width + col]
                    .abs()
                    .total_cmp(&a[s * width + col].abs())
            })
            .expect("nonempty pivot range");
        if a[pivot_row * width + col].abs() < PIVOT_EPSILON {
            return Err(SolveError::Singular);
        }
        if pivot_row != col {
            for k in 0..width {
                a.swap(col * width + k, pivot_row * width + k);
            }
        }
        let pivot = a[col * width + col];
        for row in (col + 1)..n {
            let factor = a[row * width + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            a[row * width + col] = 0.0;
            for k in (col + 1)..width {
                a[row * width + k] -= factor * a[col * width + k];
            }
        }
    }

    // Back substitution for both right-hand sides.
    let mut x_c = vec![0.0; n];
    let mut x_f = vec![0.0; n];
    for row in (0..n).rev() {
        let mut c = a[row * width + n];
        let mut f = a[row * width + n + 1];
        for col in (row + 1)..n {
            c -= a[row * width + col] * x_c[col];
            f -= a[row * width + col] * x_f[col];
        }
        let diag = a[row * width + row];
        x_c[row] = c / diag;
        x_f[row] = f / diag;
    }

    Ok(chain.into_result(&x_c, &x_f))
}

/// Solves the absorption system by fixed-point iteration `x <- Q x + b` from
/// the all-zeros vector (absorption in zero steps), which makes the iterates
/// monotone nondecreasing. Each iteration applies one update and then probes
/// the following iterate; the walk terminates once successive iterates differ
/// by less than `tol` in max norm. Works on the sparse edge list, so there is
/// no size cap.
pub fn solve_absorption_iterative(
    model: &ReliabilityFsm,
    max_iter: u64,
    tol: f64,
) -> Result<AbsorptionResult, SolveError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(SolveError::NonPositiveTolerance(tol));
    }
    ensure_valid(model)?;
    let chain = CompiledChain::build(model);
    let n = chain.order.len();

    let mut current_c = vec![0.0; n];
    let mut current_f = vec![0.0; n];
    let mut probe_c = vec![0.0; n];
    let mut probe_f = vec![0.0; n];
    chain.step(&current_c, &current_f, &mut probe_c, &mut probe_f);

    let mut delta = f64::INFINITY;
    for _ in 1..=max_iter {
        // The probe becomes this iteration's value; the next probe doubles
        // as the convergence measurement.
        std::mem::swap(&mut current_c, &mut probe_c);
        std::mem::swap(&mut current_f, &mut probe_f);
        chain.step(&current_c, &current_f, &mut probe_c, &mut probe_f);
        delta = max_abs_diff(&probe_c, &current_c).max(max_abs_diff(&probe_f, &current_f));
        if delta < tol {
            return Ok(chain.into_result(&probe_c, &probe_f));
        }
    }
    Err(SolveError::NotConverged {
        max_iter,
        tolerance: tol,
        delta,
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
