//! Smooth nonlinear programs with equality constraints, one-sided inequality
//! constraints and simple bounds:
//!
//! ```text
//! min f(z)   s.t.   c(z) = 0,   g(z) ≤ 0,   lo ≤ z ≤ hi
//! ```
//!
//! Solved by a Powell–Hestenes–Rockafellar augmented Lagrangian. Each outer
//! iteration minimizes the augmented Lagrangian over the box with a projected
//! limited-memory BFGS method and a backtracking (sufficient decrease) line search,
//! then updates the multipliers and, when feasibility stalls, the penalty.

use log::{debug, trace};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("non-finite value in {0}")]
    NonFiniteEvaluation(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("initial point has length {got}, problem has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("inconsistent bounds at variable {0}")]
    InvalidBounds(usize),
}

/// Sparse constraint Jacobian in coordinate form.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Jacobian {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl Jacobian {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.entries.push((row, col, value));
    }

    /// `out += Jᵀ w`
    pub fn transpose_mul_add(&self, w: &[f64], out: &mut [f64]) {
        for &(r, c, v) in &self.entries {
            out[c] += v * w[r];
        }
    }

    /// Dense row-major copy; duplicate entries are summed.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            d[r][c] += v;
        }
        d
    }
}

/// A smooth NLP. Constraint values are laid out as `num_eq` equalities followed by
/// `num_ineq` inequalities of the form `g(z) ≤ 0`.
pub trait NlpProblem {
    fn num_vars(&self) -> usize;
    fn num_eq(&self) -> usize;
    fn num_ineq(&self) -> usize {
        0
    }
    fn lower_bounds(&self) -> &[f64];
    fn upper_bounds(&self) -> &[f64];
    /// Objective value; writes the gradient into `grad`.
    fn objective(&self, z: &[f64], grad: &mut [f64]) -> Result<f64, EvalError>;
    /// Constraint values and their Jacobian.
    fn constraints(
        &self,
        z: &[f64],
        values: &mut [f64],
        jac: &mut Jacobian,
    ) -> Result<(), EvalError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_outer_iterations: usize,
    pub max_inner_iterations: usize,
    /// Max-norm of the constraint violation accepted as feasible.
    pub constraint_tolerance: f64,
    /// Max-norm of the projected gradient of the (scaled) augmented Lagrangian.
    pub optimality_tolerance: f64,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub max_penalty: f64,
    /// Number of stored curvature pairs.
    pub memory: usize,
    /// Rescale boxed variables to unit width before solving.
    pub scale_variables: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_outer_iterations: 60,
            max_inner_iterations: 20000,
            constraint_tolerance: 1e-6,
            optimality_tolerance: 1e-5,
            initial_penalty: 10.0,
            penalty_growth: 10.0,
            max_penalty: 1e8,
            memory: 10,
            scale_variables: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidConfig(m.into()));
        if !(self.constraint_tolerance > 0.0) || !(self.optimality_tolerance > 0.0) {
            return bad("tolerances must be > 0");
        }
        if !(self.penalty_growth > 1.0) {
            return bad("penalty_growth must be > 1");
        }
        if !(self.initial_penalty > 0.0) || !(self.max_penalty >= self.initial_penalty) {
            return bad("penalties must satisfy 0 < initial_penalty <= max_penalty");
        }
        if self.max_outer_iterations == 0 || self.max_inner_iterations == 0 || self.memory == 0 {
            return bad("iteration budgets and memory must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
}

/// Progress record of one outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterRecord {
    pub violation: f64,
    pub penalty: f64,
    pub objective: f64,
    pub inner_iterations: usize,
    pub projected_gradient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub z: Vec<f64>,
    pub objective: f64,
    pub max_constraint_violation: f64,
    pub status: SolveStatus,
    pub history: Vec<OuterRecord>,
}

struct Workspace<'p, P: NlpProblem + ?Sized> {
    problem: &'p P,
    lo: Vec<f64>,
    hi: Vec<f64>,
    n_eq: usize,
    n_con: usize,
    obj_scale: f64,
    /// Internal iterates are `y = z / scale`.
    scale: Vec<f64>,
    lambda: Vec<f64>,
    penalty: f64,
    cons: Vec<f64>,
    jac: Jacobian,
    grad_f: Vec<f64>,
}

/// Augmented Lagrangian value and gradient at `z`, together with the raw objective
/// and the constraint violation there.
struct AlEval {
    value: f64,
    grad: Vec<f64>,
    objective: f64,
    violation: f64,
}

impl<P: NlpProblem + ?Sized> Workspace<'_, P> {
    fn unscale(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.scale).map(|(a, d)| a * d).collect()
    }

    fn eval(&mut self, y: &[f64]) -> Result<AlEval, EvalError> {
        let n = y.len();
        let z = self.unscale(y);
        let f = self.problem.objective(&z, &mut self.grad_f)?;
        self.jac.clear();
        self.problem
            .constraints(&z, &mut self.cons, &mut self.jac)?;
        if !f.is_finite() || self.grad_f.iter().any(|g| !g.is_finite()) {
            return Err(EvalError::NonFiniteEvaluation("objective"));
        }
        if self.cons.iter().any(|c| !c.is_finite()) {
            return Err(EvalError::NonFiniteEvaluation("constraints"));
        }
        let rho = self.penalty;
        let mut value = self.obj_scale * f;
        let mut w = vec![0.0; self.n_con];
        let mut violation = 0.0f64;
        for i in 0..self.n_con {
            let c = self.cons[i];
            if i < self.n_eq {
                value += self.lambda[i] * c + 0.5 * rho * c * c;
                w[i] = self.lambda[i] + rho * c;
                violation = violation.max(c.abs());
            } else {
                let shifted = (self.lambda[i] + rho * c).max(0.0);
                value += (shifted * shifted - self.lambda[i] * self.lambda[i]) / (2.0 * rho);
                w[i] = shifted;
                violation = violation.max(c.max(0.0));
            }
        }
        let mut grad = vec![0.0; n];
        for (g, gf) in grad.iter_mut().zip(&self.grad_f) {
            *g = self.obj_scale * gf;
        }
        self.jac.transpose_mul_add(&w, &mut grad);
        for (g, d) in grad.iter_mut().zip(&self.scale) {
            *g *= d;
        }
        Ok(AlEval {
            value,
            grad,
            objective: f,
            violation,
        })
    }

    fn update_multipliers(&mut self) {
        for i in 0..self.n_con {
            let next = self.lambda[i] + self.penalty * self.cons[i];
            self.lambda[i] = if i < self.n_eq { next } else { next.max(0.0) };
        }
    }

    fn project(&self, z: &mut [f64]) {
        for ((v, &l), &h) in z.iter_mut().zip(&self.lo).zip(&self.hi) {
            *v = v.clamp(l, h);
        }
    }

    fn projected_gradient_norm(&self, z: &[f64], g: &[f64]) -> f64 {
        z.iter()
            .zip(g)
            .zip(self.lo.iter().zip(&self.hi))
            .map(|((&zi, &gi), (&l, &h))| ((zi - gi).clamp(l, h) - zi).abs())
            .fold(0.0, f64::max)
    }

    /// Bound-constrained minimization of the augmented Lagrangian starting at `z`.
    fn inner_solve(
        &mut self,
        z: &mut Vec<f64>,
        tol: f64,
        max_iter: usize,
        memory: usize,
    ) -> Result<(AlEval, usize, f64), EvalError> {
        const C1: f64 = 1e-4;
        const MAX_HALVINGS: usize = 40;
        let n = z.len();
        let mut cur = self.eval(z)?;
        let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(memory);
        let mut pg = self.projected_gradient_norm(z, &cur.grad);
        let mut iters = 0;
        while iters < max_iter && pg > tol {
            iters += 1;
            let free: Vec<bool> = (0..n)
                .map(|i| {
                    let g = cur.grad[i];
                    let at_lo = z[i] <= self.lo[i] && g > 0.0;
                    let at_hi = z[i] >= self.hi[i] && g < 0.0;
                    self.lo[i] < self.hi[i] && !at_lo && !at_hi
                })
                .collect();
            let mut d = two_loop(&cur.grad, &free, &pairs);
            let slope: f64 = d.iter().zip(&cur.grad).map(|(a, b)| a * b).sum();
            let gnorm = masked_norm(&cur.grad, &free);
            if !(slope < -1e-12 * gnorm * norm(&d)) {
                pairs.clear();
                d = two_loop(&cur.grad, &free, &pairs);
            }

            let mut accepted = None;
            for attempt in 0..2 {
                let mut alpha = 1.0;
                for _ in 0..MAX_HALVINGS {
                    let mut trial: Vec<f64> =
                        z.iter().zip(&d).map(|(zi, di)| zi + alpha * di).collect();
                    self.project(&mut trial);
                    let step_dot: f64 = trial
                        .iter()
                        .zip(z.iter())
                        .zip(&cur.grad)
                        .map(|((t, zi), g)| (t - zi) * g)
                        .sum();
                    if step_dot >= 0.0 {
                        alpha *= 0.5;
                        continue;
                    }
                    match self.eval(&trial) {
                        Ok(next) if next.value <= cur.value + C1 * step_dot => {
                            accepted = Some((trial, next));
                            break;
                        }
                        // a non-finite trial point is treated as a failed step
                        _ => alpha *= 0.5,
                    }
                }
                if accepted.is_some() || attempt == 1 || pairs.is_empty() {
                    break;
                }
                pairs.clear();
                d = two_loop(&cur.grad, &free, &pairs);
            }
            let Some((trial, next)) = accepted else {
                trace!("inner line search stalled at iteration {iters}, |pg| = {pg:.3e}");
                break;
            };

            let s: Vec<f64> = trial.iter().zip(z.iter()).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = next
                .grad
                .iter()
                .zip(&cur.grad)
                .map(|(a, b)| a - b)
                .collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
                if pairs.len() == memory {
                    pairs.pop_front();
                }
                pairs.push_back((s, y, 1.0 / sy));
            }
            *z = trial;
            cur = next;
            pg = self.projected_gradient_norm(z, &cur.grad);
        }
        Ok((cur, iters, pg))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn masked_norm(v: &[f64], mask: &[bool]) -> f64 {
    v.iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(x, _)| x * x)
        .sum::<f64>()
        .sqrt()
}

/// L-BFGS two-loop recursion restricted to the free variables; returns a descent
/// direction (zero on fixed variables).
fn two_loop(grad: &[f64], free: &[bool], pairs: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mask = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .zip(free)
            .map(|(&x, &f)| if f { x } else { 0.0 })
            .collect()
    };
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .zip(free)
            .filter(|(_, &f)| f)
            .map(|((x, y), _)| x * y)
            .sum()
    };
    let mut q = mask(grad);
    if pairs.is_empty() {
        let gmax = q.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let scale = if gmax > 1.0 { 1.0 / gmax } else { 1.0 };
        return q.iter().map(|x| -scale * x).collect();
    }
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    let (s, y, _) = pairs.back().expect("non-empty");
    let yy = dot(y, y);
    let gamma = if yy > 0.0 { dot(s, y) / yy } else { 1.0 };
    let gamma = if gamma > 0.0 { gamma } else { 1.0 };
    for qi in q.iter_mut() {
        *qi *= gamma;
    }
    for ((s, y, rho), a) in pairs.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter()
        .zip(free)
        .map(|(&x, &f)| if f { -x } else { 0.0 })
        .collect()
}

/// Minimizes `problem` from `z0` (clipped to the bounds).
pub fn minimize<P: NlpProblem + ?Sized>(
    problem: &P,
    z0: &[f64],
    config: &SolverConfig,
) -> Result<Solution, SolverError> {
    config.validate()?;
    let n = problem.num_vars();
    if z0.len() != n {
        return Err(SolverError::DimensionMismatch {
            expected: n,
            got: z0.len(),
        });
    }
    let lo = problem.lower_bounds().to_vec();
    let hi = problem.upper_bounds().to_vec();
    if let Some(i) = (0..n).find(|&i| !(lo[i] <= hi[i])) {
        return Err(SolverError::InvalidBounds(i));
    }
    let n_eq = problem.num_eq();
    let n_con = n_eq + problem.num_ineq();
    let mut z = z0.to_vec();
    for ((v, &l), &h) in z.iter_mut().zip(&lo).zip(&hi) {
        *v = v.clamp(l, h);
    }
    let diverged = |z: Vec<f64>, history| Solution {
        z,
        objective: f64::NAN,
        max_constraint_violation: f64::INFINITY,
        status: SolveStatus::Diverged,
        history,
    };

    // Variables with a finite, non-degenerate box are scaled to unit width.
    let scale: Vec<f64> = if config.scale_variables {
        lo.iter()
            .zip(&hi)
            .map(|(&l, &h)| {
                let w = h - l;
                if w.is_finite() && w > 0.0 {
                    w
                } else {
                    1.0
                }
            })
            .collect()
    } else {
        vec![1.0; n]
    };

    // Normalize the objective so its gradient is O(1) at the start.
    let mut g0 = vec![0.0; n];
    let obj_scale = match problem.objective(&z, &mut g0) {
        Ok(f) if f.is_finite() => {
            let gmax = g0
                .iter()
                .zip(&scale)
                .fold(0.0f64, |m, (g, d)| m.max((g * d).abs()));
            if !gmax.is_finite() {
                return Ok(diverged(z, Vec::new()));
            }
            1.0 / gmax.max(1.0)
        }
        _ => return Ok(diverged(z, Vec::new())),
    };

    let mut ws = Workspace {
        problem,
        lo: lo.iter().zip(&scale).map(|(l, d)| l / d).collect(),
        hi: hi.iter().zip(&scale).map(|(h, d)| h / d).collect(),
        n_eq,
        n_con,
        obj_scale,
        scale,
        lambda: vec![0.0; n_con],
        penalty: config.initial_penalty,
        cons: vec![0.0; n_con],
        jac: Jacobian::new(n_con, n),
        grad_f: vec![0.0; n],
    };
    // Internal iterate in scaled coordinates.
    let mut z: Vec<f64> = z.iter().zip(&ws.scale).map(|(v, d)| v / d).collect();
    ws.project(&mut z);

    let mut history = Vec::new();
    let mut inner_tol = (10.0 * config.optimality_tolerance).max(1e-2);
    let mut last_violation = f64::INFINITY;
    let mut last: Option<AlEval> = None;
    for outer in 0..config.max_outer_iterations {
        let (eval, iters, pg) = match ws.inner_solve(
            &mut z,
            inner_tol,
            config.max_inner_iterations,
            config.memory,
        ) {
            Ok(r) => r,
            Err(_) => return Ok(diverged(ws.unscale(&z), history)),
        };
        if z.iter().any(|v| !v.is_finite()) {
            return Ok(diverged(ws.unscale(&z), history));
        }
        debug!(
            "outer {outer}: f = {:.6e}, viol = {:.3e}, rho = {:.1e}, inner = {iters}, |pg| = {pg:.2e}",
            eval.objective, eval.violation, ws.penalty
        );
        history.push(OuterRecord {
            violation: eval.violation,
            penalty: ws.penalty,
            objective: eval.objective,
            inner_iterations: iters,
            projected_gradient: pg,
        });
        let violation = eval.violation;
        let optimal = pg <= config.optimality_tolerance;
        last = Some(eval);
        if violation <= config.constraint_tolerance && optimal {
            break;
        }
        ws.update_multipliers();
        let stalled = violation > 0.25 * last_violation && violation > config.constraint_tolerance;
        if stalled && ws.penalty < config.max_penalty {
            ws.penalty = (ws.penalty * config.penalty_growth).min(config.max_penalty);
        }
        last_violation = last_violation.min(violation);
        inner_tol = (inner_tol * 0.1).max(config.optimality_tolerance);
    }

    let eval = match last {
        Some(e) => e,
        None => return Ok(diverged(ws.unscale(&z), history)),
    };
    let converged = history.last().is_some_and(|h| {
        h.violation <= config.constraint_tolerance
            && h.projected_gradient <= config.optimality_tolerance
    });
    Ok(Solution {
        z: ws.unscale(&z),
        objective: eval.objective,
        max_constraint_violation: eval.violation,
        status: if converged {
            SolveStatus::Converged
        } else {
            SolveStatus::MaxIterations
        },
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Closure-backed test problem.
    pub(crate) struct FnProblem<F, C> {
        pub n: usize,
        pub n_eq: usize,
        pub n_ineq: usize,
        pub lo: Vec<f64>,
        pub hi: Vec<f64>,
        pub f: F,
        pub c: C,
    }

    impl<F, C> NlpProblem for FnProblem<F, C>
    where
        F: Fn(&[f64], &mut [f64]) -> f64,
        C: Fn(&[f64], &mut [f64], &mut Jacobian),
    {
        fn num_vars(&self) -> usize {
            self.n
        }
        fn num_eq(&self) -> usize {
            self.n_eq
        }
        fn num_ineq(&self) -> usize {
            self.n_ineq
        }
        fn lower_bounds(&self) -> &[f64] {
            &self.lo
        }
        fn upper_bounds(&self) -> &[f64] {
            &self.hi
        }
        fn objective(&self, z: &[f64], grad: &mut [f64]) -> Result<f64, EvalError> {
            Ok((self.f)(z, grad))
        }
        fn constraints(&self, z: &[f64], v: &mut [f64], j: &mut Jacobian) -> Result<(), EvalError> {
            (self.c)(z, v, j);
            Ok(())
        }
    }

    fn unbounded(n: usize) -> (Vec<f64>, Vec<f64>) {
        (vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n])
    }

    #[test]
    fn unconstrained_quadratic() {
        let (lo, hi) = unbounded(1);
        let p = FnProblem {
            n: 1,
            n_eq: 0,
            n_ineq: 0,
            lo,
            hi,
            f: |z: &[f64], g: &mut [f64]| {
                g[0] = 2.0 * (z[0] - 3.0);
                (z[0] - 3.0).powi(2)
            },
            c: |_: &[f64], _: &mut [f64], _: &mut Jacobian| {},
        };
        let s = minimize(&p, &[0.0], &SolverConfig::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Converged);
        assert_abs_diff_eq!(s.z[0], 3.0, epsilon = 1e-6);
    }

    #[test]
    fn equality_constrained_circle() {
        let (lo, hi) = unbounded(2);
        let p = FnProblem {
            n: 2,
            n_eq: 1,
            n_ineq: 0,
            lo,
            hi,
            f: |z: &[f64], g: &mut [f64]| {
                g[0] = 2.0 * z[0];
                g[1] = 2.0 * z[1];
                z[0] * z[0] + z[1] * z[1]
            },
            c: |z: &[f64], v: &mut [f64], j: &mut Jacobian| {
                v[0] = z[0] + z[1] - 1.0;
                j.push(0, 0, 1.0);
                j.push(0, 1, 1.0);
            },
        };
        let s = minimize(&p, &[0.0, 0.0], &SolverConfig::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Converged);
        assert_abs_diff_eq!(s.z[0], 0.5, epsilon = 1e-5);
        assert_abs_diff_eq!(s.z[1], 0.5, epsilon = 1e-5);
    }

    #[test]
    fn active_bound() {
        let p = FnProblem {
            n: 1,
            n_eq: 0,
            n_ineq: 0,
            lo: vec![0.0],
            hi: vec![1.0],
            f: |z: &[f64], g: &mut [f64]| {
                g[0] = 2.0 * (z[0] - 2.0);
                (z[0] - 2.0).powi(2)
            },
            c: |_: &[f64], _: &mut [f64], _: &mut Jacobian| {},
        };
        let s = minimize(&p, &[0.5], &SolverConfig::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Converged);
        assert_eq!(s.z[0], 1.0);
    }

    #[test]
    fn one_sided_inequality() {
        let (lo, hi) = unbounded(1);
        let p = FnProblem {
            n: 1,
            n_eq: 0,
            n_ineq: 1,
            lo,
            hi,
            f: |z: &[f64], g: &mut [f64]| {
                g[0] = 2.0 * (z[0] - 2.0);
                (z[0] - 2.0).powi(2)
            },
            c: |z: &[f64], v: &mut [f64], j: &mut Jacobian| {
                v[0] = z[0] - 1.0;
                j.push(0, 0, 1.0);
            },
        };
        let s = minimize(&p, &[0.0], &SolverConfig::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Converged);
        assert_abs_diff_eq!(s.z[0], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (lo, hi) = unbounded(2);
        let p = FnProblem {
            n: 2,
            n_eq: 0,
            n_ineq: 0,
            lo,
            hi,
            f: |_: &[f64], _: &mut [f64]| 0.0,
            c: |_: &[f64], _: &mut [f64], _: &mut Jacobian| {},
        };
        assert!(matches!(
            minimize(&p, &[0.0], &SolverConfig::default()),
            Err(SolverError::DimensionMismatch { .. })
        ));
        let cfg = SolverConfig {
            penalty_growth: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            minimize(&p, &[0.0, 0.0], &cfg),
            Err(SolverError::InvalidConfig(_))
        ));
    }

    #[test]
    fn non_finite_objective_is_diverged() {
        let (lo, hi) = unbounded(1);
        let p = FnProblem {
            n: 1,
            n_eq: 0,
            n_ineq: 0,
            lo,
            hi,
            f: |_: &[f64], g: &mut [f64]| {
                g[0] = f64::NAN;
                f64::NAN
            },
            c: |_: &[f64], _: &mut [f64], _: &mut Jacobian| {},
        };
        let s = minimize(&p, &[1.0], &SolverConfig::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Diverged);
    }
}
