//! Solves a small constrained problem with the augmented Lagrangian solver:
//! minimize (x - 2)² + (y - 1)² subject to x² + y² = 1 and x + y ≤ 1.2, within a box.

use asvplan::nlp_solver::{minimize, EvalError, Jacobian, NlpProblem, SolverConfig};

struct Problem {
    lo: [f64; 2],
    hi: [f64; 2],
}

impl NlpProblem for Problem {
    fn num_vars(&self) -> usize {
        2
    }

    fn num_eq(&self) -> usize {
        1
    }

    fn num_ineq(&self) -> usize {
        1
    }

    fn lower_bounds(&self) -> &[f64] {
        &self.lo
    }

    fn upper_bounds(&self) -> &[f64] {
        &self.hi
    }

    fn objective(&self, z: &[f64], grad: &mut [f64]) -> Result<f64, EvalError> {
        grad[0] = 2.0 * (z[0] - 2.0);
        grad[1] = 2.0 * (z[1] - 1.0);
        Ok((z[0] - 2.0).powi(2) + (z[1] - 1.0).powi(2))
    }

    fn constraints(
        &self,
        z: &[f64],
        values: &mut [f64],
        jac: &mut Jacobian,
    ) -> Result<(), EvalError> {
        values[0] = z[0] * z[0] + z[1] * z[1] - 1.0;
        values[1] = z[0] + z[1] - 1.2;
        jac.push(0, 0, 2.0 * z[0]);
        jac.push(0, 1, 2.0 * z[1]);
        jac.push(1, 0, 1.0);
        jac.push(1, 1, 1.0);
        Ok(())
    }
}

fn main() {
    let problem = Problem {
        lo: [-2.0, -2.0],
        hi: [2.0, 2.0],
    };
    let sol = minimize(&problem, &[0.0, 0.0], &SolverConfig::default()).expect("valid problem");
    println!(
        "status {:?}, z = ({:.6}, {:.6}), f = {:.6}",
        sol.status, sol.z[0], sol.z[1], sol.objective
    );
    for (i, r) in sol.history.iter().enumerate() {
        println!(
            "outer {i:2}: violation {:.2e}, penalty {:.0e}, inner iterations {}",
            r.violation, r.penalty, r.inner_iterations
        );
    }
}
