#![allow(dead_code)]

use asvplan::nlp_solver::{EvalError, Jacobian, NlpProblem};
use asvplan::transcription::{Layout, SegmentNlp};
use asvplan::world::{is_free, segment_free, Obstacle, Point2, WorldMap};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ObjFn = fn(&[f64], &mut [f64]) -> f64;
pub type ConFn = fn(&[f64], &mut [f64], &mut Jacobian);

/// An NLP given by plain functions.
pub struct Analytic {
    pub n: usize,
    pub n_eq: usize,
    pub n_ineq: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub f: ObjFn,
    pub c: ConFn,
}

impl NlpProblem for Analytic {
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

pub struct BatteryCase {
    pub name: &'static str,
    pub problem: Analytic,
    pub z0: Vec<f64>,
    pub optimum: f64,
    pub minimizer: Vec<f64>,
}

fn free(n: usize) -> (Vec<f64>, Vec<f64>) {
    (vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n])
}

fn no_constraints(_: &[f64], _: &mut [f64], _: &mut Jacobian) {}

/// Positive root of 2x³ + x − 1 = 0 by bisection.
fn quartic_root() -> f64 {
    let (mut a, mut b) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if 2.0 * m * m * m + m - 1.0 > 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

/// Ten problems with hand-derived optima.
pub fn battery() -> Vec<BatteryCase> {
    let mut cases = Vec::new();

    let (lo, hi) = free(1);
    cases.push(BatteryCase {
        name: "shifted parabola",
        problem: Analytic {
            n: 1,
            n_eq: 0,
            n_ineq: 0,
            lo,
            hi,
            f: |z, g| {
                g[0] = 2.0 * (z[0] - 3.0);
                (z[0] - 3.0).powi(2)
            },
            c: no_constraints,
        },
        z0: vec![0.0],
        optimum: 0.0,
        minimizer: vec![3.0],
    });

    let (lo, hi) = free(2);
    cases.push(BatteryCase {
        name: "circle norm on a line",
        problem: Analytic {
            n: 2,
            n_eq: 1,
            n_ineq: 0,
            lo,
            hi,
            f: |z, g| {
                g[0] = 2.0 * z[0];
                g[1] = 2.0 * z[1];
                z[0] * z[0] + z[1] * z[1]
            },
            c: |z, v, j| {
                v[0] = z[0] + z[1] - 1.0;
                j.push(0, 0, 1.0);
                j.push(0, 1, 1.0);
            },
        },
        z0: vec![0.0, 0.0],
        optimum: 0.5,
        minimizer: vec![0.5, 0.5],
    });

    cases.push(BatteryCase {
        name: "active upper bound",
        problem: Analytic {
            n: 1,
            n_eq: 0,
            n_ineq: 0,
            lo: vec![0.0],
            hi: vec![1.0],
            f: |z, g| {
                g[0] = 2.0 * (z[0] - 2.0);
                (z[0] - 2.0).powi(2)
            },
            c: no_constraints,
        },
        z0: vec![0.0],
        optimum: 1.0,
        minimizer: vec![1.0],
    });

    let (lo, hi) = free(2);
    cases.push(BatteryCase {
        name: "rosenbrock",
        problem: Analytic {
            n: 2,
            n_eq: 0,
            n_ineq: 0,
            lo,
            hi,
            f: |z, g| {
                let (x, y) = (z[0], z[1]);
                g[0] = -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
                g[1] = 200.0 * (y - x * x);
                (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)
            },
            c: no_constraints,
        },
        z0: vec![-1.2, 1.0],
        optimum: 0.0,
        minimizer: vec![1.0, 1.0],
    });

    let r = quartic_root();
    let (lo, hi) = free(2);
    cases.push(BatteryCase {
        name: "quartic on a line",
        problem: Analytic {
            n: 2,
            n_eq: 1,
            n_ineq: 0,
            lo,
            hi,
            f: |z, g| {
                g[0] = 4.0 * z[0].powi(3);
                g[1] = 2.0 * z[1];
                z[0].powi(4) + z[1] * z[1]
            },
            c: |z, v, j| {
                v[0] = z[0] + z[1] - 1.0;
                j.push(0, 0, 1.0);
                j.push(0, 1, 1.0);
            },
        },
        z0: vec![0.0, 0.0],
        optimum: r.powi(4) + (1.0 - r).powi(2),
        minimizer: vec![r, 1.0 - r],
    });

    let (lo, hi) = free(2);
    cases.push(BatteryCase {
        name: "linear objective on a circle",
        problem: Analytic {
            n: 2,
            n_eq: 1,
            n_ineq: 0,
            lo,
            hi,
            f: |z, g| {
                g[0] = 1.0;
                g[1] = 1.0;
                z[0] + z[1]
            },
            c: |z, v, j| {
                v[0] = z[0] * z[0] + z[1] * z[1] - 2.0;
                j.push(0, 0, 2.0 * z[0]);
                j.push(0, 1, 2.0 * z[1]);
            },
        },
        z0: vec![-0.5, -1.0],
        optimum: -2.0,
        minimizer: vec![-1.0, -1.0],
    });

    let (lo, hi) = free(3);
    cases.push(BatteryCase {
        name: "weighted norm on a plane",
        problem: Analytic {
            n: 3,
            n_eq: 1,
            n_ineq: 0,
            lo,
            hi,
            f: |z, g| {
                g[0] = 2.0 * z[0];
                g[1] = 4.0 * z[1];
                g[2] = 6.0 * z[2];
                z[0] * z[0] + 2.0 * z[1] * z[1] + 3.0 * z[2] * z[2]
            },
            c: |z, v, j| {
                v[0] = z[0] + z[1] + z[2] - 1.0;
                for i in 0..3 {
                    j.push(0, i, 1.0);
                }
            },
        },
        z0: vec![0.0; 3],
        optimum: 6.0 / 11.0,
        minimizer: vec![6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0],
    });

    let (lo, hi) = free(2);
    cases.push(BatteryCase {
        name: "projection onto a half-plane",
        problem: Analytic {
            n: 2,
            n_eq: 0,
            n_ineq: 1,
            lo,
            hi,
            f: |z, g| {
                g[0] = 2.0 * (z[0] - 2.0);
                g[1] = 2.0 * (z[1] - 1.0);
                (z[0] - 2.0).powi(2) + (z[1] - 1.0).powi(2)
            },
            c: |z, v, j| {
                v[0] = z[0] + z[1] - 1.0;
                j.push(0, 0, 1.0);
                j.push(0, 1, 1.0);
            },
        },
        z0: vec![0.0, 0.0],
        optimum: 2.0,
        minimizer: vec![1.0, 0.0],
    });

    let (lo, hi) = free(3);
    cases.push(BatteryCase {
        name: "least norm with two equalities",
        problem: Analytic {
            n: 3,
            n_eq: 2,
            n_ineq: 0,
            lo,
            hi,
            f: |z, g| {
                for i in 0..3 {
                    g[i] = 2.0 * z[i];
                }
                z.iter().map(|v| v * v).sum()
            },
            c: |z, v, j| {
                v[0] = z[0] + 2.0 * z[1] + 3.0 * z[2] - 6.0;
                v[1] = z[0] - z[1];
                j.push(0, 0, 1.0);
                j.push(0, 1, 2.0);
                j.push(0, 2, 3.0);
                j.push(1, 0, 1.0);
                j.push(1, 1, -1.0);
            },
        },
        z0: vec![0.0; 3],
        optimum: 8.0 / 3.0,
        minimizer: vec![2.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0],
    });

    cases.push(BatteryCase {
        name: "hyperbola in a box",
        problem: Analytic {
            n: 2,
            n_eq: 1,
            n_ineq: 0,
            lo: vec![0.5, 0.5],
            hi: vec![4.0, 4.0],
            f: |z, g| {
                g[0] = 2.0 * z[0];
                g[1] = 2.0 * z[1];
                z[0] * z[0] + z[1] * z[1]
            },
            c: |z, v, j| {
                v[0] = z[0] * z[1] - 1.0;
                j.push(0, 0, z[1]);
                j.push(0, 1, z[0]);
            },
        },
        z0: vec![3.0, 0.5],
        optimum: 2.0,
        minimizer: vec![1.0, 1.0],
    });

    cases
}

/// Max-norm of the constraint violation (equalities absolute, inequalities positive part).
pub fn violation(p: &Analytic, z: &[f64]) -> f64 {
    let mut v = vec![0.0; p.n_eq + p.n_ineq];
    let mut j = Jacobian::new(v.len(), p.n);
    (p.c)(z, &mut v, &mut j);
    let eq = v[..p.n_eq].iter().map(|x| x.abs());
    let ineq = v[p.n_eq..].iter().map(|x| x.max(0.0));
    let bounds = z
        .iter()
        .zip(&p.lo)
        .zip(&p.hi)
        .map(|((x, lo), hi)| (lo - x).max(x - hi).max(0.0));
    eq.chain(ineq).chain(bounds).fold(0.0, f64::max)
}

/// Shortest collision-free polyline length through a visibility graph whose nodes are
/// the corners of each rectangle grown by `inflate` and the vertices of a polygon
/// circumscribing each grown circle. Edges are accepted with the same exact segment
/// test the planner uses, so the result is an upper bound on the true shortest path.
pub fn visibility_shortest(map: &WorldMap, start: Point2, goal: Point2, inflate: f64) -> f64 {
    let grow = inflate + 1e-6;
    let mut nodes = vec![start, goal];
    for o in &map.obstacles {
        match *o {
            Obstacle::Rect {
                cx,
                cy,
                length,
                width,
            } => {
                let (hx, hy) = (length / 2.0 + grow, width / 2.0 + grow);
                for (sx, sy) in [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)] {
                    nodes.push(Point2::new(cx + sx * hx, cy + sy * hy));
                }
            }
            Obstacle::Circle { cx, cy, radius } => {
                let sides = 64;
                let rr = (radius + grow) / (std::f64::consts::PI / sides as f64).cos();
                for i in 0..sides {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / sides as f64;
                    nodes.push(Point2::new(cx + rr * a.cos(), cy + rr * a.sin()));
                }
            }
        }
    }
    let nodes: Vec<Point2> = nodes
        .into_iter()
        .enumerate()
        .filter(|&(i, p)| i < 2 || is_free(p, map, inflate))
        .map(|(_, p)| p)
        .collect();
    let n = nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[0] = 0.0;
    for _ in 0..n {
        let Some(u) = (0..n)
            .filter(|&i| !done[i])
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
        else {
            break;
        };
        if !dist[u].is_finite() {
            break;
        }
        done[u] = true;
        for v in 0..n {
            if !done[v] && segment_free(nodes[u], nodes[v], map, inflate) {
                let d = dist[u] + nodes[u].distance(nodes[v]);
                if d < dist[v] {
                    dist[v] = d;
                }
            }
        }
    }
    dist[1]
}

/// A random decision vector inside plausible operating ranges (not necessarily
/// feasible).
pub fn random_decision(nlp: &SegmentNlp, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let lay: Layout = nlp.layout;
    let mut z = vec![0.0; lay.len()];
    z[lay.time()] = rng.gen_range(2.0..30.0);
    for k in 0..lay.nodes {
        let ranges = [
            (0.0, 20.0),
            (0.0, 20.0),
            (-3.0, 3.0),
            (-0.1, 1.7),
            (-1.0, 1.0),
            (-0.5, 0.5),
        ];
        for (i, (a, b)) in ranges.iter().enumerate() {
            z[lay.state(k, i)] = rng.gen_range(*a..*b);
        }
        z[lay.control(k, 0)] = rng.gen_range(-20.0..40.0);
        z[lay.control(k, 1)] = rng.gen_range(-10.0..10.0);
    }
    z
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest entry-wise error between an analytic derivative and its central
/// difference, relative to `max(1, |fd|)`.
pub fn relative_error(analytic: &[f64], fd: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(fd)
        .map(|(a, f)| (a - f).abs() / f.abs().max(1.0))
        .fold(0.0, f64::max)
}

pub fn fd_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}
