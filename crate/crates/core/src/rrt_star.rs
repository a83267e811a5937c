//! Geometric RRT* over 2-D position space and shortcut-based waypoint extraction.

use crate::world::{is_free, segment_free, Point2, WorldMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub max_iterations: usize,
    /// Maximum extension per steer [m].
    pub step_size: f64,
    /// Probability of sampling the goal.
    pub goal_bias: f64,
    /// Rewiring-radius constant [m].
    pub gamma: f64,
    pub goal_tolerance: f64,
    #[serde(rename = "seed")]
    pub rng_seed: u64,
    /// Required clearance of tree nodes and edges [m].
    pub inflate: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            step_size: 1.0,
            goal_bias: 0.05,
            gamma: 20.0,
            goal_tolerance: 0.3,
            rng_seed: 42,
            inflate: 0.7,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |m: &str| Err(PlanError::InvalidConfig(m.to_string()));
        if self.max_iterations < 1 {
            return bad("max_iterations must be >= 1");
        }
        if !(self.step_size > 0.0) {
            return bad("step_size must be > 0");
        }
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return bad("goal_bias must lie in [0, 1]");
        }
        if !(self.goal_tolerance > 0.0) {
            return bad("goal_tolerance must be > 0");
        }
        if !(self.gamma >= 0.0) {
            return bad("gamma must be >= 0");
        }
        if !(self.inflate >= 0.0) {
            return bad("inflate must be >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
    #[error("start ({}, {}) is not collision-free", .0.x, .0.y)]
    StartNotFree(Point2),
    #[error("goal ({}, {}) is not collision-free", .0.x, .0.y)]
    GoalNotFree(Point2),
    #[error("no path to the goal after {0} iterations")]
    NoPathFound(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub position: Point2,
    pub parent: Option<usize>,
    /// Path length from the root [m].
    pub cost: f64,
    children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedPath {
    pub vertices: Vec<Point2>,
    pub cost: f64,
}

/// Incremental RRT* search. `plan` runs it to completion; the struct is public so
/// the tree and the anytime cost history can be inspected.
pub struct RrtStar<'a> {
    map: &'a WorldMap,
    config: PlannerConfig,
    goal: Point2,
    nodes: Vec<TreeNode>,
    goal_nodes: Vec<usize>,
    rng: ChaCha8Rng,
    cost_history: Vec<f64>,
}

impl<'a> RrtStar<'a> {
    pub fn new(
        start: Point2,
        goal: Point2,
        map: &'a WorldMap,
        config: PlannerConfig,
    ) -> Result<Self, PlanError> {
        config.validate()?;
        if !is_free(start, map, config.inflate) {
            return Err(PlanError::StartNotFree(start));
        }
        if !is_free(goal, map, config.inflate) {
            return Err(PlanError::GoalNotFree(goal));
        }
        let root = TreeNode {
            position: start,
            parent: None,
            cost: 0.0,
            children: Vec::new(),
        };
        let goal_nodes = if start.distance(goal) <= config.goal_tolerance {
            vec![0]
        } else {
            Vec::new()
        };
        Ok(Self {
            map,
            rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
            config,
            goal,
            nodes: vec![root],
            goal_nodes,
            cost_history: Vec::new(),
        })
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Best goal-branch cost recorded every 100 iterations (`INFINITY` before the
    /// goal is first reached).
    pub fn cost_history(&self) -> &[f64] {
        &self.cost_history
    }

    pub fn best_goal_cost(&self) -> f64 {
        self.best_goal_node()
            .map_or(f64::INFINITY, |i| self.nodes[i].cost)
    }

    fn best_goal_node(&self) -> Option<usize> {
        // lowest cost, lowest index on ties
        self.goal_nodes
            .iter()
            .copied()
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if self.nodes[b].cost <= self.nodes[i].cost => Some(b),
                _ => Some(i),
            })
    }

    fn sample(&mut self) -> Point2 {
        if self.rng.gen::<f64>() < self.config.goal_bias {
            return self.goal;
        }
        let (x0, x1) = self.map.x_bounds;
        let (y0, y1) = self.map.y_bounds;
        Point2::new(self.rng.gen_range(x0..x1), self.rng.gen_range(y0..y1))
    }

    fn nearest(&self, p: Point2) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, n) in self.nodes.iter().enumerate() {
            let d = n.position.distance(p);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    fn steer(&self, from: Point2, to: Point2) -> Point2 {
        let d = from.distance(to);
        if d <= self.config.step_size {
            to
        } else {
            from.lerp(to, self.config.step_size / d)
        }
    }

    fn near_radius(&self) -> f64 {
        let n = self.nodes.len() as f64;
        let shrinking = self.config.gamma * (n.ln() / n).sqrt();
        shrinking.min(2.0 * self.config.step_size)
    }

    fn near(&self, p: Point2, radius: f64) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.position.distance(p) <= radius)
            .map(|(i, _)| i)
            .collect()
    }

    fn edge_free(&self, a: Point2, b: Point2) -> bool {
        segment_free(a, b, self.map, self.config.inflate)
    }

    /// Runs a single sample/extend/rewire iteration.
    pub fn step(&mut self) {
        let sample = self.sample();
        let nearest = self.nearest(sample);
        let from = self.nodes[nearest].position;
        let new_pos = self.steer(from, sample);
        if new_pos == from || !self.edge_free(from, new_pos) {
            return;
        }

        let near = self.near(new_pos, self.near_radius());
        let mut parent = nearest;
        let mut best_cost = self.nodes[nearest].cost + from.distance(new_pos);
        for &i in &near {
            if i == nearest {
                continue;
            }
            let c = self.nodes[i].cost + self.nodes[i].position.distance(new_pos);
            if c < best_cost && self.edge_free(self.nodes[i].position, new_pos) {
                parent = i;
                best_cost = c;
            }
        }

        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            position: new_pos,
            parent: Some(parent),
            cost: best_cost,
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        if new_pos.distance(self.goal) <= self.config.goal_tolerance {
            self.goal_nodes.push(id);
        }

        for &i in &near {
            if i == parent {
                continue;
            }
            let c = best_cost + new_pos.distance(self.nodes[i].position);
            if c < self.nodes[i].cost && self.edge_free(new_pos, self.nodes[i].position) {
                self.reparent(i, id, c);
            }
        }
    }

    fn reparent(&mut self, node: usize, new_parent: usize, cost: f64) {
        if let Some(old) = self.nodes[node].parent {
            self.nodes[old].children.retain(|&c| c != node);
        }
        self.nodes[node].parent = Some(new_parent);
        self.nodes[new_parent].children.push(node);
        self.nodes[node].cost = cost;
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            let (pos, base) = (self.nodes[n].position, self.nodes[n].cost);
            for k in 0..self.nodes[n].children.len() {
                let c = self.nodes[n].children[k];
                self.nodes[c].cost = base + pos.distance(self.nodes[c].position);
                stack.push(c);
            }
        }
    }

    /// Runs the configured number of iterations and returns the cheapest goal branch.
    pub fn run(&mut self) -> Result<PlannedPath, PlanError> {
        for i in 1..=self.config.max_iterations {
            self.step();
            if i % 100 == 0 {
                let best = self.best_goal_cost();
                self.cost_history.push(best);
            }
        }
        self.best_path()
            .ok_or(PlanError::NoPathFound(self.config.max_iterations))
    }

    pub fn best_path(&self) -> Option<PlannedPath> {
        let goal = self.best_goal_node()?;
        let mut vertices = Vec::new();
        let mut cur = Some(goal);
        while let Some(i) = cur {
            vertices.push(self.nodes[i].position);
            cur = self.nodes[i].parent;
        }
        vertices.reverse();
        Some(PlannedPath {
            vertices,
            cost: self.nodes[goal].cost,
        })
    }
}

/// Plans a collision-free polyline from `start` to within `goal_tolerance` of `goal`.
pub fn plan(
    start: Point2,
    goal: Point2,
    map: &WorldMap,
    config: &PlannerConfig,
) -> Result<PlannedPath, PlanError> {
    RrtStar::new(start, goal, map, config.clone())?.run()
}

/// Greedy shortcutting: from the current anchor jump to the farthest later vertex
/// accepted by `connect`. Returns the interior vertices kept (start and goal excluded).
pub fn shortcut_vertices(
    vertices: &[Point2],
    connect: impl Fn(Point2, Point2) -> bool,
) -> Vec<Point2> {
    let mut kept = Vec::new();
    if vertices.len() < 3 {
        return kept;
    }
    let last = vertices.len() - 1;
    let mut anchor = 0;
    while anchor < last {
        let next = (anchor + 2..=last)
            .rev()
            .find(|&j| connect(vertices[anchor], vertices[j]))
            .unwrap_or(anchor + 1);
        if next == last {
            break;
        }
        kept.push(vertices[next]);
        anchor = next;
    }
    kept
}

/// Interior vertices of the connection with the fewest hops; among those, the one whose
/// shortest hop is longest. Falls back to consecutive vertices where `connect` fails.
pub fn fewest_hop_vertices(
    vertices: &[Point2],
    connect: impl Fn(Point2, Point2) -> bool,
) -> Vec<Point2> {
    let n = vertices.len();
    if n < 3 {
        return Vec::new();
    }
    // (hops, shortest hop, predecessor)
    let mut best: Vec<(usize, f64, usize)> = vec![(usize::MAX, 0.0, 0); n];
    best[0] = (0, f64::INFINITY, 0);
    for j in 1..n {
        for i in 0..j {
            if best[i].0 == usize::MAX || (i + 1 != j && !connect(vertices[i], vertices[j])) {
                continue;
            }
            let hops = best[i].0 + 1;
            let shortest = best[i].1.min(vertices[i].distance(vertices[j]));
            if hops < best[j].0 || (hops == best[j].0 && shortest > best[j].1) {
                best[j] = (hops, shortest, i);
            }
        }
    }
    let mut kept = Vec::new();
    let mut j = best[n - 1].2;
    while j != 0 {
        kept.push(vertices[j]);
        j = best[j].2;
    }
    kept.reverse();
    kept
}

/// Waypoints of a planned path: the vertices kept by greedy shortcutting with
/// [`segment_free`] at `inflate`.
pub fn extract_waypoints(path: &PlannedPath, map: &WorldMap, inflate: f64) -> Vec<Point2> {
    shortcut_vertices(&path.vertices, |a, b| segment_free(a, b, map, inflate))
}

/// Resamples a polyline so that consecutive points are at most `spacing` apart.
/// Original vertices are kept.
pub fn densify(vertices: &[Point2], spacing: f64) -> Vec<Point2> {
    let mut out = Vec::with_capacity(vertices.len());
    for w in vertices.windows(2) {
        let n = (w[0].distance(w[1]) / spacing).ceil().max(1.0) as usize;
        out.extend((0..n).map(|i| w[0].lerp(w[1], i as f64 / n as f64)));
    }
    if let Some(&last) = vertices.last() {
        out.push(last);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Obstacle;

    fn empty_map() -> WorldMap {
        WorldMap::new((-5.0, 15.0), (-10.0, 10.0), vec![])
    }

    #[test]
    fn start_equals_goal() {
        let map = empty_map();
        let p = Point2::new(1.0, 1.0);
        let path = plan(p, p, &map, &PlannerConfig::default()).unwrap();
        assert_eq!(path.vertices, vec![p]);
        assert_eq!(path.cost, 0.0);
    }

    #[test]
    fn empty_map_near_straight_line() {
        let map = empty_map();
        let cfg = PlannerConfig {
            max_iterations: 3000,
            rng_seed: 42,
            ..Default::default()
        };
        let path = plan(Point2::new(0.0, 0.0), Point2::new(10.0, 0.0), &map, &cfg).unwrap();
        assert!(path.cost <= 10.5, "cost {}", path.cost);
        assert_eq!(path.vertices[0], Point2::new(0.0, 0.0));
        assert!(
            path.vertices
                .last()
                .unwrap()
                .distance(Point2::new(10.0, 0.0))
                <= cfg.goal_tolerance
        );
    }

    #[test]
    fn rejects_blocked_start_and_bad_config() {
        let map = WorldMap::new(
            (0.0, 10.0),
            (0.0, 10.0),
            vec![Obstacle::circle(5.0, 5.0, 1.0)],
        );
        let cfg = PlannerConfig::default();
        assert!(matches!(
            plan(Point2::new(5.0, 5.0), Point2::new(1.0, 1.0), &map, &cfg),
            Err(PlanError::StartNotFree(_))
        ));
        let bad = PlannerConfig {
            goal_bias: 1.5,
            ..cfg
        };
        assert!(matches!(
            plan(Point2::new(1.0, 1.0), Point2::new(9.0, 9.0), &map, &bad),
            Err(PlanError::InvalidConfig(_))
        ));
    }

    #[test]
    fn sealed_goal_has_no_path() {
        let walls = vec![Obstacle::rect(10.0, 5.0, 0.4, 10.0)];
        let map = WorldMap::new((0.0, 20.0), (0.0, 10.0), walls);
        let cfg = PlannerConfig {
            max_iterations: 500,
            inflate: 0.3,
            ..Default::default()
        };
        let r = plan(Point2::new(2.0, 5.0), Point2::new(18.0, 5.0), &map, &cfg);
        assert_eq!(r, Err(PlanError::NoPathFound(500)));
    }

    #[test]
    fn collinear_path_has_no_waypoints() {
        let map = empty_map();
        let vertices: Vec<_> = (0..10).map(|i| Point2::new(i as f64, 0.0)).collect();
        let path = PlannedPath {
            vertices,
            cost: 9.0,
        };
        assert!(extract_waypoints(&path, &map, 0.5).is_empty());
    }

    #[test]
    fn l_shaped_path_keeps_the_corner() {
        // block occupying the inside of the L
        let map = WorldMap::new(
            (0.0, 10.0),
            (0.0, 10.0),
            vec![Obstacle::rect(3.5, 3.5, 5.5, 5.5)],
        );
        let mut vertices: Vec<_> = (0..=8)
            .map(|i| Point2::new(1.0 + i as f64 * 0.75, 7.0))
            .collect();
        vertices.extend((1..=8).map(|i| Point2::new(7.0, 7.0 - i as f64 * 0.75)));
        let path = PlannedPath {
            vertices,
            cost: 12.0,
        };
        let wps = extract_waypoints(&path, &map, 0.2);
        assert_eq!(wps.len(), 1);
        assert!(wps[0].distance(Point2::new(7.0, 7.0)) < 2.0, "{:?}", wps[0]);
    }

    #[test]
    fn densify_keeps_vertices_and_spacing() {
        let v = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 0.35),
        ];
        let d = densify(&v, 0.1);
        assert_eq!(d.first(), v.first());
        assert_eq!(d.last(), v.last());
        assert!(d.contains(&v[1]));
        assert!(d.windows(2).all(|w| w[0].distance(w[1]) <= 0.1 + 1e-12));
    }
}
