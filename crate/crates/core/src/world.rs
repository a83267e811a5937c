//! Obstacle geometry: signed clearance, collision checks and sailing corridors.
//!
//! Obstacles are axis-aligned rectangles and circles. A corridor is an
//! axis-aligned box that contains two endpoints and stays out of every obstacle
//! grown by a clearance radius (Minkowski sum with a disk).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(&self, other: Point2, s: f64) -> Point2 {
        Point2::new(
            self.x + s * (other.x - self.x),
            self.y + s * (other.y - self.y),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstacle {
    /// Axis-aligned rectangle; `length` spans x, `width` spans y.
    Rect {
        cx: f64,
        cy: f64,
        length: f64,
        width: f64,
    },
    Circle {
        cx: f64,
        cy: f64,
        radius: f64,
    },
}

impl Obstacle {
    pub fn rect(cx: f64, cy: f64, length: f64, width: f64) -> Self {
        Obstacle::Rect {
            cx,
            cy,
            length,
            width,
        }
    }

    pub fn circle(cx: f64, cy: f64, radius: f64) -> Self {
        Obstacle::Circle { cx, cy, radius }
    }

    pub fn validate(&self) -> Result<(), String> {
        let ok = match *self {
            Obstacle::Rect {
                cx,
                cy,
                length,
                width,
            } => {
                if !(length > 0.0 && width > 0.0) {
                    return Err("rect length and width must be > 0".into());
                }
                cx.is_finite() && cy.is_finite() && length.is_finite() && width.is_finite()
            }
            Obstacle::Circle { cx, cy, radius } => {
                if !(radius > 0.0) {
                    return Err("circle radius must be > 0".into());
                }
                cx.is_finite() && cy.is_finite() && radius.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err("obstacle values must be finite".into())
        }
    }

    /// Signed distance from `p` to the boundary; negative inside.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        match *self {
            Obstacle::Rect {
                cx,
                cy,
                length,
                width,
            } => {
                let dx = (p.x - cx).abs() - 0.5 * length;
                let dy = (p.y - cy).abs() - 0.5 * width;
                let outside = dx.max(0.0).hypot(dy.max(0.0));
                let inside = dx.max(dy).min(0.0);
                outside + inside
            }
            Obstacle::Circle { cx, cy, radius } => (p.x - cx).hypot(p.y - cy) - radius,
        }
    }

    /// Unsigned distance from the segment `ab` to the obstacle (zero on contact).
    pub fn segment_distance(&self, a: Point2, b: Point2) -> f64 {
        match *self {
            Obstacle::Rect { .. } => {
                let core = self.core();
                if segment_hits_box(a, b, &core) {
                    return 0.0;
                }
                // Two disjoint convex sets: the minimum is attained at a vertex of one.
                let mut d = self.signed_distance(a).min(self.signed_distance(b));
                for corner in core.corners() {
                    d = d.min(point_segment_distance(corner, a, b));
                }
                d.max(0.0)
            }
            Obstacle::Circle { cx, cy, radius } => {
                (point_segment_distance(Point2::new(cx, cy), a, b) - radius).max(0.0)
            }
        }
    }

    /// Core box and rounding radius whose Minkowski sum is the obstacle grown by `inflate`.
    fn grown(&self, inflate: f64) -> (Aabb, f64) {
        match *self {
            Obstacle::Rect { .. } => (self.core(), inflate),
            Obstacle::Circle { cx, cy, radius } => (
                Aabb {
                    x0: cx,
                    x1: cx,
                    y0: cy,
                    y1: cy,
                },
                radius + inflate,
            ),
        }
    }

    fn core(&self) -> Aabb {
        match *self {
            Obstacle::Rect {
                cx,
                cy,
                length,
                width,
            } => Aabb {
                x0: cx - 0.5 * length,
                x1: cx + 0.5 * length,
                y0: cy - 0.5 * width,
                y1: cy + 0.5 * width,
            },
            Obstacle::Circle { cx, cy, radius } => Aabb {
                x0: cx - radius,
                x1: cx + radius,
                y0: cy - radius,
                y1: cy + radius,
            },
        }
    }

    /// The same obstacle with rectangles grown by `by` on every side (square
    /// corners) and circles grown by `by` in radius.
    pub fn expanded(&self, by: f64) -> Obstacle {
        match *self {
            Obstacle::Rect {
                cx,
                cy,
                length,
                width,
            } => Obstacle::Rect {
                cx,
                cy,
                length: length + 2.0 * by,
                width: width + 2.0 * by,
            },
            Obstacle::Circle { cx, cy, radius } => Obstacle::Circle {
                cx,
                cy,
                radius: radius + by,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Aabb {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Aabb {
    fn corners(&self) -> [Point2; 4] {
        [
            Point2::new(self.x0, self.y0),
            Point2::new(self.x1, self.y0),
            Point2::new(self.x1, self.y1),
            Point2::new(self.x0, self.y1),
        ]
    }
}

fn interval_gap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (b0 - a1).max(a0 - b1).max(0.0)
}

/// Closed `[a0, a1]` meets the open `(b0, b1)`.
fn meets_open(a0: f64, a1: f64, b0: f64, b1: f64) -> bool {
    a0 < b1 && b0 < a1
}

pub(crate) fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let s = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(Point2::new(a.x + s * dx, a.y + s * dy))
}

/// Liang–Barsky clip of segment `ab` against a closed box.
fn segment_hits_box(a: Point2, b: Point2, bx: &Aabb) -> bool {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [
        (-dx, a.x - bx.x0),
        (dx, bx.x1 - a.x),
        (-dy, a.y - bx.y0),
        (dy, bx.y1 - a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Axis-aligned box bounding the positions of one sub-trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corridor {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Corridor {
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    fn aabb(&self) -> Aabb {
        Aabb {
            x0: self.x_min,
            x1: self.x_max,
            y0: self.y_min,
            y1: self.y_max,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorldError {
    #[error("corridor seed box [{x_min}, {x_max}] x [{y_min}, {y_max}] intersects an inflated obstacle or leaves the map")]
    SeedBoxBlocked {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },
    #[error("invalid map: {0}")]
    InvalidMap(String),
}

/// Static map: extents, obstacles and a safety margin added on top of the hull radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldMap {
    pub x_bounds: (f64, f64),
    pub y_bounds: (f64, f64),
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    #[serde(default)]
    pub margin: f64,
}

impl WorldMap {
    pub fn new(x_bounds: (f64, f64), y_bounds: (f64, f64), obstacles: Vec<Obstacle>) -> Self {
        Self {
            x_bounds,
            y_bounds,
            obstacles,
            margin: 0.0,
        }
    }

    /// 20 m × 20 m arena with two 5 × 4 m cuboids centred at (4.7, 8) and (15, 6)
    /// and a cylinder of radius 1.5 m at (14, 12).
    pub fn reference() -> Self {
        Self {
            x_bounds: (0.0, 20.0),
            y_bounds: (0.0, 20.0),
            obstacles: vec![
                Obstacle::rect(4.7, 8.0, 5.0, 4.0),
                Obstacle::rect(15.0, 6.0, 5.0, 4.0),
                Obstacle::circle(14.0, 12.0, 1.5),
            ],
            margin: 0.1,
        }
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        let (x0, x1) = self.x_bounds;
        let (y0, y1) = self.y_bounds;
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(WorldError::InvalidMap(
                "map bounds must be finite and non-degenerate".into(),
            ));
        }
        if !(self.margin >= 0.0) {
            return Err(WorldError::InvalidMap("margin must be >= 0".into()));
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            o.validate()
                .map_err(|e| WorldError::InvalidMap(format!("obstacle {i}: {e}")))?;
        }
        Ok(())
    }

    /// Configuration-space map for a disk of radius `by`: rectangles grow by `by`
    /// on each side, circles by `by` in radius, and the bounds shrink by `by`.
    pub fn grown(&self, by: f64) -> WorldMap {
        WorldMap {
            x_bounds: (self.x_bounds.0 + by, self.x_bounds.1 - by),
            y_bounds: (self.y_bounds.0 + by, self.y_bounds.1 - by),
            obstacles: self.obstacles.iter().map(|o| o.expanded(by)).collect(),
            margin: self.margin,
        }
    }

    fn in_bounds(&self, p: Point2, inflate: f64) -> bool {
        p.x >= self.x_bounds.0 + inflate
            && p.x <= self.x_bounds.1 - inflate
            && p.y >= self.y_bounds.0 + inflate
            && p.y <= self.y_bounds.1 - inflate
    }
}

/// Signed distance to the nearest obstacle boundary; `f64::INFINITY` for an empty map.
/// The map boundary does not count as an obstacle.
pub fn clearance(p: Point2, map: &WorldMap) -> f64 {
    map.obstacles
        .iter()
        .map(|o| o.signed_distance(p))
        .fold(f64::INFINITY, f64::min)
}

pub fn is_free(p: Point2, map: &WorldMap, inflate: f64) -> bool {
    clearance(p, map) > inflate && map.in_bounds(p, inflate)
}

/// Exact segment test: every point of `ab` has clearance greater than `inflate`
/// and lies inside the bounds shrunk by `inflate`.
pub fn segment_free(a: Point2, b: Point2, map: &WorldMap, inflate: f64) -> bool {
    map.in_bounds(a, inflate)
        && map.in_bounds(b, inflate)
        && map
            .obstacles
            .iter()
            .all(|o| o.segment_distance(a, b) > inflate)
}

fn box_blocked(bx: &Aabb, o: &Obstacle, inflate: f64) -> bool {
    let (core, rho) = o.grown(inflate);
    let gx = interval_gap(bx.x0, bx.x1, core.x0, core.x1);
    let gy = interval_gap(bx.y0, bx.y1, core.y0, core.y1);
    gx.hypot(gy) < rho
        || (meets_open(bx.x0, bx.x1, core.x0, core.x1)
            && meets_open(bx.y0, bx.y1, core.y0, core.y1))
}

/// Whether the bounding box of `a` and `b` stays clear of every obstacle grown by
/// `inflate` and inside the bounds shrunk by `inflate`. A corridor through `a`
/// and `b` exists exactly when this holds.
pub fn seed_box_free(a: Point2, b: Point2, map: &WorldMap, inflate: f64) -> bool {
    let seed = Aabb {
        x0: a.x.min(b.x),
        x1: a.x.max(b.x),
        y0: a.y.min(b.y),
        y1: a.y.max(b.y),
    };
    map.in_bounds(a, inflate)
        && map.in_bounds(b, inflate)
        && !map.obstacles.iter().any(|o| box_blocked(&seed, o, inflate))
}

#[derive(Clone, Copy)]
enum Side {
    XMin,
    XMax,
    YMin,
    YMax,
}

/// How far the given side may travel before touching obstacle `o` grown by `inflate`.
fn side_limit(bx: &Aabb, side: Side, o: &Obstacle, inflate: f64) -> Option<f64> {
    let (core, rho) = o.grown(inflate);
    let (lo, hi, c_lo, c_hi) = match side {
        Side::XMin | Side::XMax => (bx.y0, bx.y1, core.y0, core.y1),
        Side::YMin | Side::YMax => (bx.x0, bx.x1, core.x0, core.x1),
    };
    let gap = interval_gap(lo, hi, c_lo, c_hi);
    let reach = if gap < rho {
        (rho * rho - gap * gap).sqrt()
    } else if meets_open(lo, hi, c_lo, c_hi) {
        0.0
    } else {
        return None;
    };
    const EPS: f64 = 1e-9;
    match side {
        Side::XMin => (core.x1 + reach <= bx.x0 + EPS).then_some(core.x1 + reach),
        Side::XMax => (core.x0 - reach >= bx.x1 - EPS).then_some(core.x0 - reach),
        Side::YMin => (core.y1 + reach <= bx.y0 + EPS).then_some(core.y1 + reach),
        Side::YMax => (core.y0 - reach >= bx.y1 - EPS).then_some(core.y0 - reach),
    }
}

/// Grows the bounding box of `a` and `b` one side at a time (x_min, x_max, y_min,
/// y_max, round-robin) until every side rests on an obstacle grown by `inflate`
/// or on the map bounds shrunk by `inflate`.
pub fn compute_corridor(
    a: Point2,
    b: Point2,
    map: &WorldMap,
    inflate: f64,
) -> Result<Corridor, WorldError> {
    let mut bx = Aabb {
        x0: a.x.min(b.x),
        x1: a.x.max(b.x),
        y0: a.y.min(b.y),
        y1: a.y.max(b.y),
    };
    if !seed_box_free(a, b, map, inflate) {
        return Err(WorldError::SeedBoxBlocked {
            x_min: bx.x0,
            x_max: bx.x1,
            y_min: bx.y0,
            y_max: bx.y1,
        });
    }
    let bounds = Aabb {
        x0: map.x_bounds.0 + inflate,
        x1: map.x_bounds.1 - inflate,
        y0: map.y_bounds.0 + inflate,
        y1: map.y_bounds.1 - inflate,
    };
    loop {
        let before = bx;
        for side in [Side::XMin, Side::XMax, Side::YMin, Side::YMax] {
            let limits = map
                .obstacles
                .iter()
                .filter_map(|o| side_limit(&bx, side, o, inflate));
            match side {
                Side::XMin => bx.x0 = limits.fold(bounds.x0, f64::max).min(bx.x0),
                Side::XMax => bx.x1 = limits.fold(bounds.x1, f64::min).max(bx.x1),
                Side::YMin => bx.y0 = limits.fold(bounds.y0, f64::max).min(bx.y0),
                Side::YMax => bx.y1 = limits.fold(bounds.y1, f64::min).max(bx.y1),
            }
        }
        if bx == before {
            break;
        }
    }
    Ok(Corridor {
        x_min: bx.x0,
        x_max: bx.x1,
        y_min: bx.y0,
        y_max: bx.y1,
    })
}

/// Whether the corridor interior stays out of every obstacle grown by `inflate`.
pub fn corridor_is_clear(corridor: &Corridor, map: &WorldMap, inflate: f64) -> bool {
    let bx = corridor.aabb();
    let shrink = |lo: f64, hi: f64| {
        let pad = 1e-9 * (hi - lo).abs().max(1.0);
        (lo + pad, hi - pad)
    };
    let (x0, x1) = shrink(bx.x0, bx.x1);
    let (y0, y1) = shrink(bx.y0, bx.y1);
    let inner = Aabb { x0, x1, y0, y1 };
    !map.obstacles
        .iter()
        .any(|o| box_blocked(&inner, o, inflate - 1e-9))
}

/// Minimum clearance over a set of sampled positions.
pub fn min_trajectory_clearance(samples: &[Point2], map: &WorldMap) -> f64 {
    samples
        .iter()
        .map(|&p| clearance(p, map))
        .fold(f64::INFINITY, f64::min)
}
