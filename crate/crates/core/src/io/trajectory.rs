//! CSV files: trajectory series, waypoints and corridors.

use crate::dynamics::{
    acceleration, allocate_thrusters, wrap_angle, BodyAcceleration, BodyVelocity, ControlInput,
    Pose, ThrusterForces, VesselParams,
};
use crate::pipeline::FullTrajectory;
use crate::simulator::{Reference, SimSample};
use crate::world::{Corridor, Point2};
use std::io::{Read, Write};
use thiserror::Error;

pub const TRAJECTORY_HEADER: [&str; 15] = [
    "t", "x", "y", "psi", "u", "v", "r", "du", "dv", "dr", "tau_u", "tau_r", "F1", "F2", "segment",
];
pub const WAYPOINT_HEADER: [&str; 3] = ["index", "x", "y"];
pub const CORRIDOR_HEADER: [&str; 5] = ["segment", "x_min", "x_max", "y_min", "y_max"];

/// Sub-samples written per collocation interval of a planned trajectory.
pub const SAMPLES_PER_INTERVAL: usize = 5;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("bad header: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("file has no data rows")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub pose: Pose,
    pub vel: BodyVelocity,
    pub acc: [f64; 3],
    pub tau: ControlInput,
    pub forces: [f64; 2],
    pub segment: usize,
}

impl TrajectoryRow {
    fn from_state(
        t: f64,
        x: &[f64],
        tau: ControlInput,
        segment: usize,
        params: &VesselParams,
    ) -> Self {
        let vel = BodyVelocity::new(x[3], x[4], x[5]);
        let acc = acceleration(vel, tau, params);
        let f = allocate_thrusters(tau, params);
        Self {
            t,
            pose: Pose::new(x[0], x[1], wrap_angle(x[2])),
            vel,
            acc: [acc.du, acc.dv, acc.dr],
            tau,
            forces: [f.port, f.starboard],
            segment,
        }
    }

    fn fields(&self) -> [f64; 14] {
        [
            self.t,
            self.pose.x,
            self.pose.y,
            self.pose.psi,
            self.vel.u,
            self.vel.v,
            self.vel.r,
            self.acc[0],
            self.acc[1],
            self.acc[2],
            self.tau.tau_u,
            self.tau.tau_r,
            self.forces[0],
            self.forces[1],
        ]
    }
}

impl From<&SimSample> for TrajectoryRow {
    fn from(s: &SimSample) -> Self {
        Self {
            t: s.t,
            pose: s.pose,
            vel: s.vel,
            acc: [s.acc.du, s.acc.dv, s.acc.dr],
            tau: s.tau,
            forces: [s.forces.port, s.forces.starboard],
            segment: s.segment,
        }
    }
}

impl From<&TrajectoryRow> for SimSample {
    fn from(r: &TrajectoryRow) -> Self {
        SimSample {
            t: r.t,
            pose: r.pose,
            vel: r.vel,
            acc: BodyAcceleration {
                du: r.acc[0],
                dv: r.acc[1],
                dr: r.acc[2],
            },
            tau: r.tau,
            forces: ThrusterForces {
                port: r.forces[0],
                starboard: r.forces[1],
            },
            segment: r.segment,
        }
    }
}

/// Node rows plus [`SAMPLES_PER_INTERVAL`] evenly spaced rows per interval. The junction
/// row between two segments is written once, tagged with the earlier segment.
pub fn planned_rows(traj: &FullTrajectory, params: &VesselParams) -> Vec<TrajectoryRow> {
    let mut rows = Vec::new();
    for (i, (seg, t0)) in traj.segments.iter().zip(traj.segment_offsets()).enumerate() {
        let h = seg.step();
        let first = if i == 0 { 0 } else { 1 };
        for k in 0..seg.nodes() - 1 {
            for j in 0..SAMPLES_PER_INTERVAL {
                if k == 0 && j < first {
                    continue;
                }
                let s = (k as f64 + j as f64 / SAMPLES_PER_INTERVAL as f64) * h;
                rows.push(TrajectoryRow::from_state(
                    t0 + s,
                    &seg.state_at(s),
                    seg.control_at(s),
                    i,
                    params,
                ));
            }
        }
        let x = seg.states.last().expect("segment has nodes");
        let c = seg.controls.last().expect("segment has nodes");
        rows.push(TrajectoryRow::from_state(
            t0 + seg.duration,
            x,
            ControlInput::new(c[0], c[1]),
            i,
            params,
        ));
    }
    rows
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

pub fn write_trajectory<W: Write>(out: W, rows: &[TrajectoryRow]) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for row in rows {
        let mut rec: Vec<String> = row.fields().iter().map(|&v| num(v)).collect();
        rec.push(row.segment.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn check_header(r: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<(), CsvError> {
    let found = r.headers()?.clone();
    if found.iter().ne(expected.iter().copied()) {
        return Err(CsvError::Header {
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(())
}

fn parse_f64(rec: &csv::StringRecord, i: usize, name: &str, row: usize) -> Result<f64, CsvError> {
    let v: f64 = rec[i].trim().parse().map_err(|_| CsvError::Row {
        row,
        message: format!("{name} is not a number: `{}`", &rec[i]),
    })?;
    if !v.is_finite() {
        return Err(CsvError::Row {
            row,
            message: format!("{name} is not finite"),
        });
    }
    Ok(v)
}

fn parse_index(
    rec: &csv::StringRecord,
    i: usize,
    name: &str,
    row: usize,
) -> Result<usize, CsvError> {
    rec[i].trim().parse().map_err(|_| CsvError::Row {
        row,
        message: format!("{name} is not a non-negative integer: `{}`", &rec[i]),
    })
}

/// Reads and validates a trajectory CSV. Row numbers in errors count the header as row 1.
pub fn read_trajectory<R: Read>(input: R) -> Result<Vec<TrajectoryRow>, CsvError> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &TRAJECTORY_HEADER)?;
    let mut rows: Vec<TrajectoryRow> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let mut v = [0.0; 14];
        for (j, slot) in v.iter_mut().enumerate() {
            *slot = parse_f64(&rec, j, TRAJECTORY_HEADER[j], row)?;
        }
        let segment = parse_index(&rec, 14, "segment", row)?;
        if let Some(prev) = rows.last() {
            if v[0] <= prev.t {
                return Err(CsvError::Row {
                    row,
                    message: format!("t = {} does not increase (previous {})", v[0], prev.t),
                });
            }
            if segment < prev.segment {
                return Err(CsvError::Row {
                    row,
                    message: format!("segment index decreases from {} to {segment}", prev.segment),
                });
            }
        }
        rows.push(TrajectoryRow {
            t: v[0],
            pose: Pose::new(v[1], v[2], v[3]),
            vel: BodyVelocity::new(v[4], v[5], v[6]),
            acc: [v[7], v[8], v[9]],
            tau: ControlInput::new(v[10], v[11]),
            forces: [v[12], v[13]],
            segment,
        });
    }
    if rows.is_empty() {
        return Err(CsvError::Empty);
    }
    Ok(rows)
}

pub fn write_waypoints<W: Write>(out: W, waypoints: &[Point2]) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(WAYPOINT_HEADER)?;
    for (i, p) in waypoints.iter().enumerate() {
        w.write_record([i.to_string(), num(p.x), num(p.y)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_waypoints<R: Read>(input: R) -> Result<Vec<Point2>, CsvError> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &WAYPOINT_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        if parse_index(&rec, 0, "index", row)? != i {
            return Err(CsvError::Row {
                row,
                message: format!("index must be {i}"),
            });
        }
        out.push(Point2::new(
            parse_f64(&rec, 1, "x", row)?,
            parse_f64(&rec, 2, "y", row)?,
        ));
    }
    Ok(out)
}

pub fn write_corridors<W: Write>(out: W, corridors: &[Corridor]) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CORRIDOR_HEADER)?;
    for (i, c) in corridors.iter().enumerate() {
        w.write_record([
            i.to_string(),
            num(c.x_min),
            num(c.x_max),
            num(c.y_min),
            num(c.y_max),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_corridors<R: Read>(input: R) -> Result<Vec<Corridor>, CsvError> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &CORRIDOR_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        if parse_index(&rec, 0, "segment", row)? != i {
            return Err(CsvError::Row {
                row,
                message: format!("segment must be {i}"),
            });
        }
        let c = Corridor {
            x_min: parse_f64(&rec, 1, "x_min", row)?,
            x_max: parse_f64(&rec, 2, "x_max", row)?,
            y_min: parse_f64(&rec, 3, "y_min", row)?,
            y_max: parse_f64(&rec, 4, "y_max", row)?,
        };
        if c.x_min > c.x_max || c.y_min > c.y_max {
            return Err(CsvError::Row {
                row,
                message: "corridor has negative extent".into(),
            });
        }
        out.push(c);
    }
    Ok(out)
}

/// A trajectory read back from CSV, usable as a simulation reference. Control and
/// position are interpolated linearly between rows.
#[derive(Debug, Clone)]
pub struct SampledTrajectory {
    pub rows: Vec<TrajectoryRow>,
}

impl SampledTrajectory {
    pub fn new(rows: Vec<TrajectoryRow>) -> Result<Self, CsvError> {
        if rows.is_empty() {
            return Err(CsvError::Empty);
        }
        if rows[0].t.abs() > 1e-9 {
            return Err(CsvError::Row {
                row: 2,
                message: format!("trajectory must start at t = 0, found {}", rows[0].t),
            });
        }
        Ok(Self { rows })
    }

    /// Index `i` and weight `w` such that time `t` lies between rows `i` and `i + 1`.
    fn bracket(&self, t: f64) -> (usize, f64) {
        let n = self.rows.len();
        if n == 1 || t <= self.rows[0].t {
            return (0, 0.0);
        }
        if t >= self.rows[n - 1].t {
            return (n - 2, 1.0);
        }
        let i = self.rows.partition_point(|r| r.t <= t) - 1;
        let (a, b) = (&self.rows[i], &self.rows[i + 1]);
        (i, (t - a.t) / (b.t - a.t))
    }

    fn lerp_with(&self, t: f64, f: impl Fn(&TrajectoryRow) -> f64) -> f64 {
        let (i, w) = self.bracket(t);
        match self.rows.get(i + 1) {
            Some(b) => f(&self.rows[i]) * (1.0 - w) + f(b) * w,
            None => f(&self.rows[i]),
        }
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.rows
            .iter()
            .map(|r| Point2::new(r.pose.x, r.pose.y))
            .collect()
    }
}

impl Reference for SampledTrajectory {
    fn duration(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.t)
    }

    fn initial_state(&self) -> (Pose, BodyVelocity) {
        (self.rows[0].pose, self.rows[0].vel)
    }

    fn control_at(&self, t: f64) -> ControlInput {
        ControlInput::new(
            self.lerp_with(t, |r| r.tau.tau_u),
            self.lerp_with(t, |r| r.tau.tau_r),
        )
    }

    fn position_at(&self, t: f64) -> Point2 {
        Point2::new(
            self.lerp_with(t, |r| r.pose.x),
            self.lerp_with(t, |r| r.pose.y),
        )
    }

    fn segment_at(&self, t: f64) -> usize {
        let (i, w) = self.bracket(t);
        if w > 0.0 && i + 1 < self.rows.len() {
            self.rows[i + 1].segment
        } else {
            self.rows[i].segment
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64, segment: usize) -> TrajectoryRow {
        TrajectoryRow {
            t,
            pose: Pose::new(t, 2.0 * t, 0.1),
            vel: BodyVelocity::new(1.0, 0.0, 0.0),
            acc: [0.0; 3],
            tau: ControlInput::new(20.0 + t, -t),
            forces: [10.0, 10.0],
            segment,
        }
    }

    #[test]
    fn trajectory_round_trip() {
        let rows: Vec<_> = (0..10).map(|i| row(i as f64 * 0.5, i / 4)).collect();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,x,y,psi,u,v,r,du,dv,dr,tau_u,tau_r,F1,F2,segment\n"));
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("0.000000,0.000000,0.000000,0.100000,"));
        assert_eq!(read_trajectory(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn rejects_decreasing_time() {
        let text = "t,x,y,psi,u,v,r,du,dv,dr,tau_u,tau_r,F1,F2,segment\n\
                    0,0,0,0,0,0,0,0,0,0,0,0,0,0,0\n\
                    1,0,0,0,0,0,0,0,0,0,0,0,0,0,0\n\
                    0.5,0,0,0,0,0,0,0,0,0,0,0,0,0,0\n";
        match read_trajectory(text.as_bytes()) {
            Err(CsvError::Row { row, .. }) => assert_eq!(row, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_header_and_segments() {
        assert!(matches!(
            read_trajectory("t,x\n0,0\n".as_bytes()),
            Err(CsvError::Header { .. })
        ));
        let text = "t,x,y,psi,u,v,r,du,dv,dr,tau_u,tau_r,F1,F2,segment\n\
                    0,0,0,0,0,0,0,0,0,0,0,0,0,0,1\n\
                    1,0,0,0,0,0,0,0,0,0,0,0,0,0,0\n";
        assert!(matches!(
            read_trajectory(text.as_bytes()),
            Err(CsvError::Row { row: 3, .. })
        ));
        let text =
            "t,x,y,psi,u,v,r,du,dv,dr,tau_u,tau_r,F1,F2,segment\n0,nan,0,0,0,0,0,0,0,0,0,0,0,0,0\n";
        assert!(read_trajectory(text.as_bytes()).is_err());
        assert!(matches!(
            read_trajectory(&TRAJECTORY_HEADER.join(",").into_bytes()[..]),
            Err(CsvError::Empty)
        ));
    }

    #[test]
    fn waypoints_and_corridors_round_trip() {
        let wps = vec![Point2::new(1.5, 2.25), Point2::new(-3.0, 4.0)];
        let mut buf = Vec::new();
        write_waypoints(&mut buf, &wps).unwrap();
        assert_eq!(read_waypoints(buf.as_slice()).unwrap(), wps);

        let cs = vec![Corridor {
            x_min: 0.0,
            x_max: 1.0,
            y_min: -1.0,
            y_max: 2.5,
        }];
        let mut buf = Vec::new();
        write_corridors(&mut buf, &cs).unwrap();
        assert_eq!(read_corridors(buf.as_slice()).unwrap(), cs);
    }

    #[test]
    fn sampled_reference_interpolates() {
        let rows: Vec<_> = (0..5)
            .map(|i| row(i as f64, if i < 3 { 0 } else { 1 }))
            .collect();
        let s = SampledTrajectory::new(rows).unwrap();
        assert_eq!(s.duration(), 4.0);
        assert!((s.control_at(1.5).tau_u - 21.5).abs() < 1e-12);
        assert!((s.position_at(2.25).y - 4.5).abs() < 1e-12);
        assert_eq!(s.segment_at(2.0), 0);
        assert_eq!(s.segment_at(2.5), 1);
        assert_eq!(s.control_at(10.0).tau_u, 24.0);
    }
}
