//! Trajectory planning for an under-actuated twin-thruster surface vessel: a sampling
//! front end finds a collision-free path, the path is cut into waypoints with an
//! obstacle-free box corridor per segment, and each segment is solved as a direct
//! collocation problem with an augmented Lagrangian solver.

pub mod cli;
pub mod dynamics;
pub mod io;
pub mod nlp_solver;
pub mod pipeline;
pub mod rrt_star;
pub mod simulator;
pub mod transcription;
pub mod world;
