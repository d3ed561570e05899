//! Fitted-mesh finite-difference solver for singularly perturbed parabolic
//! reaction-diffusion problems
//!
//! ```text
//! u_t - eps * u_xx + a(x,t) u = f(x,t)   on (0,1) x (0,T]
//! ```
//!
//! with Robin boundary conditions
//!
//! ```text
//! u(0,t) - u_x(0,t) = phi_L(t),   u(1,t) + u_x(1,t) = phi_R(t),
//! ```
//!
//! and initial condition u(x,0) = phi_B(x). The scheme is implicit Euler in
//! time and a second central difference in space on a piecewise-uniform
//! Shishkin mesh, with the Robin rows discretized by one-sided first
//! differences. A two-mesh harness estimates the parameter-uniform order of
//! convergence and error constants when no exact solution is available.

pub mod analysis;
pub mod config;
pub mod exprlang;
pub mod mesh;
pub mod problem;
pub mod solver;

mod error;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
