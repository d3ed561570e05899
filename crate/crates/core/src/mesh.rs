//! Piecewise-uniform fitted space mesh, uniform time mesh, and the boundary
//! layer functions.
//!
//! The space mesh splits [0,1] into [0,sigma], (sigma,1-sigma] and
//! (1-sigma,1] with N/4, N/2 and N/4 uniform intervals respectively, where
//! sigma = min(1/4, 2*sqrt(eps/alpha)*ln N). When sigma clamps to 1/4 the
//! mesh degenerates to the classical uniform mesh.

use std::io::Write;

use crate::{Error, Result};

/// Transition parameter sigma = min(1/4, 2*sqrt(eps/alpha)*ln N).
pub fn transition_parameter(epsilon: f64, alpha: f64, n: usize) -> f64 {
    (2.0 * (epsilon / alpha).sqrt() * (n as f64).ln()).min(0.25)
}

/// Layer functions (BL, BR, B) at x:
/// BL(x) = exp(-x*sqrt(alpha/eps)), BR(x) = BL(1-x), B = BL + BR.
pub fn layer_functions(x: f64, epsilon: f64, alpha: f64) -> (f64, f64, f64) {
    let rate = (alpha / epsilon).sqrt();
    let bl = (-x * rate).exp();
    let br = (-(1.0 - x) * rate).exp();
    (bl, br, bl + br)
}

/// Piecewise-uniform space mesh on [0,1] with N intervals.
#[derive(Clone, Debug)]
pub struct SpaceMesh {
    points: Vec<f64>,
    sigma: f64,
    n: usize,
    h_layer: f64,
    h_interior: f64,
}

impl SpaceMesh {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn h_layer(&self) -> f64 {
        self.h_layer
    }

    pub fn h_interior(&self) -> f64 {
        self.h_interior
    }

    /// Width h_j = x_j - x_{j-1}, for 1 <= j <= N.
    pub fn width(&self, j: usize) -> f64 {
        self.points[j] - self.points[j - 1]
    }

    /// One point per line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x")?;
        for &x in &self.points {
            writeln!(w, "{x:.16e}")?;
        }
        Ok(())
    }
}

/// Build the fitted space mesh for the given eps, alpha and interval count N.
pub fn build_space_mesh(epsilon: f64, alpha: f64, n: usize) -> Result<SpaceMesh> {
    if n % 4 != 0 || n < 8 {
        return Err(Error::BadArgument(format!(
            "N must be divisible by 4 and >= 8, got {n}"
        )));
    }
    let sigma = transition_parameter(epsilon, alpha, n);
    let q = n / 4;
    let mut points = Vec::with_capacity(n + 1);
    // Region endpoints are assigned exactly so that x_{N/4} = sigma and
    // x_{3N/4} = 1 - sigma are bit-exact mesh points.
    for j in 0..q {
        points.push(sigma * j as f64 / q as f64);
    }
    points.push(sigma);
    for j in 1..(2 * q) {
        points.push(sigma + (1.0 - 2.0 * sigma) * j as f64 / (2 * q) as f64);
    }
    points.push(1.0 - sigma);
    for j in 1..q {
        points.push(1.0 - sigma * (q - j) as f64 / q as f64);
    }
    points.push(1.0);
    debug_assert_eq!(points.len(), n + 1);
    let h_layer = 4.0 * sigma / n as f64;
    let h_interior = 2.0 * (1.0 - 2.0 * sigma) / n as f64;
    Ok(SpaceMesh {
        points,
        sigma,
        n,
        h_layer,
        h_interior,
    })
}

/// Uniform time mesh on [0,T] with M intervals.
#[derive(Clone, Debug)]
pub struct TimeMesh {
    levels: Vec<f64>,
    m: usize,
    tau: f64,
}

impl TimeMesh {
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn t_final(&self) -> f64 {
        *self.levels.last().unwrap()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t")?;
        for &t in &self.levels {
            writeln!(w, "{t:.16e}")?;
        }
        Ok(())
    }
}

pub fn build_time_mesh(t_final: f64, m: usize) -> Result<TimeMesh> {
    if !(t_final > 0.0) {
        return Err(Error::BadArgument(format!("T must be > 0, got {t_final}")));
    }
    if m < 1 {
        return Err(Error::BadArgument("M must be >= 1".into()));
    }
    let mut levels: Vec<f64> = (0..m).map(|k| k as f64 * t_final / m as f64).collect();
    levels.push(t_final);
    Ok(TimeMesh {
        levels,
        m,
        tau: t_final / m as f64,
    })
}
