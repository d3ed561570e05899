//! The discrete problem: implicit Euler in time, second central difference in
//! space on the fitted mesh, Robin rows via one-sided first differences, and
//! the tridiagonal solve that advances one time level.

use std::io::Write;

use crate::mesh::{SpaceMesh, TimeMesh};
use crate::problem::Problem;
use crate::{Error, Result};

/// One time level's linear system. Every system assembled by this module is
/// strictly diagonally dominant by rows.
#[derive(Clone, Debug)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Dominance margin |d_i| - |l_{i-1}| - |u_i| of row i.
    pub fn dominance_margin(&self, i: usize) -> f64 {
        let mut m = self.diag[i].abs();
        if i > 0 {
            m -= self.lower[i - 1].abs();
        }
        if i < self.n() - 1 {
            m -= self.upper[i].abs();
        }
        m
    }

    pub fn is_strictly_dominant(&self) -> bool {
        (0..self.n()).all(|i| self.dominance_margin(i) > 0.0)
    }
}

/// Second central difference on a nonuniform mesh:
///
/// ```text
/// (2/(h_left+h_right)) * ((u_next-u_mid)/h_right - (u_mid-u_prev)/h_left)
/// ```
///
/// Exact for quadratics on any widths.
pub fn second_difference(u_prev: f64, u_mid: f64, u_next: f64, h_left: f64, h_right: f64) -> f64 {
    2.0 / (h_left + h_right) * ((u_next - u_mid) / h_right - (u_mid - u_prev) / h_left)
}

/// Assemble the system for the level t_k given the solution at the previous
/// level. Interior rows discretize u_t - eps u_xx + a u = f fully implicitly;
/// the first and last rows are the discrete Robin conditions
/// U_0 - D+x U_0 = phi_L(t_k) and U_N + D-x U_N = phi_R(t_k).
pub fn assemble_time_step(
    p: &Problem,
    sm: &SpaceMesh,
    tau: f64,
    t_k: f64,
    u_prev_level: &[f64],
) -> Result<TridiagonalSystem> {
    let n = sm.n();
    assert_eq!(u_prev_level.len(), n + 1, "previous level has wrong length");
    let x = sm.points();
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n + 1];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n + 1];

    let finite = |name: &str, v: f64, xx: f64| -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::DataEval {
                field: name.to_string(),
                x: xx,
                t: t_k,
            })
        }
    };

    let h1 = sm.width(1);
    diag[0] = 1.0 + 1.0 / h1;
    upper[0] = -1.0 / h1;
    rhs[0] = finite("phi_L", p.phi_l.eval(t_k), 0.0)?;

    for j in 1..n {
        let hj = sm.width(j);
        let hj1 = sm.width(j + 1);
        let aj = finite("a", p.a.eval(x[j], t_k), x[j])?;
        let fj = finite("f", p.f.eval(x[j], t_k), x[j])?;
        lower[j - 1] = -2.0 * p.epsilon / (hj * (hj + hj1));
        diag[j] = 1.0 / tau + 2.0 * p.epsilon / (hj * hj1) + aj;
        upper[j] = -2.0 * p.epsilon / (hj1 * (hj + hj1));
        rhs[j] = fj + u_prev_level[j] / tau;
    }

    let hn = sm.width(n);
    lower[n - 1] = -1.0 / hn;
    diag[n] = 1.0 + 1.0 / hn;
    rhs[n] = finite("phi_R", p.phi_r.eval(t_k), 1.0)?;

    Ok(TridiagonalSystem {
        lower,
        diag,
        upper,
        rhs,
    })
}

/// Thomas elimination without pivoting. Requires strict diagonal dominance;
/// a zero pivot (only possible on non-dominant input) is reported rather
/// than producing NaNs.
pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    let n = sys.n();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = sys.diag[0];
    if pivot == 0.0 {
        return Err(Error::Numeric("zero pivot at row 0".into()));
    }
    if n > 1 {
        c[0] = sys.upper[0] / pivot;
    }
    d[0] = sys.rhs[0] / pivot;
    for i in 1..n {
        pivot = sys.diag[i] - sys.lower[i - 1] * c[i - 1];
        if pivot == 0.0 {
            return Err(Error::Numeric(format!("zero pivot at row {i}")));
        }
        if i < n - 1 {
            c[i] = sys.upper[i] / pivot;
        }
        d[i] = (sys.rhs[i] - sys.lower[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// The computed solution over the (N+1) x (M+1) tensor grid. Immutable once
/// the march completes; values are stored row-major over (k, j).
#[derive(Clone, Debug)]
pub struct GridSolution {
    values: Vec<f64>,
    space_mesh: SpaceMesh,
    time_mesh: TimeMesh,
    problem: Problem,
}

impl GridSolution {
    pub fn space_mesh(&self) -> &SpaceMesh {
        &self.space_mesh
    }

    pub fn time_mesh(&self) -> &TimeMesh {
        &self.time_mesh
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    /// U(x_j, t_k).
    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.values[k * (self.space_mesh.n() + 1) + j]
    }

    /// All values at time level k.
    pub fn level(&self, k: usize) -> &[f64] {
        let w = self.space_mesh.n() + 1;
        &self.values[k * w..(k + 1) * w]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// CSV export, header `x,t,U`, row-major over (k, j), full double
    /// precision.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,t,U")?;
        for (k, &t) in self.time_mesh.levels().iter().enumerate() {
            for (j, &x) in self.space_mesh.points().iter().enumerate() {
                writeln!(w, "{x:.16e},{t:.16e},{:.16e}", self.value(j, k))?;
            }
        }
        Ok(())
    }

    /// CSV export of a derivative grid in the same layout, header `x,t,DxU`.
    pub fn write_derivative_csv<W: Write>(&self, mut w: W, deriv: &[f64]) -> Result<()> {
        let width = self.space_mesh.n() + 1;
        writeln!(w, "x,t,DxU")?;
        for (k, &t) in self.time_mesh.levels().iter().enumerate() {
            for (j, &x) in self.space_mesh.points().iter().enumerate() {
                writeln!(w, "{x:.16e},{t:.16e},{:.16e}", deriv[k * width + j])?;
            }
        }
        Ok(())
    }
}

/// Time-march the discrete problem: the initial level is phi_B sampled at
/// the mesh points, each later level solves the assembled tridiagonal
/// system at t_k.
pub fn march(p: &Problem, sm: &SpaceMesh, tm: &TimeMesh) -> Result<GridSolution> {
    let n = sm.n();
    let m = tm.m();
    let mut values = Vec::with_capacity((n + 1) * (m + 1));
    for &x in sm.points() {
        let v = p.phi_b.eval(x);
        if !v.is_finite() {
            return Err(Error::DataEval {
                field: "phi_B".into(),
                x,
                t: 0.0,
            });
        }
        values.push(v);
    }
    for k in 1..=m {
        let t_k = tm.levels()[k];
        let prev = &values[(k - 1) * (n + 1)..k * (n + 1)];
        let sys = assemble_time_step(p, sm, tm.tau(), t_k, prev)
            .map_err(|e| e.at_level(k, t_k))?;
        let level = thomas_solve(&sys).map_err(|e| e.at_level(k, t_k))?;
        values.extend_from_slice(&level);
    }
    Ok(GridSolution {
        values,
        space_mesh: sm.clone(),
        time_mesh: tm.clone(),
        problem: p.clone(),
    })
}

/// Re-apply the discrete operator and Robin operators to a completed
/// solution; returns the max absolute residuals (interior, left boundary,
/// right boundary) over all levels k >= 1.
pub fn discrete_residual(sol: &GridSolution) -> (f64, f64, f64) {
    let p = sol.problem();
    let sm = sol.space_mesh();
    let tm = sol.time_mesh();
    let n = sm.n();
    let x = sm.points();
    let tau = tm.tau();
    let mut interior_max = 0.0f64;
    let mut bc_left_max = 0.0f64;
    let mut bc_right_max = 0.0f64;
    for k in 1..=tm.m() {
        let t_k = tm.levels()[k];
        let u = sol.level(k);
        let u_prev = sol.level(k - 1);
        for j in 1..n {
            let dt = (u[j] - u_prev[j]) / tau;
            let dxx = second_difference(u[j - 1], u[j], u[j + 1], sm.width(j), sm.width(j + 1));
            let r = dt - p.epsilon * dxx + p.a.eval(x[j], t_k) * u[j] - p.f.eval(x[j], t_k);
            interior_max = interior_max.max(r.abs());
        }
        let h1 = sm.width(1);
        let rl = u[0] - (u[1] - u[0]) / h1 - p.phi_l.eval(t_k);
        bc_left_max = bc_left_max.max(rl.abs());
        let hn = sm.width(n);
        let rr = u[n] + (u[n] - u[n - 1]) / hn - p.phi_r.eval(t_k);
        bc_right_max = bc_right_max.max(rr.abs());
    }
    (interior_max, bc_left_max, bc_right_max)
}

/// Discrete x-derivative of the solution on its own grid: forward difference
/// at j=0, backward at j=N, width-weighted average of the one-sided
/// differences elsewhere (exact for quadratics).
pub fn discrete_x_derivative(sol: &GridSolution) -> Vec<f64> {
    let sm = sol.space_mesh();
    let n = sm.n();
    let m = sol.time_mesh().m();
    let mut out = Vec::with_capacity((n + 1) * (m + 1));
    for k in 0..=m {
        let u = sol.level(k);
        out.push((u[1] - u[0]) / sm.width(1));
        for j in 1..n {
            let hj = sm.width(j);
            let hj1 = sm.width(j + 1);
            let d_minus = (u[j] - u[j - 1]) / hj;
            let d_plus = (u[j + 1] - u[j]) / hj1;
            out.push((hj * d_plus + hj1 * d_minus) / (hj + hj1));
        }
        out.push((u[n] - u[n - 1]) / sm.width(n));
    }
    out
}
