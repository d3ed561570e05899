//! Two-mesh convergence estimation: per-epsilon differences between a mesh
//! and its refinement, the epsilon-uniform differences D^N, observed orders
//! p^N = log2(D^N / D^{2N}), and normalized error constants
//! C^N = D^N N^{p*} / (1 - 2^{-p*}), with p* = min p^N and C* = max C^N.
//!
//! Fitted meshes with different N do not nest (the transition parameter
//! depends on ln N), so the fine solution is compared at the coarse grid
//! points through bilinear interpolation on its own tensor grid. On the time
//! axis the grids share space points and the coarse levels nest in the fine
//! ones, so no genuine interpolation error enters.

use std::io::Write;

use crate::mesh::{build_space_mesh, build_time_mesh};
use crate::problem::Problem;
use crate::solver::{march, GridSolution};
use crate::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Which mesh direction a sweep refines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Time,
    Space,
    Both,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Time => f.write_str("time"),
            Axis::Space => f.write_str("space"),
            Axis::Both => f.write_str("both"),
        }
    }
}

/// Bilinear interpolation on the solution's own tensor grid; exact at mesh
/// points.
pub fn interpolate(sol: &GridSolution, x: f64, t: f64) -> Result<f64> {
    let xs = sol.space_mesh().points();
    let ts = sol.time_mesh().levels();
    let t_final = sol.time_mesh().t_final();
    let tol = 1e-12;
    if !(-tol..=1.0 + tol).contains(&x) || !(-tol..=t_final * (1.0 + tol) + tol).contains(&t) {
        return Err(Error::OutOfDomain { x, t });
    }
    let x = x.clamp(0.0, 1.0);
    let t = t.clamp(0.0, t_final);
    // bracketing cell indices
    let j = match xs.partition_point(|&p| p <= x) {
        0 => 0,
        idx if idx > xs.len() - 1 => xs.len() - 2,
        idx => idx - 1,
    };
    let k = match ts.partition_point(|&p| p <= t) {
        0 => 0,
        idx if idx > ts.len() - 1 => ts.len() - 2,
        idx => idx - 1,
    };
    let wx = (x - xs[j]) / (xs[j + 1] - xs[j]);
    let wt = (t - ts[k]) / (ts[k + 1] - ts[k]);
    let v00 = sol.value(j, k);
    let v10 = sol.value(j + 1, k);
    let v01 = sol.value(j, k + 1);
    let v11 = sol.value(j + 1, k + 1);
    Ok(v00 * (1.0 - wx) * (1.0 - wt)
        + v10 * wx * (1.0 - wt)
        + v01 * (1.0 - wx) * wt
        + v11 * wx * wt)
}

/// Maximum pointwise difference over the coarse grid between the solution on
/// (N, M) and the solution on the refined grid: (N, 2M) for the time axis,
/// (2N, M) for the space axis, (2N, 2M) for both.
pub fn two_mesh_difference(p: &Problem, axis: Axis, n: usize, m: usize) -> Result<f64> {
    let (n_fine, m_fine) = match axis {
        Axis::Time => (n, 2 * m),
        Axis::Space => (2 * n, m),
        Axis::Both => (2 * n, 2 * m),
    };
    let sm_coarse = build_space_mesh(p.epsilon, p.alpha, n)?;
    let tm_coarse = build_time_mesh(p.t_final, m)?;
    let coarse = march(p, &sm_coarse, &tm_coarse)?;
    let sm_fine = build_space_mesh(p.epsilon, p.alpha, n_fine)?;
    let tm_fine = build_time_mesh(p.t_final, m_fine)?;
    let fine = march(p, &sm_fine, &tm_fine)?;
    let mut d = 0.0f64;
    for (k, &t) in tm_coarse.levels().iter().enumerate() {
        for (j, &x) in sm_coarse.points().iter().enumerate() {
            let diff = (coarse.value(j, k) - interpolate(&fine, x, t)?).abs();
            d = d.max(diff);
        }
    }
    Ok(d)
}

/// A grid of two-mesh solves over (epsilon, refinement value).
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub axis: Axis,
    /// Space intervals held fixed on the time axis.
    pub fixed_n: usize,
    /// Time intervals held fixed on the space axis.
    pub fixed_m: usize,
    /// The varying mesh counts; each must double the previous.
    pub refine_values: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub problem: Problem,
}

impl SweepConfig {
    fn check(&self) -> Result<()> {
        if self.refine_values.len() < 2 {
            return Err(Error::BadArgument(
                "refine_values needs at least 2 entries".into(),
            ));
        }
        for pair in self.refine_values.windows(2) {
            if pair[1] != 2 * pair[0] {
                return Err(Error::BadArgument(format!(
                    "refine_values must double at each step, got {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        if self.epsilons.is_empty() {
            return Err(Error::BadArgument("epsilons must be non-empty".into()));
        }
        Ok(())
    }

    fn cell_dims(&self, refinement: usize) -> (usize, usize) {
        match self.axis {
            Axis::Time => (self.fixed_n, refinement),
            Axis::Space => (refinement, self.fixed_m),
            Axis::Both => (refinement, refinement),
        }
    }
}

/// Default epsilon set used by the tables: 2^-6, 2^-8, ..., 2^-14.
pub fn default_epsilons() -> Vec<f64> {
    (1..=5).map(|i| 2f64.powi(-4 - 2 * i)).collect()
}

/// Two-mesh differences, uniform differences, orders and error constants for
/// one sweep.
#[derive(Clone, Debug)]
pub struct TwoMeshReport {
    pub axis: Axis,
    pub refine_values: Vec<usize>,
    pub epsilons: Vec<f64>,
    /// d_eps[e][r]: difference for epsilons[e] at refine_values[r].
    pub d_eps: Vec<Vec<f64>>,
    /// Column-wise max over epsilon.
    pub d_uniform: Vec<f64>,
    /// orders[i] = log2(d_uniform[i] / d_uniform[i+1]); None when a
    /// difference vanishes and the ratio is undefined.
    pub orders: Vec<Option<f64>>,
    pub p_star: Option<f64>,
    pub constants: Vec<Option<f64>>,
    pub c_star: Option<f64>,
}

fn assemble_report(
    cfg: &SweepConfig,
    d_eps: Vec<Vec<f64>>,
) -> TwoMeshReport {
    let ncols = cfg.refine_values.len();
    let d_uniform: Vec<f64> = (0..ncols)
        .map(|i| d_eps.iter().map(|row| row[i]).fold(0.0f64, f64::max))
        .collect();
    // Differences at roundoff level carry no order information; treat them
    // as zero so the log ratio is reported as undefined instead of noise.
    const ZERO_TOL: f64 = 1e-14;
    let orders: Vec<Option<f64>> = d_uniform
        .windows(2)
        .map(|w| {
            if w[0] > ZERO_TOL && w[1] > ZERO_TOL {
                Some((w[0] / w[1]).log2())
            } else {
                None
            }
        })
        .collect();
    let p_star = orders
        .iter()
        .flatten()
        .copied()
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.min(v)))
        });
    let constants: Vec<Option<f64>> = d_uniform
        .iter()
        .zip(&cfg.refine_values)
        .map(|(&d, &r)| {
            p_star.map(|p| d * (r as f64).powf(p) / (1.0 - 2f64.powf(-p)))
        })
        .collect();
    let c_star = constants
        .iter()
        .flatten()
        .copied()
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });
    TwoMeshReport {
        axis: cfg.axis,
        refine_values: cfg.refine_values.clone(),
        epsilons: cfg.epsilons.clone(),
        d_eps,
        d_uniform,
        orders,
        p_star,
        constants,
        c_star,
    }
}

fn sweep_cells(cfg: &SweepConfig) -> Vec<(f64, usize, usize)> {
    let mut cells = Vec::new();
    for &eps in &cfg.epsilons {
        for &r in &cfg.refine_values {
            let (n, m) = cfg.cell_dims(r);
            cells.push((eps, n, m));
        }
    }
    cells
}

/// Run the sweep, solving the (epsilon, refinement) cells in parallel when
/// the `parallel` feature is enabled.
pub fn run_sweep(cfg: &SweepConfig) -> Result<TwoMeshReport> {
    cfg.check()?;
    let cells = sweep_cells(cfg);
    #[cfg(feature = "parallel")]
    let diffs: Result<Vec<f64>> = cells
        .par_iter()
        .map(|&(eps, n, m)| two_mesh_difference(&cfg.problem.with_epsilon(eps), cfg.axis, n, m))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let diffs: Result<Vec<f64>> = cells
        .iter()
        .map(|&(eps, n, m)| two_mesh_difference(&cfg.problem.with_epsilon(eps), cfg.axis, n, m))
        .collect();
    let diffs = diffs?;
    let ncols = cfg.refine_values.len();
    let d_eps: Vec<Vec<f64>> = diffs.chunks(ncols).map(|c| c.to_vec()).collect();
    Ok(assemble_report(cfg, d_eps))
}

/// Sequential reference path for the same sweep; used by the benchmarks to
/// compare against the parallel dispatch.
pub fn run_sweep_serial(cfg: &SweepConfig) -> Result<TwoMeshReport> {
    cfg.check()?;
    let diffs: Result<Vec<f64>> = sweep_cells(cfg)
        .iter()
        .map(|&(eps, n, m)| two_mesh_difference(&cfg.problem.with_epsilon(eps), cfg.axis, n, m))
        .collect();
    let diffs = diffs?;
    let ncols = cfg.refine_values.len();
    let d_eps: Vec<Vec<f64>> = diffs.chunks(ncols).map(|c| c.to_vec()).collect();
    Ok(assemble_report(cfg, d_eps))
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

/// Fortran-style E format with a leading 0.x mantissa, e.g. 0.266E-01.
pub fn fortran_e(v: f64) -> String {
    if v == 0.0 {
        return "0.000E+00".to_string();
    }
    let neg = v < 0.0;
    let av = v.abs();
    let mut exp = av.log10().floor() as i32 + 1;
    let mut mant = av / 10f64.powi(exp);
    // mantissa rounds up to 1.000: renormalize
    if format!("{mant:.3}") == "1.000" {
        mant /= 10.0;
        exp += 1;
    }
    format!("{}{mant:.3}E{exp:+03}", if neg { "-" } else { "" })
}

fn eps_label(eps: f64) -> String {
    let l = eps.log2();
    if l.fract() == 0.0 {
        format!("2^{}", l as i64)
    } else {
        format!("{eps:.3e}")
    }
}

impl TwoMeshReport {
    /// Aligned text table: one row per epsilon, then the D^N, p^N and C^N
    /// rows, then the p* and C* footer lines.
    pub fn format_table(&self) -> String {
        let mut out = String::new();
        let col = 14;
        out.push_str(&format!("{:<10}", "epsilon"));
        for r in &self.refine_values {
            out.push_str(&format!("{r:>col$}"));
        }
        out.push('\n');
        for (e, row) in self.epsilons.iter().zip(&self.d_eps) {
            out.push_str(&format!("{:<10}", eps_label(*e)));
            for d in row {
                out.push_str(&format!("{:>col$}", fortran_e(*d)));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:<10}", "D^N"));
        for d in &self.d_uniform {
            out.push_str(&format!("{:>col$}", fortran_e(*d)));
        }
        out.push('\n');
        out.push_str(&format!("{:<10}", "p^N"));
        for o in &self.orders {
            match o {
                Some(p) => out.push_str(&format!("{:>col$}", fortran_e(*p))),
                None => out.push_str(&format!("{:>col$}", "undefined")),
            }
        }
        out.push('\n');
        out.push_str(&format!("{:<10}", "C^N_p*"));
        for c in &self.constants {
            match c {
                Some(c) => out.push_str(&format!("{:>col$}", fortran_e(*c))),
                None => out.push_str(&format!("{:>col$}", "undefined")),
            }
        }
        out.push('\n');
        match self.p_star {
            Some(p) => out.push_str(&format!(
                "Computed {}-order of eps-uniform convergence, p* = {p:.7}\n",
                self.axis
            )),
            None => out.push_str("Order undefined (zero two-mesh differences)\n"),
        }
        match self.c_star {
            Some(c) => out.push_str(&format!("Computed eps-uniform error constant, C* = {c:.6}\n")),
            None => out.push_str("Error constant undefined\n"),
        }
        out
    }

    /// CSV: columns epsilon, refinement, D_eps; footer rows for D, p, C and
    /// the p*/C* summary.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "epsilon,refinement,D_eps")?;
        for (e, row) in self.epsilons.iter().zip(&self.d_eps) {
            for (r, d) in self.refine_values.iter().zip(row) {
                writeln!(w, "{e:.16e},{r},{d:.16e}")?;
            }
        }
        for (r, d) in self.refine_values.iter().zip(&self.d_uniform) {
            writeln!(w, "D,{r},{d:.16e}")?;
        }
        for (r, o) in self.refine_values.iter().zip(&self.orders) {
            match o {
                Some(p) => writeln!(w, "p,{r},{p:.16e}")?,
                None => writeln!(w, "p,{r},undefined")?,
            }
        }
        for (r, c) in self.refine_values.iter().zip(&self.constants) {
            match c {
                Some(c) => writeln!(w, "C,{r},{c:.16e}")?,
                None => writeln!(w, "C,{r},undefined")?,
            }
        }
        match self.p_star {
            Some(p) => writeln!(w, "p_star,,{p:.16e}")?,
            None => writeln!(w, "p_star,,undefined")?,
        }
        match self.c_star {
            Some(c) => writeln!(w, "C_star,,{c:.16e}")?,
            None => writeln!(w, "C_star,,undefined")?,
        }
        Ok(())
    }
}
