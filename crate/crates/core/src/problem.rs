//! Continuous initial-boundary value problem data and its validation.

use std::sync::Arc;

use crate::exprlang::{self, Expr};
use crate::{Error, Result};

/// A pure mapping (x, t) -> value, shareable across threads.
#[derive(Clone)]
pub struct ScalarField2 {
    f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl ScalarField2 {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField2 { f: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        ScalarField2::new(move |_, _| c)
    }

    /// Back the field by an expression tree. Evaluation errors surface as
    /// NaN and are caught by the callers' finiteness checks.
    pub fn from_expr(e: Expr) -> Self {
        ScalarField2::new(move |x, t| exprlang::eval(&e, x, t).unwrap_or(f64::NAN))
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        (self.f)(x, t)
    }
}

impl std::fmt::Debug for ScalarField2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ScalarField2(..)")
    }
}

/// A pure mapping s -> value, shareable across threads.
#[derive(Clone)]
pub struct ScalarField1 {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ScalarField1 {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField1 { f: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        ScalarField1::new(move |_| c)
    }

    /// Boundary functions take t, the initial function takes x; the absent
    /// variable is passed as zero and simply ignored by the expression.
    pub fn from_expr_of_t(e: Expr) -> Self {
        ScalarField1::new(move |t| exprlang::eval(&e, 0.0, t).unwrap_or(f64::NAN))
    }

    pub fn from_expr_of_x(e: Expr) -> Self {
        ScalarField1::new(move |x| exprlang::eval(&e, x, 0.0).unwrap_or(f64::NAN))
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.f)(s)
    }
}

impl std::fmt::Debug for ScalarField1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ScalarField1(..)")
    }
}

/// The continuous problem
///
/// ```text
/// u_t - eps u_xx + a u = f  on (0,1) x (0,T],
/// u(0,t) - u_x(0,t) = phi_l(t),
/// u(1,t) + u_x(1,t) = phi_r(t),
/// u(x,0) = phi_b(x),
/// ```
///
/// with 0 < alpha < a(x,t).
#[derive(Clone, Debug)]
pub struct Problem {
    pub a: ScalarField2,
    pub f: ScalarField2,
    pub phi_l: ScalarField1,
    pub phi_r: ScalarField1,
    pub phi_b: ScalarField1,
    pub epsilon: f64,
    pub alpha: f64,
    pub t_final: f64,
}

impl Problem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: ScalarField2,
        f: ScalarField2,
        phi_l: ScalarField1,
        phi_r: ScalarField1,
        phi_b: ScalarField1,
        epsilon: f64,
        alpha: f64,
        t_final: f64,
    ) -> Result<Problem> {
        if !(epsilon > 0.0) {
            return Err(Error::BadArgument(format!("epsilon must be > 0, got {epsilon}")));
        }
        if !(alpha > 0.0) {
            return Err(Error::BadArgument(format!("alpha must be > 0, got {alpha}")));
        }
        if !(t_final > 0.0) {
            return Err(Error::BadArgument(format!("T must be > 0, got {t_final}")));
        }
        Ok(Problem {
            a,
            f,
            phi_l,
            phi_r,
            phi_b,
            epsilon,
            alpha,
            t_final,
        })
    }

    /// Same problem with a different perturbation parameter.
    pub fn with_epsilon(&self, epsilon: f64) -> Problem {
        Problem {
            epsilon,
            ..self.clone()
        }
    }
}

/// Outcome of sampling-based validation of a [`Problem`].
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub positivity_ok: bool,
    pub min_sampled_a: f64,
    pub min_location: (f64, f64),
    /// Corner compatibility residuals (left corner, right corner).
    pub compatibility_residuals: (f64, f64),
}

/// The worked problem:
///
/// ```text
/// u_t - eps u_xx + (1+3t) u = e^{3t},
/// (u - u_x)(0,t) = 1 + t^5,  (u + u_x)(1,t) = 1 + t^5,  u(x,0) = 1,
/// ```
///
/// with alpha = 0.9 and T = 1.
pub fn example_problem(epsilon: f64) -> Problem {
    Problem::new(
        ScalarField2::new(|_, t| 1.0 + 3.0 * t),
        ScalarField2::new(|_, t| (3.0 * t).exp()),
        ScalarField1::new(|t| 1.0 + t.powi(5)),
        ScalarField1::new(|t| 1.0 + t.powi(5)),
        ScalarField1::constant(1.0),
        epsilon,
        0.9,
        1.0,
    )
    .expect("example data is valid")
}

fn check_finite(name: &str, v: f64, x: f64, t: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DataEval {
            field: name.to_string(),
            x,
            t,
        })
    }
}

/// Sample `a` on a uniform (grid_density+1)^2 lattice over [0,1]x[0,T] and
/// report whether the positivity condition a > alpha holds everywhere, along
/// with the level-0 corner compatibility residuals.
pub fn validate_problem(p: &Problem, grid_density: usize) -> Result<ValidationReport> {
    if grid_density < 2 {
        return Err(Error::BadArgument(format!(
            "grid_density must be >= 2, got {grid_density}"
        )));
    }
    let d = grid_density;
    let mut min_a = f64::INFINITY;
    let mut min_loc = (0.0, 0.0);
    for i in 0..=d {
        let x = i as f64 / d as f64;
        for j in 0..=d {
            let t = j as f64 * p.t_final / d as f64;
            let av = check_finite("a", p.a.eval(x, t), x, t)?;
            check_finite("f", p.f.eval(x, t), x, t)?;
            if av < min_a {
                min_a = av;
                min_loc = (x, t);
            }
        }
    }
    for j in 0..=d {
        let t = j as f64 * p.t_final / d as f64;
        check_finite("phi_L", p.phi_l.eval(t), 0.0, t)?;
        check_finite("phi_R", p.phi_r.eval(t), 1.0, t)?;
    }
    for i in 0..=d {
        let x = i as f64 / d as f64;
        check_finite("phi_B", p.phi_b.eval(x), x, 0.0)?;
    }
    let compatibility_residuals = check_corner_compatibility(p, 1e-4)?;
    Ok(ValidationReport {
        positivity_ok: min_a > p.alpha,
        min_sampled_a: min_a,
        min_location: min_loc,
        compatibility_residuals,
    })
}

/// Level-0 corner compatibility residuals:
///
/// ```text
/// r_left  = phi_B(0) - phi_L(0) - phi_B'(0),
/// r_right = phi_B(1) - phi_R(0) + phi_B'(1),
/// ```
///
/// with phi_B' approximated by second-order one-sided three-point stencils
/// of step `h_fd`. Both residuals vanish for compatible data; the caller
/// decides a tolerance.
pub fn check_corner_compatibility(p: &Problem, h_fd: f64) -> Result<(f64, f64)> {
    if !(h_fd > 0.0 && h_fd < 0.5) {
        return Err(Error::BadArgument(format!(
            "h_fd must be in (0, 1/2), got {h_fd}"
        )));
    }
    let b = |x: f64| -> Result<f64> { check_finite("phi_B", p.phi_b.eval(x), x, 0.0) };
    // forward stencil at x=0, backward at x=1
    let db0 = (-3.0 * b(0.0)? + 4.0 * b(h_fd)? - b(2.0 * h_fd)?) / (2.0 * h_fd);
    let db1 = (3.0 * b(1.0)? - 4.0 * b(1.0 - h_fd)? + b(1.0 - 2.0 * h_fd)?) / (2.0 * h_fd);
    let pl0 = check_finite("phi_L", p.phi_l.eval(0.0), 0.0, 0.0)?;
    let pr0 = check_finite("phi_R", p.phi_r.eval(0.0), 1.0, 0.0)?;
    let r_left = b(0.0)? - pl0 - db0;
    let r_right = b(1.0)? - pr0 + db1;
    Ok((r_left, r_right))
}
