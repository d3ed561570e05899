//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS/FAIL` line before asserting.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shishkin_rd::analysis::{default_epsilons, run_sweep, Axis, SweepConfig};
use shishkin_rd::exprlang::{self, BinOp, Expr, Func, Var};
use shishkin_rd::mesh::{build_space_mesh, build_time_mesh, layer_functions, transition_parameter};
use shishkin_rd::problem::{example_problem, Problem, ScalarField1, ScalarField2};
use shishkin_rd::solver::{discrete_x_derivative, march, thomas_solve, TridiagonalSystem};

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

fn verdict(criterion: usize, label: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("criterion {criterion}: PASS - {label}");
    } else {
        println!(
            "criterion {criterion}: FAIL - {label}: {}",
            failures.join("; ")
        );
        panic!("criterion {criterion} failed: {}", failures.join("; "));
    }
}

#[test]
fn criterion_1_table_time_axis() {
    let cfg = SweepConfig {
        axis: Axis::Time,
        fixed_n: 64,
        fixed_m: 0,
        refine_values: vec![32, 64, 128, 256],
        epsilons: default_epsilons(),
        problem: example_problem(2f64.powi(-14)),
    };
    let report = run_sweep(&cfg).unwrap();
    let expected_d = [0.266e-1, 0.134e-1, 0.676e-2, 0.339e-2];
    let mut failures = Vec::new();
    for (i, (&got, &want)) in report.d_uniform.iter().zip(&expected_d).enumerate() {
        if rel_err(got, want) > 0.05 {
            failures.push(format!(
                "D^N[{i}] = {got:.4e}, expected {want:.4e} within 5%"
            ));
        }
    }
    let p = report.p_star.unwrap();
    if (p - 0.9827155).abs() > 0.05 {
        failures.push(format!("p* = {p:.7}, expected 0.9827155 +/- 0.05"));
    }
    let c = report.c_star.unwrap();
    if rel_err(c, 1.620163) > 0.10 {
        failures.push(format!("C* = {c:.6}, expected 1.620163 within 10%"));
    }
    verdict(1, "time-axis table reproduction", &failures);
}

#[test]
fn criterion_2_table_space_axis() {
    let cfg = SweepConfig {
        axis: Axis::Space,
        fixed_n: 0,
        fixed_m: 256,
        refine_values: vec![32, 64, 128, 256],
        epsilons: default_epsilons(),
        problem: example_problem(2f64.powi(-14)),
    };
    let report = run_sweep(&cfg).unwrap();
    let expected_d = [0.119e-1, 0.617e-2, 0.258e-2, 0.843e-3];
    let mut failures = Vec::new();
    let p = report.p_star.unwrap();
    if (p - 0.9456793).abs() > 0.1 {
        failures.push(format!("p* = {p:.7}, expected 0.9456793 +/- 0.1"));
    }
    for (i, (&got, &want)) in report.d_uniform.iter().zip(&expected_d).enumerate() {
        if rel_err(got, want) > 0.10 {
            failures.push(format!(
                "D^N[{i}] = {got:.4e}, expected {want:.4e} within 10%"
            ));
        }
    }
    let c = report.c_star.unwrap();
    if rel_err(c, 0.6552203) > 0.25 {
        failures.push(format!("C* = {c:.6}, expected 0.6552203 within 25%"));
    }
    verdict(2, "space-axis table reproduction", &failures);
}

/// Randomized problem with nonnegative data, a >= alpha, and exactly known
/// sup norms of the data (returned alongside).
fn random_problem(rng: &mut ChaCha8Rng) -> (Problem, f64) {
    let alpha = 0.5;
    let a1: f64 = rng.gen_range(-1.0..1.0);
    let a2: f64 = rng.gen_range(-1.0..1.0);
    let a0 = alpha + a1.abs() + a2.abs() + rng.gen_range(0.0..1.0);
    let f0: f64 = rng.gen_range(0.0..2.0);
    let f1: f64 = rng.gen_range(0.0..2.0);
    let l0: f64 = rng.gen_range(0.0..2.0);
    let l1: f64 = rng.gen_range(0.0..2.0);
    let r0: f64 = rng.gen_range(0.0..2.0);
    let r1: f64 = rng.gen_range(0.0..2.0);
    let b0: f64 = rng.gen_range(0.0..2.0);
    let b1: f64 = rng.gen_range(0.0..2.0);
    let log_eps: f64 = rng.gen_range(-14.0..-2.0);
    let p = Problem::new(
        ScalarField2::new(move |x, t| a0 + a1 * x + a2 * t),
        ScalarField2::new(move |x, t| f0 + f1 * x * t),
        ScalarField1::new(move |t| l0 + l1 * t),
        ScalarField1::new(move |t| r0 + r1 * t),
        ScalarField1::new(move |x| b0 + b1 * x * (1.0 - x)),
        2f64.powf(log_eps),
        alpha,
        1.0,
    )
    .unwrap();
    // sup norms over [0,1] and [0,T] with T = 1
    let bound = (l0 + l1)
        .max(r0 + r1)
        .max(b0 + b1 / 4.0)
        .max((f0 + f1) / alpha);
    (p, bound)
}

fn random_dims(rng: &mut ChaCha8Rng) -> (usize, usize) {
    let n = 4 * rng.gen_range(2..=16usize);
    let m = rng.gen_range(4..=64usize);
    (n, m)
}

#[test]
fn criterion_3_discrete_maximum_principle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    for case in 0..100 {
        let (p, _) = random_problem(&mut rng);
        let (n, m) = random_dims(&mut rng);
        let sm = build_space_mesh(p.epsilon, p.alpha, n).unwrap();
        let tm = build_time_mesh(p.t_final, m).unwrap();
        let sol = march(&p, &sm, &tm).unwrap();
        let min = sol.min();
        if min < -1e-12 {
            failures.push(format!(
                "case {case} (eps={:.3e}, N={n}, M={m}): min U = {min:.3e}",
                p.epsilon
            ));
        }
    }
    verdict(3, "nonnegative data keeps U >= -1e-12", &failures);
}

#[test]
fn criterion_4_discrete_stability() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    for case in 0..100 {
        let (p, bound) = random_problem(&mut rng);
        let (n, m) = random_dims(&mut rng);
        let sm = build_space_mesh(p.epsilon, p.alpha, n).unwrap();
        let tm = build_time_mesh(p.t_final, m).unwrap();
        let sol = march(&p, &sm, &tm).unwrap();
        let max_abs = sol.max_abs();
        if max_abs > bound + 1e-10 {
            failures.push(format!(
                "case {case} (eps={:.3e}, N={n}, M={m}): max |U| = {max_abs:.6} > bound {bound:.6}",
                p.epsilon
            ));
        }
    }
    verdict(4, "max |U| bounded by the data norms", &failures);
}

#[test]
fn criterion_5_exact_on_constants() {
    let p = Problem::new(
        ScalarField2::constant(1.0),
        ScalarField2::constant(1.0),
        ScalarField1::constant(1.0),
        ScalarField1::constant(1.0),
        ScalarField1::constant(1.0),
        1.0,
        0.9,
        1.0,
    )
    .unwrap();
    let mut failures = Vec::new();
    for eps_pow in [-2i32, -8, -14] {
        for n in [8usize, 16, 64] {
            for m in [4usize, 16, 64] {
                let p = p.with_epsilon(2f64.powi(eps_pow));
                let sm = build_space_mesh(p.epsilon, p.alpha, n).unwrap();
                let tm = build_time_mesh(p.t_final, m).unwrap();
                let sol = march(&p, &sm, &tm).unwrap();
                for k in 0..=m {
                    for j in 0..=n {
                        let dev = (sol.value(j, k) - 1.0).abs();
                        if dev > 1e-12 {
                            failures.push(format!(
                                "eps=2^{eps_pow}, N={n}, M={m}: |U-1| = {dev:.3e} at (j={j}, k={k})"
                            ));
                        }
                    }
                }
            }
        }
    }
    verdict(5, "constant problem solved exactly", &failures);
}

/// Dense Gaussian elimination with partial pivoting; the oracle for Thomas.
fn dense_solve(sys: &TridiagonalSystem) -> Vec<f64> {
    let n = sys.n();
    let mut a = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        a[i][i] = sys.diag[i];
        if i > 0 {
            a[i][i - 1] = sys.lower[i - 1];
        }
        if i + 1 < n {
            a[i][i + 1] = sys.upper[i];
        }
    }
    let mut b = sys.rhs.clone();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

#[test]
fn criterion_6_thomas_vs_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    for case in 0..1000 {
        let n = rng.gen_range(2..=64usize);
        let lower: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let upper: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let mut diag = vec![0.0f64; n];
        for i in 0..n {
            let off = if i > 0 { lower[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { upper[i].abs() } else { 0.0 };
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            diag[i] = sign * (off + rng.gen_range(0.1..2.0));
        }
        let sys = TridiagonalSystem {
            lower,
            diag,
            upper,
            rhs,
        };
        assert!(sys.is_strictly_dominant());
        let got = thomas_solve(&sys).unwrap();
        let want = dense_solve(&sys);
        let scale = want.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
        let err = got
            .iter()
            .zip(&want)
            .map(|(g, w)| (g - w).abs())
            .fold(0.0f64, f64::max)
            / scale;
        if err > 1e-12 {
            failures.push(format!("case {case} (n={n}): rel err {err:.3e}"));
        }
    }
    verdict(6, "Thomas matches dense elimination", &failures);
}

#[test]
fn criterion_7_mesh_invariants() {
    let mut failures = Vec::new();
    for eps_pow in (2..=20).map(|k| -k) {
        let eps = 2f64.powi(eps_pow);
        let alpha = 0.9;
        let mut n = 8usize;
        while n <= 256 {
            let tag = format!("eps=2^{eps_pow}, N={n}");
            let sm = build_space_mesh(eps, alpha, n).unwrap();
            let pts = sm.points();
            if !pts.windows(2).all(|w| w[0] < w[1]) {
                failures.push(format!("{tag}: points not strictly increasing"));
            }
            if pts[n / 4] != sm.sigma() || pts[3 * n / 4] != 1.0 - sm.sigma() {
                failures.push(format!("{tag}: transition points inexact"));
            }
            let clamped = sm.sigma() == 0.25;
            for j in 1..=n {
                let h = sm.width(j);
                let expected = if j <= n / 4 || j > 3 * n / 4 {
                    sm.h_layer()
                } else {
                    sm.h_interior()
                };
                // widths inherit the absolute rounding of the point values
                if (h - expected).abs() > 4.0 * f64::EPSILON {
                    failures.push(format!("{tag}: width {j} = {h:.3e} != {expected:.3e}"));
                }
            }
            if clamped && (sm.h_layer() - sm.h_interior()).abs() > f64::EPSILON {
                failures.push(format!("{tag}: clamped mesh has two widths"));
            }
            let total: f64 = (1..=n).map(|j| sm.width(j)).sum();
            if (total - 1.0).abs() > 4.0 * f64::EPSILON {
                failures.push(format!("{tag}: widths sum to {total}"));
            }
            if !clamped {
                let sigma = transition_parameter(eps, alpha, n);
                let (bl, _, _) = layer_functions(sigma, eps, alpha);
                let want = (n as f64).powi(-2);
                if (bl - want).abs() > 1e-12 {
                    failures.push(format!("{tag}: B^L(sigma) = {bl:.6e}, want {want:.6e}"));
                }
            }
            n *= 2;
        }
    }
    verdict(7, "fitted mesh invariants", &failures);
}

#[test]
fn criterion_8_layer_localization() {
    let p = example_problem(2f64.powi(-14));
    let (n, m) = (64usize, 256usize);
    let sm = build_space_mesh(p.epsilon, p.alpha, n).unwrap();
    let tm = build_time_mesh(p.t_final, m).unwrap();
    let sol = march(&p, &sm, &tm).unwrap();
    let deriv = discrete_x_derivative(&sol);
    let last = &deriv[m * (n + 1)..];
    let (argmax, _) = last
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .unwrap();
    let x = sm.points()[argmax];
    let mut failures = Vec::new();
    if !(x <= sm.sigma() || x >= 1.0 - sm.sigma()) {
        failures.push(format!(
            "max |DxU| at t=T attained at x = {x:.6}, outside the layers (sigma = {:.6})",
            sm.sigma()
        ));
    }
    verdict(8, "derivative maximum sits in a boundary layer", &failures);
}

/// Independent recursive evaluator mirroring IEEE round-to-nearest semantics.
fn ref_eval(e: &Expr, x: f64, t: f64) -> Option<f64> {
    let v = match e {
        Expr::Num(v) => *v,
        Expr::Var(Var::X) => x,
        Expr::Var(Var::T) => t,
        Expr::Neg(inner) => -ref_eval(inner, x, t)?,
        Expr::Bin(op, a, b) => {
            let a = ref_eval(a, x, t)?;
            let b = ref_eval(b, x, t)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return None;
                    }
                    a / b
                }
                BinOp::Pow => a.powf(b),
            }
        }
        Expr::Call(func, args) => {
            let a0 = ref_eval(&args[0], x, t)?;
            match func {
                Func::Exp => a0.exp(),
                Func::Ln => {
                    if a0 <= 0.0 {
                        return None;
                    }
                    a0.ln()
                }
                Func::Sin => a0.sin(),
                Func::Cos => a0.cos(),
                Func::Sqrt => {
                    if a0 < 0.0 {
                        return None;
                    }
                    a0.sqrt()
                }
                Func::Abs => a0.abs(),
                Func::Pow => a0.powf(ref_eval(&args[1], x, t)?),
            }
        }
    };
    if v.is_finite() {
        Some(v)
    } else {
        None
    }
}

/// Random tree over numbers, variables, negation and the four arithmetic
/// operators. Literals are nonnegative so unparsing round-trips exactly.
fn random_operator_tree(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..3) {
            0 => Expr::Num(rng.gen_range(0.0..10.0)),
            1 => Expr::Var(Var::X),
            _ => Expr::Var(Var::T),
        };
    }
    match rng.gen_range(0..5) {
        0 => Expr::Neg(Box::new(random_operator_tree(rng, depth - 1))),
        k => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][k - 1];
            Expr::Bin(
                op,
                Box::new(random_operator_tree(rng, depth - 1)),
                Box::new(random_operator_tree(rng, depth - 1)),
            )
        }
    }
}

#[test]
fn criterion_9_expression_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    for case in 0..1000 {
        let tree = random_operator_tree(&mut rng, 5);
        let text = exprlang::unparse(&tree);
        match exprlang::parse(&text) {
            Ok(parsed) if parsed == tree => {}
            Ok(_) => {
                failures.push(format!("case {case}: `{text}` reparsed to a different tree"));
                continue;
            }
            Err(e) => {
                failures.push(format!("case {case}: `{text}` failed to reparse: {e}"));
                continue;
            }
        }
        let x = rng.gen_range(0.0..1.0);
        let t = rng.gen_range(0.0..1.0);
        let got = exprlang::eval(&tree, x, t).ok();
        let want = ref_eval(&tree, x, t);
        let same = match (got, want) {
            (Some(g), Some(w)) => g.to_bits() == w.to_bits(),
            (None, None) => true,
            _ => false,
        };
        if !same {
            failures.push(format!(
                "case {case}: `{text}` at ({x}, {t}): {got:?} vs reference {want:?}"
            ));
        }
    }
    verdict(9, "expression round-trip and 0-ulp evaluation", &failures);
}
