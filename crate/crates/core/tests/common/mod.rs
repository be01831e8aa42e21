//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use cctree::environment::Scenario;
use cctree::planner::PlannerTree;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

pub fn load(name: &str) -> Scenario {
    Scenario::load(scenario_path(name)).expect("bundled scenario loads")
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`, started on unit-width
/// panels so oscillating integrands are resolved.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let panels = ((b - a).abs().ceil() as usize).max(1) * 4;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
            adapt(
                f,
                x0,
                x1,
                f0,
                fm,
                f1,
                simpson(x0, x1, f0, fm, f1),
                tol / panels as f64,
                40,
            )
        })
        .sum()
}

pub fn fresnel_quadrature(x: f64) -> (f64, f64) {
    let k = std::f64::consts::FRAC_PI_2;
    (
        integrate(&|u| (k * u * u).cos(), 0.0, x, 1e-13),
        integrate(&|u| (k * u * u).sin(), 0.0, x, 1e-13),
    )
}

/// Classical RK4 on `x' = cos θ, y' = sin θ, θ' = κ0 + σ s` from the origin
/// over `length` with step at most `h`.
pub fn rk4_clothoid(kappa0: f64, sigma: f64, length: f64, h: f64) -> (f64, f64, f64) {
    let n = (length / h).ceil().max(1.0) as usize;
    let h = length / n as f64;
    let k = |s: f64| kappa0 + sigma * s;
    let (mut x, mut y, mut th) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        let s = i as f64 * h;
        let (k1, k2, k4) = (k(s), k(s + 0.5 * h), k(s + h));
        let t1 = th;
        let t2 = th + 0.5 * h * k1;
        let t3 = th + 0.5 * h * k2;
        let t4 = th + h * k2;
        x += h / 6.0 * (t1.cos() + 2.0 * t2.cos() + 2.0 * t3.cos() + t4.cos());
        y += h / 6.0 * (t1.sin() + 2.0 * t2.sin() + 2.0 * t3.sin() + t4.sin());
        th += h / 6.0 * (k1 + 4.0 * k2 + k4);
    }
    (x, y, th)
}

/// Costs recomputed by summing edge lengths along parent links; `None` when
/// a parent walk cycles or stops short of the root.
pub fn recomputed_costs(tree: &PlannerTree) -> Option<Vec<f64>> {
    let mut memo: Vec<Option<f64>> = vec![None; tree.len()];
    memo[0] = Some(0.0);
    for i in 0..tree.len() {
        let mut chain = vec![];
        let mut cur = i;
        while memo[cur].is_none() {
            chain.push(cur);
            cur = tree.node(cur).parent?;
            if chain.len() > tree.len() {
                return None;
            }
        }
        let mut c = memo[cur].unwrap();
        for &k in chain.iter().rev() {
            c += tree.node(k).edge.length();
            memo[k] = Some(c);
        }
    }
    memo.into_iter().collect()
}
