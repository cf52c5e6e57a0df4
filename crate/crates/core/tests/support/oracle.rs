//! Brute-force reference solvers used only by tests.
#![allow(dead_code)]

use pdei_core::lp::{LinearProgram, Relation};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

const SINGULAR: f64 = 1e-9;
const FEASIBLE: f64 = 1e-9;

/// Solves the square system `a x = b`; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < SINGULAR {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        for row in 0..n {
            if row != col {
                let f = a[row][col] / pivot_row[col];
                if f != 0.0 {
                    for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= f * p;
                    }
                    b[row] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

type Row = (Vec<f64>, Relation, f64);

/// Best objective over all vertices of `{rows, x >= 0}`; `None` if there is no vertex.
fn best_vertex(n: usize, objective: &[f64], rows: &[Row]) -> Option<f64> {
    let mut all: Vec<Row> = rows.to_vec();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        all.push((e, Relation::Ge, 0.0));
    }
    let satisfied = |x: &[f64]| {
        all.iter().all(|(a, rel, b)| {
            let lhs: f64 = a.iter().zip(x).map(|(u, v)| u * v).sum();
            let tol = FEASIBLE * (1.0 + b.abs());
            match rel {
                Relation::Le => lhs <= b + tol,
                Relation::Ge => lhs >= b - tol,
                Relation::Eq => (lhs - b).abs() <= tol,
            }
        })
    };
    let mut best: Option<f64> = None;
    for subset in combinations(all.len(), n) {
        let a: Vec<Vec<f64>> = subset.iter().map(|&i| all[i].0.clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&i| all[i].2).collect();
        if let Some(x) = solve_square(a, b) {
            if satisfied(&x) {
                let v: f64 = objective.iter().zip(&x).map(|(c, x)| c * x).sum();
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
    }
    best
}

/// Classifies and solves `lp` by enumerating every candidate vertex. Unboundedness
/// is decided by maximizing the objective over the normalized recession cone.
pub fn vertex_enumeration(lp: &LinearProgram) -> Outcome {
    let n = lp.num_vars;
    let rows: Vec<Row> = lp
        .constraints
        .iter()
        .map(|c| (c.coefficients.clone(), c.relation, c.rhs))
        .collect();
    let Some(best) = best_vertex(n, &lp.objective, &rows) else {
        return Outcome::Infeasible;
    };
    let mut cone: Vec<Row> = rows.iter().map(|(a, rel, _)| (a.clone(), *rel, 0.0)).collect();
    cone.push((vec![1.0; n], Relation::Eq, 1.0));
    match best_vertex(n, &lp.objective, &cone) {
        Some(ray) if ray > 1e-9 => Outcome::Unbounded,
        _ => Outcome::Optimal(best),
    }
}

/// Random LP with at most `max_vars` variables and `max_rows` constraints.
pub fn random_lp<R: Rng>(rng: &mut R, max_vars: usize, max_rows: usize) -> LinearProgram {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(1..=max_rows);
    let integral = rng.gen_bool(0.5);
    let value = |rng: &mut R, lo: f64, hi: f64| {
        if integral {
            rng.gen_range(lo as i64..=hi as i64) as f64
        } else {
            rng.gen_range(lo..hi)
        }
    };
    let objective: Vec<f64> = (0..n).map(|_| value(rng, -5.0, 5.0)).collect();
    let mut lp = LinearProgram::new(objective);
    for _ in 0..m {
        let coeffs: Vec<f64> = (0..n).map(|_| value(rng, -5.0, 5.0)).collect();
        let relation = match rng.gen_range(0..10) {
            0..=5 => Relation::Le,
            6..=7 => Relation::Ge,
            _ => Relation::Eq,
        };
        let rhs = value(rng, -5.0, 10.0);
        lp.push(coeffs, relation, rhs);
    }
    lp
}

use pdei_core::dea::Dmu;

/// Random DMU set: `n` units, `r` inputs in [0.2, 5], `s` outputs in [0, 10].
pub fn random_dmus<R: Rng>(rng: &mut R, n: usize, r: usize, s: usize) -> Vec<Dmu> {
    (0..n)
        .map(|i| {
            let inputs = (0..r).map(|_| rng.gen_range(0.2..5.0)).collect();
            let mut outputs: Vec<f64> = (0..s)
                .map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..10.0) })
                .collect();
            if outputs.iter().all(|&v| v == 0.0) {
                outputs[0] = 1.0;
            }
            Dmu::new(format!("u{i}"), inputs, outputs).unwrap()
        })
        .collect()
}

/// Random set satisfying the closed-form oracle's preconditions.
pub fn random_oracle_set<R: Rng>(rng: &mut R, n: usize, r: usize, s: usize) -> Vec<Dmu> {
    let profile: Vec<f64> = (0..s).map(|_| rng.gen_range(0.5..3.0)).collect();
    let mut units: Vec<(Vec<f64>, f64)> = (0..n.saturating_sub(1))
        .map(|_| ((0..r).map(|_| rng.gen_range(0.3..5.0)).collect(), rng.gen_range(1.0..8.0)))
        .collect();
    let floor: Vec<f64> = (0..r)
        .map(|k| units.iter().map(|u| u.0[k]).fold(5.0, f64::min) * rng.gen_range(0.5..=1.0))
        .collect();
    let top = units.iter().map(|u| u.1).fold(8.0, f64::max);
    let at = rng.gen_range(0..=units.len());
    units.insert(at, (floor, top));
    units
        .into_iter()
        .enumerate()
        .map(|(i, (x, scale))| Dmu::new(format!("u{i}"), x, profile.iter().map(|p| p * scale).collect()).unwrap())
        .collect()
}
