use hbpc_core::lp::{LpModel, LpStatus};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Instance {
    costs: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    rows: Vec<(Vec<f64>, f64)>,
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Instance {
    let costs = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let bounds = (0..n)
        .map(|_| if rng.gen_bool(0.8) { (0.0, 1.0) } else { (-1.0, 2.0) })
        .collect();
    let rows = (0..m)
        .map(|_| {
            let a = (0..n)
                .map(|_| if rng.gen_bool(0.4) { 0.0 } else { rng.gen_range(-3i32..=3) as f64 })
                .collect();
            (a, rng.gen_range(-2.0..2.0))
        })
        .collect();
    Instance { costs, bounds, rows }
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                if f != 0.0 {
                    for k in c..n {
                        a[r][k] -= f * a[c][k];
                    }
                    b[r] -= f * b[c];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum over all basic feasible points, or None when infeasible.
fn vertex_enumeration(inst: &Instance) -> Option<f64> {
    let n = inst.costs.len();
    // every constraint as g·x ≥ h
    let mut cons: Vec<(Vec<f64>, f64)> = inst.rows.clone();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cons.push((e.clone(), inst.bounds[j].0));
        e[j] = -1.0;
        cons.push((e, -inst.bounds[j].1));
    }
    let feasible = |x: &[f64]| {
        cons.iter()
            .all(|(g, h)| g.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() >= h - 1e-9)
    };
    let mut best: Option<f64> = None;
    let total = cons.len();
    let mut pick = (0..n).collect::<Vec<_>>();
    if n == 0 {
        return if feasible(&[]) { Some(0.0) } else { None };
    }
    loop {
        let a: Vec<Vec<f64>> = pick.iter().map(|&i| cons[i].0.clone()).collect();
        let b: Vec<f64> = pick.iter().map(|&i| cons[i].1).collect();
        if let Some(x) = solve_dense(a, b) {
            if feasible(&x) {
                let v: f64 = x.iter().zip(&inst.costs).map(|(a, b)| a * b).sum();
                best = Some(best.map_or(v, |w: f64| w.min(v)));
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < total - n + i {
                pick[i] += 1;
                for k in i + 1..n {
                    pick[k] = pick[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn build(inst: &Instance, rows: usize) -> LpModel {
    let mut lp = LpModel::new();
    for (c, (lb, ub)) in inst.costs.iter().zip(&inst.bounds) {
        lp.add_col(*c, *lb, *ub).unwrap();
    }
    for (a, b) in &inst.rows[..rows] {
        let e: Vec<(usize, f64)> = a.iter().copied().enumerate().collect();
        lp.add_row(&e, *b).unwrap();
    }
    lp
}

/// Checks one solve against the oracle and the optimality certificates.
fn check(lp: &mut LpModel, inst: &Instance) -> Result<(), String> {
    let sol = lp.solve().map_err(|e| e.to_string())?;
    let oracle = vertex_enumeration(inst);
    match (sol.status, oracle) {
        (LpStatus::Optimal, Some(v)) => {
            if (sol.objective - v).abs() > 1e-6 {
                return Err(format!("objective {} vs oracle {}", sol.objective, v));
            }
            let dual = lp.dual_objective(&sol).unwrap();
            if (dual - sol.objective).abs() > 1e-6 {
                return Err(format!("duality gap {} vs {}", sol.objective, dual));
            }
            for (i, (a, b)) in inst.rows.iter().enumerate() {
                let act: f64 = a.iter().zip(&sol.x).map(|(p, q)| p * q).sum();
                if act < b - 1e-6 {
                    return Err(format!("row {} violated", i));
                }
                if sol.duals[i] < 0.0 || sol.duals[i] * (act - b) > 1e-6 {
                    return Err(format!("complementary slackness fails on row {}", i));
                }
            }
            for j in 0..inst.costs.len() {
                let (lb, ub) = inst.bounds[j];
                let d = lp.reduced_cost(&sol, j).unwrap();
                if sol.x[j] > lb + 1e-6 && sol.x[j] < ub - 1e-6 && d.abs() > 1e-6 {
                    return Err(format!("interior column {} has reduced cost {}", j, d));
                }
            }
            Ok(())
        }
        (LpStatus::Infeasible, None) => {
            let mu = sol.farkas.ok_or("missing certificate")?;
            if mu.iter().any(|&m| m < -1e-9) || lp.farkas_margin(&mu) <= 1e-7 {
                return Err(format!("bad certificate {:?}", mu));
            }
            Ok(())
        }
        (s, o) => Err(format!("status {:?} but oracle {:?}", s, o)),
    }
}

#[test]
fn fifty_random_lps_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut optimal = 0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=8);
        let inst = random_instance(&mut rng, n, m);
        let mut lp = build(&inst, m);
        check(&mut lp, &inst).unwrap();
        optimal += usize::from(vertex_enumeration(&inst).is_some());
    }
    assert!(optimal >= 10, "too few feasible instances ({optimal})");
}

fn prefix(inst: &Instance, rows: usize) -> Instance {
    Instance { costs: inst.costs.clone(), bounds: inst.bounds.clone(), rows: inst.rows[..rows].to_vec() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn incremental_rows_match_oracle(seed in any::<u64>(), n in 1usize..=6, m in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, n, m);
        let mut lp = build(&inst, 0);
        let mut last = f64::NEG_INFINITY;
        for k in 0..m {
            let (a, b) = &inst.rows[k];
            let e: Vec<(usize, f64)> = a.iter().copied().enumerate().collect();
            lp.add_row(&e, *b).unwrap();
            let part = prefix(&inst, k + 1);
            check(&mut lp, &part).map_err(TestCaseError::fail)?;
            let obj = lp.solve().unwrap().objective;
            prop_assert!(obj >= last - 1e-7, "adding a row decreased the optimum");
            last = obj;
        }
    }

    #[test]
    fn bound_changes_match_oracle(seed in any::<u64>(), n in 1usize..=6, m in 0usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst = random_instance(&mut rng, n, m);
        for c in inst.costs.iter_mut() {
            *c = c.abs();
        }
        for b in inst.bounds.iter_mut() {
            *b = (0.0, 1.0);
        }
        let mut lp = build(&inst, m);
        check(&mut lp, &inst).map_err(TestCaseError::fail)?;
        for _ in 0..6 {
            let j = rng.gen_range(0..n);
            let fix = match rng.gen_range(0..3) {
                0 => (0.0, 0.0),
                1 => (1.0, 1.0),
                _ => (0.0, 1.0),
            };
            lp.set_bounds(j, fix.0, fix.1).unwrap();
            inst.bounds[j] = fix;
            check(&mut lp, &inst).map_err(TestCaseError::fail)?;
        }
    }

    #[test]
    fn adding_columns_never_increases_the_optimum(seed in any::<u64>(), n in 1usize..=5, m in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, n, m);
        let mut lp = build(&inst, m);
        let before = lp.solve().unwrap();
        let col = lp.add_col(rng.gen_range(0.0..1.0), 0.0, 1.0).unwrap();
        let after = lp.solve().unwrap();
        prop_assert_eq!(before.status, after.status);
        if before.is_optimal() {
            prop_assert!(after.objective <= before.objective + 1e-7);
            prop_assert!((after.objective - before.objective).abs() < 1e-7);
            prop_assert!(after.x[col].abs() < 1e-9 || lp.reduced_cost(&after, col).unwrap().abs() < 1e-7);
        }
    }
}

/// Self-certifying check for sizes where vertex enumeration is too slow.
fn certify(lp: &mut LpModel, inst: &Instance) -> Result<f64, String> {
    let sol = lp.solve().map_err(|e| e.to_string())?;
    if !sol.is_optimal() {
        let mu = sol.farkas.ok_or("missing certificate")?;
        return if lp.farkas_margin(&mu) > 1e-7 { Ok(f64::INFINITY) } else { Err("bad certificate".into()) };
    }
    for (a, b) in &inst.rows {
        let act: f64 = a.iter().zip(&sol.x).map(|(p, q)| p * q).sum();
        if act < b - 1e-6 {
            return Err("row violated".into());
        }
    }
    let dual = lp.dual_objective(&sol).unwrap();
    if (dual - sol.objective).abs() > 1e-6 * (1.0 + sol.objective.abs()) {
        return Err(format!("duality gap {} vs {}", sol.objective, dual));
    }
    Ok(sol.objective)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn larger_lps_are_certified_and_warm_equals_cold(seed in any::<u64>(), n in 5usize..=30, m in 10usize..=120) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst = random_instance(&mut rng, n, m);
        // clausal-looking rows keep a good share of instances feasible
        for (a, b) in inst.rows.iter_mut() {
            for v in a.iter_mut() {
                *v = v.signum();
            }
            *b = 1.0 - a.iter().filter(|v| **v < 0.0).count() as f64;
        }
        let mut warm = build(&inst, 0);
        for k in 0..m {
            let (a, b) = &inst.rows[k];
            let e: Vec<(usize, f64)> = a.iter().copied().enumerate().collect();
            warm.add_row(&e, *b).unwrap();
            if k % 7 == 0 {
                certify(&mut warm, &prefix(&inst, k + 1)).map_err(TestCaseError::fail)?;
            }
        }
        let w = certify(&mut warm, &inst).map_err(TestCaseError::fail)?;
        let mut cold = build(&inst, m);
        let c = certify(&mut cold, &inst).map_err(TestCaseError::fail)?;
        prop_assert!(w == c || (w - c).abs() < 1e-6, "warm {} cold {}", w, c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn restored_bases_solve_to_the_oracle(seed in any::<u64>(), n in 1usize..=5, m in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst = random_instance(&mut rng, n, m);
        let half = m / 2;
        let mut lp = build(&inst, half);
        lp.solve().unwrap();
        let saved = lp.basis();
        for (a, b) in &inst.rows[half..] {
            let e: Vec<(usize, f64)> = a.iter().copied().enumerate().collect();
            lp.add_row(&e, *b).unwrap();
        }
        lp.solve().unwrap();
        let j = rng.gen_range(0..n);
        let v = if rng.gen_bool(0.5) { inst.bounds[j].0 } else { inst.bounds[j].1 };
        lp.set_bounds(j, v, v).unwrap();
        inst.bounds[j] = (v, v);
        prop_assert!(lp.set_basis(&saved));
        check(&mut lp, &inst).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn bases_are_stale_after_row_removal() {
    let mut lp = LpModel::new();
    let x = lp.add_col(1.0, 0.0, 1.0).unwrap();
    let y = lp.add_col(1.0, 0.0, 1.0).unwrap();
    lp.add_row(&[(x, 1.0), (y, 1.0)], 1.0).unwrap();
    lp.add_row(&[(x, 1.0)], 0.5).unwrap();
    lp.solve().unwrap();
    let saved = lp.basis();
    lp.remove_rows(&[1]).unwrap();
    assert!(!lp.set_basis(&saved));
    let sol = lp.solve().unwrap();
    assert!((sol.objective - 1.0).abs() < 1e-9);
}
