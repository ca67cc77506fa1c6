use hbpc_core::mln::{compile, MlnArg, MlnBuilder, MlnLiteral, MlnProgram, Weight};
use hbpc_core::solver::{solve, NoMonitor, SolveOptions, SolveStatus};
use hbpc_core::{MlnError, Symbol};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PREDS: [(&str, usize, bool); 4] = [("ev", 1, true), ("p", 1, false), ("q", 1, false), ("r", 2, false)];

struct Instance {
    consts: Vec<&'static str>,
    evidence: Vec<(&'static str, Vec<&'static str>, bool)>,
    clauses: Vec<(Weight, Vec<Lit>)>,
}

#[derive(Clone)]
enum Lit {
    Atom(bool, &'static str, Vec<&'static str>),
    Eq(bool, &'static str, &'static str),
}

fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let consts = if rng.gen_bool(0.5) { vec!["a", "b"] } else { vec!["a", "b", "c"] };
    let mut evidence = Vec::new();
    for c in &consts {
        if rng.gen_bool(0.5) {
            evidence.push(("ev", vec![*c], true));
        }
        if rng.gen_bool(0.2) {
            evidence.push(("p", vec![*c], rng.gen_bool(0.5)));
        }
    }
    let terms = ["X", "Y", "a"];
    let mut clauses = Vec::new();
    for _ in 0..rng.gen_range(1..=5) {
        let mut lits = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let (p, ar, _) = PREDS[rng.gen_range(0..PREDS.len())];
            lits.push(Lit::Atom(rng.gen_bool(0.5), p, (0..ar).map(|_| terms[rng.gen_range(0..3)]).collect()));
        }
        if rng.gen_bool(0.2) {
            lits.push(Lit::Eq(rng.gen_bool(0.5), "X", "Y"));
        }
        // equality needs both variables typed by an atom
        let typed = |v: &str| lits.iter().any(|l| matches!(l, Lit::Atom(_, _, a) if a.contains(&v)));
        if !(typed("X") && typed("Y")) {
            lits.retain(|l| !matches!(l, Lit::Eq(..)));
        }
        let w = if rng.gen_bool(0.15) { Weight::Hard } else { Weight::Soft(rng.gen_range(0.01..=2.0)) };
        clauses.push((w, lits));
    }
    Instance { consts, evidence, clauses }
}

fn arg(a: &str) -> MlnArg {
    if a.starts_with(char::is_uppercase) {
        MlnArg::Var(Symbol::new(a))
    } else {
        MlnArg::Const(Symbol::new(a))
    }
}

fn program(s: &Instance) -> MlnProgram {
    let mut b = MlnBuilder::new();
    b.domain("d", &s.consts);
    for (p, ar, closed) in PREDS {
        b.predicate(p, &vec!["d"; ar], closed);
    }
    for (p, args, t) in &s.evidence {
        b.evidence(p, args, *t);
    }
    for (w, lits) in &s.clauses {
        let lits = lits
            .iter()
            .map(|l| match l {
                Lit::Atom(pos, p, args) => {
                    MlnLiteral::Atom { positive: *pos, pred: Symbol::new(p), args: args.iter().map(|a| arg(a)).collect() }
                }
                Lit::Eq(pos, x, y) => MlnLiteral::Equal { positive: *pos, lhs: arg(x), rhs: arg(y) },
            })
            .collect();
        b.clause(*w, lits);
    }
    b.build().unwrap()
}

/// Minimum total weight of falsified groundings over all worlds, counting
/// groundings of the original clauses directly.
fn oracle(s: &Instance) -> Option<f64> {
    let mut free: Vec<(&str, Vec<&str>)> = Vec::new();
    for (p, ar, closed) in PREDS {
        if closed {
            continue;
        }
        let mut tuples: Vec<Vec<&str>> = vec![vec![]];
        for _ in 0..ar {
            tuples = tuples.into_iter().flat_map(|t| s.consts.iter().map(move |c| [t.clone(), vec![*c]].concat())).collect();
        }
        for t in tuples {
            if !s.evidence.iter().any(|e| e.0 == p && e.1 == t) {
                free.push((p, t));
            }
        }
    }
    assert!(free.len() <= 15);
    let mut best: Option<f64> = None;
    for world in 0u32..1 << free.len() {
        let truth = |p: &str, args: &[&str]| -> bool {
            if let Some(e) = s.evidence.iter().find(|e| e.0 == p && e.1 == args) {
                return e.2;
            }
            match free.iter().position(|f| f.0 == p && f.1 == args) {
                Some(i) => world >> i & 1 == 1,
                None => false,
            }
        };
        let mut cost = 0.0;
        let mut ok = true;
        'clauses: for (w, lits) in &s.clauses {
            let uses = |v: &str| lits.iter().any(|l| matches!(l, Lit::Atom(_, _, a) if a.contains(&v)));
            let xs: Vec<&str> = if uses("X") { s.consts.clone() } else { vec!["_"] };
            let ys: Vec<&str> = if uses("Y") { s.consts.clone() } else { vec!["_"] };
            for x in &xs {
                for y in &ys {
                    let val = |t: &'static str| match t {
                        "X" => *x,
                        "Y" => *y,
                        c => c,
                    };
                    let sat = lits.iter().any(|l| match l {
                        Lit::Atom(pos, p, args) => {
                            let g: Vec<&str> = args.iter().map(|a| val(a)).collect();
                            truth(p, &g) == *pos
                        }
                        Lit::Eq(pos, a, b) => (val(a) == val(b)) == *pos,
                    });
                    if !sat {
                        match w {
                            Weight::Hard => {
                                ok = false;
                                break 'clauses;
                            }
                            Weight::Soft(w) => cost += w,
                        }
                    }
                }
            }
        }
        if ok {
            best = Some(best.map_or(cost, |b: f64| b.min(cost)));
        }
    }
    best
}

fn solve_mln(m: &MlnProgram, iff: bool) -> Option<f64> {
    let enc = match compile(m, iff) {
        Ok(e) => e,
        Err(MlnError::HardUnsatisfiable(_)) => return None,
        Err(e) => panic!("{e}"),
    };
    let r = solve(&enc.problem, SolveOptions::default(), &mut NoMonitor).unwrap();
    match r.status {
        SolveStatus::Optimal => r.objective,
        SolveStatus::Infeasible => None,
        SolveStatus::LimitReached => panic!("limit without limits"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn map_objective_matches_falsification_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng);
        let m = program(&inst);
        let expected = oracle(&inst);
        for iff in [true, false] {
            let got = solve_mln(&m, iff);
            match (got, expected) {
                (None, None) => {}
                (Some(g), Some(e)) => prop_assert!((g - e).abs() < 1e-6, "iff={} got {} expected {}", iff, g, e),
                _ => prop_assert!(false, "iff={} got {:?} expected {:?}", iff, got, expected),
            }
        }
    }

    #[test]
    fn penalty_costs_are_positive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = program(&random_instance(&mut rng));
        if let Ok(enc) = compile(&m, true) {
            for rule in enc.problem.cost_rules() {
                let atom = rule.pattern.to_ground().unwrap();
                prop_assert!(enc.problem.cost_of(&atom).unwrap() > 0.0);
            }
        }
    }
}
