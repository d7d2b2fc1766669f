//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use pqr_core::circuit::{concat, typecheck_circuit, Circuit};
use pqr_core::index::{normalize, Env, Index, IndexCtx, Relation, Solver, Verdict};
use pqr_core::syntax::{parse_index, parse_program, parse_type, pretty_program, Program, Type};
use pqr_core::typeck::{check_closed_value, check_program, CheckedProgram, Mode};
use pqr_core::{run_program, stdlib};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn load(name: &str) -> Program {
    parse_program(stdlib::source(name).expect("stdlib program")).expect("stdlib parses")
}

fn check(p: &Program) -> Result<CheckedProgram, String> {
    check_program(p, &Solver::default(), Mode::Strict).map_err(|e| e.to_string())
}

fn env(pairs: &[(&str, u64)]) -> Env {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn main_type(c: &CheckedProgram) -> String {
    c.main.as_ref().map(|m| m.ty.to_string()).unwrap_or_default()
}

fn expect_type(c: &CheckedProgram, want: &str) -> Result<(), String> {
    let got = main_type(c);
    // compare as parsed types so spacing does not matter
    if parse_type(&got).ok() == parse_type(want).ok() {
        Ok(())
    } else {
        Err(format!("main has type `{got}`, expected `{want}`"))
    }
}

fn gate_names(c: &Circuit) -> Vec<String> {
    c.ops().iter().map(|o| o.gate.name.clone()).collect()
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    if t < limit {
        Ok(t)
    } else {
        Err(format!("took {t:?}, limit {limit:?}"))
    }
}

// 1. dumbNot
fn dumbnot() -> Outcome {
    let start = Instant::now();
    let p = load("dumbnot");
    let c = check(&p)?;
    expect_type(&c, "Qubit -o[2,0] Qubit")?;
    let r = run_program(&p, &Env::new(), &Solver::default(), Mode::Strict, None).map_err(|e| e.to_string())?;
    let gates = gate_names(&r.circuit);
    if gates != ["INIT1", "CNOT", "DISCARD"] {
        return Err(format!("gates {gates:?}"));
    }
    if r.circuit.width() != 2 {
        return Err(format!("width {}", r.circuit.width()));
    }
    let t = within(Duration::from_secs(1), start)?;
    Ok(format!("3 ops, width 2, {t:?}"))
}

// 2. hadamardN
fn hadamard() -> Outcome {
    let p = load("hadamardn");
    let c = check(&p)?;
    expect_type(&c, "List[i] Qubit -o[i,0] List[i] Qubit")?;
    for n in [0u64, 1, 5] {
        let r =
            run_program(&p, &env(&[("i", n)]), &Solver::default(), Mode::Strict, None).map_err(|e| e.to_string())?;
        // oracle: one H per qubit and no ancillas, so the width is the input size
        let hs = gate_names(&r.circuit).iter().filter(|g| *g == "H").count() as u64;
        if r.circuit.width() != n || hs != n || r.circuit.ops().len() as u64 != n {
            return Err(format!("i = {n}: width {}, {} ops", r.circuit.width(), r.circuit.ops().len()));
        }
    }
    Ok("widths 0, 1, 5".into())
}

/// Gate order of the textbook QFT as built by the fold: step `j` applies
/// rotations R(j+1) down to R2 between the new qubit and the earlier ones,
/// then H.
fn qft_gates_oracle(i: u64) -> Vec<String> {
    let mut out = Vec::new();
    for j in 0..i {
        for m in 0..j {
            out.push(format!("R{}", j + 1 - m));
        }
        out.push("H".to_string());
    }
    out
}

/// Finds a Valid equality obligation whose sides agree with `lhs` and `rhs`
/// on every assignment in `0..=10`, checked by direct interpretation.
fn has_obligation(c: &CheckedProgram, def: &str, vars: &[&str], lhs: &str, rhs: &str) -> Result<(), String> {
    let parse = |s: &str| {
        pqr_core::syntax::parse_judgment(&format!("forall {}. {s} = 0", vars.join(" ")))
            .map(|j| j.lhs)
            .map_err(|e| e.message)
    };
    let (want_l, want_r) = (parse(lhs)?, parse(rhs)?);
    let d = c.def(def).ok_or(format!("no definition `{def}`"))?;
    let agrees =
        |a: &Index, b: &Index| assignments(vars, 10).all(|e| a.eval(&e).ok() == b.eval(&e).ok() && a.eval(&e).is_ok());
    let found = d.obligations.iter().any(|o| {
        o.relation == Relation::Eq
            && o.verdict == Verdict::Valid
            && vars.iter().all(|v| o.ctx.contains(v))
            && agrees(&o.lhs, &want_l)
            && agrees(&o.rhs, &want_r)
    });
    if found {
        Ok(())
    } else {
        Err(format!("`{def}` has no Valid obligation {lhs} = {rhs}"))
    }
}

/// Every assignment of `0..=max` to `vars`.
fn assignments<'a>(vars: &'a [&'a str], max: u64) -> impl Iterator<Item = Env> + 'a {
    let total = (max + 1).pow(vars.len() as u32);
    (0..total).map(move |mut k| {
        let mut e = Env::new();
        for v in vars {
            e.insert(v.to_string(), k % (max + 1));
            k /= max + 1;
        }
        e
    })
}

// 3. qft
fn qft() -> Outcome {
    let start = Instant::now();
    let p = load("qft");
    let c = check(&p)?;
    expect_type(&c, "List[i] Qubit -o[i,0] List[i] Qubit")?;
    has_obligation(&c, "qftStep", &["j"], "max(1, max[e < j] (e + 2 + ((j - 1) - e) * 1))", "j + 1")?;
    has_obligation(&c, "qft", &["i"], "max(0, max[j < i] (j + 1 + ((i - 1) - j) * 1))", "i")?;
    let r = run_program(&p, &env(&[("i", 3)]), &Solver::default(), Mode::Strict, None).map_err(|e| e.to_string())?;
    let gates = gate_names(&r.circuit);
    if gates != qft_gates_oracle(3) || gates != ["H", "R2", "H", "R3", "R2", "H"] {
        return Err(format!("gates {gates:?}"));
    }
    if r.circuit.width() != 3 {
        return Err(format!("width {}", r.circuit.width()));
    }
    let golden: serde_json::Value =
        serde_json::from_str(include_str!("golden/qft_i3.json")).map_err(|e| e.to_string())?;
    let got: serde_json::Value = serde_json::from_str(&r.circuit.to_json()).map_err(|e| e.to_string())?;
    if got != golden {
        return Err("circuit differs from golden JSON".into());
    }
    for n in [1u64, 4, 6] {
        let r =
            run_program(&p, &env(&[("i", n)]), &Solver::default(), Mode::Strict, None).map_err(|e| e.to_string())?;
        if gate_names(&r.circuit) != qft_gates_oracle(n) || r.circuit.width() != n {
            return Err(format!("i = {n}: gates {:?}", gate_names(&r.circuit)));
        }
    }
    let t = within(Duration::from_secs(2), start)?;
    Ok(format!("obligations Valid, golden match, {t:?}"))
}

// 4. rev and qlen
fn rev_qlen() -> Outcome {
    expect_type(&check(&load("rev"))?, "List[i] Qubit -o[i,0] List[i] Qubit")?;
    expect_type(&check(&load("qlen"))?, "List[i] Qubit -o[i,0] Nat * List[i] Qubit")?;
    Ok("types match".into())
}

/// Width oracle: the peak number of simultaneously live wires.
fn peak_live(c: &Circuit) -> u64 {
    let mut live = c.input().len() as i64;
    let mut peak = live;
    for op in c.ops() {
        live += op.produced.labels().len() as i64 - op.consumed.labels().len() as i64;
        peak = peak.max(live);
    }
    peak as u64
}

// 5. concatenation width bound
fn concatenation() -> Outcome {
    let start = Instant::now();
    let mut r = common::rng(0x5eed_0005);
    for k in 0..1000 {
        let (c, d) = common::circuit_pair(&mut r);
        let cd = concat(&c, &d).map_err(|e| format!("pair {k}: {e}"))?;
        let l = c.outputs().len() as u64 - d.input().len() as u64;
        for (what, x) in [("C", &c), ("D", &d), ("C::D", &cd)] {
            if x.width() != peak_live(x) {
                return Err(format!("pair {k}: width of {what} is {}, peak live wires {}", x.width(), peak_live(x)));
            }
        }
        let bound = c.width().max(d.width() + l);
        if cd.width() > bound {
            return Err(format!("pair {k}: width {} > max({}, {} + {l})", cd.width(), c.width(), d.width()));
        }
        let (q, out) = typecheck_circuit(c.input(), cd.ops()).map_err(|e| format!("pair {k}: {e}"))?;
        let rest: pqr_core::circuit::LabelContext =
            c.outputs().iter().filter(|(lab, _)| d.input().get(*lab).is_none()).collect();
        let expected = rest.union(d.outputs()).map_err(|e| format!("pair {k}: {e}"))?;
        if &q != c.input() || out != expected {
            return Err(format!("pair {k}: concatenation retypes at a different interface"));
        }
    }
    let t = within(Duration::from_secs(10), start)?;
    Ok(format!("1000 pairs, {t:?}"))
}

/// Runs `p` at every `n` in `0..=4` and checks the circuit width against the
/// bound read off the symbolic type, then re-checks the result value.
/// Returns the number of runs.
fn run_within_bound(label: &str, p: &Program) -> Result<usize, String> {
    let solver = Solver::default();
    let c = check(p).map_err(|e| format!("{label}: {e}"))?;
    let main = c.main.as_ref().ok_or(format!("{label}: no main"))?;
    let values: Vec<Vec<(String, u64)>> = match p.index_params.as_slice() {
        [] => vec![vec![]],
        [v] => (0..=4).map(|n| vec![(v.clone(), n)]).collect(),
        more => return Err(format!("{label}: {} index parameters", more.len())),
    };
    for args in &values {
        let e: Env = args.iter().cloned().collect();
        let inst = |t: &Type| args.iter().fold(t.clone(), |t, (v, n)| t.subst_index(v, &Index::Const(*n)));
        let effect = main.effect.eval(&e).map_err(|x| x.to_string())?;
        let (bound, result_ty) = match &main.ty {
            Type::Arrow { dom, cod, width, .. } => {
                let inputs = pqr_core::typeck::wire_count(&inst(dom)).eval(&Env::new()).map_err(|x| x.to_string())?;
                (width.eval(&e).map_err(|x| x.to_string())?.max(effect + inputs), inst(cod))
            }
            t => (effect, inst(t)),
        };
        let r = run_program(p, &e, &solver, Mode::Strict, None).map_err(|x| format!("{label} {args:?}: {x}"))?;
        if r.circuit.width() > bound {
            return Err(format!("{label} {args:?}: width {} exceeds bound {bound}", r.circuit.width()));
        }
        check_closed_value(&r.value, &result_ty, r.circuit.outputs(), &solver)
            .map_err(|x| format!("{label} {args:?}: result does not re-check: {x}"))?;
    }
    Ok(values.len())
}

// 6. width never exceeds the interpreted effect
fn width_soundness() -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    for (name, _) in stdlib::PROGRAMS {
        runs += run_within_bound(name, &load(name))?;
    }
    let mut r = common::rng(0x5eed_0006);
    for k in 0..200 {
        let src = common::program_source(&mut r);
        let p = parse_program(&src).map_err(|e| format!("generated {k}: {e}\n{src}"))?;
        runs += run_within_bound(&format!("generated {k}"), &p).map_err(|e| format!("{e}\n{src}"))?;
    }
    let t = within(Duration::from_secs(60), start)?;
    Ok(format!("stdlib and 200 generated programs, {runs} runs, {t:?}"))
}

// 7. subject reduction: results re-check against the final outputs
fn subject_reduction() -> Outcome {
    let solver = Solver::default();
    let mut checked = 0;
    for (name, _) in stdlib::PROGRAMS {
        let p = load(name);
        let args: Env = p.index_params.iter().map(|v| (v.clone(), 3)).collect();
        let r = run_program(&p, &args, &solver, Mode::Strict, None).map_err(|e| format!("{name}: {e}"))?;
        let ty = match r.main_type {
            Type::Arrow { cod, .. } => *cod,
            t => t,
        };
        check_closed_value(&r.value, &ty, r.circuit.outputs(), &solver).map_err(|e| format!("{name}: {e}"))?;
        checked += 1;
    }
    // the generated programs of criterion 6 are re-checked there as well
    Ok(format!("{checked} stdlib results re-check"))
}

// 8. index language
fn index_suites() -> Outcome {
    let mut r = common::rng(0x5eed_0008);
    let vars: Vec<String> = ["i", "j", "k"].iter().map(|s| s.to_string()).collect();
    for k in 0..1000 {
        let mut b = 0;
        let i = common::index(&mut r, &vars, 4, &mut b);
        let n = normalize(&i);
        for _ in 0..20 {
            let e: Env = vars.iter().map(|v| (v.clone(), r.gen_range(0..=10))).collect();
            if i.eval(&e) != n.eval(&e) {
                return Err(format!("index {k}: `{i}` normalizes to `{n}`, which differs at {e:?}"));
            }
        }
    }

    let solver = Solver::default();
    let ctx_vars = ["i", "j"];
    let ctx = IndexCtx::from_names(ctx_vars);
    let names: Vec<String> = ctx_vars.iter().map(|s| s.to_string()).collect();
    let (mut valid, mut refuted, mut unknown) = (0, 0, 0);
    for k in 0..1000 {
        let mut b = 0;
        let lhs = common::index(&mut r, &names, 3, &mut b);
        let rhs = common::index(&mut r, &names, 3, &mut b);
        let rel = if r.gen_bool(0.5) { Relation::Leq } else { Relation::Eq };
        let holds = |e: &Env| {
            let (a, c) = (lhs.eval(e).unwrap(), rhs.eval(e).unwrap());
            match rel {
                Relation::Leq => a <= c,
                Relation::Eq => a == c,
            }
        };
        match solver.check(&ctx, rel, &lhs, &rhs).map_err(|e| e.to_string())? {
            Verdict::Valid => {
                valid += 1;
                if let Some(e) = assignments(&ctx_vars, 8).find(|e| !holds(e)) {
                    return Err(format!("goal {k}: `{lhs} {rel} {rhs}` claimed Valid, fails at {e:?}"));
                }
            }
            Verdict::Refuted(e) => {
                refuted += 1;
                if holds(&e) || !ctx_vars.iter().all(|v| e.contains_key(*v)) {
                    return Err(format!("goal {k}: witness {e:?} does not falsify `{lhs} {rel} {rhs}`"));
                }
            }
            Verdict::Unknown(_) => unknown += 1,
        }
    }

    let units = [("5 - 7", 0), ("max(2, 3)", 3), ("max[j < 3] j * j", 4), ("max[j < 0] (j + 9)", 0)];
    for (src, want) in units {
        let i = parse_index(src).map_err(|e| e.message)?;
        let got = (i.eval(&Env::new()), normalize(&i).eval(&Env::new()));
        if got != (Ok(want), Ok(want)) {
            return Err(format!("`{src}` gives {got:?}, expected {want}"));
        }
    }
    Ok(format!("normalize 1000x20 sound; verdicts {valid} valid, {refuted} refuted, {unknown} unknown; unit cases"))
}

// 9. parser round trip
fn round_trip() -> Outcome {
    for (name, src) in stdlib::PROGRAMS {
        let p = parse_program(src).map_err(|e| format!("{name}: {e:?}"))?;
        for printed in [p.to_string(), pretty_program(&p)] {
            let q = parse_program(&printed).map_err(|e| format!("{name}: reprint does not parse: {e:?}\n{printed}"))?;
            if q != p {
                return Err(format!("{name}: reprint parses differently"));
            }
        }
    }
    let mut r = common::rng(0x5eed_0009);
    for k in 0..500 {
        let p = common::program_ast(&mut r);
        for printed in [p.to_string(), pretty_program(&p)] {
            let q = parse_program(&printed).map_err(|e| format!("ast {k}: {e:?}\n{printed}"))?;
            if q != p {
                return Err(format!("ast {k}: reprint parses differently\n{printed}"));
            }
        }
    }
    Ok(format!("{} stdlib files and 500 generated programs", stdlib::PROGRAMS.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("dumbNot type, gates and width", dumbnot),
        ("hadamardN type and widths", hadamard),
        ("qft type, obligations, circuit", qft),
        ("rev and qlen types", rev_qlen),
        ("concatenation width bound", concatenation),
        ("width within interpreted effect", width_soundness),
        ("subject reduction", subject_reduction),
        ("index normalization and verdicts", index_suites),
        ("parser round trip", round_trip),
    ];
    let mut failed = Vec::new();
    println!();
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(why) => {
                println!("FAIL {} {name}: {why}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
