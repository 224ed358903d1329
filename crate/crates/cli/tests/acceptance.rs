//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! A criterion listed in `EXPECTED_FAILURES` is one whose stated bound does
//! not hold for the objects it names; the test asserts that exactly those
//! fail, so a change in either direction is caught.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use modlie::leebasis::{
    assemble_subset, build_case, check_bi, gen_bi, gen_bi_sized, invertibility_scan, solve_signs, usable_slots,
    verify_independence_truncated, verify_lee, Case,
};
use modlie::redenv::{compatible_weights, is_invariant, singular_shifts, IrreducibilityOptions};
use modlie::{
    baby_verma, evaluate, is_irreducible, Character, Enveloping, Family, Irreducibility, LieAlgebra, LieElement,
    MatrixRep, Root, RootSystem, UEElement,
};
use modlie_cli::expr::{evaluate as eval_expr, parse, parse_in, print};
use modlie_cli::subalg::{check_embedding, standard_embeddings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The Casimir-type parentheses act on the B2 baby Verma module with four
/// distinct scalars on its composition factors, so four shifts are singular.
const EXPECTED_FAILURES: &[u32] = &[10];

type Verdict = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Verdict);

fn algebra(f: Family, l: usize, p: u64) -> LieAlgebra {
    LieAlgebra::build_with_override(&RootSystem::build(f, l).unwrap(), p, true).unwrap()
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    let e = t.elapsed();
    if e <= limit {
        Ok(())
    } else {
        Err(format!("took {e:.2?}, limit {limit:?}"))
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn neg_e1(alg: &LieAlgebra) -> usize {
    let d = alg.root_system().ambient_dim();
    alg.root_vector_index(&Root::unit(d, 1).neg()).unwrap()
}

fn b2_verma(alg: &LieAlgebra) -> MatrixRep {
    baby_verma(alg, &Character::from_pairs(alg, &[(neg_e1(alg), 1)]), &[0, 0]).unwrap()
}

fn c1_root_data() -> Verdict {
    let t = Instant::now();
    let mut notes = Vec::new();
    for l in 2..=4 {
        let rs = RootSystem::build(Family::B, l).unwrap();
        ensure(
            rs.roots().len() == 2 * l * l,
            format!("B{l}: {} roots", rs.roots().len()),
        )?;
        let mut base: Vec<Root> = (1..l).map(|i| Root::pair(l, 1, i, -1, i + 1)).collect();
        base.push(Root::unit(l, l));
        ensure(rs.base() == base.as_slice(), format!("B{l}: base {:?}", rs.base()))?;
        let mut orbits: Vec<usize> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for r in rs.roots() {
            if seen.insert(r.clone()) {
                let o = rs.weyl_orbit(r).unwrap();
                ensure(o.iter().all(|x| x.norm2() == r.norm2()), "orbit mixes lengths")?;
                seen.extend(o.iter().cloned());
                orbits.push(o.len());
            }
        }
        ensure(orbits.len() == 2, format!("B{l}: {} orbits", orbits.len()))?;
        notes.push(format!("B{l} |Φ|={} orbits {:?}", rs.roots().len(), orbits));
    }
    within(t, Duration::from_secs(1))?;
    Ok(notes.join("; "))
}

fn c2_chevalley_integrity() -> Verdict {
    let t = Instant::now();
    let mut checked = 0usize;
    for (f, l) in [
        (Family::A, 1),
        (Family::A, 2),
        (Family::B, 2),
        (Family::B, 3),
        (Family::C, 2),
    ] {
        for p in [0, 7] {
            let alg = algebra(f, l, p);
            let n = alg.dim();
            let b: Vec<LieElement> = (0..n).map(|i| alg.basis_element(i)).collect();
            let br = |x: &LieElement, y: &LieElement| alg.bracket(x, y).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let s = alg.add(&br(&b[i], &b[j]), &br(&b[j], &b[i])).unwrap();
                    ensure(s.is_zero(), format!("{f}{l} p={p}: antisymmetry {i},{j}"))?;
                    for k in 0..n {
                        let s = alg
                            .add(
                                &alg.add(&br(&b[i], &br(&b[j], &b[k])), &br(&b[j], &br(&b[k], &b[i])))
                                    .unwrap(),
                                &br(&b[k], &br(&b[i], &b[j])),
                            )
                            .unwrap();
                        ensure(s.is_zero(), format!("{f}{l} p={p}: Jacobi {i},{j},{k}"))?;
                        checked += 1;
                    }
                }
            }
        }
    }
    within(t, Duration::from_secs(30))?;
    Ok(format!("{checked} ordered triples over A1 A2 B2 B3 C2, char 0 and 7"))
}

const CASIMIR: &str = "(h(e1)+1)^2 + 4 x(-e1) x(+e1)";

fn c3_casimir_centrality() -> Verdict {
    let a1 = algebra(Family::A, 1, 0);
    let env = Enveloping::new(&a1);
    let w = eval_expr(&parse_in(CASIMIR, a1.root_system()).unwrap(), &env).unwrap();
    ensure(env.is_central(&w).unwrap(), "not central in U(A1)")?;
    let b2 = algebra(Family::B, 2, 0);
    let env = Enveloping::new(&b2);
    let w = eval_expr(&parse_in(CASIMIR, b2.root_system()).unwrap(), &env).unwrap();
    let e1 = Root::new(vec![1, 0]);
    let sl2 = [
        env.root_vector(&e1).unwrap(),
        env.root_vector(&e1.neg()).unwrap(),
        env.from_lie(&b2.coroot_expand(&e1).unwrap()).unwrap(),
    ];
    for g in &sl2 {
        ensure(
            env.commutator(g, &w).unwrap().is_zero(),
            "does not commute with the e1-sl2 of B2",
        )?;
    }
    Ok("central in U(A1); commutes with x(±e1), h(e1) in U(B2)".into())
}

fn c4_rudakov_shafarevich() -> Verdict {
    let t = Instant::now();
    let opts = IrreducibilityOptions::default();
    let mut notes = Vec::new();
    for p in [5u64, 7] {
        let alg = algebra(Family::A, 1, p);
        let chi = Character::from_pairs(&alg, &[(neg_e1(&alg), 1)]);
        let lams = &compatible_weights(&alg, &chi)[0];
        for &lam in lams {
            let v = baby_verma(&alg, &chi, &[lam]).unwrap();
            ensure(v.dim() as u64 == p, format!("p={p} λ={lam}: dim {}", v.dim()))?;
            ensure(
                is_irreducible(&v, &opts) == Irreducibility::Irreducible,
                format!("p={p} λ={lam}: not simple"),
            )?;
        }
        let z = baby_verma(&alg, &Character::zero(&alg), &[0]).unwrap();
        match is_irreducible(&z, &opts) {
            Irreducibility::Submodule(b) if is_invariant(&z, &b) => notes.push(format!(
                "p={p}: {} simple of dim p; χ=0 submodule dim {}",
                lams.len(),
                b.len()
            )),
            other => return Err(format!("p={p}, χ=0: {other:?}")),
        }
    }
    within(t, Duration::from_secs(10))?;
    Ok(notes.join("; "))
}

fn c5_b2_dimension() -> Verdict {
    let t = Instant::now();
    let alg = algebra(Family::B, 2, 7);
    let v = b2_verma(&alg);
    ensure(v.dim() == 2401, format!("dim {}", v.dim()))?;
    let br = v.bracket_failures(&alg);
    let rs = v.restrictedness_failures(&alg);
    ensure(
        br.is_empty() && rs.is_empty(),
        format!("{} bracket, {} restrictedness failures", br.len(), rs.len()),
    )?;
    within(t, Duration::from_secs(300))?;
    Ok(format!(
        "dim 2401 = 7^4; {} bracket pairs and {} p-powers verified",
        10 * 9 / 2,
        10
    ))
}

fn c6_sign_ledger() -> Verdict {
    let t = Instant::now();
    let mut notes = Vec::new();
    let b2 = algebra(Family::B, 2, 7);
    let b3 = algebra(Family::B, 3, 7);
    let runs: Vec<(&LieAlgebra, MatrixRep)> = vec![
        (&b2, b2_verma(&b2)),
        (&b3, MatrixRep::natural(&b3).unwrap()),
        (&b3, MatrixRep::adjoint(&b3).unwrap()),
    ];
    for (alg, rep) in &runs {
        for case in [Case::I, Case::II] {
            let r = verify_lee(alg, case, 0, Some(rep)).unwrap();
            let again = verify_lee(alg, case, 0, Some(rep)).unwrap();
            let tag = format!("B{} case {case} {:?}", alg.rank(), rep.kind());
            ensure(r == again, format!("{tag}: nondeterministic"))?;
            ensure(r.summary.oracle_consistent, format!("{tag}: oracle contradiction"))?;
            for s in r.specs.iter().filter(|s| s.status == "no_solution") {
                let in_rep = s.oracle.as_ref().is_some_and(|o| !o.nonzero_in_rep.is_empty());
                let weighted = !s.residues.is_empty() && s.residues.iter().all(|x| x.weight == x.expected_weight);
                ensure(in_rep || weighted, format!("{tag}: A_{} lacks a certificate", s.target))?;
            }
            notes.push(format!("{tag}: {}/{} solved", r.summary.solved, r.summary.specs));
        }
    }
    for l in [2, 3] {
        let alg = algebra(Family::B, l, 11);
        let r = verify_lee(&alg, Case::I, 0, None).unwrap();
        let bi = match (&r.bi.check, &r.bi.error) {
            (Some(c), _) if c.all_pass() => "B_i ok".to_string(),
            (_, Some(e)) => e.clone(),
            _ => "B_i failed".into(),
        };
        notes.push(format!("B{l} p=11: {bi}"));
    }
    within(t, Duration::from_secs(600))?;
    Ok(notes.join("; "))
}

fn c7_truncated_independence() -> Verdict {
    let t = Instant::now();
    let alg = algebra(Family::B, 2, 7);
    let rep = b2_verma(&alg);
    let env = Enveloping::new(&alg);
    let specs = build_case(&alg, Case::I).unwrap();
    let verdicts: Vec<_> = specs.iter().map(|s| solve_signs(&env, s).unwrap()).collect();
    let keep = usable_slots(&specs, &verdicts);
    ensure(keep.iter().all(|&k| !specs[k].is_impossible()), "impossible spec kept")?;
    let bi = gen_bi_sized(&alg, &Case::I.alpha(2), keep.len(), 0).unwrap();
    let cand = assemble_subset(&env, &specs, &verdicts, &bi, Some(&rep), &keep).unwrap();
    let r = verify_independence_truncated(&alg, &cand, &rep, 2, 0).unwrap();
    let again = verify_independence_truncated(&alg, &cand, &rep, 2, 0).unwrap();
    ensure(r == again, "rank report not reproducible")?;
    ensure(
        r.distinct_normal_forms,
        format!("duplicate normal forms {:?}", r.duplicate_pairs),
    )?;
    ensure(r.rank == r.permuted_rank, "rank changed under permutation")?;
    ensure(r.full_rank(), format!("rank {} of {}", r.rank, r.count))?;
    within(t, Duration::from_secs(300))?;
    Ok(format!(
        "slots {keep:?}: {} elements, rank {} (permuted {}), {}",
        r.count, r.rank, r.permuted_rank, r.method
    ))
}

fn random_element(env: &Enveloping<'_>, rng: &mut ChaCha8Rng, max_deg: usize) -> UEElement {
    let n = env.algebra().dim();
    let mut u = env.zero();
    for _ in 0..rng.gen_range(1..=3) {
        let word: Vec<usize> = (0..rng.gen_range(0..=max_deg)).map(|_| rng.gen_range(0..n)).collect();
        let t = env.scale(rng.gen_range(1..7), &env.word(&word).unwrap()).unwrap();
        u = env.add(&u, &t).unwrap();
    }
    u
}

fn c8_pbw_properties() -> Verdict {
    let t = Instant::now();
    let alg = algebra(Family::B, 2, 7);
    let env = Enveloping::new(&alg);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..1000 {
        let (a, b, c) = (
            random_element(&env, &mut rng, 4),
            random_element(&env, &mut rng, 4),
            random_element(&env, &mut rng, 4),
        );
        let l = env.multiply(&env.multiply(&a, &b).unwrap(), &c).unwrap();
        let r = env.multiply(&a, &env.multiply(&b, &c).unwrap()).unwrap();
        ensure(l == r, format!("associativity fails on triple {i}"))?;
    }
    let rep = b2_verma(&alg);
    for i in 0..200 {
        let (u, v) = (random_element(&env, &mut rng, 3), random_element(&env, &mut rng, 3));
        let lhs = evaluate(&env.multiply(&u, &v).unwrap(), &rep).unwrap();
        let rhs = evaluate(&u, &rep).unwrap().mul(&evaluate(&v, &rep).unwrap());
        ensure(lhs == rhs, format!("evaluate not multiplicative on pair {i}"))?;
    }
    within(t, Duration::from_secs(60))?;
    Ok("1000 triples associative; 200 pairs multiplicative on the 2401-dim module".into())
}

fn c9_bi_conditions() -> Verdict {
    let t = Instant::now();
    let alg = algebra(Family::B, 2, 11);
    let mut notes = Vec::new();
    for alpha in [Root::new(vec![1, 0]), Root::new(vec![1, -1])] {
        let fam = gen_bi(&alg, &alpha, 0).unwrap();
        let c = check_bi(&alg, &fam);
        ensure(
            c.subsets_checked == 28 && c.subsets_independent == 28,
            format!("{}: subsets {c:?}", alpha.label()),
        )?;
        ensure(
            c.alpha_nonzero == 8,
            format!("{}: α(B_i) {:?}", alpha.label(), c.alpha_values),
        )?;
        notes.push(format!("α={}: 28/28 subsets, 8/8 α(B_i)≠0", alpha.label()));
    }
    within(t, Duration::from_secs(1))?;
    Ok(notes.join("; "))
}

fn c10_invertibility() -> Verdict {
    let mut notes = Vec::new();
    let mut over = Vec::new();
    let a1 = algebra(Family::A, 1, 7);
    let env = Enveloping::new(&a1);
    let w = eval_expr(&parse(CASIMIR).unwrap(), &env).unwrap();
    let chi = Character::from_pairs(&a1, &[(neg_e1(&a1), 1)]);
    for lam in 0..7 {
        let s = singular_shifts(&w, &baby_verma(&a1, &chi, &[lam]).unwrap()).unwrap();
        if s.len() > 2 {
            over.push(format!("A1 λ={lam}: {s:?}"));
        }
        if lam == 0 {
            notes.push(format!("A1 λ=0 singular c {s:?}"));
        }
    }
    let b2 = algebra(Family::B, 2, 7);
    let rep = b2_verma(&b2);
    let env = Enveloping::new(&b2);
    for (case, target) in [(Case::I, Root::new(vec![-1, 0])), (Case::II, Root::new(vec![-1, 1]))] {
        let specs = build_case(&b2, case).unwrap();
        let spec = specs.iter().find(|s| s.target == target).unwrap();
        let signs = solve_signs(&env, spec)
            .unwrap()
            .solved_assignments()
            .first()
            .cloned()
            .unwrap_or_default();
        let e = invertibility_scan(&env, spec, &signs, &rep)
            .unwrap()
            .ok_or("no constant in body")?;
        let line = format!("B2 case {case} A_{} singular c {:?}", e.target, e.singular_c);
        if e.singular_c.len() > 2 {
            over.push(line.clone());
        }
        notes.push(line);
    }
    if over.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!(
            "more than 2 singular shifts: {} (all: {})",
            over.join("; "),
            notes.join("; ")
        ))
    }
}

fn c11_subalgebra() -> Verdict {
    let t = Instant::now();
    let mut n = 0;
    for p in [0, 7] {
        let alg = algebra(Family::B, 3, p);
        for coords in standard_embeddings(&alg, 2) {
            let r = check_embedding(&alg, &coords).unwrap();
            ensure(r.sub_roots == 8, format!("{coords:?}: {} roots", r.sub_roots))?;
            for c in &r.checks {
                ensure(c.closed && c.agrees, format!("p={p} {coords:?} {}: {c:?}", c.span))?;
                n += 1;
            }
        }
    }
    within(t, Duration::from_secs(10))?;
    Ok(format!(
        "B2 on coordinates {{1,2}} and {{2,3}} of B3: {n} spans closed, fixpoint agrees"
    ))
}

fn modlie(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_modlie")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn c12_cli() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let atoms = ["x(+e1)", "x(-e1+e2)", "h(e1)", "h(2)", "3", "x(-e2)"];
    for i in 0..150 {
        let mut s = atoms[rng.gen_range(0..atoms.len())].to_string();
        for _ in 0..rng.gen_range(0..5) {
            let a = atoms[rng.gen_range(0..atoms.len())];
            s = match rng.gen_range(0..5) {
                0 => format!("{s} + {a}"),
                1 => format!("{s} - {a}"),
                2 => format!("({s}) {a}"),
                3 => format!("[{s}, {a}]"),
                _ => format!("({s})^{}", rng.gen_range(1..4)),
            };
        }
        let e = parse(&s).map_err(|e| format!("#{i} {s}: {e}"))?;
        ensure(parse(&print(&e)).as_ref() == Ok(&e), format!("#{i} {s}: round trip"))?;
    }
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name).display().to_string();
        modlie(&["--p", "11", "--seed", "3", "--out", &path, "verify-lee", "--case", "II"]);
        reports.push(std::fs::read(path).map_err(|e| e.to_string())?);
    }
    ensure(reports[0] == reports[1], "verify-lee reports differ")?;
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let fx = |n: &str| fixtures.join(n).display().to_string();
    let cases: Vec<(Vec<String>, i32)> = vec![
        (
            vec![
                "--config".into(),
                fx("a1_casimir.conf"),
                "central".into(),
                CASIMIR.into(),
            ],
            0,
        ),
        (vec!["--p".into(), "0".into(), "central".into(), CASIMIR.into()], 1),
        (vec!["--config".into(), fx("unknown_key.conf"), "roots".into()], 2),
        (
            vec!["--config".into(), fx("b2_large_verma.conf"), "irreducible".into()],
            3,
        ),
    ];
    for (args, want) in &cases {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let (got, _) = modlie(&a);
        ensure(got == *want, format!("{a:?}: exit {got}, want {want}"))?;
    }
    Ok(format!(
        "150 expressions round-trip; reports byte-identical; {} exit-code fixtures",
        cases.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: Vec<Criterion> = vec![
        (1, "root data", c1_root_data),
        (2, "Chevalley integrity", c2_chevalley_integrity),
        (3, "Casimir centrality", c3_casimir_centrality),
        (4, "sl2 baby Verma modules", c4_rudakov_shafarevich),
        (5, "B2 baby Verma dimension", c5_b2_dimension),
        (6, "sign ledger consistency", c6_sign_ledger),
        (7, "truncated independence", c7_truncated_independence),
        (8, "PBW engine properties", c8_pbw_properties),
        (9, "B_i conditions", c9_bi_conditions),
        (10, "invertibility scan", c10_invertibility),
        (11, "subalgebra closure", c11_subalgebra),
        (12, "CLI", c12_cli),
    ];
    // Written to the raw handle so the verdicts show up without --nocapture.
    let mut out = std::io::stdout();
    let mut failed = Vec::new();
    for (n, name, f) in criteria {
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match verdict {
            Ok(detail) => writeln!(out, "PASS {n:>2} {name}: {detail}").unwrap(),
            Err(detail) => {
                let tag = if EXPECTED_FAILURES.contains(&n) {
                    " (expected)"
                } else {
                    ""
                };
                writeln!(out, "FAIL {n:>2} {name}{tag}: {detail}").unwrap();
                failed.push(n);
            }
        }
    }
    assert_eq!(
        failed, EXPECTED_FAILURES,
        "failing criteria differ from the documented set"
    );
}
