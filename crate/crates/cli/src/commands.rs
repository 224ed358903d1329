//! Command runners. Each returns an exit code, a text summary and a JSON report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use modlie::leebasis::{
    self, build_case, gen_bi_sized, invertibility_scan, solve_signs, usable_slots, verify_independence_truncated,
    verify_lee, LeeError,
};
use modlie::redenv::{compatible_weights, is_invariant, Irreducibility, IrreducibilityOptions};
use modlie::{baby_verma, Character, Enveloping, Family, LieAlgebra, MatrixRep, Root};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::expr::{evaluate, parse_in};
use crate::subalg::{check_embedding, standard_embeddings};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Largest baby Verma module `--rep auto` builds.
pub const AUTO_VERMA_MAX_DIM: u128 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepChoice {
    Auto,
    Verma,
    Adjoint,
    Natural,
    None,
}

impl std::str::FromStr for RepChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "auto" => RepChoice::Auto,
            "verma" => RepChoice::Verma,
            "adjoint" => RepChoice::Adjoint,
            "natural" => RepChoice::Natural,
            "none" => RepChoice::None,
            _ => return Err(format!("unknown rep {s:?} (auto, verma, adjoint, natural, none)")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Roots,
    StructTable,
    NormalForm { expr: String },
    Central { expr: String },
    VerifyLee { rep: RepChoice },
    BabyVerma { export: Option<PathBuf> },
    Irreducible,
    Independence { rep: RepChoice },
    CheckSubalgebra { sub_rank: Option<usize> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Roots => "roots",
            Command::StructTable => "struct-table",
            Command::NormalForm { .. } => "normalform",
            Command::Central { .. } => "central",
            Command::VerifyLee { .. } => "verify-lee",
            Command::BabyVerma { .. } => "baby-verma",
            Command::Irreducible => "irreducible",
            Command::Independence { .. } => "independence",
            Command::CheckSubalgebra { .. } => "check-subalgebra",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub summary: String,
    pub report: Value,
}

impl Outcome {
    /// Report text as written to `--out`.
    pub fn report_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report serialises");
        s.push('\n');
        s
    }
}

/// Failure that maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Res = Result<Outcome, UsageError>;

pub fn run(cmd: &Command, cfg: &RunConfig) -> Outcome {
    let result = match cmd {
        Command::Roots => roots(cfg),
        Command::StructTable => struct_table(cfg),
        Command::NormalForm { expr } => normal_form(cfg, expr),
        Command::Central { expr } => central(cfg, expr),
        Command::VerifyLee { rep } => verify(cfg, *rep),
        Command::BabyVerma { export } => verma(cfg, export.as_deref()),
        Command::Irreducible => irreducible(cfg),
        Command::Independence { rep } => independence(cfg, *rep),
        Command::CheckSubalgebra { sub_rank } => check_subalgebra(cfg, *sub_rank),
    };
    let mut out = result.unwrap_or_else(|UsageError(msg)| Outcome {
        code: EXIT_USAGE,
        summary: format!("error: {msg}"),
        report: json!({ "error": msg }),
    });
    if let Value::Object(m) = &mut out.report {
        m.insert("schema".into(), json!(1));
        m.insert("command".into(), json!(cmd.name()));
    }
    out
}

fn header(cfg: &RunConfig) -> Value {
    json!({ "family": cfg.family.to_string(), "rank": cfg.rank, "p": cfg.p })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(x), Value::Object(y)) = (&mut a, b) {
        x.extend(y);
    }
    a
}

fn roots(cfg: &RunConfig) -> Res {
    let rs = cfg.root_system()?;
    let mut summary = format!("{}{}: {} roots\nbase:", rs.family(), rs.rank(), rs.roots().len());
    for b in rs.base() {
        let _ = write!(summary, " {}", b.label());
    }
    let list: Vec<Value> = rs
        .roots()
        .iter()
        .map(|r| json!({ "root": r.label(), "height": rs.height(r), "norm2": r.norm2() }))
        .collect();
    let mut orbits: Vec<Vec<String>> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for r in rs.roots() {
        if seen.contains(r) {
            continue;
        }
        let orbit = rs.weyl_orbit(r)?;
        seen.extend(orbit.iter().cloned());
        let _ = write!(
            summary,
            "\n  orbit of {} roots with (r, r) = {}",
            orbit.len(),
            r.norm2()
        );
        orbits.push(orbit.iter().map(Root::label).collect());
    }
    let report = merge(
        header(cfg),
        json!({
            "roots": list,
            "base": rs.base().iter().map(Root::label).collect::<Vec<_>>(),
            "orbits": orbits,
        }),
    );
    Ok(Outcome {
        code: EXIT_PASS,
        summary,
        report,
    })
}

fn struct_table(cfg: &RunConfig) -> Res {
    let alg = cfg.algebra()?;
    let text = alg.structure_table_text();
    let report = merge(
        header(cfg),
        json!({
            "dim": alg.dim(),
            "basis": (0..alg.dim()).map(|i| alg.label(i)).collect::<Vec<_>>(),
            "table": text.lines().collect::<Vec<_>>(),
        }),
    );
    Ok(Outcome {
        code: EXIT_PASS,
        summary: text.trim_end().to_string(),
        report,
    })
}

fn normal_form(cfg: &RunConfig, input: &str) -> Res {
    let alg = cfg.algebra()?;
    let env = Enveloping::new(&alg);
    let e = parse_in(input, alg.root_system())?;
    let u = evaluate(&e, &env)?;
    let nf = env.format(&u);
    let report = merge(header(cfg), json!({ "input": input, "normal_form": nf }));
    Ok(Outcome {
        code: EXIT_PASS,
        summary: nf,
        report,
    })
}

fn central(cfg: &RunConfig, input: &str) -> Res {
    let alg = cfg.algebra()?;
    let env = Enveloping::new(&alg);
    let e = parse_in(input, alg.root_system())?;
    let u = evaluate(&e, &env)?;
    let witness = env.centrality_witness(&u)?;
    let (code, summary, w) = match &witness {
        None => (EXIT_PASS, "central: true".to_string(), Value::Null),
        Some((g, c)) => {
            let text = format!("[{}, u] = {}", alg.label(*g), env.format(c));
            (
                EXIT_COUNTEREXAMPLE,
                format!("central: false\nwitness: {text}"),
                json!(text),
            )
        }
    };
    let report = merge(
        header(cfg),
        json!({ "input": input, "normal_form": env.format(&u), "central": witness.is_none(), "witness": w }),
    );
    Ok(Outcome { code, summary, report })
}

/// `χ` from the config. Without one, `χ(x(-e1)) = 1`, or `χ(x(-α_1)) = 1`
/// when `-e1` is not a root.
pub fn character(cfg: &RunConfig, alg: &LieAlgebra) -> Result<Character, UsageError> {
    let pairs = if cfg.chi.is_empty() {
        let rs = alg.root_system();
        let e1 = Root::unit(rs.ambient_dim(), 1).neg();
        let r = if rs.contains(&e1) { e1 } else { rs.base()[0].neg() };
        vec![(alg.root_vector_index(&r)?, 1)]
    } else {
        cfg.chi_indices(alg)?
    };
    Ok(Character::from_pairs(alg, &pairs))
}

/// `λ` from the config; the first compatible weight when none is given.
pub fn weight(cfg: &RunConfig, alg: &LieAlgebra, chi: &Character) -> Result<Vec<u64>, UsageError> {
    if cfg.lambda.is_empty() {
        compatible_weights(alg, chi)
            .into_iter()
            .map(|sols| sols.first().copied())
            .collect::<Option<Vec<u64>>>()
            .ok_or_else(|| UsageError("no weight is compatible with the character".into()))
    } else {
        Ok(cfg.lambda_values(alg)?)
    }
}

fn chi_json(alg: &LieAlgebra, chi: &Character) -> Value {
    let m: BTreeMap<usize, (String, u64)> = chi
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(i, &v)| (i, (alg.label(i), v)))
        .collect();
    json!(m.into_values().collect::<Vec<_>>())
}

fn build_verma(cfg: &RunConfig, alg: &LieAlgebra) -> Result<MatrixRep, UsageError> {
    if alg.characteristic() == 0 {
        return Err(UsageError("baby Verma modules need p > 0".into()));
    }
    let chi = character(cfg, alg)?;
    let lambda = weight(cfg, alg, &chi)?;
    Ok(baby_verma(alg, &chi, &lambda)?)
}

fn choose_rep(cfg: &RunConfig, alg: &LieAlgebra, choice: RepChoice) -> Result<Option<MatrixRep>, UsageError> {
    if alg.characteristic() == 0 {
        return match choice {
            RepChoice::None | RepChoice::Auto => Ok(None),
            _ => Err(UsageError("matrix reps need p > 0".into())),
        };
    }
    let verma_dim = (alg.characteristic() as u128).pow(alg.num_positive() as u32);
    Ok(match choice {
        RepChoice::None => None,
        RepChoice::Verma => Some(build_verma(cfg, alg)?),
        RepChoice::Adjoint => Some(MatrixRep::adjoint(alg)?),
        RepChoice::Natural => Some(MatrixRep::natural(alg)?),
        RepChoice::Auto if verma_dim <= AUTO_VERMA_MAX_DIM => Some(build_verma(cfg, alg)?),
        RepChoice::Auto => Some(MatrixRep::natural(alg)?),
    })
}

fn rep_json(alg: &LieAlgebra, rep: Option<&MatrixRep>) -> Value {
    match rep {
        None => Value::Null,
        Some(r) => json!({
            "kind": format!("{:?}", r.kind()).to_lowercase(),
            "dim": r.dim(),
            "chi": chi_json(alg, r.chi()),
            "lambda": r.lambda(),
        }),
    }
}

fn lee_usage(e: LeeError) -> UsageError {
    UsageError(e.to_string())
}

fn verify(cfg: &RunConfig, choice: RepChoice) -> Res {
    let alg = cfg.algebra()?;
    let rep = choose_rep(cfg, &alg, choice)?;
    let report = verify_lee(&alg, cfg.case, cfg.seed, rep.as_ref()).map_err(lee_usage)?;
    let mut summary = format!(
        "{}{} p={} case {} alpha {}\n",
        report.family, report.rank, report.p, report.case, report.alpha
    );
    for s in &report.specs {
        let Some(slot) = s.slot else {
            let why = s.impossible.as_deref().unwrap_or("");
            let _ = writeln!(summary, "  [-] {} {} ({why})", s.printed, s.status);
            continue;
        };
        let signs = match s.independent_solutions.as_slice() {
            [] => String::new(),
            [only] if only.is_empty() => " (no signs)".into(),
            all => format!(" signs {}", all.join(",")),
        };
        let _ = writeln!(summary, "  [{slot}] A_{} {}{signs}", s.target, s.status);
    }
    let sm = &report.summary;
    let bi_ok = report.bi.check.as_ref().is_some_and(|c| c.all_pass());
    let _ = write!(
        summary,
        "solved {}/{} (no solution {}, impossible for rank {}, uncovered {}); oracle consistent: {}; B_i: {}",
        sm.solved,
        sm.specs,
        sm.no_solution,
        sm.impossible_for_rank,
        sm.uncovered,
        sm.oracle_consistent,
        report
            .bi
            .error
            .as_deref()
            .unwrap_or(if bi_ok { "ok" } else { "failed" })
    );
    let clean = sm.solved == sm.specs && sm.oracle_consistent && bi_ok;
    let mut value = serde_json::to_value(&report)?;
    if let Value::Object(m) = &mut value {
        m.insert("rep".into(), rep_json(&alg, rep.as_ref()));
    }
    Ok(Outcome {
        code: if clean { EXIT_PASS } else { EXIT_COUNTEREXAMPLE },
        summary,
        report: value,
    })
}

fn verma(cfg: &RunConfig, export: Option<&std::path::Path>) -> Res {
    let alg = cfg.algebra()?;
    let rep = build_verma(cfg, &alg)?;
    if let Some(path) = export {
        std::fs::write(path, rep.export_text(&alg))?;
    }
    let brackets: Vec<(String, String)> = rep
        .bracket_failures(&alg)
        .into_iter()
        .map(|(a, b)| (alg.label(a), alg.label(b)))
        .collect();
    let restricted: Vec<String> = rep
        .restrictedness_failures(&alg)
        .into_iter()
        .map(|i| alg.label(i))
        .collect();
    let expected = (alg.characteristic() as u128).pow(alg.num_positive() as u32);
    let ok = brackets.is_empty() && restricted.is_empty() && rep.dim() as u128 == expected;
    let summary = format!(
        "baby Verma: dim {} (p^m = {expected}); bracket failures {}; restrictedness failures {}",
        rep.dim(),
        brackets.len(),
        restricted.len()
    );
    let report = merge(
        header(cfg),
        json!({
            "rep": rep_json(&alg, Some(&rep)),
            "expected_dim": expected.to_string(),
            "bracket_failures": brackets,
            "restrictedness_failures": restricted,
        }),
    );
    Ok(Outcome {
        code: if ok { EXIT_PASS } else { EXIT_COUNTEREXAMPLE },
        summary,
        report,
    })
}

fn irreducible(cfg: &RunConfig) -> Res {
    let alg = cfg.algebra()?;
    let rep = build_verma(cfg, &alg)?;
    let opts = IrreducibilityOptions {
        trials: cfg.trials,
        seed: cfg.seed,
        ..Default::default()
    };
    let verdict = modlie::is_irreducible(&rep, &opts);
    let (code, text, sub) = match &verdict {
        Irreducibility::Irreducible => (EXIT_PASS, "irreducible".to_string(), Value::Null),
        Irreducibility::Submodule(b) => {
            let invariant = is_invariant(&rep, b);
            (
                EXIT_COUNTEREXAMPLE,
                format!("submodule of dimension {} (invariance verified: {invariant})", b.len()),
                json!({ "dim": b.len(), "invariant": invariant, "basis": b }),
            )
        }
        Irreducibility::Inconclusive => (EXIT_INCONCLUSIVE, "inconclusive".to_string(), Value::Null),
    };
    let report = merge(
        header(cfg),
        json!({
            "rep": rep_json(&alg, Some(&rep)),
            "method": if rep.dim() <= opts.burnside_max_dim { "burnside" } else { "random-spin" },
            "trials": opts.trials,
            "seed": opts.seed,
            "verdict": text,
            "submodule": sub,
        }),
    );
    Ok(Outcome {
        code,
        summary: format!("dim {}: {text}", rep.dim()),
        report,
    })
}

#[derive(Serialize)]
struct Pair {
    slot: usize,
    target: String,
    b: Vec<u64>,
    signs: String,
    c: i64,
}

fn independence(cfg: &RunConfig, choice: RepChoice) -> Res {
    let alg = cfg.algebra()?;
    if alg.characteristic() == 0 {
        return Err(UsageError("independence needs p > 0".into()));
    }
    let rep = match choose_rep(cfg, &alg, choice)? {
        Some(r) => r,
        None => return Err(UsageError("independence needs a rep".into())),
    };
    let env = Enveloping::new(&alg);
    let specs = build_case(&alg, cfg.case).map_err(lee_usage)?;
    let verdicts = specs
        .iter()
        .map(|s| solve_signs(&env, s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(lee_usage)?;
    let keep = usable_slots(&specs, &verdicts);
    if keep.is_empty() {
        return Err(UsageError("no solved slot specs to assemble".into()));
    }
    let alpha = cfg.case.alpha(alg.rank());
    let bi = gen_bi_sized(&alg, &alpha, keep.len(), cfg.seed).map_err(lee_usage)?;
    let cand = leebasis::assemble_subset(&env, &specs, &verdicts, &bi, Some(&rep), &keep).map_err(lee_usage)?;
    let ind = verify_independence_truncated(&alg, &cand, &rep, cfg.bound, cfg.seed).map_err(lee_usage)?;
    let p = alg.characteristic();
    let sample: Vec<u64> = if cfg.c_beta.is_empty() {
        (0..p).collect()
    } else {
        cfg.c_beta.iter().map(|c| c.rem_euclid(p as i64) as u64).collect()
    };
    let mut inv = Vec::new();
    for pair in &cand.pairs {
        if let Some(e) = invertibility_scan(&env, &specs[pair.slot], &pair.signs, &rep).map_err(lee_usage)? {
            let singular: Vec<u64> = sample.iter().copied().filter(|c| e.singular_c.contains(c)).collect();
            inv.push(
                json!({ "target": e.target, "part": e.part, "singular_c": e.singular_c, "sampled_singular": singular }),
            );
        }
    }
    let pairs: Vec<Pair> = cand
        .pairs
        .iter()
        .map(|q| Pair {
            slot: q.slot,
            target: q.target.label(),
            b: q.b.clone(),
            signs: leebasis::format_signs(&q.signs),
            c: q.c,
        })
        .collect();
    let ok = ind.full_rank() && ind.distinct_normal_forms && ind.permuted_rank == ind.rank;
    let summary = format!(
        "{} elements with exponent sum <= {} over slots {:?}: rank {} (permuted {}), distinct normal forms {}, {}",
        ind.count,
        ind.bound,
        keep,
        ind.rank,
        ind.permuted_rank,
        ind.distinct_normal_forms,
        if ind.full_rank() { "independent" } else { "dependent" }
    );
    let report = merge(
        header(cfg),
        json!({
            "case": cfg.case,
            "seed": cfg.seed,
            "rep": rep_json(&alg, Some(&rep)),
            "pairs": pairs,
            "independence": ind,
            "invertibility": inv,
        }),
    );
    Ok(Outcome {
        code: if ok { EXIT_PASS } else { EXIT_COUNTEREXAMPLE },
        summary,
        report,
    })
}

fn check_subalgebra(cfg: &RunConfig, sub_rank: Option<usize>) -> Res {
    let alg = cfg.algebra()?;
    let k = sub_rank.unwrap_or(alg.rank().saturating_sub(1));
    let min = if cfg.family == Family::D {
        2
    } else {
        cfg.family.min_rank()
    };
    if k < min || k >= alg.rank() {
        return Err(UsageError(format!(
            "sub rank {k} out of range for {}{}",
            cfg.family, cfg.rank
        )));
    }
    let mut reports = Vec::new();
    let mut summary = String::new();
    for coords in standard_embeddings(&alg, k) {
        let r = check_embedding(&alg, &coords)?;
        let _ = writeln!(
            summary,
            "{}{k} on coordinates {:?} ({} roots):",
            cfg.family, coords, r.sub_roots
        );
        for c in &r.checks {
            let _ = writeln!(
                summary,
                "  {}: dim {}, closed {}, fixpoint dim {}, agree {}",
                c.span, c.span_dim, c.closed, c.fixpoint_dim, c.agrees
            );
        }
        reports.push(r);
    }
    let ok = reports.iter().all(|r| r.checks.iter().all(|c| c.closed && c.agrees));
    let report = merge(header(cfg), json!({ "sub_rank": k, "embeddings": reports }));
    Ok(Outcome {
        code: if ok { EXIT_PASS } else { EXIT_COUNTEREXAMPLE },
        summary: summary.trim_end().into(),
        report,
    })
}
