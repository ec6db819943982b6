//! Acceptance criteria 1 to 9, one PASS/FAIL line each. Runs without the
//! libtest harness so the lines are always printed.

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::regex_oracle::Backtrack;
use common::rows::{build, RowParams, ROWS};
use common::{agree, corpus, corpus_file, corpus_patterns, doc, translate};
use jsnot::algebra::{check_guarded, document_size, Document, Env, Schema};
use jsnot::json::{parse_json, JsonValue};
use jsnot::notelim::{
    counting_env_for_keys, is_negation_free, lower_cont_after, not_eliminate, one_of_linear_env, stats, CorpusSummary,
    OneOfMode, SizeRatioRecord,
};
use jsnot::patterns::{Pattern, Regex};
use jsnot::semantics::{InstanceGenerator, Validator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn negate(d: &Document) -> Document {
    d.with_root(Schema::not(d.root.clone()))
}

fn rename(s: &Schema, names: &HashMap<String, String>) -> Schema {
    match s {
        Schema::Ref(x) => Schema::Ref(names[x].clone()),
        s => s.map_children(&mut |c| rename(c, names)),
    }
}

/// Variables renamed `v0, v1, …` in order of first use from the root.
fn alpha_normal(d: &Document) -> String {
    let mut names: HashMap<String, String> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut queue = vec![d.root.clone()];
    while let Some(s) = queue.pop() {
        let mut found = Vec::new();
        s.walk(&mut |n| {
            if let Schema::Ref(x) = n {
                found.push(x.clone());
            }
        });
        for x in found {
            if !names.contains_key(&x) {
                names.insert(x.clone(), format!("v{}", names.len()));
                order.push(x.clone());
                queue.insert(0, d.env[&x].clone());
            }
        }
    }
    let env: Env = order
        .iter()
        .map(|x| (names[x].clone(), rename(&d.env[x], &names)))
        .collect();
    Document::new(rename(&d.root, &names), env).to_string()
}

fn criterion_1() -> Outcome {
    let d = corpus_file("tshirt.json");
    let rewritten = corpus_file("tshirt-rewritten.json");
    let start = Instant::now();
    let out = not_eliminate(&d, OneOfMode::Linear).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !is_negation_free(&out) {
        return Err(format!("output has negation: {out}"));
    }
    let tested = agree(&out, &rewritten, 500, 0)?;
    agree(&d, &out, 500, 1)?;
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "{tested} instances, no counterexample, {:.3} ms",
        elapsed.as_secs_f64() * 1000.0
    ))
}

fn criterion_2() -> Outcome {
    let d = corpus_file("notelim-example.json");
    let out = not_eliminate(&d, OneOfMode::Linear).map_err(|e| e.to_string())?;
    let v = Validator::new(&out).map_err(|e| e.to_string())?;
    let cases = [
        ("1", true),
        (r#"{"b":2}"#, true),
        (r#"{"a":{"a":"foo"}}"#, true),
        (r#"{"a":{"a":{"a":{"a":null}}}}"#, true),
        (r#"{"a":1}"#, false),
    ];
    for (j, expected) in cases {
        if v.is_valid(&parse_json(j).unwrap()) != expected {
            return Err(format!("{j} should be {expected}"));
        }
    }
    let expected = doc(r#"x defs(x: props("^a$": (type(Obj) ∧ req("a") ∧ props("^a$": x; t)); t))"#);
    if alpha_normal(&out) != alpha_normal(&expected) {
        return Err(format!("final form differs:\n{out}"));
    }
    Ok(format!("{} instances as listed, final form matches", cases.len()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let files = corpus();
    let mut checks = 0;
    for (name, raw) in &files {
        let d = translate(raw);
        let neg = negate(&d);
        let out = not_eliminate(&neg, OneOfMode::Linear).map_err(|e| format!("{name}: {e}"))?;
        if !is_negation_free(&out) {
            return Err(format!("{name}: output has negation"));
        }
        let (v, vn, vo) = (
            Validator::new(&d).unwrap(),
            Validator::new(&neg).unwrap(),
            Validator::new(&out).unwrap(),
        );
        let mut gen = InstanceGenerator::for_documents(&[&d, &out], 0);
        for _ in 0..200 {
            let j = gen.next_value();
            let expected = !v.is_valid(&j);
            if vn.is_valid(&j) != expected || vo.is_valid(&j) != expected {
                return Err(format!("{name}: {}", j.to_canonical()));
            }
            checks += 1;
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "{} schemas, {checks} instances, 0 failures, {:.1} s",
        files.len(),
        elapsed.as_secs_f64()
    ))
}

fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0..1u32 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    for n in 1..=4usize {
        let superset: Vec<String> = (0..n + 2).map(|i| format!("k{i}")).collect();
        let keys = &superset[..n];
        let mut env = Env::new();
        let root = counting_env_for_keys(keys, &mut env);
        let d = Document::new(root, env);
        let v = Validator::new(&d).map_err(|e| e.to_string())?;
        for present in subsets(&superset) {
            let obj = JsonValue::obj(present.iter().map(|k| (k.clone(), JsonValue::Null)));
            // some key lies outside `keys`
            let expected = present.iter().any(|k| !keys.contains(k));
            if v.is_valid(&obj) != expected {
                return Err(format!("keys n={n}: {}", obj.to_canonical()));
            }
            checked += 1;
        }
    }
    for n in 0..=3u64 {
        let mut env = Env::new();
        let root = lower_cont_after(n, &Schema::Const(JsonValue::Bool(true)), &mut env);
        let d = Document::new(root, env);
        let v = Validator::new(&d).map_err(|e| e.to_string())?;
        for len in 0..=6u32 {
            for mask in 0..1u32 << len {
                let items: Vec<bool> = (0..len).map(|i| mask & (1 << i) != 0).collect();
                let expected = items.iter().skip(n as usize).any(|b| *b);
                let arr = JsonValue::Arr(items.into_iter().map(JsonValue::Bool).collect());
                if v.is_valid(&arr) != expected {
                    return Err(format!("contAfter n={n}: {}", arr.to_canonical()));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} instances, 0 mismatches"))
}

/// Scale `c` (geometric mean of `y / f(n)`) and the largest deviation
/// factor of any point from `c·f(n)`.
fn fit_monomial(points: &[(u64, u64)], f: impl Fn(u64) -> f64) -> (f64, f64) {
    let logs: Vec<f64> = points.iter().map(|(n, y)| (*y as f64 / f(*n)).ln()).collect();
    let c = (logs.iter().sum::<f64>() / logs.len() as f64).exp();
    let worst = points
        .iter()
        .map(|(n, y)| (*y as f64 / (c * f(*n))).ln().abs().exp())
        .fold(1.0, f64::max);
    (c, worst)
}

/// Least-squares polynomial of the given degree, coefficients from the
/// constant term up, and the largest deviation factor of any point from it.
fn fit_polynomial(points: &[(u64, u64)], degree: usize) -> (Vec<f64>, f64) {
    let k = degree + 1;
    let mut a = vec![vec![0.0; k + 1]; k];
    for (n, y) in points {
        let powers: Vec<f64> = (0..k).map(|i| (*n as f64).powi(i as i32)).collect();
        for r in 0..k {
            for c in 0..k {
                a[r][c] += powers[r] * powers[c];
            }
            a[r][k] += powers[r] * *y as f64;
        }
    }
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|x, y| a[*x][col].abs().total_cmp(&a[*y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for r in 0..k {
            if r != col {
                let m = a[r][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= m * p;
                }
            }
        }
    }
    let coeffs: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
    let eval = |n: u64| {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * (n as f64).powi(i as i32))
            .sum::<f64>()
    };
    let worst = points
        .iter()
        .map(|(n, y)| {
            let (p, y) = (eval(*n), *y as f64);
            if p <= 0.0 {
                f64::INFINITY
            } else {
                (y / p).max(p / y)
            }
        })
        .fold(1.0, f64::max);
    (coeffs, worst)
}

fn criterion_5() -> Outcome {
    let mut records: Vec<SizeRatioRecord> = Vec::new();
    for (name, raw) in corpus() {
        let neg = negate(&translate(&raw));
        let start = Instant::now();
        let out = not_eliminate(&neg, OneOfMode::Naive).map_err(|e| format!("{name}: {e}"))?;
        records.push(stats(&neg, &out, start.elapsed()));
    }
    let summary = CorpusSummary::of(&records).unwrap();
    let k = records
        .iter()
        .map(|r| r.output_size as f64 / r.input_size as f64)
        .fold(0.0, f64::max);

    let counting: Vec<(u64, u64)> = (1..=16u64)
        .map(|n| {
            let keys: Vec<String> = (0..n).map(|i| format!("k{i}")).collect();
            let mut env = Env::new();
            let root = counting_env_for_keys(&keys, &mut env);
            (n, document_size(&Document::new(root, env)))
        })
        .collect();
    let (cq, mq) = fit_monomial(&counting, |n| (n * n) as f64);
    let (pq, dq) = fit_polynomial(&counting, 2);

    let linear: Vec<(u64, u64)> = (2..=32u64)
        .map(|n| {
            let args: Vec<Schema> = (0..n).map(|i| Schema::Const(JsonValue::int(i as i64))).collect();
            let mut k = 0;
            let (root, env) = one_of_linear_env(args, &mut |base| {
                k += 1;
                format!("{base}_{k}")
            });
            (n, document_size(&Document::new(root, env)))
        })
        .collect();
    let (cl, ml) = fit_monomial(&linear, |n| n as f64);
    let (pl, dl) = fit_polynomial(&linear, 1);

    let detail = format!(
        "avg ratio {:.2}, max {:.2} over {} schemas; K = {k:.2}; \
         counting {:.2}n² {:+.1}n {:+.1} (worst {dq:.2}×, pure {cq:.2}n² worst {mq:.2}×); \
         linear ⊕ {:.2}n {:+.1} (worst {dl:.2}×, pure {cl:.2}n worst {ml:.2}×)",
        summary.mean_ratio, summary.max_ratio, summary.count, pq[2], pq[1], pq[0], pl[1], pl[0],
    );
    if summary.mean_ratio <= 5.0 && summary.max_ratio <= 30.0 && dq <= 2.0 && dl <= 2.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn same_language(p: &Regex, q: &Regex) -> bool {
    p.dfa().intersect(&q.dfa().complement()).is_empty() && q.dfa().intersect(&p.dfa().complement()).is_empty()
}

fn criterion_6() -> Outcome {
    let patterns = corpus_patterns();
    if patterns.len() < 50 {
        return Err(format!("only {} corpus patterns", patterns.len()));
    }
    let patterns = &patterns[..50];
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let compiled: Vec<Regex> = patterns
        .iter()
        .map(|p| Regex::parse(p).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let mut strings = 0;
    for (src, r) in patterns.iter().zip(&compiled) {
        let oracle = Backtrack::new(src);
        let c = r.complement();
        let mut alphabet = r.dfa().boundary_chars();
        alphabet.extend(['a', 'Z', '0', '-', '.', ' ']);
        for i in 0..1000 {
            let s = match i % 3 {
                0 => r.dfa().sample(&mut rng, 24),
                1 => c.dfa().sample(&mut rng, 24),
                _ => None,
            }
            .unwrap_or_else(|| {
                let len = rng.gen_range(0..12);
                (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
            });
            let m = r.is_match(&s);
            if c.is_match(&s) == m || oracle.is_match(&s) != m {
                return Err(format!("{src:?} on {s:?}"));
            }
            strings += 1;
        }
    }
    for w in compiled.windows(2) {
        let (p, q) = (w[0].pattern().clone(), w[1].pattern().clone());
        let lhs = Regex::new(Pattern::not(Pattern::and(p.clone(), q.clone()))).unwrap();
        let rhs = Regex::new(Pattern::union(vec![Pattern::not(p.clone()), Pattern::not(q.clone())])).unwrap();
        let lhs2 = Regex::new(Pattern::not(Pattern::union(vec![p.clone(), q.clone()]))).unwrap();
        let rhs2 = Regex::new(Pattern::and(Pattern::not(p.clone()), Pattern::not(q.clone()))).unwrap();
        if !same_language(&lhs, &rhs) || !same_language(&lhs2, &rhs2) {
            return Err(format!("De Morgan fails for {p} and {q}"));
        }
    }
    Ok(format!(
        "50 patterns, {strings} strings, {} De Morgan pairs",
        compiled.len() - 1
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for row in ROWS {
        for _ in 0..8 {
            let p = RowParams {
                a: rng.gen_range(0..16),
                b: rng.gen_range(0..16),
                s1: rng.gen_range(0..64),
                s2: rng.gen_range(0..64),
                pat: rng.gen_range(0..64),
                q: rng.gen_range(0..8),
                ty: rng.gen_range(0..6),
            };
            let (neg, rhs) = build(row, &p);
            agree(&neg, &rhs, 200, 0).map_err(|e| format!("row {}: RHS {e}", row.name))?;
            let out = not_eliminate(&neg, OneOfMode::Linear).map_err(|e| format!("row {}: {e}", row.name))?;
            if !is_negation_free(&out) {
                return Err(format!("row {}: output has negation", row.name));
            }
            agree(&neg, &out, 200, 0).map_err(|e| format!("row {}: output {e}", row.name))?;
        }
    }
    Ok(format!("{} rows × 8 instantiations × 200 instances", ROWS.len()))
}

fn criterion_8() -> Outcome {
    let c = common::suite::conformance();
    let rate = c.passed as f64 * 100.0 / c.applicable as f64;
    let detail = format!(
        "{}/{} applicable cases pass ({rate:.1}%), negation agrees on {}/{}, {} groups excluded",
        c.passed,
        c.applicable,
        c.negation_agree,
        c.applicable,
        c.excluded_groups.len()
    );
    if rate >= 95.0 && c.negation_agree == c.applicable {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_9() -> Outcome {
    for bad in ["x defs(x: ¬x)", "x defs(x: x)"] {
        if check_guarded(&doc(bad)).is_ok() {
            return Err(format!("{bad} accepted"));
        }
    }
    for name in ["root-recursive.json", "notelim-example.json"] {
        check_guarded(&corpus_file(name)).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok("2 rejected, 2 accepted".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 9] = [
        ("T-shirt reproduction", criterion_1),
        ("recursive example", criterion_2),
        ("double negation over corpus", criterion_3),
        ("counting encodings vs brute force", criterion_4),
        ("size behavior", criterion_5),
        ("pattern algebra", criterion_6),
        ("not-pushing rows", criterion_7),
        ("Draft-06 suite conformance", criterion_8),
        ("guardedness gate", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
