use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use jsnot::algebra::{check_guarded, parse_document, Document, Schema};
use jsnot::json::{parse_json, JsonValue};
use jsnot::notelim::{analyze_expressibility, not_eliminate, stats, OneOfMode};
use jsnot::semantics::{equiv_sample, EquivVerdict, InstanceGenerator, Validator};
use jsnot::translate::{from_json_schema, to_json_schema, DraftDialect, ExportMode};

use crate::{Dialect, OneOf, Target, TranslateMode};

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn dialect_for(d: Dialect, raw: &JsonValue) -> DraftDialect {
    match d {
        Dialect::Auto => DraftDialect::infer(raw),
        Dialect::Draft06 => DraftDialect::Draft06,
        Dialect::Draft2019 => DraftDialect::Draft2019Subset,
    }
}

pub fn oneof_mode(o: OneOf) -> OneOfMode {
    match o {
        OneOf::Naive => OneOfMode::Naive,
        OneOf::Linear => OneOfMode::Linear,
    }
}

/// A JSON Schema file is translated; anything that is not JSON is read as
/// algebra text.
pub fn load(path: &Path, dialect: Dialect) -> Result<(Document, Vec<String>)> {
    let text = read(path)?;
    load_text(&text, dialect).with_context(|| format!("loading {}", path.display()))
}

pub fn load_text(text: &str, dialect: Dialect) -> Result<(Document, Vec<String>)> {
    match parse_json(text) {
        Ok(raw) => {
            let t = from_json_schema(&raw, dialect_for(dialect, &raw))?;
            Ok((t.document, t.warnings))
        }
        Err(json_err) => match parse_document(text) {
            Ok(d) => Ok((d, Vec::new())),
            Err(alg_err) => bail!("neither JSON ({json_err}) nor algebra text ({alg_err})"),
        },
    }
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn render(d: &Document, target: Target) -> (String, Vec<String>) {
    let mode = match target {
        Target::Algebra => return (d.to_string(), Vec::new()),
        Target::Extended => ExportMode::Extended,
        Target::Draft2019 => ExportMode::Draft2019,
        Target::Draft06WithNot => ExportMode::Draft06WithNot,
    };
    let e = to_json_schema(d, mode);
    (e.schema.to_pretty(), e.warnings)
}

pub fn translate(
    input: &Path,
    dialect: Dialect,
    mode: TranslateMode,
    target: Target,
    out: Option<&Path>,
) -> Result<bool> {
    let text = read(input)?;
    let rendered = match mode {
        TranslateMode::Algebra => {
            let raw = parse_json(&text).with_context(|| format!("parsing {}", input.display()))?;
            let t = from_json_schema(&raw, dialect_for(dialect, &raw))?;
            warn(&t.warnings);
            t.document.to_string()
        }
        TranslateMode::Back => {
            let d = parse_document(&text).with_context(|| format!("parsing {}", input.display()))?;
            let target = if matches!(target, Target::Algebra) {
                Target::Extended
            } else {
                target
            };
            let (s, w) = render(&d, target);
            warn(&w);
            s
        }
    };
    write_out(out, &rendered)?;
    Ok(true)
}

pub fn notelim(
    input: &Path,
    oneof: OneOf,
    target: Target,
    dialect: Dialect,
    negate_root: bool,
    with_stats: bool,
    out: Option<&Path>,
) -> Result<bool> {
    let (mut d, w) = load(input, dialect)?;
    warn(&w);
    if negate_root {
        d = d.with_root(Schema::not(d.root.clone()));
    }
    let start = Instant::now();
    let result = not_eliminate(&d, oneof_mode(oneof))?;
    let elapsed = start.elapsed();
    let (s, w) = render(&result, target);
    warn(&w);
    write_out(out, &s)?;
    if with_stats {
        let r = stats(&d, &result, elapsed);
        eprintln!("file\telapsed_ms\tinput_chars\toutput_chars\tratio");
        eprintln!(
            "{}\t{:.3}\t{}\t{}\t{:.4}",
            input.display(),
            r.elapsed_ms(),
            r.input_chars,
            r.output_chars,
            r.ratio
        );
    }
    Ok(true)
}

fn instance(arg: &str) -> Result<JsonValue> {
    let text = match arg.strip_prefix('@') {
        Some(p) => read(Path::new(p))?,
        None => arg.to_string(),
    };
    parse_json(&text).with_context(|| format!("instance {arg}"))
}

pub fn validate(schema: &Path, instances: &[String], dialect: Dialect) -> Result<bool> {
    let (d, w) = load(schema, dialect)?;
    warn(&w);
    let v = Validator::new(&d)?;
    let mut all = true;
    for arg in instances {
        let ok = v.is_valid(&instance(arg)?);
        all &= ok;
        println!("{ok}");
    }
    Ok(all)
}

pub fn check(input: &Path, dialect: Dialect, seed: u64) -> Result<bool> {
    let (d, w) = load(input, dialect)?;
    warn(&w);
    if let Err(e) = check_guarded(&d) {
        println!("unguarded: {e}");
        bail!("{} is not guarded", input.display());
    }
    println!("guarded");
    let report = analyze_expressibility(&d, seed)?;
    print!("{report}");
    println!("fully expressible: {}", report.fully_expressible());
    Ok(true)
}

pub fn equiv(a: &Path, b: &Path, n: usize, dialect: Dialect, seed: u64) -> Result<bool> {
    let (da, wa) = load(a, dialect)?;
    let (db, wb) = load(b, dialect)?;
    warn(&wa);
    warn(&wb);
    let mut gen = InstanceGenerator::for_documents(&[&da, &db], seed);
    match equiv_sample(&da, &db, &mut gen, n)? {
        EquivVerdict::Indistinguishable { tested } => {
            println!("indistinguishable on {tested} instances");
            Ok(true)
        }
        EquivVerdict::Counterexample { instance, left, right } => {
            println!("counterexample: {}", instance.to_canonical());
            println!("{}: {left}", a.display());
            println!("{}: {right}", b.display());
            Ok(false)
        }
    }
}
