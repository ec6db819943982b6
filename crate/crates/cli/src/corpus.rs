use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use jsnot::algebra::Schema;
use jsnot::notelim::{not_eliminate, stats, CorpusSummary, SizeRatioRecord};
use jsnot::semantics::{equiv_sample, EquivVerdict, InstanceGenerator};
use rayon::prelude::*;

use crate::commands::{load, oneof_mode};
use crate::{Dialect, OneOf};

/// One row of the corpus report.
pub struct RunRecord {
    pub file: String,
    pub record: Option<SizeRatioRecord>,
    pub warnings: Vec<String>,
}

fn collect(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let p = entry?.path();
        if p.is_dir() {
            collect(&p, out)?;
        } else if p.extension().is_some_and(|e| e == "json") {
            out.push(p);
        }
    }
    Ok(())
}

fn one(dir: &Path, path: &Path, oneof: OneOf, verify: usize, seed: u64) -> RunRecord {
    let file = path.strip_prefix(dir).unwrap_or(path).display().to_string();
    let mut warnings = Vec::new();
    let mut attempt = || -> Result<SizeRatioRecord> {
        let (d, w) = load(path, Dialect::Auto)?;
        warnings.extend(w);
        let negated = d.with_root(Schema::not(d.root.clone()));
        let start = Instant::now();
        let out = not_eliminate(&negated, oneof_mode(oneof))?;
        let elapsed = start.elapsed();
        if verify > 0 {
            let mut gen = InstanceGenerator::for_documents(&[&negated, &out], seed);
            if let EquivVerdict::Counterexample { instance, .. } = equiv_sample(&negated, &out, &mut gen, verify)? {
                anyhow::bail!("output differs on {}", instance.to_canonical());
            }
        }
        Ok(stats(&negated, &out, elapsed))
    };
    let record = match attempt() {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(format!("{e:#}"));
            None
        }
    };
    RunRecord { file, record, warnings }
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

pub fn tsv(rows: &[RunRecord], timings: bool) -> String {
    let mut s = String::from("file\tok\telapsed_ms\tinput_chars\toutput_chars\tratio\twarnings\n");
    for r in rows {
        let warnings = clean(&r.warnings.join("; "));
        match &r.record {
            Some(x) => {
                let ms = if timings {
                    format!("{:.3}", x.elapsed_ms())
                } else {
                    "-".into()
                };
                let _ = writeln!(
                    s,
                    "{}\ttrue\t{ms}\t{}\t{}\t{:.4}\t{warnings}",
                    r.file, x.input_chars, x.output_chars, x.ratio
                );
            }
            None => {
                let _ = writeln!(s, "{}\tfalse\t-\t-\t-\t-\t{warnings}", r.file);
            }
        }
    }
    s
}

pub fn summary(rows: &[RunRecord], timings: bool) -> String {
    let records: Vec<SizeRatioRecord> = rows.iter().filter_map(|r| r.record.clone()).collect();
    let failed = rows.len() - records.len();
    let mut s = format!("files\tok\tfailed\n{}\t{}\t{failed}\n\n", rows.len(), records.len());
    let Some(c) = CorpusSummary::of(&records) else { return s };
    if timings {
        let _ = writeln!(
            s,
            "runtime (ms)\tavg\tavg/KB\n\t{:.3}\t{:.3}\n",
            c.mean_ms, c.mean_ms_per_kb
        );
    }
    let _ = writeln!(
        s,
        "size ratio\tavg\tmedian\tmax\n\t{:.2}\t{:.2}\t{:.2}",
        c.mean_ratio, c.median_ratio, c.max_ratio
    );
    s
}

pub fn run(
    dir: &Path,
    report: Option<&Path>,
    oneof: OneOf,
    verify: usize,
    no_timings: bool,
    seed: u64,
) -> Result<bool> {
    let mut paths = Vec::new();
    collect(dir, &mut paths)?;
    paths.sort();
    let rows: Vec<RunRecord> = paths.par_iter().map(|p| one(dir, p, oneof, verify, seed)).collect();
    let table = tsv(&rows, !no_timings);
    match report {
        Some(p) => fs::write(p, &table).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{table}"),
    }
    print!("{}", summary(&rows, !no_timings));
    let failed = rows.iter().filter(|r| r.record.is_none()).count();
    if failed > 0 {
        anyhow::bail!("{failed} of {} files failed", rows.len());
    }
    Ok(true)
}
