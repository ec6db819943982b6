use std::time::Duration;

use crate::algebra::{document_size, Document};

/// Sizes of a document before and after a rewriting.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeRatioRecord {
    /// Characters of the canonical text of the input.
    pub input_chars: usize,
    pub output_chars: usize,
    /// `output_chars / input_chars`.
    pub ratio: f64,
    pub input_size: u64,
    pub output_size: u64,
    pub elapsed: Duration,
}

impl SizeRatioRecord {
    pub fn elapsed_ms(&self) -> f64 {
        self.elapsed.as_secs_f64() * 1000.0
    }

    /// Milliseconds per 1024 input characters.
    pub fn ms_per_kb(&self) -> f64 {
        self.elapsed_ms() * 1024.0 / self.input_chars.max(1) as f64
    }
}

pub fn stats(before: &Document, after: &Document, elapsed: Duration) -> SizeRatioRecord {
    let input_chars = before.to_string().chars().count();
    let output_chars = after.to_string().chars().count();
    SizeRatioRecord {
        input_chars,
        output_chars,
        ratio: output_chars as f64 / input_chars.max(1) as f64,
        input_size: document_size(before),
        output_size: document_size(after),
        elapsed,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSummary {
    pub count: usize,
    pub mean_ratio: f64,
    pub median_ratio: f64,
    pub max_ratio: f64,
    pub mean_ms: f64,
    pub mean_ms_per_kb: f64,
}

impl CorpusSummary {
    pub fn of(records: &[SizeRatioRecord]) -> Option<CorpusSummary> {
        if records.is_empty() {
            return None;
        }
        let n = records.len() as f64;
        let mut ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
        ratios.sort_by(f64::total_cmp);
        let mid = ratios.len() / 2;
        let median_ratio = if ratios.len() % 2 == 1 {
            ratios[mid]
        } else {
            (ratios[mid - 1] + ratios[mid]) / 2.0
        };
        Some(CorpusSummary {
            count: records.len(),
            mean_ratio: ratios.iter().sum::<f64>() / n,
            median_ratio,
            max_ratio: *ratios.last().unwrap(),
            mean_ms: records.iter().map(|r| r.elapsed_ms()).sum::<f64>() / n,
            mean_ms_per_kb: records.iter().map(|r| r.ms_per_kb()).sum::<f64>() / n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_document;

    #[test]
    fn ratio_and_summary() {
        let a = parse_document("type(Num)").unwrap();
        let b = parse_document("(type(Num) ∧ t)").unwrap();
        let r = stats(&a, &b, Duration::from_millis(2));
        assert_eq!((r.input_chars, r.output_chars), (9, 15));
        assert!((r.ratio - 15.0 / 9.0).abs() < 1e-12);
        let s = CorpusSummary::of(&[r.clone(), SizeRatioRecord { ratio: 1.0, ..r }]).unwrap();
        assert!((s.median_ratio - (1.0 + 15.0 / 9.0) / 2.0).abs() < 1e-12);
        assert_eq!(s.max_ratio, 15.0 / 9.0);
    }
}
