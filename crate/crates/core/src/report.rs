//! Structured text records for estimate runs and the aggregating bundle.
//!
//! A report is a block of `key: value` lines opened by a `schema:` line.
//! Values use fixed scientific formatting so identical runs produce
//! byte-identical files.

use crate::error::CoreError;
use std::collections::BTreeMap;

pub const ESTIMATE_SCHEMA: &str = "hierlab/estimate/v1";
pub const CLASS_SCHEMA: &str = "hierlab/classes/v1";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.12e}")
}

/// Ratio statistics for one inequality over a seeded trial ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    pub discarded: usize,
    pub ratio_max: f64,
    pub ratio_mean: f64,
    pub ratio_stddev: f64,
    /// `(N, ratio_max)` pairs from grid-refinement reruns.
    pub refinement: Vec<(usize, f64)>,
    /// Resolved run parameters (N, T, eps, potential, ...), key-sorted.
    pub params: BTreeMap<String, String>,
    /// Per-trial ratios in trial order (None for discarded trials).
    pub per_trial: Vec<Option<f64>>,
}

impl EstimateReport {
    /// Build from per-trial ratios, reduced in trial order.
    pub fn from_trials(
        name: &str,
        seed: u64,
        ratios: Vec<Option<f64>>,
        params: BTreeMap<String, String>,
    ) -> Self {
        let kept: Vec<f64> = ratios.iter().filter_map(|r| *r).collect();
        let trials = ratios.len();
        let discarded = trials - kept.len();
        let ratio_max = kept.iter().cloned().fold(0.0, f64::max);
        let mean = if kept.is_empty() { 0.0 } else { kept.iter().sum::<f64>() / kept.len() as f64 };
        let var = if kept.len() < 2 {
            0.0
        } else {
            kept.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (kept.len() - 1) as f64
        };
        EstimateReport {
            name: name.to_string(),
            seed,
            trials,
            discarded,
            ratio_max,
            ratio_mean: mean,
            ratio_stddev: var.sqrt(),
            refinement: Vec::new(),
            params,
            per_trial: ratios,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("schema: {ESTIMATE_SCHEMA}\n"));
        out.push_str(&format!("name: {}\n", self.name));
        out.push_str(&format!("seed: {}\n", self.seed));
        out.push_str(&format!("trials: {}\n", self.trials));
        out.push_str(&format!("discarded: {}\n", self.discarded));
        for (k, v) in &self.params {
            out.push_str(&format!("param.{k}: {v}\n"));
        }
        out.push_str(&format!("ratio_max: {}\n", fmt_f64(self.ratio_max)));
        out.push_str(&format!("ratio_mean: {}\n", fmt_f64(self.ratio_mean)));
        out.push_str(&format!("ratio_stddev: {}\n", fmt_f64(self.ratio_stddev)));
        for (n, r) in &self.refinement {
            out.push_str(&format!("refinement.N{}: {}\n", n, fmt_f64(*r)));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,ratio\n");
        for (i, r) in self.per_trial.iter().enumerate() {
            match r {
                Some(v) => out.push_str(&format!("{i},{}\n", fmt_f64(*v))),
                None => out.push_str(&format!("{i},discarded\n")),
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CoreError> {
        let mut fields: BTreeMap<String, String> = BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| CoreError::MalformedReport(format!("no separator in {line:?}")))?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }
        let schema = fields
            .get("schema")
            .ok_or_else(|| CoreError::MalformedReport("missing schema line".into()))?;
        if schema != ESTIMATE_SCHEMA {
            return Err(CoreError::SchemaMismatch {
                expected: ESTIMATE_SCHEMA.into(),
                found: schema.clone(),
            });
        }
        let get = |k: &str| -> Result<String, CoreError> {
            fields.get(k).cloned().ok_or_else(|| CoreError::MalformedReport(format!("missing {k}")))
        };
        let parse_f = |s: String| -> Result<f64, CoreError> {
            s.parse().map_err(|_| CoreError::MalformedReport(format!("bad float {s:?}")))
        };
        let mut params = BTreeMap::new();
        let mut refinement = Vec::new();
        for (k, v) in &fields {
            if let Some(name) = k.strip_prefix("param.") {
                params.insert(name.to_string(), v.clone());
            }
            if let Some(nstr) = k.strip_prefix("refinement.N") {
                let n: usize = nstr
                    .parse()
                    .map_err(|_| CoreError::MalformedReport(format!("bad refinement key {k}")))?;
                refinement.push((n, parse_f(v.clone())?));
            }
        }
        refinement.sort_unstable_by_key(|(n, _)| *n);
        Ok(EstimateReport {
            name: get("name")?,
            seed: get("seed")?.parse().map_err(|_| CoreError::MalformedReport("bad seed".into()))?,
            trials: get("trials")?
                .parse()
                .map_err(|_| CoreError::MalformedReport("bad trials".into()))?,
            discarded: get("discarded")?
                .parse()
                .map_err(|_| CoreError::MalformedReport("bad discarded".into()))?,
            ratio_max: parse_f(get("ratio_max")?)?,
            ratio_mean: parse_f(get("ratio_mean")?)?,
            ratio_stddev: parse_f(get("ratio_stddev")?)?,
            refinement,
            params,
            per_trial: Vec::new(),
        })
    }
}

/// Aggregate rendered reports into one human-readable summary with a
/// pass/fail matrix (finite ratio, refinement within factor two) and the
/// ratio statistics table.
pub fn report_bundle(reports: &[EstimateReport]) -> String {
    let mut out = String::new();
    out.push_str("hierlab report bundle\n");
    out.push_str(&format!("reports: {}\n\n", reports.len()));
    if reports.is_empty() {
        return out;
    }
    out.push_str("name                     trials  disc  ratio_max        ratio_mean       stable\n");
    for r in reports {
        let stable = match r.refinement.len() {
            0 | 1 => "n/a",
            _ => {
                let ok = r.refinement.windows(2).all(|w| {
                    let (a, b) = (w[0].1, w[1].1);
                    a > 0.0 && b > 0.0 && a / b <= 2.0 && b / a <= 2.0
                });
                if ok {
                    "pass"
                } else {
                    "FAIL"
                }
            }
        };
        let finite = if r.ratio_max.is_finite() { "" } else { " NONFINITE" };
        out.push_str(&format!(
            "{:<24} {:>6} {:>5}  {:<16} {:<16} {}{}\n",
            r.name,
            r.trials,
            r.discarded,
            fmt_f64(r.ratio_max),
            fmt_f64(r.ratio_mean),
            stable,
            finite
        ));
    }
    out
}

/// Check that all reports carry the same schema version string (they do by
/// construction here; files from other versions fail in `parse`).
pub fn bundle_from_texts(texts: &[String]) -> Result<String, CoreError> {
    let mut reports = Vec::new();
    for t in texts {
        reports.push(EstimateReport::parse(t)?);
    }
    Ok(report_bundle(&reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EstimateReport {
        let mut params = BTreeMap::new();
        params.insert("N".into(), "24".into());
        params.insert("T".into(), fmt_f64(1.0));
        EstimateReport::from_trials(
            "gp-h1",
            7,
            vec![Some(1.25), None, Some(0.75)],
            params,
        )
    }

    #[test]
    fn render_parse_roundtrip() {
        let mut r = sample();
        r.refinement = vec![(24, 1.25), (48, 1.5)];
        let text = r.render();
        let back = EstimateReport::parse(&text).unwrap();
        assert_eq!(back.name, "gp-h1");
        assert_eq!(back.trials, 3);
        assert_eq!(back.discarded, 1);
        assert_eq!(back.refinement, vec![(24, 1.25), (48, 1.5)]);
        assert_eq!(back.params.get("N").unwrap(), "24");
    }

    #[test]
    fn render_is_deterministic() {
        assert_eq!(sample().render(), sample().render());
    }

    #[test]
    fn stats_reduce_in_trial_order() {
        let r = sample();
        assert_eq!(r.ratio_max, 1.25);
        assert!((r.ratio_mean - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bundle_reports_stability() {
        let mut r = sample();
        r.refinement = vec![(24, 1.0), (48, 3.0)];
        let text = report_bundle(&[r]);
        assert!(text.contains("FAIL"));
        let empty = report_bundle(&[]);
        assert!(empty.contains("reports: 0"));
    }

    #[test]
    fn schema_mismatch_detected() {
        let text = "schema: hierlab/estimate/v0\nname: x\n";
        assert!(matches!(
            EstimateReport::parse(text),
            Err(CoreError::SchemaMismatch { .. })
        ));
    }
}
