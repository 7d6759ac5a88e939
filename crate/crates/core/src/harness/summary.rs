use serde::Serialize;

use super::run::ResultRecord;
use crate::{Error, Result};

/// Five-number summary with mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub estimator: String,
    pub count: usize,
    pub failures: usize,
    /// Missing when every replication failed.
    pub frob_error: Option<Stats>,
}

/// Linear interpolation between order statistics at `q·(n−1)`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize_values(values: &[f64]) -> Result<Stats> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let stderr = if v.len() > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(Stats {
        min: v[0],
        q25: quantile(&v, 0.25),
        median: quantile(&v, 0.5),
        q75: quantile(&v, 0.75),
        max: v[v.len() - 1],
        mean,
        stderr,
    })
}

/// Per-estimator statistics in order of first appearance.
pub fn summarize(records: &[ResultRecord]) -> Result<Vec<SummaryStats>> {
    if records.is_empty() {
        return Err(Error::Empty);
    }
    let mut names: Vec<&str> = Vec::new();
    for r in records {
        if !names.contains(&r.estimator.as_str()) {
            names.push(&r.estimator);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let mine: Vec<&ResultRecord> = records.iter().filter(|r| r.estimator == name).collect();
            let errs: Vec<f64> = mine.iter().filter_map(|r| r.frob_error).collect();
            Ok(SummaryStats {
                estimator: name.to_string(),
                count: errs.len(),
                failures: mine.len() - errs.len(),
                frob_error: if errs.is_empty() { None } else { Some(summarize_values(&errs)?) },
            })
        })
        .collect()
}

/// Median error of one estimator, if any replication succeeded.
pub fn median_error(records: &[ResultRecord], estimator: &str) -> Option<f64> {
    let errs: Vec<f64> = records.iter().filter(|r| r.estimator == estimator).filter_map(|r| r.frob_error).collect();
    summarize_values(&errs).ok().map(|s| s.median)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::EstimatorKind;
    use proptest::prelude::*;

    #[test]
    fn textbook_quantiles() {
        let s = summarize_values(&[5.0, 1.0, 4.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.min, s.q25, s.median, s.q75, s.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        assert_eq!(s.mean, 3.0);
        assert!((s.stderr - (2.5f64 / 5.0).sqrt()).abs() < 1e-15);
        let one = summarize_values(&[0.7]).unwrap();
        assert_eq!((one.min, one.q25, one.median, one.q75, one.max), (0.7, 0.7, 0.7, 0.7, 0.7));
        assert!(summarize_values(&[]).is_err());
        assert!(summarize(&[]).is_err());
    }

    fn rec(rep: usize, name: &str, err: Option<f64>) -> ResultRecord {
        ResultRecord {
            replication: rep,
            estimator: name.into(),
            kind: EstimatorKind::Sample,
            frob_error: err,
            wall_time_s: 0.0,
            tau: None,
            u: None,
            lambda: None,
            admissible: None,
            status: if err.is_some() { "ok".into() } else { "not_converged".into() },
        }
    }

    #[test]
    fn groups_by_estimator() {
        let recs = vec![rec(0, "b", Some(1.0)), rec(0, "a", None), rec(1, "b", Some(3.0)), rec(1, "a", None)];
        let s = summarize(&recs).unwrap();
        assert_eq!(s[0].estimator, "b");
        assert_eq!(s[0].frob_error.unwrap().median, 2.0);
        assert_eq!((s[1].count, s[1].failures, s[1].frob_error), (0, 2, None));
        assert_eq!(median_error(&recs, "b"), Some(2.0));
        assert_eq!(median_error(&recs, "a"), None);
    }

    /// Sort-based oracle with its own interpolation.
    fn oracle(values: &[f64], q: f64) -> f64 {
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pos = q * (v.len() as f64 - 1.0);
        let k = pos as usize;
        if k + 1 >= v.len() {
            v[v.len() - 1]
        } else {
            v[k] * (1.0 - (pos - k as f64)) + v[k + 1] * (pos - k as f64)
        }
    }

    proptest! {
        #[test]
        fn quantiles_match_oracle_and_are_ordered(values in prop::collection::vec(-1e3..1e3f64, 1..60)) {
            let s = summarize_values(&values).unwrap();
            prop_assert!(s.min <= s.q25 && s.q25 <= s.median && s.median <= s.q75 && s.q75 <= s.max);
            for (got, q) in [(s.q25, 0.25), (s.median, 0.5), (s.q75, 0.75)] {
                prop_assert!((got - oracle(&values, q)).abs() <= 1e-9 * (1.0 + got.abs()));
            }
        }
    }
}
