use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointResult {
    pub n: usize,
    pub verdict: Verdict,
    pub margin: Option<String>,
}

/// Outcome of one check over a range of n.
///
/// `pass` is true iff there are neither failures nor inconclusive points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<u32>,
    pub from: usize,
    pub to: usize,
    pub pass: bool,
    pub failures: Vec<usize>,
    pub inconclusive: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub candidate: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub margins: Option<BTreeMap<usize, String>>,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn new(check: &str, k: u32, from: usize, to: usize) -> Self {
        VerificationReport {
            check: check.to_string(),
            k,
            r: None,
            d: None,
            from,
            to,
            pass: true,
            failures: Vec::new(),
            inconclusive: Vec::new(),
            candidate: None,
            margins: None,
            elapsed_ms: 0,
        }
    }

    /// Folds per-point results in, keeping everything ordered by n.
    pub fn absorb(&mut self, results: impl IntoIterator<Item = PointResult>) {
        for p in results {
            match p.verdict {
                Verdict::Pass => {}
                Verdict::Fail => self.failures.push(p.n),
                Verdict::Inconclusive => self.inconclusive.push(p.n),
            }
            if let (Some(m), Some(map)) = (p.margin, self.margins.as_mut()) {
                map.insert(p.n, m);
            }
        }
        self.failures.sort_unstable();
        self.inconclusive.sort_unstable();
        self.pass = self.failures.is_empty() && self.inconclusive.is_empty();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the timing field zeroed, for byte-level comparisons.
    pub fn to_json_untimed(&self) -> String {
        let mut c = self.clone();
        c.elapsed_ms = 0;
        c.to_json()
    }

    pub fn margins_csv(&self) -> String {
        let mut out = String::from("n,margin\n");
        if let Some(m) = &self.margins {
            for (n, v) in m {
                writeln!(out, "{n},{v}").unwrap();
            }
        }
        out
    }

    pub fn summary_line(&self) -> String {
        let status = if !self.failures.is_empty() {
            "FAIL"
        } else if !self.inconclusive.is_empty() {
            "INCONCLUSIVE"
        } else {
            "PASS"
        };
        let mut s = format!("{} k={} n={}..={}: {}", self.check, self.k, self.from, self.to, status);
        if !self.failures.is_empty() {
            write!(s, " failures={:?}", abbreviate(&self.failures)).unwrap();
        }
        if !self.inconclusive.is_empty() {
            write!(s, " inconclusive={:?}", abbreviate(&self.inconclusive)).unwrap();
        }
        s
    }

    /// Process exit status: 0 pass, 1 counterexample, 2 undecided.
    pub fn exit_code(&self) -> i32 {
        if !self.failures.is_empty() {
            1
        } else if !self.inconclusive.is_empty() {
            2
        } else {
            0
        }
    }
}

fn abbreviate(v: &[usize]) -> Vec<usize> {
    v.iter().take(20).copied().collect()
}

/// Evaluates `f` at every n in `ns` on a pool of `workers` threads and
/// merges the results in order of n.
pub fn run_scan<F>(
    mut report: VerificationReport,
    ns: &[usize],
    workers: usize,
    keep_margins: bool,
    f: F,
) -> VerificationReport
where
    F: Fn(usize) -> PointResult + Sync + Send,
{
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    let results: Vec<PointResult> = pool.install(|| ns.par_iter().map(|&n| f(n)).collect());
    if keep_margins {
        report.margins = Some(BTreeMap::new());
    }
    report.absorb(results);
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let mut r = VerificationReport::new("turan3", 1, 6, 10);
        r.absorb([
            PointResult { n: 9, verdict: Verdict::Fail, margin: None },
            PointResult { n: 7, verdict: Verdict::Fail, margin: None },
        ]);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["check"], "turan3");
        assert_eq!(v["failures"], serde_json::json!([7, 9]));
        assert_eq!(v["pass"], false);
        assert!(v.get("margins").is_none());
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn worker_count_does_not_change_content() {
        let ns: Vec<usize> = (0..500).collect();
        let f = |n: usize| PointResult {
            n,
            verdict: if n % 7 == 3 { Verdict::Fail } else if n % 11 == 0 { Verdict::Inconclusive } else { Verdict::Pass },
            margin: Some((n * n).to_string()),
        };
        let base = VerificationReport::new("x", 1, 0, 499);
        let a = run_scan(base.clone(), &ns, 1, true, f);
        let b = run_scan(base, &ns, 8, true, f);
        assert_eq!(a.to_json_untimed(), b.to_json_untimed());
        assert_eq!(a.exit_code(), 1);
    }
}
