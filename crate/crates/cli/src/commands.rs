use std::collections::BTreeMap;
use std::fs;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use bkd_core::asymptotics::{
    auto_precision, check_bessel_remainder, delta_bounds_check, lambda_bounds_check, sandwich_check,
    theta_bounds_check, AsymptoticConstants, BoundsRow, DeltaRow,
};
use bkd_core::interval::{parse_decimal, IntervalReal, DEFAULT_PREC};
use bkd_core::poly::{certify_positive_on_ray, phi_poly, psi_poly, PiEnclosure, PiPoly, PositivityOutcome};
use bkd_core::verify::{conjecture_threshold, ExactCheck, PointResult, Verdict};
use bkd_core::{Rational, VerificationReport};
use rayon::prelude::*;
use serde_json::json;

use crate::cache::{sha256_hex, TableCache};
use crate::{CheckName, ExpandArgs, Format, IoArgs, ScanArgs, ScanName, VerifyArgs};

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Inconclusive => "INCONCLUSIVE",
    }
}

/// Writes `body` to --out or standard output. `note` goes to standard
/// output when the body went to a file, and to standard error otherwise.
fn emit(io: &IoArgs, body: &str, note: Option<&str>) -> Result<()> {
    let mut body = body.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &io.out {
        Some(path) => {
            fs::write(path, &body).with_context(|| format!("writing {}", path.display()))?;
            if let Some(n) = note {
                println!("{n}");
            }
        }
        None => {
            print!("{body}");
            if let Some(n) = note {
                eprintln!("{n}");
            }
        }
    }
    Ok(())
}

pub fn expand(a: &ExpandArgs) -> Result<u8> {
    let table = TableCache::new(!a.io.no_cache).table(a.k, a.n)?;
    let body = match a.io.format {
        Format::Json => table.to_json(),
        Format::Csv | Format::Text => table.to_csv(),
    };
    let first = &table.coeffs()[0];
    let last = &table.coeffs()[a.n];
    let note = format!("checksum k={} N={} first={first} last={last} sha256={}", a.k, a.n, sha256_hex(body.as_bytes()));
    emit(&a.io, &body, Some(&note))?;
    Ok(0)
}

fn exact_check(a: &VerifyArgs) -> Result<Option<ExactCheck>> {
    Ok(Some(match a.check {
        CheckName::Turan3 => ExactCheck::Turan3,
        CheckName::ThetaMono => ExactCheck::ThetaMono,
        CheckName::Logconcave => ExactCheck::LogConcave,
        CheckName::Dlog => ExactCheck::Dlog { r: a.r.context("dlog needs --r")? },
        CheckName::Jensen => ExactCheck::Jensen { d: a.d.context("jensen needs --d")? },
        _ => return Ok(None),
    }))
}

fn lookahead(c: ExactCheck) -> usize {
    match c {
        ExactCheck::LogConcave => 1,
        ExactCheck::Turan3 | ExactCheck::ThetaMono => 2,
        ExactCheck::Dlog { r } => r as usize,
        ExactCheck::Jensen { d } => d as usize,
    }
}

fn render_report(io: &IoArgs, report: &VerificationReport, csv: String) -> Result<u8> {
    let summary = report.summary_line();
    match io.format {
        Format::Json => emit(io, &report.to_json(), Some(&summary))?,
        Format::Csv => emit(io, &csv, Some(&summary))?,
        Format::Text => emit(io, &summary, None)?,
    }
    if io.out.is_some() && io.format == Format::Text {
        println!("{summary}");
    }
    Ok(report.exit_code() as u8)
}

pub fn verify(a: &VerifyArgs) -> Result<u8> {
    if a.workers == 0 {
        bail!("--workers must be at least 1");
    }
    if let Some(check) = exact_check(a)? {
        return verify_exact(a, check);
    }
    match a.check {
        CheckName::Bessel => verify_bessel(a),
        CheckName::PhiPsi => verify_phi_psi(a),
        _ => verify_bounds(a),
    }
}

fn verify_exact(a: &VerifyArgs, check: ExactCheck) -> Result<u8> {
    if a.samples.is_some() {
        bail!("--samples applies to the analytic checks only");
    }
    let to = a.to.context("--to is required")?;
    let from = a.from.unwrap_or(check.valid_range(usize::MAX).0);
    let table = TableCache::new(!a.io.no_cache).table(a.k, to + lookahead(check))?;
    let margins = a.margins || a.io.format == Format::Csv;
    let report = check.scan(&table, from, to, a.step, a.workers, margins)?;
    let csv = report.margins_csv();
    render_report(&a.io, &report, csv)
}

/// `count` integers spread logarithmically over from..=to, deduplicated.
fn log_spaced(from: usize, to: usize, count: usize) -> Vec<usize> {
    if count <= 1 || from == to {
        return vec![from];
    }
    let (lo, hi) = ((from as f64).ln(), (to as f64).ln());
    let mut v: Vec<usize> = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            ((lo + t * (hi - lo)).exp().round() as usize).clamp(from, to)
        })
        .collect();
    v[0] = from;
    v[count - 1] = to;
    v.dedup();
    v
}

fn points(a: &VerifyArgs, from: usize, to: usize) -> Result<Vec<usize>> {
    if from > to {
        bail!("empty range {from}..={to}");
    }
    Ok(match a.samples {
        Some(m) => log_spaced(from.max(1), to, m),
        None => (from..=to).step_by(a.step.max(1)).collect(),
    })
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().map_err(|e| anyhow!(e))
}

/// Evaluates `f` at the first point on the calling thread, so that
/// hypothesis violations surface before any parallel work, then at the
/// rest on the pool. Results keep the order of `ns`.
fn evaluate_all<F>(ns: &[usize], workers: usize, f: F) -> Result<Vec<(usize, Verdict, String)>>
where
    F: Fn(usize) -> Result<(Verdict, String)> + Sync,
{
    let Some((&head, rest)) = ns.split_first() else {
        return Ok(Vec::new());
    };
    let first = f(head)?;
    let tail: Vec<_> = pool(workers)?.install(|| {
        rest.par_iter().map(|&n| f(n).map(|(v, line)| (n, v, line))).collect::<Result<Vec<_>>>()
    })?;
    let mut out = vec![(head, first.0, first.1)];
    out.extend(tail);
    Ok(out)
}

fn finish_report(
    mut report: VerificationReport,
    rows: &[(usize, Verdict, String)],
    keep_margins: bool,
    start: Instant,
) -> VerificationReport {
    if keep_margins {
        report.margins = Some(BTreeMap::new());
    }
    report.absorb(rows.iter().map(|(n, v, line)| PointResult { n: *n, verdict: *v, margin: Some(line.clone()) }));
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

fn rows_csv(header: &str, rows: &[(usize, Verdict, String)]) -> String {
    let mut s = format!("{header}\n");
    for (_, _, line) in rows {
        s.push_str(line);
        s.push('\n');
    }
    s
}

fn verify_bounds(a: &VerifyArgs) -> Result<u8> {
    AsymptoticConstants::new(a.k)?;
    let name = match a.check {
        CheckName::Sandwich => "sandwich",
        CheckName::ThetaBounds => "theta-bounds",
        CheckName::DeltaBounds => "delta-bounds",
        CheckName::LambdaBounds => "lambda-bounds",
        _ => unreachable!("dispatched elsewhere"),
    };
    let default_from = match a.check {
        CheckName::ThetaBounds => 15081,
        CheckName::LambdaBounds => 2,
        _ => 3512,
    };
    let to = a.to.context("--to is required")?;
    let from = a.from.unwrap_or(default_from);
    let ns = points(a, from, to)?;
    let prec = a.prec.bits();
    let k = a.k;
    let start = Instant::now();
    let (header, rows) = if a.check == CheckName::LambdaBounds {
        let rows = evaluate_all(&ns, a.workers, |n| {
            let (v, b, lambda) = lambda_bounds_check(k, n, prec)?;
            let line = format!(
                "{n},{}@p{p},{}@p{p},{}@p{p},{}@p{p},{}",
                lambda.lo_decimal(30),
                lambda.hi_decimal(30),
                b.lambda_lo.hi_decimal(30),
                b.lambda_hi.lo_decimal(30),
                verdict_str(v),
                p = lambda.prec()
            );
            Ok((v, line))
        })?;
        ("n,lambda_enclosure_lo,lambda_enclosure_hi,lambda_lo,lambda_hi,verdict", rows)
    } else {
        let table = TableCache::new(!a.io.no_cache).table(k, to + 1)?;
        let check = a.check;
        let rows = evaluate_all(&ns, a.workers, |n| {
            Ok(match check {
                CheckName::Sandwich => {
                    let r = sandwich_check(k, n, &table, prec)?;
                    (r.verdict, r.csv_line())
                }
                CheckName::ThetaBounds => {
                    let r = theta_bounds_check(k, n, &table, prec)?;
                    (r.verdict, r.csv_line())
                }
                _ => {
                    let r = delta_bounds_check(k, n, &table, prec)?;
                    (r.verdict, r.csv_line())
                }
            })
        })?;
        let header = if check == CheckName::DeltaBounds { DeltaRow::CSV_HEADER } else { BoundsRow::CSV_HEADER };
        (header, rows)
    };
    let report = finish_report(VerificationReport::new(name, k, from, to), &rows, a.margins, start);
    render_report(&a.io, &report, rows_csv(header, &rows))
}

fn parse_grid(s: &str) -> Result<(Rational, Rational, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        bail!("--z-grid expects FROM:TO:COUNT, got {s:?}");
    };
    let lo = parse_decimal(lo).with_context(|| format!("bad grid start {lo:?}"))?;
    let hi = parse_decimal(hi).with_context(|| format!("bad grid end {hi:?}"))?;
    let count: usize = count.parse().with_context(|| format!("bad grid count {count:?}"))?;
    if count == 0 || lo > hi || lo <= 0 {
        bail!("--z-grid needs 0 < FROM <= TO and COUNT >= 1");
    }
    Ok((lo, hi, count))
}

/// Log-spaced exact rationals with the endpoints kept exact.
fn z_grid(lo: &Rational, hi: &Rational, count: usize) -> Vec<Rational> {
    if count == 1 {
        return vec![lo.clone()];
    }
    let (a, b) = (lo.to_f64().ln(), hi.to_f64().ln());
    (0..count)
        .map(|i| match i {
            0 => lo.clone(),
            i if i == count - 1 => hi.clone(),
            i => {
                let z = (a + (b - a) * i as f64 / (count - 1) as f64).exp();
                Rational::from_f64(z).expect("finite").clamp(lo, hi)
            }
        })
        .collect()
}

fn verify_bessel(a: &VerifyArgs) -> Result<u8> {
    let (lo, hi, count) = parse_grid(&a.z_grid)?;
    let zs = z_grid(&lo, &hi, count);
    let idx: Vec<usize> = (0..zs.len()).collect();
    let fixed = a.prec.bits();
    let start = Instant::now();
    let rows = evaluate_all(&idx, a.workers, |i| {
        let z = &zs[i];
        let p = fixed.unwrap_or_else(|| auto_precision(z.to_f64()));
        let r = check_bessel_remainder(&IntervalReal::from_rational(z, p), fixed)?;
        let line = format!(
            "{i},{},{}@p{p},{}@p{p},{},{}",
            z.to_f64(),
            r.margin.lo_decimal(20),
            r.scaled_error.hi_decimal(20),
            r.precision,
            verdict_str(r.verdict)
        );
        Ok((r.verdict, line))
    })?;
    let report = finish_report(VerificationReport::new("bessel", 2, 0, zs.len() - 1), &rows, a.margins, start);
    render_report(&a.io, &report, rows_csv("i,z,margin_lo,scaled_error_hi,prec,verdict", &rows))
}

fn certify(p: &PiPoly, x0: &Rational, pi: &PiEnclosure) -> (Verdict, serde_json::Value) {
    match certify_positive_on_ray(p, x0, pi) {
        PositivityOutcome::Certified(c) => {
            let ok = c.verify(p);
            let v = if ok { Verdict::Pass } else { Verdict::Inconclusive };
            (v, json!({"outcome": verdict_str(v), "rechecked": ok, "certificate": c}))
        }
        PositivityOutcome::Refuted(r) => (Verdict::Fail, json!({"outcome": "FAIL", "refutation": format!("{r:?}")})),
        PositivityOutcome::Inconclusive(why) => {
            (Verdict::Inconclusive, json!({"outcome": "INCONCLUSIVE", "reason": why}))
        }
    }
}

fn verify_phi_psi(a: &VerifyArgs) -> Result<u8> {
    let pi = PiEnclosure::at_precision(a.prec.bits().unwrap_or(DEFAULT_PREC));
    let psi = psi_poly();
    let diff = &phi_poly() - &psi;
    let cases = [("psi", psi, Rational::from(6)), ("phi-psi", diff, Rational::from((33, 10)))];
    let mut report = VerificationReport::new("phi-psi", a.k, 0, cases.len() - 1);
    let mut doc = serde_json::Map::new();
    let mut csv = String::from("polynomial,x0,verdict\n");
    let mut results = Vec::new();
    for (i, (name, p, x0)) in cases.iter().enumerate() {
        let (v, value) = certify(p, x0, &pi);
        csv.push_str(&format!("{name},{x0},{}\n", verdict_str(v)));
        doc.insert(name.to_string(), json!({"x0": x0.to_string(), "result": value}));
        results.push(PointResult { n: i, verdict: v, margin: None });
    }
    report.absorb(results);
    let summary = report.summary_line();
    match a.io.format {
        Format::Json => {
            doc.insert("pass".into(), json!(report.pass));
            emit(&a.io, &serde_json::to_string_pretty(&doc)?, Some(&summary))?
        }
        Format::Csv => emit(&a.io, &csv, Some(&summary))?,
        Format::Text => {
            let body: String = csv.lines().skip(1).map(|l| format!("{l}\n")).collect();
            emit(&a.io, &format!("{body}{summary}"), None)?
        }
    }
    Ok(report.exit_code() as u8)
}

pub fn scan(a: &ScanArgs) -> Result<u8> {
    if a.workers == 0 {
        bail!("--workers must be at least 1");
    }
    let cache = TableCache::new(!a.io.no_cache);
    let (report, label) = match a.what {
        ScanName::Conjecture => {
            let r = a.r.context("conjecture scan needs --r")?;
            if r == 0 {
                bail!("--r must be at least 1");
            }
            let table = cache.table(a.k, a.to + r as usize)?;
            let s = conjecture_threshold(&table, r, a.to, a.workers)?;
            (s.report, format!("r={r}"))
        }
        ScanName::Jensen => {
            let d = a.d.context("jensen scan needs --d")?;
            if d == 0 {
                bail!("--d must be at least 1");
            }
            let table = cache.table(a.k, a.to + d as usize)?;
            let mut report = ExactCheck::Jensen { d }.scan(&table, 0, a.to, 1, a.workers, false)?;
            report.candidate = match report.failures.last() {
                None => Some(0),
                Some(&n) if n < a.to => Some(n + 1),
                Some(_) => None,
            };
            report.check = "jensen-scan".into();
            (report, format!("d={d}"))
        }
    };
    let candidate = report.candidate.map_or("none".to_string(), |c| c.to_string());
    let summary = format!(
        "{} k={} {label} n={}..={}: candidate {candidate} violations={:?}",
        report.check, report.k, report.from, report.to, report.failures
    );
    match a.io.format {
        Format::Json => emit(&a.io, &report.to_json(), Some(&summary))?,
        Format::Csv => {
            let mut csv = String::from("violation\n");
            for n in &report.failures {
                csv.push_str(&format!("{n}\n"));
            }
            emit(&a.io, &csv, Some(&summary))?
        }
        Format::Text => {
            emit(&a.io, &summary, None)?;
            if a.io.out.is_some() {
                println!("{summary}");
            }
        }
    }
    Ok(0)
}
