//! CSV tables and JSON summaries. Floats are written in shortest
//! round-trip form and the sentinel as `-inf`, so every table reads back
//! bit-exactly.

use std::io::{Read, Write};

use serde_json::{json, Map, Value};

use crate::cycle::CycleRecord;
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::montecarlo::{ComparisonReport, EstimatedProfile, OrderStatSample, TailCheck};

fn header(prefix: &[&str], stem: &str, count: usize) -> Vec<String> {
    prefix
        .iter()
        .map(|s| s.to_string())
        .chain((1..=count).map(|i| format!("{stem}{i}")))
        .collect()
}

/// `length,zeta1,…,zetar`.
pub fn write_cycles_csv<W: Write>(out: W, records: &[CycleRecord]) -> Result<()> {
    let r = records.first().map_or(1, CycleRecord::r);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(&["length"], "zeta", r))?;
    for rec in records {
        if rec.r() != r {
            return Err(Error::Shape("records have different r".into()));
        }
        let mut row = vec![rec.length().to_string()];
        row.extend(rec.maxima().iter().map(ExtReal::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_cycles_csv<R: Read>(input: R) -> Result<Vec<CycleRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let length: u64 = row
            .get(0)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Io("bad cycle length".into()))?;
        let maxima = row
            .iter()
            .skip(1)
            .map(str::parse)
            .collect::<Result<Vec<ExtReal>>>()?;
        out.push(CycleRecord::new(length, maxima)?);
    }
    Ok(out)
}

/// `replica,m1,…,mq`.
pub fn write_order_stats_csv<W: Write>(out: W, sample: &OrderStatSample) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(&["replica"], "m", sample.q_max))?;
    for (j, row) in sample.rows().enumerate() {
        let mut rec = vec![j.to_string()];
        rec.extend(row.iter().map(ExtReal::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an order-statistic table; `n` is not part of the table.
pub fn read_order_stats_csv<R: Read>(input: R, n: u64) -> Result<OrderStatSample> {
    let mut rd = csv::Reader::from_reader(input);
    let q_max = rd.headers()?.len().saturating_sub(1);
    if q_max == 0 {
        return Err(Error::Io(
            "order-statistic table has no value columns".into(),
        ));
    }
    let mut values = Vec::new();
    let mut replicas = 0u64;
    for row in rd.records() {
        let row = row?;
        for field in row.iter().skip(1) {
            values.push(field.parse()?);
        }
        replicas += 1;
    }
    if values.len() as u64 != replicas * q_max as u64 {
        return Err(Error::Io("ragged order-statistic table".into()));
    }
    Ok(OrderStatSample {
        n,
        q_max,
        replicas,
        values,
    })
}

/// `q,x,empirical,approx,gap,stderr`.
pub fn write_report_csv<W: Write>(out: W, report: &ComparisonReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["q", "x", "empirical", "approx", "gap", "stderr"])?;
    for q in 0..report.q_max {
        for (j, x) in report.grid.iter().enumerate() {
            w.write_record([
                (q + 1).to_string(),
                x.to_string(),
                report.empirical[q][j].to_string(),
                report.approx[q][j].to_string(),
                report.gap[q][j].to_string(),
                report.stderr[q][j].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `sup_gap` per `q`, run metadata and the model echo.
pub fn report_summary(report: &ComparisonReport, runtime_secs: f64) -> Value {
    let sup: Map<String, Value> = report
        .sup_gap
        .iter()
        .enumerate()
        .map(|(q, g)| ((q + 1).to_string(), json!(g)))
        .collect();
    let max_stderr: Map<String, Value> = (1..=report.q_max)
        .map(|q| (q.to_string(), json!(report.max_stderr(q))))
        .collect();
    json!({
        "model": report.model,
        "seed": report.seed,
        "n": report.n,
        "q_max": report.q_max,
        "replicas": report.replicas,
        "beta_source": report.beta_source,
        "mu": report.mu,
        "grid_points": report.grid.len(),
        "grid_min": report.grid.first(),
        "grid_max": report.grid.last(),
        "grid_expanded": report.grid_expanded,
        "beta_fallback": report.beta_fallback,
        "sup_gap": sup,
        "max_stderr": max_stderr,
        "runtime_secs": runtime_secs,
    })
}

/// `x,exceedances,tail,tail_stderr,vacuous,beta1,…,betar`.
pub fn write_estimate_csv<W: Write>(out: W, est: &EstimatedProfile) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut head = header(
        &["x", "exceedances", "tail", "tail_stderr", "vacuous"],
        "beta",
        est.r,
    );
    head.extend((1..=est.r).map(|i| format!("beta{i}_stderr")));
    w.write_record(head)?;
    for s in &est.thresholds {
        let mut row = vec![
            s.x.to_string(),
            s.exceedances.to_string(),
            s.tail().to_string(),
            s.tail_stderr().to_string(),
            s.vacuous().to_string(),
        ];
        row.extend((1..=est.r).map(|i| s.beta(i).unwrap_or(0.0).to_string()));
        row.extend((1..=est.r).map(|i| s.beta_stderr(i).unwrap_or(0.0).to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn estimate_summary(est: &EstimatedProfile) -> Value {
    json!({
        "cycles": est.cycles,
        "r": est.r,
        "mu_hat": est.mu_hat,
        "mu_stderr": est.mu_stderr,
        "length_variance": est.length_variance,
        "max_cycle_maximum": est.sample.max(),
        "thresholds": est.thresholds.len(),
        "vacuous_thresholds": est.thresholds.iter().filter(|s| s.vacuous()).count(),
    })
}

/// `x,exceedances,tail_hat,tail_stderr,f_tail,reference,ratio,ratio_stderr,vacuous,sandwich_lo,sandwich_hi,sandwich_ratio`;
/// sandwich columns are empty for Lindley.
pub fn write_tailcheck_csv<W: Write>(out: W, check: &TailCheck) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "x",
        "exceedances",
        "tail_hat",
        "tail_stderr",
        "f_tail",
        "reference",
        "ratio",
        "ratio_stderr",
        "vacuous",
        "sandwich_lo",
        "sandwich_hi",
        "sandwich_ratio",
    ])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &check.rows {
        w.write_record([
            r.x.to_string(),
            r.exceedances.to_string(),
            r.tail_hat.to_string(),
            r.tail_stderr.to_string(),
            r.f_tail.to_string(),
            r.reference.to_string(),
            r.ratio.to_string(),
            r.ratio_stderr.to_string(),
            r.vacuous.to_string(),
            opt(r.sandwich.map(|s| s.0)),
            opt(r.sandwich.map(|s| s.1)),
            opt(r.sandwich_ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}
