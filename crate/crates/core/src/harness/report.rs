use std::io::Write;

use super::sweep::{SweepSummary, TrialResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Markdown,
}

const HEADER: [&str; 6] = ["Network", "m", "best (%)", "mean ± std (%)", "median (%)", "best n"];

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

fn cells(s: &SweepSummary) -> [String; 6] {
    [
        s.classifier.to_string(),
        s.m.to_string(),
        pct(s.best.accuracy),
        format!("{} ± {}", pct(s.mean), pct(s.std)),
        pct(s.median),
        s.best.hidden.to_string(),
    ]
}

/// One row per `(classifier, m)`, MLP before SOM-LVQ and smaller `m` first.
pub fn render_report(summaries: &[SweepSummary], format: ReportFormat) -> String {
    let mut sorted: Vec<&SweepSummary> = summaries.iter().collect();
    sorted.sort_by_key(|s| (s.classifier, s.m));
    let rows: Vec<[String; 6]> = sorted.iter().map(|s| cells(s)).collect();
    let header = HEADER.map(str::to_string);
    let mut out = String::new();
    match format {
        ReportFormat::Markdown => {
            let line = |r: &[String; 6]| format!("| {} |\n", r.join(" | "));
            out += &line(&header);
            out += &format!("|{}\n", "---|".repeat(6));
            for r in &rows {
                out += &line(r);
            }
        }
        ReportFormat::Text => {
            let mut widths = header.clone().map(|h| h.chars().count());
            for r in &rows {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |r: &[String; 6]| {
                let padded: Vec<String> = r
                    .iter()
                    .zip(&widths)
                    .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                    .collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            out += &line(&header);
            out += &line(&widths.map(|w| "-".repeat(w)));
            for r in &rows {
                out += &line(r);
            }
        }
    }
    out
}

/// `classifier,m,hidden,rep,seed,accuracy,seconds`. Wall time is written as 0
/// unless `timing` is set, so repeated runs produce identical files.
pub fn write_results_csv<W: Write>(trials: &[TrialResult], timing: bool, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["classifier", "m", "hidden", "rep", "seed", "accuracy", "seconds"])?;
    for t in trials {
        let seconds = if timing { format!("{:.6}", t.seconds) } else { "0".into() };
        w.write_record([
            t.classifier.to_string(),
            t.m.to_string(),
            t.hidden.to_string(),
            t.rep.to_string(),
            t.seed.to_string(),
            t.accuracy.to_string(),
            seconds,
        ])?;
    }
    w.flush()?;
    Ok(())
}
