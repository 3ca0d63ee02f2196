use std::fmt::Write as _;
use std::str::FromStr;

use crate::harness::BenchResult;

pub const CSV_COLUMNS: [&str; 6] = ["bits", "r", "pell_ns", "rsa_ns", "measured", "predicted"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format {other:?} (expected table or csv)")),
        }
    }
}

/// Rows sorted by `(bits, r)`. The CSV carries exactly [`CSV_COLUMNS`]; the
/// table adds the matrix-evaluator and parameter-form timings.
pub fn emit_report(results: &[BenchResult], format: ReportFormat) -> String {
    let mut rows: Vec<&BenchResult> = results.iter().collect();
    rows.sort_by_key(|r| (r.modulus_bits, r.r));
    match format {
        ReportFormat::Csv => csv_report(&rows),
        ReportFormat::Table => table_report(&rows),
    }
}

fn csv_report(rows: &[&BenchResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("writing to memory");
    for r in rows {
        w.write_record([
            r.modulus_bits.to_string(),
            r.r.to_string(),
            r.pell_decrypt_ns.to_string(),
            r.rsa_decrypt_ns.to_string(),
            format!("{:.3}", r.measured_speedup),
            format!("{:.3}", r.predicted_speedup),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

fn table_report(rows: &[&BenchResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6} {:>3} {:>14} {:>14} {:>9} {:>9} {:>14} {:>14}",
        "bits", "r", "pell_ns", "rsa_ns", "measured", "predicted", "matrix_ns", "param_ns"
    );
    for r in rows {
        let param = r.pell_param_ns.map_or_else(|| "-".to_string(), |v| v.to_string());
        let _ = writeln!(
            out,
            "{:>6} {:>3} {:>14} {:>14} {:>9.3} {:>9.3} {:>14} {:>14}",
            r.modulus_bits,
            r.r,
            r.pell_decrypt_ns,
            r.rsa_decrypt_ns,
            r.measured_speedup,
            r.predicted_speedup,
            r.pell_matrix_ns,
            param
        );
    }
    out
}
