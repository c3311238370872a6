//! On-disk formats: displacement and histogram CSV, report JSON and the
//! summary/ranking CSV tables.
//!
//! Floats are written with Rust's shortest round-trip representation, so a
//! value read back parses to the identical `f64`.

use std::collections::HashSet;
use std::io::{BufRead, Read, Write};
use std::path::Path;

use qda_core::{DisplacementField, FitReport, HistogramDistribution, NodeDisplacement, RankedCases};

use crate::error::ParseError;

const DISPLACEMENT_HEADER: [&str; 4] = ["node_id", "ux", "uy", "uz"];
const HISTOGRAM_HEADER: [&str; 4] = ["bin_index", "bin_lo", "bin_hi", "prob"];
pub const SUMMARY_HEADER: [&str; 9] = [
    "case_id",
    "n_total",
    "zero_fraction",
    "omega",
    "mse",
    "gamma",
    "variance_index",
    "variance_physical",
    "warnings",
];

/// Case label derived from a file name: the stem up to its first dot.
pub fn case_id_from_path(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    match name.split_once('.') {
        Some((stem, _)) if !stem.is_empty() => stem.to_string(),
        _ => name,
    }
}

fn csv_reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(source)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn csv_error(e: csv::Error) -> ParseError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => ParseError::Io(io),
        kind => ParseError::Malformed {
            line,
            reason: format!("{kind:?}"),
        },
    }
}

/// Reads a `node_id,ux,uy,uz` export. Rows keep their file order; lines
/// starting with `#` are skipped.
pub fn parse_displacement_csv<R: Read>(source: R, case_id: &str) -> Result<DisplacementField, ParseError> {
    let mut rdr = csv_reader(source);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.iter().ne(DISPLACEMENT_HEADER) {
        return Err(ParseError::Header {
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut nodes = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = line_of(&record);
        let malformed = |reason: String| ParseError::Malformed { line, reason };
        let node_id: u64 = record[0]
            .parse()
            .map_err(|_| malformed(format!("invalid node id `{}`", &record[0])))?;
        if node_id == 0 {
            return Err(malformed("node id must be positive".into()));
        }
        let mut comps = [0.0f64; 3];
        for (c, field) in comps.iter_mut().zip(record.iter().skip(1)) {
            *c = field
                .parse()
                .map_err(|_| malformed(format!("invalid number `{field}`")))?;
        }
        if comps.iter().any(|c| !c.is_finite()) {
            return Err(ParseError::NonFinite { line });
        }
        if !seen.insert(node_id) {
            return Err(ParseError::Duplicate { line, node_id });
        }
        nodes.push(NodeDisplacement::new(node_id, comps[0], comps[1], comps[2]));
    }
    Ok(DisplacementField::new(case_id, nodes)?)
}

pub fn write_displacement_csv<W: Write>(field: &DisplacementField, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", DISPLACEMENT_HEADER.join(","))?;
    for n in field.nodes() {
        writeln!(out, "{},{},{},{}", n.node_id, n.ux, n.uy, n.uz)?;
    }
    out.flush()
}

/// Writes `bin_index,bin_lo,bin_hi,prob` rows behind a `# case_id=` line.
pub fn write_histogram_csv<W: Write>(hist: &HistogramDistribution, case_id: &str, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# case_id={case_id}")?;
    writeln!(out, "{}", HISTOGRAM_HEADER.join(","))?;
    for (k, p) in hist.probs.iter().enumerate() {
        let (lo, hi) = hist.bin_edges(k);
        writeln!(out, "{},{},{},{}", k + 1, lo, hi, p)?;
    }
    out.flush()
}

/// A histogram table read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramTable {
    pub case_id: Option<String>,
    pub bin_lo: Vec<f64>,
    pub bin_hi: Vec<f64>,
    pub probs: Vec<f64>,
}

pub fn read_histogram_csv<R: BufRead>(mut source: R) -> Result<HistogramTable, ParseError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let case_id = text
        .lines()
        .take_while(|l| l.trim_start().starts_with('#'))
        .find_map(|l| l.trim_start().trim_start_matches('#').trim().strip_prefix("case_id=").map(str::to_string));

    let mut rdr = csv_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.iter().ne(HISTOGRAM_HEADER) {
        return Err(ParseError::Header {
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut table = HistogramTable {
        case_id,
        bin_lo: Vec::new(),
        bin_hi: Vec::new(),
        probs: Vec::new(),
    };
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = line_of(&record);
        let num = |i: usize| -> Result<f64, ParseError> {
            record[i].parse().map_err(|_| ParseError::Malformed {
                line,
                reason: format!("invalid number `{}`", &record[i]),
            })
        };
        let index: usize = record[0].parse().map_err(|_| ParseError::Malformed {
            line,
            reason: format!("invalid bin index `{}`", &record[0]),
        })?;
        if index != table.probs.len() + 1 {
            return Err(ParseError::Malformed {
                line,
                reason: format!("bin index {index} out of sequence"),
            });
        }
        table.bin_lo.push(num(1)?);
        table.bin_hi.push(num(2)?);
        table.probs.push(num(3)?);
    }
    Ok(table)
}

pub fn write_report_json<W: Write>(report: &FitReport, mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    out.flush()
}

pub fn read_report_json<R: Read>(source: R) -> Result<FitReport, ParseError> {
    Ok(serde_json::from_reader(source)?)
}

fn summary_fields(r: &FitReport) -> [String; 9] {
    [
        r.case_id.clone(),
        r.n_total.to_string(),
        r.zero_fraction.to_string(),
        r.omega.to_string(),
        r.mse.to_string(),
        r.gamma.to_string(),
        r.variance.to_string(),
        r.variance_physical.to_string(),
        r.warnings_joined(),
    ]
}

/// One-line CSV summary of a report, with header.
pub fn write_summary_csv<W: Write>(report: &FitReport, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    w.write_record(summary_fields(report))?;
    w.flush()?;
    Ok(())
}

/// Ranked table: a `rank` column followed by the summary columns.
pub fn write_ranking_csv<W: Write>(ranked: &RankedCases, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("rank").chain(SUMMARY_HEADER))?;
    for (i, r) in ranked.reports.iter().enumerate() {
        let rank = (i + 1).to_string();
        w.write_record(std::iter::once(rank).chain(summary_fields(r)))?;
    }
    w.flush()?;
    Ok(())
}
