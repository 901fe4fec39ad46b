//! Result rows and their CSV, markdown and JSON-lines renderings.

use std::fmt;

use serde::Serialize;

use crate::args::OutFormat;

/// One run of one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub algorithm: String,
    pub dataset: String,
    pub seed: u64,
    pub best_subset: String,
    pub best_cost: f64,
    pub computed_nodes: usize,
    pub wall_time_seconds: f64,
    pub completion: String,
    pub config: String,
}

const RUN_COLUMNS: [&str; 9] = [
    "algorithm",
    "dataset",
    "seed",
    "best_subset",
    "best_cost",
    "computed_nodes",
    "wall_time_seconds",
    "completion",
    "config",
];

/// Averages over the repeats of one algorithm on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRow {
    pub algorithm: String,
    pub dataset: String,
    pub seed: &'static str,
    pub runs: usize,
    pub best_cost: f64,
    pub computed_nodes: f64,
    pub wall_time_seconds: f64,
}

impl MeanRow {
    /// `None` for an empty slice.
    pub fn of(reports: &[RunReport]) -> Option<Self> {
        let first = reports.first()?;
        let k = reports.len() as f64;
        let mean = |f: fn(&RunReport) -> f64| reports.iter().map(f).sum::<f64>() / k;
        Some(Self {
            algorithm: first.algorithm.clone(),
            dataset: first.dataset.clone(),
            seed: "mean",
            runs: reports.len(),
            best_cost: mean(|r| r.best_cost),
            computed_nodes: mean(|r| r.computed_nodes as f64),
            wall_time_seconds: mean(|r| r.wall_time_seconds),
        })
    }

    fn cells(&self) -> [String; 9] {
        [
            self.algorithm.clone(),
            self.dataset.clone(),
            self.seed.into(),
            String::new(),
            self.best_cost.to_string(),
            self.computed_nodes.to_string(),
            self.wall_time_seconds.to_string(),
            String::new(),
            format!("runs={}", self.runs),
        ]
    }
}

impl RunReport {
    fn cells(&self) -> [String; 9] {
        [
            self.algorithm.clone(),
            self.dataset.clone(),
            self.seed.to_string(),
            self.best_subset.clone(),
            self.best_cost.to_string(),
            self.computed_nodes.to_string(),
            self.wall_time_seconds.to_string(),
            self.completion.clone(),
            self.config.clone(),
        ]
    }
}

/// Output of `run`: every report in seed order, then one mean row per group
/// when there was more than one repeat.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub reports: Vec<RunReport>,
    pub means: Vec<MeanRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Winner {
    #[serde(rename = "UC")]
    Uc,
    #[serde(rename = "EQUAL")]
    Equal,
    #[serde(rename = "SFFS")]
    Sffs,
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Uc => "UC",
            Self::Equal => "EQUAL",
            Self::Sffs => "SFFS",
        })
    }
}

/// One line of a comparison table. UC and UCC figures are means over the
/// repeats; `None` marks a UCC run that was skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub test: String,
    pub winner: Winner,
    pub nodes_sffs: f64,
    pub nodes_uc: f64,
    pub nodes_ucc: Option<f64>,
    pub time_sffs: f64,
    pub time_uc: f64,
    pub time_ucc: Option<f64>,
    pub best_sffs: f64,
    pub best_uc: f64,
    pub best_ucc: Option<f64>,
    pub runs: usize,
}

/// Markdown header of the comparison table.
pub const COMPARE_HEADER: [&str; 8] = [
    "Test",
    "Winner",
    "Computed nodes SFFS",
    "Computed nodes UC",
    "Computed nodes UCC",
    "Time(sec.) SFFS",
    "Time(sec.) UC",
    "Time(sec.) UCC",
];

const COMPARE_CSV_COLUMNS: [&str; 12] = [
    "test",
    "winner",
    "nodes_sffs",
    "nodes_uc",
    "nodes_ucc",
    "time_sffs",
    "time_uc",
    "time_ucc",
    "best_sffs",
    "best_uc",
    "best_ucc",
    "runs",
];

fn nodes(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.1}")
    }
}

fn seconds(v: f64) -> String {
    format!("{v:.3}")
}

fn or_na(v: Option<f64>, f: fn(f64) -> String) -> String {
    v.map_or_else(|| "NA".into(), f)
}

impl CompareRow {
    fn table_cells(&self) -> [String; 8] {
        [
            self.test.clone(),
            self.winner.to_string(),
            nodes(self.nodes_sffs),
            nodes(self.nodes_uc),
            or_na(self.nodes_ucc, nodes),
            seconds(self.time_sffs),
            seconds(self.time_uc),
            or_na(self.time_ucc, seconds),
        ]
    }

    fn csv_cells(&self) -> [String; 12] {
        let plain = |v: f64| v.to_string();
        [
            self.test.clone(),
            self.winner.to_string(),
            plain(self.nodes_sffs),
            plain(self.nodes_uc),
            or_na(self.nodes_ucc, |v| v.to_string()),
            plain(self.time_sffs),
            plain(self.time_uc),
            or_na(self.time_ucc, |v| v.to_string()),
            plain(self.best_sffs),
            plain(self.best_uc),
            or_na(self.best_ucc, |v| v.to_string()),
            self.runs.to_string(),
        ]
    }
}

fn md_escape(cell: &str) -> String {
    cell.replace('|', "\\|")
}

fn md_table<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> String {
    let mut out = String::new();
    let line = |cells: &mut dyn Iterator<Item = String>| {
        let joined: Vec<String> = cells.map(|c| md_escape(&c)).collect();
        format!("| {} |\n", joined.join(" | "))
    };
    out.push_str(&line(&mut header.iter().map(|s| s.to_string())));
    out.push_str(&format!("|{}\n", "---|".repeat(N)));
    for row in rows {
        out.push_str(&line(&mut row.into_iter()));
    }
    out
}

fn csv_text<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>, rec: &[String]| w.write_record(rec).expect("in-memory write");
    write(&mut w, &header.map(String::from));
    for row in rows {
        write(&mut w, &row);
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn render_runs(out: &RunOutput, format: OutFormat) -> String {
    let rows = out.reports.iter().map(RunReport::cells).chain(out.means.iter().map(MeanRow::cells));
    match format {
        OutFormat::Csv => csv_text(RUN_COLUMNS, rows),
        OutFormat::Md => md_table(RUN_COLUMNS, rows),
        OutFormat::JsonLines => out
            .reports
            .iter()
            .map(json_line)
            .chain(out.means.iter().map(json_line))
            .collect(),
    }
}

pub fn render_compare(rows: &[CompareRow], format: OutFormat) -> String {
    match format {
        OutFormat::Csv => csv_text(COMPARE_CSV_COLUMNS, rows.iter().map(CompareRow::csv_cells)),
        OutFormat::Md => md_table(COMPARE_HEADER, rows.iter().map(CompareRow::table_cells)),
        OutFormat::JsonLines => rows.iter().map(json_line).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(seed: u64, nodes: usize) -> RunReport {
        RunReport {
            algorithm: "ucurve_ucc".into(),
            dataset: "toy".into(),
            seed,
            best_subset: "0110".into(),
            best_cost: 0.25,
            computed_nodes: nodes,
            wall_time_seconds: 0.5,
            completion: "exhausted".into(),
            config: "mode=ucc;direction=p=0.5".into(),
        }
    }

    fn row(ucc: Option<f64>) -> CompareRow {
        CompareRow {
            test: "toy (4)".into(),
            winner: Winner::Equal,
            nodes_sffs: 10.0,
            nodes_uc: 7.5,
            nodes_ucc: ucc,
            time_sffs: 0.001,
            time_uc: 0.002,
            time_ucc: ucc.map(|_| 0.003),
            best_sffs: 0.25,
            best_uc: 0.25,
            best_ucc: ucc.map(|_| 0.25),
            runs: 2,
        }
    }

    #[test]
    fn mean_row_averages() {
        let m = MeanRow::of(&[report(0, 10), report(1, 13)]).unwrap();
        assert_eq!(m.computed_nodes, 11.5);
        assert_eq!(m.runs, 2);
        assert!(MeanRow::of(&[]).is_none());
    }

    #[test]
    fn csv_has_the_report_header_and_a_mean_row() {
        let reports = vec![report(0, 10), report(1, 13)];
        let means = vec![MeanRow::of(&reports).unwrap()];
        let text = render_runs(&RunOutput { reports, means }, OutFormat::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], RUN_COLUMNS.join(","));
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("ucurve_ucc,toy,mean,,0.25,11.5,"));
    }

    #[test]
    fn json_lines_round_trip_as_objects() {
        let text = render_runs(
            &RunOutput {
                reports: vec![report(3, 8)],
                means: vec![],
            },
            OutFormat::JsonLines,
        );
        let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(v["seed"], 3);
        assert_eq!(v["computed_nodes"], 8);
    }

    #[test]
    fn compare_table_marks_skipped_runs() {
        let text = render_compare(&[row(Some(16.0)), row(None)], OutFormat::Md);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("| {} |", COMPARE_HEADER.join(" | ")));
        assert_eq!(lines[2], "| toy (4) | EQUAL | 10 | 7.5 | 16 | 0.001 | 0.002 | 0.003 |");
        assert_eq!(lines[3], "| toy (4) | EQUAL | 10 | 7.5 | NA | 0.001 | 0.002 | NA |");
        let csv = render_compare(&[row(None)], OutFormat::Csv);
        assert!(csv.lines().nth(1).unwrap().contains(",NA,"));
    }
}
