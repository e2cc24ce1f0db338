//! Rendering of classification results: the JSON document written by
//! `classify --out` and the aligned table printed to stdout. Key names in the
//! JSON form are stable; golden comparisons key on them.

use serde::Serialize;
use std::collections::BTreeMap;
use switchkit::classify::ClassificationReport;
use switchkit::design::DesignParams;

/// Top-level structured report. `designs` has one record per input (in input
/// order), `classes` one entry per isomorphism class (sorted by digest).
#[derive(Serialize)]
pub struct JsonReport {
    pub input_count: usize,
    pub class_count: usize,
    pub self_dual_class_count: usize,
    pub hadamard_class_count: usize,
    /// |Aut| (decimal string) to number of classes.
    pub aut_histogram: BTreeMap<String, usize>,
    /// prime to (rank to number of classes).
    pub rank_histograms: BTreeMap<u64, BTreeMap<usize, usize>>,
    pub classes: Vec<JsonClass>,
    pub designs: Vec<JsonDesign>,
}

#[derive(Serialize)]
pub struct JsonClass {
    pub digest: String,
    pub size: usize,
    /// Input indices belonging to this class; the first is the representative.
    pub members: Vec<usize>,
}

/// Everything known about one input design. Fields other than `index` and
/// `class` are isomorphism invariants shared with the class representative.
#[derive(Serialize)]
pub struct JsonDesign {
    pub index: usize,
    /// Position of the design's class in `classes`.
    pub class: usize,
    pub digest: String,
    pub params: DesignParams,
    pub p_ranks: BTreeMap<u64, usize>,
    pub aut_order: String,
    pub self_dual: Option<bool>,
    pub hadamard_digest: Option<String>,
}

pub fn json_report(report: &ClassificationReport) -> JsonReport {
    let classes: Vec<JsonClass> = report
        .classes
        .iter()
        .map(|c| JsonClass {
            digest: c.representative.digest.clone(),
            size: c.size(),
            members: c.members.clone(),
        })
        .collect();
    let mut designs: Vec<JsonDesign> = report
        .classes
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| {
            let rep = &c.representative;
            c.members.iter().map(move |&index| JsonDesign {
                index,
                class: ci,
                digest: rep.digest.clone(),
                params: rep.params,
                p_ranks: rep.p_ranks.clone(),
                aut_order: rep.aut_order.clone(),
                self_dual: rep.self_dual,
                hadamard_digest: rep.hadamard_digest.clone(),
            })
        })
        .collect();
    designs.sort_by_key(|d| d.index);
    JsonReport {
        input_count: report.designs,
        class_count: report.class_count(),
        self_dual_class_count: report.self_dual_classes,
        hadamard_class_count: report.hadamard_classes,
        aut_histogram: report.aut_histogram.clone(),
        rank_histograms: report.rank_histograms.clone(),
        classes,
        designs,
    }
}

/// Aligned text table plus aggregate lines, ending in a newline.
pub fn render_text(report: &ClassificationReport) -> String {
    let primes: Vec<u64> = report
        .classes
        .first()
        .map(|c| c.representative.p_ranks.keys().copied().collect())
        .unwrap_or_default();

    let mut header: Vec<String> = ["class", "size", "parameters", "|Aut|", "self-dual"]
        .map(str::to_owned)
        .into();
    header.extend(primes.iter().map(|p| format!("p={p}")));
    header.push("hadamard".to_owned());

    let mut rows = Vec::with_capacity(report.class_count());
    for (ci, class) in report.classes.iter().enumerate() {
        let rep = &class.representative;
        let p = rep.params;
        let mut row = vec![
            ci.to_string(),
            class.size().to_string(),
            format!("2-({},{},{})", p.v, p.k, p.lambda),
            rep.aut_order.clone(),
            match rep.self_dual {
                Some(true) => "yes".to_owned(),
                Some(false) => "no".to_owned(),
                None => "-".to_owned(),
            },
        ];
        row.extend(primes.iter().map(|q| rep.p_ranks[q].to_string()));
        row.push(match &rep.hadamard_digest {
            Some(d) => format!("{}..", &d[..12]),
            None => "-".to_owned(),
        });
        rows.push(row);
    }

    let mut s = render_table(&header, &rows);
    s.push_str(&format!(
        "designs: {}  classes: {}  self-dual classes: {}  hadamard classes: {}\n",
        report.designs,
        report.class_count(),
        report.self_dual_classes,
        report.hadamard_classes,
    ));
    for (p, hist) in &report.rank_histograms {
        let buckets: Vec<String> = hist.iter().map(|(r, n)| format!("{r}:{n}")).collect();
        s.push_str(&format!(
            "rank histogram p={p} (class representatives): {}\n",
            buckets.join(" ")
        ));
    }
    if !report.aut_histogram.is_empty() {
        // Keys are unpadded decimals: (length, lexicographic) is numeric order.
        let mut orders: Vec<(&String, &usize)> = report.aut_histogram.iter().collect();
        orders.sort_by_key(|(k, _)| (k.len(), k.as_str()));
        let buckets: Vec<String> = orders.iter().map(|(k, n)| format!("{k}:{n}")).collect();
        s.push_str(&format!(
            "aut histogram (class representatives): {}\n",
            buckets.join(" ")
        ));
    }
    s
}

fn render_table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width = vec![0usize; cols];
    for row in std::iter::once(header).chain(rows.iter().map(|r| &r[..])) {
        for (c, cell) in row.iter().enumerate() {
            width[c] = width[c].max(cell.len());
        }
    }
    let mut s = String::new();
    for row in std::iter::once(header).chain(rows.iter().map(|r| &r[..])) {
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                s.push_str("  ");
            }
            // Numbers right, labels left; the last data column may run ragged.
            if c == 2 || c + 1 == cols {
                if c + 1 == cols {
                    s.push_str(cell);
                } else {
                    s.push_str(&format!("{cell:<w$}", w = width[c]));
                }
            } else {
                s.push_str(&format!("{cell:>w$}", w = width[c]));
            }
        }
        // Trim trailing padding so empty last cells don't leave blanks.
        while s.ends_with(' ') {
            s.pop();
        }
        s.push('\n');
    }
    s
}
