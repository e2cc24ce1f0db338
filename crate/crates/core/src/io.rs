//! Text fixture formats: incidence structures, ±1 matrices and orbit
//! matrices, all line oriented with `#` comment lines.
//!
//! Incidence records: a `v b` header, then b rows of v characters from
//! `{0, 1}` (row i = block i), then optional `S: i1 i2 ...` lines naming
//! block subsets (0-based). Files may hold several records back to back.
//!
//! Sign-matrix records: an order line `m`, then m rows of `{+, -}`.
//!
//! Orbit-matrix records: a row count `t`, a line of point-orbit lengths,
//! then t lines `beta : c_1 c_2 ...`. The design parameters are derived
//! from the counting identities and must come out integral.

use crate::bitset::Bitset;
use crate::design::{DesignParams, IncidenceStructure};
use crate::error::{Error, Result};
use crate::hadamard::SignMatrix;
use crate::orbit::OrbitMatrix;
use std::path::Path;

/// One incidence record: the structure and any `S:` block subsets that
/// accompanied it (unanalyzed indices, in file order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedDesign {
    pub structure: IncidenceStructure,
    pub switch_sets: Vec<Vec<usize>>,
}

/// Trimmed, non-empty, non-comment lines with their 1-based line numbers.
fn logical_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .collect()
}

fn parse_fields<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<Vec<T>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|_| Error::parse(line, format!("invalid {what}: {tok:?}")))
        })
        .collect()
}

/// Parse every incidence record in `text`.
pub fn parse_designs(text: &str) -> Result<Vec<ParsedDesign>> {
    let lines = logical_lines(text);
    let mut out: Vec<ParsedDesign> = Vec::new();
    let mut pos = 0;
    while pos < lines.len() {
        let (lno, header) = lines[pos];
        if let Some(rest) = header.strip_prefix("S:") {
            let design = out
                .last_mut()
                .ok_or_else(|| Error::parse(lno, "S: line before any design"))?;
            let set: Vec<usize> = parse_fields(lno, rest, "block index")?;
            let b = design.structure.b();
            if let Some(&bad) = set.iter().find(|&&i| i >= b) {
                return Err(Error::parse(
                    lno,
                    format!("block index {bad} out of range for {b} blocks"),
                ));
            }
            design.switch_sets.push(set);
            pos += 1;
            continue;
        }
        let dims: Vec<usize> = parse_fields(lno, header, "header field")?;
        let [v, b] = dims[..] else {
            return Err(Error::parse(lno, "expected header \"v b\""));
        };
        if v == 0 || b == 0 {
            return Err(Error::parse(lno, "v and b must be positive"));
        }
        let mut rows = Vec::with_capacity(b);
        for i in 0..b {
            let Some(&(rno, row)) = lines.get(pos + 1 + i) else {
                return Err(Error::parse(
                    lno,
                    format!("expected {b} incidence rows, file ends after {i}"),
                ));
            };
            if row.len() != v || !row.bytes().all(|c| c == b'0' || c == b'1') {
                return Err(Error::parse(rno, format!("expected {v} characters of 0/1")));
            }
            let mut bits = Bitset::new(v);
            for (p, c) in row.bytes().enumerate() {
                bits.set(p, c == b'1');
            }
            rows.push(bits);
        }
        pos += 1 + b;
        out.push(ParsedDesign {
            structure: IncidenceStructure::from_rows(v, rows),
            switch_sets: Vec::new(),
        });
    }
    Ok(out)
}

/// Render one incidence record; `sets` become trailing `S:` lines.
pub fn format_design(inc: &IncidenceStructure, sets: &[Vec<usize>]) -> String {
    let mut s = format!("{} {}\n", inc.v(), inc.b());
    for block in 0..inc.b() {
        for point in 0..inc.v() {
            s.push(if inc.contains(block, point) { '1' } else { '0' });
        }
        s.push('\n');
    }
    for set in sets {
        s.push_str("S:");
        for i in set {
            s.push_str(&format!(" {i}"));
        }
        s.push('\n');
    }
    s
}

/// Render a stream of incidence records.
pub fn format_designs<'a, I>(items: I) -> String
where
    I: IntoIterator<Item = &'a ParsedDesign>,
{
    items
        .into_iter()
        .map(|d| format_design(&d.structure, &d.switch_sets))
        .collect()
}

/// Parse every sign-matrix record in `text`.
pub fn parse_sign_matrices(text: &str) -> Result<Vec<SignMatrix>> {
    let lines = logical_lines(text);
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < lines.len() {
        let (lno, header) = lines[pos];
        let m: usize = header
            .parse()
            .map_err(|_| Error::parse(lno, format!("expected an order, got {header:?}")))?;
        if m == 0 {
            return Err(Error::parse(lno, "order must be positive"));
        }
        let mut rows = Vec::with_capacity(m);
        for i in 0..m {
            let Some(&(rno, row)) = lines.get(pos + 1 + i) else {
                return Err(Error::parse(
                    lno,
                    format!("expected {m} matrix rows, file ends after {i}"),
                ));
            };
            if row.len() != m || !row.bytes().all(|c| c == b'+' || c == b'-') {
                return Err(Error::parse(rno, format!("expected {m} characters of +/-")));
            }
            let mut bits = Bitset::new(m);
            for (j, c) in row.bytes().enumerate() {
                bits.set(j, c == b'+');
            }
            rows.push(bits);
        }
        pos += 1 + m;
        out.push(SignMatrix::from_rows(m, rows));
    }
    Ok(out)
}

/// Render one sign-matrix record.
pub fn format_sign_matrix(h: &SignMatrix) -> String {
    let mut s = format!("{}\n", h.order());
    for i in 0..h.order() {
        for j in 0..h.order() {
            s.push(if h.entry(i, j) > 0 { '+' } else { '-' });
        }
        s.push('\n');
    }
    s
}

/// Parse every orbit-matrix record in `text`, deriving the design parameters
/// from the counting identities.
pub fn parse_orbit_matrices(text: &str) -> Result<Vec<OrbitMatrix>> {
    let lines = logical_lines(text);
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < lines.len() {
        let (lno, header) = lines[pos];
        let t: usize = header
            .parse()
            .map_err(|_| Error::parse(lno, format!("expected a row count, got {header:?}")))?;
        if t == 0 {
            return Err(Error::parse(lno, "row count must be positive"));
        }
        let Some(&(wno, wline)) = lines.get(pos + 1) else {
            return Err(Error::parse(lno, "expected a line of point-orbit lengths"));
        };
        let omegas: Vec<usize> = parse_fields(wno, wline, "point-orbit length")?;
        if omegas.is_empty() || omegas.contains(&0) {
            return Err(Error::parse(wno, "point-orbit lengths must be positive"));
        }
        let mut betas = Vec::with_capacity(t);
        let mut entries = Vec::with_capacity(t);
        for i in 0..t {
            let Some(&(rno, row)) = lines.get(pos + 2 + i) else {
                return Err(Error::parse(
                    lno,
                    format!("expected {t} orbit rows, file ends after {i}"),
                ));
            };
            let (beta_part, entry_part) = row
                .split_once(':')
                .ok_or_else(|| Error::parse(rno, "expected \"beta : entries\""))?;
            let beta: usize = beta_part
                .trim()
                .parse()
                .map_err(|_| Error::parse(rno, "invalid block-orbit length"))?;
            if beta == 0 {
                return Err(Error::parse(rno, "block-orbit length must be positive"));
            }
            let row_entries: Vec<usize> = parse_fields(rno, entry_part, "orbit entry")?;
            if row_entries.len() != omegas.len() {
                return Err(Error::parse(
                    rno,
                    format!(
                        "expected {} entries, got {}",
                        omegas.len(),
                        row_entries.len()
                    ),
                ));
            }
            betas.push(beta);
            entries.push(row_entries);
        }
        let params = derive_params(lno, &omegas, &betas, &entries)?;
        pos += 2 + t;
        out.push(OrbitMatrix::new(params, omegas, betas, entries));
    }
    Ok(out)
}

/// v = Σω, b = Σβ, k = first row sum; r and λ follow from bk = vr and
/// r(k − 1) = λ(v − 1) and must be integral.
fn derive_params(
    line: usize,
    omegas: &[usize],
    betas: &[usize],
    entries: &[Vec<usize>],
) -> Result<DesignParams> {
    let v: usize = omegas.iter().sum();
    let b: usize = betas.iter().sum();
    let k: usize = entries[0].iter().sum();
    if v < 2 {
        return Err(Error::parse(line, "derived v is below 2"));
    }
    if b * k % v != 0 {
        return Err(Error::parse(
            line,
            format!("bk = {} is not divisible by v = {v}", b * k),
        ));
    }
    let r = b * k / v;
    if k == 0 {
        return Err(Error::parse(line, "first orbit row sums to zero"));
    }
    if r * (k - 1) % (v - 1) != 0 {
        return Err(Error::parse(
            line,
            format!(
                "r(k - 1) = {} is not divisible by v - 1 = {}",
                r * (k - 1),
                v - 1
            ),
        ));
    }
    let lambda = r * (k - 1) / (v - 1);
    Ok(DesignParams { v, b, r, k, lambda })
}

/// Render one orbit-matrix record.
pub fn format_orbit_matrix(om: &OrbitMatrix) -> String {
    let join = |xs: &[usize]| {
        xs.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = format!(
        "{}\n{}\n",
        om.block_orbits(),
        join(om.point_orbit_lengths())
    );
    for i in 0..om.block_orbits() {
        s.push_str(&format!(
            "{} : {}\n",
            om.block_orbit_lengths()[i],
            join(om.row(i))
        ));
    }
    s
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

pub fn read_designs(path: impl AsRef<Path>) -> Result<Vec<ParsedDesign>> {
    parse_designs(&read_to_string(path.as_ref())?)
}

pub fn read_sign_matrices(path: impl AsRef<Path>) -> Result<Vec<SignMatrix>> {
    parse_sign_matrices(&read_to_string(path.as_ref())?)
}

pub fn read_orbit_matrices(path: impl AsRef<Path>) -> Result<Vec<OrbitMatrix>> {
    parse_orbit_matrices(&read_to_string(path.as_ref())?)
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    std::fs::write(path.as_ref(), text).map_err(|e| Error::Io {
        path: path.as_ref().display().to_string(),
        msg: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{fano, validate_2design};
    use crate::orbit::library::{m1, m3};
    use crate::orbit::validate_orbit_matrix;

    #[test]
    fn incidence_round_trip_is_bit_exact() {
        let f = fano();
        let sets = vec![vec![0, 1], vec![2, 5, 6, 3]];
        let text = format_design(&f, &sets);
        let parsed = parse_designs(&text).unwrap();
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0].structure, f);
        assert_eq!(parsed[0].switch_sets, sets);
        assert_eq!(format_designs(&parsed), text);
    }

    #[test]
    fn incidence_parser_skips_comments_and_blanks() {
        let text = "# seven points\n\n7 7\n# rows follow\n1101000\n0110100\n0011010\n\
                    0001101\n1000110\n0100011\n1010001\n\nS: 0 1\n";
        let parsed = parse_designs(text).unwrap();
        assert_eq!(validate_2design(&parsed[0].structure).unwrap().lambda, 1);
        assert_eq!(parsed[0].switch_sets, vec![vec![0, 1]]);
    }

    #[test]
    fn incidence_streams_keep_sets_with_their_design() {
        let f = fano();
        let one = ParsedDesign {
            structure: f.clone(),
            switch_sets: vec![vec![0, 1]],
        };
        let two = ParsedDesign {
            structure: f.dual(),
            switch_sets: vec![],
        };
        let text = format_designs([&one, &two]);
        let parsed = parse_designs(&text).unwrap();
        assert_eq!(parsed, vec![one, two]);
    }

    #[test]
    fn incidence_parser_reports_line_numbers() {
        assert_eq!(
            parse_designs("7 7\n110\n"),
            Err(Error::parse(2, "expected 7 characters of 0/1"))
        );
        assert!(matches!(
            parse_designs("S: 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_designs("2 1\n11\nS: 3\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_designs("2 2\n11\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn sign_matrix_round_trip() {
        let h = SignMatrix::from_signs(&[
            vec![1, 1, 1, -1],
            vec![1, 1, -1, 1],
            vec![-1, 1, 1, 1],
            vec![1, -1, 1, 1],
        ]);
        let text = format_sign_matrix(&h);
        assert_eq!(text, "4\n+++-\n++-+\n-+++\n+-++\n");
        let parsed = parse_sign_matrices(&text).unwrap();
        assert_eq!(parsed, vec![h.clone()]);

        let stream = format!("{}{}", text, format_sign_matrix(&h));
        assert_eq!(parse_sign_matrices(&stream).unwrap().len(), 2);

        assert!(matches!(
            parse_sign_matrices("2\n+*\n--\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn orbit_matrix_round_trip_derives_parameters() {
        for om in [m1(), m3()] {
            let text = format_orbit_matrix(&om);
            let parsed = parse_orbit_matrices(&text).unwrap();
            assert_eq!(parsed, vec![om.clone()]);
            assert_eq!(parsed[0].params(), om.params());
            assert!(validate_orbit_matrix(&parsed[0]).is_valid());
            assert_eq!(format_orbit_matrix(&parsed[0]), text);
        }
    }

    #[test]
    fn orbit_parser_rejects_non_integral_parameters() {
        // Σω = 5, Σβ = 2, k = 3: bk/v = 6/5 is not integral.
        let text = "2\n2 3\n1 : 1 2\n1 : 2 1\n";
        assert!(matches!(
            parse_orbit_matrices(text),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_orbit_matrices("1\n4\n1 : 2 2\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_orbit_matrices("1\n4\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn repo_fixtures_parse_and_validate() {
        use crate::design::d_6_3_2;
        use crate::hadamard::{check_bush_type, is_block_negacyclic};
        use crate::orbit::library::{m2, m3p};

        let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
        let fano_file = read_designs(format!("{root}/designs/fano.inc")).unwrap();
        assert_eq!(fano_file[0].structure, fano());
        let d6_file = read_designs(format!("{root}/designs/d6_3_2.inc")).unwrap();
        assert_eq!(d6_file[0].structure, d_6_3_2());

        for (name, expected) in [
            ("M1.om", m1()),
            ("M2.om", m2()),
            ("M3.om", m3()),
            ("M3prime.om", m3p()),
        ] {
            let parsed = read_orbit_matrices(format!("{root}/orbit/{name}")).unwrap();
            assert_eq!(parsed, vec![expected], "{name}");
        }

        let hs = read_sign_matrices(format!("{root}/hadamard/bush36_searched.had")).unwrap();
        assert_eq!(hs.len(), 1);
        assert_eq!(check_bush_type(&hs[0], 3), Ok(()));
        assert_eq!(is_block_negacyclic(&hs[0], 3), Ok(true));
    }

    #[test]
    fn io_errors_carry_the_path() {
        let err = read_designs("/nonexistent/designs.inc").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        if let Error::Io { path, .. } = err {
            assert!(path.contains("nonexistent"));
        }
    }
}
