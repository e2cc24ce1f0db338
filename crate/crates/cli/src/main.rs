//! Switching sets for 2-designs from the command line.
//!
//! Subcommands mirror the library modules: design validation and transforms,
//! switching-set discovery and closures, p-ranks, canonical certificates,
//! Bush-type Hadamard matrices, orbit matrices, and batch classification.
//! Every input path accepts `-` for stdin, so the transforms compose:
//!
//! ```text
//! switchkit hadamard to-design bush36.had | switchkit closure - | switchkit classify - -p 3
//! switchkit orbit switch M1.om --rows 0,9 | switchkit orbit equiv - M2.om
//! ```
//!
//! Exit codes: 0 success (including positive query answers), 1 domain errors
//! and negative query answers, 2 usage errors, 3 missing input files.

mod report;

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use switchkit::canon::{design_certificate, hadamard_certificate, is_self_dual};
use switchkit::classify::classify_designs;
use switchkit::design::{derived_design, validate_2design, IncidenceStructure};
use switchkit::gf::p_rank;
use switchkit::hadamard::{
    check_bush_type, diagonal_switching_sets, hadamard_to_menon, is_block_negacyclic,
    menon_to_hadamard, search_bush_type, BushSearchMode, BushSearchOptions,
};
use switchkit::io::{self, ParsedDesign};
use switchkit::orbit::{orbit_matrices_equivalent, orbit_switching, validate_orbit_matrix};
use switchkit::switching::{
    analyze_block_set, apply_switching, enumerate_switching_sets, switching_closure,
    EnumerationStrategy,
};

#[derive(Parser)]
#[command(name = "switchkit", version, about = "Switching sets for 2-designs")]
struct Cli {
    /// Worker threads for batch pipelines (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that each design in FILE is a 2-design and print its parameters.
    Validate { file: String },
    /// Transpose point/block incidence of each design.
    Dual { file: String },
    /// Restrict the design to the points of one block.
    Derived {
        file: String,
        /// Block whose points form the derived point set.
        #[arg(long)]
        block: usize,
    },
    /// Apply one switching set and print the switched design.
    Switch {
        file: String,
        /// Blocks of the switching set; defaults to the file's single S: line.
        #[arg(long, value_delimiter = ',', value_name = "I,J,...")]
        blocks: Option<Vec<usize>>,
    },
    /// Find switching sets and print the design with one S: line per set.
    Enumerate {
        file: String,
        /// Largest block count to consider.
        #[arg(long)]
        max_size: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
        strategy: StrategyArg,
        /// Block groups for the grouped strategy: comma lists joined by ';'.
        #[arg(long, value_name = "A,B;C,D", required_if_eq("strategy", "grouped"))]
        groups: Option<String>,
        /// Abort after this many search nodes.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Switch every subset of the S: sets in FILE; print all 2^t designs.
    Closure { file: String },
    /// p-ranks of each design's incidence matrix.
    Rank {
        file: String,
        #[arg(short, long = "primes", value_delimiter = ',', required = true)]
        p: Vec<u64>,
    },
    /// Canonical certificate digest of each design.
    Certify {
        file: String,
        /// Re-certify this many random relabelings and demand equal digests.
        #[arg(long, value_name = "N")]
        selfcheck: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Order of the full automorphism group of each design.
    Aut { file: String },
    /// Test each symmetric design for isomorphism with its dual.
    Selfdual { file: String },
    /// Bush-type Hadamard matrices: checks, conversion, search.
    #[command(subcommand, visible_alias = "bush")]
    Hadamard(HadamardCmd),
    /// Orbit matrices: validation, switching, equivalence.
    #[command(subcommand)]
    Orbit(OrbitCmd),
    /// Classify designs up to isomorphism and report invariants.
    Classify {
        file: String,
        #[arg(short, long = "primes", value_delimiter = ',')]
        p: Vec<u64>,
        /// Write the structured JSON report here.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum StrategyArg {
    Exhaustive,
    Grouped,
}

#[derive(Subcommand)]
enum HadamardCmd {
    /// Verify orthogonality and report regularity, Bush structure, negacyclicity.
    Check { file: String },
    /// Convert to the Menon design (−1 becomes incident); attach diagonal
    /// switching sets as S: lines when the matrix is Bush-type.
    ToDesign { file: String },
    /// Convert a Menon design back to a regular Hadamard matrix.
    FromDesign { file: String },
    /// Backtracking search for Bush-type matrices of order 4n².
    Search {
        #[arg(short)]
        n: usize,
        #[arg(long, value_enum)]
        symmetry: SymmetryArg,
        /// Stop after this many matrices.
        #[arg(long)]
        limit: Option<usize>,
        /// Abort after this many search nodes.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Equivalence-class certificate digest of each matrix.
    Certify { file: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum SymmetryArg {
    Free,
    Negacyclic,
}

#[derive(Subcommand)]
enum OrbitCmd {
    /// Check every counting identity of each orbit matrix.
    Validate { file: String },
    /// Switch the given row set and print the resulting orbit matrix.
    Switch {
        file: String,
        #[arg(long, value_delimiter = ',', required = true, value_name = "I,J,...")]
        rows: Vec<usize>,
    },
    /// Decide row/column-permutation equivalence of two orbit matrices.
    Equiv { a: String, b: String },
}

/// A failure with its process exit code: 1 for domain errors, 3 for missing
/// input files.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn domain(msg: impl Into<String>) -> Self {
        Failure {
            code: 1,
            msg: msg.into(),
        }
    }
}

impl From<switchkit::Error> for Failure {
    fn from(e: switchkit::Error) -> Self {
        Failure::domain(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::domain(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: if e.kind() == std::io::ErrorKind::NotFound {
            3
        } else {
            1
        },
        msg: format!("{path}: {e}"),
    })
}

fn designs_in(path: &str) -> CliResult<Vec<ParsedDesign>> {
    let parsed = io::parse_designs(&read_input(path)?)?;
    if parsed.is_empty() {
        return Err(Failure::domain(format!("{path}: no design records")));
    }
    Ok(parsed)
}

fn single_design(path: &str) -> CliResult<ParsedDesign> {
    let mut parsed = designs_in(path)?;
    if parsed.len() > 1 {
        return Err(Failure::domain(format!(
            "{path}: expected one design record, found {}",
            parsed.len()
        )));
    }
    Ok(parsed.pop().unwrap())
}

fn single_orbit_matrix(path: &str) -> CliResult<switchkit::orbit::OrbitMatrix> {
    let mut parsed = io::parse_orbit_matrices(&read_input(path)?)?;
    match parsed.len() {
        0 => Err(Failure::domain(format!("{path}: no orbit-matrix records"))),
        1 => Ok(parsed.pop().unwrap()),
        n => Err(Failure::domain(format!(
            "{path}: expected one orbit-matrix record, found {n}"
        ))),
    }
}

/// Prefix output lines with the record index when a file holds several.
fn tag(i: usize, many: bool) -> String {
    if many {
        format!("{i}: ")
    } else {
        String::new()
    }
}

fn run(cmd: Command) -> CliResult<ExitCode> {
    match cmd {
        Command::Validate { file } => {
            let designs = designs_in(&file)?;
            let many = designs.len() > 1;
            for (i, d) in designs.iter().enumerate() {
                let p = validate_2design(&d.structure)?;
                println!(
                    "{}2-({},{},{}), r={}, b={}",
                    tag(i, many),
                    p.v,
                    p.k,
                    p.lambda,
                    p.r,
                    p.b
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Dual { file } => {
            for d in designs_in(&file)? {
                print!("{}", io::format_design(&d.structure.dual(), &[]));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Derived { file, block } => {
            let d = single_design(&file)?;
            let derived = derived_design(&d.structure, block)?;
            print!("{}", io::format_design(&derived, &[]));
            Ok(ExitCode::SUCCESS)
        }
        Command::Switch { file, blocks } => {
            let d = single_design(&file)?;
            let blocks = match blocks {
                Some(b) => b,
                None => match &d.switch_sets[..] {
                    [one] => one.clone(),
                    [] => {
                        return Err(Failure::domain(
                            "no --blocks given and the file carries no S: line",
                        ))
                    }
                    _ => {
                        return Err(Failure::domain(
                            "no --blocks given and the file carries several S: lines",
                        ))
                    }
                },
            };
            let set = analyze_block_set(&d.structure, &blocks)?;
            let switched = apply_switching(&d.structure, &set)?;
            // The same set stays valid on the output (switching is an
            // involution), so carry it along for round trips.
            print!("{}", io::format_design(&switched, &[blocks]));
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate {
            file,
            max_size,
            strategy,
            groups,
            budget,
        } => {
            let d = single_design(&file)?;
            let strategy = match strategy {
                StrategyArg::Exhaustive => EnumerationStrategy::Exhaustive,
                StrategyArg::Grouped => EnumerationStrategy::Grouped(parse_groups(
                    groups.as_deref().unwrap_or_default(),
                )?),
            };
            let mut sets = Vec::new();
            for found in enumerate_switching_sets(&d.structure, max_size, strategy, budget) {
                sets.push(found?.blocks().to_vec());
            }
            eprintln!("found {} switching sets", sets.len());
            print!("{}", io::format_design(&d.structure, &sets));
            Ok(ExitCode::SUCCESS)
        }
        Command::Closure { file } => {
            let d = single_design(&file)?;
            if d.switch_sets.is_empty() {
                return Err(Failure::domain(
                    "the file carries no S: lines to close over",
                ));
            }
            let sets = d
                .switch_sets
                .iter()
                .map(|blocks| analyze_block_set(&d.structure, blocks))
                .collect::<switchkit::Result<Vec<_>>>()?;
            let designs = switching_closure(&d.structure, &sets)?;
            eprintln!("closure of {} sets: {} designs", sets.len(), designs.len());
            for inc in &designs {
                print!("{}", io::format_design(inc, &[]));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Rank { file, p } => {
            let designs = designs_in(&file)?;
            let mut header = vec!["design".to_owned()];
            header.extend(p.iter().map(|q| format!("p={q}")));
            let mut rows = Vec::new();
            for (i, d) in designs.iter().enumerate() {
                let mut row = vec![i.to_string()];
                for &q in &p {
                    row.push(p_rank(&d.structure, q)?.to_string());
                }
                rows.push(row);
            }
            print!("{}", plain_table(&header, &rows));
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify {
            file,
            selfcheck,
            seed,
        } => {
            let designs = designs_in(&file)?;
            for d in &designs {
                let cert = design_certificate(&d.structure);
                println!("{}", cert.digest());
                if let Some(rounds) = selfcheck {
                    selfcheck_design(&d.structure, cert.digest(), rounds, seed)?;
                }
            }
            if let Some(rounds) = selfcheck {
                eprintln!(
                    "selfcheck ok: {} random relabelings of {} design(s)",
                    rounds,
                    designs.len()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Aut { file } => {
            for d in designs_in(&file)? {
                println!("{}", design_certificate(&d.structure).group_order());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selfdual { file } => {
            let designs = designs_in(&file)?;
            let many = designs.len() > 1;
            let mut all = true;
            for (i, d) in designs.iter().enumerate() {
                let yes = is_self_dual(&d.structure)?;
                all &= yes;
                println!(
                    "{}{}",
                    tag(i, many),
                    if yes { "self-dual" } else { "not self-dual" }
                );
            }
            Ok(if all {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Hadamard(cmd) => run_hadamard(cmd),
        Command::Orbit(cmd) => run_orbit(cmd),
        Command::Classify { file, p, out } => {
            let designs: Vec<IncidenceStructure> = designs_in(&file)?
                .into_iter()
                .map(|d| d.structure)
                .collect();
            let result = classify_designs(&designs, &p)?;
            print!("{}", report::render_text(&result));
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&report::json_report(&result))
                    .expect("report serialization cannot fail");
                std::fs::write(&path, json + "\n")
                    .map_err(|e| Failure::domain(format!("{}: {e}", path.display())))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_hadamard(cmd: HadamardCmd) -> CliResult<ExitCode> {
    match cmd {
        HadamardCmd::Check { file } => {
            let mats = sign_matrices_in(&file)?;
            let many = mats.len() > 1;
            for (i, h) in mats.iter().enumerate() {
                h.check_hadamard()?;
                let t = tag(i, many);
                println!("{t}order: {}", h.order());
                println!("{t}hadamard: yes");
                match h.regular_excess() {
                    Ok(s) => println!("{t}regular: yes (row sum {s})"),
                    Err(_) => println!("{t}regular: no"),
                }
                match bush_n(h.order()) {
                    Some(n) => match check_bush_type(h, n) {
                        Ok(()) => {
                            println!("{t}bush type: yes (n = {n})");
                            let nega = is_block_negacyclic(h, n)?;
                            println!("{t}block negacyclic: {}", if nega { "yes" } else { "no" });
                        }
                        Err(e) => println!("{t}bush type: no ({e})"),
                    },
                    None => println!("{t}bush type: no (order is not 4n^2)"),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        HadamardCmd::ToDesign { file } => {
            let mats = sign_matrices_in(&file)?;
            for (i, h) in mats.iter().enumerate() {
                let inc = hadamard_to_menon(h)?;
                let sets = match bush_n(h.order()) {
                    Some(n) => match diagonal_switching_sets(&inc, n) {
                        Ok(sets) => sets.iter().map(|s| s.blocks().to_vec()).collect(),
                        Err(_) => {
                            eprintln!("record {i}: not Bush-type, no switching sets attached");
                            Vec::new()
                        }
                    },
                    None => Vec::new(),
                };
                print!("{}", io::format_design(&inc, &sets));
            }
            Ok(ExitCode::SUCCESS)
        }
        HadamardCmd::FromDesign { file } => {
            for d in designs_in(&file)? {
                print!(
                    "{}",
                    io::format_sign_matrix(&menon_to_hadamard(&d.structure)?)
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        HadamardCmd::Search {
            n,
            symmetry,
            limit,
            budget,
        } => {
            let outcome = search_bush_type(&BushSearchOptions {
                n,
                mode: match symmetry {
                    SymmetryArg::Free => BushSearchMode::Free,
                    SymmetryArg::Negacyclic => BushSearchMode::BlockNegacyclic,
                },
                limit,
                budget,
            })?;
            for h in &outcome.matrices {
                print!("{}", io::format_sign_matrix(h));
            }
            eprintln!(
                "found {} matrices, {} nodes, exhausted: {}",
                outcome.matrices.len(),
                outcome.nodes,
                outcome.exhausted
            );
            Ok(ExitCode::SUCCESS)
        }
        HadamardCmd::Certify { file } => {
            for h in sign_matrices_in(&file)? {
                println!("{}", hadamard_certificate(&h)?.digest());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_orbit(cmd: OrbitCmd) -> CliResult<ExitCode> {
    match cmd {
        OrbitCmd::Validate { file } => {
            let mats = io::parse_orbit_matrices(&read_input(&file)?)?;
            if mats.is_empty() {
                return Err(Failure::domain(format!("{file}: no orbit-matrix records")));
            }
            let many = mats.len() > 1;
            let mut all = true;
            for (i, om) in mats.iter().enumerate() {
                let t = tag(i, many);
                let outcome = validate_orbit_matrix(om);
                let p = om.params();
                if outcome.is_valid() {
                    println!(
                        "{t}valid orbit matrix for 2-({},{},{}): {} block orbits, {} point orbits",
                        p.v,
                        p.k,
                        p.lambda,
                        om.block_orbits(),
                        om.point_orbits()
                    );
                } else {
                    all = false;
                    for failure in &outcome.failures {
                        println!("{t}invalid: {failure}");
                    }
                }
            }
            Ok(if all {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        OrbitCmd::Switch { file, rows } => {
            let om = single_orbit_matrix(&file)?;
            print!("{}", io::format_orbit_matrix(&orbit_switching(&om, &rows)?));
            Ok(ExitCode::SUCCESS)
        }
        OrbitCmd::Equiv { a, b } => {
            let ma = single_orbit_matrix(&a)?;
            let mb = single_orbit_matrix(&b)?;
            match orbit_matrices_equivalent(&ma, &mb) {
                Some((rho, sigma)) => {
                    println!("equivalent");
                    println!("rows:    {}", join(&rho));
                    println!("columns: {}", join(&sigma));
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("not equivalent");
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn sign_matrices_in(path: &str) -> CliResult<Vec<switchkit::hadamard::SignMatrix>> {
    let mats = io::parse_sign_matrices(&read_input(path)?)?;
    if mats.is_empty() {
        return Err(Failure::domain(format!("{path}: no sign-matrix records")));
    }
    Ok(mats)
}

/// Groups for the grouped strategy: `"0,1,2;3,4,5"`.
fn parse_groups(arg: &str) -> CliResult<Vec<Vec<usize>>> {
    arg.split(';')
        .map(|group| {
            group
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<usize>()
                        .map_err(|_| Failure::domain(format!("invalid block index {tok:?}")))
                })
                .collect()
        })
        .collect()
}

/// n with m = 4n², if any.
fn bush_n(m: usize) -> Option<usize> {
    let mut n = 0;
    while 4 * n * n < m {
        n += 1;
    }
    (4 * n * n == m).then_some(n)
}

fn join(xs: &[usize]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn plain_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
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
            s.push_str(&format!("{cell:>w$}", w = width[c]));
        }
        s.push('\n');
    }
    s
}

fn selfcheck_design(
    inc: &IncidenceStructure,
    digest: String,
    rounds: usize,
    seed: u64,
) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for round in 0..rounds {
        let mut points: Vec<usize> = (0..inc.v()).collect();
        let mut blocks: Vec<usize> = (0..inc.b()).collect();
        points.shuffle(&mut rng);
        blocks.shuffle(&mut rng);
        let relabeled = inc.relabel(&points, &blocks);
        let got = design_certificate(&relabeled).digest();
        if got != digest {
            return Err(Failure::domain(format!(
                "selfcheck round {round}: relabeling changed the certificate ({digest} -> {got})"
            )));
        }
    }
    Ok(())
}
