//! Batch verification front-end: `verify` runs the relation checkers on a
//! structure file, `trees` surfaces the stratum combinatorics, `homology`
//! computes exact homology tables. Exit codes: 0 = pass, 1 = relation
//! violation, 2 = parse/validation error.

use clap::{Parser, Subcommand, ValueEnum};
use homalg::format::{self, FileKind, StructureFile};
use homalg::report::{Report, Status};
use homalg::trees::{
    codim1_count, enumerate_stable_trees, enumerate_two_colored, stratum_dimension, Tree, TreeKind,
};
use serde_json::json;
use std::collections::BTreeMap;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "homalg",
    version,
    about = "exact checkers for graded homotopy-algebraic structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for the relation checkers (env: HOMALG_JOBS).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Run the relation checker matching the file kind.
    Verify {
        path: String,
        #[arg(long, value_enum)]
        kind: VerifyKind,
        /// Cap overrides: d=K, k=K or length=K (repeatable, comma-separable).
        #[arg(long, value_delimiter = ',')]
        caps: Vec<String>,
    },
    /// Enumerate stable trees, their dimensions and boundary counts.
    Trees {
        #[arg(long, value_enum)]
        kind: TreesKind,
        #[arg(long)]
        leaves: usize,
        /// Interior (dashed) leaves for the two-colored kind.
        #[arg(long, default_value_t = 0)]
        interior: usize,
        #[arg(long)]
        max_internal_edges: Option<usize>,
        /// Print each tree in nested-list form.
        #[arg(long)]
        list: bool,
    },
    /// Homology tables for complexes, telescopes and Hochschild cochains.
    Homology {
        path: String,
        #[arg(long, value_enum)]
        mode: HomologyMode,
        /// Degree window lo..hi (hochschild mode).
        #[arg(long)]
        window: Option<String>,
        /// Cap overrides: d=K, k=K or length=K.
        #[arg(long, value_delimiter = ',')]
        caps: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Linfty,
    Ainfty,
    Morphism,
    Co,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreesKind {
    Ordered,
    Unordered,
    TwoColored,
}

#[derive(Clone, Copy, ValueEnum)]
enum HomologyMode {
    Complex,
    Telescope,
    Hochschild,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs.or_else(|| {
        std::env::var("HOMALG_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let report = run(&cli.command);
    let text = match cli.format {
        Format::Text => report.render_text(),
        Format::Machine => report.render_machine(),
    };
    print!("{text}");
    ExitCode::from(report.exit_code() as u8)
}

fn run(cmd: &Command) -> Report {
    match cmd {
        Command::Verify { path, kind, caps } => cmd_verify(path, *kind, caps),
        Command::Trees {
            kind,
            leaves,
            interior,
            max_internal_edges,
            list,
        } => cmd_trees(*kind, *leaves, *interior, *max_internal_edges, *list),
        Command::Homology {
            path,
            mode,
            window,
            caps,
        } => cmd_homology(path, *mode, window, caps),
    }
}

fn parse_caps(caps: &[String], report: &mut Report) -> Option<BTreeMap<String, usize>> {
    let mut out = BTreeMap::new();
    for c in caps {
        match c.split_once('=') {
            Some((k, v)) if ["d", "k", "length"].contains(&k) => match v.parse::<usize>() {
                Ok(n) => {
                    out.insert(k.to_string(), n);
                }
                Err(_) => {
                    report.push("caps", Status::Error, format!("bad cap value in {c}"));
                    return None;
                }
            },
            _ => {
                report.push(
                    "caps",
                    Status::Error,
                    format!("bad cap {c}, expected d=K, k=K or length=K"),
                );
                return None;
            }
        }
    }
    Some(out)
}

fn load(path: &str, report: &mut Report) -> Option<StructureFile> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            report.push("read", Status::Error, format!("{path}: {e}"));
            return None;
        }
    };
    match format::parse(&text) {
        Ok(f) => Some(f),
        Err(e) => {
            report.push("parse", Status::Error, e.to_string());
            None
        }
    }
}

fn cmd_verify(path: &str, kind: VerifyKind, caps: &[String]) -> Report {
    let mut report = Report::new(format!("verify {path}"));
    let overrides = match parse_caps(caps, &mut report) {
        Some(c) => c,
        None => return report,
    };
    let mut file = match load(path, &mut report) {
        Some(f) => f,
        None => return report,
    };
    for (k, v) in overrides {
        file.caps.insert(k, v);
    }
    let want = match kind {
        VerifyKind::Linfty => FileKind::Linfty,
        VerifyKind::Ainfty => FileKind::Ainfty,
        VerifyKind::Morphism => FileKind::Morphism,
        VerifyKind::Co => FileKind::Co,
    };
    if file.kind != want {
        report.push(
            "kind",
            Status::Error,
            format!(
                "file declares kind {}, --kind asked for {}",
                file.kind.name(),
                want.name()
            ),
        );
        return report;
    }
    match kind {
        VerifyKind::Linfty => {
            let l = match file.build_linfty() {
                Ok(l) => l,
                Err(e) => {
                    report.push("build", Status::Error, e.to_string());
                    return report;
                }
            };
            let cap = file.cap("d", 4);
            match homalg::linfty::check_linfty_relations(&l, cap) {
                Ok(None) => {
                    report.push("linfty-relations", Status::Pass, format!("arity <= {cap}"))
                }
                Ok(Some(ce)) => report.push("linfty-relations", Status::Fail, ce.to_string()),
                Err(e) => report.push("linfty-relations", Status::Error, e.to_string()),
            }
        }
        VerifyKind::Ainfty => {
            let a = match file.build_ainfty() {
                Ok(a) => a,
                Err(e) => {
                    report.push("build", Status::Error, e.to_string());
                    return report;
                }
            };
            let cap = file.cap("length", 2 * a.max_mu_arity().max(1));
            match homalg::ainfty::check_ainfty(&a, cap) {
                Ok(()) => report.push("ainfty-relations", Status::Pass, format!("chains <= {cap}")),
                Err(homalg::ainfty::AInftyError::RelationViolation { chain, residual }) => report
                    .push(
                        "ainfty-relations",
                        Status::Fail,
                        format!("chain ({chain}) residual {residual}"),
                    ),
                Err(e) => report.push("ainfty-relations", Status::Error, e.to_string()),
            }
        }
        VerifyKind::Morphism => {
            let f = match file.build_morphism() {
                Ok(f) => f,
                Err(e) => {
                    report.push("build", Status::Error, e.to_string());
                    return report;
                }
            };
            let cap = file.cap("d", 4);
            for (name, l) in [("source", &f.source), ("target", &f.target)] {
                match homalg::linfty::check_linfty_relations(l, cap) {
                    Ok(None) => report.push(format!("{name}-relations"), Status::Pass, ""),
                    Ok(Some(ce)) => {
                        report.push(format!("{name}-relations"), Status::Fail, ce.to_string())
                    }
                    Err(e) => {
                        report.push(format!("{name}-relations"), Status::Error, e.to_string())
                    }
                }
            }
            if report.status == Status::Pass {
                match homalg::linfty::check_linfty_morphism(&f, cap) {
                    Ok(None) => {
                        report.push("morphism-identity", Status::Pass, format!("arity <= {cap}"))
                    }
                    Ok(Some(ce)) => report.push("morphism-identity", Status::Fail, ce.to_string()),
                    Err(e) => report.push("morphism-identity", Status::Error, e.to_string()),
                }
            }
        }
        VerifyKind::Co => {
            let c = match file.build_co() {
                Ok(c) => c,
                Err(e) => {
                    report.push("build", Status::Error, e.to_string());
                    return report;
                }
            };
            match homalg::co::check_co_symmetry(&c) {
                Ok(None) => report.push("co-symmetry", Status::Pass, ""),
                Ok(Some((key, sigma))) => {
                    report.push("co-symmetry", Status::Fail, format!("{key} under {sigma}"))
                }
                Err(e) => report.push("co-symmetry", Status::Error, e.to_string()),
            }
            if report.status == Status::Pass {
                let (dc, kc) = (c.d_cap, c.k_cap.saturating_sub(1));
                match homalg::co::check_co_relations(&c, dc, kc) {
                    Ok(None) => report.push(
                        "co-relations",
                        Status::Pass,
                        format!("d <= {dc}, k <= {kc}"),
                    ),
                    Ok(Some(v)) => report.push("co-relations", Status::Fail, v.to_string()),
                    Err(e) => report.push("co-relations", Status::Error, e.to_string()),
                }
            }
        }
    }
    report
}

fn cmd_trees(
    kind: TreesKind,
    leaves: usize,
    interior: usize,
    max_ie: Option<usize>,
    list: bool,
) -> Report {
    let mut report = Report::new(format!("trees {leaves}"));
    let trees: Vec<Tree> = match kind {
        TreesKind::Ordered => enumerate_stable_trees(TreeKind::Ordered, leaves, max_ie),
        TreesKind::Unordered => enumerate_stable_trees(TreeKind::Unordered, leaves, max_ie),
        TreesKind::TwoColored => enumerate_two_colored(interior, leaves, max_ie),
    };
    report.push("count", Status::Pass, trees.len().to_string());
    let mut by_codim: BTreeMap<String, usize> = BTreeMap::new();
    let mut dims = BTreeMap::new();
    for t in &trees {
        let dim = stratum_dimension(t, None).unwrap_or(-1);
        *by_codim.entry(t.internal_edges().to_string()).or_default() += 1;
        dims.insert(t.root.to_string(), dim);
    }
    report.table("count_by_internal_edges", json!(by_codim));
    if matches!(kind, TreesKind::Unordered) {
        let mut splits = BTreeMap::new();
        for d_minus in 1..=leaves {
            let d_plus = leaves + 1 - d_minus;
            splits.insert(
                format!("({d_plus},{d_minus})"),
                json!(codim1_count(leaves, d_minus)),
            );
        }
        report.table("codim1_split_counts", json!(splits));
    }
    if list {
        let mut lines: Vec<String> = dims.iter().map(|(t, d)| format!("dim {d} {t}")).collect();
        lines.sort();
        report.table("trees", json!(lines));
    }
    report
}

fn parse_window(w: &Option<String>, report: &mut Report) -> Option<(i64, i64)> {
    match w {
        None => Some((0, 0)),
        Some(s) => match s.split_once("..") {
            Some((a, b)) => match (a.parse(), b.parse()) {
                (Ok(lo), Ok(hi)) if lo <= hi => Some((lo, hi)),
                _ => {
                    report.push("window", Status::Error, format!("bad window {s}"));
                    None
                }
            },
            None => {
                report.push(
                    "window",
                    Status::Error,
                    format!("bad window {s}, expected lo..hi"),
                );
                None
            }
        },
    }
}

fn homology_table(
    h: &BTreeMap<homalg::grading::Degree, homalg::linalg::GroupInvariants>,
) -> serde_json::Value {
    let mut out = BTreeMap::new();
    for (deg, inv) in h {
        out.insert(
            format!("{deg}"),
            json!({"rank": inv.free_rank, "torsion": inv.torsion}),
        );
    }
    json!(out)
}

fn cmd_homology(
    path: &str,
    mode: HomologyMode,
    window: &Option<String>,
    caps: &[String],
) -> Report {
    let mut report = Report::new(format!("homology {path}"));
    let overrides = match parse_caps(caps, &mut report) {
        Some(c) => c,
        None => return report,
    };
    let mut file = match load(path, &mut report) {
        Some(f) => f,
        None => return report,
    };
    for (k, v) in overrides {
        file.caps.insert(k, v);
    }
    match mode {
        HomologyMode::Complex => {
            let c = match file.build_complex() {
                Ok(c) => c,
                Err(e) => {
                    report.push("build", Status::Error, e.to_string());
                    return report;
                }
            };
            match homalg::linalg::homology(&c) {
                Ok(h) => {
                    report.push("homology", Status::Pass, format!("{} degrees", h.len()));
                    report.table("homology", homology_table(&h));
                }
                Err(e) => report.push("homology", Status::Error, e.to_string()),
            }
        }
        HomologyMode::Telescope => {
            let s = match file.build_system() {
                Ok(s) => s,
                Err(e) => {
                    report.push("build", Status::Error, e.to_string());
                    return report;
                }
            };
            let tel = match homalg::telescope::build_telescope(&s) {
                Ok(t) => t,
                Err(e) => {
                    report.push("telescope", Status::Error, e.to_string());
                    return report;
                }
            };
            match homalg::telescope::telescope_homology(&tel) {
                Ok(h) => {
                    report.table("homology", homology_table(&h));
                }
                Err(e) => {
                    report.push("homology", Status::Error, e.to_string());
                    return report;
                }
            }
            match homalg::telescope::compare_with_colimit(&s) {
                Ok(r) => {
                    report.push(
                        "colimit-comparison",
                        Status::Pass,
                        if r.all_equal {
                            "equal".into()
                        } else {
                            "unequal".to_string()
                        },
                    );
                    report.table(
                        "colimit_comparison",
                        serde_json::to_value(&r).expect("report value"),
                    );
                }
                Err(e) => report.push("colimit-comparison", Status::Error, e.to_string()),
            }
        }
        HomologyMode::Hochschild => {
            let a = match file.build_ainfty() {
                Ok(a) => a,
                Err(e) => {
                    report.push("build", Status::Error, e.to_string());
                    return report;
                }
            };
            let (lo, hi) = match parse_window(window, &mut report) {
                Some(w) => w,
                None => return report,
            };
            let cap = file.cap("length", (hi - lo).unsigned_abs() as usize + 3);
            match homalg::ainfty::hochschild_cohomology(&a, lo..=hi, cap) {
                Ok(h) => {
                    let mut table = BTreeMap::new();
                    for (m, inv) in &h {
                        table.insert(
                            m.to_string(),
                            json!({"rank": inv.free_rank, "torsion": inv.torsion}),
                        );
                    }
                    report.push(
                        "hochschild",
                        Status::Pass,
                        format!("window {lo}..{hi}, cap {cap}"),
                    );
                    report.table("cohomology", json!(table));
                }
                Err(e @ homalg::ainfty::AInftyError::WindowNotCertified { .. }) => {
                    report.push("hochschild", Status::Error, e.to_string());
                }
                Err(e) => report.push("hochschild", Status::Error, e.to_string()),
            }
        }
    }
    report
}
