//! Command-line front end. Exit codes: 0 success, 1 trial failure, 2 usage error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use treeweave::absorb::{cover_with_paths, cover_with_paths_directed, CoverConfig};
use treeweave::embed::Embedding;
use treeweave::expansion::{check_expander, CheckConfig};
use treeweave::paths::ExactPath;
use treeweave::pipeline::{embed_spanning_tree, threshold_scan, verify_embedding, ScaleParams, ScanConfig};
use treeweave::tree::{gen_random_tree, TreeFamily};
use treeweave::{DiGraph, Graph, RngSeed, TreeShape, Vertex};

#[derive(Parser)]
#[command(name = "treeweave", version, about = "Spanning tree embedding in random graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one pipeline trial on a fresh G(n, p).
    Embed {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        /// A tree file, or a family name (uniform, caterpillar, binary, path, broom).
        #[arg(long)]
        tree: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Flat key=value overrides of the desk constants.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Maximum degree for generated trees.
        #[arg(long, default_value_t = 3)]
        delta: usize,
        /// Write the embedding as `guest host` lines.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the host graph as an edge list.
        #[arg(long)]
        graph_out: Option<PathBuf>,
        /// Write the guest tree.
        #[arg(long)]
        tree_out: Option<PathBuf>,
    },
    /// Check that a graph is a d-expander.
    Certify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        d: f64,
        #[arg(long, value_enum, default_value_t = Mode::Sampled)]
        mode: Mode,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cover a graph with exact-length paths between given pairs.
    Cover {
        #[arg(long)]
        graph: PathBuf,
        /// `x y` lines.
        #[arg(long)]
        pairs: PathBuf,
        /// Vertices per path.
        #[arg(long)]
        len: usize,
        /// Read an arc list and route directed paths.
        #[arg(long)]
        directed: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte-Carlo success rates over an (n, p) grid, as CSV.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an embedding of a tree into a graph.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
    },
}

/// Bad input: reported and mapped to exit code 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Usage> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Usage> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn read_pairs(path: &Path) -> Result<Vec<(Vertex, Vertex)>, Usage> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let nums: Vec<&str> = line.split_whitespace().collect();
        match nums[..] {
            [] => {}
            [x, y] => out.push((x.parse()?, y.parse()?)),
            _ => return Err(Usage(format!("{}:{}: expected \"x y\"", path.display(), i + 1))),
        }
    }
    Ok(out)
}

fn print_paths(paths: &[ExactPath]) -> io::Result<()> {
    let mut w = BufWriter::new(io::stdout().lock());
    for p in paths {
        writeln!(w, "{p}")?;
    }
    w.flush()
}

fn run(cmd: Cmd) -> Result<bool, Usage> {
    match cmd {
        Cmd::Embed {
            n,
            p,
            tree,
            seed,
            params,
            delta,
            out,
            graph_out,
            tree_out,
        } => {
            let t = match tree.parse::<TreeFamily>() {
                Ok(family) => gen_random_tree(n, delta, family, RngSeed::new(seed).derive(0))?,
                Err(_) => TreeShape::read_tree(open(Path::new(&tree))?)?,
            };
            let mut sp = ScaleParams::desk(n, delta.max(t.max_degree()));
            if let Some(file) = params {
                sp.apply_kv(&std::fs::read_to_string(&file).map_err(|e| Usage(format!("{}: {e}", file.display())))?)?;
            }
            let trial = embed_spanning_tree(n, p, &t, &sp, RngSeed::new(seed));
            println!("{}", trial.record);
            for note in &trial.record.adjustments {
                eprintln!("note: {note}");
            }
            if let Some(path) = tree_out {
                t.write_tree(create(&path)?)?;
            }
            if let Some(path) = graph_out {
                trial.host.write_edge_list(create(&path)?)?;
            }
            if let (Some(path), Some(e)) = (out, &trial.embedding) {
                e.write_pairs(create(&path)?)?;
            }
            Ok(trial.record.succeeded())
        }
        Cmd::Certify {
            graph,
            d,
            mode,
            budget,
            seed,
        } => {
            let g = Graph::read_edge_list(open(&graph)?)?;
            let cfg = match mode {
                Mode::Exhaustive => CheckConfig::exhaustive(),
                Mode::Sampled => CheckConfig::sampled(budget, RngSeed::new(seed)),
            };
            let report = check_expander(&g, d, &cfg)?;
            println!("holds={} mode={} sets_checked={}", report.holds, report.mode, report.sets_checked);
            if let Some(w) = &report.shrink {
                println!("shrink set {:?} has {} neighbours", w.x, w.neighbors);
            }
            if let Some(w) = &report.gap {
                println!("no edge between {:?} and {:?}", w.x, w.y);
            }
            Ok(report.holds)
        }
        Cmd::Cover {
            graph,
            pairs,
            len,
            directed,
            seed,
        } => {
            let pairs = read_pairs(&pairs)?;
            let cfg = CoverConfig::default();
            let result = if directed {
                let d = DiGraph::read_arc_list(open(&graph)?)?;
                cover_with_paths_directed(&d, &pairs, len, &cfg, RngSeed::new(seed))
            } else {
                let g = Graph::read_edge_list(open(&graph)?)?;
                cover_with_paths(&g, &pairs, len, &cfg, RngSeed::new(seed))
            };
            match result {
                Ok(paths) => {
                    print_paths(&paths)?;
                    Ok(true)
                }
                Err(e) if e.phase == treeweave::absorb::CoverPhase::Input => Err(Usage(e.to_string())),
                Err(e) => {
                    eprintln!("{e}");
                    Ok(false)
                }
            }
        }
        Cmd::Scan { config, out } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Usage(format!("{}: {e}", config.display())))?;
            let cfg = ScanConfig::from_kv(&text)?;
            let cells = threshold_scan(&cfg, create(&out)?)?;
            for c in &cells {
                eprintln!("{}", c.csv_row());
            }
            Ok(true)
        }
        Cmd::Verify { graph, tree, embedding } => {
            let g = Graph::read_edge_list(open(&graph)?)?;
            let t = TreeShape::read_tree(open(&tree)?)?;
            let e = Embedding::read_pairs(open(&embedding)?, t.n(), g.n())?;
            let check = verify_embedding(&g, &t, &e);
            if check.is_valid() {
                println!("valid");
            } else {
                println!(
                    "invalid: unmapped={:?} collisions={:?} broken={:?}",
                    check.unmapped, check.collisions, check.broken
                );
            }
            Ok(check.is_valid())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
