use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hfree::cliques::{count_cliques, second_moment_ratio};
use hfree::coloring::{chromatic_number, is_q_colorable, Budget, Coloring, Constraints};
use hfree::construct::{
    height_for_epsilon, sparse_k_chromatic, supercomplex, tower, tower_complex, verify_lemma, Lemma,
};
use hfree::density::{m2, M2Method};
use hfree::ensemble::{concentration_report, sample_gnp, EnsembleConfig, PSpec};
use hfree::extremal::{
    certify_partite, deletion_heuristic, exact_max_hfree_cliques, partite_heuristic, ExactBudget,
};
use hfree::graph::{read_edge_list, write_edge_list, write_labels};
use hfree::harness::{run_sweep, sweep_csv, witness_trend, SweepConfig, SweepContext, TrendRow};
use hfree::{Error, ExactRational, Graph, Result};

#[derive(Parser)]
#[command(name = "hfree", version, about = "Clique counts in H-free subgraphs of random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tower,
    Complex,
    Supercomplex,
    Gke,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Partite,
    Delete,
}

#[derive(Subcommand)]
enum Command {
    /// 2-density of a graph.
    M2 {
        #[arg(long = "in")]
        input: PathBuf,
        /// Print the maximizing vertex set.
        #[arg(long)]
        witness: bool,
        /// Use the parametric min-cut search (required above 30 vertices).
        #[arg(long)]
        pruned: bool,
    },
    /// Exhaustive potential sweep on a built tower, complex or supercomplex.
    VerifyLemmas {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        /// cl1 tower, cl2 complex, cl3 supercomplex avoiding the base,
        /// cl4 supercomplex sets of size at most t+1.
        #[arg(long)]
        lemma: String,
    },
    /// Build a construction; writes FILE and FILE.labels.
    Construct {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        k: usize,
        /// Tower height; defaults to ceil(k³/ε) when --epsilon is given.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Chromatic number and a witness colouring.
    Chi {
        #[arg(long = "in")]
        input: PathBuf,
        /// Vertices that must share a colour, as `u,w`.
        #[arg(long)]
        equal: Vec<String>,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        budget: Option<f64>,
    },
    /// K_m count and, with --stats, per-edge statistics.
    Cliques {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        stats: bool,
    },
    /// One G(n,p) sample in edge-list format.
    Sample {
        #[arg(long)]
        n: usize,
        /// `P/Q`, a decimal, or `n^-A`.
        #[arg(long, conflicts_with = "p_expr", required_unless_present = "p_expr")]
        p: Option<String>,
        /// Exponent `a/b` for p = n^(-a/b).
        #[arg(long)]
        p_expr: Option<String>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Clique-count concentration over independent samples, as one CSV line.
    Concentrate {
        #[arg(long)]
        n: usize,
        /// `P/Q`, a decimal, or `n^-A`.
        #[arg(long)]
        p: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Print the column names first.
        #[arg(long)]
        header: bool,
    },
    /// H-free K_m maximization on a host graph.
    Extremal {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        forbidden: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Parts plus one for the partite method; defaults to χ(H).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap on enumerated copies (delete) or search nodes (exact).
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Run a sweep config and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Fill the wall_ms column (makes output run-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// m₂ and witness size of the sparse k-chromatic graph for several t.
    Trend {
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        t: Vec<usize>,
    },
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
    read_edge_list(&text)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))
}

fn joined<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn budget(seconds: Option<f64>) -> Result<Budget> {
    match seconds {
        Some(s) if !(s.is_finite() && s > 0.0) => Err(Error::Domain(format!("budget must be positive, got {s}"))),
        Some(s) => Ok(Budget::seconds(s)),
        None => Ok(Budget::UNLIMITED),
    }
}

fn constrained_chromatic(g: &Graph, constraints: &Constraints, b: Budget) -> Result<(usize, Coloring)> {
    for q in 1..=g.vertex_count().max(1) {
        if let Some(c) = is_q_colorable(g, q as u32, constraints, b)? {
            return Ok((q, c));
        }
    }
    Err(Error::Domain("no proper colouring satisfies the equalities".into()))
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::M2 { input, witness, pruned } => {
            let g = read_graph(&input)?;
            let r = m2(&g, pruned)?;
            let method = match r.method {
                M2Method::Exhaustive => "exhaustive",
                M2Method::Parametric => "parametric",
            };
            println!("m2={}", r.value);
            println!("method={method} examined={}", r.subsets_examined);
            if witness {
                println!("witness={}", joined(r.witness.iter()));
            }
        }
        Command::VerifyLemmas { k, t, lemma } => {
            let lemma = Lemma::from_name(&lemma)?;
            let out = verify_lemma(lemma, k, t)?;
            println!("lemma={} k={k} t={t} examined={} violations={}", lemma.name(), out.examined, out.violations);
            if let Some(v) = &out.worst {
                println!("worst={{{}}} potential={} threshold={}", joined(v.set.iter()), v.potential, v.threshold);
            }
            return Ok(if out.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Construct { kind, k, t, epsilon, out } => {
            let height = epsilon.as_deref().map(|e| height_for_epsilon(k, &e.parse::<ExactRational>()?)).transpose()?;
            let t = match (t, height) {
                (Some(t), Some(h)) if t < h => {
                    eprintln!("warning: t = {t} is below ceil(k^3/epsilon) = {h}; the m2 bound for epsilon is not guaranteed");
                    t
                }
                (Some(t), _) => t,
                (None, Some(h)) => h,
                (None, None) => return Err(Error::Domain("give --t or --epsilon".into())),
            };
            let g = match kind {
                Kind::Tower => tower(k, t)?,
                Kind::Complex => tower_complex(k, t)?,
                Kind::Supercomplex => supercomplex(k, t)?,
                Kind::Gke => sparse_k_chromatic(k, t)?,
            };
            write_file(&out, &write_edge_list(&g))?;
            let mut labels_path = out.into_os_string();
            labels_path.push(".labels");
            write_file(Path::new(&labels_path), &write_labels(g.labels().unwrap_or_default()))?;
            println!("vertices={} edges={} t={t}", g.vertex_count(), g.edge_count());
        }
        Command::Chi { input, equal, budget: seconds } => {
            let g = read_graph(&input)?;
            let b = budget(seconds)?;
            let mut constraints = Constraints::default();
            for pair in &equal {
                let parsed = pair
                    .split_once(',')
                    .and_then(|(u, w)| Some((u.trim().parse::<usize>().ok()?, w.trim().parse::<usize>().ok()?)));
                let Some((u, w)) = parsed else {
                    return Err(Error::Domain(format!("--equal expects u,w, got {pair:?}")));
                };
                for v in [u, w] {
                    if v >= g.vertex_count() {
                        return Err(Error::VertexOutOfRange { vertex: v, n: g.vertex_count() });
                    }
                }
                constraints.equal.push((u, w));
            }
            let (chi, coloring) =
                if equal.is_empty() { chromatic_number(&g, b)? } else { constrained_chromatic(&g, &constraints, b)? };
            println!("chi={chi}");
            println!("coloring={}", joined(coloring.colors.iter()));
        }
        Command::Cliques { input, m, stats } => {
            let g = read_graph(&input)?;
            let s = count_cliques(&g, m)?;
            println!("total={}", s.total);
            if stats {
                let mut histogram = std::collections::BTreeMap::new();
                *histogram.entry(0u64).or_insert(0usize) += g.edge_count() - s.per_edge.len();
                for &c in s.per_edge.values() {
                    *histogram.entry(c).or_insert(0) += 1;
                }
                for (c, edges) in histogram.iter().filter(|(_, &e)| e > 0) {
                    println!("per_edge copies={c} edges={edges}");
                }
                println!("sharing_pairs={}", s.sharing_pairs);
                println!("involved={}", s.involved);
                match second_moment_ratio(&g, m) {
                    Ok(r) => println!("second_moment_ratio={r}"),
                    Err(_) => println!("second_moment_ratio="),
                }
            }
        }
        Command::Sample { n, p, p_expr, seed, out } => {
            let spec = match (p, p_expr) {
                (Some(p), None) => p.parse::<PSpec>()?,
                (None, Some(a)) => PSpec::Exponent(a.parse()?),
                _ => return Err(Error::Domain("give exactly one of --p and --p-expr".into())),
            };
            let g = sample_gnp(n, &spec.resolve(n)?, seed)?;
            let text = write_edge_list(&g);
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Concentrate { n, p, m, trials, seed, header } => {
            let p = p.parse::<PSpec>()?.resolve(n)?;
            let rep = concentration_report(&EnsembleConfig { n, p, seed, trials }, m)?;
            if header {
                println!("{}", hfree::ensemble::ConcentrationReport::CSV_HEADER);
            }
            println!("{}", rep.csv_row());
        }
        Command::Extremal { input, forbidden, m, method, k, restarts, seed, cap } => {
            let host = read_graph(&input)?;
            let h = read_graph(&forbidden)?;
            let result = match method {
                MethodArg::Exact => {
                    let b = cap.map_or_else(ExactBudget::default, |c| ExactBudget { max_nodes: c });
                    exact_max_hfree_cliques(&host, &h, m, b)?
                }
                MethodArg::Delete => deletion_heuristic(&host, &h, m, cap.unwrap_or(1_000_000) as usize)?,
                MethodArg::Partite => {
                    let k = match k {
                        Some(k) => k,
                        None => chromatic_number(&h, Budget::seconds(60.0))?.0,
                    };
                    let mut r = partite_heuristic(&host, k, m, restarts, seed)?;
                    certify_partite(&mut r, &h, k, Budget::seconds(60.0))?;
                    r
                }
            };
            println!("{}", result.record());
        }
        Command::Sweep { config, out, workers, timing } => {
            let cfg = SweepConfig::load(&config)?;
            let ctx = SweepContext::load(&cfg)?;
            let rows = match workers {
                Some(w) => rayon::ThreadPoolBuilder::new()
                    .num_threads(w.max(1))
                    .build()
                    .map_err(|e| Error::Domain(e.to_string()))?
                    .install(|| run_sweep(&cfg, &ctx, timing))?,
                None => run_sweep(&cfg, &ctx, timing)?,
            };
            write_file(&out, &sweep_csv(&rows))?;
            let failed = rows.iter().filter(|r| r.status.starts_with("error")).count();
            println!("rows={} failed={failed}", rows.len());
        }
        Command::Trend { k, t } => {
            println!("{}", TrendRow::CSV_HEADER);
            for row in witness_trend(k, &t)? {
                println!("{}", row.csv());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
