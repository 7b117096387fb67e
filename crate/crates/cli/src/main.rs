use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kcommute::analysis::{self, Family, WeightRule};
use kcommute::clifford::{diagonalize_group, is_diagonal, respects_blocks};
use kcommute::grouping::{group_terms, InsertionOrder};
use kcommute::hamiltonian::{self, Hamiltonian, LatticeOrdering};
use kcommute::pauli::{BlockSpec, PauliString};

#[derive(Parser)]
#[command(name = "kcommute", version, about = "Block-wise commuting Pauli grouping studies")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a model Hamiltonian as a term-list file.
    Gen {
        #[arg(value_enum)]
        family: FamilyName,
        #[command(flatten)]
        params: FamilyParams,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Group terms into block-commuting sets.
    Group {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        blocks: BlockArgs,
        #[command(flatten)]
        algo: AlgorithmArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Group at every block size in a range and report group counts and R̂.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Comma-separated block sizes (default: every size from 1 to n).
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["k_min", "k_max"])]
        ks: Option<Vec<usize>>,
        #[arg(long)]
        k_min: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        /// Also synthesize diagonalization circuits and report their cost.
        #[arg(long)]
        circuits: bool,
        #[command(flatten)]
        algo: AlgorithmArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Threshold block size k* as a function of system size.
    Kstar {
        #[arg(long, value_enum)]
        family: FamilyName,
        /// Comma-separated qubit counts.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Instances per size for the random family.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[command(flatten)]
        params: FamilyParams,
        #[command(flatten)]
        output: Output,
    },
    /// Lower bound on gates needed to diagonalize r commuting Paulis on n qubits.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Synthesize and verify the diagonalization circuit for one group.
    Diag {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        blocks: BlockArgs,
        /// Index of the group to diagonalize.
        #[arg(long, default_value_t = 0)]
        group: usize,
        #[command(flatten)]
        algo: AlgorithmArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    BaconShor,
    Tfim,
    HardcoreBoson,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ordering {
    ColumnMajor,
    RowMajor,
}

impl From<Ordering> for LatticeOrdering {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::ColumnMajor => LatticeOrdering::ColumnMajor,
            Ordering::RowMajor => LatticeOrdering::RowMajor,
        }
    }
}

#[derive(Args, Clone)]
struct FamilyParams {
    /// Number of qubits (chains and random Hamiltonians).
    #[arg(long)]
    n: Option<usize>,
    /// Lattice rows (Bacon-Shor).
    #[arg(long)]
    rows: Option<usize>,
    /// Lattice columns (Bacon-Shor).
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long, value_enum, default_value = "column-major")]
    ordering: Ordering,
    /// Ising coupling.
    #[arg(long, default_value_t = 1.0)]
    j: f64,
    /// Transverse field, or on-site energy for the boson chain.
    #[arg(long, default_value_t = 1.0)]
    g: f64,
    /// Hopping amplitude.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Mean term weight for random Hamiltonians: a number, `log` (ln n) or `linear` (n/2).
    #[arg(long, default_value = "2")]
    w: String,
    /// Seed for random Hamiltonians.
    #[arg(long)]
    seed: Option<u64>,
}

impl FamilyParams {
    fn weight_rule(&self) -> Result<WeightRule> {
        Ok(match self.w.as_str() {
            "log" => WeightRule::Log,
            "linear" => WeightRule::Linear,
            w => WeightRule::Constant(w.parse().with_context(|| format!("invalid --w {w:?}"))?),
        })
    }

    fn family(&self, name: FamilyName) -> Result<Family> {
        Ok(match name {
            FamilyName::BaconShor => Family::BaconShor { ordering: self.ordering.into() },
            FamilyName::Tfim => Family::Tfim { coupling: self.j, field: self.g },
            FamilyName::HardcoreBoson => Family::HardcoreBoson { hopping: self.t, site_energy: self.g },
            FamilyName::Random => Family::Random { weight: self.weight_rule()? },
        })
    }

    fn build(&self, name: FamilyName) -> Result<Hamiltonian> {
        let need_n = || self.n.context("--n is required for this family");
        Ok(match name {
            FamilyName::BaconShor => {
                let (rows, cols) = match (self.rows, self.cols, self.n) {
                    (Some(r), Some(c), _) => (r, c),
                    (None, None, Some(n)) => {
                        let side = (n as f64).sqrt().round() as usize;
                        ensure!(side * side == n, "--n {n} is not a square; use --rows and --cols");
                        (side, side)
                    }
                    _ => bail!("bacon-shor needs --rows and --cols (or a square --n)"),
                };
                hamiltonian::bacon_shor(rows, cols, self.ordering.into())?
            }
            FamilyName::Tfim => hamiltonian::tfim(need_n()?, self.j, self.g)?,
            FamilyName::HardcoreBoson => hamiltonian::hardcore_boson_1d(need_n()?, self.t, self.g)?,
            FamilyName::Random => {
                let n = need_n()?;
                let seed = self.seed.context("--seed is required for random Hamiltonians")?;
                let w = self.weight_rule()?.mean_weight(n);
                hamiltonian::random_hamiltonian(n, w, seed)?
            }
        })
    }
}

#[derive(Args)]
struct Source {
    /// Term-list file to read.
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    input: Option<PathBuf>,
    /// Generate the Hamiltonian instead of reading it.
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    #[command(flatten)]
    params: FamilyParams,
}

impl Source {
    fn load(&self) -> Result<Hamiltonian> {
        match (&self.input, self.family) {
            (Some(path), None) => hamiltonian::load_hamiltonian(path)
                .with_context(|| format!("reading {}", path.display())),
            (None, Some(name)) => self.params.build(name),
            _ => bail!("give exactly one of --input and --family"),
        }
    }
}

#[derive(Args)]
struct BlockArgs {
    /// Uniform block size.
    #[arg(long, conflicts_with = "blocks", required_unless_present = "blocks")]
    k: Option<usize>,
    /// Comma-separated block sizes, e.g. `2,3,1`.
    #[arg(long, value_delimiter = ',')]
    blocks: Option<Vec<usize>>,
}

impl BlockArgs {
    fn spec(&self, n: usize) -> Result<BlockSpec> {
        let spec = match (&self.blocks, self.k) {
            (Some(sizes), _) => BlockSpec::new(sizes.clone())?,
            (None, Some(k)) => BlockSpec::uniform(n, k)?,
            (None, None) => bail!("give --k or --blocks"),
        };
        ensure!(
            spec.n_qubits() == n,
            "blocks cover {} qubits but the Hamiltonian has {n}",
            spec.n_qubits()
        );
        Ok(spec)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Sorted,
    Random,
}

#[derive(Args)]
struct AlgorithmArgs {
    #[arg(long, value_enum, default_value = "sorted")]
    algorithm: Algorithm,
    /// Seed for random insertion.
    #[arg(long = "insertion-seed")]
    insertion_seed: Option<u64>,
}

impl AlgorithmArgs {
    fn order(&self) -> Result<InsertionOrder> {
        Ok(match self.algorithm {
            Algorithm::Sorted => InsertionOrder::Sorted,
            Algorithm::Random => InsertionOrder::Random {
                seed: self.insertion_seed.context("--insertion-seed is required for random insertion")?,
            },
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

impl Output {
    fn write<T: Serialize>(&self, rows: &[T]) -> Result<()> {
        let mut w = open_out(&self.out)?;
        match self.format {
            Format::Csv => {
                let mut csv = csv::Writer::from_writer(w);
                for row in rows {
                    csv.serialize(row)?;
                }
                csv.flush()?;
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, rows)?;
                writeln!(w)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct GroupRow {
    group: usize,
    term: usize,
    coefficient: f64,
    pauli: String,
}

#[derive(Serialize)]
struct GroupReport {
    block_sizes: Vec<usize>,
    num_groups: usize,
    r_hat: f64,
    groups: Vec<Vec<usize>>,
    terms: Vec<GroupRow>,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { family, params, out } => {
            let h = params.build(family)?;
            let text = hamiltonian::render_hamiltonian(&h);
            open_out(&out)?.write_all(text.as_bytes())?;
            eprintln!("{} qubits, {} terms", h.n_qubits(), h.len());
        }
        Command::Group { source, blocks, algo, output } => {
            let h = source.load()?;
            let spec = blocks.spec(h.n_qubits())?;
            let g = group_terms(&h, &spec, algo.order()?)?;
            let terms: Vec<GroupRow> = g
                .groups()
                .iter()
                .enumerate()
                .flat_map(|(gi, members)| {
                    let h = &h;
                    members.iter().map(move |&t| GroupRow {
                        group: gi,
                        term: t,
                        coefficient: h.terms()[t].coefficient(),
                        pauli: h.terms()[t].pauli().to_string(),
                    })
                })
                .collect();
            eprintln!("{} groups, R̂ = {}", g.num_groups(), g.r_hat());
            match output.format {
                Format::Csv => output.write(&terms)?,
                Format::Json => {
                    let export = g.export();
                    let report = GroupReport {
                        block_sizes: export.block_sizes,
                        num_groups: export.num_groups,
                        r_hat: export.r_hat,
                        groups: export.groups,
                        terms,
                    };
                    let mut w = open_out(&output.out)?;
                    serde_json::to_writer_pretty(&mut w, &report)?;
                    writeln!(w)?;
                }
            }
        }
        Command::Sweep { source, ks, k_min, k_max, circuits, algo, output } => {
            let h = source.load()?;
            let n = h.n_qubits();
            let ks = ks.unwrap_or_else(|| (k_min.unwrap_or(1)..=k_max.unwrap_or(n)).collect());
            let rows = analysis::k_sweep(&h, &ks, algo.order()?, circuits)?;
            let k_star = analysis::find_k_star(&rows, analysis::DEFAULT_REL_TOL)?;
            eprintln!("k* (R̂) = {}, k* (groups) = {}", k_star.k_star_rhat, k_star.k_star_groups);
            output.write(&rows)?;
        }
        Command::Kstar { family, sizes, samples, params, output } => {
            let fam = params.family(family)?;
            let seed = match (fam.is_randomized(), params.seed) {
                (true, None) => bail!("--seed is required for the random family"),
                (_, s) => s.unwrap_or(0),
            };
            let rows = analysis::k_star_scaling(&fam, &sizes, samples, seed)?;
            output.write(&rows)?;
        }
        Command::Bound { n, r, output } => {
            let b = analysis::diag_gate_lower_bound(n, r)?;
            eprintln!("gates >= {:.6} (at least {} gates, depth >= {})", b.gates, b.min_gates, b.min_depth);
            output.write(&[b])?;
        }
        Command::Diag { source, blocks, group, algo, out } => {
            let h = source.load()?;
            let spec = blocks.spec(h.n_qubits())?;
            let g = group_terms(&h, &spec, algo.order()?)?;
            ensure!(
                group < g.num_groups(),
                "group {group} out of range: {} groups",
                g.num_groups()
            );
            let members: Vec<PauliString> = g.group_paulis(&h, group).into_iter().cloned().collect();
            let c = diagonalize_group(&members, &spec)?;
            // independent check through the tableau before anything is written
            let tableau = c.tableau();
            ensure!(tableau.is_symplectic(), "circuit tableau is not symplectic");
            ensure!(respects_blocks(&c, &spec), "circuit crosses a block boundary");
            for m in &members {
                let image = tableau.apply(m)?;
                ensure!(is_diagonal(&image), "verification failed: {m} maps to {image}");
            }
            open_out(&out)?.write_all(c.to_text().as_bytes())?;
            eprintln!(
                "group {group}: {} members, {} gates, depth {}, verified",
                members.len(),
                c.gate_count(),
                c.depth()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
