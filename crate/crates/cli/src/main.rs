//! Command-line surface: solve, classify, fgpp, gridrank, contract,
//! generate, oracle-compare, and corpus management.
//!
//! Exit codes: 0 = SAT (or success), 1 = UNSAT (or disagreement /
//! regression), 2 = error. Diagnostics go to standard error as JSON lines.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use udcsp_core::definability;
use udcsp_core::generators::{self, Digraph};
use udcsp_core::model::{ConstraintLanguage, Instance, MapFamilyKind, Relation};
use udcsp_core::patterns;
use udcsp_core::random as sampling;
use udcsp_core::solvers::{self, MinMax};
use udcsp_core::width::{self, ContractionSequence, RankMeasure};
use udcsp_core::{bits::BitMatrix, Budget};

#[derive(Parser)]
#[command(name = "udcsp", about = "Workbench for unbounded-domain CSPs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Auto,
    Oracle,
    Minmax,
    Median,
    Onehot2sat,
    Onehotfpt,
    Twinwidth,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Mo,
    MoAnti,
    All,
    Onehot,
    Id,
}

impl From<Family> for MapFamilyKind {
    fn from(f: Family) -> MapFamilyKind {
        match f {
            Family::Mo => MapFamilyKind::Monotone,
            Family::MoAnti => MapFamilyKind::MonotoneAndAnti,
            Family::All => MapFamilyKind::All,
            Family::Onehot => MapFamilyKind::OneHot,
            Family::Id => MapFamilyKind::Id,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file; exit 0 = SAT, 1 = UNSAT, 2 = error.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        algo: Algo,
        /// Contraction sequence JSON for --algo twinwidth.
        #[arg(long)]
        seq: Option<PathBuf>,
    },
    /// Classify a language file for every map family.
    Classify { file: PathBuf },
    /// Decide fgpp-definability of a target relation over a language.
    Fgpp {
        #[arg(long)]
        language: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum)]
        family: Family,
    },
    /// Grid rank of a 0/1 matrix file.
    Gridrank {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        kmax: usize,
        /// Use the distinct-rows zone measure instead of GF(2) rank.
        #[arg(long)]
        distinct_rows: bool,
    },
    /// Greedy contraction sequence of an instance's assignment graph.
    Contract { file: PathBuf },
    /// Emit a generated instance on standard output.
    Generate {
        #[command(subcommand)]
        what: GenerateCmd,
    },
    /// Solve with the oracle and a chosen solver; exit 1 on disagreement.
    OracleCompare {
        file: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
    },
    /// Run or update the seeded regression corpus.
    Corpus {
        #[arg(value_enum)]
        action: CorpusAction,
        #[arg(long, default_value = "corpus.json")]
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CorpusAction {
    Run,
    Update,
}

#[derive(Args)]
struct SeedArg {
    /// RNG seed; all generator randomness is reproducible from it.
    #[arg(long)]
    seed: u64,
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// Multicoloured-clique encoding of a random graph.
    Clique {
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 6)]
        vertices: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
    },
    /// Exact 3-hitting-set encoding of random 3-element sets.
    Exact3hs {
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 3)]
        sets: usize,
        #[arg(long, default_value_t = 5)]
        elements: usize,
    },
    /// NAE-Integer-3-SAT instance with random clauses.
    Nae {
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        clauses: usize,
    },
    /// st-min-cut encoding of a random DAG.
    Mincut {
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 10)]
        arcs: usize,
    },
    /// Permutation gadget over R3.
    Permutation {
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        n: usize,
        /// Use the Even_4 encoding instead of R3.
        #[arg(long)]
        even4: bool,
    },
    /// Sidon set from the quadratic construction.
    Sidon {
        #[arg(long)]
        n: usize,
    },
    /// Diamond relation and defining formula.
    Diamond {
        #[arg(long)]
        n: usize,
    },
    /// Half-graph relation and defining formula.
    Halfgraph {
        #[arg(long)]
        n: usize,
    },
}

fn diag(msg: &str) {
    eprintln!("{}", json!({ "error": msg }));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            diag(&e.to_string());
            ExitCode::from(2)
        }
    }
}

fn load_instance(path: &PathBuf) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Language files reuse the instance schema's relations block:
/// {"relations": {name: {"domain": d, "arity": r, "tuples": [..]}}}.
fn load_language(path: &PathBuf) -> anyhow::Result<ConstraintLanguage> {
    #[derive(serde::Deserialize)]
    struct RelationJson {
        domain: usize,
        arity: usize,
        tuples: Vec<Vec<u16>>,
    }
    #[derive(serde::Deserialize)]
    struct LangJson {
        relations: std::collections::BTreeMap<String, RelationJson>,
    }
    let text = fs::read_to_string(path)?;
    let raw: LangJson = serde_json::from_str(&text)?;
    let mut lang = ConstraintLanguage::default();
    for (name, r) in raw.relations {
        lang.insert(Relation::new(name, r.domain, r.arity, r.tuples)?)?;
    }
    Ok(lang)
}

fn run_solver(
    inst: &Instance,
    algo: Algo,
    seq: Option<&ContractionSequence>,
    budget: &Budget,
) -> anyhow::Result<solvers::SolveResult> {
    Ok(match algo {
        Algo::Auto => solvers::solve_auto(inst, budget)?,
        Algo::Oracle => solvers::solve_bruteforce(inst, budget)?,
        Algo::Minmax => solvers::solve_minmax(inst, MinMax::Min, budget)?,
        Algo::Median => solvers::solve_sac_median(inst, budget)?,
        Algo::Onehot2sat => solvers::solve_onehot_2sat(inst, budget)?,
        Algo::Onehotfpt => solvers::solve_onehot_fpt(inst, budget)?,
        Algo::Twinwidth => {
            let owned;
            let seq = match seq {
                Some(s) => s,
                None => {
                    let g = width::assignment_graph(inst)?;
                    owned = width::greedy_contraction_sequence(&g).0;
                    &owned
                }
            };
            solvers::solve_twinwidth_dp(inst, seq, budget)?
        }
    })
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let budget = Budget::from_env();
    match cli.command {
        Command::Solve { file, algo, seq } => {
            let inst = load_instance(&file)?;
            let seq = match seq {
                Some(p) => Some(serde_json::from_str(&fs::read_to_string(p)?)?),
                None => None,
            };
            let result = run_solver(&inst, algo, seq.as_ref(), &budget)?;
            println!("{}", serde_json::to_string_pretty(&result)?);
            Ok(if result.is_sat() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Classify { file } => {
            let lang = load_language(&file)?;
            let report = patterns::classify_language(&lang, &budget)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Fgpp {
            language,
            target,
            family,
        } => {
            let lang = load_language(&language)?;
            let tgt_lang = load_language(&target)?;
            let targets = tgt_lang.relations();
            if targets.len() != 1 {
                anyhow::bail!("target file must contain exactly one relation");
            }
            match definability::fgpp_definable(&lang, family.into(), &targets[0], &budget)? {
                Some(formula) => {
                    println!("{}", serde_json::to_string_pretty(&formula)?);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("undefinable");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Gridrank {
            file,
            kmax,
            distinct_rows,
        } => {
            let m = BitMatrix::parse_text(&fs::read_to_string(file)?)?;
            let measure = if distinct_rows {
                RankMeasure::DistinctRowsOrCols
            } else {
                RankMeasure::Gf2Rank
            };
            let k = width::grid_rank_with(&m, kmax, measure, &budget)?;
            println!("{k}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Contract { file } => {
            let inst = load_instance(&file)?;
            let g = width::assignment_graph(&inst)?;
            let (seq, w) = width::greedy_contraction_sequence(&g);
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "width": w, "sequence": seq }))?
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Generate { what } => {
            let (value, provenance) = generate(what, &budget)?;
            let mut out = value;
            if let Some(obj) = out.as_object_mut() {
                obj.insert("provenance".into(), provenance);
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCompare { file, algo } => {
            let inst = load_instance(&file)?;
            let oracle = solvers::solve_bruteforce(&inst, &budget)?;
            let other = run_solver(&inst, algo, None, &budget)?;
            let agree = oracle.is_sat() == other.is_sat();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "oracle": oracle.status,
                    "solver": other.solver,
                    "status": other.status,
                    "agree": agree,
                }))?
            );
            Ok(if agree {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Corpus { action, file } => corpus(action, &file, &budget),
    }
}

fn generate(cmd: GenerateCmd, budget: &Budget) -> anyhow::Result<(serde_json::Value, serde_json::Value)> {
    Ok(match cmd {
        GenerateCmd::Clique {
            seed,
            k,
            vertices,
            density,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.seed);
            use rand::Rng;
            let coloring: Vec<usize> = (0..vertices).map(|v| v % k).collect();
            let arcs: Vec<(usize, usize)> = (0..vertices)
                .flat_map(|u| (u + 1..vertices).map(move |v| (u, v)))
                .filter(|&(u, v)| coloring[u] != coloring[v])
                .filter(|_| rng.gen_bool(density))
                .collect();
            let g = Digraph::new(vertices, arcs)?;
            generators::verify_multicoloured_clique(&g, k, &coloring, budget)?;
            let inst = generators::gen_multicoloured_clique(&g, k, &coloring)?;
            (
                serde_json::to_value(&inst)?,
                json!({ "reduction": "multicoloured-clique", "seed": seed.seed, "k": k }),
            )
        }
        GenerateCmd::Exact3hs {
            seed,
            sets,
            elements,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.seed);
            use rand::seq::SliceRandom;
            let universe: Vec<usize> = (0..elements.max(3)).collect();
            let sets: Vec<Vec<usize>> = (0..sets)
                .map(|_| {
                    let mut u = universe.clone();
                    u.shuffle(&mut rng);
                    u.truncate(3);
                    u.sort_unstable();
                    u
                })
                .collect();
            generators::verify_exact_3hs(&sets, budget)?;
            let inst = generators::gen_exact_3hs(&sets)?;
            (
                serde_json::to_value(&inst)?,
                json!({ "reduction": "exact-3-hitting-set", "seed": seed.seed, "sets": sets }),
            )
        }
        GenerateCmd::Nae {
            seed,
            n,
            k,
            clauses,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.seed);
            use rand::Rng;
            let clauses: Vec<generators::NaeClause> = (0..clauses)
                .map(|_| {
                    [
                        (rng.gen_range(0..k), rng.gen_range(0..n)),
                        (rng.gen_range(0..k), rng.gen_range(0..n)),
                        (rng.gen_range(0..k), rng.gen_range(0..n)),
                    ]
                })
                .collect();
            generators::verify_nae(&clauses, n, k, budget)?;
            let inst = generators::gen_nae(&clauses, n, k)?;
            (
                serde_json::to_value(&inst)?,
                json!({ "reduction": "nae-integer-3-sat", "seed": seed.seed }),
            )
        }
        GenerateCmd::Mincut { seed, arcs } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.seed);
            let g = sampling::random_dag(&mut rng, 7, arcs);
            generators::verify_mincut(&g, budget)?;
            let inst = generators::gen_mincut(&g, &[])?;
            (
                serde_json::to_value(&inst)?,
                json!({
                    "reduction": "st-min-cut",
                    "seed": seed.seed,
                    "arcs": g.arcs,
                    "s": g.s,
                    "t": g.t,
                }),
            )
        }
        GenerateCmd::Permutation { seed, n, even4 } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.seed);
            use rand::seq::SliceRandom;
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let inst = if even4 {
                generators::gen_even4_permutation(&perm)?
            } else {
                generators::gen_permutation_via_r3(&perm)?.1
            };
            (
                serde_json::to_value(&inst)?,
                json!({
                    "reduction": if even4 { "even4-permutation" } else { "r3-permutation" },
                    "seed": seed.seed,
                    "permutation": perm,
                }),
            )
        }
        GenerateCmd::Sidon { n } => {
            let set = generators::sidon_set(n)?;
            (
                json!({ "sidon": set }),
                json!({ "reduction": "sidon-quadratic", "n": n, "prime": generators::sidon_prime(n) }),
            )
        }
        GenerateCmd::Diamond { n } => {
            let (rel, formula) = generators::gen_diamond(n)?;
            generators::verify_diamond(n)?;
            (
                json!({
                    "relation": { "domain": rel.domain_size(), "arity": rel.arity(), "tuples": rel.tuples() },
                    "formula": formula,
                }),
                json!({ "reduction": "diamond", "n": n }),
            )
        }
        GenerateCmd::Halfgraph { n } => {
            let (rel, formula) = generators::gen_halfgraph(n)?;
            generators::verify_halfgraph(n)?;
            (
                json!({
                    "relation": { "domain": rel.domain_size(), "arity": rel.arity(), "tuples": rel.tuples() },
                    "formula": formula,
                }),
                json!({ "reduction": "half-graph", "n": n }),
            )
        }
    })
}

/// Seeded regression metrics. `run` recomputes and fails on any value
/// exceeding its pin; `update` rewrites the file.
fn corpus(action: CorpusAction, file: &PathBuf, budget: &Budget) -> anyhow::Result<ExitCode> {
    let metrics = compute_corpus_metrics(budget)?;
    match action {
        CorpusAction::Update => {
            fs::write(file, serde_json::to_string_pretty(&metrics)?)?;
            println!("corpus updated: {}", file.display());
            Ok(ExitCode::SUCCESS)
        }
        CorpusAction::Run => {
            let pinned: serde_json::Value = serde_json::from_str(&fs::read_to_string(file)?)?;
            let mut ok = true;
            for (key, value) in metrics.as_object().unwrap() {
                let current = value.as_u64().unwrap();
                let pin = pinned.get(key).and_then(|v| v.as_u64());
                match pin {
                    Some(p) if current <= p => {
                        println!("PASS {key}: {current} <= pinned {p}");
                    }
                    Some(p) => {
                        println!("FAIL {key}: {current} > pinned {p}");
                        ok = false;
                    }
                    None => {
                        println!("FAIL {key}: missing from corpus file");
                        ok = false;
                    }
                }
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn compute_corpus_metrics(budget: &Budget) -> anyhow::Result<serde_json::Value> {
    let (ra_max, width_max) = sampling::corpus_metrics(budget)?;
    Ok(json!({
        "ra_projection_gridrank_max": ra_max,
        "impl_greedy_width_max": width_max,
    }))
}
