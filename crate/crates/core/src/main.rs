use std::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dnftaut::bounds::density_bound;
use dnftaut::encoder::{build_instance, EncodeOptions};
use dnftaut::oracle::{exists_bruteforce, OracleOptions};
use dnftaut::sat::{solve_embedded, Backend, Budget, SolverConfig, Status};
use dnftaut::search::{exact_k, max_k, Attempt, SearchConfig, SearchResult};
use dnftaut::store::ResultStore;
use dnftaut::table::{reproduce_table, TableKind, TableOptions, Tier};
use dnftaut::{CnfFormula, Dnf, GroupKind, GroupSpec};

type Res<T> = Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(
    name = "dnftaut",
    version,
    about = "Distinct DNF tautologies with bounded cube lengths"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Density upper bound on k, as CSV.
    Bound {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        u: u32,
    },
    /// Largest k with a qualifying DNF.
    Search {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        u: u32,
        #[command(flatten)]
        common: Common,
        /// Append the result to this JSON-lines file and reuse stored answers.
        #[arg(long)]
        store: Option<PathBuf>,
        /// Recompute even when the store has an answer.
        #[arg(long)]
        force: bool,
        /// Print attempts as CSV instead of the human summary.
        #[arg(long)]
        csv: bool,
        /// Print the result as JSON.
        #[arg(long, conflicts_with = "csv")]
        json: bool,
    },
    /// Existence with every cube of length exactly k.
    Exact {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Recompute a result grid and compare it with the reference values.
    Table {
        #[arg(long, default_value = "plain")]
        which: TableKind,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long)]
        u_max: Option<u32>,
        #[arg(long, default_value = "default")]
        tier: Tier,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Check a DNF file against the requirements.
    Verify {
        #[arg(long)]
        dnf: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        u: u32,
        #[arg(long, default_value = "none")]
        group: GroupKind,
    },
    /// Write the CNF instance as DIMACS.
    Encode {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        u: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "none")]
        group: GroupKind,
        #[command(flatten)]
        encoding: EncodingArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Brute-force existence check (n <= 3, or n <= 6 with --best-effort), as JSON.
    Oracle {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        u: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "none")]
        group: GroupKind,
        #[arg(long)]
        best_effort: bool,
    },
    /// Solve a DIMACS file with the embedded solver; prints `s`/`v` lines
    /// and exits 10 (SAT), 20 (UNSAT) or 0 (unknown).
    Solve {
        cnf: PathBuf,
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long, value_enum, default_value_t = HeuristicArg::Vsids)]
        heuristic: HeuristicArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Vsids,
    Lowest,
}

#[derive(Args)]
struct EncodingArgs {
    #[arg(long)]
    no_symmetry_breaking: bool,
    #[arg(long)]
    forbid_subsumed: bool,
    /// Keep symmetry-breaking clauses under a group (restricted search:
    /// refutations are not proofs).
    #[arg(long)]
    symmetry_with_group: bool,
}

impl EncodingArgs {
    fn options(&self) -> EncodeOptions {
        EncodeOptions {
            symmetry_breaking: !self.no_symmetry_breaking,
            forbid_subsumed: self.forbid_subsumed,
            symmetry_with_group: self.symmetry_with_group,
        }
    }
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "none")]
    group: GroupKind,
    /// Seconds per SAT call.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long, conflicts_with = "timeout")]
    unlimited: bool,
    /// External solver command; `{cnf}` is replaced by the file path.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long, value_enum, default_value_t = HeuristicArg::Vsids)]
    heuristic: HeuristicArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    encoding: EncodingArgs,
}

fn solver_config(h: HeuristicArg, seed: u64) -> SolverConfig {
    match h {
        HeuristicArg::Vsids => SolverConfig {
            seed,
            ..SolverConfig::default()
        },
        HeuristicArg::Lowest => SolverConfig {
            seed,
            ..SolverConfig::lowest_index()
        },
    }
}

impl Common {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            backend: match &self.solver {
                Some(cmd) => Backend::External(cmd.clone()),
                None => Backend::Embedded(solver_config(self.heuristic, self.seed)),
            },
            budget: if self.unlimited {
                Budget::unlimited()
            } else {
                Budget::seconds(self.timeout)
            },
            options: self.encoding.options(),
        }
    }
}

fn attempt_line(a: &Attempt) -> String {
    format!(
        "  k={:<2} {:<8} {:>9.3}s  vars={} clauses={} conflicts={}",
        a.k,
        a.status.short(),
        a.seconds,
        a.vars,
        a.clauses,
        a.stats.conflicts
    )
}

fn print_result(r: &SearchResult, reused: bool) {
    let k = match r.k_found {
        Some(k) => k.to_string(),
        None => "undetermined".to_string(),
    };
    println!(
        "n={} u={} group={} k={} bound={} matched_bound={} proven_optimal={}{}",
        r.n,
        r.u,
        r.group,
        k,
        r.k_density_bound,
        r.matched_bound,
        r.proven_optimal,
        if reused { " (stored)" } else { "" }
    );
    for a in r.attempts.values().rev() {
        println!("{}", attempt_line(a));
    }
    if let Some(w) = &r.witness {
        println!("witness ({} cubes):", w.len());
        print!("{}", w.to_text());
    }
}

fn run(cli: Cli) -> Res<ExitCode> {
    match cli.cmd {
        Cmd::Bound { n, u } => {
            let b = density_bound(n, u)?;
            println!("k_max_bound,{}", b.k_max_bound);
            print!("{}", b.to_csv());
        }
        Cmd::Search {
            n,
            u,
            common,
            store,
            force,
            csv,
            json,
        } => {
            let group = GroupSpec::new(common.group, n)?;
            let config = common.config();
            let (r, reused) = match store {
                Some(path) => ResultStore::new(path).max_k_cached(n, u, &group, &config, force)?,
                None => (max_k(n, u, &group, &config)?, false),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else if csv {
                println!("n,u,group,k,status,seconds,vars,clauses,conflicts");
                for a in r.attempts.values() {
                    println!(
                        "{},{},{},{},{},{:.6},{},{},{}",
                        n,
                        u,
                        r.group,
                        a.k,
                        a.status.short(),
                        a.seconds,
                        a.vars,
                        a.clauses,
                        a.stats.conflicts
                    );
                }
            } else {
                print_result(&r, reused);
            }
        }
        Cmd::Exact { n, k, common } => {
            let group = GroupSpec::new(common.group, n)?;
            let (a, w) = exact_k(n, k, &group, &common.config())?;
            println!("n={n} k={k} group={} {}", group.kind, a.status.short());
            println!("{}", attempt_line(&a));
            if let Some(w) = w {
                print!("{}", w.to_text());
            }
        }
        Cmd::Table {
            which,
            n_max,
            u_max,
            tier,
            workers,
            common,
            store,
            force,
            csv,
        } => {
            let store = store.map(ResultStore::new);
            let opts = TableOptions {
                n_max,
                u_max: u_max.unwrap_or(n_max),
                tier,
                workers,
                config: common.config(),
                store: store.as_ref(),
                force,
            };
            let rep = reproduce_table(which, &opts)?;
            if csv {
                print!("{}", rep.to_csv());
            } else {
                print!("{}", rep.render());
                print!("{}", rep.diff_report());
            }
        }
        Cmd::Verify { dnf, k, u, group } => {
            let d: Dnf = std::fs::read_to_string(&dnf)?.parse()?;
            let g = GroupSpec::new(group, d.n())?;
            let report = d.verify(k, u, Some(&g))?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            println!("{}", if report.passed() { "PASS" } else { "FAIL" });
            return Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
        Cmd::Encode {
            n,
            u,
            k,
            group,
            encoding,
            output,
        } => {
            let g = GroupSpec::new(group, n)?;
            let enc = build_instance(n, u, k, &g, encoding.options().for_group(&g))?;
            let text = enc.to_dimacs();
            match output {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
        }
        Cmd::Oracle {
            n,
            u,
            k,
            group,
            best_effort,
        } => {
            let g = GroupSpec::new(group, n)?;
            let r = exists_bruteforce(
                n,
                u,
                k,
                &g,
                OracleOptions {
                    best_effort,
                    prune: true,
                },
            )?;
            println!("{}", serde_json::to_string_pretty(&r)?);
        }
        Cmd::Solve {
            cnf,
            timeout,
            heuristic,
            seed,
        } => {
            let f = CnfFormula::from_dimacs(&std::fs::read_to_string(&cnf)?)?;
            let budget = Budget {
                time: timeout.map(std::time::Duration::from_secs_f64),
                conflicts: None,
            };
            let out = solve_embedded(&f, &budget, &solver_config(heuristic, seed));
            let s = out.stats;
            println!(
                "c decisions {} propagations {} conflicts {} restarts {}",
                s.decisions, s.propagations, s.conflicts, s.restarts
            );
            return Ok(match (out.status, out.model) {
                (Status::Satisfiable, Some(model)) => {
                    println!("s SATISFIABLE");
                    let lits: Vec<String> = model
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| {
                            if b {
                                (i + 1).to_string()
                            } else {
                                format!("-{}", i + 1)
                            }
                        })
                        .collect();
                    println!("v {} 0", lits.join(" "));
                    ExitCode::from(10)
                }
                (Status::Unsatisfiable, _) => {
                    println!("s UNSATISFIABLE");
                    ExitCode::from(20)
                }
                _ => {
                    println!("s UNKNOWN");
                    ExitCode::SUCCESS
                }
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
