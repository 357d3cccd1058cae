//! Command-line front end: instance generation, solving, structural
//! analysis, audits, forcing diagnostics, threshold probes, and bundled
//! reproduction recipes.

use clap::{Parser, Subcommand};
use csplab::csp::{read_instance, write_instance, Flavor};
use csplab::models::parse_model;
use csplab::sampler::{sample_hat, sample_plain, trial_rng, GenSpec};
use csplab::solver::{solve, SolveResult, DEFAULT_BUDGET};
use csplab::structure::{classify, components, Classification};
use csplab::{audit, forcing, probe, Error};
use std::collections::HashMap;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "csplab", version, about = "random-CSP laboratory")]
struct Cli {
    /// flat key=value config file with [model] [grid] [run] sections;
    /// command-line flags override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// cap on worker threads
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample one instance and write it in CSPINST v1 form
    Gen {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        flavor: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        trial: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a CSPINST v1 file exactly
    Solve {
        file: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Component census and classification of a CSPINST v1 file
    Analyze {
        file: PathBuf,
        /// write a DOT rendering of the variable/edge incidence graph
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decide tree/unicyclic satisfiability over a model's support
    Audit {
        #[arg(long)]
        model: Option<String>,
        /// bound the witness size instead of deciding over all sizes
        #[arg(long)]
        max_vars: Option<usize>,
        /// where to write a counterexample instance, if found
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forcing digraph, percolation verdicts, and |F| samples
    Forcing {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        c: Option<f64>,
        /// comma-separated list of n values
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        zeta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV of per-trial |F_{delta,gamma}| samples
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// P_sat grid estimation with Wilson intervals
    Probe {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        flavor: Option<String>,
        /// comma-separated list of n values
        #[arg(long)]
        n: Option<String>,
        /// c grid: comma list or lo:hi:step
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary_out: Option<PathBuf>,
    },
    /// Run a bundled experiment end-to-end
    Repro {
        /// ed3-coarse | dkt-sharp | s3-fact9 | homcheck-lemma2 | hat-duplicates
        name: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Flat `key = value` config with `[model] [grid] [run]` sections.
struct Config {
    values: HashMap<String, String>,
}

impl Config {
    fn load(path: Option<&PathBuf>) -> Result<Config, Error> {
        let mut values = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)?;
            let mut section = String::new();
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                if line.starts_with('[') && line.ends_with(']') {
                    section = line[1..line.len() - 1].trim().to_string();
                    if !["model", "grid", "run"].contains(&section.as_str()) {
                        return Err(Error::parse(format!(
                            "unknown config section [{section}] (line {})",
                            lineno + 1
                        )));
                    }
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Error::parse(format!("malformed config line {}: {line}", lineno + 1))
                })?;
                values.insert(format!("{section}.{}", k.trim()), v.trim().to_string());
            }
        }
        Ok(Config { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(format!("config key {key}: bad value {s:?}"))),
        }
    }
}

fn env_seed() -> Option<u64> {
    std::env::var("CSPLAB_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
}

fn parse_flavor(s: &str) -> Result<Flavor, Error> {
    match s {
        "plain" => Ok(Flavor::Plain),
        "hat" => Ok(Flavor::Hat),
        other => Err(Error::input(format!("unknown flavor {other:?}"))),
    }
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::parse(format!("bad n value {x:?}")))
        })
        .collect()
}

fn parse_c_grid(s: &str) -> Result<Vec<f64>, Error> {
    let bad = |x: &str| Error::parse(format!("bad c value {x:?}"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::parse(format!(
                "c range must be lo:hi:step, got {s:?}"
            )));
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad(parts[0]))?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad(parts[1]))?;
        let step: f64 = parts[2].trim().parse().map_err(|_| bad(parts[2]))?;
        if !(step > 0.0 && hi >= lo) {
            return Err(Error::input("c range needs hi >= lo and step > 0"));
        }
        let mut out = Vec::new();
        let mut i = 0u64;
        loop {
            let c = lo + i as f64 * step;
            if c > hi + 1e-9 {
                break;
            }
            out.push(c);
            i += 1;
        }
        Ok(out)
    } else {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad(x)))
            .collect()
    }
}

fn write_or_print(path: Option<&PathBuf>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn echo(kvs: &[(&str, String)]) -> String {
    let mut s = String::new();
    for (k, v) in kvs {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::input(format!("--jobs: {e}")))?;
    }
    let cfg = Config::load(cli.config.as_ref())?;
    match cli.cmd {
        Cmd::Gen {
            model,
            n,
            c,
            flavor,
            seed,
            trial,
            out,
        } => {
            let model = model
                .or_else(|| cfg.get("model.model").map(String::from))
                .ok_or_else(|| Error::input("missing --model (config key model.model)"))?;
            let dist = parse_model(&model)?;
            let n = n
                .or(cfg.parsed("grid.n")?)
                .ok_or_else(|| Error::input("missing --n (config key grid.n)"))?;
            let c = c
                .or(cfg.parsed("grid.c")?)
                .ok_or_else(|| Error::input("missing --c (config key grid.c)"))?;
            let flavor = match flavor.or_else(|| cfg.get("model.flavor").map(String::from)) {
                Some(f) => parse_flavor(&f)?,
                None => Flavor::Hat,
            };
            let seed = seed
                .or(cfg.parsed("run.seed")?)
                .or_else(env_seed)
                .unwrap_or(0);
            let spec = GenSpec {
                dist,
                n,
                c,
                flavor,
                seed,
                trial_index: trial,
            };
            let inst = match flavor {
                Flavor::Plain => sample_plain(&spec)?,
                Flavor::Hat => sample_hat(&spec)?,
            };
            let header = echo(&[
                ("model", model.clone()),
                ("n", n.to_string()),
                ("c", c.to_string()),
                ("flavor", format!("{flavor:?}").to_lowercase()),
                ("seed", seed.to_string()),
                ("trial", trial.to_string()),
            ]);
            println!("{header}# edges = {}", inst.num_edges());
            write_or_print(out.as_ref(), &write_instance(&inst))?;
            Ok(())
        }
        Cmd::Solve { file, budget } => {
            let inst = read_instance(&std::fs::read_to_string(&file)?)?;
            let budget = budget
                .or(cfg.parsed("run.budget")?)
                .unwrap_or(DEFAULT_BUDGET);
            print!(
                "{}",
                echo(&[
                    ("file", file.display().to_string()),
                    ("budget", budget.to_string())
                ])
            );
            match solve(&inst, budget)? {
                SolveResult::Sat(a) => {
                    println!("SAT");
                    let parts: Vec<String> = (0..inst.n)
                        .map(|v| format!("v{v}={}", a.get(v).unwrap_or(0)))
                        .collect();
                    println!("assign {}", parts.join(" "));
                }
                SolveResult::Unsat => println!("UNSAT"),
                SolveResult::BudgetExceeded(nodes) => {
                    println!("BUDGET {nodes}");
                    std::process::exit(2);
                }
            }
            Ok(())
        }
        Cmd::Analyze { file, dot } => {
            let inst = read_instance(&std::fs::read_to_string(&file)?)?;
            print!("{}", echo(&[("file", file.display().to_string())]));
            let comps = components(&inst);
            println!(
                "variables {} edges {} components {}",
                inst.n,
                inst.num_edges(),
                comps.len()
            );
            let mut counts = [0usize; 3];
            for comp in &comps {
                let class = classify(&inst, comp)?;
                let label = match class {
                    Classification::Tree => {
                        counts[0] += 1;
                        "tree".to_string()
                    }
                    Classification::Unicyclic(ref cyc) => {
                        counts[1] += 1;
                        format!("unicyclic(cycle={})", cyc.len())
                    }
                    Classification::Multicyclic => {
                        counts[2] += 1;
                        "multicyclic".to_string()
                    }
                };
                println!("component size={} {label}", comp.len());
            }
            println!(
                "census trees={} unicyclic={} multicyclic={}",
                counts[0], counts[1], counts[2]
            );
            if let Some(path) = dot {
                let mut s = String::from("graph incidence {\n");
                for v in 0..inst.n {
                    s.push_str(&format!("  v{v} [shape=circle];\n"));
                }
                for (ei, e) in inst.edges.iter().enumerate() {
                    s.push_str(&format!("  e{ei} [shape=box,label=\"c{}\"];\n", e.cid));
                    for &v in &e.vars {
                        s.push_str(&format!("  v{v} -- e{ei};\n"));
                    }
                }
                s.push_str("}\n");
                std::fs::write(path, s)?;
            }
            Ok(())
        }
        Cmd::Audit {
            model,
            max_vars,
            out,
        } => {
            let model = model
                .or_else(|| cfg.get("model.model").map(String::from))
                .ok_or_else(|| Error::input("missing --model (config key model.model)"))?;
            let dist = parse_model(&model)?;
            print!(
                "{}",
                echo(&[
                    ("model", model.clone()),
                    (
                        "max_vars",
                        max_vars
                            .map(|m| m.to_string())
                            .unwrap_or_else(|| "unbounded".into())
                    ),
                ])
            );
            let witness = match max_vars {
                None => match audit::audit_binary(&dist)? {
                    audit::AuditVerdict::AllSatisfiable => {
                        println!("ALL-SATISFIABLE");
                        None
                    }
                    audit::AuditVerdict::Counterexample(inst) => Some(inst),
                },
                Some(m) => match audit::audit_bounded(&dist, m)? {
                    audit::BoundedVerdict::NoCounterexampleUpTo(m) => {
                        println!("NO-COUNTEREXAMPLE-UP-TO {m}");
                        None
                    }
                    audit::BoundedVerdict::Counterexample(inst) => Some(inst),
                },
            };
            if let Some(inst) = witness {
                println!(
                    "COUNTEREXAMPLE variables={} edges={}",
                    inst.n,
                    inst.num_edges()
                );
                if let Some(path) = out {
                    std::fs::write(path, write_instance(&inst))?;
                }
            }
            Ok(())
        }
        Cmd::Forcing {
            model,
            c,
            n,
            trials,
            beta,
            zeta,
            seed,
            out,
        } => {
            let model = model
                .or_else(|| cfg.get("model.model").map(String::from))
                .ok_or_else(|| Error::input("missing --model (config key model.model)"))?;
            let dist = parse_model(&model)?;
            let c = c
                .or(cfg.parsed("grid.c")?)
                .ok_or_else(|| Error::input("missing --c (config key grid.c)"))?;
            let n_list = match n.or_else(|| cfg.get("grid.n").map(String::from)) {
                Some(s) => parse_usize_list(&s)?,
                None => vec![500, 1000, 2000],
            };
            let trials = trials.or(cfg.parsed("run.trials")?).unwrap_or(60);
            let beta = beta
                .or(cfg.parsed("run.beta")?)
                .unwrap_or(forcing::DEFAULT_BETA);
            let zeta = zeta
                .or(cfg.parsed("run.zeta")?)
                .unwrap_or(forcing::DEFAULT_ZETA);
            let seed = seed
                .or(cfg.parsed("run.seed")?)
                .or_else(env_seed)
                .unwrap_or(0);
            print!(
                "{}",
                echo(&[
                    ("model", model.clone()),
                    ("c", c.to_string()),
                    (
                        "n",
                        n_list
                            .iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    ),
                    ("trials", trials.to_string()),
                    ("beta", beta.to_string()),
                    ("zeta", zeta.to_string()),
                    ("seed", seed.to_string()),
                ])
            );
            let dg = forcing::build_forcing_digraph(&dist, c)?;
            println!("forcing-edges {}", dg.edges.len());
            let reports =
                forcing::percolation_verdict(&dist, c, &n_list, trials, beta, zeta, seed)?;
            for r in &reports {
                let emp: Vec<String> = r
                    .empirical
                    .iter()
                    .map(|(n, f)| format!("n={n}:{f:.3}"))
                    .collect();
                println!(
                    "pair {}->{} perron={:.6} verdict={:?} empirical {}",
                    r.delta,
                    r.gamma,
                    r.perron_root,
                    r.verdict,
                    emp.join(" ")
                );
            }
            if let Some(path) = out {
                let mut csv = String::from("delta,gamma,n,trial,size\n");
                for r in &reports {
                    if r.perron_root == 0.0 {
                        continue;
                    }
                    for &(n, _) in &r.empirical {
                        let samples = forcing::forced_size_samples(
                            &dist, c, n, trials, r.delta, r.gamma, seed,
                        )?;
                        for (t, s) in samples.iter().enumerate() {
                            csv.push_str(&format!("{},{},{},{},{}\n", r.delta, r.gamma, n, t, s));
                        }
                    }
                }
                std::fs::write(path, csv)?;
            }
            Ok(())
        }
        Cmd::Probe {
            model,
            flavor,
            n,
            c,
            trials,
            seed,
            budget,
            out,
            summary_out,
        } => {
            let model = model
                .or_else(|| cfg.get("model.model").map(String::from))
                .ok_or_else(|| Error::input("missing --model (config key model.model)"))?;
            let dist = parse_model(&model)?;
            let flavor = match flavor.or_else(|| cfg.get("model.flavor").map(String::from)) {
                Some(f) => parse_flavor(&f)?,
                None => Flavor::Hat,
            };
            let n_list = parse_usize_list(
                &n.or_else(|| cfg.get("grid.n").map(String::from))
                    .ok_or_else(|| Error::input("missing --n (config key grid.n)"))?,
            )?;
            let c_grid = parse_c_grid(
                &c.or_else(|| cfg.get("grid.c").map(String::from))
                    .ok_or_else(|| Error::input("missing --c (config key grid.c)"))?,
            )?;
            let trials = trials.or(cfg.parsed("run.trials")?).unwrap_or(100);
            let seed = seed
                .or(cfg.parsed("run.seed")?)
                .or_else(env_seed)
                .unwrap_or(0);
            let budget = budget
                .or(cfg.parsed("run.budget")?)
                .unwrap_or(DEFAULT_BUDGET);
            let header = echo(&[
                ("model", model.clone()),
                ("flavor", format!("{flavor:?}").to_lowercase()),
                (
                    "n",
                    n_list
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                ),
                (
                    "c",
                    c_grid
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                ),
                ("trials", trials.to_string()),
                ("seed", seed.to_string()),
                ("budget", budget.to_string()),
            ]);
            let curve = probe::psat_grid(&dist, flavor, &n_list, &c_grid, trials, seed, budget)?;
            write_or_print(out.as_ref(), &format!("{header}{}", curve.to_csv()))?;
            if let Some(path) = summary_out {
                std::fs::write(path, format!("{header}{}", curve.summary_csv()))?;
            }
            Ok(())
        }
        Cmd::Repro {
            name,
            out_dir,
            seed,
        } => {
            let seed = seed.or_else(env_seed).unwrap_or(7);
            std::fs::create_dir_all(&out_dir)?;
            repro(&name, &out_dir, seed)
        }
    }
}

fn repro(name: &str, out_dir: &std::path::Path, seed: u64) -> Result<(), Error> {
    let path = |file: &str| out_dir.join(file);
    match name {
        "ed3-coarse" => {
            let dist = parse_model("ed3")?;
            let c_grid: Vec<f64> = (0..8).map(|i| 1.0 + 0.3 * i as f64).collect();
            let curve = probe::psat_grid(
                &dist,
                Flavor::Hat,
                &[300, 600],
                &c_grid,
                150,
                seed,
                DEFAULT_BUDGET,
            )?;
            let header = echo(&[
                ("recipe", "ed3-coarse".into()),
                ("seed", seed.to_string()),
                ("trials", "150".into()),
            ]);
            std::fs::write(
                path("ed3-coarse.csv"),
                format!("{header}{}", curve.to_csv()),
            )?;
            std::fs::write(
                path("ed3-coarse-summary.csv"),
                format!("{header}{}", curve.summary_csv()),
            )?;
            for ni in 0..2 {
                let s = curve.summary(ni);
                println!(
                    "n={} width={:?} (coarse band expected to stay wide)",
                    s.n, s.width
                );
            }
            Ok(())
        }
        "dkt-sharp" => {
            let dist = parse_model("dkt:2,3,1")?;
            let c_grid: Vec<f64> = (0..9).map(|i| 18.0 + 2.0 * i as f64).collect();
            let curve = probe::psat_grid(
                &dist,
                Flavor::Hat,
                &[50, 100],
                &c_grid,
                150,
                seed,
                2_000_000,
            )?;
            let header = echo(&[
                ("recipe", "dkt-sharp".into()),
                ("seed", seed.to_string()),
                ("trials", "150".into()),
                ("budget", "2000000".into()),
            ]);
            std::fs::write(path("dkt-sharp.csv"), format!("{header}{}", curve.to_csv()))?;
            std::fs::write(
                path("dkt-sharp-summary.csv"),
                format!("{header}{}", curve.summary_csv()),
            )?;
            let report = probe::sharpness_diagnostic(&curve)?;
            println!("verdict {:?}", report.verdict);
            Ok(())
        }
        "s3-fact9" => {
            let rep = probe::fact9_experiment(0.25, &[300], &[0.8, 5.0], 60, seed, DEFAULT_BUDGET)?;
            let mut csv = echo(&[
                ("recipe", "s3-fact9".into()),
                ("seed", seed.to_string()),
                ("q", "0.25".into()),
                ("boundary", format!("{}", rep.boundary)),
            ]);
            csv.push_str("n,c,trials,decided,agreements,solver_sat,predicate_sat\n");
            for cell in &rep.cells {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    cell.n,
                    cell.c,
                    cell.trials,
                    cell.decided,
                    cell.agreements,
                    cell.solver_sat,
                    cell.predicate_sat
                ));
                println!(
                    "n={} c={} agreement {}/{}",
                    cell.n, cell.c, cell.agreements, cell.decided
                );
            }
            std::fs::write(path("s3-fact9.csv"), csv)?;
            Ok(())
        }
        "homcheck-lemma2" => {
            use rand::Rng;
            let mut rng = trial_rng(seed, 0);
            let mut csv = echo(&[
                ("recipe", "homcheck-lemma2".into()),
                ("seed", seed.to_string()),
            ]);
            csv.push_str("case,k,vertices,edges,ok\n");
            let mut failures = 0usize;
            for case in 0..200usize {
                let k = if rng.gen_bool(0.5) { 3usize } else { 4 };
                // random unicyclic hypergraph: hypertree plus one closing edge
                let mut edges: Vec<Vec<u32>> = vec![(1..=k as u32).collect()];
                let mut n = k as u32;
                for _ in 0..rng.gen_range(0..6) {
                    let anchor = rng.gen_range(1..=n);
                    let mut e = vec![anchor];
                    e.extend(n + 1..=n + k as u32 - 1);
                    n += k as u32 - 1;
                    edges.push(e);
                }
                let a = rng.gen_range(1..=n);
                let mut b = rng.gen_range(1..=n);
                while b == a {
                    b = rng.gen_range(1..=n);
                }
                let mut e = vec![a, b];
                e.extend(n + 1..=n + k as u32 - 2);
                n += k as u32 - 2;
                edges.push(e);
                let g = csplab::models::HypergraphH::new(n as usize, k as u8, edges, false)?;
                let ok = audit::unicyclic_homomorphism(&g).is_ok();
                if !ok {
                    failures += 1;
                }
                csv.push_str(&format!("{case},{k},{n},{},{}\n", g.edges.len(), ok));
            }
            std::fs::write(path("homcheck-lemma2.csv"), csv)?;
            println!("failures {failures}/200");
            if failures > 0 {
                return Err(Error::internal("homomorphism construction failed"));
            }
            Ok(())
        }
        "hat-duplicates" => {
            let mut csv = echo(&[
                ("recipe", "hat-duplicates".into()),
                ("seed", seed.to_string()),
            ]);
            csv.push_str("model,k,n,trials,dup_instances,dup_fraction\n");
            for (model, k) in [("ed3", 2usize), ("dkt:2,3,1", 3)] {
                let dist = parse_model(model)?;
                for n in [500usize, 1000, 2000] {
                    let trials = 50usize;
                    let mut dup = 0usize;
                    for t in 0..trials {
                        let spec = GenSpec {
                            dist: dist.clone(),
                            n,
                            c: 2.0,
                            flavor: Flavor::Hat,
                            seed,
                            trial_index: t as u64,
                        };
                        if sample_hat(&spec)?.duplicate_edge_sets() > 0 {
                            dup += 1;
                        }
                    }
                    let frac = dup as f64 / trials as f64;
                    csv.push_str(&format!("{model},{k},{n},{trials},{dup},{frac:.4}\n"));
                    println!("{model} n={n} duplicate-instance fraction {frac:.3}");
                }
            }
            std::fs::write(path("hat-duplicates.csv"), csv)?;
            Ok(())
        }
        other => Err(Error::input(format!("unknown repro recipe {other:?}"))),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Input(_) | Error::Parse(_) | Error::Io(_) => 1,
                Error::Capacity(_) => 2,
                Error::Internal(_) => 3,
            };
            std::process::exit(code);
        }
    }
}
