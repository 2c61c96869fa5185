//! Subcommand implementations. Each returns the process exit code:
//! 0 ok, 1 usage or parse error, 2 time limit, 3 infeasible instance.

use std::collections::{BTreeMap, VecDeque};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::sync::Mutex;

use rmc_core::instgen::{geo_instance, random_instance, GenParams};
use rmc_core::milp::SolveLimits;
use rmc_core::robust::{
    average_case_value, solve_asf_with, solve_setf_with, worst_case_value, DriverOptions,
    Formulation, RobustRun, RunStatus,
};
use rmc_core::separation::{separate_bigm, separate_brute, separate_set};
use rmc_core::{Error, Instance};

use crate::formats::{parse_instance, parse_weighted_graph, write_instance};
use crate::{
    BenchArgs, CheckArgs, GenerateArgs, SeparateArgs, SeparationMethod, SolveArgs, EXIT_INFEASIBLE,
    EXIT_OK, EXIT_TIME_LIMIT, EXIT_USAGE,
};

fn limits_from(seconds: Option<f64>) -> SolveLimits {
    match seconds {
        None => SolveLimits::default(),
        Some(s) => SolveLimits::with_time_limit(s.max(0.0)),
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::BoundViolation { .. } | Error::UncoverableRegion { .. } | Error::Infeasible => {
            EXIT_INFEASIBLE
        }
        Error::SolverLimit => EXIT_TIME_LIMIT,
        _ => EXIT_USAGE,
    }
}

/// Reads, parses and normalizes an instance file; failures are printed
/// and turned into the proper exit code.
fn load_instance(path: &Path) -> Result<Instance, i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_USAGE
    })?;
    let raw = parse_instance(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_USAGE
    })?;
    raw.validate_and_normalize().map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        exit_code_for(&e)
    })
}

fn run_driver(
    inst: &Instance,
    formulation: Formulation,
    limits: &SolveLimits,
    options: &DriverOptions,
) -> Result<RobustRun, Error> {
    match formulation {
        Formulation::Setf => solve_setf_with(inst, limits, options),
        Formulation::Asf => solve_asf_with(inst, limits, options),
    }
}

pub fn cmd_solve(args: &SolveArgs) -> i32 {
    let inst = match load_instance(&args.instance) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    let limits = limits_from(args.time_limit);
    let options = DriverOptions {
        max_cuts_per_round: if args.multi_cut { 4 } else { 1 },
    };
    let run = match run_driver(&inst, args.formulation.into(), &limits, &options) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };

    println!("formulation {}", run.formulation);
    let status = match run.status {
        RunStatus::Optimal => "optimal",
        RunStatus::TimeLimit => "timelimit",
        RunStatus::Infeasible => "infeasible",
    };
    println!("status {status}");
    println!("objective {}", run.solution.objective());
    let x: Vec<String> = run
        .solution
        .suppliers()
        .iter()
        .map(|v| v.to_string())
        .collect();
    println!("x {}", x.join(" "));
    println!("cuts {}", run.cuts.len());
    println!("iterations {}", run.iterations);
    println!("bounds {} {}", run.lower_bound, run.upper_bound);
    println!("time {:.2}", run.elapsed.as_secs_f64());

    if let Some(n) = args.avg_scenarios {
        match average_case_value(&inst, n, args.seed, &limits) {
            Ok(avg) => println!("average {avg}"),
            Err(e) => eprintln!("average failed: {e}"),
        }
        match worst_case_value(&inst, &limits) {
            Ok(worst) => println!("worst {worst}"),
            Err(e) => eprintln!("worst failed: {e}"),
        }
    }

    match run.status {
        RunStatus::Optimal => EXIT_OK,
        RunStatus::TimeLimit => EXIT_TIME_LIMIT,
        RunStatus::Infeasible => EXIT_INFEASIBLE,
    }
}

pub fn cmd_generate(args: &GenerateArgs) -> i32 {
    let instance = if let Some(geo_path) = &args.geo {
        let text = match fs::read_to_string(geo_path) {
            Ok(text) => text,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", geo_path.display());
                return EXIT_USAGE;
            }
        };
        let graph = match parse_weighted_graph(&text) {
            Ok(graph) => graph,
            Err(e) => {
                eprintln!("error: {}: {e}", geo_path.display());
                return EXIT_USAGE;
            }
        };
        let Some(gamma) = args.gamma else {
            eprintln!("error: --gamma is required with --geo");
            return EXIT_USAGE;
        };
        match geo_instance(&graph, args.threshold, args.q, gamma) {
            Ok(geo) => {
                if !geo.uncovered_nodes.is_empty() {
                    eprintln!(
                        "note: {} street nodes are unreachable from every facility: {:?}",
                        geo.uncovered_nodes.len(),
                        geo.uncovered_nodes
                    );
                }
                geo.instance
            }
            Err(e) => {
                eprintln!("error: {e}");
                return exit_code_for(&e);
            }
        }
    } else {
        let params = GenParams {
            num_locations: args.ni,
            num_regions: args.nj,
            edge_density: args.p,
            k1: args.k.0,
            k2: args.k.1,
            gamma_factor: args.d,
            q: args.q,
            seed: args.seed,
        };
        match random_instance(&params) {
            Ok(inst) => inst,
            Err(e) => {
                eprintln!("error: {e}");
                return exit_code_for(&e);
            }
        }
    };

    let text = write_instance(&instance);
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{text}"),
    }
    EXIT_OK
}

fn parse_suppliers(inst: &Instance, x: &[u64]) -> Result<(), i32> {
    if x.len() != inst.num_locations() {
        eprintln!(
            "error: x has {} entries, instance has {} locations",
            x.len(),
            inst.num_locations()
        );
        return Err(EXIT_USAGE);
    }
    Ok(())
}

pub fn cmd_check(args: &CheckArgs) -> i32 {
    let inst = match load_instance(&args.instance) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    if let Err(code) = parse_suppliers(&inst, &args.x) {
        return code;
    }
    let limits = limits_from(args.time_limit);
    match separate_set(&inst, &args.x, &limits) {
        Ok(None) => {
            println!("FEASIBLE");
            EXIT_OK
        }
        Ok(Some(violation)) => {
            println!("VIOLATING");
            let subset: Vec<String> = violation.subset.iter().map(|j| j.to_string()).collect();
            println!("subset {}", subset.join(" "));
            println!("amount {}", violation.amount);
            if let Some(witness) = &violation.witness {
                let xi: Vec<String> = witness.demands().iter().map(|d| d.to_string()).collect();
                println!("scenario {}", xi.join(" "));
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn cmd_separate(args: &SeparateArgs) -> i32 {
    let inst = match load_instance(&args.instance) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    if let Err(code) = parse_suppliers(&inst, &args.x) {
        return code;
    }
    let limits = limits_from(args.time_limit);
    let outcome = match args.method {
        SeparationMethod::Set => separate_set(&inst, &args.x, &limits),
        SeparationMethod::Bigm => separate_bigm(&inst, &args.x, &limits),
        SeparationMethod::Brute => separate_brute(&inst, &args.x),
    };
    match outcome {
        Ok(None) => {
            println!("no violation");
            EXIT_OK
        }
        Ok(Some(violation)) => {
            let subset: Vec<String> = violation.subset.iter().map(|j| j.to_string()).collect();
            println!("subset {}", subset.join(" "));
            println!("amount {}", violation.amount);
            if let Some(witness) = &violation.witness {
                let xi: Vec<String> = witness.demands().iter().map(|d| d.to_string()).collect();
                println!("scenario {}", xi.join(" "));
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

// -------------------------------------------------------------------
// benchmark harness
// -------------------------------------------------------------------

pub const CSV_HEADER: &str =
    "id,k1,k2,d,avg_obj,robust_obj,worst_obj,solved_setf,solved_asf,time_setf_s,time_asf_s,status";

#[derive(Debug, Clone)]
struct BenchJob {
    ni: usize,
    p: f64,
    k: (u64, u64),
    d: f64,
    rep: usize,
    seed: u64,
}

#[derive(Debug, Clone)]
struct BenchRow {
    id: String,
    k: (u64, u64),
    d: f64,
    avg_obj: Option<u64>,
    robust_obj: Option<u64>,
    worst_obj: Option<u64>,
    solved_setf: bool,
    solved_asf: bool,
    time_setf: f64,
    time_asf: f64,
    status: String,
}

impl BenchRow {
    fn to_csv(&self) -> String {
        let opt = |v: &Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{:.2},{:.2},{}",
            self.id,
            self.k.0,
            self.k.1,
            self.d,
            opt(&self.avg_obj),
            opt(&self.robust_obj),
            opt(&self.worst_obj),
            self.solved_setf,
            self.solved_asf,
            self.time_setf,
            self.time_asf,
            self.status
        )
    }
}

fn run_bench_job(job: &BenchJob, args: &BenchArgs) -> BenchRow {
    let id = format!(
        "i{}_p{}_k{}-{}_d{}_r{:02}",
        job.ni, job.p, job.k.0, job.k.1, job.d, job.rep
    );
    let limits = SolveLimits::with_time_limit(args.time_limit);
    let mut row = BenchRow {
        id,
        k: job.k,
        d: job.d,
        avg_obj: None,
        robust_obj: None,
        worst_obj: None,
        solved_setf: false,
        solved_asf: false,
        time_setf: 0.0,
        time_asf: 0.0,
        status: "ok".into(),
    };

    let params = GenParams {
        num_locations: job.ni,
        num_regions: args.nj,
        edge_density: job.p,
        k1: job.k.0,
        k2: job.k.1,
        gamma_factor: job.d,
        q: args.q,
        seed: job.seed,
    };
    let inst = match random_instance(&params) {
        Ok(inst) => inst,
        Err(e) => {
            row.status = format!("error: {e}");
            return row;
        }
    };
    let options = DriverOptions {
        max_cuts_per_round: if args.multi_cut { 4 } else { 1 },
    };

    match solve_setf_with(&inst, &limits, &options) {
        Ok(run) => {
            row.time_setf = run.elapsed.as_secs_f64();
            if run.status == RunStatus::Optimal {
                row.solved_setf = true;
                row.robust_obj = Some(run.solution.objective());
            }
        }
        Err(e) => row.status = format!("error: {e}"),
    }
    match solve_asf_with(&inst, &limits, &options) {
        Ok(run) => {
            row.time_asf = run.elapsed.as_secs_f64();
            if run.status == RunStatus::Optimal {
                row.solved_asf = true;
                if row.robust_obj.is_none() {
                    row.robust_obj = Some(run.solution.objective());
                }
            }
        }
        Err(e) => row.status = format!("error: {e}"),
    }
    match worst_case_value(&inst, &limits) {
        Ok(worst) => row.worst_obj = Some(worst),
        Err(Error::SolverLimit) => {}
        Err(e) => row.status = format!("error: {e}"),
    }
    match average_case_value(&inst, args.avg_scenarios, job.seed, &limits) {
        Ok(avg) => row.avg_obj = Some(avg),
        Err(Error::SolverLimit) => {}
        Err(e) => row.status = format!("error: {e}"),
    }
    if row.status == "ok" && !(row.solved_setf && row.solved_asf) {
        row.status = "timelimit".into();
    }
    row
}

fn aggregate_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "k1,k2,d,avg_obj,robust_obj,worst_obj,solved_total,solved_setf,solved_asf,time_setf_s,time_asf_s\n",
    );
    let mut cells: BTreeMap<(u64, u64, String), Vec<&BenchRow>> = BTreeMap::new();
    for row in rows {
        cells
            .entry((row.k.0, row.k.1, format!("{}", row.d)))
            .or_default()
            .push(row);
    }
    for ((k1, k2, d), group) in cells {
        let solved: Vec<&&BenchRow> = group
            .iter()
            .filter(|r| {
                r.solved_setf && r.solved_asf && r.avg_obj.is_some() && r.worst_obj.is_some()
            })
            .collect();
        let mean = |take: &dyn Fn(&BenchRow) -> f64| -> f64 {
            if solved.is_empty() {
                0.0
            } else {
                solved.iter().map(|r| take(r)).sum::<f64>() / solved.len() as f64
            }
        };
        let setf_solved = group.iter().filter(|r| r.solved_setf).count();
        let asf_solved = group.iter().filter(|r| r.solved_asf).count();
        out.push_str(&format!(
            "{},{},{},{:.2},{:.2},{:.2},{},{},{},{:.2},{:.2}\n",
            k1,
            k2,
            d,
            mean(&|r| r.avg_obj.unwrap() as f64),
            mean(&|r| r.robust_obj.unwrap() as f64),
            mean(&|r| r.worst_obj.unwrap() as f64),
            solved.len(),
            setf_solved,
            asf_solved,
            mean(&|r| r.time_setf),
            mean(&|r| r.time_asf),
        ));
    }
    out
}

fn aggregate_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "bench".into());
    out.with_file_name(format!("{stem}.agg.csv"))
}

pub fn cmd_bench(args: &BenchArgs) -> i32 {
    let mut jobs = Vec::new();
    for &ni in &args.ni {
        for &p in &args.p {
            for &k in &args.k {
                for &d in &args.d {
                    for rep in 0..args.reps {
                        jobs.push(BenchJob {
                            ni,
                            p,
                            k,
                            d,
                            rep,
                            // one seed per replicate: cells with equal
                            // (ni, p, rep) share their underlying graph
                            seed: args.seed.wrapping_add(rep as u64),
                        });
                    }
                }
            }
        }
    }
    if jobs.is_empty() {
        eprintln!("error: empty benchmark grid");
        return EXIT_USAGE;
    }

    let mut file = match fs::File::create(&args.out) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", args.out.display());
            return EXIT_USAGE;
        }
    };
    if let Err(e) = writeln!(file, "{CSV_HEADER}") {
        eprintln!("error: write failed: {e}");
        return EXIT_USAGE;
    }

    // workers pull jobs from a shared queue; the writer drains results in
    // job order and flushes row by row, so an interrupted run keeps a
    // valid prefix on disk
    let queue = Mutex::new((0..jobs.len()).collect::<VecDeque<usize>>());
    let (tx, rx) = mpsc::channel::<(usize, BenchRow)>();
    let workers = args.threads.max(1);
    let mut ordered: Vec<Option<BenchRow>> = vec![None; jobs.len()];

    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let queue = &queue;
            let jobs = &jobs;
            scope.spawn(move || loop {
                let next = queue.lock().unwrap().pop_front();
                let Some(index) = next else { break };
                let row = run_bench_job(&jobs[index], args);
                if tx.send((index, row)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut next_to_write = 0;
        let mut pending: BTreeMap<usize, BenchRow> = BTreeMap::new();
        while let Ok((index, row)) = rx.recv() {
            pending.insert(index, row);
            while let Some(row) = pending.remove(&next_to_write) {
                let _ = writeln!(file, "{}", row.to_csv());
                let _ = file.flush();
                ordered[next_to_write] = Some(row);
                next_to_write += 1;
            }
        }
    });

    let rows: Vec<BenchRow> = ordered.into_iter().flatten().collect();
    if rows.len() != jobs.len() {
        eprintln!("error: {} of {} jobs produced rows", rows.len(), jobs.len());
        return EXIT_USAGE;
    }
    let agg = aggregate_csv(&rows);
    let agg_path = aggregate_path(&args.out);
    if let Err(e) = fs::write(&agg_path, agg) {
        eprintln!("error: cannot write {}: {e}", agg_path.display());
        return EXIT_USAGE;
    }

    let unsolved = rows.iter().filter(|r| r.status != "ok").count();
    eprintln!(
        "bench: {} rows written to {}, aggregates in {}, {} unsolved",
        rows.len(),
        args.out.display(),
        agg_path.display(),
        unsolved
    );
    EXIT_OK
}
