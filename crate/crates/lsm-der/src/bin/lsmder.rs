//! Experiment runner for the liquid-state-machine readout benchmarks.
//!
//! Subcommands: run, sweep-n, sweep-xsat, sweep-dendrites, capacity,
//! robustness, markers. Results, traces and reports are written as plain
//! delimited text under the output directory. Exit codes: 0 success,
//! 2 configuration error, 3 verification failure in `run --verify`.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use lsm_der::capacity::{capacity_sweep, write_sweep};
use lsm_der::error::Error;
use lsm_der::harness::robustness::{mean_delta, write_robustness};
use lsm_der::harness::sweep::write_sweep_rows;
use lsm_der::harness::{
    convergence_markers, mean_test_mae, run_experiment, run_robustness, sweep_dendrites,
    sweep_ppr_n, sweep_xsat, DendriteSweepMode, ExperimentConfig, ReadoutKind, Task,
    VariationMode,
};
use lsm_der::mismatch::VariationSpec;

const USAGE: &str = "\
lsmder — liquid state machine with a dendritically enhanced readout

USAGE:
    lsmder <COMMAND> [OPTIONS]

COMMANDS:
    run             run the configured experiment (both readouts)
    sweep-n         baseline bank-size sweep against the dendritic readout
    sweep-xsat      branch saturation ceiling sweep
    sweep-dendrites branch count sweep (--mode fixed_k | fixed_s)
    capacity        exact wiring-capacity table (--synapses, --lines)
    robustness      mismatch-injection comparison of both readouts
    markers         convergence markers from two trace files

OPTIONS:
    --config <path>   key=value experiment configuration file
    --task <name>     spike_classification | sum_of_rates
    --seed <int>      first trial seed
    --trials <int>    number of trials (seeds seed..seed+trials)
    --out <dir>       output directory (default: out)
    --set k=v         override one configuration key (repeatable)
    --verify          (run) exit 3 unless the dendritic readout beats the baseline
    --values <list>   (sweeps) comma-separated sweep values
    --mode <m>        (sweep-dendrites) fixed_k or fixed_s
    --synapses <int>  (capacity) per-cell synapse budget, default 70
    --lines <int>     (capacity) afferent line count, default 140
    --der <path>      (markers) dendritic trace file
    --ppr <path>      (markers) baseline trace file
";

struct Options {
    command: String,
    config: Option<PathBuf>,
    task: Option<String>,
    seed: Option<u64>,
    trials: Option<usize>,
    out: PathBuf,
    sets: Vec<(String, String)>,
    verify: bool,
    values: Option<String>,
    mode: Option<String>,
    synapses: usize,
    lines: usize,
    der_trace: Option<PathBuf>,
    ppr_trace: Option<PathBuf>,
}

fn parse_args() -> Result<Options, String> {
    let mut args = std::env::args().skip(1);
    let command = args.next().ok_or_else(|| USAGE.to_string())?;
    let mut opts = Options {
        command,
        config: None,
        task: None,
        seed: None,
        trials: None,
        out: PathBuf::from("out"),
        sets: Vec::new(),
        verify: false,
        values: None,
        mode: None,
        synapses: 70,
        lines: 140,
        der_trace: None,
        ppr_trace: None,
    };
    let next = |args: &mut dyn Iterator<Item = String>, flag: &str| {
        args.next().ok_or(format!("{flag} needs a value"))
    };
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--config" => opts.config = Some(PathBuf::from(next(&mut args, "--config")?)),
            "--task" => opts.task = Some(next(&mut args, "--task")?),
            "--seed" => {
                opts.seed = Some(
                    next(&mut args, "--seed")?
                        .parse()
                        .map_err(|_| "--seed expects an integer".to_string())?,
                )
            }
            "--trials" => {
                opts.trials = Some(
                    next(&mut args, "--trials")?
                        .parse()
                        .map_err(|_| "--trials expects a count".to_string())?,
                )
            }
            "--out" => opts.out = PathBuf::from(next(&mut args, "--out")?),
            "--set" => {
                let kv = next(&mut args, "--set")?;
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| "--set expects key=value".to_string())?;
                opts.sets.push((k.trim().to_string(), v.trim().to_string()));
            }
            "--verify" => opts.verify = true,
            "--values" => opts.values = Some(next(&mut args, "--values")?),
            "--mode" => opts.mode = Some(next(&mut args, "--mode")?),
            "--synapses" => {
                opts.synapses = next(&mut args, "--synapses")?
                    .parse()
                    .map_err(|_| "--synapses expects a count".to_string())?
            }
            "--lines" => {
                opts.lines = next(&mut args, "--lines")?
                    .parse()
                    .map_err(|_| "--lines expects a count".to_string())?
            }
            "--der" => opts.der_trace = Some(PathBuf::from(next(&mut args, "--der")?)),
            "--ppr" => opts.ppr_trace = Some(PathBuf::from(next(&mut args, "--ppr")?)),
            "-h" | "--help" => return Err(USAGE.to_string()),
            other => return Err(format!("unknown option: {other}\n\n{USAGE}")),
        }
    }
    Ok(opts)
}

fn load_config(opts: &Options) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (&opts.config, &opts.task) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)?;
            ExperimentConfig::parse(&text)?
        }
        (None, Some(task)) => ExperimentConfig::for_task(Task::from_name(task)?),
        (None, None) => ExperimentConfig::default(),
    };
    if let Some(task) = &opts.task {
        if opts.config.is_some() {
            cfg.set("task", task)?;
        }
    }
    if let Some(trials) = opts.trials {
        cfg.set("trials", &trials.to_string())?;
    }
    if let Some(seed) = opts.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    for (k, v) in &opts.sets {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn ensure_out(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn parse_values<T: std::str::FromStr>(list: &str, what: &str) -> Result<Vec<T>, Error> {
    list.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| Error::Config(format!("bad {what} value: {tok}")))
        })
        .collect()
}

fn cmd_run(opts: &Options) -> Result<i32, Error> {
    let cfg = load_config(opts)?;
    ensure_out(&opts.out)?;
    let out = run_experiment(&cfg)?;

    fs::write(opts.out.join("config.txt"), cfg.to_text())?;
    let mut records = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(opts.out.join("records.txt"))?;
    lsm_der::harness::append_records(&mut records, &out.records)?;
    for (seed, trace) in &out.der_traces {
        let mut f = fs::File::create(opts.out.join(format!("trace_der_{seed}.txt")))?;
        trace.write_text(&mut f)?;
    }
    for (seed, trace) in &out.ppr_traces {
        let mut f = fs::File::create(opts.out.join(format!("trace_ppr_{seed}.txt")))?;
        trace.write_text(&mut f)?;
    }

    for r in &out.records {
        println!("{}", r.to_line());
    }
    let der = mean_test_mae(&out.records, ReadoutKind::Der);
    let ppr = mean_test_mae(&out.records, ReadoutKind::Ppr);
    if let (Some(d), Some(p)) = (der, ppr) {
        println!("# mean test mae: der {d:.4} ppr {p:.4}");
        if opts.verify && !(d < p) {
            eprintln!("verify: dendritic readout did not beat the baseline ({d:.4} vs {p:.4})");
            return Ok(3);
        }
    }
    Ok(0)
}

fn cmd_sweep_n(opts: &Options) -> Result<i32, Error> {
    let cfg = load_config(opts)?;
    ensure_out(&opts.out)?;
    let values: Vec<usize> = match &opts.values {
        Some(list) => parse_values(list, "bank size")?,
        None => vec![1, 10, 20, 30, 40, 50, 60],
    };
    let (der_row, rows) = sweep_ppr_n(&cfg, &values)?;
    let mut f = fs::File::create(opts.out.join("sweep_n.txt"))?;
    let mut all = vec![der_row];
    all.extend(rows);
    write_sweep_rows(&mut f, "n train_mae test_mae (first row: der reference)", &all)?;
    for r in &all {
        println!("{} {} {}", r.param, r.mean_train_mae, r.mean_test_mae);
    }
    Ok(0)
}

fn cmd_sweep_xsat(opts: &Options) -> Result<i32, Error> {
    let cfg = load_config(opts)?;
    ensure_out(&opts.out)?;
    let values: Vec<f64> = match &opts.values {
        Some(list) => list
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                if tok == "inf" {
                    Ok(f64::INFINITY)
                } else {
                    tok.parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad ceiling value: {tok}")))
                }
            })
            .collect::<Result<_, _>>()?,
        None => vec![1.0, 2.0, 4.0, 8.0, 16.0, 75.0, f64::INFINITY],
    };
    let rows = sweep_xsat(&cfg, &values)?;
    let mut f = fs::File::create(opts.out.join("sweep_xsat.txt"))?;
    write_sweep_rows(&mut f, "x_sat train_mae test_mae", &rows)?;
    for r in &rows {
        println!("{} {} {}", r.param, r.mean_train_mae, r.mean_test_mae);
    }
    Ok(0)
}

fn cmd_sweep_dendrites(opts: &Options) -> Result<i32, Error> {
    let cfg = load_config(opts)?;
    ensure_out(&opts.out)?;
    let mode = match opts.mode.as_deref() {
        Some("fixed_k") | None => DendriteSweepMode::FixedSlots,
        Some("fixed_s") => DendriteSweepMode::FixedTotal,
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown dendrite sweep mode: {other} (expected fixed_k or fixed_s)"
            )))
        }
    };
    let values: Vec<usize> = match &opts.values {
        Some(list) => parse_values(list, "branch count")?,
        None => match mode {
            DendriteSweepMode::FixedSlots => vec![1, 2, 5, 7, 10, 14],
            DendriteSweepMode::FixedTotal => vec![1, 2, 5, 7, 10, 14, 35, 70],
        },
    };
    let rows = sweep_dendrites(&cfg, mode, &values)?;
    let mut f = fs::File::create(opts.out.join("sweep_dendrites.txt"))?;
    write_sweep_rows(&mut f, "m train_mae test_mae capacity_bits", &rows)?;
    for r in &rows {
        println!(
            "{} {} {} {}",
            r.param,
            r.mean_train_mae,
            r.mean_test_mae,
            r.capacity_bits.unwrap_or(f64::NAN)
        );
    }
    Ok(0)
}

fn cmd_capacity(opts: &Options) -> Result<i32, Error> {
    ensure_out(&opts.out)?;
    let points = capacity_sweep(opts.synapses, opts.lines);
    let mut f = fs::File::create(opts.out.join("capacity.txt"))?;
    write_sweep(&mut f, &points)?;
    for p in &points {
        println!("m={} k={} bits={:.3} pair_bits={:.3}", p.branches, p.slots, p.bits, p.pair_bits);
    }
    let best = points
        .iter()
        .max_by(|a, b| a.bits.partial_cmp(&b.bits).unwrap())
        .unwrap();
    println!("# capacity peaks at m={}", best.branches);
    Ok(0)
}

fn cmd_robustness(opts: &Options) -> Result<i32, Error> {
    let cfg = load_config(opts)?;
    ensure_out(&opts.out)?;
    let spec = VariationSpec::worst_case(0);
    let rows = run_robustness(&cfg, &spec, &VariationMode::ALL_MODES)?;
    let mut f = fs::File::create(opts.out.join("robustness.txt"))?;
    write_robustness(&mut f, &rows)?;
    for mode in [VariationMode::Tau, VariationMode::Cni, VariationMode::I0, VariationMode::All] {
        let d = mean_delta(&rows, ReadoutKind::Der, mode);
        let p = mean_delta(&rows, ReadoutKind::Ppr, mode);
        println!(
            "{}: delta der {:+.4} delta ppr {:+.4}",
            mode.name(),
            d.unwrap_or(f64::NAN),
            p.unwrap_or(f64::NAN)
        );
    }
    Ok(0)
}

fn read_trace(path: &Path) -> Result<Vec<f64>, Error> {
    let file = fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut mae = Vec::new();
    use std::io::BufRead;
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let _iter = cols.next();
        let value = cols
            .next()
            .ok_or_else(|| Error::Format("trace line needs two columns".into()))?;
        mae.push(
            value
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("bad trace value: {value}")))?,
        );
    }
    Ok(mae)
}

fn cmd_markers(opts: &Options) -> Result<i32, Error> {
    let der_path = opts
        .der_trace
        .as_ref()
        .ok_or_else(|| Error::Config("markers needs --der <trace file>".into()))?;
    let ppr_path = opts
        .ppr_trace
        .as_ref()
        .ok_or_else(|| Error::Config("markers needs --ppr <trace file>".into()))?;
    let der = read_trace(der_path)?;
    let ppr = read_trace(ppr_path)?;
    let m = convergence_markers(&der, &ppr)?;
    match m.n1 {
        Some(n1) => println!("n0={} n1={} n2={}", m.n0, n1, m.n2),
        None => println!("n0={} n1=absent n2={}", m.n0, m.n2),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let opts = match parse_args() {
        Ok(o) => o,
        Err(msg) => {
            let _ = writeln!(std::io::stderr(), "{msg}");
            return ExitCode::from(2);
        }
    };
    let result = match opts.command.as_str() {
        "run" => cmd_run(&opts),
        "sweep-n" => cmd_sweep_n(&opts),
        "sweep-xsat" => cmd_sweep_xsat(&opts),
        "sweep-dendrites" => cmd_sweep_dendrites(&opts),
        "capacity" => cmd_capacity(&opts),
        "robustness" => cmd_robustness(&opts),
        "markers" => cmd_markers(&opts),
        other => {
            eprintln!("unknown command: {other}\n\n{USAGE}");
            return ExitCode::from(2);
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e @ (Error::Config(_) | Error::InvalidArgument(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
