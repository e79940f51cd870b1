use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use log::{info, warn};
use rmsnet::baseline::{run_medoid_shift, ShiftConfig};
use rmsnet::graph::{parse_edge_list, parse_gml, EdgeListOptions, Graph, GroundTruth};
use rmsnet::harness::{radius_grid, reproduce_tables, sweep_k, sweep_radius, SweepResult};
use rmsnet::metrics::{evaluate, MetricsReport};
use rmsnet::output::ClusteringDocument;
use rmsnet::rms::{run_rms, RmsConfig};
use rmsnet::similarity::{distance_from_similarity, similarity_for};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{
    Algo, Cli, Command, ConvertArgs, DetectArgs, Format, InputArgs, MethodArgs, MetricsArgs,
    ReproduceArgs, SweepArgs, TruthArgs, UsageError,
};

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let threads = cli.threads;
    match cli.command {
        Command::Detect(a) => detect(&a, threads),
        Command::Sweep(a) => sweep(&a, threads),
        Command::Metrics(a) => metrics(&a, threads),
        Command::Convert(a) => convert(&a),
        Command::Reproduce(a) => reproduce(&a, threads),
    }
}

fn load_graph(args: &InputArgs) -> Result<Graph> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let ingested = match args.format {
        Format::Gml => parse_gml(&text),
        Format::Edgelist => parse_edge_list(
            &text,
            EdgeListOptions {
                directed: args.directed,
                weighted: args.weighted,
            },
        ),
    }
    .with_context(|| format!("parsing {}", args.input.display()))?;
    if ingested.dropped_self_loops > 0 {
        warn!("dropped {} self-loop(s)", ingested.dropped_self_loops);
    }
    let g = ingested.graph.with_weighting(args.weighted);
    info!(
        "{}: {} nodes, {} edges",
        args.input.display(),
        g.node_count(),
        g.edge_count()
    );
    Ok(g)
}

fn load_truth(args: &TruthArgs, format: Format, g: &Graph) -> Result<Option<GroundTruth>> {
    if let Some(path) = &args.truth {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let t = GroundTruth::from_text(&text, g)
            .with_context(|| format!("loading ground truth from {}", path.display()))?;
        return Ok(Some(t));
    }
    if let Some(attr) = &args.truth_attribute {
        if format != Format::Gml {
            return Err(usage("--truth-attribute needs a GML input"));
        }
        return Ok(Some(GroundTruth::from_attribute(g, attr)?));
    }
    Ok(None)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn method_config(m: &MethodArgs) -> Value {
    match m.algo {
        Algo::Rms => json!({
            "tie_rule": m.tie_rule,
            "shift_through_zero": m.shift_through_zero,
            "max_iterations": m.max_iterations,
        }),
        Algo::Medoidshift => json!({
            "transform": m.transform,
            "kernel": m.kernel,
        }),
    }
}

fn rms_config(m: &MethodArgs, k: usize) -> RmsConfig {
    let cfg = RmsConfig::new(k)
        .with_tie_rule(m.tie_rule)
        .with_shift_through_zero(m.shift_through_zero);
    match m.max_iterations {
        Some(cap) => cfg.with_max_iterations(cap),
        None => cfg,
    }
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Value::Object(e)) = (base.as_object_mut(), extra) {
        b.extend(e);
    }
    base
}

fn radius_value(r: f64) -> Value {
    if r.is_infinite() {
        json!("inf")
    } else {
        json!(r)
    }
}

fn detect(args: &DetectArgs, threads: Option<usize>) -> Result<()> {
    let m = &args.method;
    let g = load_graph(&args.input)?;
    let truth = load_truth(&args.truth, args.input.format, &g)?;
    let config = merge(
        json!({
            "command": "detect",
            "input": args.input,
            "algo": m.algo,
            "k": args.k,
            "radius": args.radius.map(radius_value),
            "truth": args.truth,
            "threads": threads,
        }),
        method_config(m),
    );

    let doc = match m.algo {
        Algo::Rms => {
            let k = args.k.ok_or_else(|| usage("--algo rms needs --k"))?;
            if args.radius.is_some() {
                return Err(usage("--radius applies to --algo medoidshift"));
            }
            let cfg = rms_config(m, k);
            let c = run_rms(&g, &cfg)?;
            let report = evaluate(&g, &c.labels, truth.as_ref())?;
            ClusteringDocument::for_rms(&g, &c, &cfg).with_metrics(report)
        }
        Algo::Medoidshift => {
            let radius = args
                .radius
                .ok_or_else(|| usage("--algo medoidshift needs --radius"))?;
            if args.k.is_some() {
                return Err(usage("--k applies to --algo rms"));
            }
            let cfg = ShiftConfig::new(radius)
                .with_transform(m.transform)
                .with_kernel(m.kernel);
            let c = run_medoid_shift(&g, &cfg)?;
            let report = evaluate(&g, &c.labels, truth.as_ref())?;
            ClusteringDocument::for_medoid_shift(&g, &c, &cfg).with_metrics(report)
        }
    };
    write_output(args.output.as_deref(), &to_json(&doc.with_config(config))?)
}

fn sweep(args: &SweepArgs, threads: Option<usize>) -> Result<()> {
    let m = &args.method;
    let g = load_graph(&args.input)?;
    let truth = load_truth(&args.truth, args.input.format, &g)?;

    let (result, params): (SweepResult, Value) = match m.algo {
        Algo::Rms => {
            let (Some(lo), Some(hi)) = (args.k_min, args.k_max) else {
                return Err(usage("--algo rms needs --k-min and --k-max"));
            };
            if args.radii.is_some() || args.radius_steps.is_some() {
                return Err(usage("radii apply to --algo medoidshift"));
            }
            let base = rms_config(m, lo);
            let r = sweep_k(&g, lo..=hi, args.objective, truth.as_ref(), &base)?;
            (r, json!({ "k_min": lo, "k_max": hi }))
        }
        Algo::Medoidshift => {
            if args.k_min.is_some() {
                return Err(usage("--k-min/--k-max apply to --algo rms"));
            }
            let radii = match (&args.radii, args.radius_steps) {
                (Some(r), _) => r.clone(),
                (None, Some(steps)) => {
                    let d = distance_from_similarity(&similarity_for(&g), m.transform)?;
                    radius_grid(&d, steps)
                }
                (None, None) => {
                    return Err(usage("--algo medoidshift needs --radii or --radius-steps"))
                }
            };
            let base = ShiftConfig::new(0.0)
                .with_transform(m.transform)
                .with_kernel(m.kernel);
            let r = sweep_radius(&g, &radii, &base, args.objective, truth.as_ref())?;
            let listed: Vec<Value> = radii.iter().map(|&r| radius_value(r)).collect();
            (r, json!({ "radii": listed }))
        }
    };

    let config = merge(
        merge(
            json!({
                "command": "sweep",
                "input": args.input,
                "algo": m.algo,
                "objective": args.objective,
                "truth": args.truth,
                "timing": !args.no_timing,
                "threads": threads,
            }),
            method_config(m),
        ),
        params,
    );
    eprintln!("config: {config}");
    let best = result.best_row();
    eprintln!(
        "best: param={} clusters={} modularity={:.6}{}",
        best.param,
        best.clusters,
        best.modularity,
        best.nmi.map(|x| format!(" nmi={x:.6}")).unwrap_or_default()
    );
    write_output(args.output.as_deref(), &result.to_csv(!args.no_timing))
}

#[derive(Serialize)]
struct MetricsDocument {
    #[serde(flatten)]
    report: MetricsReport,
    config: Value,
}

fn metrics(args: &MetricsArgs, threads: Option<usize>) -> Result<()> {
    let g = load_graph(&args.input)?;
    let truth = load_truth(&args.truth, args.input.format, &g)?;
    let text = fs::read_to_string(&args.labels)
        .with_context(|| format!("reading {}", args.labels.display()))?;
    let doc: ClusteringDocument = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.labels.display()))?;
    let labels = doc
        .labels_for(&g)
        .with_context(|| format!("matching {} to the graph", args.labels.display()))?;
    let report = evaluate(&g, &labels, truth.as_ref())?;
    let out = MetricsDocument {
        report,
        config: json!({
            "command": "metrics",
            "input": args.input,
            "labels": args.labels,
            "truth": args.truth,
            "threads": threads,
        }),
    };
    write_output(args.output.as_deref(), &to_json(&out)?)
}

fn convert(args: &ConvertArgs) -> Result<()> {
    let g = load_graph(&args.input)?;
    write_output(args.output.as_deref(), &g.to_edge_list()?)
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    #[serde(flatten)]
    report: &'a rmsnet::harness::Report,
    config: Value,
}

fn reproduce(args: &ReproduceArgs, threads: Option<usize>) -> Result<()> {
    let report = reproduce_tables(&args.data_dir)?;
    for s in &report.skipped {
        warn!("skipped {}: {}", s.name, s.reason);
    }
    if let Some(dir) = &args.csv_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for d in &report.datasets {
            for (suffix, sweep) in [("k", &d.rms_sweep), ("radius", &d.baseline_sweep)] {
                if let Some(s) = sweep {
                    let path = dir.join(format!("{}-{suffix}.csv", d.name));
                    fs::write(&path, s.to_csv(false))
                        .with_context(|| format!("writing {}", path.display()))?;
                }
            }
        }
    }
    if let Some(path) = &args.json {
        let doc = ReportDocument {
            report: &report,
            config: json!({
                "command": "reproduce",
                "data_dir": args.data_dir,
                "threads": threads,
            }),
        };
        fs::write(path, to_json(&doc)?).with_context(|| format!("writing {}", path.display()))?;
    }
    write_output(args.output.as_deref(), &report.to_text())
}
