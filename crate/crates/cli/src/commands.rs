use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use polydisc::asymptotics as asy;
use polydisc::constructions as con;
use polydisc::diamgraph::{self, Graph};
use polydisc::geometry::{self, PointConfig};
use polydisc::io::{self, ConfigFile, TableRow};
use polydisc::kkt;
use polydisc::optimize::{self, OptimizeOptions, OptimizeResult};
use polydisc::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{AsymArgs, ConstructArgs, EvaluateArgs, Family, KktArgs, OptimizeArgs, TableArgs, TableFamily};

#[derive(Debug)]
pub struct CliError(Error);

impl CliError {
    /// 2 for bad input, 3 for I/O, 4 for numerical or feasibility failures.
    pub fn exit_code(&self) -> u8 {
        match self.0 {
            Error::InvalidInput(_) | Error::UnknownName(_) | Error::Singular(_) => 2,
            Error::Io(_) => 3,
            Error::Infeasible(_) | Error::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e)
    }
}

type Outcome = Result<u8, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError(Error::InvalidInput(msg.into())))
}

fn io_err(path: &Path, e: impl fmt::Display) -> CliError {
    CliError(Error::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn emit_config(file: &ConfigFile, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => file.write(p)?,
        None => print!("{}", file.to_json()),
    }
    Ok(())
}

fn value_meta(cfg: &PointConfig) -> Result<BTreeMap<String, Value>, CliError> {
    let log_dbar = geometry::log_normalized_discriminant(cfg, false)?;
    let mut meta = BTreeMap::new();
    meta.insert("log_delta_bar".into(), json!(log_dbar));
    meta.insert("delta_bar".into(), json!(log_dbar.exp()));
    if cfg.len() >= 2 {
        meta.insert("diameter".into(), json!(geometry::diameter(cfg)?));
    }
    Ok(meta)
}

fn need_n(a: &ConstructArgs) -> Result<usize, CliError> {
    a.n.map_or_else(|| usage(format!("--n is required for family {:?}", a.family)), Ok)
}

fn fixed_n(a: &ConstructArgs, n: usize) -> Result<(), CliError> {
    match a.n {
        Some(m) if m != n => usage(format!("family {:?} has exactly {n} points, got --n {m}", a.family)),
        _ => Ok(()),
    }
}

pub fn construct(a: &ConstructArgs) -> Outcome {
    let mut params = BTreeMap::new();
    let (name, cfg) = match a.family {
        Family::Regular => ("regular", con::regular_ngon(need_n(a)?)?),
        Family::Kite4 => {
            fixed_n(a, 4)?;
            ("kite4", con::kite4())
        }
        Family::Hexagon6 => {
            fixed_n(a, 6)?;
            ("hexagon6", con::hexagon6())
        }
        Family::Dodecagon12 => {
            fixed_n(a, 12)?;
            let d = con::dodecagon12();
            params.insert("alpha".to_string(), json!(d.alpha));
            params.insert("cos_alpha".to_string(), json!(d.cos_alpha));
            ("dodecagon12", d.config)
        }
        Family::Arc => {
            let n = need_n(a)?;
            if n == 0 || n % 6 != 0 {
                return usage(format!("arc polygon needs n divisible by 6, got {n}"));
            }
            params.insert("k".to_string(), json!(n / 6));
            ("arc", con::arc_polygon(n / 6)?.p)
        }
        Family::SparseArc => ("sparse-arc", con::sparse_arc(need_n(a)?)?),
        Family::Triwave => {
            let t = con::triwave(need_n(a)?, a.m, a.amplitude)?;
            params.insert("m".to_string(), json!(t.m_frequency));
            params.insert("amplitude".to_string(), json!(t.amplitude));
            ("triwave", t.config)
        }
    };
    let mut meta = value_meta(&cfg)?;
    meta.insert("family".into(), json!(name));
    if !params.is_empty() {
        meta.insert("params".into(), json!(params));
    }
    let file = ConfigFile::from_config(&cfg, meta);
    emit_config(&file, a.out.as_deref())?;
    if let Some(svg) = &a.svg {
        write_text(svg, &io::svg(&cfg, a.tol)?)?;
    }
    if a.out.is_some() {
        println!("{name}: n={} delta_bar={}", cfg.len(), file.meta["delta_bar"]);
    }
    Ok(0)
}

#[derive(Serialize)]
struct Evaluation {
    n: usize,
    diameter: f64,
    log_delta: f64,
    log_delta_bar: f64,
    delta_bar: f64,
    /// Δ̄ after rescaling to diameter 2.
    delta_bar_at_diameter_2: Option<f64>,
    diameter_graph: Option<String>,
    class: Option<diamgraph::GraphClass>,
    structure: Option<diamgraph::StructureReport>,
    kkt_residual: Option<f64>,
    kkt_passed: Option<bool>,
}

fn evaluation(cfg: &PointConfig, tol: f64) -> Result<Evaluation, CliError> {
    let rep = geometry::evaluate(cfg)?;
    let mut ev = Evaluation {
        n: rep.n,
        diameter: rep.diameter,
        log_delta: rep.log_delta,
        log_delta_bar: rep.log_delta_bar,
        delta_bar: rep.delta_bar,
        delta_bar_at_diameter_2: None,
        diameter_graph: None,
        class: None,
        structure: None,
        kkt_residual: None,
        kkt_passed: None,
    };
    if cfg.len() >= 2 && rep.diameter > 0.0 {
        ev.delta_bar_at_diameter_2 = Some(geometry::normalized_discriminant(cfg, true)?);
        let dg = diamgraph::extract(cfg, tol)?;
        ev.diameter_graph = Some(dg.graph.to_text());
        ev.class = Some(diamgraph::classify(&dg.graph));
    }
    if cfg.len() >= 2 && cfg.is_distinct() {
        ev.structure = Some(diamgraph::maximizer_structure_report(cfg, tol)?);
        let normalized = geometry::normalize_to_diameter(cfg, 2.0)?;
        let k = kkt::verify(&normalized, tol)?;
        ev.kkt_residual = Some(k.stationarity_residual);
        ev.kkt_passed = Some(k.passed);
    }
    Ok(ev)
}

pub fn evaluate(a: &EvaluateArgs) -> Outcome {
    let cfg = ConfigFile::read(&a.input)?.to_config()?;
    let ev = evaluation(&cfg, a.tol)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&ev).expect("serializable"));
        return Ok(0);
    }
    println!("n: {}", ev.n);
    println!("diameter: {}", ev.diameter);
    println!("log_delta: {}", ev.log_delta);
    println!("log_delta_bar: {}", ev.log_delta_bar);
    println!("delta_bar: {}", ev.delta_bar);
    if let Some(v) = ev.delta_bar_at_diameter_2 {
        println!("delta_bar_at_diameter_2: {v}");
    }
    if let (Some(g), Some(c)) = (&ev.diameter_graph, &ev.class) {
        println!("diameter_graph: {g}");
        match c.detail {
            Some(d) => println!("class: {} ({d})", c.kind),
            None => println!("class: {}", c.kind),
        }
    }
    match &ev.structure {
        Some(s) => {
            println!("edge_count_at_most_n: {}", s.edge_count_at_most_n);
            println!("min_degree_at_least_one: {}", s.min_degree_at_least_one);
            println!("connected: {}", s.connected);
            println!("no_even_cycle: {}", s.no_even_cycle);
            println!("pairwise_intersecting: {}", s.pairwise_intersecting);
            println!("convex_position: {}", s.convex_position);
            println!("class_allowed: {}", s.class_allowed);
            println!("structure_all_true: {}", s.all_true());
        }
        None => println!("structure: not applicable (fewer than two distinct points)"),
    }
    if let (Some(r), Some(p)) = (ev.kkt_residual, ev.kkt_passed) {
        println!("kkt_residual: {r:e}");
        println!("kkt_passed: {p}");
    }
    Ok(0)
}

fn result_meta(r: &OptimizeResult, a: &OptimizeArgs) -> BTreeMap<String, Value> {
    let active = Graph::new(r.n, r.active_set.iter().copied()).map(|g| g.to_text()).unwrap_or_default();
    let mut meta = BTreeMap::new();
    meta.insert("family".into(), json!("optimize"));
    meta.insert("seed".into(), json!(a.seed));
    meta.insert("starts".into(), json!(a.starts));
    meta.insert("max_iters".into(), json!(a.max_iters));
    meta.insert("log_delta_bar".into(), json!(r.log_delta_bar));
    meta.insert("delta_bar".into(), json!(r.delta_bar));
    meta.insert("termination".into(), json!(r.termination));
    meta.insert("iterations".into(), json!(r.iterations));
    meta.insert("kkt_residual".into(), json!(r.kkt_residual));
    meta.insert("best_start".into(), json!(r.best_start));
    meta.insert("active_set".into(), json!(active));
    if let Some(g) = &r.requested_graph {
        meta.insert("requested_graph".into(), json!(g.to_text()));
        meta.insert("graph_achieved".into(), json!(r.graph_achieved));
        meta.insert("infeasible_graph".into(), json!(r.infeasible_graph));
    }
    meta
}

fn write_traces(r: &OptimizeResult, path: &Path) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["start", "step", "objective"]).map_err(|e| io_err(path, e))?;
    for (s, trace) in r.traces.iter().flatten().enumerate() {
        for (k, v) in trace.iter().enumerate() {
            w.write_record([s.to_string(), k.to_string(), v.to_string()]).map_err(|e| io_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn optimize(a: &OptimizeArgs) -> Outcome {
    let opts = OptimizeOptions {
        seed: a.seed,
        starts: a.starts,
        max_iters: a.max_iters,
        keep_traces: a.trace_csv.is_some(),
        ..Default::default()
    };
    let result = if a.sweep {
        let sweep = optimize::sweep_graphs(a.n, &opts)?;
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        for (rank, e) in sweep.iter().enumerate() {
            let achieved = match e.result.graph_achieved {
                Some(true) => "achieved",
                _ => "not-achieved",
            };
            let _ = writeln!(out, "{:>3}  {:.9}  {achieved:<12}  {}", rank + 1, e.result.delta_bar, e.label);
        }
        match sweep.into_iter().next() {
            Some(e) => e.result,
            None => return usage(format!("no admissible graphs for n={}", a.n)),
        }
    } else if let Some(text) = &a.graph {
        let g = Graph::parse_text(text)?;
        optimize::maximize_with_graph(a.n, &g, &opts)?
    } else {
        optimize::maximize_free(a.n, &opts)?
    };
    let file = ConfigFile::from_config(&result.config, result_meta(&result, a));
    emit_config(&file, a.out.as_deref())?;
    if let Some(svg) = &a.svg {
        write_text(svg, &io::svg(&result.config, 1e-9)?)?;
    }
    if let Some(path) = &a.trace_csv {
        write_traces(&result, path)?;
    }
    if a.out.is_some() || a.sweep {
        println!(
            "n={} delta_bar={} termination={} kkt_residual={:e}",
            result.n,
            result.delta_bar,
            serde_json::to_value(result.termination).expect("serializable").as_str().unwrap_or("?"),
            result.kkt_residual
        );
        if let Some(ok) = result.graph_achieved {
            println!("requested graph achieved: {ok}");
        }
        if result.infeasible_graph {
            println!("requested graph infeasible");
        }
    }
    Ok(0)
}

fn family_value(f: TableFamily, n: usize, a: &TableArgs) -> Result<Option<f64>, CliError> {
    Ok(match f {
        TableFamily::Optimize if n >= 3 => {
            let opts = OptimizeOptions { seed: a.seed, starts: a.starts, ..Default::default() };
            Some(optimize::maximize_free(n, &opts)?.log_delta_bar)
        }
        TableFamily::Arc if n > 0 && n % 6 == 0 => {
            Some(geometry::log_normalized_discriminant(&con::arc_polygon(n / 6)?.p, true)?)
        }
        TableFamily::Triwave if n >= 8 && n % 2 == 0 => {
            Some(geometry::log_normalized_discriminant(&con::triwave(n, 3, None)?.config, true)?)
        }
        TableFamily::Regular if n >= 2 => Some(geometry::log_normalized_discriminant(&con::regular_ngon(n)?, true)?),
        _ => None,
    })
}

pub fn table(a: &TableArgs) -> Outcome {
    if a.n.is_empty() {
        return usage("--n needs at least one value");
    }
    if a.families.is_empty() {
        return usage("--families needs at least one value");
    }
    let mut rows = Vec::with_capacity(a.n.len());
    for &n in &a.n {
        let mut best: Option<f64> = None;
        for &f in &a.families {
            if let Some(v) = family_value(f, n, a)? {
                best = Some(best.map_or(v, |b| b.max(v)));
            }
        }
        let Some(log_dbar) = best else {
            return usage(format!("no requested family applies to n={n}"));
        };
        let section4 = if n % 6 == 0 {
            Some(geometry::normalized_discriminant(&con::arc_polygon(n / 6)?.p, true)?)
        } else {
            None
        };
        let nf = n as f64;
        rows.push(TableRow::new(n, log_dbar + nf * nf.ln(), section4));
    }
    match &a.out {
        Some(p) => io::write_table_file(&rows, p)?,
        None => io::write_table(&rows, std::io::stdout().lock())?,
    }
    Ok(0)
}

fn print_report(r: &asy::ConstantReport, as_json: bool) {
    if as_json {
        println!("{}", serde_json::to_string_pretty(r).expect("serializable"));
        return;
    }
    println!("{}: {}", r.name, r.closed_form_value);
    println!("  closed form: {}", r.closed_form_value);
    println!("  alt route:   {} [{}]", r.alt_route_value, r.alt_route);
    println!(
        "  discrepancy: {:.3e} (tolerance {:.0e}) {}",
        r.abs_discrepancy,
        r.tolerance,
        if r.passed() { "ok" } else { "FAILED" }
    );
}

pub fn asym(a: &AsymArgs) -> Outcome {
    if let Some(name) = &a.name {
        let r = asy::constant(name)?;
        print_report(&r, a.json);
        return Ok(if r.passed() { 0 } else { 4 });
    }
    if a.all {
        let mut ok = true;
        for r in asy::all_constants()? {
            print_report(&r, a.json);
            ok &= r.passed();
        }
        return Ok(if ok { 0 } else { 4 });
    }
    if let Some(v) = &a.converge {
        let regime = u8::try_from(v[0]).map_err(|_| CliError(Error::InvalidInput(format!("bad regime {}", v[0]))))?;
        let k = v[1];
        let value = asy::regime_product(regime, k)?;
        let limit = asy::regime_limit(regime)?;
        let out = json!({ "regime": regime, "k": k, "value": value, "limit": limit, "abs_diff": (value - limit).abs() });
        if a.json {
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        } else {
            println!("regime {regime}, k={k}: {value}");
            println!("  limit: {limit}");
            println!("  abs diff: {:.3e}", (value - limit).abs());
        }
        return Ok(0);
    }
    if let Some(v) = &a.rk {
        let (k, l) = (v[0], v[1]);
        let value = asy::rk_integral_check(k, l, 64)?;
        let expected = asy::rk_expected(k, l);
        let err = (value - expected).norm();
        if a.json {
            let out = json!({ "k": k, "l": l, "re": value.re, "im": value.im, "expected": expected, "abs_error": err });
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        } else {
            println!("R_{k} R_{l} integral: {} + {:.3e}i", value.re, value.im);
            println!("  expected: {expected}");
            println!("  abs error: {err:.3e}");
        }
        return Ok(if err < 1e-6 { 0 } else { 4 });
    }
    usage("nothing to compute")
}

pub fn kkt(a: &KktArgs) -> Outcome {
    let cfg = ConfigFile::read(&a.input)?.to_config()?;
    let normalized = geometry::normalize_to_diameter(&cfg, 2.0)?;
    let rep = kkt::verify(&normalized, a.tol)?;
    println!("{}", serde_json::to_string_pretty(&rep).expect("serializable"));
    Ok(0)
}
