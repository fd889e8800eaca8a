use std::path::Path;

use anyhow::{bail, Context};
use isoreach::graph::{gen_diamond_stack, gen_grid, gen_random, Graph, Vertex};
use isoreach::metrics::{scaling_report, RunTrace, ScalingReport, SweepPoint};
use isoreach::numeric::WeightAssignment;
use isoreach::oracle::{bfs_reach, bounded_shortest_paths, brute_min_unique, MinUnique};
use isoreach::pipeline::{
    answer_for, build_weights_and_decide, check_min_unique, enumerate_stage, query_with_weights, round_bound,
    BuildOptions, CheckLog, Faults, Mode, RecordOptions, Session,
};
use serde::Serialize;

use crate::report::{Property, Report};
use crate::{BenchFamily, Cli, Command, Fault, GenFamily};

pub const PRIME_CAP_ENV: &str = "ISOREACH_PRIME_CAP";

pub fn run(cli: &Cli) -> anyhow::Result<bool> {
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let json = cli.json.as_deref();
    match &cli.command {
        Command::Gen { family, out, dot } => gen(family, out.as_deref(), *dot, echo, json),
        Command::Reach { file, s, t } => reach(file, *s, *t, cli.fault, echo, json),
        Command::Verify { file, max_enum_n } => verify(file, *max_enum_n, cli.fault, echo, json),
        Command::Bench { family, sizes, seed } => bench(*family, sizes, *seed, echo, json),
    }
}

fn prime_cap_override() -> anyhow::Result<Option<u64>> {
    match std::env::var(PRIME_CAP_ENV) {
        Ok(v) => {
            let cap: u64 = v
                .trim()
                .parse()
                .with_context(|| format!("{PRIME_CAP_ENV}={v:?} is not an integer"))?;
            if cap < 3 {
                bail!("{PRIME_CAP_ENV} must be at least 3");
            }
            Ok(Some(cap))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e).context(PRIME_CAP_ENV),
    }
}

fn build_options(fault: Option<Fault>, record: RecordOptions) -> anyhow::Result<BuildOptions> {
    Ok(BuildOptions {
        prime_cap: prime_cap_override()?,
        mode: Some(Mode::Guided),
        record,
        faults: Faults {
            corrupt_census: fault == Some(Fault::CorruptCensus),
        },
    })
}

fn read_graph(file: &Path) -> anyhow::Result<(Graph, Vec<u8>)> {
    let bytes = std::fs::read(file).with_context(|| format!("reading {}", file.display()))?;
    let text = std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", file.display()))?;
    let g = Graph::parse_edge_list(text).with_context(|| format!("parsing {}", file.display()))?;
    Ok((g, bytes))
}

fn unit_weights(g: &Graph, like: &WeightAssignment) -> anyhow::Result<WeightAssignment> {
    Ok(WeightAssignment::from_limbs(g.n(), like.base(), vec![vec![1]; g.m()])?)
}

#[derive(Serialize)]
struct GenBody {
    family: String,
    n: usize,
    m: usize,
}

fn gen(
    family: &GenFamily,
    out: Option<&Path>,
    dot: bool,
    echo: Vec<String>,
    json: Option<&Path>,
) -> anyhow::Result<bool> {
    let (g, label) = match *family {
        GenFamily::Random { n, m, seed } => (gen_random(n, m, seed)?, format!("random n={n} m={m} seed={seed}")),
        GenFamily::Grid { rows, cols } => (gen_grid(rows, cols)?, format!("grid {rows}x{cols}")),
        GenFamily::Diamond { layers } => (gen_diamond_stack(layers)?, format!("diamond {layers}")),
    };
    let mut text = if dot { g.to_dot() } else { g.serialize() };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Report::new(
        echo,
        text.as_bytes(),
        true,
        GenBody {
            family: label,
            n: g.n(),
            m: g.m(),
        },
    )
    .write(json)?;
    Ok(true)
}

#[derive(Serialize)]
struct ReachBody {
    n: usize,
    m: usize,
    s: Vertex,
    t: Vertex,
    reach: Option<bool>,
    bfs_reach: bool,
    q: Option<usize>,
    primes: Vec<u64>,
    base: Option<u64>,
    prime_cap: Option<u64>,
    bits_per_edge: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    weights: Option<WeightAssignment>,
    trace: Option<RunTrace>,
}

fn reach(
    file: &Path,
    s: Vertex,
    t: Vertex,
    fault: Option<Fault>,
    echo: Vec<String>,
    json: Option<&Path>,
) -> anyhow::Result<bool> {
    let (g, bytes) = read_graph(file)?;
    for v in [s, t] {
        if !g.contains_vertex(v) {
            bail!("vertex {v} is not in 1..={}", g.n());
        }
    }
    let opts = build_options(fault, RecordOptions::default())?;
    let bfs = bfs_reach(&g, s).contains(&t);
    let mut body = ReachBody {
        n: g.n(),
        m: g.m(),
        s,
        t,
        reach: None,
        bfs_reach: bfs,
        q: None,
        primes: Vec::new(),
        base: None,
        prime_cap: None,
        bits_per_edge: None,
        error: None,
        weights: None,
        trace: None,
    };
    let outcome = build_weights_and_decide(&g, s, t, &opts)
        .map_err(anyhow::Error::from)
        .and_then(|mut r| {
            if fault == Some(Fault::CorruptWeights) {
                let w = unit_weights(&g, &r.weights)?;
                let mut logs = Vec::new();
                r.reach = query_with_weights(&g, &w, s, t, &opts, r.prime_cap, &mut r.trace, &mut logs)?.within;
                r.weights = w;
            }
            Ok(r)
        });
    match outcome {
        Ok(r) => {
            body.reach = Some(r.reach);
            body.q = Some(r.q);
            body.primes = r.primes.clone();
            body.base = Some(r.base);
            body.prime_cap = Some(r.prime_cap);
            body.bits_per_edge = Some(r.bits_per_edge);
            body.weights = Some(r.weights);
            body.trace = Some(r.trace);
        }
        Err(e) => body.error = Some(format!("{e:#}")),
    }
    let pass = body.reach == Some(bfs);
    match (&body.error, body.reach) {
        (Some(e), _) => eprintln!("construction failed: {e}"),
        (None, Some(r)) if r != bfs => eprintln!("oracle mismatch: pipeline says {r}, BFS says {bfs} for {s} -> {t}"),
        _ => {}
    }
    if let Some(r) = body.reach {
        println!(
            "reach {s} -> {t}: {r} (BFS {bfs}); q = {}, primes {:?}, B = {}, {} bits per edge",
            body.q.unwrap_or(0),
            body.primes,
            body.base.unwrap_or(0),
            body.bits_per_edge.unwrap_or(0)
        );
    }
    Report::new(echo, &bytes, pass, body).write(json)?;
    Ok(pass)
}

#[derive(Serialize)]
struct VerifyBody {
    n: usize,
    m: usize,
    properties: Vec<Property>,
}

fn verify(
    file: &Path,
    max_enum_n: usize,
    fault: Option<Fault>,
    echo: Vec<String>,
    json: Option<&Path>,
) -> anyhow::Result<bool> {
    let (g, bytes) = read_graph(file)?;
    let properties = verify_properties(&g, max_enum_n, fault)?;
    for p in &properties {
        println!("{:<20} {}  {}", p.name, if p.pass { "PASS" } else { "FAIL" }, p.detail);
        for w in &p.witnesses {
            println!("{:<20}       {w}", "");
        }
    }
    let pass = properties.iter().all(|p| p.pass);
    Report::new(
        echo,
        &bytes,
        pass,
        VerifyBody {
            n: g.n(),
            m: g.m(),
            properties,
        },
    )
    .write(json)?;
    Ok(pass)
}

fn witness_text(m: &MinUnique) -> Option<String> {
    match m {
        MinUnique::Ok => None,
        MinUnique::Witness { u, v } => Some(format!("({u},{v})")),
    }
}

fn verify_properties(g: &Graph, max_enum_n: usize, fault: Option<Fault>) -> anyhow::Result<Vec<Property>> {
    let n = g.n();
    let full = n.saturating_sub(1);
    let enumerate = n <= max_enum_n;
    let opts = build_options(
        fault,
        RecordOptions {
            stages: true,
            calls: enumerate,
        },
    )?;
    let built = match build_weights_and_decide(g, 1, 1, &opts) {
        Ok(r) => r,
        Err(e) => return Ok(vec![Property::new("construction", false, format!("{e:#}"), Vec::new())]),
    };
    let weights = match fault {
        Some(Fault::CorruptWeights) => unit_weights(g, &built.weights)?,
        _ => built.weights.clone(),
    };
    let mut props = vec![Property::new(
        "construction",
        true,
        format!(
            "q = {}, primes {:?}, P_max {}, {} restarts",
            built.q, built.primes, built.prime_cap, built.trace.restarts
        ),
        Vec::new(),
    )];

    let final_check = brute_min_unique(g, &weights, full)?;
    props.push(Property::new(
        "min_unique",
        final_check.is_ok(),
        format!("exhaustive check of the weights at bound {full}"),
        witness_text(&final_check).into_iter().collect(),
    ));

    props.push(checker_agreement(g, &weights)?);
    props.push(census_correctness(g, &built.logs)?);
    props.push(lemma_bound(g, &weights)?);
    props.push(stage_bound(g, &built.logs));
    props.push(if enumerate {
        accepting_counts(g, &built.logs)
    } else {
        Property::new(
            "accepting_counts",
            true,
            format!("skipped: n = {n} exceeds {max_enum_n}"),
            Vec::new(),
        )
    });
    props.push(reach_vs_bfs(g, &weights, &opts, built.prime_cap));
    Ok(props)
}

// Pipeline checker against the exhaustive oracle, after every round and at
// the full bound. Only the full bound gates: below it the stepping census
// is exact for the paths it settles but not for every bounded path.
fn checker_agreement(g: &Graph, w: &WeightAssignment) -> anyhow::Result<Property> {
    let n = g.n();
    let full = n.saturating_sub(1);
    let mut cases: Vec<(WeightAssignment, usize)> =
        (1..=w.rounds()).map(|j| (w.truncate(j), round_bound(n, j))).collect();
    cases.push((w.clone(), full));
    let mut witnesses = Vec::new();
    let (mut gated_ok, mut info_ok, mut info_total) = (true, 0, 0);
    for (wj, bound) in &cases {
        let mut trace = RunTrace::default();
        let mut session = Session::new(g, wj, *bound, Mode::Guided, &mut trace);
        let pipeline = check_min_unique(&mut session)?;
        let oracle = brute_min_unique(g, wj, *bound)?;
        let agree = pipeline.bad != oracle.is_ok();
        if *bound >= full {
            gated_ok &= agree;
        } else {
            info_total += 1;
            info_ok += usize::from(agree);
        }
        if pipeline.bad || !oracle.is_ok() || !agree {
            let ours = pipeline.violation.map_or("none".into(), |(u, v)| format!("({u},{v})"));
            let theirs = witness_text(&oracle).unwrap_or_else(|| "none".into());
            witnesses.push(format!(
                "{} limbs, bound {bound}: pipeline {ours}, oracle {theirs}",
                wj.rounds()
            ));
        }
    }
    let detail = format!("agrees at bound {full}: {gated_ok}; below it {info_ok}/{info_total}");
    Ok(Property::new("checker_agreement", gated_ok, detail, witnesses))
}

fn census_correctness(g: &Graph, logs: &[CheckLog]) -> anyhow::Result<Property> {
    let full = g.n().saturating_sub(1);
    let (mut gated, mut gated_ok, mut info, mut info_ok) = (0, 0, 0, 0);
    let mut witnesses = Vec::new();
    for log in logs.iter().filter(|l| l.bound >= full || !l.bad) {
        let mut table = None;
        for stage in &log.stages {
            let c = &stage.census;
            if table
                .as_ref()
                .is_none_or(|t: &isoreach::oracle::DistTable| t.source != c.source)
            {
                table = Some(bounded_shortest_paths(g, &log.weights, c.source, c.bound)?);
            }
            let (count, sum) = table.as_ref().expect("table set").census(&c.radius)?;
            let ok = count == c.count && sum == c.sum;
            if log.bound >= full {
                gated += 1;
                gated_ok += usize::from(ok);
                if !ok {
                    witnesses.push(format!("{c}: oracle c = {count}, D = {sum}"));
                }
            } else {
                info += 1;
                info_ok += usize::from(ok);
            }
        }
    }
    let detail = format!("{gated_ok}/{gated} stages exact at bound {full}; {info_ok}/{info} at smaller bounds");
    Ok(Property::new(
        "census_correctness",
        gated_ok == gated,
        detail,
        witnesses,
    ))
}

fn lemma_bound(g: &Graph, w: &WeightAssignment) -> anyhow::Result<Property> {
    let n = g.n();
    let mut witnesses = Vec::new();
    let mut worst = 0;
    let mut rounds = 0;
    for j in 1..=w.rounds() {
        let wj = w.truncate(j);
        let l = round_bound(n, j);
        if !brute_min_unique(g, &wj, l)?.is_ok() {
            continue;
        }
        rounds += 1;
        for u in g.vertices() {
            let table = bounded_shortest_paths(g, &wj, u, (2 * l).min(n.saturating_sub(1)))?;
            for (v, e) in table.entries() {
                worst = worst.max(e.count);
                if e.count > n as u64 {
                    witnesses.push(format!("round {j}: {} min-weight paths {u} -> {v}", e.count));
                }
            }
        }
    }
    let detail = format!("{rounds} min-unique rounds; at most {worst} min-weight paths at doubled bound");
    Ok(Property::new("lemma_bound", witnesses.is_empty(), detail, witnesses))
}

fn stage_bound(g: &Graph, logs: &[CheckLog]) -> Property {
    let mut witnesses = Vec::new();
    let mut longest = 0;
    for log in logs {
        for run in log.stages.chunk_by(|a, b| a.census.source == b.census.source) {
            longest = longest.max(run.len());
            let increasing = run.iter().all(|s| s.next.finite().is_none_or(|k| k > &s.census.radius))
                && run.windows(2).all(|p| p[1].census.radius > p[0].census.radius);
            if run.len() > g.n() || !increasing {
                witnesses.push(format!(
                    "source {}: {} iterations, increasing {increasing}",
                    run[0].census.source,
                    run.len()
                ));
            }
        }
    }
    Property::new(
        "stage_bound",
        witnesses.is_empty(),
        format!("longest stepping loop {longest} (n = {})", g.n()),
        witnesses,
    )
}

// Gates on the full bound only, for the same reason as checker_agreement.
fn accepting_counts(g: &Graph, logs: &[CheckLog]) -> Property {
    let full = g.n().saturating_sub(1);
    let (mut total, mut unique, mut gated, mut gated_unique) = (0, 0, 0, 0);
    let mut witnesses = Vec::new();
    for log in logs {
        let gating = log.bound >= full;
        for calls in log.calls.chunk_by(|a, b| a.census == b.census) {
            let census = &calls[0].census;
            let out = enumerate_stage(g, &log.weights, census);
            for call in calls {
                total += 1;
                gated += usize::from(gating);
                let miss = match &out {
                    Ok(o)
                        if o.accepting_count == 1
                            && o.accepted_result.as_ref().map(|m| answer_for(m, call.vertex)).as_ref()
                                == Some(&call.answer) =>
                    {
                        unique += 1;
                        gated_unique += usize::from(gating);
                        continue;
                    }
                    Ok(o) => format!("{} accepting", o.accepting_count),
                    Err(e) => e.to_string(),
                };
                if gating {
                    witnesses.push(format!("v = {} at {census}: {miss}", call.vertex));
                }
            }
        }
    }
    let detail = format!(
        "{gated_unique}/{gated} calls at bound {full} with exactly one accepting path; {unique}/{total} over all bounds"
    );
    Property::new("accepting_counts", gated_unique == gated, detail, witnesses)
}

fn reach_vs_bfs(g: &Graph, w: &WeightAssignment, opts: &BuildOptions, prime_cap: u64) -> Property {
    let n = g.n();
    let sources: Vec<Vertex> = if n <= 12 {
        g.vertices().collect()
    } else {
        (1..=n).step_by(n.div_ceil(8)).collect()
    };
    let mut witnesses = Vec::new();
    let mut total = 0;
    for &s in &sources {
        let bfs = bfs_reach(g, s);
        for t in g.vertices() {
            total += 1;
            let mut trace = RunTrace::default();
            let mut logs = Vec::new();
            let opts = BuildOptions {
                record: RecordOptions::default(),
                ..opts.clone()
            };
            match query_with_weights(g, w, s, t, &opts, prime_cap, &mut trace, &mut logs) {
                Ok(a) if a.within == bfs.contains(&t) => {}
                Ok(a) => witnesses.push(format!("{s} -> {t}: pipeline {}, BFS {}", a.within, bfs.contains(&t))),
                Err(e) => witnesses.push(format!("{s} -> {t}: {e}")),
            }
        }
    }
    let detail = format!("{}/{total} queries agree with BFS", total - witnesses.len());
    Property::new("reach_vs_bfs", witnesses.is_empty(), detail, witnesses)
}

#[derive(Serialize)]
struct BenchBody {
    family: BenchFamily,
    seed: u64,
    report: ScalingReport,
}

fn bench_graph(family: BenchFamily, size: usize, seed: u64) -> anyhow::Result<Graph> {
    Ok(match family {
        BenchFamily::Random => {
            let m = (3 * size).min(size * size.saturating_sub(1));
            gen_random(size, m, seed.wrapping_add(size as u64))?
        }
        BenchFamily::Grid => {
            let side = ((size as f64).sqrt().round() as usize).max(1);
            gen_grid(side, side)?
        }
        BenchFamily::Diamond => gen_diamond_stack((size.saturating_sub(1) / 3).max(1))?,
    })
}

fn bench(
    family: BenchFamily,
    sizes: &[usize],
    seed: u64,
    echo: Vec<String>,
    json: Option<&Path>,
) -> anyhow::Result<bool> {
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        bail!("bench needs at least 4 distinct sizes, got {}", distinct.len());
    }
    let opts = build_options(None, RecordOptions::default())?;
    let mut points = Vec::new();
    for &size in &distinct {
        let g = bench_graph(family, size, seed)?;
        let r = build_weights_and_decide(&g, 1, g.n(), &opts)?;
        points.push(SweepPoint {
            n: g.n(),
            steps: r.trace.steps,
            peak_bits: r.trace.peak_register_bits,
        });
    }
    let report = scaling_report(&points)?;
    print!("{}", report.to_table());
    let pass = !report.drift_flagged;
    let input = format!("{family:?} {distinct:?} {seed}");
    Report::new(echo, input.as_bytes(), pass, BenchBody { family, seed, report }).write(json)?;
    Ok(pass)
}
