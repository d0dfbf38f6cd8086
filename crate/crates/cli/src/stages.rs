use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use mbplan_core::hpo::{gon_sweep, optimize_network_powers, NetworkPowers, NetworkScenario, SpanOptimizer, TARGET_BBP};
use mbplan_core::network::Topology;
use mbplan_core::pep::{fit_loss_model, Direction, LaunchProfile, PepSolver};
use mbplan_core::physics::{ChannelGrid, SpanSpec};
use mbplan_core::report::sig6;
use mbplan_core::sim::{load_curve, run_seeds, throughput_at_bbp, write_curve_csv, write_events_jsonl};
use mbplan_core::units::lin_to_db;

use crate::config::RunConfig;

pub enum Failure {
    /// Bad flags, config or input files.
    Config(String),
    /// The pipeline itself failed.
    Compute(String),
}

impl From<mbplan_core::Error> for Failure {
    fn from(e: mbplan_core::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn create(out: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    std::fs::create_dir_all(out).map_err(|e| Failure::Compute(format!("{}: {e}", out.display())))?;
    let path = out.join(name);
    File::create(&path).map(BufWriter::new).map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))
}

fn csv_writer(out: &Path, name: &str, header: &[&str]) -> Result<csv::Writer<BufWriter<File>>, Failure> {
    let mut w = csv::Writer::from_writer(create(out, name)?);
    w.write_record(header).map_err(io)?;
    Ok(w)
}

fn io(e: impl std::fmt::Display) -> Failure {
    Failure::Compute(e.to_string())
}

struct Prepared {
    grid: ChannelGrid,
    fiber: std::sync::Arc<mbplan_core::FiberSpec>,
}

fn prepare(cfg: &RunConfig) -> Result<Prepared, Failure> {
    let grid = cfg.grid().map_err(Failure::Config)?;
    let fiber = cfg.fiber(&grid).map_err(Failure::Config)?;
    Ok(Prepared { grid, fiber })
}

fn span(cfg: &RunConfig, p: &Prepared) -> SpanSpec {
    SpanSpec::new(cfg.span.length_km, p.fiber.clone()).with_lumped_loss_db(cfg.span.lumped_loss_db)
}

pub fn grid(cfg: &RunConfig) -> Outcome {
    let p = prepare(cfg)?;
    let mut w = csv_writer(&cfg.out, "grid.csv", &["channel_idx", "band", "center_hz", "center_thz", "bandwidth_ghz"])?;
    for ch in p.grid.channels() {
        w.write_record([
            ch.index.to_string(),
            ch.band.to_string(),
            sig6(ch.center_hz),
            sig6(ch.center_hz / 1e12),
            sig6(ch.bandwidth_hz / 1e9),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(io)?;
    let per_band: Vec<String> =
        p.grid.bands().into_iter().map(|b| format!("{b} {}", p.grid.indices_in(b).count())).collect();
    Ok(format!("grid: {} channels ({})", p.grid.len(), per_band.join(", ")))
}

fn solve_pep(
    cfg: &RunConfig,
    p: &Prepared,
    direction: Direction,
) -> Result<mbplan_core::PowerEvolutionProfile, Failure> {
    let solver = PepSolver::new(&p.fiber, &p.grid)?;
    let boundary = LaunchProfile::flat_dbm(p.grid.len(), cfg.span.launch_dbm);
    Ok(solver.solve(&boundary, cfg.span.length_km * 1e3, direction, cfg.hpo.pep_step_m)?)
}

pub fn pep(cfg: &RunConfig, direction: Direction) -> Outcome {
    let p = prepare(cfg)?;
    let pep = solve_pep(cfg, &p, direction)?;
    let mut header = vec!["z_m".to_string()];
    header.extend((0..p.grid.len()).map(|i| format!("ch_{i}_dbm")));
    let mut w = csv::Writer::from_writer(create(&cfg.out, "pep.csv")?);
    w.write_record(&header).map_err(io)?;
    for (k, &z) in pep.z().iter().enumerate() {
        let mut row = vec![sig6(z)];
        row.extend(pep.row(k).iter().map(|&p| sig6(lin_to_db(p * 1e3))));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(io)?;
    let received = pep.received().to_dbm();
    let lo = received.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = received.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(format!("pep: {} samples over {} km, received {:.2}..{:.2} dBm", pep.n_samples(), cfg.span.length_km, lo, hi))
}

pub fn fit(cfg: &RunConfig) -> Outcome {
    let p = prepare(cfg)?;
    let pep = solve_pep(cfg, &p, Direction::Forward)?;
    let model = fit_loss_model(&pep, &p.grid)?;
    let mut w = csv_writer(
        &cfg.out,
        "fit.csv",
        &["channel_idx", "band", "center_hz", "alpha0_per_m", "alpha1_per_m", "sigma_per_m", "rms_db"],
    )?;
    for ch in p.grid.channels() {
        let i = ch.index;
        w.write_record([
            i.to_string(),
            ch.band.to_string(),
            sig6(ch.center_hz),
            sig6(model.alpha0[i]),
            sig6(model.alpha1[i]),
            sig6(model.sigma[i]),
            sig6(model.channel_rms_db[i]),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(format!("fit: worst channel RMS {:.4} dB, M = {}", model.fit_rms_error_db, model.m))
}

pub fn hpo_span(cfg: &RunConfig) -> Outcome {
    let p = prepare(cfg)?;
    let s = span(cfg, &p);
    let res = SpanOptimizer::new(&s, &p.grid, &cfg.transceiver)?.optimize(&cfg.hpo)?;
    let mut w = csv_writer(&cfg.out, "hpo_span_trace.csv", &["candidate_dbm", "tc_bps"])?;
    for &(dbm, tc) in &res.trace {
        w.write_record([sig6(dbm), sig6(tc)]).map_err(io)?;
    }
    w.flush().map_err(io)?;
    let mut w = csv_writer(
        &cfg.out,
        "hpo_span_profile.csv",
        &["channel_idx", "band", "center_hz", "launch_dbm", "received_dbm", "osnr_db", "gsnr_db"],
    )?;
    let (launch, received) = (res.launch_dbm(), res.received_dbm());
    for ch in p.grid.channels() {
        let i = ch.index;
        w.write_record([
            i.to_string(),
            ch.band.to_string(),
            sig6(ch.center_hz),
            sig6(launch[i]),
            sig6(received[i]),
            sig6(res.osnr_db[i]),
            sig6(res.gsnr_db[i]),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(io)?;
    let mut j = create(&cfg.out, "hpo_span.json")?;
    serde_json::to_writer_pretty(&mut j, &res).map_err(io)?;
    j.flush().map_err(io)?;
    Ok(format!(
        "hpo span {} {} km: optimum {:.2} dBm, TC {:.2} Tb/s after {} evaluations",
        res.mode,
        cfg.span.length_km,
        res.optimal_flat_power_dbm,
        res.total_capacity_bps / 1e12,
        res.trace.len()
    ))
}

fn network_powers(cfg: &RunConfig, p: &Prepared, topo: &Topology) -> Result<NetworkPowers, Failure> {
    Ok(optimize_network_powers(topo, &p.grid, p.fiber.clone(), &cfg.transceiver, &cfg.penalties, &cfg.hpo)?)
}

pub fn hpo_network(cfg: &RunConfig) -> Outcome {
    let p = prepare(cfg)?;
    let topo = cfg.topology().map_err(Failure::Config)?;
    let powers = network_powers(cfg, &p, &topo)?;
    let mut links = csv_writer(
        &cfg.out,
        "hpo_network_links.csv",
        &["link_idx", "a_id", "b_id", "spans", "avg_span_km", "optimal_flat_dbm", "tc_bps"],
    )?;
    let mut trace = csv_writer(&cfg.out, "hpo_network_trace.csv", &["link_idx", "candidate_dbm", "tc_bps"])?;
    let mut prof = csv_writer(
        &cfg.out,
        "hpo_network_profiles.csv",
        &["link_idx", "channel_idx", "launch_dbm", "received_dbm", "gsnr_db"],
    )?;
    for (li, (link, res)) in topo.links().iter().zip(&powers.per_link).enumerate() {
        links
            .write_record([
                li.to_string(),
                topo.node(link.a).id.to_string(),
                topo.node(link.b).id.to_string(),
                link.spans.len().to_string(),
                sig6(link.average_span_km()),
                sig6(res.optimal_flat_power_dbm),
                sig6(res.total_capacity_bps),
            ])
            .map_err(io)?;
        for &(dbm, tc) in &res.trace {
            trace.write_record([li.to_string(), sig6(dbm), sig6(tc)]).map_err(io)?;
        }
        let (launch, received) = (res.launch_dbm(), res.received_dbm());
        for i in 0..p.grid.len() {
            prof.write_record([
                li.to_string(),
                i.to_string(),
                sig6(launch[i]),
                sig6(received[i]),
                sig6(res.gsnr_db[i]),
            ])
            .map_err(io)?;
        }
    }
    links.flush().map_err(io)?;
    trace.flush().map_err(io)?;
    prof.flush().map_err(io)?;
    let opt: Vec<f64> = powers.per_link.iter().map(|r| r.optimal_flat_power_dbm).collect();
    let lo = opt.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = opt.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(format!("hpo network {}: {} links, optimum {:.2}..{:.2} dBm", powers.mode, topo.links().len(), lo, hi))
}

fn scenario<'a>(cfg: &'a RunConfig, p: &'a Prepared, topo: &'a Topology) -> NetworkScenario<'a> {
    NetworkScenario {
        topo,
        grid: &p.grid,
        fiber: p.fiber.clone(),
        trx: &cfg.transceiver,
        penalties: &cfg.penalties,
        k_paths: cfg.sim.k,
        pep_step_m: cfg.hpo.pep_step_m,
        sim: cfg.sim.engine(),
        demand_count: cfg.sim.demand_count,
        seeds: cfg.sim.seeds(),
    }
}

pub fn ccr(cfg: &RunConfig) -> Outcome {
    let p = prepare(cfg)?;
    let topo = cfg.topology().map_err(Failure::Config)?;
    let powers = network_powers(cfg, &p, &topo)?;
    let table = scenario(cfg, &p, &topo).ccr(&powers.launches())?;
    let mut w = create(&cfg.out, "ccr.csv")?;
    table.write_csv(&topo, &cfg.transceiver, &mut w)?;
    w.flush().map_err(io)?;
    let paths: usize = table.connections.iter().map(|c| c.paths.len()).sum();
    Ok(format!(
        "ccr {}: {} core pairs, {} paths, {} channels",
        powers.mode,
        table.connections.len(),
        paths,
        table.n_channels
    ))
}

pub fn simulate(cfg: &RunConfig) -> Outcome {
    let p = prepare(cfg)?;
    let topo = cfg.topology().map_err(Failure::Config)?;
    let powers = network_powers(cfg, &p, &topo)?;
    let sc = scenario(cfg, &p, &topo);
    let table = sc.ccr(&powers.launches())?;
    let outcomes = run_seeds(&topo, &p.grid, &table, &cfg.transceiver, &sc.sim, sc.demand_count, &sc.seeds)?;
    let curve = load_curve(&outcomes);
    let mut w = create(&cfg.out, "sim_curve.csv")?;
    write_curve_csv(&curve, &mut w)?;
    w.flush().map_err(io)?;
    let events = cfg.out.join("events");
    for (seed, o) in sc.seeds.iter().zip(&outcomes) {
        let mut w = create(&events, &format!("seed_{seed}.jsonl"))?;
        write_events_jsonl(&o.events, &mut w)?;
        w.flush().map_err(io)?;
    }
    let thr = throughput_at_bbp(&curve, TARGET_BBP)
        .map_or_else(|| "not reached".to_string(), |g| format!("{:.1} Tb/s", g / 1e3));
    let last = curve.last().map_or(0.0, |r| r.bbp_mean);
    Ok(format!(
        "simulate {} {} {}: {} seeds x {} demands, final BBP {:.4}, load at 1% BBP {thr}",
        powers.mode,
        sc.sim.modulation_policy,
        sc.sim.path_policy,
        sc.seeds.len(),
        sc.demand_count,
        last
    ))
}

pub fn gon(cfg: &RunConfig) -> Outcome {
    let p = prepare(cfg)?;
    let topo = cfg.topology().map_err(Failure::Config)?;
    let sc = scenario(cfg, &p, &topo);
    let rows = gon_sweep(&sc, &cfg.gon.powers())?;
    let mut w = csv_writer(
        &cfg.out,
        "gon_sweep.csv",
        &["power_dbm", "throughput_gbps", "final_bbp_mean", "lci_count_mean", "gsnr_mean_db"],
    )?;
    for r in &rows {
        w.write_record([
            sig6(r.power_dbm),
            r.throughput_gbps.map_or_else(String::new, sig6),
            sig6(r.final_bbp_mean),
            sig6(r.lci_count_mean),
            sig6(r.gsnr_mean_db),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(io)?;
    let best =
        rows.iter().filter_map(|r| r.throughput_gbps.map(|t| (r.power_dbm, t))).max_by(|a, b| a.1.total_cmp(&b.1));
    Ok(match best {
        Some((dbm, t)) => format!("gon-sweep: {} powers, best {dbm:.2} dBm at {:.1} Tb/s", rows.len(), t / 1e3),
        None => format!("gon-sweep: {} powers, 1% BBP not reached", rows.len()),
    })
}
