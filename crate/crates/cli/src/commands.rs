//! One function per subcommand. Each writes its files under `out` and returns
//! the JSON summary it also stores there.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use bubblelab::correction::*;
use bubblelab::diagnostics::*;
use bubblelab::pohozaev::{check_resolution, dilation_identity, translation_identity, PohozaevConfig, SolutionView};
use bubblelab::profile::norm_star;
use bubblelab::quadrature::inequalities::{check_lemma_a1, check_lemma_a2, check_lemma_a3};
use bubblelab::quadrature::{compute_universal, derive_constants, QuadratureSpec};
use bubblelab::reduced::*;
use bubblelab::{Ansatz, Bubble, DimensionParams, Layout, PotentialSpec, WeightedNormParams};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use crate::params::Params;

pub type Res<T> = std::result::Result<T, Box<dyn std::error::Error>>;

/// Outer tolerance for the two trajectories of `diagnose`.
const PAIR_TOL: f64 = 1e-7;

fn write_json(out: &Path, name: &str, v: &Value) -> Res<()> {
    let f = File::create(out.join(name))?;
    serde_json::to_writer_pretty(BufWriter::new(f), v)?;
    Ok(())
}

fn write_csv<T: Serialize>(out: &Path, name: &str, rows: &[T]) -> Res<()> {
    let mut w = csv::Writer::from_path(out.join(name))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn dims(p: &Params) -> Res<DimensionParams> {
    Ok(DimensionParams::new(p.n)?)
}

fn mode(p: &Params) -> LatticeMode {
    if p.wrapped {
        LatticeMode::Wrapped
    } else {
        LatticeMode::Chain
    }
}

fn require_window(p: &Params) -> Res<()> {
    match feasibility_check(&dims(p)?, p.beta) {
        Feasibility::Accept => Ok(()),
        Feasibility::Reject { message, .. } => Err(format!("REJECT: {message}").into()),
    }
}

fn lattice(p: &Params) -> LatticeSpec {
    LatticeSpec { n: p.n, beta: p.beta, a: p.a, mu: p.mu, l: p.spacing(), count: p.m + 1, wrapped: p.wrapped }
}

fn correction_config(p: &Params) -> Res<CorrectionConfig> {
    let mut cfg = CorrectionConfig::new(WeightedNormParams::default_for(&dims(p)?, p.beta));
    cfg.pad = p.pad;
    cfg.q = p.q;
    cfg.h_max = p.h_max;
    cfg.tol = p.tol;
    Ok(cfg)
}

fn build(p: &Params) -> Res<(CorrectionConfig, Construction)> {
    require_window(p)?;
    let cfg = correction_config(p)?;
    let opts = OuterOptions { tol: p.outer_tol, ..Default::default() };
    let c = construct(&lattice(p), &cfg, &opts)?;
    Ok((cfg, c))
}

#[derive(Serialize)]
struct TraceRow {
    step: usize,
    size: f64,
    ratio: Option<f64>,
}

fn trace_rows(t: &Trace) -> Vec<TraceRow> {
    t.steps.iter().enumerate().map(|(k, &size)| TraceRow { step: k, size, ratio: k.checked_sub(1).and_then(|i| t.ratios.get(i).copied()) }).collect()
}

fn correction_summary(r: &CorrectionResult) -> Value {
    json!({
        "ll_norm": r.ll_norm,
        "phi_norm": r.phi_norm,
        "nl_norm": r.nl_norm,
        "multipliers": r.multipliers,
        "multiplier_certificate": r.multiplier_certificate(),
        "max_ratio_after_first": r.trace.max_ratio_after_first(),
        "negative_nodes": r.negative_nodes,
        "constraint_residual": r.constraint_residual,
        "trace": r.trace,
    })
}

fn bubbles(a: &Ansatz) -> Value {
    json!({
        "heights": a.bubbles.iter().map(|b| b.mu).collect::<Vec<_>>(),
        "centres": a.bubbles.iter().map(|b| b.center[0]).collect::<Vec<_>>(),
    })
}

#[derive(Serialize)]
struct HistoryRow {
    step: usize,
    bubble: usize,
    height: f64,
    centre: f64,
    max_multiplier: f64,
    certificate: f64,
}

fn construction_summary(c: &Construction) -> Value {
    let s = &c.solution;
    json!({
        "spec": c.spec,
        "clip_t": c.clip_t,
        "calibration_evals": c.calibration_evals,
        "certificate": s.certificate,
        "outer_steps": s.history.len(),
        "bubbles": bubbles(&s.ansatz),
        "correction": correction_summary(&s.correction),
    })
}

pub fn construct_cmd(p: &Params, out: &Path) -> Res<Value> {
    let (_, c) = build(p)?;
    let s = &c.solution;
    let mut rows = vec![];
    for (k, h) in s.history.iter().enumerate() {
        for j in 0..h.heights.len() {
            rows.push(HistoryRow { step: k, bubble: j, height: h.heights[j], centre: h.centres[j], max_multiplier: h.max_multiplier, certificate: h.certificate });
        }
    }
    write_csv(out, "history.csv", &rows)?;
    write_csv(out, "trace.csv", &trace_rows(&s.correction.trace))?;
    s.u.save(&out.join("u.field"))?;
    s.correction.phi.save(&out.join("phi.field"))?;
    let v = construction_summary(&c);
    write_json(out, "construct.json", &v)?;
    println!("clip t = {:.6}, certificate {:.3e} after {} outer steps", c.clip_t, s.certificate, s.history.len());
    Ok(v)
}

#[derive(Serialize)]
struct HeightRow {
    #[serde(rename = "L")]
    l: f64,
    mu: f64,
}

pub fn reduce_cmd(p: &Params, out: &Path) -> Res<Value> {
    let d = dims(p)?;
    let verdict = feasibility_check(&d, p.beta);
    if let Feasibility::Reject { message, .. } = &verdict {
        let v = json!({ "N": p.n, "beta": p.beta, "verdict": "REJECT", "message": message });
        write_json(out, "reduce.json", &v)?;
        println!("REJECT: {message}");
        return Ok(v);
    }
    let pot = PotentialSpec::new(p.a, p.beta, p.spacings[0])?;
    let univ = compute_universal(&d, &pot, &QuadratureSpec::default())?;
    let consts = derive_constants(&univ, &d, &pot)?;
    let fit = scaling_fit(&d, &consts, &p.spacings, p.m, mode(p))?;
    let rows: Vec<HeightRow> = fit.spacings.iter().zip(&fit.heights).map(|(&l, &mu)| HeightRow { l, mu }).collect();
    write_csv(out, "reduce.csv", &rows)?;
    let v = json!({ "N": p.n, "beta": p.beta, "verdict": "ACCEPT", "fit": fit });
    write_json(out, "reduce.json", &v)?;
    println!("slope {:.4} (predicted {:.4}), residual {:.2e}", fit.slope, fit.predicted_slope, fit.residual_max);
    Ok(v)
}

pub fn correct_cmd(p: &Params, out: &Path) -> Res<Value> {
    require_window(p)?;
    let spec = lattice(p);
    let a = match p.clip_t {
        Some(t) => spec.ansatz(t)?,
        None => {
            let pot = PotentialSpec::new(p.a, p.beta, spec.l)?;
            let layout = if p.wrapped { Layout::Wrapped { period: spec.count as f64 * spec.l } } else { Layout::Chain };
            Ansatz::lattice(dims(p)?, &vec![p.mu; spec.count], &vec![0.0; spec.count], pot, layout)?
        }
    };
    let cfg = correction_config(p)?;
    let (_, r) = contract(&a, &cfg)?;
    write_csv(out, "trace.csv", &trace_rows(&r.trace))?;
    r.phi.save(&out.join("phi.field"))?;
    let v = json!({ "spec": spec, "clip_t": p.clip_t, "correction": correction_summary(&r) });
    write_json(out, "correct.json", &v)?;
    println!(
        "‖l_L‖_** {:.4e}, ‖φ‖_* {:.4e}, max step ratio after the first {:.3e}, certificate {:.3e}",
        r.ll_norm,
        r.phi_norm,
        r.trace.max_ratio_after_first(),
        r.multiplier_certificate()
    );
    Ok(v)
}

pub fn pohozaev_cmd(p: &Params, out: &Path) -> Res<Value> {
    let (cfg, c) = build(p)?;
    let s = &c.solution;
    let view = SolutionView { ansatz: &s.ansatz, phi: &s.correction.phi };
    let mut balls = vec![];
    for j in 0..s.ansatz.bubbles.len() {
        let pc = PohozaevConfig::new(&s.ansatz, cfg.norms.tau, j)?;
        check_resolution(&s.correction.phi, s.ansatz.bubbles[j].center[0], pc.delta)?;
        let d = dilation_identity(&view, &s.ansatz, &pc)?;
        let t = translation_identity(&view, &s.ansatz, &pc)?;
        println!("ball {j}: dilation interaction/potential {:.4}, translation residual {:.3e}", d.balance_ratio(), t.residual);
        balls.push(json!({ "dilation": d, "balance_ratio": d.balance_ratio(), "translation": t }));
    }
    let v = json!({ "construction": construction_summary(&c), "balls": balls });
    write_json(out, "pohozaev.json", &v)?;
    Ok(v)
}

pub fn diagnose_cmd(p: &Params, out: &Path) -> Res<Value> {
    if p.n <= 6 {
        eprintln!("warning: N = {} <= 6; the uniqueness diagnostics have no guarantee behind them in this dimension", p.n);
    }
    let (cfg, c) = build(p)?;
    let s = &c.solution;
    let d = dims(p)?;
    let l = c.spec.l;
    let mut v = json!({ "construction": construction_summary(&c) });

    if p.wrapped && c.spec.count > 1 {
        let view = SolutionView { ansatz: &s.ansatz, phi: &s.correction.phi };
        let w = Window { y1_lo: 0.5 * l, y1_hi: 1.5 * l, r_max: p.pad.min(3.0) };
        let rep = periodicity_check(&view, s.correction.phi.grid(), &s.ansatz, &cfg.norms, l, w)?;
        println!("periodicity defect {:.3e} (relative {:.3e})", rep.defect, rep.relative);
        v["periodicity"] = json!(rep);
    }

    // a second pair of solutions from seeded perturbations of the heights
    let mut rng = StdRng::seed_from_u64(p.seed);
    let base = c.spec.ansatz(c.clip_t)?;
    let grid = s.correction.phi.grid().clone();
    let opts = OuterOptions { tol: PAIR_TOL, abs_tol: 0.0, fix_centres: p.wrapped, ..Default::default() };
    let mut pair = vec![];
    let mut starts = vec![];
    for _ in 0..2 {
        let mut a = base.clone();
        let h: Vec<f64> = (0..a.bubbles.len()).map(|_| p.mu * (1.0 + p.perturbation * rng.gen_range(-1.0..1.0))).collect();
        for (j, &mu) in h.iter().enumerate() {
            a.bubbles[j] = Bubble::on_axis(&d, j as f64 * l, mu)?;
        }
        pair.push(solve_full_on(&a, grid.clone(), &cfg, &opts)?);
        starts.push(h);
    }
    let un = norm_star(&pair[0].u, &pair[0].ansatz, &cfg.norms)?;
    let o = difference_quotient(&pair[0].u, &pair[1].u, &pair[0].ansatz, &cfg.norms, 0.0)?;
    let mut projections = vec![];
    let mut tail = Value::Null;
    if let PairOutcome::Distinct(q) = &o {
        let kb = KernelBasis::new(d);
        for j in 0..pair[0].ansatz.bubbles.len() {
            projections.push(kernel_projection(q.rescaled(&pair[0].ansatz, j)?, &kb, p.kernel_radius)?);
        }
        q.eta.save(&out.join("eta.field"))?;
        let core = p.kernel_radius / p.mu;
        let ann = Annulus { inner: (2.0 * core).max(0.15 * l), outer: 0.4 * l };
        let centres: Vec<f64> = pair[0].ansatz.bubbles.iter().map(|b| b.center[0]).collect();
        tail = match green_tail_fit(&q.eta, &d, pair[0].ansatz.layout, &centres, ann, core) {
            Ok(m) => json!(m),
            Err(e) => json!({ "error": e.to_string() }),
        };
    }
    let bmax = projections.iter().fold(0.0f64, |a, k| a.max(k.max_abs()));
    println!("pair: ‖u¹−u²‖_*/‖u‖_* {:.3e}, max|b| {:.3e}", o.diff_norm() / un, bmax);
    v["pair"] = json!({
        "seed": p.seed,
        "starting_heights": starts,
        "tolerance": PAIR_TOL,
        "fixed_centres": opts.fix_centres,
        "solutions": pair.iter().map(|s| bubbles(&s.ansatz)).collect::<Vec<_>>(),
        "diff_norm": o.diff_norm(),
        "relative_diff": o.diff_norm() / un,
        "verdict": format!("{:?}", o.verdict()),
        "kernel_radius": p.kernel_radius,
        "projections": projections,
        "max_b": bmax,
        "green_tail": tail,
    });

    let lemmas = [check_lemma_a1(p.samples, p.seed), check_lemma_a2(p.samples, p.seed.wrapping_add(1))?, check_lemma_a3(p.samples, p.seed.wrapping_add(2))];
    for r in &lemmas {
        println!("lemma {}: max ratio {:.4} against {:.4}: {}", r.lemma, r.measured_c, r.uniform_c, if r.pass { "PASS" } else { "FAIL" });
    }
    v["inequalities"] = json!(lemmas);
    write_json(out, "diagnose.json", &v)?;
    Ok(v)
}

pub fn nonexist_cmd(p: &Params, out: &Path) -> Res<Value> {
    let d = dims(p)?;
    let l = p.spacing();
    let pot = PotentialSpec::new(p.a, p.beta, l)?;
    let univ = compute_universal(&d, &pot, &QuadratureSpec::default())?;
    let st = LatticeState::new(p.m, l, p.mu, &d, LatticeMode::Chain)?;
    let r = nonexistence_probe(p.q0, &st, &univ, &d, &ProbeConfig::new(pot))?;
    let verdict = format!("{:?}", r.verdict).to_uppercase();
    println!("{verdict}: leading {:.4e}, largest competitor {:.4e}, dominance {:.1}", r.leading, r.largest_competitor(), r.dominance);
    let v = json!({ "verdict": verdict, "report": r });
    write_json(out, "nonexist.json", &v)?;
    Ok(v)
}

pub fn sweep_cmd(p: &Params, out: &Path) -> Res<Value> {
    let rows = run_sweep(&p.cases, &p.spacings, p.m, mode(p), &QuadratureSpec::default())?;
    write_sweep_csv(&rows, File::create(out.join("sweep.csv"))?)?;
    for (n, beta) in &p.cases {
        let r = rows.iter().find(|r| r.n == *n && r.beta == *beta);
        if let Some(r) = r {
            match r.slope {
                Some(s) => println!("N = {n}, beta = {beta}: {} slope {s:.4}", r.verdict),
                None => println!("N = {n}, beta = {beta}: {}", r.verdict),
            }
        }
    }
    let v = json!({ "rows": rows });
    write_json(out, "sweep.json", &v)?;
    Ok(v)
}
