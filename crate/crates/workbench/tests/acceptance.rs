//! End-to-end acceptance suite. Each test checks one criterion at full scale
//! and prints a single PASS/FAIL line with its timing.

mod common;
#[path = "../../core/tests/common/oracles.rs"]
mod oracles;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use perfchain::config::Configuration;
use perfchain::fixtures::{self, BERKELEY_MINI};
use perfchain::interp::{hotspot_view, measure_campaign};
use perfchain::lang::{parse_program, Domain, NodeId, OptionDecl, Span, Value};
use perfchain::model::{
    diff_influence, enumerate_configs, fit_campaign, fit_exact, FitSettings, Granularity, PerformanceInfluenceModel,
    Term,
};
use perfchain::profile_diff::{diff_hotspot_views, PresenceStatus};
use perfchain::seconds::{Seconds, NANOS_PER_UNIT};
use perfchain::slice::{build_dependence_graph, filter_by_coverage, ChopResult, Role};
use perfchain::testkit::{random_graph, random_program, ProgramShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use workbench::store::Versioned;

type Check = Result<String, String>;

/// Runs a criterion, prints its verdict and fails the test on FAIL.
fn criterion(name: &str, budget: Option<Duration>, body: impl FnOnce() -> Check) {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let result = match (result, budget) {
        (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.2?}, budget {b:?}")),
        (r, _) => r,
    };
    let line = match &result {
        Ok(detail) => format!("\nPASS  {name}  ({elapsed:.2?})  {detail}\n"),
        Err(why) => format!("\nFAIL  {name}  ({elapsed:.2?})  {why}\n"),
    };
    // Written past the test harness's capture so the verdict always shows.
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    if let Err(why) = result {
        panic!("{name}: {why}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[test]
fn berkeley_exact_fit() {
    criterion("berkeley exact fit", Some(Duration::from_secs(10)), || {
        let p = BERKELEY_MINI.program();
        let configs = enumerate_configs(&p.options, 1 << 10).map_err(|e| e.to_string())?;
        let recs = measure_campaign(&p, &configs).map_err(|e| e.to_string())?;
        let ms: Vec<_> = recs.iter().map(|r| (r.config.clone(), r.total_time())).collect();
        let base = Configuration::defaults(&p.options);
        let m = fit_exact(&p.options, &ms, &base, &FitSettings::default()).map_err(|e| e.to_string())?;
        let expected: BTreeMap<Term, f64> = [
            (Term::base(), 4.6),
            (Term::of_bools(&["Duplicates", "Transactions"]), 54.7),
            (Term::of_bools(&["Evict"]), 8.9),
            (Term::of_bools(&["Temporary"]), 3.5),
        ]
        .into_iter()
        .collect();
        ensure(!m.approximate, || "fit flagged approximate".into())?;
        let got: BTreeSet<&Term> = m.terms.keys().collect();
        let want: BTreeSet<&Term> = expected.keys().collect();
        ensure(got == want, || format!("terms {got:?}, expected {want:?}"))?;
        for (t, c) in &expected {
            let v = m.coefficient(t).as_secs_f64();
            ensure((v - c).abs() <= 1e-9, || format!("{t}: {v}, expected {c}"))?;
        }
        // The model must also reproduce the measurements it came from.
        for (c, t) in &ms {
            let own: f64 = expected.iter().filter(|(term, _)| term.is_active(c)).map(|(_, v)| v).sum();
            ensure((own - t.as_secs_f64()).abs() <= 1e-9, || format!("{c}: measured {t}, model {own}"))?;
        }
        Ok(format!("{m}"))
    });
}

fn check_local_sum(p: &perfchain::lang::Program, configs: &[Configuration], tag: &str) -> Result<usize, String> {
    let recs = measure_campaign(p, configs).map_err(|e| e.to_string())?;
    let base = Configuration::defaults(&p.options);
    let cm = fit_campaign(&p.options, &recs, &base, &FitSettings::default()).map_err(|e| format!("{tag}: {e}"))?;
    let mut terms: BTreeSet<&Term> = cm.global.terms.keys().collect();
    for m in cm.local.values() {
        terms.extend(m.terms.keys());
    }
    for t in &terms {
        let sum: f64 = cm.local.values().map(|m| m.coefficient(t).as_secs_f64()).sum();
        let global = cm.global.coefficient(t).as_secs_f64();
        ensure((sum - global).abs() <= 1e-6, || format!("{tag}: term {t}: locals sum to {sum}, global {global}"))?;
    }
    Ok(terms.len())
}

#[test]
fn local_models_sum_to_global() {
    criterion("local-sum property", Some(Duration::from_secs(60)), || {
        let p = BERKELEY_MINI.program();
        let mut checked = check_local_sum(&p, &enumerate_configs(&p.options, 1 << 10).unwrap(), "berkeley")?;
        let shape = ProgramShape {
            max_options: 6,
            max_functions: 10,
            ..ProgramShape::default()
        };
        let mut fn_counts = Vec::new();
        for seed in 0..50u64 {
            let p = parse_program(&random_program(1000 + seed, &shape)).map_err(|e| e.to_string())?;
            ensure(p.options.len() <= 6 && p.functions.len() <= 10, || format!("seed {seed}: shape exceeded"))?;
            fn_counts.push(p.functions.len());
            let configs = enumerate_configs(&p.options, 1 << 12).map_err(|e| e.to_string())?;
            checked += check_local_sum(&p, &configs, &format!("seed {seed} full"))?;
            // Also through the regression path on half of the space.
            let half: Vec<_> = configs.iter().step_by(2).cloned().collect();
            if half.len() >= 2 {
                checked += check_local_sum(&p, &half, &format!("seed {seed} sampled"))?;
            }
        }
        Ok(format!("{checked} term sums over berkeley and 50 programs (up to {} functions)", fn_counts.iter().max().unwrap()))
    });
}

#[test]
fn full_degree_exactness() {
    criterion("full-degree exactness", Some(Duration::from_secs(120)), || {
        let shape = ProgramShape {
            max_options: 8,
            enum_share: 0.0,
            ..ProgramShape::default()
        };
        let mut rows = 0;
        let mut widest = 0;
        for seed in 0..100u64 {
            let p = parse_program(&random_program(5000 + seed, &shape)).map_err(|e| e.to_string())?;
            ensure(p.options.iter().all(|o| o.domain == Domain::Bool), || format!("seed {seed}: non-binary option"))?;
            widest = widest.max(p.options.len());
            let configs = enumerate_configs(&p.options, 1 << 8).map_err(|e| e.to_string())?;
            let recs = measure_campaign(&p, &configs).map_err(|e| e.to_string())?;
            let ms: Vec<_> = recs.iter().map(|r| (r.config.clone(), r.total_time())).collect();
            let settings = FitSettings {
                max_degree: p.options.len(),
                ..FitSettings::default()
            };
            let m = fit_exact(&p.options, &ms, &Configuration::defaults(&p.options), &settings).map_err(|e| e.to_string())?;
            for (c, t) in &ms {
                let r = m.predict(c).map_err(|e| e.to_string())? - *t;
                ensure(r.is_zero(), || format!("seed {seed}: residual {r} at {c}"))?;
            }
            rows += ms.len();
        }
        Ok(format!("{rows} configurations, zero residual, up to {widest} options"))
    });
}

fn decl(name: String, domain: Domain) -> OptionDecl {
    let default = domain.values()[0].clone();
    OptionDecl {
        id: NodeId(0),
        span: Span::default(),
        name,
        domain,
        default,
    }
}

fn random_config(rng: &mut ChaCha8Rng, options: &[OptionDecl]) -> Configuration {
    options
        .iter()
        .map(|o| {
            let vs = o.domain.values();
            (o.name.clone(), vs[rng.random_range(0..vs.len())].clone())
        })
        .collect()
}

/// Prediction by direct evaluation of every term's factors.
fn evaluate(terms: &[(Vec<(String, Value)>, i64)], c: &Configuration) -> i64 {
    terms
        .iter()
        .filter(|(fs, _)| fs.iter().all(|(o, v)| c.get(o) == Some(v)))
        .map(|(_, k)| k)
        .sum()
}

#[test]
fn attribution_conservation() {
    criterion("attribution conservation", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xa77);
        for trial in 0..1000 {
            let options: Vec<OptionDecl> = (0..rng.random_range(1..7))
                .map(|i| {
                    let domain = match rng.random_range(0..3) {
                        0 => Domain::Enum(vec!["lo".into(), "mid".into(), "hi".into()]),
                        _ => Domain::Bool,
                    };
                    decl(format!("P{i}"), domain)
                })
                .collect();
            let base = random_config(&mut rng, &options);
            let mut raw: Vec<(Vec<(String, Value)>, i64)> = vec![(Vec::new(), rng.random_range(0..10_000_000_000))];
            let mut model = PerformanceInfluenceModel::constant(base.clone(), Granularity::Global, Seconds::from_nanos(raw[0].1));
            for _ in 0..rng.random_range(0..10) {
                let mut factors = Vec::new();
                for o in &options {
                    if rng.random_bool(0.4) {
                        let alts: Vec<Value> = o.domain.values().into_iter().filter(|v| Some(v) != base.get(&o.name)).collect();
                        factors.push((o.name.clone(), alts[rng.random_range(0..alts.len())].clone()));
                    }
                }
                let coef = rng.random_range(-50_000_000_000i64..50_000_000_000);
                let term = Term::new(
                    factors
                        .iter()
                        .map(|(o, v)| perfchain::model::Factor { option: o.clone(), value: v.clone() })
                        .collect(),
                )
                .expect("distinct options");
                if term.is_base() || coef == 0 || model.terms.contains_key(&term) {
                    continue;
                }
                model.terms.insert(term, Seconds::from_nanos(coef));
                raw.push((factors, coef));
            }
            let (from, to) = (random_config(&mut rng, &options), random_config(&mut rng, &options));
            let r = diff_influence(&model, &from, &to).map_err(|e| e.to_string())?;
            let expected = evaluate(&raw, &to) - evaluate(&raw, &from);
            let got: f64 = r.influences.iter().map(|i| i.delta.as_secs_f64()).sum();
            ensure((got - expected as f64 / 1e9).abs() <= 1e-9, || {
                format!("trial {trial}: deltas sum to {got}, predictions differ by {}", expected as f64 / 1e9)
            })?;
        }
        Ok("1000 triples".into())
    });
}

#[test]
fn chop_oracle_equivalence() {
    criterion("chop oracle equivalence", Some(Duration::from_secs(60)), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xc40);
        let mut largest = 0;
        let mut nonempty = 0;
        for trial in 0..200u64 {
            let n = rng.random_range(1..=200);
            let g = random_graph(9000 + trial, n, rng.random_range(0.5..3.0));
            largest = largest.max(g.nodes().len());
            let ids: Vec<NodeId> = g.nodes().iter().copied().collect();
            let pick = |rng: &mut ChaCha8Rng, p: f64| -> BTreeSet<NodeId> {
                ids.iter().copied().filter(|_| rng.random_bool(p)).collect()
            };
            let (s, t) = (pick(&mut rng, 0.05), pick(&mut rng, 0.05));
            let chop = g.chop(&s, &t).map_err(|e| e.to_string())?;
            let oracle = oracles::path_nodes(&g, &s, &t);
            ensure(chop == oracle, || format!("graph {trial}: chop {chop:?}, paths {oracle:?}"))?;
            nonempty += usize::from(!chop.is_empty());
            let cover = pick(&mut rng, 0.5);
            let filtered = filter_by_coverage(&chop, &cover);
            let intersection: BTreeSet<NodeId> = chop.iter().filter(|x| cover.contains(x)).copied().collect();
            ensure(filtered == intersection, || format!("graph {trial}: coverage filter differs from intersection"))?;
        }
        let mut fixture_pairs = 0;
        for fx in fixtures::ALL {
            let p = fx.program();
            let g = build_dependence_graph(&p);
            let ids: Vec<NodeId> = g.nodes().iter().copied().collect();
            let loads: BTreeSet<NodeId> = perfchain::lang::option_load_sites(&p).into_values().flatten().collect();
            for t in &ids {
                let targets = BTreeSet::from([*t]);
                let chop = g.chop(&loads, &targets).map_err(|e| e.to_string())?;
                ensure(chop == oracles::path_nodes(&g, &loads, &targets), || format!("{}: target {t}", fx.name))?;
                fixture_pairs += 1;
            }
        }
        Ok(format!("200 graphs (up to {largest} nodes, {nonempty} nonempty chops), {fixture_pairs} fixture chops"))
    });
}

#[test]
fn profile_diff_fidelity() {
    criterion("profile-diff fidelity", None, || {
        let p = BERKELEY_MINI.program();
        let named = BERKELEY_MINI.named_configs(&p).map_err(|e| e.to_string())?;
        let recs = measure_campaign(&p, &[named["default"].clone(), named["user"].clone()]).map_err(|e| e.to_string())?;
        let d = diff_hotspot_views(&hotspot_view(&recs[0]), &hotspot_view(&recs[1]));
        let put = d.entry("Cursor.put").ok_or("Cursor.put missing")?;
        ensure(put.status == PresenceStatus::Both && put.delta > Seconds::ZERO, || format!("Cursor.put: {put:?}"))?;
        ensure(put.stack_diff.is_unchanged(), || "Cursor.put stacks changed".into())?;
        let read = d.entry("FileManager.read").ok_or("FileManager.read missing")?;
        ensure(read.status == PresenceStatus::OnlyB, || format!("FileManager.read: {:?}", read.status))?;

        let shape = ProgramShape::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0xd1ff);
        for trial in 0..100u64 {
            let p = parse_program(&random_program(7000 + trial, &shape)).map_err(|e| e.to_string())?;
            let (a, b) = (random_config(&mut rng, &p.options), random_config(&mut rng, &p.options));
            let recs = measure_campaign(&p, &[a, b]).map_err(|e| e.to_string())?;
            let (va, vb) = (hotspot_view(&recs[0]), hotspot_view(&recs[1]));
            let ab = diff_hotspot_views(&va, &vb);
            let ba = diff_hotspot_views(&vb, &va);
            let total = recs[1].total_cost as i64 - recs[0].total_cost as i64;
            ensure(ab.self_delta_sum() == Seconds::from_nanos(total * NANOS_PER_UNIT), || {
                format!("pair {trial}: self deltas {} vs total delta {}", ab.self_delta_sum(), total)
            })?;
            for e in &ab.entries {
                let r = ba.entry(&e.function).ok_or_else(|| format!("pair {trial}: {} missing in reverse", e.function))?;
                ensure(r.delta == -e.delta, || format!("pair {trial}: {} not antisymmetric", e.function))?;
                let mirrored = match e.status {
                    PresenceStatus::Both => PresenceStatus::Both,
                    PresenceStatus::OnlyA => PresenceStatus::OnlyB,
                    PresenceStatus::OnlyB => PresenceStatus::OnlyA,
                };
                ensure(r.status == mirrored, || format!("pair {trial}: {} status", e.function))?;
                let ta = va.entry(&e.function).map_or(Seconds::ZERO, |x| x.total);
                let tb = vb.entry(&e.function).map_or(Seconds::ZERO, |x| x.total);
                ensure(e.delta == tb - ta, || format!("pair {trial}: {} delta", e.function))?;
            }
            ensure(ab.entries.len() == ba.entries.len(), || format!("pair {trial}: entry counts"))?;
        }
        Ok(format!("Cursor.put {:+.1} s same stacks, FileManager.read only_b; 100 pairs", put.delta))
    });
}

fn snapshot_files(ws: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut dirs = vec![ws.to_path_buf()];
    while let Some(d) = dirs.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                dirs.push(p);
            } else {
                out.insert(p.strip_prefix(ws).unwrap().display().to_string(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn pipeline_determinism() {
    criterion("pipeline determinism", None, || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut compared = 0;
        for fx in fixtures::ALL {
            let runs: Vec<_> = (0..2)
                .map(|i| {
                    let ws = dir.path().join(format!("{}-{i}", fx.name));
                    common::pipeline(&ws, fx.name, fx.good, fx.bad, Some((12, 42)));
                    snapshot_files(&ws)
                })
                .collect();
            let reports = runs[0].keys().filter(|k| k.starts_with("reports")).count();
            ensure(reports == 4, || format!("{}: {reports} report files", fx.name))?;
            ensure(runs[0].keys().eq(runs[1].keys()), || format!("{}: file sets differ", fx.name))?;
            for (name, bytes) in &runs[0] {
                ensure(&runs[1][name] == bytes, || format!("{}: {name} differs", fx.name))?;
                compared += 1;
            }
        }
        Ok(format!("{compared} files byte-identical across two runs"))
    });
}

#[test]
fn end_to_end_debugging_scenario() {
    criterion("end-to-end debugging scenario", None, || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut found = Vec::new();
        for fx in fixtures::ALL {
            let ws = dir.path().join(fx.name);
            common::pipeline(&ws, fx.name, fx.good, fx.bad, None);
            let path = ws.join("reports").join(format!("cause-effect_{}_{}.json", fx.good, fx.bad));
            let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
            let chop: Versioned<ChopResult> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let chop = chop.body;
            let role = chop.method_graph.role(fx.defect_function);
            ensure(matches!(role, Some(Role::Target | Role::Intermediate)), || {
                format!("{}: {} has role {role:?}", fx.name, fx.defect_function)
            })?;
            let defect = fx.defect_node(&fx.program());
            let highlighted = chop.highlights.get(fx.file).is_some_and(|hs| hs.iter().any(|h| h.node == defect));
            ensure(highlighted, || format!("{}: `{}` not highlighted", fx.name, fx.defect_statement))?;
            found.push(format!("{}: {} {:?}", fx.name, fx.defect_function, role.unwrap()));
        }
        Ok(found.join("; "))
    });
}
