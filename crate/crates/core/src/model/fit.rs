use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::lattice::Lattice;
use super::{Granularity, ModelError, PerformanceInfluenceModel, Residual};
use crate::config::Configuration;
use crate::interp::ExecutionRecord;
use crate::lang::OptionDecl;
use crate::seconds::Seconds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSettings {
    /// Highest interaction degree kept in a model.
    pub max_degree: usize,
    /// Coefficients smaller than this (in magnitude) are dropped.
    pub prune_below: Seconds,
    /// Stepwise regression stops once adding the best remaining term improves
    /// adjusted R² by less than this.
    pub min_adj_r2_gain: f64,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings {
            max_degree: 3,
            prune_below: Seconds::from_nanos(1),
            min_adj_r2_gain: 1e-3,
        }
    }
}

/// Exact model from a full-factorial measurement set.
///
/// Coefficients come from Möbius inversion over the lattice of deviations
/// from `base`. When the data contain interactions above `max_degree`, the
/// model is instead the least-squares fit over all terms up to `max_degree`
/// and is flagged approximate.
pub fn fit_exact(
    options: &[OptionDecl],
    measurements: &[(Configuration, Seconds)],
    base: &Configuration,
    settings: &FitSettings,
) -> Result<PerformanceInfluenceModel, ModelError> {
    let lat = Lattice::new(options, base)?;
    let rows = full_factorial_rows(&lat, options, measurements.iter().map(|(c, _)| c))?;
    let mut y = vec![0i64; lat.size()];
    for (&row, (_, t)) in rows.iter().zip(measurements) {
        y[row] = t.nanos();
    }
    let mut models = exact_models(&lat, vec![y], base, settings, vec![Granularity::Global]);
    Ok(models.remove(0))
}

/// Forward stepwise least squares over candidate terms up to `max_degree`.
/// Always flagged approximate, with the training residuals attached.
pub fn fit_sampled(
    options: &[OptionDecl],
    measurements: &[(Configuration, Seconds)],
    base: &Configuration,
    settings: &FitSettings,
) -> Result<PerformanceInfluenceModel, ModelError> {
    let lat = Lattice::new(options, base)?;
    let rows = sample_rows(&lat, options, measurements.iter().map(|(c, _)| c))?;
    let y: Vec<f64> = measurements.iter().map(|(_, t)| t.as_secs_f64()).collect();
    let candidates = candidate_terms(&lat, &rows, settings.max_degree);
    let selected = stepwise(&lat, &rows, &y, &candidates, settings.min_adj_r2_gain);
    let mut models = regression_models(
        &lat,
        &rows,
        &selected,
        vec![y],
        base,
        settings,
        vec![Granularity::Global],
    );
    Ok(models.remove(0))
}

/// Global and local models fitted from one campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignModels {
    pub global: PerformanceInfluenceModel,
    pub local: BTreeMap<String, PerformanceInfluenceModel>,
}

/// One local model per function appearing in any record, fitted on the
/// function's self time (zero in runs where it does not execute).
///
/// Full-factorial campaigns use exact inversion. Otherwise the term set is
/// chosen once by stepwise regression on total time and every function is
/// fitted on that same set, so local coefficients still sum to the global ones.
pub fn fit_local_models(
    options: &[OptionDecl],
    records: &[ExecutionRecord],
    base: &Configuration,
    settings: &FitSettings,
) -> Result<BTreeMap<String, PerformanceInfluenceModel>, ModelError> {
    Ok(fit_campaign(options, records, base, settings)?.local)
}

/// Fits the global model on total time and the local models on self time.
pub fn fit_campaign(
    options: &[OptionDecl],
    records: &[ExecutionRecord],
    base: &Configuration,
    settings: &FitSettings,
) -> Result<CampaignModels, ModelError> {
    let lat = Lattice::new(options, base)?;
    let functions: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.method_times.keys().map(String::as_str))
        .collect();
    let mut granularities = vec![Granularity::Global];
    granularities.extend(functions.iter().map(|f| Granularity::Local(f.to_string())));
    let series = |r: &ExecutionRecord| -> Vec<Seconds> {
        std::iter::once(r.total_time())
            .chain(functions.iter().map(|f| r.self_time(f)))
            .collect()
    };

    let configs = records.iter().map(|r| &r.config);
    let mut models = match full_factorial_rows(&lat, options, configs.clone()) {
        Ok(rows) => {
            let mut ys = vec![vec![0i64; lat.size()]; granularities.len()];
            for (&row, r) in rows.iter().zip(records) {
                for (k, t) in series(r).into_iter().enumerate() {
                    ys[k][row] = t.nanos();
                }
            }
            exact_models(&lat, ys, base, settings, granularities)
        }
        Err(ModelError::Config(e)) => return Err(ModelError::Config(e)),
        Err(_) => {
            let rows = sample_rows(&lat, options, configs)?;
            let mut ys = vec![Vec::with_capacity(rows.len()); granularities.len()];
            for r in records {
                for (k, t) in series(r).into_iter().enumerate() {
                    ys[k].push(t.as_secs_f64());
                }
            }
            let candidates = candidate_terms(&lat, &rows, settings.max_degree);
            let selected = stepwise(&lat, &rows, &ys[0], &candidates, settings.min_adj_r2_gain);
            regression_models(&lat, &rows, &selected, ys, base, settings, granularities)
        }
    };
    let global = models.remove(0);
    let local = functions
        .into_iter()
        .map(str::to_string)
        .zip(models)
        .collect();
    Ok(CampaignModels { global, local })
}

/// Re-expresses a model relative to another base configuration. Predictions
/// are unchanged for every configuration.
pub fn rebase(
    model: &PerformanceInfluenceModel,
    options: &[OptionDecl],
    new_base: &Configuration,
) -> Result<PerformanceInfluenceModel, ModelError> {
    let lat = Lattice::new(options, new_base)?;
    let mut y = Vec::with_capacity(lat.size());
    for code in 0..lat.size() {
        y.push(model.predict(&lat.config(code))?.nanos());
    }
    let settings = FitSettings {
        max_degree: lat.arity(),
        ..FitSettings::default()
    };
    let mut out = exact_models(&lat, vec![y], new_base, &settings, vec![model.granularity.clone()])
        .remove(0);
    out.approximate = model.approximate;
    out.residuals = model.residuals.clone();
    Ok(out)
}

/// Lattice code of every configuration, checking they form the full
/// factorial exactly once.
fn full_factorial_rows<'a>(
    lat: &Lattice,
    options: &[OptionDecl],
    configs: impl Iterator<Item = &'a Configuration>,
) -> Result<Vec<usize>, ModelError> {
    let mut seen = vec![false; lat.size()];
    let mut rows = Vec::new();
    for c in configs {
        c.validate(options)?;
        let code = lat.encode(c);
        if seen[code] {
            return Err(ModelError::DuplicateConfig(c.clone()));
        }
        seen[code] = true;
        rows.push(code);
    }
    let missing = lat.size() - rows.len();
    if missing > 0 {
        return Err(ModelError::IncompleteFactorial { missing });
    }
    Ok(rows)
}

fn sample_rows<'a>(
    lat: &Lattice,
    options: &[OptionDecl],
    configs: impl Iterator<Item = &'a Configuration>,
) -> Result<Vec<usize>, ModelError> {
    let mut rows = Vec::new();
    for c in configs {
        c.validate(options)?;
        rows.push(lat.encode(c));
    }
    let distinct: BTreeSet<usize> = rows.iter().copied().collect();
    if distinct.len() < 2 {
        return Err(ModelError::DegenerateDesign);
    }
    Ok(rows)
}

fn exact_models(
    lat: &Lattice,
    ys: Vec<Vec<i64>>,
    base: &Configuration,
    settings: &FitSettings,
    granularities: Vec<Granularity>,
) -> Vec<PerformanceInfluenceModel> {
    let mut coefs = ys.clone();
    for c in &mut coefs {
        lat.mobius(c);
    }
    let prune = settings.prune_below.nanos();
    let needs_truncation = |c: &Vec<i64>| {
        c.iter()
            .enumerate()
            .any(|(code, v)| v.abs() >= prune && lat.degree(code) > settings.max_degree)
    };
    let truncated: Vec<usize> = (0..coefs.len()).filter(|&k| needs_truncation(&coefs[k])).collect();

    let mut models: Vec<PerformanceInfluenceModel> = coefs
        .iter()
        .zip(granularities.iter())
        .map(|(c, g)| PerformanceInfluenceModel {
            base_config: base.clone(),
            granularity: g.clone(),
            approximate: false,
            terms: c
                .iter()
                .enumerate()
                .filter(|(_, v)| v.abs() >= prune)
                .map(|(code, v)| (lat.term(code), Seconds::from_nanos(*v)))
                .collect(),
            residuals: Vec::new(),
        })
        .collect();

    if !truncated.is_empty() {
        let rows: Vec<usize> = (0..lat.size()).collect();
        let terms = lat.terms_up_to(settings.max_degree);
        let sub_ys: Vec<Vec<f64>> = truncated
            .iter()
            .map(|&k| ys[k].iter().map(|&n| Seconds::from_nanos(n).as_secs_f64()).collect())
            .collect();
        let sub_g: Vec<Granularity> = truncated.iter().map(|&k| granularities[k].clone()).collect();
        let fitted = regression_models(lat, &rows, &terms, sub_ys, base, settings, sub_g);
        for (k, m) in truncated.into_iter().zip(fitted) {
            models[k] = m;
        }
    }
    models
}

/// Every term of degree `1..=max_degree` that is active in at least one
/// sampled configuration, ordered by degree then lattice code.
fn candidate_terms(lat: &Lattice, rows: &[usize], max_degree: usize) -> Vec<usize> {
    let mut out = BTreeSet::new();
    for &row in rows {
        let term = lat.term(row);
        let k = term.degree();
        for mask in 1u64..(1u64 << k) {
            if mask.count_ones() as usize > max_degree {
                continue;
            }
            let sub: Vec<_> = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| term.factors()[i].clone())
                .collect();
            let code = lat
                .code_of(&super::Term::from_sorted(sub))
                .expect("sub-term of a lattice term");
            out.insert((lat.degree(code), code));
        }
    }
    out.into_iter().map(|(_, c)| c).collect()
}

fn indicator(lat: &Lattice, rows: &[usize], term: usize) -> Vec<f64> {
    rows.iter()
        .map(|&r| if lat.activates(r, term) { 1.0 } else { 0.0 })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Greedy forward selection. Candidate columns are kept orthogonal to the
/// span of the selected ones, so each step costs one projection per candidate.
fn stepwise(lat: &Lattice, rows: &[usize], y: &[f64], candidates: &[usize], min_gain: f64) -> Vec<usize> {
    let n = rows.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let mut resid: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let sst = dot(&resid, &resid);
    let perfect = sst * 1e-15 + 1e-24;
    if sst <= perfect {
        return Vec::new();
    }
    let adjusted_r2 = |sse: f64, p: usize| -> f64 {
        if sse <= perfect {
            1.0
        } else if n - p as f64 - 1.0 <= 0.0 {
            f64::NEG_INFINITY
        } else {
            1.0 - (sse / (n - p as f64 - 1.0)) / (sst / (n - 1.0))
        }
    };

    // Orthogonalize every candidate against the intercept.
    let mut pool: Vec<(usize, Vec<f64>)> = candidates
        .iter()
        .map(|&t| {
            let mut col = indicator(lat, rows, t);
            let m = col.iter().sum::<f64>() / n;
            col.iter_mut().for_each(|v| *v -= m);
            (t, col)
        })
        .collect();
    let mut sse = sst;
    let mut selected = Vec::new();
    loop {
        let mut best: Option<(usize, f64, f64)> = None;
        for (k, (_, col)) in pool.iter().enumerate() {
            let norm2 = dot(col, col);
            if norm2 < 1e-9 {
                continue;
            }
            let proj = dot(col, &resid);
            let gain = proj * proj / norm2;
            if best.is_none_or(|(_, g, _)| gain > g * (1.0 + 1e-9) + 1e-24) {
                best = Some((k, gain, norm2));
            }
        }
        let Some((k, gain, norm2)) = best else { break };
        let new_sse = (sse - gain).max(0.0);
        let p = selected.len();
        if adjusted_r2(new_sse, p + 1) - adjusted_r2(sse, p) < min_gain {
            break;
        }
        let (term, col) = pool.swap_remove(k);
        let coef = dot(&col, &resid) / norm2;
        resid.iter_mut().zip(&col).for_each(|(r, c)| *r -= coef * c);
        sse = dot(&resid, &resid);
        let unit: Vec<f64> = col.iter().map(|c| c / norm2.sqrt()).collect();
        for (_, other) in &mut pool {
            let d = dot(other, &unit);
            other.iter_mut().zip(&unit).for_each(|(o, u)| *o -= d * u);
        }
        selected.push(term);
        if sse <= perfect {
            break;
        }
    }
    selected.sort_by_key(|&c| (lat.degree(c), c));
    selected
}

/// Least squares on a fixed term set (plus intercept) for several responses
/// sharing one design.
#[allow(clippy::too_many_arguments)]
fn regression_models(
    lat: &Lattice,
    rows: &[usize],
    terms: &[usize],
    ys: Vec<Vec<f64>>,
    base: &Configuration,
    settings: &FitSettings,
    granularities: Vec<Granularity>,
) -> Vec<PerformanceInfluenceModel> {
    let n = rows.len();
    let design = DMatrix::from_fn(n, terms.len() + 1, |i, j| {
        if j == 0 || lat.activates(rows[i], terms[j - 1]) {
            1.0
        } else {
            0.0
        }
    });
    let rhs = DMatrix::from_fn(n, ys.len(), |i, k| ys[k][i]);
    let solution = design
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-10)
        .expect("SVD computed with both factors");
    let prune = settings.prune_below;
    granularities
        .into_iter()
        .enumerate()
        .map(|(k, g)| {
            let mut model_terms = BTreeMap::new();
            for j in 0..=terms.len() {
                let coef = Seconds::from_secs_f64(solution[(j, k)]);
                if coef.abs() >= prune {
                    let term = if j == 0 {
                        super::Term::base()
                    } else {
                        lat.term(terms[j - 1])
                    };
                    model_terms.insert(term, coef);
                }
            }
            let mut model = PerformanceInfluenceModel {
                base_config: base.clone(),
                granularity: g,
                approximate: true,
                terms: model_terms,
                residuals: Vec::new(),
            };
            model.residuals = rows
                .iter()
                .enumerate()
                .map(|(i, &row)| {
                    let config = lat.config(row);
                    let predicted = model.predict(&config).expect("lattice configuration");
                    Residual {
                        config,
                        residual: Seconds::from_secs_f64(ys[k][i]) - predicted,
                    }
                })
                .collect();
            model
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_program, Domain, NodeId, Span, Value};
    use crate::model::{enumerate_configs, Term};

    fn bool_opts(names: &[&str]) -> Vec<OptionDecl> {
        names
            .iter()
            .map(|n| OptionDecl {
                id: NodeId(0),
                span: Span::default(),
                name: n.to_string(),
                domain: Domain::Bool,
                default: Value::Bool(false),
            })
            .collect()
    }

    fn secs(units: u64) -> Seconds {
        Seconds::from_units(units)
    }

    /// Berkeley-style ground truth in cost units.
    fn berkeley_units(c: &Configuration) -> u64 {
        let on = |o: &str| c.get(o) == Some(&Value::Bool(true));
        46 + if on("Duplicates") && on("Transactions") { 547 } else { 0 }
            + if on("Evict") { 89 } else { 0 }
            + if on("Temporary") { 35 } else { 0 }
    }

    fn berkeley() -> (Vec<OptionDecl>, Vec<(Configuration, Seconds)>) {
        let opts = bool_opts(&["Duplicates", "Transactions", "Evict", "Temporary"]);
        let ms = enumerate_configs(&opts, 1024)
            .unwrap()
            .into_iter()
            .map(|c| {
                let t = secs(berkeley_units(&c));
                (c, t)
            })
            .collect();
        (opts, ms)
    }

    #[test]
    fn hand_inverted_two_option_interaction() {
        let opts = bool_opts(&["Duplicates", "Transactions"]);
        let base = Configuration::defaults(&opts);
        let c = |d: bool, t: bool| base.clone().with("Duplicates", d).with("Transactions", t);
        let ms = vec![
            (c(false, false), secs(46)),
            (c(true, false), secs(46)),
            (c(false, true), secs(46)),
            (c(true, true), secs(593)),
        ];
        let m = fit_exact(&opts, &ms, &base, &FitSettings::default()).unwrap();
        // β_DT = y(TT) - y(TF) - y(FT) + y(FF) = 59.3 - 4.6 - 4.6 + 4.6
        assert_eq!(m.terms.len(), 2);
        assert_eq!(m.base(), Seconds::from_secs_f64(4.6));
        assert_eq!(
            m.coefficient(&Term::of_bools(&["Duplicates", "Transactions"])),
            Seconds::from_secs_f64(54.7)
        );
        assert!(!m.approximate);
    }

    #[test]
    fn constant_measurements_give_base_only() {
        let opts = bool_opts(&["A", "B", "C"]);
        let base = Configuration::defaults(&opts);
        let ms: Vec<_> = enumerate_configs(&opts, 8)
            .unwrap()
            .into_iter()
            .map(|c| (c, secs(7)))
            .collect();
        let m = fit_exact(&opts, &ms, &base, &FitSettings::default()).unwrap();
        assert_eq!(m.terms.len(), 1);
        assert_eq!(m.base(), secs(7));
    }

    #[test]
    fn berkeley_exact_model() {
        let (opts, ms) = berkeley();
        let base = Configuration::defaults(&opts);
        let m = fit_exact(&opts, &ms, &base, &FitSettings::default()).unwrap();
        assert_eq!(m.to_string(), "4.6 + 54.7·Duplicates·Transactions + 8.9·Evict + 3.5·Temporary");
        assert_eq!(m.terms.len(), 4);
    }

    #[test]
    fn exact_fit_errors() {
        let (opts, ms) = berkeley();
        let base = Configuration::defaults(&opts);
        let s = FitSettings::default();
        assert_eq!(
            fit_exact(&opts, &ms[..13], &base, &s).unwrap_err(),
            ModelError::IncompleteFactorial { missing: 3 }
        );
        let mut dup = ms.clone();
        dup[1] = dup[0].clone();
        assert!(matches!(fit_exact(&opts, &dup, &base, &s), Err(ModelError::DuplicateConfig(_))));
    }

    #[test]
    fn truncation_falls_back_to_least_squares() {
        let opts = bool_opts(&["A", "B", "C"]);
        let base = Configuration::defaults(&opts);
        let ms: Vec<_> = enumerate_configs(&opts, 8)
            .unwrap()
            .into_iter()
            .map(|c| {
                let all = c.iter().all(|(_, v)| *v == Value::Bool(true));
                (c, secs(if all { 80 } else { 10 }))
            })
            .collect();
        let exact = fit_exact(&opts, &ms, &base, &FitSettings { max_degree: 3, ..Default::default() }).unwrap();
        assert!(!exact.approximate);
        assert_eq!(exact.coefficient(&Term::of_bools(&["A", "B", "C"])), secs(70));
        let trunc = fit_exact(&opts, &ms, &base, &FitSettings { max_degree: 2, ..Default::default() }).unwrap();
        assert!(trunc.approximate);
        assert!(trunc.terms.keys().all(|t| t.degree() <= 2));
        assert_eq!(trunc.residuals.len(), 8);
    }

    #[test]
    fn sampled_matches_exact_on_full_factorial() {
        let (opts, ms) = berkeley();
        let base = Configuration::defaults(&opts);
        let s = FitSettings::default();
        let exact = fit_exact(&opts, &ms, &base, &s).unwrap();
        let sampled = fit_sampled(&opts, &ms, &base, &s).unwrap();
        assert!(sampled.approximate);
        assert_eq!(
            sampled.terms.keys().collect::<Vec<_>>(),
            exact.terms.keys().collect::<Vec<_>>()
        );
        for (t, c) in &exact.terms {
            assert!((sampled.coefficient(t) - *c).abs() <= Seconds::from_nanos(1000), "{t}");
        }
    }

    #[test]
    fn two_configs_single_option() {
        let opts = bool_opts(&["Duplicates", "Transactions", "Evict", "Temporary"]);
        let base = Configuration::defaults(&opts);
        let ms = vec![
            (base.clone(), Seconds::from_secs_f64(4.6)),
            (base.clone().with("Temporary", true), Seconds::from_secs_f64(8.1)),
        ];
        let m = fit_sampled(&opts, &ms, &base, &FitSettings::default()).unwrap();
        assert_eq!(m.to_string(), "4.6 + 3.5·Temporary");
        assert!(m.residuals.iter().all(|r| r.residual.is_zero()));
    }

    #[test]
    fn degenerate_design() {
        let opts = bool_opts(&["A"]);
        let base = Configuration::defaults(&opts);
        let ms = vec![(base.clone(), secs(1)), (base.clone(), secs(1))];
        assert_eq!(
            fit_sampled(&opts, &ms, &base, &FitSettings::default()).unwrap_err(),
            ModelError::DegenerateDesign
        );
    }

    #[test]
    fn half_sampled_linear_space_has_zero_residuals() {
        let opts = bool_opts(&["A", "B", "C", "D"]);
        let base = Configuration::defaults(&opts);
        let weights = [("A", 12u64), ("B", 30), ("C", 7), ("D", 51)];
        let ms: Vec<_> = enumerate_configs(&opts, 16)
            .unwrap()
            .into_iter()
            .step_by(2)
            .chain(enumerate_configs(&opts, 16).unwrap().into_iter().skip(5).step_by(4))
            .take(8)
            .map(|c| {
                let y = 20
                    + weights
                        .iter()
                        .filter(|(o, _)| c.get(o) == Some(&Value::Bool(true)))
                        .map(|(_, w)| w)
                        .sum::<u64>();
                (c, secs(y))
            })
            .collect();
        let m = fit_sampled(&opts, &ms, &base, &FitSettings::default()).unwrap();
        assert!(m.residuals.iter().all(|r| r.residual.is_zero()), "{m}");
    }

    #[test]
    fn rebase_preserves_predictions() {
        let (opts, ms) = berkeley();
        let base = Configuration::defaults(&opts);
        let m = fit_exact(&opts, &ms, &base, &FitSettings::default()).unwrap();
        let other = base.clone().with("Duplicates", true).with("Evict", true);
        let r = rebase(&m, &opts, &other).unwrap();
        assert_eq!(r.base_config, other);
        assert_ne!(r.terms, m.terms);
        for (c, _) in &ms {
            assert_eq!(r.predict(c).unwrap(), m.predict(c).unwrap());
        }
        assert_eq!(r.base(), m.predict(&other).unwrap());
    }

    #[test]
    fn local_models_sum_to_global() {
        let p = parse_program(
            "option A bool default false; option B bool default false;\n\
             fn main(){ work(1); if option(\"A\") { f(); } g(option(\"B\")); }\n\
             fn f(){ work(5); } fn g(b){ work(2); if b { work(3); f(); } }",
        )
        .unwrap();
        let base = Configuration::defaults(&p.options);
        let configs = enumerate_configs(&p.options, 16).unwrap();
        let recs = crate::interp::measure_campaign(&p, &configs).unwrap();
        let cm = fit_campaign(&p.options, &recs, &base, &FitSettings::default()).unwrap();
        assert!(!cm.global.approximate);
        let terms: BTreeSet<&Term> = cm.local.values().flat_map(|m| m.terms.keys()).collect();
        for t in terms.iter().chain(cm.global.terms.keys().collect::<Vec<_>>().iter()) {
            let sum: Seconds = cm.local.values().map(|m| m.coefficient(t)).sum();
            assert_eq!(sum, cm.global.coefficient(t), "{t}");
        }
        assert_eq!(cm.local["f"].coefficient(&Term::of_bools(&["A"])), secs(5));
        assert_eq!(cm.local["f"].coefficient(&Term::of_bools(&["A", "B"])), Seconds::ZERO);

        // Same property on a sample.
        let sample: Vec<_> = recs.iter().take(3).cloned().collect();
        let cm = fit_campaign(&p.options, &sample, &base, &FitSettings::default()).unwrap();
        assert!(cm.global.approximate);
        for t in cm.global.terms.keys() {
            let sum: Seconds = cm.local.values().map(|m| m.coefficient(t)).sum();
            assert!((sum - cm.global.coefficient(t)).abs() <= Seconds::from_nanos(1000));
        }
    }

    #[test]
    fn never_executed_function_has_empty_model() {
        let p = parse_program("option A bool default false; fn main(){ work(1); } fn unused(){ work(9); }").unwrap();
        let base = Configuration::defaults(&p.options);
        let configs = enumerate_configs(&p.options, 4).unwrap();
        let mut recs = crate::interp::measure_campaign(&p, &configs).unwrap();
        recs[0].method_times.insert("unused".into(), Default::default());
        let local = fit_local_models(&p.options, &recs, &base, &FitSettings::default()).unwrap();
        assert!(local["unused"].terms.is_empty());
        assert_eq!(local["main"].base(), secs(1));
    }
}
