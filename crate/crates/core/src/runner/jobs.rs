use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::cache::phi_cached;
use super::record::{Record, RecordKind, Status};
use super::survey::{survey_erdos, survey_phi1, ErdosOptions, SurveyMode};
use super::{ConstructKind, Ctx, FourierMode, Job, SetSource, SurveyModeArg};
use crate::classify::{classify_phi1, instantiate, Phi1Tag};
use crate::construct::{
    coset_report, counter_report, interval_report, mersenne_report, sidon_report, union_report, ConstructionReport,
};
use crate::cover::{find_cover, theorem_odd_probe, verify_cover};
use crate::error::{Error, Result};
use crate::fourier::{
    binomial2, dft_indicator, doubling_stat, fourier_gap_check, idft, indicator_lambda, lambda_bound_check,
    lambda_form, Domain,
};
use crate::group::GroupSpec;
use crate::io::{parse_elem, parse_elem_list, parse_group_spec, parse_ratio, set_value};
use crate::phi::{phi_at_most_with, phi_exact_with, torsion_free_probe, SolverOptions};
use crate::set::ElemSet;
use crate::subgroup::Subgroup;

/// Identities must hold to this tolerance.
const IDENTITY_TOL: f64 = 1e-10;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn check_status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn need<'a, T>(v: &'a Option<T>, field: &str, what: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::usage(format!("{what} requires `{field}`")))
}

impl Ctx<'_> {
    fn solver(&self) -> SolverOptions {
        SolverOptions { threads: self.config.threads, node_limit: self.config.budgets.node_limit }
    }

    fn load(&self, s: &SetSource) -> Result<ElemSet> {
        s.load(self.base)
    }

    fn check_tuples(&self, order: usize, k: usize) -> Result<()> {
        let tuples = (order as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
        if tuples > self.config.budgets.tuple_limit {
            return Err(Error::capability(format!(
                "|H|^k = {order}^{k} exceeds the configured tuple limit {}",
                self.config.budgets.tuple_limit
            )));
        }
        Ok(())
    }
}

pub(super) fn run_job(ctx: &Ctx, idx: usize, job: &Job) -> Result<Vec<Record>> {
    let op = job.op();
    let result = |status: Status, data: Value| Record::new(idx, op, RecordKind::Result, status, data);
    let summary = |status: Status, data: Value| Record::new(idx, op, RecordKind::Summary, status, data);
    match job {
        Job::Phi { set, at_most, witness } => {
            let a = ctx.load(set)?;
            let opts = ctx.solver();
            let (data, nodes) = match at_most {
                Some(k) => {
                    let r = phi_at_most_with(&a, *k, &opts)?;
                    let d = json!({
                        "set": set_value(&a), "size": a.len(), "k": k, "holds": r.holds,
                        "refutation": r.refutation.as_ref().map(set_value),
                    });
                    (d, Some(r.nodes_explored))
                }
                None if !*witness && ctx.cache.is_some() => {
                    let phi = phi_cached(ctx.cache, &a, &opts)?;
                    (json!({ "set": set_value(&a), "size": a.len(), "phi": phi }), None)
                }
                None => {
                    let r = phi_exact_with(&a, &opts)?;
                    let mut d = json!({ "set": set_value(&a), "size": a.len(), "phi": r.phi });
                    if *witness {
                        d["witness"] = set_value(&r.witness);
                    }
                    (d, Some(r.nodes_explored))
                }
            };
            let mut rec = result(Status::Ok, data);
            if let Some(n) = nodes {
                rec = rec.with_metrics(json!({ "nodes_explored": n }));
            }
            Ok(vec![rec])
        }
        Job::Classify { set } => {
            let a = ctx.load(set)?;
            let t = classify_phi1(&a);
            let phi = phi_exact_with(&a, &ctx.solver())?.phi;
            let (status, round_trip) = match t.tag() {
                Phi1Tag::NotPhi1 => (check_status(phi != 1), None),
                _ => {
                    let ok = instantiate(&t, a.group())? == a;
                    (check_status(ok && phi == 1), Some(ok))
                }
            };
            let data = json!({
                "set": set_value(&a), "phi": phi, "tag": t.tag(), "parameter": t.parameter(), "round_trip": round_trip,
            });
            Ok(vec![result(status, data)])
        }
        Job::Construct { kind, n, k, h, group, target, seed, density, gens, x, subgroups, check } => {
            let what = format!("construct {kind:?}").to_lowercase();
            let seeds = || -> Result<Vec<u64>> {
                Ok(match seed {
                    Some(s) => s.values()?.into_iter().map(u64::from).collect(),
                    None => vec![ctx.config.seed],
                })
            };
            let group_of = || -> Result<GroupSpec> { parse_group_spec(need(group, "group", &what)?) };
            let items: Vec<Result<ConstructionReport>> = match kind {
                ConstructKind::Counter => need(n, "n", &what)?.values()?.into_iter().map(counter_report).collect(),
                ConstructKind::Interval => need(n, "n", &what)?.values()?.into_iter().map(interval_report).collect(),
                ConstructKind::Mersenne => {
                    let hg = match h {
                        Some(t) => parse_group_spec(t)?,
                        None => GroupSpec::trivial(),
                    };
                    need(k, "k", &what)?.values()?.into_iter().map(|k| mersenne_report(k, &hg)).collect()
                }
                ConstructKind::Sidon => {
                    let g = group_of()?;
                    let t = target.unwrap_or(usize::MAX);
                    seeds()?.into_iter().map(|s| Ok(sidon_report(&g, t, s))).collect()
                }
                ConstructKind::Coset => {
                    let g = group_of()?;
                    let hsub = Subgroup::generated(&g, &parse_elem_list(&g, need(gens, "gens", &what)?)?)?;
                    let xe = parse_elem(&g, need(x, "x", &what)?)?;
                    let d = density.unwrap_or(0.5);
                    seeds()?.into_iter().map(|s| coset_report(&hsub, &xe, d, s)).collect()
                }
                ConstructKind::Union => {
                    let g = group_of()?;
                    let subs = need(subgroups, "subgroups", &what)?
                        .iter()
                        .map(|s| Subgroup::generated(&g, &parse_elem_list(&g, s)?))
                        .collect::<Result<Vec<_>>>()?;
                    vec![union_report(&subs)]
                }
            };
            let mut out = Vec::new();
            let (mut passed, mut failed, mut skipped) = (0, 0, 0);
            for item in items {
                match item {
                    Ok(report) => {
                        let ok = report.all_verified();
                        let status = if *check { check_status(ok) } else { Status::Ok };
                        passed += (*check && ok) as usize;
                        failed += (*check && !ok) as usize;
                        out.push(result(status, to_value(&report)));
                    }
                    Err(Error::Usage(msg)) => {
                        skipped += 1;
                        out.push(Record::new(idx, op, RecordKind::Error, Status::Error, json!({ "error": msg })));
                    }
                    Err(e) => return Err(e),
                }
            }
            let status = if failed > 0 { Status::Fail } else { Status::Ok };
            out.push(summary(
                status,
                json!({ "kind": kind, "count": out.len(), "passed": passed, "failed": failed, "skipped": skipped }),
            ));
            Ok(out)
        }
        Job::Cover { set, k, c_max } => {
            let a = ctx.load(set)?;
            let cm = c_max.as_deref().map(parse_ratio).transpose()?;
            match find_cover(&a, *k, cm, ctx.config.budgets.enumeration_bound)? {
                Some(cert) => {
                    let ok = verify_cover(&a, &cert)?;
                    let data = json!({ "found": true, "certificate": cert.summary(), "verified": ok });
                    Ok(vec![result(check_status(ok), data)])
                }
                None => Ok(vec![result(Status::Ok, json!({ "found": false, "k": k, "c_max": c_max }))]),
            }
        }
        Job::OddProbe { set, eps } => {
            let a = ctx.load(set)?;
            let r = theorem_odd_probe(&a, *eps, ctx.config.budgets.enumeration_bound)?;
            Ok(vec![result(Status::Ok, to_value(&r))])
        }
        Job::Fourier { mode, set, h, group, k, horizon, eps1, samples, seed } => {
            fourier_job(ctx, *mode, set, h, group, *k, *horizon, *eps1, *samples, *seed)
                .map(|(s, d)| vec![result(s, d)])
        }
        Job::SurveyPhi1 { group } => {
            let g = parse_group_spec(group)?;
            let (records, s) = survey_phi1(&g, ctx.cache)?;
            let mut out: Vec<Record> =
                records.iter().map(|r| result(check_status(r.consistent), to_value(r))).collect();
            out.push(summary(check_status(s.inconsistent == 0), to_value(&s)));
            Ok(out)
        }
        Job::SurveyErdos { group, k, min_size, mode, samples, seed, include, with_cover } => {
            let g = parse_group_spec(group)?;
            let mut opts = ErdosOptions::new(*k, *min_size);
            opts.mode = match mode {
                SurveyModeArg::Auto => SurveyMode::Auto,
                SurveyModeArg::Exhaustive => SurveyMode::Exhaustive,
                SurveyModeArg::Sampled => SurveyMode::Sampled,
            };
            if let Some(s) = samples {
                opts.samples = *s;
            }
            opts.seed = seed.unwrap_or(ctx.config.seed);
            opts.include = include.iter().map(|s| ctx.load(s)).collect::<Result<_>>()?;
            opts.with_cover = *with_cover;
            opts.enumeration_bound = ctx.config.budgets.enumeration_bound;
            opts.solver = ctx.solver();
            let (records, s) = survey_erdos(&g, &opts, ctx.cache)?;
            let mut out: Vec<Record> = records.iter().map(|r| result(Status::Ok, to_value(r))).collect();
            out.push(summary(Status::Ok, to_value(&s)));
            Ok(out)
        }
        Job::TorsionFree { n } => {
            let ns: Vec<u64> = n.values()?.into_iter().map(u64::from).collect();
            let samples = torsion_free_probe(&ns)?;
            let mut out = Vec::new();
            let mut csv = String::from("n,phi,log2_n\n");
            for s in &samples {
                csv.push_str(&format!("{},{},{:.6}\n", s.n, s.phi, s.log2_n));
                out.push(result(
                    Status::Ok,
                    json!({ "n": s.n, "modulus": s.modulus, "phi": s.phi, "log2_n": s.log2_n,
                            "phi_over_log2_n": if s.n > 1 { s.phi as f64 / s.log2_n } else { 0.0 } }),
                ));
            }
            out.push(summary(Status::Ok, json!({ "count": samples.len(), "csv": csv })));
            Ok(out)
        }
    }
}

fn subgroup_for(ctx: &Ctx, a_group: &GroupSpec, h: &Option<SetSource>) -> Result<Subgroup> {
    match h {
        Some(src) => {
            let hs = ctx.load(src)?;
            a_group.check_same(hs.group())?;
            Subgroup::new(hs)
        }
        None => Ok(Subgroup::whole(a_group)),
    }
}

/// Uniform values in `[-1, 1]`, one function per entry of `count`.
pub(crate) fn random_functions(rng: &mut ChaCha8Rng, len: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect()
}

#[allow(clippy::too_many_arguments)]
fn fourier_job(
    ctx: &Ctx,
    mode: FourierMode,
    set: &Option<SetSource>,
    h: &Option<SetSource>,
    group: &Option<String>,
    k: Option<usize>,
    horizon: Option<u32>,
    eps1: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
) -> Result<(Status, Value)> {
    let k = k.unwrap_or(3);
    let with_set = |what: &str| -> Result<(ElemSet, Subgroup)> {
        let a = ctx.load(need(set, "set", what)?)?;
        let hsub = subgroup_for(ctx, a.group(), h)?;
        Ok((a, hsub))
    };
    match mode {
        FourierMode::Dft => {
            let (a, hsub) = with_set("fourier dft")?;
            let d = Domain::subgroup(&hsub)?;
            let t = dft_indicator(&d, &a)?;
            let f = d.indicator(&a)?;
            let back = idft(&d, &t)?;
            let inversion = f.iter().zip(&back).map(|(x, y)| (y - x).norm()).fold(0.0, f64::max);
            let mean_sq = f.iter().map(|v| v * v).sum::<f64>() / d.len() as f64;
            let plancherel = (t.energy() - mean_sq).abs();
            let coeffs: Vec<[f64; 2]> = t.coeffs.iter().map(|c| [c.re, c.im]).collect();
            let ok = inversion <= IDENTITY_TOL && plancherel <= IDENTITY_TOL;
            Ok((
                check_status(ok),
                json!({
                    "order": d.len(), "density": t.source_density, "characters": d.characters(),
                    "coeffs": coeffs, "sup_nonzero": t.sup_nonzero(),
                    "plancherel_error": plancherel, "inversion_error": inversion,
                }),
            ))
        }
        FourierMode::Doubling => {
            let (a, hsub) = with_set("fourier doubling")?;
            Ok((Status::Ok, to_value(&doubling_stat(&a, &hsub)?)))
        }
        FourierMode::Gap => {
            let (a, hsub) = with_set("fourier gap")?;
            let r = fourier_gap_check(&a, &hsub, eps1, horizon.unwrap_or(10))?;
            Ok((check_status(r.violations == 0), to_value(&r)))
        }
        FourierMode::Lambda if set.is_some() => {
            let (a, hsub) = with_set("fourier lambda")?;
            ctx.check_tuples(hsub.order(), k)?;
            let r = indicator_lambda(&a, &hsub, k)?;
            let restricted = a.intersection(hsub.elements())?;
            let phi_below_k = phi_at_most_with(&restricted, k - 1, &ctx.solver())?.holds;
            let counts_agree = r.count_normalized == r.lambda;
            let within = !phi_below_k || r.lambda <= r.diagonal_bound + 1e-12;
            let mut data = to_value(&r);
            data["phi_below_k"] = json!(phi_below_k);
            data["counts_agree"] = json!(counts_agree);
            Ok((check_status(counts_agree && within), data))
        }
        FourierMode::Lambda => {
            let g = parse_group_spec(need(group, "group", "fourier lambda without a set")?)?;
            let d = Domain::whole(&g)?;
            ctx.check_tuples(d.len(), k)?;
            let n = samples.unwrap_or(200);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(ctx.config.seed));
            let mut violations = 0;
            let (mut min_single, mut min_pair) = (f64::INFINITY, f64::INFINITY);
            for _ in 0..n {
                let fs = random_functions(&mut rng, d.len(), k);
                let fijs = random_functions(&mut rng, d.len(), binomial2(k));
                let r = lambda_bound_check(&d, &fs, &fijs)?;
                violations += (!r.holds) as usize;
                min_single = min_single.min(r.slack_single);
                min_pair = min_pair.min(r.slack_pair);
            }
            let ones = lambda_form(&d, &vec![vec![1.0; d.len()]; k], &vec![vec![1.0; d.len()]; binomial2(k)])?;
            Ok((
                check_status(violations == 0 && ones == 1.0),
                json!({
                    "group": g.to_string(), "k": k, "samples": n, "violations": violations,
                    "min_slack_single": min_single, "min_slack_pair": min_pair, "ones_lambda": ones,
                }),
            ))
        }
        FourierMode::CountM => {
            let (a, hsub) = with_set("fourier count-m")?;
            ctx.check_tuples(hsub.order(), k)?;
            let complement = hsub.elements().difference(&a)?;
            let count = crate::fourier::count_m_solutions(k, &a, &complement, &hsub)?;
            let restricted = a.intersection(hsub.elements())?;
            let phi_below_k = phi_at_most_with(&restricted, k - 1, &ctx.solver())?.holds;
            let bound = binomial2(k) as u64 * (restricted.len() as u64).pow(k as u32 - 1);
            let within = count <= bound;
            Ok((
                check_status(!phi_below_k || within),
                json!({
                    "k": k, "order": hsub.order(), "count": count, "bound": bound,
                    "phi_below_k": phi_below_k, "within_bound": within,
                    "normalized": Ratio::new(count, (hsub.order() as u64).pow(k as u32)).to_string(),
                }),
            ))
        }
    }
}
