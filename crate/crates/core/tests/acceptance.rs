//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any criterion fails. Runs with `harness = false` so the lines are always
//! visible in `cargo test` output.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sumavoid::classify::{classify_phi1, instantiate, Phi1Template};
use sumavoid::construct::{counter_set, interval_set, is_sidon, mersenne_set, perturbed_coset, sidon_greedy};
use sumavoid::cover::{find_cover, verify_cover, Rational};
use sumavoid::fourier::{count_m_solutions, dft, idft, indicator_lambda, lambda_bound_check, lambda_form, Domain};
use sumavoid::phi::{phi_at_most, phi_brute, phi_exact, zero_sum_pair};
use sumavoid::runner::survey::{survey_erdos, ErdosOptions, Source, SurveyMode};
use sumavoid::subgroup::{enumerate_subgroups, Subgroup, DEFAULT_ENUMERATION_BOUND};
use sumavoid::{ElemSet, GroupSpec, Result};

const PHI_SWEEP_SECS: u64 = 60;
const COUNTER_DECISION_SECS: u64 = 30;
const SIDON_PRIMES: [u32; 9] = [5, 7, 11, 13, 17, 19, 23, 29, 31];
const SIDON_RUNS: usize = 20;
const INTERVAL_BAND: f64 = 4.0;
const IDENTITY_TOL: f64 = 1e-10;
const INEQUALITY_SLACK: f64 = 1e-9;
const SUBADD_PAIRS: usize = 500;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn idx(a: &ElemSet) -> Vec<usize> {
    a.indices().collect()
}

/// Every subset of every `Z/n` with `n <= 10`.
fn small_cyclic_subsets() -> Result<Vec<ElemSet>> {
    let mut out = Vec::new();
    for n in 1..=10u32 {
        let g = GroupSpec::cyclic(n)?;
        out.extend((0..1u64 << n).map(|m| ElemSet::from_mask(&g, m)));
    }
    Ok(out)
}

fn c01_oracle_equivalence() -> Result<Outcome> {
    let sets = small_cyclic_subsets()?;
    let start = Instant::now();
    let exact: Vec<usize> = sets.iter().map(|a| phi_exact(a).phi).collect();
    let elapsed = start.elapsed();
    let mut mismatches = 0;
    for (a, &p) in sets.iter().zip(&exact) {
        let f = a.group().factors().to_vec();
        if p != phi_brute(a)? || p != common::phi(&f, &idx(a)) {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(PHI_SWEEP_SECS),
        format!("{} sets, {mismatches} mismatches, phi_exact sweep {:.2}s", sets.len(), elapsed.as_secs_f64()),
    )
}

fn c02_phi1_classification() -> Result<Outcome> {
    let mut sets = small_cyclic_subsets()?;
    let z2cubed = GroupSpec::new(&[2, 2, 2])?;
    sets.extend((0..1u64 << 8).map(|m| ElemSet::from_mask(&z2cubed, m)));
    let (mut phi1, mut failures) = (0, 0);
    for a in &sets {
        let f = a.group().factors().to_vec();
        let is_phi1 = common::phi(&f, &idx(a)) == 1;
        let t = classify_phi1(a);
        let matched = t != Phi1Template::NotPhi1;
        let round_trip = !matched || instantiate(&t, a.group())? == *a;
        phi1 += is_phi1 as usize;
        if is_phi1 != matched || !round_trip {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{} sets, {phi1} with phi = 1, {failures} agreement failures", sets.len()))
}

fn c03_counter() -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut n12 = Duration::ZERO;
    for n in 4..=12u32 {
        let a = counter_set(n)?;
        let start = Instant::now();
        let four = phi_at_most(&a, 4).holds;
        let three = phi_at_most(&a, 3).holds;
        if n == 12 {
            n12 = start.elapsed();
        }
        let size_ok = a.len() == (1 << (n - 1)) - 1;
        if !size_ok || !four || three || zero_sum_pair(&a, false).is_some() {
            bad.push(n);
        }
    }
    let first = idx(&counter_set(4)?);
    let verbatim = first == [1, 2, 4, 5, 9, 10, 13];
    outcome(
        bad.is_empty() && verbatim && n12 < Duration::from_secs(COUNTER_DECISION_SECS),
        format!("failing n: {bad:?}, n = 4 set {first:?}, n = 12 decision {:.2}s", n12.as_secs_f64()),
    )
}

fn c04_mersenne() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut pass = true;
    for k in [4u32, 6] {
        for h in [GroupSpec::trivial(), GroupSpec::cyclic(3)?] {
            let a = mersenne_set(k, &h)?;
            let phi = phi_exact(&a).phi;
            let ok =
                phi == k as usize - 1 && a.len() == (k as usize - 1) * h.order() && zero_sum_pair(&a, false).is_none();
            pass &= ok;
            lines.push(format!("k={k} |H|={} phi={phi} |A|={}", h.order(), a.len()));
        }
    }
    outcome(pass, lines.join("; "))
}

fn c05_sidon_complement() -> Result<Outcome> {
    let (mut runs, mut violations, mut max_phi) = (0, 0, 0);
    let mut short = Vec::new();
    for p in SIDON_PRIMES {
        let g = GroupSpec::cyclic(p)?;
        let mut accepted = 0;
        for seed in 0..1000u64 {
            if accepted == SIDON_RUNS {
                break;
            }
            let b = sidon_greedy(&g, usize::MAX, seed);
            if b.len() < 3 {
                continue;
            }
            accepted += 1;
            let elems = idx(&b);
            let mut sums: Vec<usize> = Vec::new();
            for (i, &x) in elems.iter().enumerate() {
                sums.extend(elems[i + 1..].iter().map(|&y| (x + y) % p as usize));
            }
            let distinct = sums.iter().collect::<std::collections::BTreeSet<_>>().len() == sums.len();
            let phi = phi_exact(&b.complement()).phi;
            max_phi = max_phi.max(phi);
            if !distinct || !is_sidon(&b) || phi > 3 {
                violations += 1;
            }
        }
        runs += accepted;
        if accepted < SIDON_RUNS {
            short.push(p);
        }
    }
    outcome(
        violations == 0 && short.is_empty(),
        format!("{runs} runs, {violations} violations, max phi {max_phi}, primes short of seeds {short:?}"),
    )
}

fn c06_interval() -> Result<Outcome> {
    let (mut mismatched, mut calibrated) = (Vec::new(), 0.0f64);
    for n in 12..=30u32 {
        let a = interval_set(n)?;
        let phi = phi_exact(&a).phi;
        if phi != phi_brute(&a)? || phi != common::phi(&[n], &idx(&a)) {
            mismatched.push(n);
        }
        calibrated = calibrated.max((phi as f64 - n as f64 / 3.0).abs());
    }
    let (mut outside, mut worst) = (Vec::new(), 0.0f64);
    for n in 31..=60u32 {
        let dev = (phi_exact(&interval_set(n)?).phi as f64 - n as f64 / 3.0).abs();
        worst = worst.max(dev);
        if dev > INTERVAL_BAND {
            outside.push(n);
        }
    }
    outcome(
        mismatched.is_empty() && outside.is_empty(),
        format!(
            "oracle mismatches {mismatched:?}, max |phi - N/3| {calibrated:.3} on 12..30 and {worst:.3} on 31..60, band {INTERVAL_BAND}, outside {outside:?}"
        ),
    )
}

fn c07_cover_k1() -> Result<Outcome> {
    let c_max = Rational::from_integer(3);
    let (mut checked, mut failures, mut worst) = (0, 0, Rational::from_integer(0));
    for a in small_cyclic_subsets()? {
        if common::phi(a.group().factors(), &idx(&a)) != 1 {
            continue;
        }
        checked += 1;
        match find_cover(&a, 1, Some(c_max), DEFAULT_ENUMERATION_BOUND)? {
            Some(cert) if cert.achieved_c <= c_max && cert.m() <= 1 && verify_cover(&a, &cert)? => {
                worst = worst.max(cert.achieved_c);
            }
            _ => failures += 1,
        }
    }
    outcome(failures == 0, format!("{checked} phi = 1 sets, {failures} failures, worst C {worst}"))
}

fn c08_perturbed_coset() -> Result<Outcome> {
    let groups = [GroupSpec::cyclic(8)?, GroupSpec::new(&[4, 4])?];
    let mut pairs: Vec<Vec<(Subgroup, usize)>> = Vec::new();
    for g in &groups {
        let mut list = Vec::new();
        for h in enumerate_subgroups(g, DEFAULT_ENUMERATION_BOUND)? {
            for x in 0..g.order() {
                if !h.elements().contains_index(x) && h.elements().contains_index(g.double_index(x)) {
                    list.push((h.clone(), x));
                }
            }
        }
        pairs.push(list);
    }
    let c_max = Rational::from_integer(2);
    let mut failures = Vec::new();
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gi = (seed % 2) as usize;
        let g = &groups[gi];
        let (h, x) = &pairs[gi][rng.gen_range(0..pairs[gi].len())];
        let density = rng.gen_range(0.5..=1.0);
        let xe = g.elem(*x)?;
        let a = perturbed_coset(h, &xe, density, seed)?;
        let target = h.elements().union(&h.elements().translate(&xe)?)?;
        let ok = match find_cover(&a, 2, Some(c_max), DEFAULT_ENUMERATION_BOUND)? {
            Some(cert) => {
                let contains_target = cert.subgroups.iter().any(|s| target.is_subset(s.elements()).unwrap_or(false));
                contains_target && cert.residual.is_empty() && cert.achieved_c <= c_max && verify_cover(&a, &cert)?
            }
            None => false,
        };
        if !ok || phi_exact(&a).phi > 2 {
            failures.push(seed);
        }
    }
    outcome(failures.is_empty(), format!("50 instances, failing seeds {failures:?}"))
}

fn random_function(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

fn c09_fourier_identities() -> Result<Outcome> {
    let groups: [&[u32]; 5] = [&[5], &[7], &[9], &[11], &[7, 3]];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut plancherel, mut inversion, mut oracle) = (0.0f64, 0.0f64, 0.0f64);
    for factors in groups {
        let g = GroupSpec::new(factors)?;
        let domain = Domain::whole(&g)?;
        for _ in 0..100 {
            let f = random_function(&mut rng, g.order());
            let t = dft(&domain, &f)?;
            let mean_sq = f.iter().map(|v| v * v).sum::<f64>() / f.len() as f64;
            plancherel = plancherel.max((t.energy() - mean_sq).abs());
            let back = idft(&domain, &t)?;
            for (b, v) in back.iter().zip(&f) {
                inversion = inversion.max((b.re - v).abs().max(b.im.abs()));
            }
            for (c, ch) in domain.characters().iter().enumerate() {
                let (re, im) = common::fourier_coeff(factors, &ch.xi, &f);
                oracle = oracle.max((t.coeffs[c].re - re).abs().max((t.coeffs[c].im - im).abs()));
            }
        }
    }
    outcome(
        plancherel <= IDENTITY_TOL && inversion <= IDENTITY_TOL && oracle <= IDENTITY_TOL,
        format!("max errors: Plancherel {plancherel:.2e}, inversion {inversion:.2e}, direct sum {oracle:.2e}"),
    )
}

fn c10_lambda_bound() -> Result<Outcome> {
    let g = GroupSpec::cyclic(11)?;
    let domain = Domain::whole(&g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut violations, mut oracle_err, mut min_slack) = (0, 0.0f64, f64::INFINITY);
    for _ in 0..200 {
        let fs: Vec<Vec<f64>> = (0..3).map(|_| random_function(&mut rng, 11)).collect();
        let fijs: Vec<Vec<f64>> = (0..3).map(|_| random_function(&mut rng, 11)).collect();
        let report = lambda_bound_check(&domain, &fs, &fijs)?;
        let reference = common::lambda(&[11], &fs, &fijs);
        oracle_err = oracle_err.max((report.lambda - reference).abs());
        let sup = |f: &Vec<f64>| {
            (0..11u64)
                .map(|xi| {
                    let (re, im) = common::fourier_coeff(&[11], &[xi], f);
                    re.hypot(im)
                })
                .fold(0.0, f64::max)
        };
        let bound = fs.iter().chain(&fijs).map(sup).fold(f64::INFINITY, f64::min);
        min_slack = min_slack.min(bound - reference.abs());
        if bound - reference.abs() < -INEQUALITY_SLACK || !report.holds {
            violations += 1;
        }
    }
    let ones = vec![vec![1.0; 11]; 3];
    let unit = lambda_form(&domain, &ones, &ones)?;
    outcome(
        violations == 0 && unit == 1.0 && oracle_err <= IDENTITY_TOL,
        format!("200 tuples, {violations} violations, min slack {min_slack:.3e}, oracle error {oracle_err:.2e}, lambda(ones) = {unit}"),
    )
}

fn c11_indicator_lambda() -> Result<Outcome> {
    let z7 = GroupSpec::cyclic(7)?;
    let a = mersenne_set(4, &GroupSpec::trivial())?;
    let h = Subgroup::whole(&z7);
    let il = indicator_lambda(&a, &h, 4)?;
    let complement = idx(&a.complement());
    let count = common::count_solutions(&[7], &idx(&a), &complement, 4);
    let mersenne_ok = il.lambda <= 6.0 / 7.0 && il.lambda == count as f64 / 2401.0 && il.count == count;

    let mut zero_cases = Vec::new();
    let mut zeros_ok = true;
    for (factors, gens, k) in
        [(&[7u32][..], vec![0usize], 4usize), (&[9], vec![3], 4), (&[9], vec![3], 3), (&[4, 4], vec![2, 8], 3)]
    {
        let g = GroupSpec::new(factors)?;
        let elems: Vec<_> = gens.iter().map(|&i| g.elem(i)).collect::<Result<_>>()?;
        let sub = Subgroup::generated(&g, &elems)?;
        let whole = Subgroup::whole(&g);
        let r = indicator_lambda(sub.elements(), &whole, k)?;
        let c = count_m_solutions(k, sub.elements(), &sub.elements().complement(), &whole)?;
        zeros_ok &= r.lambda == 0.0 && c == 0;
        zero_cases.push(format!("{g}/|H'|={} k={k}: {}", sub.order(), r.lambda));
    }
    // every set with phi(A) < k stays under the diagonal bound C(k,2)/|H|
    let mut swept = vec![(mersenne_set(4, &GroupSpec::cyclic(3)?)?, 4), (mersenne_set(4, &GroupSpec::trivial())?, 3)];
    for n in [9u32, 11] {
        let g = GroupSpec::cyclic(n)?;
        for m in 1..1u64 << n {
            let s = ElemSet::from_mask(&g, m);
            if classify_phi1(&s) != Phi1Template::NotPhi1 {
                swept.push((s.clone(), 3));
                swept.push((s, 4));
            }
        }
    }
    let mut over = 0;
    for (s, k) in &swept {
        let r = indicator_lambda(s, &Subgroup::whole(s.group()), *k)?;
        let exact = r.count as f64 / (r.order as f64).powi(*k as i32);
        if r.lambda > r.diagonal_bound || r.lambda != exact {
            over += 1;
        }
    }
    outcome(
        mersenne_ok && zeros_ok && over == 0,
        format!(
            "Mersenne Z/7 k=4: lambda {:.6} = {count}/2401, bound 6/7; subgroup cases {}; diagonal bound sweep {} instances, {over} over",
            il.lambda,
            zero_cases.join(", "),
            swept.len()
        ),
    )
}

fn c12_subadditivity() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut violations = 0;
    for _ in 0..SUBADD_PAIRS {
        let n = rng.gen_range(2..=24u32);
        let g = GroupSpec::cyclic(n)?;
        let (pa, pb) = (rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9));
        let a = ElemSet::from_indices(&g, (0..n as usize).filter(|_| rng.gen_bool(pa)))?;
        let b = ElemSet::from_indices(&g, (0..n as usize).filter(|_| rng.gen_bool(pb)))?;
        let u = a.union(&b)?;
        if phi_exact(&u).phi > phi_exact(&a).phi + phi_exact(&b).phi {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{SUBADD_PAIRS} pairs, {violations} violations"))
}

fn c13_zero_sum_survey() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut pass = true;
    for n in [11u32, 13] {
        let g = GroupSpec::cyclic(n)?;
        let mut opts = ErdosOptions::new(2, 2);
        opts.mode = SurveyMode::Exhaustive;
        let (records, summary) = survey_erdos(&g, &opts, None)?;
        // independent recount over every subset
        let mut expected = 0;
        for m in 0..1u64 << n {
            let a = ElemSet::from_mask(&g, m);
            if a.len() >= 2 && common::phi(&[n], &idx(&a)) == 1 {
                expected += 1;
                let has_zero_sum = idx(&a).iter().any(|&x| a.contains_index((n as usize - x) % n as usize));
                pass &= has_zero_sum;
            }
        }
        pass &= summary.affirmative && summary.qualifying == expected && records.len() == expected;
        lines.push(format!("Z/{n}: {} qualifying sets, affirmative {}", summary.qualifying, summary.affirmative));
    }
    let counter = counter_set(4)?;
    let mut opts = ErdosOptions::new(5, 0);
    opts.mode = SurveyMode::Sampled;
    opts.samples = 0;
    opts.include = vec![counter.clone()];
    let (records, summary) = survey_erdos(counter.group(), &opts, None)?;
    let recorded = records.iter().any(|r| r.source == Source::Included && r.phi == 4 && r.is_counterexample());
    pass &= recorded && !summary.affirmative;
    lines.push(format!("counter_set(4) with k = 5 recorded as counterexample: {recorded}"));
    outcome(pass, lines.join("; "))
}

fn main() {
    type Check = fn() -> Result<Outcome>;
    let checks: [(&str, Check); 13] = [
        ("oracle equivalence", c01_oracle_equivalence),
        ("phi = 1 classification", c02_phi1_classification),
        ("counter construction", c03_counter),
        ("Mersenne construction", c04_mersenne),
        ("Sidon complements", c05_sidon_complement),
        ("interval example", c06_interval),
        ("k = 1 cover", c07_cover_k1),
        ("perturbed coset cover", c08_perturbed_coset),
        ("Fourier identities", c09_fourier_identities),
        ("multilinear bound", c10_lambda_bound),
        ("indicator multilinear form", c11_indicator_lambda),
        ("subadditivity", c12_subadditivity),
        ("zero-sum survey", c13_zero_sum_survey),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = check().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        failed += !result.pass as usize;
        println!(
            "criterion {:>2} {} {name}: {} [{:.2}s]",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
