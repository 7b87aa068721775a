//! Sweeps over the subsets of a small group: the φ = 1 classification and
//! the zero-sum question for sets with small φ.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::cache::{phi_cached, PhiCache};
use crate::classify::{classify_phi1, instantiate, Phi1Tag};
use crate::cover::{find_cover, CoverSummary};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::phi::{phi_at_most_with, zero_sum_pair, SolverOptions};
use crate::set::{ElemSet, SetData};
use crate::subgroup::DEFAULT_ENUMERATION_BOUND;

/// Largest order swept exhaustively by the zero-sum survey.
pub const EXHAUSTIVE_LIMIT: usize = 14;
/// Largest order accepted by the φ = 1 sweep.
pub const PHI1_SWEEP_LIMIT: usize = 16;
pub const DEFAULT_SAMPLES: usize = 1000;

fn subset(group: &GroupSpec, mask: u64) -> ElemSet {
    ElemSet::from_mask(group, mask)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Phi1Record {
    pub set: Vec<Vec<u64>>,
    pub phi: usize,
    pub tag: Phi1Tag,
    pub parameter: Option<String>,
    /// φ = 1 exactly when a template matched, and the template instantiates
    /// back to the set.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Phi1Summary {
    pub group: String,
    pub subsets: usize,
    pub phi_one: usize,
    pub totals: BTreeMap<Phi1Tag, usize>,
    pub inconsistent: usize,
}

/// Classifies every subset of `group`, in mask order.
pub fn survey_phi1(group: &GroupSpec, cache: Option<&PhiCache>) -> Result<(Vec<Phi1Record>, Phi1Summary)> {
    if group.order() > PHI1_SWEEP_LIMIT {
        return Err(Error::capability(format!(
            "phi = 1 sweep is limited to groups of order <= {PHI1_SWEEP_LIMIT}, got {}",
            group.order()
        )));
    }
    let opts = SolverOptions::default();
    let records: Vec<Phi1Record> = (0..1u64 << group.order())
        .into_par_iter()
        .map(|mask| {
            let a = subset(group, mask);
            let phi = phi_cached(cache, &a, &opts)?;
            let t = classify_phi1(&a);
            let consistent = match t.tag() {
                Phi1Tag::NotPhi1 => phi != 1,
                _ => phi == 1 && instantiate(&t, group)? == a,
            };
            Ok(Phi1Record { set: SetData::from(&a).elements, phi, tag: t.tag(), parameter: t.parameter(), consistent })
        })
        .collect::<Result<_>>()?;
    let mut totals = BTreeMap::new();
    for r in &records {
        *totals.entry(r.tag).or_insert(0) += 1;
    }
    let summary = Phi1Summary {
        group: group.to_string(),
        subsets: records.len(),
        phi_one: records.iter().filter(|r| r.phi == 1).count(),
        totals,
        inconsistent: records.iter().filter(|r| !r.consistent).count(),
    };
    Ok((records, summary))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Exhaustive,
    Sample,
    Included,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurveyRecord {
    pub group: String,
    pub set: Vec<Vec<u64>>,
    pub set_hash: String,
    pub size: usize,
    pub phi: usize,
    pub zero_sum_present: bool,
    pub tag: Phi1Tag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverSummary>,
    pub source: Source,
}

impl SurveyRecord {
    /// φ(A) < k and no zero-sum pair.
    pub fn is_counterexample(&self) -> bool {
        !self.zero_sum_present
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurveyMode {
    /// Exhaustive when the order allows it, sampled otherwise.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug)]
pub struct ErdosOptions {
    pub k: usize,
    pub min_size: usize,
    pub mode: SurveyMode,
    pub samples: usize,
    pub seed: u64,
    /// Always examined, before the sweep.
    pub include: Vec<ElemSet>,
    pub with_cover: bool,
    pub enumeration_bound: usize,
    pub solver: SolverOptions,
}

impl ErdosOptions {
    pub fn new(k: usize, min_size: usize) -> Self {
        ErdosOptions {
            k,
            min_size,
            mode: SurveyMode::Auto,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            include: Vec::new(),
            with_cover: false,
            enumeration_bound: DEFAULT_ENUMERATION_BOUND,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErdosSummary {
    pub group: String,
    pub k: usize,
    pub min_size: usize,
    pub mode: String,
    pub examined: usize,
    pub qualifying: usize,
    pub counterexamples: usize,
    /// Every qualifying set has a zero-sum pair.
    pub affirmative: bool,
}

fn examine(a: &ElemSet, source: Source, opts: &ErdosOptions, cache: Option<&PhiCache>) -> Result<Option<SurveyRecord>> {
    if a.len() < opts.min_size || opts.k == 0 || !phi_at_most_with(a, opts.k - 1, &opts.solver)?.holds {
        return Ok(None);
    }
    let phi = phi_cached(cache, a, &opts.solver)?;
    let cover = if opts.with_cover && !a.is_empty() {
        find_cover(a, phi.max(1), None, opts.enumeration_bound)?.map(|c| c.summary())
    } else {
        None
    };
    Ok(Some(SurveyRecord {
        group: a.group().to_string(),
        set: SetData::from(a).elements,
        set_hash: a.content_hash(),
        size: a.len(),
        phi,
        zero_sum_present: zero_sum_pair(a, false).is_some(),
        tag: if phi == 1 { classify_phi1(a).tag() } else { Phi1Tag::NotPhi1 },
        cover,
        source,
    }))
}

/// Records every examined `A` with `φ(A) < k` and `|A| >= min_size`.
pub fn survey_erdos(
    group: &GroupSpec,
    opts: &ErdosOptions,
    cache: Option<&PhiCache>,
) -> Result<(Vec<SurveyRecord>, ErdosSummary)> {
    for s in &opts.include {
        group.check_same(s.group())?;
    }
    let n = group.order();
    let exhaustive = match opts.mode {
        SurveyMode::Exhaustive if n > EXHAUSTIVE_LIMIT => {
            return Err(Error::usage(format!(
                "exhaustive survey needs |G| <= {EXHAUSTIVE_LIMIT}, got {n}; use sampled mode"
            )))
        }
        SurveyMode::Exhaustive => true,
        SurveyMode::Auto => n <= EXHAUSTIVE_LIMIT,
        SurveyMode::Sampled => false,
    };
    let mut records = Vec::new();
    for a in &opts.include {
        records.extend(examine(a, Source::Included, opts, cache)?);
    }
    let examined;
    if exhaustive {
        let found: Vec<Option<SurveyRecord>> = (0..1u64 << n)
            .into_par_iter()
            .map(|mask| examine(&subset(group, mask), Source::Exhaustive, opts, cache))
            .collect::<Result<_>>()?;
        examined = found.len();
        records.extend(found.into_iter().flatten());
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let all: Vec<usize> = (0..n).collect();
        let sets: Vec<ElemSet> = (0..opts.samples)
            .filter(|_| opts.min_size <= n)
            .map(|_| {
                let size = rng.gen_range(opts.min_size.max(1)..=n);
                let picked = all.choose_multiple(&mut rng, size).copied();
                ElemSet::from_indices(group, picked).expect("in range")
            })
            .collect();
        examined = sets.len();
        let found: Vec<Option<SurveyRecord>> =
            sets.par_iter().map(|a| examine(a, Source::Sample, opts, cache)).collect::<Result<_>>()?;
        records.extend(found.into_iter().flatten());
    }
    let counterexamples = records.iter().filter(|r| r.is_counterexample()).count();
    let summary = ErdosSummary {
        group: group.to_string(),
        k: opts.k,
        min_size: opts.min_size,
        mode: if exhaustive { "exhaustive" } else { "sampled" }.to_string(),
        examined: examined + opts.include.len(),
        qualifying: records.len(),
        counterexamples,
        affirmative: counterexamples == 0,
    };
    Ok((records, summary))
}
