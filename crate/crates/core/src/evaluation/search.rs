use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::compare::compare;
use crate::baselines::{canny, CannyParams};
use crate::engine::step_packed;
use crate::error::{Error, Result};
use crate::grid::{BinaryGrid, BoundaryCondition};
use crate::imaging::GrayImage;
use crate::rules::{LinearRule, RULE_BITS};

/// Number of top-ranked rules that also get a Canny-agreement score.
pub const CANNY_TOP_N: usize = 10;

#[derive(Debug, Clone)]
pub struct CorpusPair {
    pub name: String,
    pub input: BinaryGrid,
    pub reference: BinaryGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest number of XOR terms per candidate rule, 1 to 3.
    pub max_terms: u32,
    pub boundary: BoundaryCondition,
    pub tolerance: usize,
    /// Also score the top rules against Canny run on each input.
    pub canny_agreement: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_terms: 3,
            boundary: BoundaryCondition::Null,
            tolerance: 2,
            canny_agreement: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub pairs: usize,
    pub names: Vec<String>,
    pub height: Vec<usize>,
    pub width: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSearchReport {
    pub candidates_evaluated: usize,
    pub max_terms: u32,
    pub boundary: BoundaryCondition,
    pub tolerance: usize,
    pub corpus: CorpusSummary,
    /// `[rule, mean F-measure]`, best first; ties by ascending rule number.
    pub ranking: Vec<(u32, f64)>,
    /// `[rule, mean F-measure against Canny]` for the leading rules, in ranking order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub canny_agreement: Vec<(u32, f64)>,
}

impl RuleSearchReport {
    pub fn best(&self) -> Option<(u32, f64)> {
        self.ranking.first().copied()
    }
}

/// Every rule with between 1 and `max_terms` XOR terms, ascending.
pub fn candidate_rules(max_terms: u32) -> Vec<LinearRule> {
    fn extend(start: u32, acc: u32, left: u32, out: &mut Vec<LinearRule>) {
        if acc != 0 {
            out.push(LinearRule::new(acc).expect("below 2^25"));
        }
        if left > 0 {
            for b in start..RULE_BITS {
                extend(b + 1, acc | (1 << b), left - 1, out);
            }
        }
    }
    let mut rules = Vec::new();
    extend(0, 0, max_terms, &mut rules);
    rules.sort_unstable();
    rules
}

fn mean_f(
    rule: LinearRule,
    corpus: &[CorpusPair],
    refs: &[&BinaryGrid],
    cfg: &SearchConfig,
) -> f64 {
    let total: f64 = corpus
        .iter()
        .enumerate()
        .map(|(k, pair)| {
            let out = step_packed(&pair.input, rule, cfg.boundary);
            compare(&out, refs[k], cfg.tolerance)
                .expect("dimensions validated")
                .f_measure
        })
        .sum();
    total / corpus.len() as f64
}

/// Exhaustively scores every rule with at most `cfg.max_terms` terms by the
/// mean tolerance-matched F-measure of one step against each reference.
pub fn search_rules(corpus: &[CorpusPair], cfg: &SearchConfig) -> Result<RuleSearchReport> {
    if corpus.is_empty() {
        return Err(Error::Usage(
            "rule search needs at least one corpus pair".into(),
        ));
    }
    if !(1..=3).contains(&cfg.max_terms) {
        return Err(Error::Usage(format!(
            "max_terms must be 1, 2 or 3, got {}",
            cfg.max_terms
        )));
    }
    for pair in corpus {
        if pair.input.dims() != pair.reference.dims() {
            return Err(Error::Dimension(format!(
                "corpus pair {:?}: input {}x{} vs reference {}x{}",
                pair.name,
                pair.input.height(),
                pair.input.width(),
                pair.reference.height(),
                pair.reference.width()
            )));
        }
    }

    let candidates = candidate_rules(cfg.max_terms);
    let references: Vec<&BinaryGrid> = corpus.iter().map(|p| &p.reference).collect();
    let mut ranking: Vec<(u32, f64)> = candidates
        .par_iter()
        .map(|&rule| (rule.number(), mean_f(rule, corpus, &references, cfg)))
        .collect();
    ranking.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let canny_agreement = if cfg.canny_agreement {
        let canny_maps: Vec<BinaryGrid> = corpus
            .iter()
            .map(|p| canny(&GrayImage::from_binary(&p.input), CannyParams::default()))
            .collect();
        let canny_refs: Vec<&BinaryGrid> = canny_maps.iter().collect();
        ranking
            .iter()
            .take(CANNY_TOP_N)
            .map(|&(rule, _)| {
                let rule = LinearRule::new(rule).expect("ranked rules are valid");
                (rule.number(), mean_f(rule, corpus, &canny_refs, cfg))
            })
            .collect()
    } else {
        Vec::new()
    };

    Ok(RuleSearchReport {
        candidates_evaluated: candidates.len(),
        max_terms: cfg.max_terms,
        boundary: cfg.boundary,
        tolerance: cfg.tolerance,
        corpus: CorpusSummary {
            pairs: corpus.len(),
            names: corpus.iter().map(|p| p.name.clone()).collect(),
            height: corpus.iter().map(|p| p.input.height()).collect(),
            width: corpus.iter().map(|p| p.input.width()).collect(),
        },
        ranking,
        canny_agreement,
    })
}
