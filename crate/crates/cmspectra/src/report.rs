//! Self-describing result documents.
//!
//! Every command of the verification binary emits exactly one document:
//! a full echo of the configuration, the evidence gathered (per-sample
//! residuals, per-trial separations, descent layers, curve terms) and a
//! pass/fail verdict. Apart from an optional timestamp — which callers
//! may suppress — the content is a pure function of the configuration,
//! so any recorded verdict is reproducible from the document alone.
//!
//! Two renderings are provided: JSON for machines, and a key/value text
//! layout for reading next to the displayed identities (wp values print
//! as `P[...]`, their derivatives as `Q[...]`, derivative multi-indices
//! as `[i,j,...]`). Both renderings are deterministic: floats use the
//! shortest round-trip form and every list is emitted in a canonical
//! order.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::catalog::{OperatorName, SystemId};
use crate::curves::CurveComparison;
use crate::diffop::DiffOp;
use crate::poly::CoeffPoly;
use crate::verifier::descent::DescentResult;
use crate::verifier::separation::SeparationReport;
use crate::verifier::{VanishingReport, VerifyConfig};

/// Output rendering selected by `--format`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<ReportFormat> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Some(ReportFormat::Json),
            "text" => Some(ReportFormat::Text),
            _ => None,
        }
    }
}

/// Seconds since the Unix epoch; the only field of any document that is
/// not a function of the configuration.
pub fn unix_timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn verdict(pass: bool) -> String {
    if pass { "pass" } else { "fail" }.to_string()
}

fn yesno(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Full echo of the verification configuration, so a document alone
/// determines the run that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub precision_bits: u32,
    pub series_terms: usize,
    pub tolerance: f64,
    pub samples: usize,
    pub g2g3_draws: usize,
}

impl From<&VerifyConfig> for ConfigEcho {
    fn from(cfg: &VerifyConfig) -> ConfigEcho {
        ConfigEcho {
            seed: cfg.seed,
            precision_bits: cfg.precision_bits,
            series_terms: cfg.series_terms,
            tolerance: cfg.tolerance,
            samples: cfg.samples,
            g2g3_draws: cfg.g2g3_draws,
        }
    }
}

impl ConfigEcho {
    fn text_lines(&self, out: &mut String) {
        let _ = writeln!(out, "seed:              {}", self.seed);
        let _ = writeln!(out, "precision bits:    {}", self.precision_bits);
        let _ = writeln!(out, "series terms:      {}", self.series_terms);
        let _ = writeln!(out, "tolerance:         {:e}", self.tolerance);
        let _ = writeln!(out, "samples:           {}", self.samples);
        let _ = writeln!(out, "g2/g3 draws:       {}", self.g2g3_draws);
    }
}

/// One sample's worst scaled residual and the derivative multi-index of
/// the coefficient that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct SampleEntry {
    pub index: usize,
    pub max_residual: f64,
    pub worst_coefficient_multiindex: String,
}

/// The vanishing evidence for one operator, shared by the relation and
/// commutator documents.
#[derive(Clone, Debug, Serialize)]
pub struct RelationBlock {
    pub relation: String,
    pub syntactic_zero: bool,
    pub per_sample: Vec<SampleEntry>,
    pub max_residual: f64,
    pub halfperiod_exact: Option<bool>,
    pub verdict: String,
}

impl RelationBlock {
    fn from_report(rep: &VanishingReport) -> RelationBlock {
        RelationBlock {
            relation: rep.relation.clone(),
            syntactic_zero: rep.syntactic_zero,
            per_sample: rep
                .per_sample
                .iter()
                .map(|s| SampleEntry {
                    index: s.index,
                    max_residual: s.max_residual,
                    worst_coefficient_multiindex: s.worst_coefficient_multiindex.clone(),
                })
                .collect(),
            max_residual: rep.max_residual,
            halfperiod_exact: rep.halfperiod_exact,
            verdict: verdict(rep.pass),
        }
    }

    fn text_lines(&self, out: &mut String) {
        let _ = writeln!(out, "syntactic zero:    {}", yesno(self.syntactic_zero));
        if let Some(hp) = self.halfperiod_exact {
            let _ = writeln!(out, "half-period exact: {}", yesno(hp));
        }
        if !self.per_sample.is_empty() {
            let _ = writeln!(out, "worst residual per sample:");
            for s in &self.per_sample {
                let _ = writeln!(
                    out,
                    "  sample {:>3}: {:e} at {}",
                    s.index, s.max_residual, s.worst_coefficient_multiindex
                );
            }
        }
        let _ = writeln!(out, "max residual:      {:e}", self.max_residual);
        let _ = writeln!(out, "verdict:           {}", self.verdict);
    }
}

/// Document of `verify`: one relation operator against the oracle and
/// the exact half-period reduction.
#[derive(Clone, Debug, Serialize)]
pub struct RelationDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub system: String,
    pub relation: String,
    pub config: ConfigEcho,
    pub per_sample: Vec<SampleEntry>,
    pub syntactic_zero: bool,
    pub max_residual: f64,
    pub halfperiod_exact: Option<bool>,
    pub verdict: String,
}

pub fn relation_document(
    rep: &VanishingReport,
    cfg: &VerifyConfig,
    timestamp: Option<u64>,
) -> RelationDocument {
    let block = RelationBlock::from_report(rep);
    RelationDocument {
        timestamp,
        system: rep.system.name().to_string(),
        relation: block.relation,
        config: cfg.into(),
        per_sample: block.per_sample,
        syntactic_zero: block.syntactic_zero,
        max_residual: block.max_residual,
        halfperiod_exact: block.halfperiod_exact,
        verdict: block.verdict,
    }
}

/// Document of `commutators`: every pairwise commutator of the
/// system's integrals; passes only when all of them vanish.
#[derive(Clone, Debug, Serialize)]
pub struct CommutatorDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub system: String,
    pub config: ConfigEcho,
    pub commutators: Vec<RelationBlock>,
    pub verdict: String,
}

pub fn commutator_document(
    system: SystemId,
    reps: &[VanishingReport],
    cfg: &VerifyConfig,
    timestamp: Option<u64>,
) -> CommutatorDocument {
    let commutators: Vec<RelationBlock> = reps.iter().map(RelationBlock::from_report).collect();
    let pass = commutators.iter().all(|b| b.verdict == "pass");
    CommutatorDocument {
        timestamp,
        system: system.name().to_string(),
        config: cfg.into(),
        commutators,
        verdict: verdict(pass),
    }
}

/// One term of a curve polynomial in machine-readable form: the exact
/// rational coefficient and the (symbol, exponent) factors.
#[derive(Clone, Debug, Serialize)]
pub struct CurveTerm {
    pub coefficient: String,
    pub monomial: Vec<(String, u32)>,
}

fn term_list(p: &CoeffPoly) -> Vec<CurveTerm> {
    let table = p.table().clone();
    p.sorted_terms()
        .into_iter()
        .map(|(mono, coeff)| CurveTerm {
            coefficient: coeff.to_string(),
            monomial: table
                .symbols()
                .iter()
                .enumerate()
                .filter(|(i, _)| mono.exp(*i) > 0)
                .map(|(i, s)| (s.to_string(), mono.exp(i)))
                .collect(),
        })
        .collect()
}

/// The comparison half of a curve document.
#[derive(Clone, Debug, Serialize)]
pub struct CurveComparisonBlock {
    pub reference: String,
    pub difference: String,
    pub only_g3_sign: bool,
    pub summary: String,
}

/// Document of `curve`: the reduced spectral curve in canonical text
/// and as a term list, optionally diffed against the reference form.
#[derive(Clone, Debug, Serialize)]
pub struct CurveDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub system: String,
    pub curve: String,
    pub terms: Vec<CurveTerm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<CurveComparisonBlock>,
    pub verdict: String,
}

pub fn curve_document(
    curve: &CoeffPoly,
    comparison: Option<&CurveComparison>,
    timestamp: Option<u64>,
) -> CurveDocument {
    let pass = comparison.map_or(true, |c| c.only_g3_sign);
    CurveDocument {
        timestamp,
        system: "a2-reduced".to_string(),
        curve: curve.to_string(),
        terms: term_list(curve),
        comparison: comparison.map(|c| CurveComparisonBlock {
            reference: c.reference.to_string(),
            difference: c.difference.to_string(),
            only_g3_sign: c.only_g3_sign,
            summary: c.summary.clone(),
        }),
        verdict: verdict(pass),
    }
}

/// Document of `separation`: per-trial distinctness of the candidate's
/// symbol over the joint symbol fibre; passes when every trial
/// separates.
#[derive(Clone, Debug, Serialize)]
pub struct SeparationDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub system: String,
    pub candidate: String,
    pub trials: usize,
    pub config: ConfigEcho,
    pub per_trial: Vec<bool>,
    pub separated_trials: usize,
    pub verdict: String,
}

pub fn separation_document(
    rep: &SeparationReport,
    cfg: &VerifyConfig,
    timestamp: Option<u64>,
) -> SeparationDocument {
    SeparationDocument {
        timestamp,
        system: rep.system.name().to_string(),
        candidate: rep.candidate.clone(),
        trials: rep.trials,
        config: cfg.into(),
        per_trial: rep.per_trial.clone(),
        separated_trials: rep.separated_trials,
        verdict: verdict(rep.always_separates()),
    }
}

/// One layer of the symbol descent as recorded in a document.
#[derive(Clone, Debug, Serialize)]
pub struct DescentStepEntry {
    pub order: u32,
    pub matched: String,
    pub exact: bool,
}

/// Document of `descent`: the reconstructed spectral polynomial, the
/// per-order layers, and the oracle verdict on the recomposition
/// residual.
#[derive(Clone, Debug, Serialize)]
pub struct DescentDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub system: String,
    pub target: String,
    pub config: ConfigEcho,
    pub expression: String,
    pub steps: Vec<DescentStepEntry>,
    pub residual: RelationBlock,
    pub verdict: String,
}

pub fn descent_document(
    target: &str,
    result: &DescentResult,
    cfg: &VerifyConfig,
    timestamp: Option<u64>,
) -> DescentDocument {
    let residual = RelationBlock::from_report(&result.residual_report);
    let pass = residual.verdict == "pass";
    DescentDocument {
        timestamp,
        system: result.residual_report.system.name().to_string(),
        target: target.to_string(),
        config: cfg.into(),
        expression: result.expression.to_string(),
        steps: result
            .steps
            .iter()
            .map(|s| DescentStepEntry {
                order: s.order,
                matched: s.matched.to_string(),
                exact: s.exact,
            })
            .collect(),
        residual,
        verdict: verdict(pass),
    }
}

/// Document of `dump-operator`: the canonical text form of a catalog
/// operator. Its text rendering is exactly the dump, so it stays
/// parseable.
#[derive(Clone, Debug, Serialize)]
pub struct OperatorDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub system: String,
    pub name: String,
    pub order: u32,
    pub num_terms: usize,
    pub dump: String,
}

pub fn operator_document(
    system: SystemId,
    name: OperatorName,
    op: &DiffOp,
    timestamp: Option<u64>,
) -> OperatorDocument {
    OperatorDocument {
        timestamp,
        system: system.name().to_string(),
        name: name.name().to_string(),
        order: op.order(),
        num_terms: op.num_terms(),
        dump: op.dump(system.name()),
    }
}

/// The one-per-run document emitted by the CLI.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Document {
    Relation(RelationDocument),
    Commutators(CommutatorDocument),
    Curve(CurveDocument),
    Separation(SeparationDocument),
    Descent(DescentDocument),
    Operator(OperatorDocument),
}

impl Document {
    /// Whether the run it records passed; operator dumps always pass.
    pub fn passed(&self) -> bool {
        match self {
            Document::Relation(d) => d.verdict == "pass",
            Document::Commutators(d) => d.verdict == "pass",
            Document::Curve(d) => d.verdict == "pass",
            Document::Separation(d) => d.verdict == "pass",
            Document::Descent(d) => d.verdict == "pass",
            Document::Operator(_) => true,
        }
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
                s.push('\n');
                s
            }
            ReportFormat::Text => self.text(),
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        match self {
            Document::Relation(d) => {
                let _ = writeln!(out, "relation report");
                if let Some(ts) = d.timestamp {
                    let _ = writeln!(out, "timestamp:         {ts}");
                }
                let _ = writeln!(out, "system:            {}", d.system);
                let _ = writeln!(out, "relation:          {}", d.relation);
                d.config.text_lines(&mut out);
                let block = RelationBlock {
                    relation: d.relation.clone(),
                    syntactic_zero: d.syntactic_zero,
                    per_sample: d.per_sample.clone(),
                    max_residual: d.max_residual,
                    halfperiod_exact: d.halfperiod_exact,
                    verdict: d.verdict.clone(),
                };
                block.text_lines(&mut out);
            }
            Document::Commutators(d) => {
                let _ = writeln!(out, "commutator report");
                if let Some(ts) = d.timestamp {
                    let _ = writeln!(out, "timestamp:         {ts}");
                }
                let _ = writeln!(out, "system:            {}", d.system);
                d.config.text_lines(&mut out);
                for block in &d.commutators {
                    let how = if block.syntactic_zero {
                        "syntactic zero".to_string()
                    } else {
                        format!("max residual {:e}", block.max_residual)
                    };
                    let _ = writeln!(
                        out,
                        "  {:<12} {}; verdict {}",
                        block.relation, how, block.verdict
                    );
                    if block.verdict != "pass" {
                        for s in &block.per_sample {
                            let _ = writeln!(
                                out,
                                "    sample {:>3}: {:e} at {}",
                                s.index, s.max_residual, s.worst_coefficient_multiindex
                            );
                        }
                    }
                }
                let _ = writeln!(out, "verdict:           {}", d.verdict);
            }
            Document::Curve(d) => {
                let _ = writeln!(out, "curve report");
                if let Some(ts) = d.timestamp {
                    let _ = writeln!(out, "timestamp:         {ts}");
                }
                let _ = writeln!(out, "system:            {}", d.system);
                let _ = writeln!(out, "curve:             {}", d.curve);
                let _ = writeln!(out, "terms:");
                for t in &d.terms {
                    let factors = t
                        .monomial
                        .iter()
                        .map(|(s, e)| {
                            if *e == 1 {
                                s.clone()
                            } else {
                                format!("{s}^{e}")
                            }
                        })
                        .collect::<Vec<_>>()
                        .join("*");
                    let factors = if factors.is_empty() {
                        "1".to_string()
                    } else {
                        factors
                    };
                    let _ = writeln!(out, "  {:>6}  {}", t.coefficient, factors);
                }
                if let Some(c) = &d.comparison {
                    let _ = writeln!(out, "reference:         {}", c.reference);
                    let _ = writeln!(out, "difference:        {}", c.difference);
                    let _ = writeln!(out, "only g3 sign:      {}", yesno(c.only_g3_sign));
                    let _ = writeln!(out, "summary:           {}", c.summary);
                }
                let _ = writeln!(out, "verdict:           {}", d.verdict);
            }
            Document::Separation(d) => {
                let _ = writeln!(out, "separation report");
                if let Some(ts) = d.timestamp {
                    let _ = writeln!(out, "timestamp:         {ts}");
                }
                let _ = writeln!(out, "system:            {}", d.system);
                let _ = writeln!(out, "candidate:         {}", d.candidate);
                d.config.text_lines(&mut out);
                let picture: String = d
                    .per_trial
                    .iter()
                    .map(|&sep| if sep { '+' } else { '-' })
                    .collect();
                let _ = writeln!(out, "trials:            {}", d.trials);
                let _ = writeln!(
                    out,
                    "separated:         {}/{}  [{}]  (+ distinct, - collision)",
                    d.separated_trials, d.trials, picture
                );
                let _ = writeln!(out, "verdict:           {}", d.verdict);
            }
            Document::Descent(d) => {
                let _ = writeln!(out, "descent report");
                if let Some(ts) = d.timestamp {
                    let _ = writeln!(out, "timestamp:         {ts}");
                }
                let _ = writeln!(out, "system:            {}", d.system);
                let _ = writeln!(out, "target:            {}", d.target);
                d.config.text_lines(&mut out);
                let _ = writeln!(out, "layers:");
                for s in &d.steps {
                    let how = if s.exact { "exact" } else { "numeric" };
                    let _ = writeln!(out, "  order {:>2} ({how}): {}", s.order, s.matched);
                }
                let _ = writeln!(out, "expression:        {}", d.expression);
                let _ = writeln!(out, "recomposition residual:");
                d.residual.text_lines(&mut out);
            }
            // The raw dump format, so the text rendering stays parseable.
            Document::Operator(d) => out.push_str(&d.dump),
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::operator;
    use crate::verifier::{build_samples, verify_relation, verify_vanishing, RelationId};

    fn small_cfg() -> VerifyConfig {
        VerifyConfig {
            samples: 3,
            g2g3_draws: 2,
            ..VerifyConfig::default()
        }
    }

    fn sample_relation_document(timestamp: Option<u64>) -> Document {
        let cfg = small_cfg();
        let rep = verify_relation(RelationId::A2LemmaI12, &cfg).unwrap();
        Document::Relation(relation_document(&rep, &cfg, timestamp))
    }

    #[test]
    fn relation_json_has_the_documented_shape() {
        let doc = sample_relation_document(None);
        assert!(doc.passed());
        let text = doc.render(ReportFormat::Json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["system"], "a2");
        assert_eq!(v["relation"], "a2_lemma_I12");
        for key in [
            "seed",
            "precision_bits",
            "series_terms",
            "tolerance",
            "samples",
            "g2g3_draws",
        ] {
            assert!(v["config"][key].is_number(), "missing config.{key}");
        }
        let per_sample = v["per_sample"].as_array().unwrap();
        assert_eq!(per_sample.len(), 3);
        for s in per_sample {
            assert!(s["index"].is_number());
            assert!(s["max_residual"].is_number());
            assert!(s["worst_coefficient_multiindex"].is_string());
        }
        assert_eq!(v["syntactic_zero"], false);
        assert_eq!(v["halfperiod_exact"], true);
        assert_eq!(v["verdict"], "pass");
    }

    #[test]
    fn rendering_is_deterministic_and_timestamp_is_optional() {
        let a = sample_relation_document(None);
        let b = sample_relation_document(None);
        for fmt in [ReportFormat::Json, ReportFormat::Text] {
            assert_eq!(a.render(fmt), b.render(fmt));
        }
        assert!(!a.render(ReportFormat::Json).contains("timestamp"));
        assert!(!a.render(ReportFormat::Text).contains("timestamp"));

        let stamped = sample_relation_document(Some(1_755_000_000));
        assert!(stamped
            .render(ReportFormat::Json)
            .contains("\"timestamp\": 1755000000"));
        assert!(stamped
            .render(ReportFormat::Text)
            .contains("timestamp:         1755000000"));
    }

    #[test]
    fn text_rendering_shows_the_verdict_and_samples() {
        let doc = sample_relation_document(None);
        let text = doc.render(ReportFormat::Text);
        assert!(text.contains("relation:          a2_lemma_I12"));
        assert!(text.contains("verdict:           pass"));
        assert_eq!(text.matches("sample ").count(), 3);
    }

    #[test]
    fn commutator_document_aggregates_the_verdict() {
        let cfg = small_cfg();
        let mut set = build_samples(SystemId::A2, &cfg).unwrap();
        let l1 = operator(SystemId::A2, OperatorName::L1);
        let i12 = operator(SystemId::A2, OperatorName::I12);
        let good = verify_vanishing("[L1,I12]", &l1.commutator(&i12), &mut set, cfg.tolerance)
            .unwrap();
        // A deliberately non-vanishing "commutator": L1 itself.
        let bad = verify_vanishing("L1", &l1, &mut set, cfg.tolerance).unwrap();

        let doc = commutator_document(SystemId::A2, &[good.clone()], &cfg, None);
        assert_eq!(doc.verdict, "pass");
        let doc = commutator_document(SystemId::A2, &[good, bad], &cfg, None);
        assert_eq!(doc.verdict, "fail");
        let text = Document::Commutators(doc).render(ReportFormat::Text);
        // Failure detail lines appear only for the failing block.
        assert!(text.contains("verdict fail"));
        assert!(text.contains("sample "));
    }

    #[test]
    fn curve_document_lists_exact_terms() {
        let cmp = crate::curves::compare_sv_formula().unwrap();
        let doc = curve_document(&cmp.reduced, Some(&cmp), None);
        assert_eq!(doc.verdict, "pass");
        assert_eq!(doc.terms.len(), cmp.reduced.len());
        // The monic nu^3 head appears as an exact unit coefficient.
        assert!(doc
            .terms
            .iter()
            .any(|t| t.coefficient == "1" && t.monomial == vec![("nu".to_string(), 3)]));
        let text = Document::Curve(doc).render(ReportFormat::Text);
        assert!(text.contains("only g3 sign:      yes"));

        let plain = curve_document(&cmp.reduced, None, None);
        assert_eq!(plain.verdict, "pass");
        assert!(!Document::Curve(plain)
            .render(ReportFormat::Json)
            .contains("comparison"));
    }

    #[test]
    fn operator_document_text_is_the_parseable_dump() {
        let op = operator(SystemId::B2, OperatorName::L1);
        let doc = operator_document(SystemId::B2, OperatorName::L1, &op, None);
        let text = Document::Operator(doc).render(ReportFormat::Text);
        let (system, parsed) = DiffOp::parse_dump(&text).unwrap();
        assert_eq!(system, "b2");
        assert_eq!(&parsed, op.as_ref());
    }

    #[test]
    fn format_names_parse() {
        assert_eq!(ReportFormat::parse("json"), Some(ReportFormat::Json));
        assert_eq!(ReportFormat::parse("TEXT"), Some(ReportFormat::Text));
        assert_eq!(ReportFormat::parse("yaml"), None);
    }
}
