//! Certification of operator identities.
//!
//! The canonical form of a differential operator does not see the
//! addition-theorem relations among wp values at dependent arguments
//! (only the wp'^2 rewrite is applied), so operators that vanish as
//! functions — commutators of the integrals, the spectral relation
//! operators — are generally nonzero syntactically. The vanishing
//! oracle decides such identities numerically: every coefficient of the
//! canonical form is evaluated at deterministic sample configurations
//! drawn from several elliptic curves, and the worst residual, scaled
//! by the largest term magnitude of that coefficient, is compared
//! against a tolerance dozens of orders of magnitude above the noise
//! floor of a true identity and equally far below the generic value of
//! a false one.
//!
//! The half-period reduction ([`halfperiod`]) complements the oracle
//! with an exact necessary condition, and [`descent`] and
//! [`separation`] certify the coefficient provenance and the
//! separation property of the integrals' symbols.

pub mod descent;
pub mod halfperiod;
pub mod separation;

use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rustc_hash::FxHashMap;

use crate::catalog::{
    a2_cubic_relation, a2_generator_binding, a2_pair_relation, b2_generator_binding,
    b2_pair_relation, b2_quartic_relation, operator, OperatorName, SystemId,
};
use crate::diffop::{op_of_poly, DiffOp};
use crate::error::VerifyError;
use crate::numeric::BigFloat;
use crate::wpnum::{
    draw_invariants, sample_point, self_check, InvariantDraw, SamplePoint, SelfCheckReport,
    DEFAULT_PRECISION_BITS, DEFAULT_SERIES_TERMS,
};

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub precision_bits: u32,
    pub series_terms: usize,
    pub tolerance: f64,
    pub samples: usize,
    pub g2g3_draws: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            precision_bits: DEFAULT_PRECISION_BITS,
            series_terms: DEFAULT_SERIES_TERMS,
            tolerance: 1e-30,
            samples: 16,
            g2g3_draws: 3,
        }
    }
}

/// The six certified relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelationId {
    A2LemmaI12,
    A2LemmaI23,
    A2LemmaI13,
    A2Theorem1Second,
    B2Quartic,
    B2SumOfSquares,
}

impl RelationId {
    pub const ALL: [RelationId; 6] = [
        RelationId::A2LemmaI12,
        RelationId::A2LemmaI23,
        RelationId::A2LemmaI13,
        RelationId::A2Theorem1Second,
        RelationId::B2Quartic,
        RelationId::B2SumOfSquares,
    ];

    pub fn id(self) -> &'static str {
        match self {
            RelationId::A2LemmaI12 => "a2_lemma_I12",
            RelationId::A2LemmaI23 => "a2_lemma_I23",
            RelationId::A2LemmaI13 => "a2_lemma_I13",
            RelationId::A2Theorem1Second => "a2_theorem1_second",
            RelationId::B2Quartic => "b2_quartic",
            RelationId::B2SumOfSquares => "b2_sum_of_squares",
        }
    }

    pub fn system(self) -> SystemId {
        match self {
            RelationId::A2LemmaI12
            | RelationId::A2LemmaI23
            | RelationId::A2LemmaI13
            | RelationId::A2Theorem1Second => SystemId::A2,
            RelationId::B2Quartic | RelationId::B2SumOfSquares => SystemId::B2,
        }
    }

    pub fn for_system(system: SystemId) -> Vec<RelationId> {
        RelationId::ALL
            .into_iter()
            .filter(|r| r.system() == system)
            .collect()
    }

    /// Accepts the canonical id with `-` or `_` separators, any case,
    /// with or without the system prefix (`lemma-I12` given `--system
    /// a2` means `a2_lemma_I12`).
    pub fn parse(s: &str, system: Option<SystemId>) -> Option<RelationId> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        for r in RelationId::ALL {
            let canon = r.id().to_ascii_lowercase();
            if norm == canon {
                return Some(r);
            }
            if let Some(sys) = system {
                if r.system() == sys && format!("{}_{}", sys.name(), norm) == canon {
                    return Some(r);
                }
            }
        }
        None
    }
}

impl std::fmt::Display for RelationId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Builds the composed relation operator (e.g. `I^3 + A1 I^2 + A2 I +
/// A3` with every placeholder bound to its integral). Cached: the
/// compositions are the expensive step of every verification.
pub fn relation_operator(id: RelationId) -> Arc<DiffOp> {
    static CACHE: Lazy<Mutex<FxHashMap<RelationId, Arc<DiffOp>>>> =
        Lazy::new(|| Mutex::new(FxHashMap::default()));
    if let Some(op) = CACHE.lock().unwrap().get(&id) {
        return op.clone();
    }
    let (poly, gens) = match id {
        RelationId::A2LemmaI12 => (
            a2_cubic_relation(),
            a2_generator_binding(OperatorName::I12, None),
        ),
        RelationId::A2LemmaI23 => (
            a2_cubic_relation(),
            a2_generator_binding(OperatorName::I23, None),
        ),
        RelationId::A2LemmaI13 => (
            a2_cubic_relation(),
            a2_generator_binding(OperatorName::I31, None),
        ),
        RelationId::A2Theorem1Second => (
            a2_pair_relation(),
            a2_generator_binding(OperatorName::I12, Some(OperatorName::I23)),
        ),
        RelationId::B2Quartic => (b2_quartic_relation(), b2_generator_binding()),
        RelationId::B2SumOfSquares => (b2_pair_relation(), b2_generator_binding()),
    };
    let nvars = id.system().nvars();
    let op = Arc::new(op_of_poly(&poly, &gens, nvars).expect("catalog bindings are complete"));
    CACHE.lock().unwrap().insert(id, op.clone());
    op
}

/// The deterministic evaluation contexts shared by every check under
/// one configuration: the invariant draws and the sample points,
/// round-robin across draws.
pub struct SampleSet {
    pub system: SystemId,
    pub seed: u64,
    pub draws: Vec<InvariantDraw>,
    /// `(draw index, sample)` pairs; the sample index is global.
    pub samples: Vec<(usize, SamplePoint)>,
}

pub fn build_samples(system: SystemId, cfg: &VerifyConfig) -> Result<SampleSet, VerifyError> {
    let draws = (0..cfg.g2g3_draws)
        .map(|i| draw_invariants(cfg.seed, cfg.precision_bits, cfg.series_terms, i))
        .collect::<Result<Vec<_>, _>>()?;
    let mut samples = Vec::with_capacity(cfg.samples);
    for i in 0..cfg.samples {
        let d = i % draws.len();
        let s = sample_point(system, &draws[d], cfg.seed, i)?;
        samples.push((d, s));
    }
    Ok(SampleSet {
        system,
        seed: cfg.seed,
        draws,
        samples,
    })
}

impl SampleSet {
    /// Runs the numeric self-checks on every sample.
    pub fn self_check_all(&self) -> Result<Vec<SelfCheckReport>, VerifyError> {
        self.samples
            .iter()
            .map(|(d, s)| Ok(self_check(self.system, &self.draws[*d], s)?))
            .collect()
    }
}

/// Worst scaled residual of one sample, with the offending derivative
/// multi-index.
#[derive(Clone, Debug)]
pub struct SampleRecord {
    pub index: usize,
    pub max_residual: f64,
    pub worst_coefficient_multiindex: String,
}

#[derive(Clone, Debug)]
pub struct VanishingReport {
    pub system: SystemId,
    pub relation: String,
    pub syntactic_zero: bool,
    pub per_sample: Vec<SampleRecord>,
    pub max_residual: f64,
    pub tolerance: f64,
    /// Filled by the relation-level drivers that also run the exact
    /// half-period reduction.
    pub halfperiod_exact: Option<bool>,
    pub pass: bool,
}

/// Evaluates every coefficient of `op` at every sample; the identity
/// passes when all residuals `|value| / max(1, scale)` stay within
/// `tolerance`. A syntactically zero operator passes immediately.
pub fn verify_vanishing(
    label: &str,
    op: &DiffOp,
    set: &mut SampleSet,
    tolerance: f64,
) -> Result<VanishingReport, VerifyError> {
    let mut report = VanishingReport {
        system: set.system,
        relation: label.to_string(),
        syntactic_zero: op.is_zero(),
        per_sample: Vec::new(),
        max_residual: 0.0,
        tolerance,
        halfperiod_exact: None,
        pass: true,
    };
    if report.syntactic_zero {
        return Ok(report);
    }
    let sorted: Vec<_> = op.sorted_terms();
    for (_, sample) in set.samples.iter_mut() {
        let bits = sample.valuation.bits();
        let one = BigFloat::one(bits);
        let mut worst = 0.0f64;
        let mut worst_idx = String::new();
        for (alpha, coeff) in &sorted {
            let (value, scale) = coeff.eval_complex(&mut sample.valuation)?;
            let denom = std::cmp::max(one.clone(), scale);
            let residual = (&value.norm_inf() / &denom).to_f64();
            if residual > worst {
                worst = residual;
                worst_idx = alpha.render(set.system.nvars());
            }
        }
        report.per_sample.push(SampleRecord {
            index: sample.index,
            max_residual: worst,
            worst_coefficient_multiindex: worst_idx,
        });
        report.max_residual = report.max_residual.max(worst);
    }
    report.pass = report.max_residual <= tolerance;
    Ok(report)
}

/// Certifies one catalog relation: numeric vanishing plus the exact
/// half-period reduction.
pub fn verify_relation(id: RelationId, cfg: &VerifyConfig) -> Result<VanishingReport, VerifyError> {
    let op = relation_operator(id);
    let mut set = build_samples(id.system(), cfg)?;
    let mut report = verify_vanishing(id.id(), &op, &mut set, cfg.tolerance)?;
    let hp = halfperiod::verify_halfperiod(&op, &halfperiod::HalfPeriodAssignment::paper(id.system()))?;
    report.halfperiod_exact = Some(hp.exact_zero);
    report.pass = report.pass && hp.exact_zero;
    Ok(report)
}

/// The operators whose pairwise commutators are checked.
pub fn commutator_suite(system: SystemId) -> &'static [OperatorName] {
    match system {
        SystemId::A2 => &[
            OperatorName::L1,
            OperatorName::L2,
            OperatorName::L3,
            OperatorName::I12,
            OperatorName::I23,
            OperatorName::I31,
        ],
        SystemId::B2 => &[
            OperatorName::L1,
            OperatorName::L2,
            OperatorName::Ix,
            OperatorName::Iy,
            OperatorName::L3,
        ],
    }
}

/// Checks all pairwise commutators of the system's integrals,
/// recording which vanish syntactically and which only as functions.
pub fn verify_commutators(
    system: SystemId,
    cfg: &VerifyConfig,
) -> Result<Vec<VanishingReport>, VerifyError> {
    let names = commutator_suite(system);
    let mut set = build_samples(system, cfg)?;
    let mut out = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            let com = operator(system, *a).commutator(&operator(system, *b));
            let label = format!("[{},{}]", a.name(), b.name());
            out.push(verify_vanishing(&label, &com, &mut set, cfg.tolerance)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> VerifyConfig {
        VerifyConfig {
            samples: 4,
            g2g3_draws: 2,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn relation_ids_parse_in_loose_forms() {
        assert_eq!(
            RelationId::parse("lemma-I12", Some(SystemId::A2)),
            Some(RelationId::A2LemmaI12)
        );
        assert_eq!(
            RelationId::parse("A2_LEMMA_I13", None),
            Some(RelationId::A2LemmaI13)
        );
        assert_eq!(
            RelationId::parse("sum-of-squares", Some(SystemId::B2)),
            Some(RelationId::B2SumOfSquares)
        );
        assert_eq!(RelationId::parse("lemma-I12", Some(SystemId::B2)), None);
        assert_eq!(RelationId::parse("nonsense", None), None);
    }

    #[test]
    fn zero_operator_passes_syntactically() {
        let mut set = build_samples(SystemId::A2, &small_cfg()).unwrap();
        let r = verify_vanishing("zero", &DiffOp::zero(3), &mut set, 1e-30).unwrap();
        assert!(r.pass && r.syntactic_zero);
        assert!(r.per_sample.is_empty());
    }

    #[test]
    fn hamiltonian_is_not_the_zero_operator() {
        // Negative control: a nonzero operator fails with residuals
        // near one.
        let mut set = build_samples(SystemId::A2, &small_cfg()).unwrap();
        let l1 = operator(SystemId::A2, OperatorName::L1);
        let r = verify_vanishing("L1", &l1, &mut set, 1e-30).unwrap();
        assert!(!r.pass && !r.syntactic_zero);
        assert!(r.max_residual > 1e-2, "residual {}", r.max_residual);
    }

    #[test]
    fn schroedinger_commutes_with_the_second_integral() {
        // For the three-particle system L2 is the total momentum, so
        // [L1, L2] differentiates each pair potential along the diagonal
        // direction and cancels exactly in the canonical form.  The
        // two-variable L2 is a fourth-order integral whose commutator
        // cancels only through the differential equation, so there the
        // check is numeric.
        let a2 = operator(SystemId::A2, OperatorName::L1)
            .commutator(&operator(SystemId::A2, OperatorName::L2));
        assert!(a2.is_zero(), "a2: expected syntactic zero");

        let b2 = operator(SystemId::B2, OperatorName::L1)
            .commutator(&operator(SystemId::B2, OperatorName::L2));
        assert!(!b2.is_zero(), "b2: cancellation should not be syntactic");
        let mut set = build_samples(SystemId::B2, &small_cfg()).unwrap();
        let r = verify_vanishing("[L1,L2]", &b2, &mut set, 1e-30).unwrap();
        assert!(r.pass, "b2: residual {}", r.max_residual);
    }

    #[test]
    fn schroedinger_commutes_with_the_cubic_integral_numerically() {
        // [L1, L3] cancels only through the differential equation and
        // the addition identities, i.e. numerically, not syntactically.
        let com = operator(SystemId::A2, OperatorName::L1)
            .commutator(&operator(SystemId::A2, OperatorName::L3));
        assert!(!com.is_zero(), "cancellation should not be syntactic");
        let mut set = build_samples(SystemId::A2, &small_cfg()).unwrap();
        let r = verify_vanishing("[L1,L3]", &com, &mut set, 1e-30).unwrap();
        assert!(r.pass, "max residual {}", r.max_residual);
        assert!(!r.syntactic_zero);
    }

    #[test]
    fn sample_sets_are_deterministic() {
        let a = build_samples(SystemId::A2, &small_cfg()).unwrap();
        let b = build_samples(SystemId::A2, &small_cfg()).unwrap();
        for ((_, x), (_, y)) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.coords, y.coords);
        }
        assert!(a.self_check_all().unwrap().iter().all(|r| r.parity_exact));
    }
}
