//! Eigenvalue-level algebra: the spectral relations as commutative
//! polynomials, the reduction of the three-particle cubic to a planar
//! spectral curve, and the comparison against the reference form of
//! that curve.
//!
//! On the joint eigenspaces the operator relations become polynomial
//! relations between eigenvalues, with the same coefficients; the
//! functions here reuse the catalog builders directly, so there is one
//! source of truth for the coefficients.
//!
//! The reduction restricts the cubic to the zero set of the total
//! momentum (`l2 = 0`).  On that slice every surviving power of `l3` is
//! even, which permits the rational rescaling `l3^2 -> mu^2/27` in
//! place of an irrational substitution `l3 -> sqrt(3)/9 mu`; together
//! with `l1 -> 2 lam` and the shift `I -> nu - (6 g2 - X^2)/3` the
//! relation becomes a monic cubic in `nu` over `Q[lam, mu, g2, g3]`.

use rustc_hash::FxHashMap;

use crate::catalog::{
    a2_cubic_relation, a2_pair_relation, b2_pair_relation, b2_quartic_relation, SystemId,
};
use crate::error::CurveError;
use crate::poly::CoeffPoly;
use crate::rational::Rational;
use crate::symbol::{SpectralVar, SymbolId};

fn sv(v: SpectralVar) -> CoeffPoly {
    CoeffPoly::from_symbol(SymbolId::spectral(v))
}

fn rq(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// The eigenvalue relations of the system, in the order (single
/// integral, pair of integrals).  These are literally the relation
/// polynomials the operator verifier composes.
pub fn spectral_relations(system: SystemId) -> Vec<CoeffPoly> {
    match system {
        SystemId::A2 => vec![a2_cubic_relation(), a2_pair_relation()],
        SystemId::B2 => vec![b2_quartic_relation(), b2_pair_relation()],
    }
}

/// Restricts the three-particle cubic to `l2 = 0` and rewrites it in
/// the planar curve variables: `l3^2 -> mu^2/27`, `l1 -> 2 lam`,
/// `I -> nu - (6 g2 - 9 lam^2)/3`.  Fails if the restriction leaves an
/// odd power of `l3` (the slice must force them all to cancel, or the
/// rescaling of `l3^2` would not be faithful).
pub fn reduce_a2_curve() -> Result<CoeffPoly, CurveError> {
    let l1 = SymbolId::spectral(SpectralVar::L1);
    let l2 = SymbolId::spectral(SpectralVar::L2);
    let l3 = SymbolId::spectral(SpectralVar::L3);
    let i = SymbolId::spectral(SpectralVar::I);

    let mut map: FxHashMap<SymbolId, CoeffPoly> = FxHashMap::default();
    map.insert(l2, CoeffPoly::zero());
    let mut poly = a2_cubic_relation().substitute(&map);

    for (mono, _) in poly.sorted_terms() {
        if let Some(idx) = poly.table().index_of(&l3) {
            if mono.exp(idx) % 2 == 1 {
                return Err(CurveError::OddPowerSurvived(format!(
                    "l3^{} in a term of the restricted cubic",
                    mono.exp(idx)
                )));
            }
        }
    }

    let mu2_over_27 = sv(SpectralVar::Mu).pow(2).scale(&rq(1, 27));
    while poly.degree_of(&l3) >= 2 {
        poly = poly.reduce_symbol_power(&l3, 2, &mu2_over_27);
    }

    map.clear();
    map.insert(l1, sv(SpectralVar::Lambda).scale(&rq(2, 1)));
    poly = poly.substitute(&map);

    // X = 3/2 l1 + 1/2 l2^2 becomes 3 lam on the slice, so the shift
    // reads I -> nu - 2 g2 + 3 lam^2.
    let shift = &(&sv(SpectralVar::Nu) - &CoeffPoly::from_symbol(SymbolId::G2).scale(&rq(2, 1)))
        + &sv(SpectralVar::Lambda).pow(2).scale(&rq(3, 1));
    map.clear();
    map.insert(i, shift);
    Ok(poly.substitute(&map))
}

/// `nu^3 + (6 lam mu^2 - 3 (lam^2 - 3 g2)^2) nu - mu^4
///  + (10 lam^3 - 18 g2 lam + c g3) mu^2 + 2 (lam^2 - 3 g2)^3`.
fn planar_curve(g3_coefficient: &Rational) -> CoeffPoly {
    let lam = sv(SpectralVar::Lambda);
    let mu = sv(SpectralVar::Mu);
    let nu = sv(SpectralVar::Nu);
    let g2 = CoeffPoly::from_symbol(SymbolId::G2);
    let g3 = CoeffPoly::from_symbol(SymbolId::G3);
    let disc = &lam.pow(2) - &g2.scale(&rq(3, 1));
    let nu_coeff = &lam.mul(&mu.pow(2)).scale(&rq(6, 1)) - &disc.pow(2).scale(&rq(3, 1));
    let mu2_coeff = &(&lam.pow(3).scale(&rq(10, 1)) - &g2.mul(&lam).scale(&rq(18, 1)))
        + &g3.scale(g3_coefficient);
    &(&(&nu.pow(3) + &nu_coeff.mul(&nu)) - &mu.pow(4))
        + &(&mu2_coeff.mul(&mu.pow(2)) + &disc.pow(3).scale(&rq(2, 1)))
}

/// The reference planar curve, which normalizes the cubic invariant
/// with the opposite sign: its `mu^2` coefficient carries `+108 g3`.
pub fn sv_reference_curve() -> CoeffPoly {
    planar_curve(&rq(108, 1))
}

/// Term-by-term comparison of the reduced curve with the reference
/// form.
#[derive(Clone, Debug)]
pub struct CurveComparison {
    pub reduced: CoeffPoly,
    pub reference: CoeffPoly,
    /// `reduced - reference`.
    pub difference: CoeffPoly,
    /// True when the difference is exactly `-216 g3 mu^2`, i.e. the two
    /// curves differ only in the sign convention for `g3`.
    pub only_g3_sign: bool,
    /// One-line reading of the outcome.
    pub summary: String,
}

/// Compares the reduced curve against the reference form.  The curves
/// `y^2 = 4x^3 - g2 x - g3` and `y^2 = 4x^3 - g2 x + g3` are isomorphic
/// under `x -> -x`, `y -> iy`, so a discrepancy confined to the sign of
/// `g3` identifies the same spectral curve.
pub fn compare_sv_formula() -> Result<CurveComparison, CurveError> {
    let reduced = reduce_a2_curve()?;
    let reference = sv_reference_curve();
    let difference = &reduced - &reference;
    let expected = crate::poly::parse_poly("-216*g3*mu^2").expect("diff text parses");
    let only_g3_sign = difference == expected;
    let summary = if only_g3_sign {
        "the reduced curve matches the reference up to the sign of g3 \
         (mu^2 coefficient: -108 g3 here, +108 g3 there); the two \
         normalizations are isomorphic via x -> -x, y -> iy"
            .to_string()
    } else {
        format!("unexpected difference: {difference}")
    };
    Ok(CurveComparison {
        reduced,
        reference,
        difference,
        only_g3_sign,
        summary,
    })
}
