//! Exact vanishing check at the half-period configuration.
//!
//! At a half period, wp' vanishes and wp takes one of the branch values
//! e1, e2, e3 — the roots of `4 t^3 - g2 t - g3`. Substituting the
//! assignment into an operator coefficient leaves a polynomial in
//! e1, e2, e3, g2, g3. Vieta gives `e1+e2+e3 = 0`,
//! `e1 e2 + e1 e3 + e2 e3 = -g2/4`, `e1 e2 e3 = g3/4`; turned into the
//! triangular rewrite set
//!
//! `e3   -> -(e1 + e2)`
//! `e2^2 -> g2/4 - e1 e2 - e1^2`
//! `e1^3 -> (g2 e1 + g3) / 4`
//!
//! whose leading terms (lex, e3 > e2 > e1) are pairwise coprime, so the
//! set is a Groebner basis of the ideal of all algebraic relations the
//! roots satisfy, and reduction to the normal-form basis
//! `{1, e1, e1^2, e2, e1 e2, e1^2 e2}` over `Q[g2, g3]` decides
//! membership exactly. A coefficient that vanishes for every (g2, g3)
//! therefore reduces to the zero normal form — an exact, necessary
//! condition for operator vanishing, complementing the generic numeric
//! oracle.

use rustc_hash::FxHashMap;

use crate::catalog::{argument_forms, SystemId};
use crate::diffop::DiffOp;
use crate::error::{SymbolError, VerifyError};
use crate::poly::CoeffPoly;
use crate::rational::Rational;
use crate::symbol::{normalize_argform, ArgForm, SymbolId};

/// Which branch value each argument form lands on.
#[derive(Clone, Debug)]
pub struct HalfPeriodAssignment {
    /// ArgForm -> root index (0, 1, 2 for e1, e2, e3).
    map: FxHashMap<ArgForm, u8>,
}

impl HalfPeriodAssignment {
    pub fn new(entries: &[(&[i64], u8)]) -> Result<HalfPeriodAssignment, SymbolError> {
        let mut map = FxHashMap::default();
        for (raw, e) in entries {
            assert!(*e < 3, "root index out of range");
            let (form, _) = normalize_argform(raw)?;
            map.insert(form, *e);
        }
        Ok(HalfPeriodAssignment { map })
    }

    /// The assignment used in the proofs: for the three-particle system
    /// the differences go to e1, e2, e3 in catalog order; for the
    /// two-variable system x -> e1, y -> e2 and both x±y -> e3 (the
    /// point is (omega1, omega2), and omega1 ± omega2 are congruent to
    /// the third half period modulo the lattice).
    pub fn paper(system: SystemId) -> HalfPeriodAssignment {
        let forms = argument_forms(system);
        let indices: &[u8] = match system {
            SystemId::A2 => &[0, 1, 2],
            SystemId::B2 => &[0, 1, 2, 2],
        };
        let entries: Vec<(&[i64], u8)> = forms
            .iter()
            .copied()
            .zip(indices.iter().copied())
            .collect();
        HalfPeriodAssignment::new(&entries).expect("catalog forms are valid")
    }

    pub fn root_of(&self, form: &ArgForm) -> Option<u8> {
        self.map.get(form).copied()
    }
}

fn root_poly(index: u8) -> CoeffPoly {
    CoeffPoly::from_symbol(SymbolId::Root(index))
}

fn quarter(of: SymbolId) -> CoeffPoly {
    CoeffPoly::from_symbol(of).scale(&Rational::new(1, 4))
}

/// Substitutes the assignment (`Q -> 0`, `P -> e_i`) and reduces to the
/// normal form on `{1, e1, e1^2, e2, e1 e2, e1^2 e2}`.
pub fn halfperiod_reduce(
    p: &CoeffPoly,
    assign: &HalfPeriodAssignment,
) -> Result<CoeffPoly, VerifyError> {
    let mut map: FxHashMap<SymbolId, CoeffPoly> = FxHashMap::default();
    for sym in p.used_symbols() {
        match sym {
            SymbolId::G2 | SymbolId::G3 | SymbolId::Root(_) => {}
            SymbolId::Wp(form) => {
                let Some(e) = assign.root_of(&form) else {
                    return Err(VerifyError::UnassignedArgument(sym.to_string()));
                };
                map.insert(sym, root_poly(e));
            }
            SymbolId::WpPrime(_) => {
                map.insert(sym, CoeffPoly::zero());
            }
            other => {
                return Err(VerifyError::UnassignedArgument(other.to_string()));
            }
        }
    }
    let mut acc = p.substitute(&map);

    // e3 -> -(e1 + e2)
    let e1 = SymbolId::Root(0);
    let e2 = SymbolId::Root(1);
    let e3 = SymbolId::Root(2);
    let mut e3map = FxHashMap::default();
    e3map.insert(e3, -&(&root_poly(0) + &root_poly(1)));
    acc = acc.substitute(&e3map);

    // e2^2 -> g2/4 - e1 e2 - e1^2
    let e2sq = &(&quarter(SymbolId::G2)
        - &CoeffPoly::monomial(Rational::ONE, &[(e1, 1), (e2, 1)]))
        - &CoeffPoly::monomial(Rational::ONE, &[(e1, 2)]);
    while acc.degree_of(&e2) >= 2 {
        acc = acc.reduce_symbol_power(&e2, 2, &e2sq);
    }

    // e1^3 -> (g2 e1 + g3)/4
    let e1cube = &quarter(SymbolId::G2).mul(&CoeffPoly::from_symbol(e1)) + &quarter(SymbolId::G3);
    while acc.degree_of(&e1) >= 3 {
        acc = acc.reduce_symbol_power(&e1, 3, &e1cube);
    }
    Ok(acc)
}

/// Exact verdict of the half-period check on a whole operator.
#[derive(Clone, Debug)]
pub struct HalfPeriodVerdict {
    pub exact_zero: bool,
    /// Multi-index and nonzero normal form of each offending
    /// coefficient.
    pub counterexamples: Vec<(String, String)>,
}

/// Reduces every coefficient of `op`; exact pass iff all normal forms
/// are zero. Vanishing at one point is a necessary condition only —
/// the numeric oracle remains the sufficiency basis.
pub fn verify_halfperiod(
    op: &DiffOp,
    assign: &HalfPeriodAssignment,
) -> Result<HalfPeriodVerdict, VerifyError> {
    let mut counterexamples = Vec::new();
    for (alpha, coeff) in op.sorted_terms() {
        let normal = halfperiod_reduce(coeff, assign)?;
        if !normal.is_zero() {
            counterexamples.push((alpha.render(op.nvars()), normal.to_string()));
        }
    }
    Ok(HalfPeriodVerdict {
        exact_zero: counterexamples.is_empty(),
        counterexamples,
    })
}
