//! Differential structure of the elliptic coefficient ring.
//!
//! Coefficients of the catalog operators live in the polynomial ring
//! generated by `g2`, `g3` and the values `P[a]` = wp(a.x),
//! `Q[a]` = wp'(a.x) at finitely many argument forms `a`. This module
//! supplies the rules that close that ring under differentiation:
//!
//! * `d(P[a])/dx_i = a_i * Q[a]`,
//! * `d(Q[a])/dx_i = a_i * (6 P[a]^2 - g2/2)` (the second derivative of
//!   wp, obtained by differentiating `Q^2 = 4P^3 - g2 P - g3` once),
//! * `Q[a]^2 -> 4 P[a]^3 - g2 P[a] - g3`, applied eagerly so canonical
//!   forms keep Q-degree at most one per argument.
//!
//! The three-term determinant identity relating wp values at dependent
//! arguments (u + v + w = 0) is deliberately NOT used as a rewrite:
//! function-level vanishing modulo that ideal is certified numerically
//! by the verifier instead.

use crate::error::SymbolError;
use crate::poly::CoeffPoly;
use crate::rational::Rational;
use crate::symbol::{normalize_argform, ArgForm, SymbolId};

/// wp at a raw linear form; even parity folds the sign away.
pub fn wp(raw: &[i64]) -> Result<CoeffPoly, SymbolError> {
    let (form, _) = normalize_argform(raw)?;
    Ok(CoeffPoly::from_symbol(SymbolId::Wp(form)))
}

/// wp' at a raw linear form; odd parity keeps the sign.
pub fn wp_prime(raw: &[i64]) -> Result<CoeffPoly, SymbolError> {
    let (form, sign) = normalize_argform(raw)?;
    Ok(CoeffPoly::monomial(
        Rational::from_int(sign),
        &[(SymbolId::WpPrime(form), 1)],
    ))
}

/// `4 P[a]^3 - g2 P[a] - g3`: the canonical image of `Q[a]^2`.
pub fn wp_prime_square_image(a: ArgForm) -> CoeffPoly {
    let p = SymbolId::Wp(a);
    &(&CoeffPoly::monomial(Rational::from_int(4), &[(p, 3)])
        - &CoeffPoly::monomial(Rational::ONE, &[(SymbolId::G2, 1), (p, 1)]))
        - &CoeffPoly::from_symbol(SymbolId::G3)
}

/// `6 P[a]^2 - g2/2`: the second derivative of wp, used both by the
/// derivation and to transcribe displayed wp'' occurrences.
pub fn wp_second(a: ArgForm) -> CoeffPoly {
    &CoeffPoly::monomial(Rational::from_int(6), &[(SymbolId::Wp(a), 2)])
        - &CoeffPoly::monomial(Rational::new(1, 2), &[(SymbolId::G2, 1)])
}

/// Rewrites every `Q[a]^k` with `k >= 2` through the Weierstrass ODE
/// until each Q-symbol appears with exponent at most one. Idempotent.
pub fn rewrite_wp_prime_square(p: &CoeffPoly) -> CoeffPoly {
    let mut out = p.clone();
    loop {
        let offender = out
            .table()
            .symbols()
            .iter()
            .copied()
            .find(|s| matches!(s, SymbolId::WpPrime(_)) && out.degree_of(s) >= 2);
        let Some(sym) = offender else {
            return out;
        };
        let SymbolId::WpPrime(a) = sym else {
            unreachable!()
        };
        // The image has no Q-symbols, so one pass settles this symbol.
        out = out.reduce_symbol_power(&sym, 2, &wp_prime_square_image(a));
    }
}

/// Reports whether every Q-symbol occurs with exponent at most one.
pub fn is_q_canonical(p: &CoeffPoly) -> bool {
    p.table()
        .symbols()
        .iter()
        .all(|s| !matches!(s, SymbolId::WpPrime(_)) || p.degree_of(s) <= 1)
}

/// Partial derivative of a coefficient polynomial with respect to
/// position variable `var` (0-based), returned in canonical form.
pub fn differentiate_coeff(p: &CoeffPoly, var: usize) -> CoeffPoly {
    let mut acc = CoeffPoly::zero();
    let table = p.table().clone();
    let nsyms = table.len();
    for (mono, coeff) in p.terms() {
        for i in 0..nsyms {
            let e = mono.exp(i);
            if e == 0 {
                continue;
            }
            let inner = match symbol_derivative(&table.symbols()[i], var) {
                None => continue,
                Some(d) => d,
            };
            // c * sym^e * rest  ->  (c*e) * sym^(e-1) * rest * d(sym)
            let mut reduced = *mono;
            reduced.0[i] -= 1;
            let stub = CoeffPoly::from_parts(
                table.clone(),
                [(reduced, coeff * &Rational::from_int(e as i64))]
                    .into_iter()
                    .collect(),
            );
            acc = &acc + &stub.mul(&inner);
        }
    }
    rewrite_wp_prime_square(&acc)
}

/// `d(sym)/dx_var`, or `None` when the symbol is a constant.
fn symbol_derivative(sym: &SymbolId, var: usize) -> Option<CoeffPoly> {
    match sym {
        SymbolId::Wp(a) => {
            let c = a.coeff(var);
            (c != 0).then(|| {
                CoeffPoly::monomial(Rational::from_int(c), &[(SymbolId::WpPrime(*a), 1)])
            })
        }
        SymbolId::WpPrime(a) => {
            let c = a.coeff(var);
            (c != 0).then(|| wp_second(*a).scale(&Rational::from_int(c)))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn form(raw: &[i64]) -> ArgForm {
        normalize_argform(raw).unwrap().0
    }

    fn p_sym(raw: &[i64]) -> SymbolId {
        SymbolId::Wp(form(raw))
    }

    fn q_sym(raw: &[i64]) -> SymbolId {
        SymbolId::WpPrime(form(raw))
    }

    #[test]
    fn wp_is_even_and_wp_prime_is_odd() {
        assert_eq!(
            wp(&[-1, 1, 0]).unwrap(),
            CoeffPoly::from_symbol(p_sym(&[1, -1, 0]))
        );
        assert_eq!(
            wp_prime(&[-1, 1, 0]).unwrap(),
            CoeffPoly::from_symbol(q_sym(&[1, -1, 0])).neg()
        );
        assert_eq!(
            wp(&[1, 0, -1]).unwrap(),
            CoeffPoly::from_symbol(p_sym(&[1, 0, -1]))
        );
    }

    #[test]
    fn wp_derivative_follows_the_chain_rule() {
        let p = CoeffPoly::from_symbol(p_sym(&[1, -1, 0]));
        assert_eq!(
            differentiate_coeff(&p, 0),
            CoeffPoly::from_symbol(q_sym(&[1, -1, 0]))
        );
        assert_eq!(
            differentiate_coeff(&p, 1),
            CoeffPoly::from_symbol(q_sym(&[1, -1, 0])).neg()
        );
        assert!(differentiate_coeff(&p, 2).is_zero());
    }

    #[test]
    fn wp_prime_derivative_closes_through_the_ode() {
        let q = CoeffPoly::from_symbol(q_sym(&[1, -1, 0]));
        assert_eq!(differentiate_coeff(&q, 0), wp_second(form(&[1, -1, 0])));
    }

    #[test]
    fn q_square_rewrites_to_the_ode_cubic() {
        let a = form(&[1, -1, 0]);
        let q2 = CoeffPoly::monomial(Rational::ONE, &[(q_sym(&[1, -1, 0]), 2)]);
        assert_eq!(rewrite_wp_prime_square(&q2), wp_prime_square_image(a));

        let q3 = CoeffPoly::monomial(Rational::ONE, &[(q_sym(&[1, -1, 0]), 3)]);
        let expected = wp_prime_square_image(a)
            .mul(&CoeffPoly::from_symbol(q_sym(&[1, -1, 0])));
        assert_eq!(rewrite_wp_prime_square(&q3), expected);
    }

    #[test]
    fn rewrite_leaves_canonical_input_alone() {
        let p = CoeffPoly::monomial(Rational::ONE, &[(p_sym(&[1, -1, 0]), 1), (SymbolId::G2, 1)]);
        assert_eq!(rewrite_wp_prime_square(&p), p);
    }

    fn arb_elliptic_poly() -> impl Strategy<Value = CoeffPoly> {
        let syms = prop_oneof![
            Just(SymbolId::G2),
            Just(SymbolId::G3),
            Just(p_sym(&[1, -1, 0])),
            Just(p_sym(&[0, 1, -1])),
            Just(q_sym(&[1, -1, 0])),
            Just(q_sym(&[1, 0, -1])),
        ];
        proptest::collection::vec(((syms.clone(), 0u32..3), (syms, 0u32..2), -5i64..5), 0..4)
            .prop_map(|terms| {
                let mut acc = CoeffPoly::zero();
                for ((s1, e1), (s2, e2), c) in terms {
                    acc = &acc
                        + &CoeffPoly::monomial(Rational::from_int(c), &[(s1, e1), (s2, e2)]);
                }
                acc
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn mixed_partials_commute(p in arb_elliptic_poly(), i in 0usize..3, j in 0usize..3) {
            let ij = differentiate_coeff(&differentiate_coeff(&p, i), j);
            let ji = differentiate_coeff(&differentiate_coeff(&p, j), i);
            prop_assert_eq!(ij, ji);
        }

        #[test]
        fn derivation_satisfies_leibniz(p in arb_elliptic_poly(), q in arb_elliptic_poly(), v in 0usize..3) {
            let lhs = differentiate_coeff(&rewrite_wp_prime_square(&p.mul(&q)), v);
            let rhs = &differentiate_coeff(&p, v).mul(&rewrite_wp_prime_square(&q))
                + &rewrite_wp_prime_square(&p).mul(&differentiate_coeff(&q, v));
            prop_assert_eq!(lhs, rewrite_wp_prime_square(&rhs));
        }

        #[test]
        fn rewrite_is_idempotent_and_canonical(p in arb_elliptic_poly()) {
            let once = rewrite_wp_prime_square(&p);
            prop_assert!(is_q_canonical(&once));
            prop_assert_eq!(rewrite_wp_prime_square(&once), once);
        }
    }
}
