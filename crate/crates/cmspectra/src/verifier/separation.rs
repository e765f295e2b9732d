//! Separation of integrals by their principal symbols.
//!
//! The symbols of the basic integrals pin down a finite generic fibre:
//! for the three-particle system, `sigma(L1) = -(xi1^2+xi2^2+xi3^2)`,
//! `sigma(L2) = xi1+xi2+xi3` and `sigma(L3) = xi1 xi2 xi3` fix the
//! multiset of momenta as the roots of the companion cubic
//! `t^3 - c2 t^2 + ((c2^2+c1)/2) t - c3`, leaving the 3! orderings; for
//! the two-variable system, `sigma(L1) = -(xix^2+xiy^2)` and
//! `sigma(L2) = xix^2 xiy^2` fix `{xix^2, xiy^2}` as the roots of
//! `t^2 + c1 t + c2`, leaving 8 sign/swap choices. A further integral
//! completes the family to an algebraically integrable one exactly when
//! its symbol takes pairwise distinct values on those points for
//! generic fibre constants.
//!
//! Each trial draws random rational constants, computes the fibre at
//! high precision, and classifies every value pair as distinct (gap
//! above `1e-10` of scale) or equal (below `1e-40` of scale); trials
//! whose pairs land between the bands — or whose fibre is nearly
//! degenerate — are redrawn, so both verdicts are firm.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::catalog::{operator, OperatorName, SystemId};
use crate::error::{NumError, VerifyError};
use crate::numeric::{BigComplex, BigFloat};
use crate::poly::{CoeffPoly, Valuation};
use crate::rational::Rational;
use crate::symbol::SymbolId;

const DISTINCT_REL: f64 = 1e-10;
const EQUAL_REL: f64 = 1e-40;
const RESAMPLE_BUDGET: usize = 64;

#[derive(Clone, Debug)]
pub struct SeparationReport {
    pub system: SystemId,
    pub candidate: String,
    pub trials: usize,
    /// Trial-by-trial verdicts: true when all fibre values were
    /// pairwise distinct.
    pub per_trial: Vec<bool>,
    pub separated_trials: usize,
}

impl SeparationReport {
    pub fn always_separates(&self) -> bool {
        self.separated_trials == self.trials
    }

    pub fn never_separates(&self) -> bool {
        self.separated_trials == 0
    }
}

fn stream_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream((3u64 << 32) | trial);
    rng
}

fn draw_rational(rng: &mut ChaCha12Rng) -> Rational {
    // Numerator in [-64, 64] over 8: small generic fibre constants.
    let span = 129u64;
    let limit = u64::MAX - u64::MAX % span;
    loop {
        let r = rng.next_u64();
        if r < limit {
            return Rational::new((r % span) as i64 - 64, 8);
        }
    }
}

/// Horner evaluation of a monic cubic `t^3 + a t^2 + b t + c`.
fn cubic_at(a: &BigComplex, b: &BigComplex, c: &BigComplex, t: &BigComplex) -> BigComplex {
    let inner = &(&(t + a) * t) + b;
    &(&inner * t) + c
}

/// All roots of the monic cubic by Durand-Kerner iteration; `None` when
/// the iteration stalls or the configuration degenerates.
fn cubic_roots(a: &BigComplex, b: &BigComplex, c: &BigComplex, bits: u32) -> Option<[BigComplex; 3]> {
    let seed = BigComplex {
        re: BigFloat::from_f64(0.4, bits),
        im: BigFloat::from_f64(0.9, bits),
    };
    let mut z = [seed.pow(1), seed.pow(2), seed.pow(3)];
    let tiny = BigFloat::from_f64(2f64.powi(-(bits as i32) + 40), bits);
    let floor = BigFloat::from_f64(1e-60, bits);
    for _ in 0..500 {
        let mut worst_step = BigFloat::zero(bits);
        for i in 0..3 {
            let mut den = BigComplex::one(bits);
            for j in 0..3 {
                if j != i {
                    den = &den * &(&z[i] - &z[j]);
                }
            }
            if den.norm_inf() < floor {
                return None;
            }
            let step = &cubic_at(a, b, c, &z[i]) / &den;
            if step.norm_inf() > worst_step {
                worst_step = step.norm_inf();
            }
            z[i] = &z[i] - &step;
        }
        let scale = z
            .iter()
            .map(|r| r.norm_inf())
            .max()
            .unwrap()
            .max(BigFloat::one(bits));
        if worst_step <= &tiny * &scale {
            return Some(z);
        }
    }
    None
}

/// Evaluates the candidate's principal symbol at one momentum point.
fn symbol_value(
    symbol: &CoeffPoly,
    point: &[BigComplex],
    bits: u32,
) -> Result<BigComplex, VerifyError> {
    let mut v = Valuation::new(bits);
    for (i, xi) in point.iter().enumerate() {
        v.set(SymbolId::Xi(i as u8), xi.clone());
    }
    let (value, _) = symbol.eval_complex(&mut v)?;
    Ok(value)
}

enum TrialVerdict {
    Separated,
    Collided,
    Ambiguous,
}

fn classify(values: &[BigComplex], bits: u32) -> TrialVerdict {
    let scale = values
        .iter()
        .map(|v| v.norm_inf())
        .max()
        .unwrap()
        .max(BigFloat::one(bits));
    let distinct = BigFloat::from_f64(DISTINCT_REL, bits);
    let equal = BigFloat::from_f64(EQUAL_REL, bits);
    let mut all_far = true;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let gap = (&values[i] - &values[j]).norm_inf();
            if gap <= &equal * &scale {
                return TrialVerdict::Collided;
            }
            if gap < &distinct * &scale {
                all_far = false;
            }
        }
    }
    if all_far {
        TrialVerdict::Separated
    } else {
        TrialVerdict::Ambiguous
    }
}

/// The generic fibre of one trial: the full list of momentum points.
fn fibre(
    system: SystemId,
    rng: &mut ChaCha12Rng,
    bits: u32,
) -> Option<Vec<Vec<BigComplex>>> {
    let near = BigFloat::from_f64(1e-8, bits);
    match system {
        SystemId::A2 => {
            let c1 = draw_rational(rng);
            let c2 = draw_rational(rng);
            let c3 = draw_rational(rng);
            // t^3 - c2 t^2 + ((c2^2 + c1)/2) t - c3, from
            // -(sum xi^2) = c1, sum xi = c2, prod xi = c3.
            let a = BigComplex::from_rationals(&-&c2, &Rational::ZERO, bits);
            let e2 = &(&(&c2 * &c2) + &c1) * &Rational::new(1, 2);
            let b = BigComplex::from_rationals(&e2, &Rational::ZERO, bits);
            let c = BigComplex::from_rationals(&-&c3, &Rational::ZERO, bits);
            let roots = cubic_roots(&a, &b, &c, bits)?;
            let scale = roots
                .iter()
                .map(|r| r.norm_inf())
                .max()
                .unwrap()
                .max(BigFloat::one(bits));
            for i in 0..3 {
                for j in (i + 1)..3 {
                    if (&roots[i] - &roots[j]).norm_inf() < &near * &scale {
                        return None;
                    }
                }
            }
            const ORDERINGS: [[usize; 3]; 6] = [
                [0, 1, 2],
                [0, 2, 1],
                [1, 0, 2],
                [1, 2, 0],
                [2, 0, 1],
                [2, 1, 0],
            ];
            Some(
                ORDERINGS
                    .iter()
                    .map(|p| p.iter().map(|&k| roots[k].clone()).collect())
                    .collect(),
            )
        }
        SystemId::B2 => {
            let c1 = draw_rational(rng);
            let c2 = draw_rational(rng);
            // {xix^2, xiy^2} are the roots of t^2 + c1 t + c2.
            let c1c = BigComplex::from_rationals(&c1, &Rational::ZERO, bits);
            let c2c = BigComplex::from_rationals(&c2, &Rational::ZERO, bits);
            let four = BigFloat::from_i64(4, bits);
            let disc = &(&c1c * &c1c) - &c2c.scale(&four);
            let sq = disc.sqrt();
            let half = BigFloat::from_rational(&Rational::new(1, 2), bits);
            let u = (&(-&c1c) + &sq).scale(&half);
            let v = (&(-&c1c) - &sq).scale(&half);
            let scale = u.norm_inf().max(v.norm_inf()).max(BigFloat::one(bits));
            if (&u - &v).norm_inf() < &near * &scale
                || u.norm_inf() < &near * &scale
                || v.norm_inf() < &near * &scale
            {
                return None;
            }
            let (su, sv) = (u.sqrt(), v.sqrt());
            let mut points = Vec::with_capacity(8);
            for (x, y) in [(&su, &sv), (&sv, &su)] {
                for sx in [1i64, -1] {
                    for sy in [1i64, -1] {
                        let fx = BigFloat::from_i64(sx, bits);
                        let fy = BigFloat::from_i64(sy, bits);
                        points.push(vec![x.scale(&fx), y.scale(&fy)]);
                    }
                }
            }
            Some(points)
        }
    }
}

/// Runs `trials` independent separation trials of the candidate's
/// principal symbol on the system's generic fibres.
pub fn check_symbol_separation(
    system: SystemId,
    candidate: OperatorName,
    trials: usize,
    seed: u64,
    bits: u32,
) -> Result<SeparationReport, VerifyError> {
    let symbol = operator(system, candidate).principal_symbol();
    let mut per_trial = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = stream_rng(seed, trial as u64);
        let mut verdict = None;
        for _ in 0..RESAMPLE_BUDGET {
            let Some(points) = fibre(system, &mut rng, bits) else {
                continue;
            };
            let values = points
                .iter()
                .map(|p| symbol_value(&symbol, p, bits))
                .collect::<Result<Vec<_>, _>>()?;
            match classify(&values, bits) {
                TrialVerdict::Separated => {
                    verdict = Some(true);
                    break;
                }
                TrialVerdict::Collided => {
                    verdict = Some(false);
                    break;
                }
                TrialVerdict::Ambiguous => continue,
            }
        }
        let Some(v) = verdict else {
            return Err(VerifyError::Num(NumError::DegenerateInstance(
                RESAMPLE_BUDGET,
            )));
        };
        per_trial.push(v);
    }
    let separated_trials = per_trial.iter().filter(|v| **v).count();
    Ok(SeparationReport {
        system,
        candidate: candidate.name().to_string(),
        trials,
        per_trial,
        separated_trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_cubic_roots_reconstruct_the_polynomial() {
        let bits = 256;
        let a = BigComplex::from_rationals(&Rational::new(-3, 2), &Rational::new(1, 4), bits);
        let b = BigComplex::from_rationals(&Rational::new(2, 1), &Rational::ZERO, bits);
        let c = BigComplex::from_rationals(&Rational::new(-5, 4), &Rational::new(-1, 2), bits);
        let roots = cubic_roots(&a, &b, &c, bits).unwrap();
        // Vieta: sum = -a, pairwise = b, product = -c.
        let sum = &(&roots[0] + &roots[1]) + &roots[2];
        assert!((&sum + &a).norm_inf().to_f64() < 1e-55);
        let prod = &(&roots[0] * &roots[1]) * &roots[2];
        assert!((&prod + &c).norm_inf().to_f64() < 1e-55);
    }

    #[test]
    fn symmetric_symbol_never_separates_the_orderings() {
        // sigma(L1) is symmetric in the momenta, so all 6 orderings
        // give one value.
        let r =
            check_symbol_separation(SystemId::A2, OperatorName::L1, 4, 11, 256).unwrap();
        assert!(r.never_separates(), "{:?}", r.per_trial);
    }

    #[test]
    fn quartic_pair_symbol_separates_a2() {
        let r =
            check_symbol_separation(SystemId::A2, OperatorName::L4, 6, 5, 256).unwrap();
        assert!(r.always_separates(), "{:?}", r.per_trial);
    }

    #[test]
    fn single_quartic_symbol_fails_a2() {
        let r =
            check_symbol_separation(SystemId::A2, OperatorName::I12, 6, 5, 256).unwrap();
        assert!(r.never_separates(), "{:?}", r.per_trial);
    }

    #[test]
    fn fifth_order_pair_separates_b2_but_one_factor_does_not() {
        let pair =
            check_symbol_separation(SystemId::B2, OperatorName::L3, 5, 5, 256).unwrap();
        assert!(pair.always_separates(), "{:?}", pair.per_trial);
        let single =
            check_symbol_separation(SystemId::B2, OperatorName::Ix, 5, 5, 256).unwrap();
        assert!(single.never_separates(), "{:?}", single.per_trial);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = check_symbol_separation(SystemId::A2, OperatorName::L4, 5, 9, 256).unwrap();
        let b = check_symbol_separation(SystemId::A2, OperatorName::L4, 5, 9, 256).unwrap();
        assert_eq!(a.per_trial, b.per_trial);
    }
}
