//! High-precision numeric evaluation of wp and wp', and deterministic
//! sample generation for the vanishing oracle.
//!
//! wp is evaluated through its Laurent expansion at the origin,
//!
//! `wp(z) = z^-2 + sum_{k>=2} c_k z^(2k-2)`,
//! `c_2 = g2/20, c_3 = g3/28,
//!  c_k = 3/((2k+1)(k-3)) * sum_{m=2}^{k-2} c_m c_{k-m}`,
//!
//! with wp' obtained by termwise differentiation. Samples are drawn so
//! that every argument the operators mention lands in an annulus
//! `0.1 <= |z| <= 0.4` well inside the series' convergence disc (the
//! nearest lattice point sits at distance comparable to the periods,
//! which are of order one for the invariant sizes drawn here).
//!
//! Every quantity that decides acceptance is exact: coordinates and
//! invariants are dyadic rationals, and the annulus test compares
//! integer numerators, so a seed reproduces the identical sample set on
//! any platform. Each evaluation returns an error bound combining the
//! geometric tail estimate of the series with a fixed-point roundoff
//! allowance proportional to the operation count and the pole
//! magnitude.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::catalog::{argument_forms, dependent_triples, SystemId};
use crate::error::NumError;
use crate::numeric::{BigComplex, BigFloat};
use crate::poly::Valuation;
use crate::rational::Rational;
use crate::symbol::{normalize_argform, ArgForm, SymbolId};

pub const DEFAULT_SERIES_TERMS: usize = 48;
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Denominator of coordinate draws; 512 makes the annulus test exact
/// on integer numerators.
const COORD_DEN: i64 = 512;
/// Coordinate numerators are drawn from [-COORD_SPAN, COORD_SPAN].
const COORD_SPAN: i64 = 409;
/// `ceil(0.1^2 * 512^2)` and `floor(0.4^2 * 512^2)`: the annulus test
/// `0.1 <= |z| <= 0.4` on squared integer numerators.
const R2_MIN: i64 = 2622;
const R2_MAX: i64 = 41943;
/// Invariant draws use numerators over 64 in [-256, 256]: |g| <= 4.
const G_DEN: i64 = 64;
const G_SPAN: i64 = 256;

const DRAW_BUDGET: usize = 10_000;

/// Independent deterministic stream `index` of the master `seed`.
fn stream_rng(seed: u64, kind: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream((kind << 32) | (index & 0xffff_ffff));
    rng
}

/// Unbiased uniform draw from [lo, hi] by rejection.
fn uniform_i64(rng: &mut ChaCha12Rng, lo: i64, hi: i64) -> i64 {
    let span = (hi - lo + 1) as u64;
    let limit = u64::MAX - u64::MAX % span;
    loop {
        let r = rng.next_u64();
        if r < limit {
            return lo + (r % span) as i64;
        }
    }
}

// ---- exact complex rational helpers ------------------------------------

fn cmul(a: &(Rational, Rational), b: &(Rational, Rational)) -> (Rational, Rational) {
    (
        &(&a.0 * &b.0) - &(&a.1 * &b.1),
        &(&a.0 * &b.1) + &(&a.1 * &b.0),
    )
}

fn cscale(a: &(Rational, Rational), f: &Rational) -> (Rational, Rational) {
    (&a.0 * f, &a.1 * f)
}

fn csub(a: &(Rational, Rational), b: &(Rational, Rational)) -> (Rational, Rational) {
    (&a.0 - &b.0, &a.1 - &b.1)
}

/// `|re| + |im|`: an exact norm equivalent to the modulus within a
/// factor of sqrt(2).
fn cnorm1(a: &(Rational, Rational)) -> Rational {
    &a.0.abs() + &a.1.abs()
}

// ---- the Laurent series -------------------------------------------------

pub struct WpSeries {
    bits: u32,
    nterms: usize,
    g2: BigComplex,
    g3: BigComplex,
    /// `coeffs[k]` is `c_k`; entries 0 and 1 are unused zeros.
    coeffs: Vec<BigComplex>,
}

/// One evaluation of wp and wp' with its error bound.
pub struct WpEval {
    pub p: BigComplex,
    pub q: BigComplex,
    /// Bound on the absolute error of both components: series tail plus
    /// roundoff allowance.
    pub err: BigFloat,
}

impl WpSeries {
    pub fn new(g2: BigComplex, g3: BigComplex, nterms: usize) -> WpSeries {
        assert!(nterms >= 8, "too few series terms for a tail estimate");
        let bits = g2.bits();
        assert_eq!(bits, g3.bits());
        let mut coeffs = vec![BigComplex::zero(bits); nterms + 1];
        coeffs[2] = g2.scale(&BigFloat::from_rational(&Rational::new(1, 20), bits));
        coeffs[3] = g3.scale(&BigFloat::from_rational(&Rational::new(1, 28), bits));
        for k in 4..=nterms {
            let mut sum = BigComplex::zero(bits);
            for m in 2..=(k - 2) {
                sum = &sum + &(&coeffs[m] * &coeffs[k - m]);
            }
            let factor = Rational::new(3, ((2 * k + 1) * (k - 3)) as i64);
            coeffs[k] = sum.scale(&BigFloat::from_rational(&factor, bits));
        }
        WpSeries {
            bits,
            nterms,
            g2,
            g3,
            coeffs,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn g2(&self) -> &BigComplex {
        &self.g2
    }

    pub fn g3(&self) -> &BigComplex {
        &self.g3
    }

    /// Evaluates wp and wp' at `z != 0`.
    pub fn eval(&self, z: &BigComplex) -> Result<WpEval, NumError> {
        let bits = self.bits;
        let one = BigComplex::one(bits);
        let inv = &one / z;
        let inv2 = &inv * &inv;
        let inv3 = &inv2 * &inv;
        let w = z * z;

        // Series parts by Horner, keeping the last four term magnitudes
        // for the tail estimate.
        // wp:  sum_{k=2..N} c_k w^(k-1)  = w * (... Horner in w ...)
        // wp': sum_{k=2..N} (2k-2) c_k w^(k-2) * z
        let mut sp = BigComplex::zero(bits);
        let mut sq = BigComplex::zero(bits);
        for k in (2..=self.nterms).rev() {
            sp = &(&sp * &w) + &self.coeffs[k];
            let dk = BigFloat::from_i64((2 * k - 2) as i64, bits);
            sq = &(&sq * &w) + &self.coeffs[k].scale(&dk);
        }
        sp = &sp * &w; // lowest wp power is w^1 (z^2)
        let p = &inv2 + &sp;
        let q = q_combine(&inv3, &sq, z);

        // Tail magnitudes of the wp series at this w: |c_k w^(k-1)|.
        let wmag = w.norm_inf();
        let term = |k: usize| -> f64 {
            self.coeffs[k].norm_inf().to_f64() * wmag.to_f64().powi((k - 1) as i32)
        };
        let n = self.nterms;
        let m1 = term(n).max(term(n - 1));
        let m0 = term(n - 2).max(term(n - 3));
        let zmag = z.norm_inf().to_f64();
        let series_tail = if m1 == 0.0 {
            0.0
        } else {
            if m0 == 0.0 || m1 >= m0 {
                return Err(NumError::DivergenceSuspected(zmag));
            }
            let rho = m1 / m0;
            // wp' terms carry an extra factor 2k/|z| relative to wp;
            // absorb it with a generous constant.
            m1 * rho / (1.0 - rho) * (4.0 * n as f64 / zmag.min(1.0) + 1.0)
        };
        // Roundoff allowance: each Horner step truncates once; the
        // dominant magnitudes are the pole terms.
        let pole = std::cmp::max(BigFloat::one(bits), inv3.norm_inf());
        let ops = BigFloat::from_i64(8 * (self.nterms as i64 + 8), bits);
        let roundoff = &(&BigFloat::ulp(bits) * &ops) * &pole;
        let err = &BigFloat::from_f64(series_tail, bits) + &roundoff;
        Ok(WpEval { p, q, err })
    }
}

/// `-2 z^-3 + z * sq`: the odd-parity assembly of wp'. Kept as a named
/// helper so the parity structure (odd powers of `z` only) is explicit.
fn q_combine(inv3: &BigComplex, sq: &BigComplex, z: &BigComplex) -> BigComplex {
    let minus_two = BigFloat::from_i64(-2, inv3.bits());
    &inv3.scale(&minus_two) + &(z * sq)
}

// ---- invariant draws ------------------------------------------------------

/// One exact draw of the invariants, with the series built at `bits`.
pub struct InvariantDraw {
    pub index: usize,
    pub g2: (Rational, Rational),
    pub g3: (Rational, Rational),
    pub series: WpSeries,
}

/// Draws complex `g2`, `g3` as dyadic rationals, rejecting
/// near-degenerate draws: the discriminant `g2^3 - 27 g3^2` must have
/// exact 1-norm at least 1/16, which keeps the half-period roots and
/// the period lattice well separated.
pub fn draw_invariants(
    seed: u64,
    bits: u32,
    series_terms: usize,
    index: usize,
) -> Result<InvariantDraw, NumError> {
    let mut rng = stream_rng(seed, 1, index as u64);
    for _ in 0..DRAW_BUDGET {
        let mut part = || Rational::new(uniform_i64(&mut rng, -G_SPAN, G_SPAN), G_DEN);
        let g2 = (part(), part());
        let g3 = (part(), part());
        let g2cubed = cmul(&cmul(&g2, &g2), &g2);
        let disc = csub(&g2cubed, &cscale(&cmul(&g3, &g3), &Rational::from_int(27)));
        if cnorm1(&disc) < Rational::new(1, 16) {
            continue;
        }
        let g2c = BigComplex::from_rationals(&g2.0, &g2.1, bits);
        let g3c = BigComplex::from_rationals(&g3.0, &g3.1, bits);
        return Ok(InvariantDraw {
            index,
            g2,
            g3,
            series: WpSeries::new(g2c, g3c, series_terms),
        });
    }
    Err(NumError::RetryExhausted(DRAW_BUDGET))
}

// ---- sample points --------------------------------------------------------

/// One accepted configuration: exact coordinates, the evaluated
/// `P`/`Q` values for every argument form (plus `g2`, `g3`) in a
/// [`Valuation`], and the worst evaluation error bound.
pub struct SamplePoint {
    pub index: usize,
    /// Exact (re, im) coordinate pairs.
    pub coords: Vec<(Rational, Rational)>,
    /// Normalized argument forms with their exact argument values.
    pub args: Vec<(ArgForm, (Rational, Rational))>,
    pub valuation: Valuation,
    pub err_bound: BigFloat,
}

/// Integer numerators of one coordinate draw.
fn draw_numerators(rng: &mut ChaCha12Rng, nvars: usize) -> Vec<(i64, i64)> {
    (0..nvars)
        .map(|_| {
            (
                uniform_i64(rng, -COORD_SPAN, COORD_SPAN),
                uniform_i64(rng, -COORD_SPAN, COORD_SPAN),
            )
        })
        .collect()
}

/// Draws coordinates until every argument form of the system lands in
/// the annulus, then evaluates wp and wp' at each argument.
pub fn sample_point(
    system: SystemId,
    draw: &InvariantDraw,
    seed: u64,
    index: usize,
) -> Result<SamplePoint, NumError> {
    let nvars = system.nvars();
    let forms = argument_forms(system);
    let mut rng = stream_rng(seed, 2, index as u64);
    'outer: for _ in 0..DRAW_BUDGET {
        let nums = draw_numerators(&mut rng, nvars);
        let mut arg_nums: Vec<(i64, i64)> = Vec::with_capacity(forms.len());
        for raw in forms {
            let (re, im) = raw
                .iter()
                .zip(&nums)
                .fold((0i64, 0i64), |acc, (a, (nre, nim))| {
                    (acc.0 + a * nre, acc.1 + a * nim)
                });
            let r2 = re * re + im * im;
            if !(R2_MIN..=R2_MAX).contains(&r2) {
                continue 'outer;
            }
            arg_nums.push((re, im));
        }
        return finish_sample(system, draw, index, nums, arg_nums);
    }
    Err(NumError::RetryExhausted(DRAW_BUDGET))
}

fn finish_sample(
    system: SystemId,
    draw: &InvariantDraw,
    index: usize,
    nums: Vec<(i64, i64)>,
    arg_nums: Vec<(i64, i64)>,
) -> Result<SamplePoint, NumError> {
    let bits = draw.series.bits();
    let mut valuation = Valuation::new(bits);
    valuation.set(
        SymbolId::G2,
        BigComplex::from_rationals(&draw.g2.0, &draw.g2.1, bits),
    );
    valuation.set(
        SymbolId::G3,
        BigComplex::from_rationals(&draw.g3.0, &draw.g3.1, bits),
    );
    let mut args = Vec::new();
    let mut err_bound = BigFloat::zero(bits);
    for (raw, (nre, nim)) in argument_forms(system).iter().zip(&arg_nums) {
        let (form, sign) = normalize_argform(raw).expect("catalog forms are valid");
        assert_eq!(sign, 1, "catalog forms are already normalized");
        let zre = Rational::new(*nre, COORD_DEN);
        let zim = Rational::new(*nim, COORD_DEN);
        let z = BigComplex::from_rationals(&zre, &zim, bits);
        let eval = draw.series.eval(&z)?;
        if eval.err > err_bound {
            err_bound = eval.err.clone();
        }
        valuation.set(SymbolId::Wp(form), eval.p);
        valuation.set(SymbolId::WpPrime(form), eval.q);
        args.push((form, (zre, zim)));
    }
    let coords = nums
        .into_iter()
        .map(|(re, im)| (Rational::new(re, COORD_DEN), Rational::new(im, COORD_DEN)))
        .collect();
    Ok(SamplePoint {
        index,
        coords,
        args,
        valuation,
        err_bound,
    })
}

// ---- sample self-checks ----------------------------------------------------

/// Residuals of the independent consistency checks on one sample, each
/// normalized by its own scale. `parity_exact` records whether
/// evaluation at `-z` reproduced wp bit-for-bit and wp' with the sign
/// flipped.
pub struct SelfCheckReport {
    /// max over arguments of |Q^2 - 4P^3 + g2 P + g3| / (err * scale).
    pub ode_over_err_scale: f64,
    /// max over dependent triples of |det| / scale.
    pub det_over_scale: f64,
    /// max over arguments of the duplication residual / scale.
    pub dup_over_scale: f64,
    pub parity_exact: bool,
}

fn fetch(v: &Valuation, raw: &[i64]) -> (BigComplex, BigComplex) {
    let (form, sign) = normalize_argform(raw).unwrap();
    let p = v.get(&SymbolId::Wp(form)).expect("value present").clone();
    let q = v
        .get(&SymbolId::WpPrime(form))
        .expect("value present")
        .clone();
    let q = if sign < 0 { -&q } else { q };
    (p, q)
}

pub fn self_check(
    system: SystemId,
    draw: &InvariantDraw,
    sample: &SamplePoint,
) -> Result<SelfCheckReport, NumError> {
    let bits = draw.series.bits();
    let g2 = draw.series.g2().clone();
    let g3 = draw.series.g3().clone();
    let four = BigFloat::from_i64(4, bits);
    let err = std::cmp::max(sample.err_bound.clone(), BigFloat::ulp(bits));

    // Differential equation at every argument.
    let mut ode_worst: f64 = 0.0;
    for (form, _) in &sample.args {
        let p = sample.valuation.get(&SymbolId::Wp(*form)).unwrap();
        let q = sample.valuation.get(&SymbolId::WpPrime(*form)).unwrap();
        let q2 = q * q;
        let p3 = &(p * p) * p;
        let rhs = &(&p3.scale(&four) - &(&g2 * p)) - &g3;
        let resid = (&q2 - &rhs).norm_inf();
        let scale = [q2.norm_inf(), p3.scale(&four).norm_inf(), (&g2 * p).norm_inf()]
            .into_iter()
            .max()
            .unwrap();
        let scale = std::cmp::max(scale, BigFloat::one(bits));
        let denom = (&err * &scale).to_f64();
        ode_worst = ode_worst.max(resid.to_f64() / denom);
    }

    // Determinant vanishing at dependent argument triples.
    let mut det_worst: f64 = 0.0;
    for triple in dependent_triples(system) {
        let (p1, q1) = fetch(&sample.valuation, triple[0]);
        let (p2, q2) = fetch(&sample.valuation, triple[1]);
        let (p3, q3) = fetch(&sample.valuation, triple[2]);
        let products = [
            &p1 * &q2,
            &p1 * &q3,
            &p2 * &q1,
            &p2 * &q3,
            &p3 * &q1,
            &p3 * &q2,
        ];
        let det = &(&(&products[0] - &products[1]) - &(&products[2] - &products[4]))
            + &(&products[3] - &products[5]);
        let scale = products
            .iter()
            .map(|t| t.norm_inf())
            .max()
            .unwrap();
        let scale = std::cmp::max(scale, BigFloat::one(bits));
        det_worst = det_worst.max(det.norm_inf().to_f64() / scale.to_f64());
    }

    // Duplication: wp(z) from wp at z/2 through
    // wp(2w) = -2 wp(w) + ((6 wp(w)^2 - g2/2) / (2 wp'(w)))^2.
    let mut dup_worst: f64 = 0.0;
    let half = Rational::new(1, 2);
    for (form, (zre, zim)) in &sample.args {
        let hz = BigComplex::from_rationals(&(zre * &half), &(zim * &half), bits);
        let e = draw.series.eval(&hz)?;
        let six = BigFloat::from_i64(6, bits);
        let two = BigFloat::from_i64(2, bits);
        let wpp = &(&e.p * &e.p).scale(&six) - &g2.scale(&BigFloat::from_rational(&half, bits));
        let ratio = &wpp / &e.q.scale(&two);
        let ratio2 = &ratio * &ratio;
        let doubled = &ratio2 - &e.p.scale(&two);
        let reference = sample.valuation.get(&SymbolId::Wp(*form)).unwrap();
        let resid = (&doubled - reference).norm_inf();
        let scale = [ratio2.norm_inf(), e.p.scale(&two).norm_inf(), reference.norm_inf()]
            .into_iter()
            .max()
            .unwrap();
        let scale = std::cmp::max(scale, BigFloat::one(bits));
        dup_worst = dup_worst.max(resid.to_f64() / scale.to_f64());
    }

    // Parity: bit-exact evenness/oddness of the two components.
    let mut parity_exact = true;
    for (_, (zre, zim)) in &sample.args {
        let z = BigComplex::from_rationals(zre, zim, bits);
        let plus = draw.series.eval(&z)?;
        let minus = draw.series.eval(&(-&z))?;
        if minus.p != plus.p || minus.q != -&plus.q {
            parity_exact = false;
        }
    }

    Ok(SelfCheckReport {
        ode_over_err_scale: ode_worst,
        det_over_scale: det_worst,
        dup_over_scale: dup_worst,
        parity_exact,
    })
}
