//! Sparse multivariate polynomials over [`Rational`].
//!
//! A [`CoeffPoly`] is a term map from exponent vectors to coefficients.
//! Exponent vectors are dense byte arrays indexed against a per-value
//! [`SymbolTable`] (sorted, at most [`MAX_SYMS`] symbols); binary
//! operations align tables automatically. The rings that arise here are
//! small — an operator coefficient ring never needs more than a dozen
//! generators — so a fixed-width key keeps hashing and comparison at a
//! couple of machine operations, which is what makes order-20 operator
//! composition tractable in exact arithmetic.
//!
//! Canonical form: no zero coefficients are stored. The term order is
//! graded lexicographic (total degree first, then the exponent vector
//! against the global symbol order); `Display` emits terms in
//! descending order and `parse` round-trips that text exactly.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::PolyError;
use crate::numeric::{BigComplex, BigFloat};
use crate::rational::Rational;
use crate::symbol::SymbolId;

pub const MAX_SYMS: usize = 24;

/// Dense exponent vector over a [`SymbolTable`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub [u8; MAX_SYMS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_SYMS]);

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|e| *e as u32).sum()
    }

    pub fn exp(&self, idx: usize) -> u32 {
        self.0[idx] as u32
    }

    fn checked_mul(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = [0u8; MAX_SYMS];
        for i in 0..MAX_SYMS {
            out[i] = self.0[i].checked_add(other.0[i])?;
        }
        Some(Monomial(out))
    }

    fn remap(&self, map: &[u8; MAX_SYMS]) -> Monomial {
        let mut out = [0u8; MAX_SYMS];
        for i in 0..MAX_SYMS {
            if self.0[i] != 0 {
                out[map[i] as usize] = self.0[i];
            }
        }
        Monomial(out)
    }

    /// Graded lexicographic order using the table's symbol order.
    pub fn grlex(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Sorted, deduplicated list of the symbols a polynomial may mention.
#[derive(Debug, PartialEq, Eq)]
pub struct SymbolTable {
    syms: Vec<SymbolId>,
}

impl SymbolTable {
    pub fn new(mut syms: Vec<SymbolId>) -> Arc<SymbolTable> {
        syms.sort_unstable();
        syms.dedup();
        assert!(
            syms.len() <= MAX_SYMS,
            "symbol table would need {} symbols; the engine is sized for {}",
            syms.len(),
            MAX_SYMS
        );
        Arc::new(SymbolTable { syms })
    }

    pub fn empty() -> Arc<SymbolTable> {
        static EMPTY: once_cell::sync::Lazy<Arc<SymbolTable>> =
            once_cell::sync::Lazy::new(|| Arc::new(SymbolTable { syms: Vec::new() }));
        EMPTY.clone()
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn symbols(&self) -> &[SymbolId] {
        &self.syms
    }

    pub fn index_of(&self, sym: &SymbolId) -> Option<usize> {
        self.syms.binary_search(sym).ok()
    }

    fn contains_all(&self, other: &SymbolTable) -> bool {
        other.syms.iter().all(|s| self.index_of(s).is_some())
    }
}

/// Computes the union table and the position remaps of both inputs.
fn union_tables(
    a: &Arc<SymbolTable>,
    b: &Arc<SymbolTable>,
) -> (Arc<SymbolTable>, [u8; MAX_SYMS], [u8; MAX_SYMS]) {
    let identity = |_t: &SymbolTable| {
        let mut m = [0u8; MAX_SYMS];
        for (i, slot) in m.iter_mut().enumerate() {
            *slot = i as u8;
        }
        m
    };
    if Arc::ptr_eq(a, b) || a.syms == b.syms {
        return (a.clone(), identity(a), identity(a));
    }
    if a.contains_all(b) {
        let mut mb = [0u8; MAX_SYMS];
        for (i, s) in b.syms.iter().enumerate() {
            mb[i] = a.index_of(s).unwrap() as u8;
        }
        return (a.clone(), identity(a), mb);
    }
    let mut merged: Vec<SymbolId> = a.syms.clone();
    merged.extend(b.syms.iter().copied());
    let table = SymbolTable::new(merged);
    let mut ma = [0u8; MAX_SYMS];
    let mut mb = [0u8; MAX_SYMS];
    for (i, s) in a.syms.iter().enumerate() {
        ma[i] = table.index_of(s).unwrap() as u8;
    }
    for (i, s) in b.syms.iter().enumerate() {
        mb[i] = table.index_of(s).unwrap() as u8;
    }
    (table, ma, mb)
}

#[derive(Clone, Debug)]
pub struct CoeffPoly {
    table: Arc<SymbolTable>,
    terms: FxHashMap<Monomial, Rational>,
}

impl CoeffPoly {
    pub fn zero() -> CoeffPoly {
        CoeffPoly {
            table: SymbolTable::empty(),
            terms: FxHashMap::default(),
        }
    }

    pub fn constant(c: Rational) -> CoeffPoly {
        let mut terms = FxHashMap::default();
        if !c.is_zero() {
            terms.insert(Monomial::ONE, c);
        }
        CoeffPoly {
            table: SymbolTable::empty(),
            terms,
        }
    }

    pub fn one() -> CoeffPoly {
        CoeffPoly::constant(Rational::ONE)
    }

    pub fn from_symbol(sym: SymbolId) -> CoeffPoly {
        CoeffPoly::monomial(Rational::ONE, &[(sym, 1)])
    }

    /// Builds `coeff * prod(sym^exp)`. Repeated symbols accumulate.
    pub fn monomial(coeff: Rational, factors: &[(SymbolId, u32)]) -> CoeffPoly {
        if coeff.is_zero() {
            return CoeffPoly::zero();
        }
        let table = SymbolTable::new(factors.iter().map(|(s, _)| *s).collect());
        let mut mono = Monomial::ONE;
        for (sym, exp) in factors {
            let idx = table.index_of(sym).unwrap();
            let e = mono.0[idx] as u32 + exp;
            mono.0[idx] = u8::try_from(e)
                .unwrap_or_else(|_| panic!("monomial exponent overflow at {sym}"));
        }
        let mut terms = FxHashMap::default();
        terms.insert(mono, coeff);
        CoeffPoly { table, terms }
    }

    /// Assembles a polynomial from a table and raw terms. The terms must
    /// be indexed against `table` and free of zero coefficients.
    pub(crate) fn from_parts(
        table: Arc<SymbolTable>,
        terms: FxHashMap<Monomial, Rational>,
    ) -> CoeffPoly {
        debug_assert!(terms.values().all(|c| !c.is_zero()));
        CoeffPoly { table, terms }
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// When the polynomial is a constant, returns it.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::ZERO),
            1 => self
                .terms
                .get(&Monomial::ONE)
                .cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Terms in descending graded-lexicographic order; the canonical
    /// iteration for printing and digesting.
    pub fn sorted_terms(&self) -> Vec<(Monomial, Rational)> {
        let mut v: Vec<(Monomial, Rational)> = self
            .terms
            .iter()
            .map(|(m, c)| (*m, c.clone()))
            .collect();
        v.sort_unstable_by(|x, y| y.0.grlex(&x.0));
        v
    }

    /// Symbols that actually occur (with positive exponent somewhere).
    pub fn used_symbols(&self) -> Vec<SymbolId> {
        let mut used = [false; MAX_SYMS];
        for m in self.terms.keys() {
            for i in 0..self.table.len() {
                if m.0[i] != 0 {
                    used[i] = true;
                }
            }
        }
        self.table
            .symbols()
            .iter()
            .enumerate()
            .filter_map(|(i, s)| used[i].then_some(*s))
            .collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_of(&self, sym: &SymbolId) -> u32 {
        match self.table.index_of(sym) {
            None => 0,
            Some(idx) => self.terms.keys().map(|m| m.exp(idx)).max().unwrap_or(0),
        }
    }

    fn insert_term(terms: &mut FxHashMap<Monomial, Rational>, mono: Monomial, add: Rational) {
        if add.is_zero() {
            return;
        }
        match terms.entry(mono) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let v = &*e.get() + &add;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(add);
            }
        }
    }

    fn add_signed(&self, other: &CoeffPoly, negate: bool) -> CoeffPoly {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        let (table, ma, mb) = union_tables(&self.table, &other.table);
        let mut terms = FxHashMap::with_capacity_and_hasher(
            self.terms.len() + other.terms.len(),
            Default::default(),
        );
        for (m, c) in &self.terms {
            terms.insert(m.remap(&ma), c.clone());
        }
        for (m, c) in &other.terms {
            let c = if negate { -c } else { c.clone() };
            Self::insert_term(&mut terms, m.remap(&mb), c);
        }
        CoeffPoly { table, terms }
    }

    pub fn neg(&self) -> CoeffPoly {
        CoeffPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> CoeffPoly {
        if c.is_zero() {
            return CoeffPoly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        CoeffPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &CoeffPoly) -> CoeffPoly {
        if self.is_zero() || other.is_zero() {
            return CoeffPoly::zero();
        }
        // Constant shortcuts keep the common scalar case allocation-light.
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let (table, ma, mb) = union_tables(&self.table, &other.table);
        let a: Vec<(Monomial, &Rational)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.remap(&ma), c))
            .collect();
        let b: Vec<(Monomial, &Rational)> = other
            .terms
            .iter()
            .map(|(m, c)| (m.remap(&mb), c))
            .collect();
        let mut terms = FxHashMap::with_capacity_and_hasher(
            a.len().saturating_mul(b.len()).min(1 << 16),
            Default::default(),
        );
        for (ma, ca) in &a {
            for (mb, cb) in &b {
                let mono = ma
                    .checked_mul(mb)
                    .expect("monomial exponent overflow in product");
                Self::insert_term(&mut terms, mono, *ca * *cb);
            }
        }
        CoeffPoly { table, terms }
    }

    pub fn pow(&self, exp: u32) -> CoeffPoly {
        match exp {
            0 => CoeffPoly::one(),
            1 => self.clone(),
            _ => {
                let half = self.pow(exp / 2);
                let sq = half.mul(&half);
                if exp % 2 == 0 {
                    sq
                } else {
                    sq.mul(self)
                }
            }
        }
    }

    /// Applies a symbol substitution; symbols absent from the map stay
    /// themselves. Exact expansion (ring homomorphism).
    pub fn substitute(&self, map: &FxHashMap<SymbolId, CoeffPoly>) -> CoeffPoly {
        if self.is_zero() || map.is_empty() {
            return self.clone();
        }
        let touched: Vec<usize> = (0..self.table.len())
            .filter(|i| map.contains_key(&self.table.symbols()[*i]))
            .collect();
        if touched.is_empty() {
            return self.clone();
        }
        let mut pow_cache: FxHashMap<(usize, u32), CoeffPoly> = FxHashMap::default();
        let mut acc = CoeffPoly::zero();
        for (mono, coeff) in &self.terms {
            // Untouched part of the monomial stays on the own table.
            let mut kept = *mono;
            let mut factors: Vec<(usize, u32)> = Vec::new();
            for &i in &touched {
                if kept.0[i] != 0 {
                    factors.push((i, kept.0[i] as u32));
                    kept.0[i] = 0;
                }
            }
            let mut term = CoeffPoly {
                table: self.table.clone(),
                terms: [(kept, coeff.clone())].into_iter().collect(),
            };
            for (i, e) in factors {
                let image = pow_cache
                    .entry((i, e))
                    .or_insert_with(|| map[&self.table.symbols()[i]].pow(e))
                    .clone();
                term = term.mul(&image);
            }
            acc = acc.add_signed(&term, false);
        }
        acc
    }

    /// Renames symbols term by term (used for index permutations). The
    /// mapping must be injective on the used symbols.
    pub fn map_symbols(&self, f: impl Fn(SymbolId) -> SymbolId) -> CoeffPoly {
        let mut acc = CoeffPoly::zero();
        for (mono, coeff) in &self.terms {
            let factors: Vec<(SymbolId, u32)> = (0..self.table.len())
                .filter(|i| mono.0[*i] != 0)
                .map(|i| (f(self.table.symbols()[i]), mono.exp(i)))
                .collect();
            acc = acc.add_signed(&CoeffPoly::monomial(coeff.clone(), &factors), false);
        }
        acc
    }

    /// Rewrites powers of `sym` of exponent >= `order` in a single
    /// pass: `sym^e -> sym^(e mod order) * rep^(e div order)`. Callers
    /// iterate when `rep` itself mentions `sym`.
    pub fn reduce_symbol_power(&self, sym: &SymbolId, order: u32, rep: &CoeffPoly) -> CoeffPoly {
        let idx = match self.table.index_of(sym) {
            None => return self.clone(),
            Some(i) => i,
        };
        let mut rep_pows: FxHashMap<u32, CoeffPoly> = FxHashMap::default();
        let mut acc = CoeffPoly::zero();
        let mut untouched = FxHashMap::default();
        for (mono, coeff) in &self.terms {
            let e = mono.exp(idx);
            if e < order {
                untouched.insert(*mono, coeff.clone());
                continue;
            }
            let (q, r) = (e / order, e % order);
            let mut base = *mono;
            base.0[idx] = r as u8;
            let stub = CoeffPoly {
                table: self.table.clone(),
                terms: [(base, coeff.clone())].into_iter().collect(),
            };
            let image = rep_pows.entry(q).or_insert_with(|| rep.pow(q)).clone();
            acc = acc.add_signed(&stub.mul(&image), false);
        }
        let rest = CoeffPoly {
            table: self.table.clone(),
            terms: untouched,
        };
        acc.add_signed(&rest, false)
    }

    /// Exact evaluation at rational symbol values.
    pub fn eval_rational(
        &self,
        vals: &FxHashMap<SymbolId, Rational>,
    ) -> Result<Rational, PolyError> {
        let mut total = Rational::ZERO;
        for (mono, coeff) in &self.terms {
            let mut v = coeff.clone();
            for i in 0..self.table.len() {
                let e = mono.exp(i);
                if e == 0 {
                    continue;
                }
                let sym = &self.table.symbols()[i];
                let x = vals
                    .get(sym)
                    .ok_or_else(|| PolyError::MissingAssignment(sym.to_string()))?;
                v = &v * &x.pow(e);
            }
            total = &total + &v;
        }
        Ok(total)
    }

    /// Evaluates at complex symbol values. Returns the sum together
    /// with the scale: the maximum max-norm over the evaluated terms,
    /// the conditioning measure for relative residual tests.
    pub fn eval_complex(&self, v: &mut Valuation) -> Result<(BigComplex, BigFloat), PolyError> {
        let bits = v.bits;
        let mut sum = BigComplex::zero(bits);
        let mut scale = BigFloat::zero(bits);
        for (mono, coeff) in &self.terms {
            let mut term = BigComplex::from_real(BigFloat::from_rational(coeff, bits));
            for i in 0..self.table.len() {
                let e = mono.exp(i);
                if e == 0 {
                    continue;
                }
                let p = v.pow(&self.table.symbols()[i], e)?;
                term = &term * &p;
            }
            let mag = term.norm_inf();
            if mag > scale {
                scale = mag;
            }
            sum = &sum + &term;
        }
        Ok((sum, scale))
    }
}

impl PartialEq for CoeffPoly {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.table, &other.table) || self.table.syms == other.table.syms {
            return self.terms == other.terms;
        }
        self.add_signed(other, true).is_zero()
    }
}

impl Eq for CoeffPoly {}

impl std::ops::Add<&CoeffPoly> for &CoeffPoly {
    type Output = CoeffPoly;
    fn add(self, rhs: &CoeffPoly) -> CoeffPoly {
        self.add_signed(rhs, false)
    }
}

impl std::ops::Sub<&CoeffPoly> for &CoeffPoly {
    type Output = CoeffPoly;
    fn sub(self, rhs: &CoeffPoly) -> CoeffPoly {
        self.add_signed(rhs, true)
    }
}

impl std::ops::Mul<&CoeffPoly> for &CoeffPoly {
    type Output = CoeffPoly;
    fn mul(self, rhs: &CoeffPoly) -> CoeffPoly {
        CoeffPoly::mul(self, rhs)
    }
}

impl std::ops::Neg for &CoeffPoly {
    type Output = CoeffPoly;
    fn neg(self) -> CoeffPoly {
        CoeffPoly::neg(self)
    }
}

/// Complex symbol assignment with a per-symbol power cache, reused for
/// every coefficient evaluated at one sample point.
pub struct Valuation {
    bits: u32,
    vals: FxHashMap<SymbolId, BigComplex>,
    pows: FxHashMap<(SymbolId, u32), BigComplex>,
}

impl Valuation {
    pub fn new(bits: u32) -> Valuation {
        Valuation {
            bits,
            vals: FxHashMap::default(),
            pows: FxHashMap::default(),
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn set(&mut self, sym: SymbolId, z: BigComplex) {
        assert_eq!(z.bits(), self.bits, "valuation precision mismatch");
        self.vals.insert(sym, z);
    }

    pub fn get(&self, sym: &SymbolId) -> Option<&BigComplex> {
        self.vals.get(sym)
    }

    fn pow(&mut self, sym: &SymbolId, exp: u32) -> Result<BigComplex, PolyError> {
        if let Some(p) = self.pows.get(&(*sym, exp)) {
            return Ok(p.clone());
        }
        let base = self
            .vals
            .get(sym)
            .ok_or_else(|| PolyError::MissingAssignment(sym.to_string()))?
            .clone();
        let p = base.pow(exp);
        self.pows.insert((*sym, exp), p.clone());
        Ok(p)
    }
}

impl fmt::Display for CoeffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (mono, coeff)) in self.sorted_terms().into_iter().enumerate() {
            let neg = coeff.is_negative();
            let mag = coeff.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let factors: Vec<String> = (0..self.table.len())
                .filter(|k| mono.0[*k] != 0)
                .map(|k| {
                    let sym = self.table.symbols()[k];
                    match mono.exp(k) {
                        1 => sym.to_string(),
                        e => format!("{sym}^{e}"),
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Parses the canonical `Display` form. Accepts any ordering of terms
/// and repeated monomials (they accumulate), so parse(display(p)) == p.
pub fn parse_poly(s: &str) -> Result<CoeffPoly, PolyError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(PolyError::Parse("empty polynomial text".into()));
    }
    if s == "0" {
        return Ok(CoeffPoly::zero());
    }
    let mut acc = CoeffPoly::zero();
    // Split on top-level " + " / " - "; a leading "-" binds to the
    // first term.
    let mut rest = s;
    let mut sign = Rational::ONE;
    if let Some(r) = rest.strip_prefix('-') {
        sign = -&sign;
        rest = r.trim_start();
    }
    loop {
        let (term_text, next) = match (rest.find(" + "), rest.find(" - ")) {
            (Some(p), Some(m)) if p < m => (&rest[..p], Some((&rest[p + 3..], false))),
            (Some(_), Some(m)) => (&rest[..m], Some((&rest[m + 3..], true))),
            (Some(p), None) => (&rest[..p], Some((&rest[p + 3..], false))),
            (None, Some(m)) => (&rest[..m], Some((&rest[m + 3..], true))),
            (None, None) => (rest, None),
        };
        acc = &acc + &parse_term(term_text.trim(), &sign)?;
        match next {
            None => break,
            Some((r, neg)) => {
                rest = r;
                sign = if neg { Rational::new(-1, 1) } else { Rational::ONE };
            }
        }
    }
    Ok(acc)
}

fn parse_term(t: &str, sign: &Rational) -> Result<CoeffPoly, PolyError> {
    let mut coeff = sign.clone();
    let mut factors: Vec<(SymbolId, u32)> = Vec::new();
    for piece in t.split('*') {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(PolyError::Parse(format!("empty factor in {t:?}")));
        }
        let leading = piece.chars().next().unwrap();
        if leading.is_ascii_digit() || leading == '-' {
            let c: Rational = piece
                .parse()
                .map_err(|e| PolyError::Parse(format!("bad coefficient {piece:?}: {e}")))?;
            coeff = &coeff * &c;
            continue;
        }
        let (name, exp) = match piece.rsplit_once('^') {
            // '^' cannot occur inside a symbol name (argument brackets
            // hold only integers and commas).
            Some((n, e)) => {
                let exp: u32 = e
                    .parse()
                    .map_err(|_| PolyError::Parse(format!("bad exponent in {piece:?}")))?;
                (n, exp)
            }
            None => (piece, 1),
        };
        let sym = SymbolId::parse(name)
            .map_err(|e| PolyError::Parse(format!("bad symbol {name:?}: {e}")))?;
        factors.push((sym, exp));
    }
    Ok(CoeffPoly::monomial(coeff, &factors))
}
