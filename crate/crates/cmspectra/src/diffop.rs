//! Linear partial differential operators with coefficients in the
//! elliptic ring.
//!
//! A [`DiffOp`] is a finite sum `sum_alpha c_alpha(x) d^alpha` stored as
//! a map from derivative multi-indices to coefficient polynomials.
//! Composition is the exact Leibniz expansion
//!
//! `(c d^a) o (d d^b) = sum_{g <= a} binom(a, g) * c * (d^g d) * d^(a+b-g)`
//!
//! with coefficient derivatives supplied by [`crate::elliptic`] and
//! Q-canonicalization applied to every product, so composed operators
//! stay in canonical form.
//!
//! [`op_of_poly`] turns a spectral polynomial into an operator by the
//! canonical rule: each monomial `c * v1^e1 * ... * vk^ek` (placeholders
//! listed in ascending symbol order) maps to `c * V1^e1 o ... o Vk^ek`.
//! The implementation factors the polynomial by its highest placeholder
//! (Horner form), which reproduces the same operator — composition is
//! bilinear and associative, so `sum_k op(Q_k) o V^k` regrouped as
//! `(((op(Q_d) o V) + op(Q_{d-1})) o V + ...)` is unchanged — while
//! keeping every composition in the cheap big-times-small shape. A naive
//! per-monomial builder is kept as a test reference.

use std::fmt::Write as _;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::elliptic::{differentiate_coeff, rewrite_wp_prime_square, wp, wp_prime};
use crate::error::DiffOpError;
use crate::poly::{CoeffPoly, Monomial};
use crate::rational::Rational;
use crate::symbol::{SymbolId, MAX_VARS};

/// Multi-index of derivative orders, one entry per position variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct MultiIndex(pub [u8; MAX_VARS]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0; MAX_VARS]);

    pub fn unit(var: usize) -> MultiIndex {
        let mut m = [0u8; MAX_VARS];
        m[var] = 1;
        MultiIndex(m)
    }

    pub fn order(&self) -> u32 {
        self.0.iter().map(|e| *e as u32).sum()
    }

    pub fn exp(&self, var: usize) -> u32 {
        self.0[var] as u32
    }

    /// Componentwise maximum.
    fn join(&self, other: &MultiIndex) -> MultiIndex {
        let mut out = [0u8; MAX_VARS];
        for i in 0..MAX_VARS {
            out[i] = self.0[i].max(other.0[i]);
        }
        MultiIndex(out)
    }

    fn checked_add(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = [0u8; MAX_VARS];
        for i in 0..MAX_VARS {
            out[i] = self.0[i].checked_add(other.0[i])?;
        }
        Some(MultiIndex(out))
    }

    /// `self - other`; caller guarantees `other <= self` componentwise.
    fn sub(&self, other: &MultiIndex) -> MultiIndex {
        let mut out = [0u8; MAX_VARS];
        for i in 0..MAX_VARS {
            out[i] = self.0[i] - other.0[i];
        }
        MultiIndex(out)
    }

    pub fn render(&self, nvars: usize) -> String {
        let entries: Vec<String> = (0..nvars).map(|i| self.0[i].to_string()).collect();
        format!("[{}]", entries.join(","))
    }
}

/// Enumerates all `g <= bound` (componentwise) over the first `nvars`
/// entries, in ascending total-order-then-lex order.
fn sub_indices(bound: &MultiIndex, nvars: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = MultiIndex::ZERO;
    loop {
        out.push(cur);
        // Odometer increment with per-digit limits.
        let mut i = 0;
        loop {
            if i == nvars {
                out.sort_unstable_by_key(|m| (m.order(), m.0));
                return out;
            }
            if cur.0[i] < bound.0[i] {
                cur.0[i] += 1;
                break;
            }
            cur.0[i] = 0;
            i += 1;
        }
    }
}

fn binom(n: u32, k: u32) -> i64 {
    let k = k.min(n - k.min(n));
    let mut acc: i64 = 1;
    for j in 0..k {
        acc = acc
            .checked_mul((n - j) as i64)
            .expect("binomial overflow: derivative order out of the supported range");
        acc /= (j + 1) as i64;
    }
    acc
}

/// `prod_i binom(alpha_i, gamma_i)` — the Leibniz multiplicity.
fn binom_product(alpha: &MultiIndex, gamma: &MultiIndex) -> Rational {
    let mut acc: i64 = 1;
    for i in 0..MAX_VARS {
        if gamma.0[i] != 0 {
            acc = acc
                .checked_mul(binom(alpha.exp(i), gamma.exp(i)))
                .expect("binomial overflow: derivative order out of the supported range");
        }
    }
    Rational::from_int(acc)
}

/// A differential operator in `nvars` position variables.
#[derive(Clone, Debug)]
pub struct DiffOp {
    nvars: usize,
    terms: FxHashMap<MultiIndex, CoeffPoly>,
}

impl DiffOp {
    pub fn zero(nvars: usize) -> DiffOp {
        assert!(nvars >= 1 && nvars <= MAX_VARS);
        DiffOp {
            nvars,
            terms: FxHashMap::default(),
        }
    }

    pub fn identity(nvars: usize) -> DiffOp {
        DiffOp::from_term(nvars, MultiIndex::ZERO, CoeffPoly::one())
    }

    /// The multiplication operator `f -> coeff * f`.
    pub fn mult(nvars: usize, coeff: CoeffPoly) -> DiffOp {
        DiffOp::from_term(nvars, MultiIndex::ZERO, coeff)
    }

    /// The partial derivative in variable `var` (0-based).
    pub fn partial(nvars: usize, var: usize) -> DiffOp {
        assert!(var < nvars);
        DiffOp::from_term(nvars, MultiIndex::unit(var), CoeffPoly::one())
    }

    pub fn from_term(nvars: usize, alpha: MultiIndex, coeff: CoeffPoly) -> DiffOp {
        let mut op = DiffOp::zero(nvars);
        op.add_term(alpha, coeff);
        op
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &CoeffPoly)> {
        self.terms.iter()
    }

    /// Terms sorted ascending by (total order, index vector): the
    /// canonical iteration for dumps and reports.
    pub fn sorted_terms(&self) -> Vec<(MultiIndex, &CoeffPoly)> {
        let mut v: Vec<(MultiIndex, &CoeffPoly)> =
            self.terms.iter().map(|(a, c)| (*a, c)).collect();
        v.sort_unstable_by_key(|(a, _)| (a.order(), a.0));
        v
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Option<&CoeffPoly> {
        self.terms.get(alpha)
    }

    /// Highest total derivative order with a surviving coefficient.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|a| a.order()).max().unwrap_or(0)
    }

    fn add_term(&mut self, alpha: MultiIndex, coeff: CoeffPoly) {
        if coeff.is_zero() {
            return;
        }
        debug_assert!((self.nvars..MAX_VARS).all(|i| alpha.0[i] == 0));
        match self.terms.entry(alpha) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        assert_eq!(self.nvars, other.nvars, "operator variable counts differ");
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(*a, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffOp {
        DiffOp {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, c)| (*a, c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> DiffOp {
        if c.is_zero() {
            return DiffOp::zero(self.nvars);
        }
        DiffOp {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, p)| (*a, p.scale(c))).collect(),
        }
    }

    /// Operator composition `self o other` by the Leibniz rule.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        assert_eq!(self.nvars, other.nvars, "operator variable counts differ");
        if self.is_zero() || other.is_zero() {
            return DiffOp::zero(self.nvars);
        }
        let mut alpha_max = MultiIndex::ZERO;
        for a in self.terms.keys() {
            alpha_max = alpha_max.join(a);
        }
        let mut out = DiffOp::zero(self.nvars);
        for (beta, d) in &other.terms {
            let derivs = derivative_table(d, &alpha_max, self.nvars);
            for (alpha, c) in &self.terms {
                for gamma in sub_indices(alpha, self.nvars) {
                    let Some(dg) = derivs.get(&gamma) else {
                        continue;
                    };
                    let target = alpha
                        .sub(&gamma)
                        .checked_add(beta)
                        .expect("derivative order overflow in composition");
                    let poly =
                        rewrite_wp_prime_square(&c.mul(dg).scale(&binom_product(alpha, &gamma)));
                    out.add_term(target, poly);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        self.compose(other).sub(&other.compose(self))
    }

    /// Applies the operator to a coefficient-ring element, computed
    /// directly from the definition (no use of `compose`): the oracle
    /// the composition tests check against.
    pub fn apply(&self, f: &CoeffPoly) -> CoeffPoly {
        let mut acc = CoeffPoly::zero();
        for (alpha, c) in &self.terms {
            let mut df = f.clone();
            for var in 0..self.nvars {
                for _ in 0..alpha.exp(var) {
                    df = differentiate_coeff(&df, var);
                }
                if df.is_zero() {
                    break;
                }
            }
            acc = &acc + &rewrite_wp_prime_square(&c.mul(&df));
        }
        rewrite_wp_prime_square(&acc)
    }

    /// The full symbol at derivative order `k`: the polynomial
    /// `sum_{|alpha| = k} c_alpha * xi^alpha`, which may mix elliptic
    /// symbols into the coefficients.
    pub fn symbol_at_order(&self, k: u32) -> CoeffPoly {
        let mut acc = CoeffPoly::zero();
        for (alpha, c) in &self.terms {
            if alpha.order() != k {
                continue;
            }
            let factors: Vec<(SymbolId, u32)> = (0..self.nvars)
                .filter(|i| alpha.0[*i] != 0)
                .map(|i| (SymbolId::Xi(i as u8), alpha.exp(i)))
                .collect();
            acc = &acc + &c.mul(&CoeffPoly::monomial(Rational::ONE, &factors));
        }
        acc
    }

    pub fn principal_symbol(&self) -> CoeffPoly {
        self.symbol_at_order(self.order())
    }

    /// Relabels position variables: `x_i -> x_{perm[i]}`. Derivatives
    /// and argument forms move together, so this is a ring isomorphism
    /// commuting with composition.
    pub fn permute_vars(&self, perm: &[usize]) -> DiffOp {
        assert_eq!(perm.len(), self.nvars);
        let mut seen = vec![false; self.nvars];
        for &p in perm {
            assert!(p < self.nvars && !seen[p], "not a permutation");
            seen[p] = true;
        }
        let mut out = DiffOp::zero(self.nvars);
        for (alpha, c) in &self.terms {
            let mut new_alpha = MultiIndex::ZERO;
            for i in 0..self.nvars {
                new_alpha.0[perm[i]] = alpha.0[i];
            }
            out.add_term(new_alpha, permute_coeff(c, perm));
        }
        out
    }

    /// Canonical text form: a `#`-prefixed header, then one line per
    /// term `"[alpha] : <polynomial>"` in ascending multi-index order.
    pub fn dump(&self, system: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# system: {system}");
        let _ = writeln!(s, "# nvars: {}", self.nvars);
        let _ = writeln!(s, "# order: {}", self.order());
        for (alpha, coeff) in self.sorted_terms() {
            let _ = writeln!(s, "{} : {coeff}", alpha.render(self.nvars));
        }
        s
    }

    /// Parses the `dump` format; returns the system name and operator.
    pub fn parse_dump(text: &str) -> Result<(String, DiffOp), DiffOpError> {
        let bad = |msg: String| DiffOpError::Parse(msg);
        let mut system = None;
        let mut nvars = None;
        let mut op = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("system:") {
                    system = Some(v.trim().to_string());
                } else if let Some(v) = rest.strip_prefix("nvars:") {
                    let n: usize = v
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("bad nvars line {line:?}")))?;
                    if n == 0 || n > MAX_VARS {
                        return Err(bad(format!("nvars {n} out of range")));
                    }
                    nvars = Some(n);
                    op = Some(DiffOp::zero(n));
                }
                continue;
            }
            let (idx_text, poly_text) = line
                .split_once(" : ")
                .ok_or_else(|| bad(format!("missing ' : ' separator in {line:?}")))?;
            let nvars = nvars.ok_or_else(|| bad("term line before nvars header".into()))?;
            let inner = idx_text
                .trim()
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| bad(format!("bad multi-index {idx_text:?}")))?;
            let entries: Vec<u8> = inner
                .split(',')
                .map(|t| t.trim().parse::<u8>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad(format!("bad multi-index {idx_text:?}")))?;
            if entries.len() != nvars {
                return Err(bad(format!(
                    "multi-index {idx_text:?} has {} entries, expected {nvars}",
                    entries.len()
                )));
            }
            let mut alpha = MultiIndex::ZERO;
            alpha.0[..nvars].copy_from_slice(&entries);
            let coeff = crate::poly::parse_poly(poly_text)
                .map_err(|e| bad(format!("bad coefficient in {line:?}: {e}")))?;
            op.as_mut().unwrap().add_term(alpha, coeff);
        }
        let system = system.ok_or_else(|| bad("missing system header".into()))?;
        let op = op.ok_or_else(|| bad("missing nvars header".into()))?;
        Ok((system, op))
    }
}

impl PartialEq for DiffOp {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.terms == other.terms
    }
}

impl Eq for DiffOp {}

/// All partial derivatives `d^gamma d` for `gamma <= alpha_max`; entries
/// that vanish are omitted. Coefficients without elliptic symbols
/// produce the single `gamma = 0` entry.
fn derivative_table(
    d: &CoeffPoly,
    alpha_max: &MultiIndex,
    nvars: usize,
) -> FxHashMap<MultiIndex, CoeffPoly> {
    let mut table = FxHashMap::default();
    table.insert(MultiIndex::ZERO, d.clone());
    if !d.used_symbols().iter().any(|s| s.is_elliptic()) {
        return table;
    }
    for gamma in sub_indices(alpha_max, nvars) {
        if gamma == MultiIndex::ZERO {
            continue;
        }
        let var = (0..nvars).find(|i| gamma.0[*i] != 0).unwrap();
        let mut prev = gamma;
        prev.0[var] -= 1;
        let Some(src) = table.get(&prev) else {
            continue;
        };
        let der = differentiate_coeff(src, var);
        if !der.is_zero() {
            table.insert(gamma, der);
        }
    }
    table
}

/// Applies the position relabeling `x_i -> x_{perm[i]}` to a coefficient
/// polynomial by moving every argument form along.
fn permute_coeff(p: &CoeffPoly, perm: &[usize]) -> CoeffPoly {
    type FormCtor = fn(&[i64]) -> Result<CoeffPoly, crate::error::SymbolError>;
    let mut map: FxHashMap<SymbolId, CoeffPoly> = FxHashMap::default();
    for sym in p.used_symbols() {
        let (form, make): (_, FormCtor) = match sym {
            SymbolId::Wp(a) => (a, wp),
            SymbolId::WpPrime(a) => (a, wp_prime),
            _ => continue,
        };
        let mut raw = vec![0i64; perm.len()];
        for i in 0..perm.len() {
            raw[perm[i]] = form.coeff(i);
        }
        map.insert(sym, make(&raw).expect("permuted form stays valid"));
    }
    p.substitute(&map)
}

/// Builds the operator of a spectral polynomial under the canonical
/// monomial rule, factoring by the highest bound placeholder (see the
/// module docs for why this equals the per-monomial definition).
/// Symbols not bound in `gens` stay as scalar coefficients, except that
/// an unbound spectral placeholder is an error.
pub fn op_of_poly(
    p: &CoeffPoly,
    gens: &FxHashMap<SymbolId, DiffOp>,
    nvars: usize,
) -> Result<DiffOp, DiffOpError> {
    let top = p
        .used_symbols()
        .into_iter()
        .filter(|s| gens.contains_key(s))
        .max();
    let Some(v) = top else {
        check_no_unbound(p, gens)?;
        return Ok(DiffOp::mult(nvars, p.clone()));
    };
    let vop = &gens[&v];
    assert_eq!(vop.nvars(), nvars, "generator variable count mismatch");
    let layers = coeff_layers(p, &v);
    let d = layers.len() - 1;
    let mut acc = op_of_poly(&layers[d], gens, nvars)?;
    for k in (0..d).rev() {
        acc = acc.compose(vop);
        if !layers[k].is_zero() {
            acc = acc.add(&op_of_poly(&layers[k], gens, nvars)?);
        }
    }
    Ok(acc)
}

fn check_no_unbound(p: &CoeffPoly, gens: &FxHashMap<SymbolId, DiffOp>) -> Result<(), DiffOpError> {
    for s in p.used_symbols() {
        if matches!(s, SymbolId::Spectral(_)) && !gens.contains_key(&s) {
            return Err(DiffOpError::UnboundPlaceholder(s.to_string()));
        }
    }
    Ok(())
}

/// Splits `p = sum_k layers[k] * sym^k` with `sym` removed from each
/// layer.
fn coeff_layers(p: &CoeffPoly, sym: &SymbolId) -> Vec<CoeffPoly> {
    let idx = p
        .table()
        .index_of(sym)
        .expect("layer symbol must occur in the polynomial");
    let d = p.degree_of(sym) as usize;
    let mut layers: Vec<FxHashMap<Monomial, Rational>> = vec![FxHashMap::default(); d + 1];
    for (mono, coeff) in p.terms() {
        let e = mono.exp(idx) as usize;
        let mut stripped = *mono;
        stripped.0[idx] = 0;
        layers[e].insert(stripped, coeff.clone());
    }
    layers
        .into_iter()
        .map(|t| CoeffPoly::from_parts(p.table().clone(), t))
        .collect()
}

/// Reference builder: composes each monomial's factors one power at a
/// time in ascending symbol order and sums. Exponentially many
/// compositions are repeated across monomials, so this is for tests and
/// small inputs only.
pub fn op_of_poly_naive(
    p: &CoeffPoly,
    gens: &FxHashMap<SymbolId, DiffOp>,
    nvars: usize,
) -> Result<DiffOp, DiffOpError> {
    let mut acc = DiffOp::zero(nvars);
    for (mono, coeff) in p.sorted_terms() {
        let table = p.table();
        let mut scalar: Vec<(SymbolId, u32)> = Vec::new();
        let mut factors: Vec<(SymbolId, u32)> = Vec::new();
        for i in 0..table.len() {
            if mono.exp(i) == 0 {
                continue;
            }
            let sym = table.symbols()[i];
            if gens.contains_key(&sym) {
                factors.push((sym, mono.exp(i)));
            } else if matches!(sym, SymbolId::Spectral(_)) {
                return Err(DiffOpError::UnboundPlaceholder(sym.to_string()));
            } else {
                scalar.push((sym, mono.exp(i)));
            }
        }
        let mut term_op = DiffOp::mult(nvars, CoeffPoly::monomial(coeff, &scalar));
        for (sym, e) in factors {
            for _ in 0..e {
                term_op = term_op.compose(&gens[&sym]);
            }
        }
        acc = acc.add(&term_op);
    }
    Ok(acc)
}

/// Shared cache of composed generator products, for building many
/// small single-monomial operators (coefficient perturbations)
/// cheaply.  Products are assembled one generator at a time, largest
/// partial product on the left: composition pushes derivatives
/// through the right operand's coefficients, so keeping the right
/// operand a single generator is far cheaper than composing with a
/// full power, while associativity makes the results identical.
pub struct OpPowerCache<'g> {
    gens: &'g FxHashMap<SymbolId, DiffOp>,
    nvars: usize,
    chains: FxHashMap<Vec<(SymbolId, u32)>, Arc<DiffOp>>,
}

impl<'g> OpPowerCache<'g> {
    pub fn new(gens: &'g FxHashMap<SymbolId, DiffOp>, nvars: usize) -> OpPowerCache<'g> {
        OpPowerCache {
            gens,
            nvars,
            chains: FxHashMap::default(),
        }
    }

    /// Composed product of the bound factors (sorted, exponents >= 1),
    /// cached by prefix: a cache miss costs one composition with a
    /// single generator.
    fn product(&mut self, bound: &[(SymbolId, u32)]) -> Result<Arc<DiffOp>, DiffOpError> {
        if let Some(op) = self.chains.get(bound) {
            return Ok(op.clone());
        }
        let (sym, e) = *bound.last().expect("product of at least one factor");
        let gen = self
            .gens
            .get(&sym)
            .ok_or_else(|| DiffOpError::UnboundPlaceholder(sym.to_string()))?;
        let mut prefix = bound.to_vec();
        if e > 1 {
            prefix.last_mut().expect("nonempty").1 = e - 1;
        } else {
            prefix.pop();
        }
        let op = if prefix.is_empty() {
            gen.clone()
        } else {
            self.product(&prefix)?.compose(gen)
        };
        let op = Arc::new(op);
        self.chains.insert(bound.to_vec(), op.clone());
        Ok(op)
    }

    /// Operator of a single monomial `coeff * prod sym^e` under the
    /// canonical rule, reusing cached partial products.
    pub fn monomial_op(
        &mut self,
        coeff: &Rational,
        factors: &[(SymbolId, u32)],
    ) -> Result<DiffOp, DiffOpError> {
        let mut scalar: Vec<(SymbolId, u32)> = Vec::new();
        let mut bound: Vec<(SymbolId, u32)> = Vec::new();
        for (sym, e) in factors {
            if *e == 0 {
                continue;
            }
            if self.gens.contains_key(sym) {
                bound.push((*sym, *e));
            } else if matches!(sym, SymbolId::Spectral(_)) {
                return Err(DiffOpError::UnboundPlaceholder(sym.to_string()));
            } else {
                scalar.push((*sym, *e));
            }
        }
        bound.sort_unstable();
        let acc = DiffOp::mult(self.nvars, CoeffPoly::monomial(coeff.clone(), &scalar));
        if bound.is_empty() {
            return Ok(acc);
        }
        let prod = self.product(&bound)?;
        Ok(acc.compose(&prod))
    }
}
