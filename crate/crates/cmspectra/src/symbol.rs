//! Symbol identities for the coefficient and spectral rings.
//!
//! A [`SymbolId`] names one generator of a polynomial ring: the
//! Weierstrass invariants `g2`, `g3`, an elliptic value `P[a]` = wp(a.x)
//! or `Q[a]` = wp'(a.x) at an integer linear form `a` of the positions,
//! a half-period root `e1..e3`, a spectral placeholder (`l1`, `L`, `I`,
//! `lam`, ...), or a principal-symbol variable `xi1..`.
//!
//! The derived ordering on `SymbolId` is the canonical symbol order used
//! for printing and for the graded-lexicographic monomial order:
//! `g2 < g3 < P[..] < Q[..] < e.. < spectral < xi..`.

use std::fmt;

use crate::error::SymbolError;

pub const MAX_VARS: usize = 3;

/// Sign-normalized integer linear form in the position variables, e.g.
/// `x1 - x2` as `[1, -1, 0]`. wp is even and wp' is odd, so `a` and
/// `-a` name the same P-symbol and opposite Q-symbols; only the
/// normalized representative (first nonzero entry positive) is stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArgForm {
    nvars: u8,
    coeffs: [i8; MAX_VARS],
}

impl ArgForm {
    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn coeffs(&self) -> &[i8] {
        &self.coeffs[..self.nvars as usize]
    }

    pub fn coeff(&self, var: usize) -> i64 {
        self.coeffs[var] as i64
    }
}

/// Canonicalizes a raw linear form: returns the sign-normalized
/// [`ArgForm`] together with `-1` when the input was negated (the parity
/// sign picked up by odd symbols).
pub fn normalize_argform(raw: &[i64]) -> Result<(ArgForm, i64), SymbolError> {
    if raw.len() > MAX_VARS {
        return Err(SymbolError::TooManyVariables(raw.len()));
    }
    let first_nonzero = raw.iter().find(|c| **c != 0);
    let sign = match first_nonzero {
        None => return Err(SymbolError::ZeroArgForm),
        Some(c) if *c > 0 => 1,
        Some(_) => -1,
    };
    let mut coeffs = [0i8; MAX_VARS];
    for (i, c) in raw.iter().enumerate() {
        let v = c * sign;
        coeffs[i] = i8::try_from(v).map_err(|_| SymbolError::ArgFormCoefficient(v))?;
    }
    Ok((
        ArgForm {
            nvars: raw.len() as u8,
            coeffs,
        },
        sign,
    ))
}

impl fmt::Display for ArgForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Spectral placeholders in canonical composition order: the symmetric
/// generators (`l1 < l2 < l3` for the three-particle system, `L < M`
/// for B2) precede the additional integrals `I`, `J`; the reduced-curve
/// variables come last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpectralVar {
    L1,
    L2,
    L3,
    BigL,
    BigM,
    I,
    J,
    Lambda,
    Mu,
    Nu,
}

impl SpectralVar {
    pub fn name(&self) -> &'static str {
        match self {
            SpectralVar::L1 => "l1",
            SpectralVar::L2 => "l2",
            SpectralVar::L3 => "l3",
            SpectralVar::BigL => "L",
            SpectralVar::BigM => "M",
            SpectralVar::I => "I",
            SpectralVar::J => "J",
            SpectralVar::Lambda => "lam",
            SpectralVar::Mu => "mu",
            SpectralVar::Nu => "nu",
        }
    }

    pub fn parse(s: &str) -> Option<SpectralVar> {
        Some(match s {
            "l1" => SpectralVar::L1,
            "l2" => SpectralVar::L2,
            "l3" => SpectralVar::L3,
            "L" => SpectralVar::BigL,
            "M" => SpectralVar::BigM,
            "I" => SpectralVar::I,
            "J" => SpectralVar::J,
            "lam" => SpectralVar::Lambda,
            "mu" => SpectralVar::Mu,
            "nu" => SpectralVar::Nu,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolId {
    G2,
    G3,
    /// wp at the given argument form.
    Wp(ArgForm),
    /// wp' at the given argument form (always the +a representative; the
    /// parity sign lives in the coefficient).
    WpPrime(ArgForm),
    /// Half-period value e1, e2, e3 (stored 0-based).
    Root(u8),
    Spectral(SpectralVar),
    /// Principal-symbol variable xi1, xi2, ... (stored 0-based).
    Xi(u8),
}

impl SymbolId {
    pub fn is_elliptic(&self) -> bool {
        matches!(self, SymbolId::Wp(_) | SymbolId::WpPrime(_))
    }

    pub fn spectral(v: SpectralVar) -> SymbolId {
        SymbolId::Spectral(v)
    }

    /// Parses the canonical display form produced by `Display`.
    pub fn parse(s: &str) -> Result<SymbolId, SymbolError> {
        let bad = || SymbolError::UnknownSymbol(s.to_string());
        if s == "g2" {
            return Ok(SymbolId::G2);
        }
        if s == "g3" {
            return Ok(SymbolId::G3);
        }
        if let Some(rest) = s.strip_prefix("P[").or_else(|| s.strip_prefix("Q[")) {
            let inner = rest.strip_suffix(']').ok_or_else(bad)?;
            let coeffs: Vec<i64> = inner
                .split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            let (form, sign) = normalize_argform(&coeffs)?;
            if sign != 1 {
                return Err(bad());
            }
            return Ok(if s.starts_with('P') {
                SymbolId::Wp(form)
            } else {
                SymbolId::WpPrime(form)
            });
        }
        if let Some(rest) = s.strip_prefix("xi") {
            let k: u8 = rest.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            return Ok(SymbolId::Xi(k - 1));
        }
        if let Some(rest) = s.strip_prefix('e') {
            if let Ok(k) = rest.parse::<u8>() {
                if (1..=3).contains(&k) {
                    return Ok(SymbolId::Root(k - 1));
                }
            }
        }
        SpectralVar::parse(s).map(SymbolId::Spectral).ok_or_else(bad)
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolId::G2 => write!(f, "g2"),
            SymbolId::G3 => write!(f, "g3"),
            SymbolId::Wp(a) => write!(f, "P{a}"),
            SymbolId::WpPrime(a) => write!(f, "Q{a}"),
            SymbolId::Root(k) => write!(f, "e{}", k + 1),
            SymbolId::Spectral(v) => write!(f, "{}", v.name()),
            SymbolId::Xi(k) => write!(f, "xi{}", k + 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_flips_sign_of_negated_forms() {
        let (a, s) = normalize_argform(&[-1, 1, 0]).unwrap();
        assert_eq!(a.coeffs(), &[1, -1, 0]);
        assert_eq!(s, -1);

        let (a, s) = normalize_argform(&[1, -1, 0]).unwrap();
        assert_eq!(a.coeffs(), &[1, -1, 0]);
        assert_eq!(s, 1);

        let (a, s) = normalize_argform(&[0, -2, 2]).unwrap();
        assert_eq!(a.coeffs(), &[0, 2, -2]);
        assert_eq!(s, -1);
    }

    #[test]
    fn zero_form_is_rejected() {
        assert!(matches!(
            normalize_argform(&[0, 0, 0]),
            Err(SymbolError::ZeroArgForm)
        ));
    }

    #[test]
    fn symbol_order_is_the_print_order() {
        let (a12, _) = normalize_argform(&[1, -1, 0]).unwrap();
        let ordered = [
            SymbolId::G2,
            SymbolId::G3,
            SymbolId::Wp(a12),
            SymbolId::WpPrime(a12),
            SymbolId::Root(0),
            SymbolId::Spectral(SpectralVar::L1),
            SymbolId::Xi(0),
        ];
        for w in ordered.windows(2) {
            assert!(w[0] < w[1], "{} should precede {}", w[0], w[1]);
        }
    }

    #[test]
    fn spectral_order_places_generators_before_extras() {
        assert!(SpectralVar::L1 < SpectralVar::L2);
        assert!(SpectralVar::L3 < SpectralVar::I);
        assert!(SpectralVar::BigL < SpectralVar::BigM);
        assert!(SpectralVar::BigM < SpectralVar::I);
        assert!(SpectralVar::I < SpectralVar::J);
    }

    #[test]
    fn display_parse_round_trip() {
        let (axy, _) = normalize_argform(&[1, 1]).unwrap();
        let (a13, _) = normalize_argform(&[1, 0, -1]).unwrap();
        for sym in [
            SymbolId::G2,
            SymbolId::G3,
            SymbolId::Wp(axy),
            SymbolId::WpPrime(a13),
            SymbolId::Root(2),
            SymbolId::Spectral(SpectralVar::BigM),
            SymbolId::Spectral(SpectralVar::Lambda),
            SymbolId::Xi(1),
        ] {
            let s = sym.to_string();
            assert_eq!(SymbolId::parse(&s).unwrap(), sym, "through {s:?}");
        }
    }
}
