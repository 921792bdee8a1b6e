//! Finite Abelian groups `G = Z_{D_1} x ... x Z_{D_m}`, their Pontryagin duals and
//! the exact character pairing.
//!
//! Group elements and characters share the same residue representation: a
//! character `chi` with exponents `r_i` evaluates on `g` with residues `e_i` to
//! `exp(2 pi i sum_i r_i e_i / D_i)`. Phases are kept as reduced fractions of a
//! full turn ([`RationalPhase`]) so every symbolic check stays exact.

use std::fmt;
use std::ops::{Add, Neg};
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by group arithmetic and group literal parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    /// Two operands belong to different groups.
    #[error("group mismatch: {0:?} vs {1:?}")]
    SpecMismatch(Vec<u64>, Vec<u64>),
    /// A cyclic factor of order below 2 or an empty factor list.
    #[error("invalid group: {0}")]
    Invalid(String),
    /// The group literal could not be parsed.
    #[error("cannot parse group literal `{0}`")]
    Parse(String),
}

/// A finite Abelian group given by its ordered list of cyclic orders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<u64>,
}

impl GroupSpec {
    /// Builds `Z_{D_1} x ... x Z_{D_m}`. Every order must be at least 2 and the
    /// group order must fit in 64 bits.
    pub fn new(factors: Vec<u64>) -> Result<Self, GroupError> {
        if factors.is_empty() {
            return Err(GroupError::Invalid("no cyclic factors".into()));
        }
        if let Some(d) = factors.iter().find(|&&d| d < 2) {
            return Err(GroupError::Invalid(format!("cyclic order {d} is below 2")));
        }
        let mut order: u64 = 1;
        for &d in &factors {
            order = order
                .checked_mul(d)
                .ok_or_else(|| GroupError::Invalid("group order overflows 64 bits".into()))?;
        }
        Ok(GroupSpec { factors })
    }

    /// The cyclic group `Z_D`.
    pub fn cyclic(d: u64) -> Result<Self, GroupError> {
        GroupSpec::new(vec![d])
    }

    /// The cyclic orders `D_i`.
    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// The group order `|G|`.
    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    /// The identity element.
    pub fn identity(&self) -> GroupElement {
        GroupElement { residues: vec![0; self.rank()] }
    }

    /// The trivial character.
    pub fn trivial_character(&self) -> Character {
        Character { exponents: vec![0; self.rank()] }
    }

    /// Builds an element, reducing each residue modulo its factor.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement, GroupError> {
        Ok(GroupElement { residues: self.reduce(residues)? })
    }

    /// Builds a character, reducing each exponent modulo its factor.
    pub fn character(&self, exponents: &[i64]) -> Result<Character, GroupError> {
        Ok(Character { exponents: self.reduce(exponents)? })
    }

    fn reduce(&self, values: &[i64]) -> Result<Vec<u64>, GroupError> {
        if values.len() != self.rank() {
            return Err(GroupError::Invalid(format!(
                "expected {} components, got {}",
                self.rank(),
                values.len()
            )));
        }
        Ok(values
            .iter()
            .zip(&self.factors)
            .map(|(&v, &d)| v.rem_euclid(d as i64) as u64)
            .collect())
    }

    /// Mixed-radix index of a residue vector (first factor least significant).
    pub fn index_of(&self, residues: &[u64]) -> usize {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for (r, d) in residues.iter().zip(&self.factors) {
            idx += *r as usize * stride;
            stride *= *d as usize;
        }
        idx
    }

    fn residues_of(&self, mut idx: usize) -> Vec<u64> {
        self.factors
            .iter()
            .map(|&d| {
                let r = (idx % d as usize) as u64;
                idx /= d as usize;
                r
            })
            .collect()
    }

    /// The element with the given mixed-radix index.
    pub fn element_at(&self, idx: usize) -> GroupElement {
        GroupElement { residues: self.residues_of(idx) }
    }

    /// The character with the given mixed-radix index.
    pub fn character_at(&self, idx: usize) -> Character {
        Character { exponents: self.residues_of(idx) }
    }

    /// Every group element in index order.
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order() as usize).map(|i| self.element_at(i)).collect()
    }

    /// Every character in index order.
    pub fn characters(&self) -> Vec<Character> {
        (0..self.order() as usize).map(|i| self.character_at(i)).collect()
    }

    /// One generator per cyclic factor (the unit vector in that factor).
    pub fn element_generators(&self) -> Vec<GroupElement> {
        (0..self.rank())
            .map(|i| {
                let mut residues = vec![0; self.rank()];
                residues[i] = 1;
                GroupElement { residues }
            })
            .collect()
    }

    /// One generator of the dual per cyclic factor.
    pub fn character_generators(&self) -> Vec<Character> {
        self.element_generators()
            .into_iter()
            .map(|g| Character { exponents: g.residues })
            .collect()
    }

    fn check_len(&self, len: usize) -> Result<(), GroupError> {
        if len == self.rank() {
            Ok(())
        } else {
            Err(GroupError::SpecMismatch(self.factors.clone(), vec![0; len]))
        }
    }

    /// Group law, component-wise addition modulo `D_i`.
    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check_len(a.residues.len())?;
        self.check_len(b.residues.len())?;
        Ok(GroupElement { residues: self.add(&a.residues, &b.residues) })
    }

    /// Inverse element.
    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        GroupElement { residues: self.neg(&g.residues) }
    }

    /// Character product `chi * eta`.
    pub fn mul(&self, a: &Character, b: &Character) -> Character {
        Character { exponents: self.add(&a.exponents, &b.exponents) }
    }

    /// Complex conjugate (inverse) character.
    pub fn conj(&self, a: &Character) -> Character {
        Character { exponents: self.neg(&a.exponents) }
    }

    /// Integer power `chi^k` (negative powers allowed).
    pub fn pow(&self, a: &Character, k: i64) -> Character {
        Character {
            exponents: a
                .exponents
                .iter()
                .zip(&self.factors)
                .map(|(&e, &d)| ((e as i128 * k as i128).rem_euclid(d as i128)) as u64)
                .collect(),
        }
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).zip(&self.factors).map(|((x, y), d)| (x + y) % d).collect()
    }

    fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().zip(&self.factors).map(|(x, d)| (d - x) % d).collect()
    }

    /// The pairing `chi(g)` as an exact fraction of a turn.
    pub fn pair(&self, chi: &Character, g: &GroupElement) -> Result<RationalPhase, GroupError> {
        self.check_len(chi.exponents.len())?;
        self.check_len(g.residues.len())?;
        // Sum over the common denominator lcm(D_i) of r_i e_i (L / D_i).
        let l = self.factors.iter().fold(1u64, |acc, &d| lcm(acc, d));
        let mut num: u128 = 0;
        for ((&r, &e), &d) in chi.exponents.iter().zip(&g.residues).zip(&self.factors) {
            num += (r as u128 * e as u128 % d as u128) * (l / d) as u128;
        }
        Ok(RationalPhase::new((num % l as u128) as i64, l))
    }

    /// Least `D >= 1` with `chi^D` trivial.
    pub fn character_order(&self, chi: &Character) -> u64 {
        chi.exponents
            .iter()
            .zip(&self.factors)
            .fold(1u64, |acc, (&e, &d)| lcm(acc, d / gcd(e, d)))
    }

    /// Haar average `(1/|G|) sum_g f(g)`.
    pub fn haar_average<F: FnMut(&GroupElement) -> Complex64>(&self, mut f: F) -> Complex64 {
        let n = self.order() as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            acc += f(&self.element_at(i));
        }
        acc / n as f64
    }

    /// Whether the given characters generate the whole dual group.
    pub fn generates_dual(&self, chars: &[Character]) -> bool {
        let n = self.order() as usize;
        let mut seen = vec![false; n];
        let mut stack = vec![self.trivial_character()];
        seen[0] = true;
        let mut count = 1;
        while let Some(c) = stack.pop() {
            for r in chars {
                let next = self.mul(&c, r);
                let idx = self.index_of(&next.exponents);
                if !seen[idx] {
                    seen[idx] = true;
                    count += 1;
                    stack.push(next);
                }
            }
        }
        count == n
    }

    /// Formats a character as a tuple item: `e` for cyclic groups, `e1:e2:...`
    /// otherwise.
    pub fn format_character(&self, chi: &Character) -> String {
        join_colon(&chi.exponents)
    }

    /// Parses the tuple-item form produced by [`GroupSpec::format_character`].
    pub fn parse_character(&self, s: &str) -> Result<Character, GroupError> {
        let parts: Result<Vec<i64>, _> = s.split(':').map(|p| p.trim().parse::<i64>()).collect();
        let parts = parts.map_err(|_| GroupError::Parse(s.to_string()))?;
        self.character(&parts)
    }
}

fn join_colon(v: &[u64]) -> String {
    v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(":")
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z{d}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    /// Parses literals such as `Z2`, `Z3xZ2` or `z6` (case-insensitive).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        if lower.is_empty() {
            return Err(GroupError::Parse(s.to_string()));
        }
        let mut factors = Vec::new();
        for part in lower.split('x') {
            let digits = part
                .trim()
                .strip_prefix('z')
                .ok_or_else(|| GroupError::Parse(s.to_string()))?;
            let d: u64 = digits.parse().map_err(|_| GroupError::Parse(s.to_string()))?;
            factors.push(d);
        }
        GroupSpec::new(factors)
    }
}

/// A group element, stored as reduced residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    residues: Vec<u64>,
}

impl GroupElement {
    /// The residues `e_i in [0, D_i)`.
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }
}

/// A character of the group, stored as reduced exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    exponents: Vec<u64>,
}

impl Character {
    /// The exponents `r_i in [0, D_i)`.
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// Whether this is the trivial character.
    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join_colon(&self.exponents))
    }
}

/// An element of `U(1)` of finite order, `exp(2 pi i num/den)`, in lowest terms
/// with `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPhase {
    num: i64,
    den: u64,
}

impl RationalPhase {
    /// Builds and reduces `num/den` modulo 1. Panics if `den == 0`.
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "phase denominator must be positive");
        let n = num.rem_euclid(den as i64) as u64;
        let g = gcd(n, den).max(1);
        RationalPhase { num: (n / g) as i64, den: den / g }
    }

    /// The trivial phase `0/1`.
    pub fn zero() -> Self {
        RationalPhase { num: 0, den: 1 }
    }

    /// Numerator in `[0, den)`.
    pub fn numerator(&self) -> i64 {
        self.num
    }

    /// Positive denominator.
    pub fn denominator(&self) -> u64 {
        self.den
    }

    /// Whether the phase equals 1.
    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Integer multiple of the phase.
    pub fn times(self, k: i64) -> RationalPhase {
        let n = (self.num as i128 * k as i128).rem_euclid(self.den as i128);
        RationalPhase::new(n as i64, self.den)
    }

    /// The unit complex number `exp(2 pi i num/den)`.
    /// Quarter turns are returned exactly.
    pub fn to_complex(self) -> Complex64 {
        if 4 % self.den == 0 {
            return match self.num as u64 * (4 / self.den) {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
        }
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.num as f64 / self.den as f64)
    }
}

impl Add for RationalPhase {
    type Output = RationalPhase;

    /// Sum of two phases (product of the unit complex numbers).
    fn add(self, other: RationalPhase) -> RationalPhase {
        let l = lcm(self.den, other.den);
        let n = self.num as i128 * (l / self.den) as i128 + other.num as i128 * (l / other.den) as i128;
        RationalPhase::new((n.rem_euclid(l as i128)) as i64, l)
    }
}

impl Neg for RationalPhase {
    type Output = RationalPhase;

    /// Negated phase (complex conjugate).
    fn neg(self) -> RationalPhase {
        RationalPhase::new(-self.num, self.den)
    }
}

impl fmt::Display for RationalPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RationalPhase {
    type Err = GroupError;

    /// Parses `p/q` or a bare integer `p` (meaning `p/1`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GroupError::Parse(s.to_string());
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| err())?;
                let q: u64 = q.trim().parse().map_err(|_| err())?;
                if q == 0 {
                    return Err(err());
                }
                Ok(RationalPhase::new(p, q))
            }
            None => {
                let p: i64 = s.trim().parse().map_err(|_| err())?;
                Ok(RationalPhase::new(p, 1))
            }
        }
    }
}

/// Greatest common divisor.
pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Least common multiple.
pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_examples() {
        let z2 = GroupSpec::cyclic(2).unwrap();
        let one = z2.element(&[1]).unwrap();
        assert_eq!(z2.compose(&one, &one).unwrap(), z2.identity());
        let g = "Z3xZ2".parse::<GroupSpec>().unwrap();
        let a = g.element(&[2, 1]).unwrap();
        assert_eq!(g.compose(&a, &a).unwrap().residues(), &[1, 0]);
        let z3 = GroupSpec::cyclic(3).unwrap();
        assert!(matches!(z3.compose(&a, &z3.identity()), Err(GroupError::SpecMismatch(..))));
    }

    #[test]
    fn pairing_examples() {
        let z2 = GroupSpec::cyclic(2).unwrap();
        let p = z2.pair(&z2.character(&[1]).unwrap(), &z2.element(&[1]).unwrap()).unwrap();
        assert_eq!((p.numerator(), p.denominator()), (1, 2));
        let z3 = GroupSpec::cyclic(3).unwrap();
        let p = z3.pair(&z3.character(&[1]).unwrap(), &z3.element(&[2]).unwrap()).unwrap();
        assert_eq!((p.numerator(), p.denominator()), (2, 3));
        let g = "Z3xZ2".parse::<GroupSpec>().unwrap();
        let p = g.pair(&g.trivial_character(), &g.element(&[2, 1]).unwrap()).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn character_orders() {
        let z6 = GroupSpec::cyclic(6).unwrap();
        assert_eq!(z6.character_order(&z6.character(&[2]).unwrap()), 3);
        assert_eq!(z6.character_order(&z6.trivial_character()), 1);
        let z2 = GroupSpec::cyclic(2).unwrap();
        assert_eq!(z2.character_order(&z2.character(&[1]).unwrap()), 2);
    }

    #[test]
    fn literal_parsing() {
        assert_eq!("z3XZ2".parse::<GroupSpec>().unwrap().factors(), &[3, 2]);
        assert!("Z1".parse::<GroupSpec>().is_err());
        assert!("Q2".parse::<GroupSpec>().is_err());
        assert!("".parse::<GroupSpec>().is_err());
        assert_eq!("Z3xZ2".parse::<GroupSpec>().unwrap().to_string(), "Z3xZ2");
    }

    #[test]
    fn phase_arithmetic() {
        let a = RationalPhase::new(1, 2);
        let b = RationalPhase::new(1, 3);
        assert_eq!(a + b, RationalPhase::new(5, 6));
        assert_eq!(a + a, RationalPhase::zero());
        assert_eq!(-b, RationalPhase::new(2, 3));
        assert_eq!("3/6".parse::<RationalPhase>().unwrap(), a);
    }
}
