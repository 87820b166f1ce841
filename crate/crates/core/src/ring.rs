//! The supported coefficient rings and their element arithmetic.
//!
//! Elements are stored as `i128`. Over the integers every value is its own
//! canonical representative; over `Z/n` and `F_p` the canonical
//! representative of a residue class is the unique value in `[0, n)`.
//!
//! All three rings are commutative and coherent, and every flat module over
//! them has finite projective dimension (`Z` is hereditary, `Z/n` and `F_p`
//! are perfect). Left and right modules are therefore the same thing
//! mathematically; the crate still tracks the side so that dualization can be
//! typed as a left/right swap.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Elem = i128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Integers,
    IntegersModulo(u64),
    PrimeField(u64),
}

/// Which side the ring acts on. Dualizing swaps it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Side> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::Invariant(format!("unknown side `{other}`"))),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Ring {
    pub fn integers() -> Ring {
        Ring::Integers
    }

    pub fn modulo(n: u64) -> Result<Ring> {
        if n < 2 {
            return Err(Error::InvalidRing(format!("Z/{n} needs n >= 2")));
        }
        Ok(Ring::IntegersModulo(n))
    }

    pub fn prime_field(p: u64) -> Result<Ring> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("{p} is not prime")));
        }
        Ok(Ring::PrimeField(p))
    }

    /// The characteristic modulus, `None` over the integers.
    pub fn modulus(self) -> Option<i128> {
        match self {
            Ring::Integers => None,
            Ring::IntegersModulo(n) | Ring::PrimeField(n) => Some(n as i128),
        }
    }

    pub fn reduce(self, x: Elem) -> Elem {
        match self.modulus() {
            None => x,
            Some(n) => x.rem_euclid(n),
        }
    }

    pub fn is_canonical(self, x: Elem) -> bool {
        self.reduce(x) == x
    }

    pub fn add(self, a: Elem, b: Elem) -> Elem {
        self.reduce(a.checked_add(b).expect("ring addition overflow"))
    }

    pub fn sub(self, a: Elem, b: Elem) -> Elem {
        self.reduce(a.checked_sub(b).expect("ring subtraction overflow"))
    }

    pub fn mul(self, a: Elem, b: Elem) -> Elem {
        self.reduce(a.checked_mul(b).expect("ring multiplication overflow"))
    }

    pub fn neg(self, a: Elem) -> Elem {
        self.reduce(-a)
    }

    /// `(-1)^k` as a ring element.
    pub fn sign(self, k: i64) -> Elem {
        if k.rem_euclid(2) == 0 {
            1
        } else {
            self.neg(1)
        }
    }

    /// Every residue of a finite ring, or `None` over the integers.
    pub fn elements(self) -> Option<Vec<Elem>> {
        self.modulus().map(|n| (0..n).collect())
    }

    /// A unit of the ring is invertible; used when scrambling complexes.
    pub fn is_unit(self, a: Elem) -> bool {
        match self.modulus() {
            None => a == 1 || a == -1,
            Some(n) => num_integer::gcd(a.rem_euclid(n), n) == 1,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::IntegersModulo(n) => write!(f, "Z/{n}"),
            Ring::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for Ring {
    type Err = Error;

    /// Accepts `Z`, `Z/n` and `Fp` (also `GF(p)`).
    fn from_str(s: &str) -> Result<Ring> {
        let s = s.trim();
        let bad = || Error::InvalidRing(format!("cannot parse ring `{s}`"));
        if s == "Z" {
            return Ok(Ring::Integers);
        }
        if let Some(rest) = s.strip_prefix("Z/") {
            return Ring::modulo(rest.parse().map_err(|_| bad())?);
        }
        if let Some(rest) = s.strip_prefix("GF(").and_then(|r| r.strip_suffix(')')) {
            return Ring::prime_field(rest.parse().map_err(|_| bad())?);
        }
        if let Some(rest) = s.strip_prefix('F') {
            return Ring::prime_field(rest.parse().map_err(|_| bad())?);
        }
        Err(bad())
    }
}
