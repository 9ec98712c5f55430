//! Xenakis sieves: residue classes combined by union, intersection and
//! complement.
//!
//! Text grammar (whitespace is insignificant, `&` binds tighter than `|`):
//!
//! ```text
//! expr   := term ('|' term)*
//! term   := factor ('&' factor)*
//! factor := '!' factor | '(' expr ')' | INT '@' INT
//! ```
//!
//! `m@r` is the class `{n : n ≡ r (mod m)}`. Shifts are normalized into
//! `0..m` at construction and membership uses the Euclidean remainder, so
//! negative integers behave consistently.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// The default generative-mode scale.
pub const DEFAULT_SIEVE: &str = "3@0|4@1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SieveError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("modulus must be ≥ 1")]
    ZeroModulus,
    #[error("period overflows 64 bits")]
    PeriodOverflow,
    #[error("invalid range: {lo} > {hi}")]
    InvalidRange { lo: i64, hi: i64 },
    #[error("need at least two points")]
    TooFewPoints,
    #[error("sieve generates no pitches")]
    EmptyScale,
}

/// The congruence class `n ≡ shift (mod modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    modulus: u64,
    shift: u64,
}

impl Residue {
    pub fn new(modulus: i64, shift: i64) -> Result<Self, SieveError> {
        if modulus < 1 {
            return Err(SieveError::ZeroModulus);
        }
        Ok(Self {
            modulus: modulus as u64,
            shift: shift.rem_euclid(modulus) as u64,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    pub fn contains(&self, n: i64) -> bool {
        (n as i128).rem_euclid(self.modulus as i128) as u64 == self.shift
    }
}

/// A sieve expression tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sieve {
    Residue(Residue),
    Union(Box<Sieve>, Box<Sieve>),
    Intersection(Box<Sieve>, Box<Sieve>),
    Complement(Box<Sieve>),
}

impl Sieve {
    pub fn residue(modulus: i64, shift: i64) -> Result<Self, SieveError> {
        Residue::new(modulus, shift).map(Sieve::Residue)
    }

    pub fn union(self, other: Sieve) -> Self {
        Sieve::Union(Box::new(self), Box::new(other))
    }

    pub fn intersection(self, other: Sieve) -> Self {
        Sieve::Intersection(Box::new(self), Box::new(other))
    }

    pub fn complement(self) -> Self {
        Sieve::Complement(Box::new(self))
    }

    pub fn contains(&self, n: i64) -> bool {
        match self {
            Sieve::Residue(r) => r.contains(n),
            Sieve::Union(a, b) => a.contains(n) || b.contains(n),
            Sieve::Intersection(a, b) => a.contains(n) && b.contains(n),
            Sieve::Complement(a) => !a.contains(n),
        }
    }

    /// Visits every leaf, left to right.
    pub fn leaves(&self) -> Vec<Residue> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            match node {
                Sieve::Residue(r) => out.push(*r),
                Sieve::Union(a, b) | Sieve::Intersection(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                Sieve::Complement(a) => stack.push(a),
            }
        }
        out
    }

    /// The lcm of all leaf moduli. This is always *a* period of the
    /// sieve, not necessarily the smallest one.
    pub fn period(&self) -> Result<u64, SieveError> {
        self.leaves().iter().try_fold(1u64, |acc, r| {
            let m = r.modulus;
            (acc / gcd(acc, m)).checked_mul(m).ok_or(SieveError::PeriodOverflow)
        })
    }

    /// All members of the sieve in `[lo, hi]`, ascending.
    pub fn generate(&self, lo: i64, hi: i64) -> Result<PointSet, SieveError> {
        if lo > hi {
            return Err(SieveError::InvalidRange { lo, hi });
        }
        let period = self.period()?;
        let span = (hi as i128 - lo as i128 + 1) as u128;

        let points = if (period as u128) < span {
            // One period of membership, tiled across the range.
            let base = lo;
            let pattern: Vec<u64> = (0..period)
                .filter(|&k| self.contains((base as i128 + k as i128) as i64))
                .collect();
            let mut points = Vec::new();
            let mut start = base as i128;
            'outer: loop {
                for &k in &pattern {
                    let n = start + k as i128;
                    if n > hi as i128 {
                        break 'outer;
                    }
                    points.push(n as i64);
                }
                start += period as i128;
                if start > hi as i128 {
                    break;
                }
            }
            points
        } else {
            (lo..=hi).filter(|&n| self.contains(n)).collect()
        };
        Ok(PointSet { points, period })
    }

    /// One period of the sieve starting at zero: the scale degrees used
    /// for pitch mapping.
    pub fn scale(&self) -> Result<PointSet, SieveError> {
        let period = self.period()?;
        let hi = i64::try_from(period - 1).map_err(|_| SieveError::PeriodOverflow)?;
        self.generate(0, hi)
    }

    /// Maps a scale degree to a MIDI note. Degrees beyond the scale wrap
    /// into higher periods; the result is clamped to `0..=127`.
    pub fn to_pitch(&self, degree: u64, base_midi: u8) -> Result<u8, SieveError> {
        let scale = self.scale()?;
        to_pitch_in(&scale, degree, base_midi)
    }
}

/// Pitch mapping against a precomputed [`Sieve::scale`].
pub fn to_pitch_in(scale: &PointSet, degree: u64, base_midi: u8) -> Result<u8, SieveError> {
    let n = scale.points.len() as u64;
    if n == 0 {
        return Err(SieveError::EmptyScale);
    }
    let offset = scale.points[(degree % n) as usize] as i128;
    let octave = scale.period as i128 * (degree / n) as i128;
    let pitch = base_midi as i128 + offset + octave;
    Ok(pitch.clamp(0, 127) as u8)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Ascending members of a sieve over a queried range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    pub points: Vec<i64>,
    pub period: u64,
}

impl PointSet {
    /// Successive differences between points.
    pub fn intervals(&self) -> Result<Vec<u64>, SieveError> {
        intervals(&self.points)
    }
}

pub fn intervals(points: &[i64]) -> Result<Vec<u64>, SieveError> {
    if points.len() < 2 {
        return Err(SieveError::TooFewPoints);
    }
    Ok(points.windows(2).map(|w| (w[1] - w[0]) as u64).collect())
}

// Printing: minimal parentheses that parse back to the same tree.
// Union and intersection parse left-associative, so a right child of the
// same operator needs parentheses.
impl fmt::Display for Sieve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prec(s: &Sieve) -> u8 {
            match s {
                Sieve::Union(..) => 0,
                Sieve::Intersection(..) => 1,
                Sieve::Complement(_) | Sieve::Residue(_) => 2,
            }
        }
        fn write_at(s: &Sieve, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if prec(s) < min {
                write!(f, "(")?;
                write_at(s, 0, f)?;
                return write!(f, ")");
            }
            match s {
                Sieve::Residue(r) => write!(f, "{}@{}", r.modulus, r.shift),
                Sieve::Union(a, b) => {
                    write_at(a, 0, f)?;
                    write!(f, "|")?;
                    write_at(b, 1, f)
                }
                Sieve::Intersection(a, b) => {
                    write_at(a, 1, f)?;
                    write!(f, "&")?;
                    write_at(b, 2, f)
                }
                Sieve::Complement(a) => {
                    write!(f, "!")?;
                    write_at(a, 2, f)
                }
            }
        }
        write_at(self, 0, f)
    }
}

impl FromStr for Sieve {
    type Err = SieveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sieve(s)
    }
}

pub fn parse_sieve(text: &str) -> Result<Sieve, SieveError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> SieveError {
        SieveError::Syntax {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Sieve, SieveError> {
        let mut lhs = self.term()?;
        while self.eat(b'|') {
            lhs = lhs.union(self.term()?);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Sieve, SieveError> {
        let mut lhs = self.factor()?;
        while self.eat(b'&') {
            lhs = lhs.intersection(self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Sieve, SieveError> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(self.factor()?.complement())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => {
                let modulus = self.int()?;
                if !self.eat(b'@') {
                    return Err(self.error("expected '@'"));
                }
                let shift = self.int()?;
                Sieve::residue(modulus, shift)
            }
            Some(c) => Err(self.error(format!("unexpected '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn int(&mut self) -> Result<i64, SieveError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        digits.parse().map_err(|_| SieveError::Syntax {
            position: start,
            message: "expected integer".into(),
        })
    }
}
