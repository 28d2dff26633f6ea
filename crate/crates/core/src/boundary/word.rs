use std::fmt;

use super::BoundaryError;

/// A generator or its inverse: `gen` counts from 0 (`a`), `inv` selects the
/// inverse (`A`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: u8,
    pub inv: bool,
}

impl Letter {
    pub fn inverse(self) -> Self {
        Self { gen: self.gen, inv: !self.inv }
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.gen) as char;
        if self.inv {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn from_char(c: char, rank: usize) -> Result<Self, BoundaryError> {
        let (base, inv) = match c {
            'a'..='z' => (b'a', false),
            'A'..='Z' => (b'A', true),
            _ => return Err(BoundaryError::Alphabet(format!("{c:?} is not a letter"))),
        };
        let gen = c as u8 - base;
        if gen as usize >= rank {
            return Err(BoundaryError::Alphabet(format!(
                "{c:?} is not a generator of a free group of rank {rank}"
            )));
        }
        Ok(Self { gen, inv })
    }

    /// All `2·rank` letters in the order `a, A, b, B, ...`.
    pub fn all(rank: usize) -> impl Iterator<Item = Letter> {
        (0..rank as u8).flat_map(|gen| [Letter { gen, inv: false }, Letter { gen, inv: true }])
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn prefix(&self, m: usize) -> Self {
        Self { letters: self.letters[..m.min(self.len())].to_vec() }
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &ReducedWord) -> Self {
        let k = cancellation(self, other);
        let mut letters = self.letters[..self.len() - k].to_vec();
        letters.extend_from_slice(&other.letters[k..]);
        Self { letters }
    }

    /// Rank needed to spell this word.
    pub fn min_rank(&self) -> usize {
        self.letters.iter().map(|l| l.gen as usize + 1).max().unwrap_or(0)
    }
}

/// Number of letters cancelled when forming `u · v` of two reduced words.
pub(crate) fn cancellation(u: &ReducedWord, v: &ReducedWord) -> usize {
    u.letters
        .iter()
        .rev()
        .zip(&v.letters)
        .take_while(|(a, b)| a.inverse() == **b)
        .count()
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// Free reduction with a stack: each letter either cancels the top or is pushed.
pub fn reduce_word(letters: &[Letter]) -> ReducedWord {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    ReducedWord { letters: out }
}

/// Parses `a`–`z` (generators) and `A`–`Z` (inverses), ignoring whitespace;
/// `1` or the empty string is the identity. The result is reduced.
pub fn parse_word(s: &str, rank: usize) -> Result<ReducedWord, BoundaryError> {
    if !(1..=26).contains(&rank) {
        return Err(BoundaryError::Domain(format!("rank must be in 1..=26, got {rank}")));
    }
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t == "1" {
        return Ok(ReducedWord::identity());
    }
    let letters = t.chars().map(|c| Letter::from_char(c, rank)).collect::<Result<Vec<_>, _>>()?;
    Ok(reduce_word(&letters))
}
