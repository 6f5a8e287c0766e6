//! Group words and their text syntax.
//!
//! A word is a list of `(generator, exponent)` syllables. The text form is a
//! sequence of letters, each optionally followed by `^<int>`; an uppercase
//! letter is the inverse generator. Whitespace is ignored.
//!
//! Baumslag letters: `a t b` (and `A T B`). Higman letters: `a1 .. a4`
//! (and `A1 .. A4`).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: usize,
    pub msg: String,
}

/// Answer of a word problem solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Trivial,
    Nontrivial,
}

pub trait Generator: Copy + Eq + fmt::Debug {
    fn write(&self, f: &mut fmt::Formatter<'_>, inverse: bool) -> fmt::Result;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BGen {
    A,
    T,
    B,
}

impl Generator for BGen {
    fn write(&self, f: &mut fmt::Formatter<'_>, inverse: bool) -> fmt::Result {
        let c = match self {
            BGen::A => 'a',
            BGen::T => 't',
            BGen::B => 'b',
        };
        write!(f, "{}", if inverse { c.to_ascii_uppercase() } else { c })
    }
}

/// Generator `a_p` of Higman's group, `p` in `1..=4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HGen(pub u8);

impl Generator for HGen {
    fn write(&self, f: &mut fmt::Formatter<'_>, inverse: bool) -> fmt::Result {
        write!(f, "{}{}", if inverse { 'A' } else { 'a' }, self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word<G> {
    pub syllables: Vec<(G, i64)>,
}

impl<G> Default for Word<G> {
    fn default() -> Self {
        Word {
            syllables: Vec::new(),
        }
    }
}

impl<G: Generator> Word<G> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn letter(g: G, e: i64) -> Self {
        let mut w = Self::new();
        w.push(g, e);
        w
    }

    /// Appends `g^e`, merging with the last syllable (free reduction).
    pub fn push(&mut self, g: G, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.syllables.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.syllables.pop();
                }
                return;
            }
        }
        self.syllables.push((g, e));
    }

    pub fn append(&mut self, other: &Word<G>) {
        for &(g, e) in &other.syllables {
            self.push(g, e);
        }
    }

    pub fn concat(mut self, other: &Word<G>) -> Self {
        self.append(other);
        self
    }

    pub fn inverse(&self) -> Self {
        Word {
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    /// Freely reduced copy.
    pub fn reduced(&self) -> Self {
        let mut w = Self::new();
        w.append(self);
        w
    }

    /// Number of letters, counting `g^e` as `|e|` letters.
    pub fn len(&self) -> u64 {
        self.syllables.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// The word spelled out letter by letter.
    pub fn letters(&self) -> impl Iterator<Item = (G, i64)> + '_ {
        self.syllables
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }
}

impl<G: Generator> fmt::Display for Word<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(g, e) in &self.syllables {
            g.write(f, e < 0)?;
            if e.abs() != 1 {
                write!(f, "^{}", e.abs())?;
            }
        }
        Ok(())
    }
}

pub type BaumslagWord = Word<BGen>;
pub type HigmanWord = Word<HGen>;

struct Lexer<'a> {
    s: &'a [u8],
    i: usize,
}

impl Lexer<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError {
            pos: self.i,
            msg: msg.into(),
        }
    }

    fn int(&mut self) -> Result<i64, SyntaxError> {
        self.skip_ws();
        let start = self.i;
        if self.i < self.s.len() && (self.s[self.i] == b'-' || self.s[self.i] == b'+') {
            self.i += 1;
        }
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i])
            .unwrap()
            .parse()
            .map_err(|_| SyntaxError {
                pos: start,
                msg: "expected an integer exponent".into(),
            })
    }

    fn exponent(&mut self) -> Result<i64, SyntaxError> {
        self.skip_ws();
        if self.i < self.s.len() && self.s[self.i] == b'^' {
            self.i += 1;
            self.int()
        } else {
            Ok(1)
        }
    }
}

fn parse_with<G: Generator>(
    text: &str,
    mut letter: impl FnMut(&mut Lexer<'_>) -> Result<(G, bool), SyntaxError>,
) -> Result<Word<G>, SyntaxError> {
    let mut lx = Lexer {
        s: text.as_bytes(),
        i: 0,
    };
    let mut w = Word::new();
    loop {
        lx.skip_ws();
        if lx.i >= lx.s.len() {
            return Ok(w);
        }
        let (g, inv) = letter(&mut lx)?;
        let e = lx.exponent()?;
        let e = if inv {
            e.checked_neg()
                .ok_or_else(|| lx.err("exponent out of range"))?
        } else {
            e
        };
        w.push(g, e);
    }
}

/// Parses a word over `a, t, b`.
pub fn parse_baumslag(text: &str) -> Result<BaumslagWord, SyntaxError> {
    parse_with(text, |lx| {
        let c = lx.s[lx.i];
        let g = match c.to_ascii_lowercase() {
            b'a' => BGen::A,
            b't' => BGen::T,
            b'b' => BGen::B,
            _ => return Err(lx.err(format!("unexpected character {:?}", c as char))),
        };
        lx.i += 1;
        Ok((g, c.is_ascii_uppercase()))
    })
}

/// Parses a word over `a1 .. a4`.
pub fn parse_higman(text: &str) -> Result<HigmanWord, SyntaxError> {
    parse_with(text, |lx| {
        let c = lx.s[lx.i];
        if c != b'a' && c != b'A' {
            return Err(lx.err(format!("unexpected character {:?}", c as char)));
        }
        lx.i += 1;
        match lx.s.get(lx.i) {
            Some(d @ b'1'..=b'4') => {
                lx.i += 1;
                Ok((HGen(d - b'0'), c == b'A'))
            }
            _ => Err(lx.err("expected generator index 1..4")),
        }
    })
}
