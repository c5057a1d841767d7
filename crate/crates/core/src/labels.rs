//! Symbolic type tags X_n^(r) for finite and affine root systems, with the
//! dot decorations that record how a subsystem sits inside a longer ambient
//! system (one dot: shortest class, two dots: longest class).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn from_char(c: char) -> Option<Family> {
        match c {
            'A' => Some(Family::A),
            'B' => Some(Family::B),
            'C' => Some(Family::C),
            'D' => Some(Family::D),
            'E' => Some(Family::E),
            'F' => Some(Family::F),
            'G' => Some(Family::G),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

/// Length class of a root relative to the ambient system it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LengthClass {
    Short,
    Middle,
    Long,
}

/// Decoration on an embedded subsystem label: the ambient length class of its
/// shortest roots. `None` when the ambient is simply laced (no ambiguity).
pub type Decoration = Option<LengthClass>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RootSystemLabel {
    pub family: Family,
    pub rank: usize,
    /// 0 = finite, 1..=3 = affine twist order.
    pub twist: u8,
    pub decoration: Decoration,
}

impl RootSystemLabel {
    pub fn finite(family: Family, rank: usize) -> Self {
        RootSystemLabel {
            family,
            rank,
            twist: 0,
            decoration: None,
        }
    }

    pub fn affine(family: Family, rank: usize, twist: u8) -> Self {
        RootSystemLabel {
            family,
            rank,
            twist,
            decoration: None,
        }
    }

    pub fn decorated(mut self, d: Decoration) -> Self {
        self.decoration = d;
        self
    }

    pub fn bare(mut self) -> Self {
        self.decoration = None;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.twist == 0
    }

    pub fn is_affine(&self) -> bool {
        self.twist >= 1
    }

    pub fn is_untwisted(&self) -> bool {
        self.twist == 1
    }

    /// Validity in the finite registry / Kac tables Aff 1-3, after alias
    /// normalization (this checks the canonical names only).
    pub fn is_canonical(&self) -> bool {
        let (f, n) = (self.family, self.rank);
        match self.twist {
            0 => match f {
                Family::A => n >= 1,
                Family::B => n >= 3,
                Family::C => n >= 2,
                Family::D => n >= 4,
                Family::E => (6..=8).contains(&n),
                Family::F => n == 4,
                Family::G => n == 2,
            },
            1 => match f {
                Family::A => n >= 1,
                Family::B => n >= 3,
                Family::C => n >= 2,
                Family::D => n >= 4,
                Family::E => (6..=8).contains(&n),
                Family::F => n == 4,
                Family::G => n == 2,
            },
            2 => match f {
                // A_2^(2) and A_{2n}^(2) (n>=2); A_{2n-1}^(2) (n>=3); D_{n+1}^(2) (n>=2); E_6^(2)
                Family::A => n == 2 || (n >= 4 && n % 2 == 0) || (n >= 5 && n % 2 == 1),
                Family::D => n >= 3,
                Family::E => n == 6,
                _ => false,
            },
            3 => f == Family::D && n == 4,
            _ => false,
        }
    }

    /// Normalize the low-rank aliases. A label may split into several
    /// components (D_2 = A_1 + A_1), hence the Vec. Decorations produced by
    /// the aliases themselves (B_1 = short A_1, C_1 = long A_1) are attached;
    /// a pre-existing decoration on the input is kept when the alias does not
    /// dictate one.
    pub fn normalize(&self) -> Vec<RootSystemLabel> {
        use Family::*;
        let d = self.decoration;
        let t = self.twist;
        let mk = |f: Family, n: usize, t: u8, d: Decoration| RootSystemLabel {
            family: f,
            rank: n,
            twist: t,
            decoration: d,
        };
        match (self.family, self.rank, t) {
            // finite and untwisted share the same alias list
            (D, 2, 0 | 1) => vec![mk(A, 1, t, d), mk(A, 1, t, d)],
            (B, 1, 0 | 1) => vec![mk(A, 1, t, d.or(Some(LengthClass::Short)))],
            (C, 1, 0 | 1) => vec![mk(A, 1, t, d.or(Some(LengthClass::Long)))],
            (D, 3, 0 | 1) => vec![mk(A, 3, t, d)],
            (B, 2, 0 | 1) => vec![mk(C, 2, t, d.or(Some(LengthClass::Short)))],
            (A, 1, 2) => vec![mk(A, 1, 1, d.or(Some(LengthClass::Long)))],
            (D, 2, 2) => vec![mk(A, 1, 1, d.or(Some(LengthClass::Short)))],
            (A, 3, 2) => vec![mk(D, 3, 2, d)],
            _ => vec![*self],
        }
    }
}

impl fmt::Display for RootSystemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.decoration {
            Some(LengthClass::Long) => write!(f, "..")?,
            Some(LengthClass::Short) | Some(LengthClass::Middle) => write!(f, ".")?,
            None => {}
        }
        write!(f, "{}{}", self.family.as_char(), self.rank)?;
        if self.twist > 0 {
            write!(f, "^({})", self.twist)?;
        }
        Ok(())
    }
}

/// Parse one component label: [.|..] FAMILY RANK [^(TWIST)].
/// Column numbers in errors are 1-based offsets into the full input.
fn parse_component(s: &str, base_col: usize) -> Result<RootSystemLabel> {
    let mut chars = s.char_indices().peekable();
    let mut dots = 0usize;
    while let Some(&(_, '.')) = chars.peek() {
        chars.next();
        dots += 1;
    }
    if dots > 2 {
        return Err(Error::Parse {
            col: base_col,
            msg: "at most two dots allowed".into(),
        });
    }
    let Some((fam_off, fam_ch)) = chars.next() else {
        return Err(Error::Parse {
            col: base_col,
            msg: "empty label".into(),
        });
    };
    let Some(family) = Family::from_char(fam_ch) else {
        return Err(Error::Parse {
            col: base_col + fam_off,
            msg: format!("unknown family '{}'", fam_ch),
        });
    };
    let mut rank_str = String::new();
    while let Some(&(_, c)) = chars.peek() {
        if c.is_ascii_digit() {
            rank_str.push(c);
            chars.next();
        } else {
            break;
        }
    }
    if rank_str.is_empty() {
        return Err(Error::Parse {
            col: base_col + fam_off + 1,
            msg: "missing rank".into(),
        });
    }
    let rank: usize = rank_str.parse().map_err(|_| Error::Parse {
        col: base_col + fam_off + 1,
        msg: "bad rank".into(),
    })?;
    let rest: String = chars.map(|(_, c)| c).collect();
    let twist = if rest.is_empty() {
        0u8
    } else {
        let inner = rest
            .strip_prefix("^(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or(Error::Parse {
                col: base_col + fam_off + 1 + rank_str.len(),
                msg: "expected ^(t)".into(),
            })?;
        inner.parse::<u8>().map_err(|_| Error::Parse {
            col: base_col + fam_off + 3 + rank_str.len(),
            msg: "bad twist".into(),
        })?
    };
    if !(0..=3).contains(&twist) {
        return Err(Error::Parse {
            col: base_col,
            msg: format!("twist {} out of range", twist),
        });
    }
    let decoration = match dots {
        1 => Some(LengthClass::Short),
        2 => Some(LengthClass::Long),
        _ => None,
    };
    let label = RootSystemLabel {
        family,
        rank,
        twist,
        decoration,
    };
    // validity after alias normalization
    for part in label.normalize() {
        if !part.is_canonical() {
            return Err(Error::UnknownLabel(s.to_string()));
        }
    }
    Ok(label)
}

/// Parse a possibly decomposable label string, components joined by '+'.
/// Aliases are normalized, so the result can be longer than the '+'-count.
pub fn parse_label_list(s: &str) -> Result<Vec<RootSystemLabel>> {
    let mut out = Vec::new();
    let mut col = 1usize;
    for piece in s.split('+') {
        let trimmed = piece.trim();
        let lead = piece.len() - piece.trim_start().len();
        let label = parse_component(trimmed, col + lead)?;
        out.extend(label.normalize());
        col += piece.len() + 1;
    }
    if out.is_empty() {
        return Err(Error::Parse {
            col: 1,
            msg: "empty label list".into(),
        });
    }
    Ok(out)
}

pub fn parse_label(s: &str) -> Result<RootSystemLabel> {
    let list = parse_label_list(s)?;
    if list.len() != 1 {
        return Err(Error::Parse {
            col: 1,
            msg: "expected a single indecomposable label".into(),
        });
    }
    Ok(list[0])
}

/// Canonical printing of a component multiset: sorted, '+'-joined.
pub fn display_components(components: &[RootSystemLabel]) -> String {
    let mut sorted = components.to_vec();
    sorted.sort();
    sorted
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join("+")
}
