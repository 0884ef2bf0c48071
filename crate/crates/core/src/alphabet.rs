//! Byte alphabets and rank-encoded sequences.
//!
//! Symbols are mapped to ranks `1..=sigma` in order of first occurrence.
//! The designated wild-card byte always maps to rank `0`.

use std::fmt;

/// Rank reserved for the wild card.
pub const WILDCARD: u8 = 0;

const UNASSIGNED: u8 = 0;

/// Bijection between raw bytes and ranks `1..=sigma`, plus the wild-card byte.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    rank_of: [u8; 256],
    byte_of: Vec<u8>,
    wildcard_byte: u8,
}

impl Alphabet {
    pub fn new(wildcard_byte: u8) -> Self {
        Self {
            rank_of: [UNASSIGNED; 256],
            byte_of: Vec::new(),
            wildcard_byte,
        }
    }

    /// Number of distinct non-wild-card symbols seen so far.
    pub fn sigma(&self) -> usize {
        self.byte_of.len()
    }

    pub fn wildcard_byte(&self) -> u8 {
        self.wildcard_byte
    }

    /// Rank of `byte`, or `None` if it has not been encoded yet.
    pub fn rank_of(&self, byte: u8) -> Option<u8> {
        if byte == self.wildcard_byte {
            return Some(WILDCARD);
        }
        match self.rank_of[byte as usize] {
            UNASSIGNED => None,
            r => Some(r),
        }
    }

    /// Byte for `rank`; rank 0 decodes to the wild-card byte.
    pub fn byte_of(&self, rank: u8) -> Option<u8> {
        if rank == WILDCARD {
            return Some(self.wildcard_byte);
        }
        self.byte_of.get(rank as usize - 1).copied()
    }

    /// Encodes `raw`, extending the alphabet with any unseen bytes.
    pub fn encode(&mut self, raw: &[u8]) -> Sequence {
        let ranks = raw
            .iter()
            .map(|&b| {
                if b == self.wildcard_byte {
                    return WILDCARD;
                }
                let slot = &mut self.rank_of[b as usize];
                if *slot == UNASSIGNED {
                    self.byte_of.push(b);
                    // at most 255 non-wild-card bytes exist, so this fits
                    *slot = self.byte_of.len() as u8;
                }
                *slot
            })
            .collect();
        Sequence { ranks }
    }

    pub fn decode(&self, seq: &Sequence) -> Vec<u8> {
        seq.ranks
            .iter()
            .map(|&r| self.byte_of(r).expect("rank outside alphabet"))
            .collect()
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Alphabet")
            .field("symbols", &String::from_utf8_lossy(&self.byte_of))
            .field("wildcard", &(self.wildcard_byte as char))
            .finish()
    }
}

/// Encodes `raw` with a fresh alphabet.
pub fn encode(raw: &[u8], wildcard_byte: u8) -> (Sequence, Alphabet) {
    let mut alphabet = Alphabet::new(wildcard_byte);
    let seq = alphabet.encode(raw);
    (seq, alphabet)
}

/// A rank-encoded text or pattern. Rank 0 is the wild card.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Sequence {
    ranks: Vec<u8>,
}

impl Sequence {
    pub fn from_ranks(ranks: Vec<u8>) -> Self {
        Self { ranks }
    }

    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn has_wildcards(&self) -> bool {
        self.ranks.contains(&WILDCARD)
    }

    /// Largest rank present (0 for an empty or all-wild-card sequence).
    pub fn max_rank(&self) -> u8 {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    /// Copies `len` symbols starting at 0-based `start`.
    pub fn slice(&self, start: usize, len: usize) -> Sequence {
        Sequence::from_ranks(self.ranks[start..start + len].to_vec())
    }

    /// Per-rank symbol counts, indexed by rank (index 0 counts wild cards).
    pub fn frequencies(&self, sigma: usize) -> Vec<usize> {
        let mut freq = vec![0usize; sigma + 1];
        for &r in &self.ranks {
            if r as usize >= freq.len() {
                freq.resize(r as usize + 1, 0);
            }
            freq[r as usize] += 1;
        }
        freq
    }
}

impl From<Vec<u8>> for Sequence {
    fn from(ranks: Vec<u8>) -> Self {
        Self::from_ranks(ranks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_occurrence_ranks() {
        let (s, a) = encode(b"abNa", b'N');
        assert_eq!(s.ranks(), &[1, 2, 0, 1]);
        assert_eq!(a.sigma(), 2);

        let (s, a) = encode(b"NNN", b'N');
        assert_eq!(s.ranks(), &[0, 0, 0]);
        assert_eq!(a.sigma(), 0);

        let (s, a) = encode(b"banana", b'?');
        assert_eq!(s.ranks(), &[1, 2, 3, 2, 3, 2]);
        assert_eq!(a.sigma(), 3);
    }

    #[test]
    fn shared_alphabet_extends_consistently() {
        let (t, mut a) = encode(b"abc", b'?');
        let p = a.encode(b"cad?");
        assert_eq!(t.ranks(), &[1, 2, 3]);
        assert_eq!(p.ranks(), &[3, 1, 4, 0]);
        assert_eq!(a.sigma(), 4);
        assert_eq!(a.rank_of(b'd'), Some(4));
        assert_eq!(a.rank_of(b'z'), None);
    }

    #[test]
    fn wildcard_outside_bijection() {
        let (_, a) = encode(b"xyNx", b'N');
        assert_eq!(a.rank_of(b'N'), Some(0));
        for r in 1..=a.sigma() as u8 {
            assert_ne!(a.byte_of(r), Some(b'N'));
        }
    }

    proptest! {
        #[test]
        fn decode_round_trips(raw in proptest::collection::vec(any::<u8>(), 1..200), wc in any::<u8>()) {
            let (s, a) = encode(&raw, wc);
            prop_assert_eq!(a.decode(&s), raw);
            for r in 1..=a.sigma() as u8 {
                let b = a.byte_of(r).unwrap();
                prop_assert_eq!(a.rank_of(b), Some(r));
            }
        }
    }
}
