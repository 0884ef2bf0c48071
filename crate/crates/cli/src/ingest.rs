//! Corpus loading and random pattern extraction.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use kmis::{Alphabet, SeededRng, Sequence};
use rand::Rng;

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Plain,
    Fasta,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Format::Plain),
            "fasta" => Ok(Format::Fasta),
            other => Err(format!(
                "unknown format `{other}` (expected plain or fasta)"
            )),
        }
    }
}

/// Payload bytes of a corpus: line terminators removed, and for FASTA the
/// `>` header lines dropped.
pub fn parse_payload(raw: &[u8], format: Format) -> Vec<u8> {
    let mut out = Vec::with_capacity(raw.len());
    for line in raw.split(|&b| b == b'\n') {
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if format == Format::Fasta && line.first() == Some(&b'>') {
            continue;
        }
        out.extend_from_slice(line);
    }
    out
}

pub fn read_payload(path: &Path, format: Format) -> Result<Vec<u8>, CliError> {
    let raw = fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let payload = parse_payload(&raw, format);
    if payload.is_empty() {
        return Err(CliError::Input(format!(
            "{} has no sequence data",
            path.display()
        )));
    }
    Ok(payload)
}

/// Reads and encodes a corpus file with `alphabet`.
pub fn ingest(path: &Path, format: Format, alphabet: &mut Alphabet) -> Result<Sequence, CliError> {
    Ok(alphabet.encode(&read_payload(path, format)?))
}

/// Uniformly chosen length-`m` substring of `text`; returns the 1-based
/// offset with the pattern.
pub fn extract_pattern(
    text: &Sequence,
    m: usize,
    rng: &mut SeededRng,
) -> Result<(usize, Sequence), CliError> {
    if m == 0 || m > text.len() {
        return Err(CliError::Input(format!(
            "cannot extract a pattern of length {m} from a text of length {}",
            text.len()
        )));
    }
    let start = rng.gen_range(0..=text.len() - m);
    Ok((start + 1, text.slice(start, m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use kmis::encode;

    #[test]
    fn plain_and_fasta_payloads() {
        assert_eq!(parse_payload(b"abc\n", Format::Plain), b"abc");
        assert_eq!(parse_payload(b">x\nAC\nGT\n", Format::Fasta), b"ACGT");
        assert_eq!(parse_payload(b">x\r\nAC\r\nGT", Format::Fasta), b"ACGT");
        let (s, _) = encode(&parse_payload(b"abc\n", Format::Plain), 0);
        assert_eq!(s.ranks(), &[1, 2, 3]);
    }

    #[test]
    fn dna_wildcards_become_zero() {
        let (s, a) = encode(&parse_payload(b">r\nACNGN\n", Format::Fasta), b'N');
        assert_eq!(s.ranks(), &[1, 2, 0, 3, 0]);
        assert_eq!(a.sigma(), 3);
    }

    #[test]
    fn extraction() {
        let (t, _) = encode(b"abcdefgh", 0);
        let (off, p) = extract_pattern(&t, 8, &mut SeededRng::new(1)).unwrap();
        assert_eq!((off, &p), (1, &t));
        let a = extract_pattern(&t, 3, &mut SeededRng::new(9)).unwrap();
        let b = extract_pattern(&t, 3, &mut SeededRng::new(9)).unwrap();
        assert_eq!(a, b);
        assert!(extract_pattern(&t, 9, &mut SeededRng::new(1)).is_err());
    }

    #[test]
    fn extraction_offsets_are_uniform() {
        let (t, _) = encode(b"abcdefgh", 0);
        // 6 offsets, 6000 draws: expected 1000 each, sd about 29
        let mut hist = [0usize; 6];
        for seed in 0..6000 {
            let (off, _) = extract_pattern(&t, 3, &mut SeededRng::new(seed)).unwrap();
            hist[off - 1] += 1;
        }
        for h in hist {
            assert!((h as i64 - 1000).abs() < 150, "{hist:?}");
        }
    }
}
