//! Syntactic sanity check for SMILES strings.
//!
//! This is a lexer plus balance checks, not a chemistry parser: it accepts
//! strings whose atoms, bonds, branches and ring closures are well formed.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid SMILES at byte {pos}: {reason}")]
pub struct SmilesError {
    pub pos: usize,
    pub reason: &'static str,
}

const ORGANIC: [&str; 10] = ["Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I"];
const AROMATIC: &[u8] = b"bcnops";
const BONDS: &[u8] = b"-=#$:/\\";

pub fn check_smiles(s: &str) -> Result<(), SmilesError> {
    let b = s.as_bytes();
    let err = |pos, reason| Err(SmilesError { pos, reason });
    if b.is_empty() {
        return err(0, "empty string");
    }
    let mut i = 0;
    // Open ring-closure labels (0..=99) and the branch depth.
    let mut rings = [false; 100];
    let mut depth = 0usize;
    // Whether an atom precedes the cursor in the current chain, and whether
    // the last token was a bond that still needs an atom.
    let mut have_atom = false;
    let mut pending_bond = false;
    while i < b.len() {
        let c = b[i];
        if c == b'[' {
            let Some(close) = b[i + 1..].iter().position(|&x| x == b']') else {
                return err(i, "unclosed bracket atom");
            };
            let inner = &b[i + 1..i + 1 + close];
            if inner.is_empty() || !inner.iter().any(u8::is_ascii_alphabetic) && !inner.contains(&b'*') {
                return err(i, "bracket atom without element");
            }
            if !inner
                .iter()
                .all(|x| x.is_ascii_alphanumeric() || b"@+-:*".contains(x))
            {
                return err(i, "unexpected character in bracket atom");
            }
            i += close + 2;
            have_atom = true;
            pending_bond = false;
        } else if let Some(sym) = ORGANIC.iter().find(|sym| b[i..].starts_with(sym.as_bytes())) {
            i += sym.len();
            have_atom = true;
            pending_bond = false;
        } else if AROMATIC.contains(&c) || c == b'*' {
            i += 1;
            have_atom = true;
            pending_bond = false;
        } else if BONDS.contains(&c) {
            if !have_atom || pending_bond {
                return err(i, "bond without preceding atom");
            }
            pending_bond = true;
            i += 1;
        } else if c == b'.' {
            if !have_atom || pending_bond || depth > 0 {
                return err(i, "misplaced dot");
            }
            have_atom = false;
            i += 1;
        } else if c.is_ascii_digit() || c == b'%' {
            if !have_atom {
                return err(i, "ring closure without atom");
            }
            let (label, len) = if c == b'%' {
                match b.get(i + 1..i + 3) {
                    Some(d) if d.iter().all(u8::is_ascii_digit) => {
                        (usize::from(d[0] - b'0') * 10 + usize::from(d[1] - b'0'), 3)
                    }
                    _ => return err(i, "'%' needs two digits"),
                }
            } else {
                (usize::from(c - b'0'), 1)
            };
            rings[label] = !rings[label];
            pending_bond = false;
            i += len;
        } else if c == b'(' {
            if !have_atom || pending_bond {
                return err(i, "branch without preceding atom");
            }
            if b.get(i + 1) == Some(&b')') {
                return err(i, "empty branch");
            }
            depth += 1;
            i += 1;
        } else if c == b')' {
            if depth == 0 {
                return err(i, "unbalanced ')'");
            }
            if pending_bond {
                return err(i, "branch ends with a bond");
            }
            depth -= 1;
            i += 1;
        } else {
            return err(i, "unexpected character");
        }
    }
    if depth > 0 {
        return err(b.len(), "unbalanced '('");
    }
    if pending_bond {
        return err(b.len(), "trailing bond");
    }
    if !have_atom {
        return err(b.len(), "no atoms");
    }
    if rings.iter().any(|&open| open) {
        return err(b.len(), "unmatched ring-closure digit");
    }
    Ok(())
}

pub fn is_valid_smiles(s: &str) -> bool {
    check_smiles(s).is_ok()
}

/// Trims whitespace and one layer of surrounding quotes or backticks.
pub fn normalize_smiles(s: &str) -> &str {
    let t = s.trim();
    for q in ['"', '\'', '`'] {
        if let Some(inner) = t.strip_prefix(q).and_then(|r| r.strip_suffix(q)) {
            return inner.trim();
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_common_molecules() {
        for s in [
            "C1=CC=CC=C1",
            "CCO",
            "c1ccccc1",
            "CC(=O)Oc1ccccc1C(=O)O",
            "[Na+].[Cl-]",
            "C[C@@H](N)C(=O)O",
            "N#N",
            "C%12CC%12",
            "F/C=C/F",
            "O=C(O)c1ccc(Br)cc1",
        ] {
            assert!(is_valid_smiles(s), "{s}");
        }
    }

    #[test]
    fn rejects_broken_strings() {
        for s in ["", "CC(", "CC)", "C1CC", "[CH3", "C==C", "=C", "C()", "Hello", "CC=", "C.", "x"] {
            assert!(!is_valid_smiles(s), "{s}");
        }
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_smiles("  \"CCO\" "), "CCO");
        assert_eq!(normalize_smiles("`c1ccccc1`"), "c1ccccc1");
        assert_eq!(normalize_smiles("CCO"), "CCO");
    }
}
