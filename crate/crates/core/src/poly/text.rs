//! The polynomial text format: `x^8+x^7+2*x^3+2*x^2+2`.
//!
//! Parsing also accepts juxtaposed coefficients (`2x^3`), minus signs,
//! whitespace and either `x` or `y` as the variable.

use crate::error::{Error, Result};

/// Renders residues (constant term first) with the highest power first.
pub fn format_prime_coeffs(coeffs: &[u32], var: char) -> String {
    let mut parts = vec![];
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        parts.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}*{mono}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

/// Parses into residues mod `p`, constant term first, trailing zeros trimmed.
pub fn parse_prime_coeffs(s: &str, p: u64) -> Result<Vec<u32>> {
    let err = |msg: &str| Error::Parse(format!("{msg} in {s:?}"));
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(err("empty polynomial"));
    }
    let mut terms: Vec<(bool, &str)> = vec![];
    let mut start = 0;
    let mut negative = false;
    let bytes = cleaned.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if (b == b'+' || b == b'-') && !(i > 0 && bytes[i - 1] == b'^') {
            if i > start {
                terms.push((negative, &cleaned[start..i]));
            } else if i > 0 {
                return Err(err("dangling sign"));
            }
            negative = b == b'-';
            start = i + 1;
        }
    }
    if start >= cleaned.len() {
        return Err(err("trailing sign"));
    }
    terms.push((negative, &cleaned[start..]));

    let mut out: Vec<u64> = vec![];
    for (neg, term) in terms {
        let (coef, exp) = parse_term(term).ok_or_else(|| err(&format!("bad term {term:?}")))?;
        if out.len() <= exp {
            out.resize(exp + 1, 0);
        }
        let c = (coef % p as u128) as u64;
        let c = if neg { (p - c) % p } else { c };
        out[exp] = (out[exp] + c) % p;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    Ok(out.into_iter().map(|c| c as u32).collect())
}

fn parse_term(t: &str) -> Option<(u128, usize)> {
    let var_pos = t.find(['x', 'y']);
    match var_pos {
        None => Some((t.parse().ok()?, 0)),
        Some(pos) => {
            let coef_part = t[..pos].trim_end_matches('*');
            let coef = if coef_part.is_empty() {
                1
            } else {
                coef_part.parse().ok()?
            };
            let rest = &t[pos + 1..];
            let exp = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^')?.parse().ok()?
            };
            Some((coef, exp))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_compact_style() {
        let a = parse_prime_coeffs("x^8+x^7+2x^3+2x^2+2", 3).unwrap();
        assert_eq!(format_prime_coeffs(&a, 'x'), "x^8+x^7+2*x^3+2*x^2+2");
        let b = parse_prime_coeffs("x^8+x^4-1", 3).unwrap();
        assert_eq!(format_prime_coeffs(&b, 'x'), "x^8+x^4+2");
        let c = parse_prime_coeffs("  y^2 + 2 * y ", 5).unwrap();
        assert_eq!(c, vec![0, 2, 1]);
        assert_eq!(parse_prime_coeffs("x^2-x^2", 3).unwrap(), Vec::<u32>::new());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_prime_coeffs("", 3).is_err());
        assert!(parse_prime_coeffs("x^", 3).is_err());
        assert!(parse_prime_coeffs("x+", 3).is_err());
        assert!(parse_prime_coeffs("3q", 3).is_err());
    }
}
