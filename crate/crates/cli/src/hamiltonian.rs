//! Plain-text Hamiltonian files.
//!
//! ```text
//! # sigma_z (x) sigma_z
//! 2
//! 1 0 0 0
//! 0 -1 0 0
//! 0 0 -1 0
//! 0 0 0 1
//! ```
//!
//! Line 1 (after comments) is d, followed by d² rows of d² entries. An
//! entry is `re`, `re+imj`, `re-imj` or `imj`. `#` starts a comment.

use nalgebra::Complex;
use purify::linalg::CMatrix;

use crate::CliError;

fn parse_error(line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { line, message: message.into() }
}

/// Parses one matrix entry.
pub fn parse_entry(s: &str) -> Option<Complex<f64>> {
    let Some(body) = s.strip_suffix('j') else {
        return s.parse().ok().map(|re| Complex::new(re, 0.0));
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re: f64 = body[..i].parse().ok()?;
            let im = parse_imag(&body[i..])?;
            Some(Complex::new(re, im))
        }
        None => Some(Complex::new(0.0, parse_imag(body)?)),
    }
}

fn parse_imag(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => s.parse().ok(),
    }
}

/// Returns d and the d²×d² matrix.
pub fn parse_hamiltonian(text: &str) -> Result<(usize, CMatrix), CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, first) = lines.next().ok_or_else(|| parse_error(1, "empty file, expected the local dimension d"))?;
    let d: usize = first
        .parse()
        .map_err(|_| parse_error(line, format!("expected an integer local dimension, found '{first}'")))?;
    if d < 2 {
        return Err(parse_error(line, format!("local dimension d = {d} must be >= 2")));
    }
    let n = d * d;
    let mut m = CMatrix::zeros(n, n);
    let mut last = line;
    for row in 0..n {
        let (line, text) = lines
            .next()
            .ok_or_else(|| parse_error(last + 1, format!("expected {n} matrix rows, found {row}")))?;
        last = line;
        let entries: Vec<&str> = text.split_whitespace().collect();
        if entries.len() != n {
            return Err(parse_error(line, format!("expected {n} entries, found {}", entries.len())));
        }
        for (col, e) in entries.iter().enumerate() {
            let z = parse_entry(e).ok_or_else(|| parse_error(line, format!("cannot parse entry '{e}'")))?;
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(parse_error(line, format!("entry '{e}' is not finite")));
            }
            m[(row, col)] = z;
        }
    }
    if let Some((line, _)) = lines.next() {
        return Err(parse_error(line, format!("unexpected content after the {n} matrix rows")));
    }
    Ok((d, m))
}
