//! Pauli-sum strings such as `"0.5*ZZ - (0.1+0.2i)*XY"`.
//!
//! Each term is `coeff "*" label`, where the label has exactly `n` letters
//! from `I X Y Z + -`, with `-` = σ⁻ = |0⟩⟨1| and `+` = σ⁺ = |1⟩⟨0|.
//! Because labels have a fixed length, a `-` after a complete label is read
//! as the sign of the next term.

use std::str::FromStr;

use dissim_core::{linalg, CMatrix, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coeff: C64,
    pub label: String,
}

pub fn parse_pauli_sum(text: &str, n: usize) -> Result<Vec<PauliTerm>, String> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err("empty Pauli string".into());
    }
    let mut terms = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let star = chars[pos..]
            .iter()
            .position(|&c| c == '*')
            .map(|p| pos + p)
            .ok_or_else(|| format!("expected `coeff * label` at {:?}", chars[pos..].iter().collect::<String>()))?;
        let coeff = parse_coeff(&chars[pos..star].iter().collect::<String>())?;
        let end = star + 1 + n;
        if end > chars.len() {
            return Err(format!("label after `*` needs {n} letters"));
        }
        let label: String = chars[star + 1..end].iter().collect();
        if let Some(bad) = label.chars().find(|c| !"IXYZ+-".contains(*c)) {
            return Err(format!("unknown Pauli letter {bad:?} in {label:?}"));
        }
        terms.push(PauliTerm { coeff, label });
        pos = end;
        if pos < chars.len() && !matches!(chars[pos], '+' | '-') {
            return Err(format!("expected `+` or `-` between terms, found {:?}", chars[pos]));
        }
    }
    Ok(terms)
}

fn parse_coeff(raw: &str) -> Result<C64, String> {
    let (sign, body) = match raw.chars().next() {
        Some('-') => (-1.0, &raw[1..]),
        Some('+') => (1.0, &raw[1..]),
        _ => (1.0, raw),
    };
    let body = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')).unwrap_or(body);
    if body.is_empty() {
        return Err(format!("missing coefficient in {raw:?}"));
    }
    let value = C64::from_str(&body.replace('j', "i")).map_err(|_| format!("bad coefficient {raw:?}"))?;
    Ok(value * sign)
}

/// Dense matrix of a Pauli sum over `n` qubits.
pub fn pauli_sum_matrix(terms: &[PauliTerm], n: usize) -> CMatrix {
    let dim = 1usize << n;
    let mut out = linalg::zeros(dim);
    for term in terms {
        let mut m = CMatrix::identity(1, 1);
        for c in term.label.chars() {
            m = linalg::kron(&m, &linalg::pauli(c).expect("letters validated"));
        }
        out += m * term.coeff;
    }
    out
}
