use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    Textual,
    Numeric,
    Mixed,
    Empty,
}

/// Plain decimal literal: optional sign, digits, at most one decimal point.
/// Thousands separators and exponents are not numbers here.
pub fn is_decimal_number(value: &str) -> bool {
    let body = value
        .strip_prefix('+')
        .or_else(|| value.strip_prefix('-'))
        .unwrap_or(value);
    let mut digits = 0usize;
    let mut points = 0usize;
    for c in body.chars() {
        match c {
            '0'..='9' => digits += 1,
            '.' => points += 1,
            _ => return false,
        }
    }
    digits > 0 && points <= 1
}

/// Classifies a column from its instances.
///
/// Blank values are ignored. At least 90% numeric values makes the column
/// numeric, at most 10% makes it textual, anything in between is mixed.
pub fn classify_data_kind<S: AsRef<str>>(instances: &[S]) -> DataKind {
    let mut total = 0usize;
    let mut numeric = 0usize;
    for v in instances {
        let v = v.as_ref().trim();
        if v.is_empty() {
            continue;
        }
        total += 1;
        if is_decimal_number(v) {
            numeric += 1;
        }
    }
    if total == 0 {
        return DataKind::Empty;
    }
    // integer comparisons avoid rounding at the boundaries
    if numeric * 10 >= total * 9 {
        DataKind::Numeric
    } else if numeric * 10 <= total {
        DataKind::Textual
    } else {
        DataKind::Mixed
    }
}
