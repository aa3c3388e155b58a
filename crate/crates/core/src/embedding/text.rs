//! Label preprocessing: compound splitting, case folding, abbreviation
//! expansion.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TextPrepConfig {
    pub split_compounds: bool,
    pub lowercase: bool,
    /// Token → expansion phrase. Keys match case-insensitively.
    pub abbreviations: BTreeMap<String, String>,
}

impl Default for TextPrepConfig {
    fn default() -> Self {
        TextPrepConfig {
            split_compounds: true,
            lowercase: true,
            abbreviations: BTreeMap::new(),
        }
    }
}

impl TextPrepConfig {
    pub fn with_abbreviation(mut self, key: &str, expansion: &str) -> Self {
        self.abbreviations
            .insert(key.to_lowercase(), expansion.to_string());
        self
    }

    fn expansion(&self, token: &str) -> Option<&str> {
        let lower = token.to_lowercase();
        if let Some(e) = self.abbreviations.get(&lower) {
            return Some(e);
        }
        self.abbreviations
            .iter()
            .find(|(k, _)| k.to_lowercase() == lower)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Upper,
    Lower,
    Digit,
    OtherLetter,
}

fn class_of(c: char) -> CharClass {
    if c.is_numeric() {
        CharClass::Digit
    } else if c.is_uppercase() {
        CharClass::Upper
    } else if c.is_lowercase() {
        CharClass::Lower
    } else {
        CharClass::OtherLetter
    }
}

/// Splits one alphanumeric run at camelCase and letter/digit boundaries.
/// "POShipTo" → PO | Ship | To, "line2Total" → line | 2 | Total.
fn split_compound(chunk: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut start = 0;
    for i in 1..chars.len() {
        let prev = class_of(chars[i - 1]);
        let cur = class_of(chars[i]);
        let boundary = match (prev, cur) {
            (CharClass::Digit, c) | (c, CharClass::Digit) if c != CharClass::Digit => true,
            (CharClass::Lower, CharClass::Upper) => true,
            // end of an acronym: the last capital starts the next word
            (CharClass::Upper, CharClass::Upper) => chars
                .get(i + 1)
                .is_some_and(|&n| class_of(n) == CharClass::Lower),
            (CharClass::OtherLetter, CharClass::Upper) => true,
            _ => false,
        };
        if boundary {
            out.push(chars[start..i].iter().collect());
            start = i;
        }
    }
    if start < chars.len() {
        out.push(chars[start..].iter().collect());
    }
}

fn split_tokens(raw: &str, split_compounds: bool) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in raw.split(|c: char| !c.is_alphanumeric()) {
        if chunk.is_empty() {
            continue;
        }
        if split_compounds {
            split_compound(chunk, &mut tokens);
        } else {
            tokens.push(chunk.to_string());
        }
    }
    tokens
}

/// Turns a schema label into word tokens.
pub fn preprocess_label(raw: &str, cfg: &TextPrepConfig) -> Vec<String> {
    let mut out = Vec::new();
    for token in split_tokens(raw, cfg.split_compounds) {
        match cfg.expansion(&token) {
            Some(expansion) => {
                for t in split_tokens(expansion, cfg.split_compounds) {
                    out.push(if cfg.lowercase { t.to_lowercase() } else { t });
                }
            }
            None => out.push(if cfg.lowercase {
                token.to_lowercase()
            } else {
                token
            }),
        }
    }
    out.retain(|t| !t.is_empty());
    out
}
