/// Placeholder tokens that are treated as single characters.
pub const PSEUDO_TOKENS: [&str; 3] = ["NUMBER", "WORD", "PADDING"];

pub const NUMBER: &str = "NUMBER";
pub const WORD: &str = "WORD";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NormalizeMode {
    #[default]
    None,
    /// Digit runs become `NUMBER`, Latin letter runs become `WORD`.
    Segmentation,
}

fn is_digit(c: char) -> bool {
    c.is_ascii_digit() || ('０'..='９').contains(&c)
}

fn is_latin(c: char) -> bool {
    c.is_ascii_alphabetic() || ('Ａ'..='Ｚ').contains(&c) || ('ａ'..='ｚ').contains(&c)
}

#[derive(PartialEq, Clone, Copy)]
enum Class {
    Digit,
    Latin,
    Other,
}

fn class(c: char) -> Class {
    if is_digit(c) {
        Class::Digit
    } else if is_latin(c) {
        Class::Latin
    } else {
        Class::Other
    }
}

/// Splits a raw token into segmentation units without rewriting them.
///
/// Maximal digit runs and maximal Latin letter runs are single units (a run
/// that spells pseudo tokens is split into them); every other character is
/// its own unit.
pub fn raw_units(raw: &str) -> Vec<String> {
    let mut units = Vec::new();
    let chars: Vec<char> = raw.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let cls = class(chars[i]);
        if cls == Class::Other {
            units.push(chars[i].to_string());
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && class(chars[i]) == cls {
            i += 1;
        }
        let run: String = chars[start..i].iter().collect();
        match (cls, split_pseudo(&run)) {
            (Class::Latin, Some(parts)) => units.extend(parts.into_iter().map(str::to_string)),
            _ => units.push(run),
        }
    }
    units
}

/// Normalized form of one unit from [`raw_units`].
pub fn normalize_unit(unit: &str) -> String {
    match unit.chars().next().map(class) {
        Some(Class::Digit) => NUMBER.to_string(),
        Some(Class::Latin) if !PSEUDO_TOKENS.contains(&unit) => WORD.to_string(),
        _ => unit.to_string(),
    }
}

/// Splits a raw token into normalized segmentation units.
///
/// Digit runs map to `NUMBER`, Latin letter runs map to `WORD` (a run that
/// already spells a pseudo token is kept), and every other character is its
/// own unit.
pub fn normalized_units(raw: &str) -> Vec<String> {
    raw_units(raw).iter().map(|u| normalize_unit(u)).collect()
}

/// Splits a letter run into pseudo tokens if it consists only of them.
fn split_pseudo(run: &str) -> Option<Vec<&'static str>> {
    let mut rest = run;
    let mut parts = Vec::new();
    while !rest.is_empty() {
        let p = PSEUDO_TOKENS.iter().find(|p| rest.starts_with(*p))?;
        parts.push(*p);
        rest = &rest[p.len()..];
    }
    Some(parts)
}

pub fn normalize_token(raw: &str, mode: NormalizeMode) -> String {
    match mode {
        NormalizeMode::None => raw.to_string(),
        NormalizeMode::Segmentation => normalized_units(raw).concat(),
    }
}

/// Splits a word into its characters.
///
/// Latin runs that spell a pseudo token (`NUMBER`, `WORD`, `PADDING`) stay
/// atomic. Concatenating the result always reproduces the input.
pub fn decompose_word(word: &str) -> Vec<String> {
    let chars: Vec<char> = word.chars().collect();
    let mut out = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            let run: String = chars[start..i].iter().collect();
            match split_pseudo(&run) {
                Some(parts) => out.extend(parts.into_iter().map(str::to_string)),
                None => out.extend(run.chars().map(String::from)),
            }
            continue;
        }
        out.push(chars[i].to_string());
        i += 1;
    }
    out
}
