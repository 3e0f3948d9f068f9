//! Rule-based sentence splitting.
//!
//! A boundary follows `.`, `!` or `?` (plus any closing quotes or brackets)
//! when whitespace comes next and the following text does not start with a
//! lowercase letter. A period ending a known abbreviation is never a
//! boundary. Decimal points never qualify because no whitespace follows.

use std::collections::HashSet;

const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "Sr.", "Jr.", "St.", "Gen.", "Gov.", "Sen.", "Rep.",
    "Lt.", "Col.", "Capt.", "Sgt.", "Cmdr.", "Adm.", "Rev.", "Hon.", "Pres.", "Inc.", "Corp.",
    "Co.", "Ltd.", "Bros.", "No.", "Nos.", "Jan.", "Feb.", "Mar.", "Apr.", "Aug.", "Sept.",
    "Sep.", "Oct.", "Nov.", "Dec.", "U.S.", "U.K.", "U.N.", "E.U.", "D.C.", "a.m.", "p.m.",
    "vs.", "v.", "e.g.", "i.e.", "Ft.", "Mt.", "Ave.", "Blvd.",
];

const CLOSERS: [char; 6] = ['"', '\'', ')', ']', '\u{201D}', '\u{2019}'];
const OPENERS: [char; 6] = ['"', '\'', '(', '[', '\u{201C}', '\u{2018}'];

#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
}

impl Default for Segmenter {
    /// Common English titles, months and acronyms, plus single capital initials.
    fn default() -> Self {
        let mut abbreviations: HashSet<String> =
            DEFAULT_ABBREVIATIONS.iter().map(|s| s.to_string()).collect();
        abbreviations.extend(('A'..='Z').map(|c| format!("{c}.")));
        Segmenter { abbreviations }
    }
}

impl Segmenter {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Segmenter {
            abbreviations: abbreviations.into_iter().map(Into::into).collect(),
        }
    }

    /// Sentences of `paragraph`, trimmed. Only whitespace between them is lost.
    pub fn segment(&self, paragraph: &str) -> Vec<String> {
        let mut sentences = Vec::new();
        let mut start = 0;
        for end in self.boundaries(paragraph) {
            push_trimmed(&mut sentences, &paragraph[start..end]);
            start = end;
        }
        push_trimmed(&mut sentences, &paragraph[start..]);
        sentences
    }

    fn boundaries(&self, text: &str) -> Vec<usize> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if !matches!(c, '.' | '!' | '?') {
                i += 1;
                continue;
            }
            // swallow runs like "?!" or "..." and closing punctuation
            let mut j = i + 1;
            while j < chars.len() && (matches!(chars[j].1, '.' | '!' | '?') || CLOSERS.contains(&chars[j].1)) {
                j += 1;
            }
            let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
            if j >= chars.len() || !chars[j].1.is_whitespace() {
                i = j;
                continue;
            }
            let next = chars[j..]
                .iter()
                .map(|&(_, ch)| ch)
                .find(|ch| !ch.is_whitespace() && !OPENERS.contains(ch));
            let lowercase_next = next.is_some_and(char::is_lowercase);
            let abbreviation = c == '.' && j == i + 1 && self.is_abbreviation(&text[..pos + 1]);
            if !lowercase_next && !abbreviation {
                out.push(end);
            }
            i = j;
        }
        out
    }

    fn is_abbreviation(&self, upto_period: &str) -> bool {
        let word_start = upto_period
            .rfind(char::is_whitespace)
            .map_or(0, |p| p + upto_period[p..].chars().next().map_or(1, char::len_utf8));
        let word = upto_period[word_start..].trim_start_matches(OPENERS);
        self.abbreviations.contains(word)
    }
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
}

/// Split with the default abbreviation list.
pub fn segment_sentences(paragraph: &str) -> Vec<String> {
    Segmenter::default().segment(paragraph)
}
