/// Bumped whenever [`tokenize`] changes behaviour; stored in index files.
pub const TOKENIZER_VERSION: u32 = 1;

const POSSESSIVE: &str = "'s";

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Lowercases `text` and splits it into word tokens.
///
/// Maximal runs of letters and digits are tokens. A possessive `'s` directly
/// after a word becomes its own token `'s`. Everything else, hyphens
/// included, separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut word = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphanumeric() {
            word.extend(c.to_lowercase());
            i += 1;
            continue;
        }
        let possessive = !word.is_empty()
            && is_apostrophe(c)
            && matches!(chars.get(i + 1), Some('s' | 'S'))
            && !chars.get(i + 2).is_some_and(|c| c.is_alphanumeric());
        if !word.is_empty() {
            tokens.push(std::mem::take(&mut word));
        }
        if possessive {
            tokens.push(POSSESSIVE.to_string());
            i += 2;
        } else {
            i += 1;
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

/// True if `token` could have been produced by [`tokenize`].
pub(crate) fn is_token(token: &str) -> bool {
    token == POSSESSIVE
        || (!token.is_empty()
            && token
                .chars()
                .all(|c| c.is_alphanumeric() && c.to_lowercase().eq(std::iter::once(c))))
}
