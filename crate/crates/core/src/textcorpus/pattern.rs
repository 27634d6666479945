use std::fmt;

use super::tokenizer::is_token;

/// Minimum number of alphabetic characters before a trailing asterisk.
pub const PREFIX_MIN_ALPHA: usize = 3;
/// Maximum number of characters a trailing asterisk may stand for.
pub const PREFIX_MAX_EXTRA: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("empty pattern")]
    Empty,
    #[error("a standalone '*' cannot be the first or last token")]
    AnyWordAtEdge,
    #[error("prefix {0:?} needs at least 3 alphabetic characters before '*'")]
    ShortPrefix(String),
    #[error("asterisk must be a whole token or at the end of a token: {0:?}")]
    EmbeddedAsterisk(String),
    #[error("invalid literal token {0:?}")]
    BadLiteral(String),
}

/// One position of a phrase pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternToken {
    /// Exactly this token.
    Literal(String),
    /// Any single token.
    AnyWord,
    /// A token that starts with `stem` and has at most `max_extra` more
    /// characters.
    Prefix { stem: String, max_extra: usize },
}

impl PatternToken {
    pub fn literal(text: impl Into<String>) -> Result<Self, PatternError> {
        let text = text.into();
        if !is_token(&text) {
            return Err(PatternError::BadLiteral(text));
        }
        Ok(PatternToken::Literal(text))
    }

    pub fn prefix(stem: impl Into<String>) -> Result<Self, PatternError> {
        let stem = stem.into();
        let alpha = stem.chars().filter(|c| c.is_alphabetic()).count();
        if alpha < PREFIX_MIN_ALPHA || !is_token(&stem) {
            return Err(PatternError::ShortPrefix(stem));
        }
        Ok(PatternToken::Prefix {
            stem,
            max_extra: PREFIX_MAX_EXTRA,
        })
    }

    pub fn matches(&self, token: &str) -> bool {
        match self {
            PatternToken::Literal(text) => text == token,
            PatternToken::AnyWord => true,
            PatternToken::Prefix { stem, max_extra } => token
                .strip_prefix(stem.as_str())
                .is_some_and(|rest| rest.chars().count() <= *max_extra),
        }
    }
}

impl fmt::Display for PatternToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternToken::Literal(text) => f.write_str(text),
            PatternToken::AnyWord => f.write_str("*"),
            PatternToken::Prefix { stem, .. } => write!(f, "{stem}*"),
        }
    }
}

/// A validated, non-empty sequence of pattern tokens whose first and last
/// tokens are not [`PatternToken::AnyWord`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhrasePattern {
    tokens: Vec<PatternToken>,
}

impl PhrasePattern {
    pub fn new(tokens: Vec<PatternToken>) -> Result<Self, PatternError> {
        let (first, last) = match (tokens.first(), tokens.last()) {
            (Some(first), Some(last)) => (first, last),
            _ => return Err(PatternError::Empty),
        };
        if *first == PatternToken::AnyWord || *last == PatternToken::AnyWord {
            return Err(PatternError::AnyWordAtEdge);
        }
        for token in &tokens {
            match token {
                PatternToken::Literal(text) if !is_token(text) => return Err(PatternError::BadLiteral(text.clone())),
                PatternToken::Prefix { stem, .. } => {
                    PatternToken::prefix(stem.clone())?;
                }
                _ => {}
            }
        }
        Ok(PhrasePattern { tokens })
    }

    pub fn tokens(&self) -> &[PatternToken] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl fmt::Display for PhrasePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, token) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{token}")?;
        }
        Ok(())
    }
}
