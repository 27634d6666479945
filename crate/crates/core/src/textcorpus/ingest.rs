use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use walkdir::WalkDir;

use super::{tokenize, CorpusError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: u32,
    pub tokens: Vec<String>,
}

impl Document {
    pub fn new(id: u32, tokens: Vec<String>) -> Self {
        Document { id, tokens }
    }
}

/// How files are cut into documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DocMode {
    /// Every file is one document.
    #[default]
    FilePerDoc,
    /// Documents are blocks of non-blank lines separated by blank lines.
    BlankLine,
}

impl FromStr for DocMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "file" => Ok(DocMode::FilePerDoc),
            "blankline" => Ok(DocMode::BlankLine),
            other => Err(format!("unknown document mode {other:?} (expected file|blankline)")),
        }
    }
}

/// Reads the given files and directories (recursively, in sorted path order)
/// and returns documents with dense ids in ingestion order.
pub fn ingest<P: AsRef<Path>>(sources: &[P], mode: DocMode) -> Result<Vec<Document>, CorpusError> {
    let mut files = Vec::new();
    for source in sources {
        collect_files(source.as_ref(), &mut files)?;
    }

    let mut docs = Vec::new();
    for path in files {
        let bytes = fs::read(&path).map_err(|source| CorpusError::Unreadable {
            path: path.clone(),
            source,
        })?;
        let text = std::str::from_utf8(&bytes).map_err(|e| CorpusError::Encoding {
            path: path.clone(),
            offset: e.valid_up_to(),
        })?;
        match mode {
            DocMode::FilePerDoc => push_doc(&mut docs, tokenize(text))?,
            DocMode::BlankLine => {
                for block in blocks(text) {
                    push_doc(&mut docs, tokenize(&block))?;
                }
            }
        }
    }
    if docs.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    Ok(docs)
}

fn push_doc(docs: &mut Vec<Document>, tokens: Vec<String>) -> Result<(), CorpusError> {
    let id = u32::try_from(docs.len()).map_err(|_| CorpusError::TooLarge)?;
    docs.push(Document::new(id, tokens));
    Ok(())
}

fn collect_files(source: &Path, out: &mut Vec<PathBuf>) -> Result<(), CorpusError> {
    let meta = fs::metadata(source).map_err(|e| CorpusError::Unreadable {
        path: source.to_path_buf(),
        source: e,
    })?;
    if meta.is_file() {
        out.push(source.to_path_buf());
        return Ok(());
    }
    for entry in WalkDir::new(source).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(source).to_path_buf();
            CorpusError::Unreadable { path, source: e.into() }
        })?;
        if entry.file_type().is_file() {
            out.push(entry.into_path());
        }
    }
    Ok(())
}

fn blocks(text: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current = String::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
        } else {
            current.push_str(line);
            current.push('\n');
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    blocks
}
