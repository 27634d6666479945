//! Binary index file.
//!
//! Layout (little endian):
//!
//! ```text
//! "RSIDX1"
//! u32 tokenizer version
//! [u8; 32] corpus fingerprint
//! u32 document count, then one u32 length per document
//! u32 term count, then per term:
//!     u32 byte length, UTF-8 bytes, u32 posting count, (u32 doc, u32 pos)*
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::index::{CorpusIndex, Fingerprint, Posting};
use super::tokenizer::{is_token, TOKENIZER_VERSION};
use super::CorpusError;

pub const INDEX_MAGIC: &[u8; 6] = b"RSIDX1";

fn put_u32<W: Write>(w: &mut W, v: u32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32, CorpusError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(truncated)?;
    Ok(u32::from_le_bytes(buf))
}

fn truncated(e: std::io::Error) -> CorpusError {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        CorpusError::Format("truncated file".into())
    } else {
        CorpusError::Io(e)
    }
}

impl CorpusIndex {
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<(), CorpusError> {
        w.write_all(INDEX_MAGIC)?;
        put_u32(w, TOKENIZER_VERSION)?;
        w.write_all(&self.fingerprint.0)?;
        put_u32(w, self.doc_lengths.len() as u32)?;
        for &len in &self.doc_lengths {
            put_u32(w, len)?;
        }
        put_u32(w, self.terms.len() as u32)?;
        for (term, list) in self.terms.iter().zip(&self.postings) {
            put_u32(w, term.len() as u32)?;
            w.write_all(term.as_bytes())?;
            put_u32(w, list.len() as u32)?;
            for p in list {
                put_u32(w, p.doc)?;
                put_u32(w, p.pos)?;
            }
        }
        Ok(())
    }

    /// Reads an index and checks it: magic, tokenizer version, dictionary
    /// order, postings order, and that the postings reconstruct a corpus with
    /// the stored fingerprint.
    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, CorpusError> {
        let mut magic = [0u8; 6];
        r.read_exact(&mut magic).map_err(truncated)?;
        if &magic != INDEX_MAGIC {
            return Err(CorpusError::Format("not a relsim index (bad magic)".into()));
        }
        let version = get_u32(r)?;
        if version != TOKENIZER_VERSION {
            return Err(CorpusError::VersionMismatch {
                found: version,
                expected: TOKENIZER_VERSION,
            });
        }
        let mut fingerprint = [0u8; 32];
        r.read_exact(&mut fingerprint).map_err(truncated)?;

        let n_docs = get_u32(r)? as usize;
        let mut doc_lengths = Vec::with_capacity(n_docs.min(1 << 20));
        for _ in 0..n_docs {
            doc_lengths.push(get_u32(r)?);
        }

        let n_terms = get_u32(r)? as usize;
        let mut terms: Vec<String> = Vec::with_capacity(n_terms.min(1 << 20));
        let mut postings = Vec::with_capacity(n_terms.min(1 << 20));
        for _ in 0..n_terms {
            let len = get_u32(r)? as usize;
            let mut bytes = vec![0u8; len];
            r.read_exact(&mut bytes).map_err(truncated)?;
            let term = String::from_utf8(bytes).map_err(|_| CorpusError::Format("term is not UTF-8".into()))?;
            if !is_token(&term) {
                return Err(CorpusError::Format(format!("invalid term {term:?}")));
            }
            if terms.last().is_some_and(|prev| *prev >= term) {
                return Err(CorpusError::Format("dictionary not sorted".into()));
            }
            let count = get_u32(r)? as usize;
            let mut list = Vec::with_capacity(count.min(1 << 20));
            for _ in 0..count {
                let p = Posting {
                    doc: get_u32(r)?,
                    pos: get_u32(r)?,
                };
                if list.last().is_some_and(|prev: &Posting| *prev >= p) {
                    return Err(CorpusError::Format(format!("postings of {term:?} not sorted")));
                }
                list.push(p);
            }
            terms.push(term);
            postings.push(list);
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(CorpusError::Format("trailing bytes".into()));
        }

        // Rebuild the token stream to verify the fingerprint.
        let mut slots: Vec<Vec<Option<usize>>> = doc_lengths.iter().map(|&n| vec![None; n as usize]).collect();
        for (term_id, list) in postings.iter().enumerate() {
            for p in list {
                let slot = slots
                    .get_mut(p.doc as usize)
                    .and_then(|d| d.get_mut(p.pos as usize))
                    .ok_or_else(|| CorpusError::Format("posting out of range".into()))?;
                if slot.replace(term_id).is_some() {
                    return Err(CorpusError::Format("position indexed twice".into()));
                }
            }
        }
        let mut docs = Vec::with_capacity(slots.len());
        for doc in &slots {
            let mut tokens = Vec::with_capacity(doc.len());
            for slot in doc {
                let id = slot.ok_or_else(|| CorpusError::Format("position not indexed".into()))?;
                tokens.push(terms[id].as_str());
            }
            docs.push(tokens);
        }
        let computed = Fingerprint::of_documents(docs);
        if computed.0 != fingerprint {
            return Err(CorpusError::Format("fingerprint does not match contents".into()));
        }

        Ok(CorpusIndex {
            terms,
            postings,
            doc_lengths,
            fingerprint: computed,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let file = File::open(path).map_err(|source| CorpusError::Unreadable {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_from(&mut BufReader::new(file))
    }
}
