//! Little-endian binary model files.
//!
//! Layout: 4-byte magic, `u64` dimension header, every tensor row-major as
//! `f64`, then the vocabulary (`u64` count of non-reserved tokens, each as a
//! `u32` byte length followed by UTF-8 bytes).

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::optim::ParamSet;

pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new(magic: &[u8; 4], dims: &[usize]) -> Self {
        let mut buf = magic.to_vec();
        for &d in dims {
            buf.extend_from_slice(&(d as u64).to_le_bytes());
        }
        Writer { buf }
    }

    pub fn params(mut self, params: &impl ParamSet) -> Self {
        for t in params.tensors() {
            for x in t {
                self.buf.extend_from_slice(&x.to_le_bytes());
            }
        }
        self
    }

    pub fn vocab(mut self, vocab: &Vocabulary) -> Vec<u8> {
        let tokens = vocab.tokens();
        self.buf.extend_from_slice(&(tokens.len() as u64).to_le_bytes());
        for t in tokens {
            self.buf.extend_from_slice(&(t.len() as u32).to_le_bytes());
            self.buf.extend_from_slice(t.as_bytes());
        }
        self.buf
    }
}

pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

fn corrupt(message: impl Into<String>) -> Error {
    Error::config(format!("invalid model file: {}", message.into()))
}

impl<'a> Reader<'a> {
    pub fn new(bytes: &'a [u8], magic: &[u8; 4]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != magic {
            return Err(corrupt(format!("expected magic {:?}", String::from_utf8_lossy(magic))));
        }
        Ok(Reader { bytes, pos: 4 })
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| corrupt("unexpected end of file"))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub fn dim(&mut self) -> Result<usize> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().unwrap());
        usize::try_from(v)
            .ok()
            .filter(|&d| d > 0 && d < (1 << 32))
            .ok_or_else(|| corrupt(format!("implausible dimension {v}")))
    }

    pub fn params<P: ParamSet>(&mut self, mut params: P) -> Result<P> {
        for t in params.tensors_mut() {
            for x in t.iter_mut() {
                *x = f64::from_le_bytes(self.take(8)?.try_into().unwrap());
            }
        }
        Ok(params)
    }

    pub fn vocab(mut self, expected_len: usize) -> Result<Vocabulary> {
        let count = u64::from_le_bytes(self.take(8)?.try_into().unwrap()) as usize;
        if count + crate::corpus::RESERVED.len() != expected_len {
            return Err(corrupt(format!(
                "vocabulary section has {count} tokens but header declares {expected_len} ids"
            )));
        }
        let mut tokens = Vec::with_capacity(count);
        for _ in 0..count {
            let len = u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize;
            let tok = std::str::from_utf8(self.take(len)?).map_err(|_| corrupt("token is not UTF-8"))?;
            tokens.push(tok.to_string());
        }
        if self.pos != self.bytes.len() {
            return Err(corrupt("trailing bytes"));
        }
        Ok(Vocabulary::from_tokens(tokens))
    }
}
