use std::fs;
use std::path::Path;

use super::{Corruptor, Dims, Seq2SeqParams};
use crate::error::Result;
use crate::model_io::{Reader, Writer};

pub const MAGIC: &[u8; 4] = b"WSM1";

pub fn write_corruptor(model: &Corruptor) -> Vec<u8> {
    let d = model.params.dims;
    Writer::new(MAGIC, &[d.vocab, d.emb, d.cell])
        .params(&model.params)
        .vocab(&model.vocab)
}

pub fn read_corruptor(bytes: &[u8]) -> Result<Corruptor> {
    let mut r = Reader::new(bytes, MAGIC)?;
    let dims = Dims {
        vocab: r.dim()?,
        emb: r.dim()?,
        cell: r.dim()?,
    };
    let params = r.params(Seq2SeqParams::init(0, dims)?)?;
    let vocab = r.vocab(dims.vocab)?;
    Corruptor::new(vocab, params)
}

pub fn save_corruptor(model: &Corruptor, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_corruptor(model))?;
    Ok(())
}

pub fn load_corruptor(path: impl AsRef<Path>) -> Result<Corruptor> {
    read_corruptor(&fs::read(path)?)
}
