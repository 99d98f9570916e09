use std::fs;
use std::path::Path;

use super::{Detector, DetectorParams};
use crate::error::Result;
use crate::model_io::{Reader, Writer};

pub const MAGIC: &[u8; 4] = b"WSD1";

pub fn write_detector(model: &Detector) -> Vec<u8> {
    let p = &model.params;
    Writer::new(MAGIC, &[p.vocab_size(), p.emb_size(), p.cell_size()])
        .params(p)
        .vocab(&model.vocab)
}

pub fn read_detector(bytes: &[u8]) -> Result<Detector> {
    let mut r = Reader::new(bytes, MAGIC)?;
    let (vocab, emb, cell) = (r.dim()?, r.dim()?, r.dim()?);
    let params = r.params(DetectorParams::init(0, vocab, emb, cell)?)?;
    let vocab = r.vocab(vocab)?;
    Detector::new(vocab, params)
}

pub fn save_detector(model: &Detector, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_detector(model))?;
    Ok(())
}

pub fn load_detector(path: impl AsRef<Path>) -> Result<Detector> {
    read_detector(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;

    #[test]
    fn round_trip_and_magic() {
        let vocab = Vocabulary::from_tokens(["x", "y"].map(String::from));
        let d = Detector::new(vocab, DetectorParams::init(5, 6, 3, 2).unwrap()).unwrap();
        let bytes = write_detector(&d);
        assert_eq!(&bytes[..4], b"WSD1");
        assert_eq!(read_detector(&bytes).unwrap(), d);
        assert!(crate::seq2seq::read_corruptor(&bytes).is_err());
    }
}
