//! Little-endian byte writer/reader shared by the genome and checkpoint formats.

use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub struct ByteWriter {
    buf: Vec<u8>,
}

impl ByteWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn raw(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.raw(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.raw(&v.to_le_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    pub fn len_prefixed(&mut self, n: usize) {
        self.u32(u32::try_from(n).expect("collection too large to encode"));
    }

    pub fn string(&mut self, s: &str) {
        self.len_prefixed(s.len());
        self.raw(s.as_bytes());
    }

    pub fn f64s(&mut self, values: &[f64]) {
        self.len_prefixed(values.len());
        for &v in values {
            self.f64(v);
        }
    }
}

#[derive(Debug)]
pub struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn raw(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let out = &self.buf[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(Error::Decode(format!(
                "unexpected end of input at byte {} (needed {n} more)",
                self.pos
            ))),
        }
    }

    pub fn expect_magic(&mut self, magic: &[u8]) -> Result<()> {
        let got = self.raw(magic.len())?;
        if got != magic {
            return Err(Error::Decode(format!(
                "bad magic header: expected {:?}",
                String::from_utf8_lossy(magic)
            )));
        }
        Ok(())
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.raw(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.raw(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.raw(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    /// Reads a length prefix, rejecting counts that cannot fit in the
    /// remaining input at `min_item_size` bytes per item.
    pub fn len_prefixed(&mut self, min_item_size: usize) -> Result<usize> {
        let n = self.u32()? as usize;
        if n.saturating_mul(min_item_size) > self.remaining() {
            return Err(Error::Decode(format!(
                "length {n} at byte {} exceeds remaining input",
                self.pos - 4
            )));
        }
        Ok(n)
    }

    pub fn string(&mut self) -> Result<String> {
        let n = self.len_prefixed(1)?;
        let bytes = self.raw(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|e| Error::Decode(e.to_string()))
    }

    pub fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.len_prefixed(8)?;
        (0..n).map(|_| self.f64()).collect()
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn finish(self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(Error::Decode(format!(
                "{} trailing bytes after payload",
                self.remaining()
            )));
        }
        Ok(())
    }
}
