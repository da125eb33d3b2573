//! Length-prefixed canonical byte encoding fed to SHA-256 for rule ids,
//! transaction ids, block hashes and state roots.

use sha2::{Digest, Sha256};

#[derive(Debug, Default, Clone)]
pub struct Canon {
    buf: Vec<u8>,
}

impl Canon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn bool(&mut self, v: bool) -> &mut Self {
        self.buf.push(v as u8);
        self
    }

    pub fn bytes(&mut self, v: &[u8]) -> &mut Self {
        self.u64(v.len() as u64);
        self.buf.extend_from_slice(v);
        self
    }

    pub fn str(&mut self, v: &str) -> &mut Self {
        self.bytes(v.as_bytes())
    }

    /// Absent values encode as a 0 tag, present ones as 1 followed by the value.
    pub fn opt_u64(&mut self, v: Option<u64>) -> &mut Self {
        match v {
            None => self.bool(false),
            Some(x) => self.bool(true).u64(x),
        }
    }

    /// A count followed by the items.
    pub fn list<T>(&mut self, items: impl ExactSizeIterator<Item = T>, mut each: impl FnMut(&mut Self, T)) -> &mut Self {
        self.u64(items.len() as u64);
        for item in items {
            each(self, item);
        }
        self
    }

    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(&self.buf).into()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_prefix_separates_fields() {
        let a = Canon::new().str("ab").str("c").digest();
        let b = Canon::new().str("a").str("bc").digest();
        assert_ne!(a, b);
    }
}
