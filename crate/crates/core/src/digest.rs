use sha2::{Digest, Sha256};

/// Hex-encoded SHA-256, truncated to 16 bytes.
pub(crate) fn short_hex<B: AsRef<[u8]>>(bytes: B) -> String {
    let full = Sha256::digest(bytes.as_ref());
    hex::encode(&full[..16])
}

pub(crate) struct Hasher(Sha256);

impl Hasher {
    pub(crate) fn new() -> Self {
        Hasher(Sha256::new())
    }

    pub(crate) fn update<B: AsRef<[u8]>>(&mut self, bytes: B) {
        self.0.update(bytes.as_ref());
    }

    pub(crate) fn finish_short(self) -> String {
        let full = self.0.finalize();
        hex::encode(&full[..16])
    }
}
