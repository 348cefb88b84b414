//! Single-file model container.
//!
//! Layout (little-endian):
//! magic (4 bytes) | format_version u32 | metadata-length u32 |
//! metadata (UTF-8 JSON) | per block: payload-length u32 + payload bytes +
//! extra u32 | crc32 over all prior bytes.
//!
//! The Zest model uses magic "ZEST" with one block per dictionary (the
//! extra word holds the empty-string baseline). The baseline models reuse
//! the framing with their own magics.

use crate::error::{Result, ZestError};

pub const FORMAT_VERSION: u32 = 1;

pub const MAGIC_ZEST: [u8; 4] = *b"ZEST";
pub const MAGIC_NGRAM: [u8; 4] = *b"ZNGR";
pub const MAGIC_BOW: [u8; 4] = *b"ZNBW";
pub const MAGIC_CONCAT: [u8; 4] = *b"ZCAT";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub payload: Vec<u8>,
    pub extra: u32,
}

pub fn write_container(magic: [u8; 4], metadata: &[u8], blocks: &[Block]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(
        16 + metadata.len() + blocks.iter().map(|b| b.payload.len() + 8).sum::<usize>(),
    );
    out.extend_from_slice(&magic);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&u32::try_from(metadata.len()).map_err(too_large)?.to_le_bytes());
    out.extend_from_slice(metadata);
    for block in blocks {
        out.extend_from_slice(&u32::try_from(block.payload.len()).map_err(too_large)?.to_le_bytes());
        out.extend_from_slice(&block.payload);
        out.extend_from_slice(&block.extra.to_le_bytes());
    }
    let checksum = crc32fast::hash(&out);
    out.extend_from_slice(&checksum.to_le_bytes());
    Ok(out)
}

pub fn read_container(bytes: &[u8], magic: [u8; 4]) -> Result<(Vec<u8>, Vec<Block>)> {
    if bytes.len() < 16 {
        return Err(ZestError::Format("file too short for container header".into()));
    }
    let (body, checksum_bytes) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(checksum_bytes.try_into().unwrap());
    if crc32fast::hash(body) != stored {
        return Err(ZestError::Format("container checksum mismatch".into()));
    }
    if body[0..4] != magic {
        return Err(ZestError::Format(format!(
            "bad magic: expected {:?}, found {:?}",
            String::from_utf8_lossy(&magic),
            String::from_utf8_lossy(&body[0..4])
        )));
    }
    let version = read_u32(body, 4)?;
    if version != FORMAT_VERSION {
        return Err(ZestError::Format(format!(
            "unsupported format version {version} (expected {FORMAT_VERSION})"
        )));
    }
    let metadata_len = read_u32(body, 8)? as usize;
    let mut cursor = 12;
    let metadata = read_slice(body, &mut cursor, metadata_len)?.to_vec();

    let mut blocks = Vec::new();
    while cursor < body.len() {
        let payload_len = read_u32(body, cursor)? as usize;
        cursor += 4;
        let payload = read_slice(body, &mut cursor, payload_len)?.to_vec();
        let extra = read_u32(body, cursor)?;
        cursor += 4;
        blocks.push(Block { payload, extra });
    }
    Ok((metadata, blocks))
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
        .ok_or_else(|| ZestError::Format("container truncated".into()))
}

fn read_slice<'a>(bytes: &'a [u8], cursor: &mut usize, len: usize) -> Result<&'a [u8]> {
    let slice = bytes
        .get(*cursor..*cursor + len)
        .ok_or_else(|| ZestError::Format("container truncated".into()))?;
    *cursor += len;
    Ok(slice)
}

fn too_large(_: std::num::TryFromIntError) -> ZestError {
    ZestError::Format("container section exceeds u32 length".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<u8> {
        write_container(
            MAGIC_ZEST,
            br#"{"k":1}"#,
            &[
                Block { payload: vec![1, 2, 3], extra: 9 },
                Block { payload: vec![], extra: 0 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn round_trips() {
        let bytes = sample();
        let (metadata, blocks) = read_container(&bytes, MAGIC_ZEST).unwrap();
        assert_eq!(metadata, br#"{"k":1}"#);
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].payload, vec![1, 2, 3]);
        assert_eq!(blocks[0].extra, 9);
    }

    #[test]
    fn rejects_wrong_magic() {
        let bytes = sample();
        assert!(matches!(
            read_container(&bytes, MAGIC_BOW),
            Err(ZestError::Format(_))
        ));
    }

    #[test]
    fn rejects_truncation() {
        let bytes = sample();
        for cut in [1, 5, bytes.len() - 1] {
            assert!(matches!(
                read_container(&bytes[..cut], MAGIC_ZEST),
                Err(ZestError::Format(_))
            ));
        }
    }

    #[test]
    fn rejects_corruption() {
        let mut bytes = sample();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0xff;
        assert!(matches!(
            read_container(&bytes, MAGIC_ZEST),
            Err(ZestError::Format(_))
        ));
    }
}
