//! Deterministic gzip compression and the quantities derived from it: the
//! sysRatio of a system file and the estimated algorithmic complexity of a
//! bit sequence.
//!
//! The container is written by hand so that every header byte is fixed:
//! no file name, mtime 0, OS byte 0, XFL 2 (maximum compression). The DEFLATE
//! body comes from zlib at level 9, statically built from sources pinned
//! through `libz-sys`.

use std::ffi::CStr;
use std::io::{Read, Write};
use std::sync::OnceLock;

use flate2::read::DeflateDecoder;
use flate2::write::DeflateEncoder;
use flate2::Compression;
use sha2::{Digest, Sha256};

use crate::bitseq::BitSequence;
use crate::error::{Error, Result};

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];
const METHOD_DEFLATE: u8 = 8;
const XFL_MAX_COMPRESSION: u8 = 2;
const HEADER_LEN: usize = 10;
const TRAILER_LEN: usize = 8;

pub const COMPRESSION_LEVEL: u32 = 9;

/// Version string of the linked zlib.
pub fn zlib_version() -> &'static str {
    // SAFETY: zlibVersion returns a pointer to a static NUL-terminated string.
    unsafe { CStr::from_ptr(libz_sys::zlibVersion()) }
        .to_str()
        .unwrap_or("unknown")
}

fn deflate(data: &[u8]) -> Vec<u8> {
    let mut enc = DeflateEncoder::new(Vec::new(), Compression::new(COMPRESSION_LEVEL));
    enc.write_all(data).expect("writing to a Vec cannot fail");
    enc.finish().expect("writing to a Vec cannot fail")
}

/// Anything that turns bytes into a compressed stream. The oracle suite takes
/// a `&dyn Compressor` so faulty implementations can be checked against it.
pub trait Compressor: Sync {
    fn compress(&self, data: &[u8]) -> Vec<u8>;

    fn compress_len(&self, data: &[u8]) -> usize {
        self.compress(data).len()
    }
}

/// Gzip container around a level-9 DEFLATE stream, with all variable header
/// fields zeroed.
#[derive(Debug, Clone, Copy, Default)]
pub struct Gzip;

impl Compressor for Gzip {
    fn compress(&self, data: &[u8]) -> Vec<u8> {
        let body = deflate(data);
        let mut out = Vec::with_capacity(HEADER_LEN + body.len() + TRAILER_LEN);
        out.extend_from_slice(&GZIP_MAGIC);
        out.push(METHOD_DEFLATE);
        out.push(0); // flags
        out.extend_from_slice(&[0; 4]); // mtime
        out.push(XFL_MAX_COMPRESSION);
        out.push(0); // OS
        out.extend_from_slice(&body);
        out.extend_from_slice(&crc32fast::hash(data).to_le_bytes());
        out.extend_from_slice(&(data.len() as u32).to_le_bytes());
        out
    }
}

/// Inverse of [`Gzip::compress`]. Only the header layout that `Gzip` writes
/// (no optional fields) is accepted.
pub fn gunzip(stream: &[u8]) -> Result<Vec<u8>> {
    let bad = |msg: &str| Error::MalformedStream(msg.to_string());
    if stream.len() < HEADER_LEN + TRAILER_LEN {
        return Err(bad("shorter than header and trailer"));
    }
    if stream[..2] != GZIP_MAGIC || stream[2] != METHOD_DEFLATE {
        return Err(bad("bad magic or method"));
    }
    if stream[3] != 0 {
        return Err(bad("optional header fields are not supported"));
    }
    let body = &stream[HEADER_LEN..stream.len() - TRAILER_LEN];
    let mut data = Vec::new();
    DeflateDecoder::new(body)
        .read_to_end(&mut data)
        .map_err(|e| bad(&format!("inflate failed: {e}")))?;
    let trailer = &stream[stream.len() - TRAILER_LEN..];
    let crc = u32::from_le_bytes(trailer[..4].try_into().unwrap());
    let size = u32::from_le_bytes(trailer[4..].try_into().unwrap());
    if crc != crc32fast::hash(&data) {
        return Err(bad("crc mismatch"));
    }
    if size != data.len() as u32 {
        return Err(bad("size mismatch"));
    }
    Ok(data)
}

/// Length in bytes of the gzip stream of `data`, container included.
pub fn compress_len(data: &[u8]) -> usize {
    Gzip.compress_len(data)
}

/// Compressed length of empty input: the fixed cost of the container plus an
/// empty DEFLATE block.
pub fn container_overhead() -> usize {
    static OVERHEAD: OnceLock<usize> = OnceLock::new();
    *OVERHEAD.get_or_init(|| compress_len(&[]))
}

/// Hex SHA-256 of the compressed stream.
pub fn compressed_digest(compressor: &dyn Compressor, data: &[u8]) -> String {
    Sha256::digest(compressor.compress(data))
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityMetrics {
    pub uncompressed_len: usize,
    pub compressed_len: usize,
    pub ratio: f64,
}

impl ComplexityMetrics {
    /// Measures `data`. With `overhead_correction` the container overhead is
    /// subtracted from the compressed length before taking the ratio.
    pub fn measure(data: &[u8], overhead_correction: bool) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptySystem);
        }
        let compressed_len = compress_len(data);
        let numerator = if overhead_correction {
            compressed_len.saturating_sub(container_overhead())
        } else {
            compressed_len
        };
        Ok(Self {
            uncompressed_len: data.len(),
            compressed_len,
            ratio: numerator as f64 / data.len() as f64,
        })
    }
}

/// sysRatio: compressed over uncompressed length of a system file.
pub fn sys_ratio(system: &[u8], overhead_correction: bool) -> Result<f64> {
    ComplexityMetrics::measure(system, overhead_correction).map(|m| m.ratio)
}

/// Compressed length of the ASCII form of `seq`, used as an estimate of its
/// algorithmic complexity.
pub fn algorithmic_complexity(seq: &BitSequence) -> usize {
    compress_len(&seq.to_ascii_bytes())
}
