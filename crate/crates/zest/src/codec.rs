//! Codec abstraction: dictionary training and header-minimized
//! compressed-size measurement.
//!
//! Only the compressed *size* of an input ever matters here; nothing is
//! ever decompressed. The default codec is zstd with a trained dictionary.
//! zstd without a dictionary, deflate, lzma and bzip2 exist for the
//! concatenation baselines.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZestError};

/// Which compressor backs a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodecId {
    ZstdDict,
    ZstdPlain,
    Deflate,
    Lzma,
    Bzip2,
}

impl CodecId {
    pub fn supports_dictionaries(self) -> bool {
        matches!(self, CodecId::ZstdDict)
    }

    pub fn name(self) -> &'static str {
        match self {
            CodecId::ZstdDict => "zstd_dict",
            CodecId::ZstdPlain => "zstd_plain",
            CodecId::Deflate => "deflate",
            CodecId::Lzma => "lzma",
            CodecId::Bzip2 => "bzip2",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "zstd_dict" | "zstd-dict" | "zstd" => Ok(CodecId::ZstdDict),
            "zstd_plain" | "zstd-plain" => Ok(CodecId::ZstdPlain),
            "deflate" | "zlib" | "gzip" => Ok(CodecId::Deflate),
            "lzma" | "xz" => Ok(CodecId::Lzma),
            "bzip2" | "bz2" => Ok(CodecId::Bzip2),
            other => Err(ZestError::UnsupportedCodec(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodecParams {
    pub codec: CodecId,
    /// Compression effort, 1-19 for zstd, mapped onto 0-9 for the others.
    pub level: i32,
    /// Suppress the checksum, content-size and dictionary-ID frame fields
    /// where the format allows, so headers do not pollute size estimates.
    pub minimize_headers: bool,
}

impl Default for CodecParams {
    fn default() -> Self {
        CodecParams {
            codec: CodecId::ZstdDict,
            level: 3,
            minimize_headers: true,
        }
    }
}

impl CodecParams {
    pub fn with_codec(codec: CodecId) -> Self {
        CodecParams {
            codec,
            ..CodecParams::default()
        }
    }

    fn zstd_level(&self) -> i32 {
        self.level.clamp(1, 19)
    }

    /// 0-9 scale used by deflate/lzma/bzip2.
    fn small_level(&self) -> u32 {
        self.level.clamp(1, 9) as u32
    }
}

/// A trained compression dictionary for one target size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dictionary {
    pub target_size: usize,
    #[serde(skip)]
    pub payload: Vec<u8>,
    pub trained_on_bytes: u64,
    /// True when the sample-based trainer failed and the payload is a raw
    /// content dictionary (concatenated samples, most recent first).
    pub fallback: bool,
}

/// Compressed size of the empty string under one (dictionary, params) pair.
/// Subtracted from every measurement so header bytes cancel out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeBaseline {
    pub empty_compressed_size: u32,
}

/// Trains a dictionary on prepared sample texts.
///
/// When the sample-based zstd trainer rejects the corpus (too few or too
/// uniform samples), falls back to a raw-content dictionary built from the
/// concatenated samples, most recent first, truncated at `target_size`.
pub fn train_dictionary<S: AsRef<str>>(
    samples: &[S],
    target_size: usize,
    params: &CodecParams,
) -> Result<Dictionary> {
    if !params.codec.supports_dictionaries() {
        return Err(ZestError::UnsupportedCodec(format!(
            "{} has no dictionary mode",
            params.codec.name()
        )));
    }
    let byte_samples: Vec<&[u8]> = samples
        .iter()
        .map(|s| s.as_ref().as_bytes())
        .filter(|b| !b.is_empty())
        .collect();
    let total: u64 = byte_samples.iter().map(|b| b.len() as u64).sum();
    if byte_samples.is_empty() || total == 0 {
        return Err(ZestError::TrainingFailed(
            "no non-empty samples to train on".to_owned(),
        ));
    }

    match zstd::dict::from_samples(&byte_samples, target_size) {
        Ok(payload) if !payload.is_empty() => Ok(Dictionary {
            target_size,
            payload,
            trained_on_bytes: total,
            fallback: false,
        }),
        _ => {
            let mut payload = Vec::with_capacity(target_size.min(total as usize));
            for sample in byte_samples.iter().rev() {
                if payload.len() >= target_size {
                    break;
                }
                let room = target_size - payload.len();
                payload.extend_from_slice(&sample[..sample.len().min(room)]);
            }
            if payload.is_empty() {
                return Err(ZestError::TrainingFailed(
                    "trainer rejected samples and fallback produced no content".to_owned(),
                ));
            }
            Ok(Dictionary {
                target_size,
                payload,
                trained_on_bytes: total,
                fallback: true,
            })
        }
    }
}

enum Backend {
    Zstd(zstd::bulk::Compressor<'static>),
    Deflate { level: u32, raw: bool },
    Lzma { level: u32, plain_check: bool },
    Bzip2 { level: u32 },
}

/// A reusable compression context. Cheap to call repeatedly; for zstd the
/// dictionary is digested once at construction. Not shareable between
/// simultaneous calls; create one per thread.
pub struct CompressContext {
    backend: Backend,
}

impl CompressContext {
    pub fn new(params: &CodecParams, dict: Option<&Dictionary>) -> Result<Self> {
        let backend = match params.codec {
            CodecId::ZstdDict | CodecId::ZstdPlain => {
                if dict.is_some() && params.codec == CodecId::ZstdPlain {
                    return Err(ZestError::UnsupportedCodec(
                        "zstd_plain does not take a dictionary".to_owned(),
                    ));
                }
                let mut compressor = match dict {
                    Some(d) => {
                        zstd::bulk::Compressor::with_dictionary(params.zstd_level(), &d.payload)?
                    }
                    None => zstd::bulk::Compressor::new(params.zstd_level())?,
                };
                use zstd::zstd_safe::CParameter;
                if params.minimize_headers {
                    compressor.set_parameter(CParameter::ChecksumFlag(false))?;
                    compressor.set_parameter(CParameter::ContentSizeFlag(false))?;
                    compressor.set_parameter(CParameter::DictIdFlag(false))?;
                }
                Backend::Zstd(compressor)
            }
            CodecId::Deflate => {
                require_no_dict(dict, CodecId::Deflate)?;
                Backend::Deflate {
                    level: params.small_level(),
                    raw: params.minimize_headers,
                }
            }
            CodecId::Lzma => {
                require_no_dict(dict, CodecId::Lzma)?;
                Backend::Lzma {
                    level: params.small_level(),
                    plain_check: params.minimize_headers,
                }
            }
            CodecId::Bzip2 => {
                require_no_dict(dict, CodecId::Bzip2)?;
                Backend::Bzip2 {
                    level: params.small_level(),
                }
            }
        };
        Ok(CompressContext { backend })
    }

    pub fn size_of(&mut self, text: &str) -> Result<usize> {
        self.size_of_bytes(text.as_bytes())
    }

    pub fn size_of_bytes(&mut self, data: &[u8]) -> Result<usize> {
        match &mut self.backend {
            Backend::Zstd(compressor) => Ok(compressor.compress(data)?.len()),
            Backend::Deflate { level, raw } => {
                let compression = flate2::Compression::new(*level);
                if *raw {
                    let mut enc = flate2::write::DeflateEncoder::new(Vec::new(), compression);
                    enc.write_all(data)?;
                    Ok(enc.finish()?.len())
                } else {
                    let mut enc = flate2::write::ZlibEncoder::new(Vec::new(), compression);
                    enc.write_all(data)?;
                    Ok(enc.finish()?.len())
                }
            }
            Backend::Lzma { level, plain_check } => {
                let check = if *plain_check {
                    xz2::stream::Check::None
                } else {
                    xz2::stream::Check::Crc64
                };
                let stream = xz2::stream::Stream::new_easy_encoder(*level, check)
                    .map_err(|e| ZestError::TrainingFailed(format!("lzma encoder: {e}")))?;
                let mut enc = xz2::write::XzEncoder::new_stream(Vec::new(), stream);
                enc.write_all(data)?;
                Ok(enc.finish()?.len())
            }
            Backend::Bzip2 { level } => {
                let mut enc =
                    bzip2::write::BzEncoder::new(Vec::new(), bzip2::Compression::new(*level));
                enc.write_all(data)?;
                Ok(enc.finish()?.len())
            }
        }
    }

    /// Measured size minus the empty-string baseline, clamped at zero.
    pub fn net_size_of(&mut self, text: &str, baseline: &SizeBaseline) -> Result<usize> {
        if text.is_empty() {
            return Ok(0);
        }
        let size = self.size_of(text)?;
        Ok(size.saturating_sub(baseline.empty_compressed_size as usize))
    }
}

fn require_no_dict(dict: Option<&Dictionary>, codec: CodecId) -> Result<()> {
    if dict.is_some() {
        Err(ZestError::UnsupportedCodec(format!(
            "{} does not take a dictionary",
            codec.name()
        )))
    } else {
        Ok(())
    }
}

/// One-shot compressed size; builds a fresh context per call.
pub fn compressed_size(
    text: &str,
    dict: Option<&Dictionary>,
    params: &CodecParams,
) -> Result<usize> {
    CompressContext::new(params, dict)?.size_of(text)
}

/// One-shot compressed size of raw bytes; builds a fresh context per call.
pub fn compressed_size_bytes(
    data: &[u8],
    dict: Option<&Dictionary>,
    params: &CodecParams,
) -> Result<usize> {
    CompressContext::new(params, dict)?.size_of_bytes(data)
}

/// Measures and stores the empty-string compressed size for a dictionary.
pub fn empty_baseline(dict: &Dictionary, params: &CodecParams) -> Result<SizeBaseline> {
    let size = compressed_size("", Some(dict), params)?;
    Ok(SizeBaseline {
        empty_compressed_size: size as u32,
    })
}

/// Header-corrected compressed size of `text` under `dict`.
pub fn net_compressed_size(
    text: &str,
    dict: &Dictionary,
    baseline: &SizeBaseline,
    params: &CodecParams,
) -> Result<usize> {
    CompressContext::new(params, Some(dict))?.net_size_of(text, baseline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn english_samples(n: usize) -> Vec<String> {
        let words = [
            "the", "quick", "brown", "fox", "jumps", "over", "lazy", "dog", "news", "market",
            "price", "report", "game", "season", "city", "team", "water", "light", "paper",
            "house",
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        (0..n)
            .map(|_| {
                (0..12)
                    .map(|_| words[rng.gen_range(0..words.len())])
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    fn word_salad(alphabet: &[char], docs: usize, seed: u64) -> Vec<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..docs)
            .map(|_| {
                (0..10)
                    .map(|_| {
                        (0..rng.gen_range(3..8))
                            .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                            .collect::<String>()
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    #[test]
    fn trains_on_english_corpus() {
        let dict =
            train_dictionary(&english_samples(1000), 16384, &CodecParams::default()).unwrap();
        assert!(!dict.fallback);
        assert!(!dict.payload.is_empty());
        assert!(dict.payload.len() <= 32768);
    }

    #[test]
    fn falls_back_on_degenerate_corpus() {
        let samples = vec!["aaaa"; 5];
        let dict = train_dictionary(&samples, 1024, &CodecParams::default()).unwrap();
        assert!(dict.fallback);
        assert_eq!(dict.payload, b"aaaaaaaaaaaaaaaaaaaa");
    }

    #[test]
    fn rejects_empty_sample_list() {
        let samples: Vec<String> = vec![];
        assert!(matches!(
            train_dictionary(&samples, 1024, &CodecParams::default()),
            Err(ZestError::TrainingFailed(_))
        ));
    }

    #[test]
    fn rejects_training_for_plain_codecs() {
        let params = CodecParams::with_codec(CodecId::Deflate);
        assert!(matches!(
            train_dictionary(&english_samples(10), 1024, &params),
            Err(ZestError::UnsupportedCodec(_))
        ));
    }

    #[test]
    fn sizes_are_deterministic() {
        let params = CodecParams::default();
        let dict = train_dictionary(&english_samples(200), 4096, &params).unwrap();
        let text = "the quick brown fox jumps over the lazy dog";
        let a = compressed_size(text, Some(&dict), &params).unwrap();
        let b = compressed_size(text, Some(&dict), &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn baseline_matches_empty_compression() {
        let params = CodecParams::default();
        let dict = train_dictionary(&english_samples(200), 4096, &params).unwrap();
        let baseline = empty_baseline(&dict, &params).unwrap();
        assert_eq!(
            compressed_size("", Some(&dict), &params).unwrap(),
            baseline.empty_compressed_size as usize
        );
    }

    #[test]
    fn net_size_of_empty_is_zero() {
        let params = CodecParams::default();
        let dict = train_dictionary(&english_samples(200), 4096, &params).unwrap();
        let baseline = empty_baseline(&dict, &params).unwrap();
        assert_eq!(net_compressed_size("", &dict, &baseline, &params).unwrap(), 0);
    }

    #[test]
    fn doubling_self_similar_text_costs_less_than_double() {
        let params = CodecParams::with_codec(CodecId::ZstdPlain);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s: String = (0..rng.gen_range(65..300))
                .map(|_| rng.gen_range(b'a'..=b'z') as char)
                .collect();
            let doubled = format!("{s}{s}");
            let single = compressed_size(&s, None, &params).unwrap();
            let double = compressed_size(&doubled, None, &params).unwrap();
            assert!(
                single >= double / 2,
                "single={single} double={double} for len {}",
                s.len()
            );
        }
    }

    #[test]
    fn repetitive_text_beats_random_bytes() {
        let params = CodecParams::with_codec(CodecId::ZstdPlain);
        let text = "hello world hello world hello world";
        let compressed = compressed_size(text, None, &params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let random: Vec<u8> = (0..text.len()).map(|_| rng.gen()).collect();
        let random_size = CompressContext::new(&params, None)
            .unwrap()
            .size_of_bytes(&random)
            .unwrap();
        assert!(compressed < random_size, "{compressed} vs {random_size}");
    }

    #[test]
    fn incompressible_text_nets_close_to_its_length() {
        let params = CodecParams::default();
        let dict = train_dictionary(&english_samples(200), 4096, &params).unwrap();
        let baseline = empty_baseline(&dict, &params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let random: Vec<u8> = (0..100).map(|_| rng.gen()).collect();
        let mut ctx = CompressContext::new(&params, Some(&dict)).unwrap();
        let net = ctx.size_of_bytes(&random).unwrap()
            - baseline.empty_compressed_size as usize;
        assert!((90..=130).contains(&net), "net={net}");
    }

    #[test]
    fn matching_script_dictionary_compresses_better() {
        let params = CodecParams::default();
        let greek: Vec<char> = "αβγδεζηθικλμνξοπρστυφχψω".chars().collect();
        let cyrillic: Vec<char> = "абвгдежзийклмнопрстуфхцч".chars().collect();
        let greek_dict =
            train_dictionary(&word_salad(&greek, 400, 21), 16384, &params).unwrap();
        let cyrillic_dict =
            train_dictionary(&word_salad(&cyrillic, 400, 22), 16384, &params).unwrap();
        let greek_baseline = empty_baseline(&greek_dict, &params).unwrap();
        let cyrillic_baseline = empty_baseline(&cyrillic_dict, &params).unwrap();

        let probe = &word_salad(&greek, 40, 23)[0];
        let with_greek =
            net_compressed_size(probe, &greek_dict, &greek_baseline, &params).unwrap();
        let with_cyrillic =
            net_compressed_size(probe, &cyrillic_dict, &cyrillic_baseline, &params).unwrap();
        assert!(
            with_greek < with_cyrillic,
            "greek dict {with_greek} vs cyrillic dict {with_cyrillic}"
        );
    }

    #[test]
    fn all_baseline_codecs_measure() {
        for codec in [CodecId::ZstdPlain, CodecId::Deflate, CodecId::Lzma, CodecId::Bzip2] {
            let params = CodecParams::with_codec(codec);
            let size = compressed_size("hello world hello world", None, &params).unwrap();
            assert!(size > 0, "{:?}", codec);
        }
    }
}
