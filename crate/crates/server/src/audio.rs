//! WAV decoding for voice uploads.
//!
//! Exactly one container format is accepted: RIFF/WAVE holding mono,
//! 16-bit little-endian integer PCM at any sample rate.

use std::io::Cursor;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("not a readable WAV file: {0}")]
    Container(String),
    #[error("unsupported audio: {0}; expected mono 16-bit PCM")]
    Unsupported(String),
}

/// Decodes a WAV byte stream into samples scaled to [-1, 1).
pub fn decode_wav(bytes: &[u8]) -> Result<Vec<f64>, AudioError> {
    let reader = hound::WavReader::new(Cursor::new(bytes))
        .map_err(|e| AudioError::Container(e.to_string()))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(AudioError::Unsupported(format!(
            "{} channels",
            spec.channels
        )));
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(AudioError::Unsupported(format!(
            "{}-bit {:?} samples",
            spec.bits_per_sample, spec.sample_format
        )));
    }
    reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| f64::from(v) / 32768.0))
        .collect::<Result<_, _>>()
        .map_err(|e| AudioError::Container(e.to_string()))
}

/// Encodes mono 16-bit PCM. Used by the CLI and tests to produce uploads.
pub fn encode_wav(samples: &[i16], sample_rate: u32) -> Vec<u8> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut out = Cursor::new(Vec::new());
    {
        let mut w = hound::WavWriter::new(&mut out, spec).expect("in-memory writer");
        for &s in samples {
            w.write_sample(s).expect("in-memory write");
        }
        w.finalize().expect("in-memory finalize");
    }
    out.into_inner()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_pcm16() {
        let samples = [0i16, 16384, -32768, 32767, -1];
        let decoded = decode_wav(&encode_wav(&samples, 8000)).unwrap();
        assert_eq!(
            decoded,
            vec![0.0, 0.5, -1.0, 32767.0 / 32768.0, -1.0 / 32768.0]
        );
    }

    #[test]
    fn rejects_other_formats() {
        assert!(matches!(
            decode_wav(b"not a wav"),
            Err(AudioError::Container(_))
        ));

        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut buf = Cursor::new(Vec::new());
        {
            let mut w = hound::WavWriter::new(&mut buf, spec).unwrap();
            w.write_sample(1i16).unwrap();
            w.write_sample(1i16).unwrap();
            w.finalize().unwrap();
        }
        assert!(matches!(
            decode_wav(&buf.into_inner()),
            Err(AudioError::Unsupported(_))
        ));

        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 8,
            sample_format: hound::SampleFormat::Int,
        };
        let mut buf = Cursor::new(Vec::new());
        {
            let mut w = hound::WavWriter::new(&mut buf, spec).unwrap();
            w.write_sample(3i8).unwrap();
            w.finalize().unwrap();
        }
        assert!(matches!(
            decode_wav(&buf.into_inner()),
            Err(AudioError::Unsupported(_))
        ));
    }
}
