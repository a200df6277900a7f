use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::IngestError;
use crate::rfa::Signal;

/// Reads a 16-bit PCM WAV file, mixes stereo down to `(L + R) / 2` and
/// scales to a peak of 1.
pub fn load_wav(path: impl AsRef<Path>) -> Result<Signal, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_wav(BufReader::new(file))
}

pub fn read_wav(reader: impl Read) -> Result<Signal, IngestError> {
    let reader = WavReader::new(reader).map_err(classify)?;
    let spec = reader.spec();
    if spec.sample_format != SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(IngestError::UnsupportedFormat(format!(
            "{}-bit {:?} samples; only 16-bit PCM is read",
            spec.bits_per_sample, spec.sample_format
        )));
    }
    let channels = spec.channels as usize;
    if !(1..=2).contains(&channels) {
        return Err(IngestError::UnsupportedFormat(format!(
            "{channels} channels; only mono and stereo are read"
        )));
    }
    let raw = reader
        .into_samples::<i16>()
        .map(|s| s.map(f64::from))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(classify)?;
    if raw.len() % channels != 0 {
        return Err(IngestError::CorruptFile(
            "sample count is not a multiple of the channel count".into(),
        ));
    }
    let samples: Vec<f64> = if channels == 2 {
        raw.chunks_exact(2)
            .map(|f| f[0] / 2.0 + f[1] / 2.0)
            .collect()
    } else {
        raw
    };
    if samples.is_empty() {
        return Err(IngestError::CorruptFile("no samples".into()));
    }
    let signal = Signal::new(samples, spec.sample_rate as f64)
        .map_err(|e| IngestError::CorruptFile(e.to_string()))?;
    signal
        .normalized()
        .map_err(|_| IngestError::DegenerateAudio)
}

fn classify(e: hound::Error) -> IngestError {
    match e {
        hound::Error::Unsupported => {
            IngestError::UnsupportedFormat("unsupported WAV encoding".into())
        }
        other => IngestError::CorruptFile(other.to_string()),
    }
}

/// Writes a mono 16-bit PCM file; samples are clipped to [-1, 1] and
/// scaled by 32767.
pub fn write_wav(path: impl AsRef<Path>, s: &Signal) -> Result<(), IngestError> {
    let path = path.as_ref();
    let spec = WavSpec {
        channels: 1,
        sample_rate: s.fs().round() as u32,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut w = WavWriter::create(path, spec).map_err(|e| IngestError::io(path, e))?;
    for &x in s.samples() {
        let q = (x.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        w.write_sample(q).map_err(|e| IngestError::io(path, e))?;
    }
    w.finalize().map_err(|e| IngestError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn encode(channels: u16, bits: u16, frames: &[i32]) -> Vec<u8> {
        let spec = WavSpec {
            channels,
            sample_rate: 8000,
            bits_per_sample: bits,
            sample_format: SampleFormat::Int,
        };
        let mut buf = Cursor::new(Vec::new());
        let mut w = WavWriter::new(&mut buf, spec).unwrap();
        for &s in frames {
            w.write_sample(s).unwrap();
        }
        w.finalize().unwrap();
        buf.into_inner()
    }

    #[test]
    fn mono_is_normalized() {
        let s = read_wav(Cursor::new(encode(1, 16, &[100, -200, 50]))).unwrap();
        assert_eq!(s.samples(), [0.5, -1.0, 0.25]);
        assert_eq!(s.fs(), 8000.0);
    }

    #[test]
    fn stereo_mixdown() {
        let s = read_wav(Cursor::new(encode(2, 16, &[100, 300, -40, 0]))).unwrap();
        assert_eq!(s.samples(), [1.0, -0.1]);
    }

    #[test]
    fn silence_and_cancellation_are_degenerate() {
        assert_eq!(
            read_wav(Cursor::new(encode(1, 16, &[0, 0, 0]))).unwrap_err(),
            IngestError::DegenerateAudio
        );
        assert_eq!(
            read_wav(Cursor::new(encode(2, 16, &[500, -500, -7, 7]))).unwrap_err(),
            IngestError::DegenerateAudio
        );
    }

    #[test]
    fn other_depths_rejected() {
        let e = read_wav(Cursor::new(encode(1, 24, &[1, 2, 3]))).unwrap_err();
        assert_eq!(e.name(), "UnsupportedFormat");
    }

    #[test]
    fn garbage_is_corrupt() {
        let e = read_wav(Cursor::new(b"RIFF\x04\x00\x00\x00WAVEjunk".to_vec())).unwrap_err();
        assert_eq!(e.name(), "CorruptFile");
        let mut bytes = encode(1, 16, &[1, 2, 3, 4]);
        bytes.truncate(bytes.len() - 3);
        assert!(read_wav(Cursor::new(bytes)).is_err());
    }
}
