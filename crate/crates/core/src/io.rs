//! File formats: coefficient envelopes, plot-ready CSV, partitions and WAV.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabor::GaborSystem;
use crate::scalar::Real;
use crate::signal::{Signal, WindowKind};
use crate::superposition::{make_selection, CoefficientSet, Mode, OrderedPartition, Piece};

/// Floor applied to `|c|²` before taking decibels.
pub const DB_FLOOR: f64 = 1e-12;

/// Base window of a coefficient file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowHeader {
    pub kind: WindowKind,
    pub width: usize,
    /// Base modulation count `M`.
    #[serde(rename = "M")]
    pub modulations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceRecord {
    pub n: usize,
    pub r: usize,
    #[serde(rename = "M")]
    pub modulations: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// `{L, a, window, mode, pieces: [{n, r, M, re, im}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    #[serde(rename = "L")]
    pub len: usize,
    pub a: usize,
    pub window: WindowHeader,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_rate: Option<u32>,
    pub pieces: Vec<PieceRecord>,
}

impl CoefficientFile {
    pub fn from_set<T: Real>(c: &CoefficientSet<T>, window: WindowHeader) -> Self {
        let sel = c.selection();
        let pieces = c
            .iter()
            .zip(sel.mod_counts())
            .map(|((p, coefs), &m)| PieceRecord {
                n: p.start,
                r: p.order,
                modulations: m,
                re: coefs.iter().map(|z| z.re.as_f64()).collect(),
                im: coefs.iter().map(|z| z.im.as_f64()).collect(),
            })
            .collect();
        Self { len: sel.signal_len(), a: sel.hop(), window, mode: sel.mode(), sample_rate: None, pieces }
    }

    /// Base system described by the header.
    pub fn system<T: Real>(&self) -> Result<GaborSystem<T>> {
        GaborSystem::new(self.window.kind.build(self.len, self.window.width)?, self.a, self.window.modulations)
    }

    pub fn partition(&self) -> Result<OrderedPartition> {
        if self.a == 0 || !self.len.is_multiple_of(self.a) {
            return Err(Error::InvalidLattice(format!("hop {} does not divide L = {}", self.a, self.len)));
        }
        OrderedPartition::new(self.len / self.a, self.pieces.iter().map(|p| Piece::new(p.n, p.r)).collect())
    }

    /// Rebuilds the selection and checks every piece against it.
    pub fn to_set<T: Real>(&self) -> Result<(GaborSystem<T>, CoefficientSet<T>)> {
        let g = self.system::<T>()?;
        let sel = make_selection(&self.partition()?, &g, self.mode)?;
        let mut records: Vec<&PieceRecord> = self.pieces.iter().collect();
        records.sort_by_key(|p| p.n);
        let mut entries = Vec::with_capacity(records.len());
        for (rec, &m) in records.iter().zip(sel.mod_counts()) {
            if rec.modulations != m || rec.re.len() != m || rec.im.len() != m {
                return Err(Error::Config(format!(
                    "piece (n={}, r={}) carries {} coefficients, the selection expects {m}",
                    rec.n,
                    rec.r,
                    rec.re.len()
                )));
            }
            entries.push(rec.re.iter().zip(&rec.im).map(|(&re, &im)| Complex::new(T::of(re), T::of(im))).collect());
        }
        let set = CoefficientSet::from_parts(sel, entries)?;
        Ok((g, set))
    }
}

pub fn write_json<V: Serialize>(path: &Path, value: &V) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(file, value)?;
    Ok(())
}

pub fn read_json<V: DeserializeOwned>(path: &Path) -> Result<V> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    Ok(serde_json::from_reader(file)?)
}

/// One row per coefficient: piece, bin, window centre in samples, frequency in
/// cycles per sample and `10·log₁₀ max(|c|², 1e-12)`.
pub fn spectrogram_csv<T: Real>(c: &CoefficientSet<T>) -> String {
    let mut out = String::from("n,r,m,M,t_center,frequency,db\n");
    let sel = c.selection();
    for ((p, m_count, prof, anchor), coefs) in sel.iter().zip(c.entries()) {
        let center = (anchor + prof.length / 2) % sel.signal_len();
        for (m, z) in coefs.iter().enumerate() {
            let db = 10.0 * z.norm_sqr().as_f64().max(DB_FLOOR).log10();
            let _ = writeln!(out, "{},{},{},{},{},{},{:.6}", p.start, p.order, m, m_count, center, m as f64 / m_count as f64, db);
        }
    }
    out
}

/// `n,r,score` per piece.
pub fn scores_csv(rows: &[(Piece, f64)]) -> String {
    let mut out = String::from("n,r,score\n");
    for (p, s) in rows {
        let _ = writeln!(out, "{},{},{}", p.start, p.order, s);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleFormat {
    Pcm16,
    Float32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AudioInfo {
    pub sample_rate: u32,
    pub channels: u16,
    pub format: SampleFormat,
    /// Samples in the file before any crop or pad.
    pub frames: usize,
}

/// Mono 16-bit PCM or 32-bit float WAV. With `target_len`, the signal is
/// cropped or zero-padded to that length; without it, `L` is the sample count.
pub fn read_wav<T: Real>(path: &Path, target_len: Option<usize>) -> Result<(Signal<T>, AudioInfo)> {
    let reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::Config(format!("{} channels; only mono input is supported", spec.channels)));
    }
    let (format, mut samples): (SampleFormat, Vec<f64>) = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => (
            SampleFormat::Pcm16,
            reader.into_samples::<i16>().map(|s| s.map(|v| v as f64 / 32768.0)).collect::<Result<_, _>>()?,
        ),
        (hound::SampleFormat::Float, 32) => (
            SampleFormat::Float32,
            reader.into_samples::<f32>().map(|s| s.map(f64::from)).collect::<Result<_, _>>()?,
        ),
        (f, b) => return Err(Error::Config(format!("unsupported sample format {f:?} with {b} bits"))),
    };
    let info = AudioInfo { sample_rate: spec.sample_rate, channels: 1, format, frames: samples.len() };
    if let Some(len) = target_len {
        samples.resize(len, 0.0);
    }
    if samples.is_empty() {
        return Err(Error::Config("audio file has no samples".into()));
    }
    Ok((Signal::new(samples.into_iter().map(|v| Complex::new(T::of(v), T::zero())).collect()), info))
}

/// Writes the real parts of `x`; 16-bit output is clipped to `[-1, 1)`.
pub fn write_wav<T: Real>(path: &Path, x: &Signal<T>, sample_rate: u32, format: SampleFormat) -> Result<()> {
    let (bits, sample_format) = match format {
        SampleFormat::Pcm16 => (16, hound::SampleFormat::Int),
        SampleFormat::Float32 => (32, hound::SampleFormat::Float),
    };
    let spec = hound::WavSpec { channels: 1, sample_rate, bits_per_sample: bits, sample_format };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for v in x.real_parts() {
        let v = v.as_f64();
        match format {
            SampleFormat::Pcm16 => writer.write_sample((v * 32768.0).round().clamp(-32768.0, 32767.0) as i16)?,
            SampleFormat::Float32 => writer.write_sample(v as f32)?,
        }
    }
    writer.finalize()?;
    Ok(())
}
