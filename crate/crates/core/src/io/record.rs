use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// A uniformly sampled single-channel ECG.
#[derive(Debug, Clone, PartialEq)]
pub struct EcgRecord {
    samples: Vec<f64>,
    fs: f64,
    record_id: String,
    channel: String,
    units: String,
}

impl EcgRecord {
    pub fn new(record_id: impl Into<String>, samples: Vec<f64>, fs: f64) -> Result<Self> {
        if !(fs > 0.0) || !fs.is_finite() {
            return Err(Error::InvalidSamplingRate(fs));
        }
        if samples.is_empty() {
            return Err(Error::Empty("record has no samples".into()));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite sample {} at index {i}",
                samples[i]
            )));
        }
        Ok(Self {
            samples,
            fs,
            record_id: record_id.into(),
            channel: "ECG".into(),
            units: "mV".into(),
        })
    }

    pub fn with_channel(mut self, channel: impl Into<String>) -> Self {
        self.channel = channel.into();
        self
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = units.into();
        self
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn record_id(&self) -> &str {
        &self.record_id
    }

    pub fn channel(&self) -> &str {
        &self.channel
    }

    pub fn units(&self) -> &str {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Same metadata, new samples. Samples must stay finite.
    pub fn map_samples(&self, samples: Vec<f64>) -> Result<Self> {
        let mut out = Self::new(self.record_id.clone(), samples, self.fs)?;
        out.channel = self.channel.clone();
        out.units = self.units.clone();
        Ok(out)
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Paths of the sample file and its metadata sidecar for a record path.
///
/// Accepts `<id>.ecg`, `<id>.meta`, or the bare stem.
pub fn record_paths(path: &Path) -> (PathBuf, PathBuf) {
    let stem = match path.extension().and_then(|e| e.to_str()) {
        Some("ecg") | Some("meta") | Some("ann") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    (
        stem.with_extension("ecg"),
        stem.with_extension("meta"),
    )
}

pub fn load_record(path: impl AsRef<Path>) -> Result<EcgRecord> {
    let (ecg_path, meta_path) = record_paths(path.as_ref());

    let meta_text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let mut fs_hz = None;
    let mut record_id = None;
    let mut channel = None;
    let mut units = None;
    for (i, raw) in meta_text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(&meta_path, i + 1, "expected key=value"))?;
        let value = value.trim();
        match key.trim() {
            "fs" => {
                let v: f64 = value.parse().map_err(|_| {
                    Error::parse(&meta_path, i + 1, format!("non-numeric fs {value:?}"))
                })?;
                fs_hz = Some(v);
            }
            "record_id" => record_id = Some(value.to_string()),
            "channel" => channel = Some(value.to_string()),
            "units" => units = Some(value.to_string()),
            // unknown keys are tolerated so converters can add provenance
            _ => {}
        }
    }
    let fs_hz = fs_hz.ok_or_else(|| Error::parse(&meta_path, 0, "missing key fs"))?;
    if !(fs_hz > 0.0) || !fs_hz.is_finite() {
        return Err(Error::InvalidSamplingRate(fs_hz).context(meta_path.display().to_string()));
    }

    let text = fs::read_to_string(&ecg_path).map_err(|e| Error::io(&ecg_path, e))?;
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::parse(&ecg_path, i + 1, format!("non-numeric sample {line:?}")))?;
        if !v.is_finite() {
            return Err(Error::parse(&ecg_path, i + 1, format!("non-finite sample {line:?}")));
        }
        samples.push(v);
    }
    if samples.is_empty() {
        return Err(Error::parse(&ecg_path, 0, "empty file"));
    }

    let default_id = ecg_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_string();
    let mut record = EcgRecord::new(record_id.unwrap_or(default_id), samples, fs_hz)?;
    if let Some(c) = channel {
        record.channel = c;
    }
    if let Some(u) = units {
        record.units = u;
    }
    Ok(record)
}

/// Writes `<stem>.ecg` and `<stem>.meta`.
pub fn save_record(record: &EcgRecord, path: impl AsRef<Path>) -> Result<()> {
    let (ecg_path, meta_path) = record_paths(path.as_ref());
    let mut body = String::with_capacity(record.samples.len() * 12);
    for x in &record.samples {
        // Display for f64 is the shortest string that parses back bit-exactly
        body.push_str(&x.to_string());
        body.push('\n');
    }
    fs::write(&ecg_path, body).map_err(|e| Error::io(&ecg_path, e))?;
    let meta = format!(
        "fs={}\nunits={}\nrecord_id={}\nchannel={}\n",
        record.fs, record.units, record.record_id, record.channel
    );
    fs::write(&meta_path, meta).map_err(|e| Error::io(&meta_path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn parses_three_samples() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "r1.meta", "fs=360\nunits=mV\nrecord_id=r1\nchannel=MLII\n");
        let p = write(dir.path(), "r1.ecg", "0.0\n0.1\n0.2\n");
        let r = load_record(&p).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.fs(), 360.0);
        assert_eq!(r.samples(), &[0.0, 0.1, 0.2]);
        assert_eq!(r.channel(), "MLII");
    }

    #[test]
    fn zero_fs_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "r.meta", "fs=0\n");
        let p = write(dir.path(), "r.ecg", "1\n");
        let err = load_record(&p).unwrap_err();
        assert!(err.to_string().contains("invalid sampling rate"), "{err}");
    }

    #[test]
    fn missing_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "r.ecg", "1\n");
        assert!(matches!(load_record(&p), Err(Error::Io { .. })));
    }

    #[test]
    fn bad_sample_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "r.meta", "fs=100\n");
        let p = write(dir.path(), "r.ecg", "1\n2\nabc\n");
        match load_record(&p).unwrap_err() {
            Error::Parse { line, reason, .. } => {
                assert_eq!(line, 3);
                assert!(reason.contains("abc"));
            }
            e => panic!("unexpected {e}"),
        }
        let p = write(dir.path(), "r.ecg", "1\nNaN\n");
        assert!(load_record(&p).is_err());
        let p = write(dir.path(), "r.ecg", "inf\n");
        assert!(load_record(&p).is_err());
    }

    #[test]
    fn empty_file() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "r.meta", "fs=100\n");
        let p = write(dir.path(), "r.ecg", "");
        assert!(load_record(&p).unwrap_err().to_string().contains("empty"));
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let samples: Vec<f64> = (0..500).map(|i| ((i as f64) * 0.731).sin() / 3.0 - 1e-17 * i as f64).collect();
        let r = EcgRecord::new("abc", samples, 1024.0).unwrap().with_channel("lead II");
        save_record(&r, dir.path().join("abc")).unwrap();
        let back = load_record(dir.path().join("abc.ecg")).unwrap();
        assert_eq!(back, r);
        for (a, b) in back.samples().iter().zip(r.samples()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
