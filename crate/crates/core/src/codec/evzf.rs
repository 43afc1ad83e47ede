use super::ByteReader;
use crate::error::{Error, Result};
use crate::event::{FrameTensor, SoftLabelTrack};

pub const EVZF_MAGIC: [u8; 4] = [0x45, 0x56, 0x5A, 0x46];
/// magic + T + C + H + W + has_labels
pub const EVZF_HEADER_LEN: usize = 4 + 4 * 2 + 1;

/// Decoded contents of an EVZF file.
#[derive(Debug, Clone, PartialEq)]
pub struct EvzfFile {
    pub frames: FrameTensor,
    pub labels: Option<SoftLabelTrack>,
}

fn dim(v: usize) -> Result<u16> {
    u16::try_from(v).map_err(|_| Error::DimensionTooLarge(v))
}

/// Serializes a tensor and optional label track. Label values are stored as
/// f32, so only f32-representable tracks survive a round trip unchanged.
pub fn write_evzf(frames: &FrameTensor, labels: Option<&SoftLabelTrack>) -> Result<Vec<u8>> {
    let [t, c, h, w] = frames.shape();
    let header = [dim(t)?, dim(c)?, dim(h)?, dim(w)?];
    let n = match labels {
        Some(track) => {
            if track.steps() != t {
                return Err(Error::ShapeMismatch(format!(
                    "label track has {} steps, tensor has {t}",
                    track.steps()
                )));
            }
            Some(dim(track.num_classes())?)
        }
        None => None,
    };

    let label_len = n.map_or(0, |n| 2 + (t + 1) * n as usize * 4);
    let mut out = Vec::with_capacity(EVZF_HEADER_LEN + frames.as_slice().len() * 4 + label_len);
    out.extend_from_slice(&EVZF_MAGIC);
    for d in header {
        out.extend_from_slice(&d.to_le_bytes());
    }
    out.push(u8::from(labels.is_some()));
    for v in frames.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    if let (Some(track), Some(n)) = (labels, n) {
        out.extend_from_slice(&n.to_le_bytes());
        for v in track.per_step().iter().flatten().chain(track.averaged()) {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
    }
    Ok(out)
}

pub fn read_evzf(bytes: &[u8]) -> Result<EvzfFile> {
    if bytes.len() < 4 || bytes[..4] != EVZF_MAGIC {
        return Err(Error::NotEvzf);
    }
    let mut r = ByteReader::new(&bytes[4..], || Error::TruncatedTensor);
    let t = r.u16()? as usize;
    let c = r.u16()? as usize;
    let h = r.u16()? as usize;
    let w = r.u16()? as usize;
    let has_labels = match r.u8()? {
        0 => false,
        1 => true,
        other => {
            return Err(Error::ShapeMismatch(format!(
                "has_labels byte {other} not 0 or 1"
            )));
        }
    };

    let count = t * c * h * w;
    let raw = r.take(count * 4)?;
    let data = raw
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().expect("chunk of 4")))
        .collect();
    let frames = FrameTensor::from_vec(t, c, h, w, data)?;

    let labels = if has_labels {
        let n = r.u16()? as usize;
        let mut per_step = Vec::with_capacity(t);
        for _ in 0..t {
            per_step.push(
                (0..n)
                    .map(|_| r.f32().map(f64::from))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let averaged = (0..n)
            .map(|_| r.f32().map(f64::from))
            .collect::<Result<Vec<_>>>()?;
        Some(SoftLabelTrack::from_parts(n, per_step, averaged)?)
    } else {
        None
    };
    Ok(EvzfFile { frames, labels })
}
