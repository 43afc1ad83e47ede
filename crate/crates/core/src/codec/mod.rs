//! On-disk formats: EVT1 event streams, CSV event dumps, EVZF frame tensors
//! with optional label tracks, and the text dataset manifest.
//!
//! All binary formats are little-endian and uncompressed. Writers are
//! deterministic so that identical values always produce identical bytes.

mod csv;
mod evt;
mod evzf;
mod manifest;

use std::fs;
use std::path::Path;

pub use self::csv::{read_csv, write_csv};
pub use self::evt::{read_evt, write_evt, EVT1_HEADER_LEN, EVT1_MAGIC, EVT1_RECORD_LEN};
pub use self::evzf::{read_evzf, write_evzf, EvzfFile, EVZF_HEADER_LEN, EVZF_MAGIC};
pub use self::manifest::{
    read_manifest, write_manifest, DatasetManifest, EntryKind, ManifestEntry,
};

use crate::error::{Error, Result};
use crate::event::{EventStream, FrameTensor, SoftLabelTrack};

/// Little-endian cursor over a byte slice. Every short read is reported with
/// the error the calling format chooses.
pub(crate) struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
    eof: fn() -> Error,
}

impl<'a> ByteReader<'a> {
    pub(crate) fn new(buf: &'a [u8], eof: fn() -> Error) -> Self {
        ByteReader { buf, pos: 0, eof }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or_else(self.eof)?;
        let out = self.buf.get(self.pos..end).ok_or_else(self.eof)?;
        self.pos = end;
        Ok(out)
    }

    pub(crate) fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub(crate) fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.array::<1>()?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    pub(crate) fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.array()?))
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_evt(path: impl AsRef<Path>) -> Result<EventStream> {
    read_evt(&read_file(path.as_ref())?)
}

pub fn save_evt(path: impl AsRef<Path>, stream: &EventStream) -> Result<()> {
    write_file(path.as_ref(), &write_evt(stream))
}

pub fn load_evzf(path: impl AsRef<Path>) -> Result<EvzfFile> {
    read_evzf(&read_file(path.as_ref())?)
}

pub fn save_evzf(
    path: impl AsRef<Path>,
    frames: &FrameTensor,
    labels: Option<&SoftLabelTrack>,
) -> Result<()> {
    write_file(path.as_ref(), &write_evzf(frames, labels)?)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_manifest(&text)
}

pub fn save_manifest(path: impl AsRef<Path>, manifest: &DatasetManifest) -> Result<()> {
    write_file(path.as_ref(), write_manifest(manifest)?.as_bytes())
}
