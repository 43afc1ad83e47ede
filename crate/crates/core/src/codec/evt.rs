use super::ByteReader;
use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity};

pub const EVT1_MAGIC: [u8; 4] = [0x45, 0x56, 0x5A, 0x31];
/// magic + width + height + duration + count
pub const EVT1_HEADER_LEN: usize = 4 + 2 + 2 + 4 + 8;
/// t + x + y + polarity, packed
pub const EVT1_RECORD_LEN: usize = 4 + 2 + 2 + 1;

pub fn write_evt(stream: &EventStream) -> Vec<u8> {
    let mut out = Vec::with_capacity(EVT1_HEADER_LEN + EVT1_RECORD_LEN * stream.events.len());
    out.extend_from_slice(&EVT1_MAGIC);
    out.extend_from_slice(&stream.width.to_le_bytes());
    out.extend_from_slice(&stream.height.to_le_bytes());
    out.extend_from_slice(&stream.duration.to_le_bytes());
    out.extend_from_slice(&(stream.events.len() as u64).to_le_bytes());
    for e in &stream.events {
        out.extend_from_slice(&e.t.to_le_bytes());
        out.extend_from_slice(&e.x.to_le_bytes());
        out.extend_from_slice(&e.y.to_le_bytes());
        out.push(e.polarity.as_i8() as u8);
    }
    out
}

pub fn read_evt(bytes: &[u8]) -> Result<EventStream> {
    if bytes.len() < 4 || bytes[..4] != EVT1_MAGIC {
        return Err(Error::NotEvt1);
    }
    let mut r = ByteReader::new(&bytes[4..], || Error::UnexpectedEof);
    let width = r.u16()?;
    let height = r.u16()?;
    let duration = r.u32()?;
    let count = r.u64()?;
    let body_len = count
        .checked_mul(EVT1_RECORD_LEN as u64)
        .filter(|&n| n <= r.remaining() as u64)
        .ok_or(Error::UnexpectedEof)?;
    let mut events = Vec::with_capacity((body_len / EVT1_RECORD_LEN as u64) as usize);
    for index in 0..count as usize {
        let t = r.u32()?;
        let x = r.u16()?;
        let y = r.u16()?;
        let polarity = Polarity::from_i8(r.u8()? as i8).ok_or(Error::CorruptRecord(index))?;
        events.push(Event { t, x, y, polarity });
    }
    Ok(EventStream::new(width, height, duration, events))
}
