use std::fmt::Write;

use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity};

const HEADER: &str = "t,x,y,p";

/// One event per line under a `t,x,y,p` header. Geometry and duration are not
/// stored; [`read_csv`] takes them from the caller.
pub fn write_csv(stream: &EventStream) -> String {
    let mut out = String::with_capacity(8 + stream.events.len() * 16);
    out.push_str(HEADER);
    out.push('\n');
    for e in &stream.events {
        let _ = writeln!(out, "{},{},{},{}", e.t, e.x, e.y, e.polarity.as_i8());
    }
    out
}

pub fn read_csv(text: &str, width: u16, height: u16, duration: u32) -> Result<EventStream> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                reason: format!("expected header {HEADER:?}"),
            })
        }
    }
    let mut events = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |reason: &str| Error::Parse {
            line: line_no,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [t, x, y, p] = fields[..] else {
            return Err(err("expected 4 fields"));
        };
        let t = t.parse::<u32>().map_err(|_| err("bad t"))?;
        let x = x.parse::<u16>().map_err(|_| err("bad x"))?;
        let y = y.parse::<u16>().map_err(|_| err("bad y"))?;
        let polarity = p
            .parse::<i8>()
            .ok()
            .and_then(Polarity::from_i8)
            .ok_or_else(|| err("polarity must be 1 or -1"))?;
        events.push(Event { t, x, y, polarity });
    }
    Ok(EventStream::new(width, height, duration, events))
}
