use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryKind {
    Events,
    Frames,
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryKind::Events => "events",
            EntryKind::Frames => "frames",
        })
    }
}

impl FromStr for EntryKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "events" => Ok(EntryKind::Events),
            "frames" => Ok(EntryKind::Frames),
            other => Err(format!("unknown entry kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Relative to the manifest's directory.
    pub path: String,
    pub class: usize,
    pub kind: EntryKind,
}

/// Index of a labeled dataset on disk.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatasetManifest {
    pub num_classes: usize,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(num_classes: usize) -> Self {
        DatasetManifest {
            num_classes,
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.entries.len());
        for e in &self.entries {
            if e.class >= self.num_classes {
                return Err(Error::ClassOutOfRange {
                    class: e.class,
                    num_classes: self.num_classes,
                });
            }
            if e.path.contains(['\t', '\n', '\r']) {
                return Err(Error::InvalidConfig(format!(
                    "path {:?} contains a tab or newline",
                    e.path
                )));
            }
            if !seen.insert(e.path.as_str()) {
                return Err(Error::DuplicateEntry(e.path.clone()));
            }
        }
        Ok(())
    }
}

pub fn write_manifest(manifest: &DatasetManifest) -> Result<String> {
    manifest.validate()?;
    let mut out = format!("n={}\n", manifest.num_classes);
    for e in &manifest.entries {
        out.push_str(&format!("{}\t{}\t{}\n", e.class, e.kind, e.path));
    }
    Ok(out)
}

pub fn read_manifest(text: &str) -> Result<DatasetManifest> {
    let mut lines = text.lines().enumerate();
    let num_classes = lines
        .next()
        .and_then(|(_, l)| l.strip_prefix("n="))
        .and_then(|n| n.trim().parse::<usize>().ok())
        .ok_or_else(|| Error::Parse {
            line: 1,
            reason: "expected n=<num_classes>".into(),
        })?;
    let mut manifest = DatasetManifest::new(num_classes);
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| Error::Parse {
            line: i + 1,
            reason,
        };
        let mut parts = line.splitn(3, '\t');
        let (Some(class), Some(kind), Some(path)) = (parts.next(), parts.next(), parts.next())
        else {
            return Err(err("expected <class>\\t<kind>\\t<path>".into()));
        };
        let class = class
            .parse::<usize>()
            .map_err(|_| err(format!("bad class id {class:?}")))?;
        let kind = kind.parse::<EntryKind>().map_err(err)?;
        manifest.entries.push(ManifestEntry {
            path: path.to_string(),
            class,
            kind,
        });
    }
    manifest.validate()?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(path: &str, class: usize) -> ManifestEntry {
        ManifestEntry {
            path: path.into(),
            class,
            kind: EntryKind::Events,
        }
    }

    #[test]
    fn two_lines() {
        let m = DatasetManifest {
            num_classes: 2,
            entries: vec![entry("a/0.evt", 1)],
        };
        let text = write_manifest(&m).unwrap();
        assert_eq!(text, "n=2\n1\tevents\ta/0.evt\n");
        assert_eq!(read_manifest(&text).unwrap(), m);
    }

    #[test]
    fn round_trip_hundred() {
        let m = DatasetManifest {
            num_classes: 7,
            entries: (0..100)
                .map(|i| ManifestEntry {
                    path: format!("dir {i}/s{i}.bin"),
                    class: i % 7,
                    kind: if i % 2 == 0 {
                        EntryKind::Events
                    } else {
                        EntryKind::Frames
                    },
                })
                .collect(),
        };
        assert_eq!(read_manifest(&write_manifest(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn class_out_of_range() {
        assert!(matches!(
            read_manifest("n=3\n5\tevents\tx.evt\n"),
            Err(Error::ClassOutOfRange {
                class: 5,
                num_classes: 3
            })
        ));
    }

    #[test]
    fn duplicate_path() {
        let m = DatasetManifest {
            num_classes: 2,
            entries: vec![entry("x", 0), entry("x", 1)],
        };
        assert!(matches!(write_manifest(&m), Err(Error::DuplicateEntry(_))));
        assert!(matches!(
            read_manifest("n=2\n0\tevents\tx\n1\tframes\tx\n"),
            Err(Error::DuplicateEntry(_))
        ));
    }

    #[test]
    fn malformed_lines() {
        assert!(read_manifest("classes=2\n").is_err());
        assert!(read_manifest("n=2\n0\tevents\n").is_err());
        assert!(read_manifest("n=2\n0\tvoxels\tx\n").is_err());
    }
}
