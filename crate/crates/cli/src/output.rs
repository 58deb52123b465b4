//! CSV sinks with a `#` header echoing the resolved configuration.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

use crate::config::Config;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Header settings shared by every file a run writes.
#[derive(Debug, Clone, Copy)]
pub struct HeaderStyle {
    pub timestamp: bool,
}

pub fn write_header(w: &mut dyn Write, cfg: &Config, style: HeaderStyle) -> io::Result<()> {
    writeln!(w, "# xlap {VERSION}")?;
    writeln!(w, "# command: {}", cfg.command())?;
    if style.timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        writeln!(w, "# timestamp: {secs}")?;
    }
    for (k, v) in cfg.entries() {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

/// `-` is standard output.
pub fn open(path: &Path) -> Result<Box<dyn Write>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufWriter::new(io::stdout().lock())));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(Box::new(BufWriter::new(file)))
}

/// Opens `path` and writes the header.
pub fn create(path: &Path, cfg: &Config, style: HeaderStyle) -> Result<Box<dyn Write>> {
    let mut w = open(path)?;
    write_header(&mut w, cfg, style)?;
    Ok(w)
}

/// `base` with `suffix` appended to its file name.
pub fn sibling(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Shortest representation that round-trips; `NaN` for missing values.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:?}")
    }
}
