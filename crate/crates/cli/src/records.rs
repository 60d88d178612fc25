//! Record encodings. Reals in atom records are written with 17 significant digits
//! so JSONL and CSV carry identical values.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use levyd::measures::{Origin, WeightedAtom};
use serde::Serialize;

use crate::args::Format;

pub fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn optional(x: Option<u32>) -> String {
    x.map_or_else(|| "null".to_string(), |v| v.to_string())
}

/// Round and sub-round labels as written: `h` only for gamma families, `k` omitted for
/// resampled observed atoms.
#[derive(Debug, Clone, Copy)]
pub struct Labels {
    pub k: Option<u32>,
    pub h: Option<u32>,
}

impl Labels {
    pub fn of(atom: &WeightedAtom, has_subrounds: bool) -> Self {
        let k = (atom.origin != Origin::PosteriorObserved).then_some(atom.round_k);
        let h = has_subrounds.then_some(atom.subround_h);
        Labels { k, h }
    }
}

pub struct AtomWriter<W: Write> {
    out: W,
    format: Format,
    dim: usize,
}

impl<W: Write> AtomWriter<W> {
    /// Writes the header first: a JSON line, or a `#`-prefixed JSON line plus column names for CSV.
    pub fn new<H: Serialize>(mut out: W, format: Format, dim: usize, header: &H) -> io::Result<Self> {
        let json = serde_json::to_string(header).map_err(io::Error::other)?;
        match format {
            Format::Jsonl => writeln!(out, "{json}")?,
            Format::Csv => {
                writeln!(out, "# {json}")?;
                let locs: Vec<String> = (0..dim).map(|i| format!("location_{i}")).collect();
                writeln!(out, "replica,k,h,{},jump,origin", locs.join(","))?;
            }
        }
        Ok(Self { out, format, dim })
    }

    pub fn atom(&mut self, replica: u64, labels: Labels, atom: &WeightedAtom) -> io::Result<()> {
        debug_assert_eq!(atom.location.len(), self.dim);
        let locs: Vec<String> = atom.location.iter().map(|&x| real(x)).collect();
        match self.format {
            Format::Jsonl => writeln!(
                self.out,
                "{{\"replica\":{replica},\"k\":{},\"h\":{},\"location\":[{}],\"jump\":{},\"origin\":\"{}\"}}",
                optional(labels.k),
                optional(labels.h),
                locs.join(","),
                real(atom.jump),
                atom.origin.as_str()
            ),
            Format::Csv => writeln!(
                self.out,
                "{replica},{},{},{},{},{}",
                labels.k.map(|v| v.to_string()).unwrap_or_default(),
                labels.h.map(|v| v.to_string()).unwrap_or_default(),
                locs.join(","),
                real(atom.jump),
                atom.origin.as_str()
            ),
        }
    }

    /// A free-form trailing record; CSV gets it as a `#` comment.
    pub fn extra<T: Serialize>(&mut self, record: &T) -> io::Result<()> {
        let json = serde_json::to_string(record).map_err(io::Error::other)?;
        match self.format {
            Format::Jsonl => writeln!(self.out, "{json}"),
            Format::Csv => writeln!(self.out, "# {json}"),
        }
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}
