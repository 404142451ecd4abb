//! Sample files: one increment per line after a header
//! `# levy-sample v1; family=<f>; t=<t>; seed=<s>`.

use std::io::{BufRead, Write};

use levy_ig_core::inference::SampleSet;

use crate::error::{Error, Result};

const MAGIC: &str = "# levy-sample v1";

/// Contents of a sample file.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleFile {
    pub family: String,
    pub t: f64,
    pub seed: u64,
    pub values: Vec<f64>,
}

impl SampleFile {
    pub fn from_set(set: &SampleSet, family: &str) -> Self {
        Self {
            family: family.to_string(),
            t: set.t,
            seed: set.seed,
            values: set.values.clone(),
        }
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "{MAGIC}; family={}; t={:.16e}; seed={}",
            self.family, self.t, self.seed
        )?;
        for v in &self.values {
            writeln!(w, "{v:.16e}")?;
        }
        w.flush()
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let bad = |line: usize, message: String| Error::Samples { line, message };
        let mut lines = r.lines();
        let header = match lines.next() {
            Some(h) => h.map_err(|e| bad(1, e.to_string()))?,
            None => return Err(bad(1, "empty file".into())),
        };
        let rest = header
            .strip_prefix(MAGIC)
            .ok_or_else(|| bad(1, format!("expected a header starting with `{MAGIC}`")))?;
        let (mut family, mut t, mut seed) = (None, None, None);
        for field in rest.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| bad(1, format!("header field `{field}` is not key=value")))?;
            match k.trim() {
                "family" => family = Some(v.trim().to_string()),
                "t" => {
                    t = Some(
                        v.trim()
                            .parse::<f64>()
                            .map_err(|e| bad(1, format!("t: {e}")))?,
                    )
                }
                "seed" => {
                    seed = Some(
                        v.trim()
                            .parse::<u64>()
                            .map_err(|e| bad(1, format!("seed: {e}")))?,
                    )
                }
                other => return Err(bad(1, format!("unknown header field `{other}`"))),
            }
        }
        let missing = |k: &str| bad(1, format!("header lacks `{k}`"));
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| bad(i + 2, e.to_string()))?;
            let s = line.trim();
            if s.is_empty() {
                continue;
            }
            let v: f64 = s.parse().map_err(|e| bad(i + 2, format!("`{s}`: {e}")))?;
            if !v.is_finite() {
                return Err(bad(i + 2, format!("non-finite value `{s}`")));
            }
            values.push(v);
        }
        Ok(Self {
            family: family.ok_or_else(|| missing("family"))?,
            t: t.ok_or_else(|| missing("t"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            values,
        })
    }
}
