//! Command-line and config-file parameters, merged with per-command defaults.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Args;

use regwait_core::DnaWord;

#[derive(Args, Debug, Clone, Default)]
pub struct Overrides {
    /// Diploid population size
    #[arg(long = "N", global = true)]
    pub n: Option<u64>,
    /// Per-nucleotide mutation probability per generation
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    /// Segment length (default 1024 for segment runs, 1000 for population runs)
    #[arg(long = "L", global = true)]
    pub l: Option<usize>,
    /// Word length
    #[arg(long = "W", global = true)]
    pub w: Option<usize>,
    #[arg(long, global = true)]
    pub reps: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Histogram bin width
    #[arg(long, global = true)]
    pub bin: Option<u64>,
    /// Expected number of occurrences for the time-T bounds
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub generation_years: Option<f64>,
    /// Comma-separated target words
    #[arg(long, global = true, value_delimiter = ',')]
    pub words: Option<Vec<String>>,
    /// Single target word for the figure datasets
    #[arg(long, global = true)]
    pub word: Option<String>,
    /// Per-replication step cap
    #[arg(long, global = true)]
    pub step_cap: Option<u64>,
}

impl Overrides {
    /// Fills unset fields from a `key=value` file; flags win.
    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("{}:{}: expected key=value", path.display(), i + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| anyhow::anyhow!("{}:{}: {key}: {e}", path.display(), i + 1);
            match key {
                "N" => fill(&mut self.n, value.parse().map_err(|e| bad(&e))?),
                "mu" => fill(&mut self.mu, value.parse().map_err(|e| bad(&e))?),
                "L" => fill(&mut self.l, value.parse().map_err(|e| bad(&e))?),
                "W" => fill(&mut self.w, value.parse().map_err(|e| bad(&e))?),
                "reps" => fill(&mut self.reps, value.parse().map_err(|e| bad(&e))?),
                "seed" => fill(&mut self.seed, value.parse().map_err(|e| bad(&e))?),
                "bin" => fill(&mut self.bin, value.parse().map_err(|e| bad(&e))?),
                "lambda" => fill(&mut self.lambda, value.parse().map_err(|e| bad(&e))?),
                "generation_years" => fill(&mut self.generation_years, value.parse().map_err(|e| bad(&e))?),
                "step_cap" => fill(&mut self.step_cap, value.parse().map_err(|e| bad(&e))?),
                "word" => fill(&mut self.word, value.to_string()),
                "words" => fill(&mut self.words, value.split(',').map(|s| s.trim().to_string()).collect()),
                other => bail!("{}:{}: unknown key {other:?}", path.display(), i + 1),
            }
        }
        Ok(())
    }

    pub fn parsed_words(&self) -> Result<Option<Vec<DnaWord>>> {
        self.words
            .as_ref()
            .map(|ws| ws.iter().map(|w| parse_word(w)).collect())
            .transpose()
    }

    pub fn parsed_word(&self) -> Result<Option<DnaWord>> {
        self.word.as_deref().map(parse_word).transpose()
    }
}

fn fill<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

pub fn parse_word(s: &str) -> Result<DnaWord> {
    s.parse::<DnaWord>().map_err(|e| UsageError(e.to_string()).into())
}

/// Bad input that should exit with the usage status.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn file_fills_only_unset_fields() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# comment\nN = 500\nmu=2e-8\nwords=ACGT, AACC").unwrap();
        let mut o = Overrides {
            n: Some(7),
            ..Default::default()
        };
        o.merge_file(f.path()).unwrap();
        assert_eq!(o.n, Some(7));
        assert_eq!(o.mu, Some(2e-8));
        assert_eq!(o.words.unwrap(), vec!["ACGT", "AACC"]);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "Ne=500").unwrap();
        let err = Overrides::default().merge_file(f.path()).unwrap_err();
        assert!(err.to_string().contains("unknown key"));
    }
}
