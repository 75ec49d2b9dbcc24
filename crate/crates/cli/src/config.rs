//! Flat key=value config files. One pair per line, `#` starts a comment,
//! flags always win over file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use hypodx::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected key=value, found {raw:?}"),
                });
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                Error::Usage(format!("config key {key}={raw:?} did not parse: {e}"))
            }),
        }
    }

    /// flag > config file > default.
    pub fn resolve<T: FromStr + Clone>(
        &self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn resolve_opt<T: FromStr + Clone>(&self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parse_and_precedence() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# comment\nfolds = 5\nseed=9  # trailing\n\nmodel=cnn").unwrap();
        let cfg = FileConfig::load(Some(f.path())).unwrap();
        assert_eq!(cfg.get::<usize>("folds").unwrap(), Some(5));
        assert_eq!(cfg.get::<u64>("seed").unwrap(), Some(9));
        assert_eq!(cfg.get::<String>("model").unwrap().as_deref(), Some("cnn"));
        assert_eq!(cfg.get::<usize>("missing").unwrap(), None);
        // flag wins
        assert_eq!(cfg.resolve("folds", Some(10usize), 3).unwrap(), 10);
        // file beats default
        assert_eq!(cfg.resolve("folds", None, 3).unwrap(), 5);
        // default when absent
        assert_eq!(cfg.resolve("missing", None, 3).unwrap(), 3);
    }

    #[test]
    fn bad_line_is_an_error() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "just words").unwrap();
        assert!(FileConfig::load(Some(f.path())).is_err());
    }
}
