//! Flat `key = value` files with `[section]` headers.
//!
//! Sections may repeat (atom files list one `[line]` per excited level).
//! Keys are unique within a section. `#` starts a comment.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    /// Empty for the keys above the first header.
    pub name: String,
    pub line: usize,
    pub path: PathBuf,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub path: PathBuf,
    pub root: Section,
    pub sections: Vec<Section>,
}

fn strip_comment(s: &str) -> &str {
    match s.find('#') {
        Some(i) => &s[..i],
        None => s,
    }
}

impl Document {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| CliError::Parse { path: path.into(), line, msg };
        let new_section = |name: &str, line: usize| Section {
            name: name.to_string(),
            line,
            path: path.into(),
            entries: Vec::new(),
        };
        let mut root = new_section("", 0);
        let mut sections: Vec<Section> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let s = strip_comment(raw).trim();
            if s.is_empty() {
                continue;
            }
            if let Some(rest) = s.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|x| !x.is_empty() && x.chars().all(|c| c.is_ascii_alphanumeric() || "_.-".contains(c)))
                    .ok_or_else(|| err(n, format!("bad section header '{s}'")))?;
                sections.push(new_section(name, n));
                continue;
            }
            let (k, v) = s.split_once('=').ok_or_else(|| err(n, format!("expected key = value, got '{s}'")))?;
            let key = k.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(err(n, format!("bad key '{key}'")));
            }
            let mut value = v.trim();
            if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
                value = &value[1..value.len() - 1];
            }
            let target = sections.last_mut().unwrap_or(&mut root);
            if let Some(prev) = target.get(key) {
                return Err(err(n, format!("duplicate key '{key}' (first set on line {})", prev.line)));
            }
            target.entries.push(Entry { key: key.to_string(), value: value.to_string(), line: n });
        }
        Ok(Document { path: path.into(), root, sections })
    }

    pub fn sections_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Section> + 'a {
        self.sections.iter().filter(move |s| s.name == name)
    }

    /// The single section called `name`, if present.
    pub fn section(&self, name: &str) -> Result<Option<&Section>> {
        let mut it = self.sections.iter().filter(|s| s.name == name);
        let first = it.next();
        if let Some(dup) = it.next() {
            return Err(CliError::Parse {
                path: self.path.clone(),
                line: dup.line,
                msg: format!("section [{name}] appears more than once"),
            });
        }
        Ok(first)
    }

    /// Rejects sections not in `allowed`.
    pub fn check_sections(&self, allowed: &[&str]) -> Result<()> {
        match self.sections.iter().find(|s| !allowed.contains(&s.name.as_str())) {
            Some(s) => Err(CliError::Parse {
                path: self.path.clone(),
                line: s.line,
                msg: format!("unknown section [{}]", s.name),
            }),
            None => Ok(()),
        }
    }
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.get(key).map(|e| e.value.as_str())
    }

    pub fn error(&self, line: usize, msg: impl Into<String>) -> CliError {
        CliError::Parse { path: self.path.clone(), line, msg: msg.into() }
    }

    pub fn parse<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|x| self.error(e.line, format!("{key}: cannot parse '{}': {x}", e.value))),
        }
    }

    pub fn require<T>(&self, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.parse(key)?.ok_or_else(|| {
            let what = if self.name.is_empty() { "top level".to_string() } else { format!("[{}]", self.name) };
            self.error(self.line, format!("missing key '{key}' in {what}"))
        })
    }

    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
            Some(e) => Err(self.error(e.line, format!("unknown key '{}'", e.key))),
            None => Ok(()),
        }
    }
}
