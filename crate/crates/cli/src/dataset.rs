//! Dataset layouts: glob patterns for images, FOV masks and references,
//! paired by a key extracted from each file name.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use regex::Regex;

/// Leading run of characters before the first `_` or `.`, so that
/// `01_test.tif`, `01_test_mask.gif` and `01_manual1.gif` share the key `01`.
pub const DEFAULT_STEM_REGEX: &str = r"^([^_.]+)";

#[derive(Debug, Clone)]
pub struct DatasetLayout {
    pub image_glob: String,
    pub fov_glob: Option<String>,
    pub reference_glob: Option<String>,
    pub stem: Regex,
}

impl PartialEq for DatasetLayout {
    fn eq(&self, o: &Self) -> bool {
        self.image_glob == o.image_glob
            && self.fov_glob == o.fov_glob
            && self.reference_glob == o.reference_glob
            && self.stem.as_str() == o.stem.as_str()
    }
}

/// One image with its companion files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub image: PathBuf,
    pub fov: Option<PathBuf>,
    pub reference: Option<PathBuf>,
}

impl DatasetLayout {
    pub fn new(
        image_glob: String,
        fov_glob: Option<String>,
        reference_glob: Option<String>,
        stem_regex: &str,
    ) -> Result<Self, String> {
        let stem = Regex::new(stem_regex).map_err(|e| format!("`stem-regex`: {e}"))?;
        Ok(Self {
            image_glob,
            fov_glob,
            reference_glob,
            stem,
        })
    }

    /// Pairing key of a file: the first capture group of the stem regex on
    /// the file name, or the whole match if the regex has no group.
    pub fn key_of(&self, path: &Path) -> Option<String> {
        key_of(&self.stem, path)
    }

    /// Expands the globs and pairs files by key. Every image must have a
    /// FOV mask and a reference when the corresponding glob is set.
    pub fn entries(&self) -> Result<Vec<Entry>, String> {
        let images = self.keyed(&self.image_glob)?;
        if images.is_empty() {
            return Err(format!("`{}` matches no file", self.image_glob));
        }
        let fovs = self
            .fov_glob
            .as_deref()
            .map(|g| self.keyed(g))
            .transpose()?;
        let refs = self
            .reference_glob
            .as_deref()
            .map(|g| self.keyed(g))
            .transpose()?;
        let lookup = |table: &Option<BTreeMap<String, PathBuf>>,
                      what: &str|
         -> Result<Vec<Option<PathBuf>>, String> {
            let Some(table) = table else {
                return Ok(vec![None; images.len()]);
            };
            let missing: Vec<&str> = images
                .keys()
                .filter(|k| !table.contains_key(*k))
                .map(String::as_str)
                .collect();
            if !missing.is_empty() {
                return Err(format!("no {what} for {}", missing.join(", ")));
            }
            Ok(images.keys().map(|k| Some(table[k].clone())).collect())
        };
        let fov = lookup(&fovs, "FOV mask")?;
        let reference = lookup(&refs, "reference")?;
        Ok(images
            .into_iter()
            .zip(fov)
            .zip(reference)
            .map(|(((key, image), fov), reference)| Entry {
                key,
                image,
                fov,
                reference,
            })
            .collect())
    }

    /// Files matching `pattern`, keyed and sorted. Two files with the same
    /// key are an error.
    pub fn keyed(&self, pattern: &str) -> Result<BTreeMap<String, PathBuf>, String> {
        keyed_files(&self.stem, pattern)
    }
}

pub fn key_of(stem: &Regex, path: &Path) -> Option<String> {
    let name = path.file_name()?.to_str()?;
    let caps = stem.captures(name)?;
    caps.get(1)
        .or_else(|| caps.get(0))
        .map(|m| m.as_str().to_string())
}

pub fn expand_glob(pattern: &str) -> Result<Vec<PathBuf>, String> {
    let paths = glob::glob(pattern).map_err(|e| format!("`{pattern}`: {e}"))?;
    let mut files = Vec::new();
    for p in paths {
        let p = p.map_err(|e| e.to_string())?;
        if p.is_file() {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

pub fn keyed_files(stem: &Regex, pattern: &str) -> Result<BTreeMap<String, PathBuf>, String> {
    let mut out = BTreeMap::new();
    for path in expand_glob(pattern)? {
        let key = key_of(stem, &path).ok_or_else(|| {
            format!(
                "{}: file name does not match the stem regex",
                path.display()
            )
        })?;
        if let Some(prev) = out.insert(key.clone(), path.clone()) {
            return Err(format!(
                "{} and {} share the key `{key}`",
                prev.display(),
                path.display()
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn touch(dir: &Path, names: &[&str]) {
        for n in names {
            fs::write(dir.join(n), b"").unwrap();
        }
    }

    #[test]
    fn default_key_matches_drive_names() {
        let re = Regex::new(DEFAULT_STEM_REGEX).unwrap();
        for name in [
            "01_test.tif",
            "01_test_mask.gif",
            "01_manual1.gif",
            "01_test_mask.png",
        ] {
            assert_eq!(key_of(&re, Path::new(name)).as_deref(), Some("01"));
        }
        let whole = Regex::new(r"^\d+").unwrap();
        assert_eq!(
            key_of(&whole, Path::new("dir/17_x.png")).as_deref(),
            Some("17")
        );
        assert_eq!(key_of(&whole, Path::new("x.png")), None);
    }

    #[test]
    fn pairs_by_key_in_sorted_order() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        fs::create_dir(d.join("img")).unwrap();
        fs::create_dir(d.join("ref")).unwrap();
        touch(&d.join("img"), &["02_test.tif", "01_test.tif"]);
        touch(
            &d.join("ref"),
            &["01_manual1.gif", "02_manual1.gif", "03_manual1.gif"],
        );
        let glob = |s: &str| d.join(s).to_string_lossy().into_owned();
        let layout = DatasetLayout::new(
            glob("img/*.tif"),
            None,
            Some(glob("ref/*.gif")),
            DEFAULT_STEM_REGEX,
        )
        .unwrap();
        let e = layout.entries().unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].key, "01");
        assert!(e[1].reference.as_ref().unwrap().ends_with("02_manual1.gif"));
        assert!(e[0].fov.is_none());

        fs::remove_file(d.join("ref/02_manual1.gif")).unwrap();
        let err = layout.entries().unwrap_err();
        assert!(err.contains("02"), "{err}");

        let empty = DatasetLayout::new(glob("none/*.tif"), None, None, DEFAULT_STEM_REGEX).unwrap();
        assert!(empty.entries().is_err());
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), &["01_a.png", "01_b.png"]);
        let re = Regex::new(DEFAULT_STEM_REGEX).unwrap();
        let pattern = dir.path().join("*.png").to_string_lossy().into_owned();
        assert!(keyed_files(&re, &pattern).is_err());
        assert!(DatasetLayout::new(pattern, None, None, "(").is_err());
    }
}
