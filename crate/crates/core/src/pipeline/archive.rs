use std::collections::HashMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::info;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::PerformanceRecord;
use crate::geometry::io::{check_header, parse_field, read_genotypes, read_profile, write_genotypes, write_profile};
use crate::geometry::{DesignGenotype, FeatureVector, SpokeProfile, FEATURE_COUNT};

pub const ARCHIVE_SCHEMA_VERSION: u32 = 1;
pub const GENERATOR: &str = "ChaCha8Rng";

const MANIFEST: &str = "manifest.json";
const GENOTYPES: &str = "genotypes.csv";
const FEATURES: &str = "features.csv";
const RECORDS: &str = "records.csv";
const LOCK: &str = "archive.lock";
pub const PROFILES_DIR: &str = "profiles";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Proxy,
    Ingested,
    SurrogatePredicted,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Proxy => "proxy",
            Provenance::Ingested => "ingested",
            Provenance::SurrogatePredicted => "surrogate-predicted",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proxy" => Ok(Provenance::Proxy),
            "ingested" => Ok(Provenance::Ingested),
            "surrogate-predicted" => Ok(Provenance::SurrogatePredicted),
            _ => Err(Error::Data(format!("unknown provenance `{s}`"))),
        }
    }
}

/// A performance record with its origin and logical sequence number.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchivedRecord {
    pub record: PerformanceRecord,
    pub provenance: Provenance,
    pub sequence: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchivedDesign {
    pub design_id: String,
    /// Absent for designs ingested from an external dataset.
    pub genotype: Option<DesignGenotype>,
    pub features: FeatureVector,
    pub sequence: u64,
    pub records: Vec<ArchivedRecord>,
}

impl ArchivedDesign {
    pub fn record(&self, provenance: Provenance) -> Option<&PerformanceRecord> {
        self.records
            .iter()
            .find(|r| r.provenance == provenance)
            .map(|r| &r.record)
    }

    /// Ground-truth record for training: proxy first, then ingested.
    pub fn training_record(&self) -> Option<&PerformanceRecord> {
        self.record(Provenance::Proxy)
            .or_else(|| self.record(Provenance::Ingested))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEvent {
    pub sequence: u64,
    pub command: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub generator: String,
    pub base_record: PerformanceRecord,
    pub next_sequence: u64,
    pub design_count: usize,
    pub events: Vec<ManifestEvent>,
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

/// Directory-backed, append-only design store.
///
/// Layout: `manifest.json`, `genotypes.csv`, `features.csv`, `records.csv`
/// and `profiles/<design_id>.csv`. Designs and records can be added but
/// never changed or removed. Sequence numbers are logical clocks, so
/// identical runs produce identical files. Holding the value holds an
/// advisory lock file.
pub struct DesignArchive {
    root: PathBuf,
    manifest: Manifest,
    designs: Vec<ArchivedDesign>,
    index: HashMap<String, usize>,
    _lock: LockGuard,
}

impl fmt::Debug for DesignArchive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DesignArchive")
            .field("root", &self.root)
            .field("designs", &self.designs.len())
            .finish()
    }
}

fn lock(root: &Path) -> Result<LockGuard> {
    let path = root.join(LOCK);
    match OpenOptions::new().write(true).create_new(true).open(&path) {
        Ok(_) => Ok(LockGuard(path)),
        Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Config(format!(
            "archive {} is locked by another command (remove {} if stale)",
            root.display(),
            path.display()
        ))),
        Err(e) => Err(Error::io(path, e)),
    }
}

impl DesignArchive {
    /// Opens the archive at `root`, creating an empty one if absent.
    pub fn open_or_create(root: impl AsRef<Path>, base_record: PerformanceRecord) -> Result<Self> {
        let root = root.as_ref();
        if root.join(MANIFEST).is_file() {
            return Self::open(root);
        }
        fs::create_dir_all(root.join(PROFILES_DIR)).map_err(|e| Error::io(root, e))?;
        let guard = lock(root)?;
        let archive = Self {
            root: root.to_path_buf(),
            manifest: Manifest {
                schema_version: ARCHIVE_SCHEMA_VERSION,
                generator: GENERATOR.into(),
                base_record,
                next_sequence: 0,
                design_count: 0,
                events: Vec::new(),
            },
            designs: Vec::new(),
            index: HashMap::new(),
            _lock: guard,
        };
        archive.save()?;
        Ok(archive)
    }

    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref();
        let manifest_path = root.join(MANIFEST);
        let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        if manifest.schema_version != ARCHIVE_SCHEMA_VERSION {
            return Err(Error::Data(format!(
                "archive schema version {} is not supported",
                manifest.schema_version
            )));
        }
        let guard = lock(root)?;
        let mut archive = Self {
            root: root.to_path_buf(),
            manifest,
            designs: Vec::new(),
            index: HashMap::new(),
            _lock: guard,
        };
        archive.load_tables()?;
        if archive.designs.len() != archive.manifest.design_count {
            return Err(Error::Data(format!(
                "manifest lists {} designs but the tables hold {}",
                archive.manifest.design_count,
                archive.designs.len()
            )));
        }
        Ok(archive)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn base_record(&self) -> PerformanceRecord {
        self.manifest.base_record
    }

    pub fn designs(&self) -> &[ArchivedDesign] {
        &self.designs
    }

    pub fn len(&self) -> usize {
        self.designs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.designs.is_empty()
    }

    pub fn get(&self, design_id: &str) -> Option<&ArchivedDesign> {
        self.index.get(design_id).map(|&i| &self.designs[i])
    }

    pub fn profile_path(&self, design_id: &str) -> PathBuf {
        self.root.join(PROFILES_DIR).join(format!("{design_id}.csv"))
    }

    pub fn read_profile(&self, design_id: &str) -> Result<SpokeProfile> {
        let path = self.profile_path(design_id);
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        read_profile(design_id, file)
    }

    fn tick(&mut self) -> u64 {
        let s = self.manifest.next_sequence;
        self.manifest.next_sequence += 1;
        s
    }

    /// Adds a design; the id must be new. The profile, when given, is
    /// written immediately.
    pub fn add_design(
        &mut self,
        design_id: &str,
        genotype: Option<DesignGenotype>,
        features: FeatureVector,
        profile: Option<&SpokeProfile>,
    ) -> Result<()> {
        if self.index.contains_key(design_id) {
            return Err(Error::Data(format!("design id {design_id} already archived")));
        }
        if design_id.is_empty() || design_id.contains(['/', '\\', ',']) {
            return Err(Error::Data(format!("design id `{design_id}` is not file-safe")));
        }
        if let Some(p) = profile {
            let path = self.profile_path(design_id);
            let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
            write_profile(p, BufWriter::new(file))?;
        }
        let sequence = self.tick();
        self.index.insert(design_id.to_string(), self.designs.len());
        self.designs.push(ArchivedDesign {
            design_id: design_id.to_string(),
            genotype,
            features,
            sequence,
            records: Vec::new(),
        });
        self.manifest.design_count = self.designs.len();
        Ok(())
    }

    /// Attaches a record. A design holds at most one record per provenance.
    pub fn add_record(&mut self, design_id: &str, record: PerformanceRecord, provenance: Provenance) -> Result<()> {
        record.validate()?;
        let i = *self
            .index
            .get(design_id)
            .ok_or_else(|| Error::Data(format!("unknown design {design_id}")))?;
        if self.designs[i].record(provenance).is_some() {
            return Err(Error::Data(format!("{design_id} already has a {provenance} record")));
        }
        let sequence = self.tick();
        self.designs[i].records.push(ArchivedRecord {
            record,
            provenance,
            sequence,
        });
        Ok(())
    }

    pub fn log_event(&mut self, command: &str, detail: impl Into<String>) {
        let sequence = self.tick();
        self.manifest.events.push(ManifestEvent {
            sequence,
            command: command.into(),
            detail: detail.into(),
        });
    }

    /// Rewrites manifest and tables from memory.
    pub fn save(&self) -> Result<()> {
        let write = |name: &str, f: &dyn Fn(File) -> Result<()>| -> Result<()> {
            let path = self.root.join(name);
            let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
            f(file)
        };
        write(MANIFEST, &|file| {
            serde_json::to_writer_pretty(BufWriter::new(file), &self.manifest)?;
            Ok(())
        })?;
        write(GENOTYPES, &|file| {
            write_genotypes(
                self.designs
                    .iter()
                    .filter_map(|d| d.genotype.as_ref().map(|g| (d.design_id.as_str(), g))),
                BufWriter::new(file),
            )
        })?;
        write(FEATURES, &|file| {
            let mut w = csv::Writer::from_writer(BufWriter::new(file));
            let mut header = vec!["design_id".to_string(), "sequence".to_string()];
            header.extend(FeatureVector::names());
            w.write_record(&header)?;
            for d in &self.designs {
                let mut row = vec![d.design_id.clone(), d.sequence.to_string()];
                row.extend(d.features.to_array().iter().map(f64::to_string));
                w.write_record(&row)?;
            }
            w.flush().map_err(|e| Error::io(FEATURES, e))
        })?;
        write(RECORDS, &|file| {
            let mut w = csv::Writer::from_writer(BufWriter::new(file));
            w.write_record(RECORD_HEADER)?;
            let mut rows: Vec<(&str, &ArchivedRecord)> = self
                .designs
                .iter()
                .flat_map(|d| d.records.iter().map(move |r| (d.design_id.as_str(), r)))
                .collect();
            rows.sort_by_key(|(_, r)| r.sequence);
            for (id, r) in rows {
                let mut row = vec![id.to_string()];
                row.extend(r.record.to_array().iter().map(f64::to_string));
                row.push(r.provenance.to_string());
                row.push(r.sequence.to_string());
                w.write_record(&row)?;
            }
            w.flush().map_err(|e| Error::io(RECORDS, e))
        })?;
        info!("archive {} saved ({} designs)", self.root.display(), self.designs.len());
        Ok(())
    }

    fn load_tables(&mut self) -> Result<()> {
        let open = |name: &str| {
            let path = self.root.join(name);
            File::open(&path).map_err(|e| Error::io(&path, e))
        };
        let genotypes: HashMap<String, DesignGenotype> = read_genotypes(open(GENOTYPES)?)?.into_iter().collect();

        let mut r = csv::Reader::from_reader(open(FEATURES)?);
        let mut header = vec!["design_id".to_string(), "sequence".to_string()];
        header.extend(FeatureVector::names());
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        check_header(r.headers()?, &header)?;
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = i + 1;
            let id = rec[0].to_string();
            let sequence = parse_sequence(&rec[1], row)?;
            let mut values = [0.0; FEATURE_COUNT];
            for (j, v) in values.iter_mut().enumerate() {
                *v = parse_field(&rec, j + 2, row)?;
            }
            if self.index.contains_key(&id) {
                return Err(Error::Parse {
                    row,
                    message: format!("duplicate design id {id}"),
                });
            }
            self.index.insert(id.clone(), self.designs.len());
            self.designs.push(ArchivedDesign {
                genotype: genotypes.get(&id).copied(),
                design_id: id,
                features: FeatureVector::from_array(&values),
                sequence,
                records: Vec::new(),
            });
        }

        let mut r = csv::Reader::from_reader(open(RECORDS)?);
        check_header(r.headers()?, &RECORD_HEADER)?;
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = i + 1;
            let mut values = [0.0; 5];
            for (j, v) in values.iter_mut().enumerate() {
                *v = parse_field(&rec, j + 1, row)?;
            }
            let provenance: Provenance = rec[6].parse()?;
            let sequence = parse_sequence(&rec[7], row)?;
            let idx = *self.index.get(&rec[0]).ok_or_else(|| Error::Parse {
                row,
                message: format!("record for unknown design {}", &rec[0]),
            })?;
            self.designs[idx].records.push(ArchivedRecord {
                record: PerformanceRecord::from_array_unchecked(values),
                provenance,
                sequence,
            });
        }
        Ok(())
    }
}

const RECORD_HEADER: [&str; 8] = ["design_id", "rfc", "rft", "sedc", "sedt", "vib_rms", "provenance", "sequence"];

fn parse_sequence(s: &str, row: usize) -> Result<u64> {
    s.parse().map_err(|_| Error::Parse {
        row,
        message: format!("bad sequence number `{s}`"),
    })
}
