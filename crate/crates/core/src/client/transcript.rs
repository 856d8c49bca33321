use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{Backend, ClientError, CompletionRequest, ModelEndpoint, Reply, Usage};
use crate::prompt::PromptBundle;

/// Where a request's randomness came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SeedLineage {
    pub master_seed: u64,
    pub setting: usize,
    pub trial: usize,
    pub trial_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub attempt: usize,
    pub outcome: String,
    pub elapsed_ms: u64,
}

/// One line of a transcript file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub request_id: String,
    pub endpoint: ModelEndpoint,
    pub bundle: PromptBundle,
    pub prompt_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub attempts: Vec<AttemptRecord>,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage: Option<Usage>,
    pub lineage: SeedLineage,
    pub recorded_at: u64,
}

impl TranscriptRecord {
    pub fn new(
        request_id: &str,
        bundle: &PromptBundle,
        endpoint: &ModelEndpoint,
        outcome: &Result<Reply, ClientError>,
        attempts: Vec<AttemptRecord>,
        elapsed: Duration,
        lineage: SeedLineage,
    ) -> Self {
        TranscriptRecord {
            request_id: request_id.to_string(),
            endpoint: endpoint.clone(),
            bundle: bundle.clone(),
            prompt_hash: bundle.content_hash(),
            response: outcome.as_ref().ok().map(|r| r.text.clone()),
            error: outcome.as_ref().err().map(ToString::to_string),
            attempts,
            elapsed_ms: elapsed.as_millis() as u64,
            usage: outcome.as_ref().ok().and_then(|r| r.usage),
            lineage,
            recorded_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

/// Append-only JSON-lines transcript file; appends are serialized.
pub struct TranscriptStore {
    file: Mutex<File>,
}

impl TranscriptStore {
    pub fn open(path: &Path) -> Result<Self, ClientError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(store_error)?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(store_error)?;
        Ok(TranscriptStore {
            file: Mutex::new(file),
        })
    }

    pub fn append(&self, record: &TranscriptRecord) -> Result<(), ClientError> {
        let mut line = serde_json::to_string(record).map_err(|e| ClientError::Store(e.to_string()))?;
        line.push('\n');
        let mut file = self.file.lock().expect("transcript lock");
        file.write_all(line.as_bytes()).map_err(store_error)?;
        file.flush().map_err(store_error)
    }
}

fn store_error(e: std::io::Error) -> ClientError {
    ClientError::Store(e.to_string())
}

/// Successful responses of a transcript file, keyed by request id. Later
/// records for the same id replace earlier ones.
#[derive(Debug, Clone, Default)]
pub struct TranscriptIndex {
    records: HashMap<String, TranscriptRecord>,
}

impl TranscriptIndex {
    pub fn load(path: &Path) -> Result<Self, ClientError> {
        let file = File::open(path).map_err(store_error)?;
        let mut records = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(store_error)?;
            if line.trim().is_empty() {
                continue;
            }
            let record: TranscriptRecord = serde_json::from_str(&line)
                .map_err(|e| ClientError::Store(format!("line {}: {e}", i + 1)))?;
            records.push(record);
        }
        Ok(Self::from_records(records))
    }

    pub fn from_records(records: impl IntoIterator<Item = TranscriptRecord>) -> Self {
        let records = records
            .into_iter()
            .filter(|r| r.response.is_some())
            .map(|r| (r.request_id.clone(), r))
            .collect();
        TranscriptIndex { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, request_id: &str) -> Option<&TranscriptRecord> {
        self.records.get(request_id)
    }

    /// The recorded response text, byte for byte.
    pub fn replay(&self, request_id: &str) -> Result<&str, ClientError> {
        self.get(request_id)
            .and_then(|r| r.response.as_deref())
            .ok_or_else(|| ClientError::NotFound(request_id.to_string()))
    }
}

/// Answers from a transcript index, refusing prompts that changed since
/// recording.
pub struct ReplayBackend {
    index: TranscriptIndex,
}

impl ReplayBackend {
    pub fn new(index: TranscriptIndex) -> Self {
        ReplayBackend { index }
    }
}

impl Backend for ReplayBackend {
    fn send(&self, request: &CompletionRequest<'_>) -> Result<Reply, ClientError> {
        let record = self
            .index
            .get(request.request_id)
            .ok_or_else(|| ClientError::NotFound(request.request_id.to_string()))?;
        if record.prompt_hash != request.bundle.content_hash() {
            return Err(ClientError::PromptMismatch(request.request_id.to_string()));
        }
        Ok(Reply {
            text: self.index.replay(request.request_id)?.to_string(),
            usage: record.usage,
        })
    }
}
