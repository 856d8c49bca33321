use std::path::{Path, PathBuf};
use std::sync::Arc;

use graphgen::client::{LlmClient, MockBackend, TranscriptStore};
use graphgen::graph::{write_graph_lines, Graph};
use graphgen::prompt::ExpectedOutput;
use graphgen::rules::{generate_exemplar, RuleSpec};
use graphgen::runner::{execute, RunConfig, Runner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden")
}

fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3))
}

/// A stand-in model: mostly valid graphs for the requested rule, some
/// near misses, some duplicates, keyed by request id.
pub fn scripted_model() -> MockBackend {
    MockBackend::new(|req, _| {
        if req.request_id.starts_with("s03") {
            return Ok("Sorry, I cannot draw wheels.".into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(fnv(req.request_id));
        let count = match req.bundle.expected_output {
            ExpectedOutput::GraphList(c) => c,
            other => other.count(),
        };
        let spec = if req.request_id.starts_with("s00") {
            RuleSpec::tree(6)
        } else if req.request_id.starts_with("s01") {
            RuleSpec::cycle(5)
        } else {
            RuleSpec::k_color(6, Some(7), 3)
        };
        let mut graphs: Vec<Graph> = Vec::new();
        for _ in 0..count {
            let g = match rng.random_range(0..10) {
                0..=5 => generate_exemplar(&spec, rng.random()).unwrap(),
                6 | 7 => match graphs.last() {
                    Some(g) => g.clone(),
                    None => generate_exemplar(&spec, rng.random()).unwrap(),
                },
                _ => super::random_graph(spec.n, 0.4, &mut rng),
            };
            graphs.push(g);
        }
        Ok(format!("Here are the graphs:\n{}", write_graph_lines(&graphs)))
    })
}

/// Records the golden transcripts and report with the scripted model.
pub fn bless() {
    let dir = dir();
    let mut cfg = RunConfig::load(&dir.join("run.toml")).unwrap();
    cfg.replay = None;
    let path = dir.join("transcripts.jsonl");
    let _ = std::fs::remove_file(&path);
    let store = Arc::new(TranscriptStore::open(&path).unwrap());
    let client = LlmClient::new(Box::new(scripted_model()), cfg.endpoint.clone()).with_store(store);
    let out = Runner::new(&cfg).run(&client).unwrap();
    std::fs::write(dir.join("report.txt"), out.table.to_text()).unwrap();
}

/// Replays the checked-in transcripts; returns (expected, actual) report text.
pub fn replay_into(out: &Path) -> (String, String) {
    let dir = dir();
    let cfg = RunConfig::load(&dir.join("run.toml")).unwrap();
    execute(&cfg, None, out).unwrap();
    (
        std::fs::read_to_string(dir.join("report.txt")).unwrap(),
        std::fs::read_to_string(out.join("report.txt")).unwrap(),
    )
}
