mod support;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use graphgen::client::{LlmClient, MockBackend, ModelEndpoint, TranscriptStore};
use graphgen::graph::write_graph_lines;
use graphgen::molhiv::ConstantScorer;
use graphgen::rules::{generate_exemplar, RuleSpec};
use graphgen::runner::{execute, Metric, RunConfig, Runner};

fn mock_client(backend: MockBackend) -> LlmClient {
    LlmClient::new(Box::new(backend), ModelEndpoint::default())
}

const TREES: &str = r#"
trials = 10
count = 10
styles = ["zero-shot", "few-shot"]
metrics = ["valid"]
[[setting]]
family = "rule"
kind = "tree"
n = 8
"#;

#[test]
fn golden_transcripts_replay_byte_identical() {
    if std::env::var_os("GRAPHGEN_BLESS").is_some() {
        support::golden::bless();
    }
    let out = tempfile::tempdir().unwrap();
    let (expected, actual) = support::golden::replay_into(out.path());
    assert_eq!(actual, expected);
    assert!(out.path().join("report.csv").exists());
    assert!(out.path().join("trials.jsonl").exists());
}

#[test]
fn recorded_runs_replay_to_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::load(&support::golden::dir().join("run.toml")).unwrap();
    cfg.replay = None;
    let path = dir.path().join("transcripts.jsonl");
    let client = mock_client(support::golden::scripted_model())
        .with_store(Arc::new(TranscriptStore::open(&path).unwrap()));
    let live = Runner::new(&cfg).run(&client).unwrap();

    cfg.replay = Some(path);
    let replayed = execute(&cfg, None, &dir.path().join("replay")).unwrap();
    assert_eq!(live.table.to_text(), replayed.table.to_text());
    assert_eq!(live.records.len(), replayed.records.len());
}

#[test]
fn early_trials_do_not_depend_on_trial_count() {
    let prompts = |trials: usize| {
        let seen: Arc<Mutex<BTreeMap<String, String>>> = Arc::default();
        let sink = seen.clone();
        let mut cfg: RunConfig = TREES.parse().unwrap();
        cfg.trials = trials;
        let backend = MockBackend::new(move |req, _| {
            sink.lock().unwrap().insert(req.request_id.to_string(), req.bundle.user_text.clone());
            Ok(String::new())
        });
        Runner::new(&cfg).run(&mock_client(backend)).unwrap();
        Arc::try_unwrap(seen).unwrap().into_inner().unwrap()
    };
    let five = prompts(5);
    let ten = prompts(10);
    assert_eq!(five.len(), 10);
    assert_eq!(ten.len(), 20);
    for (id, text) in &five {
        assert_eq!(ten.get(id), Some(text), "{id}");
    }
    // Exemplars differ from trial to trial.
    assert_ne!(five["s00/few-shot/t000"], five["s00/few-shot/t001"]);
}

#[test]
fn concurrency_stays_bounded() {
    let mut cfg: RunConfig = TREES.parse().unwrap();
    cfg.max_in_flight = 3;
    cfg.trials = 8;
    let client = mock_client(MockBackend::constant("(1, [])").with_delay(Duration::from_millis(15)));
    let out = Runner::new(&cfg).run(&client).unwrap();
    assert_eq!(out.records.len(), 16);
    let peak = client.peak_in_flight();
    assert!((2..=3).contains(&peak), "peak {peak}");
}

#[test]
fn all_valid_replies_score_full_marks() {
    let spec = RuleSpec::tree(8);
    let graphs: Vec<_> = (0..10).map(|s| generate_exemplar(&spec, 100 + s).unwrap()).collect();
    let cfg: RunConfig = TREES.parse().unwrap();
    let out = Runner::new(&cfg).run(&mock_client(MockBackend::constant(write_graph_lines(&graphs)))).unwrap();
    let text = out.table.to_text();
    assert!(text.lines().any(|l| l.starts_with("Zero-shot") && l.contains("100.0 ± 0.0")), "{text}");
    assert!(text.contains("failed trials: 0 of 20"));
}

#[test]
fn unparseable_replies_score_zero_with_a_note() {
    let cfg: RunConfig = TREES.parse().unwrap();
    let out = Runner::new(&cfg).run(&mock_client(MockBackend::constant("I cannot do that."))).unwrap();
    let cell = out.table.cell(None, "Few-shot", "Trees", None).unwrap();
    assert_eq!((cell.mean, cell.trial_count), (0.0, 10));
    assert!(out.table.footer.iter().any(|f| f.contains("Trees/Few-shot: no parseable output")));
}

#[test]
fn backend_errors_fail_single_trials() {
    let cfg: RunConfig = TREES.parse().unwrap();
    let backend = MockBackend::new(|req, _| {
        if req.request_id.ends_with("t003") {
            Err(graphgen::client::ClientError::Status(400))
        } else {
            Ok("(1, [])".into())
        }
    });
    let out = Runner::new(&cfg).run(&mock_client(backend)).unwrap();
    assert_eq!(out.records.iter().filter(|r| r.failed()).count(), 2);
    assert_eq!(out.table.cell(None, "Zero-shot", "Trees", None).unwrap().trial_count, 9);
    assert!(out.table.footer.iter().any(|f| f == "failed trials: 2 of 20"));
}

#[test]
fn distribution_run_reports_p_columns() {
    let cfg: RunConfig = r#"
        trials = 2
        styles = ["zero-shot", "few-shot"]
        group_title = "p"
        [[setting]]
        family = "distribution"
        group = "p=0.2"
        task = "trees-or-cycles"
        p = 0.2
        [[setting]]
        family = "distribution"
        group = "p=0.8"
        task = "trees-or-cycles"
        p = 0.8
    "#
    .parse()
    .unwrap();
    let reply = "p = 0.5\n(3, [(1, 2), (2, 3)])\n(3, [(1, 2), (2, 3), (3, 1)])";
    let out = Runner::new(&cfg).run(&mock_client(MockBackend::constant(reply))).unwrap();
    assert_eq!(out.table.subcolumns, vec!["p_pred", "p_gen", "Valid"]);
    let p_pred = out.table.cell(Some("p=0.8"), "Few-shot", "trees-or-cycles", Some("p_pred")).unwrap();
    let p_gen = out.table.cell(Some("p=0.2"), "Zero-shot", "trees-or-cycles", Some("p_gen")).unwrap();
    assert_eq!((p_pred.mean, p_gen.mean), (50.0, 50.0));
    assert!(out.table.to_text().lines().nth(2).unwrap().starts_with("p  "));
}

#[test]
fn property_run_rectifies_scores() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("hiv.csv"),
        "smiles,HIV_active\nCCO,1\nc1ccccc1,1\nCCN,1\nCC(=O)O,0\nCCCl,1\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        r#"
        trials = 3
        styles = ["few-shot", "few-shot-cot"]
        [[setting]]
        family = "property"
        dataset = "hiv.csv"
        positives = 3
        scorer = { constant = 0.264 }
        "#,
    )
    .unwrap();
    let cfg = RunConfig::load(&dir.path().join("run.toml")).unwrap();
    let out = Runner::new(&cfg)
        .scorer(Arc::new(ConstantScorer(0.327)))
        .run(&mock_client(MockBackend::constant("CCO\nCCCC\nCCCC\nnot a molecule")))
        .unwrap();
    let rec = &out.records[0];
    assert!((rec.values[&Metric::ScoreRaw] - 32.7).abs() < 1e-9);
    assert!((rec.values[&Metric::ScoreRectified] - 48.71).abs() < 0.05);
    let novel = out.table.cell(None, "Few-shot", "Molecules", Some("Novel")).unwrap();
    assert!(novel.mean > 0.0 && novel.mean < 100.0);
}

#[test]
fn property_runs_reject_zero_shot_styles() {
    let cfg: RunConfig = r#"
        styles = ["zero-shot"]
        [[setting]]
        family = "property"
        dataset = "missing.csv"
        scorer = { constant = 0.5 }
    "#
    .parse()
    .unwrap();
    assert!(Runner::new(&cfg).run(&mock_client(MockBackend::constant(""))).is_err());
}
