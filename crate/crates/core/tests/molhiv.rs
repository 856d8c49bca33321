use graphgen::molhiv::{
    load_dataset, molecule_novel_unique, rectify, score_molecules, CommandScorer, ConfusionMatrix, MolhivError,
    RectificationModel, Scorer,
};
use num_rational::Ratio;

#[test]
fn reference_rates_come_from_the_confusion_matrix() {
    let m = ConfusionMatrix::REFERENCE;
    // 4145 / (35539 + 4145) and 810 / (633 + 810).
    assert_eq!(m.fpr().unwrap(), Ratio::new(4145, 39684));
    assert_eq!(m.tpr().unwrap(), Ratio::new(810, 1443));
}

#[test]
fn rectification_inverts_the_mixture() {
    let model = RectificationModel::default();
    for c in [0.0, 0.1, 0.35, 0.9, 1.0] {
        let back = rectify(model.forward(c), &model).unwrap();
        assert!((back.value - c).abs() < 1e-12);
        assert!(!back.clamped);
    }
    let low = rectify(0.01, &model).unwrap();
    assert_eq!((low.value, low.clamped), (0.0, true));
    assert!(RectificationModel::new(0.6, 0.5).is_err());
}

#[test]
fn command_scorer_speaks_lines() {
    let scorer = CommandScorer {
        program: "sh".into(),
        args: vec!["-c".into(), "while read -r l; do echo 0.25; done".into()],
    };
    let smiles: Vec<String> = ["CCO", "C1CC", "c1ccccc1"].map(String::from).to_vec();
    let scores = score_molecules(&smiles, &scorer).unwrap();
    assert_eq!(scores.iter().map(|s| s.score).collect::<Vec<_>>(), vec![0.25, 0.0, 0.25]);
    assert!(scores[1].invalid);
}

#[test]
fn scorer_protocol_violations_are_reported() {
    let short = CommandScorer { program: "sh".into(), args: vec!["-c".into(), "cat >/dev/null; echo 0.5".into()] };
    let two = vec!["CCO".to_string(), "CCN".to_string()];
    assert!(matches!(score_molecules(&two, &short), Err(MolhivError::ScorerProtocolViolation(_))));
    let junk = CommandScorer { program: "sh".into(), args: vec!["-c".into(), "cat >/dev/null; echo yes".into()] };
    assert!(matches!(junk.score(&two[..1]), Err(MolhivError::ScorerProtocolViolation(_))));
    let missing = CommandScorer { program: "/nonexistent/scorer".into(), args: vec![] };
    assert!(matches!(missing.score(&two), Err(MolhivError::ScorerUnavailable(_))));
}

#[test]
fn dataset_loading_keeps_labels_and_rejects_bad_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hiv.csv");
    std::fs::write(&path, "smiles,activity,HIV_active\nCCO,CI,0\nc1ccccc1,CM,1\nCCN,CI,maybe\n").unwrap();
    let ds = load_dataset(&path).unwrap();
    assert_eq!(ds.records.len(), 2);
    assert_eq!(ds.positives().count(), 1);
    assert_eq!(ds.rejects.len(), 1);
    assert!(load_dataset(&dir.path().join("absent.csv")).is_err());
}

#[test]
fn novelty_and_uniqueness_use_string_identity() {
    let generated: Vec<String> = ["CCO", " CCO", "CCN", "CCC"].map(String::from).to_vec();
    let exemplars = vec!["CCN".to_string()];
    assert_eq!(molecule_novel_unique(&generated, &exemplars), Some((75.0, 75.0)));
    assert_eq!(molecule_novel_unique(&[], &exemplars), None);
}
