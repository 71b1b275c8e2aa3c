use qcw_core::harness::{run_batch, run_session, EveSpec, Outcome, ProtocolKind, SessionConfig};
use qcw_core::session::{export_transcript, import_transcript, parse_transcript, Party, Schedule, Session};
use qcw_core::Error;

fn recorded(kind: ProtocolKind) -> SessionConfig {
    SessionConfig::new(kind)
}

#[test]
fn transcript_round_trips_through_file() {
    let run = run_session(&recorded(ProtocolKind::CompiledOt), 11, 0).unwrap();
    assert!(!run.transcript.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    export_transcript(&path, &run.transcript).unwrap();
    assert_eq!(import_transcript(&path).unwrap(), run.transcript);
}

#[test]
fn truncated_transcript_names_line() {
    let run = run_session(&recorded(ProtocolKind::Id), 2, 0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    export_transcript(&path, &run.transcript).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let cut = format!("{}\n{}\n{}", lines[0], lines[1], &lines[2][..lines[2].len() / 2]);
    match parse_transcript(&cut) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }
    let mut gap = lines.clone();
    gap.remove(1);
    match parse_transcript(&(gap.join("\n") + "\n")) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn empty_transcript_is_valid() {
    assert!(parse_transcript("").unwrap().is_empty());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.jsonl");
    std::fs::write(&path, "").unwrap();
    assert!(import_transcript(&path).unwrap().is_empty());
}

#[test]
fn same_seed_same_bytes() {
    for kind in ProtocolKind::ALL {
        let a = run_session(&recorded(kind), 77, 5).unwrap();
        let b = run_session(&recorded(kind), 77, 5).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap(), "{}", kind.name());
        let c = run_session(&recorded(kind), 77, 6).unwrap();
        assert_ne!(a.transcript, c.transcript, "{}", kind.name());
    }
}

#[test]
fn batch_counts_ignore_thread_count() {
    let mut cfg = SessionConfig::new(ProtocolKind::Id);
    cfg.record = false;
    cfg.cheat = true;
    let one = run_batch(&cfg, 9, 64, 1).unwrap();
    let many = run_batch(&cfg, 9, 64, 8).unwrap();
    assert_eq!(one.counts, many.counts);
    assert_eq!(one.counts.values().sum::<u64>(), 64);
}

#[test]
fn pass_through_eve_is_invisible() {
    for kind in [ProtocolKind::Ot, ProtocolKind::CompiledOt, ProtocolKind::IdPlus] {
        let plain = run_session(&recorded(kind), 3, 1).unwrap();
        let mut cfg = recorded(kind);
        cfg.eve = EveSpec::PassThrough;
        assert_eq!(run_session(&cfg, 3, 1).unwrap(), plain);
    }
}

#[test]
fn bit_flip_eve_shows_in_transcript() {
    let mut cfg = recorded(ProtocolKind::IdPlus);
    cfg.eve = EveSpec::BitFlip { round: 2, pick: 5 };
    let run = run_session(&cfg, 3, 1).unwrap();
    assert!(run.transcript.iter().any(|r| r.sender == Party::E));
    assert!(matches!(run.outcome, Outcome::Abort { .. } | Outcome::Verdict { accepted: false }));
}

#[test]
fn out_of_order_message_names_round() {
    let sched = Schedule::new().msg("commit", Party::B).msg("challenge", Party::A).requires("commit", "challenge");
    let mut s = Session::new(0, sched);
    s.send(Party::A, "unused", &0u8).unwrap_err();
    match s.send(Party::A, "challenge", &1u8) {
        Err(Error::Schedule { round, detail }) => {
            assert_eq!(round, 0);
            assert!(detail.contains("commit"));
        }
        other => panic!("expected schedule violation, got {other:?}"),
    }
    s.send(Party::B, "commit", &2u8).unwrap();
    assert_eq!(s.send(Party::A, "challenge", &3u8).unwrap(), 3);
    match s.send(Party::A, "commit", &4u8) {
        Err(Error::Schedule { round, .. }) => assert_eq!(round, 2),
        other => panic!("expected wrong sender, got {other:?}"),
    }
}

#[test]
fn honest_ot_delivers_chosen_string() {
    let mut cfg = recorded(ProtocolKind::Ot);
    cfg.size = 64;
    for i in 0..20 {
        match run_session(&cfg, 21, i).unwrap().outcome {
            Outcome::Ot { received, expected, .. } => assert_eq!(received, expected),
            other => panic!("unexpected {other:?}"),
        }
    }
}
