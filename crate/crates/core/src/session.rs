//! Message passing between two parties with schedule checks, an ordered
//! log and an optional man-in-the-middle tap.
//!
//! Protocol code calls [`Session::send`] for every classical message. The
//! payload is encoded, checked against the protocol schedule, logged,
//! offered to the tap, then decoded again for the receiver. The receiver
//! only ever sees the decoded copy, so a tap that rewrites bytes is
//! indistinguishable from a real network adversary.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{AbortReason, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
    E,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
            Party::E => Party::E,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub round: usize,
    pub sender: Party,
    pub msg_type: String,
    #[serde(with = "hex_bytes")]
    pub payload: Vec<u8>,
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map_err(serde::de::Error::custom)
    }
}

/// Which party sends each message type, and which types must precede
/// which.
#[derive(Debug, Clone, Default)]
pub struct Schedule {
    senders: BTreeMap<&'static str, Party>,
    before: Vec<(&'static str, &'static str)>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn msg(mut self, msg_type: &'static str, sender: Party) -> Self {
        self.senders.insert(msg_type, sender);
        self
    }

    /// `later` may only be sent once `earlier` has been sent.
    pub fn requires(mut self, earlier: &'static str, later: &'static str) -> Self {
        self.before.push((earlier, later));
        self
    }

    /// Union of two schedules, for protocols that embed sub-protocols with
    /// the roles swapped or not.
    pub fn merge(mut self, other: &Schedule) -> Self {
        for (k, v) in &other.senders {
            self.senders.insert(k, *v);
        }
        self.before.extend(other.before.iter().copied());
        self
    }

    /// Same message types with A and B exchanged.
    pub fn swapped(&self) -> Schedule {
        Schedule { senders: self.senders.iter().map(|(k, v)| (*k, v.other())).collect(), before: self.before.clone() }
    }
}

/// Sees every classical message after it is logged and before delivery.
pub trait EveTap: Send {
    fn intercept(&mut self, round: usize, sender: Party, msg_type: &str, payload: &mut Vec<u8>);
}

/// A tap that forwards everything untouched.
pub struct PassThrough;

impl EveTap for PassThrough {
    fn intercept(&mut self, _: usize, _: Party, _: &str, _: &mut Vec<u8>) {}
}

pub struct Session {
    pub id: u64,
    schedule: Schedule,
    log: Vec<TranscriptRecord>,
    seen: BTreeSet<&'static str>,
    eve: Option<Box<dyn EveTap>>,
    record: bool,
    round: usize,
}

impl Session {
    pub fn new(id: u64, schedule: Schedule) -> Self {
        Session { id, schedule, log: Vec::new(), seen: BTreeSet::new(), eve: None, record: true, round: 0 }
    }

    /// Keep only the round counter; used by large statistical batches.
    pub fn unrecorded(mut self) -> Self {
        self.record = false;
        self
    }

    pub fn with_eve(mut self, eve: Box<dyn EveTap>) -> Self {
        self.eve = Some(eve);
        self
    }

    pub fn is_recorded(&self) -> bool {
        self.record
    }

    pub fn has_eve(&self) -> bool {
        self.eve.is_some()
    }

    pub fn extend_schedule(&mut self, extra: &Schedule) {
        self.schedule = std::mem::take(&mut self.schedule).merge(extra);
    }

    pub fn rounds(&self) -> usize {
        self.round
    }

    pub fn transcript(&self) -> &[TranscriptRecord] {
        &self.log
    }

    pub fn into_transcript(self) -> Vec<TranscriptRecord> {
        self.log
    }

    fn check(&self, from: Party, msg_type: &'static str) -> Result<()> {
        let violation = |detail: String| Error::Schedule { round: self.round, detail };
        match self.schedule.senders.get(msg_type) {
            None => return Err(violation(format!("unexpected message type {msg_type}"))),
            Some(&p) if p != from => return Err(violation(format!("{msg_type} must come from {p:?}, not {from:?}"))),
            _ => {}
        }
        for &(earlier, later) in &self.schedule.before {
            if later == msg_type && !self.seen.contains(earlier) {
                return Err(violation(format!("{msg_type} sent before {earlier}")));
            }
        }
        Ok(())
    }

    fn push(&mut self, sender: Party, msg_type: &str, payload: &[u8]) {
        if self.record {
            self.log.push(TranscriptRecord {
                round: self.round,
                sender,
                msg_type: msg_type.to_string(),
                payload: payload.to_vec(),
            });
        }
        self.round += 1;
    }

    /// Send `msg` from `from` to the other party and return what arrives.
    pub fn send<T: Serialize + DeserializeOwned>(&mut self, from: Party, msg_type: &'static str, msg: &T) -> Result<T> {
        self.check(from, msg_type)?;
        let mut bytes = bincode::serialize(msg).map_err(|e| Error::Wire(e.to_string()))?;
        self.seen.insert(msg_type);
        let round = self.round;
        self.push(from, msg_type, &bytes);
        if let Some(eve) = self.eve.as_mut() {
            let before = bytes.clone();
            eve.intercept(round, from, msg_type, &mut bytes);
            if bytes != before {
                self.push(Party::E, msg_type, &bytes);
            }
        }
        bincode::deserialize(&bytes).map_err(|_| Error::Abort(AbortReason::Malformed))
    }
}

/// Write records as JSON lines.
pub fn export_transcript(path: &std::path::Path, records: &[TranscriptRecord]) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(|e| Error::Wire(e.to_string()))?);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read JSON lines, checking that rounds run 0, 1, 2, … without gaps.
pub fn import_transcript(path: &std::path::Path) -> Result<Vec<TranscriptRecord>> {
    let text = std::fs::read_to_string(path)?;
    parse_transcript(&text)
}

pub fn parse_transcript(text: &str) -> Result<Vec<TranscriptRecord>> {
    let mut out = Vec::new();
    let mut lines = text.split('\n').enumerate().peekable();
    while let Some((i, line)) = lines.next() {
        let lineno = i + 1;
        if line.is_empty() {
            if lines.peek().is_none() {
                break;
            }
            return Err(Error::Parse { line: lineno, detail: "empty line".into() });
        }
        if lines.peek().is_none() {
            return Err(Error::Parse { line: lineno, detail: "missing line terminator".into() });
        }
        let rec: TranscriptRecord =
            serde_json::from_str(line).map_err(|e| Error::Parse { line: lineno, detail: e.to_string() })?;
        let expect = out.last().map_or(0, |r: &TranscriptRecord| r.round + 1);
        if rec.round != expect {
            return Err(Error::Parse { line: lineno, detail: format!("round {} where {expect} expected", rec.round) });
        }
        out.push(rec);
    }
    Ok(out)
}
