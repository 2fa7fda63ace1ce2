//! JSON-lines game transcripts, one object per applied action.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::rules::TransitionRecord;
use super::types::{Action, Hand, Phase, Resource};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub turn: u32,
    pub player: usize,
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dice: Option<(u8, u8)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub produced: Option<[Hand; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stolen: Option<Resource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discarded: Option<Hand>,
    /// Phase after the action.
    pub phase: Phase,
}

impl From<&TransitionRecord> for TranscriptLine {
    fn from(r: &TransitionRecord) -> Self {
        TranscriptLine {
            turn: r.turn,
            player: r.player,
            action: r.action,
            dice: r.dice,
            produced: r.produced,
            stolen: r.stolen,
            discarded: r.discarded,
            phase: r.phase_after,
        }
    }
}

pub fn write_transcript<W: Write>(out: &mut W, records: &[TransitionRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *out, &TranscriptLine::from(r))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
