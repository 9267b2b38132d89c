//! Message, gate, and reveal accounting for a simulated run.

use alloc::string::String;
use alloc::vec::Vec;

use crate::shamir::PartyId;

/// Protocol units tracked by the transcript. The first few are the wire
/// primitives that actually move messages; the rest are composite gates
/// counted by invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GateKind {
    InputShare,
    Mul,
    OpenMasked,
    OpenGuard,
    OpenOutput,
    DealerBit,
    DealerSolved,
    Lsb,
    Lt,
    EqZero,
    Or,
    Min,
    Max,
    Halve,
    BitDecompose,
    Div,
    KthRanked,
}

impl GateKind {
    pub const ALL: [GateKind; 17] = [
        GateKind::InputShare,
        GateKind::Mul,
        GateKind::OpenMasked,
        GateKind::OpenGuard,
        GateKind::OpenOutput,
        GateKind::DealerBit,
        GateKind::DealerSolved,
        GateKind::Lsb,
        GateKind::Lt,
        GateKind::EqZero,
        GateKind::Or,
        GateKind::Min,
        GateKind::Max,
        GateKind::Halve,
        GateKind::BitDecompose,
        GateKind::Div,
        GateKind::KthRanked,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::InputShare => "input_share",
            GateKind::Mul => "secure_mul",
            GateKind::OpenMasked => "open_masked",
            GateKind::OpenGuard => "open_guard",
            GateKind::OpenOutput => "open_output",
            GateKind::DealerBit => "dealer_bit",
            GateKind::DealerSolved => "dealer_solved",
            GateKind::Lsb => "secure_lsb",
            GateKind::Lt => "secure_less_than",
            GateKind::EqZero => "secure_eq_zero",
            GateKind::Or => "secure_or",
            GateKind::Min => "secure_min",
            GateKind::Max => "secure_max",
            GateKind::Halve => "secure_halve",
            GateKind::BitDecompose => "secure_bit_decompose",
            GateKind::Div => "secure_div",
            GateKind::KthRanked => "kth_ranked",
        }
    }

    fn index(&self) -> usize {
        GateKind::ALL.iter().position(|k| k == self).unwrap()
    }

    /// Wire primitives get round-span events; composites only counters.
    pub fn is_primitive(&self) -> bool {
        matches!(
            self,
            GateKind::InputShare
                | GateKind::Mul
                | GateKind::OpenMasked
                | GateKind::OpenGuard
                | GateKind::OpenOutput
        )
    }
}

/// One point-to-point message, delivered at the barrier closing `round`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundMessage {
    pub round: u64,
    pub from: PartyId,
    pub to: PartyId,
    /// Field-element payload; kept only when message recording is on.
    pub payload: Vec<u64>,
}

/// Round span and message count of one primitive gate invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateEvent {
    pub kind: GateKind,
    pub round_start: u64,
    pub round_end: u64,
    pub messages: u64,
}

/// Who learned an opened value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevealScope {
    /// Broadcast reconstruction; all parties learn it.
    All,
    /// Directed reconstruction; only this party learns it.
    One(PartyId),
}

/// A deliberately reconstructed mid-protocol or output value. Masked
/// opens inside comparison gates are uniform and excluded; guard bits
/// and outputs are always logged — they are the protocol's entire
/// declared leakage surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevealEvent {
    pub label: &'static str,
    /// Loop/array index the guard belongs to, when meaningful.
    pub index: Option<u32>,
    pub round: u64,
    pub value: u64,
    pub scope: RevealScope,
    /// True for protocol outputs (portions), false for guard bits.
    pub is_output: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateCounter {
    pub invocations: u64,
    pub messages: u64,
}

/// Full accounting of one simulated run.
#[derive(Debug, Clone)]
pub struct Transcript {
    record_messages: bool,
    pub messages: Vec<RoundMessage>,
    pub gate_events: Vec<GateEvent>,
    pub reveals: Vec<RevealEvent>,
    counters: [GateCounter; GateKind::ALL.len()],
    total_messages: u64,
    /// Correlated-randomness entries issued by the dealer (preprocessing,
    /// not counted as online messages).
    pub dealer_entries: u64,
    /// Field elements distributed by the dealer across all entries.
    pub dealer_elements: u64,
    /// Free-form note lines surfaced by the audit command.
    pub notes: Vec<String>,
}

impl Transcript {
    pub fn new(record_messages: bool) -> Self {
        Transcript {
            record_messages,
            messages: Vec::new(),
            gate_events: Vec::new(),
            reveals: Vec::new(),
            counters: [GateCounter::default(); GateKind::ALL.len()],
            total_messages: 0,
            dealer_entries: 0,
            dealer_elements: 0,
            notes: Vec::new(),
        }
    }

    #[inline]
    pub fn recording(&self) -> bool {
        self.record_messages
    }

    pub(crate) fn count_gate(&mut self, kind: GateKind) {
        self.counters[kind.index()].invocations += 1;
    }

    pub(crate) fn count_message(&mut self, kind: GateKind) {
        self.counters[kind.index()].messages += 1;
        self.total_messages += 1;
    }

    pub fn counter(&self, kind: GateKind) -> GateCounter {
        self.counters[kind.index()]
    }

    pub fn total_messages(&self) -> u64 {
        self.total_messages
    }

    /// Total primitive invocations that may legally move messages.
    pub fn total_gates(&self) -> u64 {
        GateKind::ALL
            .iter()
            .filter(|k| k.is_primitive())
            .map(|k| self.counter(*k).invocations)
            .sum()
    }

    /// Guard-bit reveals only — the declared mid-protocol leakage.
    pub fn leakage(&self) -> impl Iterator<Item = &RevealEvent> {
        self.reveals.iter().filter(|r| !r.is_output)
    }
}
