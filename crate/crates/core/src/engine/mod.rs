//! The simulated multi-party runtime.
//!
//! n party contexts run in lockstep rounds under a single-threaded
//! scheduler: within a round parties act in index order, and no party
//! observes a round's messages before every send of that round has
//! completed. Each party owns a seeded generator; one more drives the
//! dealer. A global run seed derives all of them, so every run is
//! bit-reproducible.
//!
//! Secure multiplication is classical honest-majority degree reduction:
//! parties multiply shares locally (degree ≤ 2(t−1) ≤ n−1), re-share
//! the products, and recombine with public Lagrange coefficients —
//! exactly n·(n−1) point-to-point messages. Comparison-type gates are
//! bit-level protocols consuming dealer-issued solved randoms; see
//! [`gates`](self) for the constructions.

mod dealer;
mod gates;
mod transcript;

pub use dealer::DealerTape;
pub use transcript::{
    GateCounter, GateEvent, GateKind, RevealEvent, RevealScope, RoundMessage, Transcript,
};

use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::field::{FieldElement, PrimeModulus};
use crate::shamir::{self, PartyId, ShareParams, Sharing};

/// Static parameters of one simulation.
#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    pub parties: u32,
    pub modulus: PrimeModulus,
    /// Magnitude bound M: every comparison operand must sit in [0, M],
    /// with p > 2(M+1) guaranteed by the caller's prime selection.
    pub magnitude_bound: u64,
    pub seed: u64,
    pub record_messages: bool,
}

/// How an opened value is logged.
#[derive(Debug, Clone, Copy)]
pub enum OpenLog {
    /// Uniformly masked internal open (comparison machinery); counted,
    /// never listed as leakage.
    Masked,
    /// A declared guard bit: label plus optional loop index.
    Guard(&'static str, Option<u32>),
    /// A protocol output (portion endpoint).
    Output(&'static str),
}

/// The round-synchronized engine all phases run on.
#[derive(Debug)]
pub struct Engine {
    params: ShareParams,
    modulus: PrimeModulus,
    magnitude_bound: u64,
    lagrange_full: Vec<FieldElement>,
    party_rngs: Vec<ChaCha20Rng>,
    dealer: DealerTape,
    transcript: Transcript,
    round: u64,
    gate_stack: Vec<GateKind>,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        let params = ShareParams::new(config.parties).expect("at least two parties");
        let mut master = ChaCha20Rng::seed_from_u64(config.seed);
        let mut party_rngs = Vec::with_capacity(config.parties as usize);
        for _ in 0..config.parties {
            let mut seed = [0u8; 32];
            master.fill_bytes(&mut seed);
            party_rngs.push(ChaCha20Rng::from_seed(seed));
        }
        let mut dealer_seed = [0u8; 32];
        master.fill_bytes(&mut dealer_seed);
        let dealer = DealerTape::new(
            ChaCha20Rng::from_seed(dealer_seed),
            config.modulus,
            params,
        );
        Engine {
            params,
            modulus: config.modulus,
            magnitude_bound: config.magnitude_bound,
            lagrange_full: shamir::lagrange_at_zero(config.modulus, config.parties),
            party_rngs,
            dealer,
            transcript: Transcript::new(config.record_messages),
            round: 0,
            gate_stack: Vec::new(),
        }
    }

    #[inline]
    pub fn params(&self) -> ShareParams {
        self.params
    }

    #[inline]
    pub fn parties(&self) -> u32 {
        self.params.parties()
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn magnitude_bound(&self) -> u64 {
        self.magnitude_bound
    }

    #[inline]
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn transcript_mut(&mut self) -> &mut Transcript {
        &mut self.transcript
    }

    /// Finishes the run, folding dealer accounting into the transcript.
    pub fn into_transcript(mut self) -> Transcript {
        self.transcript.dealer_entries = self.dealer.entries_issued();
        self.transcript.dealer_elements = self.dealer.elements_distributed();
        self.transcript
    }

    fn begin_gate(&mut self, kind: GateKind) -> (u64, u64) {
        self.transcript.count_gate(kind);
        self.gate_stack.push(kind);
        (self.round, self.transcript.total_messages())
    }

    fn end_gate(&mut self, kind: GateKind, start: (u64, u64)) {
        let popped = self.gate_stack.pop();
        debug_assert_eq!(popped, Some(kind));
        if self.transcript.recording() && kind.is_primitive() {
            self.transcript.gate_events.push(GateEvent {
                kind,
                round_start: start.0,
                round_end: self.round,
                messages: self.transcript.total_messages() - start.1,
            });
        }
    }

    /// Opens a new communication round; all sends issued until the next
    /// call land at this round's closing barrier.
    fn next_round(&mut self) -> u64 {
        self.round += 1;
        self.round
    }

    fn send(&mut self, round: u64, from: PartyId, to: PartyId, payload: &[FieldElement]) {
        debug_assert_ne!(from, to);
        let kind = *self.gate_stack.last().expect("send outside a gate");
        self.transcript.count_message(kind);
        if self.transcript.recording() {
            self.transcript.messages.push(RoundMessage {
                round,
                from,
                to,
                payload: payload.iter().map(|fe| fe.value()).collect(),
            });
        }
    }

    // ------------------------------------------------------------------
    // Wire primitives
    // ------------------------------------------------------------------

    /// `owner` distributes a (t,n)-sharing of its private value:
    /// n−1 messages, one round.
    pub fn input_share(&mut self, owner: PartyId, value: u64) -> Sharing {
        let start = self.begin_gate(GateKind::InputShare);
        let secret = self.modulus.element(value);
        let rng = &mut self.party_rngs[(owner.0 - 1) as usize];
        let sharing = shamir::share(secret, self.params, rng);
        let round = self.next_round();
        for to in self.params.party_ids() {
            if to != owner {
                let payload = [sharing.share(to)];
                self.send(round, owner, to, &payload);
            }
        }
        self.end_gate(GateKind::InputShare, start);
        sharing
    }

    /// A valid (t,n)-sharing of a public constant; no interaction.
    pub fn constant(&self, value: u64) -> Sharing {
        shamir::constant_sharing(self.modulus.element(value), self.params)
    }

    fn constant_fe(&self, fe: FieldElement) -> Sharing {
        shamir::constant_sharing(fe, self.params)
    }

    /// Local affine gate: a sharing of α + βu + γv, zero messages.
    pub fn affine_combine(&self, alpha: u64, beta: u64, gamma: u64, u: &Sharing, v: &Sharing) -> Sharing {
        let a = self.modulus.element(alpha);
        let b = self.modulus.element(beta);
        let g = self.modulus.element(gamma);
        let shares = u
            .shares()
            .iter()
            .zip(v.shares())
            .map(|(su, sv)| a.add(b.mul(*su)).add(g.mul(*sv)))
            .collect();
        Sharing::from_shares(shares, self.params)
    }

    /// General local linear combination Σ cᵢ·xᵢ + constant.
    pub fn lincomb(&self, terms: &[(FieldElement, &Sharing)], constant: FieldElement) -> Sharing {
        let shares = (0..self.params.parties() as usize)
            .map(|idx| {
                let mut acc = constant;
                for (coef, x) in terms {
                    acc = acc.add(coef.mul(x.shares()[idx]));
                }
                acc
            })
            .collect();
        Sharing::from_shares(shares, self.params)
    }

    pub fn add(&self, u: &Sharing, v: &Sharing) -> Sharing {
        let one = self.modulus.one();
        self.lincomb(&[(one, u), (one, v)], self.modulus.zero())
    }

    pub fn sub(&self, u: &Sharing, v: &Sharing) -> Sharing {
        let one = self.modulus.one();
        self.lincomb(&[(one, u), (one.neg(), v)], self.modulus.zero())
    }

    pub fn add_const(&self, u: &Sharing, c: i64) -> Sharing {
        let one = self.modulus.one();
        self.lincomb(&[(one, u)], self.modulus.element_signed(c))
    }

    pub fn scale(&self, c: u64, u: &Sharing) -> Sharing {
        self.lincomb(&[(self.modulus.element(c), u)], self.modulus.zero())
    }

    /// 1 − u for a shared bit.
    pub fn not(&self, u: &Sharing) -> Sharing {
        let one = self.modulus.one();
        self.lincomb(&[(one.neg(), u)], one)
    }

    /// Secure multiplication by degree reduction: every party multiplies
    /// its shares locally, re-shares the product, and the re-shares are
    /// recombined with the public Lagrange coefficients for points 1..n.
    /// Exactly n·(n−1) messages in one round.
    pub fn mul(&mut self, u: &Sharing, v: &Sharing) -> Sharing {
        let start = self.begin_gate(GateKind::Mul);
        let n = self.params.parties() as usize;
        // Local degree-2(t−1) products, then one re-sharing per party.
        let mut subshares: Vec<Sharing> = Vec::with_capacity(n);
        for i in 0..n {
            let product = u.shares()[i].mul(v.shares()[i]);
            let rng = &mut self.party_rngs[i];
            subshares.push(shamir::share(product, self.params, rng));
        }
        let round = self.next_round();
        for from in self.params.party_ids() {
            for to in self.params.party_ids() {
                if from != to {
                    let payload = [subshares[(from.0 - 1) as usize].share(to)];
                    self.send(round, from, to, &payload);
                }
            }
        }
        // After the barrier each party recombines what it holds.
        let shares = (0..n)
            .map(|idx| {
                let mut acc = self.modulus.zero();
                for (j, sub) in subshares.iter().enumerate() {
                    acc = acc.add(self.lagrange_full[j].mul(sub.shares()[idx]));
                }
                acc
            })
            .collect();
        let result = Sharing::from_shares(shares, self.params);
        self.end_gate(GateKind::Mul, start);
        result
    }

    /// Broadcast reconstruction: the first t parties send their share to
    /// everyone else; every party interpolates the same value.
    pub fn open_all(&mut self, x: &Sharing, log: OpenLog) -> u64 {
        let kind = open_kind(&log);
        let start = self.begin_gate(kind);
        let t = self.params.threshold();
        let round = self.next_round();
        for from in 1..=t {
            let sender = PartyId(from);
            for to in self.params.party_ids() {
                if to != sender {
                    let payload = [x.share(sender)];
                    self.send(round, sender, to, &payload);
                }
            }
        }
        let value = shamir::reconstruct_full(x).value();
        self.log_reveal(&log, value, RevealScope::All);
        self.end_gate(kind, start);
        value
    }

    /// Directed reconstruction: the lowest-indexed t−1 other parties send
    /// their shares to `target`, which interpolates locally. Only the
    /// target's view contains the value.
    pub fn open_to(&mut self, target: PartyId, x: &Sharing, log: OpenLog) -> u64 {
        let kind = open_kind(&log);
        let start = self.begin_gate(kind);
        let t = self.params.threshold();
        let round = self.next_round();
        let mut points = alloc::vec![(target, x.share(target))];
        for id in self.params.party_ids() {
            if points.len() == t as usize {
                break;
            }
            if id != target {
                let payload = [x.share(id)];
                self.send(round, id, target, &payload);
                points.push((id, x.share(id)));
            }
        }
        let value = shamir::reconstruct(&points, self.params)
            .expect("t distinct points")
            .value();
        self.log_reveal(&log, value, RevealScope::One(target));
        self.end_gate(kind, start);
        value
    }

    fn log_reveal(&mut self, log: &OpenLog, value: u64, scope: RevealScope) {
        match log {
            OpenLog::Masked => {}
            OpenLog::Guard(label, index) => self.transcript.reveals.push(RevealEvent {
                label,
                index: *index,
                round: self.round,
                value,
                scope,
                is_output: false,
            }),
            OpenLog::Output(label) => self.transcript.reveals.push(RevealEvent {
                label,
                index: None,
                round: self.round,
                value,
                scope,
                is_output: true,
            }),
        }
    }

    // ------------------------------------------------------------------
    // Dealer access
    // ------------------------------------------------------------------

    /// One dealer-issued shared random bit.
    pub fn dealer_random_bit(&mut self) -> Sharing {
        let start = self.begin_gate(GateKind::DealerBit);
        let bit = self.dealer.random_bit();
        self.end_gate(GateKind::DealerBit, start);
        bit
    }

    fn dealer_solved_random(&mut self) -> (Sharing, Vec<Sharing>) {
        let start = self.begin_gate(GateKind::DealerSolved);
        let pair = self.dealer.solved_random();
        self.end_gate(GateKind::DealerSolved, start);
        pair
    }

    // ------------------------------------------------------------------
    // Simulation-only introspection
    // ------------------------------------------------------------------

    /// Reconstructs a sharing outside the protocol, moving no messages.
    /// For tests and trace capture only.
    pub fn peek(&self, x: &Sharing) -> u64 {
        shamir::reconstruct_full(x).value()
    }
}

fn open_kind(log: &OpenLog) -> GateKind {
    match log {
        OpenLog::Masked => GateKind::OpenMasked,
        OpenLog::Guard(..) => GateKind::OpenGuard,
        OpenLog::Output(..) => GateKind::OpenOutput,
    }
}
