//! Trusted-setup dealer for correlated randomness.
//!
//! The dealer runs before the online phase and never sees an input. It
//! issues two entry kinds: random shared bits, and "solved randoms" —
//! a uniform field element shared together with sharings of all its
//! bits. Comparison-type gates consume one solved random per masked
//! open. Entries are tracked and may be consumed at most once; the
//! narrow interface keeps the dealer swappable for a dealer-free
//! preprocessing construction.

use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;
use rand_core::RngCore;

use crate::field::PrimeModulus;
use crate::shamir::{self, ShareParams, Sharing};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TapeEntryKind {
    Bit,
    Solved,
}

#[derive(Debug)]
struct TapeEntry {
    kind: TapeEntryKind,
    consumed: bool,
}

/// The dealer's private randomness plus the consumption ledger.
#[derive(Debug)]
pub struct DealerTape {
    rng: ChaCha20Rng,
    modulus: PrimeModulus,
    params: ShareParams,
    entries: Vec<TapeEntry>,
}

impl DealerTape {
    pub(crate) fn new(rng: ChaCha20Rng, modulus: PrimeModulus, params: ShareParams) -> Self {
        DealerTape {
            rng,
            modulus,
            params,
            entries: Vec::new(),
        }
    }

    fn consume(&mut self, kind: TapeEntryKind) -> usize {
        self.entries.push(TapeEntry {
            kind,
            consumed: false,
        });
        let id = self.entries.len() - 1;
        let entry = &mut self.entries[id];
        assert!(!entry.consumed, "dealer tape entry {id} consumed twice");
        assert_eq!(entry.kind, kind);
        entry.consumed = true;
        id
    }

    /// A fresh (t,n)-sharing of a uniform bit.
    pub(crate) fn random_bit(&mut self) -> Sharing {
        self.consume(TapeEntryKind::Bit);
        let b = self.rng.next_u64() & 1;
        shamir::share(self.modulus.element(b), self.params, &mut self.rng)
    }

    /// A uniform r in [0, p) shared along with all of its bits
    /// (LSB-first, width s = ⌈log2 p⌉).
    pub(crate) fn solved_random(&mut self) -> (Sharing, Vec<Sharing>) {
        self.consume(TapeEntryKind::Solved);
        let r = shamir::random_element(self.modulus, &mut self.rng);
        let sharing = shamir::share(r, self.params, &mut self.rng);
        let bits = r
            .to_bits()
            .iter()
            .map(|&b| shamir::share(self.modulus.element(b as u64), self.params, &mut self.rng))
            .collect();
        (sharing, bits)
    }

    pub(crate) fn entries_issued(&self) -> u64 {
        self.entries.len() as u64
    }

    /// Field elements distributed per entry kind: a bit entry ships n
    /// shares; a solved entry ships n·(s+1).
    pub(crate) fn elements_distributed(&self) -> u64 {
        let n = self.params.parties() as u64;
        let s = self.modulus.bits() as u64;
        self.entries
            .iter()
            .map(|e| match e.kind {
                TapeEntryKind::Bit => n,
                TapeEntryKind::Solved => n * (s + 1),
            })
            .sum()
    }
}
