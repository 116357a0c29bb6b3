//! In-process message bus with exact traffic accounting.
//!
//! Parties run in lockstep: within one round every party enqueues its
//! outgoing messages, the round is closed with [`MessageBus::end_round`],
//! and recipients drain their inboxes. The ledger counts every delivered
//! payload byte, every message, and every closed round; nothing else is
//! charged (in particular, dealer preprocessing never touches the bus).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Cumulative traffic counters for one protocol execution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusLedger {
    /// Sum of serialized payload sizes over all delivered messages.
    pub total_bytes: u64,
    /// Number of delivered messages.
    pub total_messages: u64,
    /// Number of closed communication rounds.
    pub sequential_rounds: u64,
}

/// Point-to-point bus for `parties` peers with per-recipient FIFO inboxes.
#[derive(Debug)]
pub struct MessageBus {
    parties: usize,
    inboxes: Vec<VecDeque<(usize, Vec<u8>)>>,
    ledger: BusLedger,
    sent_this_round: bool,
}

impl MessageBus {
    pub fn new(parties: usize) -> Result<Self> {
        if parties < 2 {
            return Err(Error::InvalidConfig(format!(
                "a message bus needs at least 2 parties, got {parties}"
            )));
        }
        Ok(MessageBus {
            parties,
            inboxes: (0..parties).map(|_| VecDeque::new()).collect(),
            ledger: BusLedger::default(),
            sent_this_round: false,
        })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    /// Delivers `payload` from `from` to `to`, charging its exact size.
    pub fn send(&mut self, from: usize, to: usize, payload: Vec<u8>) -> Result<()> {
        if from >= self.parties || to >= self.parties {
            return Err(Error::InvalidUsage(format!(
                "party index out of range: {from} -> {to} with {} parties",
                self.parties
            )));
        }
        if from == to {
            return Err(Error::InvalidUsage(
                "a party cannot message itself over the bus".into(),
            ));
        }
        self.ledger.total_bytes += payload.len() as u64;
        self.ledger.total_messages += 1;
        self.sent_this_round = true;
        self.inboxes[to].push_back((from, payload));
        Ok(())
    }

    /// Pops the oldest pending message for `to`, if any.
    pub fn recv(&mut self, to: usize) -> Option<(usize, Vec<u8>)> {
        self.inboxes.get_mut(to).and_then(VecDeque::pop_front)
    }

    /// Closes the current communication round. Empty rounds are a protocol
    /// bug, so they are rejected rather than silently counted.
    pub fn end_round(&mut self) -> Result<()> {
        if !self.sent_this_round {
            return Err(Error::InvalidUsage(
                "closed a communication round with no traffic".into(),
            ));
        }
        self.ledger.sequential_rounds += 1;
        self.sent_this_round = false;
        Ok(())
    }

    pub fn ledger(&self) -> BusLedger {
        self.ledger
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_counts_bytes_messages_and_rounds() {
        let mut bus = MessageBus::new(3).unwrap();
        bus.send(0, 1, vec![0u8; 8]).unwrap();
        bus.send(1, 0, vec![0u8; 4]).unwrap();
        bus.end_round().unwrap();
        bus.send(2, 0, vec![0u8; 16]).unwrap();
        bus.end_round().unwrap();
        assert_eq!(
            bus.ledger(),
            BusLedger {
                total_bytes: 28,
                total_messages: 3,
                sequential_rounds: 2,
            }
        );
    }

    #[test]
    fn receive_order_is_fifo_per_recipient() {
        let mut bus = MessageBus::new(3).unwrap();
        bus.send(1, 0, vec![1]).unwrap();
        bus.send(2, 0, vec![2]).unwrap();
        bus.end_round().unwrap();
        assert_eq!(bus.recv(0), Some((1, vec![1])));
        assert_eq!(bus.recv(0), Some((2, vec![2])));
        assert_eq!(bus.recv(0), None);
    }

    #[test]
    fn rejects_self_sends_and_bad_indices() {
        let mut bus = MessageBus::new(2).unwrap();
        assert!(bus.send(0, 0, vec![]).is_err());
        assert!(bus.send(0, 2, vec![]).is_err());
        assert!(MessageBus::new(1).is_err());
    }

    #[test]
    fn rejects_empty_rounds() {
        let mut bus = MessageBus::new(2).unwrap();
        assert!(bus.end_round().is_err());
        bus.send(0, 1, vec![7]).unwrap();
        assert!(bus.end_round().is_ok());
        assert!(bus.end_round().is_err());
    }
}
