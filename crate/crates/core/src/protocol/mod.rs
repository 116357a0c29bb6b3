//! Semi-honest n-party dot product over `Z_{2^k}` with exact traffic
//! accounting.
//!
//! The protocol is deliberately small: additive secret sharing, Beaver
//! triples from a trusted dealer (preprocessing is uncharged), batched
//! openings of the masked `d = x - a`, `e = y - b` values, a configurable
//! number of random-linear-combination re-opening checks, and a final
//! opening of the summed product shares. All communication goes through
//! [`MessageBus`], so the returned [`BusLedger`] is the measured ground
//! truth that [`comm_closed_form`] must reproduce.

mod bus;

pub use bus::{BusLedger, MessageBus};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ring::{decode_elements, encode_elements, RingElement, RingWidth};
use crate::seed::{derive, rng_from};
use crate::{Error, Result};

/// Substream tags for the two independent random phases of a run.
const DEALER_TAG: u64 = 0x6465_616c;
const VERIFY_TAG: u64 = 0x7665_7266;

/// Tunable parameters of one protocol execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Number of parties `n >= 2`.
    pub parties: usize,
    /// Ring width `k` in bits; one of 32, 64, 128.
    pub security_bits: u32,
    /// Multiplications opened per communication round, `b >= 1`.
    pub block_size: usize,
    /// Verification rounds `R >= 1` after the opening phase.
    pub verify_rounds: usize,
    /// Dot-product length `L >= 1`.
    pub workload_len: usize,
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        if self.parties < 2 {
            return Err(Error::InvalidConfig(format!(
                "parties must be >= 2, got {}",
                self.parties
            )));
        }
        RingWidth::from_bits(self.security_bits)?;
        if self.block_size < 1 {
            return Err(Error::InvalidConfig("block_size must be >= 1".into()));
        }
        if self.verify_rounds < 1 {
            return Err(Error::InvalidConfig("verify_rounds must be >= 1".into()));
        }
        if self.workload_len < 1 {
            return Err(Error::InvalidConfig("workload_len must be >= 1".into()));
        }
        Ok(())
    }

    pub fn width(&self) -> Result<RingWidth> {
        RingWidth::from_bits(self.security_bits)
    }

    /// Number of opening batches `B = ceil(L / b)`.
    pub fn batches(&self) -> u64 {
        self.workload_len.div_ceil(self.block_size) as u64
    }
}

/// One party's additive shares of a plaintext vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareVector {
    pub owner: usize,
    pub elems: Vec<RingElement>,
}

/// A multiplication triple `c = a * b` held by the dealer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BeaverTriple {
    pub a: RingElement,
    pub b: RingElement,
    pub c: RingElement,
}

/// One party's additive share of a [`BeaverTriple`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleShare {
    pub a: RingElement,
    pub b: RingElement,
    pub c: RingElement,
}

/// Splits `x` into `parties` additive shares; the first `parties - 1` are
/// uniform draws from the seeded stream, the last is the difference.
pub fn share(x: RingElement, parties: usize, seed: u64) -> Result<Vec<RingElement>> {
    share_with_rng(x, parties, &mut rng_from(seed))
}

pub fn share_with_rng(
    x: RingElement,
    parties: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<RingElement>> {
    if parties < 2 {
        return Err(Error::InvalidConfig(format!(
            "sharing needs at least 2 parties, got {parties}"
        )));
    }
    let width = x.width();
    let mut shares = Vec::with_capacity(parties);
    let mut sum = RingElement::zero(width);
    for _ in 0..parties - 1 {
        let s = RingElement::random(width, rng);
        sum = sum.add(s);
        shares.push(s);
    }
    shares.push(x.sub(sum));
    Ok(shares)
}

/// Modular sum of shares. Rejects empty input and mixed widths.
pub fn reconstruct(shares: &[RingElement]) -> Result<RingElement> {
    let first = shares
        .first()
        .ok_or_else(|| Error::InvalidUsage("cannot reconstruct from zero shares".into()))?;
    if shares.iter().any(|s| s.width() != first.width()) {
        return Err(Error::InvalidUsage(
            "cannot reconstruct from shares of mixed ring widths".into(),
        ));
    }
    Ok(shares[1..].iter().fold(*first, |acc, s| acc.add(*s)))
}

/// Shares every element of `xs`, returning one [`ShareVector`] per party.
pub fn share_vector(
    xs: &[RingElement],
    parties: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<ShareVector>> {
    let mut out: Vec<ShareVector> = (0..parties)
        .map(|owner| ShareVector {
            owner,
            elems: Vec::with_capacity(xs.len()),
        })
        .collect();
    for &x in xs {
        for (p, s) in share_with_rng(x, parties, rng)?.into_iter().enumerate() {
            out[p].elems.push(s);
        }
    }
    Ok(out)
}

/// Dealer-side triple generation: deterministic given the seed.
pub fn gen_beaver_triples(count: usize, width: RingWidth, seed: u64) -> Vec<BeaverTriple> {
    gen_beaver_triples_with_rng(count, width, &mut rng_from(seed))
}

pub fn gen_beaver_triples_with_rng(
    count: usize,
    width: RingWidth,
    rng: &mut ChaCha8Rng,
) -> Vec<BeaverTriple> {
    (0..count)
        .map(|_| {
            let a = RingElement::random(width, rng);
            let b = RingElement::random(width, rng);
            BeaverTriple { a, b, c: a.mul(b) }
        })
        .collect()
}

/// Additively shares one triple among `parties` parties.
pub fn share_triple(
    triple: &BeaverTriple,
    parties: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<TripleShare>> {
    let a = share_with_rng(triple.a, parties, rng)?;
    let b = share_with_rng(triple.b, parties, rng)?;
    let c = share_with_rng(triple.c, parties, rng)?;
    Ok((0..parties)
        .map(|p| TripleShare {
            a: a[p],
            b: b[p],
            c: c[p],
        })
        .collect())
}

/// Predicts the exact traffic of [`run_dot_product`] without running it.
///
/// Per opening batch every ordered party pair exchanges one message of
/// `2 * batch_size` elements; each verification round and the output
/// opening exchange one element per ordered pair.
pub fn comm_closed_form(params: &ProtocolParams) -> Result<BusLedger> {
    params.validate()?;
    let pairs = (params.parties * (params.parties - 1)) as u64;
    let elem = params.width()?.byte_len() as u64;

    let mut bytes = 0u64;
    let mut start = 0usize;
    while start < params.workload_len {
        let batch = params.block_size.min(params.workload_len - start);
        bytes += pairs * 2 * batch as u64 * elem;
        start += batch;
    }
    bytes += params.verify_rounds as u64 * pairs * elem; // re-opening checks
    bytes += pairs * elem; // output opening

    let rounds = params.batches() + params.verify_rounds as u64 + 1;
    Ok(BusLedger {
        total_bytes: bytes,
        total_messages: rounds * pairs,
        sequential_rounds: rounds,
    })
}

/// Runs the full dot-product protocol on plaintext inputs `x`, `y`
/// (reduced modulo `2^k`) and returns the opened result together with the
/// measured traffic ledger.
///
/// The execution is bit-for-bit deterministic given `(x, y, params, seed)`.
pub fn run_dot_product(
    x: &[u128],
    y: &[u128],
    params: &ProtocolParams,
    seed: u64,
) -> Result<(RingElement, BusLedger)> {
    params.validate()?;
    let width = params.width()?;
    let n = params.parties;
    let l = params.workload_len;
    if x.len() != l || y.len() != l {
        return Err(Error::InvalidUsage(format!(
            "workload_len is {l} but inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }

    let xe: Vec<RingElement> = x.iter().map(|&v| RingElement::new(v, width)).collect();
    let ye: Vec<RingElement> = y.iter().map(|&v| RingElement::new(v, width)).collect();

    // Trusted-dealer preprocessing: input shares and one triple per
    // multiplication. Never touches the bus.
    let mut dealer = rng_from(derive(seed, &[DEALER_TAG]));
    let x_shares = share_vector(&xe, n, &mut dealer)?;
    let y_shares = share_vector(&ye, n, &mut dealer)?;
    let triples = gen_beaver_triples_with_rng(l, width, &mut dealer);
    let mut party_triples: Vec<Vec<TripleShare>> = vec![Vec::with_capacity(l); n];
    for t in &triples {
        for (p, s) in share_triple(t, n, &mut dealer)?.into_iter().enumerate() {
            party_triples[p].push(s);
        }
    }

    let mut bus = MessageBus::new(n)?;
    // Product shares, filled batch by batch: z[p][i] is party p's share of
    // x_i * y_i.
    let mut z: Vec<Vec<RingElement>> = vec![vec![RingElement::zero(width); l]; n];

    // Opening phase: one round per batch; each message carries the sender's
    // (d, e) share pair for every multiplication in the batch.
    let mut start = 0usize;
    while start < l {
        let end = (start + params.block_size).min(l);
        let de_shares: Vec<Vec<RingElement>> = (0..n)
            .map(|p| {
                let xs = &x_shares[p].elems[start..end];
                let ys = &y_shares[p].elems[start..end];
                let ts = &party_triples[p][start..end];
                let mut elems = Vec::with_capacity(2 * (end - start));
                for ((x, y), t) in xs.iter().zip(ys).zip(ts) {
                    elems.push(x.sub(t.a));
                    elems.push(y.sub(t.b));
                }
                elems
            })
            .collect();
        broadcast_round(&mut bus, |p| encode_elements(&de_shares[p]))?;

        for q in 0..n {
            let opened = open_received(&mut bus, q, &de_shares[q], width)?;
            for (j, i) in (start..end).enumerate() {
                let d = opened[2 * j];
                let e = opened[2 * j + 1];
                let ts = &party_triples[q][i];
                let mut zi = ts.c.add(d.mul(ts.b)).add(e.mul(ts.a));
                if q == 0 {
                    // Exactly one party folds in the public d*e term.
                    zi = zi.add(d.mul(e));
                }
                z[q][i] = zi;
            }
        }
        start = end;
    }

    // Verification: R re-openings of a random linear combination of the
    // product shares, checked against the dealer's ground truth.
    let mut verify = rng_from(derive(seed, &[VERIFY_TAG]));
    for round in 0..params.verify_rounds {
        let coeffs: Vec<RingElement> = (0..l)
            .map(|_| RingElement::random(width, &mut verify))
            .collect();
        let combos: Vec<RingElement> = (0..n)
            .map(|p| {
                coeffs
                    .iter()
                    .zip(&z[p])
                    .fold(RingElement::zero(width), |acc, (&c, &zi)| {
                        acc.add(c.mul(zi))
                    })
            })
            .collect();
        broadcast_round(&mut bus, |p| encode_elements(&combos[p..=p]))?;

        let expected = coeffs
            .iter()
            .zip(xe.iter().zip(&ye))
            .fold(RingElement::zero(width), |acc, (&c, (&xi, &yi))| {
                acc.add(c.mul(xi.mul(yi)))
            });
        for q in 0..n {
            let opened = open_received(&mut bus, q, &combos[q..=q], width)?;
            if opened[0] != expected {
                return Err(Error::Protocol(format!(
                    "re-opening check failed in verification round {round}"
                )));
            }
        }
    }

    // Output opening: each party reveals its share of the summed products.
    let result_shares: Vec<RingElement> = (0..n)
        .map(|p| {
            z[p].iter()
                .fold(RingElement::zero(width), |acc, &zi| acc.add(zi))
        })
        .collect();
    broadcast_round(&mut bus, |p| encode_elements(&result_shares[p..=p]))?;
    let mut result = None;
    for q in 0..n {
        let opened = open_received(&mut bus, q, &result_shares[q..=q], width)?;
        match result {
            None => result = Some(opened[0]),
            Some(prev) if prev != opened[0] => {
                return Err(Error::Protocol(
                    "parties opened diverging dot-product results".into(),
                ))
            }
            _ => {}
        }
    }

    Ok((result.expect("n >= 2 parties opened a result"), bus.ledger()))
}

/// Sends `payload(p)` from every party to every other party, then closes
/// the round.
fn broadcast_round(bus: &mut MessageBus, payload: impl Fn(usize) -> Vec<u8>) -> Result<()> {
    let n = bus.parties();
    for p in 0..n {
        let bytes = payload(p);
        for q in 0..n {
            if q != p {
                bus.send(p, q, bytes.clone())?;
            }
        }
    }
    bus.end_round()
}

/// Drains party `q`'s inbox for one round and returns the elementwise sum
/// of its own shares and every received share vector.
fn open_received(
    bus: &mut MessageBus,
    q: usize,
    own: &[RingElement],
    width: RingWidth,
) -> Result<Vec<RingElement>> {
    let mut opened = own.to_vec();
    for _ in 0..bus.parties() - 1 {
        let (_, payload) = bus.recv(q).ok_or_else(|| {
            Error::Protocol(format!("party {q} missing a message in an open round"))
        })?;
        let elems = decode_elements(&payload, width, own.len())?;
        for (acc, e) in opened.iter_mut().zip(elems) {
            *acc = acc.add(e);
        }
    }
    Ok(opened)
}
