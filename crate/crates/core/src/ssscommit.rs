//! Commitments to field vectors through secret sharing.
//!
//! A message `m ∈ 𝔽^σ` and randomiser `s ∈ 𝔽^σ` fix the polynomial `f` of
//! degree below `2σ` with `f(−i+1) = m_i` and `f(i) = s_i`; the `Σ = 4σ`
//! shares `f(1), …, f(Σ)` are committed bit by bit with the LWE scheme.
//! Opening reveals all shares, the receiver checks they lie on one such
//! polynomial, then asks for the commitment openings of a random σ-subset.
//! Integer labels `t` are mapped into the field as `t + σ`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{AbortReason, Error, Result};
use crate::fieldmath::{lagrange_interpolate, FieldElem, Poly, SUPPORTED_KAPPAS};
use crate::mixedcommit::{lwe_commit, lwe_extract, lwe_verify, CommitKey, LweCommitment, LweOpening};
use crate::rng::Rng;
use crate::session::{Party, Schedule, Session};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SssParams {
    pub sigma: usize,
    pub big_sigma: usize,
    pub kappa: u8,
}

impl SssParams {
    pub fn new(sigma: usize, kappa: u8) -> Result<Self> {
        if sigma == 0 {
            return Err(Error::param("σ must be positive"));
        }
        if !SUPPORTED_KAPPAS.contains(&kappa) || (kappa < 32 && (1u64 << kappa) <= 5 * sigma as u64) {
            return Err(Error::param(format!("GF(2^{kappa}) cannot label 5σ={} points", 5 * sigma)));
        }
        Ok(SssParams { sigma, big_sigma: 4 * sigma, kappa })
    }

    /// Smallest supported field that fits.
    pub fn for_sigma(sigma: usize) -> Result<Self> {
        SUPPORTED_KAPPAS
            .iter()
            .find_map(|&k| SssParams::new(sigma, k).ok())
            .ok_or_else(|| Error::param(format!("no supported field for σ={sigma}")))
    }

    /// Field element for integer label `t ∈ {−σ+1, …, Σ}`.
    pub fn label(&self, t: i64) -> FieldElem {
        let v = t + self.sigma as i64;
        debug_assert!(v >= 1 && v <= (self.big_sigma + self.sigma) as i64);
        FieldElem::new(v as u32, self.kappa).expect("label fits by construction")
    }

    /// Field element for share `i` (0-based).
    fn share_x(&self, i: usize) -> FieldElem {
        self.label(i as i64 + 1)
    }

    /// Field element for message coordinate `i` (0-based), label `−i`.
    fn message_x(&self, i: usize) -> FieldElem {
        self.label(-(i as i64))
    }

    pub fn message_bits(&self) -> usize {
        self.sigma * self.kappa as usize
    }

    pub fn random_vector(&self, rng: &mut Rng) -> Vec<FieldElem> {
        (0..self.sigma).map(|_| FieldElem::random(self.kappa, rng)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareVector {
    pub shares: Vec<FieldElem>,
    pub message: Vec<FieldElem>,
    pub randomizer: Vec<FieldElem>,
}

fn check_len(params: &SssParams, v: &[FieldElem], what: &str) -> Result<()> {
    if v.len() != params.sigma || v.iter().any(|x| x.kappa() != params.kappa) {
        return Err(Error::param(format!("{what} must be σ={} elements of GF(2^{})", params.sigma, params.kappa)));
    }
    Ok(())
}

fn evaluate_shares(params: &SssParams, f: &Poly) -> Vec<FieldElem> {
    (0..params.big_sigma).map(|i| f.eval(params.share_x(i))).collect()
}

fn message_of(params: &SssParams, f: &Poly) -> Vec<FieldElem> {
    (0..params.sigma).map(|i| f.eval(params.message_x(i))).collect()
}

pub fn sss_share(params: &SssParams, m: &[FieldElem], s: &[FieldElem]) -> Result<ShareVector> {
    check_len(params, m, "message")?;
    check_len(params, s, "randomiser")?;
    let pts: Vec<_> = (0..params.sigma)
        .map(|i| (params.message_x(i), m[i]))
        .chain((0..params.sigma).map(|i| (params.share_x(i), s[i])))
        .collect();
    let f = lagrange_interpolate(&pts)?;
    Ok(ShareVector { shares: evaluate_shares(params, &f), message: m.to_vec(), randomizer: s.to_vec() })
}

/// Polynomial through the given `(share index, value)` points, provided
/// all of them agree with the one through the first `2σ`.
fn fit(params: &SssParams, points: &[(usize, FieldElem)]) -> Result<Poly> {
    let k = 2 * params.sigma;
    if points.len() < k {
        return Err(Error::param(format!("need at least 2σ={k} shares, got {}", points.len())));
    }
    if points.iter().any(|&(i, _)| i >= params.big_sigma) {
        return Err(Error::param("share index out of range"));
    }
    let base: Vec<_> = points[..k].iter().map(|&(i, y)| (params.share_x(i), y)).collect();
    let f = lagrange_interpolate(&base)?;
    if points[k..].iter().any(|&(i, y)| f.eval(params.share_x(i)) != y) {
        return Err(AbortReason::InconsistentShares.into());
    }
    Ok(f)
}

pub fn sss_reconstruct(params: &SssParams, points: &[(usize, FieldElem)]) -> Result<Vec<FieldElem>> {
    Ok(message_of(params, &fit(params, points)?))
}

/// Whether a full share vector lies on a polynomial of degree below `2σ`.
pub fn is_consistent(params: &SssParams, shares: &[FieldElem]) -> bool {
    shares.len() == params.big_sigma && fit(params, &indexed(shares)).is_ok()
}

fn indexed(shares: &[FieldElem]) -> Vec<(usize, FieldElem)> {
    shares.iter().copied().enumerate().collect()
}

/// `Σ` blocks of `κ` bit commitments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SssCommitment {
    pub blocks: Vec<Vec<LweCommitment>>,
}

/// What the committer keeps after committing.
#[derive(Debug, Clone)]
pub struct CommitterState {
    pub sharing: ShareVector,
    /// The values actually committed; equal to `sharing.shares` for an
    /// honest committer.
    pub committed: Vec<FieldElem>,
    pub openings: Vec<Vec<LweOpening>>,
}

pub fn commit_values(key: &CommitKey, values: &[FieldElem], rng: &mut Rng) -> (SssCommitment, Vec<Vec<LweOpening>>) {
    let (blocks, openings) =
        values.iter().map(|v| v.to_bits().into_iter().map(|b| lwe_commit(key, b, rng)).unzip()).unzip();
    (SssCommitment { blocks }, openings)
}

/// Share `m` with a fresh randomiser and commit to every share.
pub fn commit_phase(
    params: &SssParams,
    key: &CommitKey,
    m: &[FieldElem],
    rng: &mut Rng,
) -> Result<(SssCommitment, CommitterState)> {
    let s = params.random_vector(rng);
    let sharing = sss_share(params, m, &s)?;
    let (com, openings) = commit_values(key, &sharing.shares, rng);
    let committed = sharing.shares.clone();
    Ok((com, CommitterState { sharing, committed, openings }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionOpening {
    pub index: usize,
    pub bits: Vec<LweOpening>,
}

pub fn schedule() -> Schedule {
    Schedule::new()
        .msg("sss-commit", Party::A)
        .msg("sss-shares", Party::A)
        .msg("sss-challenge", Party::B)
        .msg("sss-open", Party::A)
        .requires("sss-commit", "sss-shares")
        .requires("sss-shares", "sss-open")
        .requires("sss-challenge", "sss-open")
}

/// Uniform σ-subset of `{0, …, Σ−1}`, sorted.
pub fn random_challenge(params: &SssParams, rng: &mut Rng) -> Vec<usize> {
    let mut s = rand::seq::index::sample(rng, params.big_sigma, params.sigma).into_vec();
    s.sort_unstable();
    s
}

fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Number of bits used to flip a challenge.
pub const CHALLENGE_BITS: usize = 64;

/// Map 64 uniform bits to a σ-subset: the value modulo `C(Σ, σ)` is the
/// rank of the subset in colexicographic order.
pub fn challenge_from_bits(params: &SssParams, bits: &[bool]) -> Result<Vec<usize>> {
    if bits.len() != CHALLENGE_BITS {
        return Err(Error::param("challenge string must have 64 bits"));
    }
    let total = binom(params.big_sigma as u64, params.sigma as u64);
    let mut rank = u128::from(crate::bits::to_u64(bits)) % total;
    let mut out = Vec::with_capacity(params.sigma);
    let mut n = params.big_sigma as u64;
    for k in (1..=params.sigma as u64).rev() {
        loop {
            n -= 1;
            let c = binom(n, k);
            if c <= rank {
                rank -= c;
                out.push(n as usize);
                break;
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// A uniformly chosen preimage of `subset` under [`challenge_from_bits`].
pub fn bits_for_challenge(params: &SssParams, subset: &[usize], rng: &mut Rng) -> Result<Vec<bool>> {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != params.sigma || sorted.iter().any(|&i| i >= params.big_sigma) {
        return Err(Error::param("challenge must be σ distinct indices below Σ"));
    }
    let rank: u128 = sorted.iter().enumerate().map(|(k, &c)| binom(c as u64, k as u64 + 1)).sum();
    let total = binom(params.big_sigma as u64, params.sigma as u64);
    let reps = ((u128::from(u64::MAX) - rank) / total) + 1;
    let q = rng.random_range(0..reps as u64);
    let v = rank + u128::from(q) * total;
    Ok(crate::bits::from_u64(v as u64, CHALLENGE_BITS))
}

/// Committer reveals the full share vector; the receiver aborts unless
/// it lies on a polynomial of degree below `2σ`.
pub fn reveal_shares(session: &mut Session, params: &SssParams, shares: &[FieldElem]) -> Result<Vec<FieldElem>> {
    let wire: Vec<u32> = shares.iter().map(|x| x.value()).collect();
    let got: Vec<u32> = session.send(Party::A, "sss-shares", &wire)?;
    let shares: Vec<FieldElem> = got
        .into_iter()
        .map(|v| FieldElem::new(v, params.kappa))
        .collect::<Result<_>>()
        .map_err(|_| Error::Abort(AbortReason::Malformed))?;
    if !is_consistent(params, &shares) {
        return Err(AbortReason::InconsistentShares.into());
    }
    Ok(shares)
}

/// Committer opens the commitments in `subset`.
pub fn open_positions(session: &mut Session, state: &CommitterState, subset: &[usize]) -> Result<Vec<PositionOpening>> {
    let msg: Vec<PositionOpening> =
        subset.iter().map(|&i| PositionOpening { index: i, bits: state.openings[i].clone() }).collect();
    session.send(Party::A, "sss-open", &msg)
}

/// Receiver's check that each opened block matches the revealed share.
pub fn verify_positions(
    key: &CommitKey,
    com: &SssCommitment,
    shares: &[FieldElem],
    subset: &[usize],
    opened: &[PositionOpening],
) -> Result<()> {
    if opened.len() != subset.len() {
        return Err(AbortReason::BadOpening.into());
    }
    for (o, &i) in opened.iter().zip(subset) {
        let ok = o.index == i
            && i < com.blocks.len()
            && o.bits.len() == com.blocks[i].len()
            && o.bits.iter().map(|x| x.bit).eq(shares[i].to_bits())
            && o.bits.iter().zip(&com.blocks[i]).all(|(op, c)| lwe_verify(key, c, op));
        if !ok {
            return Err(AbortReason::BadOpening.into());
        }
    }
    Ok(())
}

/// What the committer sends when asked to open.
#[derive(Debug, Clone)]
pub enum OpenBehaviour {
    /// The committed shares.
    Honest,
    /// A different consistent share vector (for cheaters and the
    /// trapdoor simulator).
    Claim(Vec<FieldElem>),
    /// Stop before revealing anything.
    Refuse,
}

/// Full opening phase against an honest receiver whose challenge comes
/// from `challenge`. Returns the reconstructed message.
pub fn open_phase(
    session: &mut Session,
    params: &SssParams,
    key: &CommitKey,
    com: &SssCommitment,
    state: &CommitterState,
    behaviour: &OpenBehaviour,
    challenge: Vec<usize>,
) -> Result<Vec<FieldElem>> {
    let claimed = match behaviour {
        OpenBehaviour::Honest => &state.committed,
        OpenBehaviour::Claim(v) => v,
        OpenBehaviour::Refuse => return Err(AbortReason::Refusal.into()),
    };
    let shares = reveal_shares(session, params, claimed)?;
    let subset: Vec<usize> = session.send(Party::B, "sss-challenge", &challenge)?;
    if subset.len() != params.sigma {
        return Err(AbortReason::Malformed.into());
    }
    let opened = open_positions(session, state, &subset)?;
    verify_positions(key, com, &shares, &subset, &opened)?;
    sss_reconstruct(params, &indexed(&shares))
}

/// Fabricated share vector for message `target` that agrees with the
/// committed shares on `subset`.
pub fn trapdoor_shares(
    params: &SssParams,
    committed: &[FieldElem],
    target: &[FieldElem],
    subset: &[usize],
) -> Result<Vec<FieldElem>> {
    if subset.len() != params.sigma {
        return Err(Error::param(format!("challenge must have σ={} positions", params.sigma)));
    }
    check_len(params, target, "target message")?;
    let pts: Vec<_> = subset
        .iter()
        .map(|&i| (params.share_x(i), committed[i]))
        .chain((0..params.sigma).map(|i| (params.message_x(i), target[i])))
        .collect();
    let f = lagrange_interpolate(&pts)?;
    Ok(evaluate_shares(params, &f))
}

/// The opening phase as run by a simulator that knows the challenge in
/// advance and wants the receiver to reconstruct `target`.
pub fn trapdoor_open(
    session: &mut Session,
    params: &SssParams,
    key: &CommitKey,
    com: &SssCommitment,
    state: &CommitterState,
    target: &[FieldElem],
    forced: Vec<usize>,
) -> Result<Vec<FieldElem>> {
    let fake = trapdoor_shares(params, &state.committed, target, &forced)?;
    open_phase(session, params, key, com, state, &OpenBehaviour::Claim(fake), forced)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeMethod {
    /// Search over all 2σ-subsets of positions.
    Exhaustive,
    /// Berlekamp–Welch bounded-distance decoding.
    BerlekampWelch,
    /// Nothing within decoding range; interpolation of the first 2σ shares.
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub message: Vec<FieldElem>,
    pub extracted_shares: Vec<FieldElem>,
    pub distance: usize,
    /// More than one nearest codeword; the smallest message was chosen.
    pub tie: bool,
    pub method: DecodeMethod,
}

/// Decrypt every block with the trapdoor and decode to the nearest
/// consistent sharing.
pub fn extract_commitment(params: &SssParams, key: &CommitKey, com: &SssCommitment) -> Result<Extraction> {
    if com.blocks.len() != params.big_sigma {
        return Err(Error::param("commitment has the wrong number of blocks"));
    }
    let shares = com
        .blocks
        .iter()
        .map(|blk| {
            let bits = blk.iter().map(|c| lwe_extract(key, c)).collect::<Result<Vec<bool>>>()?;
            FieldElem::from_bits(&bits)
        })
        .collect::<Result<Vec<_>>>()?;
    let (poly, distance, tie, method) = decode(params, &shares);
    Ok(Extraction { message: message_of(params, &poly), extracted_shares: shares, distance, tie, method })
}

fn distance_to(params: &SssParams, f: &Poly, shares: &[FieldElem]) -> usize {
    shares.iter().enumerate().filter(|&(i, &y)| f.eval(params.share_x(i)) != y).count()
}

/// Nearest codeword to `shares`.
pub fn decode(params: &SssParams, shares: &[FieldElem]) -> (Poly, usize, bool, DecodeMethod) {
    let k = 2 * params.sigma;
    let first = lagrange_interpolate(&(0..k).map(|i| (params.share_x(i), shares[i])).collect::<Vec<_>>())
        .expect("distinct labels");
    let d0 = distance_to(params, &first, shares);
    if d0 == 0 {
        return (first, 0, false, DecodeMethod::Exhaustive);
    }
    if params.sigma <= 4 {
        let mut best: Option<(usize, Vec<u32>, Poly)> = None;
        let mut tie = false;
        for subset in combinations(params.big_sigma, k) {
            let pts: Vec<_> = subset.iter().map(|&i| (params.share_x(i), shares[i])).collect();
            let f = lagrange_interpolate(&pts).expect("distinct labels");
            let d = distance_to(params, &f, shares);
            let key: Vec<u32> = message_of(params, &f).iter().map(|x| x.value()).collect();
            match &best {
                Some((bd, bk, _)) if d > *bd || (d == *bd && key == *bk) => {}
                Some((bd, bk, _)) if d == *bd => {
                    tie = true;
                    if key < *bk {
                        best = Some((d, key, f));
                    }
                }
                _ => {
                    tie = false;
                    best = Some((d, key, f));
                }
            }
        }
        let (d, _, f) = best.expect("at least one subset");
        return (f, d, tie, DecodeMethod::Exhaustive);
    }
    match berlekamp_welch(params, shares) {
        Some(f) => {
            let d = distance_to(params, &f, shares);
            (f, d, false, DecodeMethod::BerlekampWelch)
        }
        None => (first, d0, false, DecodeMethod::Fallback),
    }
}

fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut idx: Vec<usize> = (0..k).collect();
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = idx.clone();
        let mut i = k;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// Solve `A x = b` over the field; `None` if singular.
fn solve(mut a: Vec<Vec<FieldElem>>, mut b: Vec<FieldElem>) -> Option<Vec<FieldElem>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let kappa = b.first()?.kappa();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].inv().ok()?;
        for x in a[r].iter_mut() {
            *x = *x * inv;
        }
        b[r] = b[r] * inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c];
                for j in 0..cols {
                    let t = a[r][j];
                    a[i][j] = a[i][j] + f * t;
                }
                let t = b[r];
                b[i] = b[i] + f * t;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if b[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![FieldElem::zero(kappa); cols];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = b[row];
    }
    Some(x)
}

/// `num / den`, or `None` if the division leaves a remainder.
fn poly_div_exact(num: &[FieldElem], den: &[FieldElem]) -> Option<Vec<FieldElem>> {
    let kappa = den[0].kappa();
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return rem.iter().all(|x| x.is_zero()).then(Vec::new);
    }
    let lead_inv = den[dd].inv().ok()?;
    let mut q = vec![FieldElem::zero(kappa); rem.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd] * lead_inv;
        q[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] = rem[i + j] + c * d;
        }
    }
    rem.iter().all(|x| x.is_zero()).then_some(q)
}

/// Classic Berlekamp–Welch for up to `⌊(Σ − 2σ)/2⌋` errors.
fn berlekamp_welch(params: &SssParams, shares: &[FieldElem]) -> Option<Poly> {
    let k = 2 * params.sigma;
    let n = params.big_sigma;
    let zero = FieldElem::zero(params.kappa);
    for e in 1..=(n - k) / 2 {
        // unknowns: E_0..E_{e−1} (E monic of degree e), Q_0..Q_{e+k−1}
        let cols = e + e + k;
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for (i, &y) in shares.iter().enumerate() {
            let x = params.share_x(i);
            let mut row = vec![zero; cols];
            let mut xp = FieldElem::one(params.kappa);
            for j in 0..e {
                row[j] = y * xp;
                xp = xp * x;
            }
            // y·x^e moves to the right-hand side
            b.push(y * xp);
            let mut xq = FieldElem::one(params.kappa);
            for j in 0..e + k {
                row[e + j] = xq;
                xq = xq * x;
            }
            a.push(row);
        }
        let Some(sol) = solve(a, b) else { continue };
        let mut ecoef = sol[..e].to_vec();
        ecoef.push(FieldElem::one(params.kappa));
        let qcoef = sol[e..].to_vec();
        if let Some(p) = poly_div_exact(&qcoef, &ecoef) {
            let f = Poly::from_coeffs(params.kappa, p).ok()?;
            if f.degree().is_none_or(|d| d < k) && distance_to(params, &f, shares) <= e {
                return Some(f);
            }
        }
    }
    None
}

/// Probability that a uniform σ-subset misses `bad` fixed positions.
pub fn escape_probability(params: &SssParams, bad: usize) -> f64 {
    let n = params.big_sigma as u64;
    (binom(n - bad as u64, params.sigma as u64) as f64) / (binom(n, params.sigma as u64) as f64)
}

/// A committer who commits to the sharing of `m` with exactly `bad`
/// positions replaced by other values, then claims the true sharing.
pub fn corrupt_commit(
    params: &SssParams,
    key: &CommitKey,
    m: &[FieldElem],
    bad: usize,
    rng: &mut Rng,
) -> Result<(SssCommitment, CommitterState)> {
    let s = params.random_vector(rng);
    let sharing = sss_share(params, m, &s)?;
    let mut committed = sharing.shares.clone();
    for i in rand::seq::index::sample(rng, params.big_sigma, bad) {
        let delta = loop {
            let d = FieldElem::random(params.kappa, rng);
            if !d.is_zero() {
                break d;
            }
        };
        committed[i] = committed[i] + delta;
    }
    let (com, openings) = commit_values(key, &committed, rng);
    Ok((com, CommitterState { sharing, committed, openings }))
}

/// The consistent share vector of a message other than the committed one
/// that agrees with the committed shares on `2σ − 1` random positions.
pub fn max_agreement_claim(params: &SssParams, committed: &[FieldElem], rng: &mut Rng) -> Vec<FieldElem> {
    let k = 2 * params.sigma;
    let keep = rand::seq::index::sample(rng, params.big_sigma, k - 1).into_vec();
    let pts: Vec<_> = keep.iter().map(|&i| (params.share_x(i), committed[i])).collect();
    let f = lagrange_interpolate(&pts).expect("distinct labels");
    // add c·Π_{i∈keep}(X − x_i): same values on `keep`, different message
    let mut vanish = Poly::from_coeffs(params.kappa, vec![FieldElem::one(params.kappa)]).expect("field");
    for &(x, _) in &pts {
        let mut next = vec![FieldElem::zero(params.kappa); vanish.coeffs().len() + 1];
        for (j, &c) in vanish.coeffs().iter().enumerate() {
            next[j] = next[j] + c * x;
            next[j + 1] = next[j + 1] + c;
        }
        vanish = Poly::from_coeffs(params.kappa, next).expect("field");
    }
    let c = loop {
        let c = FieldElem::random(params.kappa, rng);
        if !c.is_zero() {
            break c;
        }
    };
    (0..params.big_sigma)
        .map(|i| {
            let x = params.share_x(i);
            f.eval(x) + c * vanish.eval(x)
        })
        .collect()
}
