//! Proofs of knowledge of a Hamiltonian cycle built from a simulatable
//! witness encoding, committed position by position under a flipped key,
//! and the composition of a coin-flipped reference string with a
//! non-interactive proof.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::coinflip::{coin_sequential, CoinScheme, HonestCommitter, HonestResponder, IdealCoin, COIN};
use crate::error::{AbortReason, Error, Result};
use crate::mixedcommit::{
    binding_key_string, key_from_string, lwe_commit, lwe_extract, lwe_verify, CommitKey, LweCommitment, LweOpening,
    LweParams, NaorParams,
};
use crate::protocols::PartyRngs;
use crate::rng::{fork, Rng};
use crate::session::{Party, Schedule, Session};

/// Undirected simple graph as a symmetric adjacency matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub v: usize,
    adj: Vec<bool>,
}

impl Graph {
    pub fn empty(v: usize) -> Self {
        Graph { v, adj: vec![false; v * v] }
    }

    pub fn from_edges(v: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(v);
        for &(a, b) in edges {
            if a >= v || b >= v || a == b {
                return Err(Error::param(format!("bad edge ({a}, {b}) for {v} vertices")));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    /// `list[a]` holds the neighbours of `a`.
    pub fn from_adjacency_list(list: &[Vec<usize>]) -> Result<Self> {
        let edges: Vec<(usize, usize)> =
            list.iter().enumerate().flat_map(|(a, ns)| ns.iter().map(move |&b| (a, b))).collect();
        Graph::from_edges(list.len(), &edges)
    }

    pub fn adjacency_list(&self) -> Vec<Vec<usize>> {
        (0..self.v).map(|a| (0..self.v).filter(|&b| self.has_edge(a, b)).collect()).collect()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.adj[a * self.v + b] = true;
        self.adj[b * self.v + a] = true;
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.v + b]
    }

    pub fn matrix(&self) -> &[bool] {
        &self.adj
    }

    /// Relabel vertex `a` as `pi[a]`.
    pub fn permuted(&self, pi: &[usize]) -> Graph {
        let mut g = Graph::empty(self.v);
        for a in 0..self.v {
            for b in 0..self.v {
                g.adj[pi[a] * self.v + pi[b]] = self.adj[a * self.v + b];
            }
        }
        g
    }

    /// A random cycle through all vertices plus each other edge with
    /// probability 1/2. Returns the graph and the cycle.
    pub fn random_hamiltonian(v: usize, rng: &mut Rng) -> Result<(Graph, Vec<usize>)> {
        if v < 3 {
            return Err(Error::param("a Hamiltonian graph needs at least 3 vertices"));
        }
        let mut cycle: Vec<usize> = (0..v).collect();
        cycle.shuffle(rng);
        let mut g = Graph::empty(v);
        for j in 0..v {
            g.add_edge(cycle[j], cycle[(j + 1) % v]);
        }
        for a in 0..v {
            for b in a + 1..v {
                if rand::Rng::random::<bool>(rng) {
                    g.add_edge(a, b);
                }
            }
        }
        Ok((g, cycle))
    }
}

fn is_permutation(p: &[usize], v: usize) -> bool {
    let mut seen = vec![false; v];
    p.len() == v && p.iter().all(|&x| x < v && !std::mem::replace(&mut seen[x], true))
}

/// Whether `cycle` visits every vertex once and each step is an edge.
pub fn is_hamiltonian_cycle(g: &Graph, cycle: &[usize]) -> bool {
    is_permutation(cycle, g.v) && (0..g.v).all(|j| g.has_edge(cycle[j], cycle[(j + 1) % g.v]))
}

/// Backtracking search for a cycle through vertex 0.
pub fn find_hamiltonian_cycle(g: &Graph) -> Option<Vec<usize>> {
    fn extend(g: &Graph, path: &mut Vec<usize>, used: &mut [bool]) -> bool {
        if path.len() == g.v {
            return g.has_edge(path[g.v - 1], path[0]);
        }
        let last = path[path.len() - 1];
        for next in 0..g.v {
            if !used[next] && g.has_edge(last, next) {
                used[next] = true;
                path.push(next);
                if extend(g, path, used) {
                    return true;
                }
                path.pop();
                used[next] = false;
            }
        }
        false
    }
    if g.v == 0 {
        return None;
    }
    let mut used = vec![false; g.v];
    used[0] = true;
    let mut path = vec![0];
    extend(g, &mut path, &mut used).then_some(path)
}

/// Blum-style encoding repeated `sigma` times. Repetition `i` holds a
/// permutation `π`, the permuted cycle `π∘w`, and the matrix of `π(G)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamEncoding {
    pub v: usize,
    pub sigma: usize,
}

impl HamEncoding {
    pub fn new(v: usize, sigma: usize) -> Result<Self> {
        if v < 3 || sigma == 0 {
            return Err(Error::param("need v ≥ 3 and σ ≥ 1"));
        }
        Ok(HamEncoding { v, sigma })
    }

    fn width(&self) -> usize {
        (usize::BITS - (self.v - 1).leading_zeros()) as usize
    }

    pub fn block_len(&self) -> usize {
        2 * self.v * self.width() + self.v * self.v
    }

    pub fn len(&self) -> usize {
        self.sigma * self.block_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn pi_range(&self) -> std::ops::Range<usize> {
        0..self.v * self.width()
    }

    fn cycle_range(&self) -> std::ops::Range<usize> {
        self.v * self.width()..2 * self.v * self.width()
    }

    fn matrix_at(&self, a: usize, b: usize) -> usize {
        2 * self.v * self.width() + a * self.v + b
    }

    fn write_labels(&self, out: &mut Vec<bool>, labels: &[usize]) {
        for &x in labels {
            out.extend(crate::bits::from_u64(x as u64, self.width()));
        }
    }

    fn read_labels(&self, block: &[bool]) -> Vec<usize> {
        block.chunks(self.width()).map(|c| crate::bits::to_u64(c) as usize).collect()
    }

    /// One repetition with permutation `pi`.
    pub fn encode_repetition(&self, g: &Graph, cycle: &[usize], pi: &[usize]) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.block_len());
        self.write_labels(&mut out, pi);
        let permuted: Vec<usize> = cycle.iter().map(|&x| pi[x]).collect();
        self.write_labels(&mut out, &permuted);
        out.extend_from_slice(g.permuted(pi).matrix());
        out
    }

    /// `E(x, w, r′)`; refuses a non-witness.
    pub fn encode(&self, g: &Graph, cycle: &[usize], rng: &mut Rng) -> Result<Vec<bool>> {
        if g.v != self.v || !is_hamiltonian_cycle(g, cycle) {
            return Err(Error::param("not a Hamiltonian cycle of the graph"));
        }
        let mut e = Vec::with_capacity(self.len());
        for _ in 0..self.sigma {
            let mut pi: Vec<usize> = (0..self.v).collect();
            pi.shuffle(rng);
            e.extend(self.encode_repetition(g, cycle, &pi));
        }
        Ok(e)
    }

    /// `D(x, e)`: undo `π` on the permuted cycle of each repetition until
    /// one yields a cycle of `g`.
    pub fn decode(&self, g: &Graph, e: &[bool]) -> Option<Vec<usize>> {
        e.chunks(self.block_len()).find_map(|blk| {
            let pi = self.read_labels(&blk[self.pi_range()]);
            let c = self.read_labels(&blk[self.cycle_range()]);
            if !is_permutation(&pi, self.v) || !is_permutation(&c, self.v) {
                return None;
            }
            let mut inv = vec![0; self.v];
            for (a, &p) in pi.iter().enumerate() {
                inv[p] = a;
            }
            let w: Vec<usize> = c.iter().map(|&x| inv[x]).collect();
            is_hamiltonian_cycle(g, &w).then_some(w)
        })
    }

    /// Positions of one repetition opened for challenge bit `bit`; for
    /// bit 1 they depend on the permuted cycle `c`.
    fn rep_positions(&self, bit: bool, c: &[usize]) -> Vec<usize> {
        let mut pos: Vec<usize> = if bit {
            let mut p: Vec<usize> = self.cycle_range().collect();
            p.extend((0..self.v).map(|j| self.matrix_at(c[j] % self.v, c[(j + 1) % self.v] % self.v)));
            p
        } else {
            self.pi_range().chain(2 * self.v * self.width()..self.block_len()).collect()
        };
        pos.sort_unstable();
        pos.dedup();
        pos
    }

    /// `S(s)` for the encoding `e`.
    pub fn select(&self, s: &[bool], e: &[bool]) -> Vec<usize> {
        let bl = self.block_len();
        s.iter()
            .enumerate()
            .flat_map(|(i, &bit)| {
                let c = self.read_labels(&e[i * bl..][self.cycle_range()]);
                self.rep_positions(bit, &c).into_iter().map(move |p| i * bl + p)
            })
            .collect()
    }

    /// `J(x, s, e_s)`: the opened positions must be exactly `S(s)` and
    /// pass the check of their repetition.
    pub fn judge(&self, g: &Graph, s: &[bool], opened: &[(usize, bool)]) -> bool {
        if s.len() != self.sigma || g.v != self.v {
            return false;
        }
        let bl = self.block_len();
        let map: BTreeMap<usize, bool> = opened.iter().copied().collect();
        if map.len() != opened.len() {
            return false;
        }
        let mut expected = Vec::new();
        for (i, &bit) in s.iter().enumerate() {
            let get = |p: usize| map.get(&(i * bl + p)).copied();
            let labels = |r: std::ops::Range<usize>| -> Option<Vec<usize>> {
                let bits: Option<Vec<bool>> = r.map(get).collect();
                Some(self.read_labels(&bits?))
            };
            let ok = if bit {
                let Some(c) = labels(self.cycle_range()) else { return false };
                if !is_permutation(&c, self.v) {
                    return false;
                }
                expected.extend(self.rep_positions(true, &c).into_iter().map(|p| i * bl + p));
                (0..self.v).all(|j| get(self.matrix_at(c[j], c[(j + 1) % self.v])) == Some(true))
            } else {
                let Some(pi) = labels(self.pi_range()) else { return false };
                if !is_permutation(&pi, self.v) {
                    return false;
                }
                expected.extend(self.rep_positions(false, &[]).into_iter().map(|p| i * bl + p));
                let h = g.permuted(&pi);
                (0..self.v).all(|a| (0..self.v).all(|b| get(self.matrix_at(a, b)) == Some(h.has_edge(a, b))))
            };
            if !ok {
                return false;
            }
        }
        expected.sort_unstable();
        expected.iter().copied().eq(map.keys().copied())
    }

    /// Simulated opening of one repetition, block-relative, from the
    /// permutation `perm`.
    pub fn simulate_repetition(&self, g: &Graph, bit: bool, perm: &[usize]) -> Vec<(usize, bool)> {
        let blk = if bit {
            let mut b = vec![false; self.block_len()];
            let mut labels = Vec::new();
            self.write_labels(&mut labels, perm);
            b[self.cycle_range()].copy_from_slice(&labels);
            for j in 0..self.v {
                b[self.matrix_at(perm[j], perm[(j + 1) % self.v])] = true;
            }
            b
        } else {
            // any cycle works; the opened positions do not include it
            let dummy: Vec<usize> = (0..self.v).collect();
            self.encode_repetition(g, &dummy, perm)
        };
        self.rep_positions(bit, perm).into_iter().map(|p| (p, blk[p])).collect()
    }

    /// `Ê(x, s)`.
    pub fn simulate(&self, g: &Graph, s: &[bool], rng: &mut Rng) -> Vec<(usize, bool)> {
        let bl = self.block_len();
        s.iter()
            .enumerate()
            .flat_map(|(i, &bit)| {
                let mut perm: Vec<usize> = (0..self.v).collect();
                perm.shuffle(rng);
                self.simulate_repetition(g, bit, &perm).into_iter().map(move |(p, x)| (i * bl + p, x))
            })
            .collect()
    }

    /// An encoding that answers challenge bit `guess[i]` in repetition `i`
    /// and nothing else; needs no witness.
    pub fn cheat_encode(&self, g: &Graph, guess: &[bool], rng: &mut Rng) -> Vec<bool> {
        let mut e = Vec::with_capacity(self.len());
        for &bit in guess {
            let mut perm: Vec<usize> = (0..self.v).collect();
            perm.shuffle(rng);
            let mut blk = vec![false; self.block_len()];
            for (p, x) in self.simulate_repetition(g, bit, &perm) {
                blk[p] = x;
            }
            if bit {
                let mut pi: Vec<usize> = (0..self.v).collect();
                pi.shuffle(rng);
                let mut labels = Vec::new();
                self.write_labels(&mut labels, &pi);
                blk[self.pi_range()].copy_from_slice(&labels);
            }
            e.extend(blk);
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prover {
    Honest(Vec<usize>),
    /// No witness: guesses each challenge bit in advance.
    Cheat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZkpkConfig {
    pub enc: HamEncoding,
    pub lwe: LweParams,
    /// Let the key flip return a binding key string, as the extracting
    /// simulator does, and extract after the run.
    pub binding: bool,
}

impl ZkpkConfig {
    pub fn new(v: usize, sigma: usize) -> Result<Self> {
        Ok(ZkpkConfig { enc: HamEncoding::new(v, sigma)?, lwe: LweParams::default(), binding: false })
    }

    pub fn key_len(&self) -> usize {
        self.lwe.trapdoor_string_len()
    }
}

pub fn schedule() -> Schedule {
    Schedule::new()
        .msg("zk-commit", Party::A)
        .msg("zk-challenge", Party::B)
        .msg("zk-open", Party::A)
        .requires("zk-commit", "zk-challenge")
        .requires("zk-challenge", "zk-open")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZkpkOutcome {
    pub accepted: bool,
    pub abort: Option<AbortReason>,
    pub challenge: Vec<bool>,
    /// Indices Alice opened, as Bob received them.
    pub opened: Vec<usize>,
    /// Witness recovered from the commitments in binding mode.
    pub extracted: Option<Vec<usize>>,
}

/// Key from an ideal κ-bit coin, position-wise commitments to `e`, an
/// ideal σ-bit challenge, openings of `S(s)`, and Bob's judgement.
pub fn zkpk_run(
    session: &mut Session,
    g: &Graph,
    prover: &Prover,
    cfg: &ZkpkConfig,
    rngs: &mut PartyRngs,
) -> Result<ZkpkOutcome> {
    let enc = &cfg.enc;
    if g.v != enc.v {
        return Err(Error::param("graph size differs from the encoding"));
    }
    let (key, bkey): (CommitKey, Option<CommitKey>) = if cfg.binding {
        let (bits, bk) = binding_key_string(&cfg.lwe, &mut rngs.world);
        (key_from_string(&cfg.lwe, &bits)?, Some(bk))
    } else {
        let bits = IdealCoin::new(cfg.key_len()).flip(&mut rngs.world).to_vec();
        (key_from_string(&cfg.lwe, &bits)?, None)
    };

    let e = match prover {
        Prover::Honest(w) => enc.encode(g, w, &mut rngs.alice).map_err(|_| Error::Abort(AbortReason::Refusal))?,
        Prover::Cheat => {
            let guess = crate::bits::random_bits(enc.sigma, &mut rngs.alice);
            enc.cheat_encode(g, &guess, &mut rngs.alice)
        }
    };
    let (coms, opens): (Vec<LweCommitment>, Vec<LweOpening>) =
        e.iter().map(|&b| lwe_commit(&key, b, &mut rngs.alice)).unzip();
    let coms: Vec<LweCommitment> = session.send(Party::A, "zk-commit", &coms)?;
    if coms.len() != enc.len() {
        return Err(AbortReason::Malformed.into());
    }
    let extracted = match &bkey {
        Some(k) => {
            let bits = coms.iter().map(|c| lwe_extract(k, c)).collect::<Result<Vec<bool>>>()?;
            enc.decode(g, &bits)
        }
        None => None,
    };

    let s = IdealCoin::new(enc.sigma).flip(&mut rngs.world).to_vec();
    let s_a: Vec<bool> = session.send(Party::B, "zk-challenge", &s)?;
    if s_a.len() != enc.sigma {
        return Err(AbortReason::Malformed.into());
    }
    let positions = enc.select(&s_a, &e);
    let reply: Vec<(usize, LweOpening)> = positions.iter().map(|&p| (p, opens[p].clone())).collect();
    let got: Vec<(usize, LweOpening)> = session.send(Party::A, "zk-open", &reply)?;
    let opened: Vec<usize> = got.iter().map(|(p, _)| *p).collect();
    let all_valid = got.iter().all(|(p, o)| *p < coms.len() && lwe_verify(&key, &coms[*p], o));
    let outcome = |accepted, abort| ZkpkOutcome {
        accepted,
        abort,
        challenge: s.clone(),
        opened: opened.clone(),
        extracted: extracted.clone(),
    };
    if !all_valid {
        return Ok(outcome(false, Some(AbortReason::BadOpening)));
    }
    let e_s: Vec<(usize, bool)> = got.iter().map(|(p, o)| (*p, o.bit)).collect();
    if enc.judge(g, &s, &e_s) {
        Ok(outcome(true, None))
    } else {
        Ok(outcome(false, Some(AbortReason::Judgment)))
    }
}

/// A non-interactive proof system over a common reference string.
pub trait Nizk {
    type Statement: Serialize;
    type Witness;
    type Proof: Serialize + DeserializeOwned;

    fn crs_bits(&self) -> usize;
    fn prove(&self, crs: &[bool], x: &Self::Statement, w: &Self::Witness) -> Self::Proof;
    fn verify(&self, crs: &[bool], x: &Self::Statement, proof: &Self::Proof) -> bool;
}

/// Test double for membership in the perfect squares: the proof is the
/// square root itself. Complete and sound, and not zero-knowledge.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquareNizk {
    pub crs_bits: usize,
}

impl Nizk for SquareNizk {
    type Statement = u64;
    type Witness = u64;
    type Proof = u64;

    fn crs_bits(&self) -> usize {
        self.crs_bits
    }

    fn prove(&self, _: &[bool], _: &u64, w: &u64) -> u64 {
        *w
    }

    fn verify(&self, _: &[bool], x: &u64, proof: &u64) -> bool {
        proof.checked_mul(*proof) == Some(*x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IqzkOutcome {
    pub accepted: bool,
    pub crs: Vec<bool>,
}

pub fn iqzk_schedule() -> Schedule {
    COIN.schedule().msg("iq-proof", Party::A).requires("coin-open", "iq-proof")
}

/// Flip the reference string with sequential coins, then send one
/// non-interactive proof over it.
pub fn iqzk_run<N: Nizk>(
    session: &mut Session,
    nizk: &N,
    x: &N::Statement,
    w: &N::Witness,
    rngs: &mut PartyRngs,
) -> Result<IqzkOutcome> {
    let mut alice = HonestCommitter { rng: fork(&mut rngs.alice, "coin") };
    let mut bob = HonestResponder { rng: fork(&mut rngs.bob, "coin") };
    let scheme = CoinScheme::Naor(NaorParams::default());
    let crs = match coin_sequential(session, &scheme, &COIN, nizk.crs_bits(), &mut alice, &mut bob) {
        Ok(c) => c,
        Err(e) if e.is_abort() => return Ok(IqzkOutcome { accepted: false, crs: Vec::new() }),
        Err(e) => return Err(e),
    };
    let proof = nizk.prove(&crs, x, w);
    let got: N::Proof = session.send(Party::A, "iq-proof", &proof)?;
    Ok(IqzkOutcome { accepted: nizk.verify(&crs, x, &got), crs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::stats;
    use std::collections::BTreeMap;

    fn permutations(v: usize) -> Vec<Vec<usize>> {
        if v == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in permutations(v - 1) {
            for pos in 0..v {
                let mut q = p.clone();
                q.insert(pos, v - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn cycle_checker() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(is_hamiltonian_cycle(&g, &[0, 1, 2, 3]));
        assert!(is_hamiltonian_cycle(&g, &[2, 1, 0, 3]));
        assert!(!is_hamiltonian_cycle(&g, &[0, 2, 1, 3]));
        assert!(!is_hamiltonian_cycle(&g, &[0, 1, 2]));
        assert!(!is_hamiltonian_cycle(&g, &[0, 1, 1, 3]));
        let list = g.adjacency_list();
        assert_eq!(Graph::from_adjacency_list(&list).unwrap(), g);
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
    }

    #[test]
    fn completeness_all_challenges() {
        let mut rng = seeded(1);
        let enc = HamEncoding::new(8, 4).unwrap();
        for _ in 0..100 {
            let (g, w) = Graph::random_hamiltonian(8, &mut rng).unwrap();
            let e = enc.encode(&g, &w, &mut rng).unwrap();
            for s in 0..16u64 {
                let s = crate::bits::from_u64(s, 4);
                let opened: Vec<(usize, bool)> = enc.select(&s, &e).into_iter().map(|p| (p, e[p])).collect();
                assert!(enc.judge(&g, &s, &opened));
            }
        }
    }

    #[test]
    fn encoder_refuses_non_witness() {
        let mut rng = seeded(2);
        let enc = HamEncoding::new(5, 2).unwrap();
        let (g, mut w) = Graph::random_hamiltonian(5, &mut rng).unwrap();
        w[0] = w[1];
        assert!(enc.encode(&g, &w, &mut rng).is_err());
    }

    #[test]
    fn both_answers_determine_cycle() {
        let mut rng = seeded(3);
        let enc = HamEncoding::new(8, 3).unwrap();
        let (g, w) = Graph::random_hamiltonian(8, &mut rng).unwrap();
        let e = enc.encode(&g, &w, &mut rng).unwrap();
        let d = enc.decode(&g, &e).unwrap();
        assert!(is_hamiltonian_cycle(&g, &d));
    }

    #[test]
    fn judge_ignores_unopened_positions() {
        let mut rng = seeded(4);
        let enc = HamEncoding::new(6, 4).unwrap();
        let (g, w) = Graph::random_hamiltonian(6, &mut rng).unwrap();
        let e = enc.encode(&g, &w, &mut rng).unwrap();
        let s = vec![true, false, true, false];
        let sel = enc.select(&s, &e);
        let mut scrambled = e.clone();
        for (i, b) in scrambled.iter_mut().enumerate() {
            if sel.binary_search(&i).is_err() {
                *b = rand::Rng::random(&mut rng);
            }
        }
        assert_eq!(enc.select(&s, &scrambled), sel);
        let open = |x: &[bool]| sel.iter().map(|&p| (p, x[p])).collect::<Vec<_>>();
        assert_eq!(enc.judge(&g, &s, &open(&e)), enc.judge(&g, &s, &open(&scrambled)));
        let mut extra = open(&e);
        let stray = (0..enc.len()).find(|p| sel.binary_search(p).is_err()).unwrap();
        extra.push((stray, e[stray]));
        assert!(!enc.judge(&g, &s, &extra));
    }

    #[test]
    fn simulation_exact_at_four_vertices() {
        let enc = HamEncoding::new(4, 1).unwrap();
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let w = [0, 1, 2, 3];
        for bit in [false, true] {
            let sel = |blk: &[bool]| -> Vec<(usize, bool)> {
                enc.select(&[bit], blk).into_iter().map(|p| (p, blk[p])).collect()
            };
            let real: BTreeMap<_, u64> =
                stats::histogram(permutations(4).iter().map(|pi| sel(&enc.encode_repetition(&g, &w, pi))));
            let sim: BTreeMap<_, u64> =
                stats::histogram(permutations(4).iter().map(|p| enc.simulate_repetition(&g, bit, p)));
            assert_eq!(real, sim, "bit {bit}");
        }
    }

    #[test]
    fn cheat_encoding_answers_only_its_guess() {
        let mut rng = seeded(5);
        let enc = HamEncoding::new(6, 1).unwrap();
        let (g, _) = Graph::random_hamiltonian(6, &mut rng).unwrap();
        for guess in [false, true] {
            let e = enc.cheat_encode(&g, &[guess], &mut rng);
            let judge = |s: bool| {
                let opened: Vec<_> = enc.select(&[s], &e).into_iter().map(|p| (p, e[p])).collect();
                enc.judge(&g, &[s], &opened)
            };
            assert!(judge(guess));
        }
        // a non-Hamiltonian graph has no encoding answering bit 1 and bit 0
        let path = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let enc4 = HamEncoding::new(4, 1).unwrap();
        for pi in permutations(4) {
            let blk = enc4.encode_repetition(&path, &[0, 1, 2, 3], &pi);
            let opened: Vec<_> = enc4.select(&[true], &blk).into_iter().map(|p| (p, blk[p])).collect();
            assert!(!enc4.judge(&path, &[true], &opened));
        }
    }

    fn run(seed: u64, g: &Graph, p: &Prover, cfg: &ZkpkConfig) -> ZkpkOutcome {
        let mut rngs = PartyRngs::new(&mut seeded(seed));
        let mut s = Session::new(seed, schedule());
        zkpk_run(&mut s, g, p, cfg, &mut rngs).unwrap()
    }

    #[test]
    fn protocol_completeness_and_minimality() {
        let mut rng = seeded(6);
        let cfg = ZkpkConfig::new(8, 8).unwrap();
        for seed in 0..10 {
            let (g, w) = Graph::random_hamiltonian(8, &mut rng).unwrap();
            let out = run(seed, &g, &Prover::Honest(w), &cfg);
            assert!(out.accepted);
            let mut sorted = out.opened.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, out.opened);
        }
    }

    #[test]
    fn cheater_passes_about_two_to_minus_sigma() {
        let mut rng = seeded(7);
        let cfg = ZkpkConfig::new(5, 2).unwrap();
        let (g, _) = Graph::random_hamiltonian(5, &mut rng).unwrap();
        let passed = (0..400).filter(|&s| run(s, &g, &Prover::Cheat, &cfg).accepted).count();
        assert!((60..140).contains(&passed), "{passed}");
    }

    #[test]
    fn cycle_search() {
        let mut rng = seeded(9);
        for v in 3..9 {
            let (g, _) = Graph::random_hamiltonian(v, &mut rng).unwrap();
            assert!(is_hamiltonian_cycle(&g, &find_hamiltonian_cycle(&g).unwrap()));
        }
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(find_hamiltonian_cycle(&star), None);
    }

    #[test]
    fn binding_mode_extracts() {
        let mut rng = seeded(8);
        let cfg = ZkpkConfig { binding: true, ..ZkpkConfig::new(6, 4).unwrap() };
        let (g, w) = Graph::random_hamiltonian(6, &mut rng).unwrap();
        let out = run(1, &g, &Prover::Honest(w), &cfg);
        assert!(out.accepted);
        assert!(is_hamiltonian_cycle(&g, &out.extracted.unwrap()));
    }

    #[test]
    fn iqzk_with_square_double() {
        let nizk = SquareNizk { crs_bits: 8 };
        let mut counts = vec![0u64; 256];
        for seed in 0..1000 {
            let mut rngs = PartyRngs::new(&mut seeded(seed));
            let mut s = Session::new(seed, iqzk_schedule());
            let out = iqzk_run(&mut s, &nizk, &(seed * seed), &seed, &mut rngs).unwrap();
            assert!(out.accepted);
            counts[crate::bits::to_u64(&out.crs) as usize] += 1;
            let mut s = Session::new(seed, iqzk_schedule());
            let x = seed * seed + 2;
            assert!(!iqzk_run(&mut s, &nizk, &x, &(seed + 1), &mut rngs).unwrap().accepted);
        }
        let (_, p) = stats::chi_square_uniform(&counts);
        assert!(p > 1e-3);
    }
}
