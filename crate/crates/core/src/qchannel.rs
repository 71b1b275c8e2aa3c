//! Classical simulation of BB84 product states.
//!
//! Each qubit is a hidden `(bit, basis)` pair. Measuring in the matching
//! basis returns the bit; measuring in the other basis returns a fresh
//! uniform bit. A qubit can be measured once. Party code only ever holds
//! [`StoredQubit`] handles; the ground truth is readable through
//! `inspect` only in test builds or with the `inspect` feature.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldmath::relative_hamming;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Plus,
    Cross,
}

impl Basis {
    pub fn random(rng: &mut Rng) -> Basis {
        Basis::from_bit(rng.random())
    }

    /// `+` is 0, `×` is 1.
    pub fn from_bit(b: bool) -> Basis {
        if b {
            Basis::Cross
        } else {
            Basis::Plus
        }
    }

    pub fn bit(self) -> bool {
        self == Basis::Cross
    }
}

pub fn random_bases(n: usize, rng: &mut Rng) -> Vec<Basis> {
    (0..n).map(|_| Basis::random(rng)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bb84State {
    pub bit: bool,
    pub basis: Basis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Independent bit-flip probability applied at transmission.
    pub noise_phi: f64,
}

impl ChannelConfig {
    pub fn new(noise_phi: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&noise_phi) {
            return Err(Error::param(format!("noise φ={noise_phi} outside [0, 1/2)")));
        }
        Ok(ChannelConfig { noise_phi })
    }

    pub fn noiseless() -> Self {
        ChannelConfig { noise_phi: 0.0 }
    }
}

#[derive(Debug)]
pub struct StoredQubit {
    state: Bb84State,
    consumed: bool,
}

impl StoredQubit {
    /// Matching basis yields the stored bit, the other basis a uniform bit.
    pub fn measure(&mut self, basis: Basis, rng: &mut Rng) -> Result<bool> {
        if self.consumed {
            return Err(Error::usage("qubit already measured"));
        }
        self.consumed = true;
        Ok(if basis == self.state.basis { self.state.bit } else { rng.random() })
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    /// Measure and re-prepare in the measured basis, as an intercepting
    /// eavesdropper would.
    pub fn intercept_resend(&mut self, basis: Basis, rng: &mut Rng) -> Result<bool> {
        let b = self.measure(basis, rng)?;
        *self = StoredQubit { state: Bb84State { bit: b, basis }, consumed: false };
        Ok(b)
    }

    #[cfg(any(test, feature = "inspect"))]
    pub fn inspect(&self) -> Bb84State {
        self.state
    }
}

/// Prepare `|x⟩_θ` and push it through the noisy channel.
pub fn send_bb84(x: &[bool], theta: &[Basis], cfg: &ChannelConfig, rng: &mut Rng) -> Result<Vec<StoredQubit>> {
    if x.len() != theta.len() {
        return Err(Error::param(format!("|x|={} but |θ|={}", x.len(), theta.len())));
    }
    Ok(x.iter()
        .zip(theta)
        .map(|(&bit, &basis)| {
            let flip = cfg.noise_phi > 0.0 && rng.random_bool(cfg.noise_phi);
            StoredQubit { state: Bb84State { bit: bit ^ flip, basis }, consumed: false }
        })
        .collect())
}

pub fn measure(q: &mut StoredQubit, basis: Basis, rng: &mut Rng) -> Result<bool> {
    q.measure(basis, rng)
}

/// Measure every qubit in a fresh uniform basis.
pub fn receiver_honest(qs: &mut [StoredQubit], rng: &mut Rng) -> (Vec<Basis>, Vec<bool>) {
    let theta_hat = random_bases(qs.len(), rng);
    let x_hat = qs.iter_mut().zip(&theta_hat).map(|(q, &b)| q.measure(b, rng).expect("fresh qubits")).collect();
    (theta_hat, x_hat)
}

/// How a bounded-storage receiver measures the qubits it cannot keep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ImmediateBases {
    Random,
    Fixed(Basis),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Measured on arrival in the given basis.
    Immediate(Basis),
    /// Kept in quantum memory and measured after the bases were announced.
    Stored,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnedBit {
    pub bit: bool,
    pub provenance: Provenance,
}

/// Everything a bounded-storage receiver ends up holding.
#[derive(Debug)]
pub struct StorageView {
    pub learned: Vec<Option<LearnedBit>>,
    stored: Vec<(usize, StoredQubit)>,
}

impl StorageView {
    pub fn stored_positions(&self) -> Vec<usize> {
        self.stored.iter().map(|(i, _)| *i).collect()
    }

    /// Measure the kept qubits in the announced bases.
    pub fn announce(&mut self, theta: &[Basis], rng: &mut Rng) -> Result<()> {
        for (i, q) in &mut self.stored {
            let bit = q.measure(theta[*i], rng)?;
            self.learned[*i] = Some(LearnedBit { bit, provenance: Provenance::Stored });
        }
        Ok(())
    }

    /// The receiver's own idea of which positions it knows for sure,
    /// given the announced bases.
    pub fn known_positions(&self, theta: &[Basis]) -> Vec<usize> {
        self.learned
            .iter()
            .enumerate()
            .filter(|(i, l)| match l {
                Some(LearnedBit { provenance: Provenance::Stored, .. }) => true,
                Some(LearnedBit { provenance: Provenance::Immediate(b), .. }) => *b == theta[*i],
                None => false,
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Keep `⌊γn⌋` uniformly chosen qubits, measure the rest now.
pub fn receiver_bounded_storage(
    mut qs: Vec<StoredQubit>,
    gamma: f64,
    how: ImmediateBases,
    rng: &mut Rng,
) -> Result<StorageView> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::param(format!("γ={gamma} outside [0, 1]")));
    }
    let n = qs.len();
    let keep = (gamma * n as f64 + 1e-9).floor() as usize;
    let kept: std::collections::BTreeSet<usize> = rand::seq::index::sample(rng, n, keep).into_iter().collect();
    let mut learned = vec![None; n];
    let mut stored = Vec::new();
    for (i, mut q) in qs.drain(..).enumerate() {
        if kept.contains(&i) {
            stored.push((i, q));
            continue;
        }
        let basis = match how {
            ImmediateBases::Random => Basis::random(rng),
            ImmediateBases::Fixed(b) => b,
        };
        let bit = q.measure(basis, rng)?;
        learned[i] = Some(LearnedBit { bit, provenance: Provenance::Immediate(basis) });
    }
    Ok(StorageView { learned, stored })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingCheck {
    pub test_err: f64,
    pub remainder_err: f64,
    /// No matching-basis position in the test set.
    pub degenerate: bool,
}

/// Error rates on matching-basis positions inside and outside `test`.
pub fn sampling_estimate_check(
    x: &[bool],
    x_hat: &[bool],
    theta: &[Basis],
    theta_hat: &[Basis],
    test: &[usize],
) -> Result<SamplingCheck> {
    let n = x.len();
    if x_hat.len() != n || theta.len() != n || theta_hat.len() != n {
        return Err(Error::param("strings of different lengths"));
    }
    if test.iter().any(|&i| i >= n) {
        return Err(Error::param("test index out of range"));
    }
    let mut in_test = vec![false; n];
    for &i in test {
        in_test[i] = true;
    }
    let rate = |want: bool| -> Result<(f64, bool)> {
        let idx: Vec<usize> = (0..n).filter(|&i| in_test[i] == want && theta[i] == theta_hat[i]).collect();
        let a: Vec<bool> = idx.iter().map(|&i| x[i]).collect();
        let b: Vec<bool> = idx.iter().map(|&i| x_hat[i]).collect();
        Ok((relative_hamming(&a, &b)?, idx.is_empty()))
    };
    let (test_err, degenerate) = rate(true)?;
    let (remainder_err, _) = rate(false)?;
    Ok(SamplingCheck { test_err, remainder_err, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::random_bits;
    use crate::rng::seeded;
    use crate::stats::chi_square_uniform;

    #[test]
    fn noiseless_identity_and_empty() {
        let mut rng = seeded(1);
        let x = random_bits(64, &mut rng);
        let th = random_bases(64, &mut rng);
        let qs = send_bb84(&x, &th, &ChannelConfig::noiseless(), &mut rng).unwrap();
        for ((q, &b), &t) in qs.iter().zip(&x).zip(&th) {
            assert_eq!(q.inspect(), Bb84State { bit: b, basis: t });
        }
        assert!(send_bb84(&[], &[], &ChannelConfig::noiseless(), &mut rng).unwrap().is_empty());
        assert!(send_bb84(&[true], &[], &ChannelConfig::noiseless(), &mut rng).is_err());
    }

    #[test]
    fn noise_rate_concentrates() {
        let mut rng = seeded(2);
        let n = 10_000;
        let x = vec![false; n];
        let th = vec![Basis::Plus; n];
        let qs = send_bb84(&x, &th, &ChannelConfig::new(0.1).unwrap(), &mut rng).unwrap();
        let flips = qs.iter().filter(|q| q.inspect().bit).count() as f64 / n as f64;
        let sd = (0.1f64 * 0.9 / n as f64).sqrt();
        assert!((flips - 0.1).abs() < 3.0 * sd);
    }

    #[test]
    fn matching_basis_is_deterministic() {
        let mut rng = seeded(3);
        for (bit, basis) in [(false, Basis::Plus), (true, Basis::Cross)] {
            let mut q = send_bb84(&[bit], &[basis], &ChannelConfig::noiseless(), &mut rng).unwrap().remove(0);
            assert_eq!(q.measure(basis, &mut rng).unwrap(), bit);
            assert!(q.measure(basis, &mut rng).is_err());
        }
    }

    #[test]
    fn conjugate_basis_is_fair() {
        let mut rng = seeded(4);
        let n = 100_000;
        let mut counts = [0u64; 2];
        for _ in 0..n {
            let mut q = send_bb84(&[false], &[Basis::Plus], &ChannelConfig::noiseless(), &mut rng).unwrap().remove(0);
            counts[usize::from(q.measure(Basis::Cross, &mut rng).unwrap())] += 1;
        }
        let (_, p) = chi_square_uniform(&counts);
        assert!(p > 0.001, "p={p}");
    }

    #[test]
    fn honest_receiver_properties() {
        let mut rng = seeded(5);
        let n = 10_000;
        let x = random_bits(n, &mut rng);
        let th = random_bases(n, &mut rng);
        let mut qs = send_bb84(&x, &th, &ChannelConfig::noiseless(), &mut rng).unwrap();
        let (th_hat, x_hat) = receiver_honest(&mut qs, &mut rng);
        let matching: Vec<usize> = (0..n).filter(|&i| th[i] == th_hat[i]).collect();
        assert!(matching.iter().all(|&i| x[i] == x_hat[i]));
        let frac = matching.len() as f64 / n as f64;
        assert!((frac - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
        let other: Vec<usize> = (0..n).filter(|&i| th[i] != th_hat[i]).collect();
        let agree = other.iter().filter(|&&i| x[i] == x_hat[i]).count() as f64 / other.len() as f64;
        // agreement 1/2 ⇔ correlation 0
        assert!((agree - 0.5).abs() < 3.0 * (0.25 / other.len() as f64).sqrt());
    }

    #[test]
    fn full_storage_learns_everything() {
        let mut rng = seeded(6);
        let x = random_bits(200, &mut rng);
        let th = random_bases(200, &mut rng);
        let qs = send_bb84(&x, &th, &ChannelConfig::noiseless(), &mut rng).unwrap();
        let mut v = receiver_bounded_storage(qs, 1.0, ImmediateBases::Random, &mut rng).unwrap();
        v.announce(&th, &mut rng).unwrap();
        let got: Vec<bool> = v.learned.iter().map(|l| l.as_ref().unwrap().bit).collect();
        assert_eq!(got, x);
    }

    #[test]
    fn no_storage_matches_honest_statistics() {
        let mut rng = seeded(7);
        let n = 4000;
        let x = random_bits(n, &mut rng);
        let th = random_bases(n, &mut rng);
        let qs = send_bb84(&x, &th, &ChannelConfig::noiseless(), &mut rng).unwrap();
        let v = receiver_bounded_storage(qs, 0.0, ImmediateBases::Random, &mut rng).unwrap();
        assert!(v.stored_positions().is_empty());
        let known = v.known_positions(&th);
        assert!(known.iter().all(|&i| v.learned[i].as_ref().unwrap().bit == x[i]));
        let frac = known.len() as f64 / n as f64;
        assert!((frac - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn partial_storage_knowledge_fraction() {
        let mut rng = seeded(8);
        let (n, gamma) = (1000, 0.25);
        let mut fracs = Vec::new();
        for _ in 0..200 {
            let x = random_bits(n, &mut rng);
            let th = random_bases(n, &mut rng);
            let qs = send_bb84(&x, &th, &ChannelConfig::noiseless(), &mut rng).unwrap();
            let mut v = receiver_bounded_storage(qs, gamma, ImmediateBases::Random, &mut rng).unwrap();
            v.announce(&th, &mut rng).unwrap();
            let exact = (0..n)
                .filter(|&i| match &v.learned[i] {
                    Some(LearnedBit { provenance: Provenance::Stored, .. }) => true,
                    Some(LearnedBit { provenance: Provenance::Immediate(b), .. }) => *b == th[i],
                    None => false,
                })
                .count();
            fracs.push(exact as f64 / n as f64);
        }
        let (mean, se) = crate::stats::mean_se(&fracs);
        let expect = gamma + (1.0 - gamma) / 2.0;
        assert!((mean - expect).abs() < 3.0 * se.max(1e-4), "{mean} vs {expect}");
    }

    #[test]
    fn sampling_check_without_errors() {
        let x = vec![true, false, true, true];
        let th = vec![Basis::Plus; 4];
        let c = sampling_estimate_check(&x, &x, &th, &th, &[0, 2]).unwrap();
        assert_eq!((c.test_err, c.remainder_err, c.degenerate), (0.0, 0.0, false));
        let c = sampling_estimate_check(&x, &x, &th, &th, &[]).unwrap();
        assert!(c.degenerate);
    }

    #[test]
    fn random_test_set_bounds_remainder() {
        // x̂ wrong on a fixed quarter of the positions; the test set is
        // drawn uniformly afterwards
        let mut rng = seeded(9);
        let m = 512;
        let th = vec![Basis::Plus; m];
        let x = vec![false; m];
        let mut x_hat = vec![false; m];
        for b in x_hat.iter_mut().take(m / 4) {
            *b = true;
        }
        let mut bad = 0;
        let runs = 2000;
        for _ in 0..runs {
            let t = rand::seq::index::sample(&mut rng, m, m / 2).into_vec();
            let c = sampling_estimate_check(&x, &x_hat, &th, &th, &t).unwrap();
            if c.remainder_err > c.test_err + 0.1 {
                bad += 1;
            }
        }
        assert!((bad as f64 / runs as f64) < 0.01);
    }

    #[test]
    fn honest_noisy_run_rates() {
        let mut rng = seeded(10);
        let m = 20_000;
        let x = random_bits(m, &mut rng);
        let th = random_bases(m, &mut rng);
        let mut qs = send_bb84(&x, &th, &ChannelConfig::new(0.05).unwrap(), &mut rng).unwrap();
        let (th_hat, x_hat) = receiver_honest(&mut qs, &mut rng);
        let t = rand::seq::index::sample(&mut rng, m, m / 2).into_vec();
        let c = sampling_estimate_check(&x, &x_hat, &th, &th_hat, &t).unwrap();
        assert!((c.test_err - 0.05).abs() < 0.01);
        assert!((c.remainder_err - 0.05).abs() < 0.01);
    }
}
