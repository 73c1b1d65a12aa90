//! Averaging maps over permutations, in exact rational arithmetic.
//!
//! For decreasing non-negative `a`, `b` with `Σ_{j≥i} b_j ≥ Σ_{j≥i} a_j` for
//! every `i`, [`build_averaging_map`] returns weights `α(π)` summing to one
//! with `b_i ≥ Σ_π α(π) a_{π(i)}`. Concavity then gives `Σ c(b_i) ≥ Σ c(a_i)`
//! for increasing concave `c`, see [`jensen_sqrt_certificate`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Default largest `n` accepted by [`build_averaging_map`].
pub const DEFAULT_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MajorizeError {
    #[error("sequences have lengths {a} and {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("sequence `{which}` is empty")]
    Empty { which: char },
    #[error("sequence `{which}` increases at index {index}")]
    NotMonotone { which: char, index: usize },
    #[error("sequence `{which}` has a negative entry at index {index}")]
    Negative { which: char, index: usize },
    #[error("value at index {index} is not finite")]
    NonFinite { index: usize },
    #[error("tail-sum dominance fails at index {index}")]
    DominanceViolated { index: usize },
    #[error("n = {n} exceeds the cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("map does not certify the pair: {0}")]
    InvalidMap(String),
    #[error("certificate text: {0}")]
    Parse(String),
}

/// A pair of decreasing non-negative rational sequences of equal length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequencePair {
    a: Vec<BigRational>,
    b: Vec<BigRational>,
}

fn check_sequence(which: char, xs: &[BigRational]) -> Result<(), MajorizeError> {
    if xs.is_empty() {
        return Err(MajorizeError::Empty { which });
    }
    if let Some(index) = xs.iter().position(|x| x.is_negative()) {
        return Err(MajorizeError::Negative { which, index });
    }
    if let Some(k) = xs.windows(2).position(|w| w[1] > w[0]) {
        return Err(MajorizeError::NotMonotone { which, index: k + 1 });
    }
    Ok(())
}

impl SequencePair {
    pub fn new(a: Vec<BigRational>, b: Vec<BigRational>) -> Result<Self, MajorizeError> {
        if a.len() != b.len() {
            return Err(MajorizeError::LengthMismatch { a: a.len(), b: b.len() });
        }
        check_sequence('a', &a)?;
        check_sequence('b', &b)?;
        Ok(SequencePair { a, b })
    }

    /// Integer entries.
    pub fn from_integers(a: &[i64], b: &[i64]) -> Result<Self, MajorizeError> {
        let q = |xs: &[i64]| xs.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        SequencePair::new(q(a), q(b))
    }

    /// Entries written as integers, fractions `p/q` or decimals `1.25`.
    pub fn parse(a: &[String], b: &[String]) -> Result<Self, MajorizeError> {
        let q = |xs: &[String]| xs.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>, _>>();
        SequencePair::new(q(a)?, q(b)?)
    }

    /// Exact binary expansions of the given floats.
    pub fn from_f64(a: &[f64], b: &[f64]) -> Result<Self, MajorizeError> {
        let q = |xs: &[f64]| -> Result<Vec<BigRational>, MajorizeError> {
            xs.iter()
                .enumerate()
                .map(|(index, &x)| BigRational::from_float(x).ok_or(MajorizeError::NonFinite { index }))
                .collect()
        };
        SequencePair::new(q(a)?, q(b)?)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn a(&self) -> &[BigRational] {
        &self.a
    }

    pub fn b(&self) -> &[BigRational] {
        &self.b
    }

    fn tail(&self) -> SequencePair {
        SequencePair {
            a: self.a[1..].to_vec(),
            b: self.b[1..].to_vec(),
        }
    }
}

/// Parses `p`, `p/q` or a finite decimal such as `-1.25` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational, MajorizeError> {
    let s = text.trim();
    let bad = || MajorizeError::Parse(format!("`{text}` is not a rational number"));
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(digits, scale));
    }
    let q: BigRational = s.parse().map_err(|_| bad())?;
    Ok(q)
}

/// Index of the first tail sum where `b` falls short, 0-based.
pub fn first_dominance_violation(pair: &SequencePair) -> Option<usize> {
    let mut sa = BigRational::zero();
    let mut sb = BigRational::zero();
    for i in (0..pair.len()).rev() {
        sa += &pair.a[i];
        sb += &pair.b[i];
        if sb < sa {
            return Some(i);
        }
    }
    None
}

/// All `n` tail-sum inequalities, exactly.
pub fn check_tail_dominance(pair: &SequencePair) -> bool {
    first_dominance_violation(pair).is_none()
}

/// Permutation in 0-based one-line notation: position `i` reads `a[perm[i]]`.
pub type Permutation = Vec<usize>;

/// Weighted permutations with positive rational weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AveragingMap {
    n: usize,
    entries: BTreeMap<Permutation, BigRational>,
}

impl AveragingMap {
    pub fn identity(n: usize) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert((0..n).collect(), BigRational::one());
        AveragingMap { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Permutation, &BigRational)> {
        self.entries.iter()
    }

    pub fn weight(&self, perm: &[usize]) -> BigRational {
        self.entries.get(perm).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_weight(&self) -> BigRational {
        self.entries.values().fold(BigRational::zero(), |acc, w| acc + w)
    }

    fn add(&mut self, perm: Permutation, w: BigRational) {
        if w.is_zero() {
            return;
        }
        let slot = self.entries.entry(perm.clone()).or_insert_with(BigRational::zero);
        *slot += w;
        if slot.is_zero() {
            self.entries.remove(&perm);
        }
    }

    /// `Σ_π α(π) x_{π(i)}` for every `i`.
    pub fn average(&self, x: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.n];
        for (perm, w) in &self.entries {
            for (i, o) in out.iter_mut().enumerate() {
                *o += w * &x[perm[i]];
            }
        }
        out
    }

    /// Map on `n + 1` points fixing index 0.
    fn lift(&self) -> AveragingMap {
        let entries = self
            .entries
            .iter()
            .map(|(p, w)| {
                let mut q = Vec::with_capacity(p.len() + 1);
                q.push(0);
                q.extend(p.iter().map(|k| k + 1));
                (q, w.clone())
            })
            .collect();
        AveragingMap { n: self.n + 1, entries }
    }

    /// Applies `self` to a sequence already averaged by `inner`:
    /// the result reads `a[π(σ(i))]` with weight `β(σ)γ(π)`.
    fn compose_after(&self, inner: &AveragingMap) -> AveragingMap {
        let mut out = AveragingMap {
            n: self.n,
            entries: BTreeMap::new(),
        };
        for (sigma, beta) in &self.entries {
            for (pi, gamma) in &inner.entries {
                let rho: Permutation = sigma.iter().map(|&s| pi[s]).collect();
                out.add(rho, beta * gamma);
            }
        }
        out
    }

    /// Exact verification: weights positive and summing to one, entries are
    /// bijections, and `b_i ≥ Σ α a_{π(i)}` for all `i`.
    pub fn verify(&self, pair: &SequencePair) -> Result<(), MajorizeError> {
        if self.n != pair.len() {
            return Err(MajorizeError::InvalidMap(format!("map on {} points, pair of length {}", self.n, pair.len())));
        }
        for (perm, w) in &self.entries {
            if !w.is_positive() {
                return Err(MajorizeError::InvalidMap(format!("non-positive weight {w}")));
            }
            let mut seen = vec![false; self.n];
            if perm.len() != self.n || perm.iter().any(|&k| k >= self.n || std::mem::replace(&mut seen[k], true)) {
                return Err(MajorizeError::InvalidMap(format!("{perm:?} is not a permutation")));
            }
        }
        if !self.total_weight().is_one() {
            return Err(MajorizeError::InvalidMap(format!("weights sum to {}", self.total_weight())));
        }
        let avg = self.average(&pair.a);
        if let Some(i) = (0..self.n).find(|&i| pair.b[i] < avg[i]) {
            return Err(MajorizeError::InvalidMap(format!("b[{i}] = {} < {}", pair.b[i], avg[i])));
        }
        Ok(())
    }

    /// One line per entry: `weight: p1 p2 ... pn` in 1-based one-line
    /// notation, preceded by `n = <n>`.
    pub fn to_text(&self) -> String {
        let mut s = format!("n = {}\n", self.n);
        for (perm, w) in &self.entries {
            let line: Vec<String> = perm.iter().map(|k| (k + 1).to_string()).collect();
            let _ = writeln!(s, "{w}: {}", line.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, MajorizeError> {
        let err = |m: String| MajorizeError::Parse(m);
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| err("empty document".into()))?;
        let n: usize = header
            .strip_prefix("n =")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| err(format!("bad header `{header}`")))?;
        let mut map = AveragingMap {
            n,
            entries: BTreeMap::new(),
        };
        for line in lines {
            let (w, p) = line.split_once(':').ok_or_else(|| err(format!("bad line `{line}`")))?;
            let w: BigRational = w.trim().parse().map_err(|_| err(format!("bad weight `{w}`")))?;
            let perm = p
                .split_whitespace()
                .map(|k| k.parse::<usize>().ok().filter(|&k| k >= 1).map(|k| k - 1))
                .collect::<Option<Permutation>>()
                .ok_or_else(|| err(format!("bad permutation `{p}`")))?;
            map.add(perm, w);
        }
        Ok(map)
    }
}

/// [`build_averaging_map_with_cap`] with [`DEFAULT_CAP`].
pub fn build_averaging_map(pair: &SequencePair) -> Result<AveragingMap, MajorizeError> {
    build_averaging_map_with_cap(pair, DEFAULT_CAP)
}

/// Inductive construction: a map for the tails, then transpositions with
/// the first index whose weights are filled greedily from index 2 upward.
/// The result is verified before it is returned.
pub fn build_averaging_map_with_cap(pair: &SequencePair, cap: usize) -> Result<AveragingMap, MajorizeError> {
    if pair.len() > cap {
        return Err(MajorizeError::TooLarge { n: pair.len(), cap });
    }
    if let Some(index) = first_dominance_violation(pair) {
        return Err(MajorizeError::DominanceViolated { index });
    }
    let map = build(pair);
    map.verify(pair)?;
    Ok(map)
}

fn build(pair: &SequencePair) -> AveragingMap {
    let n = pair.len();
    if n == 1 {
        return AveragingMap::identity(1);
    }
    let gamma = build(&pair.tail()).lift();
    let a_tilde = gamma.average(&pair.a);
    let beta = direct_case(&a_tilde, &pair.b);
    beta.compose_after(&gamma)
}

/// Case `b_i ≥ ã_i` for `i ≥ 2`.
fn direct_case(a: &[BigRational], b: &[BigRational]) -> AveragingMap {
    let n = a.len();
    let mut map = AveragingMap::identity(n);
    if b[0] >= a[0] {
        return map;
    }
    let mut deficit = &a[0] - &b[0];
    let mut moved = BigRational::zero();
    for i in 1..n {
        if deficit.is_zero() {
            break;
        }
        let cap = &b[i] - &a[i];
        let q = if cap < deficit { cap } else { deficit.clone() };
        if q.is_positive() {
            let w = &q / (&a[0] - &a[i]);
            let mut tau: Permutation = (0..n).collect();
            tau.swap(0, i);
            moved += &w;
            map.add(tau, w);
            deficit -= q;
        }
    }
    let id: Permutation = (0..n).collect();
    map.entries.insert(id.clone(), BigRational::one() - moved);
    if map.entries[&id].is_zero() {
        map.entries.remove(&id);
    }
    map
}

/// `(Σ c(b_i), Σ c(Σ_π α a_{π(i)}), Σ c(a_i))` with a floating slack.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcaveChain {
    pub sum_b: f64,
    pub sum_averaged: f64,
    pub sum_a: f64,
    /// Absolute slack allowed for rounding in the evaluation of `c`.
    pub slack: f64,
}

impl ConcaveChain {
    pub fn holds(&self) -> bool {
        self.sum_b + self.slack >= self.sum_averaged && self.sum_averaged + self.slack >= self.sum_a
    }
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Numerator and denominator too large for f64 on their own.
        let shift = q.numer().bits().max(q.denom().bits()) as i64 - 60;
        let scale = BigInt::one() << shift.max(0) as usize;
        let n = (q.numer() / &scale).to_f64().unwrap_or(f64::NAN);
        let d = (q.denom() / &scale).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Chain for an increasing concave `c`; the averaging is exact and only
/// `c` is evaluated in floating point.
pub fn concave_certificate(pair: &SequencePair, map: &AveragingMap, c: impl Fn(f64) -> f64) -> ConcaveChain {
    let avg = map.average(&pair.a);
    let sum = |xs: &[BigRational]| xs.iter().map(|x| c(to_f64(x))).sum::<f64>();
    let sum_b = sum(&pair.b);
    let sum_averaged = sum(&avg);
    let sum_a = sum(&pair.a);
    let scale = sum_b.abs().max(sum_averaged.abs()).max(sum_a.abs());
    ConcaveChain {
        sum_b,
        sum_averaged,
        sum_a,
        slack: 8.0 * f64::EPSILON * (pair.len() as f64) * scale.max(f64::MIN_POSITIVE),
    }
}

/// [`concave_certificate`] with `c = √·`.
pub fn jensen_sqrt_certificate(pair: &SequencePair, map: &AveragingMap) -> ConcaveChain {
    concave_certificate(pair, map, f64::sqrt)
}

/// Random dominated pairs for tests and fuzzing.
pub mod gen {
    use super::*;
    use rand::Rng;

    /// Draws `b` decreasing with small rational entries, then obtains `a` by
    /// moving mass from smaller to larger entries (which can only lower
    /// sorted tail sums) and by lowering entries.
    pub fn dominated_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, denom: i64) -> SequencePair {
        let q = |k: i64| BigRational::new(k.into(), denom.into());
        let mut b: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=20 * denom)).collect();
        b.sort_unstable_by(|x, y| y.cmp(x));
        let mut a = b.clone();
        for _ in 0..rng.gen_range(0..=2 * n) {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let (rich, poor) = if a[i] >= a[j] { (i, j) } else { (j, i) };
            if rich == poor || a[poor] == 0 {
                continue;
            }
            let d = rng.gen_range(0..=a[poor]);
            a[rich] += d;
            a[poor] -= d;
        }
        if rng.gen_bool(0.3) {
            let k = rng.gen_range(0..n);
            a[k] -= rng.gen_range(0..=a[k]);
        }
        a.sort_unstable_by(|x, y| y.cmp(x));
        SequencePair::new(a.into_iter().map(q).collect(), b.into_iter().map(q).collect())
            .expect("sorted non-negative sequences")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn tail_dominance_examples() {
        assert!(check_tail_dominance(&SequencePair::from_integers(&[3, 1, 0], &[2, 2, 0]).unwrap()));
        assert!(check_tail_dominance(&SequencePair::from_integers(&[4, 2, 1], &[4, 2, 1]).unwrap()));
        let bad = SequencePair::from_integers(&[2, 0], &[1, 0]).unwrap();
        assert_eq!(first_dominance_violation(&bad), Some(0));
        assert!(matches!(
            SequencePair::from_integers(&[1, 2], &[2, 2]),
            Err(MajorizeError::NotMonotone { which: 'a', index: 1 })
        ));
        assert!(matches!(
            SequencePair::from_integers(&[1], &[1, 0]),
            Err(MajorizeError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn hand_example() {
        let pair = SequencePair::from_integers(&[3, 1, 0], &[2, 2, 0]).unwrap();
        let map = build_averaging_map(&pair).unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map.weight(&[0, 1, 2]), r(1, 2));
        assert_eq!(map.weight(&[1, 0, 2]), r(1, 2));
        assert_eq!(map.average(pair.a()), vec![r(2, 1), r(2, 1), r(0, 1)]);
        let chain = jensen_sqrt_certificate(&pair, &map);
        assert!((chain.sum_b - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((chain.sum_averaged - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((chain.sum_a - (3f64.sqrt() + 1.0)).abs() < 1e-15);
        assert!(chain.holds());
    }

    #[test]
    fn trivial_maps() {
        let eq = SequencePair::from_integers(&[5, 3, 3, 1], &[5, 3, 3, 1]).unwrap();
        assert_eq!(build_averaging_map(&eq).unwrap(), AveragingMap::identity(4));
        let chain = jensen_sqrt_certificate(&eq, &AveragingMap::identity(4));
        assert_eq!(chain.sum_b, chain.sum_a);
        let one = SequencePair::from_integers(&[1], &[2]).unwrap();
        assert_eq!(build_averaging_map(&one).unwrap(), AveragingMap::identity(1));
    }

    #[test]
    fn errors() {
        let bad = SequencePair::from_integers(&[2, 0], &[1, 0]).unwrap();
        assert_eq!(build_averaging_map(&bad), Err(MajorizeError::DominanceViolated { index: 0 }));
        let big = SequencePair::from_integers(&[1; 13], &[1; 13]).unwrap();
        assert_eq!(build_averaging_map(&big), Err(MajorizeError::TooLarge { n: 13, cap: 12 }));
        let pair = SequencePair::from_integers(&[3, 1, 0], &[2, 2, 0]).unwrap();
        assert!(AveragingMap::identity(3).verify(&pair).is_err());
    }

    #[test]
    fn text_round_trip() {
        let pair = SequencePair::from_integers(&[6, 2, 1, 0], &[3, 3, 2, 1]).unwrap();
        let map = build_averaging_map(&pair).unwrap();
        let text = map.to_text();
        assert!(text.starts_with("n = 4\n"));
        assert_eq!(AveragingMap::from_text(&text).unwrap(), map);
        assert!(AveragingMap::from_text("n = 2\n1/2 1 2\n").is_err());
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/2").unwrap(), r(3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), r(7, 1));
        assert_eq!(parse_rational("1.25").unwrap(), r(5, 4));
        assert_eq!(parse_rational("0.1").unwrap(), r(1, 10));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.").is_err());
        let p = SequencePair::parse(&["3".into(), "1".into()], &["2".into(), "2".into()]).unwrap();
        assert!(check_tail_dominance(&p));
    }

    #[test]
    fn from_f64_is_exact() {
        let pair = SequencePair::from_f64(&[0.75, 0.25], &[0.5, 0.5]).unwrap();
        assert_eq!(pair.a()[0], r(3, 4));
        assert!(SequencePair::from_f64(&[f64::NAN], &[0.0]).is_err());
    }

    #[test]
    fn full_cap_pair() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pair = gen::dominated_pair(&mut rng, 12, 3);
        let map = build_averaging_map(&pair).unwrap();
        map.verify(&pair).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn random_dominated_pairs(seed in any::<u64>(), n in 1usize..=8, denom in 1i64..=7) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let pair = gen::dominated_pair(&mut rng, n, denom);
            prop_assert!(check_tail_dominance(&pair));
            let map = build_averaging_map(&pair).unwrap();
            prop_assert!(map.total_weight().is_one());
            prop_assert!(map.entries().all(|(_, w)| w.is_positive()));
            let avg = map.average(pair.a());
            for i in 0..n {
                prop_assert!(pair.b()[i] >= avg[i]);
            }
            prop_assert!(jensen_sqrt_certificate(&pair, &map).holds());
            let cube = concave_certificate(&pair, &map, f64::cbrt);
            prop_assert!(cube.holds());
            let direct: f64 = pair.b().iter().map(|x| to_f64(x).sqrt()).sum::<f64>()
                - pair.a().iter().map(|x| to_f64(x).sqrt()).sum::<f64>();
            prop_assert!(direct >= -1e-12);
        }
    }
}
