//! Spin product states on an open chain and their symmetry sectors.
//!
//! Integer alphabets store the literal `F^z` value of every site. Half-integer
//! alphabets (which only show up as the charge side of a core subspace) store
//! twice the spin projection, so spin-1/2 sites hold `-1` (down) and `+1` (up).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Site weight convention for the dipole moment. Sites are indexed from 0
/// internally and carry weight `k + 1`.
pub const DIPOLE_CONVENTION: &str = "P = sum_k (k+1) F_k^z over sites k = 0..L-1";

/// Above this many raw configurations sector enumeration switches to a
/// meet-in-the-middle join.
pub const MITM_THRESHOLD: u128 = 100_000_000;

#[inline]
pub fn dipole_weight(site: usize) -> i64 {
    site as i64 + 1
}

/// Local Hilbert space of a single site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alphabet {
    /// Integer spin `F`, values `-F..=F`.
    Integer(u8),
    /// Half-integer spin `two_s / 2` (odd `two_s`), values stored doubled.
    HalfInteger(u8),
}

impl Alphabet {
    pub fn spin(f: u8) -> Result<Self> {
        if f == 0 {
            return Err(Error::InvalidParameter("spin magnitude must be positive".into()));
        }
        Ok(Alphabet::Integer(f))
    }

    pub fn spin_half() -> Self {
        Alphabet::HalfInteger(1)
    }

    /// Twice the spin magnitude.
    pub fn two_s(&self) -> u32 {
        match *self {
            Alphabet::Integer(f) => 2 * f as u32,
            Alphabet::HalfInteger(t) => t as u32,
        }
    }

    pub fn radix(&self) -> u64 {
        match *self {
            Alphabet::Integer(f) => 2 * f as u64 + 1,
            Alphabet::HalfInteger(t) => t as u64 + 1,
        }
    }

    /// Largest stored value.
    pub fn max_value(&self) -> i8 {
        match *self {
            Alphabet::Integer(f) => f as i8,
            Alphabet::HalfInteger(t) => t as i8,
        }
    }

    pub fn min_value(&self) -> i8 {
        -self.max_value()
    }

    /// Distance between consecutive stored values.
    pub fn step(&self) -> i8 {
        match self {
            Alphabet::Integer(_) => 1,
            Alphabet::HalfInteger(_) => 2,
        }
    }

    pub fn values(&self) -> impl Iterator<Item = i8> + Clone {
        let step = self.step() as usize;
        (self.min_value()..=self.max_value()).step_by(step)
    }

    pub fn contains(&self, v: i8) -> bool {
        v >= self.min_value() && v <= self.max_value() && (v - self.min_value()) % self.step() == 0
    }

    #[inline]
    pub fn digit(&self, v: i8) -> u64 {
        ((v - self.min_value()) / self.step()) as u64
    }

    #[inline]
    pub fn value(&self, digit: u64) -> i8 {
        self.min_value() + digit as i8 * self.step()
    }

    /// Integer spin magnitude `F`, if this is an integer alphabet.
    pub fn integer_spin(&self) -> Option<u8> {
        match *self {
            Alphabet::Integer(f) => Some(f),
            Alphabet::HalfInteger(_) => None,
        }
    }

    /// The spin-`F/2` alphabet of the charges dual to a spin-`F` core subspace.
    pub fn charge_alphabet(&self) -> Option<Alphabet> {
        match *self {
            Alphabet::Integer(f) if f % 2 == 0 => Some(Alphabet::Integer(f / 2)),
            Alphabet::Integer(f) => Some(Alphabet::HalfInteger(f)),
            Alphabet::HalfInteger(_) => None,
        }
    }

    /// Human-readable symbol for one stored value (arrows for spin-1/2).
    pub fn symbol(&self, v: i8) -> String {
        match self {
            Alphabet::HalfInteger(1) => if v > 0 { "↑" } else { "↓" }.to_string(),
            Alphabet::HalfInteger(_) => format!("{v}/2"),
            Alphabet::Integer(_) => v.to_string(),
        }
    }

    pub fn parse_value(&self, token: &str) -> Option<i8> {
        let token = token.trim();
        if *self == Alphabet::HalfInteger(1) {
            match token {
                "↑" | "u" | "U" => return Some(1),
                "↓" | "d" | "D" => return Some(-1),
                _ => {}
            }
        }
        let token = token.replace('−', "-");
        let token = token.strip_prefix('+').unwrap_or(&token);
        token.parse::<i8>().ok()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alphabet::Integer(s) => write!(f, "spin-{s}"),
            Alphabet::HalfInteger(t) => write!(f, "spin-{t}/2"),
        }
    }
}

impl FromStr for Alphabet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: u8 = num.parse().map_err(|_| Error::Parse(format!("bad spin `{s}`")))?;
            if den.trim() != "2" || num % 2 == 0 {
                return Err(Error::Parse(format!("bad spin `{s}`")));
            }
            return Ok(Alphabet::HalfInteger(num));
        }
        let f: u8 = s.parse().map_err(|_| Error::Parse(format!("bad spin `{s}`")))?;
        Alphabet::spin(f)
    }
}

/// A product state: one stored value per site.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    alphabet: Alphabet,
    values: Vec<i8>,
}

impl SpinConfig {
    pub fn new(alphabet: Alphabet, values: Vec<i8>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyChain);
        }
        if let Some((site, &value)) = values.iter().enumerate().find(|(_, v)| !alphabet.contains(**v)) {
            return Err(Error::InvalidValue {
                site,
                value: value as i64,
                alphabet,
            });
        }
        Ok(Self { alphabet, values })
    }

    /// Shorthand for an integer spin-`f` configuration.
    pub fn spin(f: u8, values: &[i8]) -> Result<Self> {
        Self::new(Alphabet::spin(f)?, values.to_vec())
    }

    /// Parses the comma separated form, e.g. `"-1,0,1,0"`.
    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self> {
        let text = text.trim().trim_start_matches(['|', '(', '[']).trim_end_matches(['⟩', '>', ')', ']']);
        let values = text
            .split(',')
            .map(|tok| {
                alphabet
                    .parse_value(tok)
                    .ok_or_else(|| Error::Parse(format!("cannot read `{}` as a site value", tok.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, values)
    }

    pub(crate) fn from_raw(alphabet: Alphabet, values: Vec<i8>) -> Self {
        debug_assert!(values.iter().all(|v| alphabet.contains(*v)));
        Self { alphabet, values }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mixed-radix index: site `k` is digit `k` (site 0 least significant).
    pub fn rank(&self) -> u64 {
        rank_of(self.alphabet, &self.values)
    }

    pub fn unrank(alphabet: Alphabet, len: usize, mut rank: u64) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyChain);
        }
        let radix = alphabet.radix();
        let total = (radix as u128).checked_pow(len as u32);
        if total.is_some_and(|t| rank as u128 >= t) {
            return Err(Error::InvalidParameter(format!("rank {rank} out of range for {len} sites")));
        }
        let values = (0..len)
            .map(|_| {
                let d = rank % radix;
                rank /= radix;
                alphabet.value(d)
            })
            .collect();
        Ok(Self { alphabet, values })
    }

    pub fn total_spin(&self) -> i64 {
        self.values.iter().map(|&v| v as i64).sum()
    }

    pub fn dipole(&self) -> i64 {
        dipole_of(&self.values)
    }

    /// Site-reversed copy.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { alphabet: self.alphabet, values }
    }

    /// Global spin flip `v -> -v`.
    pub fn flipped(&self) -> Self {
        Self {
            alphabet: self.alphabet,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Renders with alphabet symbols, e.g. `(↑,↓,↑)`.
    pub fn pretty(&self) -> String {
        let inner: Vec<String> = self.values.iter().map(|&v| self.alphabet.symbol(v)).collect();
        format!("({})", inner.join(","))
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl Serialize for SpinConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

pub(crate) fn rank_of(alphabet: Alphabet, values: &[i8]) -> u64 {
    let radix = alphabet.radix();
    values.iter().rev().fold(0u64, |acc, &v| acc * radix + alphabet.digit(v))
}

pub(crate) fn dipole_of(values: &[i8]) -> i64 {
    values
        .iter()
        .enumerate()
        .map(|(k, &v)| dipole_weight(k) * v as i64)
        .sum()
}

/// Symmetry sector label. `total_spin` and `dipole` are sums of stored values,
/// so for half-integer alphabets they count in units of 1/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SectorKey {
    pub length: usize,
    #[serde(serialize_with = "serialize_display")]
    pub alphabet: Alphabet,
    pub total_spin: i64,
    pub dipole: Option<i64>,
}

pub(crate) fn serialize_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl SectorKey {
    pub fn new(length: usize, alphabet: Alphabet, total_spin: i64, dipole: Option<i64>) -> Result<Self> {
        if length == 0 {
            return Err(Error::EmptyChain);
        }
        let bound = length as i64 * alphabet.max_value() as i64;
        if total_spin.abs() > bound {
            return Err(Error::InvalidParameter(format!(
                "|total spin| = {} exceeds L*F = {bound}",
                total_spin.abs()
            )));
        }
        Ok(Self {
            length,
            alphabet,
            total_spin,
            dipole,
        })
    }

    pub fn contains(&self, config: &SpinConfig) -> bool {
        config.alphabet() == self.alphabet
            && config.len() == self.length
            && config.total_spin() == self.total_spin
            && self.dipole.map_or(true, |p| config.dipole() == p)
    }

    /// Number of raw configurations on the chain, saturating.
    pub fn raw_size(&self) -> u128 {
        (self.alphabet.radix() as u128)
            .checked_pow(self.length as u32)
            .unwrap_or(u128::MAX)
    }

    /// Exact sector dimension by dynamic programming over (spin, dipole),
    /// without listing the states.
    pub fn dimension(&self) -> u128 {
        let mut table: HashMap<(i64, i64), u128> = HashMap::from([((0, 0), 1)]);
        let track_dipole = self.dipole.is_some();
        for site in 0..self.length {
            let mut next: HashMap<(i64, i64), u128> = HashMap::with_capacity(table.len() * 2);
            let remaining_max = (self.length - site - 1) as i64 * self.alphabet.max_value() as i64;
            for (&(s, p), &count) in &table {
                for v in self.alphabet.values() {
                    let s2 = s + v as i64;
                    if (self.total_spin - s2).abs() > remaining_max {
                        continue;
                    }
                    let p2 = if track_dipole { p + dipole_weight(site) * v as i64 } else { 0 };
                    *next.entry((s2, p2)).or_default() += count;
                }
            }
            table = next;
        }
        table
            .into_iter()
            .filter(|((s, p), _)| *s == self.total_spin && self.dipole.map_or(true, |d| *p == d))
            .map(|(_, c)| c)
            .sum()
    }
}

/// How a sector is listed. `Auto` picks meet-in-the-middle above
/// [`MITM_THRESHOLD`] raw configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Auto,
    Scan,
    MeetInTheMiddle,
}

/// All states of a sector, ascending by rank.
pub fn enumerate_sector(key: &SectorKey) -> Vec<SpinConfig> {
    enumerate_sector_ranks(key, Enumeration::Auto)
        .into_iter()
        .map(|r| SpinConfig::unrank(key.alphabet, key.length, r).expect("rank in range"))
        .collect()
}

/// Ranks of all states of a sector, strictly increasing.
pub fn enumerate_sector_ranks(key: &SectorKey, how: Enumeration) -> Vec<u64> {
    let how = match how {
        Enumeration::Auto if key.raw_size() > MITM_THRESHOLD => Enumeration::MeetInTheMiddle,
        Enumeration::Auto => Enumeration::Scan,
        other => other,
    };
    match how {
        Enumeration::MeetInTheMiddle => meet_in_the_middle(key),
        _ => {
            let mut out = Vec::new();
            let mut values = vec![0i8; key.length];
            scan(key, key.length, key.total_spin, key.dipole, &mut values, &mut out);
            out
        }
    }
}

/// Bounds on `sum_{i<k} (i+1) v_i` given `sum_{i<k} v_i = spin`.
fn dipole_bounds(alphabet: Alphabet, k: usize, spin: i64) -> (i64, i64) {
    let fmax = alphabet.max_value() as i64;
    let step = alphabet.step() as i64;
    // start every site at -F and distribute the surplus in units of `step`
    let mut units = (spin + k as i64 * fmax) / step;
    let per_site = 2 * fmax / step;
    let base: i64 = -(fmax) * (k as i64 * (k as i64 + 1) / 2);
    let (mut lo, mut hi) = (base, base);
    let mut lo_units = units;
    for w in 1..=k as i64 {
        let take = lo_units.min(per_site);
        lo += take * step * w;
        lo_units -= take;
    }
    for w in (1..=k as i64).rev() {
        let take = units.min(per_site);
        hi += take * step * w;
        units -= take;
    }
    (lo, hi)
}

// Sites are assigned from the most significant (L-1) down so that emitted
// ranks come out in ascending order.
fn scan(key: &SectorKey, k: usize, spin: i64, dipole: Option<i64>, values: &mut [i8], out: &mut Vec<u64>) {
    if k == 0 {
        if spin == 0 && dipole.map_or(true, |p| p == 0) {
            out.push(rank_of(key.alphabet, values));
        }
        return;
    }
    let fmax = key.alphabet.max_value() as i64;
    let site = k - 1;
    for v in key.alphabet.values() {
        let rest = spin - v as i64;
        let rest_sites = site as i64;
        if rest.abs() > rest_sites * fmax || (rest + rest_sites * fmax) % key.alphabet.step() as i64 != 0 {
            continue;
        }
        let rest_dipole = dipole.map(|p| p - dipole_weight(site) * v as i64);
        if let Some(p) = rest_dipole {
            let (lo, hi) = dipole_bounds(key.alphabet, site, rest);
            if p < lo || p > hi {
                continue;
            }
        }
        values[site] = v;
        scan(key, site, rest, rest_dipole, values, out);
    }
}

fn meet_in_the_middle(key: &SectorKey) -> Vec<u64> {
    let alphabet = key.alphabet;
    let left_len = key.length / 2;
    let right_len = key.length - left_len;
    let radix = alphabet.radix();
    let left_span = radix.pow(left_len as u32);

    // (spin, dipole) -> ascending left ranks
    let mut left: HashMap<(i64, i64), Vec<u64>> = HashMap::new();
    let mut digits = vec![0u64; left_len];
    for rank in 0..left_span {
        let (mut s, mut p) = (0i64, 0i64);
        for (i, d) in digits.iter().enumerate() {
            let v = alphabet.value(*d) as i64;
            s += v;
            p += dipole_weight(i) * v;
        }
        let p = if key.dipole.is_some() { p } else { 0 };
        left.entry((s, p)).or_default().push(rank);
        increment(&mut digits, radix);
    }

    let mut out = Vec::new();
    let mut digits = vec![0u64; right_len];
    for rank in 0..radix.pow(right_len as u32) {
        let (mut s, mut p) = (0i64, 0i64);
        for (i, d) in digits.iter().enumerate() {
            let v = alphabet.value(*d) as i64;
            s += v;
            p += dipole_weight(left_len + i) * v;
        }
        let need = (
            key.total_spin - s,
            key.dipole.map_or(0, |d| d - p),
        );
        if let Some(ls) = left.get(&need) {
            out.extend(ls.iter().map(|l| rank * left_span + l));
        }
        increment(&mut digits, radix);
    }
    out
}

fn increment(digits: &mut [u64], radix: u64) {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return;
        }
        *d = 0;
    }
}
