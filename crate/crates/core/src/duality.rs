//! Domain-wall / charge duality: height paths, regional peaks and valleys,
//! the core subspace and the spin-2 region decomposition.

use std::ops::Range;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::spinchain::{Alphabet, SpinConfig};

/// Cumulative height profile of a configuration, anchored at 0 on the left.
/// `heights[j]` is the charge fluctuation on bond `j - 1/2`, so a chain of
/// `L` sites has `L + 1` heights.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChargePath {
    alphabet: Alphabet,
    heights: Vec<i64>,
}

impl ChargePath {
    pub fn new(alphabet: Alphabet, heights: Vec<i64>) -> Result<Self> {
        match heights.first() {
            None => return Err(Error::EmptyChain),
            Some(&h) if h != 0 => return Err(Error::BadAnchor(h)),
            _ => {}
        }
        Ok(Self { alphabet, heights })
    }

    pub fn heights(&self) -> &[i64] {
        &self.heights
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn max(&self) -> i64 {
        *self.heights.iter().max().expect("non-empty")
    }

    pub fn min(&self) -> i64 {
        *self.heights.iter().min().expect("non-empty")
    }
}

impl Serialize for ChargePath {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.heights.serialize(s)
    }
}

pub fn to_path(config: &SpinConfig) -> ChargePath {
    let mut heights = Vec::with_capacity(config.len() + 1);
    heights.push(0i64);
    let mut h = 0i64;
    for &v in config.values() {
        h += v as i64;
        heights.push(h);
    }
    ChargePath {
        alphabet: config.alphabet(),
        heights,
    }
}

pub fn from_path(path: &ChargePath) -> Result<SpinConfig> {
    let alphabet = path.alphabet;
    let values = path
        .heights
        .windows(2)
        .enumerate()
        .map(|(bond, w)| {
            let step = w[1] - w[0];
            if step.abs() > alphabet.max_value() as i64 || !alphabet.contains(step as i8) {
                Err(Error::StepTooLarge {
                    bond,
                    step,
                    bound: alphabet.max_value() as i64,
                })
            } else {
                Ok(step as i8)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    SpinConfig::new(alphabet, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Peak,
    Valley,
}

/// A regional peak or valley. `index` points into [`ChargePath::heights`];
/// the physical bond position is `index - 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PVLabel {
    pub kind: Extremum,
    pub index: usize,
    pub height: i64,
}

impl PVLabel {
    /// Twice the half-integer bond position, `2 * index - 1`.
    pub fn doubled_position(&self) -> i64 {
        2 * self.index as i64 - 1
    }
}

impl Serialize for PVLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PVLabel", 3)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("position", &self.doubled_position())?;
        st.serialize_field("height", &self.height)?;
        st.end()
    }
}

struct SideScan {
    deep: bool,
    reaches_boundary: bool,
}

// Walks away from `j` while `j` stays the extreme (ties allowed) and reports
// whether the window got `depth` deep and whether it ran into the chain end.
fn scan_side(h: &[i64], j: usize, dir: isize, sign: i64, depth: i64) -> SideScan {
    let mut k = j as isize + dir;
    let mut far = h[j];
    while k >= 0 && (k as usize) < h.len() && sign * h[k as usize] <= sign * h[j] {
        let hk = h[k as usize];
        far = if sign > 0 { far.min(hk) } else { far.max(hk) };
        k += dir;
    }
    SideScan {
        deep: sign * (h[j] - far) >= depth,
        reaches_boundary: k < 0 || k as usize >= h.len(),
    }
}

/// Regional peaks and valleys of `path` for bond operators of width `q`.
///
/// A height is a regional peak when, on each side, it is the maximum of a
/// window whose minimum sits at least `q F` below it. A side whose window
/// runs into the chain end only needs the maximum property, because the end
/// heights are pinned; at least one side must still be `q F` deep. Equal
/// consecutive labels (plateaus) are reported once, and a repeated label
/// that is separated from its twin by less than `q F` is folded into it.
pub fn regional_extrema(path: &ChargePath, q: usize) -> Vec<PVLabel> {
    let depth = q as i64 * path.alphabet.max_value() as i64;
    let h = &path.heights;
    let mut out: Vec<PVLabel> = Vec::new();
    for j in 0..h.len() {
        for (kind, sign) in [(Extremum::Peak, 1i64), (Extremum::Valley, -1i64)] {
            let left = scan_side(h, j, -1, sign, depth);
            let right = scan_side(h, j, 1, sign, depth);
            let qualifies = (left.deep || left.reaches_boundary)
                && (right.deep || right.reaches_boundary)
                && (left.deep || right.deep);
            if !qualifies {
                continue;
            }
            let label = PVLabel { kind, index: j, height: h[j] };
            let same = |l: &PVLabel| l.kind == kind && l.height == h[j];
            if out.last().is_some_and(same) {
                continue;
            }
            if out.len() >= 2 && same(&out[out.len() - 2]) && (out[out.len() - 1].height - h[j]).abs() < depth {
                out.pop();
                continue;
            }
            out.push(label);
        }
    }
    out
}

/// The position-free `(kind, height)` sequence used to compare labels
/// across a Krylov class.
pub fn label_signature(labels: &[PVLabel]) -> Vec<(Extremum, i64)> {
    labels.iter().map(|l| (l.kind, l.height)).collect()
}

fn core_bound(alphabet: Alphabet) -> Option<i64> {
    alphabet.integer_spin().map(|f| f as i64)
}

/// Every prefix sum lies in `[0, F]`, i.e. the dual charge stays in `[-S, S]`.
pub fn core_membership(config: &SpinConfig) -> bool {
    let Some(bound) = core_bound(config.alphabet()) else {
        return false;
    };
    let mut s = 0i64;
    config.values().iter().all(|&v| {
        s += v as i64;
        (0..=bound).contains(&s)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoreOrientation {
    Direct,
    Flipped,
}

/// Accepts a state whose global spin flip is core as well, reporting which
/// orientation matched.
pub fn core_orientation(config: &SpinConfig) -> Option<CoreOrientation> {
    if core_membership(config) {
        Some(CoreOrientation::Direct)
    } else if core_membership(&config.flipped()) {
        Some(CoreOrientation::Flipped)
    } else {
        None
    }
}

/// All core states of a spin-`f` chain of `len` sites, ascending by rank.
pub fn core_basis(len: usize, f: u8) -> Result<Vec<SpinConfig>> {
    let alphabet = Alphabet::spin(f)?;
    if len == 0 {
        return Err(Error::EmptyChain);
    }
    let mut out = Vec::new();
    let mut values = vec![0i8; len];
    fn walk(site: usize, level: i64, f: i64, alphabet: Alphabet, values: &mut Vec<i8>, out: &mut Vec<SpinConfig>) {
        if site == values.len() {
            out.push(SpinConfig::from_raw(alphabet, values.clone()));
            return;
        }
        for next in 0..=f {
            values[site] = (next - level) as i8;
            walk(site + 1, next, f, alphabet, values, out);
        }
    }
    walk(0, 0, f as i64, alphabet, &mut values, &mut out);
    out.sort_by_key(|c| c.rank());
    Ok(out)
}

/// Charges `C_{k+1/2} = sum_{i<=k} F_i - S` of a core state, as a
/// configuration over the spin-`S` charge alphabet.
pub fn to_charge_string(config: &SpinConfig) -> Result<SpinConfig> {
    let alphabet = config.alphabet();
    let charge = alphabet.charge_alphabet().ok_or(Error::NoCore(alphabet))?;
    if !core_membership(config) {
        return Err(Error::NotCore(config.to_string()));
    }
    let f = alphabet.max_value() as i64;
    let mut s = 0i64;
    let values = config
        .values()
        .iter()
        .map(|&v| {
            s += v as i64;
            // doubled for half-integer S, literal for integer S
            match charge {
                Alphabet::HalfInteger(_) => (2 * s - f) as i8,
                Alphabet::Integer(_) => (s - f / 2) as i8,
            }
        })
        .collect();
    Ok(SpinConfig::from_raw(charge, values))
}

/// Inverse of [`to_charge_string`] for a spin-`f` domain-wall chain.
pub fn from_charge_string(charges: &SpinConfig, f: u8) -> Result<SpinConfig> {
    let alphabet = Alphabet::spin(f)?;
    if alphabet.charge_alphabet() != Some(charges.alphabet()) {
        return Err(Error::AlphabetMismatch {
            model: alphabet.charge_alphabet().unwrap_or(alphabet),
            input: charges.alphabet(),
        });
    }
    let level = |c: i8| -> i64 {
        match charges.alphabet() {
            Alphabet::HalfInteger(_) => (c as i64 + f as i64) / 2,
            Alphabet::Integer(_) => c as i64 + f as i64 / 2,
        }
    };
    let mut prev = 0i64;
    let values = charges
        .values()
        .iter()
        .map(|&c| {
            let l = level(c);
            let v = (l - prev) as i8;
            prev = l;
            v
        })
        .collect();
    SpinConfig::new(alphabet, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Region {
    pub sign: Sign,
    pub total_spin: i64,
    pub sites: Range<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegionDecomposition {
    pub regions: Vec<Region>,
    pub separators: Vec<usize>,
}

impl RegionDecomposition {
    /// Region totals, sorted.
    pub fn total_multiset(&self) -> Vec<i64> {
        let mut t: Vec<i64> = self.regions.iter().map(|r| r.total_spin).collect();
        t.sort_unstable();
        t
    }
}

/// Splits a chain into maximal same-sign regions. Zeros strictly inside a
/// region belong to it; zeros between regions or at the chain ends are
/// separators.
pub fn region_decomposition(config: &SpinConfig) -> RegionDecomposition {
    let values = config.values();
    let nonzero: Vec<usize> = (0..values.len()).filter(|&i| values[i] != 0).collect();
    let mut out = RegionDecomposition::default();
    let mut i = 0;
    while i < nonzero.len() {
        let positive = values[nonzero[i]] > 0;
        let mut j = i;
        while j + 1 < nonzero.len() && (values[nonzero[j + 1]] > 0) == positive {
            j += 1;
        }
        let sites = nonzero[i]..nonzero[j] + 1;
        out.regions.push(Region {
            sign: if positive { Sign::Positive } else { Sign::Negative },
            total_spin: values[sites.clone()].iter().map(|&v| v as i64).sum(),
            sites,
        });
        i = j + 1;
    }
    out.separators = (0..values.len())
        .filter(|&k| values[k] == 0 && !out.regions.iter().any(|r| r.sites.contains(&k)))
        .collect();
    out
}

/// Symbols of the Fredkin-chain relabeling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FredkinSymbol {
    L,
    R,
    Zero,
}

/// Replaces each adjacent `(↓,↑)` pair by `0`, then `↑ -> L` and `↓ -> R`.
pub fn fredkin_symbols(config: &SpinConfig) -> Result<Vec<FredkinSymbol>> {
    if config.alphabet() != Alphabet::spin_half() {
        return Err(Error::AlphabetMismatch {
            model: Alphabet::spin_half(),
            input: config.alphabet(),
        });
    }
    let v = config.values();
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        if v[i] < 0 && i + 1 < v.len() && v[i + 1] > 0 {
            out.push(FredkinSymbol::Zero);
            i += 2;
        } else {
            out.push(if v[i] > 0 { FredkinSymbol::L } else { FredkinSymbol::R });
            i += 1;
        }
    }
    Ok(out)
}
