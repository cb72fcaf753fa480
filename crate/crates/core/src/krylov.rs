//! Krylov-class decomposition of symmetry sectors, fragmentation metrics and
//! the projection of models onto the core subspace.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::duality::{core_basis, to_charge_string};
use crate::error::{Error, Result};
use crate::models::{ModelSpec, Transition};
use crate::spinchain::{enumerate_sector_ranks, Alphabet, Enumeration, SectorKey, SpinConfig};

/// Disjoint sets whose representative is always the smallest index.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Powers of the radix, one per site.
pub(crate) fn place_values(alphabet: Alphabet, len: usize) -> Vec<i128> {
    let radix = alphabet.radix() as i128;
    std::iter::successors(Some(1i128), |p| Some(p * radix)).take(len).collect()
}

/// Calls `f(neighbor_rank, amplitude)` for every matrix element leaving the
/// state `values` with rank `rank`.
pub(crate) fn for_each_neighbor(
    model: &ModelSpec,
    values: &[i8],
    rank: u64,
    places: &[i128],
    mut f: impl FnMut(u64, f64),
) {
    let alphabet = model.alphabet;
    model.for_each_move(values, |start, replacement, amplitude| {
        let delta: i128 = replacement
            .iter()
            .enumerate()
            .map(|(j, &v)| (alphabet.digit(v) as i128 - alphabet.digit(values[start + j]) as i128) * places[start + j])
            .sum();
        f((rank as i128 + delta) as u64, amplitude);
    });
}

fn check_compatible(model: &ModelSpec, sector: &SectorKey) -> Result<()> {
    if model.alphabet != sector.alphabet {
        return Err(Error::AlphabetMismatch {
            model: model.alphabet,
            input: sector.alphabet,
        });
    }
    if sector.dipole.is_some() && !model.conserves_dipole() {
        return Err(Error::InvalidParameter(format!(
            "{} does not conserve the dipole moment; drop the dipole from the sector",
            model.name
        )));
    }
    Ok(())
}

/// Connectivity classes of one symmetry sector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KrylovPartition {
    pub sector: SectorKey,
    /// Sector basis, ascending.
    pub ranks: Vec<u64>,
    /// Class id (minimal member rank) of each basis state.
    pub class_of: Vec<u64>,
    /// Class ids, ascending.
    pub class_ids: Vec<u64>,
    /// Dimension of each class, parallel to `class_ids`.
    pub class_sizes: Vec<usize>,
}

impl KrylovPartition {
    pub(crate) fn from_labels(sector: SectorKey, ranks: Vec<u64>, class_of: Vec<u64>) -> Self {
        let mut counts: std::collections::BTreeMap<u64, usize> = Default::default();
        for &c in &class_of {
            *counts.entry(c).or_default() += 1;
        }
        let (class_ids, class_sizes) = counts.into_iter().unzip();
        Self {
            sector,
            ranks,
            class_of,
            class_ids,
            class_sizes,
        }
    }

    pub fn dimension(&self) -> usize {
        self.ranks.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_ids.len()
    }

    /// Basis indices grouped by class, in class-id order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let slot: HashMap<u64, usize> = self.class_ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut out: Vec<Vec<usize>> = self.class_sizes.iter().map(|&n| Vec::with_capacity(n)).collect();
        for (i, c) in self.class_of.iter().enumerate() {
            out[slot[c]].push(i);
        }
        out
    }

    pub fn config(&self, index: usize) -> SpinConfig {
        SpinConfig::unrank(self.sector.alphabet, self.sector.length, self.ranks[index]).expect("rank in range")
    }

    pub fn metrics(&self) -> Result<FragmentationMetrics> {
        FragmentationMetrics::from_sizes(&self.class_sizes)
    }
}

/// Splits a sector into classes connected by the model's transitions.
/// Only the presence of a transition matters, never its coefficient.
pub fn decompose(model: &ModelSpec, sector: &SectorKey) -> Result<KrylovPartition> {
    check_compatible(model, sector)?;
    let ranks = enumerate_sector_ranks(sector, Enumeration::Auto);
    if ranks.len() > u32::MAX as usize {
        return Err(Error::DimensionTooLarge {
            dimension: ranks.len(),
            cap: u32::MAX as usize,
        });
    }
    let places = place_values(sector.alphabet, sector.length);
    let edges: Vec<(u32, u32)> = ranks
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, &rank)| {
            let config = SpinConfig::unrank(sector.alphabet, sector.length, rank).expect("rank in range");
            let mut local = Vec::new();
            for_each_neighbor(model, config.values(), rank, &places, |next, _| {
                if next > rank {
                    let j = ranks.binary_search(&next).expect("sector closed under the model");
                    local.push((i as u32, j as u32));
                }
            });
            local
        })
        .collect();
    let mut uf = UnionFind::new(ranks.len());
    for (a, b) in edges {
        uf.union(a, b);
    }
    let class_of = (0..ranks.len() as u32).map(|i| ranks[uf.find(i) as usize]).collect();
    Ok(KrylovPartition::from_labels(*sector, ranks, class_of))
}

/// The Krylov class of `initial`, ascending by rank.
pub fn class_of(model: &ModelSpec, initial: &SpinConfig) -> Result<Vec<SpinConfig>> {
    class_of_bounded(model, initial, usize::MAX)
}

/// Like [`class_of`] but refuses classes larger than `cap`.
pub fn class_of_bounded(model: &ModelSpec, initial: &SpinConfig, cap: usize) -> Result<Vec<SpinConfig>> {
    if model.alphabet != initial.alphabet() {
        return Err(Error::AlphabetMismatch {
            model: model.alphabet,
            input: initial.alphabet(),
        });
    }
    let (alphabet, len) = (initial.alphabet(), initial.len());
    let places = place_values(alphabet, len);
    let mut seen: HashSet<u64> = HashSet::from([initial.rank()]);
    let mut queue = VecDeque::from([initial.rank()]);
    while let Some(rank) = queue.pop_front() {
        let config = SpinConfig::unrank(alphabet, len, rank)?;
        let mut overflow = false;
        for_each_neighbor(model, config.values(), rank, &places, |next, _| {
            if seen.insert(next) {
                queue.push_back(next);
                overflow |= seen.len() > cap;
            }
        });
        if overflow {
            return Err(Error::DimensionTooLarge {
                dimension: seen.len(),
                cap,
            });
        }
    }
    let mut ranks: Vec<u64> = seen.into_iter().collect();
    ranks.sort_unstable();
    ranks.into_iter().map(|r| SpinConfig::unrank(alphabet, len, r)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FragmentationMetrics {
    pub r: usize,
    /// Normalized Shannon entropy of the class weights.
    pub sf: f64,
    pub dmax_over_dt: f64,
    pub dt: usize,
}

impl FragmentationMetrics {
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let dt: usize = sizes.iter().sum();
        if sizes.is_empty() || dt == 0 {
            return Err(Error::InvalidParameter("metrics of an empty partition".into()));
        }
        let r = sizes.len();
        let total = dt as f64;
        let sf = if r == 1 {
            0.0
        } else {
            let h: f64 = sizes
                .iter()
                .map(|&d| {
                    let p = d as f64 / total;
                    -p * p.ln()
                })
                .sum();
            h / (r as f64).ln()
        };
        let dmax = *sizes.iter().max().expect("non-empty");
        Ok(Self {
            r,
            sf,
            dmax_over_dt: dmax as f64 / total,
            dt,
        })
    }
}

pub fn metrics(partition: &KrylovPartition) -> Result<FragmentationMetrics> {
    partition.metrics()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub model: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(flatten)]
    pub metrics: FragmentationMetrics,
}

/// Fragmentation metrics for every (model, N) pair, computed in parallel and
/// returned in model-major, ascending-N order.
pub fn finite_size_table(
    models: &[ModelSpec],
    sizes: RangeInclusive<usize>,
    total_spin: i64,
    dipole: Option<i64>,
) -> Result<Vec<TableRow>> {
    let jobs: Vec<(&ModelSpec, usize)> = models.iter().flat_map(|m| sizes.clone().map(move |n| (m, n))).collect();
    jobs.into_par_iter()
        .map(|(model, n)| {
            let sector = SectorKey::new(n, model.alphabet, total_spin, dipole)?;
            let metrics = decompose(model, &sector)?.metrics()?;
            Ok(TableRow {
                model: model.name.clone(),
                n,
                metrics,
            })
        })
        .collect()
}

/// A model transition that takes a core state out of the core subspace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoreViolation {
    pub state: SpinConfig,
    pub image: SpinConfig,
    pub site: usize,
}

/// An induced move on the charge chain, `input -> output` on consecutive
/// charges including any unchanged context.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ChargeRule {
    pub input: Vec<i8>,
    pub output: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Projection {
    pub model: String,
    pub length: usize,
    #[serde(serialize_with = "crate::spinchain::serialize_display")]
    pub charge_alphabet: Alphabet,
    /// Unchanged charges kept on the left and right of every rule.
    pub context: (usize, usize),
    /// One rule per hermitian pair, larger window first.
    pub rules: Vec<ChargeRule>,
    pub violations: Vec<CoreViolation>,
}

impl Projection {
    pub fn protects_core(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn rule_strings(&self) -> Vec<String> {
        self.rules
            .iter()
            .map(|r| {
                Transition {
                    input: r.input.clone(),
                    output: r.output.clone(),
                    coefficient: 1.0,
                }
                .arrow(self.charge_alphabet)
            })
            .collect()
    }
}

// Charge string with the fixed boundary charge `-S` prepended.
fn extended_charges(config: &SpinConfig) -> Vec<i8> {
    let charges = to_charge_string(config).expect("core state");
    let boundary = charges.alphabet().min_value();
    std::iter::once(boundary).chain(charges.values().iter().copied()).collect()
}

struct InducedMove {
    from: Vec<i8>,
    to: Vec<i8>,
    span: (usize, usize),
}

/// Restricts a model to the core subspace of `len` sites and extracts the
/// local moves it induces on the dual spin-`F/2` charge chain. The context
/// is the smallest (left + right) that makes the rule set exact: every rule
/// match away from the two fixed boundary charges is a real model move.
pub fn project_to_core(model: &ModelSpec, len: usize) -> Result<Projection> {
    let f = model.alphabet.integer_spin().ok_or(Error::NoCore(model.alphabet))?;
    let charge_alphabet = model.alphabet.charge_alphabet().ok_or(Error::NoCore(model.alphabet))?;
    let basis = core_basis(len, f)?;
    let index: HashMap<u64, usize> = basis.iter().enumerate().map(|(i, c)| (c.rank(), i)).collect();
    let extended: Vec<Vec<i8>> = basis.iter().map(extended_charges).collect();

    let mut violations = Vec::new();
    let mut neighbors: Vec<HashSet<usize>> = vec![HashSet::new(); basis.len()];
    let mut moves = Vec::new();
    for (i, config) in basis.iter().enumerate() {
        let values = config.values();
        model.for_each_move(values, |start, replacement, _| {
            let mut image = values.to_vec();
            image[start..start + replacement.len()].copy_from_slice(replacement);
            let image = SpinConfig::new(model.alphabet, image).expect("model values are in range");
            match index.get(&image.rank()) {
                Some(&j) => {
                    neighbors[i].insert(j);
                    let (a, b) = (&extended[i], &extended[j]);
                    let first = (0..a.len()).find(|&k| a[k] != b[k]).expect("distinct states");
                    let last = (0..a.len()).rfind(|&k| a[k] != b[k]).expect("distinct states");
                    moves.push(InducedMove {
                        from: a.clone(),
                        to: b.clone(),
                        span: (first, last),
                    });
                }
                None => violations.push(CoreViolation {
                    state: config.clone(),
                    image,
                    site: start,
                }),
            }
        });
    }

    let mut rules: BTreeSet<ChargeRule> = BTreeSet::new();
    let mut context = (0, 0);
    if violations.is_empty() && !moves.is_empty() {
        let limit = model.max_width() + 1;
        let candidates = (0..=2 * limit).flat_map(|total| (0..=total.min(limit)).map(move |l| (l, total - l)));
        let found = candidates
            .filter(|&(_, r)| r <= limit)
            .find_map(|(l, r)| {
                let set = rules_with_context(&moves, l, r)?;
                sound(&set, &extended, &neighbors, l, r).then_some(((l, r), set))
            })
            .ok_or_else(|| Error::InvalidModel(format!("no finite context reproduces {} on {len} sites", model.name)))?;
        context = found.0;
        rules = found
            .1
            .into_iter()
            .map(|r| if r.input >= r.output { r } else { ChargeRule { input: r.output, output: r.input } })
            .collect();
    }
    Ok(Projection {
        model: model.name.clone(),
        length: len,
        charge_alphabet,
        context,
        rules: rules.into_iter().rev().collect(),
        violations,
    })
}

fn rules_with_context(moves: &[InducedMove], l: usize, r: usize) -> Option<BTreeSet<ChargeRule>> {
    let mut out = BTreeSet::new();
    for m in moves {
        let (a, b) = m.span;
        if a < l || b + r >= m.from.len() {
            return None;
        }
        out.insert(ChargeRule {
            input: m.from[a - l..=b + r].to_vec(),
            output: m.to[a - l..=b + r].to_vec(),
        });
    }
    Some(out)
}

fn sound(rules: &BTreeSet<ChargeRule>, extended: &[Vec<i8>], neighbors: &[HashSet<usize>], l: usize, r: usize) -> bool {
    let lookup: HashMap<&[i8], usize> = extended.iter().enumerate().map(|(i, e)| (e.as_slice(), i)).collect();
    for (i, e) in extended.iter().enumerate() {
        let n = e.len();
        for rule in rules {
            let w = rule.input.len();
            for p in 0..=n.saturating_sub(w) {
                if p + w > n || e[p..p + w] != rule.input[..] {
                    continue;
                }
                // the boundary charge and the last charge (total spin) are fixed
                let (first, last) = (p + l, p + w - 1 - r);
                if first == 0 || last == n - 1 {
                    continue;
                }
                let mut image = e.clone();
                image[p..p + w].copy_from_slice(&rule.output);
                match lookup.get(image.as_slice()) {
                    Some(j) if neighbors[i].contains(j) => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

/// Compares two set partitions of the same labelled states.
pub fn same_partition(a: &[u64], b: &[u64]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd: HashMap<u64, u64> = HashMap::new();
    let mut back: HashMap<u64, u64> = HashMap::new();
    a.iter().zip(b).all(|(&x, &y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}

/// Whether partition `a` is a refinement of partition `b`.
pub fn refines(a: &[u64], b: &[u64]) -> bool {
    let mut map: HashMap<u64, u64> = HashMap::new();
    a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| *map.entry(x).or_insert(y) == y)
}

/// Outcome of comparing the projected embedded-Fredkin dynamics on the core
/// subspace with a spin-1/2 model acting directly on the charge strings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoreComparison {
    pub length: usize,
    pub core_dimension: usize,
    pub projected_classes: usize,
    pub charge_model_classes: usize,
    pub identical: bool,
    /// Every projected class lies inside one class of the charge model.
    pub projected_refines: bool,
}

/// Partitions the core subspace of `len` sites once with `projected` (an
/// integer-spin model) and once with `charge_model` acting on the charge
/// strings, and reports whether the two partitions coincide.
pub fn compare_core_partitions(projected: &ModelSpec, charge_model: &ModelSpec, len: usize) -> Result<CoreComparison> {
    let f = projected.alphabet.integer_spin().ok_or(Error::NoCore(projected.alphabet))?;
    let basis = core_basis(len, f)?;
    let index: HashMap<u64, usize> = basis.iter().enumerate().map(|(i, c)| (c.rank(), i)).collect();
    let charges: Vec<SpinConfig> = basis.iter().map(|c| to_charge_string(c)).collect::<Result<_>>()?;
    if charge_model.alphabet != charges[0].alphabet() {
        return Err(Error::AlphabetMismatch {
            model: charge_model.alphabet,
            input: charges[0].alphabet(),
        });
    }
    let charge_index: HashMap<u64, usize> = charges.iter().enumerate().map(|(i, c)| (c.rank(), i)).collect();

    let label = |uf: &mut UnionFind| -> Vec<u64> { (0..basis.len() as u32).map(|i| uf.find(i) as u64).collect() };

    let mut uf = UnionFind::new(basis.len());
    let places = place_values(projected.alphabet, len);
    for (i, c) in basis.iter().enumerate() {
        for_each_neighbor(projected, c.values(), c.rank(), &places, |next, _| {
            if let Some(&j) = index.get(&next) {
                uf.union(i as u32, j as u32);
            }
        });
    }
    let a = label(&mut uf);

    let mut uf = UnionFind::new(basis.len());
    let places = place_values(charge_model.alphabet, len);
    for (i, c) in charges.iter().enumerate() {
        for_each_neighbor(charge_model, c.values(), c.rank(), &places, |next, _| {
            if let Some(&j) = charge_index.get(&next) {
                uf.union(i as u32, j as u32);
            }
        });
    }
    let b = label(&mut uf);

    let count = |v: &[u64]| v.iter().collect::<HashSet<_>>().len();
    Ok(CoreComparison {
        length: len,
        core_dimension: basis.len(),
        projected_classes: count(&a),
        charge_model_classes: count(&b),
        identical: same_partition(&a, &b),
        projected_refines: refines(&a, &b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_model, ModelParams};

    fn model(name: &str) -> ModelSpec {
        build_model(name, &ModelParams::default()).unwrap()
    }

    #[test]
    fn h3_three_sites() {
        let m = model("h3_1");
        let sector = SectorKey::new(3, Alphabet::Integer(1), 0, None).unwrap();
        let p = decompose(&m, &sector).unwrap();
        assert_eq!(p.dimension(), 7);
        let mut sizes = p.class_sizes.clone();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(sizes, vec![2, 2, 1, 1, 1]);
        let sf = p.metrics().unwrap().sf;
        assert!((sf - 0.9631).abs() < 1e-3, "{sf}");
        for (i, c) in p.class_of.iter().enumerate() {
            assert!(*c <= p.ranks[i]);
        }
    }

    #[test]
    fn metrics_examples() {
        let m = FragmentationMetrics::from_sizes(&[1, 1]).unwrap();
        assert!((m.sf - 1.0).abs() < 1e-15);
        assert_eq!(FragmentationMetrics::from_sizes(&[5]).unwrap().sf, 0.0);
        assert!(FragmentationMetrics::from_sizes(&[]).is_err());
    }

    #[test]
    fn union_find_agrees_with_bfs() {
        for name in ["h3_1", "h_em", "tjz1", "h3_prime", "motzkin", "h4_1"] {
            let m = model(name);
            let sector = SectorKey::new(7, Alphabet::Integer(1), 1, None).unwrap();
            let p = decompose(&m, &sector).unwrap();
            for members in p.classes() {
                let first = p.config(members[0]);
                let bfs: Vec<u64> = class_of(&m, &first).unwrap().iter().map(|c| c.rank()).collect();
                let uf: Vec<u64> = members.iter().map(|&i| p.ranks[i]).collect();
                assert_eq!(bfs, uf, "{name}");
            }
        }
    }

    #[test]
    fn dipole_sector_requires_dipole_conservation() {
        let sector = SectorKey::new(5, Alphabet::Integer(1), 0, Some(0)).unwrap();
        assert!(decompose(&model("tjz1"), &sector).is_err());
        assert!(decompose(&model("h3_1"), &sector).is_ok());
    }

    #[test]
    fn projections() {
        let h3 = project_to_core(&model("h3_1"), 8).unwrap();
        assert_eq!(h3.rule_strings(), vec!["(↑,↓) <-> (↓,↑)"]);
        assert_eq!(h3.context, (0, 0));
        let tjz = project_to_core(&model("tjz1"), 8).unwrap();
        assert_eq!(tjz.rule_strings(), vec!["(↑,↑,↓) <-> (↑,↓,↓)", "(↓,↑,↑) <-> (↓,↓,↑)"]);
        let em = project_to_core(&model("h_em"), 8).unwrap();
        assert_eq!(em.rule_strings(), vec!["(↑,↑,↓,↑) <-> (↑,↓,↑,↑)", "(↓,↑,↓,↓) <-> (↓,↓,↑,↓)"]);
        let motzkin = project_to_core(&model("motzkin"), 6).unwrap();
        assert!(!motzkin.protects_core());
    }

    #[test]
    fn same_partition_ignores_labels() {
        assert!(same_partition(&[1, 1, 2], &[7, 7, 3]));
        assert!(!same_partition(&[1, 1, 2], &[7, 3, 3]));
        assert!(!same_partition(&[1, 2, 2], &[7, 7, 7]));
    }
}
