//! Exact unitary evolution inside one Krylov class, with entanglement and
//! charge-profile observables.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::duality::to_path;
use crate::error::{Error, Result};
use crate::krylov::{class_of_bounded, UnionFind};
use crate::models::ModelSpec;
use crate::spinchain::SpinConfig;

/// Largest dimension evolved by full diagonalization.
pub const DENSE_LIMIT: usize = 4000;
/// Largest dimension accepted at all.
pub const HARD_CAP: usize = 100_000;
/// Local error bound of one Lanczos step.
pub const LANCZOS_TOL: f64 = 1e-8;
/// Schmidt weights below this are dropped from the entropy sum.
pub const SCHMIDT_FLOOR: f64 = 1e-14;

const KRYLOV_DIM: usize = 30;

/// Real symmetric Hamiltonian restricted to a basis closed under the model.
#[derive(Clone, Debug)]
pub struct SectorHamiltonian {
    basis: Vec<SpinConfig>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SectorHamiltonian {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SpinConfig] {
        &self.basis
    }

    pub fn entry(&self, m: usize, n: usize) -> f64 {
        let row = &self.cols[self.row_ptr[m]..self.row_ptr[m + 1]];
        match row.binary_search(&n) {
            Ok(k) => self.vals[self.row_ptr[m] + k],
            Err(_) => 0.0,
        }
    }

    pub fn nonzeros(&self) -> usize {
        self.vals.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dimension();
        let mut m = DMatrix::zeros(d, d);
        for r in 0..d {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] = self.vals[k];
            }
        }
        m
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        (0..self.dimension())
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| psi[self.cols[k]] * self.vals[k])
                    .sum()
            })
            .collect()
    }

    /// `<psi|H|psi>`.
    pub fn energy(&self, psi: &[Complex64]) -> f64 {
        inner(psi, &self.apply(psi)).re
    }

    pub fn index_of(&self, config: &SpinConfig) -> Option<usize> {
        self.basis.binary_search_by_key(&config.rank(), |c| c.rank()).ok()
    }
}

/// Builds `H` on `basis` (any order; stored ascending by rank). Every image
/// of a basis state must lie in the basis.
pub fn assemble(model: &ModelSpec, basis: &[SpinConfig]) -> Result<SectorHamiltonian> {
    let mut basis = basis.to_vec();
    basis.sort_by_key(|c| c.rank());
    basis.dedup();
    if let Some(c) = basis.iter().find(|c| c.alphabet() != model.alphabet) {
        return Err(Error::AlphabetMismatch {
            model: model.alphabet,
            input: c.alphabet(),
        });
    }
    let index: HashMap<u64, usize> = basis.iter().enumerate().map(|(i, c)| (c.rank(), i)).collect();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); basis.len()];
    for (n, config) in basis.iter().enumerate() {
        let values = config.values();
        let mut missing = None;
        model.for_each_move(values, |start, replacement, amplitude| {
            let mut image = values.to_vec();
            image[start..start + replacement.len()].copy_from_slice(replacement);
            let image = SpinConfig::new(model.alphabet, image).expect("model values are in range");
            match index.get(&image.rank()) {
                Some(&m) => rows[m].push((n, amplitude)),
                None => {
                    missing.get_or_insert(image);
                }
            }
        });
        if let Some(to) = missing {
            return Err(Error::BasisNotClosed {
                from: config.to_string(),
                to: to.to_string(),
            });
        }
    }
    let (mut row_ptr, mut cols, mut vals) = (vec![0], Vec::new(), Vec::new());
    for mut row in rows {
        row.sort_by_key(|e| e.0);
        for (col, v) in row {
            if cols.len() > *row_ptr.last().unwrap() && *cols.last().unwrap() == col {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(col);
                vals.push(v);
            }
        }
        row_ptr.push(cols.len());
    }
    Ok(SectorHamiltonian {
        basis,
        row_ptr,
        cols,
        vals,
    })
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Dense up to [`DENSE_LIMIT`], Lanczos above.
    Auto,
    Dense,
    Lanczos,
}

/// `psi(t) = exp(-iHt) psi0` at every requested time.
pub fn evolve(h: &SectorHamiltonian, psi0: &[Complex64], times: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    evolve_with(h, psi0, times, Method::Auto)
}

pub fn evolve_with(
    h: &SectorHamiltonian,
    psi0: &[Complex64],
    times: &[f64],
    method: Method,
) -> Result<Vec<Vec<Complex64>>> {
    let d = h.dimension();
    if d > HARD_CAP {
        return Err(Error::DimensionTooLarge {
            dimension: d,
            cap: HARD_CAP,
        });
    }
    if psi0.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            found: psi0.len(),
        });
    }
    let n = norm(psi0);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(n));
    }
    let dense = match method {
        Method::Auto => d <= DENSE_LIMIT,
        Method::Dense => true,
        Method::Lanczos => false,
    };
    if dense {
        Ok(evolve_dense(h, psi0, times))
    } else {
        Ok(evolve_lanczos(h, psi0, times))
    }
}

fn evolve_dense(h: &SectorHamiltonian, psi0: &[Complex64], times: &[f64]) -> Vec<Vec<Complex64>> {
    let eig = SymmetricEigen::new(h.to_dense());
    let v = &eig.eigenvectors;
    let d = h.dimension();
    // coefficients in the eigenbasis
    let c: Vec<Complex64> = (0..d)
        .map(|k| (0..d).map(|i| psi0[i] * v[(i, k)]).sum())
        .collect();
    times
        .par_iter()
        .map(|&t| {
            let rotated: Vec<Complex64> = c
                .iter()
                .zip(eig.eigenvalues.iter())
                .map(|(ck, &e)| ck * Complex64::from_polar(1.0, -e * t))
                .collect();
            (0..d)
                .map(|i| (0..d).map(|k| rotated[k] * v[(i, k)]).sum())
                .collect()
        })
        .collect()
}

fn evolve_lanczos(h: &SectorHamiltonian, psi0: &[Complex64], times: &[f64]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(times.len());
    let mut psi = psi0.to_vec();
    let mut now = 0.0;
    for &t in times {
        while (t - now).abs() > 0.0 {
            let step = lanczos_step(h, &psi, t - now);
            psi = step.0;
            now += step.1;
            if (t - now).abs() < 1e-15 * t.abs().max(1.0) {
                now = t;
            }
        }
        out.push(psi.clone());
    }
    out
}

// Advances by at most `dt`, shrinking the step until the a posteriori error
// estimate meets the tolerance. Returns the new state and the step taken.
fn lanczos_step(h: &SectorHamiltonian, psi: &[Complex64], dt: f64) -> (Vec<Complex64>, f64) {
    let d = h.dimension();
    let m = KRYLOV_DIM.min(d);
    let nrm = norm(psi);
    let mut basis: Vec<Vec<Complex64>> = vec![psi.iter().map(|x| x / nrm).collect()];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut residual = 0.0;
    for j in 0..m {
        let mut w = h.apply(&basis[j]);
        alpha.push(inner(&basis[j], &w).re);
        // full reorthogonalization, twice
        for _ in 0..2 {
            for v in &basis {
                let c = inner(v, &w);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);
        if j + 1 == m || b < 1e-12 {
            residual = if b < 1e-12 { 0.0 } else { b };
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let coeffs = |tau: f64| -> DVector<Complex64> {
        DVector::from_fn(k, |i, _| {
            (0..k)
                .map(|l| {
                    let u = &eig.eigenvectors;
                    Complex64::from_polar(u[(i, l)] * u[(0, l)], -eig.eigenvalues[l] * tau)
                })
                .sum()
        })
    };
    let mut tau = dt;
    let mut y = coeffs(tau);
    while residual * y[k - 1].norm() * nrm > LANCZOS_TOL {
        tau /= 2.0;
        y = coeffs(tau);
    }
    let mut next = vec![Complex64::new(0.0, 0.0); d];
    for (yj, v) in y.iter().zip(&basis) {
        next.iter_mut().zip(v).for_each(|(x, b)| *x += yj * b * nrm);
    }
    (next, tau)
}

/// Left and right block labels of every basis state at one cut, plus the
/// independent blocks of the amplitude matrix.
struct CutLayout {
    left: Vec<usize>,
    right: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl CutLayout {
    fn new(basis: &[SpinConfig], cut: usize) -> Self {
        let mut lmap: HashMap<&[i8], usize> = HashMap::new();
        let mut rmap: HashMap<&[i8], usize> = HashMap::new();
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for c in basis {
            let (l, r) = c.values().split_at(cut);
            let n = lmap.len();
            left.push(*lmap.entry(l).or_insert(n));
            let n = rmap.len();
            right.push(*rmap.entry(r).or_insert(n));
        }
        // states sharing a left or a right part land in one block
        let nl = lmap.len();
        let mut uf = UnionFind::new(nl + rmap.len());
        for (l, r) in left.iter().zip(&right) {
            uf.union(*l as u32, (nl + r) as u32);
        }
        let mut groups: HashMap<u32, Vec<usize>> = HashMap::new();
        for (i, l) in left.iter().enumerate() {
            groups.entry(uf.find(*l as u32)).or_default().push(i);
        }
        let mut blocks: Vec<Vec<usize>> = groups.into_values().collect();
        blocks.sort();
        Self { left, right, blocks }
    }

    fn entropy(&self, state: &[Complex64]) -> f64 {
        let mut s = 0.0;
        for block in &self.blocks {
            let mut ls: Vec<usize> = block.iter().map(|&i| self.left[i]).collect();
            let mut rs: Vec<usize> = block.iter().map(|&i| self.right[i]).collect();
            ls.sort_unstable();
            ls.dedup();
            rs.sort_unstable();
            rs.dedup();
            let weights: Vec<f64> = if ls.len() == 1 || rs.len() == 1 {
                vec![block.iter().map(|&i| state[i].norm_sqr()).sum()]
            } else {
                let mut m = DMatrix::<Complex64>::zeros(ls.len(), rs.len());
                for &i in block {
                    let a = ls.binary_search(&self.left[i]).unwrap();
                    let b = rs.binary_search(&self.right[i]).unwrap();
                    m[(a, b)] = state[i];
                }
                m.singular_values().iter().map(|x| x * x).collect()
            };
            s -= weights
                .into_iter()
                .filter(|&p| p >= SCHMIDT_FLOOR)
                .map(|p| p * p.ln())
                .sum::<f64>();
        }
        s.max(0.0)
    }
}

/// Von Neumann entropy (natural log) of the part left of `cut`; the cut sits
/// after site `cut - 1`. Cuts at the chain ends give 0.
pub fn entanglement_entropy(state: &[Complex64], basis: &[SpinConfig], cut: usize) -> f64 {
    match basis.first() {
        Some(c) if cut > 0 && cut < c.len() => CutLayout::new(basis, cut).entropy(state),
        _ => 0.0,
    }
}

/// `<n_{k+1/2}>` for bonds `k = 0..L-1`, i.e. the expected path height after
/// each site.
pub fn charge_profile(state: &[Complex64], basis: &[SpinConfig]) -> Vec<f64> {
    let len = basis.first().map_or(0, |c| c.len());
    let mut out = vec![0.0; len];
    for (amp, c) in state.iter().zip(basis) {
        let w = amp.norm_sqr();
        for (o, h) in out.iter_mut().zip(&to_path(c).heights()[1..]) {
            *o += w * *h as f64;
        }
    }
    out
}

/// Whether moving the cut across `site` cannot change the entropy: the value
/// at `site` is fixed by the left part alone and by the right part alone.
pub fn plateau_predicate(basis: &[SpinConfig], site: usize) -> bool {
    let determined = |part: &dyn Fn(&SpinConfig) -> &[i8]| {
        let mut seen: HashMap<&[i8], i8> = HashMap::new();
        basis
            .iter()
            .all(|c| *seen.entry(part(c)).or_insert(c.values()[site]) == c.values()[site])
    };
    determined(&|c| &c.values()[..site]) && determined(&|c| &c.values()[site + 1..])
}

/// Uniform grid `0, dt, 2dt, ...` up to `tmax`.
pub fn time_grid(tmax: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite() && tmax >= 0.0 && tmax.is_finite()) {
        return Err(Error::InvalidParameter(format!("need dt > 0 and tmax >= 0, got dt={dt}, tmax={tmax}")));
    }
    let steps = (tmax / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

fn serialize_amplitudes<S: Serializer>(rows: &[Vec<Complex64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for row in rows {
        let pairs: Vec<[f64; 2]> = row.iter().map(|c| [c.re, c.im]).collect();
        seq.serialize_element(&pairs)?;
    }
    seq.end()
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolutionResult {
    pub basis: Vec<SpinConfig>,
    pub times: Vec<f64>,
    /// `amplitudes[t][m]`, serialized as `[re, im]` pairs.
    #[serde(serialize_with = "serialize_amplitudes")]
    pub amplitudes: Vec<Vec<Complex64>>,
    /// `entropies[t][c - 1]` for cuts `c = 1..L-1`.
    pub entropies: Vec<Vec<f64>>,
    /// `charges[t][k]` for bonds `k = 0..L-1`.
    pub charges: Vec<Vec<f64>>,
}

impl EvolutionResult {
    pub fn from_states(basis: Vec<SpinConfig>, times: Vec<f64>, amplitudes: Vec<Vec<Complex64>>) -> Self {
        let len = basis.first().map_or(0, |c| c.len());
        let layouts: Vec<CutLayout> = (1..len).map(|cut| CutLayout::new(&basis, cut)).collect();
        let entropies = amplitudes
            .par_iter()
            .map(|psi| layouts.iter().map(|l| l.entropy(psi)).collect())
            .collect();
        let charges = amplitudes.par_iter().map(|psi| charge_profile(psi, &basis)).collect();
        Self {
            basis,
            times,
            amplitudes,
            entropies,
            charges,
        }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// `time,cut,entropy` rows, time-major.
    pub fn entropy_csv(&self) -> String {
        let mut out = String::from("time,cut,entropy\n");
        for (t, row) in self.times.iter().zip(&self.entropies) {
            for (c, s) in row.iter().enumerate() {
                out.push_str(&format!("{t},{},{s}\n", c + 1));
            }
        }
        out
    }

    /// `time,bond,charge` rows, time-major.
    pub fn charge_csv(&self) -> String {
        let mut out = String::from("time,bond,charge\n");
        for (t, row) in self.times.iter().zip(&self.charges) {
            for (k, q) in row.iter().enumerate() {
                out.push_str(&format!("{t},{k},{q}\n"));
            }
        }
        out
    }
}

/// Evolves a product state inside its Krylov class.
pub fn simulate(model: &ModelSpec, initial: &SpinConfig, times: &[f64]) -> Result<EvolutionResult> {
    let class = class_of_bounded(model, initial, HARD_CAP)?;
    let h = assemble(model, &class)?;
    let mut psi0 = vec![Complex64::new(0.0, 0.0); h.dimension()];
    psi0[h.index_of(initial).expect("initial state is in its class")] = Complex64::new(1.0, 0.0);
    let states = evolve(&h, &psi0, times)?;
    Ok(EvolutionResult::from_states(class, times.to_vec(), states))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_model, ModelParams};

    fn model(name: &str) -> ModelSpec {
        build_model(name, &ModelParams::default()).unwrap()
    }

    fn two_level() -> (ModelSpec, Vec<SpinConfig>) {
        let basis = vec![SpinConfig::spin(1, &[-1, 1, 0]).unwrap(), SpinConfig::spin(1, &[0, -1, 1]).unwrap()];
        (model("h3_1"), basis)
    }

    #[test]
    fn two_level_matrix_and_amplitudes() {
        let (m, basis) = two_level();
        let h = assemble(&m, &basis).unwrap();
        assert_eq!(h.to_dense(), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let psi0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let times = [0.0, 0.3, std::f64::consts::FRAC_PI_4, 2.0];
        for method in [Method::Dense, Method::Lanczos] {
            let states = evolve_with(&h, &psi0, &times, method).unwrap();
            for (t, psi) in times.iter().zip(&states) {
                assert!((psi[0] - Complex64::new(t.cos(), 0.0)).norm() < 1e-12);
                assert!((psi[1] - Complex64::new(0.0, -t.sin())).norm() < 1e-12);
            }
            let s = entanglement_entropy(&states[2], &basis, 1);
            assert!((s - 2f64.ln()).abs() < 1e-9, "{s}");
            let q = charge_profile(&states[1], &basis);
            assert!((q[0] + 0.3f64.cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn frozen_state_is_one_by_one_zero() {
        let frozen = SpinConfig::spin(1, &[1, 1, 1, 1]).unwrap();
        let h = assemble(&model("h3_1"), &[frozen]).unwrap();
        assert_eq!(h.dimension(), 1);
        assert_eq!(h.entry(0, 0), 0.0);
    }

    #[test]
    fn fredkin_sign() {
        let m = model("fredkin");
        let a = SpinConfig::parse(m.alphabet, "↑,↓,↑").unwrap();
        let class = class_of_bounded(&m, &a, 100).unwrap();
        let h = assemble(&m, &class).unwrap();
        let b = SpinConfig::parse(m.alphabet, "↑,↑,↓").unwrap();
        let (i, j) = (h.index_of(&a).unwrap(), h.index_of(&b).unwrap());
        assert_eq!(h.entry(i, j), 1.0);
        assert_eq!(h.entry(j, i), 1.0);
    }

    #[test]
    fn open_basis_is_rejected() {
        let basis = [SpinConfig::spin(1, &[-1, 1, 0]).unwrap()];
        assert!(matches!(assemble(&model("h3_1"), &basis), Err(Error::BasisNotClosed { .. })));
    }

    #[test]
    fn lanczos_matches_dense() {
        let m = model("h3_1");
        let init = SpinConfig::spin(1, &[-1, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, -1]).unwrap();
        let class = class_of_bounded(&m, &init, HARD_CAP).unwrap();
        let h = assemble(&m, &class).unwrap();
        let mut psi0 = vec![Complex64::new(0.0, 0.0); h.dimension()];
        psi0[h.index_of(&init).unwrap()] = Complex64::new(1.0, 0.0);
        let times = time_grid(10.0, 0.5).unwrap();
        let a = evolve_with(&h, &psi0, &times, Method::Dense).unwrap();
        let b = evolve_with(&h, &psi0, &times, Method::Lanczos).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let diff: f64 = x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
            assert!(diff < 1e-6, "{diff}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let (m, basis) = two_level();
        let h = assemble(&m, &basis).unwrap();
        let psi = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(evolve(&h, &psi, &[0.0]), Err(Error::NotNormalized(_))));
        assert!(evolve(&h, &psi[..1], &[0.0]).is_err());
        assert!(time_grid(1.0, 0.0).is_err());
        assert_eq!(time_grid(1.0, 0.25).unwrap().len(), 5);
    }

    #[test]
    fn plateau_examples() {
        let frozen = [SpinConfig::spin(1, &[1, 0, -1]).unwrap()];
        assert!((0..3).all(|s| plateau_predicate(&frozen, s)));
        let (_, basis) = two_level();
        assert!(!plateau_predicate(&basis, 0));
        assert!(plateau_predicate(&basis, 1));
        assert!(!plateau_predicate(&basis, 2));
    }
}
