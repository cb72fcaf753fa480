//! Bond operators, the model library and the peak-valley condition.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::Cyclo8;
use crate::spinchain::Alphabet;

/// One off-diagonal matrix element `|output><input|` on a window of `q` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub input: Vec<i8>,
    pub output: Vec<i8>,
    pub coefficient: f64,
}

impl Transition {
    pub fn new(input: Vec<i8>, output: Vec<i8>, coefficient: f64) -> Result<Self> {
        if input.len() != output.len() || input.is_empty() {
            return Err(Error::InvalidModel(format!(
                "windows {input:?} and {output:?} must have the same nonzero width"
            )));
        }
        if input == output {
            return Err(Error::InvalidModel(format!("transition {input:?} is diagonal")));
        }
        let sum = |w: &[i8]| w.iter().map(|&v| v as i64).sum::<i64>();
        if sum(&input) != sum(&output) {
            return Err(Error::InvalidModel(format!(
                "transition {input:?} -> {output:?} changes the window spin"
            )));
        }
        if !coefficient.is_finite() || coefficient == 0.0 {
            return Err(Error::InvalidModel(format!("bad coefficient {coefficient}")));
        }
        Ok(Self {
            input,
            output,
            coefficient,
        })
    }

    fn unit(input: Vec<i8>, output: Vec<i8>) -> Self {
        Self::new(input, output, 1.0).expect("library transitions are valid")
    }

    pub fn width(&self) -> usize {
        self.input.len()
    }

    pub fn reversed(&self) -> Self {
        Self {
            input: self.output.clone(),
            output: self.input.clone(),
            coefficient: self.coefficient,
        }
    }

    /// Whether the local dipole `sum_j j w_j` is unchanged.
    pub fn conserves_dipole(&self) -> bool {
        let d = |w: &[i8]| w.iter().enumerate().map(|(j, &v)| j as i64 * v as i64).sum::<i64>();
        d(&self.input) == d(&self.output)
    }

    /// Renders as `(a,b) <-> (c,d)` using the alphabet's symbols.
    pub fn arrow(&self, alphabet: Alphabet) -> String {
        let w = |v: &[i8]| {
            let s: Vec<String> = v.iter().map(|&x| alphabet.symbol(x)).collect();
            format!("({})", s.join(","))
        };
        format!("{} <-> {}", w(&self.input), w(&self.output))
    }
}

/// A `q`-site operator, stored as one entry per hermitian pair `a <-> b`.
#[derive(Clone, Debug, PartialEq)]
pub struct BondOperator {
    width: usize,
    pairs: Vec<Transition>,
}

impl BondOperator {
    /// Builds the operator from its transitions; reversed duplicates are
    /// merged and must carry the same coefficient.
    pub fn new(width: usize, transitions: Vec<Transition>) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidModel("zero-width operator".into()));
        }
        let mut pairs: Vec<Transition> = Vec::new();
        for t in transitions {
            if t.width() != width {
                return Err(Error::InvalidModel(format!(
                    "transition {:?} has width {}, operator width is {width}",
                    t.input,
                    t.width()
                )));
            }
            let existing = pairs.iter().find(|p| {
                (p.input == t.input && p.output == t.output) || (p.input == t.output && p.output == t.input)
            });
            match existing {
                Some(p) if p.coefficient != t.coefficient => {
                    return Err(Error::InvalidModel(format!(
                        "{:?} <-> {:?} listed with coefficients {} and {}; the operator must be hermitian",
                        t.input, t.output, p.coefficient, t.coefficient
                    )))
                }
                Some(_) => {}
                None => pairs.push(t),
            }
        }
        Ok(Self { width, pairs })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// One transition per hermitian pair, in construction order.
    pub fn pairs(&self) -> &[Transition] {
        &self.pairs
    }

    /// Every transition including the hermitian partners.
    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        self.pairs.iter().flat_map(|t| [t.clone(), t.reversed()])
    }

    pub fn is_hermitian(&self) -> bool {
        let all: Vec<Transition> = self.transitions().collect();
        all.iter().all(|t| {
            all.iter()
                .any(|u| u.input == t.output && u.output == t.input && u.coefficient == t.coefficient)
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub alphabet: Alphabet,
    pub operators: Vec<BondOperator>,
    /// Per-window coefficients indexed by the window's first site; windows
    /// past the end of the list use 1.
    pub site_coefficients: Vec<f64>,
}

impl ModelSpec {
    pub fn new(name: impl Into<String>, alphabet: Alphabet, operators: Vec<BondOperator>) -> Result<Self> {
        for op in &operators {
            for t in op.pairs() {
                if let Some(&v) = t.input.iter().chain(&t.output).find(|v| !alphabet.contains(**v)) {
                    return Err(Error::InvalidModel(format!("value {v} is not a {alphabet} state")));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            alphabet,
            operators,
            site_coefficients: Vec::new(),
        })
    }

    pub fn with_site_coefficients(mut self, coefficients: Vec<f64>) -> Result<Self> {
        if let Some(c) = coefficients.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::InvalidParameter(format!("site coefficient {c} must be positive")));
        }
        self.site_coefficients = coefficients;
        Ok(self)
    }

    pub fn site_coefficient(&self, start: usize) -> f64 {
        self.site_coefficients.get(start).copied().unwrap_or(1.0)
    }

    pub fn max_width(&self) -> usize {
        self.operators.iter().map(|o| o.width()).max().unwrap_or(0)
    }

    pub fn transition_count(&self) -> usize {
        self.operators.iter().map(|o| o.pairs().len()).sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &Transition> {
        self.operators.iter().flat_map(|o| o.pairs())
    }

    pub fn conserves_dipole(&self) -> bool {
        self.pairs().all(|t| t.conserves_dipole())
    }

    /// Calls `f(start, replacement, amplitude)` for every matrix element
    /// leaving `values`; `replacement` overwrites `values[start..start + q]`.
    pub fn for_each_move(&self, values: &[i8], mut f: impl FnMut(usize, &[i8], f64)) {
        for op in &self.operators {
            let q = op.width();
            if q > values.len() {
                continue;
            }
            for start in 0..=values.len() - q {
                let window = &values[start..start + q];
                let alpha = self.site_coefficient(start);
                for t in op.pairs() {
                    if window == t.input.as_slice() {
                        f(start, &t.output, alpha * t.coefficient);
                    } else if window == t.output.as_slice() {
                        f(start, &t.input, alpha * t.coefficient);
                    }
                }
            }
        }
    }

    /// Sorted, deduplicated `(input, output)` windows in both directions.
    /// Two models with equal lists generate the same transition graph.
    pub fn canonical_transitions(&self) -> Vec<(Vec<i8>, Vec<i8>)> {
        let mut out: Vec<(Vec<i8>, Vec<i8>)> = self
            .operators
            .iter()
            .flat_map(|o| o.transitions())
            .map(|t| (t.input, t.output))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn to_model_file(&self) -> ModelFile {
        ModelFile {
            name: Some(self.name.clone()),
            spin: self.alphabet.to_string().trim_start_matches("spin-").to_string(),
            q: self.max_width(),
            transitions: self
                .pairs()
                .map(|t| TransitionRecord {
                    input: t.input.clone(),
                    output: t.output.clone(),
                    coeff: t.coefficient,
                })
                .collect(),
        }
    }
}

/// On-disk model description: `{"F": 1, "q": 3, "transitions": [{"in": [...], "out": [...], "coeff": 1}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "F", with = "spin_field")]
    pub spin: String,
    pub q: usize,
    pub transitions: Vec<TransitionRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransitionRecord {
    #[serde(rename = "in")]
    pub input: Vec<i8>,
    #[serde(rename = "out")]
    pub output: Vec<i8>,
    #[serde(default = "unit_coefficient")]
    pub coeff: f64,
}

fn unit_coefficient() -> f64 {
    1.0
}

// Accepts `"F": 1` or `"F": "1/2"`.
mod spin_field {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &str, s: S) -> Result<S::Ok, S::Error> {
        match v.parse::<u64>() {
            Ok(n) => s.serialize_u64(n),
            Err(_) => s.serialize_str(v),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Num(n) => n.to_string(),
            Raw::Text(t) => t,
        })
    }
}

impl ModelFile {
    pub fn into_model(self) -> Result<ModelSpec> {
        let alphabet: Alphabet = self.spin.parse()?;
        if self.q == 0 {
            return Err(Error::InvalidModel("q must be positive".into()));
        }
        let transitions = self
            .transitions
            .into_iter()
            .map(|r| Transition::new(r.input, r.output, r.coeff))
            .collect::<Result<Vec<_>>>()?;
        let op = BondOperator::new(self.q, transitions)?;
        ModelSpec::new(self.name.unwrap_or_else(|| "custom".into()), alphabet, vec![op])
    }
}

pub fn load_model_json(text: &str) -> Result<ModelSpec> {
    serde_json::from_str::<ModelFile>(text)?.into_model()
}

/// Names of the built-in models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelName {
    Tjz1,
    H3,
    H4,
    Motzkin,
    Tjz2,
    H3Spin2Raw,
    H3Spin2,
    EmbeddedFredkin,
    H3Prime,
    Fredkin,
}

impl ModelName {
    pub const ALL: [ModelName; 10] = [
        ModelName::Tjz1,
        ModelName::H3,
        ModelName::H4,
        ModelName::Motzkin,
        ModelName::Tjz2,
        ModelName::H3Spin2Raw,
        ModelName::H3Spin2,
        ModelName::EmbeddedFredkin,
        ModelName::H3Prime,
        ModelName::Fredkin,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelName::Tjz1 => "tjz1",
            ModelName::H3 => "h3_1",
            ModelName::H4 => "h4_1",
            ModelName::Motzkin => "motzkin",
            ModelName::Tjz2 => "tjz2",
            ModelName::H3Spin2Raw => "h3_2_raw",
            ModelName::H3Spin2 => "h3_2",
            ModelName::EmbeddedFredkin => "h_em",
            ModelName::H3Prime => "h3_prime",
            ModelName::Fredkin => "fredkin",
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Weight of the second embedded-Fredkin term.
    pub alpha: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { alpha: 1.0 }
    }
}

/// All transitions of the ladder product `prod_j (F^{sign s_j})^{|s_j|}`:
/// every window whose shifted values stay in range.
pub fn ladder_product(alphabet: Alphabet, shifts: &[i8]) -> Vec<Transition> {
    let q = shifts.len();
    let radix = alphabet.radix();
    let mut out = Vec::new();
    for r in 0..radix.pow(q as u32) {
        let mut rem = r;
        let input: Vec<i8> = (0..q)
            .map(|_| {
                let d = rem % radix;
                rem /= radix;
                alphabet.value(d)
            })
            .collect();
        let output: Vec<i8> = input.iter().zip(shifts).map(|(v, s)| v + s * alphabet.step()).collect();
        if output.iter().all(|v| alphabet.contains(*v)) {
            out.push(Transition::unit(input, output));
        }
    }
    out
}

/// Generalized t-Jz bond: `F_n^+ F_{n+1}^-` restricted to `|F_n + F_{n+1}| = F`.
pub fn tjz(f: u8) -> Result<ModelSpec> {
    let alphabet = Alphabet::spin(f)?;
    let mut transitions = Vec::new();
    for t in ladder_product(alphabet, &[1, -1]) {
        let m = t.input.iter().map(|&v| v as i64).sum::<i64>();
        if appendix_c_projector(f as u32, m)? == 1 {
            transitions.push(t);
        }
    }
    ModelSpec::new(format!("tjz{f}"), alphabet, vec![BondOperator::new(2, transitions)?])
}

fn explicit(name: &str, alphabet: Alphabet, q: usize, rows: &[(&[i8], &[i8], f64)]) -> Result<ModelSpec> {
    let transitions = rows
        .iter()
        .map(|(a, b, c)| Transition::new(a.to_vec(), b.to_vec(), *c))
        .collect::<Result<Vec<_>>>()?;
    ModelSpec::new(name, alphabet, vec![BondOperator::new(q, transitions)?])
}

pub fn build_model(name: &str, params: &ModelParams) -> Result<ModelSpec> {
    let which: ModelName = name.parse()?;
    build(which, params)
}

pub fn build(which: ModelName, params: &ModelParams) -> Result<ModelSpec> {
    let spin1 = Alphabet::Integer(1);
    let spin2 = Alphabet::Integer(2);
    let name = which.as_str();
    match which {
        ModelName::Tjz1 => Ok(ModelSpec { name: name.into(), ..tjz(1)? }),
        ModelName::Tjz2 => Ok(ModelSpec { name: name.into(), ..tjz(2)? }),
        ModelName::H3 => {
            let op = BondOperator::new(3, ladder_product(spin1, &[1, -2, 1]))?;
            ModelSpec::new(name, spin1, vec![op])
        }
        ModelName::H4 => {
            let op = BondOperator::new(4, ladder_product(spin1, &[1, -1, -1, 1]))?;
            ModelSpec::new(name, spin1, vec![op])
        }
        ModelName::Motzkin => explicit(
            name,
            spin1,
            2,
            &[(&[0, -1], &[-1, 0], 1.0), (&[0, 1], &[1, 0], 1.0), (&[1, -1], &[0, 0], 1.0)],
        ),
        ModelName::H3Spin2Raw => {
            let op = BondOperator::new(3, ladder_product(spin2, &[1, -2, 1]))?;
            ModelSpec::new(name, spin2, vec![op])
        }
        ModelName::H3Spin2 => {
            let kept = ladder_product(spin2, &[1, -2, 1])
                .into_iter()
                .filter(spin2_projector_filter)
                .collect();
            ModelSpec::new(name, spin2, vec![BondOperator::new(3, kept)?])
        }
        ModelName::EmbeddedFredkin => {
            if params.alpha == 0.0 || !params.alpha.is_finite() {
                return Err(Error::InvalidParameter("h_em requires a finite nonzero alpha".into()));
            }
            explicit(
                name,
                spin1,
                3,
                &[(&[0, -1, 1], &[-1, 1, 0], 1.0), (&[0, 1, -1], &[1, -1, 0], params.alpha)],
            )
        }
        ModelName::H3Prime => explicit(
            name,
            spin1,
            3,
            &[
                (&[0, -1, 1], &[-1, 1, 0], 1.0),
                (&[0, 1, -1], &[1, -1, 0], 1.0),
                (&[1, -1, 1], &[0, 1, 0], 1.0),
            ],
        ),
        ModelName::Fredkin => explicit(
            name,
            Alphabet::spin_half(),
            3,
            &[(&[1, -1, 1], &[1, 1, -1], 1.0), (&[-1, 1, -1], &[1, -1, -1], -1.0)],
        ),
    }
}

/// `(max, min)` of the prefix sums `{0, w0, w0 + w1, ...}`.
pub fn window_extrema(window: &[i8]) -> (i64, i64) {
    let mut s = 0i64;
    let (mut hi, mut lo) = (0i64, 0i64);
    for &v in window {
        s += v as i64;
        hi = hi.max(s);
        lo = lo.min(s);
    }
    (hi, lo)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub transition: Transition,
    /// `(max, min)` of the input window's prefix sums.
    pub input_extrema: (i64, i64),
    pub output_extrema: (i64, i64),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PVReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

/// Checks that every transition keeps both extremes of its window's prefix
/// sums. Hermitian partners have the same verdict, so each pair is reported
/// once in its stored orientation.
pub fn pv_check(op: &BondOperator) -> PVReport {
    let violations: Vec<Violation> = op
        .pairs()
        .iter()
        .filter_map(|t| {
            let input_extrema = window_extrema(&t.input);
            let output_extrema = window_extrema(&t.output);
            (input_extrema != output_extrema).then(|| Violation {
                transition: t.clone(),
                input_extrema,
                output_extrema,
            })
        })
        .collect();
    PVReport {
        passed: violations.is_empty(),
        violations,
    }
}

pub fn pv_check_model(model: &ModelSpec) -> PVReport {
    let violations: Vec<Violation> = model.operators.iter().flat_map(|op| pv_check(op).violations).collect();
    PVReport {
        passed: violations.is_empty(),
        violations,
    }
}

/// Exact value of `P' = 1 - (1/4)(1 + e^{iπ m})(1 + e^{iπ m/2}) θ(-a c)` for
/// a window `(a, m, c)`.
pub fn projector_prime(window: &[i8]) -> u8 {
    assert_eq!(window.len(), 3, "P' acts on three sites");
    let (a, m, c) = (window[0] as i64, window[1] as i64, window[2] as i64);
    let theta = if -a * c >= 0 { 1 } else { 0 };
    let quarter = Cyclo8::half_sum(1, 4 * m) * Cyclo8::half_sum(1, 2 * m);
    let cut = quarter.as_integer().expect("P' factor is an integer for integer m");
    (1 - cut * theta) as u8
}

/// Keeps a spin-2 three-site transition when both windows pass `P'`, i.e.
/// a zero in the middle needs outer neighbors of the same nonzero sign.
pub fn spin2_projector_filter(t: &Transition) -> bool {
    t.width() == 3 && projector_prime(&t.input) == 1 && projector_prime(&t.output) == 1
}

/// `1` iff `qval ≡ lambda (mod 2F+1)`.
pub fn modular_projector(qval: i64, lambda: i64, f: u8) -> u8 {
    ((qval - lambda).rem_euclid(2 * f as i64 + 1) == 0) as u8
}

/// Phase-factor realization of the projector onto `|F_n + F_{n+1}| = 2S`,
/// evaluated exactly. `two_s` is `2S`, `m` is `F_n^z + F_{n+1}^z`.
pub fn appendix_c_projector(two_s: u32, m: i64) -> Result<u8> {
    let odd = |k: i64| Cyclo8::half_sum(-1, 4 * k); // (1 - e^{iπk})/2
    let even = |k: i64| Cyclo8::half_sum(1, 4 * k); // (1 + e^{iπk})/2
    let a = m.abs() - 1;
    let value = match two_s {
        1 => odd(m),
        2 => even(m) * Cyclo8::half_sum(-1, 2 * m),
        3 => odd(m) * Cyclo8::half_sum(-1, 2 * a),
        4 => even(m) * Cyclo8::half_sum(1, 2 * m) * Cyclo8::half_sum(-1, m),
        5 => odd(m) * Cyclo8::half_sum(1, 2 * a) * Cyclo8::half_sum(-1, a),
        other => return Err(Error::UnsupportedSpin(other)),
    };
    match value.as_integer() {
        Some(0) => Ok(0),
        Some(1) => Ok(1),
        _ => Err(Error::NotIndicator(m)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(name: &str) -> ModelSpec {
        build_model(name, &ModelParams::default()).unwrap()
    }

    fn pair_set(m: &ModelSpec) -> Vec<(Vec<i8>, Vec<i8>)> {
        m.canonical_transitions()
    }

    fn expected_set(rows: &[(&[i8], &[i8])]) -> Vec<(Vec<i8>, Vec<i8>)> {
        let mut v: Vec<(Vec<i8>, Vec<i8>)> = rows
            .iter()
            .flat_map(|(a, b)| [(a.to_vec(), b.to_vec()), (b.to_vec(), a.to_vec())])
            .collect();
        v.sort();
        v
    }

    #[test]
    fn library_transition_sets() {
        assert_eq!(pair_set(&model("tjz1")), expected_set(&[(&[0, 1], &[1, 0]), (&[-1, 0], &[0, -1])]));
        assert_eq!(
            pair_set(&model("h3_1")),
            expected_set(&[
                (&[0, 1, 0], &[1, -1, 1]),
                (&[-1, 1, 0], &[0, -1, 1]),
                (&[0, 1, -1], &[1, -1, 0]),
                (&[-1, 1, -1], &[0, -1, 0]),
            ])
        );
        assert_eq!(
            pair_set(&model("tjz2")),
            expected_set(&[
                (&[0, 2], &[1, 1]),
                (&[1, 1], &[2, 0]),
                (&[-2, 0], &[-1, -1]),
                (&[-1, -1], &[0, -2]),
            ])
        );
        assert_eq!(model("h3_1").transition_count(), 4);
        assert_eq!(model("h4_1").transition_count(), 16);
        assert_eq!(model("h3_2_raw").transition_count(), 48);
        assert_eq!(model("h3_prime").transition_count(), 3);
    }

    #[test]
    fn tjz2_forbids_zero_pair_flip() {
        let m = model("tjz2");
        assert!(!m
            .canonical_transitions()
            .iter()
            .any(|(a, b)| (a == &[0, 0] && b == &[1, -1]) || (a == &[1, -1] && b == &[0, 0])));
    }

    #[test]
    fn every_model_is_hermitian_and_conserving() {
        for name in ModelName::ALL {
            let m = build(name, &ModelParams::default()).unwrap();
            for op in &m.operators {
                assert!(op.is_hermitian(), "{name}");
            }
        }
        for name in ["h3_1", "h4_1", "h_em", "h3_prime", "h3_2", "h3_2_raw"] {
            assert!(model(name).conserves_dipole(), "{name}");
        }
        for name in ["tjz1", "motzkin", "tjz2"] {
            assert!(!model(name).conserves_dipole(), "{name}");
        }
    }

    #[test]
    fn h_em_alpha() {
        assert!(build_model("h_em", &ModelParams { alpha: 0.0 }).is_err());
        let m = build_model("h_em", &ModelParams { alpha: -2.5 }).unwrap();
        assert_eq!(m.pairs().nth(1).unwrap().coefficient, -2.5);
        assert!(matches!(build_model("xyz", &ModelParams::default()), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn pv_verdicts() {
        for name in ["tjz1", "h3_1", "tjz2", "h3_2", "h_em", "h3_prime"] {
            assert!(pv_check_model(&model(name)).passed, "{name}");
        }
        let motzkin = pv_check_model(&model("motzkin"));
        assert!(!motzkin.passed);
        assert_eq!(motzkin.violations.len(), 1);
        let v = &motzkin.violations[0];
        assert_eq!((v.transition.input.as_slice(), v.transition.output.as_slice()), (&[1, -1][..], &[0, 0][..]));
        assert_eq!(v.input_extrema, (1, 0));
        assert_eq!(v.output_extrema, (0, 0));

        let h4 = pv_check_model(&model("h4_1"));
        let v = h4
            .violations
            .iter()
            .find(|v| v.transition.input == [0, 1, 1, -1])
            .expect("(0,1,1,-1) <-> (1,0,0,0) violates");
        assert_eq!(v.transition.output, vec![1, 0, 0, 0]);
        assert_eq!(v.input_extrema.0, 2);
        assert_eq!(v.output_extrema.0, 1);
    }

    #[test]
    fn raw_spin2_violations_are_projector_breaches() {
        let raw = model("h3_2_raw");
        let report = pv_check_model(&raw);
        let mut violating: Vec<_> = report.violations.iter().map(|v| v.transition.input.clone()).collect();
        let mut breaching: Vec<_> = raw
            .pairs()
            .filter(|t| !spin2_projector_filter(t))
            .map(|t| t.input.clone())
            .collect();
        violating.sort();
        breaching.sort();
        assert_eq!(violating, breaching);
        assert_eq!(violating.len(), 22);
    }

    #[test]
    fn projector_prime_matches_rule() {
        let a = Alphabet::Integer(2);
        for x in a.values() {
            for m in a.values() {
                for c in a.values() {
                    let rule = m != 0 || (x as i64) * (c as i64) > 0;
                    assert_eq!(projector_prime(&[x, m, c]) == 1, rule, "{x},{m},{c}");
                }
            }
        }
        assert_eq!(projector_prime(&[1, 0, 1]), 1);
        assert_eq!(projector_prime(&[-1, 0, 1]), 0);
        assert_eq!(projector_prime(&[0, 2, 0]), 1);
    }

    #[test]
    fn modular_projector_values() {
        assert_eq!(modular_projector(4, 1, 1), 1);
        assert_eq!(modular_projector(0, 1, 1), 0);
        assert_eq!(modular_projector(-2, 1, 1), 1);
        assert_eq!(modular_projector(7, 2, 2), 1);
    }

    #[test]
    fn appendix_c_examples() {
        assert_eq!(appendix_c_projector(1, 1).unwrap(), 1);
        assert_eq!(appendix_c_projector(1, 0).unwrap(), 0);
        assert_eq!(appendix_c_projector(2, 2).unwrap(), 1);
        assert_eq!(appendix_c_projector(2, 1).unwrap(), 0);
        assert_eq!(appendix_c_projector(2, 0).unwrap(), 0);
        assert_eq!(appendix_c_projector(4, 4).unwrap(), 1);
        assert_eq!(appendix_c_projector(4, 3).unwrap(), 0);
        assert!(matches!(appendix_c_projector(6, 0), Err(Error::UnsupportedSpin(6))));
    }

    #[test]
    fn appendix_c_is_the_edge_indicator_on_core_domain() {
        for two_s in 1..=5u32 {
            let s = two_s as i64;
            for m in -s..=s {
                let want = (m.abs() == s) as u8;
                assert_eq!(appendix_c_projector(two_s, m).unwrap(), want, "2S={two_s} m={m}");
            }
        }
    }

    #[test]
    fn model_file_round_trip() {
        let m = model("h_em");
        let json = serde_json::to_string(&m.to_model_file()).unwrap();
        let back = load_model_json(&json).unwrap();
        assert_eq!(back.canonical_transitions(), m.canonical_transitions());
        assert_eq!(back.alphabet, Alphabet::Integer(1));
        let empty = load_model_json(r#"{"F": 1, "q": 2, "transitions": []}"#).unwrap();
        assert!(pv_check_model(&empty).passed);
        let half = load_model_json(r#"{"F": "1/2", "q": 2, "transitions": [{"in": [1,-1], "out": [-1,1]}]}"#).unwrap();
        assert_eq!(half.alphabet, Alphabet::spin_half());
        assert!(load_model_json(r#"{"F": 1, "q": 2, "transitions": [{"in": [1,1], "out": [0,0]}]}"#).is_err());
        assert!(load_model_json(
            r#"{"F": 1, "q": 2, "transitions": [{"in": [1,0], "out": [0,1], "coeff": 1}, {"in": [0,1], "out": [1,0], "coeff": 2}]}"#
        )
        .is_err());
    }

    #[test]
    fn site_coefficients_must_be_positive() {
        assert!(model("h3_1").with_site_coefficients(vec![1.0, -1.0]).is_err());
        let m = model("h3_1").with_site_coefficients(vec![2.0]).unwrap();
        assert_eq!(m.site_coefficient(0), 2.0);
        assert_eq!(m.site_coefficient(5), 1.0);
    }
}
