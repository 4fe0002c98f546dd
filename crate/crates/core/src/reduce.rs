//! Reduction of form sets up to integral linear changes of variables.
//!
//! Orbits are explored breadth first over four generators of `GL_3(Z)`,
//! taking the shear only while the coefficient norm stays within a bound.
//! Every member remembers the word that reaches it, so merges can be
//! replayed and audited.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::algebra::{exponents, monomial_count, TernaryForm, TransformElement};
use crate::error::{Error, Result};
use crate::search::CurveRecord;

/// Largest bound accepted by the orbit search; keeps every image in `i64`.
pub const MAX_BOUND: i64 = 1 << 40;

/// `A₁: x ← x+y`, `A₂: (x,y) ← (y,−x)`, `A₃: x ← −x`, `A₄: (x,y,z) ← (−z,x,y)`.
pub fn generators() -> [TransformElement; 4] {
    let m = |rows| TransformElement::new(rows).expect("unimodular");
    [
        m([[1, 1, 0], [0, 1, 0], [0, 0, 1]]),
        m([[0, 1, 0], [-1, 0, 0], [0, 0, 1]]),
        m([[-1, 0, 0], [0, 1, 0], [0, 0, 1]]),
        m([[0, 0, -1], [1, 0, 0], [0, 1, 0]]),
    ]
}

/// `max |a_u|`.
pub fn norm(coeffs: &[i64]) -> i64 {
    coeffs.iter().map(|c| c.abs()).max().unwrap_or(0)
}

/// A generator as a sparse linear map on coefficient vectors.
#[derive(Clone, Debug)]
struct CoeffMap {
    /// `rows[v]` lists `(u, k)` with `image[v] = Σ k·coeffs[u]`.
    rows: Vec<Vec<(usize, i64)>>,
}

impl CoeffMap {
    fn new(degree: u32, t: &TransformElement) -> Self {
        let n = monomial_count(degree);
        let mut rows = vec![Vec::new(); n];
        for (u, e) in exponents(degree).iter().enumerate() {
            let img = TernaryForm::monomial(*e, 1.into()).apply_matrix(t);
            for (v, k) in img.coeffs().iter().enumerate() {
                let k = k.to_i64().expect("binomial coefficients fit");
                if k != 0 {
                    rows[v].push((u, k));
                }
            }
        }
        CoeffMap { rows }
    }

    fn apply(&self, c: &[i64], out: &mut [i64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|&(u, k)| k * c[u]).sum();
        }
    }
}

/// The generators compiled for one degree.
#[derive(Clone, Debug)]
pub struct GeneratorAction {
    degree: u32,
    maps: [CoeffMap; 4],
}

impl GeneratorAction {
    pub fn new(degree: u32) -> Result<Self> {
        if degree == 0 || degree > 16 {
            return Err(Error::InvalidDegree(degree as i64));
        }
        let g = generators();
        Ok(GeneratorAction {
            degree,
            maps: std::array::from_fn(|i| CoeffMap::new(degree, &g[i])),
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Image of `coeffs` under generator `A_{i+1}`.
    pub fn apply(&self, i: usize, coeffs: &[i64]) -> Vec<i64> {
        let mut out = vec![0; coeffs.len()];
        self.maps[i].apply(coeffs, &mut out);
        out
    }
}

/// Generators applied left to right, optionally followed by negation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    /// Generator indices `0..4` (for `A₁..A₄`) in order of application.
    pub steps: Vec<u8>,
    pub negate: bool,
}

impl Word {
    pub fn apply(&self, action: &GeneratorAction, coeffs: &[i64]) -> Vec<i64> {
        let mut c = coeffs.to_vec();
        for &s in &self.steps {
            c = action.apply(s as usize, &c);
        }
        if self.negate {
            c.iter_mut().for_each(|x| *x = -*x);
        }
        c
    }

    /// The transform with `W(f) = ±f∘M`, together with the sign.
    pub fn matrix(&self) -> (TransformElement, bool) {
        let g = generators();
        // f ↦ f∘A then f∘A ↦ f∘A∘B, so later steps multiply on the right
        let m = self
            .steps
            .iter()
            .fold(TransformElement::identity(), |acc, &s| acc.mul(&g[s as usize]));
        (m, self.negate)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.steps.iter().map(|s| format!("A{}", s + 1)).collect();
        if self.negate {
            parts.push("N".into());
        }
        if parts.is_empty() {
            f.write_str("I")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = Word::default();
        for tok in s.split_whitespace() {
            match tok {
                "I" => {}
                "N" if !w.negate => w.negate = true,
                "A1" | "A2" | "A3" | "A4" if !w.negate => w.steps.push(tok.as_bytes()[1] - b'1'),
                _ => return Err(Error::parse("word", format!("unexpected token `{tok}` in `{s}`"))),
            }
        }
        Ok(w)
    }
}

struct Node {
    coeffs: Vec<i64>,
    parent: u32,
    generator: u8,
}

/// `U ∪ −U` for the set `U` reached from `f` by the bounded search.
pub struct OrbitSet {
    degree: u32,
    bound: i64,
    /// `U` in discovery order; `nodes[0]` is the base form.
    nodes: Vec<Node>,
    index: HashMap<Vec<i64>, u32>,
}

impl OrbitSet {
    pub fn base(&self) -> &[i64] {
        &self.nodes[0].coeffs
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of members, counting `g` and `−g` separately.
    pub fn len(&self) -> usize {
        let zero_sym = self.nodes.iter().filter(|n| self.index.contains_key(&neg(&n.coeffs))).count();
        2 * self.nodes.len() - zero_sym
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, coeffs: &[i64]) -> bool {
        self.index.contains_key(coeffs) || self.index.contains_key(&neg(coeffs))
    }

    /// Every member, sorted.
    pub fn members(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = self
            .nodes
            .iter()
            .flat_map(|n| [n.coeffs.clone(), neg(&n.coeffs)])
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// A word taking the base form to `coeffs`.
    pub fn word_to(&self, coeffs: &[i64]) -> Option<Word> {
        let (mut i, negate) = match self.index.get(coeffs) {
            Some(&i) => (i, false),
            None => (*self.index.get(&neg(coeffs))?, true),
        };
        let mut steps = Vec::new();
        while i != 0 {
            let n = &self.nodes[i as usize];
            steps.push(n.generator);
            i = n.parent;
        }
        steps.reverse();
        Some(Word { steps, negate })
    }
}

fn neg(c: &[i64]) -> Vec<i64> {
    c.iter().map(|x| -x).collect()
}

/// Breadth-first enumeration of the forms reachable from `f` through
/// `A₁..A₄`, applying `A₁` only when the image has norm at most `bound`;
/// the result is closed under negation.
pub fn bounded_class_enum(action: &GeneratorAction, f: &[i64], bound: i64) -> Result<OrbitSet> {
    let n = monomial_count(action.degree);
    if f.len() != n {
        return Err(Error::CoefficientCount {
            expected: n,
            got: f.len(),
        });
    }
    if !(norm(f)..=MAX_BOUND).contains(&bound) {
        return Err(Error::range("orbit bound", bound, format!("{}..={MAX_BOUND}", norm(f))));
    }
    let mut nodes = vec![Node {
        coeffs: f.to_vec(),
        parent: 0,
        generator: 0,
    }];
    let mut index = HashMap::from([(f.to_vec(), 0u32)]);
    let mut frontier = 0..1;
    let mut img = vec![0; n];
    while !frontier.is_empty() {
        let start = nodes.len();
        for g in frontier.clone() {
            for (k, map) in action.maps.iter().enumerate() {
                map.apply(&nodes[g].coeffs, &mut img);
                if k == 0 && norm(&img) > bound {
                    continue;
                }
                if !index.contains_key(&img) {
                    let id = nodes.len() as u32;
                    index.insert(img.clone(), id);
                    nodes.push(Node {
                        coeffs: img.clone(),
                        parent: g as u32,
                        generator: k as u8,
                    });
                }
            }
        }
        frontier = start..nodes.len();
    }
    Ok(OrbitSet {
        degree: action.degree,
        bound,
        nodes,
        index,
    })
}

/// [`bounded_class_enum`] for a form given with arbitrary-precision
/// coefficients.
pub fn bounded_class_enum_form(f: &TernaryForm, bound: i64) -> Result<OrbitSet> {
    let coeffs = f
        .to_i64()
        .ok_or_else(|| Error::range("orbit bound", f.norm(), format!("..={MAX_BOUND}")))?;
    bounded_class_enum(&GeneratorAction::new(f.degree())?, &coeffs, bound)
}

/// A record removed by [`dedup`] and the witness of its merge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Merge {
    pub removed: CurveRecord,
    pub kept: CurveRecord,
    /// `word.apply(kept) == removed`.
    pub word: Word,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DedupOutcome {
    /// Retained records in canonical order.
    pub kept: Vec<CurveRecord>,
    pub merges: Vec<Merge>,
    /// Records whose own norm exceeds the bound; they are kept but their
    /// orbits are not explored.
    pub over_bound: usize,
}

/// Removes every record equivalent to an earlier one (in `(|Δ|, coeffs)`
/// order) through a word found by [`bounded_class_enum`] at `bound`.
pub fn dedup(records: Vec<CurveRecord>, bound: i64) -> Result<DedupOutcome> {
    let records = crate::search::merge_records(records);
    let Some(first) = records.first() else {
        return Ok(DedupOutcome::default());
    };
    let degree = first
        .degree()
        .ok_or_else(|| Error::parse("records", "unsupported coefficient count"))?;
    if records.iter().any(|r| r.degree() != Some(degree)) {
        return Err(Error::DegreeMismatch("records mix cubic and quartic forms".into()));
    }
    let action = GeneratorAction::new(degree)?;

    let mut buckets: Vec<&[CurveRecord]> = Vec::new();
    let mut rest = records.as_slice();
    while let Some(head) = rest.first() {
        let len = rest.iter().take_while(|r| r.disc.abs() == head.disc.abs()).count();
        buckets.push(&rest[..len]);
        rest = &rest[len..];
    }
    let parts = buckets
        .par_iter()
        .map(|b| dedup_bucket(&action, b, bound))
        .collect::<Result<Vec<_>>>()?;
    let mut out = DedupOutcome::default();
    for p in parts {
        out.kept.extend(p.kept);
        out.merges.extend(p.merges);
        out.over_bound += p.over_bound;
    }
    Ok(out)
}

fn dedup_bucket(action: &GeneratorAction, bucket: &[CurveRecord], bound: i64) -> Result<DedupOutcome> {
    let mut alive = vec![true; bucket.len()];
    let mut out = DedupOutcome::default();
    for i in 0..bucket.len() {
        if !alive[i] {
            continue;
        }
        let f = &bucket[i];
        out.kept.push(f.clone());
        if norm(&f.coeffs) > bound {
            out.over_bound += 1;
            continue;
        }
        let orbit = bounded_class_enum(action, &f.coeffs, bound)?;
        for j in i + 1..bucket.len() {
            if !alive[j] {
                continue;
            }
            if let Some(word) = orbit.word_to(&bucket[j].coeffs) {
                if word.apply(action, &f.coeffs) != bucket[j].coeffs {
                    return Err(Error::Internal(format!("witness {word} does not replay")));
                }
                alive[j] = false;
                out.merges.push(Merge {
                    removed: bucket[j].clone(),
                    kept: f.clone(),
                    word,
                });
            }
        }
    }
    Ok(out)
}
