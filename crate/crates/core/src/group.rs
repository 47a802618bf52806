//! Finite group arithmetic and enumeration: cyclic groups, products of
//! cyclics, and SL(2,Z_p). Elements carry a canonical index so matrices
//! built from the same spec are reproducible across runs and platforms.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on group order; paper-scale groups are tiny by comparison.
pub const MAX_GROUP_ORDER: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("group order {0} exceeds the cap of {MAX_GROUP_ORDER}")]
    OrderTooLarge(u64),
    #[error("cannot parse group spec '{0}'")]
    Parse(String),
}

/// Description of one of the supported finite groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum GroupSpec {
    Cyclic(u64),
    ProductOfCyclics(Vec<u64>),
    SpecialLinear2(u64),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl GroupSpec {
    pub fn validate(&self) -> Result<(), GroupError> {
        match self {
            GroupSpec::Cyclic(n) => {
                if *n < 2 {
                    return Err(GroupError::InvalidSpec(format!("cyclic modulus {n} < 2")));
                }
            }
            GroupSpec::ProductOfCyclics(ns) => {
                if ns.is_empty() {
                    return Err(GroupError::InvalidSpec("empty product".into()));
                }
                for n in ns {
                    if *n < 2 {
                        return Err(GroupError::InvalidSpec(format!("cyclic modulus {n} < 2")));
                    }
                }
            }
            GroupSpec::SpecialLinear2(p) => {
                if !is_prime(*p) {
                    return Err(GroupError::InvalidSpec(format!("{p} is not prime")));
                }
            }
        }
        let order = self.order_unchecked();
        if order > MAX_GROUP_ORDER {
            return Err(GroupError::OrderTooLarge(order));
        }
        Ok(())
    }

    fn order_unchecked(&self) -> u64 {
        match self {
            GroupSpec::Cyclic(n) => *n,
            GroupSpec::ProductOfCyclics(ns) => ns.iter().product(),
            GroupSpec::SpecialLinear2(p) => p * (p * p - 1),
        }
    }

    pub fn order(&self) -> u64 {
        self.order_unchecked()
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "cyclic({n})"),
            GroupSpec::ProductOfCyclics(ns) => {
                let parts: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
                write!(f, "product({})", parts.join(","))
            }
            GroupSpec::SpecialLinear2(p) => write!(f, "sl2({p})"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    /// Grammar: `cyclic(N)`, `product(N1,N2,...)`, `sl2(P)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| GroupError::Parse(s.into()))?;
        if !s.ends_with(')') {
            return Err(GroupError::Parse(s.into()));
        }
        let kind = &s[..open];
        let args = &s[open + 1..s.len() - 1];
        let nums: Result<Vec<u64>, _> = args
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| GroupError::Parse(s.into())))
            .collect();
        let nums = nums?;
        let spec = match (kind, nums.len()) {
            ("cyclic", 1) => GroupSpec::Cyclic(nums[0]),
            ("product", n) if n >= 1 => GroupSpec::ProductOfCyclics(nums),
            ("sl2", 1) => GroupSpec::SpecialLinear2(nums[0]),
            _ => return Err(GroupError::Parse(s.into())),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<GroupSpec> for String {
    fn from(s: GroupSpec) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for GroupSpec {
    type Error = GroupError;
    fn try_from(s: String) -> Result<Self, GroupError> {
        s.parse()
    }
}

/// Concrete representation of a group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Repr {
    /// Residue tuple for cyclic and product groups.
    Residues(Vec<u64>),
    /// Row-major 2x2 matrix entries `[a, b, c, d]` reduced mod p.
    Matrix([u64; 4]),
}

/// Element handle: a canonical index plus a fingerprint of the owning group.
/// Elements compare by canonical index; combining elements of different
/// groups panics.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupElement {
    gid: u64,
    idx: u32,
}

impl GroupElement {
    pub fn index(&self) -> usize {
        self.idx as usize
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.idx)
    }
}

enum Backend {
    /// Mixed-radix residues; index arithmetic is the group law.
    Residue { radices: Vec<u64> },
    /// Stored matrices with a lookup table and a precomputed inverse table.
    Sl2 {
        p: u64,
        elems: Vec<[u16; 4]>,
        lookup: HashMap<[u16; 4], u32>,
        inv: Vec<u32>,
    },
}

/// A fully constructed group: immutable after construction and safe to share
/// across threads.
pub struct Group {
    spec: GroupSpec,
    gid: u64,
    order: usize,
    backend: Backend,
    abelian: bool,
}

fn spec_fingerprint(spec: &GroupSpec) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    spec.hash(&mut h);
    h.finish()
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Self, GroupError> {
        spec.validate()?;
        let order = spec.order() as usize;
        let gid = spec_fingerprint(&spec);
        let backend = match &spec {
            GroupSpec::Cyclic(n) => Backend::Residue { radices: vec![*n] },
            GroupSpec::ProductOfCyclics(ns) => Backend::Residue { radices: ns.clone() },
            GroupSpec::SpecialLinear2(p) => Self::build_sl2(*p),
        };
        let mut g = Group {
            spec,
            gid,
            order,
            backend,
            abelian: true,
        };
        g.abelian = g.compute_abelian();
        Ok(g)
    }

    /// Enumerate SL(2,Z_p) with the identity first and the remaining
    /// matrices in lexicographic order of their entries.
    fn build_sl2(p: u64) -> Backend {
        let p16 = p as u16;
        let mut elems: Vec<[u16; 4]> = Vec::new();
        let identity = [1u16, 0, 0, 1];
        for a in 0..p16 {
            for b in 0..p16 {
                for c in 0..p16 {
                    for d in 0..p16 {
                        let det =
                            (a as u64 * d as u64 + p * p - b as u64 * c as u64) % p;
                        if det == 1 % p {
                            let m = [a, b, c, d];
                            if m != identity {
                                elems.push(m);
                            }
                        }
                    }
                }
            }
        }
        let mut all = Vec::with_capacity(elems.len() + 1);
        all.push(identity);
        all.extend(elems);
        let lookup: HashMap<[u16; 4], u32> = all
            .iter()
            .enumerate()
            .map(|(i, m)| (*m, i as u32))
            .collect();
        let inv: Vec<u32> = all
            .iter()
            .map(|m| {
                let im = sl2_inverse(*m, p16);
                lookup[&im]
            })
            .collect();
        Backend::Sl2 {
            p,
            elems: all,
            lookup,
            inv,
        }
    }

    fn compute_abelian(&self) -> bool {
        match &self.backend {
            Backend::Residue { .. } => true,
            Backend::Sl2 { .. } => {
                // Exhaustive commutator scan with early exit.
                for i in 0..self.order {
                    for j in (i + 1)..self.order {
                        let g = self.element(i);
                        let h = self.element(j);
                        if self.mul(g, h) != self.mul(h, g) {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { gid: self.gid, idx: 0 }
    }

    pub fn element(&self, index: usize) -> GroupElement {
        assert!(index < self.order, "element index {} out of range", index);
        GroupElement {
            gid: self.gid,
            idx: index as u32,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(move |i| self.element(i))
    }

    fn check(&self, g: GroupElement) {
        assert!(
            g.gid == self.gid,
            "element belongs to a different group (mixed-group operands)"
        );
        assert!((g.idx as usize) < self.order, "stale element index");
    }

    pub fn repr(&self, g: GroupElement) -> Repr {
        self.check(g);
        match &self.backend {
            Backend::Residue { radices } => {
                Repr::Residues(decode_residues(g.idx as u64, radices))
            }
            Backend::Sl2 { elems, .. } => {
                let m = elems[g.index()];
                Repr::Matrix([m[0] as u64, m[1] as u64, m[2] as u64, m[3] as u64])
            }
        }
    }

    /// Look up an element by representation (residues reduced or not;
    /// matrices must be reduced mod p and have determinant 1).
    pub fn element_from_repr(&self, r: &Repr) -> Option<GroupElement> {
        match (&self.backend, r) {
            (Backend::Residue { radices }, Repr::Residues(vals)) => {
                if vals.len() != radices.len() {
                    return None;
                }
                let reduced: Vec<u64> =
                    vals.iter().zip(radices).map(|(v, n)| v % n).collect();
                Some(self.element(encode_residues(&reduced, radices) as usize))
            }
            (Backend::Sl2 { p, lookup, .. }, Repr::Matrix(m)) => {
                let reduced = [
                    (m[0] % p) as u16,
                    (m[1] % p) as u16,
                    (m[2] % p) as u16,
                    (m[3] % p) as u16,
                ];
                lookup.get(&reduced).map(|&i| self.element(i as usize))
            }
            _ => None,
        }
    }

    pub fn mul(&self, g: GroupElement, h: GroupElement) -> GroupElement {
        self.check(g);
        self.check(h);
        let idx = match &self.backend {
            Backend::Residue { radices } => {
                let a = decode_residues(g.idx as u64, radices);
                let b = decode_residues(h.idx as u64, radices);
                let sum: Vec<u64> = a
                    .iter()
                    .zip(&b)
                    .zip(radices)
                    .map(|((x, y), n)| (x + y) % n)
                    .collect();
                encode_residues(&sum, radices) as u32
            }
            Backend::Sl2 { p, elems, lookup, .. } => {
                let a = elems[g.index()];
                let b = elems[h.index()];
                let prod = sl2_mul(a, b, *p as u16);
                lookup[&prod]
            }
        };
        GroupElement { gid: self.gid, idx }
    }

    pub fn inv(&self, g: GroupElement) -> GroupElement {
        self.check(g);
        let idx = match &self.backend {
            Backend::Residue { radices } => {
                let a = decode_residues(g.idx as u64, radices);
                let neg: Vec<u64> = a.iter().zip(radices).map(|(x, n)| (n - x) % n).collect();
                encode_residues(&neg, radices) as u32
            }
            Backend::Sl2 { inv, .. } => inv[g.index()],
        };
        GroupElement { gid: self.gid, idx }
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    /// True iff conjugation by `h` maps the set `s` onto itself.
    pub fn normalizes(&self, h: GroupElement, s: &[GroupElement]) -> bool {
        assert!(!s.is_empty(), "normalizes needs a non-empty set");
        let set: std::collections::HashSet<u32> = s.iter().map(|g| {
            self.check(*g);
            g.idx
        }).collect();
        let hinv = self.inv(h);
        s.iter().all(|&g| {
            let conj = self.mul(self.mul(hinv, g), h);
            set.contains(&conj.idx)
        })
    }
}

fn decode_residues(mut idx: u64, radices: &[u64]) -> Vec<u64> {
    // Row-major: the last coordinate varies fastest.
    let mut out = vec![0u64; radices.len()];
    for i in (0..radices.len()).rev() {
        out[i] = idx % radices[i];
        idx /= radices[i];
    }
    out
}

fn encode_residues(vals: &[u64], radices: &[u64]) -> u64 {
    let mut idx = 0u64;
    for (v, n) in vals.iter().zip(radices) {
        idx = idx * n + v;
    }
    idx
}

fn sl2_mul(a: [u16; 4], b: [u16; 4], p: u16) -> [u16; 4] {
    let (p, a, b) = (
        p as u64,
        [a[0] as u64, a[1] as u64, a[2] as u64, a[3] as u64],
        [b[0] as u64, b[1] as u64, b[2] as u64, b[3] as u64],
    );
    [
        ((a[0] * b[0] + a[1] * b[2]) % p) as u16,
        ((a[0] * b[1] + a[1] * b[3]) % p) as u16,
        ((a[2] * b[0] + a[3] * b[2]) % p) as u16,
        ((a[2] * b[1] + a[3] * b[3]) % p) as u16,
    ]
}

/// Inverse by the adjugate formula, valid since det = 1.
fn sl2_inverse(m: [u16; 4], p: u16) -> [u16; 4] {
    let p64 = p as u64;
    [
        m[3],
        ((p64 - m[1] as u64) % p64) as u16,
        ((p64 - m[2] as u64) % p64) as u16,
        m[0],
    ]
}
