//! Finite groups as dense multiplication tables.
//!
//! Elements are the indices `0..order`, the identity is always index 0 and
//! element names are cosmetic.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which constructor produced a table. Irrep catalogs are only shipped for
/// the built-in families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum GroupKind {
    Cyclic(usize),
    Dihedral(usize),
    KleinFour,
    Product,
    Custom,
}

#[derive(Debug, PartialEq, Eq)]
struct TableData {
    order: usize,
    mult: Vec<usize>,
    inverse: Vec<usize>,
    names: Vec<String>,
    kind: GroupKind,
}

/// A finite group given by its multiplication table. Cheap to clone.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupTable {
    inner: Arc<TableData>,
}

impl fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupTable")
            .field("order", &self.order())
            .field("kind", &self.kind())
            .field("names", &self.inner.names)
            .finish()
    }
}

impl GroupTable {
    pub const IDENTITY: usize = 0;

    /// Builds a table and checks every group axiom.
    pub fn from_table(rows: Vec<Vec<usize>>, names: Option<Vec<String>>) -> Result<Self> {
        let table = Self::from_table_unchecked(rows, names, GroupKind::Custom)?;
        let report = validate_group_table(&table);
        if !report.passed() {
            return Err(Error::InvalidGroup(report.summary()));
        }
        Ok(table)
    }

    /// Builds a table without checking the axioms, only the shape. Inverses
    /// are looked up best-effort (missing ones point at the identity) so that
    /// [`validate_group_table`] can report on broken tables.
    pub fn from_table_unchecked(
        rows: Vec<Vec<usize>>,
        names: Option<Vec<String>>,
        kind: GroupKind,
    ) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        let mut mult = Vec::with_capacity(order * order);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidGroup(format!(
                    "row {r} has {} entries, expected {order}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= order) {
                return Err(Error::InvalidGroup(format!(
                    "row {r} references element {bad} outside 0..{order}"
                )));
            }
            mult.extend_from_slice(row);
        }
        let names = match names {
            Some(n) if n.len() != order => {
                return Err(Error::InvalidGroup(format!(
                    "{} names for {order} elements",
                    n.len()
                )))
            }
            Some(n) => n,
            None => (0..order).map(|g| format!("g{g}")).collect(),
        };
        let inverse = (0..order)
            .map(|g| {
                (0..order)
                    .find(|&h| mult[g * order + h] == Self::IDENTITY)
                    .unwrap_or(Self::IDENTITY)
            })
            .collect();
        Ok(Self {
            inner: Arc::new(TableData {
                order,
                mult,
                inverse,
                names,
                kind,
            }),
        })
    }

    fn from_fn(
        order: usize,
        kind: GroupKind,
        names: Vec<String>,
        op: impl Fn(usize, usize) -> usize,
    ) -> Self {
        let rows = (0..order)
            .map(|a| (0..order).map(|b| op(a, b)).collect())
            .collect();
        Self::from_table_unchecked(rows, Some(names), kind).expect("constructor tables are well formed")
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.inner.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.inner.mult[a * self.inner.order + b]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inner.inverse[g]
    }

    #[inline]
    pub fn identity(&self) -> usize {
        Self::IDENTITY
    }

    pub fn name(&self, g: usize) -> &str {
        &self.inner.names[g]
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.inner.names.iter().position(|n| n == name)
    }

    pub fn kind(&self) -> GroupKind {
        self.inner.kind
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.inner
            .mult
            .chunks(self.inner.order)
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inner.inverse
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }
}

/// ℤ_n with `a·b = (a + b) mod n`.
pub fn build_cyclic(n: usize) -> Result<GroupTable> {
    if n == 0 {
        return Err(Error::InvalidParameter("cyclic group order must be at least 1".into()));
    }
    let names = (0..n)
        .map(|k| match k {
            0 => "e".to_string(),
            1 => "a".to_string(),
            _ => format!("a^{k}"),
        })
        .collect();
    Ok(GroupTable::from_fn(n, GroupKind::Cyclic(n), names, |a, b| (a + b) % n))
}

/// ℤ₂ × ℤ₂ as `{e, x, y, z}` with `x·y = z`, `y·z = x`, `z·x = y`.
pub fn build_klein_four() -> GroupTable {
    // bit encoding: x = 01, y = 10, z = 11
    let names = ["e", "x", "y", "z"].map(String::from).to_vec();
    GroupTable::from_fn(4, GroupKind::KleinFour, names, |a, b| a ^ b)
}

/// The dihedral group of order `2n`, `⟨r, s | rⁿ = s² = e, s r s = r⁻¹⟩`.
///
/// Index `k < n` is the rotation `rᵏ`; index `n + j` is the reflection
/// `rʲ s`. For `n = 3` the reflections are labelled `s_A, s_B, s_C`, in which
/// case `s_A · r = s_C` and `r · s_A = s_B`.
pub fn build_dihedral(n: usize) -> Result<GroupTable> {
    if n == 0 {
        return Err(Error::InvalidParameter("dihedral parameter must be at least 1".into()));
    }
    let decode = |g: usize| if g < n { (g, 0usize) } else { (g - n, 1usize) };
    // (rᵃ sᶠ)(rᵇ sᵍ) = r^{a + (-1)^f b} s^{f+g}
    let op = |x: usize, y: usize| {
        let (a, f) = decode(x);
        let (b, g) = decode(y);
        let rot = if f == 0 { (a + b) % n } else { (a + n - b) % n };
        rot + n * ((f + g) % 2)
    };
    let mut names: Vec<String> = (0..n)
        .map(|k| match k {
            0 => "e".to_string(),
            1 => "r".to_string(),
            _ => format!("r^{k}"),
        })
        .collect();
    if n == 3 {
        names.extend(["s_A", "s_B", "s_C"].map(String::from));
    } else {
        names.extend((0..n).map(|j| match j {
            0 => "s".to_string(),
            1 => "r s".to_string(),
            _ => format!("r^{j} s"),
        }));
    }
    Ok(GroupTable::from_fn(2 * n, GroupKind::Dihedral(n), names, op))
}

/// `A × B` with lexicographic indexing `(i, j) ↦ i·|B| + j`.
pub fn build_direct_product(a: &GroupTable, b: &GroupTable) -> GroupTable {
    let nb = b.order();
    let names = a
        .names()
        .iter()
        .flat_map(|x| b.names().iter().map(move |y| format!("({x},{y})")))
        .collect();
    GroupTable::from_fn(a.order() * nb, GroupKind::Product, names, |x, y| {
        a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub name: String,
    pub passed: bool,
    /// First counterexample, as element indices.
    pub witness: Option<Vec<usize>>,
    pub detail: Option<String>,
}

impl AxiomCheck {
    fn pass(name: &str) -> Self {
        Self {
            name: name.into(),
            passed: true,
            witness: None,
            detail: None,
        }
    }

    fn fail(name: &str, witness: Vec<usize>, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: false,
            witness: Some(witness),
            detail: Some(detail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupValidation {
    pub checks: Vec<AxiomCheck>,
}

impl GroupValidation {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary(&self) -> String {
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail.as_deref().unwrap_or("failed")))
            .collect();
        if failed.is_empty() {
            "all group axioms hold".into()
        } else {
            failed.join("; ")
        }
    }
}

/// Checks the Latin-square property, identity, inverses and associativity,
/// reporting the first counterexample of each.
pub fn validate_group_table(t: &GroupTable) -> GroupValidation {
    let n = t.order();
    let e = GroupTable::IDENTITY;
    let mut checks = Vec::with_capacity(4);

    let latin = (|| {
        for r in 0..n {
            let mut seen = vec![false; n];
            for c in 0..n {
                let x = t.mul(r, c);
                if seen[x] {
                    return AxiomCheck::fail("latin_square", vec![r, c], format!("row {r} repeats element {x}"));
                }
                seen[x] = true;
            }
        }
        for c in 0..n {
            let mut seen = vec![false; n];
            for r in 0..n {
                let x = t.mul(r, c);
                if seen[x] {
                    return AxiomCheck::fail("latin_square", vec![r, c], format!("column {c} repeats element {x}"));
                }
                seen[x] = true;
            }
        }
        AxiomCheck::pass("latin_square")
    })();
    checks.push(latin);

    let identity = (0..n)
        .find(|&g| t.mul(e, g) != g || t.mul(g, e) != g)
        .map(|g| AxiomCheck::fail("identity", vec![g], format!("index 0 does not act as identity on {g}")))
        .unwrap_or_else(|| AxiomCheck::pass("identity"));
    checks.push(identity);

    let inverses = (0..n)
        .find(|&g| {
            let h = t.inv(g);
            t.mul(g, h) != e || t.mul(h, g) != e
        })
        .map(|g| AxiomCheck::fail("inverses", vec![g], format!("element {g} has no two-sided inverse")))
        .unwrap_or_else(|| AxiomCheck::pass("inverses"));
    checks.push(inverses);

    let mut assoc = AxiomCheck::pass("associativity");
    'outer: for a in 0..n {
        for b in 0..n {
            let ab = t.mul(a, b);
            for c in 0..n {
                if t.mul(ab, c) != t.mul(a, t.mul(b, c)) {
                    assoc = AxiomCheck::fail(
                        "associativity",
                        vec![a, b, c],
                        format!("({a}·{b})·{c} ≠ {a}·({b}·{c})"),
                    );
                    break 'outer;
                }
            }
        }
    }
    checks.push(assoc);

    GroupValidation { checks }
}

/// Brute-force isomorphism search by permutations fixing the identity.
/// Only meant for small groups in tests and diagnostics.
pub fn find_isomorphism(a: &GroupTable, b: &GroupTable) -> Option<Vec<usize>> {
    let n = a.order();
    if n != b.order() || n > 9 {
        return None;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    fn search(k: usize, perm: &mut Vec<usize>, a: &GroupTable, b: &GroupTable) -> bool {
        let n = perm.len();
        if k == n {
            return (0..n).all(|x| (0..n).all(|y| perm[a.mul(x, y)] == b.mul(perm[x], perm[y])));
        }
        for i in k..n {
            perm.swap(k, i);
            if search(k + 1, perm, a, b) {
                return true;
            }
            perm.swap(k, i);
        }
        false
    }
    // the identity must map to the identity
    if search(1, &mut perm, a, b) {
        Some(perm)
    } else {
        None
    }
}
