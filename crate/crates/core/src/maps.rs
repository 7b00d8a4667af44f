//! Algebraic regular maps `M(G; r, t, l)`.
//!
//! Flags are the elements of `G`; `r`, `t`, `l` act by left multiplication.
//! Vertices, edges and faces are the orbits of `<r, t>`, `<t, l>` and
//! `<r, l>`, i.e. their right cosets.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{self, Family, FiniteGroup, GroupElement, GroupError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("{0} is not an involution")]
    NotInvolution(&'static str),
    #[error("t and l do not commute")]
    NotCommuting,
    #[error("the triple does not generate the group")]
    NotGenerating,
    #[error("degenerate quotient: the image of {0} is trivial")]
    Degenerate(&'static str),
    #[error("Euler characteristic formula is not integral: {num}/{den}")]
    NonIntegral { num: i128, den: i128 },
    #[error("even-word subgroup has index {0}")]
    EvenWordIndex(u64),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapWarning {
    /// `t = l`, so edge orbits have size 2 rather than 4.
    EqualEdgeInvolutions,
    SmallType { x: u64, y: u64 },
}

impl fmt::Display for MapWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EqualEdgeInvolutions => write!(f, "t = l: edge orbits are degenerate"),
            Self::SmallType { x, y } => write!(f, "degenerate type ({x},{y})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapInvariants {
    pub x: u64,
    pub y: u64,
    pub vertices: u64,
    pub edges: u64,
    pub faces: u64,
    pub chi: i64,
    pub orientable: bool,
    pub genus: u64,
}

#[derive(Clone, Debug)]
pub struct AlgebraicMap {
    group: Arc<FiniteGroup>,
    r: GroupElement,
    t: GroupElement,
    l: GroupElement,
    invariants: MapInvariants,
    warnings: Vec<MapWarning>,
}

/// Normal subgroup whose quotient reproduces a base map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverWitness {
    pub generator: GroupElement,
    pub order: u64,
}

pub fn validate(
    group: Arc<FiniteGroup>,
    r: GroupElement,
    t: GroupElement,
    l: GroupElement,
) -> Result<AlgebraicMap, MapError> {
    validate_with(group, r, t, l, true)
}

/// As [`validate`], choosing whether projective generation tests may stop at
/// the subgroup-order bound.
pub fn validate_with(
    group: Arc<FiniteGroup>,
    r: GroupElement,
    t: GroupElement,
    l: GroupElement,
    dickson: bool,
) -> Result<AlgebraicMap, MapError> {
    for (name, g) in [("r", &r), ("t", &t), ("l", &l)] {
        if !group.contains(g) {
            return Err(GroupError::FamilyMismatch {
                element: g.to_string(),
                group: group.name().to_string(),
            }
            .into());
        }
        if !group.is_involution(g) {
            return Err(MapError::NotInvolution(name));
        }
    }
    if group.mul(&t, &l) != group.mul(&l, &t) {
        return Err(MapError::NotCommuting);
    }
    if !group.generates_with(&[r.clone(), t.clone(), l.clone()], dickson) {
        return Err(MapError::NotGenerating);
    }
    let x = group.element_order(&group.mul(&r, &t));
    let y = group.element_order(&group.mul(&r, &l));
    let mut warnings = Vec::new();
    if t == l {
        warnings.push(MapWarning::EqualEdgeInvolutions);
    }
    if x < 3 || y < 3 {
        warnings.push(MapWarning::SmallType { x, y });
    }
    let order = group.order();
    let vertices = order / group.subgroup_order(&[r.clone(), t.clone()]);
    let edges = order / group.subgroup_order(&[t.clone(), l.clone()]);
    let faces = order / group.subgroup_order(&[r.clone(), l.clone()]);
    let chi = vertices as i64 + faces as i64 - edges as i64;
    let even = group.subgroup_order(&[group.mul(&t, &r), group.mul(&r, &l)]);
    let orientable = match (order % even, order / even) {
        (0, 1) => false,
        (0, 2) => true,
        (_, index) => return Err(MapError::EvenWordIndex(index)),
    };
    let genus = if orientable { (2 - chi) / 2 } else { 2 - chi };
    Ok(AlgebraicMap {
        group,
        r,
        t,
        l,
        invariants: MapInvariants {
            x,
            y,
            vertices,
            edges,
            faces,
            chi,
            orientable,
            genus: genus as u64,
        },
        warnings,
    })
}

/// `-|G| (xy - 2x - 2y) / (4xy)` as an exact integer.
pub fn formula_chi(order: u64, x: u64, y: u64) -> Result<i64, MapError> {
    let (g, x, y) = (order as i128, x as i128, y as i128);
    let num = -g * (x * y - 2 * x - 2 * y);
    let den = 4 * x * y;
    if num % den != 0 {
        return Err(MapError::NonIntegral { num, den });
    }
    Ok((num / den) as i64)
}

impl AlgebraicMap {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn r(&self) -> &GroupElement {
        &self.r
    }

    pub fn t(&self) -> &GroupElement {
        &self.t
    }

    pub fn l(&self) -> &GroupElement {
        &self.l
    }

    pub fn triple(&self) -> [GroupElement; 3] {
        [self.r.clone(), self.t.clone(), self.l.clone()]
    }

    pub fn warnings(&self) -> &[MapWarning] {
        &self.warnings
    }

    /// `(|rt|, |rl|)`.
    pub fn map_type(&self) -> (u64, u64) {
        (self.invariants.x, self.invariants.y)
    }

    pub fn invariants(&self) -> &MapInvariants {
        &self.invariants
    }

    pub fn euler_characteristic(&self) -> Result<i64, MapError> {
        formula_chi(self.group.order(), self.invariants.x, self.invariants.y)
    }

    pub fn euler_characteristic_by_orbits(&self) -> i64 {
        self.invariants.chi
    }

    pub fn is_orientable(&self) -> bool {
        self.invariants.orientable
    }

    pub fn genus(&self) -> u64 {
        self.invariants.genus
    }

    /// Index of the even-word subgroup `<tr, rl>`.
    pub fn even_word_index(&self) -> u64 {
        if self.invariants.orientable {
            2
        } else {
            1
        }
    }

    /// Swaps `t` and `l`.
    pub fn dual(&self) -> AlgebraicMap {
        let inv = &self.invariants;
        AlgebraicMap {
            group: self.group.clone(),
            r: self.r.clone(),
            t: self.l.clone(),
            l: self.t.clone(),
            invariants: MapInvariants {
                x: inv.y,
                y: inv.x,
                vertices: inv.faces,
                faces: inv.vertices,
                ..inv.clone()
            },
            warnings: self
                .warnings
                .iter()
                .map(|w| match w {
                    MapWarning::SmallType { x, y } => MapWarning::SmallType { x: *y, y: *x },
                    other => other.clone(),
                })
                .collect(),
        }
    }

    /// Whether `<rt> ∩ <rl>` is trivial.
    pub fn rotation_subgroups_meet_trivially(&self) -> bool {
        let g = &self.group;
        let rt = g.mul(&self.r, &self.t);
        let rl = g.mul(&self.r, &self.l);
        let a: HashSet<GroupElement> = (0..self.invariants.x).map(|k| g.pow(&rt, k)).collect();
        (1..self.invariants.y).all(|k| !a.contains(&g.pow(&rl, k)))
    }

    pub fn is_isomorphic(&self, other: &AlgebraicMap) -> Result<bool, MapError> {
        Ok(groups::triple_isomorphic(
            &self.group,
            &self.triple(),
            &other.group,
            &other.triple(),
        )?)
    }

    /// Induced map on `G/N`.
    pub fn quotient(&self, normal: &[GroupElement]) -> Result<AlgebraicMap, MapError> {
        let q = FiniteGroup::quotient(self.group.clone(), normal)?;
        let image = |g: &GroupElement| match q.family() {
            Family::Quotient { reps, .. } => reps[g].clone(),
            _ => unreachable!("quotient family"),
        };
        let (r, t, l) = (image(&self.r), image(&self.t), image(&self.l));
        for (name, g) in [("r", &r), ("t", &t), ("l", &l)] {
            if q.is_identity(g) {
                return Err(MapError::Degenerate(name));
            }
        }
        validate(Arc::new(q), r, t, l)
    }

    /// Looks for a normal subgroup `N` with `M/N` isomorphic to `base`.
    /// Candidates are normal closures of single elements whose order divides
    /// `|G| / |base group|`.
    pub fn is_regular_cover(&self, base: &AlgebraicMap) -> Result<Option<CoverWitness>, MapError> {
        let g = &self.group;
        let (big, small) = (g.order(), base.group.order());
        if big % small != 0 {
            return Ok(None);
        }
        let index = big / small;
        if index == 1 {
            return Ok(self.is_isomorphic(base)?.then(|| CoverWitness {
                generator: g.identity(),
                order: 1,
            }));
        }
        let elements = g.elements()?;
        let mut processed: HashSet<GroupElement> = HashSet::new();
        let mut tried: HashSet<Vec<GroupElement>> = HashSet::new();
        for x in elements {
            if processed.contains(x) || index % g.element_order(x) != 0 || g.is_identity(x) {
                continue;
            }
            for h in elements {
                processed.insert(g.conjugate(x, h));
            }
            let n = g.normal_closure(x)?;
            if n.len() as u64 != index {
                continue;
            }
            let mut key: Vec<GroupElement> = n.into_iter().collect();
            key.sort();
            if !tried.insert(key.clone()) {
                continue;
            }
            match self.quotient(&key) {
                Ok(q) => {
                    if q.is_isomorphic(base)? {
                        return Ok(Some(CoverWitness {
                            generator: x.clone(),
                            order: index,
                        }));
                    }
                }
                Err(MapError::Degenerate(_)) | Err(MapError::NotGenerating) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(None)
    }
}
