//! Classification of regular maps with Euler characteristic `-pq`.
//!
//! [`enumerate_cases`] solves the Diophantine side conditions of every case
//! for a given `(p, q)`, builds the explicit maps, and settles the
//! projective cases with [`search_maps`], an exhaustive search over
//! involution triples.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{self, FamilyError, FamilyParams, MapParams};
use crate::fields;
use crate::groups::{triple_isomorphic, FiniteGroup, GroupElement, GroupError};
use crate::maps::{self, AlgebraicMap, MapError};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEARCH_LIMIT: u64 = crate::groups::DEFAULT_ENUMERATION_LIMIT;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("{0} is not a prime >= 5")]
    NotPrime(u64),
    #[error("need q > p, got p = {p}, q = {q}")]
    Misordered { p: u64, q: u64 },
    #[error("search over {group} needs at least one worker")]
    NoWorkers { group: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Field(#[from] fields::FieldError),
}

/// `xy / (xy - 2x - 2y)`; `None` when the denominator vanishes.
pub fn k_value(x: u64, y: u64) -> Option<Ratio<i64>> {
    let (x, y) = (x as i64, y as i64);
    let den = x * y - 2 * x - 2 * y;
    (den != 0).then(|| Ratio::new(x * y, den))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Row {
    pub x: u64,
    pub y: u64,
    pub k: u64,
}

/// Reference data: unordered types `{x, y}` with `k(x, y)` a positive integer.
pub const TABLE1: [(u64, u64, u64); 15] = [
    (3, 7, 21),
    (3, 8, 12),
    (3, 9, 9),
    (3, 12, 6),
    (3, 15, 5),
    (3, 24, 4),
    (4, 5, 10),
    (4, 6, 6),
    (4, 8, 4),
    (4, 12, 3),
    (5, 5, 5),
    (5, 20, 2),
    (6, 6, 3),
    (6, 12, 2),
    (8, 8, 2),
];

/// All `3 <= x <= y` with `k(x, y)` a positive integer.
///
/// For `x = 3`, `k = 3y/(y-6)` needs `(y-6) | 18`, so `y <= 24`. For `x = 4`,
/// `k = 2y/(y-4)` needs `(y-4) | 8`, so `y <= 12`. For `x >= 5`, `k > 1`
/// always and `k >= 2` means `(x-4)(y-4) <= 16`, so `x <= 8` and `y <= 20`.
/// Scanning `x <= y <= 24` is therefore exhaustive.
pub fn table1() -> Vec<Table1Row> {
    let mut rows = Vec::new();
    for x in 3..=24u64 {
        for y in x..=24 {
            if let Some(k) = k_value(x, y) {
                if *k.denom() == 1 && *k.numer() > 0 {
                    rows.push(Table1Row {
                        x,
                        y,
                        k: *k.numer() as u64,
                    });
                }
            }
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table2Row {
    pub x: u64,
    pub y: u64,
    pub k: u64,
    /// `|G| = 4 k p q`.
    pub order: u64,
    pub label: String,
}

/// Types from Table 1 compatible with `|G| = 4k(x,y)pq` (both `x` and `y`
/// divide `|G|`), with the order written in terms of `p` and `q`.
pub fn table2(p: u64, q: u64) -> Vec<Table2Row> {
    let mut out = Vec::new();
    for row in table1() {
        let c = 4 * row.k;
        let order = c * p * q;
        if order % row.x != 0 || order % row.y != 0 {
            continue;
        }
        let label = if c % row.x == 0 && c % row.y == 0 {
            format!("{c}pq")
        } else if (c * p) % row.x == 0 && (c * p) % row.y == 0 {
            format!("{}q", c * p)
        } else {
            format!("{}p", c * q)
        };
        out.push(Table2Row {
            x: row.x,
            y: row.y,
            k: row.k,
            order,
            label,
        });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SporadicRow {
    pub x: u64,
    pub y: u64,
    pub p: u64,
    pub q: u64,
}

const fn row(x: u64, y: u64, p: u64, q: u64) -> SporadicRow {
    SporadicRow { x, y, p, q }
}

/// `PSL(2, q)` candidates, `q^2 - 1 = 8 k(x,y) p`.
pub const TABLE3: [SporadicRow; 6] = [
    row(3, 7, 41, 83),
    row(3, 7, 5, 29),
    row(3, 9, 19, 37),
    row(3, 12, 11, 23),
    row(6, 6, 7, 13),
    row(6, 6, 5, 11),
];

/// `PGL(2, q)` candidates, `q^2 - 1 = 4 k(x,y) p`.
pub const TABLE4: [SporadicRow; 3] = [row(3, 8, 11, 23), row(3, 12, 7, 13), row(4, 6, 7, 13)];

/// Solutions of `q^2 - 1 = 8 k(x,y) p` excluded from the `PSL(2, q)` list.
pub const ELIMINATED: [SporadicRow; 6] = [
    row(4, 12, 7, 13),
    row(4, 12, 5, 11),
    row(3, 7, 11, 43),
    row(3, 8, 23, 47),
    row(3, 9, 5, 19),
    row(4, 6, 11, 23),
];

fn k_int(x: u64, y: u64) -> Option<u64> {
    k_value(x, y).filter(|k| k.is_integer() && *k.numer() > 0).map(|k| *k.numer() as u64)
}

/// Options for [`search_maps`].
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub target_chi: Option<i64>,
    /// Unordered type filter.
    pub target_type: Option<(u64, u64)>,
    pub workers: usize,
    pub conjugacy_reduction: bool,
    pub dickson_cap: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            target_chi: None,
            target_type: None,
            workers: default_workers(),
            conjugacy_reduction: true,
            dickson_cap: true,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

type Triple = [GroupElement; 3];

fn conjugate_triple(g: &FiniteGroup, t: &Triple, h: &GroupElement) -> Triple {
    let h_inv = g.inv(h);
    t.clone().map(|x| g.mul(&g.mul(h, &x), &h_inv))
}

/// Ordered commuting pairs `(t, l)`, `t != l`. With `reduce`, one pair per
/// orbit of the conjugation action on such pairs.
fn edge_pairs(
    g: &FiniteGroup,
    invs: &[GroupElement],
    reduce: bool,
) -> Result<Vec<(GroupElement, GroupElement)>, GroupError> {
    let commuting = |t: &GroupElement, l: &GroupElement| t != l && g.mul(t, l) == g.mul(l, t);
    if !reduce {
        let mut out = Vec::new();
        for t in invs {
            for l in invs {
                if commuting(t, l) {
                    out.push((t.clone(), l.clone()));
                }
            }
        }
        return Ok(out);
    }
    let elements = g.elements()?;
    let mut seen: HashSet<GroupElement> = HashSet::new();
    let mut out = Vec::new();
    for t in invs {
        if seen.contains(t) {
            continue;
        }
        for h in elements {
            seen.insert(g.conjugate(t, h));
        }
        let centralizer: Vec<&GroupElement> = elements
            .iter()
            .filter(|h| g.mul(h, t) == g.mul(t, h))
            .collect();
        let mut done: HashSet<GroupElement> = HashSet::new();
        for l in invs {
            if !commuting(t, l) || done.contains(l) {
                continue;
            }
            for h in &centralizer {
                done.insert(g.conjugate(l, h));
            }
            out.push((t.clone(), l.clone()));
        }
    }
    Ok(out)
}

fn type_matches(x: u64, y: u64, target: Option<(u64, u64)>) -> bool {
    match target {
        None => true,
        Some((a, b)) => (x, y) == (a, b) || (x, y) == (b, a),
    }
}

fn chi_matches(order: u64, x: u64, y: u64, target: Option<i64>) -> bool {
    match target {
        None => true,
        Some(c) => maps::formula_chi(order, x, y).map_or(false, |v| v == c),
    }
}

/// Exhaustive search for maps on `g`, up to isomorphism and duality. Each
/// result is oriented so that `x <= y`; the list is sorted and does not
/// depend on the worker count or on the reduction switch.
pub fn search_maps(g: &Arc<FiniteGroup>, options: &SearchOptions) -> Result<Vec<AlgebraicMap>, ClassifyError> {
    if options.workers == 0 {
        return Err(ClassifyError::NoWorkers {
            group: g.name().to_string(),
        });
    }
    let invs = g.involutions()?;
    let pairs = edge_pairs(g, &invs, options.conjugacy_reduction)?;
    let elements = g.elements()?;
    let order = g.order();
    let workers = options.workers.min(pairs.len().max(1));

    let scan = |chunk: usize| -> BTreeSet<Triple> {
        let mut found = BTreeSet::new();
        let mut seen: HashSet<Triple> = HashSet::new();
        for (t, l) in pairs.iter().skip(chunk).step_by(workers) {
            for r in &invs {
                let x = g.element_order(&g.mul(r, t));
                let y = g.element_order(&g.mul(r, l));
                if !type_matches(x, y, options.target_type) || !chi_matches(order, x, y, options.target_chi) {
                    continue;
                }
                let seeds = [r.clone(), t.clone(), l.clone()];
                if seen.contains(&seeds) || !g.generates_with(&seeds, options.dickson_cap) {
                    continue;
                }
                let dual = [r.clone(), l.clone(), t.clone()];
                let oriented: Vec<Triple> = match x.cmp(&y) {
                    std::cmp::Ordering::Less => vec![seeds],
                    std::cmp::Ordering::Greater => vec![dual],
                    std::cmp::Ordering::Equal => vec![seeds, dual],
                };
                for tr in oriented {
                    if seen.contains(&tr) {
                        continue;
                    }
                    let orbit: Vec<Triple> = elements.iter().map(|h| conjugate_triple(g, &tr, h)).collect();
                    let canonical = orbit.iter().min().expect("nonempty orbit").clone();
                    seen.extend(orbit);
                    found.insert(canonical);
                }
            }
        }
        found
    };

    let candidates: BTreeSet<Triple> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers).map(|w| s.spawn(move || scan(w))).collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("search worker panicked"))
            .collect()
    });

    let mut kept: Vec<Triple> = Vec::new();
    for c in candidates {
        let mut duplicate = false;
        for k in &kept {
            let kd = [k[0].clone(), k[2].clone(), k[1].clone()];
            if triple_isomorphic(g, &c, g, k)? || triple_isomorphic(g, &c, g, &kd)? {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            kept.push(c);
        }
    }
    kept.into_iter()
        .map(|[r, t, l]| maps::validate_with(g.clone(), r, t, l, options.dickson_cap).map_err(Into::into))
        .collect()
}

/// A `PGL(2, f)` map of type exactly `(m, n)` with `r, t` outside
/// `PSL(2, f)` and `l` inside it, as required by [`families::lift_map`].
pub fn find_lift_base(f: u64, m: u64, n: u64, options: &SearchOptions) -> Result<Option<AlgebraicMap>, ClassifyError> {
    let pgl = families::build_pgl2(f)?;
    let opts = SearchOptions {
        target_chi: None,
        target_type: Some((m, n)),
        ..options.clone()
    };
    for hit in search_maps(&pgl, &opts)? {
        for cand in [hit.dual(), hit] {
            let g = cand.group();
            if cand.map_type() == (m, n)
                && !g.is_psl_member(cand.r())
                && !g.is_psl_member(cand.t())
                && g.is_psl_member(cand.l())
            {
                return Ok(Some(cand));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Constructed,
    Conditional,
    SearchConfirmed,
    SearchRefuted,
    SearchSkipped,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Constructed => "constructed",
            Self::Conditional => "conditional",
            Self::SearchConfirmed => "search-confirmed",
            Self::SearchRefuted => "search-refuted",
            Self::SearchSkipped => "search-skipped",
        }
    }

    pub fn has_map(&self) -> bool {
        matches!(self, Self::Constructed | Self::SearchConfirmed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupInfo {
    pub family: String,
    pub name: String,
    pub order: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapDescriptor {
    pub id: String,
    pub case: String,
    pub params: String,
    #[serde(rename = "type")]
    pub map_type: [u64; 2],
    pub group: GroupInfo,
    pub chi: i64,
    pub orientable: Option<bool>,
    pub status: Status,
    pub dual_of: String,
    /// Canonical hex serialization of `(r, t, l)`.
    pub triple: Option<[String; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub also: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub map: Option<AlgebraicMap>,
    #[serde(skip)]
    pub family: Option<FamilyParams>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub chi_exact: bool,
    pub chi_matches_orbits: bool,
    pub families_non_orientable: bool,
    pub duality_closed: bool,
    pub pairwise_non_isomorphic: bool,
    pub hurwitz_bound: bool,
    pub rotation_subgroups_disjoint: bool,
    pub notes: Vec<String>,
}

impl Verification {
    pub fn all_ok(&self) -> bool {
        self.chi_exact
            && self.chi_matches_orbits
            && self.families_non_orientable
            && self.duality_closed
            && self.pairwise_non_isomorphic
            && self.hurwitz_bound
            && self.rotation_subgroups_disjoint
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub schema_version: u32,
    pub p: u64,
    pub q: u64,
    pub descriptors: Vec<MapDescriptor>,
    pub verification: Verification,
}

impl ClassifyReport {
    pub fn find(&self, id: &str) -> Option<&MapDescriptor> {
        self.descriptors.iter().find(|d| d.id == id)
    }

    pub fn by_case<'a>(&'a self, case: &'a str) -> impl Iterator<Item = &'a MapDescriptor> + 'a {
        self.descriptors.iter().filter(move |d| d.case == case)
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub search: SearchOptions,
    /// Largest group order the searcher will enumerate.
    pub search_limit: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            search: SearchOptions::default(),
            search_limit: DEFAULT_SEARCH_LIMIT,
        }
    }
}

fn check_primes(p: u64, q: u64) -> Result<(), ClassifyError> {
    for v in [p, q] {
        if v < 5 || !fields::is_prime(v) {
            return Err(ClassifyError::NotPrime(v));
        }
    }
    if q <= p {
        return Err(ClassifyError::Misordered { p, q });
    }
    Ok(())
}

struct Builder<'a> {
    p: u64,
    q: u64,
    options: &'a ClassifyOptions,
    descriptors: Vec<MapDescriptor>,
    search_keys: HashMap<(FamilyParams, (u64, u64)), std::ops::Range<usize>>,
}

fn group_info(g: &FiniteGroup) -> GroupInfo {
    GroupInfo {
        family: g.family().tag().to_string(),
        name: g.name().to_string(),
        order: g.order(),
    }
}

fn hex_triple(m: &AlgebraicMap) -> [String; 3] {
    m.triple().map(|e| e.to_hex())
}

fn sorted(a: u64, b: u64) -> (u64, u64) {
    (a.min(b), a.max(b))
}

impl<'a> Builder<'a> {
    fn chi(&self) -> i64 {
        -((self.p * self.q) as i64)
    }

    fn descriptor_from_map(
        &self,
        id: String,
        case: &str,
        params: String,
        map: AlgebraicMap,
        status: Status,
        family: Option<FamilyParams>,
    ) -> MapDescriptor {
        let (x, y) = map.map_type();
        MapDescriptor {
            id: id.clone(),
            case: case.to_string(),
            params,
            map_type: [x, y],
            group: group_info(map.group()),
            chi: map.euler_characteristic_by_orbits(),
            orientable: Some(map.is_orientable()),
            status,
            dual_of: id,
            triple: Some(hex_triple(&map)),
            also: Vec::new(),
            note: None,
            map: Some(map),
            family,
        }
    }

    /// Adds a map and, unless it is self-dual, its dual.
    fn push_map(
        &mut self,
        id: String,
        case: &str,
        params: String,
        map: AlgebraicMap,
        status: Status,
        family: Option<FamilyParams>,
    ) -> Result<(), ClassifyError> {
        let dual = map.dual();
        let self_dual = map.is_isomorphic(&dual)?;
        let mut primary = self.descriptor_from_map(id.clone(), case, params.clone(), map, status, family.clone());
        if !self_dual {
            let dual_id = format!("{id}*");
            primary.dual_of = dual_id.clone();
            let mut d = self.descriptor_from_map(dual_id, case, format!("{params}*"), dual, status, family);
            d.dual_of = id;
            self.descriptors.push(primary);
            self.descriptors.push(d);
        } else {
            self.descriptors.push(primary);
        }
        Ok(())
    }

    /// Descriptor without a map, with its reversed-type partner when `x != y`.
    #[allow(clippy::too_many_arguments)]
    fn push_mapless(
        &mut self,
        id: String,
        case: &str,
        params: String,
        (x, y): (u64, u64),
        group: GroupInfo,
        status: Status,
        family: Option<FamilyParams>,
        note: Option<String>,
    ) {
        let base = MapDescriptor {
            id: id.clone(),
            case: case.to_string(),
            params: params.clone(),
            map_type: [x, y],
            group,
            chi: self.chi(),
            orientable: None,
            status,
            dual_of: id.clone(),
            triple: None,
            also: Vec::new(),
            note,
            map: None,
            family,
        };
        if x == y {
            self.descriptors.push(base);
            return;
        }
        let dual_id = format!("{id}*");
        let mut dual = base.clone();
        dual.id = dual_id.clone();
        dual.params = format!("{params}*");
        dual.map_type = [y, x];
        let mut primary = base;
        primary.dual_of = dual_id;
        dual.dual_of = id;
        self.descriptors.push(primary);
        self.descriptors.push(dual);
    }

    fn construct(&mut self, case: &str, params: MapParams) -> Result<(), ClassifyError> {
        let map = match params {
            MapParams::M1 { j, k } => families::build_m1(j as u32, k as u32)?,
            MapParams::M2 { x, n, p } => families::build_m2(x, n, p)?,
            MapParams::M3 { u } => families::build_m3(u)?,
            MapParams::Lift { .. } => unreachable!("lifts are built by the search path"),
        };
        let id = format!("{case}:{params}");
        self.push_map(id, case, params.to_string(), map, Status::Constructed, Some(params.group_params()))
    }

    /// Settles a projective case by searching `family` for maps of type
    /// `{x, y}`.
    fn search_case(&mut self, case: &str, family: FamilyParams, ty: (u64, u64)) -> Result<(), ClassifyError> {
        let ty = sorted(ty.0, ty.1);
        let key = (family.clone(), ty);
        if let Some(range) = self.search_keys.get(&key).cloned() {
            for d in &mut self.descriptors[range] {
                if d.case != case && !d.also.iter().any(|c| c == case) {
                    d.also.push(case.to_string());
                }
            }
            return Ok(());
        }
        let start = self.descriptors.len();
        self.search_case_uncached(case, &family, ty)?;
        self.search_keys.insert(key, start..self.descriptors.len());
        Ok(())
    }

    fn search_case_uncached(&mut self, case: &str, family: &FamilyParams, ty: (u64, u64)) -> Result<(), ClassifyError> {
        let family = family.clone();
        let base_id = format!("{case}:{family}:{{{},{}}}", ty.0, ty.1);
        let order = family.order();
        if order > self.options.search_limit {
            let info = GroupInfo {
                family: family_tag(&family).to_string(),
                name: family.to_string(),
                order,
            };
            self.push_mapless(
                base_id,
                case,
                family.to_string(),
                ty,
                info,
                Status::SearchSkipped,
                Some(family),
                Some(format!("group order {order} exceeds the search limit {}", self.options.search_limit)),
            );
            return Ok(());
        }
        let g = family.build()?;
        let opts = SearchOptions {
            target_chi: Some(self.chi()),
            target_type: Some(ty),
            ..self.options.search.clone()
        };
        let hits = search_maps(&g, &opts)?;
        if hits.is_empty() {
            self.push_mapless(
                base_id,
                case,
                family.to_string(),
                ty,
                group_info(&g),
                Status::SearchRefuted,
                Some(family),
                None,
            );
            return Ok(());
        }
        let many = hits.len() > 1;
        for (i, hit) in hits.into_iter().enumerate() {
            let id = if many {
                format!("{base_id}#{}", i + 1)
            } else {
                base_id.clone()
            };
            self.push_map(id, case, family.to_string(), hit, Status::SearchConfirmed, Some(family.clone()))?;
        }
        Ok(())
    }

    /// Case (vi)(1) instance of type `{dm, n}` on `Z_d : PGL(2, f)`.
    fn lift_case(&mut self, f: u64, m: u64, n: u64, d: u64) -> Result<(), ClassifyError> {
        let case = "vi1";
        if d == 1 {
            return self.search_case(case, FamilyParams::Pgl { f }, (m, n));
        }
        let family = FamilyParams::ZdPgl { d, f };
        let params = MapParams::Lift { d, f, m, n };
        let id = format!("{case}:{params}");
        if let Some(base) = find_lift_base(f, m, n, &self.options.search)? {
            let lifted = families::lift_map(d, &base, 1)?;
            return self.push_map(id, case, params.to_string(), lifted, Status::Constructed, Some(family));
        }
        let ty = (d * m, n);
        let order = family.order();
        if order > self.options.search_limit {
            let info = GroupInfo {
                family: "semidirect".into(),
                name: format!("Z{d}:PGL(2,{f})"),
                order,
            };
            self.push_mapless(
                id,
                case,
                params.to_string(),
                ty,
                info,
                Status::SearchSkipped,
                Some(family),
                Some("no lift base; group too large to search directly".into()),
            );
            return Ok(());
        }
        let g = family.build()?;
        let opts = SearchOptions {
            target_chi: Some(self.chi()),
            target_type: Some(ty),
            ..self.options.search.clone()
        };
        let hits = search_maps(&g, &opts)?;
        if hits.is_empty() {
            self.push_mapless(
                id,
                case,
                params.to_string(),
                ty,
                group_info(&g),
                Status::SearchRefuted,
                Some(family),
                Some(format!("no PGL(2,{f}) base of type ({m},{n}) with the required cosets")),
            );
            return Ok(());
        }
        for (i, hit) in hits.into_iter().enumerate() {
            self.push_map(
                format!("{id}#{}", i + 1),
                case,
                params.to_string(),
                hit,
                Status::SearchConfirmed,
                Some(family.clone()),
            )?;
        }
        Ok(())
    }
}

fn family_tag(f: &FamilyParams) -> &'static str {
    match f {
        FamilyParams::Psl { .. } => "psl2",
        FamilyParams::Pgl { .. } => "pgl2",
        FamilyParams::G1 { .. } => "direct",
        FamilyParams::Cyclic { .. } => "cyclic",
        FamilyParams::Dihedral { .. } => "dihedral",
        _ => "semidirect",
    }
}

fn prime_at_least_5(f: u64) -> bool {
    f >= 5 && fields::is_prime(f)
}

/// Candidate `(f, m, n)` for a projective case: `values(f)` lists
/// `{f, a(f), b(f)}` (`None` when not integral), and `p` must be one of them.
fn projective_candidates(p: u64, fs: &[u64], values: impl Fn(u64) -> Option<[u64; 3]>) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for &f in fs {
        if !prime_at_least_5(f) {
            continue;
        }
        let Some(vals) = values(f) else { continue };
        for i in 0..3 {
            if vals[i] != p {
                continue;
            }
            let rest: Vec<u64> = (0..3).filter(|&j| j != i).map(|j| vals[j]).collect();
            out.push((f, rest[0], rest[1]));
        }
    }
    out.sort();
    out.dedup();
    out
}

fn div_exact(a: u64, b: u64) -> Option<u64> {
    (a % b == 0).then(|| a / b)
}

/// Case enumeration for `chi = -pq`.
pub fn enumerate_cases(p: u64, q: u64, options: &ClassifyOptions) -> Result<ClassifyReport, ClassifyError> {
    check_primes(p, q)?;
    let mut b = Builder {
        p,
        q,
        options,
        descriptors: Vec::new(),
        search_keys: HashMap::new(),
    };
    let pq = p * q;

    // (i): (j-1)(k-1) = pq + 1 with j, k odd, so both factors are even.
    let target = pq + 1;
    let mut a = 2;
    while a * a <= target {
        if target % a == 0 && (target / a) % 2 == 0 {
            b.construct("i", MapParams::M1 { j: a + 1, k: target / a + 1 })?;
        }
        a += 2;
    }

    // (ii)
    if q == p + 2 {
        b.construct("ii", MapParams::M2 { x: 0, n: 4, p: q })?;
    }

    // (iii): n = (2q + 2p^k) / (p^k - 1) >= 4 forces p^k <= q + 2.
    let mut pk = p;
    let mut k = 1u32;
    while pk <= q + 2 {
        if let Some(n) = div_exact(2 * q + 2 * pk, pk - 1) {
            if n % 2 == 0 && n >= 4 {
                for x in fields::s_set(n, p)?.members {
                    if k == 1 {
                        b.construct("iii", MapParams::M2 { x, n, p })?;
                    } else {
                        let params = format!("cover:k={k},x={x},n={n},p={p}");
                        let info = GroupInfo {
                            family: "cover".into(),
                            name: format!("cyclic cover of G2({x},{n},{p})"),
                            order: pk / p * 2 * n * p * p,
                        };
                        b.push_mapless(
                            format!("iii:{params}"),
                            "iii",
                            params,
                            (2 * pk, n),
                            info,
                            Status::Conditional,
                            None,
                            Some(format!("regular cover of M2({x},{n},{p}) with cyclic kernel of order {}", pk / p)),
                        );
                    }
                }
            }
        }
        pk *= p;
        k += 1;
    }

    // (iv)
    let u = pq + 4;
    if u % 6 == 3 {
        b.construct("iv", MapParams::M3 { u })?;
    }

    // (v)(1)-(3): PSL(2, f) with {p, m, n} = {f, a(f), b(f)}.
    let v_cases: [(&str, u64, [u64; 3], Box<dyn Fn(u64) -> Option<[u64; 3]>>); 3] = [
        (
            "v1",
            2 * q,
            [p, 2 * p + 1, 2 * p - 1],
            Box::new(|f| Some([f, div_exact(f - 1, 2)?, div_exact(f + 1, 2)?])),
        ),
        (
            "v2",
            q,
            [p, 4 * p + 1, 2 * p - 1],
            Box::new(|f| Some([f, div_exact(f - 1, 4)?, div_exact(f + 1, 2)?])),
        ),
        (
            "v3",
            q,
            [p, 2 * p + 1, 4 * p - 1],
            Box::new(|f| Some([f, div_exact(f - 1, 2)?, div_exact(f + 1, 4)?])),
        ),
    ];
    for (case, rhs, fs, values) in v_cases.iter() {
        for (f, m, n) in projective_candidates(p, fs, values) {
            if (m * n) as i64 - 2 * m as i64 - 2 * n as i64 == *rhs as i64 {
                b.search_case(case, FamilyParams::Psl { f }, (m, n))?;
            }
        }
    }
    // (v)(4)
    for r in TABLE3.iter().filter(|r| (r.p, r.q) == (p, q)) {
        b.search_case("v4", FamilyParams::Psl { f: q }, (r.x, r.y))?;
    }

    // Rows solving the PSL equation that Table 3 omits; searched all the same.
    for r in ELIMINATED.iter().filter(|r| (r.p, r.q) == (p, q)) {
        b.search_case("v4x", FamilyParams::Psl { f: q }, (r.x, r.y))?;
    }

    // (vi)(1): {p, m, n} = {f, f+1, (f-1)/2} or {f, f-1, (f+1)/2},
    // d = (2q + 2n) / (mn - 2m), p does not divide m, gcd(d, f(f^2-1)) in {1, p}.
    let vi_sets: [(&[u64], Box<dyn Fn(u64) -> Option<[u64; 3]>>); 2] = [
        (&[p, 2 * p + 1], Box::new(|f| Some([f, f + 1, div_exact(f - 1, 2)?]))),
        (&[p, 2 * p - 1], Box::new(|f| Some([f, f - 1, div_exact(f + 1, 2)?]))),
    ];
    let mut lifts = BTreeSet::new();
    for (fs, values) in vi_sets.iter() {
        for (f, u1, u2) in projective_candidates(p, fs, values) {
            for (m, n) in [(u1, u2), (u2, u1)] {
                if m % p == 0 || m * n <= 2 * m {
                    continue;
                }
                let Some(d) = div_exact(2 * q + 2 * n, m * n - 2 * m) else { continue };
                let g = d.gcd(&(f * (f * f - 1)));
                if g == 1 || g == p {
                    lifts.insert((f, m, n, d));
                }
            }
        }
    }
    for (f, m, n, d) in lifts {
        b.lift_case(f, m, n, d)?;
    }
    // (vi)(2)
    if (p * p) as i64 - 1 - 4 * p as i64 == 4 * q as i64 {
        b.search_case("vi2", FamilyParams::Pgl { f: p }, (p - 1, p + 1))?;
    }
    // (vi)(3)
    if (p, q) == (5, 7) {
        b.search_case("vi3", FamilyParams::Pgl { f: 7 }, (6, 8))?;
    }
    // (vi)(4)
    for r in TABLE4.iter().filter(|r| (r.p, r.q) == (p, q)) {
        b.search_case("vi4", FamilyParams::Pgl { f: q }, (r.x, r.y))?;
    }

    let mut report = ClassifyReport {
        schema_version: SCHEMA_VERSION,
        p,
        q,
        descriptors: b.descriptors,
        verification: Verification::default(),
    };
    report.verification = verify(&report)?;
    Ok(report)
}

fn verify(report: &ClassifyReport) -> Result<Verification, ClassifyError> {
    let chi = -((report.p * report.q) as i64);
    let mut v = Verification {
        chi_exact: true,
        chi_matches_orbits: true,
        families_non_orientable: true,
        duality_closed: true,
        pairwise_non_isomorphic: true,
        hurwitz_bound: true,
        rotation_subgroups_disjoint: true,
        notes: Vec::new(),
    };
    let bound = 84 * report.p * report.q;
    for d in &report.descriptors {
        if d.group.order > bound {
            v.hurwitz_bound = false;
            v.notes.push(format!("{}: |G| = {} exceeds 84pq", d.id, d.group.order));
        }
        match report.find(&d.dual_of) {
            Some(partner) if partner.dual_of == d.id && partner.map_type == [d.map_type[1], d.map_type[0]] => {}
            _ => {
                v.duality_closed = false;
                v.notes.push(format!("{}: dual partner {} missing or inconsistent", d.id, d.dual_of));
            }
        }
        let Some(m) = &d.map else { continue };
        match m.euler_characteristic() {
            Ok(c) if c == chi => {}
            other => {
                v.chi_exact = false;
                v.notes.push(format!("{}: formula chi {:?}", d.id, other));
            }
        }
        if m.euler_characteristic_by_orbits() != chi {
            v.chi_matches_orbits = false;
            v.notes.push(format!("{}: orbit chi {}", d.id, m.euler_characteristic_by_orbits()));
        }
        if matches!(d.case.as_str(), "i" | "ii" | "iii" | "iv") && m.is_orientable() {
            v.families_non_orientable = false;
            v.notes.push(format!("{}: orientable", d.id));
        }
        if !m.rotation_subgroups_meet_trivially() {
            v.rotation_subgroups_disjoint = false;
            v.notes.push(format!("{}: <rt> and <rl> meet nontrivially", d.id));
        }
    }
    let with_maps: Vec<&MapDescriptor> = report.descriptors.iter().filter(|d| d.map.is_some()).collect();
    for (i, a) in with_maps.iter().enumerate() {
        for b in &with_maps[i + 1..] {
            let (ma, mb) = (a.map.as_ref().unwrap(), b.map.as_ref().unwrap());
            if ma.group().order() != mb.group().order() || ma.map_type() != mb.map_type() {
                continue;
            }
            if ma.is_isomorphic(mb)? {
                v.pairwise_non_isomorphic = false;
                v.notes.push(format!("{} and {} are isomorphic", a.id, b.id));
            }
        }
    }
    Ok(v)
}

/// Exhaustive searches over every group named by the report's descriptors;
/// returns the searched maps that match no descriptor (up to isomorphism).
pub fn unmatched_maps(report: &ClassifyReport, options: &ClassifyOptions) -> Result<Vec<(String, AlgebraicMap)>, ClassifyError> {
    let chi = -((report.p * report.q) as i64);
    let families: BTreeSet<FamilyParams> = report.descriptors.iter().filter_map(|d| d.family.clone()).collect();
    let known: Vec<&AlgebraicMap> = report.descriptors.iter().filter_map(|d| d.map.as_ref()).collect();
    let mut out = Vec::new();
    for family in families {
        if family.order() > options.search_limit {
            continue;
        }
        let g = family.build()?;
        let opts = SearchOptions {
            target_chi: Some(chi),
            target_type: None,
            ..options.search.clone()
        };
        for hit in search_maps(&g, &opts)? {
            let mut matched = false;
            for k in &known {
                if hit.is_isomorphic(k)? || hit.dual().is_isomorphic(k)? {
                    matched = true;
                    break;
                }
            }
            if !matched {
                out.push((family.to_string(), hit));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Existence {
    Found,
    NotFound,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SporadicCheck {
    pub table: String,
    pub row: SporadicRow,
    pub k: u64,
    pub equation_holds: bool,
    pub existence: Existence,
    pub maps_found: usize,
}

/// Checks the `q^2 - 1` equations of every sporadic row and searches for
/// maps on rows whose group order is at most `search_limit`.
pub fn verify_sporadic_tables(options: &ClassifyOptions) -> Result<Vec<SporadicCheck>, ClassifyError> {
    let mut out = Vec::new();
    let tables: [(&str, &[SporadicRow], u64, bool); 3] = [
        ("3", &TABLE3, 8, true),
        ("4", &TABLE4, 4, false),
        ("eliminated", &ELIMINATED, 8, true),
    ];
    for (name, rows, factor, special) in tables {
        for r in rows {
            let k = k_int(r.x, r.y).ok_or_else(|| ClassifyError::Internal(format!("k({},{}) not integral", r.x, r.y)))?;
            let equation_holds = r.q * r.q - 1 == factor * k * r.p;
            let family = if special {
                FamilyParams::Psl { f: r.q }
            } else {
                FamilyParams::Pgl { f: r.q }
            };
            let (existence, maps_found) = if family.order() > options.search_limit {
                (Existence::Skipped, 0)
            } else {
                let g = family.build()?;
                let opts = SearchOptions {
                    target_chi: Some(-((r.p * r.q) as i64)),
                    target_type: Some((r.x, r.y)),
                    ..options.search.clone()
                };
                let hits = search_maps(&g, &opts)?;
                let e = if hits.is_empty() {
                    Existence::NotFound
                } else {
                    Existence::Found
                };
                (e, hits.len())
            };
            out.push(SporadicCheck {
                table: name.to_string(),
                row: *r,
                k,
                equation_holds,
                existence,
                maps_found,
            });
        }
    }
    Ok(out)
}
