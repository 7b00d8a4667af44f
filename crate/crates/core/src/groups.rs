//! Concrete finite groups with a single element type.
//!
//! Every group the classification touches has an explicit faithful model:
//! cyclic and dihedral groups, direct products, semidirect products of a
//! homocyclic group `Z_m^r` (`r <= 2`) by an enumerable group, projective
//! matrix groups over a prime field, and quotients of any of these by a normal
//! subgroup (kept as canonical coset representatives).
//!
//! # Canonical serialization (version 1)
//!
//! [`GroupElement::canonical_bytes`] emits a version byte followed by the body:
//!
//! | tag    | body                                                   |
//! |--------|--------------------------------------------------------|
//! | `0x01` | cyclic: residue as `u32` LE                            |
//! | `0x02` | dihedral: reflection flag as `u32` LE, rotation `u32` LE |
//! | `0x03` | pair: body of left, body of right                      |
//! | `0x04` | semidirect: action id `u32` LE, normal body, acting body |
//! | `0x05` | projective: four row-major entries as `u32` LE          |

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::fields::{self, FieldError, FpElement, Gl2Matrix};

pub const DEFAULT_ENUMERATION_LIMIT: u64 = 2_000_000;
pub const SERIALIZATION_VERSION: u8 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element {element} does not belong to {group}")]
    FamilyMismatch { element: String, group: String },
    #[error("group order {order} exceeds the enumeration limit {limit}")]
    OrderLimitExceeded { order: u64, limit: u64 },
    #[error("action images do not define a homomorphism (conflict at {0})")]
    ActionInconsistent(String),
    #[error("action image for {0} is not an automorphism")]
    NotAutomorphism(String),
    #[error("invalid group parameter: {0}")]
    InvalidParameter(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Cyclic(u32),
    /// `s^reflection * rho^rotation`.
    Dihedral { reflection: bool, rotation: u32 },
    Pair(Box<GroupElement>, Box<GroupElement>),
    SemiPair {
        normal: Box<GroupElement>,
        acting: Box<GroupElement>,
        action: u32,
    },
    Projective(Gl2Matrix),
}

impl GroupElement {
    pub fn pair(left: GroupElement, right: GroupElement) -> Self {
        Self::Pair(Box::new(left), Box::new(right))
    }

    pub fn semi(normal: GroupElement, acting: GroupElement, action: u32) -> Self {
        Self::SemiPair {
            normal: Box::new(normal),
            acting: Box::new(acting),
            action,
        }
    }

    pub fn rotation(k: u32) -> Self {
        Self::Dihedral {
            reflection: false,
            rotation: k,
        }
    }

    pub fn reflection(k: u32) -> Self {
        Self::Dihedral {
            reflection: true,
            rotation: k,
        }
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = vec![SERIALIZATION_VERSION];
        self.write_body(&mut out);
        out
    }

    fn write_body(&self, out: &mut Vec<u8>) {
        match self {
            Self::Cyclic(v) => {
                out.push(0x01);
                out.extend_from_slice(&v.to_le_bytes());
            }
            Self::Dihedral {
                reflection,
                rotation,
            } => {
                out.push(0x02);
                out.extend_from_slice(&(*reflection as u32).to_le_bytes());
                out.extend_from_slice(&rotation.to_le_bytes());
            }
            Self::Pair(l, r) => {
                out.push(0x03);
                l.write_body(out);
                r.write_body(out);
            }
            Self::SemiPair {
                normal,
                acting,
                action,
            } => {
                out.push(0x04);
                out.extend_from_slice(&action.to_le_bytes());
                normal.write_body(out);
                acting.write_body(out);
            }
            Self::Projective(m) => {
                out.push(0x05);
                for e in m.entries() {
                    out.extend_from_slice(&e.to_le_bytes());
                }
            }
        }
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.canonical_bytes())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Cyclic(v) => write!(f, "{v}"),
            Self::Dihedral {
                reflection: false,
                rotation,
            } => write!(f, "r{rotation}"),
            Self::Dihedral {
                reflection: true,
                rotation,
            } => write!(f, "s.r{rotation}"),
            Self::Pair(l, r) => write!(f, "({l}, {r})"),
            Self::SemiPair { normal, acting, .. } => write!(f, "[{normal} | {acting}]"),
            Self::Projective(m) => write!(f, "{m}"),
        }
    }
}

/// The abelian group `Z_modulus^rank` used as the normal factor of a
/// semidirect product. Rank 1 elements are `Cyclic`, rank 2 elements are
/// `Pair(Cyclic, Cyclic)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NormalPart {
    pub modulus: u32,
    pub rank: u8,
}

impl NormalPart {
    pub fn order(&self) -> u64 {
        (self.modulus as u64).pow(self.rank as u32)
    }

    pub fn element(&self, v: [u32; 2]) -> GroupElement {
        let m = self.modulus;
        match self.rank {
            1 => GroupElement::Cyclic(v[0] % m),
            _ => GroupElement::pair(
                GroupElement::Cyclic(v[0] % m),
                GroupElement::Cyclic(v[1] % m),
            ),
        }
    }

    pub fn vector(&self, g: &GroupElement) -> Option<[u32; 2]> {
        match (self.rank, g) {
            (1, GroupElement::Cyclic(a)) if *a < self.modulus => Some([*a, 0]),
            (2, GroupElement::Pair(l, r)) => match (l.as_ref(), r.as_ref()) {
                (GroupElement::Cyclic(a), GroupElement::Cyclic(b))
                    if *a < self.modulus && *b < self.modulus =>
                {
                    Some([*a, *b])
                }
                _ => None,
            },
            _ => None,
        }
    }

    fn all_vectors(&self) -> Vec<[u32; 2]> {
        let m = self.modulus;
        if self.rank == 1 {
            (0..m).map(|a| [a, 0]).collect()
        } else {
            (0..m).flat_map(|a| (0..m).map(move |b| [a, b])).collect()
        }
    }
}

/// Automorphism of `Z_m^r` as a matrix acting on column exponent vectors.
/// Column `i` holds the image of the `i`-th basis generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AutMatrix {
    m: [u32; 4],
    modulus: u32,
    rank: u8,
}

impl AutMatrix {
    pub fn new(entries: [i64; 4], normal: NormalPart) -> Self {
        let md = normal.modulus as i64;
        let mut m = entries.map(|e| e.rem_euclid(md) as u32);
        if normal.rank == 1 {
            m[1] = 0;
            m[2] = 0;
            m[3] = 1 % normal.modulus;
        }
        Self {
            m,
            modulus: normal.modulus,
            rank: normal.rank,
        }
    }

    pub fn scalar(lambda: i64, normal: NormalPart) -> Self {
        Self::new([lambda, 0, 0, lambda], normal)
    }

    pub fn identity(normal: NormalPart) -> Self {
        Self::scalar(1, normal)
    }

    pub fn entries(&self) -> [u32; 4] {
        self.m
    }

    pub fn apply(&self, v: [u32; 2]) -> [u32; 2] {
        let md = self.modulus as u64;
        let [a, b, c, d] = self.m.map(u64::from);
        let (x, y) = (v[0] as u64, v[1] as u64);
        if self.rank == 1 {
            return [((a * x) % md) as u32, 0];
        }
        [((a * x + b * y) % md) as u32, ((c * x + d * y) % md) as u32]
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        let md = self.modulus as u64;
        let [a, b, c, d] = self.m.map(u64::from);
        let [e, f, g, h] = rhs.m.map(u64::from);
        let m = if self.rank == 1 {
            [((a * e) % md) as u32, 0, 0, (1 % md) as u32]
        } else {
            [
                ((a * e + b * g) % md) as u32,
                ((a * f + b * h) % md) as u32,
                ((c * e + d * g) % md) as u32,
                ((c * f + d * h) % md) as u32,
            ]
        };
        Self {
            m,
            modulus: self.modulus,
            rank: self.rank,
        }
    }

    fn is_invertible(&self) -> bool {
        let md = self.modulus as u64;
        let det = if self.rank == 1 {
            self.m[0] as u64
        } else {
            let [a, b, c, d] = self.m.map(u64::from);
            (a * d + md * md - (b * c) % (md * md)) % md
        };
        num_integer::gcd(det, md) == 1
    }
}

/// Homomorphism from an acting group into `Aut(Z_m^r)`, tabulated over all
/// acting elements.
#[derive(Debug)]
pub struct ActionSpec {
    id: u32,
    normal: NormalPart,
    generator_images: Vec<(GroupElement, AutMatrix)>,
    table: HashMap<GroupElement, AutMatrix>,
}

impl ActionSpec {
    /// Extends generator images to the whole acting group by breadth-first
    /// search, rejecting assignments that are not consistent homomorphisms.
    pub fn new(
        label: &str,
        normal: NormalPart,
        acting: &FiniteGroup,
        generator_images: Vec<(GroupElement, AutMatrix)>,
    ) -> Result<Self, GroupError> {
        for (g, img) in &generator_images {
            if !img.is_invertible() {
                return Err(GroupError::NotAutomorphism(g.to_string()));
            }
        }
        acting.ensure_enumerable()?;
        let mut table = HashMap::new();
        let id = acting.identity();
        table.insert(id.clone(), AutMatrix::identity(normal));
        let mut queue = VecDeque::from([id]);
        while let Some(h) = queue.pop_front() {
            let phi_h = table[&h];
            for (g, img) in &generator_images {
                let hg = acting.mul(&h, g);
                let phi = phi_h.compose(img);
                match table.get(&hg) {
                    Some(existing) if *existing != phi => {
                        return Err(GroupError::ActionInconsistent(hg.to_string()));
                    }
                    Some(_) => {}
                    None => {
                        table.insert(hg.clone(), phi);
                        queue.push_back(hg);
                    }
                }
            }
        }
        if table.len() as u64 != acting.order() {
            return Err(GroupError::InvalidParameter(format!(
                "action generators reach {} of {} acting elements",
                table.len(),
                acting.order()
            )));
        }
        Ok(Self {
            id: stable_id(label),
            normal,
            generator_images,
            table,
        })
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn generator_images(&self) -> &[(GroupElement, AutMatrix)] {
        &self.generator_images
    }

    pub fn image(&self, h: &GroupElement) -> AutMatrix {
        *self
            .table
            .get(h)
            .unwrap_or_else(|| panic!("acting element {h} outside the action table"))
    }
}

fn stable_id(label: &str) -> u32 {
    let mut hasher = std::hash::DefaultHasher::new();
    label.hash(&mut hasher);
    hasher.finish() as u32
}

#[derive(Clone, Debug)]
pub enum Family {
    Cyclic {
        n: u32,
    },
    /// Dihedral group of order `2n`.
    Dihedral {
        n: u32,
    },
    Direct {
        left: Arc<FiniteGroup>,
        right: Arc<FiniteGroup>,
    },
    Semidirect {
        normal: NormalPart,
        acting: Arc<FiniteGroup>,
        action: Arc<ActionSpec>,
    },
    /// `PGL(2, f)`, or `PSL(2, f)` when `special`.
    Projective {
        f: u32,
        special: bool,
    },
    Quotient {
        parent: Arc<FiniteGroup>,
        reps: Arc<HashMap<GroupElement, GroupElement>>,
    },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Cyclic { .. } => "cyclic",
            Self::Dihedral { .. } => "dihedral",
            Self::Direct { .. } => "direct",
            Self::Semidirect { .. } => "semidirect",
            Self::Projective { special: true, .. } => "psl2",
            Self::Projective { special: false, .. } => "pgl2",
            Self::Quotient { .. } => "quotient",
        }
    }
}

/// Result of a capped subgroup closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Closure {
    Complete(HashSet<GroupElement>),
    CapExceeded,
}

impl Closure {
    pub fn len(&self) -> Option<usize> {
        match self {
            Self::Complete(s) => Some(s.len()),
            Self::CapExceeded => None,
        }
    }

    pub fn into_set(self) -> Option<HashSet<GroupElement>> {
        match self {
            Self::Complete(s) => Some(s),
            Self::CapExceeded => None,
        }
    }
}

#[derive(Debug)]
pub struct FiniteGroup {
    name: String,
    family: Family,
    generators: Vec<(String, GroupElement)>,
    order: u64,
    limit: u64,
    elements: OnceLock<Vec<GroupElement>>,
}

impl FiniteGroup {
    fn from_parts(
        name: String,
        family: Family,
        generators: Vec<(String, GroupElement)>,
        order: u64,
    ) -> Self {
        Self {
            name,
            family,
            generators,
            order,
            limit: DEFAULT_ENUMERATION_LIMIT,
            elements: OnceLock::new(),
        }
    }

    pub fn cyclic(n: u32) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::InvalidParameter("cyclic group of order 0".into()));
        }
        Ok(Self::from_parts(
            format!("Z{n}"),
            Family::Cyclic { n },
            vec![("g".into(), GroupElement::Cyclic(1 % n))],
            n as u64,
        ))
    }

    /// Dihedral group of order `2n` with generating reflections `s` and `s.r1`.
    pub fn dihedral(n: u32) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::InvalidParameter("dihedral group D0".into()));
        }
        Ok(Self::from_parts(
            format!("D{}", 2 * n),
            Family::Dihedral { n },
            vec![
                ("s".into(), GroupElement::reflection(0)),
                ("sr".into(), GroupElement::reflection(1 % n)),
            ],
            2 * n as u64,
        ))
    }

    pub fn direct(left: Arc<FiniteGroup>, right: Arc<FiniteGroup>) -> Self {
        let mut generators = Vec::new();
        for (name, g) in &left.generators {
            generators.push((
                format!("{name}.0"),
                GroupElement::pair(g.clone(), right.identity()),
            ));
        }
        for (name, g) in &right.generators {
            generators.push((
                format!("{name}.1"),
                GroupElement::pair(left.identity(), g.clone()),
            ));
        }
        Self::from_parts(
            format!("{} x {}", left.name, right.name),
            Family::Direct {
                left: left.clone(),
                right: right.clone(),
            },
            generators,
            left.order * right.order,
        )
    }

    /// `Z_m^r` extended by `acting`. Generators: the normal basis followed by
    /// the acting group's generators.
    pub fn semidirect(name: String, acting: Arc<FiniteGroup>, action: Arc<ActionSpec>) -> Self {
        let normal = action.normal;
        let id = action.id;
        let mut generators = Vec::new();
        let basis: &[[u32; 2]] = if normal.rank == 1 {
            &[[1, 0]]
        } else {
            &[[1, 0], [0, 1]]
        };
        for (i, v) in basis.iter().enumerate() {
            generators.push((
                format!("n{i}"),
                GroupElement::semi(normal.element(*v), acting.identity(), id),
            ));
        }
        for (gname, g) in &acting.generators {
            generators.push((
                gname.clone(),
                GroupElement::semi(normal.element([0, 0]), g.clone(), id),
            ));
        }
        let order = normal.order() * acting.order;
        Self::from_parts(
            name,
            Family::Semidirect {
                normal,
                acting,
                action,
            },
            generators,
            order,
        )
    }

    /// `PSL(2, f)` (`special`) or `PGL(2, f)` on normalized matrices.
    pub fn projective(f: u32, special: bool) -> Result<Self, GroupError> {
        let p = f as u64;
        fields::ensure_odd_prime(p)?;
        if f < 5 {
            return Err(GroupError::InvalidParameter(format!(
                "projective groups need f >= 5, got {f}"
            )));
        }
        let mut generators = vec![
            ("u".into(), GroupElement::Projective(Gl2Matrix::new([1, 1, 0, 1], p)?)),
            ("w".into(), GroupElement::Projective(Gl2Matrix::new([0, 1, -1, 0], p)?.normalized())),
        ];
        let full = p * (p * p - 1);
        let (name, order) = if special {
            (format!("PSL(2,{f})"), full / 2)
        } else {
            let omega = primitive_root(p);
            generators.push((
                "h".into(),
                GroupElement::Projective(Gl2Matrix::new([omega as i64, 0, 0, 1], p)?.normalized()),
            ));
            (format!("PGL(2,{f})"), full)
        };
        Ok(Self::from_parts(
            name,
            Family::Projective { f, special },
            generators,
            order,
        ))
    }

    /// Quotient by a normal subgroup given as an element list. Elements of the
    /// quotient are the minimal members of each coset.
    pub fn quotient(parent: Arc<FiniteGroup>, normal: &[GroupElement]) -> Result<Self, GroupError> {
        let nset: HashSet<GroupElement> = normal.iter().cloned().collect();
        if !parent.is_normal(&nset)? {
            return Err(GroupError::NotNormal);
        }
        let mut reps = HashMap::with_capacity(parent.order as usize);
        for g in parent.elements()? {
            if reps.contains_key(g) {
                continue;
            }
            let coset: Vec<GroupElement> = nset.iter().map(|n| parent.mul(g, n)).collect();
            let rep = coset.iter().min().expect("nonempty coset").clone();
            for c in coset {
                reps.insert(c, rep.clone());
            }
        }
        let generators = parent
            .generators
            .iter()
            .map(|(n, g)| (n.clone(), reps[g].clone()))
            .collect();
        let order = parent.order / nset.len() as u64;
        Ok(Self::from_parts(
            format!("{}/N{}", parent.name, nset.len()),
            Family::Quotient {
                parent: parent.clone(),
                reps: Arc::new(reps),
            },
            generators,
            order,
        ))
    }

    pub fn with_limit(mut self, limit: u64) -> Self {
        self.limit = limit;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Replaces the named generating set. Callers guarantee it generates.
    pub fn with_generators(mut self, generators: Vec<(String, GroupElement)>) -> Self {
        self.generators = generators;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn generators(&self) -> &[(String, GroupElement)] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<&GroupElement> {
        self.generators
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
    }

    pub fn generator_list(&self) -> Vec<GroupElement> {
        self.generators.iter().map(|(_, g)| g.clone()).collect()
    }

    pub fn identity(&self) -> GroupElement {
        match &self.family {
            Family::Cyclic { .. } => GroupElement::Cyclic(0),
            Family::Dihedral { .. } => GroupElement::rotation(0),
            Family::Direct { left, right } => GroupElement::pair(left.identity(), right.identity()),
            Family::Semidirect {
                normal,
                acting,
                action,
            } => GroupElement::semi(normal.element([0, 0]), acting.identity(), action.id),
            Family::Projective { f, .. } => {
                GroupElement::Projective(Gl2Matrix::identity(*f as u64))
            }
            Family::Quotient { parent, reps } => reps[&parent.identity()].clone(),
        }
    }

    /// Shallow membership test on the element encoding.
    pub fn contains(&self, g: &GroupElement) -> bool {
        match (&self.family, g) {
            (Family::Cyclic { n }, GroupElement::Cyclic(v)) => v < n,
            (Family::Dihedral { n }, GroupElement::Dihedral { rotation, .. }) => rotation < n,
            (Family::Direct { left, right }, GroupElement::Pair(l, r)) => {
                left.contains(l) && right.contains(r)
            }
            (
                Family::Semidirect {
                    normal,
                    acting,
                    action: spec,
                },
                GroupElement::SemiPair {
                    normal: n,
                    acting: h,
                    action,
                },
            ) => *action == spec.id && normal.vector(n).is_some() && acting.contains(h),
            (Family::Projective { f, special }, GroupElement::Projective(m)) => {
                m.modulus() == *f as u64
                    && m.det() != 0
                    && m.normalized() == *m
                    && (!special || is_square_det(m))
            }
            (Family::Quotient { reps, .. }, g) => reps.get(g) == Some(g),
            _ => false,
        }
    }

    fn check(&self, g: &GroupElement) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(GroupError::FamilyMismatch {
                element: g.to_string(),
                group: self.name.clone(),
            })
        }
    }

    /// Checked product.
    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    /// Checked inverse.
    pub fn invert(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        Ok(self.inv(g))
    }

    /// Unchecked product; both arguments must belong to the group.
    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        use GroupElement as E;
        match (&self.family, g, h) {
            (Family::Cyclic { n }, E::Cyclic(a), E::Cyclic(b)) => {
                E::Cyclic(((*a as u64 + *b as u64) % *n as u64) as u32)
            }
            (
                Family::Dihedral { n },
                E::Dihedral {
                    reflection: s1,
                    rotation: a,
                },
                E::Dihedral {
                    reflection: s2,
                    rotation: b,
                },
            ) => {
                let n = *n as u64;
                let (a, b) = (*a as u64, *b as u64);
                let rotation = if *s2 { (b + n - a) % n } else { (a + b) % n };
                E::Dihedral {
                    reflection: s1 ^ s2,
                    rotation: rotation as u32,
                }
            }
            (Family::Direct { left, right }, E::Pair(l1, r1), E::Pair(l2, r2)) => {
                E::pair(left.mul(l1, l2), right.mul(r1, r2))
            }
            (
                Family::Semidirect {
                    normal,
                    acting,
                    action,
                },
                E::SemiPair {
                    normal: n1,
                    acting: h1,
                    ..
                },
                E::SemiPair {
                    normal: n2,
                    acting: h2,
                    ..
                },
            ) => {
                let v1 = normal.vector(n1).expect("normal part");
                let v2 = action.image(h1).apply(normal.vector(n2).expect("normal part"));
                let m = normal.modulus;
                let v = [(v1[0] + v2[0]) % m, (v1[1] + v2[1]) % m];
                E::semi(normal.element(v), acting.mul(h1, h2), action.id)
            }
            (Family::Projective { .. }, E::Projective(a), E::Projective(b)) => {
                E::Projective(a.mul(b).normalized())
            }
            (Family::Quotient { parent, reps }, a, b) => reps[&parent.mul(a, b)].clone(),
            _ => panic!("element family mismatch in {}: {g} * {h}", self.name),
        }
    }

    /// Unchecked inverse.
    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        use GroupElement as E;
        match (&self.family, g) {
            (Family::Cyclic { n }, E::Cyclic(a)) => E::Cyclic((n - a) % n),
            (Family::Dihedral { n }, E::Dihedral { reflection, rotation }) => {
                if *reflection {
                    g.clone()
                } else {
                    E::rotation((n - rotation) % n)
                }
            }
            (Family::Direct { left, right }, E::Pair(l, r)) => E::pair(left.inv(l), right.inv(r)),
            (
                Family::Semidirect {
                    normal,
                    acting,
                    action,
                },
                E::SemiPair {
                    normal: n, acting: h, ..
                },
            ) => {
                let h_inv = acting.inv(h);
                let v = action.image(&h_inv).apply(normal.vector(n).expect("normal part"));
                let m = normal.modulus;
                let neg = [(m - v[0]) % m, (m - v[1]) % m];
                E::semi(normal.element(neg), h_inv, action.id)
            }
            (Family::Projective { .. }, E::Projective(a)) => E::Projective(a.adjugate().normalized()),
            (Family::Quotient { parent, reps }, a) => reps[&parent.inv(a)].clone(),
            _ => panic!("element family mismatch in {}: {g}", self.name),
        }
    }

    pub fn pow(&self, g: &GroupElement, mut exp: u64) -> GroupElement {
        let mut acc = self.identity();
        let mut base = g.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// `h g h^-1`.
    pub fn conjugate(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.mul(&self.mul(h, g), &self.inv(h))
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        *g == self.identity()
    }

    pub fn is_involution(&self, g: &GroupElement) -> bool {
        !self.is_identity(g) && self.is_identity(&self.mul(g, g))
    }

    pub fn element_order(&self, g: &GroupElement) -> u64 {
        let id = self.identity();
        let mut acc = g.clone();
        let mut e = 1;
        while acc != id {
            acc = self.mul(&acc, g);
            e += 1;
            assert!(e <= self.order, "element order exceeds |G| in {}", self.name);
        }
        e
    }

    pub fn ensure_enumerable(&self) -> Result<(), GroupError> {
        if self.order > self.limit {
            Err(GroupError::OrderLimitExceeded {
                order: self.order,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    /// All elements in sorted order.
    pub fn elements(&self) -> Result<&[GroupElement], GroupError> {
        self.ensure_enumerable()?;
        Ok(self.elements.get_or_init(|| {
            let mut all = self.enumerate();
            all.sort();
            all.dedup();
            assert_eq!(
                all.len() as u64,
                self.order,
                "enumeration of {} disagrees with its order",
                self.name
            );
            all
        }))
    }

    fn enumerate(&self) -> Vec<GroupElement> {
        match &self.family {
            Family::Cyclic { n } => (0..*n).map(GroupElement::Cyclic).collect(),
            Family::Dihedral { n } => (0..*n)
                .flat_map(|k| [GroupElement::rotation(k), GroupElement::reflection(k)])
                .collect(),
            Family::Direct { left, right } => {
                let ls = left.enumerate();
                let rs = right.enumerate();
                ls.iter()
                    .flat_map(|l| rs.iter().map(move |r| GroupElement::pair(l.clone(), r.clone())))
                    .collect()
            }
            Family::Semidirect {
                normal,
                acting,
                action,
            } => {
                let hs = acting.enumerate();
                normal
                    .all_vectors()
                    .into_iter()
                    .flat_map(|v| {
                        hs.iter()
                            .map(move |h| GroupElement::semi(normal.element(v), h.clone(), action.id))
                    })
                    .collect()
            }
            Family::Projective { f, special } => {
                let p = *f;
                let mut out = Vec::new();
                let mut push = |e: [u32; 4]| {
                    let m = Gl2Matrix::from_raw(e, p);
                    if m.det() != 0 && (!special || is_square_det(&m)) {
                        out.push(GroupElement::Projective(m));
                    }
                };
                for b in 0..p {
                    for c in 0..p {
                        for d in 0..p {
                            push([1, b, c, d]);
                        }
                    }
                }
                for c in 1..p {
                    for d in 0..p {
                        push([0, 1, c, d]);
                    }
                }
                out
            }
            Family::Quotient { reps, .. } => {
                let set: HashSet<&GroupElement> = reps.values().collect();
                set.into_iter().cloned().collect()
            }
        }
    }

    /// Subgroup generated by `seeds`, by breadth-first right multiplication.
    /// With a cap, gives up once more than `cap` elements are found.
    pub fn closure(&self, seeds: &[GroupElement], cap: Option<u64>) -> Closure {
        let mut set = HashSet::new();
        let id = self.identity();
        set.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in seeds {
                let h = self.mul(&g, s);
                if set.insert(h.clone()) {
                    if let Some(c) = cap {
                        if set.len() as u64 > c {
                            return Closure::CapExceeded;
                        }
                    }
                    queue.push_back(h);
                }
            }
        }
        Closure::Complete(set)
    }

    /// Order of the subgroup generated by `seeds`.
    pub fn subgroup_order(&self, seeds: &[GroupElement]) -> u64 {
        self.closure(seeds, None).len().expect("uncapped closure") as u64
    }

    /// Largest order of a proper subgroup of `PSL(2, f)`, bounded from above.
    pub fn dickson_bound(f: u64) -> u64 {
        (f * (f - 1) / 2).max(2 * (f + 1)).max(120).max(48)
    }

    pub fn generates(&self, seeds: &[GroupElement]) -> bool {
        self.generates_with(seeds, true)
    }

    /// Generation test. For projective families with `dickson` on, the
    /// closure stops early once it is too large to be a proper subgroup.
    pub fn generates_with(&self, seeds: &[GroupElement], dickson: bool) -> bool {
        if let (true, Family::Projective { f, special }) = (dickson, &self.family) {
            let bound = Self::dickson_bound(*f as u64);
            if *special {
                return match self.closure(seeds, Some(bound)) {
                    Closure::CapExceeded => true,
                    Closure::Complete(s) => s.len() as u64 == self.order,
                };
            }
            // A subgroup of PGL(2, f) larger than twice the PSL bound meets
            // PSL(2, f) in more than the PSL bound, so it contains PSL(2, f).
            return match self.closure(seeds, Some(2 * bound)) {
                Closure::CapExceeded => seeds.iter().any(|g| !self.is_psl_member(g)),
                Closure::Complete(s) => s.len() as u64 == self.order,
            };
        }
        matches!(self.closure(seeds, Some(self.order)), Closure::Complete(s) if s.len() as u64 == self.order)
    }

    /// Whether a projective element lies in `PSL(2, f)`. Non-projective
    /// elements report `true`.
    pub fn is_psl_member(&self, g: &GroupElement) -> bool {
        match g {
            GroupElement::Projective(m) => is_square_det(m),
            _ => true,
        }
    }

    pub fn involutions(&self) -> Result<Vec<GroupElement>, GroupError> {
        Ok(self
            .elements()?
            .iter()
            .filter(|g| self.is_involution(g))
            .cloned()
            .collect())
    }

    /// Odd Sylow subgroups cyclic and Sylow 2-subgroups of order at most 2 or
    /// with a cyclic subgroup of index 2, decided from element orders.
    pub fn is_almost_sylow_cyclic(&self) -> Result<bool, GroupError> {
        let mut best: HashMap<u64, u64> = HashMap::new();
        for g in self.elements()? {
            let ord = self.element_order(g);
            for (s, _) in fields::prime_factors(ord) {
                let part = fields::p_part(ord, s);
                let e = best.entry(s).or_insert(1);
                *e = (*e).max(part);
            }
        }
        for (s, _) in fields::prime_factors(self.order) {
            let sylow = fields::p_part(self.order, s);
            let have = best.get(&s).copied().unwrap_or(1);
            let ok = if s == 2 {
                sylow <= 2 || have >= sylow / 2
            } else {
                have == sylow
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Normality of a subgroup given as a set, by conjugating each member
    /// with the group generators.
    pub fn is_normal(&self, subgroup: &HashSet<GroupElement>) -> Result<bool, GroupError> {
        for n in subgroup {
            self.check(n)?;
        }
        for (_, g) in &self.generators {
            for n in subgroup {
                if !subgroup.contains(&self.conjugate(n, g)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Smallest normal subgroup containing `g`.
    pub fn normal_closure(&self, g: &GroupElement) -> Result<HashSet<GroupElement>, GroupError> {
        let conjugates: HashSet<GroupElement> = self
            .elements()?
            .iter()
            .map(|h| self.conjugate(g, h))
            .collect();
        let seeds: Vec<GroupElement> = conjugates.into_iter().collect();
        Ok(self.closure(&seeds, None).into_set().expect("uncapped closure"))
    }
}

fn is_square_det(m: &Gl2Matrix) -> bool {
    fields::quadratic_residue(FpElement::from_u64(m.det(), m.modulus()))
}

/// Smallest primitive root modulo an odd prime.
pub fn primitive_root(p: u64) -> u64 {
    let factors = fields::prime_factors(p - 1);
    (2..p)
        .find(|&g| {
            factors
                .iter()
                .all(|(s, _)| FpElement::from_u64(g, p).pow((p - 1) / s).value() != 1)
        })
        .expect("prime fields have primitive roots")
}

/// Whether `a[i] -> b[i]` extends to an isomorphism `<a> -> <b>`, where the
/// triples generate `g` and `h`. Decided by closing the pairs `(a[i], b[i])`
/// under componentwise products and watching for collisions.
pub fn triple_isomorphic(
    g: &FiniteGroup,
    a: &[GroupElement; 3],
    h: &FiniteGroup,
    b: &[GroupElement; 3],
) -> Result<bool, GroupError> {
    if g.order() != h.order() {
        return Ok(false);
    }
    for i in 0..3 {
        for j in i..3 {
            let x = if i == j { a[i].clone() } else { g.mul(&a[i], &a[j]) };
            let y = if i == j { b[i].clone() } else { h.mul(&b[i], &b[j]) };
            if g.element_order(&x) != h.element_order(&y) {
                return Ok(false);
            }
        }
    }
    g.ensure_enumerable()?;
    h.ensure_enumerable()?;
    let mut forward: HashMap<GroupElement, GroupElement> = HashMap::new();
    let mut image: HashSet<GroupElement> = HashSet::new();
    let (e, f) = (g.identity(), h.identity());
    forward.insert(e.clone(), f.clone());
    image.insert(f.clone());
    let mut queue = VecDeque::from([(e, f)]);
    while let Some((x, y)) = queue.pop_front() {
        for k in 0..3 {
            let nx = g.mul(&x, &a[k]);
            let ny = h.mul(&y, &b[k]);
            match forward.get(&nx) {
                Some(existing) => {
                    if *existing != ny {
                        return Ok(false);
                    }
                }
                None => {
                    if !image.insert(ny.clone()) {
                        return Ok(false);
                    }
                    forward.insert(nx.clone(), ny.clone());
                    queue.push_back((nx, ny));
                }
            }
        }
    }
    Ok(forward.len() as u64 == g.order())
}
