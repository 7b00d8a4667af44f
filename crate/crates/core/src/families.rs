//! Constructors for the explicit groups and maps of the classification.
//!
//! * `G1(j,k) = D_{2j} x D_{2k}` with map `(bc, a, d)` of type `{2j, 2k}`;
//! * `G2(x,n,p) = Z_p^2 : D_{2n}` with map `(c, ab(cd)^{n/2}, d)` of type `{2p, n}`;
//! * `G3(u) = Z_2^2 : D_{2u}` with map `(c, d, a)` of type `{u, 4}`;
//! * `PSL(2,f)`, `PGL(2,f)` and `Z_d : PGL(2,f)`, where `PSL(2,f)` centralizes
//!   `Z_d` and the other coset inverts it.
//!
//! In the semidirect products `h n h^-1` is the action of `h` on `n`. For
//! `G2` the generators act on exponent vectors over the basis `{a, b}` by
//! `c = [[-1, x], [0, 1]]` and `d = [[0, 1], [1, 0]]`, so conjugation
//! `v -> (cd)^-1 v (cd)` is `d c = M(x)`.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use thiserror::Error;

use crate::fields::{self, FieldError};
use crate::groups::{ActionSpec, AutMatrix, Family, FiniteGroup, GroupElement, GroupError, NormalPart};
use crate::maps::{self, AlgebraicMap, MapError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("{0}")]
    InvalidParameter(String),
    #[error("x = {x} is not in S({n}, {p})")]
    NotInSnp { x: u64, n: u64, p: u64 },
    #[error("lift precondition violated: {0}")]
    LiftPrecondition(String),
    #[error("{message} at {}..{}", span.start, span.end)]
    Parse { message: String, span: Range<usize> },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Map(#[from] MapError),
}

fn invalid(msg: impl Into<String>) -> FamilyError {
    FamilyError::InvalidParameter(msg.into())
}

fn named(gens: [(&str, GroupElement); 4]) -> Vec<(String, GroupElement)> {
    gens.into_iter().map(|(n, g)| (n.to_string(), g)).collect()
}

pub fn build_g1(j: u32, k: u32) -> Result<Arc<FiniteGroup>, FamilyError> {
    if j < 3 || k < 3 || j % 2 == 0 || k % 2 == 0 {
        return Err(invalid(format!("G1 needs odd j, k >= 3, got ({j}, {k})")));
    }
    let left = Arc::new(FiniteGroup::dihedral(j)?);
    let right = Arc::new(FiniteGroup::dihedral(k)?);
    let (e1, e2) = (left.identity(), right.identity());
    let gens = named([
        ("a", GroupElement::pair(GroupElement::reflection(0), e2.clone())),
        ("b", GroupElement::pair(GroupElement::reflection(1), e2)),
        ("c", GroupElement::pair(e1.clone(), GroupElement::reflection(0))),
        ("d", GroupElement::pair(e1, GroupElement::reflection(1))),
    ]);
    Ok(Arc::new(
        FiniteGroup::direct(left, right)
            .with_name(format!("G1({j},{k})"))
            .with_generators(gens),
    ))
}

fn gen(g: &FiniteGroup, name: &str) -> GroupElement {
    g.generator(name)
        .unwrap_or_else(|| panic!("{} has no generator {name}", g.name()))
        .clone()
}

pub fn build_m1(j: u32, k: u32) -> Result<AlgebraicMap, FamilyError> {
    let g = build_g1(j, k)?;
    let r = g.mul(&gen(&g, "b"), &gen(&g, "c"));
    let (t, l) = (gen(&g, "a"), gen(&g, "d"));
    Ok(maps::validate(g, r, t, l)?)
}

pub fn build_g2(x: u64, n: u64, p: u64) -> Result<Arc<FiniteGroup>, FamilyError> {
    let snp = fields::s_set(n, p)?;
    if !snp.contains(x) {
        return Err(FamilyError::NotInSnp { x, n, p });
    }
    let acting = Arc::new(FiniteGroup::dihedral(n as u32)?);
    let normal = NormalPart {
        modulus: p as u32,
        rank: 2,
    };
    let c = GroupElement::reflection(0);
    let d = GroupElement::reflection(1);
    let label = format!("g2:x={x},n={n},p={p}");
    let action = ActionSpec::new(
        &label,
        normal,
        &acting,
        vec![
            (c.clone(), AutMatrix::new([-1, x as i64, 0, 1], normal)),
            (d.clone(), AutMatrix::new([0, 1, 1, 0], normal)),
        ],
    )?;
    let id = action.id();
    let zero = normal.element([0, 0]);
    let gens = named([
        ("a", GroupElement::semi(normal.element([1, 0]), acting.identity(), id)),
        ("b", GroupElement::semi(normal.element([0, 1]), acting.identity(), id)),
        ("c", GroupElement::semi(zero.clone(), c, id)),
        ("d", GroupElement::semi(zero, d, id)),
    ]);
    Ok(Arc::new(
        FiniteGroup::semidirect(format!("G2({x},{n},{p})"), acting, Arc::new(action))
            .with_generators(gens),
    ))
}

pub fn build_m2(x: u64, n: u64, p: u64) -> Result<AlgebraicMap, FamilyError> {
    let g = build_g2(x, n, p)?;
    let (a, b, c, d) = (gen(&g, "a"), gen(&g, "b"), gen(&g, "c"), gen(&g, "d"));
    let z = g.pow(&g.mul(&c, &d), n / 2);
    let t = g.mul(&g.mul(&a, &b), &z);
    Ok(maps::validate(g, c, t, d)?)
}

pub fn build_g3(u: u64) -> Result<Arc<FiniteGroup>, FamilyError> {
    if u % 6 != 3 {
        return Err(invalid(format!("G3 needs u = 3 mod 6, got {u}")));
    }
    let acting = Arc::new(FiniteGroup::dihedral(u as u32)?);
    let normal = NormalPart { modulus: 2, rank: 2 };
    let c = GroupElement::reflection(0);
    let d = GroupElement::reflection(1);
    let action = ActionSpec::new(
        &format!("g3:u={u}"),
        normal,
        &acting,
        vec![
            (c.clone(), AutMatrix::new([0, 1, 1, 0], normal)),
            (d.clone(), AutMatrix::new([1, 1, 0, 1], normal)),
        ],
    )?;
    let id = action.id();
    let zero = normal.element([0, 0]);
    let gens = named([
        ("a", GroupElement::semi(normal.element([1, 0]), acting.identity(), id)),
        ("b", GroupElement::semi(normal.element([0, 1]), acting.identity(), id)),
        ("c", GroupElement::semi(zero.clone(), c, id)),
        ("d", GroupElement::semi(zero, d, id)),
    ]);
    Ok(Arc::new(
        FiniteGroup::semidirect(format!("G3({u})"), acting, Arc::new(action)).with_generators(gens),
    ))
}

pub fn build_m3(u: u64) -> Result<AlgebraicMap, FamilyError> {
    let g = build_g3(u)?;
    let (a, c, d) = (gen(&g, "a"), gen(&g, "c"), gen(&g, "d"));
    Ok(maps::validate(g, c, d, a)?)
}

pub fn build_psl2(f: u64) -> Result<Arc<FiniteGroup>, FamilyError> {
    Ok(Arc::new(FiniteGroup::projective(checked_f(f)?, true)?))
}

pub fn build_pgl2(f: u64) -> Result<Arc<FiniteGroup>, FamilyError> {
    Ok(Arc::new(FiniteGroup::projective(checked_f(f)?, false)?))
}

fn checked_f(f: u64) -> Result<u32, FamilyError> {
    if f < 5 || !fields::is_prime(f) || f > u32::MAX as u64 {
        return Err(invalid(format!("f must be a prime >= 5, got {f}")));
    }
    Ok(f as u32)
}

/// `Z_d : PGL(2, f)` with generators `alpha`, then those of `PGL(2, f)`.
pub fn build_zd_pgl2(d: u64, f: u64) -> Result<Arc<FiniteGroup>, FamilyError> {
    if d == 0 || d > u32::MAX as u64 {
        return Err(invalid(format!("d must be positive, got {d}")));
    }
    let acting = build_pgl2(f)?;
    let normal = NormalPart {
        modulus: d as u32,
        rank: 1,
    };
    let images = acting
        .generators()
        .iter()
        .map(|(_, g)| {
            let sign = if acting.is_psl_member(g) { 1 } else { -1 };
            (g.clone(), AutMatrix::scalar(sign, normal))
        })
        .collect();
    let action = ActionSpec::new(&format!("zdpgl:d={d},f={f}"), normal, &acting, images)?;
    let id = action.id();
    let mut gens = vec![(
        "alpha".to_string(),
        GroupElement::semi(normal.element([1, 0]), acting.identity(), id),
    )];
    for (name, g) in acting.generators() {
        gens.push((
            name.clone(),
            GroupElement::semi(normal.element([0, 0]), g.clone(), id),
        ));
    }
    Ok(Arc::new(
        FiniteGroup::semidirect(format!("Z{d}:PGL(2,{f})"), acting, Arc::new(action))
            .with_generators(gens),
    ))
}

/// Lifts `M(PGL(2,f); x, y, z)` to `M(Z_d : PGL(2,f); alpha^k x, y, z)` of
/// type `{dm, n}`. Needs `x, y` outside `PSL(2,f)`, `z` inside, and
/// `gcd(d, m) = gcd(d, k) = 1` where `m = |xy|`.
pub fn lift_map(d: u64, base: &AlgebraicMap, alpha_power: u64) -> Result<AlgebraicMap, FamilyError> {
    let pgl = base.group();
    let f = match pgl.family() {
        Family::Projective { f, special: false } => *f as u64,
        _ => {
            return Err(FamilyError::LiftPrecondition(format!(
                "base group {} is not PGL(2,f)",
                pgl.name()
            )))
        }
    };
    let (x, y, z) = (base.r(), base.t(), base.l());
    if pgl.is_psl_member(x) || pgl.is_psl_member(y) {
        return Err(FamilyError::LiftPrecondition(
            "x and y must lie outside PSL(2,f)".into(),
        ));
    }
    if !pgl.is_psl_member(z) {
        return Err(FamilyError::LiftPrecondition("z must lie in PSL(2,f)".into()));
    }
    let m = base.map_type().0;
    if d.gcd(&m) != 1 {
        return Err(FamilyError::LiftPrecondition(format!("gcd(d, m) = gcd({d}, {m}) != 1")));
    }
    if d.gcd(&alpha_power) != 1 {
        return Err(FamilyError::LiftPrecondition(format!(
            "alpha^{alpha_power} does not generate Z_{d}"
        )));
    }
    let g = build_zd_pgl2(d, f)?;
    let id = match g.family() {
        Family::Semidirect { action, .. } => action.id(),
        _ => unreachable!("semidirect family"),
    };
    let lift = |k: u64, e: &GroupElement| {
        GroupElement::semi(GroupElement::Cyclic((k % d) as u32), e.clone(), id)
    };
    Ok(maps::validate(g, lift(alpha_power, x), lift(0, y), lift(0, z))?)
}

/// Group parameters with the canonical text form `tag:key=value,...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyParams {
    G1 { j: u64, k: u64 },
    G2 { x: u64, n: u64, p: u64 },
    G3 { u: u64 },
    Psl { f: u64 },
    Pgl { f: u64 },
    ZdPgl { d: u64, f: u64 },
    Cyclic { n: u64 },
    Dihedral { n: u64 },
}

impl FamilyParams {
    pub fn build(&self) -> Result<Arc<FiniteGroup>, FamilyError> {
        match *self {
            Self::G1 { j, k } => build_g1(to_u32(j)?, to_u32(k)?),
            Self::G2 { x, n, p } => build_g2(x, n, p),
            Self::G3 { u } => build_g3(u),
            Self::Psl { f } => build_psl2(f),
            Self::Pgl { f } => build_pgl2(f),
            Self::ZdPgl { d, f } => build_zd_pgl2(d, f),
            Self::Cyclic { n } => Ok(Arc::new(FiniteGroup::cyclic(to_u32(n)?)?)),
            Self::Dihedral { n } => Ok(Arc::new(FiniteGroup::dihedral(to_u32(n)?)?)),
        }
    }

    /// Group order from the family formula.
    pub fn order(&self) -> u64 {
        match *self {
            Self::G1 { j, k } => 4 * j * k,
            Self::G2 { n, p, .. } => 2 * n * p * p,
            Self::G3 { u } => 8 * u,
            Self::Psl { f } => f * (f * f - 1) / 2,
            Self::Pgl { f } => f * (f * f - 1),
            Self::ZdPgl { d, f } => d * f * (f * f - 1),
            Self::Cyclic { n } => n,
            Self::Dihedral { n } => 2 * n,
        }
    }
}

fn to_u32(v: u64) -> Result<u32, FamilyError> {
    u32::try_from(v).map_err(|_| invalid(format!("{v} is too large")))
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::G1 { j, k } => write!(f, "g1:j={j},k={k}"),
            Self::G2 { x, n, p } => write!(f, "g2:x={x},n={n},p={p}"),
            Self::G3 { u } => write!(f, "g3:u={u}"),
            Self::Psl { f: q } => write!(f, "psl:f={q}"),
            Self::Pgl { f: q } => write!(f, "pgl:f={q}"),
            Self::ZdPgl { d, f: q } => write!(f, "zdpgl:d={d},f={q}"),
            Self::Cyclic { n } => write!(f, "cyclic:n={n}"),
            Self::Dihedral { n } => write!(f, "dihedral:n={n}"),
        }
    }
}

impl FromStr for FamilyParams {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let spec = Spec::parse(s)?;
        let v = |k: &str| spec.get(k);
        Ok(match spec.tag {
            "g1" => Self::G1 { j: v("j"), k: v("k") },
            "g2" => Self::G2 { x: v("x"), n: v("n"), p: v("p") },
            "g3" => Self::G3 { u: v("u") },
            "psl" => Self::Psl { f: v("f") },
            "pgl" => Self::Pgl { f: v("f") },
            "zdpgl" => Self::ZdPgl { d: v("d"), f: v("f") },
            "cyclic" => Self::Cyclic { n: v("n") },
            "dihedral" => Self::Dihedral { n: v("n") },
            _ => unreachable!("tag checked by the parser"),
        })
    }
}

/// Map parameters with the canonical text form `m2:x=1,n=6,p=5`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapParams {
    M1 { j: u64, k: u64 },
    M2 { x: u64, n: u64, p: u64 },
    M3 { u: u64 },
    /// Lift of a `PGL(2, f)` map of type `(m, n)` to `Z_d : PGL(2, f)`.
    Lift { d: u64, f: u64, m: u64, n: u64 },
}

impl MapParams {
    pub fn group_params(&self) -> FamilyParams {
        match *self {
            Self::M1 { j, k } => FamilyParams::G1 { j, k },
            Self::M2 { x, n, p } => FamilyParams::G2 { x, n, p },
            Self::M3 { u } => FamilyParams::G3 { u },
            Self::Lift { d, f, .. } => FamilyParams::ZdPgl { d, f },
        }
    }
}

impl fmt::Display for MapParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::M1 { j, k } => write!(f, "m1:j={j},k={k}"),
            Self::M2 { x, n, p } => write!(f, "m2:x={x},n={n},p={p}"),
            Self::M3 { u } => write!(f, "m3:u={u}"),
            Self::Lift { d, f: q, m, n } => write!(f, "lift:d={d},f={q},m={m},n={n}"),
        }
    }
}

impl FromStr for MapParams {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let spec = Spec::parse(s)?;
        let v = |k: &str| spec.get(k);
        Ok(match spec.tag {
            "m1" => Self::M1 { j: v("j"), k: v("k") },
            "m2" => Self::M2 { x: v("x"), n: v("n"), p: v("p") },
            "m3" => Self::M3 { u: v("u") },
            "lift" => Self::Lift { d: v("d"), f: v("f"), m: v("m"), n: v("n") },
            _ => unreachable!("tag checked by the parser"),
        })
    }
}

const GRAMMAR: &[(&str, &[&str])] = &[
    ("g1", &["j", "k"]),
    ("g2", &["x", "n", "p"]),
    ("g3", &["u"]),
    ("psl", &["f"]),
    ("pgl", &["f"]),
    ("zdpgl", &["d", "f"]),
    ("cyclic", &["n"]),
    ("dihedral", &["n"]),
    ("m1", &["j", "k"]),
    ("m2", &["x", "n", "p"]),
    ("m3", &["u"]),
    ("lift", &["d", "f", "m", "n"]),
];

struct Spec<'a> {
    tag: &'a str,
    values: Vec<(&'a str, u64)>,
}

impl<'a> Spec<'a> {
    fn get(&self, key: &str) -> u64 {
        self.values
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .expect("key checked by the parser")
    }

    /// `tag:key=value(,key=value)*`, each key of the tag exactly once.
    fn parse(s: &'a str) -> Result<Self, FamilyError> {
        let err = |message: String, span: Range<usize>| FamilyError::Parse { message, span };
        let colon = s
            .find(':')
            .ok_or_else(|| err("expected `tag:key=value,...`".into(), 0..s.len()))?;
        let tag = &s[..colon];
        let keys = GRAMMAR
            .iter()
            .find(|(t, _)| *t == tag)
            .map(|(_, k)| *k)
            .ok_or_else(|| err(format!("unknown family `{tag}`"), 0..colon))?;
        let mut values: Vec<(&str, u64)> = Vec::new();
        let mut offset = colon + 1;
        for item in s[colon + 1..].split(',') {
            let span = offset..offset + item.len();
            offset += item.len() + 1;
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key=value`, got `{item}`"), span.clone()))?;
            let key_span = span.start..span.start + key.len();
            if !keys.contains(&key) {
                return Err(err(format!("unknown key `{key}` for `{tag}`"), key_span));
            }
            if values.iter().any(|(k, _)| *k == key) {
                return Err(err(format!("duplicate key `{key}`"), key_span));
            }
            let value_span = key_span.end + 1..span.end;
            let parsed = value
                .parse::<u64>()
                .map_err(|_| err(format!("`{value}` is not a non-negative integer"), value_span))?;
            values.push((key, parsed));
        }
        if let Some(missing) = keys.iter().find(|k| !values.iter().any(|(v, _)| v == *k)) {
            return Err(err(format!("missing key `{missing}` for `{tag}`"), 0..s.len()));
        }
        Ok(Self { tag, values })
    }
}
