//! Permutation-group oracle. Groups are realised as permutation groups
//! built straight from their generator definitions, and map invariants are
//! computed by breadth-first closure, independently of the library's group
//! arithmetic.
#![allow(dead_code)]

pub mod suites;

use std::collections::{HashSet, VecDeque};

use regmaps::groups::GroupElement;

pub type Perm = Vec<u32>;

/// `a ∘ b`, applying `b` first.
pub fn compose(a: &Perm, b: &Perm) -> Perm {
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn identity(n: usize) -> Perm {
    (0..n as u32).collect()
}

pub fn is_identity(a: &Perm) -> bool {
    a.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

pub fn perm_order(a: &Perm) -> u64 {
    let mut x = a.clone();
    let mut k = 1;
    while !is_identity(&x) {
        x = compose(a, &x);
        k += 1;
    }
    k
}

/// Disjoint union: `a` on the first points, `b` on the rest.
pub fn join(a: &Perm, b: &Perm) -> Perm {
    let n = a.len() as u32;
    a.iter().copied().chain(b.iter().map(|&x| x + n)).collect()
}

pub fn closure(gens: &[Perm]) -> HashSet<Perm> {
    let n = gens[0].len();
    let mut seen: HashSet<Perm> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(identity(n));
    queue.push_back(identity(n));
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = compose(s, &g);
            if seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    seen
}

/// `x -> (i - x) mod n`.
pub fn reflection(n: u32, i: u32) -> Perm {
    (0..n).map(|x| (i + n - x) % n).collect()
}

/// `v -> A v + b` on `Z_m^2`, `A` row-major, points indexed `v0 + m v1`.
pub fn affine(m: u32, a: [i64; 4], b: [i64; 2]) -> Perm {
    let m64 = m as i64;
    let mut out = Vec::with_capacity((m * m) as usize);
    for v1 in 0..m64 {
        for v0 in 0..m64 {
            let w0 = (a[0] * v0 + a[1] * v1 + b[0]).rem_euclid(m64);
            let w1 = (a[2] * v0 + a[3] * v1 + b[1]).rem_euclid(m64);
            out.push((w0 + m64 * w1) as u32);
        }
    }
    out
}

/// `x -> e x + i` on `Z_d`.
pub fn affine1(d: u32, e: i64, i: i64) -> Perm {
    (0..d as i64).map(|x| (e * x + i).rem_euclid(d as i64) as u32).collect()
}

fn inv_mod(a: i64, f: i64) -> i64 {
    let mut r = 1;
    for _ in 0..f - 2 {
        r = r * a % f;
    }
    r
}

/// Möbius action of `[[a,b],[c,d]]` on the projective line; infinity is `f`.
pub fn mobius(f: u32, m: [i64; 4]) -> Perm {
    let fi = f as i64;
    let [a, b, c, d] = m.map(|v| v.rem_euclid(fi));
    let image = |z: Option<i64>| -> Option<i64> {
        let (num, den) = match z {
            Some(z) => ((a * z + b) % fi, (c * z + d) % fi),
            None => (a, c),
        };
        (den != 0).then(|| num * inv_mod(den, fi) % fi)
    };
    (0..=fi)
        .map(|z| {
            let z = if z == fi { None } else { Some(z) };
            image(z).unwrap_or(fi) as u32
        })
        .collect()
}

fn is_square(v: i64, f: i64) -> bool {
    let v = v.rem_euclid(f);
    v == 0 || (1..f).any(|x| x * x % f == v)
}

/// Permutation image of a projective element, or of `Z_d : PGL(2, f)`.
pub fn projective_perm(e: &GroupElement, d: u32) -> Perm {
    match e {
        GroupElement::Projective(m) => {
            let ent = m.entries().map(i64::from);
            mobius(m.modulus() as u32, ent)
        }
        GroupElement::SemiPair { normal, acting, .. } => {
            let (GroupElement::Cyclic(i), GroupElement::Projective(m)) = (normal.as_ref(), acting.as_ref()) else {
                panic!("not a Z_d : PGL element: {e}");
            };
            let ent = m.entries().map(i64::from);
            let f = m.modulus() as i64;
            let det = ent[0] * ent[3] - ent[1] * ent[2];
            let sign = if is_square(det, f) { 1 } else { -1 };
            join(&affine1(d, sign, *i as i64), &mobius(m.modulus() as u32, ent))
        }
        other => panic!("unsupported element {other}"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleMap {
    pub order: u64,
    pub x: u64,
    pub y: u64,
    pub vertices: u64,
    pub edges: u64,
    pub faces: u64,
    pub chi: i64,
    pub orientable: bool,
}

pub fn invariants(r: &Perm, t: &Perm, l: &Perm) -> OracleMap {
    for g in [r, t, l] {
        assert!(!is_identity(g) && is_identity(&compose(g, g)), "not an involution");
    }
    assert_eq!(compose(t, l), compose(l, t), "t and l do not commute");
    let order = closure(&[r.clone(), t.clone(), l.clone()]).len() as u64;
    let sub = |a: &Perm, b: &Perm| closure(&[a.clone(), b.clone()]).len() as u64;
    let vertices = order / sub(r, t);
    let edges = order / sub(t, l);
    let faces = order / sub(r, l);
    let even = sub(&compose(t, r), &compose(r, l));
    OracleMap {
        order,
        x: perm_order(&compose(r, t)),
        y: perm_order(&compose(r, l)),
        vertices,
        edges,
        faces,
        chi: vertices as i64 - edges as i64 + faces as i64,
        orientable: order / even == 2,
    }
}

fn power(a: &Perm, k: u64) -> Perm {
    let mut out = identity(a.len());
    for _ in 0..k {
        out = compose(a, &out);
    }
    out
}

/// `(bc, a, d)` in `D_2j x D_2k`.
pub fn m1(j: u32, k: u32) -> [Perm; 3] {
    let a = join(&reflection(j, 0), &identity(k as usize));
    let b = join(&reflection(j, 1), &identity(k as usize));
    let c = join(&identity(j as usize), &reflection(k, 0));
    let d = join(&identity(j as usize), &reflection(k, 1));
    [compose(&b, &c), a, d]
}

/// `(c, ab(cd)^(n/2), d)` in `Z_p^2 : D_2n`, `c -> [[-1,x],[0,1]]`, `d -> swap`.
pub fn m2(x: u32, n: u32, p: u32) -> [Perm; 3] {
    let nn = n as usize;
    let c = join(&affine(p, [-1, x as i64, 0, 1], [0, 0]), &reflection(n, 0));
    let d = join(&affine(p, [0, 1, 1, 0], [0, 0]), &reflection(n, 1));
    let a = join(&affine(p, [1, 0, 0, 1], [1, 0]), &identity(nn));
    let b = join(&affine(p, [1, 0, 0, 1], [0, 1]), &identity(nn));
    let t = compose(&compose(&a, &b), &power(&compose(&c, &d), (n / 2) as u64));
    [c, t, d]
}

/// `(c, d, a)` in `Z_2^2 : D_2u`, `c -> swap`, `d -> [[1,1],[0,1]]`.
pub fn m3(u: u32) -> [Perm; 3] {
    let c = join(&affine(2, [0, 1, 1, 0], [0, 0]), &reflection(u, 0));
    let d = join(&affine(2, [1, 1, 0, 1], [0, 0]), &reflection(u, 1));
    let a = join(&affine(2, [1, 0, 0, 1], [1, 0]), &identity(u as usize));
    [c, d, a]
}
