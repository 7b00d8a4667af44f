use std::collections::HashSet;

use regmaps::classify::{
    enumerate_cases, table1, table2, unmatched_maps, verify_sporadic_tables, ClassifyOptions, ClassifyReport,
    Existence, Status, ELIMINATED, TABLE3, TABLE4,
};
use regmaps::fields::is_prime;

fn classify(p: u64, q: u64) -> ClassifyReport {
    enumerate_cases(p, q, &ClassifyOptions::default()).unwrap()
}

fn prime_pairs(max_pq: u64) -> Vec<(u64, u64)> {
    let primes: Vec<u64> = (5..max_pq).filter(|&v| is_prime(v)).collect();
    let mut out = Vec::new();
    for &p in &primes {
        for &q in &primes {
            if q > p && p * q <= max_pq {
                out.push((p, q));
            }
        }
    }
    out
}

#[test]
fn table1_spot_rows() {
    let t = table1();
    assert_eq!(t.len(), 15);
    assert!(t.iter().any(|r| (r.x, r.y, r.k) == (3, 12, 6)));
    assert!(t.iter().any(|r| (r.x, r.y, r.k) == (5, 20, 2)));
}

#[test]
fn table1_against_wide_brute_force() {
    let mut brute = Vec::new();
    for x in 3..=200i64 {
        for y in x..=200i64 {
            let den = x * y - 2 * x - 2 * y;
            if den > 0 && (x * y) % den == 0 {
                brute.push((x as u64, y as u64, (x * y / den) as u64));
            }
        }
    }
    let rows: Vec<_> = table1().iter().map(|r| (r.x, r.y, r.k)).collect();
    assert_eq!(rows, brute);
}

#[test]
fn table2_divisibility_filter() {
    for (p, q) in prime_pairs(400) {
        for r in table2(p, q) {
            assert_eq!(r.order, 4 * r.k * p * q);
            assert_eq!(r.order % r.x, 0);
            assert_eq!(r.order % r.y, 0);
        }
    }
    assert!(table2(5, 7).iter().any(|r| (r.x, r.y, r.label.as_str()) == (5, 20, "40q")));
    assert!(!table2(7, 11).iter().any(|r| (r.x, r.y) == (5, 20)));
}

#[test]
fn classify_5_7_contents() {
    let r = classify(5, 7);
    let ids: HashSet<&str> = r.descriptors.iter().map(|d| d.id.as_str()).collect();
    for id in [
        "i:m1:j=3,k=19",
        "i:m1:j=3,k=19*",
        "i:m1:j=7,k=7",
        "ii:m2:x=0,n=4,p=7",
        "ii:m2:x=0,n=4,p=7*",
        "iii:m2:x=1,n=6,p=5",
        "iv:m3:u=39",
        "iv:m3:u=39*",
    ] {
        assert!(ids.contains(id), "missing {id}");
        assert_eq!(r.find(id).unwrap().status, Status::Constructed);
    }
    let vi3: Vec<_> = r.by_case("vi3").collect();
    assert!(!vi3.is_empty());
    assert!(vi3.iter().all(|d| d.status == Status::SearchConfirmed && d.group.order == 336));
    assert!(vi3.iter().any(|d| d.map_type == [6, 8]));
    let m22 = r.find("iii:m2:x=1,n=6,p=5").unwrap();
    assert_eq!((m22.map_type, m22.group.order), ([10, 6], 300));
    for d in &r.descriptors {
        if d.status.has_map() {
            assert_eq!(d.chi, -35, "{}", d.id);
            assert_eq!(d.map.as_ref().unwrap().euler_characteristic().unwrap(), -35);
        }
    }
    assert!(r.verification.all_ok(), "{:?}", r.verification);
}

#[test]
fn classify_5_7_lift_candidate_refuted() {
    let r = classify(5, 7);
    let vi1: Vec<_> = r.by_case("vi1").collect();
    assert_eq!(vi1.len(), 2);
    assert!(vi1.iter().all(|d| d.status == Status::SearchRefuted && d.group.order == 600));
}

#[test]
fn classify_7_37_constructs_lift() {
    let r = classify(7, 37);
    let d = r.find("vi1:lift:d=5,f=7,m=3,n=8").unwrap();
    assert_eq!(d.status, Status::Constructed);
    assert_eq!((d.map_type, d.group.order, d.chi), ([15, 8], 1680, -259));
}

#[test]
fn classify_5_23_emits_conditional_cover() {
    let r = classify(5, 23);
    let d = r.find("iii:cover:k=2,x=0,n=4,p=5").unwrap();
    assert_eq!(d.status, Status::Conditional);
    assert_eq!((d.map_type, d.group.order), ([50, 4], 1000));
    assert!(d.map.is_none());
}

#[test]
fn classify_7_13_reports_psl13_outcome() {
    let r = classify(7, 13);
    let v4: Vec<_> = r.by_case("v4").collect();
    assert_eq!(v4.len(), 1);
    assert_eq!(v4[0].status, Status::SearchRefuted);
    assert_eq!(v4[0].group.order, 1092);
    assert!(r.by_case("vi4").all(|d| d.status == Status::SearchConfirmed));
}

#[test]
fn reports_closed_under_duality_and_verified() {
    for (p, q) in prime_pairs(400) {
        let r = classify(p, q);
        assert!(r.verification.all_ok(), "({p},{q}): {:?}", r.verification.notes);
        for d in &r.descriptors {
            let partner = r.find(&d.dual_of).expect("dual present");
            assert_eq!(partner.dual_of, d.id);
            assert_eq!(partner.map_type, [d.map_type[1], d.map_type[0]]);
            assert!(d.group.order <= 84 * p * q);
        }
    }
}

#[test]
fn bad_inputs_rejected() {
    let o = ClassifyOptions::default();
    assert!(enumerate_cases(5, 5, &o).is_err());
    assert!(enumerate_cases(5, 15, &o).is_err());
    assert!(enumerate_cases(2, 7, &o).is_err());
}

#[test]
fn oracle_containment_up_to_pq_200() {
    let o = ClassifyOptions::default();
    for (p, q) in prime_pairs(200) {
        let r = enumerate_cases(p, q, &o).unwrap();
        let unmatched = unmatched_maps(&r, &o).unwrap();
        let listed: Vec<String> = unmatched
            .iter()
            .map(|(g, m)| format!("{g} type {:?}", m.map_type()))
            .collect();
        assert!(unmatched.is_empty(), "({p},{q}) unmatched: {listed:?}");
    }
}

#[test]
fn sporadic_tables() {
    let checks = verify_sporadic_tables(&ClassifyOptions::default()).unwrap();
    assert_eq!(checks.len(), TABLE3.len() + TABLE4.len() + ELIMINATED.len());
    assert!(checks.iter().all(|c| c.equation_holds));
    let row = |x, y, p, q| {
        checks
            .iter()
            .find(|c| (c.row.x, c.row.y, c.row.p, c.row.q) == (x, y, p, q) && c.table != "eliminated")
            .unwrap()
    };
    assert_eq!(row(6, 6, 7, 13).k, 3);
    assert_eq!(row(3, 8, 11, 23).k, 12);
    assert_eq!(row(6, 6, 5, 11).existence, Existence::Found);
    assert_eq!(row(6, 6, 7, 13).existence, Existence::NotFound);
    for c in checks.iter().filter(|c| c.table == "eliminated") {
        assert!(!TABLE3.contains(&c.row));
    }
}

#[test]
fn json_round_trip() {
    let r = classify(5, 7);
    let text = serde_json::to_string_pretty(&r).unwrap();
    let back: ClassifyReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["descriptors"][0]["type"], serde_json::json!([6, 38]));
}

#[test]
fn excluded_rows_reported_when_maps_exist() {
    for (p, q, ty) in [(5, 19, [3, 9]), (11, 43, [3, 7])] {
        let r = classify(p, q);
        let found: Vec<_> = r.by_case("v4x").collect();
        assert!(!found.is_empty(), "({p},{q})");
        assert!(found.iter().all(|d| d.status == Status::SearchConfirmed));
        assert!(found.iter().any(|d| d.map_type == ty));
    }
    let r = classify(5, 11);
    assert!(r.by_case("v4x").all(|d| d.status == Status::SearchRefuted));
}
