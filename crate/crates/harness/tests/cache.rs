use std::sync::atomic::Ordering;

use ampsum::cache::{Cache, CacheError, CacheKey};

fn key() -> CacheKey {
    CacheKey::new("lvalue", 7, Some(2), "0.5,14.25")
}

#[test]
fn put_then_get_returns_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    assert_eq!(cache.get(&key()).unwrap(), None);
    let payload = "[0.1234567890123456789,-2.5e-300]";
    cache.put(&key(), payload).unwrap();
    assert_eq!(cache.get(&key()).unwrap().as_deref(), Some(payload));
}

#[test]
fn version_change_invalidates() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    cache.put(&key(), "1").unwrap();
    let bumped = key().with_version("999.0.0");
    assert_ne!(cache.path_of(&bumped), cache.path_of(&key()));
    assert_eq!(cache.get(&bumped).unwrap(), None);
    let v: u32 = cache.get_or_compute(&bumped, || Ok::<_, ()>(2)).unwrap();
    assert_eq!(v, 2);
    assert_eq!(cache.stats.misses.load(Ordering::Relaxed), 1);
}

#[test]
fn corrupt_record_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    cache.put(&key(), "[1.0,2.0]").unwrap();
    let path = cache.path_of(&key());
    let text = std::fs::read_to_string(&path).unwrap().replace("[1.0,2.0]", "[1.0,3.0]");
    std::fs::write(&path, text).unwrap();
    assert!(matches!(cache.get(&key()), Err(CacheError::CacheCorrupt { .. })));

    let v: Vec<f64> = cache.get_or_compute(&key(), || Ok::<_, ()>(vec![1.0, 2.0])).unwrap();
    assert_eq!(v, vec![1.0, 2.0]);
    assert_eq!(cache.stats.recomputed.load(Ordering::Relaxed), 1);
    assert_eq!(cache.get(&key()).unwrap().as_deref(), Some("[1.0,2.0]"));

    std::fs::write(&path, "not json").unwrap();
    assert!(matches!(cache.get(&key()), Err(CacheError::CacheCorrupt { .. })));
}

#[test]
fn second_lookup_hits() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let mut calls = 0;
    for _ in 0..3 {
        let v: f64 = cache
            .get_or_compute(&key(), || {
                calls += 1;
                Ok::<_, ()>(0.1 + 0.2)
            })
            .unwrap();
        assert_eq!(v, 0.1 + 0.2);
    }
    assert_eq!(calls, 1);
    assert_eq!(cache.stats.hits.load(Ordering::Relaxed), 2);
}

#[test]
fn readers_never_see_partial_records() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let payloads: Vec<String> = (0..4).map(|i| format!("[{}]", vec![i.to_string(); 20_000].join(","))).collect();
    cache.put(&key(), &payloads[0]).unwrap();
    std::thread::scope(|s| {
        s.spawn(|| {
            for round in 0..200 {
                cache.put(&key(), &payloads[round % payloads.len()]).unwrap();
            }
        });
        for _ in 0..3 {
            s.spawn(|| {
                for _ in 0..200 {
                    let got = cache.get(&key()).expect("complete record").expect("present");
                    assert!(payloads.contains(&got));
                }
            });
        }
    });
}
