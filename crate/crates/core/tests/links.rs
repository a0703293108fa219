use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use ome_rdf::links::{
    check_links, CheckOptions, FetchError, Fetcher, LinkEntry, LinkError, LinkRegistry, LinkStatus, DEFAULT_REGISTRY,
};
use ome_rdf::rdf::Iri;
use proptest::prelude::*;

struct Scripted {
    calls: AtomicUsize,
    in_flight: AtomicUsize,
    peak: AtomicUsize,
}

impl Scripted {
    fn new() -> Self {
        Scripted {
            calls: AtomicUsize::new(0),
            in_flight: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
        }
    }
}

impl Fetcher for Scripted {
    fn fetch(&self, iri: &Iri, _timeout: Duration) -> Result<u16, FetchError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak.fetch_max(now, Ordering::SeqCst);
        std::thread::sleep(Duration::from_millis(2));
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        let tail = iri.as_str().rsplit('/').next().unwrap();
        match tail.chars().last() {
            Some('0') => Err(FetchError::Timeout),
            Some('1') => Ok(404),
            Some('2') => Ok(301),
            _ => Ok(200),
        }
    }
}

fn iris(n: usize) -> Vec<Iri> {
    (0..n)
        .map(|i| Iri::new(format!("http://metadb.riken.jp/metadb/db/rikenbrc_mouse/RBRC{i:05}")).unwrap())
        .collect()
}

#[test]
fn bundled_registry_resolves_the_strain_base() {
    let reg = LinkRegistry::builtin();
    assert_eq!(
        reg.resolve("rikenbrc_mouse:RBRC00001").unwrap().as_str(),
        "http://metadb.riken.jp/metadb/db/rikenbrc_mouse/RBRC00001"
    );
    assert_eq!(reg.resolve("nosuch:X1"), Err(LinkError::UnknownPrefix("nosuch".into())));
    assert!(matches!(reg.resolve("rikenbrc_mouse:bad id"), Err(LinkError::IdPatternMismatch { .. })));
    assert!(matches!(reg.resolve("no-colon"), Err(LinkError::MalformedCurie(_))));
    assert!(matches!(reg.resolve("rikenbrc_mouse:"), Err(LinkError::MalformedCurie(_))));
    assert_eq!(reg.to_text(), DEFAULT_REGISTRY);
}

#[test]
fn checker_keeps_order_and_bounds_parallelism() {
    let list = iris(40);
    let fetcher = Scripted::new();
    let opts = CheckOptions { parallelism: 3, ..CheckOptions::default() };
    let results = check_links(&list, &fetcher, opts);
    assert_eq!(results.len(), 40);
    assert!(fetcher.peak.load(Ordering::SeqCst) <= 3);
    for (i, r) in results.iter().enumerate() {
        assert_eq!(r.iri, list[i]);
        let (status, code) = match i % 10 {
            0 => (LinkStatus::Unreachable, None),
            1 => (LinkStatus::Unreachable, Some(404)),
            2 => (LinkStatus::Ok, Some(301)),
            _ => (LinkStatus::Ok, Some(200)),
        };
        assert_eq!((r.status, r.http_status), (status, code), "{i}");
    }

    let offline = Scripted::new();
    let results = check_links(&list[..3], &offline, CheckOptions { offline: true, ..opts });
    assert!(results.iter().all(|r| r.status == LinkStatus::NotChecked && r.http_status.is_none()));
    assert_eq!(offline.calls.load(Ordering::SeqCst), 0);
    assert!(check_links(&[], &offline, opts).is_empty());
}

fn registry_text() -> impl Strategy<Value = String> {
    proptest::collection::btree_map(
        "[a-z][a-z0-9_]{0,10}",
        ("[a-z]{1,8}", "[a-z0-9/_-]{0,12}", prop_oneof![
            Just("[A-Za-z0-9._-]+".to_string()),
            Just("RBRC[0-9]{5}".to_string()),
            Just("[0-9]+".to_string()),
            Just("(?i)jcm[0-9]+".to_string()),
        ]),
        0..6,
    )
    .prop_map(|m| {
        m.into_iter()
            .map(|(p, (host, path, pat))| format!("{p}\thttp://{host}.example/{path}\t{pat}\n"))
            .collect()
    })
}

proptest! {
    #[test]
    fn registry_file_round_trips(text in registry_text()) {
        let reg = LinkRegistry::parse(&text).unwrap();
        prop_assert_eq!(reg.to_text(), text);
    }

    #[test]
    fn resolve_is_injective_per_prefix(a in "[A-Za-z0-9._-]{1,16}", b in "[A-Za-z0-9._-]{1,16}") {
        let reg = LinkRegistry::builtin();
        let ia = reg.resolve(&format!("rikenbrc_mouse:{a}")).unwrap();
        let ib = reg.resolve(&format!("rikenbrc_mouse:{b}")).unwrap();
        prop_assert_eq!(a == b, ia == ib);
    }

    #[test]
    fn entries_anchor_their_pattern(local in "[A-Za-z0-9 ]{0,12}") {
        let e = LinkEntry::new(Iri::new("http://x.example/db").unwrap(), "[0-9]+").unwrap();
        prop_assert_eq!(e.matches(&local), !local.is_empty() && local.chars().all(|c| c.is_ascii_digit()));
    }
}
