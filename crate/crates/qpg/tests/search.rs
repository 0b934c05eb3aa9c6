use std::collections::HashSet;
use std::fs;
use std::io::Write;

use qpg::db::{read_records, RecordLine};
use qpg::search::{checkpoint_path, search_records, search_to_file, SearchConfig};
use qpg_core::array::parse_array;
use qpg_core::enumerate::SearchBounds;
use qpg_core::record::run_all;

fn config(rank: usize, min_order: u64, max_order: u64, max_valency: u64, jobs: usize) -> SearchConfig {
    SearchConfig { bounds: SearchBounds { rank, min_order, max_order, max_valency }, jobs }
}

fn key_of(text: &str) -> String {
    run_all(&parse_array(text).unwrap()).key().unwrap().0.clone()
}

fn lines(path: &std::path::Path) -> Vec<RecordLine> {
    read_records(fs::read(path).unwrap().as_slice(), false).unwrap()
}

#[test]
fn worker_count_does_not_change_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.jsonl");
    let many = dir.path().join("many.jsonl");
    search_to_file(&config(4, 1, 40, 10, 1), &one, false, |_| {}).unwrap();
    search_to_file(&config(4, 1, 40, 10, 8), &many, false, |_| {}).unwrap();
    let a = fs::read(&one).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, fs::read(&many).unwrap());
}

#[test]
fn resume_adds_no_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.jsonl");
    let cfg = config(4, 1, 36, 10, 2);
    search_to_file(&cfg, &full, false, |_| {}).unwrap();
    let reference: Vec<String> = lines(&full).into_iter().map(|r| r.array).collect();
    assert!(reference.len() > 4);

    // interrupted mid-line, without a checkpoint
    let cut = dir.path().join("cut.jsonl");
    let text = fs::read_to_string(&full).unwrap();
    let keep: String = text.split_inclusive('\n').take(reference.len() / 2).collect();
    let mut f = fs::File::create(&cut).unwrap();
    f.write_all(keep.as_bytes()).unwrap();
    f.write_all(&text.as_bytes()[keep.len()..keep.len() + 30]).unwrap();
    drop(f);
    search_to_file(&cfg, &cut, true, |_| {}).unwrap();
    let resumed: Vec<String> = lines(&cut).into_iter().map(|r| r.array).collect();
    let unique: HashSet<&String> = resumed.iter().collect();
    assert_eq!(unique.len(), resumed.len());
    assert_eq!(unique, reference.iter().collect());

    // resuming a finished run writes nothing
    let before = fs::read(&full).unwrap();
    assert!(checkpoint_path(&full).exists());
    search_to_file(&cfg, &full, true, |_| {}).unwrap();
    assert_eq!(fs::read(&full).unwrap(), before);
}

#[test]
fn resume_rejects_other_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.jsonl");
    search_to_file(&config(3, 1, 20, 10, 1), &out, false, |_| {}).unwrap();
    assert!(search_to_file(&config(3, 1, 21, 10, 1), &out, true, |_| {}).is_err());
}

#[test]
fn rank_four_contains_the_order_27_pair() {
    let records = search_records(&config(4, 1, 60, 8, 1)).unwrap();
    let keys: HashSet<String> = records.iter().map(|r| r.key().unwrap().0.clone()).collect();
    assert_eq!(keys.len(), records.len());
    for text in ["[[8,6,12],[4,2;2]]", "[[8,16,2],[3,0;8]]"] {
        let key = key_of(text);
        let r = records.iter().find(|r| r.key().unwrap().0 == key).expect(text);
        assert_eq!(r.status.label(), "FEASIBLE", "{text}");
        assert_eq!(r.array.order(), 27);
    }
    for r in &records {
        let again = run_all(&r.array);
        assert_eq!(again.status, r.status, "{}", r.array);
        assert_eq!(again.key(), r.key());
    }
}

#[test]
fn order_45_rank_five() {
    let records = search_records(&config(5, 45, 45, 8, 1)).unwrap();
    let key = key_of("[[8,8,24,4],[1,2,0;1,2;6]]");
    let r = records.iter().find(|r| r.key().unwrap().0 == key).unwrap();
    assert_eq!(r.status.label(), "FEASIBLE");
    assert!(r.noncyclotomic);
}

#[test]
fn empty_range_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.jsonl");
    let p = search_to_file(&config(4, 30, 20, 10, 1), &out, false, |_| {}).unwrap();
    assert_eq!(p.survivors, 0);
    assert_eq!(fs::read(&out).unwrap(), b"");
    assert!(search_records(&config(5, 1, 4, 3, 1)).unwrap().is_empty());
}

#[test]
fn rank_below_two_is_rejected() {
    assert!(search_records(&config(1, 1, 10, 3, 1)).is_err());
}
