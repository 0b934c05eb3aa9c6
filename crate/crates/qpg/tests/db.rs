use proptest::prelude::*;
use qpg::db::{read_records, write_records, RecordLine};
use qpg_core::array::parse_array;
use qpg_core::record::run_all;

const ARRAYS: &[&str] = &[
    "[[2,2],[1]]",
    "[[3,6],[1]]",
    "[[2,2],[2]]",
    "[[8,6,12],[4,2;2]]",
    "[[8,16,2],[3,0;8]]",
    "[[4,12,6,12],[1,0,0;2,1;1]]",
    "[[12,18,36,9],[2,0,4;4,4;4]]",
    "[[9,2,12,18],[9,0,3;0,0;6]]",
];

fn sample() -> Vec<RecordLine> {
    ARRAYS.iter().map(|t| RecordLine::from_record(&run_all(&parse_array(t).unwrap()))).collect()
}

#[test]
fn empty_stream_writes_nothing() {
    let mut sink = Vec::new();
    assert_eq!(write_records(std::iter::empty(), &mut sink).unwrap(), 0);
    assert!(sink.is_empty());
    assert!(read_records(&b""[..], false).unwrap().is_empty());
}

#[test]
fn wrong_schema_version_is_reported() {
    let mut r = sample().remove(0);
    r.schema_version = 99;
    let text = format!("{}\n", r.to_line());
    assert!(read_records(text.as_bytes(), false).is_err());
}

#[test]
fn invalid_arrays_keep_their_reason() {
    let r = &sample()[2];
    assert_eq!(r.status, "INVALID");
    assert!(r.failure_reason.is_some());
}

proptest! {
    #[test]
    fn write_read_write_is_stable(picks in prop::collection::vec(0..ARRAYS.len(), 0..12)) {
        let all = sample();
        let chosen: Vec<RecordLine> = picks.iter().map(|&i| all[i].clone()).collect();
        let mut first = Vec::new();
        prop_assert_eq!(write_records(&chosen, &mut first).unwrap(), chosen.len());
        let back = read_records(first.as_slice(), false).unwrap();
        prop_assert_eq!(&back, &chosen);
        let mut second = Vec::new();
        write_records(&back, &mut second).unwrap();
        prop_assert_eq!(first, second);
    }
}
