use qpg::db::RecordLine;
use qpg::report::{emit_table, Filter, Format, FOOTNOTE};
use qpg_core::array::parse_array;
use qpg_core::record::run_all;

fn line(text: &str) -> RecordLine {
    RecordLine::from_record(&run_all(&parse_array(text).unwrap()))
}

fn records() -> Vec<RecordLine> {
    let mut odd = line("[[2,2],[1]]");
    odd.status = "INFEASIBLE".into();
    odd.failure_reason = Some("krein".into());
    odd.noncyclotomic = true;
    odd.order = 7;
    odd.array = "[[2,4],[1]]".into();
    vec![line("[[3,6],[1]]"), odd, line("[[2,2],[1]]")]
}

#[test]
fn markdown_layout() {
    let expected = format!(
        "| Order | Parameter Array | Status |\n\
         |---|---|---|\n\
         | 5 | [[2,2],[1]] | F |\n\
         | 7 | [[2,4],[1]] | nr-xF |\n\
         | 10 | [[3,6],[1]] | F |\n\
         \n{FOOTNOTE}\n"
    );
    assert_eq!(emit_table(&records(), Filter::All, Format::Markdown, false), expected);
}

#[test]
fn extended_csv_layout() {
    let expected = "order,array,status,failed_check,noncyclotomic\n\
                    7,\"[[2,4],[1]]\",nr-xF,krein,true\n";
    assert_eq!(emit_table(&records(), Filter::Noncyclotomic, Format::Csv, true), expected);
}

#[test]
fn feasible_filter_and_stability() {
    let a = emit_table(&records(), Filter::Feasible, Format::Markdown, true);
    assert!(!a.contains("| nr-xF |"));
    assert!(a.contains("| 5 | [[2,2],[1]] | F |  | no |"));
    let mut reversed = records();
    reversed.reverse();
    assert_eq!(emit_table(&reversed, Filter::Feasible, Format::Markdown, true), a);
}

#[test]
fn empty_input_is_header_only() {
    assert_eq!(emit_table(&[], Filter::All, Format::Markdown, false), "| Order | Parameter Array | Status |\n|---|---|---|\n");
    assert_eq!(emit_table(&[], Filter::All, Format::Csv, false), "order,array,status\n");
}

#[test]
fn unknown_names_are_errors() {
    assert!("cyclotomic".parse::<Filter>().is_err());
    assert!("tex".parse::<Format>().is_err());
    assert_eq!("noncyclotomic".parse::<Filter>(), Ok(Filter::Noncyclotomic));
}
