use measure_select::audit::*;

fn main() {
    println!("survival rate: {}", raw_draw_survival_rate(2000, 12345));
    let report = table1_report(3, 5).unwrap();
    println!("contradictions: {}", report.contradictions);
}
