//! The full acceptance suite, as run by `ncplane selftest`.

use ncplane::selftest::run_all;

fn main() {
    let reports = run_all(42);
    for r in &reports {
        for line in r.lines() {
            println!("{line}");
        }
    }
    let ok = reports.iter().all(|r| r.pass());
    println!("{}", if ok { "all criteria pass" } else { "some criteria fail" });
    std::process::exit(if ok { 0 } else { 1 });
}
