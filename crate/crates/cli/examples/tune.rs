// Scenario tuning sweep: run the bundled crossing scenario across seeds and
// report the criterion-6/8 quantities.
use std::path::Path;
use trajeval_cli::run::run_optimize;
use trajeval_cli::scenario::load_scenario;

fn main() {
    let path = std::env::args().nth(1).unwrap_or("scenarios/crossing.toml".into());
    let seeds: Vec<u64> = std::env::args().nth(2)
        .map(|s| s.split(',').map(|x| x.parse().unwrap()).collect())
        .unwrap_or((1..=20).collect());
    let scenario = load_scenario(Path::new(&path)).unwrap();
    let base = Path::new(&path).parent().unwrap().to_path_buf();

    println!("{:>5} {:>9} {:>9} {:>8} {:>7} {:>9} {:>7} {:>6}", "seed", "c_longi", "max_int", "t_glob", "zeros", "q", "reach", "OK");
    let mut ok_count = 0;
    for &seed in &seeds {
        let outcome = run_optimize(&scenario, &base, Some(seed)).unwrap();
        let r = &outcome.best_report;
        let speeds: Vec<f64> = r.speed.iter().map(|p| p.v).collect();
        let mut max_run = 0usize; let mut run = 0usize;
        for &v in &speeds { if v == 0.0 { run += 1; max_run = max_run.max(run); } else { run = 0; } }
        let max_int = r.int_series.iter().map(|p| p.int_value).fold(f64::NEG_INFINITY, f64::max);
        let ok = r.criteria.c_longi <= 0.0 && r.criteria.c_lat <= 0.0 && max_int < 0.0 && max_run >= 2
            && speeds.iter().rev().take_while(|&&v| v > 0.0).count() > 0;
        if ok { ok_count += 1; }
        println!("{:>5} {:>9.4} {:>9.3} {:>8.2} {:>7} {:>9.2} {:>7} {:>6}",
            seed, r.criteria.c_longi, max_int, r.criteria.t_global, max_run,
            r.criteria.q, !r.flags.unreached_goal, if ok {"YES"} else {"no"});
    }
    println!("feasible: {ok_count}/{}", seeds.len());
}
