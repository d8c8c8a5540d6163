//! Acceptance suite. Runs every criterion at its stated tolerance and
//! runtime budget and prints one PASS/FAIL line per criterion.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use diwed::bellexpr::local_bound;
use diwed::graphwit::{biseparable_saturation, catalog, verify_paradox, Graph, ParadoxSelection};
use diwed::qcore::{make_ghz, make_ghz_nd};
use diwed::reference::{self, ReferenceKind};
use diwed::reproduce::{compare_entry, reproduce, Artifact, ReproduceOptions, Target};
use diwed::seesaw::{kproducible_lower_bound, SeesawConfig};
use diwed::witness_gamma::{
    ansatz_observables, build_expression, find_dmin, find_dmin_optimized, numeric_quantum_bound, optimal_quantum_bound,
    qudit_observables, quantum_value_formula, theta_grid, unbalanced_ghz_example, unbalanced_ghz_scan, AnsatzParams,
    GammaWitness, ParityRole,
};

type Check = Result<String, String>;

/// Name, runtime budget and check.
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: diwed::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Closed forms of the optimal GHZ value, typed independently of the library.
fn closed_form_value(n: usize, g: f64) -> f64 {
    match n {
        2 => 2.0 / (4.0 - g).sqrt(),
        3 => (8.0 + g) / (8.0 - g),
        4 => {
            let s = (20.0 + g).sqrt();
            let t = (-(10.0 - g - s).sqrt() / (6.0 + s).sqrt()).atan();
            g * (6.0 - s).powf(-2.5) - (5.0 * t).cos()
        }
        5 => {
            let r = (64.0 + 6.0 * g).sqrt();
            (128.0 * r + g * (224.0 + g + 12.0 * r)) / (g - 32.0).powi(2)
        }
        _ => unreachable!(),
    }
}

fn exact_local_bounds() -> Check {
    let mut checked = 0;
    for n in 2..=6 {
        for gamma in [0.3, 1.0, 2.0] {
            let e = lib(build_expression(lib(GammaWitness::new(n, gamma))?))?;
            let v = lib(local_bound(&e))?.value;
            ensure(v == 1.0, || format!("S_{n},{gamma} local bound {v}"))?;
            checked += 1;
        }
    }
    let mut expected: Vec<(String, f64)> = [("RG3", 2.0), ("RG4", 3.0), ("RG5", 4.0), ("RG6", 5.0), ("LG5", 4.0)]
        .into_iter()
        .chain([("LG6", 5.0), ("G3", 4.0), ("G4", 4.0), ("RG3_full", 6.0), ("RG4_full", 12.0), ("RG5_full", 20.0)])
        .map(|(s, v)| (s.to_string(), v))
        .collect();
    expected.extend((3..=6).map(|n| (format!("FG{n}"), (n - 1) as f64)));
    for (name, want) in &expected {
        let v = lib(local_bound(&lib(catalog(name))?.expression))?.value;
        ensure(v == *want, || format!("{name}: local bound {v}, want {want}"))?;
        checked += 1;
    }
    Ok(format!("{checked} exact local bounds"))
}

fn analytic_bounds() -> Check {
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        for i in 1..=20 {
            let gamma = 0.1 * i as f64;
            let want = closed_form_value(n, gamma);
            let got = lib(optimal_quantum_bound(n, gamma))?.value;
            let numeric = lib(numeric_quantum_bound(n, gamma))?.value;
            worst = worst.max((got - want).abs()).max((numeric - want).abs());
        }
    }
    ensure(worst <= 1e-8, || format!("max deviation {worst:e}"))?;
    let s2 = lib(optimal_quantum_bound(2, 2.0))?.value;
    let s3 = lib(optimal_quantum_bound(3, 2.0))?.value;
    ensure((s2 - 2f64.sqrt()).abs() <= 1e-8 && (s3 - 5.0 / 3.0).abs() <= 1e-8, || {
        format!("spot values {s2}, {s3}")
    })?;
    Ok(format!("80 samples, max deviation {worst:.1e}"))
}

fn ansatz_consistency() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let gamma = rng.random_range(0.01..=2.0);
        let phi = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let e = lib(build_expression(lib(GammaWitness::new(n, gamma))?))?;
        let obs = lib(ansatz_observables(lib(AnsatzParams::new(n, phi))?))?;
        let dense = lib(e.quantum_value(&lib(make_ghz(n))?, &obs))?;
        worst = worst.max((dense - quantum_value_formula(n, gamma, phi)).abs());
    }
    ensure(worst <= 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("100 samples, max deviation {worst:.1e}"))
}

fn graph_state_maxima() -> Check {
    let names = [
        "RG3", "RG4", "RG5", "RG6", "FG3", "FG4", "FG5", "FG6", "LG5", "LG5_alt", "LG6", "G3", "G4",
    ];
    for name in names {
        let c = lib(catalog(name))?;
        let m = c.m().ok_or_else(|| format!("{name} has no selection"))?;
        let total = lib(verify_paradox(&c.expression, &c.dictionary, &c.graph))?.total;
        ensure((total - (m + 1) as f64).abs() <= 1e-10, || format!("{name}: total {total}, m = {m}"))?;
    }
    for n in 3..=5 {
        let c = lib(catalog(&format!("RG{n}_full")))?;
        let total = lib(verify_paradox(&c.expression, &c.dictionary, &c.graph))?.total;
        ensure((total - (1u32 << n) as f64).abs() <= 1e-10, || format!("RG{n}_full: total {total}"))?;
    }
    Ok(format!("{} expressions", names.len() + 3))
}

fn producible_regression() -> Check {
    let cfg = SeesawConfig::default();
    let (mut tight, mut one_sided) = (0, 0);
    let mut failures = Vec::new();
    for table in ["table1", "table2", "table4"] {
        for e in reference::table(table).filter(|e| e.kind == ReferenceKind::Producible) {
            let row = lib(compare_entry(e, &cfg))?;
            if e.tight {
                tight += 1;
            } else {
                one_sided += 1;
            }
            if !row.matches {
                failures.push(format!("{}/{}/{}: {} vs {}", row.table, row.row, row.column, row.computed, row.reference));
            }
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{tight} tight entries within 1e-3, {one_sided} one-sided"))
}

fn qudit_ghz() -> Check {
    let mut checked = 0;
    for n in 2..=4 {
        let gamma = 2.0;
        let b = lib(optimal_quantum_bound(n, gamma))?;
        let e = lib(build_expression(lib(GammaWitness::new(n, gamma))?))?;
        for d in [2, 4, 3] {
            let obs = lib(qudit_observables(d, n, b.phi, ParityRole::default()))?;
            let v = lib(e.quantum_value(&lib(make_ghz_nd(n, d))?, &obs))?;
            let want = if d % 2 == 0 {
                b.value
            } else {
                ((d - 1) as f64 * b.value + 1.0) / d as f64
            };
            ensure((v - want).abs() <= 1e-9, || format!("n={n} d={d}: {v} vs {want}"))?;
            checked += 1;
        }
    }
    let d3 = lib(find_dmin(3, 2.0))?;
    let d4 = lib(find_dmin(4, 2.0))?;
    ensure(d3 == Some(3) && d4 == Some(5), || format!("find_dmin gave {d3:?}, {d4:?}"))?;
    for n in 3..=11 {
        let at2 = lib(find_dmin(n, 2.0))?;
        let opt = lib(find_dmin_optimized(n, 0.01))?;
        let ok = match (opt.d, at2) {
            (Some(a), Some(b)) => a <= b,
            (_, None) => true,
            (None, Some(_)) => false,
        };
        ensure(ok, || format!("n={n}: optimized {:?} vs γ=2 {at2:?}", opt.d))?;
    }
    Ok(format!("{checked} block strategies, d_min(3)=3, d_min(4)=5, n ≤ 11 ordering"))
}

fn w_state_depth() -> Check {
    let opts = ReproduceOptions {
        ns: Some(vec![3, 4, 5, 6]),
        ..ReproduceOptions::default()
    };
    let Artifact::Fig1 { rows, depths } = lib(reproduce(Target::Fig1, &opts))? else {
        return Err("fig1 produced a different artifact".into());
    };
    let best = rows
        .iter()
        .filter(|r| r.n == 3)
        .max_by(|a, b| a.margin.total_cmp(&b.margin))
        .ok_or("no W3 rows")?;
    ensure(best.margin > 1e-4, || format!("best W3 margin {:e}", best.margin))?;
    for d in depths.iter().filter(|d| d.n >= 4) {
        ensure(d.depth_tuned >= d.depth_gamma2, || {
            format!("W{}: tuned depth {} < γ=2 depth {}", d.n, d.depth_tuned, d.depth_gamma2)
        })?;
    }
    let summary: Vec<String> = depths
        .iter()
        .map(|d| format!("W{} {}→{}", d.n, d.depth_gamma2, d.depth_tuned))
        .collect();
    Ok(format!(
        "W3 margin {:.2e} at γ={}; depths {}",
        best.margin,
        best.gamma,
        summary.join(", ")
    ))
}

fn unbalanced_ghz() -> Check {
    let v = lib(lib(unbalanced_ghz_example())?.value())?;
    ensure(v > 1.0, || format!("θ=0.07 strategy gives {v}"))?;
    let thetas = lib(theta_grid(0.01, std::f64::consts::FRAC_PI_4, 0.01))?;
    let mut worst = f64::INFINITY;
    for n in [3, 5] {
        for r in lib(unbalanced_ghz_scan(n, &thetas, 2.0, &SeesawConfig::default()))? {
            ensure(r.value >= 1.0, || format!("n={n} θ={}: value {}", r.theta, r.value))?;
            worst = worst.min(r.nonlocality_margin);
        }
    }
    Ok(format!("example value {v:.6}; {} θ points per n, min margin {worst:.2e}", thetas.len()))
}

fn biseparable() -> Check {
    let g = lib(Graph::complete(4))?;
    let sel = lib(ParadoxSelection::from_vertices("FG4-g4", g, &[&[1], &[2], &[3]], &[1, 2, 3]))?;
    let r = lib(biseparable_saturation(&sel))?;
    ensure((r.biseparable_value - 4.0).abs() <= 1e-9, || format!("value {}", r.biseparable_value))?;
    Ok(format!("biseparable value {} with party {} fixed", r.biseparable_value, r.party))
}

fn determinism() -> Check {
    let run = || -> Result<Vec<u64>, String> {
        let cfg = SeesawConfig::default().with_seed(11).with_restarts(10);
        let fg5 = lib(catalog("FG5"))?.expression;
        let mut bits = vec![lib(kproducible_lower_bound(&fg5, 3, &[2; 5], &cfg))?.value.to_bits()];
        let thetas = [0.02, 0.2, 0.6];
        bits.extend(lib(unbalanced_ghz_scan(3, &thetas, 2.0, &cfg))?.iter().map(|r| r.value.to_bits()));
        Ok(bits)
    };
    let (a, b) = (run()?, run()?);
    ensure(a == b, || "library values differ between runs".into())?;
    let cli = || -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_diwed"))
            .args(["seesaw", "--catalog", "FG4", "--k", "2", "--seed", "5", "--restarts", "8", "--format", "json"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
        Ok(out.stdout)
    };
    let (x, y) = (cli()?, cli()?);
    ensure(x == y, || "CLI outputs differ between runs".into())?;
    Ok(format!("{} library values and {} CLI bytes identical", a.len(), x.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 exact local bounds", Duration::from_secs(10), exact_local_bounds),
        ("2 analytic quantum bounds", Duration::from_secs(5), analytic_bounds),
        ("3 ansatz consistency", Duration::from_secs(30), ansatz_consistency),
        ("4 graph-state maxima", Duration::from_secs(30), graph_state_maxima),
        ("5 k-producible see-saw regression", Duration::from_secs(30 * 60), producible_regression),
        ("6 qudit GHZ", Duration::from_secs(120), qudit_ghz),
        ("7 W-state depth", Duration::from_secs(10 * 60), w_state_depth),
        ("8 unbalanced GHZ", Duration::from_secs(20 * 60), unbalanced_ghz),
        ("9 biseparable saturation", Duration::from_secs(5), biseparable),
        ("10 determinism", Duration::from_secs(10 * 60), determinism),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > budget => Err(format!("{msg}; took {elapsed:.1?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} ({elapsed:.1?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} ({elapsed:.1?})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
