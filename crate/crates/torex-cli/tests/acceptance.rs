//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! straight to stdout so the lines survive test output capture.

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use torex::fixtures::{
    chorded_torus_grid, grid_phase2_fixture, grid_phase3_fixture, join, plane_grid, random_with_genus, torus_grid,
};
use torex::gridminor::{grid_minor, merge_families, verify_certificate};
use torex::homology::{ewn, stretch_exact, DEFAULT_EXACT_CAP};
use torex::lemmas::{random_suite, CheckLimits, Lemma};
use torex::planarizer::{draw, draw_sequence, ell_suffix, heir_faces, validate_drawing};
use torex::stretchfinder::find_high_stretch_subgraph;
use torex::surgery::good_planarizing_sequence;
use torex::RotationSystem;

type Outcome = Result<String, String>;

fn report(n: usize, title: &str, outcome: &Outcome) {
    let line = match outcome {
        Ok(detail) => format!("criterion {n} PASS  {title}: {detail}\n"),
        Err(detail) => format!("criterion {n} FAIL  {title}: {detail}\n"),
    };
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn planarize_torus_grids() -> Outcome {
    let mut worst = [0f64; 3];
    let mut slowest = Duration::ZERO;
    let mut count = 0;
    for p in 3..=5usize {
        for q in p..=20usize {
            let start = Instant::now();
            let rs = torus_grid(p, q);
            let d = draw(&rs).map_err(|e| format!("TG({p},{q}): {e}"))?;
            let v = validate_drawing(&d);
            let elapsed = start.elapsed();
            slowest = slowest.max(elapsed);
            check(v.valid, || format!("TG({p},{q}) invalid drawing: {:?}", v.problems))?;
            let seq = good_planarizing_sequence(&rs).map_err(|e| e.to_string())?;
            let (k1, l1) = (seq.steps[0].k, seq.steps[0].l);
            let lower = (p - 2) * q;
            check(lower <= d.total_crossings && d.total_crossings <= 3 * k1 * l1, || {
                format!("TG({p},{q}) total {} outside [{lower}, {}]", d.total_crossings, 3 * k1 * l1)
            })?;
            let ratio = d.total_crossings as f64 / lower as f64;
            let cap = if p == 3 { 9.0 } else { 15.0 };
            check(ratio <= cap, || format!("TG({p},{q}) ratio {ratio:.2} > {cap}"))?;
            check(elapsed < Duration::from_secs(5), || format!("TG({p},{q}) took {elapsed:?}"))?;
            worst[p - 3] = worst[p - 3].max(ratio);
            count += 1;
        }
    }
    Ok(format!(
        "{count} grids, worst ratio p=3 {:.2}, p=4 {:.2}, p=5 {:.2}, slowest {slowest:?}",
        worst[0], worst[1], worst[2]
    ))
}

fn lemma_suite() -> Outcome {
    let start = Instant::now();
    let lemmas = [
        Lemma::Kl2,
        Lemma::Dew2,
        Lemma::Str4,
        Lemma::ThreePp,
        Lemma::OddStretch,
        Lemma::Cutdew,
        Lemma::Thstr,
    ];
    let mut parts = Vec::new();
    for lemma in lemmas {
        let r = random_suite(lemma, 500, 20, 1, CheckLimits::default()).map_err(|e| format!("{lemma}: {e}"))?;
        check(r.instances >= 500, || format!("{lemma}: only {} instances", r.instances))?;
        check(r.counterexamples.is_empty(), || format!("{lemma}: {:?}", r.counterexamples))?;
        check(r.checks > 0, || format!("{lemma}: nothing checked"))?;
        parts.push(format!("{lemma} {}", r.checks));
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    Ok(format!("500 instances each, 0 counterexamples, checks [{}], {elapsed:?}", parts.join(", ")))
}

fn grid_minors() -> Outcome {
    let mut slowest = Duration::ZERO;
    for p in 3..=8usize {
        for q in p..=8usize {
            let start = Instant::now();
            let rs = torus_grid(p, q);
            let r = grid_minor(&rs).map_err(|e| format!("TG({p},{q}): {e}"))?;
            let v = verify_certificate(&rs, &r.certificate);
            slowest = slowest.max(start.elapsed());
            check(v.valid, || format!("TG({p},{q}): {:?}", v.problems))?;
            let c = &r.certificate;
            check(c.p * c.q == p * q, || format!("TG({p},{q}) gave {}x{}", c.p, c.q))?;
        }
    }
    for (name, (rs, cs, ds), want) in [
        ("phase-2", grid_phase2_fixture(), (6, 4)),
        ("phase-3", grid_phase3_fixture(), (6, 3)),
    ] {
        let start = Instant::now();
        let (cert, _) = merge_families(&rs, &cs, &ds).map_err(|e| format!("{name}: {e}"))?;
        let v = verify_certificate(&rs, &cert);
        slowest = slowest.max(start.elapsed());
        check(v.valid, || format!("{name}: {:?}", v.problems))?;
        check((cert.p, cert.q) == want, || format!("{name} gave {}x{}", cert.p, cert.q))?;
    }
    check(slowest < Duration::from_secs(10), || format!("slowest run {slowest:?}"))?;
    Ok(format!("21 torus grids and 2 merge fixtures verified, slowest {slowest:?}"))
}

fn genus_two_joins() -> Vec<(String, RotationSystem)> {
    let mut out = vec![
        ("TG(3,4)+TG(3,5)".to_string(), join(&torus_grid(3, 4), &torus_grid(3, 5))),
        ("TG(4,4)+TG(4,6)".to_string(), join(&torus_grid(4, 4), &torus_grid(4, 6))),
        ("TG(3,3)+TG(5,5)".to_string(), join(&torus_grid(3, 3), &torus_grid(5, 5))),
    ];
    for seed in 0..5 {
        out.push((
            format!("chorded join seed {seed}"),
            join(&chorded_torus_grid(4, 5, seed), &chorded_torus_grid(4, 6, seed + 100)),
        ));
    }
    out
}

fn route_lengths() -> Outcome {
    let mut routes = 0;
    for (name, rs) in genus_two_joins() {
        let seq = good_planarizing_sequence(&rs).map_err(|e| format!("{name}: {e}"))?;
        let g = seq.genus();
        check(g == 2, || format!("{name}: genus {g}"))?;
        let heirs = heir_faces(&seq);
        for i in 1..=g {
            let (a, b) = heirs.grouping(i);
            let cap = 1usize << (g - i);
            check(a <= cap && b <= cap, || format!("{name} step {i}: groups ({a},{b}) > {cap}"))?;
        }
        let d = draw_sequence(&rs, &seq).map_err(|e| format!("{name}: {e}"))?;
        for ins in &d.insertions {
            let limit = ell_suffix(&seq, ins.step);
            check(ins.base_crossings <= limit, || {
                format!("{name} edge {}: {} base crossings > {limit}", ins.edge, ins.base_crossings)
            })?;
            routes += 1;
        }
    }
    Ok(format!("8 genus-2 joins, {routes} routed edges within their suffix sums"))
}

fn high_stretch() -> Outcome {
    let mut parts = Vec::new();
    let fixtures = [
        ("TG(4,12)+TG(4,4)", join(&torus_grid(4, 12), &torus_grid(4, 4))),
        ("TG(4,4)+TG(4,4)", join(&torus_grid(4, 4), &torus_grid(4, 4))),
        ("TG(5,10)+TG(4,8)", join(&torus_grid(5, 10), &torus_grid(4, 8))),
    ];
    for (name, rs) in fixtures {
        let r = find_high_stretch_subgraph(&rs, DEFAULT_EXACT_CAP).map_err(|e| format!("{name}: {e}"))?;
        check(r.k >= 4, || format!("{name}: k = {}", r.k))?;
        check(r.g_prime == 1 || r.g_prime == 2, || format!("{name}: g' = {}", r.g_prime))?;
        let scale = 2f64.powi(r.g_prime as i32 - 2);
        let ewn_need = scale * r.k as f64;
        let str_need = scale * scale * (r.k * r.l) as f64;
        check(r.ewn_prime as f64 >= ewn_need, || format!("{name}: ewn' {} < {ewn_need}", r.ewn_prime))?;
        check(r.stretch_prime as f64 >= str_need, || {
            format!("{name}: stretch' {} < {str_need}", r.stretch_prime)
        })?;
        parts.push(format!(
            "{name} g'={} ewn'={}>={ewn_need} str'={}>={str_need}",
            r.g_prime, r.ewn_prime, r.stretch_prime
        ));
    }
    Ok(parts.join("; "))
}

fn tex_consistency() -> Outcome {
    let mut parts = Vec::new();
    let mut fixtures: Vec<(String, RotationSystem)> = Vec::new();
    for (p, q) in [(3, 5), (4, 6), (5, 7), (6, 6), (10, 10), (10, 11), (10, 12)] {
        fixtures.push((format!("TG({p},{q})"), torus_grid(p, q)));
    }
    for seed in 0..3 {
        fixtures.push((format!("chorded TG(6,7) seed {seed}"), chorded_torus_grid(6, 7, seed)));
    }
    let mut stretch_checks = 0;
    for (name, rs) in fixtures {
        let r = grid_minor(&rs).map_err(|e| format!("{name}: {e}"))?;
        check(verify_certificate(&rs, &r.certificate).valid, || format!("{name}: certificate"))?;
        let tex = r.certificate.p * r.certificate.q;
        let d = draw(&rs).map_err(|e| format!("{name}: {e}"))?;
        check(tex as f64 / 12.0 <= d.total_crossings as f64, || {
            format!("{name}: Tex/12 = {} > {}", tex as f64 / 12.0, d.total_crossings)
        })?;
        let dual = rs.dual();
        let s = stretch_exact(&dual, DEFAULT_EXACT_CAP).map_err(|e| format!("{name}: {e}"))?;
        let str_star = s.exact().ok_or_else(|| format!("{name}: stretch not exact"))?;
        let h = rs.half_degree();
        let k = ewn(&dual).map_err(|e| e.to_string())?;
        if k >= 5 * h {
            let bound = 2.0 / 7.0 * str_star as f64 / (h * h) as f64;
            check(bound <= tex as f64, || format!("{name}: stretch bound {bound:.2} > Tex {tex}"))?;
            stretch_checks += 1;
            parts.push(format!("{name} {bound:.2}<={tex}"));
        }
    }
    check(stretch_checks > 0, || "no fixture met k >= 5h".to_string())?;
    Ok(format!("10 tori satisfy Tex/12 <= crossings; stretch side: {}", parts.join(", ")))
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("torex-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_torex"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("torex {args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let mut systems = vec![torus_grid(3, 5), plane_grid(3, 4), join(&torus_grid(3, 3), &torus_grid(3, 4))];
    systems.extend((0..50).map(|s| random_with_genus(20, 1, s)));
    for rs in &systems {
        let text = rs.serialize();
        let back = RotationSystem::parse(&text).map_err(|e| e.to_string())?;
        check(&back == rs && back.serialize() == text, || format!("round trip changed {text}"))?;
    }
    let dir = scratch_dir();
    let file = dir.join("random.rot");
    let file_s = file.to_str().unwrap();
    let a = run_cli(&["gen", "random", "--seed", "17", "--max-edges", "14"])?;
    let b = run_cli(&["gen", "random", "--seed", "17", "--max-edges", "14"])?;
    check(a == b, || "gen random differs between runs".to_string())?;
    std::fs::write(&file, &a).unwrap();
    let mut runs = 1;
    for cmd in [
        vec!["stats", file_s],
        vec!["planarize", file_s],
        vec!["stretch", file_s],
        vec!["verify", "--lemma", "kl2", "--random", "20", "--seed", "3"],
    ] {
        let x = run_cli(&cmd)?;
        let y = run_cli(&cmd)?;
        check(x == y, || format!("torex {cmd:?} differs between runs"))?;
        runs += 1;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} round trips exact, {runs} CLI commands byte-identical", systems.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("planarize torus grids", planarize_torus_grids),
        ("random lemma suite", lemma_suite),
        ("grid minor certificates", grid_minors),
        ("route lengths and grouping on genus-2 joins", route_lengths),
        ("high-stretch subgraph on genus 2", high_stretch),
        ("Tex and crossing consistency on tori", tex_consistency),
        ("round trip and determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (title, f)) in criteria.into_iter().enumerate() {
        let outcome = f();
        report(i + 1, title, &outcome);
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
