//! Executable checks of the structural inequalities the algorithms rely on,
//! one instance at a time or over seeded random rotation systems.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cycle::EmbCycle;
use crate::embedding::RotationSystem;
use crate::error::{Error, Result};
use crate::fixtures::random_with_genus;
use crate::homology::{
    all_shortest_nonseparating, brute_force_stretch, enumerate_cycles, ewn, is_separating, leap_report,
    stretch_exact, switching_ear_length,
};
use crate::planarizer::{draw_sequence, ell_suffix, heir_faces, insertion_routes};
use crate::surgery::{cut_through, good_planarizing_sequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    /// Switching ears of a shortest nonseparating cycle are at least `ewn/2`.
    Kl2,
    /// Cutting through a shortest nonseparating cycle at genus >= 2 at most halves `ewn`.
    Dew2,
    /// ... and at most quarters the stretch.
    Str4,
    /// Cutting through the shorter stretch witness at genus >= 2 at most halves `ewn`.
    Cutdew,
    /// One-leaping and odd-leaping stretch agree.
    OddStretch,
    /// `Str <= ‖C‖(‖P‖ + ⌊‖C‖/2⌋)` for a cycle and a switching ear.
    Thstr,
    /// In a theta graph, 0 or 2 of the three cycles are odd-leaping a cycle.
    #[serde(rename = "3pp")]
    ThreePp,
    /// Reinserted edges cross few base edges; heir faces group tightly.
    ClSumell,
}

impl Lemma {
    pub const ALL: [Lemma; 8] = [
        Lemma::Kl2,
        Lemma::Dew2,
        Lemma::Str4,
        Lemma::Cutdew,
        Lemma::OddStretch,
        Lemma::Thstr,
        Lemma::ThreePp,
        Lemma::ClSumell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Kl2 => "kl2",
            Lemma::Dew2 => "dew2",
            Lemma::Str4 => "str4",
            Lemma::Cutdew => "cutdew",
            Lemma::OddStretch => "odd-stretch",
            Lemma::Thstr => "thstr",
            Lemma::ThreePp => "3pp",
            Lemma::ClSumell => "cl-sumell",
        }
    }

    /// Smallest genus the statement applies to.
    pub fn min_genus(self) -> usize {
        match self {
            Lemma::Dew2 | Lemma::Str4 | Lemma::Cutdew => 2,
            Lemma::ThreePp => 0,
            _ => 1,
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown lemma {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub lemma: Lemma,
    /// Number of individual inequalities evaluated.
    pub checks: usize,
    pub counterexamples: Vec<String>,
    /// Cases passed over, with the reason.
    pub skipped: Vec<String>,
}

impl LemmaCheck {
    fn new(lemma: Lemma) -> Self {
        LemmaCheck { lemma, checks: 0, counterexamples: Vec::new(), skipped: Vec::new() }
    }

    fn expect(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.counterexamples.push(detail());
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Limits for the exponential parts of the checks.
#[derive(Clone, Copy, Debug)]
pub struct CheckLimits {
    pub exact_cap: usize,
    /// Cycles considered when enumerating thetas.
    pub theta_cycles: usize,
    /// Fixed cycles each theta is tested against.
    pub theta_targets: usize,
}

impl Default for CheckLimits {
    fn default() -> Self {
        CheckLimits { exact_cap: 200_000, theta_cycles: 120, theta_targets: 4 }
    }
}

fn require_genus(rs: &RotationSystem, lemma: Lemma) -> Result<()> {
    let need = lemma.min_genus();
    if rs.genus() < need {
        return Err(Error::Precondition {
            lemma: lemma.name().into(),
            requirement: format!("genus >= {need} required"),
        });
    }
    Ok(())
}

fn exact(rs: &RotationSystem, cap: usize) -> Result<usize> {
    Ok(stretch_exact(rs, cap)?.lower)
}

/// Runs one lemma on one embedding.
pub fn check_lemma(rs: &RotationSystem, lemma: Lemma, limits: CheckLimits) -> Result<LemmaCheck> {
    require_genus(rs, lemma)?;
    let mut out = LemmaCheck::new(lemma);
    match lemma {
        Lemma::Kl2 => {
            let k = ewn(rs)?;
            for c in all_shortest_nonseparating(rs)? {
                let l = switching_ear_length(rs, &c)?;
                out.expect(2 * l >= k, || format!("{}: switching ear {l} < ewn/2 = {k}/2", c.literal()));
            }
        }
        Lemma::Dew2 => {
            let k = ewn(rs)?;
            for c in all_shortest_nonseparating(rs)? {
                let k1 = ewn(&cut_through(rs, &c)?.cut)?;
                out.expect(2 * k1 >= k, || format!("{}: ewn of the cut {k1} < {k}/2", c.literal()));
            }
        }
        Lemma::Str4 => {
            let s = exact(rs, limits.exact_cap)?;
            for c in all_shortest_nonseparating(rs)? {
                let s1 = exact(&cut_through(rs, &c)?.cut, limits.exact_cap)?;
                out.expect(4 * s1 >= s, || format!("{}: stretch of the cut {s1} < {s}/4", c.literal()));
            }
        }
        Lemma::Cutdew => {
            let st = stretch_exact(rs, limits.exact_cap)?;
            let (a, b) = st.witness.clone().ok_or(Error::ExactRequired)?;
            if !st.one_leaping {
                out.skipped.push(format!("no one-leaping witness of value {}", st.lower));
            } else {
                let k = ewn(rs)?;
                let k1 = ewn(&cut_through(rs, &a)?.cut)?;
                out.expect(2 * k1 >= k, || {
                    format!("witness {} / {}: ewn of the cut {k1} < {k}/2", a.literal(), b.literal())
                });
            }
        }
        Lemma::OddStretch => {
            let brute = brute_force_stretch(rs, rs.num_edges(), limits.exact_cap)?;
            let s = exact(rs, limits.exact_cap)?;
            out.expect(brute.one_min == brute.odd_min, || {
                format!("one-leaping minimum {:?} != odd-leaping minimum {:?}", brute.one_min, brute.odd_min)
            });
            out.expect(brute.odd_min == Some(s), || format!("brute force {:?} != exact {s}", brute.odd_min));
        }
        Lemma::Thstr => {
            let s = exact(rs, limits.exact_cap)?;
            let k = ewn(rs)?;
            for c in enumerate_cycles(rs, rs.num_edges(), limits.exact_cap)? {
                if is_separating(rs, &c) {
                    continue;
                }
                let (lc, p) = (c.len(), switching_ear_length(rs, &c)?);
                let bound = lc * (p + lc / 2);
                out.expect(s <= bound, || format!("{}: stretch {s} > {lc}*({p}+{})", c.literal(), lc / 2));
                if lc == k {
                    out.expect(bound <= 2 * lc * p, || format!("{}: {bound} > 2*{lc}*{p}", c.literal()));
                }
            }
        }
        Lemma::ThreePp => three_path(rs, limits, &mut out)?,
        Lemma::ClSumell => {
            let seq = good_planarizing_sequence(rs)?;
            let heirs = heir_faces(&seq);
            let g = seq.genus();
            for i in 1..=g {
                let (a, b) = heirs.grouping(i);
                let cap = 1usize << (g - i);
                out.expect(a <= cap && b <= cap, || format!("step {i}: heir groups ({a}, {b}) exceed {cap}"));
            }
            let (routes, _) = insertion_routes(&seq, &heirs);
            for r in &routes {
                let limit = ell_suffix(&seq, r.step);
                let crossed = r.faces.len() - 1;
                out.expect(crossed <= limit, || {
                    format!("edge {} of F_{}: route crosses {crossed} > {limit}", r.edge, r.step)
                });
            }
            let drawing = draw_sequence(rs, &seq)?;
            for ins in &drawing.insertions {
                let limit = ell_suffix(&seq, ins.step);
                out.expect(ins.base_crossings <= limit, || {
                    format!("edge {} of F_{}: drawn across {} > {limit}", ins.edge, ins.step, ins.base_crossings)
                });
            }
        }
    }
    Ok(out)
}

/// Thetas come from pairs of cycles meeting in one path whose symmetric
/// difference is again a listed cycle.
fn three_path(rs: &RotationSystem, limits: CheckLimits, out: &mut LemmaCheck) -> Result<()> {
    let cycles = match enumerate_cycles(rs, rs.num_edges(), limits.exact_cap) {
        Ok(c) => c,
        Err(Error::TooLarge { cap }) => {
            out.skipped.push(format!("more than {cap} cycles"));
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let cycles: Vec<EmbCycle> = cycles.into_iter().take(limits.theta_cycles).collect();
    let index: HashMap<Vec<usize>, usize> = cycles
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut e = c.edges();
            e.sort_unstable();
            (e, i)
        })
        .collect();
    let mut targets: Vec<&EmbCycle> = cycles.iter().filter(|c| !is_separating(rs, c)).collect();
    targets.extend(cycles.iter().filter(|c| is_separating(rs, c)));
    targets.truncate(limits.theta_targets);
    let mut thetas = Vec::new();
    for i in 0..cycles.len() {
        let ei = cycles[i].edge_set();
        let vi: std::collections::HashSet<usize> = cycles[i].vertices(rs).into_iter().collect();
        for j in i + 1..cycles.len() {
            let ej = cycles[j].edge_set();
            let shared = ei.intersection(&ej).count();
            if shared == 0 {
                continue;
            }
            let shared_v = cycles[j].vertices(rs).into_iter().filter(|v| vi.contains(v)).count();
            if shared_v != shared + 1 {
                continue;
            }
            let mut sym: Vec<usize> = ei.symmetric_difference(&ej).copied().collect();
            sym.sort_unstable();
            if let Some(&t) = index.get(&sym) {
                if t > j {
                    thetas.push([i, j, t]);
                }
            }
        }
    }
    for c in targets {
        let key = c.canonical_key();
        for th in &thetas {
            if th.iter().any(|&x| cycles[x].canonical_key() == key) {
                continue;
            }
            let mut odd = 0;
            for &x in th {
                if leap_report(rs, c, &cycles[x])?.is_odd() {
                    odd += 1;
                }
            }
            out.expect(odd % 2 == 0, || {
                let lits: Vec<String> = th.iter().map(|&x| cycles[x].literal()).collect();
                format!("{}: {odd} odd-leaping cycles in theta {}", c.literal(), lits.join(" | "))
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub lemma: Lemma,
    pub instances: usize,
    pub checks: usize,
    /// `seed: detail` for every failed inequality.
    pub counterexamples: Vec<String>,
    /// Instances skipped by the check itself or over the exact cap.
    pub skipped: usize,
}

/// Runs `lemma` on `instances` random rotation systems with at most
/// `max_edges` edges and the genus the lemma needs.
pub fn random_suite(
    lemma: Lemma,
    instances: usize,
    max_edges: usize,
    seed: u64,
    limits: CheckLimits,
) -> Result<SuiteReport> {
    let mut rep = SuiteReport { lemma, instances: 0, checks: 0, counterexamples: Vec::new(), skipped: 0 };
    for i in 0..instances as u64 {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(i);
        let rs = random_with_genus(max_edges, lemma.min_genus().max(1), s);
        rep.instances += 1;
        match check_lemma(&rs, lemma, limits) {
            Ok(c) => {
                rep.checks += c.checks;
                if !c.skipped.is_empty() {
                    rep.skipped += 1;
                }
                rep.counterexamples.extend(c.counterexamples.into_iter().map(|d| format!("seed {s}: {d}")));
            }
            Err(Error::TooLarge { .. }) => rep.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(rep)
}
