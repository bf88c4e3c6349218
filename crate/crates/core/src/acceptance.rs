//! The acceptance matrix: twelve checks, each a fixed game configuration with
//! a pass condition. Used by `udlab suite acceptance` and by the `acceptance`
//! test target.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};

use crate::adversaries::{
    self, BitFlipForger, CcaAttack, CcaAttackKind, FlipToWeak, HalfTable, HonestQcp, HonestUd, LorToWeak,
    MalleabilityInd, NoQueryLearner, NoisyReader, ReplayForger, RiaLookup, RiaPirateWrapper, SplitFlipAttack,
    SplitUd2Attack, TrivialForger, UdToInd, UlFlipForward, UlFlipHybrid,
};
use crate::bbf::BbfFamily;
use crate::bits::BitString;
use crate::games::{
    self, ClassicalGameConfig, GameError, GameReport, IndAdversary, IndGameConfig, OracleProfile, QcpAdversary,
    QcpGameConfig, QcpGameKind, RunOptions, TrialRng, UdAdversary, UdGameConfig, UlLearner, Verdict,
};
use crate::qcp::{BackendTag, ResourceLedger};
use crate::quantum::{self, Subspace};
use crate::schemes::{self, SchemeInstance};
use crate::signatures::SigSchemeTag;
use crate::stats::chi_square_homogeneity;

/// Trials for the statistical rows.
pub const MAIN_TRIALS: u64 = 10_000;
/// Trials for the exact paired rows and the signature rows.
pub const PAIRED_TRIALS: u64 = 1_000;
/// Trials per cell of the ledger-linearity matrix.
pub const MATRIX_TRIALS: u64 = 100;
/// Significance level of the χ² rows.
pub const CHI_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub seed: u64,
    pub threads: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 20_240_601, threads: 1 }
    }
}

impl SuiteOptions {
    fn run(&self, trials: u64) -> RunOptions {
        RunOptions::new(trials, self.seed).threads(self.threads)
    }

    fn run_seed(&self, trials: u64, offset: u64) -> RunOptions {
        RunOptions::new(trials, self.seed.wrapping_add(offset)).threads(self.threads)
    }
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {:<34} {:>7.1}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub keywords: &'static [&'static str],
    run: fn(&SuiteOptions) -> Result<Outcome, GameError>,
}

impl Criterion {
    pub fn matches(&self, filter: &str) -> bool {
        let f = filter.to_ascii_lowercase();
        self.id.to_string() == f || self.name.contains(&f) || self.keywords.iter().any(|k| k.contains(&f))
    }

    pub fn run(&self, opts: &SuiteOptions) -> CriterionResult {
        let start = Instant::now();
        let outcome = (self.run)(opts).unwrap_or_else(|e| Outcome::fail(format!("error: {e}")));
        CriterionResult {
            id: self.id,
            name: self.name,
            passed: outcome.passed,
            detail: outcome.detail,
            elapsed: start.elapsed(),
        }
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn fail(detail: String) -> Self {
        Outcome { passed: false, detail }
    }
}

/// Collects sub-checks; the criterion passes iff all of them do.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn finish(self) -> Result<Outcome, GameError> {
        let passed = self.failures.is_empty();
        let detail = if passed {
            self.notes.join("; ")
        } else {
            format!("failed: {}", self.failures.join("; "))
        };
        Ok(Outcome { passed, detail })
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "splitting attack on flip-qcp", keywords: &["split", "flip"], run: c1_split_flip },
        Criterion { id: 2, name: "ud non-extendability", keywords: &["split", "ud", "extend"], run: c2_split_ud2 },
        Criterion { id: 3, name: "query-scaling law", keywords: &["split", "scaling"], run: c3_scaling },
        Criterion { id: 4, name: "honest baselines", keywords: &["honest", "baseline"], run: c4_baselines },
        Criterion { id: 5, name: "cca2 malleability dichotomy", keywords: &["cca2", "malleability", "simdec"], run: c5_malleability },
        Criterion { id: 6, name: "splice/truncate/rearrange", keywords: &["cca2", "splice", "truncate", "rearrange"], run: c6_surgery },
        Criterion { id: 7, name: "reduction fidelity", keywords: &["reduction", "wrapper", "ria", "decouple"], run: c7_reductions },
        Criterion { id: 8, name: "correctness suite", keywords: &["correctness", "scheme"], run: c8_correctness },
        Criterion { id: 9, name: "quantum layer", keywords: &["quantum", "subspace"], run: c9_quantum },
        Criterion { id: 10, name: "seuf-cma calibration", keywords: &["signature", "seuf"], run: c10_seuf },
        Criterion { id: 11, name: "ledger linearity", keywords: &["ledger", "linearity", "matrix"], run: c11_linearity },
        Criterion { id: 12, name: "determinism", keywords: &["determinism", "seed"], run: c12_determinism },
    ]
}

/// Runs every criterion matching `filter` (all when `None`), calling `each` as results arrive.
pub fn run_suite(
    filter: Option<&str>,
    opts: &SuiteOptions,
    mut each: impl FnMut(&CriterionResult),
) -> Vec<CriterionResult> {
    criteria()
        .iter()
        .filter(|c| filter.is_none_or(|f| c.matches(f)))
        .map(|c| {
            let r = c.run(opts);
            each(&r);
            r
        })
        .collect()
}

fn ideal_ud1() -> SchemeInstance {
    schemes::build_ud1_cpa(BackendTag::IdealToken)
}

fn extend_ideal() -> Result<SchemeInstance, GameError> {
    Ok(schemes::extend(ideal_ud1())?)
}

fn win_rate(r: &GameReport) -> f64 {
    r.mean / (r.histogram.len() - 1) as f64
}

fn split_flip_report(opts: &SuiteOptions, q: usize, trials: u64) -> Result<GameReport, GameError> {
    let cfg = QcpGameConfig::new(BackendTag::SplitPair, 1, 1, opts.run(trials));
    games::run_flip_qcp(&cfg, &SplitFlipAttack { q })
}

fn c1_split_flip(opts: &SuiteOptions) -> Result<Outcome, GameError> {
    let start = Instant::now();
    let r = split_flip_report(opts, 2, MAIN_TRIALS)?;
    let secs = start.elapsed().as_secs_f64();
    let mut c = Checks::default();
    c.check((1.72..=1.78).contains(&r.mean), format!("mean {:.4} in [1.72, 1.78]", r.mean));
    c.check(r.verdict == Verdict::ExceedsBound, format!("verdict {:?} vs threshold {}", r.verdict, r.threshold));
    c.check(secs < 10.0, format!("runtime {secs:.2}s < 10s"));
    c.finish()
}

fn c2_split_ud2(opts: &SuiteOptions) -> Result<Outcome, GameError> {
    let start = Instant::now();
    let scheme = schemes::extend(schemes::build_ud1_cpa(BackendTag::SplitPair))?;
    let cfg = UdGameConfig::new(scheme, 1, 1, OracleProfile::None, opts.run(MAIN_TRIALS));
    let r = games::run_ud(&cfg, &SplitUd2Attack)?;
    let secs = start.elapsed().as_secs_f64();
    let mut c = Checks::default();
    c.check((1.72..=1.78).contains(&r.mean), format!("mean {:.4} in [1.72, 1.78]", r.mean));
    c.check(secs < 15.0, format!("runtime {secs:.2}s < 15s"));
    c.finish()
}

/// Success probability of one half holder with `q` flip queries: it answers
/// correctly when some query lands in its half and guesses otherwise.
pub fn split_success(q: u32) -> f64 {
    1.0 - 0.5f64.powi(q as i32 + 1)
}

fn c3_scaling(opts: &SuiteOptions) -> Result<Outcome, GameError> {
    let mut c = Checks::default();
    for q in 1..=6u32 {
        let r = split_flip_report(opts, q as usize, MAIN_TRIALS)?;
        let per = win_rate(&r);
        let ci = r.ci.half_width / 2.0;
        let expected = split_success(q);
        c.check((per - expected).abs() <= ci, format!("q={q}: {per:.4} vs {expected:.4} ± {ci:.4}"));
    }
    c.finish()
}

fn within_threshold(c: &mut Checks, label: String, r: &GameReport) {
    let ok = (r.mean - r.threshold).abs() <= r.ci.half_width;
    c.check(ok, format!("{label}: {:.3} vs {} ± {:.3}", r.mean, r.threshold, r.ci.half_width));
}

fn c4_baselines(opts: &SuiteOptions) -> Result<Outcome, GameError> {
    let mut c = Checks::default();
    for (n, k) in [(1, 1), (2, 3), (3, 0)] {
        let cfg = QcpGameConfig::new(BackendTag::IdealToken, n, k, opts.run(MAIN_TRIALS));
        within_threshold(&mut c, format!("weak({n},{k})"), &games::run_weak_qcp(&cfg, &HonestQcp)?);
        within_threshold(&mut c, format!("flip({n},{k})"), &games::run_flip_qcp(&cfg, &HonestQcp)?);
        for profile in OracleProfile::ALL {
            let cfg = UdGameConfig::new(ideal_ud1(), n, k, profile, opts.run(MAIN_TRIALS)).bit_variant(true);
            within_threshold(&mut c, format!("ud1_{}({n},{k})", profile.name()), &games::run_ud(&cfg, &HonestUd)?);
        }
    }
    c.finish()
}

fn c5_malleability(opts: &SuiteOptions) -> Result<Outcome, GameError> {
    let mut c = Checks::default();
    let attack = CcaAttack { kind: CcaAttackKind::Malleability };
    let decoupled = || schemes::decouple_bit(ideal_ud1());
    let unsigned: [(&str, SchemeInstance); 3] =
        [("ud1_cpa", ideal_ud1()), ("extend", extend_ideal()?), ("decouple_bit", decoupled()?)];
    for (label, scheme) in unsigned {
        let r = games::run_ud(&UdGameConfig::new(scheme, 1, 1, OracleProfile::Cca2, opts.run(MAIN_TRIALS)), &attack)?;
        c.check(win_rate(&r) == 1.0, format!("{label} unsigned win {:.3}", win_rate(&r)));
    }
    let signed = schemes::wrap_cca2_bit(decoupled()?, SigSchemeTag::LamportMerkle)?;
    let cfg = UdGameConfig::new(signed, 1, 1, OracleProfile::Cca2, opts.run(MAIN_TRIALS)).shadow_sim(true);
    let r = games::run_ud(&cfg, &attack)?;
    let s = &r.oracle_stats;
    c.check(
        s.dec_queries == 2 * MAIN_TRIALS && s.dec_bottom == s.dec_queries && s.dec_excluded == 0,
        format!("lamport: {}/{} flipped queries answered ⊥", s.dec_bottom, s.dec_queries),
    );
    c.check(
        s.sim_checked == s.dec_queries && s.sim_disagreements == 0,
        format!("simulated oracle agreed on {}/{}", s.sim_checked - s.sim_disagreements, s.sim_checked),
    );
    let control = schemes::wrap_cca2_bit(decoupled()?, SigSchemeTag::Malleable)?;
    let r = games::run_ud(&UdGameConfig::new(control, 1, 1, OracleProfile::Cca2, opts.run(MAIN_TRIALS)), &attack)?;
    c.check(win_rate(&r) == 1.0, format!("malleable-signature control win {:.3}", win_rate(&r)));
    c.finish()
}

fn c6_surgery(opts: &SuiteOptions) -> Result<Outcome, GameError> {
    let mut c = Checks::default();
    let signed = schemes::wrap_cca2_full(ideal_ud1(), SigSchemeTag::LamportMerkle)?;
    for kind in [CcaAttackKind::Truncate, CcaAttackKind::Rearrange, CcaAttackKind::Splice] {
        let attack = CcaAttack { kind };
        let cfg = UdGameConfig::new(extend_ideal()?, 1, 1, OracleProfile::Cca2, opts.run(MAIN_TRIALS));
        let r = games::run_ud(&cfg, &attack)?;
        c.check(win_rate(&r) == 1.0, format!("{} vs extend win {:.3}", kind.name(), win_rate(&r)));
        let cfg = UdGameConfig::new(signed.clone(), 1, 1, OracleProfile::Cca2, opts.run(PAIRED_TRIALS));
        let r = games::run_ud(&cfg, &attack)?;
        let s = &r.oracle_stats;
        c.check(
            s.dec_queries == 2 * PAIRED_TRIALS && s.dec_bottom == s.dec_queries,
            format!("{} vs wrap_cca2_full ⊥ {}/{}", kind.name(), s.dec_bottom, s.dec_queries),
        );
    }
    c.finish()
}

fn same_wins(a: &GameReport, b: &GameReport, player: Option<usize>) -> bool {
    a.records.len() == b.records.len()
        && a.records.iter().zip(&b.records).all(|(x, y)| match player {
            None => x.wins == y.wins,
            Some(i) => x.wins.get(i) == y.wins.get(i),
        })
}

fn qcp_pair(
    opts: &SuiteOptions,
    backend: BackendTag,
    target: QcpGameKind,
    wrapped: &dyn QcpAdversary,
    inner: &dyn QcpAdversary,
) -> Result<bool, GameError> {
    let cfg = QcpGameConfig::new(backend, 1, 1, opts.run(PAIRED_TRIALS));
    let weak = games::run_weak_qcp(&cfg, inner)?;
    let other = games::run_qcp_game(target, &cfg, wrapped)?;
    Ok(same_wins(&weak, &other, None))
}

fn decouple_histograms(opts: &SuiteOptions) -> Result<(Vec<u64>, Vec<u64>), GameError> {
    let plain = ideal_ud1();
    let decoupled = schemes::decouple_bit(plain.clone())?;
    let mut key_rng = TrialRng::seed_from_u64(opts.seed);
    let key = plain.key_gen(8, &mut key_rng)?;
    let m = BitString::single(true);
    let hist = |scheme: &SchemeInstance, stream: u64| -> Result<Vec<u64>, GameError> {
        let mut rng = TrialRng::seed_from_u64(opts.seed ^ stream);
        let mut h = vec![0u64; 512];
        for _ in 0..MAIN_TRIALS {
            let schemes::Ciphertext::Bit(b) = scheme.encrypt(&key, &m, &mut rng)? else {
                return Err(GameError::InvalidParams("expected a single-bit ciphertext".into()));
            };
            h[(b.r.to_u64() as usize) * 2 + usize::from(b.beta)] += 1;
        }
        Ok(h)
    };
    Ok((hist(&plain, 1)?, hist(&decoupled, 2)?))
}

fn c7_reductions(opts: &SuiteOptions) -> Result<Outcome, GameError> {
    let mut c = Checks::default();
    let split = SplitFlipAttack { q: 2 };
    c.check(
        qcp_pair(opts, BackendTag::IdealToken, QcpGameKind::Flip, &FlipToWeak { inner: HonestQcp }, &HonestQcp)?,
        "flip_to_weak(honest) trial-identical".into(),
    );
    c.check(
        qcp_pair(opts, BackendTag::SplitPair, QcpGameKind::Flip, &FlipToWeak { inner: split }, &split)?,
        "flip_to_weak(split_flip) trial-identical".into(),
    );
    c.check(
        qcp_pair(opts, BackendTag::IdealToken, QcpGameKind::Lor, &LorToWeak { inner: HonestQcp }, &HonestQcp)?,
        "lor_to_weak(honest) trial-identical".into(),
    );

    let hybrid = UlFlipHybrid { inner: HalfTable { q: 3 }, q: 3 };
    for (label, lambda, learner) in
        [("hybrid", 8usize, &hybrid as &dyn UlLearner), ("no_query", 64, &NoQueryLearner as &dyn UlLearner)]
    {
        let cfg = ClassicalGameConfig::new(opts.run(PAIRED_TRIALS)).lambda(lambda);
        let ul = games::run_ul(&cfg, learner)?;
        let fl = games::run_flip_ul(&cfg, &UlFlipForward { inner: learner })?;
        c.check(same_wins(&ul, &fl, None), format!("ul_flip_forward({label}) trial-identical"));
    }

    let planted = schemes::build_ud1_cpa_with_family(BackendTag::IdealToken, BbfFamily::ConstantZero);
    let cases: [(&str, SchemeInstance, OracleProfile, &dyn IndAdversary); 2] = [
        ("noisy_reader", planted, OracleProfile::Cpa, &NoisyReader { accuracy: 0.8 }),
        ("malleability", extend_ideal()?, OracleProfile::Cca2, &MalleabilityInd),
    ];
    for (label, scheme, profile, inner) in cases {
        let ind_cfg = IndGameConfig::new(schemes::underlying(scheme.clone()), profile, opts.run(PAIRED_TRIALS));
        let ind = games::run_ind(&ind_cfg, inner)?;
        let ud = games::run_ud(&UdGameConfig::new(scheme, 1, 1, profile, opts.run(PAIRED_TRIALS)), &UdToInd { inner })?;
        let holder_wins = ud.records.iter().all(|r| r.wins.get(1) == Some(&true));
        c.check(
            same_wins(&ind, &ud, Some(0)) && holder_wins,
            format!("ud_to_ind({label}) trial-identical, E[UD] {:.3} = 1 + {:.3}", ud.mean, ind.mean),
        );
    }

    let lookup = RiaLookup { q: 64 };
    for kind in [QcpGameKind::Weak, QcpGameKind::Flip] {
        let base = QcpGameConfig::new(BackendTag::IdealToken, 1, 1, opts.run_seed(MAIN_TRIALS, 1)).lambda(8);
        let unwrapped = games::run_qcp_game(kind, &base.clone().ria(true), &lookup)?;
        let plain = QcpGameConfig { run: opts.run_seed(MAIN_TRIALS, 2), ..base };
        let wrapped = games::run_qcp_game(kind, &plain, &RiaPirateWrapper { inner: lookup, q: 64 })?;
        let chi = chi_square_homogeneity(&unwrapped.histogram, &wrapped.histogram);
        c.check(
            chi.accepts(CHI_ALPHA),
            format!("ria_pirate {}: χ²={:.2} df={} p={:.3}", kind.name(false), chi.statistic, chi.df, chi.p_value),
        );
    }

    let (plain, decoupled) = decouple_histograms(opts)?;
    let chi = chi_square_homogeneity(&plain, &decoupled);
    c.check(chi.accepts(CHI_ALPHA), format!("decouple_bit: χ²={:.1} df={} p={:.3}", chi.statistic, chi.df, chi.p_value));
    c.finish()
}

/// Every scheme the factories can build, per backend, with whether it has a quantum decryptor.
pub fn scheme_matrix() -> Result<Vec<(String, SchemeInstance, bool)>, GameError> {
    let mut out = Vec::new();
    for backend in BackendTag::ALL {
        let ud1 = || schemes::build_ud1_cpa(backend);
        let db = || schemes::decouple_bit(ud1());
        let list: Vec<(SchemeInstance, bool)> = vec![
            (ud1(), true),
            (schemes::extend(ud1())?, true),
            (db()?, true),
            (schemes::extend(db()?)?, true),
            (schemes::decouple_general(ud1(), None), true),
            (schemes::decouple_general(schemes::extend(ud1())?, None), true),
            (schemes::wrap_cca2_bit(db()?, SigSchemeTag::LamportMerkle)?, true),
            (schemes::wrap_cca2_bit(db()?, SigSchemeTag::Malleable)?, true),
            (schemes::wrap_cca2_full(ud1(), SigSchemeTag::LamportMerkle)?, true),
            (schemes::wrap_cca2_full(ud1(), SigSchemeTag::Malleable)?, true),
            (schemes::underlying(ud1()), false),
        ];
        for (s, q) in list {
            out.push((s.name().to_string(), s, q));
        }
    }
    out.push(("se_bbf".into(), schemes::build_se_bbf(BbfFamily::KeyedMix), false));
    Ok(out)
}

fn c8_correctness(opts: &SuiteOptions) -> Result<Outcome, GameError> {
    let mut c = Checks::default();
    let mut total = 0usize;
    for (i, (name, scheme, quantum)) in scheme_matrix()?.into_iter().enumerate() {
        let mut rng = TrialRng::seed_from_u64(opts.seed.wrapping_add(i as u64));
        let bit_only = scheme.message_support() == schemes::MessageSupport::BitOnly;
        let mut failures = 0usize;
        for _ in 0..PAIRED_TRIALS {
            let key = scheme.key_gen(64, &mut rng)?;
            let len = if bit_only { 1 } else { rng.gen_range(1..=8) };
            let m = BitString::random(len, &mut rng);
            let ct = scheme.encrypt(&key, &m, &mut rng)?;
            let mut ok = scheme.decrypt_key(&key, &ct)? == Some(m.clone());
            if quantum {
                let mut ledger = ResourceLedger::new();
                let d = scheme.dec_gen(&key, &mut ledger, &mut rng)?;
                ok &= scheme.decrypt_q(&ledger, &d, &ct)? == Some(m);
            }
            failures += usize::from(!ok);
            total += 1;
        }
        if failures > 0 {
            c.check(false, format!("{name}: {failures} failures"));
        }
    }
    c.check(true, format!("{total} round trips"));
    c.finish()
}

fn all_subspaces(n: usize) -> Result<Vec<Subspace>, GameError> {
    let q = |e: quantum::QuantumError| GameError::InvalidParams(e.to_string());
    let zero = Subspace::zero(n).map_err(q)?;
    let mut seen: HashSet<Subspace> = HashSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    while let Some(s) = frontier.pop() {
        for v in 1..(1u32 << n) {
            if s.contains_index(v) {
                continue;
            }
            let mut gens = s.basis_indices().to_vec();
            gens.push(v);
            let t = Subspace::from_indices(n, gens).map_err(q)?;
            if seen.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

fn c9_quantum(opts: &SuiteOptions) -> Result<Outcome, GameError> {
    let q = |e: quantum::QuantumError| GameError::InvalidParams(e.to_string());
    let mut c = Checks::default();
    let mut rng = TrialRng::seed_from_u64(opts.seed);
    let mut worst = 1.0f64;
    for n in 2..=10usize {
        for _ in 0..100 {
            let dim = rng.gen_range(0..=n);
            let a = quantum::random_subspace(n, dim, &mut rng).map_err(q)?;
            let h = quantum::hadamard_all(&quantum::subspace_state(&a).map_err(q)?);
            let f = quantum::fidelity(&h, &quantum::subspace_state(&a.dual()).map_err(q)?).map_err(q)?;
            worst = worst.min(f);
        }
    }
    c.check(worst >= 1.0 - 1e-9, format!("min fidelity {worst:.12} over 900 subspaces"));
    let mut count = 0usize;
    let mut bad = 0usize;
    for n in 1..=6usize {
        for a in all_subspaces(n)? {
            count += 1;
            let d = a.dual();
            if d.dual() != a || a.dim() + d.dim() != n {
                bad += 1;
            }
        }
    }
    c.check(bad == 0, format!("dual involution and dimension identity on all {count} subspaces, n ≤ 6"));
    c.finish()
}

fn c10_seuf(opts: &SuiteOptions) -> Result<Outcome, GameError> {
    let mut c = Checks::default();
    let cfg = ClassicalGameConfig::new(opts.run(PAIRED_TRIALS));
    let wins = |r: &GameReport| r.records.iter().filter(|t| t.score == 1).count();
    let replay = games::run_seuf_cma(SigSchemeTag::LamportMerkle, 8, &cfg, &ReplayForger)?;
    c.check(wins(&replay) == 0, format!("replay vs lamport {}/{}", wins(&replay), PAIRED_TRIALS));
    let flip = games::run_seuf_cma(SigSchemeTag::LamportMerkle, 8, &cfg, &BitFlipForger)?;
    c.check(wins(&flip) == 0, format!("bitflip vs lamport {}/{}", wins(&flip), PAIRED_TRIALS));
    let trivial = games::run_seuf_cma(SigSchemeTag::Malleable, 8, &cfg, &TrivialForger)?;
    c.check(
        wins(&trivial) as u64 == PAIRED_TRIALS,
        format!("trivial vs malleable {}/{}", wins(&trivial), PAIRED_TRIALS),
    );
    c.finish()
}

fn linear(r: &GameReport, n: usize, k: usize) -> bool {
    r.live_handles.is_some_and(|l| l.min == n + k && l.max == n + k)
}

fn c11_linearity(opts: &SuiteOptions) -> Result<Outcome, GameError> {
    let mut c = Checks::default();
    let mut cells = 0usize;
    let mut record = |c: &mut Checks, label: String, result: Result<GameReport, GameError>, n: usize, k: usize| {
        cells += 1;
        match result {
            Ok(r) if linear(&r, n, k) => {}
            Ok(r) => c.check(false, format!("{label}: live handles {:?}", r.live_handles)),
            Err(e) => c.check(false, format!("{label}: {e}")),
        }
    };
    let qcp_names = [
        "honest",
        "constant:bit=1",
        "negating",
        "ria_lookup:q=4",
        "flip_to_weak(honest)",
        "lor_to_weak(honest)",
        "ria_pirate:q=4(ria_lookup:q=4)",
        "flip_to_weak(split_flip:q=2)",
        "split_flip:q=2",
    ];
    for name in qcp_names {
        let adv = adversaries::qcp_adversary(name).map_err(|e| GameError::InvalidParams(e.to_string()))?;
        let splits = name.contains("split_flip");
        for backend in BackendTag::ALL {
            if splits && backend != BackendTag::SplitPair {
                continue;
            }
            for (n, k) in [(1, 1), (2, 3)] {
                for kind in [QcpGameKind::Weak, QcpGameKind::Flip, QcpGameKind::Lor] {
                    for ria in [false, true] {
                        let cfg = QcpGameConfig::new(backend, n, k, opts.run(MATRIX_TRIALS)).ria(ria);
                        let label = format!("{name}/{}/{backend}/({n},{k})", kind.name(ria));
                        record(&mut c, label, games::run_qcp_game(kind, &cfg, adv.as_ref()), n, k);
                    }
                }
            }
        }
    }
    let ud_names = ["honest", "split_ud2", "malleability", "truncate", "rearrange", "splice", "oracle_probe", "ud_to_ind(random)"];
    let ud_schemes: Vec<(SchemeInstance, bool)> = vec![
        (schemes::extend(schemes::build_ud1_cpa(BackendTag::SplitPair))?, false),
        (extend_ideal()?, false),
        (schemes::extend(schemes::build_ud1_cpa(BackendTag::SubspaceModel))?, false),
        (schemes::wrap_cca2_full(ideal_ud1(), SigSchemeTag::Malleable)?, false),
        (ideal_ud1(), true),
    ];
    for name in ud_names {
        let adv: Box<dyn UdAdversary> =
            adversaries::ud_adversary(name).map_err(|e| GameError::InvalidParams(e.to_string()))?;
        for (scheme, bit_variant) in &ud_schemes {
            if *bit_variant && matches!(name, "split_ud2" | "ud_to_ind(random)" | "truncate" | "rearrange" | "splice") {
                continue;
            }
            for profile in OracleProfile::ALL {
                for (n, k) in [(1, 1), (2, 3)] {
                    let cfg = UdGameConfig::new(scheme.clone(), n, k, profile, opts.run(MATRIX_TRIALS))
                        .bit_variant(*bit_variant);
                    let label = format!("{name}/{}/{}/({n},{k})", scheme.name(), profile.name());
                    record(&mut c, label, games::run_ud(&cfg, adv.as_ref()), n, k);
                }
            }
        }
    }
    let ok = c.failures.is_empty();
    c.check(ok, format!("{cells} game configurations, live count n+k in every trial"));
    c.finish()
}

type ThreadedRow<'a> = dyn Fn(usize) -> Result<GameReport, GameError> + 'a;

fn c12_determinism(opts: &SuiteOptions) -> Result<Outcome, GameError> {
    let mut c = Checks::default();
    let rows: Vec<(&str, Box<ThreadedRow>)> = vec![
        (
            "split_flip",
            Box::new(|threads| {
                let cfg = QcpGameConfig::new(BackendTag::SplitPair, 1, 1, opts.run(PAIRED_TRIALS).threads(threads));
                games::run_flip_qcp(&cfg, &SplitFlipAttack { q: 2 })
            }),
        ),
        (
            "split_ud2",
            Box::new(|threads| {
                let scheme = schemes::extend(schemes::build_ud1_cpa(BackendTag::SplitPair))?;
                let cfg = UdGameConfig::new(scheme, 1, 1, OracleProfile::None, opts.run(PAIRED_TRIALS).threads(threads));
                games::run_ud(&cfg, &SplitUd2Attack)
            }),
        ),
        (
            "malleability_cca2",
            Box::new(|threads| {
                let cfg = UdGameConfig::new(extend_ideal()?, 2, 3, OracleProfile::Cca2, opts.run(PAIRED_TRIALS).threads(threads));
                games::run_ud(&cfg, &CcaAttack { kind: CcaAttackKind::Malleability })
            }),
        ),
        (
            "ul_hybrid",
            Box::new(|threads| {
                let cfg = ClassicalGameConfig::new(opts.run(PAIRED_TRIALS).threads(threads)).lambda(8);
                games::run_ul(&cfg, &UlFlipHybrid { inner: HalfTable { q: 3 }, q: 3 })
            }),
        ),
    ];
    for (label, row) in rows {
        let a = row(1)?.to_json();
        let b = row(1)?.to_json();
        let t = row(2)?.to_json();
        c.check(a == b && a == t, format!("{label} byte-identical (re-run and 2 threads)"));
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters_select_rows() {
        let split: Vec<u8> = criteria().iter().filter(|c| c.matches("split")).map(|c| c.id).collect();
        assert_eq!(split, vec![1, 2, 3]);
        assert_eq!(criteria().iter().filter(|c| c.matches("9")).count(), 1);
    }

    #[test]
    fn enumerates_all_subspaces_of_small_spaces() {
        // Number of subspaces of GF(2)^n: 1, 2, 5, 16, 67.
        for (n, count) in [(1, 2), (2, 5), (3, 16), (4, 67)] {
            assert_eq!(all_subspaces(n).unwrap().len(), count, "n = {n}");
        }
    }
}
