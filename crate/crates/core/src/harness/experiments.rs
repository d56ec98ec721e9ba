//! The named experiments. Each composes the library modules, fills an
//! [`ExperimentReport`] and never touches the filesystem.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value;

use super::config::{
    zip_sweep, BoundSuite, BoundsSuiteParams, CommitAttackParams, CommitParams, EfiAttackParams, EfiBuildParams,
    ExperimentConfig, FingerprintParams, OwsgNetParams, OwsgTrivialParams, Params, PhaseOwsgParams, PrsgOwsgParams,
    TomographyBenchParams, TomographyMode, WelchParams,
};
use super::report::{Check, ExperimentReport, Record, Sweep, SweepPoint};
use crate::attacks::{
    efi_distinguisher, expected_pairwise_quantities, net_attack, reference_copies_formula, shots_per_pauli,
    swap_hiding_attack, tomography_sampled, trivial_adversary, trivial_win_probability, AttackTomography,
    EfiTomography, EstimateReuse, NetAttackConfig, PairPerturbation, Perturbation,
};
use crate::bounds::{
    fidelity_mix_sweep, haar_concentration_check, projector_td_check, trf_sweep, welch_check, welch_sweep,
    SweepSummary, MARGIN_TOL,
};
use crate::constructions::phase::{digit_overlap_bound, phase_state, product_overlap, DigitLayout};
use crate::constructions::{
    audit_overlaps, build_linear_code, fingerprint_owsg, flavor_convert, phase_owsg, prg_commitment, prg_efi,
    prg_efi_exact, prsg_delta, prsg_to_owsg, Fingerprint,
};
use crate::error::{Error, Result};
use crate::primitives::{
    ci95, make_haar_prsg, make_toy_owf, make_toy_prg, ArmTallies, CanonicalCommitment, CopyMode, Distinguisher,
    EfiPair, GameOptions, GameReport, OwsgScheme, Relation, Scoring, TrialRecord,
};
use crate::qcore::{cap, random_density, HermitianMatrix, PureState, Rng};

const WELCH: &str = "Welch bound: E|<phi_i|phi_j>|^2 >= 1/d";
const TRIVIAL_EXACT: &str = "random-key adversary wins with E|<phi_k|phi_k'>|^2";
const TRIVIAL_FLOOR: &str = "random-key adversary wins with probability >= 2^-m";
const TD_CHAIN: &str = "E ||phi_k - phi_k'||_tr <= sqrt(1 - 2^-m)";
const NET_WIN: &str = "tomography-and-net adversary wins with probability >= 1 - Delta";
const NET_BOT: &str = "tomography-and-net adversary outputs bot with probability <= gamma";
const NET_TD: &str = "non-bot outputs satisfy ||phi_k - phi_k'||_tr <= 4 gamma";
const EFI_FIDELITY: &str = "F(rho_0, rho_1) <= 2^-n for the PRG-image mixture against I/2^(2n)";
const EFI_TD: &str = "||rho_0 - rho_1||_tr >= 1 - sqrt(F(rho_0, rho_1))";
const CLASSICAL: &str = "closed form for commuting (diagonal) states";
const EFI_ATTACK: &str = "spectral distinguisher advantage >= TD - 8 delta with delta-close estimates";
const HELSTROM: &str = "the Helstrom projector attains advantage TD";
const FP_OVERLAP: &str = "fingerprint overlaps |<h_x|h_x'>| <= delta^r";
const FP_ETA: &str = "repetition count r gives delta^r <= eta";
const FP_FORMULA: &str = "simulated overlaps match the code agreement formula";
const CORRECTNESS: &str = "honest verification accepts with probability 1";
const CROSS: &str = "verifier acceptance on a different image <= eta^2";
const PHASE: &str = "phase-state overlap <= ((1 + cos(2 pi / lambda))/2)^(#differing digits / 2)";
const BASELINE: &str = "sampled random-key win rate matches the exact value";
const PRSG_SLACK: &str = "PRSG-based OWSG slack 2^n (1-h)^(2^m - 1) + h";
const BINDING: &str = "honest-binding success = F(rho_0^C, rho_1^C) <= 2^-n";
const UHLMANN: &str = "the Uhlmann unitary on R attains the binding optimum";
const REGISTERS: &str = "flavor conversion gives |R'| = |C| and |C'| = |R| + 1";
const SWAP_RANK: &str = "Tr rho_0^2 >= 2^-|R| since rank rho_0 <= 2^|R|";
const SWAP_FORMULA: &str = "swap test accepts with probability (1 + Tr rho sigma)/2";
const SWAP_RATE: &str = "empirical swap-test advantage matches (Tr rho_0^2 - Tr rho_0 rho_1)/2";
const TOMO_FAIL: &str = "tomography fails with probability <= beta";
const TOMO_COPIES: &str = "reference tomography copy count 144 lambda d^4 / delta^2";
const TRF: &str = "Tr(rho sigma) <= F(rho, sigma)";
const PROJECTOR: &str = "max_Pi Tr(Pi(A-B)) = ||A-B||_tr + Tr(A-B)/2 and |Tr(Pi(A-B))| <= 2||A-B||_tr";
const MIX: &str = "F(2^-n sum_k psi_k, I/2^m) <= 2^(n-m)";
const HAAR: &str = "Pr[|<psi|0>|^2 >= h] = (1-h)^(2^m - 1) for Haar psi";

/// Restores the previous qubit cap when dropped.
///
/// The cap is process-wide, so concurrent runs with different `max_qubits`
/// interfere; the CLI runs one experiment per process.
struct CapGuard(Option<usize>);

impl CapGuard {
    fn apply(limit: Option<usize>) -> Result<Self> {
        match limit {
            Some(n) => {
                let previous = cap::max_qubits();
                cap::set_max_qubits(n)?;
                Ok(CapGuard(Some(previous)))
            }
            None => Ok(CapGuard(None)),
        }
    }
}

impl Drop for CapGuard {
    fn drop(&mut self) {
        if let Some(n) = self.0 {
            let _ = cap::set_max_qubits(n);
        }
    }
}

/// Runs the experiment named by `config`.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let resolved = config.resolved()?;
    let _cap = CapGuard::apply(resolved.max_qubits)?;
    let start = Instant::now();
    let params = Params::parse(resolved.experiment, &resolved.params)?;
    let rng = Rng::from_seed(resolved.seed);
    let trials = resolved.trials.unwrap_or(0);
    let mut r = ExperimentReport::new(resolved);
    match &params {
        Params::Welch(p) => welch(p, trials, &rng, &mut r)?,
        Params::OwsgTrivial(p) => owsg_trivial(p, trials, &rng, &mut r)?,
        Params::OwsgNet(p) => owsg_net(p, trials, &rng, &mut r)?,
        Params::EfiBuild(p) => efi_build(p, &rng, &mut r)?,
        Params::EfiAttack(p) => efi_attack(p, trials, &rng, &mut r)?,
        Params::Fingerprint(p) => fingerprint(p, &rng, &mut r)?,
        Params::PhaseOwsg(p) => phase(p, trials, &rng, &mut r)?,
        Params::PrsgOwsg(p) => prsg(p, trials, &rng, &mut r)?,
        Params::CommitBuild(p) => {
            let com = base_commitment(p.n, p.prg, &rng)?;
            commitment_checks("commit", &com, p.n, &mut r)?;
        }
        Params::CommitConvert(p) => commit_convert(p, &rng, &mut r)?,
        Params::CommitAttack(p) => commit_attack(p, trials, &rng, &mut r)?,
        Params::TomographyBench(p) => tomography_bench(p, trials, &rng, &mut r)?,
        Params::BoundsSuite(p) => bounds_suite(p, trials, &rng, &mut r)?,
    }
    r.wall_time = start.elapsed().as_secs_f64();
    Ok(r)
}

/// Runs the experiment, then writes the configured report files and plot.
pub fn run_and_write(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let report = run(config)?;
    if let Some(path) = &report.config.plot {
        super::plot::render_svg(&report)?;
        report.write_outputs()?;
        super::plot::emit_plot(&report, path)?;
    } else {
        report.write_outputs()?;
    }
    Ok(report)
}

fn sigma(game: &GameReport) -> f64 {
    game.sigma()
}

fn game_records(series: &str, game: &GameReport) -> Vec<Record> {
    game.records.iter().map(|t| trial_record(series, t)).collect()
}

fn trial_record(series: &str, t: &TrialRecord) -> Record {
    Record::new(t.trial, series)
        .with("key", t.key)
        .with("guess", t.guess)
        .with("accept_prob", t.accept_prob)
        .with("score", t.score)
        .with("bot", t.bot)
        .with("td_to_target", t.td_to_target)
        .with("failure", t.failure.clone())
}

fn sweep_check_records(series: &str, sweep: &SweepSummary, r: &mut ExperimentReport) {
    for (i, c) in sweep.checks.iter().enumerate() {
        r.records.push(
            Record::new(i as u64, series)
                .with("lhs", c.lhs)
                .with("rhs", c.rhs)
                .with("margin", c.margin)
                .with("holds", c.holds),
        );
    }
}

fn sweep_checks(sweep: &SweepSummary, source: &str, r: &mut ExperimentReport) {
    r.check(Check::from_sweep(sweep, source));
    r.check(Check::new(
        format!("{}/min_margin", sweep.name),
        sweep.min_margin,
        Relation::Ge,
        0.0,
        MARGIN_TOL,
        source,
    ));
    r.value(&format!("{}/instances", sweep.name), sweep.instances);
    r.value(&format!("{}/min_margin", sweep.name), sweep.min_margin);
}

fn welch(p: &WelchParams, trials: u64, rng: &Rng, r: &mut ExperimentReport) -> Result<()> {
    let sweep = welch_sweep(trials, &rng.child("welch"))?;
    sweep_check_records("random", &sweep, r);
    for c in &sweep.checks {
        r.check(Check::from_bound(c, WELCH));
    }
    sweep_checks(&sweep, WELCH, r);
    if p.equality_cases {
        for m in 1..=3usize {
            let basis = (0..1usize << m)
                .map(|i| PureState::basis(m, i))
                .collect::<Result<Vec<_>>>()?;
            let uniform = vec![1.0 / basis.len() as f64; basis.len()];
            for &k in &p.moments {
                let c = welch_check(&basis, &uniform, k)?;
                r.records.push(
                    Record::new(m as u64, format!("basis-k{k}"))
                        .with("lhs", c.lhs)
                        .with("rhs", c.rhs)
                        .with("margin", c.margin)
                        .with("holds", c.holds),
                );
                r.check(Check::from_bound(&c, WELCH));
                if k == 1 {
                    // uniform weights on an orthonormal basis attain the bound
                    r.check(Check::new(
                        format!("welch-equality/m{m}"),
                        c.margin.abs(),
                        Relation::Le,
                        0.0,
                        MARGIN_TOL,
                        WELCH,
                    ));
                }
            }
        }
    }
    Ok(())
}

fn haar_toy(n: usize, m: usize, rng: &mut Rng) -> Result<OwsgScheme> {
    prsg_to_owsg(&make_haar_prsg(n, m, rng)?)
}

fn owsg_trivial(p: &OwsgTrivialParams, trials: u64, rng: &Rng, r: &mut ExperimentReport) -> Result<()> {
    let mut points = Vec::new();
    for (idx, (n, m)) in zip_sweep(&p.n, &p.m)?.into_iter().enumerate() {
        let series = format!("n{n}-m{m}");
        let scheme = haar_toy(n, m, &mut rng.child_indexed("scheme", idx as u64))?;
        let exact = trivial_win_probability(&scheme)?;
        let q = expected_pairwise_quantities(&scheme, 100_000, &rng.child_indexed("pairs", idx as u64))?;
        let overlap = q
            .expected_overlap
            .ok_or_else(|| Error::InvalidParam("Haar toy scheme must be pure".into()))?;
        let floor = (-(m as f64)).exp2();
        r.check(Check::new(
            format!("{series}/exact-vs-overlap"),
            exact,
            Relation::Eq,
            overlap,
            1e-9,
            TRIVIAL_EXACT,
        ));
        r.check(Check::new(
            format!("{series}/exact-floor"),
            exact,
            Relation::Ge,
            floor,
            1e-9,
            TRIVIAL_FLOOR,
        ));
        r.check(Check::new(
            format!("{series}/expected-td"),
            q.expected_td,
            Relation::Le,
            q.bound,
            1e-9,
            TD_CHAIN,
        ));
        let opts = GameOptions {
            copies: 1,
            trials,
            mode: CopyMode::Sampled,
            scoring: p.scoring,
            record_td: false,
        };
        let game = run_onewayness_game_for(&scheme, trials, &opts, &rng.child_indexed("game", idx as u64))?.with_bound(
            exact,
            TRIVIAL_EXACT,
            Relation::Eq,
        );
        let s3 = 3.0 * sigma(&game);
        r.check(Check::from_game(format!("{series}/sampled-vs-exact"), &game, s3)?);
        r.check(Check::new(
            format!("{series}/sampled-floor"),
            game.estimate,
            Relation::Ge,
            floor,
            s3,
            TRIVIAL_FLOOR,
        ));
        r.value(&format!("{series}/exact_win"), exact);
        r.value(&format!("{series}/expected_overlap"), overlap);
        r.value(&format!("{series}/expected_td"), q.expected_td);
        r.value(&format!("{series}/td_bound"), q.bound);
        r.value(&format!("{series}/exact_pairs"), q.exact);
        r.value(
            &format!("{series}/scheme"),
            scheme.metadata().get("prsg").cloned().unwrap_or(Value::Null),
        );
        points.push(SweepPoint {
            series: format!("n={n}"),
            x: m as f64,
            y: game.estimate,
            ci95: game.ci95_halfwidth,
            reference: floor,
        });
        r.records.extend(game_records(&series, &game));
        r.game(game);
    }
    r.sweep = Some(Sweep {
        axis: "m (output qubits)".into(),
        y_label: "random-key win probability".into(),
        reference_label: "2^-m".into(),
        points,
    });
    Ok(())
}

fn run_onewayness_game_for(scheme: &OwsgScheme, trials: u64, opts: &GameOptions, rng: &Rng) -> Result<GameReport> {
    let adv = trivial_adversary(scheme);
    let opts = GameOptions { trials, ..*opts };
    crate::primitives::run_onewayness_game(scheme, &adv, &opts, rng)
}

fn owsg_net(p: &OwsgNetParams, trials: u64, rng: &Rng, r: &mut ExperimentReport) -> Result<()> {
    let scheme = haar_toy(p.n, p.m, &mut rng.child("scheme"))?;
    r.value("scheme", scheme.metadata().get("prsg").cloned().unwrap_or(Value::Null));
    let mut points = Vec::new();
    for (idx, big_delta) in p.delta.values().into_iter().enumerate() {
        let series = format!("delta{big_delta}");
        let gamma = big_delta / 6.0;
        let tomography = match p.tomography {
            TomographyMode::Oracle if p.perturbation > 0.0 => AttackTomography::Oracle(Perturbation::Random {
                norm: p.perturbation * gamma,
            }),
            TomographyMode::Oracle => AttackTomography::Oracle(Perturbation::None),
            TomographyMode::Sampled => AttackTomography::Sampled {
                beta: p.beta,
                shot_ceiling: p.shot_ceiling as u128,
            },
        };
        let cfg = NetAttackConfig {
            lam: p.lam,
            failure_budget: None,
            iterations: p.iterations,
            tomography,
            net_ceiling: p.net_ceiling as u128,
        };
        let attack = net_attack(&scheme, big_delta, &cfg)?;
        let params = attack.params().clone();
        let opts = GameOptions {
            copies: if params.mode == CopyMode::Sampled {
                params.copies_required
            } else {
                1
            },
            trials,
            mode: params.mode,
            scoring: Scoring::Exact,
            record_td: true,
        };
        let game =
            crate::primitives::run_onewayness_game(&scheme, &attack, &opts, &rng.child_indexed("game", idx as u64))?
                .with_bound_slack(1.0 - big_delta, NET_WIN, Relation::Ge, 0.0);
        r.check(Check::from_game(format!("{series}/win"), &game, 0.0)?);
        let bot_sigma = (gamma * (1.0 - gamma) / trials.max(1) as f64).sqrt();
        r.check(Check::new(
            format!("{series}/bot-rate"),
            game.bot_rate(),
            Relation::Le,
            gamma,
            3.0 * bot_sigma,
            NET_BOT,
        ));
        let tds: Vec<f64> = game.records.iter().filter_map(|t| t.td_to_target).collect();
        let violations = tds.iter().filter(|&&td| td > 4.0 * gamma + 1e-9).count();
        let max_td = tds.iter().copied().fold(0.0, f64::max);
        r.check(Check::new(
            format!("{series}/td-violations"),
            violations as f64,
            Relation::Le,
            0.0,
            0.0,
            NET_TD,
        ));
        r.value(&format!("{series}/params"), serde_json::to_value(&params)?);
        r.value(&format!("{series}/max_td"), max_td);
        r.value(&format!("{series}/non_bot"), tds.len());
        r.value(&format!("{series}/failures"), game.failures);
        points.push(SweepPoint {
            series: "net attack".into(),
            x: big_delta,
            y: game.estimate,
            ci95: game.ci95_halfwidth,
            reference: 1.0 - big_delta,
        });
        r.records.extend(game_records(&series, &game));
        r.game(game);
    }
    r.sweep = Some(Sweep {
        axis: "Delta".into(),
        y_label: "win probability".into(),
        reference_label: "1 - Delta".into(),
        points,
    });
    Ok(())
}

fn efi_build(p: &EfiBuildParams, rng: &Rng, r: &mut ExperimentReport) -> Result<()> {
    let mut points = Vec::new();
    for (idx, n) in p.n.values().into_iter().enumerate() {
        let series = format!("n{n}");
        let prg = make_toy_prg(p.prg, n, &mut rng.child_indexed("prg", idx as u64))?;
        let pair = prg_efi(&prg)?;
        let (td_exact, f_exact) = prg_efi_exact(&prg);
        let (td, f) = (pair.trace_distance(), pair.fidelity());
        let f_bound = (-(n as f64)).exp2();
        let td_bound = 1.0 - (-(n as f64) / 2.0).exp2();
        r.check(Check::new(
            format!("{series}/fidelity"),
            f,
            Relation::Le,
            f_bound,
            1e-9,
            EFI_FIDELITY,
        ));
        r.check(Check::new(
            format!("{series}/trace-distance"),
            td,
            Relation::Ge,
            td_bound,
            1e-9,
            EFI_TD,
        ));
        r.check(Check::new(
            format!("{series}/fidelity-closed-form"),
            f,
            Relation::Eq,
            f_exact,
            1e-9,
            CLASSICAL,
        ));
        r.check(Check::new(
            format!("{series}/td-closed-form"),
            td,
            Relation::Eq,
            td_exact,
            1e-9,
            CLASSICAL,
        ));
        r.value(&format!("{series}/prg"), serde_json::to_value(prg.descriptor())?);
        r.value(&format!("{series}/injective"), prg.is_injective());
        r.records.push(
            Record::new(idx as u64, &series)
                .with("n", n)
                .with("qubits", pair.num_qubits())
                .with("fidelity", f)
                .with("fidelity_bound", f_bound)
                .with("trace_distance", td)
                .with("trace_distance_bound", td_bound),
        );
        points.push(SweepPoint {
            series: format!("{:?}", p.prg).to_lowercase(),
            x: n as f64,
            y: td,
            ci95: 0.0,
            reference: td_bound,
        });
    }
    r.sweep = Some(Sweep {
        axis: "n (PRG seed bits)".into(),
        y_label: "trace distance".into(),
        reference_label: "1 - 2^(-n/2)".into(),
        points,
    });
    Ok(())
}

/// Plays the distinguishing game with the same child streams as
/// [`crate::primitives::run_efi_game`] and keeps every output bit.
pub fn efi_trials(
    pair: &EfiPair,
    dist: &dyn Distinguisher,
    trials: u64,
    rng: &Rng,
    series: &str,
) -> Result<(Vec<Record>, GameReport)> {
    let mut records = Vec::with_capacity(2 * trials as usize);
    let mut ones = [0u64; 2];
    for b in [false, true] {
        let label = if b { "arm1" } else { "arm0" };
        let bits = (0..trials)
            .into_par_iter()
            .map(|i| dist.distinguish(pair.state(b), &mut rng.child_indexed(label, i)))
            .collect::<Result<Vec<_>>>()?;
        for (i, bit) in bits.into_iter().enumerate() {
            ones[b as usize] += bit as u64;
            records.push(
                Record::new(b as u64 * trials + i as u64, series)
                    .with("arm", b as u64)
                    .with("output", bit),
            );
        }
    }
    let arms = ArmTallies {
        trials0: trials,
        ones0: ones[0],
        trials1: trials,
        ones1: ones[1],
    };
    Ok((
        records,
        GameReport::from_arms(format!("efi/{}/{}", pair.label(), dist.name()), arms, dist.mode()),
    ))
}

fn efi_attack(p: &EfiAttackParams, trials: u64, rng: &Rng, r: &mut ExperimentReport) -> Result<()> {
    let prg = make_toy_prg(p.prg, p.n, &mut rng.child("prg"))?;
    let pair = prg_efi(&prg)?;
    let td = pair.trace_distance();
    let poly = p.p.unwrap_or(1.0 / td);
    let tomography = match p.tomography {
        TomographyMode::Oracle => EfiTomography::Oracle {
            perturbation: p.perturbation,
        },
        TomographyMode::Sampled => EfiTomography::Sampled {
            beta: p.beta,
            shot_ceiling: p.shot_ceiling as u128,
        },
    };
    let dist = efi_distinguisher(&pair, poly, tomography, p.reuse, &rng.child("attack"))?;
    let analysis = dist.analysis().clone();
    let (records, game) = efi_trials(&pair, &dist, trials, &rng.child("attack-game"), "attack")?;
    let game = game.with_bound(analysis.guaranteed_advantage, EFI_ATTACK, Relation::Ge);
    r.check(Check::from_game("attack/advantage", &game, 3.0 * sigma(&game))?);
    r.value("trace_distance", td);
    r.value("prg", serde_json::to_value(prg.descriptor())?);
    r.value("attack", serde_json::to_value(&analysis)?);
    let mut points = vec![SweepPoint {
        series: format!("{:?}", p.perturbation).to_lowercase(),
        x: analysis.delta,
        y: game.estimate,
        ci95: game.ci95_halfwidth,
        reference: analysis.guaranteed_advantage,
    }];
    r.records.extend(records);
    r.game(game);
    if p.baseline {
        let exact = efi_distinguisher(
            &pair,
            poly,
            EfiTomography::Oracle {
                perturbation: PairPerturbation::None,
            },
            EstimateReuse::Cached,
            &rng.child("baseline"),
        )?;
        let cached = exact.analysis().cached_advantage.unwrap_or(f64::NAN);
        r.check(Check::new(
            "baseline/exact-advantage",
            cached,
            Relation::Eq,
            td,
            1e-9,
            HELSTROM,
        ));
        let (records, game) = efi_trials(&pair, &exact, trials, &rng.child("baseline-game"), "baseline")?;
        let game = game.with_bound(td, HELSTROM, Relation::Eq);
        r.check(Check::from_game("baseline/advantage", &game, 3.0 * sigma(&game))?);
        points.push(SweepPoint {
            series: "unperturbed".into(),
            x: 0.0,
            y: game.estimate,
            ci95: game.ci95_halfwidth,
            reference: td,
        });
        r.records.extend(records);
        r.game(game);
    }
    r.sweep = Some(Sweep {
        axis: "estimate error delta".into(),
        y_label: "distinguishing advantage".into(),
        reference_label: "TD - 8 delta".into(),
        points,
    });
    Ok(())
}

fn fingerprint(p: &FingerprintParams, rng: &Rng, r: &mut ExperimentReport) -> Result<()> {
    let per_block = (p.m as f64).log2().ceil() as usize + 1;
    let r_max = cap::max_qubits() / per_block;
    if r_max == 0 {
        return Err(Error::CapExceeded {
            requested: per_block,
            cap: cap::max_qubits(),
        });
    }
    // δ < η^{1/r_max} keeps the repetition count within the cap
    let target = p.target_delta.unwrap_or(p.eta.powf(1.0 / r_max as f64));
    let search = build_linear_code(p.ell, p.m, target, p.max_tries, &rng.child("code"))?;
    let fp = Fingerprint::new(search.code, p.eta)?.with_seed(search.seed);
    cap::check(fp.total_qubits())?;
    let audit = audit_overlaps(&fp)?;
    let bound = fp.overlap_bound();
    r.check(Check::new(
        "overlaps/violations",
        audit.violations as f64,
        Relation::Le,
        0.0,
        0.0,
        FP_OVERLAP,
    ));
    r.check(Check::new(
        "overlaps/max",
        audit.max_overlap,
        Relation::Le,
        bound,
        1e-9,
        FP_OVERLAP,
    ));
    r.check(Check::new("delta^r", bound, Relation::Le, p.eta, 0.0, FP_ETA));
    r.check(Check::new(
        "overlaps/formula",
        audit.max_formula_error,
        Relation::Le,
        0.0,
        1e-9,
        FP_FORMULA,
    ));

    let owf = make_toy_owf(p.owf, p.owf_bits.unwrap_or(p.ell), p.ell, &mut rng.child("owf"))?;
    let scheme = fingerprint_owsg(&owf, &fp)?;
    let correctness = scheme.correctness()?;
    r.check(Check::new(
        "correctness",
        correctness,
        Relation::Eq,
        1.0,
        1e-9,
        CORRECTNESS,
    ));

    // one representative key per image
    let mut reps: Vec<(u64, u64)> = Vec::new();
    for k in 0..scheme.num_keys() {
        let y = owf.eval(k)?;
        if !reps.iter().any(|&(_, y2)| y2 == y) {
            reps.push((k, y));
        }
    }
    let rows = reps
        .par_iter()
        .map(|&(k, y)| -> Result<(f64, f64)> {
            let own = scheme.accept(k, k)?;
            let mut worst = 0.0f64;
            for &(k2, _) in reps.iter().filter(|&&(k2, _)| k2 != k) {
                worst = worst.max(scheme.accept(k2, k)?);
            }
            let _ = y;
            Ok((own, worst))
        })
        .collect::<Result<Vec<_>>>()?;
    let cross = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    r.check(Check::new(
        "cross-image-acceptance",
        cross,
        Relation::Le,
        p.eta * p.eta,
        1e-9,
        CROSS,
    ));
    for (i, (&(k, y), &(own, worst))) in reps.iter().zip(&rows).enumerate() {
        r.records.push(
            Record::new(i as u64, "image")
                .with("key", k)
                .with("image", y)
                .with("accept_self", own)
                .with("max_cross_accept", worst),
        );
    }
    r.value("code", serde_json::to_value(fp.descriptor())?);
    r.value("code_tries", search.tries);
    r.value("target_delta", target);
    r.value("r", fp.r());
    r.value("delta", fp.delta());
    r.value("overlap_bound", bound);
    r.value("total_qubits", fp.total_qubits());
    r.value("pairs", audit.pairs);
    r.value("max_overlap", audit.max_overlap);
    r.value("equality_mismatches", audit.equality_mismatches);
    r.value("correctness", correctness);
    r.value("max_cross_acceptance", cross);
    r.value("owf", serde_json::to_value(owf.descriptor())?);
    Ok(())
}

fn phase(p: &PhaseOwsgParams, trials: u64, rng: &Rng, r: &mut ExperimentReport) -> Result<()> {
    if p.ell > 12 {
        return Err(Error::ParamTooLarge(format!(
            "exhaustive pair scan over {} bits",
            p.ell
        )));
    }
    let owf = make_toy_owf(p.owf, p.n, p.ell, &mut rng.child("owf"))?;
    let scheme = phase_owsg(&owf, p.lam)?;
    let layout = DigitLayout::new(p.ell, p.lam)?;
    let digit_bound = digit_overlap_bound(p.lam);
    let digits: Vec<Vec<u64>> = (0..1u64 << p.ell).map(|y| layout.split(y)).collect();
    let states = digits
        .iter()
        .map(|d| phase_state(d, p.lam))
        .collect::<Result<Vec<_>>>()?;
    // per string: (worst bound - overlap, worst formula error, violations)
    let rows: Vec<(f64, f64, u64)> = (0..states.len())
        .into_par_iter()
        .map(|y| {
            let mut worst = f64::INFINITY;
            let (mut err, mut bad) = (0.0f64, 0u64);
            for y2 in (0..states.len()).filter(|&y2| y2 != y) {
                let ov = states[y].amplitudes().dotc(states[y2].amplitudes()).norm();
                let differing = digits[y].iter().zip(&digits[y2]).filter(|(a, b)| a != b).count();
                let bound = digit_bound.powi(differing as i32);
                worst = worst.min(bound - ov);
                err = err.max((ov - product_overlap(&digits[y], &digits[y2], p.lam)).abs());
                if ov > bound + 1e-9 {
                    bad += 1;
                }
            }
            (worst, err, bad)
        })
        .collect();
    let violations: u64 = rows.iter().map(|x| x.2).sum();
    let min_margin = rows.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
    let formula = rows.iter().map(|x| x.1).fold(0.0, f64::max);
    r.check(Check::new(
        "pairs/violations",
        violations as f64,
        Relation::Le,
        0.0,
        0.0,
        PHASE,
    ));
    r.check(Check::new(
        "pairs/min_margin",
        min_margin,
        Relation::Ge,
        0.0,
        1e-9,
        PHASE,
    ));
    r.check(Check::new("pairs/formula", formula, Relation::Le, 0.0, 1e-9, PHASE));
    let correctness = scheme.correctness()?;
    r.check(Check::new(
        "correctness",
        correctness,
        Relation::Eq,
        1.0,
        1e-9,
        CORRECTNESS,
    ));
    let exact = trivial_win_probability(&scheme)?;
    let opts = GameOptions {
        trials,
        scoring: Scoring::Sampled,
        ..Default::default()
    };
    let game =
        run_onewayness_game_for(&scheme, trials, &opts, &rng.child("game"))?.with_bound(exact, BASELINE, Relation::Eq);
    r.check(Check::from_game(
        "random-key/sampled-vs-exact",
        &game,
        3.0 * sigma(&game),
    )?);
    for (y, row) in rows.iter().enumerate() {
        r.records.push(
            Record::new(y as u64, "string")
                .with(
                    "digits",
                    digits[y].iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" "),
                )
                .with("min_margin", row.0)
                .with("violations", row.2),
        );
    }
    r.records.extend(game_records("random-key", &game));
    r.value("lambda", p.lam);
    r.value("digits", layout.digits);
    r.value("bits_per_digit", layout.bits_per_digit);
    r.value("digit_overlap_bound", digit_bound);
    r.value("pairs", (states.len() * (states.len() - 1)) as u64);
    r.value("correctness", correctness);
    r.value("random_key_exact", exact);
    r.value("owf", serde_json::to_value(owf.descriptor())?);
    r.game(game);
    Ok(())
}

fn prsg(p: &PrsgOwsgParams, trials: u64, rng: &Rng, r: &mut ExperimentReport) -> Result<()> {
    let mut points = Vec::new();
    for (idx, m) in p.m.values().into_iter().enumerate() {
        let series = format!("m{m}");
        let prsg = make_haar_prsg(p.n, m, &mut rng.child_indexed("prsg", idx as u64))?;
        let scheme = prsg_to_owsg(&prsg)?;
        let slack = prsg_delta(p.n, m, p.h);
        let exact = trivial_win_probability(&scheme)?;
        let states = prsg.states();
        let mut max_overlap = 0.0f64;
        for (i, a) in states.iter().enumerate() {
            for b in &states[i + 1..] {
                max_overlap = max_overlap.max(a.overlap_sq(b)?);
            }
        }
        let opts = GameOptions {
            trials,
            scoring: Scoring::Sampled,
            ..Default::default()
        };
        let game = run_onewayness_game_for(&scheme, trials, &opts, &rng.child_indexed("game", idx as u64))?.with_bound(
            exact,
            BASELINE,
            Relation::Eq,
        );
        let s3 = 3.0 * sigma(&game);
        r.check(Check::from_game(format!("{series}/sampled-vs-exact"), &game, s3)?);
        r.check(Check::new(
            format!("{series}/exact-vs-slack"),
            exact,
            Relation::Le,
            slack,
            1e-9,
            PRSG_SLACK,
        ));
        r.check(Check::new(
            format!("{series}/sampled-vs-slack"),
            game.estimate,
            Relation::Le,
            slack,
            s3,
            PRSG_SLACK,
        ));
        r.value(&format!("{series}/slack"), slack);
        r.value(&format!("{series}/exact_win"), exact);
        r.value(&format!("{series}/max_pair_overlap"), max_overlap);
        r.value(&format!("{series}/prsg"), serde_json::to_value(prsg.descriptor())?);
        points.push(SweepPoint {
            series: format!("n={}", p.n),
            x: m as f64,
            y: game.estimate,
            ci95: game.ci95_halfwidth,
            reference: slack,
        });
        r.records.extend(game_records(&series, &game));
        r.game(game);
    }
    r.sweep = Some(Sweep {
        axis: "m (output qubits)".into(),
        y_label: "random-key win probability".into(),
        reference_label: "2^n (1-h)^(2^m-1) + h".into(),
        points,
    });
    Ok(())
}

fn base_commitment(n: usize, kind: crate::primitives::PrgKind, rng: &Rng) -> Result<CanonicalCommitment> {
    prg_commitment(&make_toy_prg(kind, n, &mut rng.child("prg"))?)
}

fn commitment_checks(label: &str, com: &CanonicalCommitment, n: usize, r: &mut ExperimentReport) -> Result<()> {
    for b in [false, true] {
        let psi = com.state(b)?;
        let acc = com.reveal_verify_pure(b, &psi)?;
        r.check(Check::new(
            format!("{label}/reveal-{}", b as u8),
            acc,
            Relation::Eq,
            1.0,
            1e-9,
            CORRECTNESS,
        ));
        r.records.push(
            Record::new(b as u64, label)
                .with("bit", b as u64)
                .with("reveal_accept", acc)
                .with("wrong_opening_accept", com.reveal_verify_pure(!b, &psi)?),
        );
    }
    let opt = com.honest_binding_optimum()?;
    let hiding = com.hiding_pair()?;
    if label == "commit" {
        r.check(Check::new(
            format!("{label}/binding"),
            opt.fidelity,
            Relation::Le,
            (-(n as f64)).exp2(),
            1e-9,
            BINDING,
        ));
    }
    if let Some(u) = &opt.unitary {
        let cheat = com.apply_on_reveal(u, &com.state(false)?)?;
        let achieved = com.reveal_verify_pure(true, &cheat)?;
        r.check(Check::new(
            format!("{label}/uhlmann"),
            achieved,
            Relation::Eq,
            opt.fidelity,
            1e-9,
            UHLMANN,
        ));
    }
    r.value(&format!("{label}/label"), com.label());
    r.value(&format!("{label}/reveal_qubits"), com.reveal_qubits());
    r.value(&format!("{label}/commit_qubits"), com.commit_qubits());
    r.value(&format!("{label}/binding_optimum"), opt.fidelity);
    r.value(&format!("{label}/hiding_trace_distance"), hiding.trace_distance());
    r.value(&format!("{label}/hiding_fidelity"), hiding.fidelity());
    Ok(())
}

fn converted_checks(n: usize, com: &CanonicalCommitment, r: &mut ExperimentReport) -> Result<CanonicalCommitment> {
    let conv = flavor_convert(com)?;
    commitment_checks("converted", &conv, n, r)?;
    r.check(Check::new(
        "converted/commit-qubits",
        conv.commit_qubits() as f64,
        Relation::Eq,
        (2 * n + 1) as f64,
        0.0,
        REGISTERS,
    ));
    r.check(Check::new(
        "converted/reveal-qubits",
        conv.reveal_qubits() as f64,
        Relation::Eq,
        com.commit_qubits() as f64,
        0.0,
        REGISTERS,
    ));
    Ok(conv)
}

fn commit_convert(p: &CommitParams, rng: &Rng, r: &mut ExperimentReport) -> Result<()> {
    let com = base_commitment(p.n, p.prg, rng)?;
    commitment_checks("commit", &com, p.n, r)?;
    converted_checks(p.n, &com, r)?;
    Ok(())
}

fn commit_attack(p: &CommitAttackParams, trials: u64, rng: &Rng, r: &mut ExperimentReport) -> Result<()> {
    let com = base_commitment(p.n, p.prg, rng)?;
    commitment_checks("commit", &com, p.n, r)?;
    let target = if p.convert {
        converted_checks(p.n, &com, r)?
    } else {
        com
    };
    let (dist, a) = swap_hiding_attack(&target)?;
    r.check(Check::new(
        "swap/purity-rank",
        a.purity0,
        Relation::Ge,
        a.rank_bound,
        1e-9,
        SWAP_RANK,
    ));
    r.check(Check::new(
        "swap/predicted",
        a.accept0 - a.accept1,
        Relation::Eq,
        a.predicted_advantage,
        1e-9,
        SWAP_FORMULA,
    ));
    let pair = target.hiding_pair()?;
    let (records, game) = efi_trials(&pair, &dist, trials, &rng.child("swap"), "swap")?;
    let game = game.with_bound(a.predicted_advantage, SWAP_RATE, Relation::Eq);
    r.check(Check::from_game("swap/empirical", &game, 3.0 * sigma(&game))?);
    r.value("swap", serde_json::to_value(&a)?);
    r.records.extend(records);
    r.game(game);
    Ok(())
}

fn tomography_bench(p: &TomographyBenchParams, trials: u64, rng: &Rng, r: &mut ExperimentReport) -> Result<()> {
    cap::check(p.qubits)?;
    let d = 1usize << p.qubits;
    let mut points = Vec::new();
    for (idx, delta) in p.delta.values().into_iter().enumerate() {
        let series = format!("delta{delta}");
        let per = shots_per_pauli(d, delta, p.beta)?;
        let reference_copies = reference_copies_formula(p.lam, d, delta);
        // independent evaluation when 1/δ is an integer: 144 λ d⁴ k² exactly
        let k = (1.0 / delta).round();
        let expected = if (1.0 / delta - k).abs() < 1e-9 {
            (144u128 * p.lam as u128 * (d as u128).pow(4) * (k as u128).pow(2)) as f64
        } else {
            144.0 * p.lam as f64 * (d as f64).powi(4) / (delta * delta)
        };
        r.check(Check::new(
            format!("{series}/reference-copies"),
            reference_copies,
            Relation::Eq,
            expected,
            expected * 1e-15,
            TOMO_COPIES,
        ));
        let base = rng.child_indexed("delta", idx as u64);
        let runs = (0..trials)
            .into_par_iter()
            .map(|i| -> Result<(f64, u128)> {
                let run = base.child_indexed("run", i);
                let rho = random_density(p.qubits, &mut run.child("state"))?;
                let est = tomography_sampled(&rho, delta, p.beta, p.shot_ceiling as u128, &mut run.child("shots"))?;
                let err = HermitianMatrix::difference(&est.estimate, &rho)?.trace_norm_half();
                Ok((err, est.copies_used))
            })
            .collect::<Result<Vec<_>>>()?;
        let failures = runs.iter().filter(|x| x.0 > delta).count() as u64;
        let rate = failures as f64 / trials.max(1) as f64;
        r.check(Check::new(
            format!("{series}/failure-rate"),
            rate,
            Relation::Le,
            p.beta,
            0.0,
            TOMO_FAIL,
        ));
        for (i, &(err, copies)) in runs.iter().enumerate() {
            r.records.push(
                Record::new(i as u64, &series)
                    .with("error", err)
                    .with("failed", err > delta)
                    .with("copies", copies as u64),
            );
        }
        let max_err = runs.iter().map(|x| x.0).fold(0.0, f64::max);
        r.value(&format!("{series}/shots_per_pauli"), per as u64);
        r.value(&format!("{series}/copies_per_run"), (per * (d * d - 1) as u128) as u64);
        r.value(&format!("{series}/reference_copies"), reference_copies);
        r.value(&format!("{series}/failures"), failures);
        r.value(&format!("{series}/max_error"), max_err);
        points.push(SweepPoint {
            series: format!("d={d}"),
            x: delta,
            y: rate,
            ci95: ci95(rate, trials),
            reference: p.beta,
        });
    }
    r.sweep = Some(Sweep {
        axis: "delta (trace-norm target)".into(),
        y_label: "failure rate".into(),
        reference_label: "beta".into(),
        points,
    });
    Ok(())
}

fn bounds_suite(p: &BoundsSuiteParams, trials: u64, rng: &Rng, r: &mut ExperimentReport) -> Result<()> {
    for suite in &p.suites {
        match suite {
            BoundSuite::TraceProductFidelity => {
                let s = trf_sweep(trials, p.qubits, &rng.child("trf"))?;
                sweep_check_records("trace-product-fidelity", &s, r);
                sweep_checks(&s, TRF, r);
            }
            BoundSuite::Projector => {
                let s = projector_td_check(trials, p.qubits, &rng.child("projector"))?;
                sweep_check_records("projector", &s, r);
                sweep_checks(&s, PROJECTOR, r);
            }
            BoundSuite::FidelityMix => {
                let s = fidelity_mix_sweep(trials, p.mix_n, p.mix_m, &rng.child("mix"))?;
                sweep_check_records("fidelity-mix", &s, r);
                sweep_checks(&s, MIX, r);
            }
            BoundSuite::HaarTail => {
                let mut idx = 0u64;
                for &m in &p.haar_m {
                    for &h in &p.haar_h {
                        let c = haar_concentration_check(m, h, p.haar_samples, &rng.child_indexed("haar", idx))?;
                        r.records.push(
                            Record::new(idx, "haar-tail")
                                .with("m", m)
                                .with("h", h)
                                .with("empirical", c.lhs)
                                .with("analytic", c.rhs)
                                .with("tolerance", c.tolerance)
                                .with("holds", c.holds),
                        );
                        r.check(Check::from_bound(&c, HAAR));
                        idx += 1;
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Experiment;
    use crate::primitives::run_efi_game;
    use serde_json::json;

    fn config(e: Experiment, params: Value, trials: Option<u64>) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(e, 7).with_params(params).unwrap();
        c.trials = trials;
        c
    }

    #[test]
    fn welch_hundred_instances() {
        let r = run(&config(Experiment::Welch, json!({}), Some(100))).unwrap();
        assert!(r.pass, "{:?}", r.first_failure());
        assert_eq!(r.records.iter().filter(|x| x.series == "random").count(), 100);
        assert!(r.checks.iter().filter(|c| c.holds).count() >= 100);
    }

    #[test]
    fn trivial_example() {
        let r = run(&config(Experiment::OwsgTrivial, json!({"m": 1, "n": 3}), Some(2000))).unwrap();
        assert!(r.pass, "{:?}", r.first_failure());
        let est = r.games[0].estimate;
        assert!(est >= 0.5 - 3.0 * r.games[0].sigma());
        assert_eq!(r.records.len(), 2000);
        assert!(r.games[0].records.is_empty());
    }

    #[test]
    fn efi_build_example() {
        let r = run(&config(Experiment::EfiBuild, json!({"n": 4}), None)).unwrap();
        assert!(r.pass);
        let f = r.records[0].fields["fidelity"].as_f64().unwrap();
        assert!(f <= 1.0 / 16.0 + 1e-9);
    }

    #[test]
    fn efi_trials_match_the_game_runner() {
        let prg = make_toy_prg(crate::primitives::PrgKind::RandomInjection, 2, &mut Rng::from_seed(1)).unwrap();
        let pair = prg_efi(&prg).unwrap();
        let d = efi_distinguisher(
            &pair,
            1.0,
            EfiTomography::Oracle {
                perturbation: PairPerturbation::None,
            },
            EstimateReuse::Cached,
            &Rng::from_seed(2),
        )
        .unwrap();
        let (records, ours) = efi_trials(&pair, &d, 300, &Rng::from_seed(3), "x").unwrap();
        let theirs = run_efi_game(&pair, &d, 300, &Rng::from_seed(3)).unwrap();
        assert_eq!(ours, theirs);
        assert_eq!(records.len(), 600);
    }

    #[test]
    fn replay_is_bit_identical() {
        let c = config(Experiment::TomographyBench, json!({"delta": [0.2, 0.3]}), Some(20));
        let a = run(&c).unwrap();
        let b = run(&a.config).unwrap();
        assert_eq!(a.config, b.config);
        assert_eq!(
            crate::harness::report::strip_wall_time(&a.to_json().unwrap()),
            crate::harness::report::strip_wall_time(&b.to_json().unwrap())
        );
    }

    #[test]
    fn commitment_experiments() {
        for e in [Experiment::CommitBuild, Experiment::CommitConvert] {
            let r = run(&config(e, json!({"n": 1}), None)).unwrap();
            assert!(r.pass, "{e}: {:?}", r.first_failure());
        }
        let r = run(&config(Experiment::CommitAttack, json!({"n": 1}), Some(2000))).unwrap();
        assert!(r.pass, "{:?}", r.first_failure());
    }
}
