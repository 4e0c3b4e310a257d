//! Random games: Monte Carlo playouts where each move is uniform over the
//! legal moves, exact length-residue distributions under that measure, and
//! exact counts of complete games (the uniform measure over games).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};
use crate::graph::GameGraph;
use crate::solver::solve;
use crate::state::GameState;

/// Name recorded in every simulation report.
pub const GENERATOR: &str = "ChaCha8 (seed_from_u64, stream = trial index)";

/// Which probability measure a random game is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomGameModel {
    /// Each turn the mover picks uniformly among the legal moves.
    MoveUniform,
    /// Every complete game is equally likely.
    GameUniform,
}

/// Residue `z` of game length modulo `modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModQuery {
    pub modulus: u32,
    pub residue: u32,
}

impl ModQuery {
    pub fn new(modulus: u32, residue: u32) -> Result<ModQuery> {
        check_modulus(modulus)?;
        if residue >= modulus {
            return Err(Error::Domain(format!(
                "residue {residue} must be below {modulus}"
            )));
        }
        Ok(ModQuery { modulus, residue })
    }
}

fn check_modulus(modulus: u32) -> Result<()> {
    if modulus == 0 {
        return Err(Error::Domain("modulus must be at least 1".into()));
    }
    Ok(())
}

/// One simulated game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub trial: u64,
    pub length: u64,
    pub splits: u64,
    pub combines: u64,
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Play one game with uniformly random moves.
pub fn playout(start: &GameState, rng: &mut impl Rng) -> (u64, u64) {
    let mut state = start.clone();
    let (mut splits, mut combines) = (0, 0);
    let mut moves = Vec::new();
    loop {
        moves.clear();
        state.for_each_move(|m| moves.push(m));
        if moves.is_empty() {
            return (splits, combines);
        }
        let m = moves[rng.gen_range(0..moves.len())];
        match m {
            crate::state::Move::Split(_) => splits += 1,
            crate::state::Move::Combine(_) => combines += 1,
        }
        state = state.apply_unchecked(m);
    }
}

pub fn simulate_game(start: &GameState, seed: u64, trial: u64) -> GameRecord {
    let (splits, combines) = playout(start, &mut trial_rng(seed, trial));
    GameRecord {
        trial,
        length: splits + combines,
        splits,
        combines,
    }
}

/// Histogram of game length modulo `modulus`, exact or simulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub n: u64,
    #[serde(rename = "Z")]
    pub modulus: u32,
    pub model: RandomGameModel,
    /// Number of playouts, for simulations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    pub exact: bool,
    /// Playout counts, or numbers of complete games, per residue.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub counts: Vec<u128>,
    pub probabilities: Vec<f64>,
    /// Exact probabilities as `"p/q"`, for exact histograms.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub exact_probabilities: Vec<String>,
    /// 95% Clopper-Pearson intervals, for simulations.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub intervals: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

/// `trials` move-uniform playouts from `start`, tallied by length mod `modulus`.
///
/// Trial `t` draws from its own stream, so the result does not depend on
/// how the trials are spread over threads.
pub fn simulate(start: &GameState, trials: u64, seed: u64, modulus: u32) -> Result<Histogram> {
    check_modulus(modulus)?;
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let z = modulus as usize;
    let counts: Vec<u64> = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; z],
            |mut acc, t| {
                let rec = simulate_game(start, seed, t);
                acc[(rec.length % u64::from(modulus)) as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; z],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let probabilities = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    let intervals = counts
        .iter()
        .map(|&c| clopper_pearson(c, trials, 0.05))
        .collect();
    Ok(Histogram {
        n: start.value(),
        modulus,
        model: RandomGameModel::MoveUniform,
        trials: Some(trials),
        exact: false,
        counts: counts.into_iter().map(u128::from).collect(),
        probabilities,
        exact_probabilities: Vec::new(),
        intervals,
        seed: Some(seed),
        generator: Some(GENERATOR.to_string()),
    })
}

/// Exact (Clopper-Pearson) two-sided confidence interval for a binomial
/// proportion with `successes` out of `trials`, at level `1 - alpha`.
pub fn clopper_pearson(successes: u64, trials: u64, alpha: f64) -> (f64, f64) {
    let (k, n) = (successes as f64, trials as f64);
    let lower = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0)
            .expect("positive shape parameters")
            .inverse_cdf(alpha / 2.0)
    };
    let upper = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k)
            .expect("positive shape parameters")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lower, upper)
}

fn graph_of(start: &GameState) -> GameGraph<GameState> {
    solve(start).graph().clone()
}

/// Exact distribution of game length mod `modulus` under move-uniform play.
pub fn exact_residue_distribution(start: &GameState, modulus: u32) -> Result<Vec<BigRational>> {
    check_modulus(modulus)?;
    let g = graph_of(start);
    Ok(residue_distribution_on(&g, modulus))
}

pub(crate) fn residue_distribution_on(g: &GameGraph<GameState>, modulus: u32) -> Vec<BigRational> {
    let z = modulus as usize;
    let mut dist: Vec<Vec<BigRational>> = vec![Vec::new(); g.vertex_count()];
    for &u in g.topological_order() {
        let succ = g.successors(u);
        let mut d = vec![BigRational::zero(); z];
        if succ.is_empty() {
            d[0] = BigRational::one();
        } else {
            let weight = BigRational::new(BigInt::one(), BigInt::from(succ.len()));
            for &v in succ {
                // One more move shifts every residue up by one.
                for (r, p) in dist[v as usize].iter().enumerate() {
                    d[(r + 1) % z] += p * &weight;
                }
            }
        }
        dist[u as usize] = d;
    }
    std::mem::take(&mut dist[GameGraph::<GameState>::START as usize])
}

/// Exact probability that a move-uniform random game has odd length.
pub fn exact_parity_prob(start: &GameState) -> BigRational {
    let mut d = exact_residue_distribution(start, 2).expect("modulus 2 is valid");
    d.swap_remove(1)
}

/// Exact numbers of complete games, in total and by length mod `modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameCounts {
    pub total: u128,
    pub by_residue: Vec<u128>,
}

fn overflow() -> Error {
    Error::Overflow("number of complete games exceeds u128".into())
}

/// Count complete games from `start` by length residue.
pub fn enumerate_games(start: &GameState, modulus: u32) -> Result<GameCounts> {
    check_modulus(modulus)?;
    let g = graph_of(start);
    count_games_on(&g, modulus)
}

pub(crate) fn count_games_on(g: &GameGraph<GameState>, modulus: u32) -> Result<GameCounts> {
    let z = modulus as usize;
    let mut counts: Vec<Vec<u128>> = vec![Vec::new(); g.vertex_count()];
    for &u in g.topological_order() {
        let succ = g.successors(u);
        let mut c = vec![0u128; z];
        if succ.is_empty() {
            c[0] = 1;
        } else {
            for &v in succ {
                for (r, &k) in counts[v as usize].iter().enumerate() {
                    let slot = &mut c[(r + 1) % z];
                    *slot = slot.checked_add(k).ok_or_else(overflow)?;
                }
            }
        }
        counts[u as usize] = c;
    }
    let by_residue = std::mem::take(&mut counts[GameGraph::<GameState>::START as usize]);
    let total = by_residue
        .iter()
        .try_fold(0u128, |acc, &k| acc.checked_add(k))
        .ok_or_else(overflow)?;
    Ok(GameCounts { total, by_residue })
}

/// Number of complete games of every length.
pub fn length_spectrum(start: &GameState) -> Result<BTreeMap<u64, u128>> {
    let g = graph_of(start);
    let mut spectra: Vec<BTreeMap<u64, u128>> = vec![BTreeMap::new(); g.vertex_count()];
    for &u in g.topological_order() {
        let succ = g.successors(u);
        let mut s = BTreeMap::new();
        if succ.is_empty() {
            s.insert(0, 1);
        }
        for &v in succ {
            for (&len, &k) in &spectra[v as usize] {
                let slot = s.entry(len + 1).or_insert(0u128);
                *slot = slot.checked_add(k).ok_or_else(overflow)?;
            }
        }
        spectra[u as usize] = s;
    }
    Ok(std::mem::take(
        &mut spectra[GameGraph::<GameState>::START as usize],
    ))
}

/// Exact histogram under either measure.
pub fn exact_histogram(
    start: &GameState,
    modulus: u32,
    model: RandomGameModel,
) -> Result<Histogram> {
    check_modulus(modulus)?;
    let g = graph_of(start);
    let (counts, exact): (Vec<u128>, Vec<BigRational>) = match model {
        RandomGameModel::MoveUniform => (Vec::new(), residue_distribution_on(&g, modulus)),
        RandomGameModel::GameUniform => {
            let c = count_games_on(&g, modulus)?;
            let total = BigInt::from(c.total);
            let probs = c
                .by_residue
                .iter()
                .map(|&k| BigRational::new(BigInt::from(k), total.clone()))
                .collect();
            (c.by_residue, probs)
        }
    };
    Ok(Histogram {
        n: start.value(),
        modulus,
        model,
        trials: None,
        exact: true,
        counts,
        probabilities: exact.iter().map(rational_to_f64).collect(),
        exact_probabilities: exact.iter().map(|p| p.to_string()).collect(),
        intervals: Vec::new(),
        seed: None,
        generator: None,
    })
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Largest distance of any residue-class probability from `1 / modulus`.
pub fn max_deviation(probabilities: &[BigRational]) -> BigRational {
    let uniform = BigRational::new(BigInt::one(), BigInt::from(probabilities.len()));
    probabilities
        .iter()
        .map(|p| (p - &uniform).abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// Residue-class deviations from uniform for one `n` under both measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    pub n: u64,
    #[serde(rename = "Z")]
    pub modulus: u32,
    pub move_uniform: f64,
    pub game_uniform: f64,
    #[serde(skip)]
    pub move_uniform_exact: Option<BigRational>,
    #[serde(skip)]
    pub game_uniform_exact: Option<BigRational>,
}

/// Exact max deviations from `1/modulus` for each start `zeckendorf(n)`.
pub fn equidistribution_report(ns: &[u64], modulus: u32) -> Result<Vec<DeviationRow>> {
    check_modulus(modulus)?;
    ns.iter()
        .map(|&n| {
            let g = graph_of(&GameState::zeckendorf(n)?);
            let p = max_deviation(&residue_distribution_on(&g, modulus));
            let counts = count_games_on(&g, modulus)?;
            let total = BigInt::from(counts.total);
            let mu: Vec<BigRational> = counts
                .by_residue
                .iter()
                .map(|&k| BigRational::new(BigInt::from(k), total.clone()))
                .collect();
            let m = max_deviation(&mu);
            Ok(DeviationRow {
                n,
                modulus,
                move_uniform: rational_to_f64(&p),
                game_uniform: rational_to_f64(&m),
                move_uniform_exact: Some(p),
                game_uniform_exact: Some(m),
            })
        })
        .collect()
}

/// True when both measures' deviations never increase along the rows.
pub fn deviations_non_increasing(rows: &[DeviationRow]) -> bool {
    rows.windows(2).all(|w| {
        w[1].move_uniform_exact <= w[0].move_uniform_exact
            && w[1].game_uniform_exact <= w[0].game_uniform_exact
    })
}
