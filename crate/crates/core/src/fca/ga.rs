use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{FcaRule, FcaRuleVector};

/// A candidate rule vector with optional condition genes (IP-octet bounds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub rules: FcaRuleVector,
    #[serde(default)]
    pub octets: Vec<u8>,
    /// Raw fitness from the caller's fitness function, once evaluated.
    #[serde(default)]
    pub fitness: Option<f64>,
}

impl Chromosome {
    pub fn new(rules: FcaRuleVector) -> Self {
        Chromosome { rules, octets: Vec::new(), fitness: None }
    }

    fn same_genes(&self, other: &Chromosome) -> bool {
        self.rules == other.rules && self.octets == other.octets
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub population: usize,
    pub crossover_rate: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Hamming radius (on rule vectors) within which individuals share fitness.
    pub sharing_radius: usize,
    pub elitism: usize,
    pub tournament: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population: 50,
            crossover_rate: 0.9,
            mutation_rate: 0.05,
            sharing_radius: 1,
            elitism: 1,
            tournament: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaRun {
    /// Final population, every member evaluated.
    pub population: Vec<Chromosome>,
    /// Best raw fitness at generation 0 and after each generation.
    pub best_per_generation: Vec<f64>,
}

impl GaRun {
    pub fn best(&self) -> &Chromosome {
        self.population
            .iter()
            .max_by(|a, b| a.fitness.unwrap_or(0.0).total_cmp(&b.fitness.unwrap_or(0.0)))
            .expect("population is non-empty")
    }
}

fn random_rule<R: Rng + ?Sized>(rng: &mut R) -> FcaRule {
    FcaRule::new(*FcaRule::TABLE.choose(rng).expect("non-empty")).expect("table rules are valid")
}

pub fn random_population<R: Rng + ?Sized>(
    cells: usize,
    octet_genes: usize,
    size: usize,
    rng: &mut R,
) -> Vec<Chromosome> {
    (0..size)
        .map(|_| Chromosome {
            rules: FcaRuleVector::new((0..cells).map(|_| random_rule(rng)).collect()).expect("cells > 0"),
            octets: (0..octet_genes).map(|_| rng.random()).collect(),
            fitness: None,
        })
        .collect()
}

/// Raw fitness divided by the number of individuals within the sharing radius
/// (the individual itself included).
fn shared_fitness(pop: &[Chromosome], radius: usize) -> Vec<f64> {
    pop.iter()
        .map(|a| {
            let niche = pop.iter().filter(|b| a.rules.hamming(&b.rules) <= radius).count();
            a.fitness.unwrap_or(0.0) / niche as f64
        })
        .collect()
}

fn tournament<'a, R: Rng + ?Sized>(pop: &'a [Chromosome], shared: &[f64], size: usize, rng: &mut R) -> &'a Chromosome {
    let mut best = rng.random_range(0..pop.len());
    for _ in 1..size.max(1) {
        let c = rng.random_range(0..pop.len());
        if shared[c] > shared[best] {
            best = c;
        }
    }
    &pop[best]
}

fn crossover<R: Rng + ?Sized>(a: &mut Chromosome, b: &mut Chromosome, rng: &mut R) {
    let n = a.rules.len().min(b.rules.len());
    if n >= 2 {
        let cut = rng.random_range(1..n);
        let (ra, rb) = (a.rules.rules_mut(), b.rules.rules_mut());
        ra[cut..n].swap_with_slice(&mut rb[cut..n]);
    }
    let m = a.octets.len().min(b.octets.len());
    if m >= 2 {
        let cut = rng.random_range(1..m);
        a.octets[cut..m].swap_with_slice(&mut b.octets[cut..m]);
    }
}

fn mutate<R: Rng + ?Sized>(c: &mut Chromosome, rate: f64, rng: &mut R) {
    for rule in c.rules.rules_mut() {
        if rng.random_bool(rate) {
            *rule = random_rule(rng);
        }
    }
    for octet in &mut c.octets {
        if rng.random_bool(rate) {
            let delta: i32 = rng.random_range(-64..=64);
            *octet = (*octet as i32 + delta).clamp(0, 255) as u8;
        }
    }
}

fn evaluate<F: FnMut(&Chromosome) -> f64>(pop: &mut [Chromosome], fitness: &mut F) {
    for c in pop.iter_mut().filter(|c| c.fitness.is_none()) {
        c.fitness = Some(fitness(c));
    }
}

fn best_raw(pop: &[Chromosome]) -> f64 {
    pop.iter().filter_map(|c| c.fitness).fold(f64::NEG_INFINITY, f64::max)
}

/// Generational GA: binary (by default) tournament selection on shared
/// fitness, single-point crossover, per-gene mutation restricted to table
/// rules and clamped octets, and elitism on raw fitness.
pub fn ga_evolve<F, R>(
    mut population: Vec<Chromosome>,
    mut fitness: F,
    generations: usize,
    params: &GaParams,
    rng: &mut R,
) -> GaRun
where
    F: FnMut(&Chromosome) -> f64,
    R: Rng + ?Sized,
{
    assert!(!population.is_empty(), "population must be non-empty");
    let size = population.len();
    evaluate(&mut population, &mut fitness);
    let mut history = vec![best_raw(&population)];
    for _ in 0..generations {
        let shared = shared_fitness(&population, params.sharing_radius);
        let mut ranked: Vec<usize> = (0..size).collect();
        ranked.sort_by(|&a, &b| {
            population[b].fitness.unwrap_or(0.0).total_cmp(&population[a].fitness.unwrap_or(0.0)).then(a.cmp(&b))
        });
        let mut next: Vec<Chromosome> =
            ranked.iter().take(params.elitism.min(size)).map(|&i| population[i].clone()).collect();
        while next.len() < size {
            let pa = tournament(&population, &shared, params.tournament, rng);
            let pb = tournament(&population, &shared, params.tournament, rng);
            let (mut a, mut b) = (pa.clone(), pb.clone());
            if rng.random_bool(params.crossover_rate) {
                crossover(&mut a, &mut b, rng);
            }
            for (child, parent) in [(&mut a, pa), (&mut b, pb)] {
                mutate(child, params.mutation_rate, rng);
                if !child.same_genes(parent) {
                    child.fitness = None;
                }
            }
            next.push(a);
            if next.len() < size {
                next.push(b);
            }
        }
        population = next;
        evaluate(&mut population, &mut fitness);
        history.push(best_raw(&population));
    }
    GaRun { population, best_per_generation: history }
}
