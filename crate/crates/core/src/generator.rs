//! Seeded sampling of formulas with an exact nesting depth and operand count.

use rand::Rng;
use rayon::prelude::*;

use crate::dataset::DatasetRecord;
use crate::error::Error;
use crate::formula::{parse, Connective, Formula, Monomial, Operation, Operator, Var};
use crate::seed::rng_for;
use crate::task::{SplitParams, TaskKind};

const PRODUCT_PROBABILITY: f64 = 0.25;
const BRANCH_PROBABILITY: f64 = 0.5;
const TWO_SIGNATURE_PROBABILITY: f64 = 0.5;
const ZERO_COEFFICIENT_PROBABILITY: f64 = 0.05;
const ARITY_RETRIES: usize = 64;

/// Seed of the generated exemplar pool.
pub const EXEMPLAR_SEED: u64 = 0x5eed_e8e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub task: TaskKind,
    pub split: SplitParams,
    pub count: usize,
    pub seed: u64,
}

/// Where in-context exemplars come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExemplarSource {
    /// The fixed worked examples.
    #[default]
    Fixture,
    /// Freshly generated from [`EXEMPLAR_SEED`].
    Generated,
}

struct Sampler<'r, R: Rng> {
    task: TaskKind,
    operands: u32,
    rng: &'r mut R,
}

impl<R: Rng> Sampler<'_, R> {
    fn arity(&mut self, exact: bool) -> usize {
        let o = self.operands as usize;
        if exact || o == 1 {
            o
        } else {
            self.rng.random_range(2..=o)
        }
    }

    /// `residual` is the depth this node must reach when `forced`, and may
    /// not exceed otherwise. `sigs` holds one signature per child at the
    /// root of a two-signature algebra formula, a single entry elsewhere.
    fn node(&mut self, residual: u32, forced: bool, exact_arity: bool, sigs: &[Vec<Var>]) -> Formula {
        let (op, arity) = match self.task {
            TaskKind::ListOps => {
                let op = [Operator::Min, Operator::Max, Operator::Sum][self.rng.random_range(0..3)];
                (op, self.arity(exact_arity))
            }
            TaskKind::Arithmetic => {
                if !exact_arity && self.operands >= 2 && self.rng.random_bool(PRODUCT_PROBABILITY) {
                    (Operator::Product, 2)
                } else {
                    (Operator::Chain, self.arity(exact_arity))
                }
            }
            TaskKind::Algebra => (Operator::Chain, self.arity(exact_arity)),
        };
        let child_sigs = self.assign_signatures(sigs, arity);
        let spine = forced.then(|| self.rng.random_range(0..arity));
        let mut children = Vec::with_capacity(arity);
        for (i, sig) in child_sigs.iter().enumerate() {
            let recurse = residual > 1 && (spine == Some(i) || self.rng.random_bool(BRANCH_PROBABILITY));
            children.push(if recurse {
                self.node(residual - 1, spine == Some(i), false, std::slice::from_ref(sig))
            } else {
                self.leaf(sig)
            });
        }
        let connectives = if op == Operator::Chain {
            (1..arity)
                .map(|_| if self.rng.random_bool(0.5) { Connective::Plus } else { Connective::Minus })
                .collect()
        } else {
            Vec::new()
        };
        Formula::Op(Operation { op, children, connectives })
    }

    fn assign_signatures(&mut self, sigs: &[Vec<Var>], arity: usize) -> Vec<Vec<Var>> {
        if sigs.len() < 2 || arity < 2 {
            return vec![sigs.first().cloned().unwrap_or_default(); arity];
        }
        let mut picks: Vec<usize> = (0..arity).map(|_| self.rng.random_range(0..2)).collect();
        if picks.iter().all(|p| *p == picks[0]) {
            let i = self.rng.random_range(0..arity);
            picks[i] = 1 - picks[i];
        }
        picks.into_iter().map(|p| sigs[p].clone()).collect()
    }

    fn leaf(&mut self, sig: &[Var]) -> Formula {
        match self.task {
            TaskKind::ListOps => Formula::int(self.rng.random_range(0..=9)),
            TaskKind::Arithmetic => Formula::int(self.rng.random_range(-99..=99)),
            TaskKind::Algebra => {
                let coeff = if self.rng.random_bool(ZERO_COEFFICIENT_PROBABILITY) {
                    0
                } else {
                    let c = self.rng.random_range(1..=99);
                    if self.rng.random_bool(0.5) {
                        -c
                    } else {
                        c
                    }
                };
                Formula::mono(Monomial::with_sign_display(coeff, sig.to_vec(), coeff != 0))
            }
        }
    }

    fn signature(&mut self) -> Vec<Var> {
        let mask = self.rng.random_range(1u8..16);
        Var::ALL.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| *v).collect()
    }
}

/// Draws a formula whose depth is exactly `split.nesting` and whose largest
/// operation has exactly `split.operands` operands.
pub fn sample_formula<R: Rng>(task: TaskKind, split: SplitParams, rng: &mut R) -> Result<Formula, Error> {
    let split = split.validate()?;
    let mut s = Sampler { task, operands: split.operands, rng };
    let sigs = if task == TaskKind::Algebra {
        let first = s.signature();
        if split.operands >= 2 && s.rng.random_bool(TWO_SIGNATURE_PROBABILITY) {
            let mut second = s.signature();
            while second == first {
                second = s.signature();
            }
            vec![first, second]
        } else {
            vec![first]
        }
    } else {
        vec![Vec::new()]
    };
    for _ in 0..ARITY_RETRIES {
        let f = s.node(split.nesting, true, false, &sigs);
        if f.max_arity() == split.operands as usize {
            return Ok(f);
        }
    }
    Ok(s.node(split.nesting, true, true, &sigs))
}

/// Generates record `index` of `spec`; independent of every other index.
pub fn generate_record(spec: &GenSpec, index: usize) -> Result<DatasetRecord, Error> {
    let mut rng = rng_for(&[
        &spec.seed.to_string(),
        spec.task.as_str(),
        &spec.split.nesting.to_string(),
        &spec.split.operands.to_string(),
        &index.to_string(),
    ]);
    let formula = sample_formula(spec.task, spec.split, &mut rng)?;
    let id = format!("{}-{}-{}-{}", spec.task, spec.split.nesting, spec.split.operands, index);
    DatasetRecord::solve(id, spec.task, spec.split, spec.seed, &formula)
}

pub fn generate_dataset(spec: &GenSpec) -> Result<Vec<DatasetRecord>, Error> {
    spec.split.validate()?;
    (0..spec.count).into_par_iter().map(|i| generate_record(spec, i)).collect()
}

/// Reference few-shot exemplars for each task, one per exemplar split.
pub fn fixture_exemplars(task: TaskKind) -> [&'static str; 3] {
    match task {
        TaskKind::ListOps => ["[MIN37]", "[MAX[MIN41]2]", "[SM[SM794][SM498]7]"],
        TaskKind::Arithmetic => ["(51*39)", "((28*-53)*(-76*90))", "(40-54-(-33--97+-19))"],
        TaskKind::Algebra => [
            "(-55*b*x*y+-8*b*x)",
            "((-54*x*y+-68*x*y)+(-99*x*y++62*x*y))",
            "((+12*x*y+-59*x*y++58*x*y)+(+36*x*y++13*x*y++93*x*y)+(+96*x*y+-55*x*y++73*x*y))",
        ],
    }
}

/// Solves a literal formula string into a record whose split is read off the tree.
pub fn fixture_record(task: TaskKind, formula: &str, id: String) -> Result<DatasetRecord, Error> {
    let f = parse(formula, task)?;
    let split = SplitParams::new(f.depth() as u32, f.max_arity() as u32);
    DatasetRecord::solve(id, task, split, 0, &f)
}

/// Three solved exemplars for the splits (1,2), (2,2) and (2,3).
pub fn exemplar_pool(task: TaskKind, source: ExemplarSource) -> Result<Vec<(SplitParams, DatasetRecord)>, Error> {
    match source {
        ExemplarSource::Fixture => fixture_exemplars(task)
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let r = fixture_record(task, s, format!("{task}-fixture-{i}"))?;
                Ok((r.split(), r))
            })
            .collect(),
        ExemplarSource::Generated => SplitParams::exemplar_splits()
            .into_iter()
            .map(|split| {
                let spec = GenSpec { task, split, count: 1, seed: EXEMPLAR_SEED };
                Ok((split, generate_record(&spec, 0)?))
            })
            .collect(),
    }
}

/// First generated exemplar for `split` whose formula differs from `avoid`.
pub fn generated_exemplar(task: TaskKind, split: SplitParams, avoid: &str) -> Result<DatasetRecord, Error> {
    let spec = GenSpec { task, split, count: usize::MAX, seed: EXEMPLAR_SEED };
    let mut index = 0;
    loop {
        let r = generate_record(&spec, index)?;
        if r.formula != avoid {
            return Ok(r);
        }
        index += 1;
    }
}
