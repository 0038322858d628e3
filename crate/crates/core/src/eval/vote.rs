use std::collections::HashMap;

use crate::algebra::{canonicalize, CanonicalPoly};
use crate::eval::extract::normalize_int;
use crate::scalar::Scalar;
use crate::task::TaskKind;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum ClassKey {
    Int(i64),
    Poly(CanonicalPoly),
    Raw(String),
}

fn class_key(answer: &str, task: TaskKind) -> ClassKey {
    match task {
        TaskKind::ListOps | TaskKind::Arithmetic => {
            normalize_int(answer).map(ClassKey::Int).unwrap_or_else(|| ClassKey::Raw(answer.to_string()))
        }
        TaskKind::Algebra => canonicalize(answer).map(ClassKey::Poly).unwrap_or_else(|_| ClassKey::Raw(answer.to_string())),
    }
}

/// Most frequent answer class, represented by its first member. Ties go to
/// the class that appeared first. Algebra answers are grouped by semantic
/// equivalence. Returns `None` for an empty list.
pub fn majority_vote(answers: &[String], task: TaskKind) -> Option<String> {
    // (count, first index) per class
    let mut classes: HashMap<ClassKey, (usize, usize)> = HashMap::new();
    for (i, a) in answers.iter().enumerate() {
        classes.entry(class_key(a, task)).or_insert((0, i)).0 += 1;
    }
    classes
        .values()
        .max_by(|(c1, f1), (c2, f2)| c1.cmp(c2).then(f2.cmp(f1)))
        .map(|(_, first)| answers[*first].clone())
}

fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_usize(k).expect("small integer"))
}

/// Probability that a plurality vote over `samples` independent answers is
/// correct, when each sample is correct with probability `p_correct` and
/// otherwise uniform over `wrong_pool` distinct wrong answers.
///
/// Sums over count vectors with multinomial weights. Given the counts, every
/// ordering is equally likely, so each class tied for the maximum is equally
/// likely to occur first and wins the tie with probability `1 / ties`.
pub fn expected_vote_accuracy<T: Scalar>(p_correct: T, wrong_pool: usize, samples: usize) -> T {
    let pool = T::from_usize(wrong_pool.max(1)).expect("small integer");
    let p_wrong_each = (T::one() - p_correct) / pool;
    let mut counts = vec![0usize; wrong_pool];
    let mut total = T::zero();
    for correct in 0..=samples {
        visit_compositions(&mut counts, 0, samples - correct, &mut |w| {
            let top = w.iter().copied().max().unwrap_or(0);
            if correct == 0 || correct < top {
                return;
            }
            let ties = 1 + w.iter().filter(|&&c| c == correct).count();
            let mut weight: T = factorial::<T>(samples) / factorial::<T>(correct);
            for &c in w {
                weight = weight / factorial::<T>(c);
            }
            let mut prob = weight;
            for _ in 0..correct {
                prob = prob * p_correct;
            }
            for _ in 0..(samples - correct) {
                prob = prob * p_wrong_each;
            }
            total = total + prob / T::from_usize(ties).expect("small integer");
        });
    }
    total
}

fn visit_compositions(counts: &mut [usize], at: usize, remaining: usize, f: &mut impl FnMut(&[usize])) {
    if at + 1 >= counts.len() {
        if let Some(last) = counts.last_mut() {
            *last = remaining;
        } else if remaining > 0 {
            return;
        }
        f(counts);
        return;
    }
    for k in 0..=remaining {
        counts[at] = k;
        visit_compositions(counts, at + 1, remaining - k, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn clear_majority() {
        assert_eq!(majority_vote(&s(&["45", "45", "44", "45", "-3"]), TaskKind::Arithmetic).unwrap(), "45");
    }

    #[test]
    fn semantic_classes_for_algebra() {
        let v = s(&["-b*x*(55*y+8)", "-55*b*x*y-8*b*x", "7"]);
        assert_eq!(majority_vote(&v, TaskKind::Algebra).unwrap(), "-b*x*(55*y+8)");
    }

    #[test]
    fn tie_goes_to_earliest() {
        assert_eq!(majority_vote(&s(&["1", "2"]), TaskKind::ListOps).unwrap(), "1");
        assert_eq!(majority_vote(&s(&["3", "2", "2", "3"]), TaskKind::ListOps).unwrap(), "3");
        assert_eq!(majority_vote(&s(&["+5", "5"]), TaskKind::Arithmetic).unwrap(), "+5");
        assert!(majority_vote(&[], TaskKind::ListOps).is_none());
    }

    #[test]
    fn vote_accuracy_edge_cases() {
        let one = Ratio::new(1i64, 1);
        assert_eq!(expected_vote_accuracy(one, 4, 5), one);
        assert_eq!(expected_vote_accuracy(Ratio::new(0i64, 1), 4, 5), Ratio::new(0, 1));
        // single sample: accuracy is p itself
        assert_eq!(expected_vote_accuracy(Ratio::new(3i64, 5), 4, 1), Ratio::new(3, 5));
        // one wrong answer, three votes: p^3 + 3 p^2 (1-p)
        let p = Ratio::new(1i64, 2);
        assert_eq!(expected_vote_accuracy(p, 1, 3), Ratio::new(1, 2));
        let f: f64 = expected_vote_accuracy(0.6, 4, 5);
        assert!(f > 0.6 && f < 1.0);
    }
}
