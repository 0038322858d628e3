use std::fs;
use std::path::Path;

use nestbench_core::algebra::canonicalize;
use nestbench_core::formula::parse;
use nestbench_core::generator::fixture_record;
use nestbench_core::oracle::evaluate;
use nestbench_core::prompt::{build_prompt, Role, ROLE_SENTENCE};
use nestbench_core::{PromptMethod, TaskKind};

/// First bracketed span after the last question marker.
fn query_formula(prompt: &str) -> &str {
    let tail = &prompt[prompt.rfind("Q:").unwrap()..];
    let start = tail.find(['(', '[']).unwrap();
    let mut depth = 0i32;
    for (i, c) in tail[start..].char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth == 0 {
                    return &tail[start..start + i + 1];
                }
            }
            _ => {}
        }
    }
    panic!("unbalanced query in {prompt}");
}

#[test]
fn every_reference_prompt_is_reproduced() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut checked = 0;
    for task in TaskKind::ALL {
        for method in PromptMethod::ALL {
            // self-consistency shares the zero-shot chain-of-thought prompt
            let file = match method {
                PromptMethod::SelfConsistency => PromptMethod::ZeroShotCot,
                m => m,
            };
            let expected = fs::read_to_string(dir.join(format!("{task}_{file}.txt"))).unwrap();
            let query = query_formula(&expected);
            let record = fixture_record(task, query, "golden".into()).unwrap();
            let bundle = build_prompt(task, method, &record).unwrap();
            let user: Vec<_> = bundle.messages.iter().filter(|m| m.role == Role::User).collect();
            assert_eq!(user.len(), 1, "{task} {method}");
            assert_eq!(user[0].content, expected, "{task} {method}");
            let system = bundle.messages.iter().find(|m| m.role == Role::System);
            assert_eq!(system.map(|m| m.content.as_str()), (method == PromptMethod::ZeroShotRole).then_some(ROLE_SENTENCE));
            checked += 1;
        }
    }
    assert_eq!(checked, 21);
}

#[test]
fn worked_examples_are_solved_exactly() {
    let cases = [
        (TaskKind::ListOps, "[SM[SM794][SM498]7]", "8"),
        (TaskKind::ListOps, "[MIN[MAX243]4[MAX937]]", "4"),
        (TaskKind::Arithmetic, "((28*-53)*(-76*90))", "60"),
        (TaskKind::Arithmetic, "(40-54-(-33--97+-19))", "-59"),
        (TaskKind::Arithmetic, "((87*-51)-(47*-6))", "45"),
        (TaskKind::Arithmetic, "((-12--28-74)+-21+(76+-32+-87))", "-22"),
        (TaskKind::Arithmetic, "((92*26)*(-35*59))", "-80"),
        (TaskKind::Arithmetic, "(83-(46+-5-54)-25)", "71"),
        (TaskKind::Arithmetic, "(51*39)", "89"),
        (TaskKind::Algebra, "(-55*b*x*y+-8*b*x)", "-b*x*(55*y+8)"),
        (TaskKind::Algebra, "((+45*b*x++22*b*x+-47*b*x)+-62*b*x*y)", "-2*b*x*(31*y-10)"),
        (TaskKind::Algebra, "(+31*a*b*y+(-50*a*b*x+-64*a*b*x+-46*a*b*x))", "-a*b*(60*x-31*y)"),
        (TaskKind::Algebra, "(((30*x*y+33*x*y)+(-80*x*y+62*x*y))-62*x*y)", "-17*x*y"),
        (TaskKind::Algebra, "((-54*x*y+-68*x*y)+(-99*x*y++62*x*y))", "-59*x*y"),
        (TaskKind::Algebra, "(+39*a*b*y++15*a*b*x*y)", "+3*a*b*y*(5*x+13)"),
        (TaskKind::Algebra, "(-8*a*x*y+(-38*a*x+-70*a*x))", "-8*a*x*(y+1)"),
    ];
    for (task, formula, answer) in cases {
        let trace = evaluate(&parse(formula, task).unwrap(), task).unwrap();
        assert_eq!(trace.final_answer(), answer, "{formula}");
    }
    let trace = evaluate(&parse("((87*-51)-(47*-6))", TaskKind::Arithmetic).unwrap(), TaskKind::Arithmetic).unwrap();
    assert_eq!(trace.steps, ["((87*-51)-(47*-6))", "((87*-51)--82)", "(-37--82)", "45"]);
    assert!(canonicalize("-b*x*(55*y+8)").is_ok());
}
