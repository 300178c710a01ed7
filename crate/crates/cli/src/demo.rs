//! The worked examples of every module, reproduced with exact values.

use std::fmt::Write;

use aitlab_core::algprob::{
    estimate_m, estimate_m_enumerative, explore, normalize, transport_machine, BudgetSchedule, EncodingMap,
};
use aitlab_core::bell::{
    behavior_from_hvm, check_lemma_a1, chsh, correlated_non_detection, is_classical, postselect, signalling_report,
    Classicality, Correlation, HiddenVariableModel,
};
use aitlab_core::induction::{
    bound_check, check_sustainable, evaluate_test, fair_vs_ones_closed_form, persistence_curve, predict_next,
    ComputableTest,
};
use aitlab_core::mixture::{make_mixture, FamilyMember, MemberKind, MixtureState};
use aitlab_core::mtm::{library, reference_universal, run, universal_input, RunStatus};
use aitlab_core::rational::{self, display as fmt_q, ratio};
use aitlab_core::{BitString, Rational};
use clap::ValueEnum;
use serde_json::json;

use crate::error::CliError;
use crate::mixture::posterior_entries;
use crate::output::{Format, Provenance, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Module {
    Mtm,
    Algprob,
    Induction,
    Mixture,
    Bell,
}

pub fn demo(module: Module) -> Result<Report, CliError> {
    match module {
        Module::Mtm => mtm_demo(),
        Module::Algprob => algprob_demo(),
        Module::Induction => induction_demo(),
        Module::Mixture => mixture_demo(),
        Module::Bell => bell_demo(),
    }
}

fn bits(s: &str) -> BitString {
    s.parse().expect("literal bit string")
}

fn demo_report(name: &str, result: serde_json::Value, text: String) -> Report {
    Report::new(Provenance::new(&format!("demo-paper {name}")), result).with_text(text).default_format(Format::Text)
}

const DEMO_INPUT: &str = "1011";
const DEMO_BUDGET: usize = 40;

fn short(x: &BitString) -> String {
    let s = format!("{x:?}");
    if s.chars().count() > 12 {
        format!("{}…", s.chars().take(11).collect::<String>())
    } else {
        s
    }
}

pub fn mtm_demo() -> Result<Report, CliError> {
    let input = bits(DEMO_INPUT);
    let mut rows = Vec::new();
    let mut text = format!("Library machines on input {DEMO_INPUT} with {DEMO_BUDGET} steps, directly and through U\n");
    let _ = writeln!(text, "{:<14} {:<13} {:<17} {:<13} consistent", "machine", "output", "status", "via U");
    for nm in library::suite() {
        let direct = run(&nm.machine, &input, DEMO_BUDGET);
        let code = universal_input(&nm.machine, &BitString::empty())?;
        let budget = 2000 * direct.steps + 50 * code.len() + 1000;
        let via_u = run(reference_universal(), &code.concat(&input), budget);
        // Halting runs must agree exactly; a run cut off by its budget only
        // has to be a prefix of what U produced with more room.
        let consistent = match direct.status {
            RunStatus::BudgetExhausted => direct.output.is_prefix_of(&via_u.output),
            _ => via_u.output == direct.output && via_u.status == direct.status,
        };
        let status = serde_json::to_value(direct.status).expect("status serializes");
        let _ = writeln!(
            text,
            "{:<14} {:<13} {:<17} {:<13} {}",
            nm.name,
            short(&direct.output),
            status.as_str().unwrap_or_default(),
            short(&via_u.output),
            consistent
        );
        rows.push(json!({
            "machine": nm.name,
            "description_bits": code.len(),
            "direct": direct,
            "universal_budget": budget,
            "universal_status": via_u.status,
            "universal_output_len": via_u.output.len(),
            "universal_output_prefix": via_u.output.prefix(direct.output.len().min(via_u.output.len())),
            "consistent": consistent,
        }));
    }
    let result = json!({ "input": input, "budget": DEMO_BUDGET, "machines": rows });
    Ok(demo_report("mtm", result, text))
}

pub fn algprob_demo() -> Result<Report, CliError> {
    let copy = library::copy();
    let x = bits("101");
    let tree = estimate_m(&copy, &x, 3, 100);
    let enumerated = estimate_m_enumerative(&copy, &x, 3, 100, BudgetSchedule::Fixed);
    let table = explore(&copy, 3, 6, 100);
    let kraft: Vec<Rational> = (0..=3).map(|n| table.kraft_sum(n)).collect();
    let nm = normalize(&copy, 3, 6, 100);
    let prediction = predict_next(&nm, &bits("11"))?;

    let zero = library::constant_zero();
    let map = EncodingMap::inversion();
    let v = transport_machine(&zero, &map)?;
    let (tu, tv) = (explore(&zero, 3, 6, 100), explore(&v, 3, 6, 100));
    let transport: Vec<_> = BitString::all_up_to(3)
        .map(|x| {
            let y = map.apply(&x).expect("automaton maps are total");
            (x.clone(), tv.m_lower(&x).unwrap().clone(), tu.m_lower(&y).unwrap().clone())
        })
        .collect();
    let invariant = transport.iter().all(|(_, a, b)| a == b);

    let mut text = String::new();
    let _ = writeln!(text, "copy, x = 101, L = 3, S = 100");
    let _ = writeln!(text, "  M_lower (tree)      = {}", fmt_q(&tree.m_lower));
    let _ = writeln!(text, "  M_lower (enumerate) = {}", fmt_q(&enumerated.m_lower));
    let _ = writeln!(text, "  Km_upper            = {:?}", tree.km_upper);
    let _ = writeln!(
        text,
        "copy, depth 3, L = 6, S = 100: Kraft sums by length {}",
        kraft.iter().map(fmt_q).collect::<Vec<_>>().join(" ")
    );
    let _ = writeln!(
        text,
        "normalized copy after 11: p0 = {}, p1 = {}, deficiency = {}",
        fmt_q(&prediction.p0),
        fmt_q(&prediction.p1),
        fmt_q(&prediction.deficiency)
    );
    let _ = writeln!(text, "constant_zero transported by inversion, depth 3: invariant holds = {invariant}");
    for (x, a, b) in &transport {
        let _ = writeln!(text, "  x = {:<4} M_V(x) = {:<6} M_U(φ(x)) = {}", format!("{x:?}"), fmt_q(a), fmt_q(b));
    }
    let result = json!({
        "copy_101": { "tree": tree, "enumerate": enumerated },
        "copy_kraft_sums": kraft.iter().map(rational::format).collect::<Vec<_>>(),
        "copy_normalized_prediction": prediction,
        "inversion_transport": {
            "machine": "constant_zero",
            "rows": transport.iter().map(|(x, a, b)| json!({ "x": x, "m_transported": rational::format(a), "m_original": rational::format(b) })).collect::<Vec<_>>(),
            "invariant_holds": invariant,
        },
    });
    Ok(demo_report("algprob", result, text))
}

fn fair_and_ones() -> MixtureState {
    make_mixture(vec![
        FamilyMember::new(0, "fair coin", 2, MemberKind::bernoulli(ratio(1, 2))),
        FamilyMember::new(1, "all ones", 2, MemberKind::all_ones()),
    ])
    .expect("valid family")
}

pub const PERSIST_DEMO_N: usize = 16;

pub fn induction_demo() -> Result<Report, CliError> {
    let ninety = ComputableTest::ninety_percent_ones();
    let evaluations: Vec<_> = ["1101111111", "110", "1111111111", "0011111111"]
        .iter()
        .map(|s| Ok((bits(s), evaluate_test(&ninety, &bits(s))?)))
        .collect::<Result<_, CliError>>()?;
    let sustain = check_sustainable(&ninety, 12)?;
    let goodman = ComputableTest::goodman(ComputableTest::last_bit(), 6);
    let goodman_sustain = check_sustainable(&goodman, 10)?;

    let mix = fair_and_ones();
    let curve = persistence_curve(&mix, &ComputableTest::last_bit(), PERSIST_DEMO_N)?;
    let closed_form_matches = curve.points.iter().all(|p| p.p1.lower == fair_vs_ones_closed_form(p.j));
    let check = bound_check(&curve, &ratio(1, 4))?;

    let mut text = format!("test {}\n", ninety.describe());
    for (x, v) in &evaluations {
        let _ = writeln!(text, "  f({x:?}) = {}", u8::from(*v));
    }
    let _ = writeln!(
        text,
        "  sustainable to depth {}: {} ({} nodes checked)",
        sustain.depth, sustain.sustainable_to_depth, sustain.nodes_checked
    );
    let _ = writeln!(
        text,
        "test {}: sustainable to depth {}: {}, witness failures {}",
        goodman.describe(),
        goodman_sustain.depth,
        goodman_sustain.sustainable_to_depth,
        goodman_sustain.witness_failure_count
    );
    let _ = writeln!(text, "persistence of last_bit under {{fair coin: c=2, all ones: c=2}}");
    let _ = writeln!(text, "  {:>2}  {:<12} cumulative exception", "j", "p(1|1^j)");
    for p in &curve.points {
        let _ =
            writeln!(text, "  {:>2}  {:<12} {:.12}", p.j, fmt_q(&p.p1.lower), rational::to_f64(&p.cum_exception.upper));
    }
    let _ = writeln!(text, "  matches (1+2^-(j+1))/(1+2^-j): {closed_form_matches}");
    let _ = writeln!(
        text,
        "  weight 1/4: cumulative exception {:.12} <= 2: {}",
        rational::to_f64(&check.max_cum_exception),
        check.cumulative_holds
    );
    let result = json!({
        "ninety_percent_ones": {
            "evaluations": evaluations.iter().map(|(x, v)| json!({ "x": x, "value": v })).collect::<Vec<_>>(),
            "sustainability": sustain,
        },
        "goodman_last_bit_6": goodman_sustain,
        "persistence": { "curve": curve, "closed_form_matches": closed_form_matches, "bound_check": check },
    });
    Ok(demo_report("induction", result, text))
}

/// `z` of length `len` following the pattern 110110...
pub fn observation(len: usize) -> BitString {
    BitString::from_bits((0..len).map(|i| i % 3 != 2))
}

/// "planet" knows all of `z` except its first two bits; "random
/// fluctuation" is a fair coin; "hardcoded" knows all of `z` but pays for
/// it in its description length.
pub fn explanation_family(z: &BitString) -> Result<MixtureState, CliError> {
    let rest: String = z.bits()[2.min(z.len())..].iter().map(|&b| if b { '1' } else { '0' }).collect();
    let planet = MemberKind::pattern(&format!("??{rest}"), "?")?;
    let hardcoded = MemberKind::pattern(&z.to_string(), "?")?;
    Ok(make_mixture(vec![
        FamilyMember::new(0, "planet", 10, planet),
        FamilyMember::new(1, "random fluctuation", 10, MemberKind::bernoulli(ratio(1, 2))),
        FamilyMember::new(2, "hardcoded", 10 + z.len() as u32, hardcoded),
    ])?)
}

pub fn mixture_demo() -> Result<Report, CliError> {
    let mut text = String::from("Explanation ranking by 2^-c m(z), z = 110110...\n");
    let mut rankings = Vec::new();
    for len in [10usize, 20, 30] {
        let z = observation(len);
        let state = explanation_family(&z)?.posterior(&z)?;
        let ranking = state.explanation_ranking();
        let w = |id: usize| ranking.iter().find(|e| e.id == id).expect("member present").weight.clone();
        let factor = w(0) / w(1);
        let _ = writeln!(text, "  l(z) = {len}: planet / random fluctuation = {}", fmt_q(&factor));
        for e in &ranking {
            let _ = writeln!(text, "    {:<20} {}", e.name, fmt_q(&e.weight));
        }
        rankings.push(json!({
            "length": len,
            "z": z,
            "ranking": ranking,
            "planet_over_fluctuation": rational::format(&factor),
            "expected": rational::format(&rational::pow2(len as i64 - 2)),
        }));
    }

    let family = make_mixture(vec![
        FamilyMember::new(0, "fair coin", 2, MemberKind::bernoulli(ratio(1, 2))),
        FamilyMember::new(1, "biased coin", 2, MemberKind::bernoulli(ratio(9, 10))),
        FamilyMember::new(2, "all ones", 2, MemberKind::all_ones()),
    ])?;
    let z = bits("1111111111");
    let state = family.posterior(&z)?;
    let next: Rational = state.conditional(&bits("1"))?;
    let _ = writeln!(text, "Posterior after {z:?} in {{fair coin, biased coin, all ones}} (c = 2 each)");
    for (m, w) in state.members().iter().zip(state.posterior_weights()) {
        let _ = writeln!(text, "  {:<12} {}", m.name, fmt_q(&w));
    }
    let _ = writeln!(text, "  M_V(1 | z) = {}", fmt_q(&next));
    let result = json!({
        "explanation_rankings": rankings,
        "posterior_example": posterior_entries(&state),
        "next_one": rational::format(&next),
    });
    Ok(demo_report("mixture", result, text))
}

fn classicality_line(c: &Classicality) -> String {
    match c {
        Classicality::Feasible { decomposition } => {
            let parts: Vec<_> = decomposition.iter().map(|v| format!("{}·{}", fmt_q(&v.weight), v.lambda)).collect();
            format!("local: {}", parts.join(" + "))
        }
        Classicality::Infeasible { certificate_value, chsh_value, .. } => format!(
            "not local: separating functional value {}{}",
            fmt_q(certificate_value),
            chsh_value.as_ref().map(|v| format!(", CHSH {}", fmt_q(v))).unwrap_or_default()
        ),
    }
}

pub fn bell_demo() -> Result<Report, CliError> {
    let model = HiddenVariableModel::paper_model();
    let p0 = behavior_from_hvm(&model);
    let p = postselect(&p0)?;
    let is_pr = p == Correlation::pr_box();
    let report = chsh(&p)?;
    let ns0 = signalling_report(&p0);
    let ns = signalling_report(&p);
    let lemma = check_lemma_a1(&p0)?;
    let classical_p0 = is_classical(&p0);
    let classical_pr = is_classical(&Correlation::pr_box());
    let counter = check_lemma_a1(&behavior_from_hvm(&correlated_non_detection()))?;

    let labels: Vec<String> = model.values().iter().map(|v| format!("{} ({})", v.responses, fmt_q(&v.q))).collect();
    let mut text = format!("Hidden values λ = l0 l1 l'0 l'1: {}\n\n", labels.join(", "));
    let _ = writeln!(text, "P0(v,w|a,b)\n{p0}");
    let _ = writeln!(text, "P(v,w|a,b) after postselecting v ≠ ∅ (PR box: {is_pr})\n{p}");
    let corr: Vec<String> = report.correlators.iter().map(fmt_q).collect();
    let _ = writeln!(text, "E(a,b) = {}", corr.join(" "));
    let _ = writeln!(
        text,
        "CHSH = {} (classical bound {}, Tsirelson bound squared {}): {}",
        fmt_q(&report.value),
        report.classical_bound,
        report.tsirelson_bound_squared,
        serde_json::to_value(report.class).expect("class serializes").as_str().unwrap_or_default()
    );
    let _ = writeln!(
        text,
        "no-signalling: P0 {} (A→B {}, B→A {}); P {} (A→B {}, B→A {})",
        ns0.nonsignalling,
        fmt_q(&ns0.a_to_b),
        fmt_q(&ns0.b_to_a),
        ns.nonsignalling,
        fmt_q(&ns.a_to_b),
        fmt_q(&ns.b_to_a)
    );
    let nulls: Vec<String> = lemma.null_probabilities.iter().map(fmt_q).collect();
    let _ = writeln!(
        text,
        "P0(∅|a) = {}; ∅ independent of Bob's outcome: {}; postselected A→B ok: {}; B→A ok: {}",
        nulls.join(", "),
        lemma.cond_indep,
        lemma.a_to_b_ok,
        lemma.b_to_a_ok
    );
    let _ = writeln!(text, "P0 is {}", classicality_line(&classical_p0));
    let _ = writeln!(text, "PR box is {}", classicality_line(&classical_pr));
    let _ = writeln!(
        text,
        "Non-detection correlated with Bob ({}): independent {}, postselected A→B deviation {}",
        correlated_non_detection().values().iter().map(|v| v.responses.to_string()).collect::<Vec<_>>().join(", "),
        counter.cond_indep,
        fmt_q(&counter.a_to_b_deviation)
    );

    let result = json!({
        "hvm": model,
        "p0": p0,
        "postselected": p,
        "postselected_is_pr_box": is_pr,
        "chsh": report,
        "signalling_p0": ns0,
        "signalling_postselected": ns,
        "lemma_a1": lemma,
        "classical_p0": classical_p0,
        "classical_pr_box": classical_pr,
        "correlated_non_detection": counter,
    });
    Ok(demo_report("bell", result, text))
}
