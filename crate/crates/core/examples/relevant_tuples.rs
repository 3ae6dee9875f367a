// Which pivot tuples are affected by the track-credit update, and why.

use rdfview::changeset::{relevant_rules, relevant_tuples_after, relevant_tuples_before};
use rdfview::fixtures::{self, example_update, sigma0, t_new, t_old};
use rdfview::relational::related_pivots;
use rdfview::{apply_update, DatabaseState, RuleSet, Tuple};

fn show(rules: &RuleSet, rule: &str, t: &Tuple, state: &DatabaseState) {
    let r = rules.rule(rule).unwrap();
    let k = r.relations.iter().position(|x| x == "Track").unwrap();
    let pivots = related_pivots(&r.path.prefix(k), t, state).unwrap();
    let keys: Vec<String> = pivots
        .iter()
        .map(|p| p.attrs().next().unwrap().1.lexical().unwrap())
        .collect();
    println!("  {rule}: {{{}}}", keys.join(", "));
}

fn main() {
    let rules = fixtures::worked_example_rules();
    let s0 = sigma0();
    let u = example_update();
    let s1 = apply_update(&s0, &u).unwrap();

    let names: Vec<&str> = relevant_rules(&rules, "Track")
        .unwrap()
        .iter()
        .map(|r| r.name.as_str())
        .collect();
    println!("rules relevant to Track: {}", names.join(", "));

    println!("pivots related to t_old before the update:");
    show(&rules, "psi7", &t_old(), &s0);
    show(&rules, "psi8", &t_old(), &s0);
    println!("pivots related to t_new after the update:");
    show(&rules, "psi7", &t_new(), &s1);
    show(&rules, "psi8", &t_new(), &s1);

    for (label, set) in [
        ("before", relevant_tuples_before(&u, &s0, &rules).unwrap()),
        ("after", relevant_tuples_after(&u, &s1, &rules).unwrap()),
    ] {
        println!("relevant {label}:");
        for (rel, t) in set.iter() {
            println!("  {rel} {t:?}");
        }
    }
}
