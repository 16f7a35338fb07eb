mod common;

use common::Check;
use groupfair::gen::rng;
use groupfair::reduction::{allocation_to_assignment, assignment_to_allocation, formula_to_instance, MonotoneFormula};
use groupfair::{find_fair, Allocation, Notion, SearchConstraints, Valuation};
use proptest::prelude::*;

fn formula() -> impl Strategy<Value = MonotoneFormula> {
    (3usize..=7, 0usize..=14, any::<u64>()).prop_map(|(v, c, seed)| MonotoneFormula::random(&mut rng(seed), v, c))
}

fn satisfiable(f: &MonotoneFormula) -> bool {
    let v = f.num_vars();
    (0u64..1 << v).any(|x| {
        f.clauses().iter().all(|c| {
            let lits: Vec<bool> = c.vars.iter().map(|&i| x >> i & 1 == 1).collect();
            lits.contains(&(c.polarity == groupfair::reduction::Polarity::Positive))
        })
    })
}

proptest! {
    #[test]
    fn assignment_bridge_round_trips(f in formula(), bits in any::<u64>()) {
        let assignment: Vec<bool> = (0..f.num_vars()).map(|i| bits >> i & 1 == 1).collect();
        let alloc = assignment_to_allocation(&f, &assignment).unwrap();
        prop_assert_eq!(allocation_to_assignment(&f, &alloc).unwrap(), assignment.clone());
        let inst = formula_to_instance(&f);
        let report = groupfair::is_fair(&inst, &alloc, None, Notion::EF1).unwrap();
        prop_assert_eq!(report.overall, f.satisfies(&assignment));
    }

    #[test]
    fn ef1_means_a_desired_good_at_home(f in formula(), bits in any::<u64>()) {
        let inst = formula_to_instance(&f);
        let m = f.num_vars();
        let owners: Vec<usize> = (0..m).map(|g| (bits >> g & 1) as usize).collect();
        let alloc = Allocation::from_owners(&owners, 2);
        let bundles = [alloc.bundle(0).bits(), alloc.bundle(1).bits()];
        let groups = inst.fixed_groups().unwrap();
        for (gi, g) in groups.iter().enumerate() {
            for &a in g {
                let v: &Valuation = inst.valuation(a);
                let has_one = common::value(v, bundles[gi]) >= 1;
                prop_assert_eq!(common::ef_c(v, bundles[gi], bundles[1 - gi], 1), has_one);
            }
        }
    }

    #[test]
    fn satisfiable_iff_ef1_exists(f in formula()) {
        let inst = formula_to_instance(&f);
        let cert = find_fair(&inst, &SearchConstraints::new(Notion::EF1)).unwrap();
        let sat = satisfiable(&f);
        prop_assert_eq!(f.brute_force().is_some(), sat);
        prop_assert_eq!(cert.is_found(), sat);
        if let Some(sol) = cert.solution() {
            prop_assert!(f.satisfies(&allocation_to_assignment(&f, &sol.allocation).unwrap()));
            let vals: Vec<Valuation> = inst.valuations().cloned().collect();
            let group_of: Vec<usize> = (0..inst.num_agents())
                .map(|a| usize::from(!inst.fixed_groups().unwrap()[0].contains(&a)))
                .collect();
            let bundles: Vec<u64> = sol.allocation.bundles().iter().map(|b| b.bits()).collect();
            prop_assert!(common::group_fair(Check::Efc(1), &vals, &group_of, &bundles));
        }
    }

    #[test]
    fn dimacs_round_trip(f in formula()) {
        let text = f.to_dimacs();
        prop_assert_eq!(MonotoneFormula::from_dimacs(&text).unwrap(), f.clone());
        prop_assert_eq!(text.parse::<MonotoneFormula>().unwrap(), f);
    }
}
