//! Exercises the C ABI the way a foreign caller would: through raw
//! pointers and status codes only.

use std::ffi::{CStr, CString};
use std::ptr;

use techpath_ffi::*;

fn c(text: &str) -> CString {
    CString::new(text).unwrap()
}

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(tp_last_error_message())
            .to_string_lossy()
            .into_owned()
    }
}

#[test]
fn parse_solve_inspect_free() {
    let toml = c(r#"
[[products]]
id = "P"
unit = "kg"

[[suppliers]]
id = "sup"
product = "P"
alpha = 1.0
capacity = 5.0

[[consumers]]
id = "dem"
product = "P"
alpha = 3.0
capacity = 10.0
"#);
    unsafe {
        let mut scenario: *mut TpScenario = ptr::null_mut();
        assert_eq!(tp_scenario_parse(toml.as_ptr(), &mut scenario), TpStatus::TpOk);
        assert!(!scenario.is_null());

        let mut solution: *mut TpSolution = ptr::null_mut();
        assert_eq!(
            tp_solve_management(scenario, 0, &mut solution),
            TpStatus::TpOk
        );

        let mut surplus = 0.0;
        assert_eq!(tp_solution_surplus(solution, &mut surplus), TpStatus::TpOk);
        assert!((surplus - 10.0).abs() < 1e-9);

        let mut price = 0.0;
        let pid = c("P");
        assert_eq!(
            tp_solution_price(solution, pid.as_ptr(), &mut price),
            TpStatus::TpOk
        );
        assert!((price - 3.0).abs() < 1e-9);

        let mut alloc = 0.0;
        let sid = c("sup");
        assert_eq!(
            tp_solution_allocation(solution, sid.as_ptr(), &mut alloc),
            TpStatus::TpOk
        );
        assert!((alloc - 5.0).abs() < 1e-9);

        let mut profit = 0.0;
        assert_eq!(
            tp_solution_profit(solution, sid.as_ptr(), &mut profit),
            TpStatus::TpOk
        );
        assert!((profit - 10.0).abs() < 1e-9);

        let csv = tp_solution_csv(solution);
        assert!(!csv.is_null());
        let csv = CStr::from_ptr(csv).to_str().unwrap();
        assert!(csv.starts_with("element_id,kind,allocation,price,profit"));

        tp_solution_free(solution);
        tp_scenario_free(scenario);
    }
}

#[test]
fn builtin_scenarios_and_investment() {
    unsafe {
        let mut scenario: *mut TpScenario = ptr::null_mut();
        let name = c("fig1_vehicles");
        assert_eq!(
            tp_scenario_builtin(name.as_ptr(), &mut scenario),
            TpStatus::TpOk
        );

        let mut solution: *mut TpSolution = ptr::null_mut();
        assert_eq!(
            tp_solve_investment(scenario, 5000.0, 0, &mut solution),
            TpStatus::TpOk
        );
        let mut units = 0u32;
        let tech = c("SP");
        assert_eq!(
            tp_solution_units(solution, tech.as_ptr(), &mut units),
            TpStatus::TpOk
        );
        assert!(units <= 2);

        let mut degenerate = -1;
        assert_eq!(
            tp_solution_degenerate(solution, &mut degenerate),
            TpStatus::TpOk
        );
        assert!(degenerate == 0 || degenerate == 1);

        tp_solution_free(solution);
        tp_scenario_free(scenario);
    }
}

#[test]
fn error_paths_set_codes_and_messages() {
    unsafe {
        let mut scenario: *mut TpScenario = ptr::null_mut();
        assert_eq!(
            tp_scenario_parse(ptr::null(), &mut scenario),
            TpStatus::TpNullArgument
        );

        let garbage = c("not [ valid");
        assert_eq!(
            tp_scenario_parse(garbage.as_ptr(), &mut scenario),
            TpStatus::TpParseError
        );
        assert!(scenario.is_null());
        assert!(!last_error().is_empty());

        let name = c("no_such_scenario");
        assert_eq!(
            tp_scenario_builtin(name.as_ptr(), &mut scenario),
            TpStatus::TpUnknownId
        );
        assert!(last_error().contains("no_such_scenario"));

        let fig = c("fig1_vehicles");
        assert_eq!(
            tp_scenario_builtin(fig.as_ptr(), &mut scenario),
            TpStatus::TpOk
        );
        let mut solution: *mut TpSolution = ptr::null_mut();
        assert_eq!(
            tp_solve_management(scenario, 0, &mut solution),
            TpStatus::TpOk
        );
        let mut value = 0.0;
        let ghost = c("ghost");
        assert_eq!(
            tp_solution_price(solution, ghost.as_ptr(), &mut value),
            TpStatus::TpUnknownId
        );
        assert!(last_error().contains("ghost"));

        // freeing NULL is a no-op
        tp_solution_free(ptr::null_mut());
        tp_scenario_free(ptr::null_mut());

        tp_solution_free(solution);
        tp_scenario_free(scenario);
    }
}
