//! C ABI for scenario loading, the management solve, investment, and
//! result inspection.
//!
//! Every function returns a [`TpStatus`] code; results travel through
//! opaque handles freed with the matching `_free` call. On any
//! non-zero status, `tp_last_error_message` returns a UTF-8
//! description valid until the next failing call on the same thread.
//! Handles are not thread-safe to mutate but may be read from several
//! threads; NULL is never a valid handle argument.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use techpath::investment::{solve_investment, InvestmentOptions};
use techpath::io::{parse_scenario, write_solution_csv};
use techpath::management::{solve_management, ManagementSolution};
use techpath::model::Scenario;

/// Status code returned by every API function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpStatus {
    TpOk = 0,
    /// A required pointer argument was NULL.
    TpNullArgument = 1,
    /// A string argument was not valid UTF-8.
    TpInvalidUtf8 = 2,
    /// The scenario text failed to parse or validate.
    TpParseError = 3,
    /// The solver failed (numerical breakdown, iteration limit).
    TpSolveError = 4,
    /// The requested element or product id does not exist.
    TpUnknownId = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: TpStatus, message: impl ToString) -> TpStatus {
    let message = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).expect("NULs stripped");
    });
    status
}

/// Message for the most recent failure on this thread. Never NULL;
/// empty before the first failure. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn tp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Opaque validated scenario.
pub struct TpScenario {
    inner: Scenario,
}

/// Opaque solve result: the solution plus the scenario it came from
/// and lazily rendered text, so returned strings stay alive with the
/// handle.
pub struct TpSolution {
    scenario: Scenario,
    solution: ManagementSolution,
    units: BTreeMap<String, u32>,
    csv: CString,
}

unsafe fn str_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, TpStatus> {
    if ptr.is_null() {
        return Err(fail(
            TpStatus::TpNullArgument,
            format!("{name} must not be NULL"),
        ));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(TpStatus::TpInvalidUtf8, format!("{name} is not UTF-8")))
}

fn out_arg<T>(out: *mut T) -> Result<(), TpStatus> {
    if out.is_null() {
        Err(fail(TpStatus::TpNullArgument, "output pointer is NULL"))
    } else {
        Ok(())
    }
}

/// Parse and validate a scenario from TOML text.
///
/// # Safety
/// `toml_text` must be a NUL-terminated string; `out` must be a valid
/// pointer. On success `*out` owns the scenario and must be released
/// with `tp_scenario_free`.
#[no_mangle]
pub unsafe extern "C" fn tp_scenario_parse(
    toml_text: *const c_char,
    out: *mut *mut TpScenario,
) -> TpStatus {
    if let Err(status) = out_arg(out) {
        return status;
    }
    let text = match str_arg(toml_text, "toml_text") {
        Ok(text) => text,
        Err(status) => return status,
    };
    match parse_scenario(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(TpScenario { inner }));
            TpStatus::TpOk
        }
        Err(diags) => {
            *out = ptr::null_mut();
            fail(TpStatus::TpParseError, diags)
        }
    }
}

/// Load a bundled scenario: "fig1_vehicles" or "campus".
///
/// # Safety
/// `name` must be NUL-terminated; `out` must be valid (see
/// `tp_scenario_parse`).
#[no_mangle]
pub unsafe extern "C" fn tp_scenario_builtin(
    name: *const c_char,
    out: *mut *mut TpScenario,
) -> TpStatus {
    if let Err(status) = out_arg(out) {
        return status;
    }
    let name = match str_arg(name, "name") {
        Ok(name) => name,
        Err(status) => return status,
    };
    let inner = match name {
        "fig1_vehicles" => techpath::scenarios::fig1_vehicles(),
        "campus" => techpath::scenarios::campus(),
        other => {
            *out = ptr::null_mut();
            return fail(
                TpStatus::TpUnknownId,
                format!("no bundled scenario named '{other}'"),
            );
        }
    };
    *out = Box::into_raw(Box::new(TpScenario { inner }));
    TpStatus::TpOk
}

/// # Safety
/// `scenario` must come from this library and not be freed twice.
/// NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn tp_scenario_free(scenario: *mut TpScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

fn finish_solution(
    scenario: Scenario,
    solution: ManagementSolution,
    units: BTreeMap<String, u32>,
    out: *mut *mut TpSolution,
) -> TpStatus {
    let csv = write_solution_csv(&scenario, &solution).replace('\0', " ");
    let handle = TpSolution {
        scenario,
        solution,
        units,
        csv: CString::new(csv).expect("NULs stripped"),
    };
    unsafe { *out = Box::into_raw(Box::new(handle)) };
    TpStatus::TpOk
}

/// Solve the management model. With `assume_built != 0` every
/// candidate technology is treated as already installed.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid. On success
/// `*out` must be released with `tp_solution_free`.
#[no_mangle]
pub unsafe extern "C" fn tp_solve_management(
    scenario: *const TpScenario,
    assume_built: i32,
    out: *mut *mut TpSolution,
) -> TpStatus {
    if let Err(status) = out_arg(out) {
        return status;
    }
    if scenario.is_null() {
        return fail(TpStatus::TpNullArgument, "scenario must not be NULL");
    }
    let mut sc = (*scenario).inner.clone();
    if assume_built != 0 {
        sc = sc.assume_built();
    }
    match solve_management(&sc) {
        Ok(solution) => finish_solution(sc, solution, BTreeMap::new(), out),
        Err(err) => {
            *out = ptr::null_mut();
            fail(TpStatus::TpSolveError, err)
        }
    }
}

/// Optimize unit purchases under `budget`, then report the resulting
/// operating solution. With `objective_invest != 0` the budget is
/// ignored and investment cost is charged to the objective instead.
///
/// # Safety
/// Same contract as `tp_solve_management`.
#[no_mangle]
pub unsafe extern "C" fn tp_solve_investment(
    scenario: *const TpScenario,
    budget: f64,
    objective_invest: i32,
    out: *mut *mut TpSolution,
) -> TpStatus {
    if let Err(status) = out_arg(out) {
        return status;
    }
    if scenario.is_null() {
        return fail(TpStatus::TpNullArgument, "scenario must not be NULL");
    }
    let sc = (*scenario).inner.clone();
    let options = InvestmentOptions {
        invest_in_objective: objective_invest != 0,
        ..InvestmentOptions::default()
    };
    match solve_investment(&sc, budget, &options) {
        Ok(result) => finish_solution(sc, result.management, result.units, out),
        Err(err) => {
            *out = ptr::null_mut();
            fail(TpStatus::TpSolveError, err)
        }
    }
}

/// # Safety
/// `solution` must come from this library and not be freed twice.
/// NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn tp_solution_free(solution: *mut TpSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

unsafe fn with_solution<'a>(
    solution: *const TpSolution,
) -> Result<&'a TpSolution, TpStatus> {
    if solution.is_null() {
        Err(fail(TpStatus::TpNullArgument, "solution must not be NULL"))
    } else {
        Ok(&*solution)
    }
}

/// Total surplus of the solve.
///
/// # Safety
/// `solution` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tp_solution_surplus(
    solution: *const TpSolution,
    out: *mut f64,
) -> TpStatus {
    if let Err(status) = out_arg(out) {
        return status;
    }
    match with_solution(solution) {
        Ok(sol) => {
            *out = sol.solution.surplus;
            TpStatus::TpOk
        }
        Err(status) => status,
    }
}

/// Allocation of one element (supply, demand, or throughput).
///
/// # Safety
/// `solution` must be live; `element_id` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tp_solution_allocation(
    solution: *const TpSolution,
    element_id: *const c_char,
    out: *mut f64,
) -> TpStatus {
    if let Err(status) = out_arg(out) {
        return status;
    }
    let sol = match with_solution(solution) {
        Ok(sol) => sol,
        Err(status) => return status,
    };
    let id = match str_arg(element_id, "element_id") {
        Ok(id) => id,
        Err(status) => return status,
    };
    match sol.solution.allocation(id) {
        Some(value) => {
            *out = value;
            TpStatus::TpOk
        }
        None => fail(TpStatus::TpUnknownId, format!("no element '{id}'")),
    }
}

/// Dual price of one product.
///
/// # Safety
/// `solution` must be live; `product_id` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tp_solution_price(
    solution: *const TpSolution,
    product_id: *const c_char,
    out: *mut f64,
) -> TpStatus {
    if let Err(status) = out_arg(out) {
        return status;
    }
    let sol = match with_solution(solution) {
        Ok(sol) => sol,
        Err(status) => return status,
    };
    let id = match str_arg(product_id, "product_id") {
        Ok(id) => id,
        Err(status) => return status,
    };
    match sol.solution.pi.get(id) {
        Some(value) => {
            *out = *value;
            TpStatus::TpOk
        }
        None => fail(TpStatus::TpUnknownId, format!("no product '{id}'")),
    }
}

/// Profit of one element at the solved prices.
///
/// # Safety
/// `solution` must be live; `element_id` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tp_solution_profit(
    solution: *const TpSolution,
    element_id: *const c_char,
    out: *mut f64,
) -> TpStatus {
    if let Err(status) = out_arg(out) {
        return status;
    }
    let sol = match with_solution(solution) {
        Ok(sol) => sol,
        Err(status) => return status,
    };
    let id = match str_arg(element_id, "element_id") {
        Ok(id) => id,
        Err(status) => return status,
    };
    match sol.solution.phi.get(id) {
        Some(value) => {
            *out = *value;
            TpStatus::TpOk
        }
        None => fail(TpStatus::TpUnknownId, format!("no element '{id}'")),
    }
}

/// Units purchased for one technology (0 for a pure management solve).
///
/// # Safety
/// `solution` must be live; `technology_id` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tp_solution_units(
    solution: *const TpSolution,
    technology_id: *const c_char,
    out: *mut u32,
) -> TpStatus {
    if out.is_null() {
        return fail(TpStatus::TpNullArgument, "output pointer is NULL");
    }
    let sol = match with_solution(solution) {
        Ok(sol) => sol,
        Err(status) => return status,
    };
    let id = match str_arg(technology_id, "technology_id") {
        Ok(id) => id,
        Err(status) => return status,
    };
    if sol.scenario.technology(id).is_none() {
        return fail(TpStatus::TpUnknownId, format!("no technology '{id}'"));
    }
    *out = sol.units.get(id).copied().unwrap_or(0);
    TpStatus::TpOk
}

/// 1 when the optimum is degenerate (prices then are one of several
/// valid dual solutions), else 0.
///
/// # Safety
/// `solution` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tp_solution_degenerate(
    solution: *const TpSolution,
    out: *mut i32,
) -> TpStatus {
    if out.is_null() {
        return fail(TpStatus::TpNullArgument, "output pointer is NULL");
    }
    match with_solution(solution) {
        Ok(sol) => {
            *out = i32::from(sol.solution.degenerate);
            TpStatus::TpOk
        }
        Err(status) => status,
    }
}

/// Full solution table as CSV text, owned by the handle.
///
/// # Safety
/// `solution` must be live; the returned pointer is valid until
/// `tp_solution_free`.
#[no_mangle]
pub unsafe extern "C" fn tp_solution_csv(solution: *const TpSolution) -> *const c_char {
    match with_solution(solution) {
        Ok(sol) => sol.csv.as_ptr(),
        Err(_) => ptr::null(),
    }
}
