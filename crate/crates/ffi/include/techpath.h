#ifndef TECHPATH_H
#define TECHPATH_H

/* Generated by cbindgen from techpath-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every API function.
typedef enum TpStatus {
  TP_OK = 0,
  // A required pointer argument was NULL.
  TP_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  TP_INVALID_UTF8 = 2,
  // The scenario text failed to parse or validate.
  TP_PARSE_ERROR = 3,
  // The solver failed (numerical breakdown, iteration limit).
  TP_SOLVE_ERROR = 4,
  // The requested element or product id does not exist.
  TP_UNKNOWN_ID = 5,
} TpStatus;

// Opaque validated scenario.
typedef struct TpScenario TpScenario;

// Opaque solve result: the solution plus the scenario it came from
// and lazily rendered text, so returned strings stay alive with the
// handle.
typedef struct TpSolution TpSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread. Never NULL;
// empty before the first failure. Valid until the next failing call.
const char *tp_last_error_message(void);

// Parse and validate a scenario from TOML text.
//
// # Safety
// `toml_text` must be a NUL-terminated string; `out` must be a valid
// pointer. On success `*out` owns the scenario and must be released
// with `tp_scenario_free`.
enum TpStatus tp_scenario_parse(const char *toml_text, struct TpScenario **out);

// Load a bundled scenario: "fig1_vehicles" or "campus".
//
// # Safety
// `name` must be NUL-terminated; `out` must be valid (see
// `tp_scenario_parse`).
enum TpStatus tp_scenario_builtin(const char *name, struct TpScenario **out);

// # Safety
// `scenario` must come from this library and not be freed twice.
// NULL is ignored.
void tp_scenario_free(struct TpScenario *scenario);

// Solve the management model. With `assume_built != 0` every
// candidate technology is treated as already installed.
//
// # Safety
// `scenario` must be a live handle; `out` must be valid. On success
// `*out` must be released with `tp_solution_free`.
enum TpStatus tp_solve_management(const struct TpScenario *scenario,
                                  int32_t assume_built,
                                  struct TpSolution **out);

// Optimize unit purchases under `budget`, then report the resulting
// operating solution. With `objective_invest != 0` the budget is
// ignored and investment cost is charged to the objective instead.
//
// # Safety
// Same contract as `tp_solve_management`.
enum TpStatus tp_solve_investment(const struct TpScenario *scenario,
                                  double budget,
                                  int32_t objective_invest,
                                  struct TpSolution **out);

// # Safety
// `solution` must come from this library and not be freed twice.
// NULL is ignored.
void tp_solution_free(struct TpSolution *solution);

// Total surplus of the solve.
//
// # Safety
// `solution` must be a live handle; `out` must be valid.
enum TpStatus tp_solution_surplus(const struct TpSolution *solution, double *out);

// Allocation of one element (supply, demand, or throughput).
//
// # Safety
// `solution` must be live; `element_id` NUL-terminated; `out` valid.
enum TpStatus tp_solution_allocation(const struct TpSolution *solution,
                                     const char *element_id,
                                     double *out);

// Dual price of one product.
//
// # Safety
// `solution` must be live; `product_id` NUL-terminated; `out` valid.
enum TpStatus tp_solution_price(const struct TpSolution *solution,
                                const char *product_id,
                                double *out);

// Profit of one element at the solved prices.
//
// # Safety
// `solution` must be live; `element_id` NUL-terminated; `out` valid.
enum TpStatus tp_solution_profit(const struct TpSolution *solution,
                                 const char *element_id,
                                 double *out);

// Units purchased for one technology (0 for a pure management solve).
//
// # Safety
// `solution` must be live; `technology_id` NUL-terminated; `out` valid.
enum TpStatus tp_solution_units(const struct TpSolution *solution,
                                const char *technology_id,
                                uint32_t *out);

// 1 when the optimum is degenerate (prices then are one of several
// valid dual solutions), else 0.
//
// # Safety
// `solution` must be live; `out` valid.
enum TpStatus tp_solution_degenerate(const struct TpSolution *solution, int32_t *out);

// Full solution table as CSV text, owned by the handle.
//
// # Safety
// `solution` must be live; the returned pointer is valid until
// `tp_solution_free`.
const char *tp_solution_csv(const struct TpSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TECHPATH_H */
