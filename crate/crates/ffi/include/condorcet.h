#ifndef CONDORCET_H
#define CONDORCET_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define CONDORCET_OK 0

/**
 * A required pointer argument was null.
 */
#define CONDORCET_ERR_NULL 1

/**
 * A string argument was not valid UTF-8.
 */
#define CONDORCET_ERR_UTF8 2

/**
 * The library panicked; this is a bug.
 */
#define CONDORCET_ERR_PANIC 3

/**
 * Opaque matching instance.
 */
typedef struct CondorcetInstance CondorcetInstance;

/**
 * Opaque set of matchings tied to the instance it was built for.
 */
typedef struct CondorcetSet CondorcetSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the next call.
 */
const char *condorcet_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void condorcet_string_free(char *s);

/**
 * Parses an instance from JSON.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a writable pointer.
 */
int32_t condorcet_instance_parse(const char *json, struct CondorcetInstance **out);

/**
 * # Safety
 * `inst` must come from `condorcet_instance_parse` and not be freed twice.
 */
void condorcet_instance_free(struct CondorcetInstance *inst);

/**
 * Number of agents, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
uintptr_t condorcet_instance_n_agents(const struct CondorcetInstance *inst);

/**
 * Canonical JSON of the instance; free with `condorcet_string_free`.
 *
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
int32_t condorcet_instance_to_json(const struct CondorcetInstance *inst, char **out);

/**
 * Runs the solver suited to the instance's preferences and constraint.
 *
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
int32_t condorcet_solve(const struct CondorcetInstance *inst, struct CondorcetSet **out);

/**
 * Parses a JSON list of agent-to-object maps against `inst`.
 *
 * # Safety
 * `inst` must be a live handle, `json` nul-terminated, `out` writable.
 */
int32_t condorcet_set_parse(const struct CondorcetInstance *inst,
                            const char *json,
                            struct CondorcetSet **out);

/**
 * # Safety
 * `set` must come from this library and not be freed twice.
 */
void condorcet_set_free(struct CondorcetSet *set);

/**
 * Number of matchings, or 0 for a null handle.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
uintptr_t condorcet_set_len(const struct CondorcetSet *set);

/**
 * JSON list of agent-to-object maps; free with `condorcet_string_free`.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
int32_t condorcet_set_to_json(const struct CondorcetInstance *inst,
                              const struct CondorcetSet *set,
                              char **out);

/**
 * Writes 1 to `popular` if no alternative beats the set, else 0.
 *
 * # Safety
 * Both handles must be live and `popular` writable.
 */
int32_t condorcet_verify_popular(const struct CondorcetInstance *inst,
                                 const struct CondorcetSet *set,
                                 int32_t *popular);

/**
 * Writes 1 to `optimal` if the JSON matching is Pareto-optimal, else 0.
 *
 * # Safety
 * `inst` must be live, `matching` nul-terminated, `optimal` writable.
 */
int32_t condorcet_verify_pareto(const struct CondorcetInstance *inst,
                                const char *matching,
                                int32_t *optimal);

/**
 * Solves an arborescence instance given as JSON and returns the pair as JSON.
 *
 * # Safety
 * `json` must be nul-terminated and `out` writable.
 */
int32_t condorcet_arborescence_solve(const char *json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONDORCET_H */
