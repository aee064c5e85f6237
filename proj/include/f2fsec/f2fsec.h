#ifndef F2FSEC_F2FSEC_H
#define F2FSEC_F2FSEC_H

#include <stddef.h>
#include <stdint.h>

#if defined(F2FSEC_BUILDING_LIBRARY)
#define F2F_API __attribute__((visibility("default")))
#else
#define F2F_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum f2f_status {
    F2F_OK = 0,
    F2F_ERR_INVALID_ARGUMENT = 1,
    F2F_ERR_IO = 2,
    F2F_ERR_PARSE = 3,
    F2F_ERR_CYCLE = 4,
    F2F_ERR_SCHEMA = 5,
    F2F_ERR_KEY = 6,
    F2F_ERR_BALANCE = 7,
    F2F_ERR_LEGALIZATION = 8,
    F2F_ERR_ATTACK = 9,
    F2F_ERR_INTERNAL = 10
} f2f_status;

typedef struct f2f_netlist f2f_netlist;
typedef struct f2f_plan f2f_plan;
typedef struct f2f_view f2f_view;

/* Message of the last failed call on this thread; "" when none. */
F2F_API const char* f2f_last_error(void);
F2F_API const char* f2f_status_name(f2f_status status);
F2F_API const char* f2f_version(void);
/* Frees strings returned through char** out-parameters. */
F2F_API void f2f_string_free(char* s);

/* Netlists */

F2F_API f2f_status f2f_netlist_load(const char* path, f2f_netlist** out);
F2F_API f2f_status f2f_netlist_parse(const char* bench_text, const char* name, f2f_netlist** out);
F2F_API void f2f_netlist_free(f2f_netlist* n);
/* Resolves a bundled benchmark name ("c432") to its file; other arguments
   that already name a file come back unchanged. */
F2F_API f2f_status f2f_corpus_path(const char* name, char** out);

typedef struct f2f_netlist_stats {
    size_t inputs;
    size_t outputs;
    size_t gates;
    size_t flops;
    int depth;
} f2f_netlist_stats;

F2F_API f2f_status f2f_netlist_stats_get(const f2f_netlist* n, f2f_netlist_stats* out);
F2F_API f2f_status f2f_netlist_timing_json(const f2f_netlist* n, char** out);
F2F_API f2f_status f2f_netlist_bench(const f2f_netlist* n, char** out);

/* Defense flow */

typedef struct f2f_protect_config {
    const char* strategy; /* "random", "maxcut" or "timing" */
    double move_fraction;
    double balance_eps;
    int randomize;
    int use_switchboxes;
    uint64_t seed;
} f2f_protect_config;

F2F_API void f2f_protect_config_init(f2f_protect_config* config);
F2F_API f2f_status f2f_protect(const f2f_netlist* n, const f2f_protect_config* config, f2f_plan** out);
F2F_API void f2f_plan_free(f2f_plan* p);

typedef enum f2f_artifact {
    F2F_ARTIFACT_PARTITION = 0,
    F2F_ARTIFACT_PLACEMENT = 1,
    F2F_ARTIFACT_PLAN = 2,
    F2F_ARTIFACT_HISTOGRAM_CSV = 3,
    F2F_ARTIFACT_CONFIG = 4
} f2f_artifact;

F2F_API f2f_status f2f_plan_export(const f2f_plan* p, f2f_artifact which, char** out);

typedef struct f2f_plan_stats {
    size_t gates;
    size_t top_gates;
    size_t cut_size;
    size_t bottom_to_top;
    size_t top_to_bottom;
    size_t boxes;
    size_t nonzero_displacements;
} f2f_plan_stats;

F2F_API f2f_status f2f_plan_stats_get(const f2f_plan* p, f2f_plan_stats* out);
/* mode: "conservative" or "full" */
F2F_API f2f_status f2f_plan_view(const f2f_plan* p, const char* mode, f2f_view** out);

/* Public views */

F2F_API f2f_status f2f_view_parse(const char* json, f2f_view** out);
F2F_API f2f_status f2f_view_json(const f2f_view* v, char** out);
F2F_API void f2f_view_free(f2f_view* v);
F2F_API f2f_status f2f_view_counts(const f2f_view* v, size_t* drivers, size_t* sinks, size_t* boxes);
/* key: driver stub id per sink stub id. */
F2F_API f2f_status f2f_view_apply_key(const f2f_view* v, const int* key, size_t key_len, f2f_netlist** out);
F2F_API f2f_status f2f_view_true_key(const f2f_view* v, const f2f_netlist* oracle, int* key, size_t key_len);

/* Attacks */

typedef struct f2f_proximity_options {
    const char* mode; /* NULL means the view's own mode */
    uint64_t seed;
    size_t patterns;
    int max_retries;
} f2f_proximity_options;

typedef struct f2f_proximity_result {
    double ccr;
    double hd;
    double runtime;
    int attempts;
    int box_correct[5];
} f2f_proximity_result;

F2F_API void f2f_proximity_options_init(f2f_proximity_options* options);
/* key may be NULL; otherwise it receives key_len entries. */
F2F_API f2f_status f2f_attack_proximity(const f2f_view* v, const f2f_netlist* oracle,
                                        const f2f_proximity_options* options, f2f_proximity_result* out,
                                        int* key, size_t key_len);

typedef struct f2f_sat_options {
    double timeout_seconds; /* <= 0 disables the limit */
    int permutation_constraints;
    size_t patterns;
    uint64_t seed;
} f2f_sat_options;

typedef struct f2f_sat_result {
    int key_found;
    size_t dips;
    size_t solver_calls;
    size_t cycles_blocked;
    int key_bits;
    double seconds;
    double ccr; /* valid when key_found */
    double hd;  /* valid when key_found */
} f2f_sat_result;

F2F_API void f2f_sat_options_init(f2f_sat_options* options);
F2F_API f2f_status f2f_attack_sat(const f2f_view* v, const f2f_netlist* oracle, const f2f_sat_options* options,
                                  f2f_sat_result* out);
F2F_API f2f_status f2f_miter_dimacs(const f2f_view* v, int permutation_constraints, char** out);

/* Metrics */

F2F_API f2f_status f2f_hamming_distance(const f2f_netlist* oracle, const f2f_netlist* candidate, size_t patterns,
                                        uint64_t seed, double* out);
F2F_API f2f_status f2f_solution_space(size_t d_bot, size_t d_top, int with_switchboxes, double* log10_count,
                                      double* log10_count_per_box);
F2F_API f2f_status f2f_lifting_fraction(double area_ratio, double* out);

#ifdef __cplusplus
}
#endif

#endif
