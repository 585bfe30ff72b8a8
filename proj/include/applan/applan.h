#ifndef APPLAN_H
#define APPLAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(APPLAN_BUILDING)
#define APPLAN_API __attribute__((visibility("default")))
#else
#define APPLAN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum applan_status {
    APPLAN_OK = 0,
    APPLAN_ERR_ARGUMENT = 1, /* null pointer or malformed argument */
    APPLAN_ERR_CONFIG = 2,
    APPLAN_ERR_NUMERIC = 3,
    APPLAN_ERR_TRANSPORT = 4,
    APPLAN_ERR_ABORTED = 5, /* agent loop gave up */
    APPLAN_ERR_IO = 6,
    APPLAN_ERR_INTERNAL = 7
} applan_status;

typedef struct applan_floorplan applan_floorplan;

typedef struct applan_floorplan_info {
    size_t rows;
    size_t cols;
    int level;
    double cell_size_m;
    double z_min;
    double z_max;
    size_t free_cells;
} applan_floorplan_info;

typedef struct applan_eval {
    double runtime_s;
    double coverage;
    double ior;
    double tqs_mbps;
    int success;
    double e_interference;
    double e_throughput;
    double e_separation;
    double e_boundary;
    double e_phy;
} applan_eval;

APPLAN_API const char* applan_version(void);
/* Message of the last failed call on this thread; "" after a success. */
APPLAN_API const char* applan_last_error(void);
APPLAN_API void applan_string_free(char* s);

APPLAN_API applan_status applan_floorplan_load_json(const char* json, applan_floorplan** out);
APPLAN_API applan_status applan_floorplan_load_file(const char* path, applan_floorplan** out);
/* spec is a path, {"synthetic": {...}}, {"builtin": name} or an inline grid document. */
APPLAN_API applan_status applan_floorplan_from_spec(const char* spec_json, const char* base_dir,
                                                    applan_floorplan** out);
APPLAN_API applan_status applan_floorplan_generate(int level, double width_m, double height_m, uint64_t seed,
                                                   double cell_size_m, applan_floorplan** out);
APPLAN_API applan_status applan_floorplan_to_json(const applan_floorplan* fp, char** out);
APPLAN_API applan_status applan_floorplan_get_info(const applan_floorplan* fp, applan_floorplan_info* out);
APPLAN_API applan_status applan_floorplan_is_feasible(const applan_floorplan* fp, double x, double y, double z,
                                                      int* out);
APPLAN_API void applan_floorplan_free(applan_floorplan* fp);

/* xyz holds n_aps triples. task_json carries task keys plus an optional "radio" object. */
APPLAN_API applan_status applan_evaluate(const applan_floorplan* fp, const double* xyz, size_t n_aps,
                                         const char* task_json, applan_eval* out);
APPLAN_API applan_status applan_exact_reward(const applan_floorplan* fp, const double* xyz, size_t n_aps,
                                             const char* task_json, double* out);

/*
 * Run-level entry points behind the command line. Each takes a request
 * document {"config": {...}, "base_dir": "...", "out": "...", "seed": n, ...}
 * and returns a JSON summary in *result_json (free with applan_string_free).
 * Files are written under "out" together with manifest.json. plan and agent
 * also return a summary when they fail, so check *result_json either way.
 */
APPLAN_API applan_status applan_gen_floorplan(const char* request_json, char** result_json);
APPLAN_API applan_status applan_simulate(const char* request_json, char** result_json);
APPLAN_API applan_status applan_plan(const char* request_json, char** result_json);
APPLAN_API applan_status applan_train_reward(const char* request_json, char** result_json);
APPLAN_API applan_status applan_bench(const char* request_json, char** result_json);
APPLAN_API applan_status applan_ablate(const char* request_json, char** result_json);
APPLAN_API applan_status applan_agent(const char* request_json, char** result_json);

#ifdef __cplusplus
}
#endif

#endif
