#ifndef DIRLAB_DIRLAB_H
#define DIRLAB_DIRLAB_H

/*
 * C interface to dirlab.
 *
 * Every function returns a dirlab_status. On failure a message is available
 * from dirlab_last_error() until the next call on the same thread. Strings
 * returned through char** parameters are owned by the caller and released
 * with dirlab_string_free(). Point sets are opaque handles released with
 * dirlab_pointset_free().
 *
 * Mass arrays may be NULL, meaning uniform masses 1/n held exactly.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define DIRLAB_API __attribute__((visibility("default")))
#else
#define DIRLAB_API
#endif

typedef enum dirlab_status {
  DIRLAB_OK = 0,
  DIRLAB_INVALID_ARGUMENT = 1,
  DIRLAB_DEGENERATE_PAIR = 2,
  DIRLAB_VERTICAL_PAIR = 3,
  DIRLAB_SIZE_LIMIT = 4,
  DIRLAB_PRECONDITION_FAILED = 5,
  DIRLAB_NOT_SEPARATED = 6,
  DIRLAB_DEPTH_EXHAUSTED = 7,
  DIRLAB_WRONG_DIMENSION = 8,
  DIRLAB_MODE_MISMATCH = 9,
  DIRLAB_PARSE = 10,
  DIRLAB_IO = 11,
  DIRLAB_INTERNAL = 12
} dirlab_status;

typedef struct dirlab_pointset dirlab_pointset;

DIRLAB_API const char* dirlab_version(void);
DIRLAB_API const char* dirlab_status_name(dirlab_status status);
DIRLAB_API const char* dirlab_last_error(void);
DIRLAB_API void dirlab_string_free(char* s);

/* Point sets. Text format: a header line "d n exact|float" followed by n
 * rows of d coordinates; '#' starts a comment line. */
DIRLAB_API dirlab_status dirlab_pointset_parse(const char* text, dirlab_pointset** out);
DIRLAB_API dirlab_status dirlab_pointset_read(const char* path, dirlab_pointset** out);
DIRLAB_API dirlab_status dirlab_pointset_write(const dirlab_pointset* set, const char* path);
DIRLAB_API dirlab_status dirlab_pointset_serialize(const dirlab_pointset* set, char** out);
DIRLAB_API dirlab_status dirlab_pointset_from_doubles(int d, size_t n, const double* coords,
                                                      dirlab_pointset** out);
DIRLAB_API void dirlab_pointset_free(dirlab_pointset* set);
DIRLAB_API size_t dirlab_pointset_size(const dirlab_pointset* set);
DIRLAB_API int dirlab_pointset_dimension(const dirlab_pointset* set);
DIRLAB_API int dirlab_pointset_is_exact(const dirlab_pointset* set);
/* Copies n*d coordinates (row-major, rounded to double) into out. */
DIRLAB_API dirlab_status dirlab_pointset_coords(const dirlab_pointset* set, double* out, size_t capacity);

/* Generators. All outputs are exact and lie in [0,1]^d. */
DIRLAB_API dirlab_status dirlab_generate_lattice(int q, int d, dirlab_pointset** out);
DIRLAB_API dirlab_status dirlab_generate_garnett(int depth, dirlab_pointset** out);
/* maps_json: {"d": 2, "maps": [{"ratio": "1/3", "offset": ["0", "2/3"]}, ...]} */
DIRLAB_API dirlab_status dirlab_generate_ifs(const char* maps_json, int depth, dirlab_pointset** out);
DIRLAB_API dirlab_status dirlab_generate_hyperplane(int d, size_t n, dirlab_pointset** out);
DIRLAB_API dirlab_status dirlab_generate_graph(int d, size_t n, dirlab_pointset** out);
/* Product Cantor set whose dimension approximates s (d-1 < s <= d). */
DIRLAB_API dirlab_status dirlab_generate_cantor(int d, double s, int depth, dirlab_pointset** out);
DIRLAB_API dirlab_status dirlab_generate_cantor_preset(int d, int copies, int base, int depth,
                                                       dirlab_pointset** out);

/* Directions. */
DIRLAB_API dirlab_status dirlab_primitive_count(int q, int d, uint64_t* out);
DIRLAB_API dirlab_status dirlab_directions_count(const dirlab_pointset* set, int antipodal, size_t* out);
/* JSON with the sorted direction keys. */
DIRLAB_API dirlab_status dirlab_directions_list(const dirlab_pointset* set, int antipodal, char** json);
/* JSON summary per epsilon; csv (nullable) gets "epsilon,cell,hits" rows. */
DIRLAB_API dirlab_status dirlab_directions_coverage(const dirlab_pointset* set, const double* eps,
                                                    size_t n_eps, int antipodal, unsigned threads,
                                                    char** json, char** csv);
DIRLAB_API dirlab_status dirlab_directions_pps(const dirlab_pointset* set, char** json);
DIRLAB_API dirlab_status dirlab_directions_separate(const dirlab_pointset* set, double delta, char** json);

/* Measures. c <= 0 and constant <= 0 select the documented defaults. */
DIRLAB_API dirlab_status dirlab_measure_energy(const dirlab_pointset* set, const double* masses, double s,
                                               unsigned threads, double* out);
DIRLAB_API dirlab_status dirlab_measure_adaptable(const dirlab_pointset* set, double s, double constant,
                                                  unsigned threads, char** json);
DIRLAB_API dirlab_status dirlab_measure_frostman(const dirlab_pointset* set, const double* masses, double s,
                                                 int depth, double* out);
DIRLAB_API dirlab_status dirlab_measure_split(const dirlab_pointset* set, const double* masses, double c,
                                              int max_depth, char** json);
/* JSON header (epsilon, pitch, masses, integrals); csv (nullable) gets the
 * t-coordinates and value of every grid cell. */
DIRLAB_API dirlab_status dirlab_measure_nueps(const dirlab_pointset* set1, const double* masses1,
                                              const dirlab_pointset* set2, const double* masses2,
                                              double eps, double pitch, unsigned threads, char** json,
                                              char** csv);
DIRLAB_API dirlab_status dirlab_measure_bounds(const dirlab_pointset* set, const double* masses, double s,
                                               const double* eps, size_t n_eps, double c, int max_depth,
                                               unsigned threads, char** json);

/* Experiments. Runs every section of the config; writes reports under
 * out_dir when it is not NULL. seed_given = 0 keeps the config's seed.
 * summary gets a JSON array of the reports. */
DIRLAB_API dirlab_status dirlab_experiment_run(const char* config_path, const char* out_dir, unsigned threads,
                                               uint64_t seed, int seed_given, int* all_pass, char** summary);

#ifdef __cplusplus
}
#endif

#endif /* DIRLAB_DIRLAB_H */
