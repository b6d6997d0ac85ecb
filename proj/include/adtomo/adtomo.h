// Copyright 2026 The Adtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the adtomo library.
 *
 * Functions return an adtomo_status code. On failure, adtomo_last_error()
 * describes the most recent error on the calling thread. Strings returned
 * through `char**` out-parameters are owned by the caller and released with
 * adtomo_string_free().
 */

#ifndef ADTOMO_ADTOMO_H_
#define ADTOMO_ADTOMO_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ADTOMO_API __declspec(dllexport)
#else
#define ADTOMO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum adtomo_status {
  ADTOMO_OK = 0,
  ADTOMO_ERROR_INTERNAL = 1,
  /* Invalid configuration, arguments, or stage order. */
  ADTOMO_ERROR_INVALID = 2,
  /* A file could not be read or written. */
  ADTOMO_ERROR_IO = 3,
} adtomo_status;

typedef struct adtomo_pipeline adtomo_pipeline;

typedef struct adtomo_test_result {
  double statistic;
  double df;
  double p_value;
  int degenerate;
} adtomo_test_result;

ADTOMO_API const char* adtomo_version(void);
ADTOMO_API const char* adtomo_last_error(void);
ADTOMO_API void adtomo_string_free(char* s);

/* Newline-separated names accepted by adtomo_pipeline_open_profile. */
ADTOMO_API adtomo_status adtomo_profile_names(char** out);
/* Pretty-printed configuration JSON for a built-in profile. */
ADTOMO_API adtomo_status adtomo_profile_json(const char* name, char** out);

ADTOMO_API adtomo_status adtomo_pipeline_open_file(const char* path,
                                                   adtomo_pipeline** out);
ADTOMO_API adtomo_status adtomo_pipeline_open_json(const char* json,
                                                   adtomo_pipeline** out);
ADTOMO_API adtomo_status adtomo_pipeline_open_profile(const char* name,
                                                      adtomo_pipeline** out);
ADTOMO_API void adtomo_pipeline_close(adtomo_pipeline* pipeline);

ADTOMO_API adtomo_status adtomo_pipeline_set_seed(adtomo_pipeline* pipeline,
                                                  uint64_t seed);
ADTOMO_API adtomo_status adtomo_pipeline_set_output_dir(
    adtomo_pipeline* pipeline, const char* dir);
/* Directory stage inputs are read from; defaults to the output directory. */
ADTOMO_API adtomo_status adtomo_pipeline_set_input_dir(
    adtomo_pipeline* pipeline, const char* dir);
/* Resolved configuration as pretty-printed JSON. */
ADTOMO_API adtomo_status adtomo_pipeline_config_json(
    const adtomo_pipeline* pipeline, char** out);

ADTOMO_API adtomo_status adtomo_pipeline_simulate(adtomo_pipeline* pipeline);
ADTOMO_API adtomo_status adtomo_pipeline_syncdetect(adtomo_pipeline* pipeline);
ADTOMO_API adtomo_status adtomo_pipeline_flag(adtomo_pipeline* pipeline);
ADTOMO_API adtomo_status adtomo_pipeline_infer(adtomo_pipeline* pipeline);
ADTOMO_API adtomo_status adtomo_pipeline_evaluate(adtomo_pipeline* pipeline);
/* documents_path may be NULL to use the simulated ad log. */
ADTOMO_API adtomo_status adtomo_pipeline_h1(adtomo_pipeline* pipeline,
                                            const char* documents_path);
ADTOMO_API adtomo_status adtomo_pipeline_run(adtomo_pipeline* pipeline);

/* Chi-square test of independence on a 2 x n table of counts. */
ADTOMO_API adtomo_status adtomo_chi_square(const double* row_a,
                                           const double* row_b, size_t n,
                                           double min_expected,
                                           adtomo_test_result* out);
ADTOMO_API adtomo_status adtomo_welch_t(const double* a, size_t na,
                                        const double* b, size_t nb,
                                        adtomo_test_result* out);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* ADTOMO_ADTOMO_H_ */
