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

#include "adtomo/adtomo.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <span>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_join.h"
#include "adtomo/config.h"
#include "adtomo/pipeline.h"
#include "adtomo/profiles.h"
#include "adtomo/stattest.h"

struct adtomo_pipeline {
  explicit adtomo_pipeline(adtomo::PipelineConfig config)
      : pipeline(std::move(config)) {}
  adtomo::Pipeline pipeline;
};

namespace {

thread_local std::string last_error;

adtomo_status Report(const absl::Status& status) {
  if (status.ok()) {
    last_error.clear();
    return ADTOMO_OK;
  }
  last_error = std::string(status.message());
  return static_cast<adtomo_status>(adtomo::ExitCodeFor(status));
}

adtomo_status Invalid(const char* message) {
  return Report(absl::InvalidArgumentError(message));
}

// Exceptions never cross the C boundary.
template <typename Fn>
adtomo_status Guard(Fn fn) {
  try {
    return fn();
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  }
  return ADTOMO_ERROR_INTERNAL;
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

adtomo_status Open(absl::StatusOr<adtomo::PipelineConfig> config,
                   adtomo_pipeline** out) {
  if (!config.ok()) return Report(config.status());
  *out = new adtomo_pipeline(*std::move(config));
  return Report(absl::OkStatus());
}

void Fill(const adtomo::stats::TestResult& r, adtomo_test_result* out) {
  out->statistic = r.statistic;
  out->df = r.df;
  out->p_value = r.p_value;
  out->degenerate = r.degenerate ? 1 : 0;
}

}  // namespace

extern "C" {

const char* adtomo_version(void) { return "0.1.0"; }

const char* adtomo_last_error(void) { return last_error.c_str(); }

void adtomo_string_free(char* s) { std::free(s); }

adtomo_status adtomo_profile_names(char** out) {
  if (out == nullptr) return Invalid("out must not be null");
  return Guard([&] {
    *out = CopyString(absl::StrJoin(adtomo::ProfileNames(), "\n") + "\n");
    return Report(absl::OkStatus());
  });
}

adtomo_status adtomo_profile_json(const char* name, char** out) {
  if (name == nullptr || out == nullptr) {
    return Invalid("name and out must not be null");
  }
  return Guard([&] {
    auto config = adtomo::Profile(name);
    if (!config.ok()) return Report(config.status());
    *out = CopyString(adtomo::PipelineConfigToJson(*config).dump(2) + "\n");
    return Report(absl::OkStatus());
  });
}

adtomo_status adtomo_pipeline_open_file(const char* path,
                                        adtomo_pipeline** out) {
  if (path == nullptr || out == nullptr) {
    return Invalid("path and out must not be null");
  }
  return Guard([&] { return Open(adtomo::LoadPipelineConfig(path), out); });
}

adtomo_status adtomo_pipeline_open_json(const char* json,
                                        adtomo_pipeline** out) {
  if (json == nullptr || out == nullptr) {
    return Invalid("json and out must not be null");
  }
  return Guard(
      [&] { return Open(adtomo::ParsePipelineConfigText(json), out); });
}

adtomo_status adtomo_pipeline_open_profile(const char* name,
                                           adtomo_pipeline** out) {
  if (name == nullptr || out == nullptr) {
    return Invalid("name and out must not be null");
  }
  return Guard([&] { return Open(adtomo::Profile(name), out); });
}

void adtomo_pipeline_close(adtomo_pipeline* pipeline) { delete pipeline; }

adtomo_status adtomo_pipeline_set_seed(adtomo_pipeline* pipeline,
                                       uint64_t seed) {
  if (pipeline == nullptr) return Invalid("pipeline must not be null");
  pipeline->pipeline.set_seed(seed);
  return Report(absl::OkStatus());
}

adtomo_status adtomo_pipeline_set_output_dir(adtomo_pipeline* pipeline,
                                             const char* dir) {
  if (pipeline == nullptr || dir == nullptr || *dir == '\0') {
    return Invalid("pipeline and a non-empty dir are required");
  }
  return Guard([&] {
    pipeline->pipeline.set_output_dir(dir);
    return Report(absl::OkStatus());
  });
}

adtomo_status adtomo_pipeline_set_input_dir(adtomo_pipeline* pipeline,
                                            const char* dir) {
  if (pipeline == nullptr || dir == nullptr || *dir == '\0') {
    return Invalid("pipeline and a non-empty dir are required");
  }
  return Guard([&] {
    pipeline->pipeline.set_input_dir(dir);
    return Report(absl::OkStatus());
  });
}

adtomo_status adtomo_pipeline_config_json(const adtomo_pipeline* pipeline,
                                          char** out) {
  if (pipeline == nullptr || out == nullptr) {
    return Invalid("pipeline and out must not be null");
  }
  return Guard([&] {
    *out = CopyString(
        adtomo::PipelineConfigToJson(pipeline->pipeline.config()).dump(2) +
        "\n");
    return Report(absl::OkStatus());
  });
}

#define ADTOMO_STAGE(name, call)                                  \
  adtomo_status name(adtomo_pipeline* pipeline) {                 \
    if (pipeline == nullptr) return Invalid("pipeline must not be null"); \
    return Guard([&] { return Report(pipeline->pipeline.call()); }); \
  }

ADTOMO_STAGE(adtomo_pipeline_simulate, Simulate)
ADTOMO_STAGE(adtomo_pipeline_syncdetect, SyncDetect)
ADTOMO_STAGE(adtomo_pipeline_flag, Flag)
ADTOMO_STAGE(adtomo_pipeline_infer, Infer)
ADTOMO_STAGE(adtomo_pipeline_evaluate, Evaluate)
ADTOMO_STAGE(adtomo_pipeline_run, Run)

#undef ADTOMO_STAGE

adtomo_status adtomo_pipeline_h1(adtomo_pipeline* pipeline,
                                 const char* documents_path) {
  if (pipeline == nullptr) return Invalid("pipeline must not be null");
  return Guard([&] {
    std::optional<std::string> path;
    if (documents_path != nullptr) path = documents_path;
    return Report(pipeline->pipeline.H1(path));
  });
}

adtomo_status adtomo_chi_square(const double* row_a, const double* row_b,
                                size_t n, double min_expected,
                                adtomo_test_result* out) {
  if (row_a == nullptr || row_b == nullptr || out == nullptr) {
    return Invalid("rows and out must not be null");
  }
  return Guard([&] {
    adtomo::stats::StatConfig config;
    config.min_expected = min_expected;
    auto r = adtomo::stats::ChiSquareIndependence(
        std::span<const double>(row_a, n), std::span<const double>(row_b, n),
        config);
    if (!r.ok()) return Report(r.status());
    Fill(*r, out);
    return Report(absl::OkStatus());
  });
}

adtomo_status adtomo_welch_t(const double* a, size_t na, const double* b,
                             size_t nb, adtomo_test_result* out) {
  if (a == nullptr || b == nullptr || out == nullptr) {
    return Invalid("samples and out must not be null");
  }
  return Guard([&] {
    auto r = adtomo::stats::WelchTTest(std::span<const double>(a, na),
                                       std::span<const double>(b, nb));
    if (!r.ok()) return Report(r.status());
    Fill(*r, out);
    return Report(absl::OkStatus());
  });
}

}  // extern "C"
