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

// adtomo command-line tool.
//
//   adtomo profile small --out configs/small.json
//   adtomo run --config configs/small.json --out out/
//   adtomo infer --config configs/small.json --in out/ --out out2/
//
// Exit codes: 0 ok, 2 usage or configuration error, 3 I/O error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "adtomo/adtomo.h"

namespace {

struct CommonOptions {
  std::string config;
  std::string profile;
  std::optional<uint64_t> seed;
  std::string out;
  std::string in;
};

void AddCommon(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "Pipeline configuration JSON");
  cmd->add_option("--profile", opts.profile,
                  "Built-in profile used instead of --config");
  cmd->add_option("--seed", opts.seed, "Overrides the configuration seed");
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_option("--in", opts.in,
                  "Directory stage inputs are read from (default: --out)");
}

int Fail(int status) {
  std::cerr << "adtomo: " << adtomo_last_error() << "\n";
  return status;
}

class PipelineHandle {
 public:
  ~PipelineHandle() { adtomo_pipeline_close(p_); }
  adtomo_pipeline** out() { return &p_; }
  adtomo_pipeline* get() const { return p_; }

 private:
  adtomo_pipeline* p_ = nullptr;
};

int Open(const CommonOptions& opts, PipelineHandle& handle) {
  if (opts.config.empty() == opts.profile.empty()) {
    std::cerr << "adtomo: exactly one of --config or --profile is required\n";
    return ADTOMO_ERROR_INVALID;
  }
  adtomo_status s =
      opts.config.empty()
          ? adtomo_pipeline_open_profile(opts.profile.c_str(), handle.out())
          : adtomo_pipeline_open_file(opts.config.c_str(), handle.out());
  if (s != ADTOMO_OK) return Fail(s);
  if (opts.seed.has_value()) {
    if ((s = adtomo_pipeline_set_seed(handle.get(), *opts.seed)) != ADTOMO_OK) {
      return Fail(s);
    }
  }
  if (!opts.out.empty()) {
    s = adtomo_pipeline_set_output_dir(handle.get(), opts.out.c_str());
    if (s != ADTOMO_OK) return Fail(s);
  }
  if (!opts.in.empty()) {
    s = adtomo_pipeline_set_input_dir(handle.get(), opts.in.c_str());
    if (s != ADTOMO_OK) return Fail(s);
  }
  return ADTOMO_OK;
}

int WriteOutput(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return ADTOMO_OK;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!(out << text)) {
    std::cerr << "adtomo: cannot write '" << path << "'\n";
    return ADTOMO_ERROR_IO;
  }
  return ADTOMO_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tracker to advertiser data-sharing inference from ad content"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(adtomo_version()));

  struct Stage {
    const char* name;
    const char* help;
    adtomo_status (*fn)(adtomo_pipeline*);
  };
  const Stage stages[] = {
      {"simulate", "Simulate the world and write ad, request and bid logs",
       adtomo_pipeline_simulate},
      {"syncdetect", "Detect cookie-sync pairs in the request log",
       adtomo_pipeline_syncdetect},
      {"flag", "Build vector records and flag changes against controls",
       adtomo_pipeline_flag},
      {"infer", "Train forests and infer tracker-advertiser edges",
       adtomo_pipeline_infer},
      {"evaluate", "Score the inference report against the planted graph",
       adtomo_pipeline_evaluate},
      {"run", "simulate, syncdetect, flag, infer and evaluate",
       adtomo_pipeline_run},
  };

  CommonOptions opts;
  const Stage* chosen = nullptr;
  for (const Stage& stage : stages) {
    CLI::App* cmd = app.add_subcommand(stage.name, stage.help);
    AddCommon(cmd, opts);
    cmd->callback([&chosen, &stage] { chosen = &stage; });
  }

  std::string documents;
  bool h1_chosen = false;
  CLI::App* h1 =
      app.add_subcommand("h1", "Interest-group ad similarity matrix");
  AddCommon(h1, opts);
  h1->add_option("--documents", documents,
                 "JSON-lines {key:{id,run}, tokens} documents to use instead "
                 "of the ad log");
  h1->callback([&h1_chosen] { h1_chosen = true; });

  std::string profile_name;
  bool profile_chosen = false;
  CLI::App* profile = app.add_subcommand(
      "profile", "Print a built-in configuration profile");
  profile->add_option("name", profile_name, "Profile name; omit to list");
  AddCommon(profile, opts);
  profile->callback([&profile_chosen] { profile_chosen = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "adtomo: " << e.what() << "\n\n" << app.help();
    return ADTOMO_ERROR_INVALID;
  }

  if (profile_chosen) {
    char* text = nullptr;
    adtomo_status s = profile_name.empty()
                          ? adtomo_profile_names(&text)
                          : adtomo_profile_json(profile_name.c_str(), &text);
    if (s != ADTOMO_OK) return Fail(s);
    std::string copy(text);
    adtomo_string_free(text);
    return WriteOutput(copy, opts.out);
  }

  PipelineHandle handle;
  if (int s = Open(opts, handle); s != ADTOMO_OK) return s;
  adtomo_status s;
  if (h1_chosen) {
    s = adtomo_pipeline_h1(handle.get(),
                           documents.empty() ? nullptr : documents.c_str());
  } else {
    s = chosen->fn(handle.get());
  }
  return s == ADTOMO_OK ? 0 : Fail(s);
}
