// Copyright 2026 The segkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// segkit: command-line front end of the segkit library.

#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "json.hpp"
#include "segkit/errors.hpp"

namespace {

using segkit::cli::Context;
using segkit::cli::Subcommand;

// Config file: a JSON object. Top-level scalars and arrays set global
// options; a nested object named after a subcommand sets its options. Keys
// are long option names without the leading dashes.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool,
                        std::string) const override {
    nlohmann::ordered_json j = Collect(app, default_also);
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file: top level must be an object");
    std::vector<CLI::ConfigItem> items;
    Flatten(j, {}, items);
    return items;
  }

 private:
  static std::string Scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void Flatten(const nlohmann::json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        Flatten(value, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(Scalar(v));
      } else {
        item.inputs.push_back(Scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static nlohmann::ordered_json Collect(const CLI::App* app, bool default_also) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
      const std::string& name = opt->get_lnames().front();
      if (name == "help" || name == "config") continue;
      std::vector<std::string> values = opt->reduced_results();
      if (values.empty() && default_also && !opt->get_default_str().empty()) {
        values.push_back(opt->get_default_str());
      }
      if (values.empty()) continue;
      if (values.size() == 1) {
        j[name] = values.front();
      } else {
        j[name] = values;
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      auto child = Collect(sub, default_also);
      if (!child.empty()) j[sub->get_name()] = std::move(child);
    }
    return j;
  }
};

int ExitCodeFor(const std::exception& e) {
  using namespace segkit;
  if (dynamic_cast<const PredictorError*>(&e)) return cli::kExitPredictor;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const InversionError*>(&e) ||
      dynamic_cast<const ScheduleError*>(&e) || dynamic_cast<const EvaluationError*>(&e)) {
    return cli::kExitData;
  }
  return cli::kExitParse;
}

constexpr const char* kFooter = R"(Configuration: flags override values from --config, which override the
builtin defaults. The config file is a JSON object; top-level keys set global
options and an object named after a subcommand sets that subcommand's options,
e.g. {"seed": 7, "tta": {"ratios": [1.0], "no-flip": true}}.

Exit codes:
  0  success
  1  verification warning (only with --strict)
  2  parse error, invalid arguments or unreadable input
  3  data error (invalid pixel values, schedule or evaluation failure)
  4  predictor error)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segkit: multi-dataset semantic segmentation data pipeline"};
  app.footer(kFooter);
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();

  Context ctx;
  auto& g = ctx.global;
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("--catalog", g.catalog_path, "dataset catalog JSON (default: builtin)");
  app.add_option("--mapping-dir", g.mapping_dir, "directory holding <dataset>.csv mappings");
  app.add_option("--unified-space", g.unified_path,
                 "unified label space CSV (default: generic 256-class space)");
  app.add_option("--seed", g.seed, "random seed");
  app.add_flag("--strict", g.strict, "turn verification warnings into exit code 1");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--output-dir", g.output_dir, "base directory for relative output paths");

  std::vector<Subcommand> subs = {
      segkit::cli::add_validate_mapping(app), segkit::cli::add_remap(app),
      segkit::cli::add_manifest(app),         segkit::cli::add_plan(app),
      segkit::cli::add_augment(app),          segkit::cli::add_tta(app),
      segkit::cli::add_evaluate(app),         segkit::cli::add_stats(app),
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? segkit::cli::kExitOk : segkit::cli::kExitParse;
  }

  for (const auto& sub : subs) {
    if (!sub.app->parsed()) continue;
    try {
      return sub.run(ctx);
    } catch (const std::exception& e) {
      std::cerr << "segkit " << sub.app->get_name() << ": error: " << e.what() << '\n';
      return ExitCodeFor(e);
    }
  }
  return segkit::cli::kExitParse;
}
