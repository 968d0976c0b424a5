// tools/maskfuse.cpp

// Copyright 2026 The maskfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 success, 2 usage error,
// 3 data/format error, 4 numeric failure.

#include <cctype>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "maskfuse/commands.hpp"
#include "maskfuse/common.hpp"
#include "maskfuse/config.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string flag_name(const std::string& key) {
  std::string dashed = key;
  for (auto& c : dashed) {
    if (c == '_') c = '-';
  }
  return dashed == key ? "--" + key : "--" + dashed + ",--" + key;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace maskfuse;

  CLI::App app{"maskfuse: T-F mask estimation, fusion and evaluation"};
  app.require_subcommand(1);

  struct Bound {
    CLI::App* sub = nullptr;
    std::string config_path;
    std::map<std::string, std::string> flags;
    std::map<std::string, std::string> positional;
    std::map<std::string, CLI::Option*> flag_opts;
    std::map<std::string, CLI::Option*> positional_opts;
  };
  std::map<std::string, Bound> bound;

  for (const auto& spec : app::command_specs()) {
    auto& b = bound[spec.name];
    b.sub = app.add_subcommand(spec.name, spec.description);
    b.sub->add_option("--config", b.config_path, "key = value settings file");
    for (const auto& key : spec.positionals) {
      std::string upper = key;
      for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      b.positional_opts[key] = b.sub->add_option(upper, b.positional[key], key);
    }
    for (const auto& key : spec.keys) {
      if (key == "oracle") {
        // Bare switch; the config file spells it `oracle = true`.
        b.flags[key] = "true";
        b.flag_opts[key] = b.sub->add_flag("--oracle", "use oracle masks, no checkpoint");
        continue;
      }
      b.flag_opts[key] = b.sub->add_option(flag_name(key), b.flags[key], key);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (auto& [name, b] : bound) {
      if (!b.sub->parsed()) continue;
      Config cfg;
      if (!b.config_path.empty()) cfg = Config::load_file(b.config_path);
      for (const auto& [key, opt] : b.positional_opts) {
        if (opt->count()) cfg.set(key, b.positional[key]);
      }
      // Flags are applied last so they override both the file and positionals.
      for (const auto& [key, opt] : b.flag_opts) {
        if (opt->count()) cfg.set(key, b.flags[key]);
      }
      app::run_command(name, cfg, std::cout);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedFeature& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvalidArgument& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const InternalError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
