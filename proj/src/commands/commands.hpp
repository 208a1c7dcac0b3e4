#ifndef FB_COMMANDS_COMMANDS_HPP
#define FB_COMMANDS_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>

namespace fb {

// Command-line overrides applied on top of the JSON config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> mstop;
  std::optional<std::string> method;
};

// Each command reads a JSON config, performs the work and writes its outputs
// under `out_dir`; errors surface as the library's exception hierarchy.
void cmd_fit(const std::string& config_path, const std::string& data_path,
             const std::string& out_dir, const Overrides& overrides);
void cmd_predict(const std::string& config_path, const std::string& data_path,
                 const std::string& out_dir, const Overrides& overrides);
void cmd_cv(const std::string& config_path, const std::string& data_path,
            const std::string& out_dir, const Overrides& overrides);
void cmd_simulate(const std::string& config_path, const std::string& out_dir,
                  const Overrides& overrides);
void cmd_evaluate(const std::string& config_path, const std::string& data_path,
                  const std::string& out_dir, const Overrides& overrides);

// Verbosity from the FUNBOOST_LOG environment variable (0 = silent).
int log_level();

}  // namespace fb

#endif
